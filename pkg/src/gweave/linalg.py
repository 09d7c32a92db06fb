"""Dense complex linear algebra with an explicit tolerance contract.

Every routine in this module works on 2-D ``numpy`` arrays of
``complex128``.  Inputs are validated once (finite entries, expected
shape), and all rank / positivity decisions are driven by a shared
:class:`Tolerance`, so spectral classifications are reproducible across
the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_matrix",
    "hermitian_extremes",
    "singular_extremes",
    "pinv",
    "op_norm",
    "rank",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds shared by every spectral decision.

    Parameters
    ----------
    rank_rtol
        Relative threshold for rank decisions; singular values are compared
        against ``rank_rtol * sigma_max * max(rows, cols)``.
    frame_rtol
        Relative threshold deciding whether a lower spectral bound counts as
        strictly positive (lower > ``frame_rtol`` * upper).
    eq_atol
        Absolute tolerance for equality and inequality-margin checks.
    """

    rank_rtol: float = 1e-10
    frame_rtol: float = 1e-10
    eq_atol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rtol", "frame_rtol", "eq_atol"):
            value = float(getattr(self, name))
            if not (0.0 < value <= 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2], got {value!r}")
            object.__setattr__(self, name, value)

    def as_dict(self) -> dict:
        return {
            "rank_rtol": self.rank_rtol,
            "frame_rtol": self.frame_rtol,
            "eq_atol": self.eq_atol,
        }


DEFAULT_TOL = Tolerance()


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a 2-D complex128 array and validate its entries.

    Raises ``ValueError`` for empty or non-2-D input and for NaN/Inf
    entries.  The returned array may share memory with the input; callers
    that store it long-term should copy.
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.size == 0:
        raise ValueError("matrix must have at least one row and one column")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return m


def hermitian_extremes(m, tol: Tolerance = DEFAULT_TOL) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a Hermitian matrix.

    The input is symmetrized as ``(M + M*) / 2`` before decomposition;
    asymmetry beyond ``eq_atol`` is rejected rather than silently averaged
    away.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    drift = float(np.max(np.abs(m - m.conj().T)))
    if drift > tol.eq_atol:
        raise ValueError(
            f"matrix is not Hermitian within eq_atol ({drift:.3e} > {tol.eq_atol:.3e})"
        )
    w = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
    return float(w[0]), float(w[-1])


def singular_extremes(m) -> tuple[float, float]:
    """Smallest and largest singular value; the smallest is taken over the
    ``min(rows, cols)`` singular values of the matrix."""
    m = as_matrix(m)
    s = np.linalg.svd(m, compute_uv=False)
    return float(s[-1]), float(s[0])


def pinv(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse.

    Singular values below ``rank_rtol * sigma_max`` are treated as zero, so
    the zero matrix maps to the zero matrix and near-singular directions do
    not blow up.
    """
    m = as_matrix(m)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    cutoff = tol.rank_rtol * (float(s[0]) if s.size else 0.0)
    inv = np.zeros_like(s)
    np.divide(1.0, s, out=inv, where=s > cutoff)
    return (vh.conj().T * inv) @ u.conj().T


def op_norm(m) -> float:
    """Operator (spectral) norm, i.e. the largest singular value."""
    return singular_extremes(m)[1]


def rank(m, tol: Tolerance = DEFAULT_TOL) -> int:
    """Numerical rank: singular values above ``rank_rtol * sigma_max * max(rows, cols)``."""
    m = as_matrix(m)
    s = np.linalg.svd(m, compute_uv=False)
    threshold = tol.rank_rtol * float(s[0]) * max(m.shape)
    return int(np.count_nonzero(s > threshold))
