"""Partition engine and weaving certification.

A family of ``m`` g-frames sharing index set and block dimensions can be
*woven*: pick one member per index (a partition of the index set into m
labelled groups) and ask whether every such mixed family is again a
g-frame with common bounds.  This module enumerates the ``m**N``
partitions (exhaustively or by seeded sampling), reports the universal
bounds with witness partitions, and provides the structural operations
used by the certification theorems: scaling, index removal and
restriction, the Bessel-sum upper bound, and the restricted frame-operator
norm inequality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gframe import GFrame, frame_bounds, frame_operator
from .linalg import DEFAULT_TOL, Tolerance, hermitian_extremes

__all__ = [
    "DEFAULT_BUDGET",
    "BudgetExceededError",
    "Partition",
    "GFrameFamily",
    "WeavingReport",
    "RemovalReport",
    "assemble_weaving",
    "certify_woven",
    "span_criterion",
    "bessel_sum_bound",
    "scaled_family",
    "removal_bound",
    "frame_op_norm_check",
    "restrict_family",
]

DEFAULT_BUDGET = 1_000_000
_CHUNK = 8192


class BudgetExceededError(RuntimeError):
    """Raised when exhaustive enumeration would exceed the partition budget."""


@dataclass(frozen=True)
class Partition:
    """Assignment of each index ``i`` (1..N) to a weave label in 1..m.

    Labels are 1-based; empty groups are permitted.
    """

    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if not labels:
            raise ValueError("a partition needs at least one index")
        if any(x < 1 for x in labels):
            raise ValueError("labels are 1-based and must be >= 1")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    def group(self, label: int) -> tuple[int, ...]:
        """1-based indices assigned to ``label``."""
        return tuple(i + 1 for i, x in enumerate(self.labels) if x == label)


@dataclass(frozen=True, eq=False)
class GFrameFamily:
    """``m >= 2`` g-frames sharing ambient dimension, index count and block dims.

    Members are checked to classify as g-frames at construction (with the
    default tolerance); pass ``allow_degenerate=True`` for deliberately
    degenerate studies such as restricted families.
    """

    frames: tuple[GFrame, ...]
    allow_degenerate: bool = False

    def __post_init__(self):
        frames = tuple(self.frames)
        if len(frames) < 2:
            raise ValueError("a family needs at least two member g-frames")
        first = frames[0]
        for j, fr in enumerate(frames[1:], start=2):
            if fr.ambient_dim != first.ambient_dim:
                raise ValueError(f"member {j}: ambient_dim differs from member 1")
            if fr.block_dims != first.block_dims:
                raise ValueError(f"member {j}: block dimensions differ from member 1")
        if not self.allow_degenerate:
            for j, fr in enumerate(frames, start=1):
                fb = frame_bounds(fr)
                if not fb.is_frame:
                    raise ValueError(
                        f"member {j} classifies as {fb.classification!r}; "
                        "pass allow_degenerate=True for degenerate studies"
                    )
        object.__setattr__(self, "frames", frames)

    @property
    def m(self) -> int:
        return len(self.frames)

    @property
    def ambient_dim(self) -> int:
        return self.frames[0].ambient_dim

    @property
    def n_indices(self) -> int:
        return self.frames[0].n_blocks

    @property
    def block_dims(self) -> tuple[int, ...]:
        return self.frames[0].block_dims

    @property
    def coeff_dim(self) -> int:
        return self.frames[0].coeff_dim


@dataclass(frozen=True)
class WeavingReport:
    """Outcome of a weaving certification run.

    ``status`` is ``"woven"`` (exhaustive only), ``"not-woven"`` or
    ``"sampled-no-counterexample"``.  The witnesses achieve the reported
    universal bounds; ties are broken by the lexicographically smallest
    label vector.
    """

    status: str
    universal_lower: float
    universal_upper: float
    witness_lower: Partition
    witness_upper: Partition
    partitions_checked: int
    mode: str
    seed: int | None

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "universal_lower": self.universal_lower,
            "universal_upper": self.universal_upper,
            "witness_lower": list(self.witness_lower.labels),
            "witness_upper": list(self.witness_upper.labels),
            "partitions_checked": self.partitions_checked,
            "mode": self.mode,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class RemovalReport:
    """Outcome of dropping an index subset from a two-member family."""

    restricted: GFrameFamily
    dropped: tuple[int, ...]
    removed_upper: float
    base_lower: float
    base_upper: float
    predicted_lower: float
    hypothesis_ok: bool


def _validate_labels(fam: GFrameFamily, p: Partition) -> np.ndarray:
    if len(p.labels) != fam.n_indices:
        raise ValueError(
            f"partition length {len(p.labels)} does not match index count {fam.n_indices}"
        )
    labels0 = np.asarray(p.labels, dtype=np.int64) - 1
    if labels0.max() >= fam.m:
        raise ValueError(f"label {labels0.max() + 1} out of range for m = {fam.m}")
    return labels0


def assemble_weaving(fam: GFrameFamily, p: Partition) -> GFrame:
    """The g-frame taking block ``i`` from member ``labels[i]``."""
    labels0 = _validate_labels(fam, p)
    blocks = tuple(fam.frames[l].blocks[i] for i, l in enumerate(labels0))
    return GFrame(fam.ambient_dim, blocks)


def _gram_tensor(fam: GFrameFamily) -> np.ndarray:
    """Per-(index, member) Gram terms ``block* block``; shape (N, m, n, n)."""
    n, big_n, m = fam.ambient_dim, fam.n_indices, fam.m
    g = np.empty((big_n, m, n, n), dtype=np.complex128)
    for j, fr in enumerate(fam.frames):
        for i, b in enumerate(fr.blocks):
            g[i, j] = b.conj().T @ b
    return g


def _decode_codes(codes: np.ndarray, m: int, big_n: int) -> np.ndarray:
    """Base-m digits of each code, most significant first (lexicographic order)."""
    out = np.empty((codes.size, big_n), dtype=np.int64)
    for i in range(big_n):
        out[:, i] = (codes // m ** (big_n - 1 - i)) % m
    return out


def _weaving_spectra(grams: np.ndarray, labels0: np.ndarray) -> np.ndarray:
    """Eigenvalues of the weaving frame operators for a batch of label rows."""
    big_n = grams.shape[0]
    s = grams[np.arange(big_n), labels0].sum(axis=1)
    return np.linalg.eigvalsh(s)


def _partition_of(labels0) -> Partition:
    return Partition(tuple(int(x) + 1 for x in labels0))


def certify_woven(
    fam: GFrameFamily,
    mode: str = "exhaustive",
    budget: int = DEFAULT_BUDGET,
    seed: int | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> WeavingReport:
    """Certify whether the family is woven.

    Exhaustive mode enumerates all ``m**N`` partitions (requires
    ``m**N <= budget``) and reports the true universal bounds; the woven
    verdict is ``universal_lower > frame_rtol * universal_upper``.  Sampled
    mode draws ``budget`` partitions from a seeded generator and can only
    falsify: it returns ``not-woven`` with a witness, or the explicitly
    weaker ``sampled-no-counterexample``.
    """
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"mode must be 'exhaustive' or 'sampled', got {mode!r}")
    grams = _gram_tensor(fam)
    m, big_n = fam.m, fam.n_indices

    best_low = np.inf
    best_up = -np.inf
    wit_low = None
    wit_up = None

    if mode == "exhaustive":
        total = m**big_n
        if total > budget:
            raise BudgetExceededError(
                f"exhaustive certification needs {m}^{big_n} = {total} weavings, "
                f"budget is {budget}"
            )
        for start in range(0, total, _CHUNK):
            codes = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
            labels0 = _decode_codes(codes, m, big_n)
            w = _weaving_spectra(grams, labels0)
            i = int(np.argmin(w[:, 0]))
            if w[i, 0] < best_low:
                best_low, wit_low = float(w[i, 0]), labels0[i].copy()
            i = int(np.argmax(w[:, -1]))
            if w[i, -1] > best_up:
                best_up, wit_up = float(w[i, -1]), labels0[i].copy()
        checked = total
        status = "woven" if best_low > tol.frame_rtol * best_up else "not-woven"
    else:
        rng = np.random.default_rng(seed)
        checked = 0
        failed = False
        while checked < budget and not failed:
            take = min(_CHUNK, budget - checked)
            labels0 = rng.integers(0, m, size=(take, big_n))
            w = _weaving_spectra(grams, labels0)
            bad = w[:, 0] <= tol.frame_rtol * w[:, -1]
            stop = int(np.argmax(bad)) + 1 if bad.any() else take
            for i in range(stop):
                if w[i, 0] < best_low:
                    best_low, wit_low = float(w[i, 0]), labels0[i].copy()
                if w[i, -1] > best_up:
                    best_up, wit_up = float(w[i, -1]), labels0[i].copy()
            checked += stop
            failed = bool(bad.any())
        status = "not-woven" if failed else "sampled-no-counterexample"

    return WeavingReport(
        status=status,
        universal_lower=max(best_low, 0.0),
        universal_upper=max(best_up, 0.0),
        witness_lower=_partition_of(wit_low),
        witness_upper=_partition_of(wit_up),
        partitions_checked=checked,
        mode=mode,
        seed=seed,
    )


def span_criterion(
    fam: GFrameFamily,
    tol: Tolerance = DEFAULT_TOL,
    budget: int = DEFAULT_BUDGET,
) -> tuple[bool, Partition | None]:
    """Check that every weaving spans the ambient space.

    Equivalent to the woven property in finite dimension.  On failure the
    lexicographically first partition whose stacked weaving matrix is rank
    deficient is returned as a witness.
    """
    grams = _gram_tensor(fam)
    m, big_n = fam.m, fam.n_indices
    total = m**big_n
    if total > budget:
        raise BudgetExceededError(
            f"span check needs {m}^{big_n} = {total} weavings, budget is {budget}"
        )
    maxdim = max(fam.ambient_dim, fam.coeff_dim)
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        labels0 = _decode_codes(codes, m, big_n)
        w = _weaving_spectra(grams, labels0)
        s = np.sqrt(np.clip(w, 0.0, None))
        bad = s[:, 0] <= tol.rank_rtol * s[:, -1] * maxdim
        if bad.any():
            i = int(np.argmax(bad))
            return False, _partition_of(labels0[i])
    return True, None


def bessel_sum_bound(fam: GFrameFamily) -> float:
    """Sum of the members' optimal upper bounds.

    Every weaving's upper bound is dominated by this value.
    """
    return float(sum(frame_bounds(fr).upper for fr in fam.frames))


def _resolve_universal(
    fam: GFrameFamily,
    universal: tuple[float, float] | None,
    budget: int,
    tol: Tolerance,
) -> tuple[float, float]:
    if universal is not None:
        return float(universal[0]), float(universal[1])
    rep = certify_woven(fam, "exhaustive", budget=budget, tol=tol)
    return rep.universal_lower, rep.universal_upper


def scaled_family(
    fam: GFrameFamily,
    scalars,
    tol: Tolerance = DEFAULT_TOL,
    universal: tuple[float, float] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> tuple[GFrameFamily, tuple[float, float]]:
    """Scale block (i, j) by ``scalars[j][i]`` and predict the universal bounds.

    With ``C = min |a|^2`` and ``D = max |a|^2`` and base universal bounds
    (A, B), the scaled family is woven with bounds inside ``[A C, B D]``.
    A zero scalar collapses the lower bound and is rejected.  ``universal``
    may pass known base bounds; otherwise they are computed exhaustively.
    """
    a = np.asarray(scalars, dtype=np.complex128)
    if a.shape != (fam.m, fam.n_indices):
        raise ValueError(
            f"scalars must have shape (m, N) = ({fam.m}, {fam.n_indices}), got {a.shape}"
        )
    mags = np.abs(a) ** 2
    c, d = float(mags.min()), float(mags.max())
    if c <= 0.0:
        raise ValueError("every scalar must be nonzero: C = 0 collapses the lower bound")
    base_low, base_up = _resolve_universal(fam, universal, budget, tol)
    members = tuple(
        GFrame(
            fam.ambient_dim,
            tuple(a[j, i] * fr.blocks[i] for i in range(fam.n_indices)),
        )
        for j, fr in enumerate(fam.frames)
    )
    scaled = GFrameFamily(members, allow_degenerate=fam.allow_degenerate)
    return scaled, (base_low * c, base_up * d)


def restrict_family(fam: GFrameFamily, keep) -> GFrameFamily:
    """Family keeping only the (1-based) indices in ``keep``.

    If the restricted family is woven then so is the full family, with at
    least the restricted lower bound (extra indices only add energy).
    """
    keep = sorted({int(i) for i in keep})
    if not keep:
        raise ValueError("keep must be a nonempty set of indices")
    if keep[0] < 1 or keep[-1] > fam.n_indices:
        raise ValueError(f"indices must lie in 1..{fam.n_indices}")
    frames = tuple(
        GFrame(fr.ambient_dim, tuple(fr.blocks[i - 1] for i in keep)) for fr in fam.frames
    )
    return GFrameFamily(frames, allow_degenerate=True)


def removal_bound(
    fam: GFrameFamily,
    drop,
    tol: Tolerance = DEFAULT_TOL,
    universal: tuple[float, float] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> RemovalReport:
    """Drop an index subset from a two-member woven family.

    With base universal bounds (A, B) and ``D_J`` the upper bound of member
    one restricted to the dropped set, the restricted family stays woven with
    universal lower bound at least ``A - D_J`` whenever ``D_J < A``.  A
    violated hypothesis is reported, not raised.
    """
    if fam.m != 2:
        raise ValueError("removal analysis is defined for two-member families")
    drop = sorted({int(i) for i in drop})
    if drop and (drop[0] < 1 or drop[-1] > fam.n_indices):
        raise ValueError(f"indices must lie in 1..{fam.n_indices}")
    if len(drop) >= fam.n_indices:
        raise ValueError("cannot drop every index")
    base_low, base_up = _resolve_universal(fam, universal, budget, tol)
    if drop:
        partial = np.zeros((fam.ambient_dim, fam.ambient_dim), dtype=np.complex128)
        for i in drop:
            b = fam.frames[0].blocks[i - 1]
            partial += b.conj().T @ b
        removed_upper = hermitian_extremes(partial, tol)[1]
    else:
        removed_upper = 0.0
    keep = [i for i in range(1, fam.n_indices + 1) if i not in drop]
    return RemovalReport(
        restricted=restrict_family(fam, keep),
        dropped=tuple(drop),
        removed_upper=removed_upper,
        base_lower=base_low,
        base_upper=base_up,
        predicted_lower=base_low - removed_upper,
        hypothesis_ok=removed_upper < base_low,
    )


def frame_op_norm_check(
    fam: GFrameFamily,
    p: Partition,
    trials: int = 1000,
    seed: int | None = 0,
    upper: float | None = None,
) -> float:
    """Max violation of the restricted frame-operator norm inequality.

    For random unit vectors f, computes
    ``sum_j ||restricted_op_j f||^2 - B * ||S_weaving|| * ||f||^2`` where
    ``restricted_op_j`` sums member j's Gram terms over its own group.  ``B``
    defaults to the Bessel-sum surrogate.  The result should never exceed
    numerical noise.
    """
    labels0 = _validate_labels(fam, p)
    n = fam.ambient_dim
    b_upper = bessel_sum_bound(fam) if upper is None else float(upper)
    s_psi = frame_operator(assemble_weaving(fam, p))
    norm_psi = hermitian_extremes(s_psi)[1]

    parts = []
    for j, fr in enumerate(fam.frames):
        r = np.zeros((n, n), dtype=np.complex128)
        for i in np.flatnonzero(labels0 == j):
            b = fr.blocks[i]
            r += b.conj().T @ b
        parts.append(r)

    rng = np.random.default_rng(seed)
    f = rng.standard_normal((n, trials)) + 1j * rng.standard_normal((n, trials))
    f /= np.linalg.norm(f, axis=0)
    lhs = np.zeros(trials)
    for r in parts:
        lhs += np.sum(np.abs(r @ f) ** 2, axis=0)
    return float(np.max(lhs - b_upper * norm_psi))
