"""Sufficient-condition certificates for woven families.

Each certificate verifies a checkable hypothesis and produces a universal
lower bound prediction that is sound for *every* weaving:

* :func:`minimal_k` - pairwise block differences dominated by ``K`` times
  either member's restricted energy, over every index subset; yields the
  lower bound ``sum(A_j) / (2 (m-1) (K+1) + 1)``.
* :func:`perturbation_certificate` / :func:`chained_certificate` -
  closeness of synthesis operators measured by scalars (lambda, eta, mu);
  the exact mode covers the lambda-only case, where the full index set
  dominates every subset because coordinate projections never increase the
  operator norm.  General scalars are only falsified by seeded sampling,
  never declared verified.
* :func:`operator_perturbation` - per-index invertible operators close to
  the identity; the sound lower bound is
  ``(sqrt(A) - sqrt(B) * max_dev)^2``.
* :func:`scaled_dual_weave` - a frame is woven with its scaled canonical
  dual whenever its bound ratio stays below two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gframe import (
    GFrame,
    frame_bounds,
    frame_operator,
    synthesis_matrix,
)
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, op_norm, rank
from .weaving import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    GFrameFamily,
)

__all__ = [
    "KCertificate",
    "PerturbationCertificate",
    "OperatorPerturbationReport",
    "ScaledDualReport",
    "minimal_k",
    "perturbation_certificate",
    "chained_certificate",
    "operator_perturbation",
    "scaled_dual_weave",
]

# Pure floating-point-noise slack for the exact-mode scalar comparison; it
# perturbs the certified bound by far less than any stated test tolerance.
_GAP_SLACK = 1e-12


@dataclass(frozen=True)
class KCertificate:
    """Minimal admissible dominance constant over all subsets and pairs."""

    feasible: bool
    k: float | None
    predicted_lower: float | None
    predicted_upper: float
    worst_subset: tuple[int, ...] | None
    worst_pair: tuple[int, int] | None
    member_lowers: tuple[float, ...]
    member_uppers: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "k": self.k,
            "predicted_lower": self.predicted_lower,
            "predicted_upper": self.predicted_upper,
            "worst_subset": list(self.worst_subset) if self.worst_subset else None,
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "member_lowers": list(self.member_lowers),
            "member_uppers": list(self.member_uppers),
        }


@dataclass(frozen=True)
class PerturbationCertificate:
    """Synthesis-closeness certificate (fixed base member or chained).

    ``predicted_lower`` is recomputable from the stored scalars and member
    bounds.  ``status`` is one of ``"valid"``, ``"hypothesis-fails"``,
    ``"lambda-below-gap"`` (exact mode) or ``"falsified"`` /
    ``"not-falsified"`` (sampled mode).
    """

    base_index: int | None
    chained: bool
    lambdas: tuple[float, ...]
    etas: tuple[float, ...]
    mus: tuple[float, ...]
    member_lowers: tuple[float, ...]
    member_uppers: tuple[float, ...]
    predicted_lower: float
    predicted_upper: float
    verification_mode: str
    status: str
    synthesis_gaps: tuple[float, ...] | None
    falsification_witness: tuple[tuple[int, ...], tuple[np.ndarray, ...]] | None

    @property
    def valid(self) -> bool:
        return self.status == "valid"

    def to_dict(self) -> dict:
        witness = None
        if self.falsification_witness is not None:
            subset, segments = self.falsification_witness
            witness = {
                "subset": list(subset),
                "segments": [
                    [[float(z.real), float(z.imag)] for z in seg] for seg in segments
                ],
            }
        return {
            "base_index": self.base_index,
            "chained": self.chained,
            "lambdas": list(self.lambdas),
            "etas": list(self.etas),
            "mus": list(self.mus),
            "member_lowers": list(self.member_lowers),
            "member_uppers": list(self.member_uppers),
            "predicted_lower": self.predicted_lower,
            "predicted_upper": self.predicted_upper,
            "verification_mode": self.verification_mode,
            "status": self.status,
            "synthesis_gaps": list(self.synthesis_gaps) if self.synthesis_gaps else None,
            "falsification_witness": witness,
        }


@dataclass(frozen=True)
class OperatorPerturbationReport:
    """Weaving a frame against per-index right-composed operator copies."""

    family: GFrameFamily
    base_lower: float
    base_upper: float
    max_deviation: float
    condition_value: float
    condition_threshold: float
    hypothesis_ok: bool
    predicted_lower: float

    def to_dict(self) -> dict:
        return {
            "base_lower": self.base_lower,
            "base_upper": self.base_upper,
            "max_deviation": self.max_deviation,
            "condition_value": self.condition_value,
            "condition_threshold": self.condition_threshold,
            "hypothesis_ok": self.hypothesis_ok,
            "predicted_lower": self.predicted_lower,
        }


@dataclass(frozen=True)
class ScaledDualReport:
    """Weaving a frame against its scaled canonical dual."""

    base_lower: float
    base_upper: float
    ratio: float | None
    hypothesis_ok: bool
    scale: float | None
    deviation_norm: float | None
    deviation_bound: float | None
    op_report: OperatorPerturbationReport | None
    scaled_dual: GFrame | None

    def to_dict(self) -> dict:
        return {
            "base_lower": self.base_lower,
            "base_upper": self.base_upper,
            "ratio": self.ratio,
            "hypothesis_ok": self.hypothesis_ok,
            "scale": self.scale,
            "deviation_norm": self.deviation_norm,
            "deviation_bound": self.deviation_bound,
            "op_report": self.op_report.to_dict() if self.op_report else None,
        }


def _max_ratio(d_mat: np.ndarray, m_mat: np.ndarray, tol: Tolerance) -> float | None:
    """Largest generalized eigenvalue of (D, M) on the complement of ker M.

    Returns None when D does not vanish on the kernel of M (no finite
    constant dominates).  Both inputs are Hermitian PSD.
    """
    d_sym = (d_mat + d_mat.conj().T) / 2.0
    m_sym = (m_mat + m_mat.conj().T) / 2.0
    w, v = np.linalg.eigh(m_sym)
    w = np.clip(w, 0.0, None)
    w_max = float(w[-1]) if w.size else 0.0
    keep = w > tol.rank_rtol * w_max * len(w)
    if not keep.all():
        v_ker = v[:, ~keep]
        kernel_mass = float(
            np.linalg.eigvalsh(v_ker.conj().T @ d_sym @ v_ker)[-1]
        )
        d_scale = max(float(np.linalg.eigvalsh(d_sym)[-1]), 0.0)
        if kernel_mass > tol.eq_atol * max(1.0, d_scale):
            return None
    if not keep.any():
        return 0.0
    basis = v[:, keep] / np.sqrt(w[keep])
    reduced = basis.conj().T @ d_sym @ basis
    top = float(np.linalg.eigvalsh((reduced + reduced.conj().T) / 2.0)[-1])
    return max(top, 0.0)


def minimal_k(
    fam: GFrameFamily,
    budget: int = DEFAULT_BUDGET,
    tol: Tolerance = DEFAULT_TOL,
) -> KCertificate:
    """Minimal ``K`` dominating all pairwise block differences.

    For every nonempty index subset and every unordered member pair, the
    difference Gram must be dominated by ``K`` times the restricted Gram of
    *each* member of the pair.  The minimal per-constraint ``K`` is a
    generalized eigenvalue; the certificate reports the maximum over all
    constraints, or infeasibility when some kernel carries difference
    energy.
    """
    big_n, m = fam.n_indices, fam.m
    if 2**big_n > budget:
        raise BudgetExceededError(
            f"subset sweep needs 2^{big_n} = {2 ** big_n} subsets, budget is {budget}"
        )
    n = fam.ambient_dim
    grams = np.empty((big_n, m, n, n), dtype=np.complex128)
    for j, fr in enumerate(fam.frames):
        for i, b in enumerate(fr.blocks):
            grams[i, j] = b.conj().T @ b
    pairs = [(j, l) for j in range(m) for l in range(j + 1, m)]
    diff_grams = {}
    for j, l in pairs:
        for i in range(big_n):
            d = fam.frames[j].blocks[i] - fam.frames[l].blocks[i]
            diff_grams[(i, j, l)] = d.conj().T @ d

    k_best = 0.0
    worst = None
    for code in range(1, 2**big_n):
        subset = [i for i in range(big_n) if code >> i & 1]
        for j, l in pairs:
            d_sum = np.zeros((n, n), dtype=np.complex128)
            for i in subset:
                d_sum += diff_grams[(i, j, l)]
            for member in (j, l):
                m_sum = grams[subset, member].sum(axis=0)
                ratio = _max_ratio(d_sum, m_sum, tol)
                if ratio is None:
                    return _k_certificate(fam, False, None, subset, (j, l))
                if ratio > k_best:
                    k_best = ratio
                    worst = (subset, (j, l))
    subset, pair = worst if worst is not None else ([], None)
    return _k_certificate(fam, True, k_best, subset, pair)


def _k_certificate(fam, feasible, k, subset, pair) -> KCertificate:
    lowers = tuple(frame_bounds(fr).lower for fr in fam.frames)
    uppers = tuple(frame_bounds(fr).upper for fr in fam.frames)
    predicted = None
    if feasible:
        predicted = sum(lowers) / (2.0 * (fam.m - 1) * (k + 1.0) + 1.0)
    return KCertificate(
        feasible=feasible,
        k=k,
        predicted_lower=predicted,
        predicted_upper=float(sum(uppers)),
        worst_subset=tuple(i + 1 for i in subset) if subset else None,
        worst_pair=(pair[0] + 1, pair[1] + 1) if pair else None,
        member_lowers=lowers,
        member_uppers=uppers,
    )


def _as_scalars(values, count: int, name: str) -> tuple[float, ...]:
    if values is None:
        return (0.0,) * count
    vals = tuple(float(v) for v in values)
    if len(vals) != count:
        raise ValueError(f"{name} must have {count} entries, got {len(vals)}")
    if any(v < 0 for v in vals):
        raise ValueError(f"{name} entries must be nonnegative")
    return vals


def _certificate(
    fam: GFrameFamily,
    pairs: list[tuple[int, int]],
    lambdas,
    etas,
    mus,
    predicted: float,
    mode: str,
    trials: int,
    seed: int,
    tol: Tolerance,
    base_index: int | None,
    chained: bool,
) -> PerturbationCertificate:
    uppers = tuple(frame_bounds(fr).upper for fr in fam.frames)
    lowers = tuple(frame_bounds(fr).lower for fr in fam.frames)
    synths = [synthesis_matrix(fr) for fr in fam.frames]

    gaps = None
    witness = None
    if predicted <= 0.0:
        status = "hypothesis-fails"
        if mode == "exact-lambda-only":
            gaps = tuple(
                op_norm(synths[a] - synths[b]) for a, b in pairs
            )
    elif mode == "exact-lambda-only":
        if any(etas) or any(mus):
            raise ValueError(
                "exact verification covers the lambda-only case; "
                "use sampled-falsification for nonzero eta/mu"
            )
        gaps = tuple(op_norm(synths[a] - synths[b]) for a, b in pairs)
        ok = all(
            lam + _GAP_SLACK * max(1.0, gap) >= gap
            for lam, gap in zip(lambdas, gaps)
        )
        status = "valid" if ok else "lambda-below-gap"
    elif mode == "sampled-falsification":
        rng = np.random.Generator(np.random.Philox(seed))
        big_n = fam.n_indices
        dims = fam.block_dims
        status = "not-falsified"
        for _ in range(trials):
            mask = rng.integers(0, 2, size=big_n).astype(bool)
            while not mask.any():
                mask = rng.integers(0, 2, size=big_n).astype(bool)
            segs = {}
            for i in np.flatnonzero(mask):
                d = dims[i]
                segs[int(i)] = (
                    rng.standard_normal(d) + 1j * rng.standard_normal(d)
                ) / np.sqrt(2.0)
            coeff_norm = np.sqrt(sum(float(np.vdot(g, g).real) for g in segs.values()))
            for k, (a, b) in enumerate(pairs):
                u_a = np.zeros(fam.ambient_dim, dtype=np.complex128)
                u_b = np.zeros(fam.ambient_dim, dtype=np.complex128)
                for i, g in segs.items():
                    u_a += fam.frames[a].blocks[i].conj().T @ g
                    u_b += fam.frames[b].blocks[i].conj().T @ g
                lhs = float(np.linalg.norm(u_a - u_b))
                rhs = (
                    etas[k] * float(np.linalg.norm(u_a))
                    + mus[k] * float(np.linalg.norm(u_b))
                    + lambdas[k] * coeff_norm
                )
                if lhs > rhs + tol.eq_atol:
                    subset = tuple(int(i) + 1 for i in np.flatnonzero(mask))
                    witness = (subset, tuple(segs[int(i)] for i in np.flatnonzero(mask)))
                    status = "falsified"
                    break
            if status == "falsified":
                break
    else:
        raise ValueError(
            f"mode must be 'exact-lambda-only' or 'sampled-falsification', got {mode!r}"
        )

    return PerturbationCertificate(
        base_index=base_index,
        chained=chained,
        lambdas=lambdas,
        etas=etas,
        mus=mus,
        member_lowers=lowers,
        member_uppers=uppers,
        predicted_lower=float(predicted),
        predicted_upper=float(sum(uppers)),
        verification_mode=mode,
        status=status,
        synthesis_gaps=gaps,
        falsification_witness=witness,
    )


def perturbation_certificate(
    fam: GFrameFamily,
    base: int,
    lambdas,
    etas=None,
    mus=None,
    mode: str = "exact-lambda-only",
    trials: int = 200,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
) -> PerturbationCertificate:
    """Closeness-to-a-base-member certificate.

    Scalars are indexed by the non-base members in ascending order.  The
    predicted universal lower bound is

    ``A_base - sum_j (lambda_j + eta_j sqrt(B_base) + mu_j sqrt(B_j))
    (sqrt(B_base) + sqrt(B_j))``

    using the optimal member bounds.  In exact mode (eta = mu = 0) validity
    reduces to ``lambda_j >= ||T_base - T_j||`` on full synthesis matrices,
    which dominates every subset.
    """
    m = fam.m
    if not 1 <= base <= m:
        raise ValueError(f"base index must lie in 1..{m}, got {base}")
    others = [j for j in range(m) if j != base - 1]
    lambdas = _as_scalars(lambdas, m - 1, "lambdas")
    etas = _as_scalars(etas, m - 1, "etas")
    mus = _as_scalars(mus, m - 1, "mus")
    bounds = [frame_bounds(fr) for fr in fam.frames]
    a_base = bounds[base - 1].lower
    b_base = bounds[base - 1].upper
    predicted = a_base
    for k, j in enumerate(others):
        b_j = bounds[j].upper
        predicted -= (
            lambdas[k] + etas[k] * np.sqrt(b_base) + mus[k] * np.sqrt(b_j)
        ) * (np.sqrt(b_base) + np.sqrt(b_j))
    pairs = [(base - 1, j) for j in others]
    return _certificate(
        fam, pairs, lambdas, etas, mus, predicted, mode, trials, seed, tol,
        base_index=base, chained=False,
    )


def chained_certificate(
    fam: GFrameFamily,
    lambdas,
    etas=None,
    mus=None,
    mode: str = "exact-lambda-only",
    trials: int = 200,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
) -> PerturbationCertificate:
    """Consecutive-pair variant anchored at member one.

    Scalars are indexed by the pairs (j, j+1) for j in 1..m-1; the predicted
    lower bound subtracts each pair's contribution from the first member's
    lower bound.  For m = 2 this coincides with the fixed-base certificate.
    """
    m = fam.m
    lambdas = _as_scalars(lambdas, m - 1, "lambdas")
    etas = _as_scalars(etas, m - 1, "etas")
    mus = _as_scalars(mus, m - 1, "mus")
    bounds = [frame_bounds(fr) for fr in fam.frames]
    predicted = bounds[0].lower
    for k in range(m - 1):
        b_j = bounds[k].upper
        b_next = bounds[k + 1].upper
        predicted -= (
            lambdas[k] + etas[k] * np.sqrt(b_j) + mus[k] * np.sqrt(b_next)
        ) * (np.sqrt(b_j) + np.sqrt(b_next))
    pairs = [(k, k + 1) for k in range(m - 1)]
    return _certificate(
        fam, pairs, lambdas, etas, mus, predicted, mode, trials, seed, tol,
        base_index=None, chained=True,
    )


def operator_perturbation(
    f: GFrame,
    operators,
    tol: Tolerance = DEFAULT_TOL,
) -> OperatorPerturbationReport:
    """Weave a frame against per-index right-composed invertible operators.

    The hypothesis is ``max_i ||I - T_i||^2 < A / B``.  When it holds, every
    weaving is a g-frame with lower bound at least
    ``(sqrt(A) - sqrt(B) * max_i ||I - T_i||)^2`` (the square develops from
    the norm-difference estimate; the plain difference ``A - B max||I-T||^2``
    is larger and is *not* a valid bound).
    """
    n = f.ambient_dim
    big_n = f.n_blocks
    ops = operators
    if isinstance(ops, np.ndarray) and ops.ndim == 2:
        ops = [ops] * big_n
    ops = [as_matrix(t) for t in ops]
    if len(ops) == 1 and big_n > 1:
        ops = ops * big_n
    if len(ops) != big_n:
        raise ValueError(f"expected one operator per index ({big_n}), got {len(ops)}")
    eye = np.eye(n)
    for idx, t in enumerate(ops, start=1):
        if t.shape != (n, n):
            raise ValueError(f"operator {idx} must be {n} x {n}, got {t.shape}")
        if rank(t, tol) < n:
            raise ValueError(f"operator {idx} is singular at the working tolerance")
    fb = frame_bounds(f, tol)
    a_low, b_up = fb.lower, fb.upper
    dev = max(op_norm(eye - t) for t in ops)
    threshold = a_low / b_up if b_up > 0 else 0.0
    hypothesis_ok = b_up > 0 and dev**2 < threshold
    predicted = (np.sqrt(a_low) - np.sqrt(b_up) * dev) ** 2 if hypothesis_ok else 0.0
    moved = GFrame(n, tuple(b @ t for b, t in zip(f.blocks, ops)))
    family = GFrameFamily((f, moved), allow_degenerate=True)
    return OperatorPerturbationReport(
        family=family,
        base_lower=a_low,
        base_upper=b_up,
        max_deviation=float(dev),
        condition_value=float(dev**2),
        condition_threshold=float(threshold),
        hypothesis_ok=hypothesis_ok,
        predicted_lower=float(predicted),
    )


def scaled_dual_weave(f: GFrame, tol: Tolerance = DEFAULT_TOL) -> ScaledDualReport:
    """Weave a frame against its scaled canonical dual.

    The dual is scaled by ``2AB / (A + B)``, which centres the spectrum of
    the composed operator around one: the deviation from the identity is at
    most ``(B - A) / (B + A)``, small enough for the operator-perturbation
    hypothesis exactly when ``B / A < 2``.  A failed hypothesis is reported,
    not raised.
    """
    fb = frame_bounds(f, tol)
    a_low, b_up = fb.lower, fb.upper
    if not fb.is_frame or a_low <= 0:
        return ScaledDualReport(
            base_lower=a_low, base_upper=b_up, ratio=None, hypothesis_ok=False,
            scale=None, deviation_norm=None, deviation_bound=None,
            op_report=None, scaled_dual=None,
        )
    ratio = b_up / a_low
    if ratio >= 2.0:
        return ScaledDualReport(
            base_lower=a_low, base_upper=b_up, ratio=float(ratio),
            hypothesis_ok=False, scale=None, deviation_norm=None,
            deviation_bound=None, op_report=None, scaled_dual=None,
        )
    scale = 2.0 * a_low * b_up / (a_low + b_up)
    s = frame_operator(f)
    w, v = np.linalg.eigh((s + s.conj().T) / 2.0)
    s_inv = (v / w) @ v.conj().T
    t = scale * s_inv
    dev = op_norm(np.eye(f.ambient_dim) - t)
    bound = (b_up - a_low) / (b_up + a_low)
    op_report = operator_perturbation(f, [t] * f.n_blocks, tol)
    return ScaledDualReport(
        base_lower=a_low,
        base_upper=b_up,
        ratio=float(ratio),
        hypothesis_ok=True,
        scale=float(scale),
        deviation_norm=float(dev),
        deviation_bound=float(bound),
        op_report=op_report,
        scaled_dual=op_report.family.frames[1],
    )
