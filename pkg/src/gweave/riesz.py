"""g-Riesz analysis: optimal Riesz bounds, weavings of Riesz bases,
permuted-copy weaving, and the equivalence-constant calculus.

Riesz bounds quantify over coefficient vectors rather than ambient
vectors: the optimal constants are the extreme squared singular values of
the synthesis matrix, counted over all coefficient directions (so a
redundant family has lower constant zero).  Finite index sets make the
quantification over subsets redundant: zero-padding coefficients reduces
every subset inequality to the full-set one.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .gframe import GFrame, frame_bounds, synthesis_matrix
from .linalg import DEFAULT_TOL, Tolerance, rank
from .weaving import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    GFrameFamily,
    Partition,
)

__all__ = [
    "RieszBounds",
    "EquivalenceConstants",
    "WeavingRieszReport",
    "PermutationWeaveReport",
    "riesz_bounds",
    "weaving_riesz_check",
    "permutation_weave",
    "equivalence_constants",
]


@dataclass(frozen=True)
class RieszBounds:
    """Optimal coefficient-side bounds with completeness/basis classification."""

    lower: float
    upper: float
    complete: bool
    is_basis: bool


@dataclass(frozen=True)
class EquivalenceConstants:
    """Best constants of the four equivalent weaving conditions for a pair
    of g-Riesz bases.

    ``riesz_low``/``riesz_up``: extreme per-weaving Riesz-sequence bounds
    over all partitions.  ``a2``: largest constant A with
    ``A ||sum_sigma L* g||^2 <= ||sum_sigma L* g + sum_sigma^c G* g||^2``
    for all g and sigma.  ``d3``: same with the split-sum quadratic form on
    the left.  ``e4`` equals ``a2`` by homogeneity (the unit-norm
    normalization is a sphere constraint on a ratio).
    """

    riesz_low: float
    riesz_up: float
    a2: float
    d3: float
    e4: float


@dataclass(frozen=True)
class WeavingRieszReport:
    """Per-partition Riesz verdicts for a pair of g-Riesz bases."""

    woven: bool
    common_lower: float
    common_upper: float
    witness_lower: Partition
    witness_upper: Partition
    partitions_checked: int


@dataclass(frozen=True)
class PermutationWeaveReport:
    """Weaving a g-Riesz basis against a permuted copy of itself."""

    permutation: tuple[int, ...]
    identity: bool
    woven: bool
    base_lower: float
    base_upper: float
    universal_lower: float
    universal_upper: float
    span_lower_min: float
    witness: Partition | None


def riesz_bounds(f: GFrame, tol: Tolerance = DEFAULT_TOL) -> RieszBounds:
    """Optimal Riesz-sequence constants of the synthesis matrix."""
    t = synthesis_matrix(f)
    s = np.linalg.svd(t, compute_uv=False)
    upper = float(s[0]) ** 2
    # The coefficient-space Gram is (coeff_dim x coeff_dim); extra columns
    # beyond the ambient dimension force a kernel, hence a zero lower bound.
    lower = 0.0 if f.coeff_dim > f.ambient_dim else float(s[-1]) ** 2
    complete = rank(t, tol) == f.ambient_dim
    is_basis = complete and lower > tol.frame_rtol * upper
    return RieszBounds(lower=lower, upper=upper, complete=complete, is_basis=is_basis)


def _weaving_synthesis(fam: GFrameFamily, labels0) -> np.ndarray:
    cols = [fam.frames[l].blocks[i].conj().T for i, l in enumerate(labels0)]
    return np.hstack(cols)


def _all_pair_partitions(big_n: int):
    """All 0-based label vectors for m = 2, in lexicographic order."""
    return product((0, 1), repeat=big_n)


def weaving_riesz_check(
    fam: GFrameFamily,
    tol: Tolerance = DEFAULT_TOL,
    budget: int = DEFAULT_BUDGET,
) -> WeavingRieszReport:
    """Enumerate all weavings of two g-Riesz bases and classify each.

    Both members must be g-Riesz bases, so every weaving has a square
    synthesis matrix and an injective weaving is automatically onto: if all
    weavings keep a positive lower Riesz constant, every weaving is a
    g-Riesz basis and the pair is woven.
    """
    if fam.m != 2:
        raise ValueError("the Riesz weaving check is defined for two-member families")
    for j, fr in enumerate(fam.frames, start=1):
        if not riesz_bounds(fr, tol).is_basis:
            raise ValueError(f"member {j} is not a g-Riesz basis")
    big_n = fam.n_indices
    total = 2**big_n
    if total > budget:
        raise BudgetExceededError(
            f"Riesz weaving check needs 2^{big_n} = {total} weavings, budget is {budget}"
        )
    best_low, best_up = np.inf, -np.inf
    wit_low = wit_up = None
    for labels0 in _all_pair_partitions(big_n):
        s = np.linalg.svd(_weaving_synthesis(fam, labels0), compute_uv=False)
        low, up = float(s[-1]) ** 2, float(s[0]) ** 2
        if low < best_low:
            best_low, wit_low = low, labels0
        if up > best_up:
            best_up, wit_up = up, labels0
    woven = best_low > tol.frame_rtol * best_up
    return WeavingRieszReport(
        woven=woven,
        common_lower=max(best_low, 0.0),
        common_upper=best_up,
        witness_lower=Partition(tuple(x + 1 for x in wit_low)),
        witness_upper=Partition(tuple(x + 1 for x in wit_up)),
        partitions_checked=total,
    )


def permutation_weave(
    f: GFrame,
    pi,
    tol: Tolerance = DEFAULT_TOL,
    budget: int = DEFAULT_BUDGET,
) -> PermutationWeaveReport:
    """Weave a g-Riesz basis against a relabelled copy of itself.

    ``pi`` maps index i to ``pi[i-1]`` (1-based).  Every weaving is a
    g-frame sequence for its span with lower bound at least the base lower
    bound and upper bound at most twice the base upper bound; the pair is
    woven only for the identity permutation.
    """
    rb = riesz_bounds(f, tol)
    if not rb.is_basis:
        raise ValueError("recoded-copy weaving requires a g-Riesz basis")
    big_n = f.n_blocks
    pi = tuple(int(x) for x in pi)
    if sorted(pi) != list(range(1, big_n + 1)):
        raise ValueError(f"pi must be a permutation of 1..{big_n}")
    dims = f.block_dims
    for i, target in enumerate(pi, start=1):
        if dims[target - 1] != dims[i - 1]:
            raise ValueError(
                f"block dimension mismatch: index {i} has dim {dims[i - 1]} "
                f"but pi({i}) = {target} has dim {dims[target - 1]}"
            )
    recoded = GFrame(f.ambient_dim, tuple(f.blocks[target - 1] for target in pi))
    fam = GFrameFamily((f, recoded))

    total = 2**big_n
    if total > budget:
        raise BudgetExceededError(
            f"permutation weave needs 2^{big_n} = {total} weavings, budget is {budget}"
        )
    fb = frame_bounds(f, tol)
    maxdim = max(f.ambient_dim, f.coeff_dim)
    best_low, best_up = np.inf, -np.inf
    wit_low = None
    span_low_min = np.inf
    for labels0 in _all_pair_partitions(big_n):
        s = np.linalg.svd(_weaving_synthesis(fam, labels0), compute_uv=False)
        low, up = float(s[-1]) ** 2, float(s[0]) ** 2
        if low < best_low:
            best_low, wit_low = low, labels0
        best_up = max(best_up, up)
        live = s[s > tol.rank_rtol * s[0] * maxdim]
        span_low_min = min(span_low_min, float(live[-1]) ** 2)
    woven = best_low > tol.frame_rtol * best_up
    return PermutationWeaveReport(
        permutation=pi,
        identity=pi == tuple(range(1, big_n + 1)),
        woven=woven,
        base_lower=fb.lower,
        base_upper=fb.upper,
        universal_lower=max(best_low, 0.0),
        universal_upper=best_up,
        span_lower_min=span_low_min,
        witness=None if woven else Partition(tuple(x + 1 for x in wit_low)),
    )


def _range_basis(mat: np.ndarray, tol: Tolerance) -> np.ndarray:
    """Orthonormal basis of the numerical column range."""
    if mat.shape[1] == 0:
        return mat
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return u[:, :0]
    keep = s > tol.rank_rtol * s[0] * max(mat.shape)
    return u[:, keep]


def equivalence_constants(
    fam: GFrameFamily,
    tol: Tolerance = DEFAULT_TOL,
    budget: int = DEFAULT_BUDGET,
) -> EquivalenceConstants:
    """Compute the optimal constants of the four weaving conditions.

    For each partition, the best constant of the one-sided condition is a
    principal-angle quantity: minimizing the ratio over coefficients (with
    the free complement coordinates minimized out) equals
    ``1 - cos^2`` of the smallest angle between the span of the first
    member's kept blocks and the span of the second member's complementary
    blocks.  The split-sum condition reduces to the smallest singular value
    of the concatenated orthonormal range bases.  Partitions whose
    denominator form vanishes identically contribute no constraint.
    """
    if fam.m != 2:
        raise ValueError("equivalence constants are defined for two-member families")
    t_first = synthesis_matrix(fam.frames[0])
    t_second = synthesis_matrix(fam.frames[1])
    dims = np.asarray(fam.block_dims)
    big_n = fam.n_indices
    total = 2**big_n
    if total > budget:
        raise BudgetExceededError(
            f"equivalence constants need 2^{big_n} = {total} partitions, budget is {budget}"
        )
    n = fam.ambient_dim

    riesz_low, riesz_up = np.inf, -np.inf
    a2 = np.inf
    d3 = np.inf
    for labels0 in _all_pair_partitions(big_n):
        col_owner = np.repeat(np.asarray(labels0), dims)
        left = t_first[:, col_owner == 0]
        right = t_second[:, col_owner == 1]

        weave = np.hstack([left, right])
        s = np.linalg.svd(weave, compute_uv=False)
        up = float(s[0]) ** 2
        low = 0.0 if weave.shape[1] > n else float(s[-1]) ** 2
        riesz_low, riesz_up = min(riesz_low, low), max(riesz_up, up)

        o_left = _range_basis(left, tol)
        o_right = _range_basis(right, tol)

        if o_left.shape[1] > 0:
            if o_right.shape[1] == 0:
                a2 = min(a2, 1.0)
            else:
                overlap = np.linalg.svd(o_right.conj().T @ o_left, compute_uv=False)
                a2 = min(a2, max(0.0, 1.0 - float(overlap[0]) ** 2))

        mix = np.hstack([o_left, o_right])
        if mix.shape[1] > 0:
            if mix.shape[1] > n:
                d3 = min(d3, 0.0)
            else:
                sm = np.linalg.svd(mix, compute_uv=False)
                d3 = min(d3, float(sm[-1]) ** 2)

    return EquivalenceConstants(
        riesz_low=max(float(riesz_low), 0.0),
        riesz_up=float(riesz_up),
        a2=float(a2),
        d3=float(d3),
        e4=float(a2),
    )
