import numpy as np
import pytest

from gweave import (
    CoefficientVector,
    DegenerateGFrameError,
    GFrame,
    apply_operator,
    apply_synthesis,
    canonical_dual,
    frame_bounds,
    frame_operator,
    induced_frame,
    is_g_orthonormal,
    op_norm,
    rank,
    synthesis_matrix,
)
from gweave.generate import GenSpec, generate

from _support import onb_frame, random_frame


E1 = np.array([[1.0, 0.0]])
E2 = np.array([[0.0, 1.0]])


def redundant_frame():
    return GFrame(2, (E1, E2, E1))


class TestGFrameModel:
    def test_block_validation(self):
        with pytest.raises(ValueError, match="columns"):
            GFrame(2, (np.ones((1, 3)),))

    def test_needs_blocks(self):
        with pytest.raises(ValueError):
            GFrame(2, ())

    def test_blocks_are_read_only_copies(self):
        raw = np.array([[1.0, 0.0]])
        f = GFrame(2, (raw,))
        raw[0, 0] = 7.0
        assert f.blocks[0][0, 0] == 1.0
        with pytest.raises(ValueError):
            f.blocks[0][0, 0] = 3.0

    def test_dims(self):
        f = GFrame(3, (np.ones((2, 3)), np.ones((1, 3))))
        assert f.block_dims == (2, 1)
        assert f.coeff_dim == 3


class TestCoefficientVector:
    def test_roundtrip(self):
        c = CoefficientVector((np.array([1.0 + 1j]), np.array([2.0, 3.0])))
        back = CoefficientVector.from_stacked((1, 2), c.stacked())
        assert all(
            np.array_equal(a, b) for a, b in zip(c.segments, back.segments)
        )

    def test_matches(self):
        f = GFrame(2, (E1, np.ones((2, 2))))
        assert CoefficientVector((np.ones(1), np.ones(2))).matches(f)
        assert not CoefficientVector((np.ones(2), np.ones(1))).matches(f)


class TestOperators:
    def test_synthesis_of_onb_is_identity(self):
        np.testing.assert_allclose(synthesis_matrix(onb_frame(2)), np.eye(2))

    def test_synthesis_of_single_identity_block(self):
        f = GFrame(2, (np.eye(2),))
        np.testing.assert_allclose(synthesis_matrix(f), np.eye(2))

    def test_synthesis_times_analysis_is_frame_operator(self):
        f = random_frame(3, (1, 2, 2), seed=4)
        t = synthesis_matrix(f)
        np.testing.assert_allclose(t @ t.conj().T, frame_operator(f), atol=1e-10)

    def test_frame_operator_of_onb(self):
        np.testing.assert_allclose(frame_operator(onb_frame(2)), np.eye(2))

    def test_frame_operator_redundant(self):
        np.testing.assert_allclose(frame_operator(redundant_frame()), np.diag([2.0, 1.0]))

    def test_quadratic_form_matches_energy_sum(self):
        f = random_frame(3, (2, 1, 1), seed=8)
        s = frame_operator(f)
        rng = np.random.default_rng(1)
        x = rng.standard_normal((3, 1000)) + 1j * rng.standard_normal((3, 1000))
        quad = np.real(np.sum(x.conj() * (s @ x), axis=0))
        energy = np.zeros(1000)
        for b in f.blocks:
            energy += np.sum(np.abs(b @ x) ** 2, axis=0)
        np.testing.assert_allclose(quad, energy, atol=1e-9)

    def test_apply_synthesis_matches_matrix(self):
        f = random_frame(2, (1, 2), seed=12)
        c = CoefficientVector((np.array([1.0 + 2j]), np.array([3.0, -1j])))
        np.testing.assert_allclose(
            apply_synthesis(f, c), synthesis_matrix(f) @ c.stacked(), atol=1e-12
        )


class TestFrameBounds:
    def test_parseval_onb(self):
        fb = frame_bounds(onb_frame(2))
        assert fb.classification == "g-frame"
        assert fb.lower == pytest.approx(1.0, abs=1e-12)
        assert fb.upper == pytest.approx(1.0, abs=1e-12)

    def test_redundant(self):
        fb = frame_bounds(redundant_frame())
        assert (fb.lower, fb.upper) == (1.0, 2.0)

    def test_rank_deficient_is_degenerate(self):
        fb = frame_bounds(GFrame(2, (np.array([[2.0, 0.0]]),)))
        assert fb.classification == "degenerate"
        assert fb.lower == pytest.approx(0.0, abs=1e-15)
        assert fb.upper == pytest.approx(4.0, abs=1e-12)

    def test_completeness_iff_full_rank(self):
        for seed in range(6):
            f = random_frame(3, (1, 1, 2), seed=seed)
            fb = frame_bounds(f)
            assert (fb.lower > 0) == (rank(synthesis_matrix(f)) == 3)
        deficient = GFrame(2, (E1, 2 * E1))
        fb = frame_bounds(deficient)
        assert fb.lower == 0.0
        assert rank(synthesis_matrix(deficient)) == 1


class TestCanonicalDual:
    def test_parseval_dual_is_itself(self):
        f = onb_frame(2)
        d = canonical_dual(f)
        for a, b in zip(d.blocks, f.blocks):
            np.testing.assert_allclose(a, b, atol=1e-12)

    def test_redundant_dual_blocks(self):
        d = canonical_dual(redundant_frame())
        np.testing.assert_allclose(d.blocks[0], 0.5 * E1, atol=1e-12)
        np.testing.assert_allclose(d.blocks[1], E2, atol=1e-12)
        np.testing.assert_allclose(d.blocks[2], 0.5 * E1, atol=1e-12)

    def test_dual_bounds_are_reciprocal(self):
        f = random_frame(3, (2, 2), seed=21)
        fb = frame_bounds(f)
        db = frame_bounds(canonical_dual(f))
        assert db.lower == pytest.approx(1.0 / fb.upper, abs=1e-8)
        assert db.upper == pytest.approx(1.0 / fb.lower, abs=1e-8)

    def test_reconstruction(self):
        f = random_frame(3, (1, 2, 1), seed=6)
        d = canonical_dual(f)
        rng = np.random.default_rng(2)
        x = rng.standard_normal((3, 1000)) + 1j * rng.standard_normal((3, 1000))
        recon = np.zeros_like(x)
        for db, b in zip(d.blocks, f.blocks):
            recon += db.conj().T @ (b @ x)
        np.testing.assert_allclose(recon, x, atol=1e-8)

    def test_double_dual_is_identity(self):
        f = random_frame(2, (1, 1, 1), seed=33)
        dd = canonical_dual(canonical_dual(f))
        for a, b in zip(dd.blocks, f.blocks):
            np.testing.assert_allclose(a, b, atol=1e-8)

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateGFrameError):
            canonical_dual(GFrame(2, (E1,)))


class TestInducedFrame:
    def test_identity_block_splits_into_basis(self):
        ind = induced_frame(GFrame(2, (np.eye(2),)))
        assert ind.block_dims == (1, 1)
        np.testing.assert_allclose(ind.blocks[0], E1)
        np.testing.assert_allclose(ind.blocks[1], E2)

    def test_bounds_preserved(self):
        for seed in range(4):
            f = random_frame(3, (2, 2, 1), seed=seed)
            a = frame_bounds(f)
            b = frame_bounds(induced_frame(f))
            assert abs(a.lower - b.lower) < 1e-10
            assert abs(a.upper - b.upper) < 1e-10

    def test_rank_one_vector(self):
        ind = induced_frame(GFrame(2, (np.array([[1.0, 1.0]]),)))
        fb = frame_bounds(ind)
        assert fb.lower == pytest.approx(0.0, abs=1e-12)
        assert fb.upper == pytest.approx(2.0, abs=1e-12)
        # as a vector the induced element is the conjugated row
        np.testing.assert_allclose(ind.blocks[0], np.array([[1.0, 1.0]]))


class TestGOrthonormal:
    def test_onb_true(self):
        assert is_g_orthonormal(onb_frame(3))

    def test_redundant_parseval_false(self):
        scaled = GFrame(2, (E1 / np.sqrt(2), E2, E1 / np.sqrt(2)))
        fb = frame_bounds(scaled)
        assert fb.lower == pytest.approx(1.0, abs=1e-12)  # Parseval
        assert not is_g_orthonormal(scaled)  # three columns cannot be orthonormal in dim 2

    def test_unitary_row_split_true(self):
        f = generate(GenSpec(ambient_dim=4, block_dims=(2, 1, 1), kind="g-orthonormal", seed=5))
        assert is_g_orthonormal(f)


class TestApplyOperator:
    def test_identity_keeps_frame(self):
        f = random_frame(2, (1, 1), seed=3)
        g = apply_operator(f, np.eye(2))
        for a, b in zip(g.blocks, f.blocks):
            np.testing.assert_allclose(a, b)

    def test_uniform_scaling(self):
        fb = frame_bounds(apply_operator(onb_frame(2), 2.0 * np.eye(2)))
        assert fb.lower == pytest.approx(4.0, abs=1e-12)
        assert fb.upper == pytest.approx(4.0, abs=1e-12)

    def test_bounds_inside_predicted_interval(self):
        rng = np.random.default_rng(7)
        f = random_frame(3, (1, 1, 1, 1), seed=14)
        fb = frame_bounds(f)
        t = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) + 3 * np.eye(3)
        gb = frame_bounds(apply_operator(f, t))
        t_inv_norm = op_norm(np.linalg.inv(t))
        assert gb.lower >= fb.lower / t_inv_norm**2 - 1e-9
        assert gb.upper <= fb.upper * op_norm(t) ** 2 + 1e-9

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="2 x 2"):
            apply_operator(onb_frame(2), np.eye(3))

    def test_rejects_singular(self):
        with pytest.raises(ValueError, match="singular"):
            apply_operator(onb_frame(2), np.diag([1.0, 0.0]))
