import json

import numpy as np
import pytest

from gweave import GFrame, GFrameFamily, apply_operator
from gweave.cli import main
from gweave.fileio import (
    FrameFileError,
    load_any,
    load_family,
    load_frame,
    save_family,
    save_frame,
)

from _support import onb_frame, random_frame, swapped_onb_family


@pytest.fixture()
def frame_file(tmp_path):
    path = tmp_path / "frame.json"
    save_frame(onb_frame(2), path)
    return path


@pytest.fixture()
def swapped_family_file(tmp_path):
    path = tmp_path / "fam.json"
    save_family(swapped_onb_family(), path)
    return path


@pytest.fixture()
def copies_family_file(tmp_path):
    f = onb_frame(2)
    path = tmp_path / "copies.json"
    save_family(GFrameFamily((f, f)), path)
    return path


class TestRoundTrip:
    def test_complex_frame_exact(self, tmp_path):
        f = random_frame(3, (1, 2), seed=13)
        path = tmp_path / "f.json"
        save_frame(f, path)
        loaded = load_frame(path)
        assert loaded.ambient_dim == f.ambient_dim
        for a, b in zip(loaded.blocks, f.blocks):
            assert np.array_equal(a, b)
        assert json.loads(path.read_text())["field"] == "complex"

    def test_real_frame_uses_plain_numbers(self, tmp_path):
        f = GFrame(2, (np.array([[1.0, 0.5]]), np.array([[0.25, -3.0]])))
        path = tmp_path / "real.json"
        save_frame(f, path)
        payload = json.loads(path.read_text())
        assert payload["field"] == "real"
        assert payload["blocks"][0]["entries"] == [[1.0, 0.5]]
        loaded = load_frame(path)
        for a, b in zip(loaded.blocks, f.blocks):
            assert np.array_equal(a, b)

    def test_family_roundtrip(self, tmp_path):
        fam = swapped_onb_family()
        path = tmp_path / "fam.json"
        save_family(fam, path)
        loaded = load_family(path)
        assert loaded.m == 2
        for fr_a, fr_b in zip(loaded.frames, fam.frames):
            for a, b in zip(fr_a.blocks, fr_b.blocks):
                assert np.array_equal(a, b)

    def test_save_is_byte_stable(self, tmp_path):
        f = random_frame(2, (1, 1, 1), seed=3)
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_frame(f, p1)
        save_frame(f, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_load_any_dispatch(self, frame_file, swapped_family_file):
        assert isinstance(load_any(frame_file), GFrame)
        assert isinstance(load_any(swapped_family_file), GFrameFamily)


class TestMalformedFiles:
    def test_invalid_json_reports_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"ambient_dim": 2,\n  "field": }')
        with pytest.raises(FrameFileError, match="line 2"):
            load_frame(path)

    def test_missing_field(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"ambient_dim": 2, "blocks": []}))
        with pytest.raises(FrameFileError, match="field"):
            load_frame(path)

    def test_bad_entry_shape_names_the_spot(self, tmp_path):
        path = tmp_path / "bad.json"
        payload = {
            "ambient_dim": 2,
            "field": "real",
            "blocks": [{"rows": 1, "entries": [[1.0, 2.0, 3.0]]}],
        }
        path.write_text(json.dumps(payload))
        with pytest.raises(FrameFileError, match=r"blocks\[0\].entries\[0\]"):
            load_frame(path)

    def test_complex_entry_must_be_pair(self, tmp_path):
        path = tmp_path / "bad.json"
        payload = {
            "ambient_dim": 1,
            "field": "complex",
            "blocks": [{"rows": 1, "entries": [[7]]}],
        }
        path.write_text(json.dumps(payload))
        with pytest.raises(FrameFileError, match=r"entries\[0\]\[0\]"):
            load_frame(path)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        payload = {
            "ambient_dim": 1,
            "field": "real",
            "blocks": [{"rows": 1, "entries": [[1e400]]}],
        }
        path.write_text(json.dumps(payload))
        with pytest.raises(FrameFileError, match="finite"):
            load_frame(path)

    def test_frame_where_family_expected(self, frame_file):
        with pytest.raises(FrameFileError, match="frames"):
            load_family(frame_file)


class TestAnalyzeCommand:
    def test_identity_onb(self, frame_file, tmp_path, capsys):
        out = tmp_path / "rep.json"
        code = main(["analyze", str(frame_file), "--json", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["frame_bounds"]["parseval"] is True
        assert payload["frame_bounds"]["classification"] == "g-frame"
        assert payload["g_orthonormal"] is True
        assert payload["canonical_dual_available"] is True

    def test_rank_deficient_analyzes_fine(self, tmp_path):
        path = tmp_path / "thin.json"
        save_frame(GFrame(2, (np.array([[2.0, 0.0]]),)), path)
        out = tmp_path / "rep.json"
        code = main(["analyze", str(path), "--json", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["frame_bounds"]["classification"] == "degenerate"
        assert payload["canonical_dual_available"] is False

    def test_parse_error_exit_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        code = main(["analyze", str(path)])
        assert code == 2
        assert "invalid JSON" in capsys.readouterr().err

    def test_golden_determinism(self, frame_file, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["analyze", str(frame_file), "--json", str(a)]) == 0
        assert main(["analyze", str(frame_file), "--json", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestWeaveCommand:
    def test_copies_exit_0(self, copies_family_file, tmp_path):
        out = tmp_path / "w.json"
        code = main(["weave", str(copies_family_file), "--json", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["report"]["status"] == "woven"
        assert payload["report"]["universal_lower"] == pytest.approx(1.0, abs=1e-12)

    def test_swapped_exit_1_with_witness(self, swapped_family_file, tmp_path):
        out = tmp_path / "w.json"
        code = main(["weave", str(swapped_family_file), "--json", str(out)])
        assert code == 1
        payload = json.loads(out.read_text())
        assert payload["report"]["witness_lower"] == [1, 2]

    def test_budget_exceeded_exit_5(self, tmp_path, capsys):
        f = onb_frame(2)
        blocks = tuple(f.blocks[i % 2] for i in range(30))
        big = GFrame(2, blocks)
        path = tmp_path / "big.json"
        save_family(GFrameFamily((big, big)), path)
        code = main(["weave", str(path)])
        assert code == 5
        assert "2^30 = 1073741824" in capsys.readouterr().err

    def test_budget_env_override(self, tmp_path, capsys, monkeypatch):
        fam = swapped_onb_family()
        path = tmp_path / "fam.json"
        save_family(fam, path)
        monkeypatch.setenv("GWEAVE_BUDGET", "2")
        assert main(["weave", str(path)]) == 5
        monkeypatch.setenv("GWEAVE_BUDGET", "100")
        assert main(["weave", str(path)]) == 1

    def test_sampled_inconclusive_exit_4(self, copies_family_file):
        code = main([
            "weave", str(copies_family_file), "--mode", "sampled",
            "--budget", "16", "--seed", "1",
        ])
        assert code == 4

    def test_sampled_determinism(self, swapped_family_file, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["weave", str(swapped_family_file), "--mode", "sampled",
                "--budget", "32", "--seed", "9"]
        assert main(args + ["--json", str(a)]) == 1
        assert main(args + ["--json", str(b)]) == 1
        assert a.read_bytes() == b.read_bytes()


class TestCertifyCommand:
    def test_k_identical_pair(self, copies_family_file, tmp_path):
        out = tmp_path / "k.json"
        code = main([
            "certify", str(copies_family_file), "--theorem", "k",
            "--cross-check", "--json", str(out),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["status"] == "feasible"
        assert payload["certificate"]["k"] == pytest.approx(0.0, abs=1e-12)
        assert payload["certificate"]["predicted_lower"] == pytest.approx(2 / 3, abs=1e-12)
        assert payload["cross_check"]["universal_lower"] >= payload["certificate"]["predicted_lower"] - 1e-8

    def test_pw_scaled_pair(self, tmp_path):
        f = onb_frame(2)
        fam = GFrameFamily((f, apply_operator(f, 1.1 * np.eye(2))))
        path = tmp_path / "fam.json"
        save_family(fam, path)
        out = tmp_path / "pw.json"
        code = main([
            "certify", str(path), "--theorem", "pw", "--base", "1",
            "--lam", "0.1", "--cross-check", "--json", str(out),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["status"] == "valid"
        assert payload["certificate"]["predicted_lower"] == pytest.approx(0.79, abs=1e-9)
        assert payload["cross_check"]["universal_lower"] == pytest.approx(1.0, abs=1e-10)

    def test_pw_chain(self, tmp_path):
        f = onb_frame(2)
        fam = GFrameFamily(
            (f, apply_operator(f, 1.05 * np.eye(2)), apply_operator(f, 1.1 * np.eye(2)))
        )
        path = tmp_path / "fam3.json"
        save_family(fam, path)
        code = main([
            "certify", str(path), "--theorem", "pw-chain", "--lam", "0.051,0.051",
        ])
        assert code == 0

    def test_scaled_dual_hypothesis_fails_exit_6(self, tmp_path):
        f = GFrame(2, (np.array([[1.0, 0.0]]), np.array([[0.0, np.sqrt(2.5)]])))
        path = tmp_path / "wide.json"
        save_frame(f, path)
        out = tmp_path / "sd.json"
        code = main(["certify", str(path), "--theorem", "scaled-dual", "--json", str(out)])
        assert code == 6
        payload = json.loads(out.read_text())
        assert payload["status"] == "hypothesis-fails"
        assert payload["certificate"]["ratio"] == pytest.approx(2.5, abs=1e-12)

    def test_scaled_dual_valid(self, frame_file):
        assert main(["certify", str(frame_file), "--theorem", "scaled-dual"]) == 0

    def test_op_perturb_with_operator_file(self, frame_file, tmp_path):
        ops = tmp_path / "ops.json"
        ops.write_text(json.dumps({
            "field": "real",
            "matrices": [[[0.9, 0.0], [0.0, 0.9]]],
        }))
        out = tmp_path / "op.json"
        code = main([
            "certify", str(frame_file), "--theorem", "op-perturb",
            "--operators", str(ops), "--cross-check", "--json", str(out),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["certificate"]["predicted_lower"] == pytest.approx(0.81, abs=1e-12)
        assert payload["cross_check"]["universal_lower"] == pytest.approx(0.81, abs=1e-12)

    def test_pw_sampled_inconclusive_exit_4(self, tmp_path):
        f = onb_frame(2)
        fam = GFrameFamily((f, apply_operator(f, 1.1 * np.eye(2))))
        path = tmp_path / "fam.json"
        save_family(fam, path)
        code = main([
            "certify", str(path), "--theorem", "pw", "--lam", "0.2",
            "--eta", "0.01", "--mode", "sampled", "--trials", "50",
        ])
        assert code == 4


class TestRieszCommand:
    def test_frame_bounds(self, frame_file, tmp_path):
        out = tmp_path / "r.json"
        assert main(["riesz", str(frame_file), "--json", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["riesz_bounds"]["is_basis"] is True

    def test_permutation_flag(self, frame_file):
        assert main(["riesz", str(frame_file), "--permutation", "1,2"]) == 0
        assert main(["riesz", str(frame_file), "--permutation", "2,1"]) == 1

    def test_family_report(self, swapped_family_file, tmp_path):
        out = tmp_path / "r.json"
        code = main(["riesz", str(swapped_family_file), "--json", str(out)])
        assert code == 1
        payload = json.loads(out.read_text())
        assert payload["weaving_riesz"]["woven"] is False
        assert payload["equivalence_constants"]["a2"] == pytest.approx(0.0, abs=1e-12)

    def test_non_basis_family_exits_2(self, tmp_path, capsys):
        f = onb_frame(2)
        redundant = GFrame(2, f.blocks + (np.array([[0.5, 0.5]]),))
        other = GFrame(2, f.blocks + (np.array([[0.5, -0.5]]),))
        path = tmp_path / "fat.json"
        save_family(GFrameFamily((redundant, other)), path)
        assert main(["riesz", str(path)]) == 2
        assert "Riesz basis" in capsys.readouterr().err


class TestGenerateCommand:
    def test_generate_frame_and_analyze(self, tmp_path):
        out = tmp_path / "gen.json"
        code = main([
            "generate", "--kind", "prescribed-spectrum", "--n", "2",
            "--dims", "1,1,1", "--spectrum", "1,4", "--seed", "5",
            "--out", str(out),
        ])
        assert code == 0
        loaded = load_frame(out)
        assert loaded.ambient_dim == 2

    def test_generate_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["generate", "--kind", "parseval", "--n", "2", "--dims", "1,1",
                "--seed", "3"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_generate_family(self, tmp_path):
        out = tmp_path / "fam.json"
        code = main([
            "generate", "--kind", "perturbed", "--n", "2", "--dims", "1,1,1",
            "--noise-scale", "0.01", "--seed", "2", "--out", str(out),
        ])
        assert code == 0
        fam = load_family(out)
        assert fam.m == 2

    def test_inconsistent_flags_exit_2(self, tmp_path, capsys):
        code = main([
            "generate", "--kind", "riesz-basis", "--n", "3", "--dims", "1,1",
            "--seed", "0", "--out", str(tmp_path / "x.json"),
        ])
        assert code == 2
        assert "summing" in capsys.readouterr().err


class TestNumericFailureExit:
    def test_linalg_error_maps_to_exit_3(self, frame_file, monkeypatch, capsys):
        import gweave.cli as cli_mod

        def boom(*args, **kwargs):
            raise np.linalg.LinAlgError("no convergence")

        monkeypatch.setattr(cli_mod, "frame_bounds", boom)
        assert main(["analyze", str(frame_file)]) == 3
        assert "numeric failure" in capsys.readouterr().err
