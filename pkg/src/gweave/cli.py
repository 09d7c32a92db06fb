"""Command-line interface: analyze, weave, certify, riesz, generate.

Exit codes
----------
0   success (analysis done / woven / certificate valid)
1   not woven
2   unreadable or malformed input file (or bad usage)
3   numeric failure
4   sampled run finished without a conclusive answer
5   partition budget exceeded
6   certificate hypothesis fails (report still emitted)

The default partition budget is 10**6 and can be overridden by the
``GWEAVE_BUDGET`` environment variable or per-command ``--budget``.
All reports carry the tool version, tolerance settings and seed, and JSON
output is byte-stable across runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .fileio import (
    FrameFileError,
    load_any,
    load_family,
    load_frame,
    parse_matrix_entries,
    save_family,
    save_frame,
)
from .gframe import (
    DegenerateGFrameError,
    GFrame,
    frame_bounds,
    is_g_orthonormal,
)
from .generate import GenSpec, KINDS, generate
from .linalg import DEFAULT_TOL, Tolerance
from .perturb import (
    chained_certificate,
    minimal_k,
    operator_perturbation,
    perturbation_certificate,
    scaled_dual_weave,
)
from .riesz import (
    equivalence_constants,
    permutation_weave,
    riesz_bounds,
    weaving_riesz_check,
)
from .weaving import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    GFrameFamily,
    certify_woven,
)

EXIT_OK = 0
EXIT_NOT_WOVEN = 1
EXIT_PARSE = 2
EXIT_NUMERIC = 3
EXIT_INCONCLUSIVE = 4
EXIT_BUDGET = 5
EXIT_HYPOTHESIS = 6

_FAILING_STATUSES = {"hypothesis-fails", "lambda-below-gap", "falsified", "infeasible"}


def _tolerance(args) -> Tolerance:
    return Tolerance(
        rank_rtol=args.rank_rtol,
        frame_rtol=args.frame_rtol,
        eq_atol=args.eq_atol,
    )


def _budget(args) -> int:
    if args.budget is not None:
        return args.budget
    env = os.environ.get("GWEAVE_BUDGET")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise FrameFileError(f"GWEAVE_BUDGET must be an integer, got {env!r}") from exc
    return DEFAULT_BUDGET


def _tool_block(tol: Tolerance, seed=None, budget=None) -> dict:
    block = {
        "name": "gweave",
        "version": __version__,
        "tolerance": tol.as_dict(),
    }
    if seed is not None:
        block["seed"] = seed
    if budget is not None:
        block["budget"] = budget
    return block


def _emit(payload: dict, args) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.json is not None:
        Path(args.json).write_text(text)
    _print_human(payload)


def _print_human(payload: dict, indent: str = "") -> None:
    for key in sorted(payload):
        if key == "tool":
            continue
        value = payload[key]
        if isinstance(value, dict):
            print(f"{indent}{key}:")
            _print_human(value, indent + "  ")
        else:
            print(f"{indent}{key}: {value}")


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise FrameFileError(f"{flag}: expected comma-separated integers, got {text!r}") from exc


def _parse_float_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise FrameFileError(f"{flag}: expected comma-separated numbers, got {text!r}") from exc


def _load_operators(path, n: int) -> list[np.ndarray]:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FrameFileError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(payload, dict) or "matrices" not in payload:
        raise FrameFileError(f"{path}: expected an object with a 'matrices' field")
    field = payload.get("field", "complex")
    if field not in ("real", "complex"):
        raise FrameFileError(f"{path}.field: expected 'real' or 'complex'")
    mats = payload["matrices"]
    if not isinstance(mats, list) or not mats:
        raise FrameFileError(f"{path}.matrices: expected a nonempty list")
    return [
        parse_matrix_entries(entry, n, n, field, f"{path}.matrices[{k}]")
        for k, entry in enumerate(mats)
    ]


def cmd_analyze(args) -> int:
    tol = _tolerance(args)
    frame = load_frame(args.path)
    fb = frame_bounds(frame, tol)
    rb = riesz_bounds(frame, tol)
    tight = fb.is_frame and (fb.upper - fb.lower) <= tol.eq_atol * max(1.0, fb.upper)
    parseval = tight and abs(fb.upper - 1.0) <= tol.eq_atol
    payload = {
        "tool": _tool_block(tol),
        "frame": {
            "ambient_dim": frame.ambient_dim,
            "n_blocks": frame.n_blocks,
            "block_dims": list(frame.block_dims),
        },
        "frame_bounds": {
            "lower": fb.lower,
            "upper": fb.upper,
            "classification": fb.classification,
            "tight": tight,
            "parseval": parseval,
        },
        "riesz_bounds": {
            "lower": rb.lower,
            "upper": rb.upper,
            "complete": rb.complete,
            "is_basis": rb.is_basis,
        },
        "g_orthonormal": is_g_orthonormal(frame, tol),
        "canonical_dual_available": fb.is_frame,
    }
    _emit(payload, args)
    return EXIT_OK


def cmd_weave(args) -> int:
    tol = _tolerance(args)
    budget = _budget(args)
    fam = load_family(args.path)
    seed = args.seed if args.mode == "sampled" else None
    report = certify_woven(fam, mode=args.mode, budget=budget, seed=seed, tol=tol)
    payload = {
        "tool": _tool_block(tol, seed=seed, budget=budget),
        "family": {
            "m": fam.m,
            "ambient_dim": fam.ambient_dim,
            "n_indices": fam.n_indices,
            "block_dims": list(fam.block_dims),
        },
        "report": report.to_dict(),
    }
    _emit(payload, args)
    if report.status == "woven":
        return EXIT_OK
    if report.status == "not-woven":
        return EXIT_NOT_WOVEN
    return EXIT_INCONCLUSIVE


def _certify_payloads(args, tol, budget):
    loaded = load_any(args.path)
    theorem = args.theorem
    cross_family = None

    if theorem == "k":
        if not isinstance(loaded, GFrameFamily):
            raise FrameFileError("--theorem k needs a family file")
        cert = minimal_k(loaded, budget=budget, tol=tol)
        status = "feasible" if cert.feasible else "infeasible"
        body = cert.to_dict()
        cross_family = loaded
    elif theorem in ("pw", "pw-chain"):
        if not isinstance(loaded, GFrameFamily):
            raise FrameFileError(f"--theorem {theorem} needs a family file")
        count = loaded.m - 1
        lambdas = _parse_float_list(args.lam, "--lam") if args.lam else (0.0,) * count
        etas = _parse_float_list(args.eta, "--eta") if args.eta else None
        mus = _parse_float_list(args.mu, "--mu") if args.mu else None
        mode = {
            "exact": "exact-lambda-only",
            "sampled": "sampled-falsification",
        }[args.mode]
        if theorem == "pw":
            cert = perturbation_certificate(
                loaded, args.base, lambdas, etas, mus,
                mode=mode, trials=args.trials, seed=args.seed, tol=tol,
            )
        else:
            cert = chained_certificate(
                loaded, lambdas, etas, mus,
                mode=mode, trials=args.trials, seed=args.seed, tol=tol,
            )
        status = cert.status
        body = cert.to_dict()
        cross_family = loaded
    elif theorem == "op-perturb":
        if not isinstance(loaded, GFrame):
            raise FrameFileError("--theorem op-perturb needs a single-frame file")
        if not args.operators:
            raise FrameFileError("--theorem op-perturb needs --operators FILE")
        ops = _load_operators(args.operators, loaded.ambient_dim)
        report = operator_perturbation(loaded, ops, tol)
        status = "valid" if report.hypothesis_ok else "hypothesis-fails"
        body = report.to_dict()
        cross_family = report.family
    elif theorem == "scaled-dual":
        if not isinstance(loaded, GFrame):
            raise FrameFileError("--theorem scaled-dual needs a single-frame file")
        report = scaled_dual_weave(loaded, tol)
        status = "valid" if report.hypothesis_ok else "hypothesis-fails"
        body = report.to_dict()
        if report.op_report is not None:
            cross_family = report.op_report.family
    else:
        raise AssertionError(f"unhandled theorem {theorem!r}")
    return status, body, cross_family


def cmd_certify(args) -> int:
    tol = _tolerance(args)
    budget = _budget(args)
    status, body, cross_family = _certify_payloads(args, tol, budget)
    payload = {
        "tool": _tool_block(tol, seed=args.seed, budget=budget),
        "theorem": args.theorem,
        "status": status,
        "certificate": body,
    }
    if args.cross_check and cross_family is not None:
        cross = certify_woven(cross_family, mode="exhaustive", budget=budget, tol=tol)
        payload["cross_check"] = cross.to_dict()
    _emit(payload, args)
    if status in _FAILING_STATUSES:
        return EXIT_HYPOTHESIS
    if status == "not-falsified":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_riesz(args) -> int:
    tol = _tolerance(args)
    budget = _budget(args)
    loaded = load_any(args.path)
    payload = {"tool": _tool_block(tol, budget=budget)}
    code = EXIT_OK
    if isinstance(loaded, GFrame):
        rb = riesz_bounds(loaded, tol)
        payload["riesz_bounds"] = {
            "lower": rb.lower,
            "upper": rb.upper,
            "complete": rb.complete,
            "is_basis": rb.is_basis,
        }
        if args.permutation:
            pi = _parse_int_list(args.permutation, "--permutation")
            report = permutation_weave(loaded, pi, tol, budget=budget)
            payload["permutation_weave"] = {
                "permutation": list(report.permutation),
                "identity": report.identity,
                "woven": report.woven,
                "base_lower": report.base_lower,
                "base_upper": report.base_upper,
                "universal_lower": report.universal_lower,
                "universal_upper": report.universal_upper,
                "span_lower_min": report.span_lower_min,
                "witness": list(report.witness.labels) if report.witness else None,
            }
            code = EXIT_OK if report.woven else EXIT_NOT_WOVEN
    else:
        report = weaving_riesz_check(loaded, tol, budget=budget)
        payload["weaving_riesz"] = {
            "woven": report.woven,
            "common_lower": report.common_lower,
            "common_upper": report.common_upper,
            "witness_lower": list(report.witness_lower.labels),
            "witness_upper": list(report.witness_upper.labels),
            "partitions_checked": report.partitions_checked,
        }
        consts = equivalence_constants(loaded, tol, budget=budget)
        payload["equivalence_constants"] = {
            "riesz_low": consts.riesz_low,
            "riesz_up": consts.riesz_up,
            "a2": consts.a2,
            "d3": consts.d3,
            "e4": consts.e4,
        }
        code = EXIT_OK if report.woven else EXIT_NOT_WOVEN
    _emit(payload, args)
    return code


def cmd_generate(args) -> int:
    dims = _parse_int_list(args.dims, "--dims")
    spectrum = _parse_float_list(args.spectrum, "--spectrum") if args.spectrum else None
    try:
        spec = GenSpec(
            ambient_dim=args.n,
            block_dims=dims,
            kind=args.kind,
            seed=args.seed,
            spectrum=spectrum,
            noise_scale=args.noise_scale,
        )
        made = generate(spec)
    except ValueError as exc:
        raise FrameFileError(str(exc)) from exc
    if isinstance(made, GFrame):
        save_frame(made, args.out)
        kind_written = "frame"
    else:
        save_family(made, args.out)
        kind_written = "family"
    print(f"wrote {kind_written} ({args.kind}, seed {args.seed}) to {args.out}")
    return EXIT_OK


def _add_common(parser, with_seed=False, with_budget=False):
    parser.add_argument("--json", metavar="PATH", default=None, help="write a JSON report")
    parser.add_argument("--rank-rtol", type=float, default=DEFAULT_TOL.rank_rtol)
    parser.add_argument("--frame-rtol", type=float, default=DEFAULT_TOL.frame_rtol)
    parser.add_argument("--eq-atol", type=float, default=DEFAULT_TOL.eq_atol)
    if with_seed:
        parser.add_argument("--seed", type=int, default=0)
    if with_budget:
        parser.add_argument(
            "--budget", type=int, default=None,
            help="partition budget (default: GWEAVE_BUDGET env or 10**6)",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gweave",
        description="g-frame analysis and weaving certification",
    )
    parser.add_argument("--version", action="version", version=f"gweave {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="bounds and classification of a single frame file")
    p.add_argument("path")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("weave", help="certify a family file woven / not woven")
    p.add_argument("path")
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    _add_common(p, with_seed=True, with_budget=True)
    p.set_defaults(func=cmd_weave)

    p = sub.add_parser("certify", help="run a sufficient-condition certificate")
    p.add_argument("path")
    p.add_argument(
        "--theorem",
        required=True,
        choices=("k", "pw", "pw-chain", "op-perturb", "scaled-dual"),
    )
    p.add_argument("--base", type=int, default=1, help="base member for --theorem pw")
    p.add_argument("--lam", default=None, help="comma-separated lambda scalars")
    p.add_argument("--eta", default=None, help="comma-separated eta scalars")
    p.add_argument("--mu", default=None, help="comma-separated mu scalars")
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--operators", default=None, help="JSON file with per-index operators")
    p.add_argument("--cross-check", action="store_true",
                   help="also compute the exhaustive universal bounds")
    _add_common(p, with_seed=True, with_budget=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("riesz", help="Riesz bounds / Riesz weaving analysis")
    p.add_argument("path")
    p.add_argument("--permutation", default=None,
                   help="comma-separated permutation to weave a frame against itself")
    _add_common(p, with_budget=True)
    p.set_defaults(func=cmd_riesz)

    p = sub.add_parser("generate", help="write a seeded random frame or family file")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--n", required=True, type=int, help="ambient dimension")
    p.add_argument("--dims", required=True, help="comma-separated block dimensions")
    p.add_argument("--spectrum", default=None, help="comma-separated eigenvalues")
    p.add_argument("--noise-scale", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FrameFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DegenerateGFrameError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # precondition violations (wrong member count, non-basis input, ...)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
