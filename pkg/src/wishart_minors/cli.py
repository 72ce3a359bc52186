"""Command-line front end.

Exit codes: 0 success, 2 invalid input or domain error, 3 series or
arithmetic failure, 4 check failed (validation mismatch or violated bound).
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from .errors import DomainError, WishartMinorsError
from .gpi import conjecture_probe, fuzz_chain, wishart_gpi_bound
from .hyperfun.series import DEFAULT_MAX_DEGREE, DEFAULT_TOL, gauss_2f1, hypergeom_eigs
from .linalg import SymMatrix, sym_eigen
from .mc import McConfig, estimate_moment
from .wishart import MomentQuery, WishartModel, moment_factors

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_CONVERGENCE = 3
EXIT_MISMATCH = 4
#: |z| above which validate reports a mismatch
Z_LIMIT = 4.0


def _load_json(path: str) -> Any:
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _parse_matrix(text: str) -> SymMatrix:
    """A matrix given inline (JSON or Python literal), as ``@file`` or as a file path."""
    if text.startswith("@"):
        obj = _load_json(text[1:])
    elif text.lstrip().startswith(("[", "{")):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError:
            obj = ast.literal_eval(text)
    else:
        obj = _load_json(text)
    return SymMatrix.from_json(obj) if isinstance(obj, dict) else SymMatrix(obj)


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wishart-minors",
        description="Moments of principal minors of Wishart matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("json", "table"), default="json")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="series stopping tolerance")
    common.add_argument("--max-degree", type=int, default=DEFAULT_MAX_DEGREE, help="series degree cap")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", help="JSON file {alpha, sigma, p1}")
    model.add_argument("--alpha", type=float, help="degrees of freedom (overrides --model)")
    model.add_argument("--sigma", help="scale matrix as JSON rows or a file (overrides --model)")
    model.add_argument("--p1", type=int, help="size of the first block (overrides --model)")

    query = argparse.ArgumentParser(add_help=False)
    query.add_argument("--query", help="JSON file {nu0, nu1, nu2, tilt}")
    query.add_argument("--nu0", type=float)
    query.add_argument("--nu1", type=float)
    query.add_argument("--nu2", type=float)
    query.add_argument("--tilt", help="tilt matrix T as JSON rows or a file")

    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--samples", type=int, default=10**6)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--shards", type=int, default=1)
    mc.add_argument("--workers", type=int, default=1, help="threads used for shards")

    sub.add_parser("moment", parents=[common, model, query], help="closed-form moment")

    hyp = sub.add_parser("hypergeom", parents=[common], help="pFq of a symmetric matrix")
    hyp.add_argument("--upper", type=_floats, default=[], help="comma-separated upper parameters")
    hyp.add_argument("--lower", type=_floats, default=[], help="comma-separated lower parameters")
    src = hyp.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", help="argument as JSON rows or a file")
    src.add_argument("--eigenvalues", type=_floats, help="comma-separated eigenvalues of the argument")
    hyp.add_argument("--method", choices=("auto", "direct", "euler"), default="auto", help="2F1 evaluation path")

    val = sub.add_parser("validate", parents=[common, model, query, mc], help="closed form against Monte Carlo")
    val.add_argument("--corrupt-closed-form", type=float, default=1.0, help=argparse.SUPPRESS)

    gpi = sub.add_parser("gpi-check", parents=[common, model, query], help="product-inequality bound chain")
    gpi.add_argument("--fuzz", type=int, metavar="N", help="check N random (a, b, c, M) instead of a model")
    gpi.add_argument("--fuzz-seed", type=int, default=0)

    probe = sub.add_parser("probe", parents=[common, model, mc], help="Monte Carlo probe for several blocks")
    probe.add_argument("--splits", type=_ints, required=True, help="comma-separated block sizes")
    probe.add_argument("--nus", type=_floats, required=True, help="comma-separated exponents")
    return parser


def resolve_model(args: argparse.Namespace) -> WishartModel:
    obj: dict = dict(_load_json(args.model)) if args.model else {}
    if args.alpha is not None:
        obj["alpha"] = args.alpha
    if args.sigma is not None:
        obj["sigma"] = _parse_matrix(args.sigma).to_json()
    if getattr(args, "p1", None) is not None:
        obj["p1"] = args.p1
    if "sigma" in obj and "p1" not in obj and args.command == "probe":
        obj["p1"] = 1
    return WishartModel.from_json(obj)


def resolve_query(args: argparse.Namespace) -> MomentQuery:
    obj: dict = dict(_load_json(args.query)) if args.query else {}
    for name in ("nu0", "nu1", "nu2"):
        value = getattr(args, name)
        if value is not None:
            obj[name] = value
    if args.tilt is not None:
        obj["tilt"] = _parse_matrix(args.tilt).to_json()
    return MomentQuery.from_json(obj)


def _config(args: argparse.Namespace, **extra: Any) -> dict:
    out = {"command": args.command, "tol": args.tol, "max_degree": args.max_degree}
    out.update(extra)
    return out


def cmd_moment(args: argparse.Namespace) -> tuple[int, dict]:
    model, q = resolve_model(args), resolve_query(args)
    factors = moment_factors(model, q, args.tol, args.max_degree)
    payload = {
        "config": _config(args, model=model.to_json(), query=q.to_json()),
        "value": factors.value,
        "terminated_exactly": factors.f21.terminated_exactly,
        "degree": factors.f21.degree_reached,
        "factors": factors.as_dict(),
    }
    return EXIT_OK, payload


def cmd_hypergeom(args: argparse.Namespace) -> tuple[int, dict]:
    if args.matrix is not None:
        eigs = sym_eigen(_parse_matrix(args.matrix))[0]
    else:
        eigs = np.asarray(args.eigenvalues, dtype=float)
    if len(args.upper) == 2 and len(args.lower) == 1:
        res = gauss_2f1(*args.upper, args.lower[0], eigs, args.tol, args.max_degree, args.method)
    else:
        res = hypergeom_eigs(args.upper, args.lower, eigs, args.tol, args.max_degree)
    payload = {
        "config": _config(args, upper=args.upper, lower=args.lower, eigenvalues=[float(v) for v in eigs],
                          method=args.method),
        "value": res.value,
        "degree": res.degree_reached,
        "last_layer_abs": res.last_layer_abs,
        "terminated_exactly": res.terminated_exactly,
        "method": res.method,
    }
    return EXIT_OK, payload


def _mc_config(args: argparse.Namespace) -> McConfig:
    return McConfig(args.samples, args.seed, args.shards, args.workers)


def _mc_json(cfg: McConfig) -> dict:
    return {"samples": cfg.samples, "seed": cfg.seed, "shards": cfg.shards, "workers": cfg.workers}


def cmd_validate(args: argparse.Namespace) -> tuple[int, dict]:
    model, q, cfg = resolve_model(args), resolve_query(args), _mc_config(args)
    factors = moment_factors(model, q, args.tol, args.max_degree)
    closed = factors.value * args.corrupt_closed_form
    est = estimate_moment(model, q, cfg)
    diff = closed - est.mean
    if est.std_error > 0:
        z = diff / est.std_error
    else:
        z = 0.0 if abs(diff) <= 1e-12 * abs(closed) else math.copysign(math.inf, diff)
    payload = {
        "config": _config(args, model=model.to_json(), query=q.to_json(), mc=_mc_json(cfg)),
        "closed_form": closed,
        "mc": est.to_json(),
        "z": z,
        "agree": abs(z) <= Z_LIMIT,
    }
    return (EXIT_OK if abs(z) <= Z_LIMIT else EXIT_MISMATCH), payload


def cmd_gpi_check(args: argparse.Namespace) -> tuple[int, dict]:
    if args.fuzz is not None:
        if args.fuzz < 1:
            raise DomainError("--fuzz needs a positive number of draws")
        summary = fuzz_chain(args.fuzz, args.fuzz_seed, tol=args.tol, max_degree=args.max_degree)
        payload = {"config": _config(args, fuzz=args.fuzz, fuzz_seed=args.fuzz_seed), **summary.to_json()}
        return (EXIT_OK if summary.ok else EXIT_MISMATCH), payload
    model, q = resolve_model(args), resolve_query(args)
    result = wishart_gpi_bound(model, q, args.tol, args.max_degree)
    payload = {
        "config": _config(args, model=model.to_json(), query=q.to_json()),
        **result.to_json(),
        "holds": result.report.holds(),
    }
    return (EXIT_OK if result.report.holds() else EXIT_MISMATCH), payload


def cmd_probe(args: argparse.Namespace) -> tuple[int, dict]:
    model, cfg = resolve_model(args), _mc_config(args)
    report = conjecture_probe(model.alpha, model.sigma, args.splits, args.nus, cfg)
    payload = {
        "config": _config(
            args,
            alpha=model.alpha,
            sigma=model.sigma.to_json(),
            splits=list(args.splits),
            nus=list(args.nus),
            mc=_mc_json(cfg),
        ),
        **report.to_json(),
    }
    return EXIT_OK, payload


COMMANDS = {
    "moment": cmd_moment,
    "hypergeom": cmd_hypergeom,
    "validate": cmd_validate,
    "gpi-check": cmd_gpi_check,
    "probe": cmd_probe,
}


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(obj, dict):
        rows = []
        for key, value in obj.items():
            rows.extend(_flatten(value, f"{prefix}.{key}" if prefix else key))
        return rows
    return [(prefix, obj)]


def render(payload: dict, output: str) -> str:
    if output == "json":
        return json.dumps(payload, indent=2)
    rows = [(k, json.dumps(v)) for k, v in _flatten(payload)]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, payload = COMMANDS[args.command](args)
    except (DomainError, ValueError, SyntaxError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (WishartMinorsError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    print(render(payload, args.output))
    return code


if __name__ == "__main__":
    sys.exit(main())
