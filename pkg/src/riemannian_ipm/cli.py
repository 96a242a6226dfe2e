"""Command line front end: ``solve``, ``check`` and ``gen``.

Exit codes: 0 success, 1 malformed input or failed check, 2 infeasible or
degenerate problem data, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import jsonschema
import numpy as np

from . import io
from .exceptions import NumericalFailure, RipmError
from .functions import KempfNessSpec
from .manifolds import manifold_from_dict
from .numcheck import hyperbolic_tightness
from .solvers import (
    BarycenterProblem,
    MebProblem,
    MedianProblem,
    ScalingProblem,
    barycenter_solve,
    kempf_ness_solve,
    meb_solve,
    median_solve,
)
from .suites import SUITES, run_suite

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_NUMERICAL = 0, 1, 2, 3


class InputError(Exception):
    pass


def parse_manifold(text):
    """'pd:3', 'pd:3:traceless', 'hyperboloid:2[:kappa]', 'euclidean:n' or a JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return manifold_from_dict(json.loads(text))
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind in ("pd", "pd_hermitian"):
            return manifold_from_dict({"kind": "pd_hermitian", "n": int(parts[1]),
                                       "traceless": len(parts) > 2 and parts[2] == "traceless"})
        if kind == "hyperboloid":
            kappa = float(parts[2]) if len(parts) > 2 else 1.0
            return manifold_from_dict({"kind": "hyperboloid", "n": int(parts[1]), "kappa": kappa})
        if kind == "euclidean":
            return manifold_from_dict({"kind": "euclidean", "n": int(parts[1])})
    except (IndexError, ValueError) as exc:
        raise InputError(f"bad manifold descriptor {text!r}") from exc
    raise InputError(f"unknown manifold kind {kind!r}")


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def _points(spec, M):
    if "points" not in spec:
        raise InputError("spec needs 'points'")
    try:
        return [io.decode_point(M, q) for q in spec["points"]]
    except (ValueError, TypeError) as exc:
        raise InputError(f"bad point data: {exc}") from exc


def _common(spec):
    return {"epsilon": spec.get("epsilon", io.DEFAULTS["epsilon"]),
            "adaptive": spec.get("adaptive", False),
            "max_iter": spec.get("max_iter", io.DEFAULTS["max_iter"])}


def _trace_summary(trace):
    return {"path_iters": trace.path_iters, "damped_iters": trace.damped_iters,
            "final_gap": trace.final_gap, "t0": trace.t0}


def run_problem(spec):
    """Dispatch a validated spec; returns (result dict, trace or None)."""
    kind = spec["problem"]
    if kind == "scaling":
        if "tensor" not in spec or "S0" not in spec:
            raise InputError("scaling needs 'tensor' and 'S0'")
        v = io.decode_tensor(spec["tensor"])
        ks = KempfNessSpec(v.shape, v, spec.get("traceless", False), spec.get("weight_norm"))
        c = _common(spec)
        r = kempf_ness_solve(ScalingProblem(ks, spec["S0"], **c))
        M = ks.manifold
        out = {"problem": kind, "point": io.encode_point(M, r.point), "value": r.value,
               "marginal_residual": r.marginal_residual}
        return {**out, **_trace_summary(r.trace)}, r.trace
    M = io.manifold_of(spec)
    pts = _points(spec, M)
    c = _common(spec)
    damped = spec.get("damped_max_iter", io.DEFAULTS["damped_max_iter"])
    if kind == "meb":
        r = meb_solve(MebProblem(M, pts, damped_max_iter=damped, S0=spec.get("S0"), **c))
        out = {"center": io.encode_point(M, r.center), "radius": r.radius}
    elif kind == "median":
        r = median_solve(MedianProblem(M, pts, damped_max_iter=damped, R0=spec.get("R0"), **c))
        out = {"median": io.encode_point(M, r.median), "objective": r.objective}
    elif kind == "barycenter":
        r = barycenter_solve(BarycenterProblem(M, pts, damped_max_iter=damped, **c))
        out = {"point": io.encode_point(M, r.point), "objective": r.objective}
    else:
        raise InputError(f"problem {kind!r} cannot be solved")
    return {"problem": kind, **out, **_trace_summary(r.trace)}, r.trace


def _load_spec(path):
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
        io.validate_spec(spec)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read spec: {exc}") from exc
    except jsonschema.ValidationError as exc:
        raise InputError(f"invalid spec: {exc.message}") from exc
    return spec


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_solve(args):
    spec = _load_spec(args.spec)
    if args.eps is not None:
        spec["epsilon"] = args.eps
    if args.adaptive:
        spec["adaptive"] = True
    if args.traceless:
        spec["traceless"] = True
    if spec["problem"] == "check":
        return _run_checks([spec.get("suite", "all")], spec.get("seed", 1),
                           spec.get("trials", io.DEFAULTS["trials"]), 1, None)
    if spec["problem"] == "gen":
        return _gen_from_spec(spec, args.out)
    result, trace = run_problem(spec)
    _write(args.out, io.dumps(result))
    if args.trace and trace is not None:
        _write(args.trace, trace.to_csv())
    return EXIT_OK


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def _run_checks(names, seed, trials, jobs, l):
    reports = []
    for name in names:
        if name == "tightness":
            sigma = hyperbolic_tightness(50.0 if l is None else l)
            print(f"tightness  l={50.0 if l is None else l}  sigma={sigma:.7f}  limit={1 / math.sqrt(2):.7f}")
            continue
        if name == "all":
            reports.extend(run_suite(n, seed, trials, jobs) for n in SUITES)
        elif name in SUITES:
            reports.append(run_suite(name, seed, trials, jobs))
        else:
            print(f"unknown suite {name!r}; available: all, tightness, {', '.join(SUITES)}",
                  file=sys.stderr)
            return EXIT_INPUT
    for r in reports:
        print(r.line())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_INPUT


def cmd_check(args):
    return _run_checks([args.suite], args.seed, args.trials, args.jobs, args.l)


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def generate(problem, manifold, m, spread, seed, eps=None, dims=None, S0=None):
    """Deterministic problem spec: points are exp(origin, spread * gaussian tangent)."""
    rng = np.random.default_rng(seed)
    spec = {"problem": problem, "seed": int(seed)}
    if eps is not None:
        spec["epsilon"] = float(eps)
    if problem == "scaling":
        dims = tuple(dims or (2, 2, 2))
        v = rng.standard_normal(dims) + 1j * rng.standard_normal(dims)
        spec.update({"tensor": io.encode_tensor(v), "S0": float(S0 or 8.0), "traceless": True})
        return spec
    spec["manifold"] = manifold.to_dict()
    base = manifold.origin()
    pts = [manifold.exp(base, manifold.random_tangent(base, rng, spread)) for _ in range(m)]
    spec["points"] = [io.encode_point(manifold, q) for q in pts]
    return spec


def _gen_from_spec(spec, out):
    M = io.manifold_of(spec) if "manifold" in spec else None
    g = generate(spec.get("gen_problem", "meb"), M, spec.get("m", 5), spec.get("spread", 1.0),
                 spec.get("seed", 0), spec.get("epsilon"), spec.get("dims"), spec.get("S0"))
    _write(out, io.dumps(g))
    return EXIT_OK


def cmd_gen(args):
    M = None if args.problem == "scaling" else parse_manifold(args.manifold)
    dims = [int(x) for x in args.dims.split(",")] if args.dims else None
    spec = generate(args.problem, M, args.m, args.spread, args.seed, args.eps, dims, args.S0)
    _write(args.out, io.dumps(spec))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="riemannian-ipm",
                                 description="Interior-point methods on Riemannian manifolds.")
    sub = ap.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("solve", help="solve a problem spec")
    s.add_argument("spec")
    s.add_argument("--out", default=None, help="result JSON path (stdout when omitted)")
    s.add_argument("--trace", default=None, help="trace CSV path")
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--adaptive", action="store_true", help="adaptive time steps (not the default schedule)")
    s.add_argument("--traceless", action="store_true")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", help="run a verification suite")
    c.add_argument("suite")
    c.add_argument("--seed", type=int, default=1)
    c.add_argument("--trials", type=int, default=100)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--l", type=float, default=None, help="distance for the tightness suite")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("gen", help="generate a random problem spec")
    g.add_argument("problem", choices=["meb", "median", "barycenter", "scaling"])
    g.add_argument("--manifold", default="pd:2")
    g.add_argument("--m", type=int, default=5)
    g.add_argument("--spread", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--eps", type=float, default=None)
    g.add_argument("--dims", default=None, help="tensor dims for scaling, e.g. 2,2,2")
    g.add_argument("--S0", type=float, default=None)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (RipmError, ValueError) as exc:
        print(f"infeasible or degenerate input: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
