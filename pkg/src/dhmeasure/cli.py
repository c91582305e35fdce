"""Command-line entry point.

Subcommands: density, marginal, polytope, average, kronecker,
multiplicity-measure, verify.  All rational inputs are parsed exactly from
"p/q" strings and serialized back as strings, never floats; CSV density grids
render 12 significant digits and are presentation-only.

Exit codes: 0 success, 2 parse error, 3 engine precondition, 4 scale guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction as Q
from typing import List, Optional, Sequence

from .chambers import GeometryError, polytope_vertices
from .measure_engine import (EngineError, PiecewiseMeasure, measure_from_json,
                             measure_to_json)
from .multiplicity import ScaleError, YoungDiagram, kronecker, \
    multiplicity_measure
from .polyring import Polynomial
from .qmarginal import (AssumptionError, CoadjointOrbit, MarginalProblem,
                        PureFS, abelian_distribution,
                        average_against_distribution, average_functional,
                        eigenvalue_distribution, moment_polytope,
                        problem_from_json, problem_to_json)
from .rootdata import GroupSpec, RepSpec


class ParseFailure(ValueError):
    pass


def _q(s: str) -> Q:
    try:
        return Q(s)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseFailure(f"bad rational {s!r}: {e}") from None


def _q_str(x: Q) -> str:
    return f"{x.numerator}/{x.denominator}"


def _q_list(s: str) -> List[Q]:
    return [_q(part) for part in s.split(",") if part != ""]


def _int_list(s: str) -> List[int]:
    try:
        return [int(p) for p in s.split(",") if p != ""]
    except ValueError as e:
        raise ParseFailure(f"bad integer list {s!r}: {e}") from None


def _problem_from_args(args) -> MarginalProblem:
    if getattr(args, "spec", None):
        try:
            with open(args.spec) as f:
                return problem_from_json(f.read())
        except (OSError, ValueError, KeyError) as e:
            raise ParseFailure(f"cannot read problem spec: {e}") from None
    kind = args.kind
    if kind is None:
        raise ParseFailure("either --spec or --kind is required")
    env = args.env
    try:
        if kind == "distinguishable":
            if not args.dims:
                raise ParseFailure("--dims is required for distinguishable")
            rep = RepSpec(GroupSpec(tuple(_int_list(args.dims))), "tensor",
                          env=env)
        elif kind in ("bosonic", "fermionic"):
            if args.dim is None or args.power is None:
                raise ParseFailure(f"--dim and --power are required for {kind}")
            rep = RepSpec(GroupSpec((args.dim,)),
                          "sym" if kind == "bosonic" else "alt",
                          args.power, env=env)
        elif kind == "onesided":
            if args.dim is None or args.power is None:
                raise ParseFailure("--dim and --power are required for onesided")
            rep = RepSpec(GroupSpec((args.dim,)), "onesided", args.power)
        else:
            raise ParseFailure(f"unknown kind {kind!r}")
    except ValueError as e:
        if isinstance(e, ParseFailure):
            raise
        raise ParseFailure(str(e)) from None
    if args.orbit:
        state = CoadjointOrbit(tuple(_q_list(args.orbit)))
        return MarginalProblem(rep, state)
    return MarginalProblem(rep, PureFS())


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spec", help="path to a marginal-problem JSON file")
    p.add_argument("--kind", choices=["distinguishable", "bosonic",
                                      "fermionic", "onesided"])
    p.add_argument("--dims", help="comma-separated factor dimensions")
    p.add_argument("--dim", type=int, help="single-factor dimension")
    p.add_argument("--power", type=int, help="symmetric/antisymmetric power "
                                             "or environment multiplicity")
    p.add_argument("--env", type=int, help="tracked environment dimension")
    p.add_argument("--orbit", help="global coadjoint-orbit spectrum, e.g. "
                                   "4/7,2/7,1/7,0")
    p.add_argument("--pure", action="store_true",
                   help="pure global state (the default)")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", "-o", help="output path (default stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--grid", default="1/100",
                   help="CSV grid spacing as a rational (default 1/100)")


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _fmt12(x: float) -> str:
    return f"{x:.12g}"


def _measure_csv(m: PiecewiseMeasure, step: Q) -> str:
    """Density sampled on a rational grid.  Cell densities are tabulated over
    the bounding box of the nonzero cells; if the measure is carried entirely
    by codimension-one layers, each layer is tabulated in its wall
    coordinates."""
    lines: List[str] = []
    live = [(c, d) for c, d in zip(m.cells, m.densities) if not d.is_zero()]
    if live:
        dim = m.dim
        los = [min(v[i] for c, _ in live for v in c.vertices)
               for i in range(dim)]
        his = [max(v[i] for c, _ in live for v in c.vertices)
               for i in range(dim)]
        lines.append(",".join([f"x{i}" for i in range(dim)] + ["density"]))

        def rec(i: int, point: List[Q]):
            if i == dim:
                val = None
                for c, d in zip(m.cells, m.densities):
                    if c.contains(tuple(point), strict=False):
                        val = d.evaluate(tuple(point))
                        break
                if val is None:
                    val = Q(0)
                lines.append(",".join([_fmt12(float(x)) for x in point]
                                      + [_fmt12(float(val))]))
                return
            t = los[i]
            while t <= his[i]:
                rec(i + 1, point + [t])
                t += step

        rec(0, [])
    for li, layer in enumerate(m.layers):
        if layer.density.is_zero():
            continue
        verts = polytope_vertices(list(layer.support))
        if not verts:
            continue
        wdim = len(verts[0])
        lines.append(",".join([f"layer{li}_w{i}" for i in range(wdim)]
                              + ["density"]))
        los = [min(v[i] for v in verts) for i in range(wdim)]
        his = [max(v[i] for v in verts) for i in range(wdim)]

        def lrec(i: int, point: List[Q]):
            if i == wdim:
                if all(sum(a * x for a, x in zip(cons[0], point)) <= cons[1]
                       for cons in layer.support):
                    val = layer.density.evaluate(tuple(point))
                    lines.append(",".join([_fmt12(float(x)) for x in point]
                                          + [_fmt12(float(val))]))
                return
            t = los[i]
            while t <= his[i]:
                lrec(i + 1, point + [t])
                t += step

        lrec(0, [])
    return "\n".join(lines) + "\n"


def _export_measure(args, m: PiecewiseMeasure) -> None:
    if args.format == "json":
        _emit(args, json.dumps(measure_to_json(m), indent=1, sort_keys=True)
              + "\n")
    else:
        _emit(args, _measure_csv(m, _q(args.grid)))


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------


def _cmd_density(args) -> int:
    problem = _problem_from_args(args)
    if args.abelian:
        m, _vol = abelian_distribution(problem)
    else:
        m = eigenvalue_distribution(problem, frame=args.frame)
    _export_measure(args, m)
    return 0


def _cmd_marginal(args) -> int:
    problem = _problem_from_args(args)
    m = eigenvalue_distribution(problem, frame="spectra")
    _export_measure(args, m)
    return 0


def _cmd_polytope(args) -> int:
    problem = _problem_from_args(args)
    poly = moment_polytope(problem)
    data = {
        "schema": "moment-polytope/1",
        "equalities": [[[_q_str(c) for c in a], _q_str(b)]
                       for a, b in poly.equalities],
        "inequalities": [[[_q_str(c) for c in a], _q_str(b)]
                         for a, b in poly.inequalities],
        "vertices": [[_q_str(c) for c in v] for v in poly.vertices],
    }
    _emit(args, json.dumps(data, indent=1, sort_keys=True) + "\n")
    return 0


def _purity_polynomial(problem: MarginalProblem, factor: int) -> Polynomial:
    dims = problem.rep.symmetry_group.factors
    r = sum(d - 1 for d in dims)
    start = sum(d - 1 for d in dims[:factor])
    d = dims[factor]
    poly = Polynomial.zero(r)
    tail = Polynomial.constant(r, 1)
    for i in range(d - 1):
        xi = Polynomial.variable(r, start + i)
        poly = poly + xi * xi
        tail = tail - xi
    return poly + tail * tail


def _cmd_average(args) -> int:
    problem = _problem_from_args(args)
    if args.purity is not None:
        f = _purity_polynomial(problem, args.purity)
        label = f"purity[{args.purity}]"
        val = average_functional(problem, f, frame="spectra")
    elif args.linear:
        coeffs = _q_list(args.linear)
        dims = problem.rep.symmetry_group.factors
        r = sum(d - 1 for d in dims)
        if len(coeffs) != r:
            raise ParseFailure("--linear needs one coefficient per "
                               "spectra coordinate")
        f = Polynomial.linear_form(coeffs)
        label = "linear"
        # linear statistics of ordered spectra are generally not symmetric
        # under eigenvalue reordering, so the dual-route pairing does not
        # apply; integrate against the exact distribution instead
        val = average_against_distribution(problem, f, frame="spectra")
    else:
        raise ParseFailure("--purity or --linear is required")
    _emit(args, json.dumps({"schema": "average/1", "statistic": label,
                            "value": _q_str(val), "value_float": float(val)},
                           indent=1, sort_keys=True) + "\n")
    return 0


def _cmd_kronecker(args) -> int:
    try:
        lam = YoungDiagram(tuple(_int_list(getattr(args, "lambda"))))
        mu = YoungDiagram(tuple(_int_list(args.mu)))
        nu = YoungDiagram(tuple(_int_list(args.nu)))
    except ValueError as e:
        raise ParseFailure(str(e)) from None
    _emit(args, str(kronecker(lam, mu, nu)) + "\n")
    return 0


def _cmd_multiplicity_measure(args) -> int:
    problem = _problem_from_args(args)
    target = problem if isinstance(problem.global_state, CoadjointOrbit) \
        else problem.rep
    atoms = multiplicity_measure(target, args.k)
    data = {
        "schema": "multiplicity-measure/1",
        "k": args.k,
        "frame": atoms[0][0].frame if atoms else "",
        "atoms": [{"point": [_q_str(c) for c in p.coords],
                   "mass": _q_str(w)} for p, w in atoms],
        "total_mass": _q_str(sum((w for _, w in atoms), Q(0))),
    }
    _emit(args, json.dumps(data, indent=1, sort_keys=True) + "\n")
    return 0


def _cmd_verify(args) -> int:
    from . import mc_oracle
    problem = _problem_from_args(args)
    exact = eigenvalue_distribution(problem, frame="spectra")
    batch = mc_oracle.sample(problem, args.samples, args.seed)
    report = {"schema": "verify/1", "samples": args.samples,
              "seed": args.seed, "statistics": {}}
    nfac = len(batch.samples[0]) if batch.samples else 0
    for j in range(nfac):
        ks = mc_oracle.ks_distance(batch, exact, ("lmax", j))
        report["statistics"][f"lmax[{j}]"] = {"ks": round(ks, 6),
                                              "pass": ks < args.threshold}
    ok = all(v["pass"] for v in report["statistics"].values())
    report["pass"] = ok
    _emit(args, json.dumps(report, indent=1, sort_keys=True) + "\n")
    return 0 if ok else 3


# ---------------------------------------------------------------------------
# argument parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="dhmeasure",
        description="Exact pushforward densities, moment polytopes, "
                    "eigenvalue distributions, Kronecker coefficients and a "
                    "Monte-Carlo verifier.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="pushforward density")
    _add_problem_flags(p)
    _add_output_flags(p)
    p.add_argument("--abelian", action="store_true",
                   help="torus pushforward instead of the eigenvalue density")
    p.add_argument("--frame", default="spectra",
                   choices=["spectra", "weyl"])
    p.set_defaults(fn=_cmd_density)

    p = sub.add_parser("marginal", help="joint eigenvalue distribution")
    _add_problem_flags(p)
    _add_output_flags(p)
    p.set_defaults(fn=_cmd_marginal)

    p = sub.add_parser("polytope", help="moment polytope")
    _add_problem_flags(p)
    _add_output_flags(p)
    p.set_defaults(fn=_cmd_polytope)

    p = sub.add_parser("average", help="exact averaged statistic")
    _add_problem_flags(p)
    _add_output_flags(p)
    p.add_argument("--purity", type=int, metavar="FACTOR",
                   help="reduced purity of the given factor")
    p.add_argument("--linear", metavar="COEFFS",
                   help="linear statistic over the spectra coordinates")
    p.set_defaults(fn=_cmd_average)

    p = sub.add_parser("kronecker", help="Kronecker coefficient")
    p.add_argument("--lambda", required=True, metavar="PARTS")
    p.add_argument("--mu", required=True, metavar="PARTS")
    p.add_argument("--nu", required=True, metavar="PARTS")
    _add_output_flags(p)
    p.set_defaults(fn=_cmd_kronecker)

    p = sub.add_parser("multiplicity-measure",
                       help="discrete multiplicity measure at level k")
    _add_problem_flags(p)
    _add_output_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(fn=_cmd_multiplicity_measure)

    p = sub.add_parser("verify", help="Monte-Carlo agreement report")
    _add_problem_flags(p)
    _add_output_flags(p)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=0.01)
    p.set_defaults(fn=_cmd_verify)

    return top


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except ParseFailure as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except ScaleError as e:
        print(f"scale guard: {e}", file=sys.stderr)
        return 4
    except (EngineError, GeometryError, AssumptionError, ValueError) as e:
        print(f"engine error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
