"""Command-line front end.

Exit codes: 0 success, 2 usage or input error, 3 data-validation failure,
4 numerical failure.
"""

import argparse
import json
import sys

import numpy as np

from . import su2
from .cohomology import stabilizer_class
from .reduction import (NormalFormFailure, chart_csv, fingerprint_csv, is_corner,
                        pillowcase_chart, pillowcase_svg, restrict_to_sphere, sample_abund1,
                        sample_abund2, sample_abund3, submersion_probe)
from .solver import (classify, dedup_classes, fingerprint, local_rank,
                     points_from_json, points_to_json, solve_variety)
from .surface import (IncompleteCurveDatum, UnknownCurve, builtin_curves, curve_by_name,
                      relation_residual, surface_presentation, twist_flow)
from .tangles import (MalformedTangle, TangleDatum, braid_tangle, earring_tangle,
                      load_tangle, trivial_tangle)
from .words import IndexOutOfRange, UnknownGenerator, Word, eval_word

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code, msg):
        super().__init__(msg)
        self.code = code


def sphere_tangle(n):
    """Constraint data of the 2n-punctured sphere with traceless A_i, B_i."""
    model = surface_presentation(n)
    gens = model.sphere.generators
    words = tuple(Word.gen(g) for g in gens)
    return TangleDatum(model.sphere, words, words[0::2], words[1::2], gauge=gens[:1])


def surface_tangle(n):
    """The closed genus-n surface group (no meridians)."""
    model = surface_presentation(n)
    return TangleDatum(model.presentation, (), (), (), gauge=())


def resolve_tangle(spec):
    """A tangle JSON path or a builtin: trivial:N, braid:N:1,-2, sphere:N, surface:N, earring:EPS."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "trivial" and rest:
            return trivial_tangle(int(rest))
        if kind == "braid" and rest:
            n, _, word = rest.partition(":")
            braid = [int(s) for s in word.split(",") if s.strip()]
            return braid_tangle(braid, int(n))
        if kind == "sphere" and rest:
            return sphere_tangle(int(rest))
        if kind == "surface" and rest:
            return surface_tangle(int(rest))
        if kind == "earring" and rest:
            return earring_tangle(float(rest))
    except (ValueError, IndexOutOfRange) as exc:
        raise CliError(EXIT_USAGE, f"bad builtin tangle {spec!r}: {exc}") from exc
    try:
        return load_tangle(spec)
    except FileNotFoundError as exc:
        raise CliError(EXIT_USAGE, f"no such tangle file {spec!r}") from exc
    except (json.JSONDecodeError, MalformedTangle, UnknownGenerator, ValueError) as exc:
        raise CliError(EXIT_USAGE, f"malformed tangle {spec!r}: {exc}") from exc


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise CliError(EXIT_USAGE, f"no such file {path!r}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_USAGE, f"malformed JSON in {path!r}: {exc}") from exc


def _dump(obj, path, stream):
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if path in (None, "-"):
        stream.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _write_text(text, path):
    with open(path, "w") as fh:
        fh.write(text)


def _read_rep(path):
    data = _read_json(path)
    rep = data.get("rep", data) if isinstance(data, dict) else None
    if not isinstance(rep, dict) or not rep:
        raise CliError(EXIT_USAGE, f"{path!r} does not contain a representation")
    try:
        return {g: su2.from_json(q) for g, q in rep.items()}
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_USAGE, f"bad quaternion in {path!r}: {exc}") from exc


def _summary(points, stream):
    counts = classify(points)
    stream.write("stabilizer boundary_stabilizer count local_ranks\n")
    for (s, b), k in counts.items():
        ranks = sorted({p.local_rank for p in points
                        if (p.stabilizer, p.boundary_stabilizer) == (s, b) and p.local_rank is not None})
        stream.write(f"{s} {b} {k} {','.join(map(str, ranks)) or '-'}\n")


# -- subcommands ------------------------------------------------------------

def cmd_solve(args, out):
    tangle = resolve_tangle(args.tangle)
    gauge = tuple(args.gauge.split(",")) if args.gauge is not None and args.gauge else (
        () if args.gauge == "" else None)
    try:
        c = tangle.constraints(traceless=args.traceless, gauge=gauge, ansatz=args.ansatz)
    except (UnknownGenerator, ValueError) as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    if c.is_empty():
        raise CliError(EXIT_USAGE, "constraint set is empty")
    points = solve_variety(c, restarts=args.restarts, tol=args.tol, seed=args.seed)
    if args.ansatz is None and not args.generic_only:
        # reducible strata have measure zero; search them on their own circles
        for extra in ("abelian", "central"):
            ce = tangle.constraints(traceless=args.traceless, gauge=gauge, ansatz=extra)
            points += solve_variety(ce, restarts=args.restarts, tol=args.tol, seed=args.seed)
    if not args.raw:
        points = dedup_classes(points)
    for p in points:
        p.local_rank = local_rank(c, p, tol=args.tol)
    _dump(points_to_json(points), args.out, out)
    _summary(points, sys.stderr if args.out in (None, "-") else out)
    return EXIT_OK


def cmd_classify(args, out):
    points = points_from_json(_read_json(args.points))
    if args.tangle:
        tangle = resolve_tangle(args.tangle)
        c = tangle.constraints(traceless=args.traceless)
        for p in points:
            p.stabilizer = stabilizer_class(p.rep, c.generators)
            try:
                p.local_rank = local_rank(c, p, tol=args.tol)
            except ValueError as exc:
                raise CliError(EXIT_DATA, f"point off the variety: {exc}") from exc
    points = dedup_classes(points)
    _summary(points, out)
    return EXIT_OK


def cmd_flow(args, out):
    rho = _read_rep(args.rep)
    n = args.genus
    try:
        curve = curve_by_name(n, args.curve)
    except (UnknownCurve, ValueError) as exc:
        raise CliError(EXIT_USAGE, f"unknown curve {args.curve!r}") from exc
    gens = surface_presentation(n).presentation.generators
    if set(rho) != set(gens):
        raise CliError(EXIT_USAGE, f"representation must assign {list(gens)}")
    if relation_residual(rho, n) > 1e-9:
        raise CliError(EXIT_DATA, "representation is not on the surface variety")
    try:
        flowed = twist_flow(rho, curve, args.t)
    except IncompleteCurveDatum as exc:
        raise CliError(EXIT_DATA, f"curve {curve.name} has no validated completion data") from exc
    if args.check:
        ok_rel = relation_residual(flowed, n) < 1e-8
        c0 = eval_word(curve.curve_word, rho)[0]
        c1 = eval_word(curve.curve_word, flowed)[0]
        if not (ok_rel and abs(c0 - c1) < 1e-9):
            raise CliError(EXIT_NUMERIC, "flow check failed (relation or conservation)")
    _dump({"rep": {g: su2.to_json(flowed[g]) for g in gens}}, args.out, out)
    return EXIT_OK


def boundary_sphere_rep(tangle, rho):
    """The induced representation of the boundary sphere (A_i, B_i)."""
    out = {}
    for i, (a, b) in enumerate(zip(tangle.boundaryA, tangle.boundaryB), 1):
        out[f"A{i}"] = eval_word(a, rho)
        out[f"B{i}"] = eval_word(b, rho)
    return out


def _chart_rows(points, restrict, boundary=None):
    rows = []
    tangle = resolve_tangle(boundary) if boundary else None
    for p in points:
        if tangle is not None:
            rep = boundary_sphere_rep(tangle, p.rep)
        elif restrict:
            rep = restrict_to_sphere(p.rep)
        else:
            rep = p.rep
        rows.append((rep, p))
    return rows


def cmd_reduce(args, out):
    points = points_from_json(_read_json(args.points))
    rows = _chart_rows(points, args.restrict, args.boundary)
    if args.chart == "pillowcase":
        names = {"A1", "B1", "A2", "B2"}
        if any(set(rep) != names for rep, _ in rows):
            raise CliError(EXIT_USAGE, "pillowcase chart needs 4-punctured sphere points (n = 2)")
        chart = []
        for rep, p in rows:
            try:
                g, t = pillowcase_chart(rep)
            except NormalFormFailure as exc:
                raise CliError(EXIT_NUMERIC, str(exc)) from exc
            except ValueError as exc:
                raise CliError(EXIT_DATA, str(exc)) from exc
            stab = stabilizer_class(rep)
            chart.append((g, t, stab))
        chart.sort()
        if args.csv:
            _write_text(chart_csv(chart), args.csv)
        if args.svg:
            line = [(g, t) for g, t, _ in chart] if args.polyline else None
            _write_text(pillowcase_svg(chart, polyline=line), args.svg)
        corners = sum(1 for g, t, _ in chart if is_corner((g, t)))
        out.write(f"points {len(chart)} corners {corners}\n")
    else:
        fps = sorted(((fingerprint(rep, sorted(rep)), stabilizer_class(rep)) for rep, _ in rows),
                     key=lambda r: tuple(np.round(r[0], 9)))
        if args.csv:
            _write_text(fingerprint_csv(fps), args.csv)
        if args.svg:
            raise CliError(EXIT_USAGE, "SVG output needs the pillowcase chart")
        out.write(f"points {len(fps)}\n")
    return EXIT_OK


def cmd_plot(args, out):
    args.chart, args.csv = "pillowcase", None
    return cmd_reduce(args, out)


def cmd_probe(args, out):
    rng = np.random.default_rng(args.seed)
    n = args.genus
    sampler = {"abund1": sample_abund1, "abund2": sample_abund2, "abund3": sample_abund3}[args.kind]
    curves = builtin_curves(n)
    ranks = [submersion_probe(args.kind, sampler(n, rng), curves, n) for _ in range(args.samples)]
    target = 6 * n - 6 if args.kind == "abund1" else n
    out.write(f"{args.kind} n={n} target={target} ranks={','.join(map(str, ranks))}\n")
    return EXIT_OK if all(r == target for r in ranks) else EXIT_NUMERIC


# -- parser -------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="holo", description=__doc__.splitlines()[0])
    p.add_argument("--selftest", action="store_true", help="run every property suite")
    sub = p.add_subparsers(dest="cmd")

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None)
        sp.add_argument("--selftest", action="store_true")
        return sp

    s = common(sub.add_parser("solve", help="solve a tangle's representation equations"))
    s.add_argument("tangle", nargs="?", help="tangle JSON or builtin (trivial:N, braid:N:1,-2, "
                   "sphere:N, surface:N, earring:EPS)")
    s.add_argument("--restarts", type=int, default=100)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--traceless", action="store_true")
    s.add_argument("--ansatz", choices=["abelian", "central"], default=None)
    s.add_argument("--gauge", default=None, help="comma separated generators ('' for none)")
    s.add_argument("--raw", action="store_true", help="keep every converged start")
    s.add_argument("--generic-only", action="store_true",
                   help="skip the abelian and central ansatz passes")
    s.set_defaults(func=cmd_solve)

    s = common(sub.add_parser("classify", help="summarize a points file"))
    s.add_argument("points", nargs="?")
    s.add_argument("--tangle", default=None)
    s.add_argument("--traceless", action="store_true")
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_classify)

    s = common(sub.add_parser("flow", help="apply a twist flow to a surface representation"))
    s.add_argument("--genus", type=int, default=2)
    s.add_argument("--curve", default=None)
    s.add_argument("--t", type=float, default=0.0)
    s.add_argument("--rep", default=None)
    s.add_argument("--check", action="store_true")
    s.set_defaults(func=cmd_flow)

    for name, func in (("reduce", cmd_reduce), ("plot", cmd_plot)):
        s = common(sub.add_parser(name, help="chart points on the pillowcase or by fingerprint"))
        s.add_argument("points", nargs="?")
        s.add_argument("--chart", choices=["pillowcase", "fingerprint"], default="pillowcase")
        s.add_argument("--restrict", action="store_true", help="restrict surface points first")
        s.add_argument("--boundary", default=None,
                       help="tangle whose boundary words map points to the sphere")
        s.add_argument("--csv", default=None)
        s.add_argument("--svg", default=None)
        s.add_argument("--polyline", action="store_true", help="join points in chart order")
        s.set_defaults(func=func)

    s = common(sub.add_parser("probe", help="submersion rank probes"))
    s.add_argument("--kind", choices=["abund1", "abund2", "abund3"], default="abund2")
    s.add_argument("--genus", type=int, default=2)
    s.add_argument("--samples", type=int, default=5)
    s.set_defaults(func=cmd_probe)
    return p


_REQUIRED = {"solve": ["tangle"], "classify": ["points"], "flow": ["curve", "rep"],
             "reduce": ["points"], "plot": ["points", "svg"], "probe": []}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cmd is None:
        if args.selftest:
            from . import selftest
            return EXIT_OK if selftest.run("all", out=lambda s: out.write(s + "\n")) else EXIT_NUMERIC
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.selftest:
        from . import selftest
        ok = selftest.run(args.cmd, seed=args.seed, out=lambda s: out.write(s + "\n"))
        return EXIT_OK if ok else EXIT_NUMERIC
    missing = [m for m in _REQUIRED[args.cmd] if getattr(args, m, None) in (None, "")]
    if missing:
        sys.stderr.write(f"holo {args.cmd}: missing {', '.join(missing)}\n")
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except CliError as exc:
        sys.stderr.write(f"holo {args.cmd}: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
