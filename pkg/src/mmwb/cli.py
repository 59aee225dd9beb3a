"""Command-line entry point.

Subcommands: ``moments``, ``maps census|two-star|genus1``, ``variance``,
``correction``, ``free-energy``, ``mc run|fluct|tail`` and ``verify``.
JSON is the canonical output (CSV is a lossy projection of the main
table); every payload embeds a run manifest with the resolved
configuration, tool version, seed, timestamps and a digest of the result.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .fluctuation import OperatorContext
from .freeenergy import thermo_reference
from .mapcount import census, one_star_genus1, two_star_planar
from .ncpoly import Polynomial, QQi
from .parsing import parse_monomial, parse_polynomial, parse_potential
from .sdsolve import SolverConfig, solve


# ---------------------------------------------------------------------------
# serialization


def _coeff_json(c):
    if isinstance(c, Fraction):
        return str(c) if c.denominator != 1 else str(c.numerator)
    if isinstance(c, QQi):
        return {"re": str(c.re), "im": str(c.im)}
    if isinstance(c, complex):
        return {"re": c.real, "im": c.imag}
    if isinstance(c, (int, float)):
        return c
    return str(c)


def series_json(s):
    return {"labels": list(s.labels), "order": s.order,
            "coefficients": [{"index": list(k), "value": _coeff_json(c)}
                             for k, c in s.items_sorted()]}


def series_rows(name, s):
    return [{"series": name,
             "index": ",".join(str(e) for e in k),
             "value": str(c)} for k, c in s.items_sorted()]


def _digest(obj):
    blob = json.dumps(obj, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def make_manifest(args, command):
    cfg = {k: v for k, v in sorted(vars(args).items())
           if k not in ("func",) and v is not None}
    return {"command": command, "config": cfg, "version": __version__,
            "seed": getattr(args, "seed", 0),
            "created_unix": round(time.time(), 3)}


def emit(args, command, result, rows=None):
    manifest = make_manifest(args, command)
    manifest["digest"] = _digest(result)
    payload = {"manifest": manifest, "result": result}
    if args.output == "json":
        text = json.dumps(payload, indent=2, default=str)
    else:
        rows = rows if rows is not None else [{"value": json.dumps(result, default=str)}]
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# shared argument plumbing


def _add_common(p):
    p.add_argument("--backend", choices=("exact", "float"), default="exact")
    p.add_argument("--output", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="write the payload to a file")
    p.add_argument("--seed", type=int, default=0)


def _potential(args, required=True):
    text = getattr(args, "potential", None)
    if not text:
        if required:
            raise SystemExit("a --potential expression is required")
        return None
    return parse_potential(text, backend=args.backend)


def _queries(text):
    return [parse_monomial(tok) for tok in text.split(",") if tok.strip()]


# ---------------------------------------------------------------------------
# subcommands


def cmd_moments(args):
    pot = _potential(args)
    cfg = SolverConfig(mode=args.mode, order=args.order, max_degree=args.degree)
    state = solve(pot, cfg)
    queries = _queries(args.query) if args.query else [
        t.monomial for t in pot.terms]
    result = {"mode": args.mode, "order": args.order, "moments": {}}
    rows = []
    for q in queries:
        if args.mode == "series":
            s = state.moment_series(q, args.order)
            result["moments"][str(q)] = series_json(s)
            rows.extend(series_rows(str(q), s))
        else:
            v = state.moment(q)
            result["moments"][str(q)] = v
            rows.append({"series": str(q), "index": "", "value": v})
    emit(args, "moments", result, rows)


def cmd_maps_census(args):
    stars = [parse_monomial(tok) for tok in args.stars.split(",") if tok.strip()]
    c = census(stars, cap=args.cap)
    result = {"stars": [str(s) for s in stars],
              "counts": {str(g): n for g, n in sorted(c.counts.items())},
              "connected_total": c.total,
              "disconnected": c.disconnected}
    rows = [{"genus": g, "count": n} for g, n in sorted(c.counts.items())]
    emit(args, "maps census", result, rows)


def cmd_maps_two_star(args):
    pot = _potential(args)
    a, b = _queries(args.pair)
    s = two_star_planar(a, b, pot, args.order)
    emit(args, "maps two-star",
         {"pair": [str(a), str(b)], "series": series_json(s)},
         series_rows(f"M({a},{b})", s))


def cmd_maps_genus1(args):
    pot = _potential(args)
    (q,) = _queries(args.query)
    s = one_star_genus1(q, pot, args.order)
    emit(args, "maps genus1",
         {"query": str(q), "series": series_json(s)},
         series_rows(f"M1({q})", s))


def cmd_variance(args):
    pot = _potential(args)
    monos = _queries(args.pair)
    a = monos[0]
    b = monos[1] if len(monos) > 1 else monos[0]
    ctx = OperatorContext.for_potential(pot, order=args.order)
    s = ctx.sigma2(Polynomial.from_monomial(a), Polynomial.from_monomial(b))
    emit(args, "variance",
         {"pair": [str(a), str(b)], "series": series_json(s)},
         series_rows(f"sigma2({a},{b})", s))


def cmd_correction(args):
    pot = _potential(args)
    (q,) = _queries(args.query)
    ctx = OperatorContext.for_potential(pot, order=args.order)
    rep = ctx.genus1_cross_check(q)
    result = {"query": str(q),
              "correction": series_json(rep.operator_series),
              "one_star_genus1": series_json(rep.map_series),
              "match": rep.passed}
    rows = []
    for k, c in rep.operator_series.items_sorted():
        rows.append({"index": ",".join(map(str, k)), "correction": str(c),
                     "one_star_genus1": str(rep.map_series.coefficient(k)),
                     "match": c == rep.map_series.coefficient(k)})
    emit(args, "correction", result, rows)


def cmd_free_energy(args):
    pot = _potential(args)
    rep = thermo_reference(pot, args.order, cross_check_order=args.check_order)
    result = {"order": rep.order, "f0": series_json(rep.f0),
              "f1": series_json(rep.f1), "cross_check_passed": rep.passed,
              "cross_check": [{k: str(v) for k, v in entry.items()}
                              for entry in rep.cross_check]}
    rows = (series_rows("F0", rep.f0) + series_rows("F1", rep.f1))
    emit(args, "free-energy", result, rows)


def cmd_mc_run(args):
    import numpy as np

    from .mcsim import (MatrixEnsembleConfig, sample_gibbs, trace_polynomial,
                        write_trace_file)

    pot = _potential(args, required=False)
    cfg = MatrixEnsembleConfig(
        N=args.N, m=args.m, potential=pot, sampler=args.sampler, step=args.step,
        burn_in=args.burn_in, samples=args.samples, thinning=args.thinning,
        seed=args.seed, cutoff=args.cutoff, n_chains=args.chains)
    observables = {tok.strip(): parse_polynomial(tok, backend="float")
                   for tok in args.observables.split(",") if tok.strip()}
    names = list(observables)
    values = {name: [] for name in names}
    for mats in sample_gibbs(cfg):
        for name in names:
            v = trace_polynomial(list(mats), observables[name])
            values[name].append(float(np.real(v)) / cfg.N)
    from .mcsim import SampleStats

    stats = {name: SampleStats.from_series(values[name]) for name in names}
    if args.trace_file:
        write_trace_file(args.trace_file,
                         np.column_stack([values[name] for name in names]))
    result = {"N": cfg.N, "sampler": cfg.sampler,
              "observables": {name: stats[name].as_dict() for name in names}}
    rows = [{"observable": name, **stats[name].as_dict()} for name in names]
    emit(args, "mc run", result, rows)


def cmd_mc_fluct(args):
    from .mcsim import MatrixEnsembleConfig, fluctuation_test

    pot = _potential(args, required=False)
    (q,) = _queries(args.query)
    order = args.order
    series_pot = pot
    if pot is None:
        from .ncpoly import Potential

        series_pot = Potential.zero(m=args.m)
    mu = solve(series_pot, SolverConfig(mode="series", order=order,
                                        max_degree=max(q.degree, 2)))
    values = series_pot.values_by_label()
    mu_pred = mu.moment_series(q, order).evaluate(values)
    ctx = OperatorContext(series_pot, mu)
    sigma2_pred = ctx.sigma2(Polynomial.from_monomial(q)).evaluate(values)
    cfg = MatrixEnsembleConfig(
        N=args.N, m=args.m, potential=pot, sampler=args.sampler, step=args.step,
        burn_in=args.burn_in, samples=args.samples, thinning=args.thinning,
        seed=args.seed, cutoff=args.cutoff, n_chains=args.chains)
    rep = fluctuation_test(cfg, Polynomial.from_monomial(q), sigma2_pred,
                           float(mu_pred))
    result = rep.as_dict()
    emit(args, "mc fluct", result, [result])


def cmd_mc_tail(args):
    from .mcsim import MatrixEnsembleConfig, tail_test

    pot = _potential(args, required=False)
    cfg = MatrixEnsembleConfig(
        N=max(args.sizes), m=args.m, potential=pot, sampler=args.sampler,
        step=args.step, burn_in=args.burn_in, samples=args.samples,
        thinning=args.thinning, seed=args.seed, cutoff=args.cutoff)
    rep = tail_test(cfg, args.level, sizes=tuple(args.sizes), samples=args.samples)
    result = rep.as_dict()
    rows = [{"N": n, "frequency": f}
            for n, f in zip(rep.sizes, rep.frequencies)]
    emit(args, "mc tail", result, rows)


def cmd_verify(args):
    from .verifysuite import run_checks

    checks = run_checks(level=args.level, seed=args.seed)
    passed = all(c["passed"] for c in checks)
    result = {"level": args.level, "passed": passed, "checks": checks}
    rows = [{"check": c["name"], "passed": c["passed"], "detail": c["detail"]}
            for c in checks]
    emit(args, "verify", result, rows)
    if not passed:
        raise SystemExit(1)


# ---------------------------------------------------------------------------
# parser


def build_parser():
    ap = argparse.ArgumentParser(
        prog="mmwb",
        description="Multi-matrix model workbench: moments, map counts, "
                    "fluctuation variances, free energy and Monte Carlo checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="solve for limiting moments")
    p.add_argument("--potential", required=True)
    p.add_argument("--mode", choices=("series", "numeric"), default="series")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--degree", type=int, default=6)
    p.add_argument("--query", default=None, help="comma-separated monomials")
    _add_common(p)
    p.set_defaults(func=cmd_moments)

    maps = sub.add_parser("maps", help="map enumeration")
    msub = maps.add_subparsers(dest="maps_command", required=True)
    p = msub.add_parser("census", help="brute-force genus census")
    p.add_argument("--stars", required=True, help="comma-separated monomials")
    p.add_argument("--colors", type=int, default=None, help="color count (informational)")
    p.add_argument("--cap", type=int, default=20)
    _add_common(p)
    p.set_defaults(func=cmd_maps_census)
    p = msub.add_parser("two-star", help="planar two-star generating series")
    p.add_argument("--potential", required=True)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--pair", required=True, help="P,Q monomials")
    _add_common(p)
    p.set_defaults(func=cmd_maps_two_star)
    p = msub.add_parser("genus1", help="one-star genus-one generating series")
    p.add_argument("--potential", required=True)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--query", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_maps_genus1)

    p = sub.add_parser("variance", help="CLT covariance series")
    p.add_argument("--potential", required=True)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--pair", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_variance)

    p = sub.add_parser("correction", help="second-order moment correction")
    p.add_argument("--potential", required=True)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--query", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_correction)

    p = sub.add_parser("free-energy", help="free-energy expansion")
    p.add_argument("--potential", required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--check-order", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_free_energy)

    mc = sub.add_parser("mc", help="Monte Carlo sampling")
    mcsub = mc.add_subparsers(dest="mc_command", required=True)

    def _mc_common(p):
        p.add_argument("--potential", default=None)
        p.add_argument("--N", type=int, default=50)
        p.add_argument("--m", type=int, default=1)
        p.add_argument("--sampler", choices=("exact-gue", "metropolis", "langevin"),
                       default="exact-gue")
        p.add_argument("--step", type=float, default=0.024)
        p.add_argument("--burn-in", type=int, default=1000)
        p.add_argument("--samples", type=int, default=2000)
        p.add_argument("--thinning", type=int, default=1)
        p.add_argument("--cutoff", type=float, default=None)
        p.add_argument("--chains", type=int, default=1)
        _add_common(p)

    p = mcsub.add_parser("run", help="sample and report observable statistics")
    _mc_common(p)
    p.add_argument("--observables", default="x1^2")
    p.add_argument("--trace-file", default=None)
    p.set_defaults(func=cmd_mc_run)
    p = mcsub.add_parser("fluct", help="CLT fluctuation test")
    _mc_common(p)
    p.add_argument("--query", default="x1^2")
    p.add_argument("--order", type=int, default=6)
    p.set_defaults(func=cmd_mc_fluct)
    p = mcsub.add_parser("tail", help="largest-eigenvalue tail check")
    _mc_common(p)
    p.add_argument("--level", type=float, default=3.0)
    p.add_argument("--sizes", type=lambda s: [int(x) for x in s.split(",")],
                   default=[50, 100, 200])
    p.set_defaults(func=cmd_mc_tail)

    p = sub.add_parser("verify", help="run the cross-validation battery")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    _add_common(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
