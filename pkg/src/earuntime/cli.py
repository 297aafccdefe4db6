"""Command-line front end: ``python -m earuntime <command> ...``.

Every output starts with the fully resolved configuration, so reruns with
the same arguments are byte-identical. CSV output carries it as ``#``
comment lines; JSON output under ``"config"``. Exact values are written as
``p/q`` strings, floats with 17 significant digits.

Exit codes: 0 success, 2 a check failed, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

EXIT_OK = 0
EXIT_CHECK = 2
EXIT_USAGE = 64
SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, Fraction):
        return _fmt(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):
        return v.item()
    return v


def _config(args, command: str) -> dict:
    d = {k: v for k, v in vars(args).items() if k not in ("func", "output")}
    d["command"] = command
    return _jsonable(d)


def _emit_json(out, config: dict, payload: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "config": config}
    doc.update(_jsonable(payload))
    out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _emit_csv(out, config: dict, header: list, rows, meta: dict | None = None) -> None:
    out.write(f"# schema_version: {SCHEMA_VERSION}\n")
    out.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    for k, v in (meta or {}).items():
        out.write(f"# {k}: {_fmt(v)}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])


# ---------------------------------------------------------------------------
# commands


def cmd_constants(args, out) -> int:
    from . import specfun

    cfg = specfun.SeriesFamilyConfig(args.order, args.switchover, args.origin_order)
    table = specfun.constants(cfg)
    config = _config(args, "constants")
    checks = specfun.check_constants(cfg) if args.check else None
    ok = all(c[4] for c in checks) if checks else True
    if args.format == "csv":
        header = ["name", "value", "formula_id", "tolerance"] + (["reference", "ok"] if checks else [])
        rows = []
        for i, e in enumerate(table.entries):
            r = [e.name, e.value, e.formula_id, e.tolerance]
            if checks:
                r += [checks[i][2], checks[i][4]]
            rows.append(r)
        _emit_csv(out, config, header, rows)
    else:
        recs = table.as_records()
        if checks:
            for r, c in zip(recs, checks):
                r["reference"], r["ok"] = c[2], c[4]
        _emit_json(out, config, {"constants": recs, "ok": ok})
    return EXIT_OK if ok else EXIT_CHECK


def cmd_exact(args, out) -> int:
    from . import moments

    config = _config(args, "exact")
    exact = not args.float
    t = args.target
    if t in ("mu-star", "v-star"):
        if args.n is None:
            raise UsageError("--n is required")
        fn = moments.mu_star if t == "mu-star" else moments.V_star
        tab = fn(args.n, m_max=args.m_max, exact=exact)
        rows = [(args.n, m, v) for m, v in enumerate(tab.values)]
        _emit_csv(out, config, ["n", "m", "value"], rows)
        return EXIT_OK
    if t == "onemax":
        if args.n is None:
            raise UsageError("--n is required")
        means, variances = moments.onemax_moments(args.n, exact)
        rows = [(args.n, m, mu, v) for m, (mu, v) in enumerate(zip(means, variances))]
        _emit_csv(out, config, ["n", "m", "mean", "variance"], rows)
        return EXIT_OK
    if t in ("lo-mean", "lo-var"):
        if args.n is None:
            raise UsageError("--n is required")
        p = args.p if args.p is not None else Fraction(1, args.n)
        params = moments.LeadingOnesParams(args.n, p if exact else float(p))
        ms = [args.m] if args.m is not None else range(1, args.n + 1)
        rows = []
        for m in ms:
            mo = moments.leadingones_moments(params, m)
            rows.append((args.n, m, mo.mean if t == "lo-mean" else mo.variance))
        _emit_csv(out, config, ["n", "m", "mean" if t == "lo-mean" else "variance"], rows)
        return EXIT_OK
    # symbolic
    m_hi = args.m if args.m is not None else (args.m_max or 3)
    fn = moments.mu_star if args.kind == "mu" else moments.V_star
    funcs = fn(mode="symbolic_n", m_max=m_hi)
    ms = [args.m] if args.m is not None else range(1, m_hi + 1)
    recs = []
    for m in ms:
        num, den = funcs[m].integer_form()
        recs.append({"m": m, "numerator": str(num), "denominator": str(den),
                     "numerator_coefficients": [str(c) for c in num.coeffs],
                     "denominator_coefficients": [str(c) for c in den.coeffs]})
    if args.format == "csv":
        _emit_csv(out, config, ["m", "numerator", "denominator"],
                  [(r["m"], r["numerator"], r["denominator"]) for r in recs])
    else:
        _emit_json(out, config, {"kind": args.kind, "functions": recs})
    return EXIT_OK


def cmd_residuals(args, out) -> int:
    from . import asymptotics

    target = {"mu-star": "mu_star", "v-star": "V_star"}[args.target]
    rep = asymptotics.residual_report(target, args.K, range(args.n_min, args.n_max + 1),
                                      exact=not args.float, band=args.band)
    meta = {"fitted_constant": rep.fitted_constant, "band": rep.band,
            "max_normalized": max(rep.max_by_n().values()), "verdict": "pass" if rep.verdict else "fail"}
    _emit_csv(out, _config(args, "residuals"), ["n", "m", "residual", "normalized_residual"],
              rep.rows, meta)
    return EXIT_OK if rep.verdict else EXIT_CHECK


def cmd_fit(args, out) -> int:
    from . import asymptotics

    target = {"mu-star": "mu_star", "v-star": "V_star"}[args.target]
    rep = asymptotics.fit_dk(target, args.k_max, args.m_max)
    rows = [{"k": r.k, "valid_from": r.valid_from, "formula": str(r),
             "coefficients": r.coefficients, "corrections": {str(j): c for j, c in r.corrections.items()}}
            for r in rep.rows]
    _emit_json(out, _config(args, "fit"), {"rows": rows})
    return EXIT_OK


def _sim_config(args):
    from .simulator import SimulationConfig

    return SimulationConfig(n=args.n, fitness=args.fitness, p=args.p, start=args.start, m=args.m,
                            rho=args.rho, replicates=args.replicates, seed=args.seed,
                            step_cap=args.step_cap, engine=args.engine)


def cmd_simulate(args, out) -> int:
    from .simulator import run_batch

    summ = run_batch(_sim_config(args), workers=args.workers)
    if args.raw:
        with open(args.raw, "w", newline="") as fh:
            summ.to_csv(fh)
    vals, counts = summ.histogram()
    payload = summ.as_dict()
    payload.pop("schema_version")
    payload["config"] = _config(args, "simulate") | {"resolved": summ.config.resolved()}
    if args.histogram:
        payload["histogram"] = {"steps": vals.tolist(), "counts": counts.tolist()}
    out.write(json.dumps({"schema_version": SCHEMA_VERSION, **_jsonable(payload)},
                         indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_ks(args, out) -> int:
    from . import distributions as D
    from . import moments

    law = D.LimitLaw(args.law, args.law_m)
    n = args.n
    if args.law == "normal" or args.law == "gamma_mixture":
        if args.fitness != "leadingones":
            raise UsageError(f"{args.law} applies to LeadingOnes")
    mean = sd = None
    if args.law == "normal":
        params = moments.LeadingOnesParams(n, args.p if args.p is not None else Fraction(1, n))
        if args.start == "uniform":
            mean, var = moments.leadingones_random_start(params)
        else:
            mo = moments.leadingones_moments(params, args.m)
            mean, var = mo.mean, mo.variance
        sd = math.sqrt(var)
    c = float(args.p * n) if args.p is not None else 1.0
    rho = args.rho if args.start == "binomial" else (0.5 if args.start == "uniform" else None)
    center, scale = D.normalization(law, n, m=args.m, rho=rho, c=c, mean=mean, sd=sd)
    if args.source == "exact":
        if args.fitness == "onemax":
            cdf = (D.onemax_exact_cdf(n, args.m) if args.start == "deficit"
                   else D.onemax_mixed_cdf(n, rho))
        else:
            if args.start != "deficit":
                raise UsageError("exact LeadingOnes laws need a deficit start")
            params = moments.LeadingOnesParams(n, float(args.p) if args.p is not None else 1.0 / n)
            cdf = D.leadingones_exact_cdf(params, args.m)
        size = "exact"
    else:
        from .simulator import empirical_cdf, run_batch

        summ = run_batch(_sim_config(args), workers=args.workers)
        cdf = empirical_cdf(summ)
        size = summ.steps.size
    ks = D.ks_distance(cdf, law, center, scale)
    rep = D.KSReport(law.describe(), n, args.m, {"center": center, "scale": scale}, ks, size)
    doc = json.loads(rep.to_json())
    doc["config"] = _config(args, "ks")
    out.write(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")
    if args.threshold is not None and not ks < args.threshold:
        return EXIT_CHECK
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_sim_args(p, replicates=10000):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--fitness", choices=["onemax", "leadingones"], default="onemax")
    p.add_argument("--start", choices=["deficit", "binomial", "uniform"], default="deficit")
    p.add_argument("--m", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--p", type=float, help="mutation rate (default 1/n)")
    p.add_argument("--replicates", type=int, default=replicates)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-cap", type=int)
    p.add_argument("--engine", choices=["bits", "chain"], default="bits")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="earuntime", description=__doc__.split("\n")[0])
    ap.add_argument("--output", "-o", help="write to a file instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", help="special values and their self-checks")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--check", action="store_true", help="compare with independent evaluations")
    p.add_argument("--order", type=int, default=40, help="series order about 1")
    p.add_argument("--origin-order", type=int, default=100, help="series order about 0")
    p.add_argument("--switchover", type=float, default=0.5)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("exact", help="exact moment tables and rational functions")
    p.add_argument("target", choices=["mu-star", "v-star", "onemax", "lo-mean", "lo-var", "symbolic"])
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--m-max", type=int)
    p.add_argument("--p", type=_fraction, help="LeadingOnes mutation rate as p/q (default 1/n)")
    p.add_argument("--kind", choices=["mu", "v"], default="mu", help="symbolic target")
    p.add_argument("--float", action="store_true", help="binary floats instead of fractions")
    p.add_argument("--format", choices=["json", "csv"], default="json", help="symbolic output format")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("residuals", help="normalized residuals of a truncated expansion")
    p.add_argument("--target", choices=["mu-star", "v-star"], default="mu-star")
    p.add_argument("--K", type=int, default=1)
    p.add_argument("--n-min", type=int, default=10)
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--band", type=float, default=1.5)
    p.add_argument("--float", action="store_true")
    p.set_defaults(func=cmd_residuals)

    p = sub.add_parser("fit", help="fit the small-m coefficient rows d_k(m)")
    p.add_argument("--target", choices=["mu-star", "v-star"], default="mu-star")
    p.add_argument("--k-max", type=int, default=2)
    p.add_argument("--m-max", type=int, default=12)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="Monte Carlo hitting times")
    _add_sim_args(p)
    p.add_argument("--raw", help="CSV sink for per-replicate hitting times")
    p.add_argument("--histogram", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ks", help="KS distance of a normalized law to its limit")
    _add_sim_args(p)
    p.add_argument("--law", choices=["sum_of_exponentials", "gumbel", "gamma_mixture", "normal"],
                   required=True)
    p.add_argument("--law-m", type=int, help="parameter m of the limit law")
    p.add_argument("--source", choices=["exact", "simulate"], default="simulate")
    p.add_argument("--threshold", type=float, help="exit 2 unless ks < threshold")
    p.set_defaults(func=cmd_ks)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except (UsageError, ValueError) as exc:
        print(f"earuntime: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = buf.getvalue()
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
