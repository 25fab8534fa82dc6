"""Command-line surface.

Subcommands: classify | pmf | iterate | absorb | gumbel | qprocess | embed |
simulate | verify. Every subcommand accepts --config <json> with flag > file
> default precedence, writes byte-stable output (fixed field order, floats at
17 significant digits) to --out or stdout, and reports wall time on stderr
only so stdout stays reproducible.

Exit codes: 0 ok, 2 usage, 3 domain/parameter, 4 numeric or truncation,
5 a named check failed, 1 anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import absorption, embedding, qprocess, simulate
from .errors import (
    DomainError,
    InconsistentParamsError,
    NumericError,
    OverflowGuardError,
    RegimeError,
    SingularPathError,
    ThetaGWError,
    TrivialLawError,
    TruncationError,
    UnclassifiableError,
    UnsupportedFormError,
)
from .offspring import pmf as offspring_pmf
from .params import scalar_summary, serialize, validate_classify
from .pgf import eval_f, eval_fn
from .verify import verify_set, verify_suite

_USAGE_EXIT = 2
_DOMAIN_EXIT = 3
_NUMERIC_EXIT = 4
_CHECK_EXIT = 5

_DOMAIN_ERRORS = (
    DomainError,
    InconsistentParamsError,
    UnclassifiableError,
    RegimeError,
    TrivialLawError,
    UnsupportedFormError,
)
_NUMERIC_ERRORS = (
    NumericError,
    TruncationError,
    OverflowGuardError,
    SingularPathError,
)

_PARAM_KEYS = ("theta", "a", "c", "q", "A")


def _fmt(x) -> str:
    """Canonical scalar rendering: 17 significant digits for floats."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    xf = float(x)
    if math.isnan(xf):
        return "nan"
    if math.isinf(xf):
        return "inf" if xf > 0 else "-inf"
    return f"{xf:.17g}"


def _json_value(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        xf = float(x)
        if math.isnan(xf) or math.isinf(xf):
            # JSON has no literals for these; keep them explicit and parseable
            return json.dumps(_fmt(xf))
        return _fmt(xf)
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(v) for v in x) + "]"
    if isinstance(x, dict):
        items = (f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in x.items())
        return "{" + ", ".join(items) + "}"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _json_doc(obj: dict) -> str:
    return _json_value(obj) + "\n"


def _csv_doc(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if not isinstance(v, str) else v for v in row))
    return "\n".join(lines) + "\n"


class _CliParser(argparse.ArgumentParser):
    def error(self, message):  # keep exit code 2 but write to stderr only
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(_USAGE_EXIT)


def _build_parser() -> argparse.ArgumentParser:
    top = _CliParser(prog="thetagw", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, help_text, *, tabular=False):
        sp = sub.add_parser(name, help=help_text)
        for key in _PARAM_KEYS:
            sp.add_argument(f"--{key}", type=float, default=None)
        sp.add_argument("--config", type=str, default=None,
                        help="JSON file with defaults; flags override it")
        sp.add_argument("--format", choices=("json", "csv", "text"), default=None)
        sp.add_argument("--out", type=str, default=None)
        sp.set_defaults(_tabular=tabular)
        return sp

    add("classify", "canonical parameters, case tag and scalar summary")

    sp = add("pmf", "offspring masses p_0..p_k", tabular=True)
    sp.add_argument("--k-max", dest="k_max", type=int, default=None)

    sp = add("iterate", "explicit n-step generating function value")
    sp.add_argument("--n", type=float, default=None)
    sp.add_argument("--s", type=float, default=None)

    sp = add("absorb", "extinction/explosion time tails and expectations",
             tabular=True)
    sp.add_argument("--n", type=float, default=None, help="horizon (rows 0..n)")

    sp = add("gumbel", "near-critical explosion-time limit on the y-lattice",
             tabular=True)
    sp.add_argument("--n", type=float, default=None, help="largest lattice index")
    sp.add_argument("--r", type=float, default=None,
                    help="limit regime parameter when theta is not given")

    sp = add("qprocess", "harmonic function and the three limit laws")
    sp.add_argument("--k-max", dest="k_max", type=int, default=None)

    sp = add("embed", "continuous-time generator, coefficients and residuals")
    sp.add_argument("--k-max", dest="k_max", type=int, default=None)
    sp.add_argument("--t", type=float, default=None, help="extra residual time")

    sp = add("simulate", "Monte Carlo tail estimates vs the closed forms",
             tabular=True)
    sp.add_argument("--replicates", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--n-max", dest="n_max", type=int, default=None)
    sp.add_argument("--z-cap", dest="z_cap", type=int, default=None)
    sp.add_argument("--workers", type=int, default=None)

    sp = add("verify", "cross-module identity suite (one set per case by default)")
    sp.add_argument("--seed", type=int, default=None)
    return top


_DEFAULTS = {
    "format": "json",
    "k_max": 50,
    "n": 50.0,
    "s": 0.0,
    "t": None,
    "r": None,
    "replicates": 100_000,
    "n_max": 200,
    "z_cap": 10_000_000,
    "workers": 1,
}


def _resolve(args: argparse.Namespace) -> dict:
    """flag > config file > environment (seed only) > built-in default."""
    cfg = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise DomainError("config file must hold a JSON object")
    merged = {}
    for key, flag_val in vars(args).items():
        if key in ("config", "command", "_tabular"):
            continue
        if flag_val is not None:
            merged[key] = flag_val
        elif key in cfg:
            merged[key] = cfg[key]
        elif key == "seed" and os.environ.get("THETA_GW_SEED"):
            merged[key] = int(os.environ["THETA_GW_SEED"])
        elif key in _DEFAULTS:
            merged[key] = _DEFAULTS[key]
        elif key == "seed":
            merged[key] = 0
        else:
            merged[key] = None
    # config may also carry parameter keys absent from the flag set
    for key in cfg:
        if key not in merged or merged[key] is None:
            merged[key] = cfg[key]
    return merged


def _params_from(opts: dict):
    raw = {k: opts[k] for k in _PARAM_KEYS if opts.get(k) is not None}
    if not raw:
        raise DomainError(
            "no parameters given: pass --theta/--a/--c/--q/--A or --config"
        )
    return validate_classify(raw)


def _tag_dict(tag) -> dict:
    return {
        "case_id": tag.case_id,
        "regular": tag.regular,
        "criticality": tag.criticality.value,
    }


def _cmd_classify(opts):
    p, tag = _params_from(opts)
    s = scalar_summary(p)
    payload = {
        "params": serialize(p),
        "case": _tag_dict(tag),
        "summary": {
            "f_at_1": s.f_at_1,
            "p_inf": s.p_inf,
            "m": s.mean_m,
            "f2_at_1": s.f2_at_1,
            "gamma": s.gamma,
            "d": p.d if p.big_a == 1.0 and p.q == 1.0 and p.a > 1.0 else None,
        },
    }
    text = [
        f"case: {tag.case_id} ({tag.criticality.value}, "
        f"{'regular' if tag.regular else 'explosive'})",
        f"theta={_fmt(p.theta)} a={_fmt(p.a)} c={_fmt(p.c)} "
        f"q={_fmt(p.q)} A={_fmt(p.big_a)}",
        f"m={_fmt(s.mean_m)} gamma={_fmt(s.gamma)} p_inf={_fmt(s.p_inf)}",
    ]
    return payload, None, "\n".join(text) + "\n", []


def _cmd_pmf(opts):
    p, tag = _params_from(opts)
    k_max = int(opts["k_max"])
    probs = offspring_pmf(p, k_max)
    s = scalar_summary(p)
    covered = float(np.sum(probs))
    payload = {
        "params": serialize(p),
        "case": _tag_dict(tag),
        "p": list(probs),
        "p_inf": s.p_inf,
        "tail_mass": max(s.f_at_1 - covered, 0.0),
    }
    rows = [[k, probs[k]] for k in range(k_max + 1)]
    text = "\n".join(f"p_{k} = {_fmt(v)}" for k, v in rows) + "\n"
    return payload, (["k", "p_k"], rows), text, []


def _cmd_iterate(opts):
    p, tag = _params_from(opts)
    n = float(opts["n"]) if opts["n"] is not None else 1.0
    s = float(opts["s"])
    value = eval_fn(p, n, s)
    payload = {
        "params": serialize(p),
        "case": _tag_dict(tag),
        "n": n,
        "s": s,
        "value": value,
    }
    return payload, None, _fmt(value) + "\n", []


def _cmd_absorb(opts):
    p, tag = _params_from(opts)
    hor = int(opts["n"])
    if hor < 0:
        raise DomainError("--n must be >= 0")
    tails = absorption.absorption_tails(p)
    n = np.arange(0, hor + 1)
    t0 = tails.t0_tail(n)
    t1 = tails.t1_tail(n)
    tt = tails.t_tail(n)
    exp = absorption.expected_absorption(p)
    payload = {
        "params": serialize(p),
        "case": _tag_dict(tag),
        "n": list(n),
        "t0_tail": list(t0),
        "t1_tail": list(t1),
        "t_tail": list(tt),
        "expected": {
            "e_t0_given_finite": exp.e_t0_given_finite,
            "e_t1_given_finite": exp.e_t1_given_finite,
            "e_t": exp.e_t,
            "t0_divergent": exp.t0_divergent,
            "t1_divergent": exp.t1_divergent,
            "t_divergent": exp.t_divergent,
        },
    }
    rows = [[int(k), t0[k], t1[k], tt[k]] for k in range(hor + 1)]
    text = "\n".join(
        f"n={k:4d}  t0={_fmt(r1)}  t1={_fmt(r2)}  t={_fmt(r3)}"
        for k, r1, r2, r3 in rows
    ) + "\n"
    return payload, (["n", "t0_tail", "t1_tail", "t_tail"], rows), text, []


def _cmd_gumbel(opts):
    a = opts.get("a")
    q = opts.get("q")
    if a is None or q is None:
        raise DomainError("gumbel needs --a and --q")
    big_a = opts.get("A") if opts.get("A") is not None else 1.0
    theta = opts.get("theta")
    r = opts.get("r")
    probe = absorption.gumbel_limit(float(a), float(q), 0.0, theta=theta,
                                    big_a=float(big_a), r=r)
    rec = probe.record
    rows = []
    if theta is not None:
        params, _ = validate_classify(
            {"theta": theta, "a": float(a), "A": float(big_a), "q": float(q)}
        )
        shift = rec.shift
        n_hi = int(opts["n"]) if opts["n"] is not None else int(math.ceil(shift + 12.0))
        n_lo = max(0, int(math.ceil(shift - 7.0)))
        if n_hi < n_lo:
            raise DomainError("--n is below the start of the informative lattice")
        for n in range(n_lo, n_hi + 1):
            # the explosion time lives on integers; index rows by n - shift
            y = n - shift
            exact = absorption.conditional_t1_cdf(params, n)
            rows.append([y, float(exact), math.exp(-rec.w * float(a) ** y)])
    else:
        for k in range(-14, 25):
            y = k * 0.5
            rows.append([y, math.nan, math.exp(-rec.w * float(a) ** y)])
    payload = {
        "a": rec.a,
        "q": rec.q,
        "theta": rec.theta,
        "A": rec.big_a,
        "eps": rec.eps,
        "r": rec.r,
        "w": rec.w,
        "mean": rec.mean,
        "shift": rec.shift,
        "rows": [{"y": y, "exact": e, "limit": l} for y, e, l in rows],
    }
    text = "\n".join(
        f"y={_fmt(y)}  exact={_fmt(e)}  limit={_fmt(l)}" for y, e, l in rows
    ) + "\n"
    return payload, (["y", "exact", "limit"], rows), text, []


def _cmd_qprocess(opts):
    p, tag = _params_from(opts)
    order = int(opts["k_max"])
    qf = qprocess.q_function(p)
    gamma = qf.gamma
    b = stationary = w = None
    if not qf.trivial:
        try:
            stationary = list(qprocess.stationary_law(p, order).probs)
        except (TrivialLawError, DomainError):
            stationary = None
        try:
            b = list(qprocess.conditional_limit_b(p, order).probs)
        except (TrivialLawError, DomainError):
            b = None
    try:
        w = list(qprocess.critical_limit_w(p, order).probs)
    except (TrivialLawError, DomainError):
        w = None
    payload = {
        "params": serialize(p),
        "case": _tag_dict(tag),
        "gamma": gamma,
        "b": b,
        "stationary": stationary,
        "w": w,
    }
    text_lines = [f"case {tag.case_id}: gamma={_fmt(gamma) if gamma is not None else 'null'}"]
    for name, val in (("b", b), ("stationary", stationary), ("w", w)):
        text_lines.append(
            f"{name}: " + ("null" if val is None else " ".join(_fmt(v) for v in val[:10]))
        )
    return payload, None, "\n".join(text_lines) + "\n", []


def _cmd_embed(opts):
    p, tag = _params_from(opts)
    order = int(opts["k_max"])
    e = embedding.build_embedding(p)
    st = embedding.h_coeffs(e, order)
    grid = np.linspace(0.0, 1.0, 50)
    one_step = float(np.max(np.abs(embedding.semigroup_F(e, 1.0, grid) - eval_f(p, grid))))
    semi = 0.0
    for t1, t2 in ((0.5, 0.5), (1.0, 1.5), (0.25, 2.0)):
        direct = embedding.semigroup_F(e, t1 + t2, grid)
        nested = embedding.semigroup_F(e, t1, embedding.semigroup_F(e, t2, grid))
        semi = max(semi, float(np.max(np.abs(direct - nested))))
    times = [0.5, 1.0, 2.0]
    if opts.get("t") is not None:
        times.append(float(opts["t"]))
    s_pts = (0.3, 0.6) if p.q == 0.0 else (
        (0.25, 0.5) if p.q >= 1.0 else (p.q / 2.0, (p.q + 1.0) / 2.0)
    )
    residuals = []
    for t in times:
        worst = 0.0
        for s in s_pts:
            try:
                worst = max(worst, abs(embedding.integral_residual(e, t, s)))
            except SingularPathError:
                continue
        residuals.append(worst)
    checks = [
        {"name": "embed_sup_err", "value": one_step, "tol": 1e-10,
         "passed": one_step < 1e-10},
        {"name": "semigroup_sup_err", "value": semi, "tol": 1e-10,
         "passed": semi < 1e-10},
        {"name": "quad_residuals", "value": max(residuals), "tol": 1e-6,
         "passed": max(residuals) < 1e-6},
    ]
    payload = {
        "params": serialize(p),
        "case": _tag_dict(tag),
        "lambda": e.lam,
        "mu": e.mu,
        "h0": float(st.coeffs[0]),
        "h_coeffs": list(st.coeffs),
        "h_at_1": e.h_at_1,
        "checks": {
            "embed_sup_err": one_step,
            "semigroup_sup_err": semi,
            "quad_residuals": residuals,
        },
    }
    text = (
        f"lambda={_fmt(e.lam)} mu={_fmt(e.mu)} h0={_fmt(st.coeffs[0])}\n"
        + "\n".join(
            f"{c['name']}: {_fmt(c['value'])} (tol {_fmt(c['tol'])}) "
            f"{'PASS' if c['passed'] else 'FAIL'}"
            for c in checks
        )
        + "\n"
    )
    return payload, None, text, checks


def _cmd_simulate(opts):
    p, tag = _params_from(opts)
    cfg = simulate.SimConfig(
        params=p,
        replicates=int(opts["replicates"]),
        n_max=int(opts["n_max"]),
        z_cap=int(opts["z_cap"]),
        master_seed=int(opts["seed"]),
    )
    emp = simulate.estimate_tails(cfg, workers=int(opts["workers"]))
    tails = absorption.absorption_tails(p)
    ks = simulate.ks_distance(emp, tails, range(0, cfg.n_max + 1))
    t0 = emp.tail("t0")
    t1 = emp.tail("t1")
    tt = emp.tail("t")
    se = emp.se("t")
    rows = [[n, t0[n], t1[n], tt[n], se[n]] for n in range(cfg.n_max + 1)]
    summary = {
        "ks": {"t0": ks.t0, "t1": ks.t1, "t": ks.t},
        "censored_fraction": emp.censored_fraction,
        "seed": cfg.master_seed,
    }
    payload = {
        "params": serialize(p),
        "case": _tag_dict(tag),
        "replicates": cfg.replicates,
        "rows": [
            {"n": n, "emp_t0_tail": a_, "emp_t1_tail": b_, "emp_t_tail": c_, "se": d_}
            for n, a_, b_, c_, d_ in rows
        ],
        **summary,
    }
    text = (
        f"replicates={cfg.replicates} censored={_fmt(emp.censored_fraction)}\n"
        f"ks: t0={_fmt(ks.t0)} t1={_fmt(ks.t1)} t={_fmt(ks.t)}\n"
    )
    csv_spec = (["n", "emp_t0_tail", "emp_t1_tail", "emp_t_tail", "se"], rows)
    return payload, csv_spec, text, [], _json_doc(summary)


def _cmd_verify(opts):
    has_params = any(opts.get(k) is not None for k in _PARAM_KEYS)
    seed = int(opts["seed"])
    if has_params:
        p, tag = _params_from(opts)
        checks = list(verify_set(p, tag))
    else:
        checks = verify_suite(seed=seed)
    check_dicts = [
        {"name": c.name, "target": c.target, "value": c.value, "tol": c.tol,
         "passed": c.passed}
        for c in checks
    ]
    payload = {"checks": check_dicts, "seed": seed,
               "passed": all(c.passed for c in checks)}
    text = "\n".join(
        f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {c.target}  "
        f"value={_fmt(c.value)}  tol={_fmt(c.tol)}"
        for c in checks
    ) + f"\n{'all checks pass' if payload['passed'] else 'CHECK FAILURES'}\n"
    return payload, None, text, check_dicts


_HANDLERS = {
    "classify": _cmd_classify,
    "pmf": _cmd_pmf,
    "iterate": _cmd_iterate,
    "absorb": _cmd_absorb,
    "gumbel": _cmd_gumbel,
    "qprocess": _cmd_qprocess,
    "embed": _cmd_embed,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
}


def _write(dest: str | None, data: str) -> None:
    if dest is None:
        sys.stdout.write(data)
    else:
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)


def run_command(argv=None) -> int:
    started = time.perf_counter()
    parser = _build_parser()
    args = parser.parse_args(argv)
    opts = _resolve(args)
    fmt = opts["format"]
    if fmt == "csv" and not args._tabular:
        print(f"thetagw: error: {args.command} has no csv form", file=sys.stderr)
        return _USAGE_EXIT

    result = _HANDLERS[args.command](opts)
    payload, csv_spec, text, checks = result[:4]
    trailer = result[4] if len(result) > 4 else None

    if fmt == "json":
        doc = _json_doc({"command": args.command, **payload})
    elif fmt == "csv":
        header, rows = csv_spec
        doc = _csv_doc(header, rows)
        if trailer is not None:
            doc += trailer
    else:
        doc = text
    _write(opts.get("out"), doc)
    print(f"wall_time_s={time.perf_counter() - started:.3f}", file=sys.stderr)
    failed = [c for c in checks if not c["passed"]]
    return _CHECK_EXIT if failed else 0


def main(argv=None) -> int:
    try:
        return run_command(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except _DOMAIN_ERRORS as exc:
        print(f"thetagw: parameter error: {exc}", file=sys.stderr)
        return _DOMAIN_EXIT
    except _NUMERIC_ERRORS as exc:
        print(f"thetagw: numeric error: {exc}", file=sys.stderr)
        return _NUMERIC_EXIT
    except ThetaGWError as exc:
        print(f"thetagw: error: {exc}", file=sys.stderr)
        return _DOMAIN_EXIT
    except Exception as exc:  # pragma: no cover - safety net
        print(f"thetagw: unexpected error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
