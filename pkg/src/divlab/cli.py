"""Command-line frontend: every solver as a subcommand, emitting
figure-ready CSV/JSON, plus a `report` command that renders the standard
study (data files and matplotlib figures side by side).

Exit codes: 0 ok, 2 domain error, 3 resource cap, 4 violated invariant.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import List, Optional

from .bounded import BoundedReal, ln_fraction
from .complement import complement_point, verdict
from .config import RunConfig, load_config
from .density import approximate, rupture_report, to_fraction
from .divisor import Exponent, f_s, sigma_s
from .errors import DomainError, InvariantViolation, ResourceLimitError
from .primes import Factorization, factorize, parse_factored
from .trains import train
from .wolke import WolkeConfig, build
from . import stats

SCHEMA = "divisor-lab/1"


# -- value rendering ------------------------------------------------------


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def sci_from_log10(lg10: float) -> str:
    e = math.floor(lg10)
    mant = 10.0 ** (lg10 - e)
    if mant >= 9.9999995:
        mant /= 10.0
        e += 1
    return f"{mant:.6f}e{e:+d}"


def dec_str(x) -> str:
    """Deterministic decimal rendering for Fractions and BoundedReals."""
    if isinstance(x, BoundedReal):
        return f"{x.midpoint_float():.17g}"
    x = Fraction(x)
    if x == 0:
        return "0"
    f = float(x)
    if f != 0 and math.isfinite(f):
        return f"{f:.17g}"
    # magnitude outside double range: render from the exact log
    lg10 = float(ln_fraction(abs(x)).value) / math.log(10)
    body = sci_from_log10(lg10)
    return body if x > 0 else "-" + body


def value_cells(x) -> List[str]:
    """(decimal, fraction) cell pair; fraction blank on the bounded path."""
    if isinstance(x, BoundedReal):
        return [dec_str(x), ""]
    return [dec_str(x), frac_str(Fraction(x))]


def parse_n(text: str) -> Factorization:
    text = text.strip()
    if text.isdigit():
        return factorize(int(text))
    return parse_factored(text)


# -- emission -------------------------------------------------------------


def _emit(cfg: RunConfig, payload: str) -> None:
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def csv_payload(header: List[str], rows: List[List[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def json_payload(obj: dict) -> str:
    return json.dumps({"schema": SCHEMA, **obj}, indent=2, sort_keys=False) + "\n"


# -- subcommands ----------------------------------------------------------


def cmd_eval(args, cfg: RunConfig) -> None:
    n = parse_n(args.n)
    s = Exponent.of(args.s)
    value = f_s(n, s, cfg.precision_bits)
    sigma: Optional[int] = None
    n_pow: Optional[int] = None
    if s.is_integer:
        sigma = sigma_s(n, s.numeric)
        n_pow = n.value() ** s.numeric
    if cfg.output_format == "json":
        obj = {
            "command": "eval",
            "n": str(n),
            "s": str(s),
            "f": {"decimal": dec_str(value)},
        }
        if not isinstance(value, BoundedReal):
            obj["f"]["fraction"] = frac_str(value)
        else:
            obj["f"]["abs_error"] = f"{float(value.abs_error):.3g}"
        if sigma is not None:
            obj["sigma"] = str(sigma)
        _emit(cfg, json_payload(obj))
    elif cfg.output_format == "csv":
        cells = value_cells(value)
        _emit(cfg, csv_payload(
            ["n", "s", "f_decimal", "f_fraction", "sigma"],
            [[str(n), str(s), cells[0], cells[1], "" if sigma is None else str(sigma)]],
        ))
    else:
        if sigma is not None:
            line = f"{dec_str(value)} (= {sigma}/{n_pow})"
        else:
            line = f"{dec_str(value)} (+/- {float(value.abs_error):.3g})"
        _emit(cfg, line + "\n")


def cmd_train(args, cfg: RunConfig) -> None:
    t = train(parse_n(args.n), Exponent.of(args.s), args.cars, args.length,
              cfg.precision_bits)
    rows = []
    for idx, c in enumerate(t.cars):
        for p, value in c.entries:
            rows.append([str(idx), str(p)] + value_cells(value))
    _emit(cfg, csv_payload(
        ["car_index", "p", "value_decimal", "value_fraction"], rows))


def cmd_scan(args, cfg: RunConfig) -> None:
    N = args.N
    s = Exponent.of(args.s)
    rows = []
    if s.is_integer:
        sig = stats.sigma_values(N, s.numeric, scan_cap=cfg.scan_cap)
        for n in range(1, N + 1):
            val = Fraction(int(sig[n - 1]), n**s.numeric)
            rows.append([str(n), dec_str(val), frac_str(val)])
    else:
        vals = stats.f_values(N, s, scan_cap=cfg.scan_cap)
        for n in range(1, N + 1):
            rows.append([str(n), f"{vals[n - 1]:.17g}", ""])
    _emit(cfg, csv_payload(["n", "value_decimal", "value_fraction"], rows))


def cmd_approx(args, cfg: RunConfig) -> None:
    s = Exponent.of(args.s)
    sol = approximate(args.a, s, args.eps, cfg.caps, cfg.precision_bits)
    obj = {
        "command": "approx",
        "target": frac_str(sol.target),
        "s": str(s),
        "eps": frac_str(sol.eps),
        "n": str(sol.n),
        "value": {"decimal": dec_str(sol.value)},
        "achieved_error": {"decimal": dec_str(sol.achieved_error)},
        "primes": list(sol.selection.primes),
        "exponents": {str(p): k for p, k in sorted(sol.exponents.items())},
        "exact_hit": sol.selection.exact_hit,
    }
    if not isinstance(sol.value, BoundedReal):
        obj["value"]["fraction"] = frac_str(sol.value)
        obj["achieved_error"]["fraction"] = frac_str(Fraction(sol.achieved_error))
    _emit(cfg, json_payload(obj))


def cmd_rupture(args, cfg: RunConfig) -> None:
    rep = rupture_report(args.a, Exponent.of(args.s), cfg.caps, cfg.precision_bits)
    obj = {
        "command": "rupture",
        "target": frac_str(rep.target),
        "s": str(rep.s),
        "kind": rep.kind,
        "zeta_bound": dec_str(rep.zeta_bound),
    }
    if rep.kind == "feasible":
        obj["best_q"] = dec_str(rep.best_q)
        obj["primes"] = list(rep.primes)
        if rep.greedy_ceiling is not None:
            obj["greedy_ceiling"] = dec_str(rep.greedy_ceiling)
            obj["greedy_prefix_capped"] = bool(rep.greedy_prefix_capped)
    _emit(cfg, json_payload(obj))


_LN10 = math.log(10.0)


def wolke_rows(seq) -> List[List[str]]:
    expo = seq.config.bound_exponent
    rows = []
    for st in seq.steps:
        log10_n = float(st.log_n.value) / _LN10
        lg_bound = -float(expo) * log10_n
        rows.append([
            str(st.k), str(st.p), f"{log10_n:.12g}",
            dec_str(st.f_value), dec_str(st.gap), sci_from_log10(lg_bound),
            "pass" if st.verdict else "fail",
        ])
    return rows


def cmd_wolke(args, cfg: RunConfig) -> None:
    wc = WolkeConfig.of(
        args.a, args.s, args.eps, y=args.y, max_steps=args.steps,
        prime_cap=cfg.prime_cap,
    )
    seq = build(wc, cfg.precision_bits)
    _emit(cfg, csv_payload(
        ["k", "p", "log10_n", "f_value_decimal", "gap_decimal",
         "bound_decimal", "verdict"],
        wolke_rows(seq),
    ))
    print(f"stop_reason: {seq.stop_reason}", file=sys.stderr)


def cmd_complement(args, cfg: RunConfig) -> None:
    ev = complement_point(args.lo, args.hi, int(args.s), cfg.caps)
    obj = {
        "command": "complement",
        "interval": [str(to_fraction(args.lo)), str(to_fraction(args.hi))],
        "s": str(ev.s),
        "value": {"decimal": dec_str(ev.value), "fraction": frac_str(ev.value)},
        "kind": ev.kind,
        "n": ev.n,
    }
    if ev.shift_base is not None:
        obj["N"] = str(ev.shift_base)
        obj["f_of_N"] = frac_str(Fraction(f_s(ev.shift_base, ev.s)))
    _emit(cfg, json_payload(obj))


def cmd_member(args, cfg: RunConfig) -> None:
    v = verdict(args.q, int(args.s), args.bound,
                threads=cfg.effective_threads(), scan_cap=cfg.scan_cap)
    obj = {
        "command": "member",
        "query": frac_str(v.query),
        "s": str(args.s),
        "outcome": v.outcome,
    }
    if v.witness is not None:
        obj["witness"] = v.witness
    if v.bound is not None:
        obj["bound"] = v.bound
    if v.certificate is not None:
        obj["certificate"] = {
            "kind": v.certificate.kind,
            "n": v.certificate.n,
            "s": v.certificate.s,
        }
    _emit(cfg, json_payload(obj))


def _parse_s_list(text: str) -> List[Exponent]:
    out = [Exponent.of(part.strip()) for part in text.split(",") if part.strip()]
    return out


def stats_rows(N: int, s_list, cfg: RunConfig) -> List[List[str]]:
    rows = []
    for s in s_list:
        rep = stats.moment_scan(N, s, scan_cap=cfg.scan_cap, bits=cfg.precision_bits)
        rows.append([
            str(rep.s), str(N), dec_str(rep.mean), dec_str(rep.second_moment),
            dec_str(rep.variance), dec_str(rep.zeta_ref), dec_str(rep.deviation),
        ])
    return rows


def cmd_stats(args, cfg: RunConfig) -> None:
    s_list = _parse_s_list(args.s)
    _emit(cfg, csv_payload(
        ["s", "N", "mean", "second_moment", "variance", "zeta_s_plus_1",
         "deviation"],
        stats_rows(args.N, s_list, cfg),
    ))


def cmd_report(args, cfg: RunConfig) -> None:
    from . import figures

    figures.write_report(
        out_dir=args.out,
        scan_n=args.scan_n,
        stats_n=args.stats_n,
        cfg=cfg,
    )


# -- wiring ---------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--precision-bits", type=int, dest="precision_bits")
    p.add_argument("--prime-cap", type=int, dest="prime_cap")
    p.add_argument("--scan-cap", type=int, dest="scan_cap")
    p.add_argument("--exponent-cap", type=int, dest="exponent_cap")
    p.add_argument("--format", dest="output_format", choices=["csv", "json", "text"])
    p.add_argument("--output", dest="output_path")
    p.add_argument("--seed", type=int, dest="seed")
    p.add_argument("--threads", type=int, dest="threads")


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(
        prog="divlab",
        description="Generalized divisor function laboratory: exact "
        "evaluation, trains, density solvers, Wolke sequences, complement "
        "certificates and moment scans.",
    )
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate f_s and sigma_s")
    p.add_argument("n", help="integer or factored form like 2^3*5")
    p.add_argument("--s", default="1")
    p.set_defaults(fn=cmd_eval, default_format="text")

    p = sub.add_parser("train", help="car/train data rows")
    p.add_argument("n")
    p.add_argument("--s", default="1")
    p.add_argument("--cars", type=int, default=3)
    p.add_argument("--length", type=int, default=25)
    p.set_defaults(fn=cmd_train, default_format="csv")

    p = sub.add_parser("scan", help="f_s(n) for n <= N")
    p.add_argument("N", type=int)
    p.add_argument("--s", default="1")
    p.set_defaults(fn=cmd_scan, default_format="csv")

    p = sub.add_parser("approx", help="witness with |f_s(n) - a| < eps")
    p.add_argument("a")
    p.add_argument("--s", default="1")
    p.add_argument("--eps", default="0.001")
    p.set_defaults(fn=cmd_approx, default_format="json")

    p = sub.add_parser("rupture", help="diagnostics for s > 1 targets")
    p.add_argument("a")
    p.add_argument("--s", default="2")
    p.set_defaults(fn=cmd_rupture, default_format="json")

    p = sub.add_parser("wolke", help="density-strength sequence steps")
    p.add_argument("a")
    p.add_argument("--s", default="1")
    p.add_argument("--eps", default="0.1")
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--y", default="2")
    p.set_defaults(fn=cmd_wolke, default_format="csv")

    p = sub.add_parser("complement", help="certified excluded value in (lo, hi)")
    p.add_argument("lo")
    p.add_argument("hi")
    p.add_argument("--s", default="1")
    p.set_defaults(fn=cmd_complement, default_format="json")

    p = sub.add_parser("member", help="bounded range-membership verdict")
    p.add_argument("q")
    p.add_argument("--s", default="1")
    p.add_argument("--bound", type=int, default=10**5)
    p.set_defaults(fn=cmd_member, default_format="json")

    p = sub.add_parser("stats", help="moment scan vs zeta(s+1)")
    p.add_argument("N", type=int)
    p.add_argument("--s", default="1,2,3")
    p.set_defaults(fn=cmd_stats, default_format="csv")

    p = sub.add_parser("report", help="write CSV data and figures for the standard study")
    p.add_argument("--out", required=True)
    p.add_argument("--scan-n", type=int, default=20000, dest="scan_n")
    p.add_argument("--stats-n", type=int, default=100000, dest="stats_n")
    p.set_defaults(fn=cmd_report, default_format="csv")

    for sp in sub.choices.values():
        _add_common(sp)
    return root


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        key: getattr(args, key, None)
        for key in (
            "precision_bits", "prime_cap", "scan_cap", "exponent_cap",
            "output_format", "output_path", "seed", "threads",
        )
    }
    if overrides.get("output_format") is None:
        overrides["output_format"] = args.default_format
    try:
        cfg = load_config(path=args.config, overrides=overrides)
        args.fn(args, cfg)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
