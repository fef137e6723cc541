"""Command-line front end: ``verify``, ``scan`` and ``theorem`` subcommands.

Exit codes: 0 all checks pass, 1 a check failed, 2 inconclusive,
64 invalid arguments, 65 a resource guard was hit.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict, dataclass, field, is_dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from . import arith, characters, euler_products, identities, special_functions, theorem_pipeline
from .reports import DEFAULT_PRECISION, FAIL, INCONCLUSIVE, PASS, LemmaReport, pretty, render_pretty, to_csv, to_json

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 64, 65


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Everything a run depends on; the same config gives byte-identical JSON."""

    command: str
    kind: str
    params: Dict[str, Any]
    output: Optional[str] = None
    format: str = "json"
    precision: int = DEFAULT_PRECISION
    sieve_limit: int = arith.DEFAULT_SIEVE_LIMIT
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("output")
    g.add_argument("--output", help="write the report here instead of stdout")
    g.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
    g.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="significant digits in JSON/CSV")
    g.add_argument("--sieve-limit", type=int, default=arith.DEFAULT_SIEVE_LIMIT)
    g.add_argument("--threads", type=int, default=None, help="worker cap (default: all cores)")


def _char_args(p: argparse.ArgumentParser, default: Optional[int] = None, allow_range: bool = False) -> None:
    p.add_argument("--d", type=int, default=default, help="fundamental discriminant")
    p.add_argument("--q", type=int, help="modulus; must determine the real primitive character uniquely")
    if allow_range:
        p.add_argument("--d-range", type=int, nargs=2, metavar=("LO", "HI"),
                       help="every fundamental discriminant in [LO, HI]")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="siegel-gap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    verify = sub.add_parser("verify", help="run a lemma check")
    vsub = verify.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    v2 = vsub.add_parser("2", help="ratios L'/L and zeta'/zeta at a real point")
    _char_args(v2, 5)
    v2.add_argument("--beta", type=float, default=0.9)
    v3 = vsub.add_parser("3", help="sum of 1/r over squarefree r <= R coprime to 6")
    v3.add_argument("--R", type=int, default=10)
    v5 = vsub.add_parser("5", help="sum of 2^-omega(n) up to x")
    v5.add_argument("--x", type=int, default=10)
    v6 = vsub.add_parser("6", help="P_{r,t}(1) closed forms and the weighted double sum")
    _char_args(v6, None, allow_range=True)
    v6.add_argument("--R", type=int, default=100)
    v7 = vsub.add_parser("7", help="local and series form of the Euler product identity")
    _char_args(v7, None, allow_range=True)
    v7.add_argument("--r", type=int, default=1)
    v7.add_argument("--t", type=int, default=1)
    v7.add_argument("--primes", type=int, default=1000, help="check every prime up to this bound")
    v7.add_argument("--N", type=int, default=2000, help="coefficients in the series check (0 to skip)")
    v7.add_argument("--degree", type=int, default=6)
    v8 = vsub.add_parser("8", help="Mellin smoothing integral")
    v8.add_argument("--y", type=float, default=2.0)
    v8.add_argument("--b", type=float, default=2.0)
    v8.add_argument("--V", type=float, default=None)
    v8.add_argument("--step", type=float, default=None)
    v8.add_argument("--tol", type=float, default=1e-8)
    v8.add_argument("--tail", choices=("fourier", "none"), default="fourier")
    for p in (v2, v3, v5, v6, v7, v8):
        _common(p)

    scan = sub.add_parser("scan", help="fit implied constants on grids")
    ssub = scan.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    sz = ssub.add_parser("zeros", help="real zeros of L(s, chi) in an interval")
    _char_args(sz, -4)
    sz.add_argument("--lo", type=float, default=0.6)
    sz.add_argument("--hi", type=float, default=0.99)
    sz.add_argument("--step", type=float, default=1e-3)
    sz.add_argument("--tol", type=float, default=1e-10)
    s1 = ssub.add_parser("lemma1", help="growth of zeta and L on Re s = 3/4")
    s1.add_argument("--tmax", type=float, default=100.0)
    s1.add_argument("--samples", type=int, default=2001)
    s1.add_argument("--sigma", type=float, default=0.75)
    _char_args(s1, None)
    s4 = ssub.add_parser("lemma4", help="size of Q on Re w = 3/4")
    _char_args(s4, 5)
    s4.add_argument("--vmax", type=float, default=50.0)
    s4.add_argument("--samples", type=int, default=1001)
    s4.add_argument("--P-max", type=int, default=30000)
    sp = ssub.add_parser("P-growth", help="size of P_{r,t} on Re w = 3/4")
    _char_args(sp, 5)
    sp.add_argument("--R", type=int, default=100)
    sp.add_argument("--vmax", type=float, default=50.0)
    sp.add_argument("--samples", type=int, default=401)
    for p in (sz, s1, s4, sp):
        _common(p)

    theorem = sub.add_parser("theorem", help="weighted sums, contour decomposition, final chain")
    tsub = theorem.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    tc = tsub.add_parser("contour", help="direct sum vs main term + residue + remainder")
    _char_args(tc, 5)
    tc.add_argument("--beta", type=float, default=0.9)
    tc.add_argument("--r", type=int, default=1)
    tc.add_argument("--t", type=int, default=1)
    tc.add_argument("--y", type=float, default=1000.0)
    tc.add_argument("--V", type=float, default=None, help="fixed truncation (default: adaptive)")
    tc.add_argument("--V-max", type=float, default=8192.0)
    tc.add_argument("--tol", type=float, default=1e-4)
    tc.add_argument("--P-max", type=int, default=5000)
    ta = tsub.add_parser("aggregate", help="sum over r, t against its n = 1 lower bound")
    _char_args(ta, 5, allow_range=True)
    ta.add_argument("--beta", type=float, default=0.9)
    ta.add_argument("--R", type=int, nargs="+", default=[35])
    ta.add_argument("--y", type=float, nargs="+", default=None)
    ta.add_argument("--paper-choice", action="store_true", help="force y = R^32")
    ta.add_argument("--work-limit", type=float, default=theorem_pipeline.DEFAULT_WORK_LIMIT)
    ta.add_argument("--fit-c1", action="store_true", help="also fit c1 from these runs")
    tb = tsub.add_parser("bound", help="evaluate the closing inequality chain")
    tb.add_argument("--q", type=int, required=True)
    tb.add_argument("--c1", type=float, default=3.0)
    for p in (tc, ta, tb):
        _common(p)
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    raw = vars(ns)
    general = {k: raw.pop(k) for k in ("command", "kind", "output", "format", "precision", "sieve_limit", "threads")}
    if general["threads"] is None:
        general["threads"] = os.cpu_count() or 1
    if general["threads"] < 1:
        raise UsageError("--threads must be at least 1")
    if not 1 <= general["precision"] <= 100:
        raise UsageError("--precision must be in [1, 100]")
    if general["sieve_limit"] < 10:
        raise UsageError("--sieve-limit must be at least 10")
    return RunConfig(params=raw, **general)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def _discriminant_for_modulus(q: int) -> int:
    found = [d for d in (q, -q) if characters.is_fundamental_discriminant(d)]
    if len(found) != 1:
        raise UsageError(f"modulus {q} does not determine a unique real primitive character; use --d")
    return found[0]


def _discriminants(p: Dict[str, Any], fallback: Sequence[int] = ()) -> List[int]:
    if p.get("d_range"):
        lo, hi = p["d_range"]
        ds = characters.enumerate_fundamental_discriminants(lo, hi)
        if not ds:
            raise UsageError("no fundamental discriminant in --d-range")
        return ds
    if p.get("d") is not None:
        if not characters.is_fundamental_discriminant(p["d"]):
            raise UsageError(f"{p['d']} is not a fundamental discriminant")
        return [p["d"]]
    if p.get("q") is not None:
        return [_discriminant_for_modulus(p["q"])]
    if fallback:
        return list(fallback)
    raise UsageError("a character is required (--d or --q)")


def _one_character(p: Dict[str, Any]) -> Optional[characters.RealPrimitiveCharacter]:
    if p.get("d") is None and p.get("q") is None:
        return None
    ds = _discriminants(p)
    return characters.character(ds[0])


def _sieve_for(n: int, limit: int) -> arith.FactorSieve:
    if n > limit:
        raise arith.SieveRangeError(f"{n} exceeds sieve limit {limit}")
    return arith.default_sieve(max(n, 10))


def _verify(cfg: RunConfig) -> List[LemmaReport]:
    p = cfg.params
    k = cfg.kind
    if k == "2":
        return [special_functions.lemma2_ratios(_one_character(p), p["beta"])]
    if k == "3":
        if p["R"] < 1:
            raise UsageError("R must be positive")
        return [identities.lemma3_partial_sum(p["R"])]
    if k == "5":
        if p["x"] < 1:
            raise UsageError("x must be positive")
        return [identities.lemma5_partial_sum(p["x"], _sieve_for(p["x"], cfg.sieve_limit))]
    if k == "6":
        if p["R"] < 1:
            raise UsageError("R must be positive")
        ds = _discriminants(p, characters.enumerate_fundamental_discriminants(-24, 24))
        out = [euler_products.lemma6_orthogonality(p["R"], ds)]
        out += [euler_products.lemma6_double_sum(p["R"], characters.character(d)) for d in ds]
        return out
    if k == "7":
        ds = _discriminants(p)
        euler_products.check_rt(p["r"], p["t"])
        if p["primes"] < 2:
            raise UsageError("--primes must be at least 2")
        primes = [int(x) for x in _sieve_for(p["primes"], cfg.sieve_limit).primes(p["primes"])]
        out = [identities.lemma7_sweep(primes, ds, [(p["r"], p["t"])], p["degree"])]
        if p["N"] > 0:
            sieve = _sieve_for(p["N"], cfg.sieve_limit)
            out += [identities.lemma7_series_check(p["N"], p["r"], p["t"], characters.character(d), sieve) for d in ds]
        return out
    if k == "8":
        return [identities.lemma8_quadrature(p["y"], p["b"], p["V"], p["step"], p["tol"], p["tail"])]
    raise UsageError(f"unknown lemma {k}")


def _scan(cfg: RunConfig) -> List[Any]:
    p = cfg.params
    k = cfg.kind
    if k == "zeros":
        chi = _one_character(p)
        return [special_functions.find_real_zeros(chi, (p["lo"], p["hi"]), p["step"], p["tol"])]
    if k == "lemma1":
        if p["tmax"] <= 0 or p["samples"] < 2:
            raise UsageError("need --tmax > 0 and --samples >= 2")
        return [special_functions.lemma1_constant_scan((-p["tmax"], p["tmax"]), p["samples"],
                                                       _one_character(p), p["sigma"])]
    if k == "lemma4":
        return [euler_products.lemma4_scan(_one_character(p), p["vmax"], p["samples"], p["P_max"])]
    if k == "P-growth":
        return [euler_products.P_growth_scan(_one_character(p), p["R"], p["vmax"], p["samples"])]
    raise UsageError(f"unknown scan {k}")


def _theorem(cfg: RunConfig) -> List[Any]:
    p = cfg.params
    k = cfg.kind
    if k == "contour":
        spec = theorem_pipeline.WeightedSumSpec(_one_character(p), p["beta"], p["y"], p["r"], p["t"])
        return [theorem_pipeline.contour_decomposition(spec, V=p["V"], tol=p["tol"], V_max=p["V_max"],
                                                        threads=cfg.threads, P_max=p["P_max"],
                                                        sieve_limit=cfg.sieve_limit)]
    if k == "aggregate":
        if not (7 / 8 <= p["beta"] < 1):
            raise UsageError("beta must lie in [7/8, 1)")
        ds = _discriminants(p)
        runs = []
        for d in ds:
            chi = characters.character(d)
            for R in p["R"]:
                if p["paper_choice"]:
                    ys = [float(R) ** 32]
                    if p["y"] is not None and any(y != ys[0] for y in p["y"]):
                        raise UsageError("--paper-choice fixes y = R^32; drop --y")
                else:
                    ys = p["y"] if p["y"] is not None else [1e4]
                for y in ys:
                    runs.append(theorem_pipeline.aggregated_sum(chi, p["beta"], R, y, int(p["work_limit"]),
                                                                sieve_limit=cfg.sieve_limit))
        if p["fit_c1"]:
            c1 = theorem_pipeline.fit_c1(runs)
            return runs + [{"fitted_c1": c1, "label": theorem_pipeline.EXPLORATORY}]
        return runs
    if k == "bound":
        return [theorem_pipeline.bound_report(p["q"], p["c1"])]
    raise UsageError(f"unknown theorem step {k}")


def verdict_of(item: Any) -> str:
    if isinstance(item, LemmaReport):
        return item.verdict
    if isinstance(item, theorem_pipeline.ContourDecomposition):
        return item.verdict
    if isinstance(item, theorem_pipeline.AggregatedSum):
        return PASS if item.lhs >= item.lower_bound - 1e-12 else FAIL
    return PASS


def exit_code(cfg: RunConfig, items: Sequence[Any]) -> int:
    if cfg.command == "scan":
        return EXIT_OK
    verdicts = [verdict_of(x) for x in items]
    if FAIL in verdicts:
        return EXIT_FAIL
    if INCONCLUSIVE in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _label(item: Any) -> str:
    if isinstance(item, LemmaReport):
        return item.lemma
    return type(item).__name__ if is_dataclass(item) else "summary"


def render(cfg: RunConfig, items: Sequence[Any]) -> str:
    if cfg.format == "json":
        payload = {"config": {"command": cfg.command, "kind": cfg.kind, "params": cfg.params},
                   "verdicts": [verdict_of(x) for x in items], "reports": list(items)}
        return to_json(payload, cfg.precision)
    if cfg.format == "csv":
        aggs = [x for x in items if isinstance(x, theorem_pipeline.AggregatedSum)]
        if aggs and len(aggs) == len([x for x in items if is_dataclass(x)]):
            rows = [theorem_pipeline.aggregate_row(a) for a in aggs]
            return to_csv(rows, theorem_pipeline.AGGREGATE_CSV_COLUMNS, cfg.precision)
        rows = []
        for i, x in enumerate(items):
            flat = _flatten(x.to_dict(cfg.precision) if isinstance(x, LemmaReport) else x)
            rows += [{"report": i, "name": _label(x), "key": k, "value": v} for k, v in flat]
        return to_csv(rows, ["report", "name", "key", "value"], cfg.precision)
    blocks = []
    for x in items:
        if isinstance(x, LemmaReport):
            blocks.append(render_pretty(x))
        else:
            head = f"[{verdict_of(x).upper()}] {_label(x)}"
            blocks.append("\n".join([head] + [f"  {k} = {pretty(v)}" for k, v in _flatten(x)]))
    return "\n\n".join(blocks) + "\n"


def _flatten(obj: Any, prefix: str = ""):
    if is_dataclass(obj) and not isinstance(obj, type):
        obj = {k: getattr(obj, k) for k in obj.__dataclass_fields__ if not k.startswith("_")}
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, (list, tuple)) and obj and isinstance(obj[0], (dict, list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix.rstrip("."), obj


def run(cfg: RunConfig) -> int:
    handler = {"verify": _verify, "scan": _scan, "theorem": _theorem}[cfg.command]
    items = handler(cfg)
    text = render(cfg, items)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return exit_code(cfg, items)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    except (theorem_pipeline.ResourceLimitError, special_functions.CutoffTooSmall) as e:
        print(f"siegel-gap: resource guard: {e} (required: {e.required})", file=sys.stderr)
        return EXIT_RESOURCE
    except arith.SieveRangeError as e:
        print(f"siegel-gap: resource guard: {e}; raise --sieve-limit", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as e:
        print(f"siegel-gap: invalid arguments: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
