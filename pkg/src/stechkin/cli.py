"""Command-line front end.

Exit status: 0 when every certified claim holds, 1 when one fails, 2 when a
comparison stays undecided at the precision cap or the input is rejected.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from flint import fmpq

from . import pipeline, prune
from .gauss import DIRECT_CAP, gauss_sum, g_composite
from .numeric import DEFAULT_PREC, MAX_PREC, CertReal, PrecisionExhausted, cert_hypot
from .reference import REPORTED_A, REPORTED_EXTREME_MODULI
from .store import GdCache

DIGITS = 20


@dataclass(frozen=True)
class RunConfig:
    prec: int = DEFAULT_PREC
    prec_max: int = MAX_PREC
    jobs: int = 1
    cache: str | None = None
    fmt: str = "csv"
    mode: str = "reduced"
    cap: int = DIRECT_CAP

    def __post_init__(self):
        if self.prec > self.prec_max:
            raise ValueError("--prec may not exceed --prec-max")
        if self.jobs < 1:
            raise ValueError("--jobs must be at least 1")


def _mid(x: CertReal) -> str:
    return x.format(DIGITS)


def _rad(x: CertReal) -> str:
    return f"{x.rad_float():.3e}"


class _Emitter:
    def __init__(self, fmt: str, header: list[str], out=None):
        self.fmt, self.header = fmt, header
        self.out = out or sys.stdout
        self.rows: list[list] = []
        if fmt == "csv":
            self.writer = csv.writer(self.out, lineterminator="\n")
            self.writer.writerow(header)

    def row(self, values: list) -> None:
        values = ["" if v is None else v for v in values]
        if self.fmt == "csv":
            self.writer.writerow(values)
            self.out.flush()
        else:
            self.rows.append(values)

    def close(self) -> None:
        if self.fmt == "json":
            json.dump([dict(zip(self.header, r)) for r in self.rows], self.out, indent=1)
            self.out.write("\n")


def _cache(cfg: RunConfig) -> GdCache:
    return GdCache(cfg.cache) if cfg.cache else GdCache()


def cmd_gauss(args, cfg: RunConfig) -> int:
    re, im = gauss_sum(args.n, args.a, args.q, cfg.prec, cfg.cap)
    mag = cert_hypot(re, im)
    em = _Emitter(cfg.fmt, ["n", "a", "q", "re_mid", "re_rad", "im_mid", "im_rad", "abs_mid", "abs_rad"])
    em.row([args.n, args.a, args.q, _mid(re), _rad(re), _mid(im), _rad(im), _mid(mag), _rad(mag)])
    em.close()
    return 0


def cmd_gnq(args, cfg: RunConfig) -> int:
    g = g_composite(args.n, args.q, cfg.prec, direct=args.direct, cap=cfg.cap)
    ratio = g.magnitude / pipeline.stechkin_threshold(args.q, args.n, cfg.prec)
    em = _Emitter(cfg.fmt, ["n", "q", "G_mid", "G_rad", "argmax_a", "ratio_mid", "ratio_rad", "method"])
    em.row([args.n, args.q, _mid(g.magnitude), _rad(g.magnitude), g.argmax_a,
            _mid(ratio), _rad(ratio), g.method])
    em.close()
    return 0


AN_HEADER = ["n", "A1_mid", "A2_mid", "A_mid", "A_rad", "extreme_modulus"]


def _an_row(r: pipeline.AnResult) -> list:
    return [r.n, _mid(r.A1), _mid(r.A2), _mid(r.A), _rad(r.A), r.extreme_modulus]


def cmd_an(args, cfg: RunConfig) -> int:
    cache = _cache(cfg)
    r = pipeline.compute_A(args.n, cfg.prec, cfg.prec_max, cache, n_max=args.nmax, jobs=cfg.jobs,
                           cap=cfg.cap)
    cache.flush()
    em = _Emitter(cfg.fmt, AN_HEADER)
    em.row(_an_row(r))
    em.close()
    return 0


def cmd_table1(args, cfg: RunConfig) -> int:
    cache = _cache(cfg)
    em = _Emitter(cfg.fmt, AN_HEADER + ["reported", "match"])
    status = 0
    for n in range(3, 41):
        r = pipeline.compute_A(n, cfg.prec, cfg.prec_max, cache, jobs=cfg.jobs)
        ok = pipeline.matches_reported(r.A, n)
        status |= 0 if ok else 1
        em.row(_an_row(r) + [REPORTED_A[n], "match" if ok else "MISMATCH"])
    cache.flush()
    em.close()
    return status


def cmd_table2(args, cfg: RunConfig) -> int:
    """Literal check (ratio at the listed modulus equals the listed A(n)) and the
    structural check (the listed modulus equals the retained-prime product)."""
    em = _Emitter(cfg.fmt, ["n", "modulus", "ratio_mid", "ratio_rad", "reported",
                            "value_match", "retained_modulus", "rule_match"])
    status = 0
    for n in sorted(REPORTED_EXTREME_MODULI):
        q = REPORTED_EXTREME_MODULI[n]
        ratio = pipeline.witness_ratio(n, q, cfg.prec)
        ok = pipeline.matches_reported(ratio, n)
        retained = pipeline.retained_modulus(n, cfg.prec)
        status |= 0 if ok else 1
        em.row([n, q, _mid(ratio), _rad(ratio), REPORTED_A[n], "match" if ok else "MISMATCH",
                retained, "match" if retained == q else "MISMATCH"])
    em.close()
    return status


def _parse_cs(text: str) -> list[str]:
    return [c.strip() for c in text.split(",") if c.strip()] if text else []


def cmd_e2(args, cfg: RunConfig) -> int:
    cs = _parse_cs(args.c)
    cache = _cache(cfg)
    rows = pipeline.e2_series(args.nmax, cs, cfg.prec, cache, jobs=cfg.jobs)
    cache.flush()
    em = _Emitter(cfg.fmt, ["N", "E2", "E2_rad"] + [f"E2_over_log^{c}" for c in cs])
    status = 0
    previous = None
    for r in rows:
        em.row([r.N, _mid(r.E2), _rad(r.E2)] + [_mid(r.scaled[c]) for c in cs])
        if r.E2.upper() < 0 or (previous is not None and r.E2.upper() < previous.lower()):
            status = 1
        previous = r.E2
    em.close()
    return status


def cmd_fox(args, cfg: RunConfig) -> int:
    report = prune.fox_scan(args.pmax, (args.tlo, args.thi), cfg.mode, cfg.jobs, cfg.prec,
                            args.report, args.checkpoint)
    em = _Emitter(cfg.fmt, ["key", "count"])
    for key, count in report.counts().items():
        em.row([key, count])
    em.row(["unresolved", len(report.unresolved)])
    em.row(["failures", len(report.failures)])
    em.close()
    return 1 if report.failures else 0


def cmd_tail(args, cfg: RunConfig) -> int:
    threshold = Fraction(args.threshold)
    result = pipeline.global_tail_bound(fmpq(threshold.numerator, threshold.denominator),
                                        args.nstart, screen=not args.no_screen, prec=cfg.prec)
    em = _Emitter(cfg.fmt, ["threshold", "n_start", "N0", "blocks", "tail_from",
                            "screened", "exceptions", "verified_from"])
    em.row([args.threshold, result.n_start, result.N0, result.blocks, result.tail_from,
            result.screened, len(result.exceptions), result.verified_from])
    em.close()
    if args.exceptions:
        with open(args.exceptions, "w") as fh:
            fh.write("\n".join(str(n) for n in result.exceptions) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=DEFAULT_PREC, help="starting precision in bits")
    common.add_argument("--prec-max", type=int, default=MAX_PREC, help="precision cap in bits")
    common.add_argument("--cache", default=os.environ.get("STECHKIN_CACHE"),
                        help="G_d(p) cache file (default: $STECHKIN_CACHE)")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--mode", choices=("reduced", "full"), default="reduced")
    common.add_argument("--cap", type=int, default=DIRECT_CAP,
                        help="largest prime power evaluated from its residue histogram")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="stechkin",
                                     description="Certified computation of Stechkin's constant for Gauss sums.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gauss", parents=[common], help="one sum S_n(a, q)")
    p.add_argument("n", type=int)
    p.add_argument("a", type=int)
    p.add_argument("q", type=int)
    p.set_defaults(func=cmd_gauss)

    p = sub.add_parser("gnq", parents=[common], help="G_n(q) with a maximizing a")
    p.add_argument("n", type=int)
    p.add_argument("q", type=int)
    p.add_argument("--direct", action="store_true", help="maximize over every unit a")
    p.set_defaults(func=cmd_gnq)

    p = sub.add_parser("an", parents=[common], help="A(n) and its extreme modulus")
    p.add_argument("n", type=int)
    p.add_argument("--nmax", type=int, default=pipeline.EXACT_N_MAX)
    p.set_defaults(func=cmd_an)

    p = sub.add_parser("table1", parents=[common], help="A(n) for 3 <= n <= 40")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("table2-verify", parents=[common], help="check the listed extreme moduli")
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("e2", parents=[common], help="the series E_2(N)")
    p.add_argument("--nmax", type=int, default=200)
    p.add_argument("--c", default="1.74,1.762,1.78", help="exponents c for E_2/(log N)^c")
    p.set_defaults(func=cmd_e2)

    p = sub.add_parser("fox", parents=[common], help="the pruning scan over primes")
    p.add_argument("--pmax", type=int, default=None)
    p.add_argument("--tlo", type=int, default=prune.FOX_T_RANGE[0])
    p.add_argument("--thi", type=int, default=prune.FOX_T_RANGE[1])
    p.add_argument("--report", help="CSV file for per-pair rows")
    p.add_argument("--checkpoint", help="checkpoint file for resuming")
    p.set_defaults(func=cmd_fox)

    p = sub.add_parser("tail", parents=[common], help="A(n) < threshold for large n")
    p.add_argument("--threshold", default="4.7")
    p.add_argument("--nstart", type=int, default=pipeline.EXACT_N_MAX)
    p.add_argument("--no-screen", action="store_true", help="skip the coffee screening")
    p.add_argument("--exceptions", help="file for the list of exceptional n")
    p.set_defaults(func=cmd_tail)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig(args.prec, args.prec_max, args.jobs, args.cache, args.format, args.mode,
                        args.cap)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return args.func(args, cfg)
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # invalid input, such as a modulus over the evaluation cap
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
