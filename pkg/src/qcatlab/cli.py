"""Command line driver: classify | spectrum | sweep | distribution | selftest.

Artifacts land in --out (or $QCATLAB_OUT, or the working directory); the
same config and seed always produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .arith import primes_in
from .groups import CatMap, HeisenbergElement, build_hecke_torus, classify_prime
from .hecke import eigenfunction, eigenfunction_csv_rows, hecke_spectrum
from .harness import (
    SweepConfig,
    gating_failures,
    universal_sweep,
    value_distribution,
    write_records_csv,
    write_records_json,
)
from .models import Realization, heisenberg_op, weil_op, write_operator


def _parse_primes(text: str) -> tuple[int, int] | list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    values = [int(t) for t in text.split(",")]
    return min(values), max(values)


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("QCATLAB_OUT") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _matrix(args) -> CatMap:
    return CatMap.parse(args.matrix)


def _add_common(sub, primes_default=None):
    sub.add_argument("--matrix", required=True, help="cat map entries 'a,b;c,d'")
    if primes_default is not None:
        sub.add_argument("--primes", default=primes_default,
                         help="inclusive range 'lo..hi' or comma list")
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--jobs", type=int, default=1)


def cmd_classify(args) -> int:
    A = _matrix(args)
    lo, hi = _parse_primes(args.primes)
    for p in primes_in(lo, hi):
        print(f"{p}\t{classify_prime(A, p)}")
    return 0


def cmd_sweep(args) -> int:
    A = _matrix(args)
    lo, hi = _parse_primes(args.primes)
    cfg = SweepConfig(
        matrix=A, prime_lo=lo, prime_hi=hi, realizations=args.realizations,
        characters=args.characters, seed=args.seed, jobs=args.jobs,
        verify_samples=args.verify_samples,
    )
    result = universal_sweep(cfg)
    out = _out_dir(args)
    if args.format == "json":
        path = out / "sweep.jsonl"
        write_records_json(path, result.records)
    else:
        path = out / "sweep.csv"
        write_records_csv(path, result.records)
    for p, reason in result.skips:
        print(f"skip p={p}: {reason}")
    by_prime: dict[int, list] = {}
    for rec in result.records:
        by_prime.setdefault(rec.p, []).append(rec)
    for p in sorted(by_prime):
        recs = by_prime[p]
        sup = max(r.sup for r in recs)
        print(f"p={p} kind={recs[0].kind} records={len(recs)} "
              f"max_sup={sup:.6f} p^(3/8)={recs[0].power_bound:.6f}")
    failures = gating_failures(result.records)
    print(f"wrote {path} ({len(result.records)} records, "
          f"{len(failures)} gating failures)")
    return 1 if failures else 0


def cmd_spectrum(args) -> int:
    A = _matrix(args)
    p = args.prime
    kind = classify_prime(A, p)
    if kind == "ramified":
        print(f"p={p} is ramified; no spectrum", file=sys.stderr)
        return 1
    torus = build_hecke_torus(A, p)
    if args.realization:
        s1, s2 = (int(t) for t in args.realization.split(","))
        r = Realization.of(s1, s2, p)
    else:
        r = Realization.standard(p)
    spectrum = hecke_spectrum(torus, r)
    out = _out_dir(args)
    path = out / f"spectrum_p{p}.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("p,kind,character_index,multiplicity,x,re,im\n")
        for space in spectrum.spaces:
            if space.multiplicity == 0:
                continue
            fn = eigenfunction(spectrum, space.index)
            for row in eigenfunction_csv_rows(kind, fn):
                fh.write(",".join(
                    f"{v:.12g}" if isinstance(v, float) else str(v) for v in row
                ) + "\n")
    for space in spectrum.spaces:
        flag = " (flagged)" if space.flagged else ""
        print(f"character {space.index}: multiplicity {space.multiplicity}{flag}")
    if args.dump_operators:
        with open(out / f"operators_p{p}.txt", "w", encoding="utf-8") as fh:
            fh.write(f"# rho(generator), realization {r.tag()}\n")
            write_operator(fh, weil_op(r, torus.generator).matrix)
            for v1, v2 in ((1, 0), (0, 1)):
                fh.write(f"# pi(({v1},{v2}),0)\n")
                write_operator(fh, heisenberg_op(r, HeisenbergElement.of(v1, v2, 0, p)).matrix)
    print(f"wrote {path} (torus order {torus.order}, kind {kind})")
    return 0


def cmd_distribution(args) -> int:
    A = _matrix(args)
    lo, hi = _parse_primes(args.primes)
    cfg = SweepConfig(matrix=A, prime_lo=lo, prime_hi=hi, seed=args.seed,
                      jobs=args.jobs, bins=args.bins)
    report = value_distribution(cfg)
    out = _out_dir(args)
    with open(out / "distribution.json", "w", encoding="utf-8") as fh:
        json.dump(report.json_obj(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out / "histogram.csv", "w", encoding="utf-8") as fh:
        fh.write("bin_left,bin_right,count\n")
        for i, c in enumerate(report.bin_counts):
            fh.write(f"{report.bin_edges[i]:.12g},{report.bin_edges[i+1]:.12g},{c}\n")
    print(f"primes: {report.primes}")
    print(f"samples: {report.sample_count}")
    print(f"KS distance to SU(2) |trace| law: {report.ks_distance:.4f}")
    print(f"second moment: {report.second_moment:.4f} "
          f"(reference {report.reference_second_moment:.4f})")
    return 0


def cmd_selftest(args) -> int:
    from . import selftest

    ok = selftest.run(prime=args.prime, seed=args.seed)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcatlab",
        description="eigenfunctions of quantized cat maps over prime fields",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", help="splitting type per prime")
    _add_common(s, primes_default="5..61")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("sweep", help="supremum bound sweep")
    _add_common(s, primes_default="5..61")
    s.add_argument("--realizations", choices=["defining", "all"], default="defining")
    s.add_argument("--characters", choices=["all", "simple"], default="all")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--verify-samples", type=int, default=0)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("spectrum", help="character decomposition at one prime")
    s.add_argument("--matrix", required=True)
    s.add_argument("--prime", type=int, required=True)
    s.add_argument("--realization", default=None, help="sigma as 's1,s2'")
    s.add_argument("--dump-operators", action="store_true")
    s.add_argument("--out", default=None)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("distribution", help="value statistics at inert primes")
    _add_common(s, primes_default="101..199")
    s.add_argument("--bins", type=int, default=40)
    s.set_defaults(func=cmd_distribution)

    s = sub.add_parser("selftest", help="quick end-to-end checks")
    s.add_argument("--prime", type=int, default=7)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
