"""Command-line front end; every subcommand speaks JSON lines on stdout."""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path

from . import bench as bench_mod
from .analysis import analyze
from .baseline import (
    emit_sql,
    materialize_and_sort,
    sort_before_join_access,
    topk_heap_access,
)
from .engine import preprocess_lex, preprocess_sum
from .errors import CqError, OutOfRange
from .instrument import AccessStats
from .model import (
    LEX,
    load_instance,
    parse_order,
    parse_query,
    validate_instance,
)
from .selection import select_lex, select_sum


def _error_code(exc: Exception) -> str:
    return re.sub(r"(?<!^)(?=[A-Z])", "_", type(exc).__name__).lower()


def _emit(obj) -> None:
    print(json.dumps(obj))


def _load(args, need_data=True):
    q = parse_query(Path(args.query).read_text(encoding="utf-8"))
    o = parse_order(args.order, q)
    if not need_data:
        return q, o, None
    db = load_instance(args.data, q)
    validate_instance(q, db, o)
    return q, o, db


def _parse_ks(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p != ""]


def cmd_analyze(args) -> int:
    q, o, _ = _load(args, need_data=False)
    _emit(analyze(q, o).to_json_dict())
    return 0


def cmd_access(args) -> int:
    q, o, db = _load(args)
    report = analyze(q, o)
    t0 = time.perf_counter()
    if o.kind == LEX:
        index = preprocess_lex(q, db, report, count_comparisons=args.stats)
    else:
        index = preprocess_sum(q, db, report, count_comparisons=args.stats)
    pre_ms = (time.perf_counter() - t0) * 1000.0
    probes = 0
    for k in _parse_ks(args.k):
        stats = AccessStats()
        try:
            ans = index.access(k, stats)
            _emit({"k": k, "answer": ans.as_dict()})
        except OutOfRange:
            _emit({"k": k, "error": "out_of_range"})
        probes += stats.probes
    if args.stats:
        _emit({
            "probes": probes,
            "comparisons": index.build_stats.comparisons,
            "preprocess_ms": round(pre_ms, 3),
        })
    return 0


def cmd_count(args) -> int:
    q, o, db = _load(args)
    report = analyze(q, o)
    if o.kind == LEX:
        index = preprocess_lex(q, db, report)
    else:
        index = preprocess_sum(q, db, report)
    _emit({"count": index.count})
    return 0


def cmd_select(args) -> int:
    q, o, db = _load(args)
    report = analyze(q, o)
    fn = select_lex if o.kind == LEX else select_sum
    for k in _parse_ks(args.k):
        try:
            ans = fn(q, db, o, k, seed=args.seed, report=report)
            _emit({"k": k, "answer": ans.as_dict()})
        except OutOfRange:
            _emit({"k": k, "error": "out_of_range"})
    return 0


def cmd_baseline(args) -> int:
    q, o, db = _load(args)
    ordered = None
    for k in _parse_ks(args.k):
        try:
            if args.strategy == "full-sort":
                if ordered is None:
                    ordered = materialize_and_sort(q, db, o, cap=args.cap)
                if not 0 <= k < len(ordered):
                    raise OutOfRange(k, len(ordered))
                ans, log = ordered[k], {"requested": "FullSort", "ran": "FullSort"}
            elif args.strategy == "topk-heap":
                ans, slog = topk_heap_access(q, db, o, k, cap=args.cap)
                log = slog.as_dict()
            else:  # sort-before-join
                ans, slog = sort_before_join_access(q, db, o, k)
                log = slog.as_dict()
            _emit({"k": k, "answer": ans.as_dict(), "strategy_log": log})
        except OutOfRange:
            _emit({"k": k, "error": "out_of_range"})
    return 0


def cmd_emit_sql(args) -> int:
    q, o, _ = _load(args, need_data=False)
    sql = emit_sql(q, o, _parse_ks(args.k), args.dialect)
    if args.out:
        Path(args.out).write_text(sql, encoding="utf-8")
    else:
        sys.stdout.write(sql)
    return 0


def cmd_gen(args) -> int:
    cfg = bench_mod.GenConfig(n=args.n, join_size=args.join_size, seed=args.seed)
    inst = bench_mod.generate_instance(cfg)
    written = bench_mod.write_instance_csvs(inst, args.out)
    _emit({"out": str(args.out), "n": args.n, "domain": cfg.domain, "files": written})
    return 0


def cmd_bench(args) -> int:
    report = bench_mod.run_benchmark(args.config)
    out = Path(args.out)
    report.write_csv(out)
    report.write_json(out.with_suffix(".json"))
    _emit({"rows": len(report.rows), "csv": str(out), "json": str(out.with_suffix('.json'))})
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cqrank", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, data=True, order=True, k=False):
        sp.add_argument("--query", required=True, help="query file (.cq)")
        if order:
            sp.add_argument("--order", required=True, help="'lex: V1,...' or 'sum: V1,...'")
        if data:
            sp.add_argument("--data", required=True, help="directory with <relation>.csv files")
        if k:
            sp.add_argument("--k", required=True, help="comma-separated zero-based positions")

    sp = sub.add_parser("analyze", help="emit the tractability report as JSON")
    common(sp, data=False)
    sp.set_defaults(fn=cmd_analyze)

    sp = sub.add_parser("access", help="ranked direct access at positions k")
    common(sp, k=True)
    sp.add_argument("--stats", action="store_true", help="report probes/comparisons/preprocess_ms")
    sp.set_defaults(fn=cmd_access)

    sp = sub.add_parser("count", help="total number of answers")
    common(sp)
    sp.set_defaults(fn=cmd_count)

    sp = sub.add_parser("select", help="single access (selection) at positions k")
    common(sp, k=True)
    sp.add_argument("--seed", type=int, default=None, help="pivot RNG seed")
    sp.set_defaults(fn=cmd_select)

    sp = sub.add_parser("baseline", help="reference strategies")
    common(sp, k=True)
    sp.add_argument("--strategy", required=True,
                    choices=["full-sort", "topk-heap", "sort-before-join"])
    sp.add_argument("--cap", type=int, default=10**8, help="answer-count cap")
    sp.set_defaults(fn=cmd_baseline)

    sp = sub.add_parser("emit-sql", help="emit SQL for ranked positions")
    common(sp, data=False, k=True)
    sp.add_argument("--dialect", required=True, choices=["offset", "cte"])
    sp.add_argument("--out", default=None, help="write SQL to a file instead of stdout")
    sp.set_defaults(fn=cmd_emit_sql)

    sp = sub.add_parser("gen", help="generate the synthetic three-way-join instance")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--join-size", dest="join_size", required=True, choices=["large", "small"])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True, help="output directory for R.csv, S.csv, T.csv")
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("bench", help="run the benchmark config and write reports")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", required=True, help="CSV report path (JSON written alongside)")
    sp.set_defaults(fn=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CqError as exc:
        _emit({"error": _error_code(exc), "detail": str(exc)})
        return 1
    except OSError as exc:
        _emit({"error": "io_error", "detail": str(exc)})
        return 1


if __name__ == "__main__":
    sys.exit(main())
