# Drive the benchmark harness from Python: generate instances, time the
# strategies, verify every answer against the oracle, and write reports.
# (The CLI equivalent: cqrank bench --config demos/bench_small.json --out report.csv)

import tempfile
from pathlib import Path

from cqrank.bench import run_benchmark

config = {
    "verify_cap": 200_000,
    "result_cap": 2_000_000,
    "experiments": [
        {"id": "A", "ns": [500, 2000], "join_sizes": ["large", "small"],
         "seeds": [1], "methods": ["da", "sa", "full-sort"]},
        {"id": "B", "n": 2000, "join_size": "large", "seed": 1},
        {"id": "C", "ns": [2000], "join_sizes": ["large", "small"],
         "seeds": [1, 2, 3]},
    ],
}

report = run_benchmark(config)

out = Path(tempfile.mkdtemp(prefix="cqrank-bench-")) / "report.csv"
report.write_csv(out)
report.write_json(out.with_suffix(".json"))
print(f"wrote {out} and {out.with_suffix('.json')}\n")

for row in report.rows:
    if row["experiment"] == "C":
        print(f"C n={row['n']} {row['join_size']:<5} seed={row['seed']} "
              f"DA/SA ratio={row['ratio']}")
    elif row["experiment"] == "A":
        print(f"A n={row['n']:>5} {row['join_size']:<5} {row['method']:<10} "
              f"wall={row.get('wall_ms')}ms verified={row.get('verified')} "
              f"{row.get('error', '')}")
