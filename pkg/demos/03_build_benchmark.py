# Build a balanced benchmark from a synthetic corpus and write it to disk.
#
# Run: python3 demos/03_build_benchmark.py [out_dir]

import json
import sys
from pathlib import Path

from temporal_qa import GenerationConfig, benchmark_stats, build_benchmark, validate_benchmark, write_benchmark
from temporal_qa.builder import benchmark_metadata
from temporal_qa.synthetic import overlapping_corpus, single_label_corpus

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out_dir.mkdir(exist_ok=True)

# Scene-graph-like corpus: background actions, overlaps and co-occurring twins.
corpus = overlapping_corpus(150, seed=0, dataset="synthetic")
config = GenerationConfig(variant="S", per_category_target=200, global_seed=1, dataset_tag="synthetic")
bench = build_benchmark(corpus, config)
print(benchmark_stats(bench).render())
print("violations:", validate_benchmark(bench))

with open(out_dir / "synthetic.jsonl", "wb") as fh:
    n = write_benchmark(bench, fh)
(out_dir / "synthetic.jsonl.meta.json").write_text(json.dumps(benchmark_metadata(bench), indent=2) + "\n")
print(f"wrote {n} items to {out_dir / 'synthetic.jsonl'}")
print()

for qtype in ("boolean", "mcq"):
    it = next(i for i in bench.items if i.category == "AlwaysBefore" and i.qtype == qtype)
    print(it.question, "->", it.answer, it.choices or "")
print()

# Segmentation-like corpus: one label per step, so overlap categories have no positives.
seg = build_benchmark(single_label_corpus(150, seed=0), GenerationConfig(per_category_target=200))
for label, reason in seg.skipped_categories:
    print(f"skipped {label}: {reason}")
