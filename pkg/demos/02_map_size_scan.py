#!/usr/bin/env python3
"""Pick the best square map size for one viewpoint.

Trains one map per side length, scores each with feature-share recall and
precision, and keeps the F-measure argmax (ties go to the smaller map).
"""

from mvsom import SyntheticSpec, generate_synthetic, scan_map_sizes, scan_table

dataset = generate_synthetic(
    SyntheticSpec(
        item_count=80,
        features={"topics": 24},
        group_count=6,
        coupling=1.0,
        seed=3,
    )
)
matrix = dataset.viewpoint("topics")

result = scan_map_sizes(matrix, min_side=3, max_side=8, seed=3)

print(scan_table(result, delimiter="\t"))
print(f"chosen size: {result.chosen_size}x{result.chosen_size}")
report = result.report_for(result.chosen_size)
print(f"recall={report.recall:.3f} precision={report.precision:.3f} "
      f"F={report.f_measure:.3f}")
