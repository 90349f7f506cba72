"""
Bringing your own data
======================

Real data (for example flattened 64x64 images, one per row) enters through
``load_csv``. Duplicate rows are common in such data; ``drop_duplicates``
removes them before the neighbor search.
"""

import tempfile
from pathlib import Path

import numpy as np

from idest import (
    GeneratorSpec,
    LbConfig,
    PointCloud,
    build_neighbor_table,
    correlation_dimension,
    generate,
    inverse_mle_estimate,
    knn_regression_dimension,
    lb_estimate,
    load_csv,
    save_csv,
)

# a 3-dimensional cube hidden in 40 ambient dimensions, with repeated rows
pts = generate(GeneratorSpec("uniform_cube", n=1500, seed=3, manifold_dim=3, dim=40)).points
pts = np.vstack([pts, pts[:25]])

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "cloud.csv"
    save_csv(PointCloud(pts), path)
    cloud = load_csv(path)

table = build_neighbor_table(cloud, 20, dedup_policy="drop_duplicates")
print(f"{cloud.n} rows, {table.n} distinct points in R^{table.d}")

print("Levina-Bickel k=10..20 :", round(lb_estimate(table, LbConfig(10, 20)).aggregate, 3))
print("inverse-averaged k=15  :", round(inverse_mle_estimate(table, 15), 3))
print("kNN regression 5..20   :", round(knn_regression_dimension(table, 5, 20), 3))
print("correlation dimension  :", round(correlation_dimension(cloud), 3))
