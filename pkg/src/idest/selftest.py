"""Fast built-in checks run by ``idest selftest``."""

from __future__ import annotations

import numpy as np
from scipy.spatial.transform import Rotation

from .baseline import LbConfig, inverse_mle_estimate, lb_estimate, lb_pointwise_all
from .datasets import GeneratorSpec, generate
from .knn import PointCloud, brute_force_neighbor_table, build_neighbor_table
from .regularized import RegularizedConfig, quadratic_update, run_regularized


def check_knn_oracle():
    rng = np.random.default_rng(20240601)
    for trial in range(10):
        n = int(rng.integers(20, 200))
        d = int(rng.integers(1, 8))
        cloud = PointCloud(rng.uniform(size=(n, d)))
        k = int(rng.integers(1, min(20, n - 1) + 1))
        fast = build_neighbor_table(cloud, k)
        slow = brute_force_neighbor_table(cloud, k)
        if not (np.array_equal(fast.indices, slow.indices) and np.array_equal(fast.distances, slow.distances)):
            return False, f"mismatch on trial {trial} (n={n}, d={d}, k={k})"
    return True, "10 random clouds match the brute-force table"


def check_gamma_zero():
    rng = np.random.default_rng(7)
    for _ in range(100):
        s = float(rng.uniform(0.1, 50.0))
        k = int(rng.integers(2, 60))
        m0 = float(rng.uniform(0.01, 20.0))
        root = quadratic_update(s, k, m0, 0.0)
        if abs(root - k / s) > 1e-12 * (k / s):
            return False, f"gamma=0 root {root!r} != k/S {k / s!r}"
    cloud = generate(GeneratorSpec("gaussian", 300, seed=3, dim=3))
    table = build_neighbor_table(cloud, 12)
    rep = run_regularized(table, RegularizedConfig(k=12, gamma0=0.0, epsilon=0.0, max_iter=1))
    expected = (12 / 11) * lb_pointwise_all(table, 12)
    if not np.allclose(rep.per_point, expected, rtol=1e-12, atol=0):
        return False, "one unpenalized sweep differs from k/(k-1) * LB"
    return True, "gamma=0 update reduces to k/S"


def check_invariance():
    base = generate(GeneratorSpec("swiss_roll", 600, seed=11))
    rot = Rotation.random(random_state=5).as_matrix()
    variants = {
        "rigid": PointCloud(base.points @ rot.T + np.array([3.0, -1.0, 2.5])),
        "scale": PointCloud(base.points * 100.0),
    }

    def summary(cloud):
        table = build_neighbor_table(cloud, 15)
        return np.concatenate(
            [
                run_regularized(table, RegularizedConfig(k=15)).per_point,
                lb_estimate(table, LbConfig(10, 15)).per_point,
                [inverse_mle_estimate(table, 15)],
            ]
        )

    ref = summary(base)
    for name, cloud in variants.items():
        if not np.allclose(summary(cloud), ref, rtol=1e-9, atol=0):
            return False, f"estimates changed under {name} transform"
    return True, "estimates unchanged under rotation, translation and scaling"


CHECKS = {
    "knn-oracle": check_knn_oracle,
    "gamma-zero": check_gamma_zero,
    "invariance": check_invariance,
}


def run_all():
    """Return ``[(name, passed, detail), ...]`` for every check."""
    results = []
    for name, check in CHECKS.items():
        try:
            ok, detail = check()
        except Exception as exc:  # a crash is a failed check, not a crashed CLI
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results
