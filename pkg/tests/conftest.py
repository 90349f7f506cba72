import numpy as np
import pytest

from idest import GeneratorSpec, PointCloud, build_neighbor_table, generate

ACCEPTANCE_LINES = []


@pytest.fixture
def line_cloud():
    return PointCloud(np.array([[0.0], [1.0], [3.0]]))


@pytest.fixture(scope="session")
def swiss_small():
    return generate(GeneratorSpec("swiss_roll", 600, seed=11))


@pytest.fixture(scope="session")
def gauss5():
    cloud = generate(GeneratorSpec("gaussian", 1000, seed=1, dim=5))
    return cloud, build_neighbor_table(cloud, 50)


def table_from_distances(rows):
    """NeighborTable with hand-picked distances (indices are placeholders)."""
    from idest.knn import NeighborTable

    dist = np.asarray(rows, dtype=float)
    n, k = dist.shape
    idx = np.array([[(i + j + 1) % max(n, k + 1) for j in range(k)] for i in range(n)])
    return NeighborTable(distances=dist, indices=idx, d=1)


@pytest.fixture
def record_acceptance():
    def record(number, passed, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
