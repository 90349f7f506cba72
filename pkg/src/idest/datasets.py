"""Synthetic manifolds with known intrinsic dimension, and CSV point-cloud I/O.

Generators draw from ``numpy.random.Generator(PCG64(seed))`` so a fixed seed
reproduces the cloud bit for bit. The 1-D curves and the composite manifold
are representative reconstructions (a smooth helix, a sine graph, a cusp
curve, a square patch with a wire attached); only their intrinsic dimension
matters to the estimators.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyFile, InvalidSpec, IoFailure, NonNumericCell, RaggedRows
from .knn import PointCloud

RNG_NAME = "numpy.random.PCG64"

KINDS = ("gaussian", "helix3d", "curve2d", "singular_curve", "composite", "s_curve", "swiss_roll", "uniform_cube")

# fixed intrinsic dimensions; gaussian and uniform_cube take theirs from GeneratorSpec
TRUE_DIMENSION = {
    "helix3d": 1,
    "curve2d": 1,
    "singular_curve": 1,
    "s_curve": 2,
    "swiss_roll": 2,
}

SWISS_T_RANGE = (1.5 * math.pi, 4.5 * math.pi)
SWISS_HEIGHT = 21.0


@dataclass(frozen=True)
class GeneratorSpec:
    """What to sample.

    ``dim`` is the ambient dimension for ``gaussian`` and ``uniform_cube``;
    ``manifold_dim`` is the cube dimension ``m`` for ``uniform_cube``.
    """

    kind: str
    n: int
    seed: int = 0
    noise_sigma: float = 0.0
    dim: int | None = None
    manifold_dim: int | None = None

    def validate(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown generator kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.n < 10:
            raise InvalidSpec(f"n must be >= 10, got {self.n}")
        if not self.noise_sigma >= 0:
            raise InvalidSpec(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.kind == "gaussian" and (self.dim is None or self.dim < 1):
            raise InvalidSpec("gaussian needs dim >= 1")
        if self.kind == "uniform_cube":
            m, d = self.manifold_dim, self.dim
            if m is None or m < 1:
                raise InvalidSpec("uniform_cube needs manifold_dim >= 1")
            if d is not None and d < m:
                raise InvalidSpec(f"uniform_cube needs dim >= manifold_dim, got dim={d}, manifold_dim={m}")

    @property
    def intrinsic_dimension(self):
        if self.kind == "gaussian":
            return self.dim
        if self.kind == "uniform_cube":
            return self.manifold_dim
        return TRUE_DIMENSION.get(self.kind)


def gaussian(rng, n, d):
    return rng.standard_normal((n, d))


def helix3d(rng, n):
    t = rng.uniform(0.0, 4.0 * math.pi, n)
    return np.column_stack([np.cos(t), np.sin(t), 0.2 * t])


def curve2d(rng, n):
    t = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.column_stack([t, np.sin(3.0 * t)])


def singular_curve(rng, n):
    """Semicubical parabola ``(t^2, t^3)``: a cusp at the origin."""
    t = rng.uniform(-1.0, 1.0, n)
    return np.column_stack([t**2, t**3])


def composite(rng, n):
    """Unit square in the ``z = 0`` plane plus a wire leaving its ``x = 1`` edge.

    The first ``n // 2`` rows lie on the square, the rest on the curve
    ``(1 + s, 0.5, 0.3 sin(pi s))`` for ``s`` in ``[0, 1]``.
    """
    n_patch = n // 2
    patch = np.column_stack([rng.uniform(0.0, 1.0, (n_patch, 2)), np.zeros(n_patch)])
    s = rng.uniform(0.0, 1.0, n - n_patch)
    wire = np.column_stack([1.0 + s, np.full_like(s, 0.5), 0.3 * np.sin(math.pi * s)])
    return np.vstack([patch, wire])


def s_curve(rng, n):
    t = 3.0 * math.pi * (rng.uniform(0.0, 1.0, n) - 0.5)
    h = 2.0 * rng.uniform(0.0, 1.0, n)
    return np.column_stack([np.sin(t), h, np.sign(t) * (np.cos(t) - 1.0)])


def swiss_roll(rng, n):
    t = rng.uniform(*SWISS_T_RANGE, n)
    h = rng.uniform(0.0, SWISS_HEIGHT, n)
    return np.column_stack([t * np.cos(t), h, t * np.sin(t)])


def uniform_cube(rng, n, m, d):
    pts = np.zeros((n, d))
    pts[:, :m] = rng.uniform(0.0, 1.0, (n, m))
    return pts


def generate(spec):
    """Sample the cloud described by ``spec``; noise is added last."""
    spec.validate()
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    kind, n = spec.kind, spec.n
    if kind == "gaussian":
        pts = gaussian(rng, n, spec.dim)
    elif kind == "uniform_cube":
        pts = uniform_cube(rng, n, spec.manifold_dim, spec.dim or spec.manifold_dim)
    else:
        pts = globals()[kind](rng, n)
    if spec.noise_sigma > 0:
        pts = pts + spec.noise_sigma * rng.standard_normal(pts.shape)
    return PointCloud(pts)


def _parse_row(row, lineno):
    out = []
    for col, cell in enumerate(row):
        try:
            value = float(cell)
        except ValueError:
            raise NonNumericCell(lineno, col, cell) from None
        if not math.isfinite(value):
            raise NonNumericCell(lineno, col, cell)
        out.append(value)
    return out


def _is_numeric(row):
    try:
        _parse_row(row, 0)
    except NonNumericCell:
        return False
    return True


def load_csv(path, has_header="auto"):
    """Read a comma-separated numeric matrix, one point per row.

    ``has_header`` is ``"auto"``, ``"yes"`` or ``"no"``; in auto mode the
    first row is skipped iff any of its cells fails to parse as a number.
    Blank lines are ignored. Row and column numbers in errors are 1- and
    0-based respectively.
    """
    if has_header not in ("auto", "yes", "no"):
        raise InvalidSpec(f"has_header must be auto, yes or no, got {has_header!r}")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if r and any(c.strip() for c in r)]
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise EmptyFile(f"{path} contains no rows")
    if has_header == "yes" or (has_header == "auto" and not _is_numeric(rows[0][1])):
        rows = rows[1:]
    if not rows:
        raise EmptyFile(f"{path} contains a header but no data rows")
    width = len(rows[0][1])
    data = []
    for lineno, row in rows:
        if len(row) != width:
            raise RaggedRows(f"row {lineno} has {len(row)} columns, expected {width}")
        data.append(_parse_row(row, lineno))
    return PointCloud(np.array(data, dtype=np.float64))


def format_float(x):
    """17-significant-digit decimal, locale independent."""
    return format(float(x), ".17g")


def save_csv(cloud, path):
    """Write one row per point, no header, round-trippable decimals."""
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud(cloud)
    lines = [",".join(format_float(v) for v in row) for row in cloud.points]
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
