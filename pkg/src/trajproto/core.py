"""Planar trajectory value types and the transform/distance primitives shared by the pipeline.

All types are immutable after construction and all operations are pure, so
they are safe to use concurrently without locking.
"""

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np


class Point2(NamedTuple):
    """A point in the plane."""

    x: float
    y: float


def as_point_array(points, min_len: int = 2) -> np.ndarray:
    """Coerce ``points`` to a read-only (M, 2) float64 array.

    Validates shape, minimum length, and finiteness. Always copies, so the
    caller's buffer stays writable and the returned one never changes.
    """
    pts = np.array(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected point array of shape (M, 2), got {pts.shape}")
    if pts.shape[0] < min_len:
        raise ValueError(f"need at least {min_len} points, got {pts.shape[0]}")
    if not np.isfinite(pts).all():
        raise ValueError("all coordinates must be finite")
    pts.setflags(write=False)
    return pts


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A fixed-length ordered sequence of planar points with an identifier."""

    id: str
    points: np.ndarray  # (M, 2) float64, read-only

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", as_point_array(self.points))

    @property
    def m(self) -> int:
        return int(self.points.shape[0])


@dataclass(frozen=True, eq=False)
class Dataset:
    """A set of trajectories sharing a single sequence length M."""

    samples: tuple[Trajectory, ...]

    def __post_init__(self) -> None:
        samples = tuple(self.samples)
        if not samples:
            raise ValueError("a dataset needs at least one sample")
        m = samples[0].m
        for t in samples:
            if t.m != m:
                raise ValueError(f"sample {t.id!r} has length {t.m}, expected {m}")
        object.__setattr__(self, "samples", samples)

    @property
    def m(self) -> int:
        return self.samples[0].m

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[Trajectory]:
        return iter(self.samples)


@dataclass(frozen=True)
class SimilarityTransform:
    """Uniform scale, rotation, and translation. Preserves shape.

    Applied as ``x' = s * R(alpha) @ x + t`` with R the standard 2x2
    counterclockwise rotation and ``t = (tx, ty)``.
    """

    tx: float
    ty: float
    alpha: float  # radians
    s: float  # dimensionless, > 0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.tx, self.ty, self.alpha, self.s)):
            raise ValueError("transform fields must be finite")
        if self.s <= 0.0:
            raise ValueError(f"scale must be positive, got {self.s}")

    @property
    def t(self) -> np.ndarray:
        return np.array([self.tx, self.ty])


def apply_transform(tf: SimilarityTransform, traj: Trajectory) -> Trajectory:
    """Apply a similarity transform to every point of a trajectory.

    The output keeps the input's id and length.
    """
    c, sn = math.cos(tf.alpha), math.sin(tf.alpha)
    x, y = traj.points[:, 0], traj.points[:, 1]
    out = np.column_stack(
        (
            tf.s * (c * x - sn * y) + tf.tx,
            tf.s * (sn * x + c * y) + tf.ty,
        )
    )
    return Trajectory(traj.id, out)


def mse(a: Trajectory, b: Trajectory) -> float:
    """Mean over point index of the squared Euclidean distance between two trajectories.

    Both trajectories must have the same length.
    """
    if a.points.shape[0] != b.points.shape[0]:
        raise ValueError(f"length mismatch: {a.points.shape[0]} vs {b.points.shape[0]}")
    d = a.points - b.points
    return float(np.mean(np.sum(d * d, axis=1)))


def centroid(traj: Trajectory) -> Point2:
    """Arithmetic mean of all points."""
    cx, cy = traj.points.mean(axis=0)
    return Point2(float(cx), float(cy))


def stack_points(samples: Sequence) -> np.ndarray:
    """Stack the ``points`` arrays of equal-length samples into an (N, M, 2) block."""
    if len(samples) == 0:
        raise ValueError("need at least one sample")
    m = samples[0].points.shape[0]
    for s in samples:
        if s.points.shape[0] != m:
            raise ValueError("samples must share one sequence length")
    return np.stack([s.points for s in samples])
