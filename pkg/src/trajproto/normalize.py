"""Pre-normalization that moves every sample into a common value range.

Each sample is shifted into a self-centered frame (centroid at the origin)
and scaled so the straight-line distance between its first and last point is
one. Samples with (near-)zero endpoint displacement, such as loops or a
standing agent, cannot be scale-normalized and are rejected.
"""

from dataclasses import dataclass

import numpy as np

from .core import Dataset, Trajectory, as_point_array
from .errors import DegenerateTrajectoryError, EmptyResultError

#: Minimum endpoint displacement (scene units) accepted by :func:`normalize`.
EPS_DISP = 1e-6


@dataclass(frozen=True, eq=False)
class NormalizedTrajectory:
    """A trajectory in normalized units: zero centroid, unit endpoint displacement."""

    source_id: str
    points: np.ndarray  # (M, 2) float64, read-only

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", as_point_array(self.points))

    @property
    def m(self) -> int:
        return int(self.points.shape[0])

    def to_trajectory(self) -> Trajectory:
        """View this sample as a plain trajectory carrying the source id."""
        return Trajectory(self.source_id, self.points)


def normalize(traj: Trajectory, eps_disp: float = EPS_DISP) -> NormalizedTrajectory:
    """Center a sample on its centroid and scale it to unit endpoint displacement.

    Raises DegenerateTrajectoryError when the Euclidean distance between the
    last and first point is at most ``eps_disp``.
    """
    disp = traj.points[-1] - traj.points[0]
    d = float(np.hypot(disp[0], disp[1]))
    if d <= eps_disp:
        raise DegenerateTrajectoryError(
            f"sample {traj.id!r}: endpoint displacement {d:.6g} <= {eps_disp:.6g}"
        )
    out = (traj.points - traj.points.mean(axis=0)) / d
    return NormalizedTrajectory(traj.id, out)


def normalize_dataset(
    ds: Dataset, eps_disp: float = EPS_DISP
) -> tuple[list[NormalizedTrajectory], list[str]]:
    """Normalize every sample of a dataset, collecting degenerate sample ids.

    Returns the accepted samples in input order and the ids of rejected ones.
    Raises EmptyResultError when every sample is degenerate.
    """
    accepted: list[NormalizedTrajectory] = []
    rejected: list[str] = []
    for traj in ds:
        try:
            accepted.append(normalize(traj, eps_disp))
        except DegenerateTrajectoryError:
            rejected.append(traj.id)
    if not accepted:
        raise EmptyResultError("every sample has (near-)zero endpoint displacement")
    return accepted, rejected
