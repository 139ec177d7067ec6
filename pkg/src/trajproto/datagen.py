"""Synthetic trajectory generator covering four labeled motion patterns.

Produces straight constant-speed runs, straight accelerated runs, and
constant-speed left/right curves with a total direction change drawn
uniformly from a configurable angle interval. Pattern counts, sequence
length, and all draws are controlled by a single seeded configuration, so a
given config always generates the identical dataset.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import Dataset, Trajectory

PATTERNS = ("constant", "accelerated", "curve_left", "curve_right")


@dataclass(frozen=True)
class SgtdConfig:
    """Generator settings; the defaults build the 200-sample reference mix."""

    n_constant: int = 125
    n_accelerated: int = 33
    n_curve_left: int = 29
    n_curve_right: int = 13
    m: int = 31
    base_speed_mean: float = 1.0  # units per step
    base_speed_std: float = 0.2
    accel_factor_range: tuple[float, float] = (1.5, 2.5)  # final/initial speed ratio
    curve_angle_range_deg: tuple[float, float] = (80.0, 90.0)
    start_region: tuple[float, float, float, float] = (0.0, 0.0, 100.0, 100.0)  # x0, y0, x1, y1
    seed: int = 0

    def __post_init__(self) -> None:
        counts = (self.n_constant, self.n_accelerated, self.n_curve_left, self.n_curve_right)
        if any(c < 0 for c in counts):
            raise ValueError("pattern counts must be nonnegative")
        if sum(counts) < 1:
            raise ValueError("total sample count must be at least 1")
        if self.m < 2:
            raise ValueError("sequence length must be at least 2")
        if self.base_speed_mean <= 0.0:
            raise ValueError("base speed mean must be positive")
        if not self.accel_factor_range[0] <= self.accel_factor_range[1]:
            raise ValueError("acceleration factor range must be ordered")
        if self.accel_factor_range[0] <= 1.0:
            raise ValueError("acceleration factors must exceed 1")

    @property
    def total(self) -> int:
        return self.n_constant + self.n_accelerated + self.n_curve_left + self.n_curve_right


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """A dataset plus the per-sample pattern tag it was generated from."""

    dataset: Dataset
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.labels) != len(self.dataset):
            raise ValueError("labels must match sample count")


def _draw_speed(rng: np.random.Generator, cfg: SgtdConfig) -> float:
    # Redraw below the floor: a non-positive speed would silently invert headings.
    floor = 0.1 * cfg.base_speed_mean
    while True:
        v = rng.normal(cfg.base_speed_mean, cfg.base_speed_std)
        if v > floor:
            return float(v)


def _draw_start(rng: np.random.Generator, cfg: SgtdConfig) -> np.ndarray:
    x0, y0, x1, y1 = cfg.start_region
    return np.array([rng.uniform(x0, x1), rng.uniform(y0, y1)])


def gen_constant(rng: np.random.Generator, cfg: SgtdConfig, id: str = "constant") -> Trajectory:
    """Straight line at a constant per-step speed, random heading and start."""
    start = _draw_start(rng, cfg)
    heading = rng.uniform(0.0, 2.0 * math.pi)
    v = _draw_speed(rng, cfg)
    step = v * np.array([math.cos(heading), math.sin(heading)])
    pts = start + np.arange(cfg.m)[:, None] * step
    return Trajectory(id, pts)


def gen_accelerated(rng: np.random.Generator, cfg: SgtdConfig, id: str = "accelerated") -> Trajectory:
    """Straight line whose step speed ramps linearly from v0 to f * v0.

    The ratio f is drawn uniformly from ``cfg.accel_factor_range``, so the
    last step is exactly f times as long as the first.
    """
    start = _draw_start(rng, cfg)
    heading = rng.uniform(0.0, 2.0 * math.pi)
    v0 = _draw_speed(rng, cfg)
    f = rng.uniform(*cfg.accel_factor_range)
    n_steps = cfg.m - 1
    ramp = np.linspace(0.0, 1.0, n_steps) if n_steps > 1 else np.zeros(1)
    speeds = v0 * (1.0 + (f - 1.0) * ramp)
    direction = np.array([math.cos(heading), math.sin(heading)])
    steps = speeds[:, None] * direction
    pts = start + np.concatenate([np.zeros((1, 2)), np.cumsum(steps, axis=0)])
    return Trajectory(id, pts)


def gen_curve(
    rng: np.random.Generator, cfg: SgtdConfig, direction: str, id: str = "curve"
) -> Trajectory:
    """Constant-speed curve turning by a total angle drawn from the config interval.

    ``direction`` is ``"left"`` (counterclockwise) or ``"right"``; the turn is
    spread evenly over the steps, so consecutive step headings differ by the
    total angle divided by M - 2.
    """
    if direction not in ("left", "right"):
        raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")
    start = _draw_start(rng, cfg)
    heading = rng.uniform(0.0, 2.0 * math.pi)
    v = _draw_speed(rng, cfg)
    lo, hi = cfg.curve_angle_range_deg
    total = math.radians(rng.uniform(lo, hi))
    sign = 1.0 if direction == "left" else -1.0
    n_steps = cfg.m - 1
    ramp = np.linspace(0.0, 1.0, n_steps) if n_steps > 1 else np.zeros(1)
    headings = heading + sign * total * ramp
    steps = v * np.column_stack([np.cos(headings), np.sin(headings)])
    pts = start + np.concatenate([np.zeros((1, 2)), np.cumsum(steps, axis=0)])
    return Trajectory(id, pts)


def generate_sgtd(cfg: SgtdConfig) -> LabeledDataset:
    """Generate the full labeled dataset and shuffle the sample order.

    Deterministic for a given config: samples are generated pattern by
    pattern from one seeded stream, then permuted by the same stream. Sample
    ids are assigned after shuffling as ``s0000``, ``s0001``, and so on.
    """
    if cfg.total < 1:
        raise ValueError("total sample count must be at least 1")
    rng = np.random.default_rng(cfg.seed)
    samples: list[Trajectory] = []
    labels: list[str] = []
    for _ in range(cfg.n_constant):
        samples.append(gen_constant(rng, cfg))
        labels.append("constant")
    for _ in range(cfg.n_accelerated):
        samples.append(gen_accelerated(rng, cfg))
        labels.append("accelerated")
    for _ in range(cfg.n_curve_left):
        samples.append(gen_curve(rng, cfg, "left"))
        labels.append("curve_left")
    for _ in range(cfg.n_curve_right):
        samples.append(gen_curve(rng, cfg, "right"))
        labels.append("curve_right")
    order = rng.permutation(len(samples))
    width = max(4, len(str(len(samples) - 1)))
    shuffled = [
        Trajectory(f"s{i:0{width}d}", samples[j].points) for i, j in enumerate(order)
    ]
    shuffled_labels = tuple(labels[j] for j in order)
    return LabeledDataset(Dataset(tuple(shuffled)), shuffled_labels)


def write_labels_csv(path, ids, labels) -> None:
    """Write the per-sample pattern tags as ``sample_id,label`` rows."""
    lines = ["sample_id,label"]
    lines.extend(f"{i},{lab}" for i, lab in zip(ids, labels, strict=True))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_labels_csv(path) -> dict[str, str]:
    """Read a label CSV back into an id-to-label mapping."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or (n == 1 and line == "sample_id,label"):
                continue
            sid, _, lab = line.partition(",")
            out[sid] = lab
    return out
