"""Vector quantization of aligned samples onto K prototypes, plus greedy refinement.

The training objective is a winner-takes-all term (each sample pulls only its
nearest prototype) plus a small global term that pulls every prototype toward
the batch mean, weighted by gamma. Prototypes start as randomly chosen
dataset samples (Forgy initialization). After training, a refinement pass
keeps the best-supported prototype and greedily adds only prototypes that are
sufficiently dissimilar from the kept ones and still noticeably reduce the
dataset quantization error.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Trajectory, stack_points
from .errors import DivergedTrainingError


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PrototypeSet:
    """K prototype sequences in aligned space, optionally with support counts.

    ``support[k]`` is the number of dataset samples whose nearest prototype is
    k; it is None until computed against a concrete dataset.
    """

    prototypes: np.ndarray  # (K, M, 2)
    support: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        protos = _frozen(self.prototypes)
        if protos.ndim != 3 or protos.shape[2] != 2 or protos.shape[0] < 1:
            raise ValueError(f"prototypes must have shape (K, M, 2) with K >= 1, got {protos.shape}")
        if not np.isfinite(protos).all():
            raise ValueError("prototype coordinates must be finite")
        object.__setattr__(self, "prototypes", protos)
        if self.support is not None:
            support = tuple(int(c) for c in self.support)
            if len(support) != protos.shape[0]:
                raise ValueError("support must have one count per prototype")
            if any(c < 0 for c in support):
                raise ValueError("support counts must be nonnegative")
            object.__setattr__(self, "support", support)

    @property
    def k(self) -> int:
        return int(self.prototypes.shape[0])

    @property
    def m(self) -> int:
        return int(self.prototypes.shape[1])

    def trajectories(self, prefix: str = "prototype") -> list[Trajectory]:
        """The prototypes as plain trajectories, for export and plotting."""
        return [Trajectory(f"{prefix}{k}", self.prototypes[k]) for k in range(self.k)]


@dataclass(frozen=True)
class LVQConfig:
    """Hyperparameters for quantization training and refinement.

    ``refine_tau`` is the stopping threshold of the greedy refinement: adding
    a prototype must cut the dataset quantization error by at least this
    fraction of the error the dominant prototype leaves on its own.
    ``refine_delta_min`` is the dissimilarity floor below which a candidate
    counts as a duplicate of an already selected prototype.
    """

    k: int = 10
    gamma: float = 0.05
    learning_rate: float = 5e-2
    epochs: int = 300
    batch_size: int = 32
    seed: int = 0
    refine_tau: float = 0.05
    refine_delta_min: float = 1e-4

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.gamma < 0.0:
            raise ValueError("gamma must be nonnegative")
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.refine_tau <= 0.0:
            raise ValueError("refine_tau must be positive")
        if self.refine_delta_min <= 0.0:
            raise ValueError("refine_delta_min must be positive")


@dataclass(frozen=True, eq=False)
class QuantizationResult:
    """Trained prototypes with final assignments, error, and per-epoch loss."""

    prototypes: PrototypeSet
    assignments: np.ndarray  # (N,) int, index of the assigned prototype
    global_error: float
    loss_history: tuple[float, ...]

    def __post_init__(self) -> None:
        a = np.array(self.assignments, dtype=np.int64)
        if a.ndim != 1:
            raise ValueError("assignments must be one-dimensional")
        if a.size and (a.min() < 0 or a.max() >= self.prototypes.k):
            raise ValueError("assignment indices must lie in [0, K)")
        a.setflags(write=False)
        object.__setattr__(self, "assignments", a)
        if self.global_error < 0.0:
            raise ValueError("global_error must be nonnegative")


def _distances(protos: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Pairwise (N, K) matrix of per-sample mean squared pointwise distances."""
    diff = pts[:, None, :, :] - protos[None, :, :, :]
    return (diff * diff).sum(axis=3).mean(axis=2)


def forgy_init(data: Sequence[Trajectory], k: int, seed: int) -> PrototypeSet:
    """Initialize K prototypes as exact copies of K distinct random samples."""
    n = len(data)
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise ValueError(f"cannot draw {k} prototypes from {n} samples")
    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=k, replace=False)
    return PrototypeSet(np.stack([data[i].points for i in idx]))


def assign(protos: PrototypeSet, sample: Trajectory) -> int:
    """Index of the prototype with minimal mean squared distance to the sample.

    Ties are broken toward the lowest index.
    """
    if sample.points.shape[0] != protos.m:
        raise ValueError(
            f"sample length {sample.points.shape[0]} does not match prototype length {protos.m}"
        )
    d = _distances(protos.prototypes, sample.points[None])[0]
    return int(np.argmin(d))


def assign_all(protos: PrototypeSet, data: Sequence[Trajectory]) -> np.ndarray:
    """Vectorized nearest-prototype assignment for a whole dataset."""
    pts = stack_points(data)
    if pts.shape[1] != protos.m:
        raise ValueError("sample length does not match prototype length")
    return np.argmin(_distances(protos.prototypes, pts), axis=1)


def _loss_arrays(protos: np.ndarray, pts: np.ndarray, gamma: float) -> float:
    d = _distances(protos, pts)
    winner = d[np.arange(d.shape[0]), d.argmin(axis=1)].mean()
    return float(winner + gamma * d.mean())


def lvq_loss(protos: PrototypeSet, batch: Sequence[Trajectory], gamma: float) -> float:
    """Winner-takes-all quantization error plus gamma times the all-prototype mean term."""
    if len(batch) == 0:
        raise ValueError("batch must not be empty")
    pts = stack_points(batch)
    if pts.shape[1] != protos.m:
        raise ValueError("sample length does not match prototype length")
    return _loss_arrays(protos.prototypes, pts, gamma)


def _gradients_arrays(protos: np.ndarray, pts: np.ndarray, gamma: float) -> np.ndarray:
    b, m, _ = pts.shape
    k = protos.shape[0]
    a = _distances(protos, pts).argmin(axis=1)
    counts = np.bincount(a, minlength=k).astype(np.float64)
    sums = np.zeros_like(protos)
    np.add.at(sums, a, pts)
    grad = (2.0 / (b * m)) * (counts[:, None, None] * protos - sums)
    if gamma != 0.0:
        grad += gamma * (2.0 / (b * m * k)) * (b * protos - pts.sum(axis=0)[None])
    return grad


def lvq_gradients(protos: PrototypeSet, batch: Sequence[Trajectory], gamma: float) -> np.ndarray:
    """Gradient of :func:`lvq_loss` with the batch assignments held fixed.

    The winner term contributes only to prototypes that have assigned samples
    in the batch; the global term contributes to all of them.
    """
    if len(batch) == 0:
        raise ValueError("batch must not be empty")
    pts = stack_points(batch)
    if pts.shape[1] != protos.m:
        raise ValueError("sample length does not match prototype length")
    return _gradients_arrays(protos.prototypes, pts, gamma)


def quantization_error(protos: PrototypeSet, data: Sequence[Trajectory]) -> float:
    """Mean over samples of the squared-distance to their nearest prototype.

    Identical to :func:`lvq_loss` with gamma set to zero.
    """
    if len(data) == 0:
        raise ValueError("data must not be empty")
    pts = stack_points(data)
    if pts.shape[1] != protos.m:
        raise ValueError("sample length does not match prototype length")
    return _loss_arrays(protos.prototypes, pts, 0.0)


def evaluate(protos: PrototypeSet, data: Sequence[Trajectory]) -> QuantizationResult:
    """Assignments, support counts, and global error of fixed prototypes on a dataset."""
    pts = stack_points(data)
    if pts.shape[1] != protos.m:
        raise ValueError("sample length does not match prototype length")
    d = _distances(protos.prototypes, pts)
    a = d.argmin(axis=1)
    support = tuple(int(c) for c in np.bincount(a, minlength=protos.k))
    err = float(d[np.arange(d.shape[0]), a].mean())
    scored = PrototypeSet(protos.prototypes, support)
    return QuantizationResult(scored, a, err, ())


def train_lvq(data: Sequence[Trajectory], cfg: LVQConfig) -> QuantizationResult:
    """Train K prototypes by minibatch gradient descent with per-step reassignment.

    Deterministic for a given seed: Forgy initialization and epoch shuffling
    draw from one seeded stream. The loss history records the full-dataset
    objective after each epoch; assignments, support, and global error are
    computed over the full dataset with the final prototypes.
    """
    n = len(data)
    if n == 0:
        raise ValueError("training data must not be empty")
    if cfg.k > n:
        raise ValueError(f"cannot train {cfg.k} prototypes on {n} samples")
    if cfg.batch_size > n:
        raise ValueError(f"batch_size {cfg.batch_size} exceeds sample count {n}")
    pts = stack_points(data)

    rng = np.random.default_rng(cfg.seed)
    idx = rng.choice(n, size=cfg.k, replace=False)
    protos = pts[idx].copy()

    history: list[float] = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        for lo in range(0, n, cfg.batch_size):
            chunk = pts[order[lo : lo + cfg.batch_size]]
            protos -= cfg.learning_rate * _gradients_arrays(protos, chunk, cfg.gamma)
        loss = _loss_arrays(protos, pts, cfg.gamma)
        if not np.isfinite(loss):
            raise DivergedTrainingError(f"non-finite quantization loss at epoch {epoch}")
        history.append(loss)

    d = _distances(protos, pts)
    a = d.argmin(axis=1)
    support = tuple(int(c) for c in np.bincount(a, minlength=cfg.k))
    err = float(d[np.arange(n), a].mean())
    return QuantizationResult(PrototypeSet(protos, support), a, err, tuple(history))


def refine(
    result: QuantizationResult,
    data: Sequence[Trajectory],
    tau: float,
    delta_min: float,
) -> PrototypeSet:
    """Greedily select a small subset of the trained prototypes.

    Starts from the prototype with the most support. Each round drops
    candidates whose dissimilarity (mean squared pointwise distance) to some
    already selected prototype is below ``delta_min``, then adds the
    surviving candidate that most reduces the dataset quantization error.
    Selection stops when the best error reduction falls below ``tau``
    relative to the error of the seed prototype alone, so near-duplicates and
    prototypes that only shave noise are sorted out.

    Prototype coordinates are never modified; the returned set carries
    support counts recomputed over ``data``.
    """
    if len(data) == 0:
        raise ValueError("data must not be empty")
    if result.prototypes.support is None:
        raise ValueError("refine needs a result with computed support counts")
    if tau <= 0.0 or delta_min <= 0.0:
        raise ValueError("tau and delta_min must be positive")

    protos = result.prototypes.prototypes
    k = protos.shape[0]
    pts = stack_points(data)
    if pts.shape[1] != protos.shape[1]:
        raise ValueError("sample length does not match prototype length")

    # Pairwise prototype dissimilarities for the delta_min filter.
    diff = protos[:, None] - protos[None, :]
    proto_dist = (diff * diff).sum(axis=3).mean(axis=2)

    per_proto = _distances(protos, pts)  # (N, K), reused for subset errors
    seed = int(np.argmax(result.prototypes.support))
    selected = [seed]
    best_per_sample = per_proto[:, seed].copy()
    err_seed = float(best_per_sample.mean())
    err_cur = err_seed

    remaining = [i for i in range(k) if i != seed]
    while remaining and err_seed > 0.0:
        survivors = [
            c for c in remaining if min(proto_dist[c, s] for s in selected) >= delta_min
        ]
        if not survivors:
            break
        errs = [
            float(np.minimum(best_per_sample, per_proto[:, c]).mean()) for c in survivors
        ]
        pick = int(np.argmin(errs))
        if (err_cur - errs[pick]) / err_seed < tau:
            break
        chosen = survivors[pick]
        selected.append(chosen)
        remaining.remove(chosen)
        best_per_sample = np.minimum(best_per_sample, per_proto[:, chosen])
        err_cur = errs[pick]

    chosen_pts = protos[selected]
    a = np.argmin(per_proto[:, selected], axis=1)
    support = tuple(int(c) for c in np.bincount(a, minlength=len(selected)))
    return PrototypeSet(chosen_pts, support)
