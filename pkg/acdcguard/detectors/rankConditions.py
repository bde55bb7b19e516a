import numpy as np
from .dae import DaeSystem
from ..common.numerics import numericRank

EVALUATION_SEED = 20240607
NUM_EVALUATION_POINTS = 7


def evaluationPoints(count: int = NUM_EVALUATION_POINTS, seed: int = EVALUATION_SEED) -> np.ndarray:
    """
    random points on the unit circle; the normal rank of a polynomial matrix
    is reached at all but finitely many points
    """
    angles = np.random.default_rng(seed).uniform(0.0, 2 * np.pi, count)
    return np.exp(1j * angles)


def normalRank(dae: DaeSystem, extra: np.ndarray | None = None, tol: float = 1e-9) -> int:
    """
    normal rank of [H(q) extra], extra being constant columns
    """
    rank = 0
    for z in evaluationPoints():
        matrix = dae.H(z)
        if extra is not None and extra.size:
            matrix = np.hstack([matrix, extra])
        rank = max(rank, numericRank(matrix, tol))
    return rank


def checkDetectable(dae: DaeSystem, channel: str) -> bool:
    """
    an attack on channel can be detected iff rank [H F_j] > rank H
    """
    Fj = dae.column(channel)[:, None]
    return normalRank(dae, Fj) > normalRank(dae)


def checkIsolable(dae: DaeSystem, channel: str, channels: tuple[str, ...] | list[str] | None = None) -> bool:
    """
    channel can be told apart from the other attacked channels iff
    rank [H F] > rank [H F_-j], F restricted to `channels` (all by default)
    """
    channels = tuple(dae.channelLabels if channels is None else channels)
    if channel not in channels:
        channels += (channel,)
    others = [dae.column(other) for other in channels if other != channel]
    rest = np.column_stack(others) if others else np.zeros((dae.numRows, 0))
    full = np.column_stack(others + [dae.column(channel)])
    return normalRank(dae, full) > normalRank(dae, rest)
