import numpy as np
from dataclasses import dataclass
from ..common.errors import ConfigError
from ..grid.gridModel import LtiModel


@dataclass(frozen=True, eq=False)
class DaeSystem:
    """
    H(q) x + L y + F f = 0 with H(q) = H0 + H1 q, unknowns x = [X; d] and
    measured outputs y. absorbing attack channels moves their F columns into
    H so they become unknowns the residual has to reject
    """
    H0: np.ndarray
    H1: np.ndarray
    L: np.ndarray
    F: np.ndarray
    numStates: int
    outputLabels: tuple[str, ...]
    channelLabels: tuple[str, ...]
    unknownLabels: tuple[str, ...]
    fingerprint: str = ''

    def __post_init__(self) -> None:
        nR = self.numStates + len(self.outputLabels)
        assert self.H0.shape == self.H1.shape, 'H0 and H1 need the same shape'
        assert self.H0.shape == (nR, len(self.unknownLabels)), 'H does not fit the unknowns'
        assert self.L.shape == (nR, len(self.outputLabels)), 'L needs one column per output'
        assert self.F.shape == (nR, len(self.channelLabels)), 'F needs one column per attack channel'

    @property
    def numRows(self) -> int:
        return self.H0.shape[0]

    @property
    def numUnknowns(self) -> int:
        return self.H0.shape[1]

    @property
    def numOutputs(self) -> int:
        return len(self.outputLabels)

    def column(self, channel: str) -> np.ndarray:
        if channel not in self.channelLabels:
            raise ConfigError(f"'{channel}' is not an attack channel of this system, choose from {self.channelLabels}")
        return self.F[:, self.channelLabels.index(channel)]

    def H(self, z: complex) -> np.ndarray:
        """
        H evaluated at the point z
        """
        return self.H0 + z * self.H1

    def absorb(self, channels: tuple[str, ...] | list[str]) -> 'DaeSystem':
        for channel in channels:
            self.column(channel)
        moved = [self.channelLabels.index(channel) for channel in channels]
        kept = [i for i in range(len(self.channelLabels)) if i not in moved]
        extra = self.F[:, moved]
        return DaeSystem(H0=np.hstack([self.H0, extra]),
                         H1=np.hstack([self.H1, np.zeros_like(extra)]),
                         L=self.L,
                         F=self.F[:, kept],
                         numStates=self.numStates,
                         outputLabels=self.outputLabels,
                         channelLabels=tuple(self.channelLabels[i] for i in kept),
                         unknownLabels=self.unknownLabels + tuple(f'f_{channel}' for channel in channels),
                         fingerprint=self.fingerprint)


def buildDae(model: LtiModel) -> DaeSystem:
    """
    state rows:  A X[k] + Bd d[k] - X[k+1] + Bf f[k] = 0
    output rows: C X[k] - y[k] + f[k] = 0
    """
    if not model.isDiscrete:
        raise ValueError('the dae form is built from the discrete model, discretize first')
    n, nY, nD = model.numStates, model.numChannels, len(model.disturbanceLabels)
    H0 = np.block([[model.A, model.Bd], [model.C, np.zeros((nY, nD))]])
    H1 = np.zeros_like(H0)
    H1[:n, :n] = -np.eye(n)
    L = np.vstack([np.zeros((n, nY)), -np.eye(nY)])
    F = np.vstack([model.Bf, np.eye(nY)])
    return DaeSystem(H0=H0, H1=H1, L=L, F=F, numStates=n,
                     outputLabels=model.channelLabels,
                     channelLabels=model.channelLabels,
                     unknownLabels=model.stateLabels + model.disturbanceLabels,
                     fingerprint=model.fingerprint())


def stackToeplitz(dae: DaeSystem, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """
    for N(q) = N_0 + ... + N_d q^d stacked as [N_0 ... N_d], the product
    [N_0 ... N_d] Hbar holds the coefficients of N(q) H(q) and
    [N_0 ... N_d] Fbar those of N(q) F
    """
    if degree < 1:
        raise ValueError(f'the polynomial degree has to be at least 1, got {degree}')
    nR, nX = dae.H0.shape
    Hbar = np.zeros(((degree + 1) * nR, (degree + 2) * nX))
    for i in range(degree + 1):
        rows = slice(i * nR, (i + 1) * nR)
        Hbar[rows, i * nX:(i + 1) * nX] = dae.H0
        Hbar[rows, (i + 1) * nX:(i + 2) * nX] = dae.H1
    Fbar = np.kron(np.eye(degree + 1), dae.F)
    return Hbar, Fbar
