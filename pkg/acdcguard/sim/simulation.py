import numpy as np
from numpy.typing import ArrayLike
from ..common.fancyDict import FancyDict
from ..grid.gridModel import LtiModel, FREQUENCY_CHANNELS, DISTURBANCE_LABELS
from .scenarios import NoiseSpec


class Trajectory(FancyDict):
    """
    one row per sample. states keep internal units (rad/s for dw1, dw2),
    outputs, corrupted outputs and attacks are stored in reported units
    (Hz on frequency channels) and converted back by the properties below
    """
    def __init__(self, samplingTime: float, stateLabels: tuple[str, ...], channelLabels: tuple[str, ...],
                 inertiaWeights: tuple[float, float] = (1.0, 1.0), data: dict | None = None) -> None:
        super().__init__(data)
        self.samplingTime = samplingTime
        self.stateLabels = tuple(stateLabels)
        self.channelLabels = tuple(channelLabels)
        self.inertiaWeights = tuple(inertiaWeights)

    @property
    def _units(self) -> np.ndarray:
        return np.array([2 * np.pi if channel in FREQUENCY_CHANNELS else 1.0 for channel in self.channelLabels])

    @property
    def time(self) -> np.ndarray:
        return self['t']

    @property
    def states(self) -> np.ndarray:
        return self.stack(*self.stateLabels)

    @property
    def outputs(self) -> np.ndarray:
        return self.stack(*(f'y_{channel}' for channel in self.channelLabels)) * self._units

    @property
    def corrupted(self) -> np.ndarray:
        return self.stack(*(f'yt_{channel}' for channel in self.channelLabels)) * self._units

    @property
    def attacks(self) -> np.ndarray:
        return self.stack(*(f'f_{channel}' for channel in self.channelLabels)) * self._units

    @property
    def disturbances(self) -> np.ndarray:
        return self.stack(*(f'd_{label}' for label in DISTURBANCE_LABELS))

    def frequency(self, area: int) -> np.ndarray:
        """
        frequency deviation of area 1 or 2 in Hz
        """
        return self[f'dw{area}_hz']

    def toCsv(self, path: str) -> None:
        """
        the inertia weights go along as two constant columns so that
        fromCsv restores the center of inertia
        """
        table = FancyDict(self.data)
        for area, weight in enumerate(self.inertiaWeights, start=1):
            table[f'coi_weight{area}'] = np.full(len(self), weight)
        table.toCsv(path)

    @classmethod
    def fromCsv(cls, path: str, samplingTime: float | None = None,
                inertiaWeights: tuple[float, float] | None = None) -> 'Trajectory':
        """
        reads back what toCsv wrote; the sampling time is recovered from the time column,
        the inertia weights from the weight columns unless given
        """
        table = FancyDict.fromCsv(path)
        data = dict(table.data)
        stored = [data.pop(f'coi_weight{area}', None) for area in (1, 2)]
        if inertiaWeights is None:
            inertiaWeights = (1.0, 1.0) if any(column is None or len(column) == 0 for column in stored) \
                else tuple(float(column[0]) for column in stored)
        channels = tuple(key[3:] for key in data if key.startswith('yt_'))
        states = tuple(key for key in data if key.startswith('d') and not key.startswith('d_') and not key.endswith('_hz'))
        if samplingTime is None:
            time = data['t']
            samplingTime = float(time[1] - time[0]) if len(time) > 1 else 1.0
        return cls(samplingTime, states, channels, inertiaWeights, data=data)


def simulate(model: LtiModel, d: ArrayLike, f: ArrayLike | None = None, noise: NoiseSpec | None = None,
             mask: ArrayLike | None = None) -> Trajectory:
    """
    runs X[k+1] = A X[k] + Bd d[k] + Bf (Yt[k] - Y[k]) from X[0] = 0 with
    Y = C X and Yt = mask * Y + f (+ measurement noise).
    d is (K, 2) in pu, f is (K, nY) in internal units as genAttackSignal returns it
    """
    if not model.isDiscrete:
        raise ValueError('simulation needs the discrete model, discretize first')
    d = np.atleast_2d(np.asarray(d, dtype=float))
    horizon = d.shape[0]
    n, nY = model.numStates, model.numChannels
    f = np.zeros((horizon, nY)) if f is None else np.atleast_2d(np.asarray(f, dtype=float))
    mask = np.ones((horizon, nY)) if mask is None else np.atleast_2d(np.asarray(mask, dtype=float))
    if d.shape != (horizon, len(DISTURBANCE_LABELS)):
        raise ValueError(f'd has shape {d.shape}, expected ({horizon}, {len(DISTURBANCE_LABELS)})')
    if f.shape != (horizon, nY) or mask.shape != (horizon, nY):
        raise ValueError(f'f and mask need shape ({horizon}, {nY}), got {f.shape} and {mask.shape}')

    processNoise = np.zeros((horizon, n))
    measurementNoise = np.zeros((horizon, nY))
    if noise is not None and noise.enabled:
        rng = np.random.default_rng(noise.seed)
        processStd = np.full(n, np.sqrt(noise.otherVariance))
        processStd[:2] = 2 * np.pi * np.sqrt(noise.frequencyVariance)
        processNoise = rng.standard_normal((horizon, n)) * processStd
        measurementNoise = rng.standard_normal((horizon, nY)) * np.sqrt(noise.measurementVariance) * model.toInternal(np.ones(nY))

    A, Bd, Bf, C = model.A, model.Bd, model.Bf, model.C
    X = np.zeros((horizon, n))
    Y = np.zeros((horizon, nY))
    Yt = np.zeros((horizon, nY))
    x = np.zeros(n)
    for k in range(horizon):
        X[k] = x
        y = C @ x
        yt = mask[k] * y + f[k] + measurementNoise[k]
        Y[k] = y
        Yt[k] = yt
        x = A @ x + Bd @ d[k] + Bf @ (yt - y) + processNoise[k]

    return _assembleTrajectory(model, X, Y, Yt, d, (mask - 1.0) * Y + f)


def _assembleTrajectory(model: LtiModel, X: np.ndarray, Y: np.ndarray, Yt: np.ndarray, d: np.ndarray,
                        injected: np.ndarray) -> Trajectory:
    p = model.params
    channels = model.channelLabels
    trajectory = Trajectory(model.samplingTime, model.stateLabels, channels, p.inertiaWeights)
    external = model.toExternal

    trajectory['t'] = np.arange(X.shape[0]) * model.samplingTime
    trajectory['dw1_hz'] = X[:, 0] / (2 * np.pi)
    trajectory['dw2_hz'] = X[:, 1] / (2 * np.pi)
    for i, label in enumerate(model.stateLabels):
        trajectory[label] = X[:, i]
    for name, values in (('y', external(Y)), ('yt', external(Yt))):
        for i, channel in enumerate(channels):
            trajectory[f'{name}_{channel}'] = values[:, i]

    # controller inputs computed from what the control center receives
    omega1, omega2, acFlow = Yt[:, 0], Yt[:, 1], Yt[:, 2]
    tieFlow = acFlow + (Yt[:, 3] if model.variant.hasDc else 0.0)
    trajectory['ace1'] = p.frequencyBias[0] / (2 * np.pi) * omega1 + tieFlow
    trajectory['ace2'] = p.frequencyBias[1] / (2 * np.pi) * omega2 - tieFlow
    if model.variant.hasDc:
        trajectory['pdc_ref'] = p.spmcGains[0] * omega1 + p.spmcGains[1] * omega2 + p.spmcAcGain * acFlow
    else:
        trajectory['pdc_ref'] = np.zeros(X.shape[0])

    injectedExternal = external(injected)
    for i, channel in enumerate(channels):
        trajectory[f'f_{channel}'] = injectedExternal[:, i]
    for i, label in enumerate(DISTURBANCE_LABELS):
        trajectory[f'd_{label}'] = d[:, i]
    return trajectory
