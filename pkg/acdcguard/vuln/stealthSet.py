import numpy as np
from dataclasses import dataclass, fields
from ..common.errors import ConfigError
from ..common.numerics import steadyStateGain
from ..grid.gridModel import LtiModel


@dataclass(frozen=True)
class StealthSpec:
    """
    bounds an attacker has to respect to stay below the data quality alarms

    dwMin, dwMax: injected frequency bias in Hz
    aceMax: injected bias in each area control error, pu
    pdcRefMax: injected bias in the hvdc power reference, pu
    mfdLimit: frequency deviation (Hz) the attack has to cause in `area`
    anchorChannel / anchorValue: the channel the attacker surely uses and its
        value (pu or Hz); None means the smallest value that is disruptive on
        its own
    protected: channels that cannot be attacked
    horizon, stride: samples checked for the disruptiveness condition
    mode: 'bias' bounds the injected terms, 'steady' bounds the steady-state
        values the controllers read under the attack
    """
    dwMin: float = -0.1
    dwMax: float = 0.1
    aceMax: float = 0.05
    pdcRefMax: float = 0.1
    mfdLimit: float = 0.8
    anchorChannel: str = 'AcFlow12'
    anchorValue: float | None = None
    protected: tuple[str, ...] = ()
    horizon: int = 750
    stride: int = 1
    bigM: float = 10.0
    area: int = 1
    mode: str = 'bias'

    def __post_init__(self) -> None:
        object.__setattr__(self, 'protected', tuple(self.protected))
        if not self.dwMin < self.dwMax:
            raise ConfigError(f'dwMin ({self.dwMin}) has to be below dwMax ({self.dwMax})')
        if self.aceMax <= 0 or self.pdcRefMax <= 0:
            raise ConfigError('aceMax and pdcRefMax have to be positive')
        if self.mfdLimit < 0:
            raise ConfigError('mfdLimit cannot be negative')
        if self.anchorChannel in self.protected:
            raise ConfigError(f'the anchor channel {self.anchorChannel} cannot be protected')
        if self.horizon < 2 or self.stride < 1:
            raise ConfigError('the horizon needs at least two samples and the stride has to be positive')
        if self.bigM <= 0:
            raise ConfigError('bigM has to be positive')
        if self.area not in (1, 2):
            raise ConfigError(f'area has to be 1 or 2, got {self.area}')
        if self.mode not in ('bias', 'steady'):
            raise ConfigError(f"mode has to be 'bias' or 'steady', got '{self.mode}'")

    @classmethod
    def fromDict(cls, data: dict) -> 'StealthSpec':
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f'unknown stealth keys: {sorted(unknown)}')
        return cls(**data)


@dataclass
class StealthSet:
    """
    lower <= matrix f <= upper for the attack vector f in internal units
    (rad/s on frequency channels); coefficients[i] f is the frequency
    deviation in Hz that a step attack f causes at sample samples[i]
    """
    matrix: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    rowLabels: tuple[str, ...]
    coefficients: np.ndarray
    samples: np.ndarray

    @property
    def numRows(self) -> int:
        return self.matrix.shape[0]

    def contains(self, f: np.ndarray, tol: float = 1e-8) -> bool:
        values = self.matrix @ f
        return bool(np.all(values >= self.lower - tol) and np.all(values <= self.upper + tol))

    def activeRows(self, f: np.ndarray, tol: float = 1e-6) -> tuple[str, ...]:
        values = self.matrix @ f
        active = []
        for label, value, lower, upper in zip(self.rowLabels, values, self.lower, self.upper):
            if abs(value - upper) <= tol:
                active.append(f'{label} at upper bound {upper:.6g}')
            elif abs(value - lower) <= tol:
                active.append(f'{label} at lower bound {lower:.6g}')
        return tuple(active)


def stepResponseCoeffs(model: LtiModel, area: int = 1, horizon: int = 750) -> np.ndarray:
    """
    row k holds dw_area[k] in Hz for a unit step attack on each channel from k = 0,
    i.e. c (I + A + ... + A^(k-1)) Bf / (2 pi)
    """
    if horizon < 1:
        raise ValueError(f'horizon has to be at least one sample, got {horizon}')
    if not model.isDiscrete:
        raise ValueError('step response coefficients need the discrete model')
    readout = np.zeros(model.numStates)
    readout[area - 1] = 1.0 / (2 * np.pi)
    coefficients = np.zeros((horizon, model.numChannels))
    response = np.zeros((model.numStates, model.numChannels))
    for k in range(horizon):
        coefficients[k] = readout @ response
        response = model.A @ response + model.Bf
    return coefficients


def _biasRows(model: LtiModel) -> tuple[np.ndarray, tuple[str, ...]]:
    """
    how each injected bias shows up in the frequency checks, the two area
    control errors and the hvdc reference
    """
    p = model.params
    nY = model.numChannels
    rows = np.zeros((5, nY))
    rows[0, 0] = 1.0
    rows[1, 1] = 1.0
    rows[2, 0] = p.frequencyBias[0] / (2 * np.pi)
    rows[3, 1] = p.frequencyBias[1] / (2 * np.pi)
    rows[2, 2:] = 1.0
    rows[3, 2:] = -1.0
    if model.variant.hasDc:
        rows[4, :3] = (p.spmcGains[0], p.spmcGains[1], p.spmcAcGain)
    return rows, ('Freq1 bias', 'Freq2 bias', 'ACE1 bias', 'ACE2 bias', 'PdcRef bias')


def buildStealthSet(model: LtiModel, spec: StealthSpec) -> StealthSet:
    for channel in spec.protected + (spec.anchorChannel,):
        model.channelIndex(channel)

    matrix, labels = _biasRows(model)
    twoPi = 2 * np.pi
    lower = np.array([twoPi * spec.dwMin, twoPi * spec.dwMin, -spec.aceMax, -spec.aceMax, -spec.pdcRefMax])
    upper = np.array([twoPi * spec.dwMax, twoPi * spec.dwMax, spec.aceMax, spec.aceMax, spec.pdcRefMax])
    if spec.mode == 'steady':
        # what the controllers read once the attacked loop has settled
        measured = steadyStateGain(model.A, model.Bf, model.C) + np.eye(model.numChannels)
        matrix = matrix @ measured
        labels = tuple(label.replace('bias', 'steady state') for label in labels)

    samples = np.arange(1, spec.horizon, spec.stride)
    coefficients = stepResponseCoeffs(model, spec.area, spec.horizon)[samples]
    return StealthSet(matrix, lower, upper, labels, coefficients, samples)
