import numpy as np
from dataclasses import dataclass, fields
from ..common.errors import ConfigError

ATTACK_SHAPES = ('step', 'pulse', 'ramp', 'scaling', 'random')


def _fromDict(cls, data: dict, what: str, **extra):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f'unknown {what} keys: {sorted(unknown)}')
    return cls(**data, **extra)


@dataclass(frozen=True)
class LoadProfile:
    """
    kind 'step': magnitude (pu) added to the load of `area` from `onset` seconds on
    kind 'stochastic': per-area mean reverting loads, rates in 1/s, volatilities in pu/sqrt(s)
    kind 'none': no load change
    """
    kind: str = 'step'
    area: int = 1
    magnitude: float = 0.03
    onset: float = 5.0
    rates: tuple[float, float] = (0.5, 0.5)
    volatilities: tuple[float, float] = (0.01, 0.01)
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, 'rates', tuple(float(r) for r in self.rates))
        object.__setattr__(self, 'volatilities', tuple(float(v) for v in self.volatilities))
        if self.kind not in ('step', 'stochastic', 'none'):
            raise ConfigError(f"load kind has to be 'step', 'stochastic' or 'none', got '{self.kind}'")
        if self.area not in (1, 2):
            raise ConfigError(f'load area has to be 1 or 2, got {self.area}')
        if not np.isfinite(self.magnitude) or self.onset < 0:
            raise ConfigError('load magnitude has to be finite and the onset non-negative')
        if len(self.rates) != 2 or len(self.volatilities) != 2:
            raise ConfigError('rates and volatilities need one value per area')
        if min(self.rates) < 0 or min(self.volatilities) < 0:
            raise ConfigError('mean reversion rates and volatilities cannot be negative')

    @classmethod
    def fromDict(cls, data: dict) -> 'LoadProfile':
        return _fromDict(cls, data, 'load profile')


@dataclass(frozen=True)
class AttackEntry:
    channel: str
    magnitude: float


@dataclass(frozen=True)
class AttackScenario:
    """
    magnitudes are in pu for flows and Hz for frequencies; for the scaling
    shape the magnitude is the multiplier applied to the true output.
    onset is a sample index, duration a number of samples, the ramp grows
    by |slope| per sample towards the entry magnitude and stops there;
    random draws gaussian samples around the magnitude with standard
    deviation std
    """
    entries: tuple[AttackEntry, ...] = ()
    onset: int = 0
    shape: str = 'step'
    duration: int = 1
    slope: float = 0.0
    std: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        entries = tuple(entry if isinstance(entry, AttackEntry) else AttackEntry(*entry) for entry in self.entries)
        object.__setattr__(self, 'entries', entries)
        channels = [entry.channel for entry in entries]
        if len(set(channels)) != len(channels):
            raise ConfigError(f'attack channels have to be unique, got {channels}')
        if self.shape not in ATTACK_SHAPES:
            raise ConfigError(f"unknown attack shape '{self.shape}', choose from {ATTACK_SHAPES}")
        if self.onset < 0:
            raise ConfigError('attack onset has to be a non-negative sample index')
        if self.shape == 'pulse' and self.duration < 1:
            raise ConfigError('pulse duration has to be at least one sample')
        if self.std < 0:
            raise ConfigError('random attack std cannot be negative')

    @property
    def channels(self) -> tuple[str, ...]:
        return tuple(entry.channel for entry in self.entries)

    @classmethod
    def fromDict(cls, data: dict) -> 'AttackScenario':
        data = dict(data)
        entries = data.pop('entries', [])
        if isinstance(entries, dict):
            entries = list(entries.items())
        entries = tuple(AttackEntry(str(channel), float(magnitude)) for channel, magnitude in entries)
        return _fromDict(cls, data, 'attack scenario', entries=entries)

    def asDict(self) -> dict:
        data = {f.name: getattr(self, f.name) for f in fields(self) if f.name != 'entries'}
        data['entries'] = {entry.channel: entry.magnitude for entry in self.entries}
        return data


@dataclass(frozen=True)
class NoiseSpec:
    """
    gaussian noise per sample: process noise on the states (frequency states
    get frequencyVariance in Hz^2, converted to rad/s) and optional
    measurement noise on every channel
    """
    enabled: bool = False
    frequencyVariance: float = 0.0009
    otherVariance: float = 0.03
    measurementVariance: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if min(self.frequencyVariance, self.otherVariance, self.measurementVariance) < 0:
            raise ConfigError('noise variances cannot be negative')

    @classmethod
    def fromDict(cls, data: dict) -> 'NoiseSpec':
        return _fromDict(cls, data, 'noise')


def genLoadProfile(profile: LoadProfile, horizon: int, samplingTime: float) -> np.ndarray:
    """
    returns d with shape (horizon, 2), one column per area
    """
    if horizon < 1:
        raise ValueError(f'horizon has to be at least one sample, got {horizon}')
    d = np.zeros((horizon, 2))
    if profile.kind == 'step':
        onset = int(round(profile.onset / samplingTime))
        d[onset:, profile.area - 1] = profile.magnitude
    elif profile.kind == 'stochastic':
        rng = np.random.default_rng(profile.seed)
        rates = np.array(profile.rates)
        volatilities = np.array(profile.volatilities)
        shocks = rng.standard_normal((horizon, 2))
        for k in range(1, horizon):
            d[k] = d[k - 1] - rates * d[k - 1] * samplingTime + volatilities * np.sqrt(samplingTime) * shocks[k]
    return d


def _waveform(scenario: AttackScenario, magnitude: float, horizon: int, rng: np.random.Generator) -> np.ndarray:
    signal = np.zeros(horizon)
    start = min(scenario.onset, horizon)
    active = np.arange(horizon - start)
    if scenario.shape == 'step':
        signal[start:] = magnitude
    elif scenario.shape == 'pulse':
        signal[start:start + scenario.duration] = magnitude
    elif scenario.shape == 'ramp':
        # the sign of the slope is ignored, the ramp heads for the magnitude
        signal[start:] = np.sign(magnitude) * np.minimum(abs(scenario.slope) * (active + 1), abs(magnitude))
    elif scenario.shape == 'random':
        signal[start:] = magnitude + scenario.std * rng.standard_normal(active.size)
    return signal


def genAttackSignal(scenarios: AttackScenario | list[AttackScenario], horizon: int,
                    channels: tuple[str, ...], frequencyChannels: tuple[str, ...] = ('Freq1', 'Freq2')
                    ) -> tuple[np.ndarray, np.ndarray]:
    """
    returns (f, mask), both (horizon, len(channels)); f holds the additive
    bias in internal units (rad/s on frequency channels), mask the
    multiplicative factor on the true output (1 where no scaling attack acts)
    """
    if isinstance(scenarios, AttackScenario):
        scenarios = [scenarios]
    f = np.zeros((horizon, len(channels)))
    mask = np.ones((horizon, len(channels)))
    scaled, additive = set(), set()

    for scenario in scenarios:
        rng = np.random.default_rng(scenario.seed)
        for entry in scenario.entries:
            if entry.channel not in channels:
                raise ConfigError(f"attack on unknown channel '{entry.channel}', the model has {channels}")
            column = channels.index(entry.channel)
            if scenario.shape == 'scaling':
                scaled.add(entry.channel)
                mask[scenario.onset:, column] *= entry.magnitude
                continue
            additive.add(entry.channel)
            unit = 2 * np.pi if entry.channel in frequencyChannels else 1.0
            f[:, column] += unit * _waveform(scenario, entry.magnitude, horizon, rng)

    clash = scaled & additive
    if clash:
        raise ConfigError(f'channels {sorted(clash)} are both scaled and additively attacked')
    return f, mask
