import logging
import warnings
import numpy as np
from .dae import DaeSystem
from .rankConditions import checkIsolable
from .residualGenerator import ResidualGenerator, synthResidual
from ..common.errors import ConfigError, InfeasibleError

logger = logging.getLogger(__name__)


class DetectorBank:
    """
    one residual generator per monitored channel, each decoupled from the
    attacks on the other monitored channels. channels whose synthesis failed
    are kept in `failures` with the reason
    """
    def __init__(self, generators: dict[str, ResidualGenerator] | None = None, failures: dict[str, str] | None = None,
                 channelLabels: tuple[str, ...] = (), fingerprint: str = '') -> None:
        self.generators = dict(generators or {})
        self.failures = dict(failures or {})
        self.channelLabels = tuple(channelLabels)
        self.fingerprint = fingerprint
        for channel, generator in self.generators.items():
            assert generator.channelLabels == self.channelLabels, f'{channel} was synthesized for another channel order'

    @property
    def channels(self) -> tuple[str, ...]:
        return tuple(self.generators)

    @property
    def partial(self) -> bool:
        return bool(self.failures)

    def __len__(self) -> int:
        return len(self.generators)

    def __getitem__(self, channel: str) -> ResidualGenerator:
        return self.generators[channel]

    def reset(self) -> None:
        for generator in self.generators.values():
            generator.reset()

    def update(self, y: np.ndarray) -> np.ndarray:
        return np.array([generator.update(y) for generator in self.generators.values()])

    def run(self, Y: np.ndarray) -> np.ndarray:
        """
        (K, number of generators) residuals, one column per bank channel
        """
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        if not self.generators:
            return np.zeros((Y.shape[0], 0))
        return np.column_stack([generator.run(Y) for generator in self.generators.values()])

    def toDict(self) -> dict:
        return {'channelLabels': list(self.channelLabels),
                'fingerprint': self.fingerprint,
                'generators': [generator.toDict() for generator in self.generators.values()],
                'failures': dict(self.failures)}

    @classmethod
    def fromDict(cls, data: dict) -> 'DetectorBank':
        unknown = set(data) - {'channelLabels', 'fingerprint', 'generators', 'failures'}
        if unknown:
            raise ConfigError(f'unknown keys in the stored bank: {sorted(unknown)}')
        generators = [ResidualGenerator.fromDict(entry) for entry in data.get('generators', [])]
        return cls({generator.target: generator for generator in generators}, data.get('failures', {}),
                   tuple(data.get('channelLabels', ())), data.get('fingerprint', ''))

    def __repr__(self) -> str:
        return f'DetectorBank({list(self.generators)}, failures={list(self.failures)})'


def synthBank(dae: DaeSystem, channels: tuple[str, ...] | list[str], degree: int = 3, pole: float = 0.1,
              eta: float = 5e4) -> DetectorBank:
    """
    for each channel the attacks on the other bank channels are absorbed
    into the unknowns before the residual is synthesized
    """
    channels = tuple(channels)
    for channel in channels:
        dae.column(channel)
    if len(set(channels)) != len(channels):
        raise ConfigError(f'bank channels repeat: {channels}')

    generators, failures = {}, {}
    for channel in channels:
        if not checkIsolable(dae, channel, channels):
            failures[channel] = f'{channel} is not isolable from {[c for c in channels if c != channel]}'
            continue
        reduced = dae.absorb([other for other in channels if other != channel])
        try:
            generators[channel] = synthResidual(reduced, channel, degree, pole, eta)
        except InfeasibleError as error:
            failures[channel] = str(error)

    for channel, reason in failures.items():
        warnings.warn(f'no residual generator for {channel}: {reason}')
    logger.info('detector bank with %d of %d channels', len(generators), len(channels))
    return DetectorBank(generators, failures, dae.outputLabels, dae.fingerprint)


def runResidual(detector: ResidualGenerator | DetectorBank, Y: np.ndarray,
                channelLabels: tuple[str, ...] | None = None) -> np.ndarray:
    """
    runs a generator or a bank over a (K, nY) output record in internal units;
    channelLabels, when given, has to match the order used at synthesis
    """
    if channelLabels is not None and tuple(channelLabels) != detector.channelLabels:
        raise ConfigError(f'the stream has channels {tuple(channelLabels)}, the detector expects {detector.channelLabels}')
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if Y.shape[1] != len(detector.channelLabels):
        raise ConfigError(f'the stream has {Y.shape[1]} channels, the detector expects {len(detector.channelLabels)}')
    return detector.run(Y)


def alarmThreshold(calibration: np.ndarray, k: float = 3.0) -> np.ndarray | float:
    """
    k standard deviations of a residual recorded without attacks
    """
    calibration = np.asarray(calibration, dtype=float)
    threshold = k * np.std(calibration, axis=0)
    return float(threshold) if threshold.ndim == 0 else threshold


def alarms(residual: np.ndarray, threshold: np.ndarray | float) -> np.ndarray:
    return np.abs(np.asarray(residual, dtype=float)) > threshold
