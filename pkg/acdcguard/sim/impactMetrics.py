import math
import logging
import warnings
import numpy as np
from dataclasses import dataclass, asdict
from .simulation import Trajectory, simulate
from ..grid.gridModel import LtiModel

logger = logging.getLogger(__name__)


@dataclass
class ImpactMetrics:
    """
    frequencies in Hz, signed; times in seconds
    """
    mfd: tuple[float, float]
    mfdTime: tuple[float, float]
    ssfd: tuple[float, float]
    peakAce: tuple[float, float]
    peakPdcRef: float
    coiMfd: float
    coiMfdTime: float

    def asDict(self) -> dict:
        return {key: list(value) if isinstance(value, tuple) else value for key, value in asdict(self).items()}


def _extremum(values: np.ndarray, time: np.ndarray) -> tuple[float, float]:
    index = int(np.argmax(np.abs(values)))
    return float(values[index]), float(time[index])


def computeMetrics(trajectory: Trajectory, start: float | None = None, stop: float | None = None,
                   tailFraction: float = 0.05) -> ImpactMetrics:
    """
    mfd is the signed largest deviation inside [start, stop], ssfd the mean
    over the last tailFraction of that window. the center of inertia
    frequency weighs both areas with 2H = T_p / K_p
    """
    if len(trajectory) == 0:
        raise ValueError('empty trajectory')
    conditions = []
    half = 0.5 * trajectory.samplingTime
    if start is not None:
        conditions.append(f't >= {float(start - half)!r}')
    if stop is not None:
        conditions.append(f't <= {float(stop + half)!r}')
    window = trajectory.where(*conditions)
    if len(window) == 0:
        raise ValueError(f'window [{start}, {stop}] lies outside the trajectory')

    time = window['t']
    tail = max(1, int(math.ceil(tailFraction * len(window))))
    mfd, mfdTime, ssfd, peakAce = [], [], [], []
    for area in (1, 2):
        frequency = window.frequency(area)
        value, when = _extremum(frequency, time)
        mfd.append(value)
        mfdTime.append(when)
        ssfd.append(float(np.mean(frequency[-tail:])))
        peakAce.append(float(np.max(np.abs(window[f'ace{area}']))))

    weights = np.asarray(trajectory.inertiaWeights, dtype=float)
    centerOfInertia = (weights[0] * window.frequency(1) + weights[1] * window.frequency(2)) / weights.sum()
    coiMfd, coiMfdTime = _extremum(centerOfInertia, time)

    return ImpactMetrics(mfd=tuple(mfd), mfdTime=tuple(mfdTime), ssfd=tuple(ssfd), peakAce=tuple(peakAce),
                         peakPdcRef=float(np.max(np.abs(window['pdc_ref']))), coiMfd=coiMfd, coiMfdTime=coiMfdTime)


def unitStepPeak(model: LtiModel, channel: str, horizon: int, area: int = 1) -> float:
    """
    largest |dw_area| in Hz under a unit step bias (1 Hz or 1 pu) from k = 0
    """
    column = model.channelIndex(channel)
    f = np.zeros((horizon, model.numChannels))
    f[:, column] = model.toInternal(np.eye(model.numChannels)[column])[column]
    trajectory = simulate(model, np.zeros((horizon, 2)), f)
    return float(np.max(np.abs(trajectory.frequency(area))))


def minDisruptiveMagnitude(model: LtiModel, channel: str, mfdLimit: float = 0.8, horizon: int = 750,
                           area: int = 1, tol: float = 1e-4, crossCheck: bool = False) -> float:
    """
    smallest step bias on `channel` whose |mfd| reaches mfdLimit.
    the response is linear in the magnitude so one unit simulation settles it,
    crossCheck additionally bisects on full simulations. returns inf (with a
    warning) when the channel does not move the frequency at all
    """
    if mfdLimit <= 0:
        return 0.0
    peak = unitStepPeak(model, channel, horizon, area)
    if peak == 0.0:
        warnings.warn(f'{channel} does not affect the frequency of area {area}, it is not disruptive at any magnitude')
        return math.inf
    magnitude = mfdLimit / peak

    if crossCheck:
        column = model.channelIndex(channel)
        unit = model.toInternal(np.eye(model.numChannels)[column])
        low, high = 0.0, 2.0 * magnitude
        while high - low > tol:
            middle = 0.5 * (low + high)
            f = np.tile(middle * unit, (horizon, 1))
            reached = np.max(np.abs(simulate(model, np.zeros((horizon, 2)), f).frequency(area)))
            low, high = (low, middle) if reached >= mfdLimit else (middle, high)
        assert abs(high - magnitude) <= tol, f'bisection ({high}) disagrees with linear scaling ({magnitude})'
        logger.debug('bisection on %s agrees with linear scaling: %.6f vs %.6f', channel, high, magnitude)
    return magnitude


def impactSweep(model: LtiModel, channel: str, magnitudes: np.ndarray, horizon: int = 750, area: int = 1) -> np.ndarray:
    """
    signed mfd of area `area` for a step bias of each magnitude from k = 0
    """
    column = model.channelIndex(channel)
    unit = model.toInternal(np.eye(model.numChannels)[column])
    values = []
    for magnitude in np.asarray(magnitudes, dtype=float):
        f = np.tile(magnitude * unit, (horizon, 1))
        trajectory = simulate(model, np.zeros((horizon, 2)), f)
        values.append(_extremum(trajectory.frequency(area), trajectory.time)[0])
    return np.array(values)
