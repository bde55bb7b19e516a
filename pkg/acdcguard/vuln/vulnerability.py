import math
import logging
import warnings
import itertools
import numpy as np
from dataclasses import dataclass, field
from .stealthSet import StealthSpec, StealthSet, buildStealthSet
from ..common.errors import ConfigError
from ..common.simplex import LinearProgram, lpSolve
from ..common.branchAndBound import MixedIntegerProgram, milpSolve
from ..grid.gridModel import LtiModel
from ..sim.impactMetrics import minDisruptiveMagnitude

logger = logging.getLogger(__name__)


@dataclass
class VulnResult:
    """
    alphaStar is the number of channels the cheapest disruptive stealthy
    attack needs, inf when there is none; attack values are in pu and Hz
    """
    alphaStar: float
    attack: dict[str, float] | None
    anchorChannel: str
    anchorValue: float
    mfdLimit: float
    sample: int | None = None
    time: float | None = None
    sign: int | None = None
    activeConstraints: tuple[str, ...] = ()
    bigM: float = 10.0
    solves: int = 0
    nodes: int = 0
    vector: np.ndarray | None = field(default=None, repr=False)

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.alphaStar)

    @property
    def l1Norm(self) -> float:
        return float(np.abs(self.vector).sum()) if self.vector is not None else math.inf

    def asDict(self) -> dict:
        return {'feasible': self.feasible,
                'alphaStar': self.alphaStar if self.feasible else None,
                'attack': self.attack,
                'anchorChannel': self.anchorChannel,
                'anchorValue': self.anchorValue,
                'mfdLimit': self.mfdLimit,
                'sample': self.sample,
                'time': self.time,
                'sign': self.sign,
                'activeConstraints': list(self.activeConstraints),
                'bigM': self.bigM,
                'solves': self.solves,
                'nodes': self.nodes}


def _anchor(model: LtiModel, spec: StealthSpec) -> tuple[int, float, list[int]]:
    anchor = model.channelIndex(spec.anchorChannel)
    protected = [model.channelIndex(channel) for channel in spec.protected]
    value = spec.anchorValue
    if value is None:
        value = minDisruptiveMagnitude(model, spec.anchorChannel, spec.mfdLimit, spec.horizon, spec.area)
    return anchor, float(value), protected


def _disruptiveGrid(stealth: StealthSet, mfdLimit: float):
    """
    (sample position, sign, row) in the order candidates are compared
    """
    if mfdLimit <= 0:
        yield None, None, None
        return
    for position, row in enumerate(stealth.coefficients):
        for sign in (1, -1):
            yield position, sign, sign * row


def _result(model: LtiModel, spec: StealthSpec, stealth: StealthSet, anchorValue: float, f: np.ndarray | None,
            position: int | None, sign: int | None, alpha: float, bigM: float, solves: int, nodes: int) -> VulnResult:
    result = VulnResult(alphaStar=alpha, attack=None, anchorChannel=spec.anchorChannel, anchorValue=anchorValue,
                        mfdLimit=spec.mfdLimit, bigM=bigM, solves=solves, nodes=nodes)
    if f is None:
        return result
    external = model.toExternal(f)
    result.attack = {channel: float(value) for channel, value in zip(model.channelLabels, external)}
    result.vector = f
    result.activeConstraints = stealth.activeRows(f)
    if position is not None:
        result.sample = int(stealth.samples[position])
        result.time = result.sample * model.samplingTime
        result.sign = sign
        result.activeConstraints += ('disruptiveness',) if abs(sign * stealth.coefficients[position] @ f - spec.mfdLimit) <= 1e-6 else ()
    return result


def _cardinalityProgram(stealth: StealthSet, nY: int, anchor: int, anchorValue: float, protected: list[int],
                        bigM: float, disruptive: np.ndarray | None, mfdLimit: float) -> MixedIntegerProgram:
    """
    variables [f, z, t]: min sum z + w sum t with |f| <= M z, |f| <= t
    """
    I, Z = np.eye(nY), np.zeros((nY, nY))
    weight = 0.5 / (nY * bigM)
    objective = np.concatenate([np.zeros(nY), np.ones(nY), np.full(nY, weight)])

    rows = [np.hstack([stealth.matrix, np.zeros((stealth.numRows, 2 * nY))]),
            np.hstack([I, -bigM * I, Z]),
            np.hstack([-I, -bigM * I, Z]),
            np.hstack([-I, Z, I]),
            np.hstack([I, Z, I])]
    lower = [stealth.lower, np.full(2 * nY, -np.inf), np.zeros(2 * nY)]
    upper = [stealth.upper, np.zeros(2 * nY), np.full(2 * nY, np.inf)]
    if disruptive is not None:
        rows.append(np.concatenate([disruptive, np.zeros(2 * nY)])[None, :])
        lower.append([mfdLimit])
        upper.append([np.inf])

    lowerBounds = np.concatenate([np.full(nY, -np.inf), np.zeros(2 * nY)])
    upperBounds = np.concatenate([np.full(nY, np.inf), np.ones(nY), np.full(nY, np.inf)])
    lowerBounds[anchor] = upperBounds[anchor] = anchorValue
    for j in protected:
        lowerBounds[j] = upperBounds[j] = 0.0
        upperBounds[nY + j] = 0.0

    base = LinearProgram(objective, 'min', inequalityMatrix=np.vstack(rows), inequalityLower=np.concatenate(lower),
                         inequalityUpper=np.concatenate(upper), lowerBounds=lowerBounds, upperBounds=upperBounds)
    return MixedIntegerProgram(base, tuple(range(nY, 2 * nY)))


def _solveCardinality(model: LtiModel, spec: StealthSpec, stealth: StealthSet, anchor: int, anchorValue: float,
                      protected: list[int], bigM: float) -> tuple:
    nY = model.numChannels
    best, bestObjective = None, None
    solves = nodes = 0
    for position, sign, disruptive in _disruptiveGrid(stealth, spec.mfdLimit):
        program = _cardinalityProgram(stealth, nY, anchor, anchorValue, protected, bigM, disruptive, spec.mfdLimit)
        solution = milpSolve(program, cutoff=bestObjective)
        solves += 1
        nodes += solution.nodes
        if solution.optimal:
            best, bestObjective = (solution.x, position, sign), solution.objective
            logger.debug('sample %s sign %s: objective %.6f', position, sign, bestObjective)
    return best, solves, nodes


def findDisruptiveStealthy(model: LtiModel, spec: StealthSpec, stealth: StealthSet | None = None) -> VulnResult:
    """
    minimum number of channels a disruptive stealthy attack needs.

    for every sample on the grid and both signs of the frequency deviation a
    small milp with one binary per channel is solved; a running incumbent
    prunes the later ones. ties in the channel count go to the smaller l1
    norm, then to the earlier sample
    """
    stealth = buildStealthSet(model, spec) if stealth is None else stealth
    anchor, anchorValue, protected = _anchor(model, spec)
    nY = model.numChannels
    if not math.isfinite(anchorValue):
        return _result(model, spec, stealth, anchorValue, None, None, None, math.inf, spec.bigM, 0, 0)
    anchorInternal = float(model.toInternal(np.eye(nY)[anchor])[anchor] * anchorValue)

    bigM = spec.bigM
    if abs(anchorInternal) >= bigM:
        bigM = 10.0 * abs(anchorInternal)
        warnings.warn(f'bigM {spec.bigM} is below the anchor value, using {bigM}')

    totalSolves = totalNodes = 0
    for attempt in range(2):
        best, solves, nodes = _solveCardinality(model, spec, stealth, anchor, anchorInternal, protected, bigM)
        totalSolves += solves
        totalNodes += nodes
        if best is None or np.max(np.abs(best[0][:nY])) < bigM * (1 - 1e-6) or attempt == 1:
            break
        warnings.warn(f'attack values bind at bigM = {bigM}, solving again with {10 * bigM}')
        bigM *= 10.0

    if best is None:
        logger.info('no disruptive stealthy attack anchored on %s', spec.anchorChannel)
        return _result(model, spec, stealth, anchorValue, None, None, None, math.inf, bigM, totalSolves, totalNodes)

    x, position, sign = best
    z = np.round(x[nY:2 * nY])
    f = np.where((z > 0.5) & (np.abs(x[:nY]) > 1e-9), x[:nY], 0.0)
    alpha = int(np.count_nonzero(f))
    return _result(model, spec, stealth, anchorValue, f, position, sign, alpha, bigM, totalSolves, totalNodes)


def _supportProgram(stealth: StealthSet, support: tuple[int, ...], anchorPosition: int | None, anchorValue: float,
                    disruptive: np.ndarray | None, mfdLimit: float) -> LinearProgram:
    """
    variables [f_support, t]: min sum t with |f| <= t
    """
    size = len(support)
    I, Z = np.eye(size), np.zeros((stealth.numRows, size))
    rows = [np.hstack([stealth.matrix[:, support], Z]), np.hstack([-I, I]), np.hstack([I, I])]
    lower = [stealth.lower, np.zeros(2 * size)]
    upper = [stealth.upper, np.full(2 * size, np.inf)]
    if disruptive is not None:
        rows.append(np.concatenate([disruptive[list(support)], np.zeros(size)])[None, :])
        lower.append([mfdLimit])
        upper.append([np.inf])
    lowerBounds = np.concatenate([np.full(size, -np.inf), np.zeros(size)])
    upperBounds = np.full(2 * size, np.inf)
    if anchorPosition is not None:
        lowerBounds[anchorPosition] = upperBounds[anchorPosition] = anchorValue
    return LinearProgram(np.concatenate([np.zeros(size), np.ones(size)]), 'min', inequalityMatrix=np.vstack(rows),
                         inequalityLower=np.concatenate(lower), inequalityUpper=np.concatenate(upper),
                         lowerBounds=lowerBounds, upperBounds=upperBounds)


def enumerateOracle(model: LtiModel, spec: StealthSpec, stealth: StealthSet | None = None) -> VulnResult:
    """
    brute force over every support pattern, smallest supports first, with one
    lp per support, sample and sign
    """
    nY = model.numChannels
    if nY > 8:
        raise ConfigError(f'support enumeration is limited to 8 channels, the model has {nY}')
    stealth = buildStealthSet(model, spec) if stealth is None else stealth
    anchor, anchorValue, protected = _anchor(model, spec)
    if not math.isfinite(anchorValue):
        return _result(model, spec, stealth, anchorValue, None, None, None, math.inf, spec.bigM, 0, 0)
    anchorInternal = float(model.toInternal(np.eye(nY)[anchor])[anchor] * anchorValue)
    allowed = [c for c in range(nY) if c not in protected]

    solves = 0
    for size in range(len(allowed) + 1):
        best = None
        for support in itertools.combinations(allowed, size):
            if anchorInternal != 0 and anchor not in support:
                continue
            anchorPosition = support.index(anchor) if anchor in support else None
            for position, sign, disruptive in _disruptiveGrid(stealth, spec.mfdLimit):
                if size == 0:
                    if disruptive is None:
                        best = (0.0, np.zeros(nY), position, sign)
                    continue
                solution = lpSolve(_supportProgram(stealth, support, anchorPosition, anchorInternal, disruptive, spec.mfdLimit))
                solves += 1
                if not solution.optimal:
                    continue
                f = np.zeros(nY)
                f[list(support)] = solution.x[:size]
                if best is None or solution.objective < best[0] - 1e-9 * max(1.0, best[0]):
                    best = (solution.objective, f, position, sign)
        if best is not None:
            _, f, position, sign = best
            alpha = int(np.sum(np.abs(f) > 1e-9))
            return _result(model, spec, stealth, anchorValue, f, position, sign, alpha, spec.bigM, solves, 0)
    return _result(model, spec, stealth, anchorValue, None, None, None, math.inf, spec.bigM, solves, 0)
