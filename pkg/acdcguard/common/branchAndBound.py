import logging
import math
import numpy as np
from dataclasses import dataclass
from .simplex import LinearProgram, lpSolve
from .errors import NumericalError

logger = logging.getLogger(__name__)


@dataclass
class MixedIntegerProgram:
    """
    a linear program where the variables listed in integerIndices are binary
    """
    base: LinearProgram
    integerIndices: tuple[int, ...]

    def __post_init__(self) -> None:
        self.integerIndices = tuple(sorted(int(i) for i in self.integerIndices))
        n = self.base.numVariables
        for index in self.integerIndices:
            if not 0 <= index < n:
                raise ValueError(f'integer index {index} is not a variable index (program has {n} variables)')
        if len(set(self.integerIndices)) != len(self.integerIndices):
            raise ValueError('integer indices have to be unique')


@dataclass
class MilpResult:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    nodes: int = 0
    lpIterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == 'optimal'


def milpSolve(program: MixedIntegerProgram, cutoff: float | None = None, maxNodes: int = 100000,
              integralityTol: float = 1e-6, tol: float = 1e-9) -> MilpResult:
    """
    depth-first branch and bound over binary variables

    the node stack branches on the lowest-index fractional binary and explores
    the 0 branch before the 1 branch. passing a cutoff (in the program's own
    sense) prunes every node that cannot beat it, a result of 'infeasible'
    then means nothing better than the cutoff exists
    """
    base = program.base
    sign = 1.0 if base.sense == 'min' else -1.0
    lower = base.lowerBounds.copy()
    upper = base.upperBounds.copy()
    binaries = np.array(program.integerIndices, dtype=int)
    lower[binaries] = np.maximum(lower[binaries], 0.0)
    upper[binaries] = np.minimum(upper[binaries], 1.0)

    incumbent = math.inf if cutoff is None else sign * cutoff
    bestX = None
    nodes = 0
    iterations = 0
    stack = [(lower, upper)]
    while stack:
        if nodes >= maxNodes:
            raise NumericalError(f'branch and bound exceeded {maxNodes} nodes')
        nodeLower, nodeUpper = stack.pop()
        nodes += 1
        if np.any(nodeLower > nodeUpper):
            continue

        relaxation = lpSolve(base.withBounds(nodeLower, nodeUpper), tol=tol)
        iterations += relaxation.iterations
        if relaxation.status == 'unbounded':
            if nodes == 1:
                return MilpResult('unbounded', nodes=nodes, lpIterations=iterations)
            continue
        if not relaxation.optimal:
            continue
        bound = sign * relaxation.objective
        if bound >= incumbent - tol * max(1.0, abs(incumbent)):
            continue

        values = relaxation.x[binaries]
        fractional = np.flatnonzero(np.abs(values - np.round(values)) > integralityTol)
        if fractional.size == 0:
            incumbent = bound
            bestX = relaxation.x.copy()
            bestX[binaries] = np.round(values)
            logger.debug('node %d: new incumbent %.6g', nodes, bound)
            continue

        branchOn = binaries[fractional[0]]
        oneLower, oneUpper = nodeLower.copy(), nodeUpper.copy()
        oneLower[branchOn] = 1.0
        zeroLower, zeroUpper = nodeLower.copy(), nodeUpper.copy()
        zeroUpper[branchOn] = 0.0
        # lifo, so the 0 branch is explored first
        stack.append((oneLower, oneUpper))
        stack.append((zeroLower, zeroUpper))

    logger.debug('branch and bound finished after %d nodes', nodes)
    if bestX is None:
        return MilpResult('infeasible', nodes=nodes, lpIterations=iterations)
    return MilpResult('optimal', bestX, float(base.objective @ bestX), nodes, iterations)
