import logging
import numpy as np
from numpy.typing import ArrayLike
from dataclasses import dataclass, field, replace
from .errors import NumericalError

logger = logging.getLogger(__name__)


def _asRows(matrix: ArrayLike | None, numVariables: int, name: str) -> np.ndarray:
    if matrix is None:
        return np.zeros((0, numVariables))
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.shape[1] != numVariables:
        raise ValueError(f'{name} has {matrix.shape[1]} columns, the program has {numVariables} variables')
    return matrix


def _asVector(vector: ArrayLike | None, length: int, default: float, name: str) -> np.ndarray:
    if vector is None:
        return np.full(length, default)
    vector = np.asarray(vector, dtype=float).ravel()
    if vector.shape != (length,):
        raise ValueError(f'{name} has length {vector.size}, expected {length}')
    return vector


@dataclass
class LinearProgram:
    """
    min/max c x
    s.t. equalityMatrix x = equalityRhs
         inequalityLower <= inequalityMatrix x <= inequalityUpper
         lowerBounds <= x <= upperBounds

    missing inequality sides default to -inf/+inf, variable bounds default to
    [0, inf) like most lp codes do
    """
    objective: np.ndarray
    sense: str = 'min'
    equalityMatrix: np.ndarray | None = None
    equalityRhs: np.ndarray | None = None
    inequalityMatrix: np.ndarray | None = None
    inequalityLower: np.ndarray | None = None
    inequalityUpper: np.ndarray | None = None
    lowerBounds: np.ndarray | None = None
    upperBounds: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        n = self.objective.size
        if n < 1:
            raise ValueError('a linear program needs at least one variable')
        if self.sense not in ('min', 'max'):
            raise ValueError(f"sense has to be 'min' or 'max', got {self.sense}")

        self.equalityMatrix = _asRows(self.equalityMatrix, n, 'equality matrix')
        self.equalityRhs = _asVector(self.equalityRhs, self.equalityMatrix.shape[0], 0.0, 'equality rhs')
        self.inequalityMatrix = _asRows(self.inequalityMatrix, n, 'inequality matrix')
        numRows = self.inequalityMatrix.shape[0]
        self.inequalityLower = _asVector(self.inequalityLower, numRows, -np.inf, 'inequality lower rhs')
        self.inequalityUpper = _asVector(self.inequalityUpper, numRows, np.inf, 'inequality upper rhs')
        self.lowerBounds = _asVector(self.lowerBounds, n, 0.0, 'lower bounds')
        self.upperBounds = _asVector(self.upperBounds, n, np.inf, 'upper bounds')

        if np.any(self.inequalityLower > self.inequalityUpper):
            raise ValueError('inequality lower rhs exceeds upper rhs')
        if np.any(self.lowerBounds > self.upperBounds):
            raise ValueError('variable lower bound exceeds upper bound')
        if np.any(np.isnan(self.objective)) or not np.all(np.isfinite(self.equalityRhs)):
            raise ValueError('objective and equality rhs have to be finite')

    @property
    def numVariables(self) -> int:
        return self.objective.size

    def withBounds(self, lowerBounds: np.ndarray, upperBounds: np.ndarray) -> 'LinearProgram':
        return replace(self, lowerBounds=lowerBounds.copy(), upperBounds=upperBounds.copy())


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == 'optimal'


@dataclass
class _StandardForm:
    """
    min c y s.t. A y = b, y >= 0 together with x = mapping y + offset
    """
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    mapping: np.ndarray
    offset: np.ndarray
    numStructural: int = field(default=0)


def _standardForm(program: LinearProgram) -> _StandardForm:
    n = program.numVariables
    mappingColumns, offset = [], np.zeros(n)
    boundRows = []
    for j, (lower, upper) in enumerate(zip(program.lowerBounds, program.upperBounds)):
        unit = np.zeros(n)
        unit[j] = 1.0
        if np.isfinite(lower) and lower == upper:
            offset[j] = lower
        elif np.isfinite(lower):
            offset[j] = lower
            mappingColumns.append(unit)
            if np.isfinite(upper):
                boundRows.append((len(mappingColumns) - 1, upper - lower))
        elif np.isfinite(upper):
            offset[j] = upper
            mappingColumns.append(-unit)
        else:
            mappingColumns.append(unit)
            mappingColumns.append(-unit)

    mapping = np.column_stack(mappingColumns) if mappingColumns else np.zeros((n, 0))
    numStructural = mapping.shape[1]

    # each row: coefficients over y, slack sign (0 for none), rhs
    rows = []
    for a, rhs in zip(program.equalityMatrix, program.equalityRhs):
        rows.append((a @ mapping, 0.0, rhs - a @ offset))
    for a, lower, upper in zip(program.inequalityMatrix, program.inequalityLower, program.inequalityUpper):
        shift = a @ offset
        if np.isfinite(lower) and lower == upper:
            rows.append((a @ mapping, 0.0, lower - shift))
            continue
        if np.isfinite(upper):
            rows.append((a @ mapping, 1.0, upper - shift))
        if np.isfinite(lower):
            rows.append((a @ mapping, -1.0, lower - shift))
    for column, width in boundRows:
        coefficients = np.zeros(numStructural)
        coefficients[column] = 1.0
        rows.append((coefficients, 1.0, width))

    slackColumns = [i for i, (_, sign, _) in enumerate(rows) if sign != 0.0]
    numColumns = numStructural + len(slackColumns)
    A = np.zeros((len(rows), numColumns))
    b = np.zeros(len(rows))
    for i, (coefficients, sign, rhs) in enumerate(rows):
        A[i, :numStructural] = coefficients
        b[i] = rhs
    for k, i in enumerate(slackColumns):
        A[i, numStructural + k] = rows[i][1]

    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1

    cost = program.objective if program.sense == 'min' else -program.objective
    c = np.zeros(numColumns)
    c[:numStructural] = cost @ mapping
    return _StandardForm(A, b, c, mapping, offset, numStructural)


def _pivot(tableau: np.ndarray, row: int, column: int) -> None:
    pivotRow = tableau[row] / tableau[row, column]
    tableau -= np.outer(tableau[:, column], pivotRow)
    tableau[row] = pivotRow


def _iterate(tableau: np.ndarray, basis: np.ndarray, tol: float, maxIterations: int) -> tuple[str, int]:
    """
    dantzig pricing, switching to bland's rule after a run of degenerate pivots
    the last tableau row holds the reduced costs and minus the objective
    """
    m = tableau.shape[0] - 1
    bland = False
    degenerate = 0
    for iteration in range(maxIterations):
        costs = tableau[m, :-1]
        candidates = np.flatnonzero(costs < -tol)
        if candidates.size == 0:
            return 'optimal', iteration
        column = candidates[0] if bland else candidates[np.argmin(costs[candidates])]

        entries = tableau[:m, column]
        rows = np.flatnonzero(entries > tol)
        if rows.size == 0:
            return 'unbounded', iteration
        ratios = tableau[rows, -1] / entries[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol]
        row = ties[np.argmin(basis[ties])] if bland else ties[np.argmax(entries[ties])]

        degenerate = degenerate + 1 if best <= tol else 0
        if degenerate > 50 and not bland:
            logger.debug('switching to blands rule after %d degenerate pivots', degenerate)
            bland = True

        _pivot(tableau, row, column)
        basis[row] = column
    raise NumericalError(f'simplex did not terminate within {maxIterations} pivots')


def lpSolve(program: LinearProgram, tol: float = 1e-9, maxIterations: int | None = None) -> LpResult:
    """
    two-phase dense tableau simplex

    status is 'optimal', 'infeasible' or 'unbounded'; on 'optimal' x and
    objective refer to the program as it was stated (including its sense)
    """
    standard = _standardForm(program)
    A, b, c = standard.A, standard.b, standard.c
    m, numColumns = A.shape
    if maxIterations is None:
        maxIterations = 50 * (m + numColumns) + 100

    # phase one, one artificial per row
    tableau = np.zeros((m + 1, numColumns + m + 1))
    tableau[:m, :numColumns] = A
    tableau[:m, numColumns:numColumns + m] = np.eye(m)
    tableau[:m, -1] = b
    tableau[m, :numColumns] = -A.sum(axis=0)
    tableau[m, -1] = -b.sum()
    basis = np.arange(numColumns, numColumns + m)

    _, iterationsOne = _iterate(tableau, basis, tol, maxIterations)
    infeasibility = -tableau[m, -1]
    if infeasibility > tol * max(1.0, np.abs(b).max(initial=0.0)) * 10:
        logger.debug('phase one ended with infeasibility %.3e', infeasibility)
        return LpResult('infeasible', iterations=iterationsOne)

    # drive remaining artificials out of the basis or drop their rows
    keep = np.ones(m, dtype=bool)
    for row in range(m):
        if basis[row] < numColumns:
            continue
        magnitudes = np.abs(tableau[row, :numColumns])
        if magnitudes.size and magnitudes.max() > tol:
            column = int(np.argmax(magnitudes))
            _pivot(tableau, row, column)
            basis[row] = column
        else:
            keep[row] = False

    phaseTwo = np.zeros((keep.sum() + 1, numColumns + 1))
    phaseTwo[:-1, :numColumns] = tableau[:m][keep, :numColumns]
    phaseTwo[:-1, -1] = tableau[:m][keep, -1]
    basis = basis[keep]
    phaseTwo[-1, :numColumns] = c
    for row, column in enumerate(basis):
        phaseTwo[-1] -= c[column] * phaseTwo[row]

    status, iterationsTwo = _iterate(phaseTwo, basis, tol, maxIterations)
    iterations = iterationsOne + iterationsTwo
    if status == 'unbounded':
        return LpResult('unbounded', iterations=iterations)

    y = np.zeros(numColumns)
    y[basis] = phaseTwo[:-1, -1]
    x = standard.mapping @ y[:standard.numStructural] + standard.offset
    return LpResult('optimal', x, float(program.objective @ x), iterations)
