import logging
import numpy as np
from math import comb
from .dae import DaeSystem, stackToeplitz
from ..common.errors import ConfigError, DegreeTooLowError, InfeasibleError
from ..common.numerics import leftNullspace
from ..common.simplex import LinearProgram, lpSolve
from ..grid.gridModel import FREQUENCY_CHANNELS

logger = logging.getLogger(__name__)


class ResidualGenerator:
    """
    r = a(q)^-1 N(q) L y with a(q) = (q - p)^d / (1 - p)^d, run as the causal
    recursion

        r[k] = (1 - p)^d sum_b P_b y[k - d + b] - sum_{m >= 1} c_m r[k - m]

    where P_b = N_b L and c_m = binom(d, m) (-p)^m. y comes in internal units
    (rad/s on frequency channels), r is reported in Hz or pu like the attack
    on the target channel it tracks
    """
    def __init__(self, target: str, coefficients: np.ndarray, pole: float, numStates: int,
                 channelLabels: tuple[str, ...], gamma: float = 0.0, eta: float = 0.0, fingerprint: str = '') -> None:
        self.target = target
        self.coefficients = np.atleast_2d(np.asarray(coefficients, dtype=float))
        self.degree = self.coefficients.shape[0] - 1
        self.pole = float(pole)
        self.numStates = int(numStates)
        self.channelLabels = tuple(channelLabels)
        self.gamma = float(gamma)
        self.eta = float(eta)
        self.fingerprint = fingerprint
        assert self.degree >= 1, 'a residual generator needs a polynomial of degree one or more'
        assert abs(self.pole) < 1, f'pole {self.pole} lies outside the unit circle'
        assert self.coefficients.shape[1] == self.numStates + len(self.channelLabels), 'coefficients do not fit the dae rows'
        assert target in self.channelLabels, f'{target} is not one of {self.channelLabels}'

        # L = [0; -I] picks the output rows of N
        self.taps = -(1.0 - self.pole) ** self.degree * self.coefficients[:, self.numStates:]
        self.feedback = np.array([comb(self.degree, m) * (-self.pole) ** m for m in range(1, self.degree + 1)])
        self.scale = 1.0 / (2 * np.pi) if target in FREQUENCY_CHANNELS else 1.0
        self.reset()

    @property
    def numChannels(self) -> int:
        return len(self.channelLabels)

    def reset(self) -> None:
        # inputs[b] holds y[k - d + b], outputs[m - 1] holds r[k - m]
        self.inputs = np.zeros((self.degree + 1, self.numChannels))
        self.outputs = np.zeros(self.degree)
        self.count = 0

    @property
    def startup(self) -> bool:
        """
        True while fewer than degree samples went through the filter
        """
        return self.count < self.degree

    def update(self, y: np.ndarray) -> float:
        y = np.asarray(y, dtype=float)
        assert y.shape == (self.numChannels,), f'expected {self.numChannels} channels, got shape {y.shape}'
        self.inputs[:-1] = self.inputs[1:]
        self.inputs[-1] = y
        r = float(np.sum(self.taps * self.inputs) - self.feedback @ self.outputs)
        self.outputs[1:] = self.outputs[:-1]
        self.outputs[0] = r
        self.count += 1
        return self.scale * r

    def run(self, Y: np.ndarray) -> np.ndarray:
        """
        residual of a whole (K, nY) output record, starting from zero state
        """
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        self.reset()
        return np.array([self.update(y) for y in Y])

    def startupMask(self, length: int) -> np.ndarray:
        return np.arange(length) < self.degree

    def decoupling(self, dae: DaeSystem) -> float:
        """
        largest entry of N Hbar, zero for an exact residual
        """
        Hbar, _ = stackToeplitz(dae, self.degree)
        return float(np.max(np.abs(self.coefficients.ravel() @ Hbar)))

    def recoveryGain(self, dae: DaeSystem) -> float:
        """
        steady-state residual per unit attack on the target, one by construction
        """
        return float(-self.coefficients.sum(axis=0) @ dae.column(self.target))

    def toDict(self) -> dict:
        return {'target': self.target,
                'degree': self.degree,
                'pole': self.pole,
                'numStates': self.numStates,
                'channelLabels': list(self.channelLabels),
                'gamma': self.gamma,
                'eta': self.eta,
                'fingerprint': self.fingerprint,
                'coefficients': self.coefficients.tolist()}

    @classmethod
    def fromDict(cls, data: dict) -> 'ResidualGenerator':
        missing = {'target', 'pole', 'numStates', 'channelLabels', 'coefficients'} - set(data)
        if missing:
            raise ConfigError(f'stored residual generator misses {sorted(missing)}')
        return cls(data['target'], np.array(data['coefficients'], dtype=float), data['pole'], data['numStates'],
                   tuple(data['channelLabels']), data.get('gamma', 0.0), data.get('eta', 0.0), data.get('fingerprint', ''))

    def __repr__(self) -> str:
        return f'ResidualGenerator({self.target}, degree={self.degree}, pole={self.pole}, gamma={self.gamma:.4g})'


def synthResidual(dae: DaeSystem, target: str, degree: int = 3, pole: float = 0.1, eta: float = 5e4,
                  tol: float = 1e-9) -> ResidualGenerator:
    """
    residual generator that is decoupled from every unknown of the dae and
    converges to the attack value on `target`.

    N is searched in the left null space of Hbar, N = w basis, under the
    recovery condition -sum_i N_i F_j = 1 and |N| <= eta. every coefficient of
    N(q) F_j is maximized in both signs by its own lp; the largest one is kept
    as the sensitivity gamma, ties go to the smaller l1 norm of N
    """
    if degree < 1:
        raise ConfigError(f'degree has to be at least 1, got {degree}')
    if not abs(pole) < 1:
        raise ConfigError(f'pole has to lie inside the unit circle, got {pole}')
    if eta <= 0:
        raise ConfigError(f'eta has to be positive, got {eta}')

    Hbar, _ = stackToeplitz(dae, degree)
    basis = leftNullspace(Hbar, tol)
    if basis.shape[0] == 0:
        raise DegreeTooLowError(f'Hbar has no left null space at degree {degree}, try a higher degree')
    basis = basis.real
    FjBar = np.kron(np.eye(degree + 1), dae.column(target)[:, None])
    G = basis @ FjBar
    recovery = G.sum(axis=1)
    if np.max(np.abs(recovery)) < 1e-7:
        raise DegreeTooLowError(f'no residual of degree {degree} recovers the attack on {target}, try a higher degree')

    numFree = basis.shape[0]
    candidates = []
    for entry in range(degree + 1):
        for sign in (1.0, -1.0):
            program = LinearProgram(sign * G[:, entry], 'max',
                                    equalityMatrix=recovery[None, :], equalityRhs=[-1.0],
                                    inequalityMatrix=basis.T, inequalityLower=np.full(basis.shape[1], -eta),
                                    inequalityUpper=np.full(basis.shape[1], eta),
                                    lowerBounds=np.full(numFree, -np.inf), upperBounds=np.full(numFree, np.inf))
            solution = lpSolve(program, tol=tol)
            if solution.optimal:
                N = solution.x @ basis
                candidates.append((solution.objective, float(np.abs(N).sum()), N))
    if not candidates:
        raise InfeasibleError(f'the recovery condition for {target} cannot be met with |N| <= {eta}, raise eta')

    gamma = max(candidate[0] for candidate in candidates)
    close = [c for c in candidates if c[0] >= gamma - 1e-9 * max(1.0, abs(gamma))]
    _, _, N = min(close, key=lambda candidate: candidate[1])
    if np.max(np.abs(N)) >= eta * (1 - 1e-6):
        logger.debug('eta = %g is active for %s', eta, target)

    numRows = dae.numRows
    generator = ResidualGenerator(target, N.reshape(degree + 1, numRows), pole, dae.numStates, dae.outputLabels,
                                  gamma=float(np.max(np.abs(N @ FjBar))), eta=eta, fingerprint=dae.fingerprint)
    logger.info('residual generator for %s: degree %d, pole %g, gamma %.4g', target, degree, pole, generator.gamma)
    return generator
