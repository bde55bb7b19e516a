import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg
from .errors import MarginallyStableError


def asMatrix(M: ArrayLike, name: str = 'matrix') -> np.ndarray:
    """
    converts to a finite 2d float (or complex) array, raises otherwise
    """
    M = np.asarray(M)
    if not np.iscomplexobj(M):
        M = M.astype(float)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise ValueError(f'{name} has to be a non-empty 2d array, got shape {M.shape}')
    if not np.all(np.isfinite(M)):
        raise ValueError(f'{name} contains non-finite entries')
    return M


def matExp(M: ArrayLike) -> np.ndarray:
    """
    matrix exponential, scipy uses scaling and squaring around a pade kernel
    """
    M = asMatrix(M, 'M')
    if M.shape[0] != M.shape[1]:
        raise ValueError(f'matrix exponential needs a square matrix, got {M.shape}')
    return linalg.expm(M)


def zohDiscretize(Ac: ArrayLike, Bc: ArrayLike, samplingTime: float) -> tuple[np.ndarray, np.ndarray]:
    """
    zero-order-hold discretization of x' = Ac x + Bc u

    Parameters
    ----------
    Ac : (n, n) array
        continuous state matrix
    Bc : (n, m) array
        continuous input matrix
    samplingTime : float
        sampling period in seconds

    Returns
    -------
    A, B : arrays
        A = exp(Ac Ts) and B = int_0^Ts exp(Ac s) ds Bc, both read off the
        exponential of the augmented block matrix [[Ac, Bc], [0, 0]] Ts
    """
    Ac = asMatrix(Ac, 'Ac')
    Bc = asMatrix(Bc, 'Bc')
    n = Ac.shape[0]
    if Ac.shape[1] != n:
        raise ValueError(f'Ac has to be square, got {Ac.shape}')
    if Bc.shape[0] != n:
        raise ValueError(f'Bc needs {n} rows to match Ac, got {Bc.shape[0]}')
    if not samplingTime > 0:
        raise ValueError(f'sampling time has to be positive, got {samplingTime}')

    m = Bc.shape[1]
    augmented = np.zeros((n + m, n + m))
    augmented[:n, :n] = Ac
    augmented[:n, n:] = Bc
    phi = matExp(augmented * samplingTime)
    return phi[:n, :n], phi[:n, n:]


def steadyStateGain(A: ArrayLike, B: ArrayLike, C: ArrayLike) -> np.ndarray:
    """
    dc gain C (I - A)^-1 B of a discrete system
    """
    A, B, C = asMatrix(A, 'A'), asMatrix(B, 'B'), asMatrix(C, 'C')
    n = A.shape[0]
    assert A.shape == (n, n), 'A has to be square'
    assert B.shape[0] == n and C.shape[1] == n, 'B and C do not fit A'

    IminusA = np.eye(n) - A
    if np.linalg.cond(IminusA) > 1e12:
        raise MarginallyStableError('I - A is singular, the model is marginally stable')
    return C @ linalg.solve(IminusA, B)


def spectralRadius(A: ArrayLike) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(asMatrix(A, 'A')))))


def numericRank(M: ArrayLike, tol: float = 1e-9) -> int:
    """
    counts singular values above tol times the largest one
    """
    M = asMatrix(M, 'M')
    singularValues = linalg.svd(M, compute_uv=False)
    if singularValues.size == 0 or singularValues[0] == 0:
        return 0
    return int(np.sum(singularValues > tol * singularValues[0]))


def leftNullspace(M: ArrayLike, tol: float = 1e-9) -> np.ndarray:
    """
    returns an orthonormal basis (as rows) of {r : r M = 0}
    the basis has rows(M) - rank(M) rows, it might be empty
    """
    M = asMatrix(M, 'M')
    U, singularValues, _ = linalg.svd(M, full_matrices=True)
    if singularValues.size == 0 or singularValues[0] == 0:
        rank = 0
    else:
        rank = int(np.sum(singularValues > tol * singularValues[0]))
    return U[:, rank:].conj().T
