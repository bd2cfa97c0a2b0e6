"""Weighted linear least squares through a truncated pseudoinverse."""

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteInput, ShapeMismatch


@dataclass(frozen=True)
class WeightedLsProblem:
    """Minimize ``||diag(eta) (-A x - g)||_2``.

    The sign convention mirrors the barycentric weight problems, where
    ``A`` is a Loewner matrix and ``g`` the sample values.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    row_weights: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.matrix))
        g = np.asarray(self.rhs).reshape(-1)
        eta = np.asarray(self.row_weights, dtype=float).reshape(-1)
        if not (A.shape[0] == g.size == eta.size):
            raise ShapeMismatch(
                f"matrix has {A.shape[0]} rows, rhs {g.size}, weights {eta.size}")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "rhs", g)
        object.__setattr__(self, "row_weights", eta)

    def residual(self, x):
        return self.row_weights * (-(self.matrix @ x) - self.rhs)


@dataclass(frozen=True)
class LsSolution:
    x: np.ndarray
    rank: int
    singular_values: np.ndarray


def pinv_solve(A, b, rank_tol=None):
    """Minimum-norm least-squares solution of ``A x ~ b``.

    Singular values below ``rank_tol * sigma_max`` are discarded; the
    default tolerance is ``max(A.shape) * eps``.

    Returns
    -------
    x : ndarray
    rank : int
    s : ndarray
        All singular values of ``A``.
    """
    A = np.atleast_2d(A)
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise NonFiniteInput("least-squares data must be finite")
    m, n = A.shape
    dtype = np.result_type(A, b, float)
    if n == 0 or m == 0:
        return np.zeros(n, dtype=dtype), 0, np.zeros(0)
    if rank_tol is None:
        rank_tol = max(m, n) * np.finfo(float).eps
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    keep = s > rank_tol * s[0] if s[0] > 0 else np.zeros(s.shape, dtype=bool)
    r = int(keep.sum())
    coef = (U[:, :r].conj().T @ b) / s[:r]
    x = Vh[:r].conj().T @ coef
    return x.astype(dtype, copy=False), r, s


def solve_weighted(problem: WeightedLsProblem, rank_tol=None, full_output=False):
    """Solve ``min_x ||diag(eta)(-A x - g)||`` by a truncated pseudoinverse.

    Parameters
    ----------
    problem : WeightedLsProblem
    rank_tol : float, optional
        Relative singular value cutoff; defaults to ``max(m, n) * eps``.
    full_output : bool
        Return an :class:`LsSolution` with the numerical rank as well.
    """
    if rank_tol is not None and rank_tol < 0:
        raise ValueError("rank_tol must be nonnegative")
    eta = problem.row_weights
    x, r, s = pinv_solve(-(eta[:, None] * problem.matrix), eta * problem.rhs, rank_tol)
    return LsSolution(x, r, s) if full_output else x


def interleave(z):
    """Complex vector to ``[Re z_1, Im z_1, Re z_2, ...]``."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(2 * z.size)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def deinterleave(v):
    """Inverse of :func:`interleave`."""
    v = np.asarray(v, dtype=float)
    return v[0::2] + 1j * v[1::2]


def solve_real_weights(real_L, g_real, eta_real, rank_tol=None, full_output=False):
    """Real and imaginary parts of conjugate-closed barycentric weights.

    Solves ``min ||diag(eta_real)(real_L w - g_real)||``; the result is the
    interleaved vector ``[Re w_1, Im w_1, ...]``.
    """
    real_L = np.atleast_2d(np.asarray(real_L, dtype=float))
    g_real = np.asarray(g_real, dtype=float)
    eta_real = np.asarray(eta_real, dtype=float)
    if not (real_L.shape[0] == g_real.size == eta_real.size):
        raise ShapeMismatch("real Loewner matrix, rhs and weights disagree in length")
    x, r, s = pinv_solve(eta_real[:, None] * real_L, eta_real * g_real, rank_tol)
    return LsSolution(x, r, s) if full_output else x
