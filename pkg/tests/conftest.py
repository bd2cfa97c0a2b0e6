import numpy as np
import pytest

from soaaa.core import DataSet, SecondOrderBarycentric, UnstructuredBarycentric
from soaaa.optim import VarProProblem


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unstructured(rng, k, real=False):
    lam = crandn(rng, k)
    if real:
        lam = lam.real + 1j * (np.abs(lam.imag) + 0.5)
    return UnstructuredBarycentric(lam, crandn(rng, k), crandn(rng, k), real=real)


def random_second_order(rng, k, real=False):
    lam = crandn(rng, k)
    if real:
        lam = lam.real + 1j * (np.abs(lam.imag) + 0.5)
    sig = lam - 3.0 - crandn(rng, k)
    if real:
        sig = sig.real + 1j * rng.standard_normal(k)
    return SecondOrderBarycentric(lam, crandn(rng, k), crandn(rng, k), sig, real=real)


def random_data(rng, m, upper=False, weights=True):
    mu = 5 * crandn(rng, m)
    if upper:
        mu = mu.real + 1j * (np.abs(mu.imag) + 0.1)
    eta = rng.uniform(0.5, 2.0, m) if weights else None
    return DataSet(mu, crandn(rng, m), eta)


def direct_unstructured(lam, h, w, s):
    """Scalar-loop oracle for the first-order barycentric ratio."""
    n = sum(wj * hj / (s - lj) for lj, hj, wj in zip(lam, h, w))
    d = 1 + sum(wj / (s - lj) for lj, wj in zip(lam, w))
    return n / d


def direct_second_order(lam, h, w, sig, s):
    n = sum(wj * hj / ((s - lj) * (s - sj)) for lj, hj, wj, sj in zip(lam, h, w, sig))
    d = 1 + sum(wj / ((s - lj) * (s - sj)) for lj, wj, sj in zip(lam, w, sig))
    return n / d


def exp_problem(t, f, beta0):
    """One linear and one nonlinear parameter: f ~ a exp(-beta t)."""
    return VarProProblem(
        psi=lambda b: np.exp(-b[0] * t)[:, None],
        dpsi=lambda b: [(np.array([0]), (-t * np.exp(-b[0] * t))[:, None])],
        f=f, beta0=np.array([beta0]))


def grid_min(fun, a_lim, b_lim, levels=8, n=81):
    """Brute-force 2-D minimum by repeated zooming of a uniform grid."""
    (a0, a1), (b0, b1) = a_lim, b_lim
    for _ in range(levels):
        A, B = np.meshgrid(np.linspace(a0, a1, n), np.linspace(b0, b1, n), indexing="ij")
        F = fun(A, B)
        i, j = np.unravel_index(np.argmin(F), F.shape)
        da, db = (a1 - a0) / (n - 1), (b1 - b0) / (n - 1)
        a0, a1 = A[i, j] - 4 * da, A[i, j] + 4 * da
        b0, b1 = B[i, j] - 4 * db, B[i, j] + 4 * db
    return F[i, j], A[i, j], B[i, j]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def U1():
    return UnstructuredBarycentric([1.0], [2.0], [3.0])


@pytest.fixture
def S1():
    return SecondOrderBarycentric([0.0], [1.0], [1.0], [-2.0])
