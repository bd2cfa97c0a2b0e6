"""Synthetic stable systems and frequency samplers used as ground truth."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.stats

from .core import DataSet
from .errors import InvalidRange
from .statespace import FirstOrderRealization, SecondOrderRealization, eval_realization


@dataclass(frozen=True)
class SyntheticSystem:
    """A generated realization with its seed and generation metadata."""

    realization: object
    seed: int | None = None
    metadata: dict = field(default_factory=dict)

    def __call__(self, s):
        return eval_realization(self.realization, s)

    @property
    def order(self):
        return self.realization.order

    def poles(self):
        r = self.realization
        if isinstance(r, SecondOrderRealization):
            return r.poles()
        return np.linalg.eigvals(np.linalg.solve(r.E, r.A))


def from_matrices(M=None, D=None, K=None, b=None, c=None, E=None, A=None):
    """Wrap user matrices as a :class:`SyntheticSystem` (no randomness)."""
    def arr(x):
        return np.atleast_2d(np.asarray(x))
    if A is not None:
        E = np.eye(arr(A).shape[0]) if E is None else arr(E)
        r = FirstOrderRealization(E, arr(A), np.atleast_1d(b), np.atleast_1d(c))
    else:
        K = arr(K)
        M = np.eye(K.shape[0]) if M is None else arr(M)
        r = SecondOrderRealization(M, arr(D), K, np.atleast_1d(b), np.atleast_1d(c))
    return SyntheticSystem(r)


def _check_band(freq_range, damping_range):
    lo, hi = freq_range
    if not (0 < lo <= hi):
        raise InvalidRange(f"frequency range must satisfy 0 < lo <= hi, got {freq_range}")
    zlo, zhi = damping_range
    if not (0 < zlo <= zhi):
        raise InvalidRange(f"damping range must satisfy 0 < lo <= hi, got {damping_range}")


def gen_second_order(k, seed=None, freq_range=(1.0, 1e3), damping_range=(0.01, 0.5),
                     real=True):
    """Random stable second-order system ``M = I`` with modal damping.

    Natural frequencies are log-uniform in ``freq_range`` and damping ratios
    uniform in ``damping_range``. With a random orthogonal ``Q``,
    ``K = Q diag(omega^2) Q^T`` and ``D = Q diag(2 zeta omega) Q^T``, so all
    poles lie in the open left half-plane. ``b`` and ``c`` are standard
    normal (complex if ``real`` is false).
    """
    if k < 1:
        raise InvalidRange("order must be at least 1")
    _check_band(freq_range, damping_range)
    rng = np.random.default_rng(seed)
    omega = np.exp(rng.uniform(np.log(freq_range[0]), np.log(freq_range[1]), k))
    zeta = rng.uniform(*damping_range, k)
    Q = scipy.stats.ortho_group.rvs(k, random_state=rng) if k > 1 else np.ones((1, 1))
    K = Q @ np.diag(omega ** 2) @ Q.T
    D = Q @ np.diag(2 * zeta * omega) @ Q.T
    b = rng.standard_normal(k)
    c = rng.standard_normal(k)
    if not real:
        b = b + 1j * rng.standard_normal(k)
        c = c + 1j * rng.standard_normal(k)
    r = SecondOrderRealization(np.eye(k), D, K, b, c)
    return SyntheticSystem(r, seed, {"omega": omega, "zeta": zeta, "real": real,
                                      "freq_range": tuple(freq_range),
                                      "damping_range": tuple(damping_range)})


def gen_first_order(k, seed=None, freq_range=(1.0, 1e3), damping_range=(0.01, 0.5),
                    real=False):
    """Random stable strictly proper rational function of degree ``k``.

    Complex systems get ``k`` poles ``-zeta omega + i omega`` with random
    sign of the imaginary part; real systems use conjugate pairs (plus one
    real pole for odd ``k``).
    """
    if k < 1:
        raise InvalidRange("order must be at least 1")
    _check_band(freq_range, damping_range)
    rng = np.random.default_rng(seed)
    if real:
        npair = k // 2
        omega = np.exp(rng.uniform(np.log(freq_range[0]), np.log(freq_range[1]), npair))
        zeta = rng.uniform(*damping_range, npair)
        blocks = [np.array([[-z * w, w * np.sqrt(1 - z * z)], [-w * np.sqrt(1 - z * z), -z * w]])
                  for w, z in zip(omega, zeta)]
        if k % 2:
            blocks.append(np.array([[-np.exp(rng.uniform(*np.log(freq_range)))]]))
        A = scipy.linalg.block_diag(*blocks)
        b = rng.standard_normal(k)
        c = rng.standard_normal(k)
    else:
        omega = np.exp(rng.uniform(np.log(freq_range[0]), np.log(freq_range[1]), k))
        zeta = rng.uniform(*damping_range, k)
        sign = rng.choice([-1.0, 1.0], k)
        A = np.diag(-zeta * omega + 1j * sign * omega)
        b = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        c = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    r = FirstOrderRealization(np.eye(k), A, b, c)
    return SyntheticSystem(r, seed, {"real": real, "freq_range": tuple(freq_range)})


def log_grid(lo, hi, n, imaginary=True):
    """``n`` logarithmically spaced frequencies, on the imaginary axis by default."""
    if not (0 < lo < hi) or n < 0:
        raise InvalidRange("need 0 < lo < hi and n >= 0")
    w = np.logspace(np.log10(lo), np.log10(hi), n)
    return 1j * w if imaginary else w.astype(complex)


def linear_grid(lo, hi, n, imaginary=True):
    """``n`` linearly spaced frequencies."""
    if not (lo < hi) or n < 0:
        raise InvalidRange("need lo < hi and n >= 0")
    w = np.linspace(lo, hi, n)
    return 1j * w if imaginary else w.astype(complex)


def sample_frequency_response(system, points, weighting="unit", magnitude_floor=1e-12):
    """Sample ``g_i = H(mu_i)`` into a :class:`DataSet`.

    Parameters
    ----------
    system : callable
        Transfer function (a :class:`SyntheticSystem`, realization or model).
    points : array_like of complex
    weighting : {"unit", "relative"}
        Relative weighting uses ``eta_i = 1/|g_i|`` and drops samples with
        ``|g_i| < magnitude_floor``.
    """
    mu = np.asarray(points, dtype=complex).reshape(-1)
    g = np.asarray(system(mu), dtype=complex).reshape(-1) if mu.size else np.zeros(0, complex)
    if weighting == "relative":
        keep = np.abs(g) >= magnitude_floor
        mu, g = mu[keep], g[keep]
        return DataSet(mu, g, 1.0 / np.abs(g))
    if weighting != "unit":
        raise ValueError(f"unknown weighting {weighting!r}")
    return DataSet(mu, g)
