"""Loewner and Loewner-like matrices.

Rows follow the order of the sample set, columns the order of the
parameter arrays. All builders are dense.
"""

import numpy as np

from .errors import DivisionByZeroError, DomainError


def _arrays(data):
    return np.asarray(data.mu, dtype=complex), np.asarray(data.g, dtype=complex)


def _differences(mu, nodes, what):
    D = mu[:, None] - np.asarray(nodes, dtype=complex)[None, :]
    if np.any(D == 0):
        i, j = np.argwhere(D == 0)[0]
        raise DivisionByZeroError(
            f"sample point {mu[i]} coincides with {what} {j}")
    return D


def loewner(mu, g, lambdas, h):
    """Array form of :func:`build_unstructured`."""
    mu = np.asarray(mu, dtype=complex)
    g = np.asarray(g, dtype=complex)
    h = np.asarray(h, dtype=complex)
    return (g[:, None] - h[None, :]) / _differences(mu, lambdas, "support point")


def loewner_so(mu, g, lambdas, h, sigmas):
    """Array form of :func:`build_so`."""
    mu = np.asarray(mu, dtype=complex)
    g = np.asarray(g, dtype=complex)
    h = np.asarray(h, dtype=complex)
    Dl = _differences(mu, lambdas, "support point")
    Ds = _differences(mu, sigmas, "quasi-support point")
    return (g[:, None] - h[None, :]) / (Dl * Ds)


def build_unstructured(data, lambdas, h):
    """Loewner matrix ``(g_i - h_j) / (mu_i - lambda_j)``."""
    return loewner(*_arrays(data), lambdas, h)


def build_so(data, lambdas, h, sigmas):
    """Second-order Loewner-like matrix ``(g_i - h_j) / ((mu_i - lambda_j)(mu_i - sigma_j))``."""
    return loewner_so(*_arrays(data), lambdas, h, sigmas)


def build_sonl(data, model):
    """Like :func:`build_so` with ``g_i`` replaced by the model value at ``mu_i``.

    The columns are built from the stored parameters of ``model``; for a
    real model pass ``model.augmented()`` to include the conjugate columns.
    """
    mu = np.asarray(data.mu, dtype=complex)
    return loewner_so(mu, model(mu), model.lambdas, model.h_values, model.sigmas)


def build_us2so(data, lambdas, h, sigmas):
    """Two-difference form ``(g-h)/(mu-lambda) - (g-h)/(mu-sigma)``.

    Equals ``(lambda_j - sigma_j)`` times the :func:`build_so` entry, and
    tends to the unstructured Loewner matrix as ``|sigma_j|`` grows.
    """
    mu, g = _arrays(data)
    h = np.asarray(h, dtype=complex)
    G = g[:, None] - h[None, :]
    Dl = _differences(mu, lambdas, "support point")
    Ds = _differences(mu, sigmas, "quasi-support point")
    return G / Dl - G / Ds


def _check_upper(data):
    mu = np.asarray(data.mu, dtype=complex)
    if np.any(mu.imag <= 0):
        raise DomainError("realified matrices need Im(mu_i) > 0 for every sample")


def real_blocks(alpha, beta):
    """Assemble the interleaved real matrix from coefficient pairs.

    For ``w_j = x_j + i y_j`` the block maps ``(x_j, y_j)`` to the real and
    imaginary parts of ``-(alpha w_j + beta conj(w_j))``.
    """
    m, k = alpha.shape
    sp = alpha + beta
    sm = alpha - beta
    out = np.empty((2 * m, 2 * k))
    out[0::2, 0::2] = -sp.real
    out[0::2, 1::2] = sm.imag
    out[1::2, 0::2] = -sp.imag
    out[1::2, 1::2] = -sm.real
    return out


def real_coefficients(data, lambdas, h, sigmas=None):
    """Coefficient pairs ``(alpha, beta)`` of the realified Loewner matrices.

    ``beta`` uses the conjugated parameters. With ``sigmas`` given the
    second-order denominators are used.
    """
    mu, g = _arrays(data)
    lambdas = np.asarray(lambdas, dtype=complex)
    h = np.asarray(h, dtype=complex)
    if sigmas is None:
        return loewner(mu, g, lambdas, h), loewner(mu, g, lambdas.conj(), h.conj())
    sigmas = np.asarray(sigmas, dtype=complex)
    return (loewner_so(mu, g, lambdas, h, sigmas),
            loewner_so(mu, g, lambdas.conj(), h.conj(), sigmas.conj()))


def build_real_unstructured(data, lambdas, h):
    """Real ``2(M-k) x 2k`` Loewner matrix for conjugate-closed parameters."""
    _check_upper(data)
    return real_blocks(*real_coefficients(data, lambdas, h))


def build_real_so(data, lambdas, h, sigmas):
    """Real ``2(M-k) x 2k`` second-order Loewner-like matrix."""
    _check_upper(data)
    return real_blocks(*real_coefficients(data, lambdas, h, sigmas))
