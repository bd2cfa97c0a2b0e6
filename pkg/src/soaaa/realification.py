"""Conjugate augmentation and realified residuals, Jacobians and weight solves.

In real mode only representatives with positive imaginary part are
stored. The full model also contains their conjugates, which makes the
transfer function satisfy ``H(conj(s)) = conj(H(s))`` and yields real
state-space realizations.
"""

from __future__ import annotations

import numpy as np

from .core import DataSet, SecondOrderBarycentric, UnstructuredBarycentric
from .errors import DomainError
from .loewner import loewner_so, real_blocks, real_coefficients
from .lsq import deinterleave, interleave, solve_real_weights


def check_upper(mu, what="sample points"):
    mu = np.asarray(mu, dtype=complex)
    if np.any(mu.imag <= 0):
        raise DomainError(f"real mode needs strictly positive imaginary parts of all {what}")


def upper_half(data: DataSet) -> DataSet:
    """Drop samples with ``Im(mu) <= 0``."""
    return data.subset(np.flatnonzero(np.asarray(data.mu).imag > 0))


def augment(obj):
    """Append the conjugate copy of a data set or real-mode model.

    Data sets become ``originals + conjugates`` with weights repeated.
    Real-mode barycentric models become the equivalent complex model.
    """
    if isinstance(obj, DataSet):
        check_upper(obj.mu)
        return DataSet(np.concatenate([obj.mu, obj.mu.conj()]),
                       np.concatenate([obj.g, obj.g.conj()]),
                       np.concatenate([obj.eta, obj.eta]), check=False)
    if isinstance(obj, (UnstructuredBarycentric, SecondOrderBarycentric)):
        check_upper(obj.lambdas, "support points")
        if obj.real:
            return obj.augmented()
        arrays = {f: np.concatenate([getattr(obj, f), getattr(obj, f).conj()])
                  for f in obj._fields}
        return type(obj)(**arrays)
    raise TypeError(f"cannot augment {type(obj).__name__}")


def augment_params(*arrays):
    """``[a, conj(a)]`` for each array; the first array must be upper-half."""
    check_upper(arrays[0], "support points")
    return tuple(np.concatenate([np.asarray(a, complex), np.conj(a)]) for a in arrays)


def real_vectors(data):
    """Interleaved ``g_real`` and duplicated ``eta_real``."""
    return interleave(data.g), np.repeat(np.asarray(data.eta, dtype=float), 2)


# separable second-order residual -----------------------------------------------

def residual_separable_real(data, lambdas, h, sigmas, w):
    """Realified separable residual of length ``2(M-k)``.

    Entry ``i`` is ``eta_i (g_i - sum_j [w_j (h_j - g_i)/q_j(mu_i) + conj terms])``
    and the second half repeats this on the conjugate samples. This is the
    negative of the complex separable residual on the augmented sets.
    """
    check_upper(data.mu)
    aug = augment(data)
    lam, hh, sig, ww = augment_params(lambdas, h, sigmas, w)
    L = loewner_so(aug.mu, aug.g, lam, hh, sig)
    return aug.eta * (aug.g + L @ ww)


def jacobians_separable_real(data, lambdas, h, sigmas):
    """Column derivatives of the realified separable residual.

    Returns ``(J_sigma, J_sigma_conj)`` of shape ``2(M-k) x k``. The
    derivative of the residual with respect to ``sigma_j`` (``conj(sigma_j)``)
    is column ``j`` scaled by ``w_j`` (``conj(w_j)``).
    """
    check_upper(data.mu)
    aug = augment(data)
    lambdas = np.asarray(lambdas, complex)
    h = np.asarray(h, complex)
    sigmas = np.asarray(sigmas, complex)
    mu = aug.mu[:, None]
    eta = aug.eta[:, None]
    L = loewner_so(aug.mu, aug.g, lambdas, h, sigmas)
    Lc = loewner_so(aug.mu, aug.g, lambdas.conj(), h.conj(), sigmas.conj())
    return L * eta / (mu - sigmas[None, :]), Lc * eta / (mu - sigmas.conj()[None, :])


def real_so_psi(data, lambdas, h, sigmas):
    """``diag(eta_real) L_real_SO``, the real VarPro matrix in real mode."""
    _, eta_real = real_vectors(data)
    return eta_real[:, None] * real_blocks(*real_coefficients(data, lambdas, h, sigmas))


def real_so_dpsi(data, lambdas, h, sigmas):
    """Derivatives of :func:`real_so_psi` with respect to ``[Re sigma; Im sigma]``.

    Returns the ``(cols, D)`` list expected by :class:`soaaa.optim.VarProProblem`.
    """
    alpha, beta = real_coefficients(data, lambdas, h, sigmas)
    mu = np.asarray(data.mu, complex)[:, None]
    sigmas = np.asarray(sigmas, complex)
    _, eta_real = real_vectors(data)
    da = alpha / (mu - sigmas[None, :])
    db = beta / (mu - sigmas.conj()[None, :])
    k = sigmas.size
    re_part, im_part = [], []
    for j in range(k):
        cols = np.array([2 * j, 2 * j + 1])
        aj, bj = da[:, j:j + 1], db[:, j:j + 1]
        re_part.append((cols, eta_real[:, None] * real_blocks(aj, bj)))
        im_part.append((cols, eta_real[:, None] * real_blocks(1j * aj, -1j * bj)))
    return re_part + im_part


def solve_real_weights_so(data, lambdas, h, sigmas, rank_tol=None, full_output=False):
    """Conjugate-consistent weights from the realified second-order problem."""
    check_upper(data.mu)
    g_real, eta_real = real_vectors(data)
    L = real_blocks(*real_coefficients(data, lambdas, h, sigmas))
    sol = solve_real_weights(L, g_real, eta_real, rank_tol, full_output=True)
    w = deinterleave(sol.x)
    return (w, sol.rank) if full_output else w


def solve_real_weights_unstructured(data, lambdas, h, rank_tol=None, full_output=False):
    """Conjugate-consistent weights from the realified first-order problem."""
    check_upper(data.mu)
    g_real, eta_real = real_vectors(data)
    L = real_blocks(*real_coefficients(data, lambdas, h))
    sol = solve_real_weights(L, g_real, eta_real, rank_tol, full_output=True)
    w = deinterleave(sol.x)
    return (w, sol.rank) if full_output else w


# fully nonlinear second-order residual ----------------------------------------

def residual_nonlinear_real(data, lambdas, h, sigmas, w, smooth=True):
    """Weighted model error on the augmented samples (length ``2(M-k)``).

    With ``smooth=True`` returns ``eta_i (H(mu_i) - g_i)``; otherwise its
    modulus. ``H`` contains the conjugate terms.
    """
    check_upper(data.mu)
    aug = augment(data)
    model = SecondOrderBarycentric(lambdas, h, w, sigmas, real=True)
    r = aug.eta * (model(aug.mu) - aug.g)
    return r if smooth else np.abs(r)


def jacobians_nonlinear_real(data, lambdas, h, sigmas, w):
    """Wirtinger Jacobians of the smooth realified nonlinear residual.

    Returns ``(J, Jc)`` with ``J = [J_w, J_sigma]`` the derivative with
    respect to the representatives and ``Jc = [J_wbar, J_sigmabar]`` the
    derivative with respect to their conjugates, both ``2(M-k) x 2k``.
    """
    check_upper(data.mu)
    aug = augment(data)
    lambdas, h, sigmas, w = (np.asarray(a, complex) for a in (lambdas, h, sigmas, w))
    model = SecondOrderBarycentric(lambdas, h, w, sigmas, real=True)
    H = model(aug.mu)
    eta_t = aug.eta / model.denominator(aug.mu)
    mu = aug.mu[:, None]

    def blocks(lam, hh, sig, ww):
        L = loewner_so(aug.mu, H, lam, hh, sig)
        Jw = -eta_t[:, None] * L
        Js = Jw * ww[None, :] / (mu - sig[None, :])
        return np.hstack([Jw, Js])

    return blocks(lambdas, h, sigmas, w), blocks(lambdas.conj(), h.conj(), sigmas.conj(), w.conj())
