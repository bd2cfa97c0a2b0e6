"""State-space realizations of barycentric models."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import SecondOrderBarycentric, UnstructuredBarycentric
from .errors import DomainError, SingularShift


@dataclass(frozen=True)
class FirstOrderRealization:
    """``H(s) = c^T (sE - A)^{-1} b``."""

    E: np.ndarray
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @property
    def is_real(self):
        return all(np.isrealobj(m) for m in (self.E, self.A, self.b, self.c))

    @property
    def order(self):
        return self.A.shape[0]

    def pencil(self, s):
        return s * self.E - self.A

    def __call__(self, s):
        return eval_realization(self, s)


@dataclass(frozen=True)
class SecondOrderRealization:
    """``H(s) = c^T (s^2 M + s D + K)^{-1} b``."""

    M: np.ndarray
    D: np.ndarray
    K: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @property
    def is_real(self):
        return all(np.isrealobj(m) for m in (self.M, self.D, self.K, self.b, self.c))

    @property
    def order(self):
        return self.K.shape[0]

    def pencil(self, s):
        return s * s * self.M + s * self.D + self.K

    def __call__(self, s):
        return eval_realization(self, s)

    def poles(self):
        """Eigenvalues of the companion linearization."""
        n = self.order
        I = np.eye(n)
        Minv = np.linalg.solve(self.M, I)
        A = np.block([[np.zeros((n, n)), I], [-Minv @ self.K, -Minv @ self.D]])
        return np.linalg.eigvals(A)


def to_first_order(model: UnstructuredBarycentric) -> FirstOrderRealization:
    """``E = I``, ``A = diag(lambda) - w 1^T``, ``b = w``, ``c = h``.

    Real-mode models are realized through their augmented complex form;
    use :func:`to_first_order_real` for real matrices.
    """
    m = model.augmented()
    k = m.order
    w = np.array(m.weights)
    A = np.diag(m.lambdas) - np.outer(w, np.ones(k))
    return FirstOrderRealization(np.eye(k), A, w, np.array(m.h_values))


def to_second_order(model: SecondOrderBarycentric) -> SecondOrderRealization:
    """``M = I``, ``D = -diag(lambda + sigma)``, ``K = diag(lambda sigma) + w 1^T``."""
    m = model.augmented()
    k = m.order
    w = np.array(m.weights)
    D = -np.diag(m.lambdas + m.sigmas)
    K = np.diag(m.lambdas * m.sigmas) + np.outer(w, np.ones(k))
    return SecondOrderRealization(np.eye(k), D, K, w, np.array(m.h_values))


def _rotation_blocks(z):
    """Block diagonal of ``[[Re z, Im z], [-Im z, Re z]]``."""
    z = np.asarray(z, dtype=complex)
    blocks = [np.array([[v.real, v.imag], [-v.imag, v.real]]) for v in z]
    return scipy.linalg.block_diag(*blocks) if blocks else np.zeros((0, 0))


def _real_vectors(h, w):
    k = np.asarray(h).size
    c_t = np.empty(2 * k)
    c_t[0::2], c_t[1::2] = np.real(h), np.imag(h)
    b_t = np.empty(2 * k)
    b_t[0::2], b_t[1::2] = np.real(w), -np.imag(w)
    z_t = np.zeros(2 * k)
    z_t[0::2] = 2.0
    return b_t, c_t, z_t


def _representatives(model, weights):
    if weights is None:
        weights = model.weights
    if not model.real and np.any(np.asarray(model.lambdas).imag <= 0):
        raise DomainError("real realizations need representatives with Im(lambda) > 0")
    if np.asarray(weights).size != model.order:
        raise DomainError("one weight per representative is required")
    return np.asarray(weights, dtype=complex)


def to_first_order_real(model: UnstructuredBarycentric, weights=None) -> FirstOrderRealization:
    """Real realization of the conjugate-closed first-order model.

    ``model`` holds the representatives; ``weights`` overrides its weights.
    The result has order ``2k`` and ``E = I``, ``A = A~ - b~ z~^T``,
    ``b = sqrt(2) b~``, ``c = sqrt(2) c~``.
    """
    w = _representatives(model, weights)
    b_t, c_t, z_t = _real_vectors(model.h_values, w)
    A = _rotation_blocks(model.lambdas) - np.outer(b_t, z_t)
    r2 = np.sqrt(2.0)
    return FirstOrderRealization(np.eye(2 * model.order), A, r2 * b_t, r2 * c_t)


def to_second_order_real(model: SecondOrderBarycentric, weights=None) -> SecondOrderRealization:
    """Real realization of the conjugate-closed second-order model.

    ``M = I``, ``D = D~``, ``K = K~ + b~ z~^T``, ``b = sqrt(2) b~``,
    ``c = sqrt(2) c~`` where ``D~`` and ``K~`` are built from
    ``lambda + sigma`` and ``lambda sigma``.
    """
    w = _representatives(model, weights)
    b_t, c_t, z_t = _real_vectors(model.h_values, w)
    D = -_rotation_blocks(model.lambdas + model.sigmas)
    K = _rotation_blocks(model.lambdas * model.sigmas) + np.outer(b_t, z_t)
    r2 = np.sqrt(2.0)
    return SecondOrderRealization(np.eye(2 * model.order), D, K, r2 * b_t, r2 * c_t)


def to_realization(model, real=None):
    """Realize any barycentric model; ``real`` defaults to ``model.real``."""
    real = model.real if real is None else real
    if isinstance(model, SecondOrderBarycentric):
        return to_second_order_real(model) if real else to_second_order(model)
    return to_first_order_real(model) if real else to_first_order(model)


def eval_realization(realization, s):
    """Transfer function of a realization at one or more points.

    Raises
    ------
    SingularShift
        If the shifted pencil is singular at some point.
    """
    s_arr = np.asarray(s, dtype=complex)
    out = np.empty(s_arr.size, dtype=complex)
    for i, si in enumerate(s_arr.reshape(-1)):
        P = realization.pencil(si)
        if P.shape[0] == 0:
            out[i] = 0.0
            continue
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                lu, piv = scipy.linalg.lu_factor(P, check_finite=True)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise SingularShift(f"cannot factor the pencil at s={si}") from exc
        if np.any(np.diag(lu) == 0):
            raise SingularShift(f"pencil is singular at s={si}")
        out[i] = realization.c @ scipy.linalg.lu_solve((lu, piv), realization.b)
        if not np.isfinite(out[i]):
            raise SingularShift(f"pencil is numerically singular at s={si}")
    return out.reshape(s_arr.shape) if s_arr.ndim else complex(out[0])
