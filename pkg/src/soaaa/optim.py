"""Levenberg-Marquardt for real or complex parameters, and variable projection.

Complex parameters ``z`` are handled in real coordinates ``[Re z; Im z]``
and complex residuals ``r`` as ``[Re r; Im r]``, so the objective
``||r||^2`` is treated as a function of independent real variables.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NonFiniteResidual, SoaaaError
from .lsq import pinv_solve

log = logging.getLogger(__name__)


class LineSearchFailure(SoaaaError):
    """Raised only on request; by default the solver returns a flagged result."""


@dataclass
class NlsqProblem:
    """Nonlinear least-squares problem ``min ||r(x)||^2``.

    Parameters
    ----------
    residual : callable
        Maps the parameter vector to a real or complex residual vector.
    jacobian : callable, optional
        Analytic derivative. Its meaning depends on ``jac_kind``:

        ``"analytic"``
            ``J = dr/dz`` for a residual holomorphic in ``z`` (or the plain
            Jacobian for real parameters).
        ``"wirtinger"``
            a pair ``(J, Jc)`` with ``dr = J dz + Jc dconj(z)``.
        ``"real"``
            derivative of ``[Re r; Im r]`` (or of a real ``r``) with respect
            to the real coordinates ``[Re z; Im z]``.

        Without a Jacobian, central finite differences are used.
    complex_params : bool
        Whether the parameters are complex.
    """

    residual: Callable
    jacobian: Optional[Callable] = None
    complex_params: bool = False
    jac_kind: str = "analytic"
    param_dim: Optional[int] = None
    residual_dim: Optional[int] = None

    # real-coordinate views ---------------------------------------------------
    def to_real(self, z):
        z = np.asarray(z)
        if self.complex_params:
            z = z.astype(complex)
            return np.concatenate([z.real, z.imag])
        return z.astype(float)

    def from_real(self, x):
        if self.complex_params:
            n = x.size // 2
            return x[:n] + 1j * x[n:]
        return x

    def real_residual(self, x):
        r = np.asarray(self.residual(self.from_real(x)))
        if np.iscomplexobj(r):
            return np.concatenate([r.real, r.imag])
        return r.astype(float)

    def real_jacobian(self, x):
        z = self.from_real(x)
        if self.jacobian is None:
            return fd_jacobian(self.real_residual, x)
        if self.jac_kind == "real":
            return np.asarray(self.jacobian(z), dtype=float)
        if self.jac_kind == "wirtinger":
            J, Jc = (np.asarray(a, dtype=complex) for a in self.jacobian(z))
            top = np.hstack([(J + Jc).real, -(J - Jc).imag])
            bot = np.hstack([(J + Jc).imag, (J - Jc).real])
            return np.vstack([top, bot])
        J = np.asarray(self.jacobian(z))
        if not self.complex_params:
            if np.iscomplexobj(J):
                return np.vstack([J.real, J.imag])
            return J.astype(float)
        return np.vstack([np.hstack([J.real, -J.imag]), np.hstack([J.imag, J.real])])


def fd_jacobian(fun, x, h=None):
    """Central finite-difference Jacobian of a real vector function."""
    x = np.asarray(x, dtype=float)
    f0 = fun(x)
    J = np.empty((f0.size, x.size))
    for l in range(x.size):
        step = h if h is not None else 1e-6 * max(1.0, abs(x[l]))
        e = np.zeros_like(x)
        e[l] = step
        J[:, l] = (fun(x + e) - fun(x - e)) / (2 * step)
    return J


@dataclass
class NlsqOptions:
    max_iters: int = 100
    grad_tol: float = 1e-10
    step_tol: float = 1e-12
    damping0: float = 1e-3
    damping_up: float = 10.0
    damping_down: float = 10.0
    max_damping: float = 1e16


@dataclass
class NlsqResult:
    params: np.ndarray
    objective: float
    iterations: int
    status: str
    initial_objective: float
    history: list = field(default_factory=list)

    @property
    def decreased(self):
        return self.objective < self.initial_objective


def minimize_nlsq(problem: NlsqProblem, init, opts: NlsqOptions | None = None,
                  raise_on_failure=False) -> NlsqResult:
    """Levenberg-Marquardt with Marquardt diagonal scaling.

    The damping starts at ``damping0`` relative to the running maximum of
    ``diag(J^T J)``, is divided by ``damping_down`` after an accepted step
    and multiplied by ``damping_up`` after a rejected one. Accepted objectives never increase.

    The gradient test is scale invariant: stop when
    ``||J^T r|| <= grad_tol * ||J||_F * ||r||``, i.e. when the residual is
    nearly orthogonal to the range of ``J``. ``step_tol`` is relative to
    ``1 + ||x||``.

    Returns
    -------
    NlsqResult
        ``status`` is one of ``"max_iters"``, ``"grad_tol"``,
        ``"step_tol"``, ``"zero_residual"`` or ``"no_decrease"``.
    """
    opts = opts or NlsqOptions()
    x = problem.to_real(init)
    r = problem.real_residual(x)
    if not np.all(np.isfinite(r)):
        raise NonFiniteResidual("residual is not finite at the initial point")
    f = float(r @ r)
    f0 = f
    history = [f]
    status = "max_iters"
    if opts.max_iters <= 0:
        return NlsqResult(problem.from_real(x), f, 0, status, f0, history)
    J = problem.real_jacobian(x)
    g = J.T @ r
    mu = opts.damping0
    dg = np.zeros(x.size)
    it = 0
    while it < opts.max_iters:
        if f == 0.0:
            status = "zero_residual"
            break
        if np.linalg.norm(g) <= opts.grad_tol * np.linalg.norm(J) * np.sqrt(f):
            status = "grad_tol"
            break
        it += 1
        # Marquardt scaling, non-decreasing over iterations as in MINPACK
        dg = np.maximum(dg, np.einsum("ij,ij->j", J, J))
        dg = np.maximum(dg, 1e-12 * max(dg.max(initial=0.0), np.finfo(float).tiny))
        accepted = False
        while mu <= opts.max_damping:
            # solve min ||J d + r||^2 + mu ||D d||^2 as an augmented LS problem
            A = np.vstack([J, np.diag(np.sqrt(mu * dg))])
            b = np.concatenate([-r, np.zeros(x.size)])
            step = np.linalg.lstsq(A, b, rcond=None)[0]
            xt = x + step
            with np.errstate(all="ignore"):
                try:
                    rt = problem.real_residual(xt)
                except (SoaaaError, ZeroDivisionError, FloatingPointError):
                    rt = None
            ft = float(rt @ rt) if rt is not None and np.all(np.isfinite(rt)) else np.inf
            if ft < f:
                accepted = True
                x, r, f = xt, rt, ft
                mu = max(mu / opts.damping_down, 1e-20)
                break
            mu *= opts.damping_up
        if not accepted:
            status = "no_decrease"
            break
        history.append(f)
        if np.linalg.norm(step) <= opts.step_tol * (1.0 + np.linalg.norm(x)):
            status = "step_tol"
            break
        J = problem.real_jacobian(x)
        g = J.T @ r
    if status == "no_decrease" and raise_on_failure:
        raise LineSearchFailure("no decrease found")
    return NlsqResult(problem.from_real(x), f, it, status, f0, history)


def check_jacobian(problem: NlsqProblem, point, h=None):
    """Max relative deviation between the analytic and a central-FD Jacobian.

    Both are taken in real coordinates. The deviation is
    ``max |J_a - J_fd| / max(max |J_fd|, tiny)``, so a sign error yields a
    value near 2.
    """
    x = problem.to_real(point)
    Ja = problem.real_jacobian(x)
    Jf = fd_jacobian(problem.real_residual, x, h)
    scale = max(np.abs(Jf).max(initial=0.0), np.finfo(float).tiny)
    return float(np.abs(Ja - Jf).max(initial=0.0) / scale)


@dataclass
class VarProProblem:
    """Separable problem ``min_{a, beta} ||Psi(beta) a - f||^2``.

    Parameters
    ----------
    psi : callable
        ``beta -> Psi(beta)`` of shape ``(M, n)``.
    dpsi : callable
        ``beta -> list`` with one entry per real coordinate of ``beta``
        (``[Re beta; Im beta]`` if complex). Each entry is a pair
        ``(cols, D)`` where ``D`` holds the derivatives of the columns
        ``cols`` of ``Psi`` with shape ``(M, len(cols))``.
    f : ndarray
    beta0 : ndarray
    complex_params : bool
    """

    psi: Callable
    dpsi: Callable
    f: np.ndarray
    beta0: np.ndarray
    complex_params: bool = False
    rank_tol: Optional[float] = None


@dataclass
class VarProResult:
    alpha: np.ndarray
    beta: np.ndarray
    objective: float
    iterations: int
    status: str
    initial_objective: float
    rank: int


def _projection(Psi, rank_tol):
    if Psi.shape[1] == 0:
        return Psi[:, :0], np.zeros(0), Psi[:0].T
    U, s, Vh = np.linalg.svd(Psi, full_matrices=False)
    tol = (rank_tol if rank_tol is not None else max(Psi.shape) * np.finfo(float).eps)
    r = int((s > tol * s[0]).sum()) if s[0] > 0 else 0
    return U[:, :r], s[:r], Vh[:r]


def varpro_problem_as_nlsq(vp: VarProProblem, kaufman=False) -> NlsqProblem:
    """Projected residual ``Psi Psi^+ f - f`` with its Golub-Pereyra Jacobian.

    With ``kaufman=True`` the second Golub-Pereyra term is dropped.
    """
    f = np.asarray(vp.f)
    complex_res = np.iscomplexobj(f) or np.iscomplexobj(vp.psi(vp.beta0))

    def split(beta):
        U, s, Vh = _projection(np.asarray(vp.psi(beta)), vp.rank_tol)
        a = Vh.conj().T @ ((U.conj().T @ f) / s)
        r = U @ (U.conj().T @ f) - f
        return U, s, Vh, a, r

    def residual(beta):
        return split(beta)[4]

    def jacobian(beta):
        U, s, Vh, a, r = split(beta)
        cols = vp.dpsi(beta)
        J = np.empty((f.size, len(cols)), dtype=complex if complex_res else float)
        for l, (idx, D) in enumerate(cols):
            Da = D @ a[idx]
            term = Da - U @ (U.conj().T @ Da)
            if not kaufman:
                # (Psi^+)^H D^H r, where D only touches the columns idx
                v = np.zeros(Vh.shape[1], dtype=J.dtype)
                v[idx] = D.conj().T @ r
                term = term - U @ ((Vh @ v) / s)
            J[:, l] = term
        return np.vstack([J.real, J.imag]) if complex_res else J

    return NlsqProblem(residual, jacobian, complex_params=vp.complex_params, jac_kind="real")


def varpro_minimize(vp: VarProProblem, opts: NlsqOptions | None = None,
                    kaufman=False) -> VarProResult:
    """Minimize the projected objective over ``beta``, then ``a = Psi(beta)^+ f``."""
    res = minimize_nlsq(varpro_problem_as_nlsq(vp, kaufman=kaufman), vp.beta0, opts)
    beta = np.asarray(res.params)
    alpha, rank, _ = pinv_solve(np.asarray(vp.psi(beta)), np.asarray(vp.f), vp.rank_tol)
    return VarProResult(alpha, beta, res.objective, res.iterations, res.status,
                        res.initial_objective, rank)
