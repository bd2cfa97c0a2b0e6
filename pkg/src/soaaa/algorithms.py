"""Greedy barycentric fitting: AAA, SO-AAA, LSO-AAA and NSO-AAA.

All four methods share one loop. In iteration ``k`` the sample with the
largest weighted model error becomes the support point ``lambda_k`` with
value ``h_k = g_k`` and is removed from the data. The methods differ in
how the remaining parameters are chosen:

``aaa``
    first-order weights from a weighted linearized least-squares problem.
``lso``
    second-order form with quasi-support points fixed at
    ``sigma_k = c - i Im(lambda_k)`` and weights from a linear solve.
``so``
    as ``lso`` but the quasi-support points are optimized by variable
    projection of the separable residual.
``nso``
    weights and quasi-support points are optimized jointly on the true
    (nonlinear) weighted model error.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .core import (
    DataSet,
    FitTrace,
    IterationRecord,
    SecondOrderBarycentric,
    UnstructuredBarycentric,
    snap_mask,
)
from .errors import (
    DomainError,
    EmptyDataSet,
    InsufficientData,
    NonFiniteResidual,
    SoaaaError,
)
from .loewner import loewner, loewner_so
from .lsq import WeightedLsProblem, deinterleave, solve_weighted
from .metrics import error_report
from .optim import NlsqOptions, NlsqProblem, VarProProblem, minimize_nlsq, varpro_minimize
from . import realification as rf

log = logging.getLogger(__name__)

METHODS = ("aaa", "aaa2", "so", "lso", "nso")


@dataclass(frozen=True)
class FitConfig:
    """Settings shared by all fitting methods.

    Parameters
    ----------
    kmax : int
        Maximum order (number of greedy iterations).
    tol : float
        Stop once the weighted relative L2 error over all samples drops
        below ``tol``; 0 disables early stopping.
    c : float
        Negative real part used to initialize new quasi-support points.
    weighting : {"data", "unit", "relative"}
        Keep the sample weights, replace them by ones, or by ``1/|g_i|``.
    real_mode : bool
        Fit conjugate-closed models with real realizations. Samples must
        have positive imaginary part unless ``drop_nonpositive`` is set.
    method : {"aaa", "aaa2", "so", "lso", "nso"}
    aaa2 : bool
        Run ``2 * kmax`` iterations (implied by ``method="aaa2"``).
    max_inner_iters : int
        Iteration budget of the inner nonlinear solver per greedy step.
    rank_tol : float, optional
        Relative singular value cutoff of the linear solves.
    support_path : sequence of int, optional
        Force the support points to these sample indices (into the
        original data) instead of greedy selection.
    kaufman : bool
        Use the Kaufman approximation of the projected Jacobian.
    start : {"warm", "cold", "best"}
        Starting point of the inner solver for ``so`` and ``nso``. ``warm``
        reuses the quasi-support points (and weights) of the previous
        iteration. ``cold`` resets every quasi-support point to
        ``c - i Im(lambda_j)``, with linear weights for ``nso``. ``best``
        runs both and keeps the smaller objective.
    keep_models : bool
        Store the model of every iteration in the trace.
    """

    kmax: int = 10
    tol: float = 0.0
    c: float = -1e5
    weighting: str = "data"
    real_mode: bool = False
    method: str = "aaa"
    aaa2: bool = False
    max_inner_iters: int = 100
    rank_tol: Optional[float] = None
    support_path: Optional[Sequence[int]] = None
    kaufman: bool = False
    start: str = "cold"
    keep_models: bool = True
    drop_nonpositive: bool = False

    def __post_init__(self):
        if int(self.kmax) < 1:
            raise ValueError("kmax must be at least 1")
        if not self.c < 0:
            raise ValueError("c must be negative")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.weighting not in ("data", "unit", "relative"):
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if self.start not in ("warm", "cold", "best"):
            raise ValueError(f"unknown start {self.start!r}")

    @property
    def iterations(self):
        return 2 * self.kmax if (self.aaa2 or self.method == "aaa2") else self.kmax


# greedy selection -------------------------------------------------------------

def greedy_select(data: DataSet, model):
    """Index and sample maximizing ``eta_i |H(mu_i) - g_i|``.

    Exact ties are broken by the larger unweighted error, then by the
    smallest index.
    """
    if len(data) == 0:
        raise EmptyDataSet("no samples left to select from")
    err = np.abs(model(data.mu) - data.g)
    werr = data.eta * err
    cand = np.flatnonzero(werr == werr.max())
    if cand.size > 1:
        sub = err[cand]
        cand = cand[sub == sub.max()]
    i = int(cand[0])
    return i, data[i]


# residuals and Jacobians --------------------------------------------------------

def residual_linearized(data, lambdas, h, w):
    """``diag(eta)(-L w - g)`` with the first-order Loewner matrix ``L``."""
    L = loewner(data.mu, data.g, lambdas, h)
    return data.eta * (-(L @ np.asarray(w)) - data.g)


def residual_separable(data, lambdas, h, sigmas, w):
    """``diag(eta)(-L_SO w - g)``; the denominator is factored out."""
    L = loewner_so(data.mu, data.g, lambdas, h, sigmas)
    return data.eta * (-(L @ np.asarray(w)) - data.g)


def jacobian_separable(data, lambdas, h, sigmas, L=None):
    """``-L_SO[i, j] eta_i / (mu_i - sigma_j)``.

    Column ``j`` is the derivative of column ``j`` of ``-diag(eta) L_SO``
    with respect to ``sigma_j``; the residual derivative is this column
    times ``w_j``. ``L`` may pass an already built ``L_SO``.
    """
    sigmas = np.asarray(sigmas, complex)
    if L is None:
        L = loewner_so(data.mu, data.g, lambdas, h, sigmas)
    return -L * data.eta[:, None] / (np.asarray(data.mu)[:, None] - sigmas[None, :])


def residual_nonlinear(data, model, smooth=False):
    """``eta_i |H(mu_i) - g_i|``, or the complex difference if ``smooth``."""
    r = data.eta * (model(data.mu) - data.g)
    return r if smooth else np.abs(r)


def jacobians_nonlinear(data, model: SecondOrderBarycentric):
    """Jacobians of the smooth nonlinear residual ``eta (H(mu) - g)``.

    Returns ``(J_w, J_sigma)`` with ``J_w = -diag(eta / d(mu)) L_SONL`` and
    ``J_sigma[i, j] = w_j / (mu_i - sigma_j) * J_w[i, j]``. The Jacobian with
    respect to ``[w; sigma]`` is ``np.hstack([J_w, J_sigma])``.
    """
    mu = np.asarray(data.mu, complex)
    H = model(mu)
    eta_t = data.eta / model.denominator(mu)
    L = loewner_so(mu, H, model.lambdas, model.h_values, model.sigmas)
    Jw = -eta_t[:, None] * L
    Js = Jw * model.weights[None, :] / (mu[:, None] - model.sigmas[None, :])
    return Jw, Js


# helpers ----------------------------------------------------------------------

def prepare_data(data: DataSet, config: FitConfig) -> DataSet:
    """Apply the weighting mode and real-mode sample checks."""
    if config.real_mode:
        if config.drop_nonpositive:
            data = rf.upper_half(data)
        else:
            rf.check_upper(data.mu)
    if config.weighting == "unit":
        data = data.with_weights(np.ones(len(data)))
    elif config.weighting == "relative":
        data = data.relative_weights()
    return data


def initial_sigma(lam, c, data, scale=None):
    """``c - i Im(lambda)``, shifted left while it collides with a sample."""
    sigma = complex(c, -np.imag(lam))
    step = 0.1 * abs(c if scale is None else scale)
    mu = np.asarray(data.mu)
    for _ in range(100):
        if not snap_mask([sigma], mu).any() and sigma != lam:
            break
        sigma -= step
    return sigma


class _State:
    """Growing parameter lists and the shrinking sample set."""

    def __init__(self, data):
        self.full = data
        self.rest = data
        self.index = np.arange(len(data))
        self.lam, self.h, self.sig, self.w = [], [], [], []

    def take(self, i):
        t = self.rest[i]
        self.lam.append(t.mu)
        self.h.append(t.g)
        self.rest = self.rest.remove(i)
        self.index = np.delete(self.index, i)
        return t

    def arrays(self):
        return (np.array(self.lam, complex), np.array(self.h, complex),
                np.array(self.sig, complex), np.array(self.w, complex))


def _inner_opts(config):
    return NlsqOptions(max_iters=config.max_inner_iters)


def _aaa_step(st, config):
    lam, h, _, _ = st.arrays()
    if config.real_mode:
        w, rank = rf.solve_real_weights_unstructured(st.rest, lam, h, config.rank_tol, True)
        aug = rf.augment(st.rest)
        la, ha, wa = rf.augment_params(lam, h, w)
        obj = float(np.sum(np.abs(residual_linearized(aug, la, ha, wa)) ** 2))
    else:
        L = loewner(st.rest.mu, st.rest.g, lam, h)
        sol = solve_weighted(WeightedLsProblem(L, st.rest.g, st.rest.eta),
                             config.rank_tol, full_output=True)
        w, rank = sol.x, sol.rank
        obj = float(np.sum(np.abs(residual_linearized(st.rest, lam, h, w)) ** 2))
    st.w = list(w)
    model = UnstructuredBarycentric(lam, h, w, real=config.real_mode)
    return model, obj, rank, 0, []


def _linear_so_weights(rest, lam, h, sig, config):
    if config.real_mode:
        return rf.solve_real_weights_so(rest, lam, h, sig, config.rank_tol, True)
    L = loewner_so(rest.mu, rest.g, lam, h, sig)
    sol = solve_weighted(WeightedLsProblem(L, rest.g, rest.eta), config.rank_tol,
                         full_output=True)
    return sol.x, sol.rank


def separable_objective(rest, lam, h, sig, w, real_mode):
    if real_mode:
        r = rf.residual_separable_real(rest, lam, h, sig, w)
    else:
        r = residual_separable(rest, lam, h, sig, w)
    return float(np.sum(np.abs(r) ** 2))


def nonlinear_objective(rest, lam, h, sig, w, real_mode):
    if real_mode:
        r = rf.residual_nonlinear_real(rest, lam, h, sig, w)
    else:
        r = residual_nonlinear(rest, SecondOrderBarycentric(lam, h, w, sig), smooth=True)
    return float(np.sum(np.abs(r) ** 2))


def _lso_step(st, config):
    lam, h, sig, _ = st.arrays()
    w, rank = _linear_so_weights(st.rest, lam, h, sig, config)
    st.w = list(w)
    obj = separable_objective(st.rest, lam, h, sig, w, config.real_mode)
    return SecondOrderBarycentric(lam, h, w, sig, real=config.real_mode), obj, rank, 0, []


def separable_varpro_problem(rest, lam, h, sig0, real_mode):
    """VarPro formulation of the separable problem over the quasi-support points."""
    mu = np.asarray(rest.mu)
    eta = np.asarray(rest.eta)
    if real_mode:
        g_real, eta_real = rf.real_vectors(rest)
        return VarProProblem(
            psi=lambda s: rf.real_so_psi(rest, lam, h, s),
            dpsi=lambda s: rf.real_so_dpsi(rest, lam, h, s),
            f=eta_real * g_real, beta0=sig0, complex_params=True)

    def psi(s):
        return -eta[:, None] * loewner_so(mu, rest.g, lam, h, s)

    def dpsi(s):
        J = jacobian_separable(rest, lam, h, s)
        k = J.shape[1]
        return ([(np.array([j]), J[:, j:j + 1]) for j in range(k)]
                + [(np.array([j]), 1j * J[:, j:j + 1]) for j in range(k)])

    return VarProProblem(psi=psi, dpsi=dpsi, f=eta * rest.g, beta0=sig0, complex_params=True)


def _cold_sigmas(st, config):
    return np.array([initial_sigma(l, config.c, st.full) for l in st.lam], complex)


def _so_candidate(st, lam, h, sig0, config):
    vp = separable_varpro_problem(st.rest, lam, h, sig0, config.real_mode)
    res = varpro_minimize(vp, _inner_opts(config), kaufman=config.kaufman)
    sig = np.asarray(res.beta, complex)
    w = deinterleave(res.alpha) if config.real_mode else np.asarray(res.alpha, complex)
    if not (np.all(np.isfinite(sig)) and np.all(np.isfinite(w))):
        raise NonFiniteResidual("non-finite VarPro result")
    if np.any(sig == lam):
        raise DomainError("quasi-support point collapsed onto a support point")
    obj = separable_objective(st.rest, lam, h, sig, w, config.real_mode)
    return obj, sig, w, res.rank, res.iterations


def _so_step(st, config):
    lam, h, sig0, _ = st.arrays()
    events = []
    inner = 0
    best = None
    if config.max_inner_iters > 0:
        starts = []
        if config.start in ("warm", "best"):
            starts.append(("warm", sig0))
        if config.start in ("cold", "best"):
            starts.append(("cold", _cold_sigmas(st, config)))
        for name, start in starts:
            try:
                cand = _so_candidate(st, lam, h, start, config)
            except (SoaaaError, np.linalg.LinAlgError, FloatingPointError) as exc:
                events.append(f"{name} start failed: {exc}")
                continue
            inner += cand[4]
            if best is None or cand[0] < best[0]:
                best = cand
                if len(starts) > 1 and name == "cold":
                    events.append("cold start improved the separable objective")
        if best is None:
            events.append("fallback to linear solution")
            log.info("SO-AAA order %d: %s", lam.size, "; ".join(events))
    if best is None:
        w, rank = _linear_so_weights(st.rest, lam, h, sig0, config)
        best = (separable_objective(st.rest, lam, h, sig0, w, config.real_mode), sig0, w, rank, 0)
    obj, sig, w, rank, _ = best
    st.sig = list(sig)
    st.w = list(w)
    return SecondOrderBarycentric(lam, h, w, sig, real=config.real_mode), obj, rank, inner, events


def nonlinear_problem(rest, lam, h, real_mode):
    """Smooth nonlinear residual over ``z = [w; sigma]`` with analytic Jacobians."""
    k = lam.size

    if real_mode:
        def residual(z):
            return rf.residual_nonlinear_real(rest, lam, h, z[k:], z[:k])

        def jacobian(z):
            return rf.jacobians_nonlinear_real(rest, lam, h, z[k:], z[:k])

        return NlsqProblem(residual, jacobian, complex_params=True, jac_kind="wirtinger")

    def residual(z):
        return residual_nonlinear(rest, SecondOrderBarycentric(lam, h, z[:k], z[k:]), smooth=True)

    def jacobian(z):
        return np.hstack(jacobians_nonlinear(rest, SecondOrderBarycentric(lam, h, z[:k], z[k:])))

    return NlsqProblem(residual, jacobian, complex_params=True, jac_kind="analytic")


def _nso_candidate(st, lam, h, w0, sig0, config):
    k = lam.size
    prob = nonlinear_problem(st.rest, lam, h, config.real_mode)
    res = minimize_nlsq(prob, np.concatenate([w0, sig0]), _inner_opts(config))
    z = np.asarray(res.params, complex)
    if not np.all(np.isfinite(z)):
        raise NonFiniteResidual("non-finite parameters")
    if np.any(z[k:] == lam):
        raise DomainError("quasi-support point collapsed onto a support point")
    if not res.objective < res.initial_objective:
        raise NonFiniteResidual("no decrease of the nonlinear objective")
    return res.objective, z[k:], z[:k], res.iterations


def _nso_step(st, config):
    lam, h, sig0, w_prev = st.arrays()
    k = lam.size
    w0 = np.concatenate([w_prev[: k - 1], [-1.0 + 0j]])
    events = []
    inner = 0
    rank = None
    best = None
    if config.max_inner_iters > 0:
        starts = []
        if config.start in ("warm", "best"):
            starts.append(("warm", w0, sig0))
        if config.start in ("cold", "best"):
            cold = _cold_sigmas(st, config)
            starts.append(("cold", _linear_so_weights(st.rest, lam, h, cold, config)[0], cold))
        for name, wi, si in starts:
            try:
                cand = _nso_candidate(st, lam, h, wi, si, config)
            except (SoaaaError, np.linalg.LinAlgError, FloatingPointError) as exc:
                events.append(f"{name} start failed: {exc}")
                continue
            inner += cand[3]
            if best is None or cand[0] < best[0]:
                best = cand
                if len(starts) > 1 and name == "cold":
                    events.append("cold start improved the nonlinear objective")
        if best is None:
            events.append("fallback to linear solution")
            log.info("NSO-AAA order %d: %s", k, "; ".join(events))
            w, rank = _linear_so_weights(st.rest, lam, h, sig0, config)
            best = (None, sig0, w, 0)
    if best is None:
        best = (None, sig0, w0, 0)
    _, sig, w, _ = best
    st.sig = list(sig)
    st.w = list(w)
    obj = nonlinear_objective(st.rest, lam, h, sig, w, config.real_mode)
    return SecondOrderBarycentric(lam, h, w, sig, real=config.real_mode), obj, rank, inner, events


def _iterate(k, st, step, model, trace, config, data, second_order):
    t0 = time.perf_counter()
    if config.support_path is not None:
        target = int(config.support_path[k - 1])
        pos = np.flatnonzero(st.index == target)
        if pos.size == 0:
            raise DomainError(f"forced support index {target} is not available")
        i = int(pos[0])
    else:
        i, _ = greedy_select(st.rest, model)
    t = st.take(i)
    if second_order:
        st.sig.append(initial_sigma(t.mu, config.c, data))
    model, obj, rank, inner, events = step(st, config)
    rep = error_report(data, model)
    if trace.records and second_order:
        prev = trace.records[-1]
        if obj < prev.objective and rep.l2_rel > prev.l2_rel:
            events.append("objective decreased while the model error increased")
    trace.append(IterationRecord(
        order=k, objective=obj, l2_rel=rep.l2_rel, linf_rel=rep.linf_rel,
        ptw_max=rep.ptw_max, wall_time=time.perf_counter() - t0,
        n_remaining=len(st.rest), n_support=len(st.lam), rank=rank,
        inner_iterations=inner, events=events,
        model=model if config.keep_models else None))
    return model, config.tol > 0 and rep.l2_rel < config.tol


_STEPS = {"aaa": _aaa_step, "aaa2": _aaa_step, "lso": _lso_step, "so": _so_step, "nso": _nso_step}


def fit(data: DataSet, config: FitConfig):
    """Run the greedy loop of ``config.method``.

    Returns
    -------
    model : UnstructuredBarycentric or SecondOrderBarycentric
        Model after the last completed iteration.
    trace : FitTrace

    Raises
    ------
    SoaaaError
        Any package error raised during an iteration carries the trace of
        the completed iterations as ``exc.partial_trace``.
    """
    data = prepare_data(data, config)
    n_iter = config.iterations
    if len(data) < n_iter + 1:
        raise InsufficientData(
            f"{n_iter} iterations need at least {n_iter + 1} samples, got {len(data)}")
    second_order = config.method in ("so", "lso", "nso")
    step = _STEPS[config.method]
    st = _State(data)
    trace = FitTrace(method=config.method, real=config.real_mode, data=data)
    model = (SecondOrderBarycentric(real=config.real_mode) if second_order
             else UnstructuredBarycentric(real=config.real_mode))
    for k in range(1, n_iter + 1):
        try:
            model, done = _iterate(k, st, step, model, trace, config, data, second_order)
        except SoaaaError as exc:
            trace.status = "failed"
            exc.partial_trace = trace
            raise
        if done:
            break
    return model, trace


def fit_aaa(data, config: FitConfig | None = None, **kw):
    """Unstructured AAA; see :func:`fit`."""
    config = replace(config or FitConfig(), **kw)
    if config.method not in ("aaa", "aaa2"):
        config = replace(config, method="aaa")
    return fit(data, config)


def fit_so_aaa(data, config: FitConfig | None = None, **kw):
    """Second-order AAA with quasi-support points found by variable projection."""
    return fit(data, replace(config or FitConfig(), method="so", **kw))


def fit_lso_aaa(data, config: FitConfig | None = None, **kw):
    """Second-order AAA with fixed quasi-support points and linear weights."""
    return fit(data, replace(config or FitConfig(), method="lso", **kw))


def fit_nso_aaa(data, config: FitConfig | None = None, **kw):
    """Second-order AAA optimizing weights and quasi-support points jointly."""
    return fit(data, replace(config or FitConfig(), method="nso", **kw))
