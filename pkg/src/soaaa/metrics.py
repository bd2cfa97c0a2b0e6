"""Weighted error measures and the MORscore."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyInput

log = logging.getLogger(__name__)

EPS_MIN = 1e-8


@dataclass(frozen=True)
class ErrorReport:
    """Weighted pointwise errors ``eta_i |H(mu_i) - g_i|`` and their summaries.

    ``ptw_zero_division`` is set when some ``g_i = 0`` made the pointwise
    relative error infinite.
    """

    eps_vector: np.ndarray
    l2_rel: float
    linf_rel: float
    ptw_max: float
    ptw_zero_division: bool = False


def _ratio(num, den):
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return float(num / den)


def error_report(data, model=None, values=None) -> ErrorReport:
    """Weighted relative L2, Linf and pointwise errors of ``model`` on ``data``.

    Parameters
    ----------
    data : DataSet
    model : callable, optional
        Evaluated at ``data.mu``.
    values : array_like, optional
        Precomputed model values, used instead of ``model``.
    """
    H = np.asarray(model(data.mu) if values is None else values, dtype=complex)
    eta = np.asarray(data.eta, dtype=float)
    g = np.asarray(data.g, dtype=complex)
    eps = eta * np.abs(H - g)
    geta = eta * np.abs(g)
    l2 = _ratio(np.linalg.norm(eps), np.linalg.norm(geta))
    linf = _ratio(eps.max(initial=0.0), geta.max(initial=0.0))
    zero = geta == 0
    flag = bool(np.any(zero & (eps > 0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        ptw = np.where(zero, np.where(eps > 0, np.inf, 0.0), eps / np.where(zero, 1.0, geta))
    return ErrorReport(eps, l2, linf, float(ptw.max(initial=0.0)), flag)


def morscore(orders, errors, kmax=None, eps_min=EPS_MIN) -> float:
    """Area under the normalized log-error versus order curve.

    Each error is clamped to ``[eps_min, 1]`` and mapped to
    ``log10(eps) / floor(log10(eps_min))``; orders are mapped to
    ``k / kmax``. The piecewise linear curve is integrated with the
    trapezoidal rule, holding the first value constant on ``[0, k_1/kmax]``.

    Parameters
    ----------
    orders : array_like of int
        Strictly increasing orders.
    errors : array_like of float
        Error attained at each order.
    kmax : float, optional
        Normalization of the order axis; defaults to ``orders[-1]``.
    eps_min : float
        Smallest attainable error.
    """
    k = np.asarray(orders, dtype=float)
    e = np.asarray(errors, dtype=float)
    if k.size == 0:
        raise EmptyInput("morscore needs at least one order")
    if k.shape != e.shape:
        raise ValueError("orders and errors must have the same length")
    if not eps_min > 0 or eps_min >= 1:
        raise DomainError("eps_min must lie in (0, 1)")
    if np.any(np.diff(k) <= 0) or k[0] <= 0:
        raise DomainError("orders must be positive and strictly increasing")
    kmax = float(k[-1] if kmax is None else kmax)
    e = np.nan_to_num(e, nan=1.0, posinf=1.0)
    phi_e = np.log10(np.clip(e, eps_min, 1.0)) / math.floor(math.log10(eps_min))
    phi_k = k / kmax
    area = phi_e[0] * phi_k[0] + np.trapezoid(phi_e, phi_k)
    return float(np.clip(area, 0.0, 1.0))


def objective_trace(trace):
    """``(k, ||z^(k)||^2)`` pairs recorded in a fit trace."""
    return [(r.order, r.objective) for r in trace.records]
