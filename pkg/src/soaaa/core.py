"""Sample sets, barycentric models and fit traces.

Barycentric models are immutable. A model built with ``real=True`` stores
only the representatives with positive imaginary support points; the
transfer function it represents also contains the conjugate terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    DomainError,
    EmptyDataSet,
    NonFiniteInput,
    PoleHit,
    ShapeMismatch,
)

#: Relative distance below which an evaluation point is snapped to a
#: (quasi-)support point and the stored value is returned.
SNAP_TOL = 1e-14


def _readonly(a, dtype=complex):
    a = np.array(a, dtype=dtype).reshape(-1)
    a.setflags(write=False)
    return a


def snap_mask(s, nodes, tol=SNAP_TOL):
    """Boolean matrix ``|s_i - nodes_j| <= tol * max(1, |nodes_j|)``."""
    s = np.asarray(s, dtype=complex).reshape(-1)
    nodes = np.asarray(nodes, dtype=complex).reshape(-1)
    return np.abs(s[:, None] - nodes[None, :]) <= tol * np.maximum(1.0, np.abs(nodes))[None, :]


@dataclass(frozen=True)
class DataTriple:
    """One sample: frequency point ``mu``, value ``g`` and weight ``eta``."""

    mu: complex
    g: complex
    eta: float = 1.0


class DataSet:
    """Ordered collection of samples ``(mu_i, g_i, eta_i)``.

    Indices are zero-based and contiguous; :meth:`remove` returns a new set
    whose indices are relabelled without gaps.

    Parameters
    ----------
    mu, g : array_like of complex
        Sample points and function values.
    eta : array_like of float, optional
        Positive weights. Defaults to ones.
    check : bool
        Validate distinctness of ``mu``. Skipped internally when the set is
        derived from an already validated one.
    """

    __slots__ = ("mu", "g", "eta")

    def __init__(self, mu, g, eta=None, check=True):
        mu = _readonly(mu)
        g = _readonly(g)
        eta = _readonly(np.ones(mu.shape) if eta is None else eta, dtype=float)
        if not (mu.shape == g.shape == eta.shape):
            raise ShapeMismatch(
                f"mu, g, eta have lengths {mu.size}, {g.size}, {eta.size}")
        if check:
            if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(g))
                    and np.all(np.isfinite(eta))):
                raise NonFiniteInput("samples must be finite")
            if np.any(eta <= 0):
                raise DomainError("weights eta must be positive")
            if np.unique(mu).size != mu.size:
                raise DomainError("sample points mu must be pairwise distinct")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "eta", eta)

    def __setattr__(self, name, value):
        raise AttributeError("DataSet is immutable")

    @classmethod
    def from_triples(cls, triples):
        triples = list(triples)
        return cls([t.mu for t in triples], [t.g for t in triples],
                   [t.eta for t in triples])

    def __len__(self):
        return self.mu.size

    def __getitem__(self, i) -> DataTriple:
        return DataTriple(complex(self.mu[i]), complex(self.g[i]), float(self.eta[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def __repr__(self):
        return f"DataSet(M={len(self)})"

    def __eq__(self, other):
        if not isinstance(other, DataSet):
            return NotImplemented
        return (np.array_equal(self.mu, other.mu) and np.array_equal(self.g, other.g)
                and np.array_equal(self.eta, other.eta))

    __hash__ = None

    def remove(self, index) -> "DataSet":
        """Return a copy without sample ``index`` (indices are relabelled)."""
        if len(self) == 0:
            raise EmptyDataSet("cannot remove from an empty data set")
        keep = np.ones(len(self), dtype=bool)
        keep[index] = False
        return DataSet(self.mu[keep], self.g[keep], self.eta[keep], check=False)

    def subset(self, indices) -> "DataSet":
        idx = np.asarray(indices, dtype=int)
        return DataSet(self.mu[idx], self.g[idx], self.eta[idx], check=False)

    def with_weights(self, eta) -> "DataSet":
        return DataSet(self.mu, self.g, eta)

    def relative_weights(self) -> "DataSet":
        """Weights ``eta_i = 1/|g_i|``."""
        mag = np.abs(self.g)
        if np.any(mag == 0):
            raise DomainError("relative weighting needs nonzero samples")
        return DataSet(self.mu, self.g, 1.0 / mag, check=False)


class _BarycentricBase:
    """Shared storage and evaluation logic for both barycentric forms."""

    _fields: tuple = ()

    def __init__(self, real=False, **arrays):
        k = None
        for name in self._fields:
            a = _readonly(arrays[name])
            if k is not None and a.size != k:
                raise ShapeMismatch("parameter arrays must share one length")
            k = a.size
            object.__setattr__(self, name, a)
        object.__setattr__(self, "real", bool(real))
        if self.real and np.any(self.lambdas.imag <= 0):
            raise DomainError("real models need Im(lambda) > 0 for every representative")
        if np.unique(self.lambdas).size != self.lambdas.size:
            raise DomainError("support points must be pairwise distinct")

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def order(self) -> int:
        """Number of stored support points (representatives in real mode)."""
        return self.lambdas.size

    @property
    def realization_order(self) -> int:
        return 2 * self.order if self.real else self.order

    @property
    def zero_weights(self):
        """Indices of stored weights that are exactly zero."""
        return np.flatnonzero(self.weights == 0)

    def _augmented_arrays(self):
        out = {}
        for name in self._fields:
            a = getattr(self, name)
            out[name] = np.concatenate([a, a.conj()]) if self.real else a
        return out

    def augmented(self):
        """Equivalent model with the conjugate terms stored explicitly."""
        if not self.real:
            return self
        return type(self)(real=False, **self._augmented_arrays())

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return self.real == other.real and all(
            np.array_equal(getattr(self, f), getattr(other, f)) for f in self._fields)

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}(order={self.order}, real={self.real})"

    # subclasses provide _kernel(s, arrays) -> (S x n) matrix of 1/denominator terms
    # and _nodes(arrays) -> list of arrays at which the model interpolates
    def _sums(self, s, a):
        C = self._kernel(s, a) * a["weights"][None, :]
        return C @ a["h_values"], 1.0 + C.sum(axis=1)

    def denominator(self, s):
        """Denominator sum ``1 + sum_j w_j / q_j(s)`` at the points ``s``."""
        s_arr = np.asarray(s, dtype=complex)
        a = self._augmented_arrays()
        nz = a["weights"] != 0
        a = {k: v[nz] for k, v in a.items()}
        with np.errstate(divide="ignore", invalid="ignore"):
            _, d = self._sums(s_arr.reshape(-1), a)
        return d.reshape(s_arr.shape) if s_arr.ndim else d[0]

    def __call__(self, s):
        """Evaluate the transfer function.

        At points within the snap tolerance of a support point (or
        quasi-support point) with nonzero weight the stored value is
        returned. Raises :class:`PoleHit` where the denominator vanishes.
        """
        s_arr = np.asarray(s, dtype=complex)
        x = s_arr.reshape(-1)
        out = np.zeros(x.shape, dtype=complex)
        a = self._augmented_arrays()
        nz = a["weights"] != 0
        a = {k: v[nz] for k, v in a.items()}
        if a["weights"].size == 0:
            return out.reshape(s_arr.shape) if s_arr.ndim else complex(out[0])

        done = np.zeros(x.shape, dtype=bool)
        for nodes in self._nodes(a):
            hit = snap_mask(x, nodes)
            rows = hit.any(axis=1) & ~done
            if rows.any():
                out[rows] = a["h_values"][hit[rows].argmax(axis=1)]
                done |= rows
        rest = ~done
        if rest.any():
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                n, d = self._sums(x[rest], a)
                val = n / d
            bad = (d == 0) | ~np.isfinite(val)
            if bad.any():
                p = complex(x[rest][bad][0])
                raise PoleHit(f"model evaluated at a pole near s={p}", point=p)
            out[rest] = val
        return out.reshape(s_arr.shape) if s_arr.ndim else complex(out[0])


class UnstructuredBarycentric(_BarycentricBase):
    """First-order barycentric form.

    ``H(s) = sum_j h_j w_j / (s - lambda_j) / (1 + sum_j w_j / (s - lambda_j))``

    Parameters
    ----------
    lambdas, h_values, weights : array_like of complex
        Support points, interpolated values and barycentric weights.
    real : bool
        When true, the arrays hold representatives with ``Im(lambda) > 0``
        and the model also contains their conjugates.
    """

    _fields = ("lambdas", "h_values", "weights")

    def __init__(self, lambdas=(), h_values=(), weights=(), real=False):
        super().__init__(real=real, lambdas=lambdas, h_values=h_values, weights=weights)

    def _kernel(self, s, a):
        return 1.0 / (s[:, None] - a["lambdas"][None, :])

    def _nodes(self, a):
        return [a["lambdas"]]


class SecondOrderBarycentric(_BarycentricBase):
    """Second-order barycentric form with quasi-support points ``sigmas``.

    ``H(s) = sum_j h_j w_j / q_j(s) / (1 + sum_j w_j / q_j(s))`` with
    ``q_j(s) = (s - lambda_j)(s - sigma_j)``. The model interpolates
    ``h_j`` at both ``lambda_j`` and ``sigma_j``.
    """

    _fields = ("lambdas", "h_values", "weights", "sigmas")

    def __init__(self, lambdas=(), h_values=(), weights=(), sigmas=(), real=False):
        super().__init__(real=real, lambdas=lambdas, h_values=h_values,
                         weights=weights, sigmas=sigmas)
        if np.any(self.lambdas == self.sigmas):
            raise DomainError("lambda_j and sigma_j must differ")

    def _kernel(self, s, a):
        return 1.0 / ((s[:, None] - a["lambdas"][None, :])
                      * (s[:, None] - a["sigmas"][None, :]))

    def _nodes(self, a):
        return [a["lambdas"], a["sigmas"]]

    def to_unstructured(self) -> UnstructuredBarycentric:
        """Exact unstructured form on the support set ``{lambda_j} U {sigma_j}``.

        Uses the partial fraction split
        ``1/((s-l)(s-s')) = (1/(s-l) - 1/(s-s')) / (l - s')`` so that the
        weights become ``w_j/(lambda_j - sigma_j)`` and its negative.
        Real models are converted through their augmented (complex) form.
        """
        m = self.augmented()
        what = m.weights / (m.lambdas - m.sigmas)
        return UnstructuredBarycentric(
            np.concatenate([m.lambdas, m.sigmas]),
            np.concatenate([m.h_values, m.h_values]),
            np.concatenate([what, -what]),
        )


def eval_unstructured(model: UnstructuredBarycentric, s):
    """Evaluate a first-order barycentric model (see :class:`UnstructuredBarycentric`)."""
    return model(s)


def eval_second_order(model: SecondOrderBarycentric, s):
    """Evaluate a second-order barycentric model."""
    return model(s)


@dataclass
class IterationRecord:
    """Summary of one completed greedy iteration."""

    order: int
    objective: float
    l2_rel: float
    linf_rel: float
    ptw_max: float
    wall_time: float
    n_remaining: int = 0
    n_support: int = 0
    rank: int | None = None
    inner_iterations: int = 0
    events: list = field(default_factory=list)
    model: Any = None


@dataclass
class FitTrace:
    """Per-iteration history of a fit; orders strictly increase."""

    method: str = ""
    real: bool = False
    records: list = field(default_factory=list)
    data: DataSet | None = None
    status: str = "ok"

    def append(self, rec: IterationRecord):
        if self.records and rec.order <= self.records[-1].order:
            raise ValueError("orders in a FitTrace must strictly increase")
        self.records.append(rec)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def orders(self):
        return np.array([r.order for r in self.records], dtype=int)

    @property
    def objectives(self):
        return np.array([r.objective for r in self.records])

    @property
    def l2_errors(self):
        return np.array([r.l2_rel for r in self.records])

    @property
    def realization_orders(self):
        return 2 * self.orders if self.real else self.orders

    @property
    def events(self):
        return [(r.order, e) for r in self.records for e in r.events]
