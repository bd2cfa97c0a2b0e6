"""CSV sample files, JSON model files and CSV reports.

Sample CSV
    Header row required, columns addressed by name: ``freq_real``,
    ``freq_imag``, ``g_real``, ``g_imag`` and optionally ``weight``.
    Lines starting with ``#`` are comments.

Model JSON
    Complex arrays are stored as ``{"re": [...], "im": [...]}``. Floats are
    written with ``repr`` precision so reading restores every bit.
"""

from __future__ import annotations

import csv
import io as _io
import json

import numpy as np

from .core import DataSet, FitTrace, IterationRecord, SecondOrderBarycentric, UnstructuredBarycentric
from .errors import SoaaaError

FORMAT_VERSION = 1
SAMPLE_COLUMNS = ("freq_real", "freq_imag", "g_real", "g_imag")
REPORT_COLUMNS = ("k", "objective", "l2_rel", "linf_rel", "ptw_max")


class ParseError(SoaaaError, ValueError):
    """Malformed input file."""


def _data_lines(text):
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def read_samples(path_or_text, text=False) -> DataSet:
    """Read a sample CSV file (or its contents with ``text=True``)."""
    if not text:
        with open(path_or_text, newline="") as fh:
            path_or_text = fh.read()
    lines = _data_lines(path_or_text)
    if not lines:
        raise ParseError("sample file has no header")
    reader = csv.DictReader(_io.StringIO("\n".join(lines)))
    fields = [f.strip() for f in (reader.fieldnames or [])]
    reader.fieldnames = fields
    missing = [c for c in SAMPLE_COLUMNS if c not in fields]
    if missing:
        raise ParseError(f"missing columns: {', '.join(missing)}")
    has_w = "weight" in fields
    mu, g, eta = [], [], []
    for n, row in enumerate(reader, start=2):
        try:
            vals = [float(row[c]) for c in SAMPLE_COLUMNS]
            w = float(row["weight"]) if has_w and row["weight"] not in (None, "") else 1.0
        except (TypeError, ValueError) as exc:
            raise ParseError(f"row {n}: {exc}") from exc
        if None in row:
            raise ParseError(f"row {n}: too many fields")
        mu.append(complex(vals[0], vals[1]))
        g.append(complex(vals[2], vals[3]))
        eta.append(w)
    try:
        return DataSet(mu, g, eta)
    except SoaaaError as exc:
        raise ParseError(str(exc)) from exc


def write_samples(path, data: DataSet):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SAMPLE_COLUMNS + ("weight",))
        for t in data:
            w.writerow([repr(t.mu.real), repr(t.mu.imag), repr(t.g.real), repr(t.g.imag),
                        repr(t.eta)])


def _cplx(a):
    a = np.asarray(a, dtype=complex)
    return {"re": [float(x) for x in a.real.ravel()], "im": [float(x) for x in a.imag.ravel()],
            "shape": list(a.shape)}


def _uncplx(d):
    a = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
    return a.reshape(d.get("shape", [a.size]))


def _matrix(a):
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return _cplx(a)
    return {"re": [float(x) for x in a.ravel()], "shape": list(a.shape)}


def _unmatrix(d):
    re = np.asarray(d["re"], dtype=float)
    a = re + 1j * np.asarray(d["im"], dtype=float) if "im" in d else re
    return a.reshape(d["shape"])


def model_to_dict(model, config=None, trace=None, realization=None):
    """JSON-ready dictionary describing a fitted model."""
    so = isinstance(model, SecondOrderBarycentric)
    params = {f: _cplx(getattr(model, f)) for f in model._fields}
    params["weights_interleaved"] = [float(x) for x in
                                     np.column_stack([model.weights.real, model.weights.imag]).ravel()]
    doc = {
        "format_version": FORMAT_VERSION,
        "form": "second_order" if so else "unstructured",
        "method": trace.method if trace is not None else None,
        "order": int(model.order),
        "realization_order": int(model.realization_order),
        "real_mode": bool(model.real),
        "parameters": params,
    }
    if realization is not None:
        doc["realization"] = {name: _matrix(getattr(realization, name))
                              for name in realization.__dataclass_fields__}
    if config is not None:
        cfg = dict(config.__dict__)
        if cfg.get("support_path") is not None:
            cfg["support_path"] = [int(i) for i in cfg["support_path"]]
        doc["config"] = cfg
    if trace is not None:
        doc["trace"] = [
            {"k": r.order, "objective": r.objective, "l2_rel": r.l2_rel,
             "linf_rel": r.linf_rel, "ptw_max": r.ptw_max, "wall_time": r.wall_time,
             "rank": r.rank, "inner_iterations": r.inner_iterations, "events": list(r.events)}
            for r in trace.records]
        doc["status"] = trace.status
    return doc


def model_from_dict(doc):
    """Inverse of :func:`model_to_dict` for the barycentric part."""
    try:
        p = doc["parameters"]
        cls = SecondOrderBarycentric if doc["form"] == "second_order" else UnstructuredBarycentric
        arrays = {f: _uncplx(p[f]) for f in cls._fields}
        return cls(real=bool(doc.get("real_mode", False)), **arrays)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"invalid model document: {exc}") from exc


def trace_from_dict(doc):
    tr = FitTrace(method=doc.get("method") or "", real=bool(doc.get("real_mode")),
                  status=doc.get("status", "ok"))
    for r in doc.get("trace", []):
        tr.append(IterationRecord(order=r["k"], objective=r["objective"], l2_rel=r["l2_rel"],
                                  linf_rel=r["linf_rel"], ptw_max=r["ptw_max"],
                                  wall_time=r.get("wall_time", 0.0), rank=r.get("rank"),
                                  inner_iterations=r.get("inner_iterations", 0),
                                  events=list(r.get("events", []))))
    return tr


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_model(path, model, config=None, trace=None, realization=None):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model, config, trace, realization), fh, indent=1,
                  default=_json_default)


def read_model(path):
    """Return ``(model, document)``."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return model_from_dict(doc), doc


def write_report(path, trace: FitTrace, realization_orders=False, comment=None):
    """CSV report with columns ``k, objective, l2_rel, linf_rel, ptw_max``.

    ``comment`` is written as a leading ``#`` line.
    """
    orders = trace.realization_orders if realization_orders else trace.orders
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh)
        w.writerow(REPORT_COLUMNS)
        for k, r in zip(orders, trace.records):
            w.writerow([int(k), repr(r.objective), repr(r.l2_rel), repr(r.linf_rel),
                        repr(r.ptw_max)])


def read_report(path):
    """Return a dict of column arrays from a report CSV."""
    with open(path, newline="") as fh:
        lines = _data_lines(fh.read())
    if not lines:
        raise ParseError(f"{path}: empty report")
    reader = csv.DictReader(_io.StringIO("\n".join(lines)))
    if "k" not in (reader.fieldnames or []):
        raise ParseError(f"{path}: missing column k")
    cols = {c: [] for c in reader.fieldnames}
    try:
        for row in reader:
            for c in cols:
                cols[c].append(float(row[c]))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return {c: np.asarray(v) for c, v in cols.items()}


def realization_from_dict(doc):
    """Rebuild the stored realization of a model document, if any."""
    from .statespace import FirstOrderRealization, SecondOrderRealization

    mats = doc.get("realization")
    if not mats:
        return None
    arrays = {k: _unmatrix(v) for k, v in mats.items()}
    cls = SecondOrderRealization if "K" in arrays else FirstOrderRealization
    return cls(**arrays)
