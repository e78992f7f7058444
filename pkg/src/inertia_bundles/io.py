"""The ``inertia-bundles/1`` JSON document format.

A document describes one bundle and, optionally, fields on it::

    {
      "schema": "inertia-bundles/1",
      "base": {"n_vertices": N},
      "bundle": {"rank": n, "transitions": [[t_0 row-major], ..., [t_{N-1}]]},
      "form": [[Q_0 row-major], ...],                    # optional
      "subbundles": [{"dim": p, "frames": [[B_0], ...]}],  # optional, n x p frames
      "gauge": [[phi_0 row-major], ...],                 # optional
      "gauge_path": [[[phi_0(t_0)], ...], ...],          # optional
      "invariants": {"iso": {...}, "homotopy": {...}}    # optional, informational
    }

Two subbundle entries whose dimensions add up to the rank are read as a
splitting ``(plus, minus)``. Reals are written with 17 significant digits and
the writer is byte-for-byte deterministic.
"""
import json
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .bundle import CycleBase, DiscreteBundle, FormField, GaugeField, SplittingField, SubbundleField
from .errors import DocumentError
from .linalg import DEFAULT_TOL, format_real, row_major

SCHEMA_VERSION = "inertia-bundles/1"

_matrix_list = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "base", "bundle"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "base": {
            "type": "object",
            "required": ["n_vertices"],
            "properties": {"n_vertices": {"type": "integer", "minimum": 3}},
        },
        "bundle": {
            "type": "object",
            "required": ["rank", "transitions"],
            "properties": {"rank": {"type": "integer", "minimum": 1}, "transitions": _matrix_list},
        },
        "form": _matrix_list,
        "subbundles": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["dim", "frames"],
                "properties": {"dim": {"type": "integer", "minimum": 0}, "frames": _matrix_list},
            },
        },
        "gauge": _matrix_list,
        "gauge_path": {"type": "array", "items": _matrix_list},
        "invariants": {"type": "object"},
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


@dataclass
class Document:
    bundle: DiscreteBundle
    form: FormField = None
    subbundles: list = field(default_factory=list)
    gauge: GaugeField = None
    gauge_path: list = None
    invariants: dict = None

    def splitting(self):
        """The splitting stored as two complementary subbundle entries, if any."""
        if len(self.subbundles) == 2 and sum(s.dim for s in self.subbundles) == self.bundle.rank:
            return SplittingField(*self.subbundles)
        return None


def _stack(name, rows, n_vertices, shape):
    if len(rows) != n_vertices:
        raise DocumentError(f"{name}: expected {n_vertices} entries, got {len(rows)}")
    size = shape[0] * shape[1]
    for i, row in enumerate(rows):
        if len(row) != size:
            raise DocumentError(f"{name}[{i}]: expected {size} reals, got {len(row)}")
    return np.array(rows, dtype=np.float64).reshape((n_vertices,) + shape)


def validate(data):
    """Schema-check a decoded document; raise :class:`DocumentError` listing the problems."""
    errors = sorted(_VALIDATOR.iter_errors(data), key=lambda e: list(e.path))
    if errors:
        lines = [f"{'/'.join(str(p) for p in e.path) or '<root>'}: {e.message}" for e in errors[:20]]
        raise DocumentError("schema validation failed:\n  " + "\n  ".join(lines))


def from_dict(data, tol=DEFAULT_TOL):
    """Build a :class:`Document`; shape problems raise :class:`DocumentError`,
    mathematical ones (degenerate form, bad frames) the usual domain errors."""
    validate(data)
    n_v = data["base"]["n_vertices"]
    n = data["bundle"]["rank"]
    bundle = DiscreteBundle(CycleBase(n_v), n, _stack("bundle.transitions", data["bundle"]["transitions"], n_v, (n, n)))
    doc = Document(bundle)
    if "form" in data:
        doc.form = FormField(bundle, _stack("form", data["form"], n_v, (n, n)), tol)
    for j, entry in enumerate(data.get("subbundles", [])):
        p = entry["dim"]
        if p > n:
            raise DocumentError(f"subbundles[{j}].dim = {p} exceeds rank {n}")
        doc.subbundles.append(SubbundleField(bundle, p, _stack(f"subbundles[{j}].frames", entry["frames"], n_v, (n, p))))
    if "gauge" in data:
        doc.gauge = GaugeField(bundle, _stack("gauge", data["gauge"], n_v, (n, n)))
    if "gauge_path" in data:
        doc.gauge_path = [
            GaugeField(bundle, _stack(f"gauge_path[{j}]", g, n_v, (n, n))) for j, g in enumerate(data["gauge_path"])
        ]
    doc.invariants = data.get("invariants")
    return doc


def load(path, tol=DEFAULT_TOL):
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON ({exc})") from None
    return from_dict(data, tol)


def _mats(stack):
    return [row_major(m) for m in stack]


def to_dict(doc):
    out = {
        "schema": SCHEMA_VERSION,
        "base": {"n_vertices": doc.bundle.n_vertices},
        "bundle": {"rank": doc.bundle.rank, "transitions": _mats(doc.bundle.transitions)},
    }
    if doc.form is not None:
        out["form"] = _mats(doc.form.forms)
    if doc.subbundles:
        out["subbundles"] = [{"dim": s.dim, "frames": _mats(s.frames)} for s in doc.subbundles]
    if doc.gauge is not None:
        out["gauge"] = _mats(doc.gauge.maps)
    if doc.gauge_path is not None:
        out["gauge_path"] = [_mats(g.maps) for g in doc.gauge_path]
    if doc.invariants is not None:
        out["invariants"] = doc.invariants
    return out


def _scalar(x):
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format_real(x) if np.isfinite(x) else "null"
    if isinstance(x, str):
        return json.dumps(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _is_flat(x):
    return isinstance(x, (list, tuple)) and all(not isinstance(v, (list, tuple, dict)) for v in x)


def dumps(obj, indent=0):
    """Deterministic JSON text; numeric rows stay on one line, reals get 17 digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if _is_flat(obj):
            return "[" + ", ".join(_scalar(v) for v in obj) + "]"
        items = [inner + dumps(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return _scalar(obj)


def save(doc_or_dict, path):
    data = to_dict(doc_or_dict) if isinstance(doc_or_dict, Document) else doc_or_dict
    text = dumps(data) + "\n"
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as exc:
        raise DocumentError(f"cannot write {path}: {exc.strerror}") from None
    return text
