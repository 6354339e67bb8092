"""JSON interchange for algebras, quivers, modules, Morita contexts, block specs and certificates.

Scalars are strings ("a/b" over the rationals, decimal residues over F_p).
``dumps`` is canonical (sorted keys, fixed indentation), so loading and
dumping a canonical file reproduces it byte for byte.
"""

from __future__ import annotations

import json
import os
from typing import Any

from .algebra import Algebra, make_algebra
from .constructions import BlockSpec, MoritaContext, morita_context
from .errors import QHAlgError
from .exactmath import QQ, Field, Subspace, field_from_descriptor
from .heredity import HeredityChainCertificate
from .modules import RightModule
from .quiver import QuiverPresentation, compile_bound_quiver


class FormatError(QHAlgError):
    pass


def dumps(obj: Any) -> str:
    if hasattr(obj, "payload"):
        obj = obj.payload()
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _require(d: dict, key: str, kind=None):
    if not isinstance(d, dict) or key not in d:
        raise FormatError(f"missing field {key!r}")
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        raise FormatError(f"field {key!r} has the wrong type")
    return v


def _field(d: dict, override: Field | None) -> Field:
    if override is not None:
        return override
    if "field" not in d:
        return QQ
    try:
        return field_from_descriptor(d["field"])
    except QHAlgError as exc:
        raise FormatError(f"bad field descriptor: {exc}") from exc


def _scalars(F: Field, x):
    if isinstance(x, list):
        return [_scalars(F, y) for y in x]
    if isinstance(x, bool) or isinstance(x, float):
        raise FormatError("scalars must be strings or integers, not floats or booleans")
    try:
        return F.parse(x) if isinstance(x, str) else F.norm(x)
    except (QHAlgError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad scalar {x!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# algebras and quivers


def algebra_from_dict(d: dict, field: Field | None = None) -> Algebra:
    kind = d.get("type", "algebra") if isinstance(d, dict) else None
    if kind == "quiver":
        return compile_bound_quiver(quiver_from_dict(d, field))
    if kind != "algebra":
        raise FormatError(f"expected an algebra or quiver, got {kind!r}")
    F = _field(d, field)
    dim = _require(d, "dim", int)
    consts = _scalars(F, _require(d, "structure_constants", list))
    if len(consts) != dim or any(len(row) != dim for row in consts):
        raise FormatError("structure_constants must be dim x dim x dim")
    if any(len(cell) != dim for row in consts for cell in row):
        raise FormatError("structure_constants must be dim x dim x dim")
    unit = _scalars(F, _require(d, "unit", list))
    idems = _scalars(F, _require(d, "idempotents", list))
    if len(unit) != dim or any(len(e) != dim for e in idems):
        raise FormatError("unit and idempotents must have length dim")
    hint = None
    if d.get("radical_hint") is not None:
        vecs = _scalars(F, d["radical_hint"])
        if any(len(v) != dim for v in vecs):
            raise FormatError("radical_hint vectors must have length dim")
        hint = Subspace.span(F, dim, vecs)
    return make_algebra(
        F, consts, unit, idems,
        labels=d.get("labels"), class_names=d.get("class_names"), radical_hint=hint,
    )


def algebra_to_dict(A: Algebra) -> dict:
    return A.payload()


def quiver_from_dict(d: dict, field: Field | None = None) -> QuiverPresentation:
    F = _field(d, field)
    verts = _require(d, "vertices", list)
    arrows = []
    for a in _require(d, "arrows", list):
        if isinstance(a, dict):
            arrows.append((_require(a, "label"), _require(a, "source"), _require(a, "target")))
        elif isinstance(a, list) and len(a) == 3:
            arrows.append(tuple(a))
        else:
            raise FormatError("arrows must be {label, source, target} objects")
    rels = []
    for rel in d.get("relations", []):
        terms = []
        for t in rel:
            coeff = _scalars(F, _require(t, "coefficient"))
            path = _require(t, "path", list)
            terms.append((coeff, tuple(str(p) for p in path)))
        rels.append(terms)
    L = _require(d, "truncation", int)
    return QuiverPresentation.create(verts, arrows, rels, L, F)


def quiver_to_dict(Q: QuiverPresentation) -> dict:
    fmt = Q.field.format
    return {
        "type": "quiver",
        "field": Q.field.descriptor(),
        "vertices": list(Q.vertices),
        "arrows": [{"label": a, "source": s, "target": t} for a, s, t in Q.arrows],
        "relations": [
            [{"coefficient": fmt(Q.field.norm(c)), "path": list(p)} for c, p in rel]
            for rel in Q.relations
        ],
        "truncation": Q.truncation,
    }


# ---------------------------------------------------------------------------
# modules, contexts, block specs


def module_to_dict(M: RightModule) -> dict:
    return M.payload()


def module_from_dict(d: dict, algebra: Algebra) -> RightModule:
    if d.get("type") != "module":
        raise FormatError("expected a module")
    if d.get("algebra_hash") not in (None, algebra.structure_hash):
        raise FormatError("module refers to a different algebra")
    dim = _require(d, "dim", int)
    action = _scalars(algebra.field, _require(d, "action", list))
    if len(action) != algebra.dim or any(len(m) != dim or any(len(r) != dim for r in m) for m in action):
        raise FormatError("action must be one dim x dim matrix per basis element")
    return RightModule(algebra, dim, tuple(tuple(tuple(r) for r in m) for m in action))


def morita_to_dict(mc: MoritaContext) -> dict:
    fmt = mc.field.format

    def tab(t):
        if isinstance(t, tuple):
            return [tab(x) for x in t]
        return fmt(t)

    out = {
        "type": "morita_context",
        "R": mc.R.payload(),
        "S": mc.S.payload(),
        "M": {"dim": mc.M_dim, "left": tab(mc.M_left), "right": tab(mc.M_right)},
        "N": {"dim": mc.N_dim, "left": tab(mc.N_left), "right": tab(mc.N_right)},
        "phi": tab(mc.phi),
        "psi": tab(mc.psi),
    }
    if mc.labels is not None:
        out["labels"] = list(mc.labels)
    if mc.class_names is not None:
        out["class_names"] = list(mc.class_names)
    return out


def morita_from_dict(d: dict, field: Field | None = None, base_dir: str = ".") -> MoritaContext:
    if d.get("type") != "morita_context":
        raise FormatError("expected a morita_context")
    R = _algebra_ref(_require(d, "R"), field, base_dir)
    S = _algebra_ref(_require(d, "S"), field, base_dir)
    M = _require(d, "M", dict)
    N = _require(d, "N", dict)
    F = R.field
    return morita_context(
        R, S,
        _require(M, "dim", int), _scalars(F, M.get("left", [])), _scalars(F, M.get("right", [])),
        _require(N, "dim", int), _scalars(F, N.get("left", [])), _scalars(F, N.get("right", [])),
        _scalars(F, d.get("phi", [])), _scalars(F, d.get("psi", [])),
        d.get("labels"), d.get("class_names"),
    )


def _algebra_ref(ref, field, base_dir):
    if isinstance(ref, str):
        path = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
        with open(path, encoding="utf-8") as fh:
            ref = json.load(fh)
    return algebra_from_dict(ref, field)


def block_spec_to_dict(spec: BlockSpec) -> dict:
    return {"type": "block_spec", "base": spec.base.payload(), "sizes": list(spec.sizes)}


def block_spec_from_dict(d: dict, field: Field | None = None, base_dir: str = ".") -> BlockSpec:
    if d.get("type") != "block_spec":
        raise FormatError("expected a block_spec")
    base = _algebra_ref(_require(d, "base"), field, base_dir)
    sizes = _require(d, "sizes", list)
    if not all(isinstance(s, int) and not isinstance(s, bool) for s in sizes):
        raise FormatError("sizes must be integers")
    return BlockSpec(base, tuple(sizes))


# ---------------------------------------------------------------------------
# certificates


def certificate_from_dict(d: dict, algebra: Algebra | None = None) -> HeredityChainCertificate:
    if d.get("type") != "heredity_certificate":
        raise FormatError("expected a heredity_certificate")
    layers = _require(d, "layers", list)
    if not all(isinstance(s, list) and all(isinstance(i, int) for i in s) for s in layers):
        raise FormatError("layers must be lists of class indices")
    meta = d.get("metadata", {})
    return HeredityChainCertificate(
        _require(d, "algebra_hash", str),
        tuple(d.get("class_names", [])),
        tuple(tuple(s) for s in layers),
        tuple(dict(x) for x in d.get("diagnostics", [])),
        tuple(sorted(meta.items())),
        algebra,
    )


LOADERS = {
    "algebra": algebra_from_dict,
    "quiver": quiver_from_dict,
    "heredity_certificate": certificate_from_dict,
}


def read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from exc


def write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
