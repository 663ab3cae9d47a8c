"""Reading and writing model documents.

A document is a JSON object::

    {
      "lattice": {"kind": "lukasiewicz", "n": 11},
      "worlds": ["bf", "bm", "cf", "cm"],
      "relation": [["1", "0.5", ...], ...],       # labels, rows are sources
      "valuation": {"f": {"bf": "1", "bm": "0", ...}, ...},
      "witness_world": "bm"                       # optional
    }

A layered document replaces ``relation`` with ``weak`` and ``strict``, each
mapping a level label to a 0/1 matrix. ``"class": "general"`` marks a model
whose relation need not be a preorder.
"""
from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DocumentError, GradedPrefError
from .lattice import Chain, chain_from_spec
from .model import GeneralModel, PreferenceModel
from .transform import LayeredModel

__all__ = ["load_document", "model_from_document", "model_to_document", "read_model", "write_model", "dumps"]


def load_document(source) -> dict:
    """Parse a document from a path or a JSON string."""
    if isinstance(source, dict):
        return source
    text = None
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith(("{", "["))):
        try:
            text = Path(source).read_text()
        except OSError as e:
            raise DocumentError(f"cannot read {source}: {e.strerror}") from None
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"not valid JSON: {e.msg} at line {e.lineno} column {e.colno}") from None
    if not isinstance(doc, dict):
        raise DocumentError("a model document must be a JSON object")
    return doc


def _need(doc, key, kind):
    if key not in doc:
        raise DocumentError(f"missing field {key!r}")
    val = doc[key]
    if not isinstance(val, kind):
        raise DocumentError(f"field {key!r} has the wrong type")
    return val


def _chain(doc) -> Chain:
    spec = _need(doc, "lattice", dict)
    try:
        return chain_from_spec(spec)
    except (KeyError, TypeError, ValueError) as e:
        raise DocumentError(f"bad lattice spec: {e}") from None


def _square(rows, n, what):
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise DocumentError(f"{what} must be a {n}x{n} matrix")
    return rows


def _valuation_indices(doc, chain, worlds) -> dict[str, list[int]]:
    val = doc.get("valuation", {})
    if not isinstance(val, dict):
        raise DocumentError("field 'valuation' must map variables to world tables")
    out = {}
    for var, table in val.items():
        if isinstance(table, dict):
            missing = [w for w in worlds if w not in table]
            if missing:
                raise DocumentError(f"variable {var!r} has no value at world {missing[0]!r}")
            extra = [w for w in table if w not in worlds]
            if extra:
                raise DocumentError(f"variable {var!r} names unknown world {extra[0]!r}")
            table = [table[w] for w in worlds]
        if not isinstance(table, list) or len(table) != len(worlds):
            raise DocumentError(f"variable {var!r} needs one value per world")
        try:
            out[var] = [chain.index(x) for x in table]
        except GradedPrefError as e:
            raise DocumentError(f"variable {var!r}: {e}") from None
    return out


def model_from_document(source, *, check: bool = True):
    """Build a PreferenceModel, GeneralModel or LayeredModel from a document."""
    doc = load_document(source)
    chain = _chain(doc)
    worlds = [str(w) for w in _need(doc, "worlds", list)]
    n = len(worlds)
    if len(set(worlds)) != n:
        raise DocumentError("world names must be distinct")
    val = _valuation_indices(doc, chain, worlds)
    lab = chain.labels
    if "weak" in doc or "strict" in doc:
        layers = {}
        for name in ("weak", "strict"):
            table = _need(doc, name, dict)
            layers[name] = {}
            for key, mat in table.items():
                try:
                    b = chain.index(key)
                except GradedPrefError as e:
                    raise DocumentError(f"{name} layer key: {e}") from None
                layers[name][b] = np.array(_square(mat, n, f"{name} layer {key}"), dtype=bool)
        try:
            return LayeredModel(chain, worlds, layers["weak"], layers["strict"], val)
        except GradedPrefError as e:
            raise DocumentError(str(e)) from None
    rows = _square(_need(doc, "relation", list), n, "relation")
    try:
        rel = [[chain.index(x) for x in row] for row in rows]
    except GradedPrefError as e:
        raise DocumentError(f"relation: {e}") from None
    cls = doc.get("class", "preference")
    valuation = {k: [lab[i] for i in v] for k, v in val.items()}
    if cls == "general":
        return GeneralModel(chain, worlds, rel, valuation)
    if cls != "preference":
        raise DocumentError(f"unknown model class {cls!r}")
    return PreferenceModel(chain, worlds, rel, valuation, check=check)


def model_to_document(m, witness_world: str | None = None) -> dict[str, Any]:
    chain = m.chain
    lab = chain.labels
    doc: dict[str, Any] = {"lattice": chain.to_spec(), "worlds": list(m.worlds)}
    if isinstance(m, LayeredModel):
        doc["weak"] = {lab[b]: m.weak[b].astype(int).tolist() for b in chain.elements}
        doc["strict"] = {lab[b]: m.strict[b].astype(int).tolist() for b in chain.positive}
    else:
        if isinstance(m, GeneralModel):
            doc["class"] = "general"
        doc["relation"] = [[lab[x] for x in row] for row in np.asarray(m.P).tolist()]
    doc["valuation"] = {
        var: {w: lab[int(x)] for w, x in zip(m.worlds, col)} for var, col in m.valuation.items()
    }
    if witness_world is not None:
        doc["witness_world"] = str(witness_world)
    return doc


def dumps(m, witness_world=None) -> str:
    """Serialise with one matrix row per line so documents diff well."""
    text = json.dumps(model_to_document(m, witness_world), indent=2)
    # innermost lists (matrix rows, world lists) go on one line
    text = _FLAT_LIST.sub(lambda g: "[" + " ".join(g.group(1).split()) + "]", text)
    return _FLAT_DICT.sub(lambda g: "{" + " ".join(g.group(1).split()) + "}", text) + "\n"


_FLAT_LIST = re.compile(r"\[\s+([^\[\]{}]*?)\s+\]")
_FLAT_DICT = re.compile(r"\{\s+([^\[\]{}]*?)\s+\}")


def read_model(path, *, check: bool = True):
    return model_from_document(Path(path), check=check)


def write_model(m, path, witness_world=None) -> None:
    Path(path).write_text(dumps(m, witness_world))
