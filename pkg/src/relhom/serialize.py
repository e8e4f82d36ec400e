"""JSON / CSV / text forms of the engine's values."""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .complexes import Complex
from .errors import InputError
from .exact import ExactSequence
from .modules import AbGroup, ModuleMorphism, ZmModule
from .relative import SubcatDescriptor


def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
        raise InputError(f"{what} must be an integer, got {x!r}")
    return int(x)


def _load(doc) -> Any:
    if isinstance(doc, (dict, list)):
        return doc
    try:
        return json.loads(doc)
    except (TypeError, json.JSONDecodeError) as exc:
        raise InputError(f"malformed JSON: {exc}") from exc


# ---------------------------------------------------------------- modules / maps


def module_from_json(doc, modulus: int) -> ZmModule:
    """A module from a literal string (``"Z4+Z2"``) or a list of orders."""
    if isinstance(doc, str):
        return ZmModule.parse(doc, modulus)
    if isinstance(doc, list):
        try:
            return ZmModule(modulus, [_int(d, "cyclic order") for d in doc])
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    raise InputError(f"cannot read a module from {doc!r}")


def morphism_from_json(doc, source: ZmModule, target: ZmModule) -> ModuleMorphism:
    rows = _load(doc)
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise InputError("a morphism is a row-major list of integer rows")
    A = np.array([[_int(x, "matrix entry") for x in r] for r in rows], dtype=np.int64)
    if A.size == 0:
        A = A.reshape(target.rank, source.rank)
    try:
        return ModuleMorphism(source, target, A)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# ---------------------------------------------------------------- complexes


def complex_to_json(C: Complex) -> dict:
    return {
        "modulus": C.modulus,
        "components": {str(n): list(M.orders) for n, M in C.components.items()},
        "differentials": {str(n): d.matrix.tolist() for n, d in C.differentials.items()},
    }


def complex_from_json(doc) -> Complex:
    data = _load(doc)
    if not isinstance(data, dict) or "modulus" not in data or "components" not in data:
        raise InputError("a complex needs 'modulus' and 'components'")
    m = _int(data["modulus"], "modulus")
    try:
        comps = {int(k): module_from_json(v, m) for k, v in data["components"].items()}
    except ValueError as exc:
        raise InputError(f"bad component degree: {exc}") from exc
    zero = ZmModule.zero(m)
    diffs = {}
    for k, rows in (data.get("differentials") or {}).items():
        n = int(k)
        diffs[n] = morphism_from_json(rows, comps.get(n, zero), comps.get(n + 1, zero))
    try:
        return Complex(m, comps, diffs)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# ---------------------------------------------------------------- subcategories


def subcat_to_json(X: SubcatDescriptor) -> dict:
    return {"modulus": X.modulus, "generators": [list(G.orders) for G in X.generators], "name": X.name}


def subcat_from_json(doc, modulus: int | None = None) -> SubcatDescriptor:
    """``PROJ``, ``GP`` or ``{"modulus":4, "generators":[[4],[2]], "name":"..."}``."""
    if isinstance(doc, str) and not doc.strip().startswith("{"):
        if modulus is None:
            raise InputError("a named subcategory needs a modulus")
        return SubcatDescriptor.named(doc, modulus)
    data = _load(doc)
    if not isinstance(data, dict):
        raise InputError("subcategory descriptor must be a JSON object")
    m = _int(data.get("modulus", modulus), "modulus")
    if modulus is not None and m != modulus:
        raise InputError(f"subcategory over Z/{m} but the job is over Z/{modulus}")
    name = str(data.get("name", "custom"))
    if "generators" not in data:
        return SubcatDescriptor.named(name, m)
    gens = tuple(module_from_json(g, m) for g in data["generators"])
    builtin = name.upper() in ("PROJ", "GP")
    return SubcatDescriptor(m, gens, name, hypotheses_asserted_by_user=not builtin)


# ---------------------------------------------------------------- tables / sequences


def group_list(G: AbGroup) -> list[int]:
    return G.to_list()


def ext_table_csv(table) -> str:
    lines = ["n,invariant_factors"]
    for n, g in sorted(table.entries.items()):
        lines.append(f"{n},{' '.join(str(e) for e in g.invariant_factors)}")
    return "\n".join(lines) + "\n"


def ext_table_text(table) -> str:
    lines = [f"{table.flavor} Ext (depth {table.depth_used})"]
    for n, g in sorted(table.entries.items()):
        lines.append(f"  n={n}: {g}")
    return "\n".join(lines) + "\n"


def exact_sequence_to_json(seq: ExactSequence) -> dict:
    return {
        "modulus": seq.modulus,
        "terms": [{"label": l, "orders": list(T.orders), "group": T.group().to_list()} for l, T in zip(seq.labels, seq.terms)],
        "maps": [f.matrix.tolist() for f in seq.maps],
        "certificates": [
            {
                "node": c.node,
                "label": c.label,
                "node_orders": list(c.node_orders),
                "incoming": [list(r) for r in c.incoming],
                "incoming_source_orders": list(c.incoming_source_orders),
                "outgoing": [list(r) for r in c.outgoing],
                "outgoing_target_orders": list(c.outgoing_target_orders),
                "composite_zero": c.composite_zero,
                "image_in": c.image_in,
                "image_out": c.image_out,
                "size": c.size,
                "ok": c.ok,
            }
            for c in seq.certificates
        ],
        "extra_checks": dict(sorted(seq.extra_checks.items())),
        "exact": seq.exact,
    }


def term_text(label: str, T: ZmModule) -> str:
    return label if label == "0" else f"{label} = {T.group()}"


def exact_sequence_text(seq: ExactSequence) -> str:
    parts = [term_text(l, T) for l, T in zip(seq.labels, seq.terms)]
    status = "exact at all nodes" if seq.exact else "NOT exact"
    bad = [c.label for c in seq.certificates if not c.ok]
    lines = [" -> ".join(parts), f"{status} ({len(seq.certificates)} certified nodes)"]
    if bad:
        lines.append("failing nodes: " + ", ".join(bad))
    failed = [k for k, v in seq.extra_checks.items() if not v]
    if seq.extra_checks:
        lines.append(f"cross-checks: {len(seq.extra_checks) - len(failed)}/{len(seq.extra_checks)} passed")
    return "\n".join(lines) + "\n"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
