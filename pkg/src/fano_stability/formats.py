"""JSON documents for varieties. Field order is fixed so output is byte-stable."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .lattice import (
    CurveClass,
    DivisorClass,
    FibrationDescriptor,
    LatticeError,
    TrilinearForm,
    Variety3Fold,
)

VARIETY_FIELDS = ("name", "rank", "basis", "triples", "K", "curves", "fibrations", "classes", "provenance")


def variety_to_dict(X: Variety3Fold) -> dict[str, Any]:
    return {
        "name": X.name,
        "rank": X.rank,
        "basis": list(X.basis),
        "triples": [list(t) for t in X.form.triples()],
        "K": list(X.canonical.coeffs),
        "curves": [{"name": c.name, "genus": c.genus, "meets": list(c.meets)} for c in X.curves],
        "fibrations": [
            {
                "name": f.name,
                "target_dim": f.target_dim,
                "relative_rank": f.relative_rank,
                "pullback_K": list(f.pullback_canonical.coeffs),
                "discriminant": f.discriminant,
            }
            for f in X.fibrations
        ],
        "classes": [{"name": k, "coeffs": list(v.coeffs)} for k, v in X.named],
        "provenance": list(X.provenance),
    }


def _int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise LatticeError(f"{what} must be an integer, got {value!r}")
    return value


def _ints(values: Any, what: str, length: int | None = None) -> tuple[int, ...]:
    if not isinstance(values, list):
        raise LatticeError(f"{what} must be a list of integers")
    out = tuple(_int(v, what) for v in values)
    if length is not None and len(out) != length:
        raise LatticeError(f"{what} has length {len(out)}, expected {length}")
    return out


def variety_from_dict(doc: Any) -> Variety3Fold:
    if not isinstance(doc, dict):
        raise LatticeError("variety document must be a JSON object")
    if "payload" in doc and "status" in doc:
        doc = doc["payload"]
    try:
        rho = _int(doc["rank"], "rank")
        basis = doc["basis"]
        if not isinstance(basis, list) or len(basis) != rho or not all(isinstance(b, str) for b in basis):
            raise LatticeError("basis must be a list of rank labels")
        entries = {}
        for t in doc["triples"]:
            i, j, k, v = _ints(t, "triple", 4)
            if not i <= j <= k:
                raise LatticeError(f"triple indices must be sorted, got {[i, j, k]}")
            entries[(i, j, k)] = v
        curves = tuple(
            CurveClass(str(c["name"]), _int(c["genus"], "genus"), _ints(c["meets"], "meets", rho))
            for c in doc.get("curves", [])
        )
        fibrations = tuple(
            FibrationDescriptor(
                str(f["name"]),
                _int(f["target_dim"], "target_dim"),
                _int(f["relative_rank"], "relative_rank"),
                DivisorClass(_ints(f["pullback_K"], "pullback_K", rho)),
                bool(f.get("discriminant", False)),
            )
            for f in doc.get("fibrations", [])
        )
        named = tuple(
            (str(c["name"]), DivisorClass(_ints(c["coeffs"], "class", rho))) for c in doc.get("classes", [])
        )
        return Variety3Fold(
            name=str(doc["name"]),
            basis=tuple(basis),
            form=TrilinearForm(rho, entries),
            canonical=DivisorClass(_ints(doc["K"], "K", rho)),
            curves=curves,
            fibrations=fibrations,
            named=named,
            provenance=tuple(str(s) for s in doc.get("provenance", [])),
        )
    except KeyError as exc:
        raise LatticeError(f"variety document lacks field {exc}") from exc
    except TypeError as exc:
        raise LatticeError(f"malformed variety document: {exc}") from exc


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_variety(path: str | Path) -> Variety3Fold:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise LatticeError(f"{path}: not valid JSON ({exc})") from exc
    return variety_from_dict(doc)


def save_variety(X: Variety3Fold, path: str | Path) -> None:
    Path(path).write_text(dumps(variety_to_dict(X)))
