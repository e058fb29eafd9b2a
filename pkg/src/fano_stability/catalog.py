"""Deformation classes of Fano 3-folds with their tangent-bundle verdicts.

The shipped ``data/catalog.json`` is produced by :func:`build_document`; the
verdicts are the published classification, and entries that carry a recipe
can be re-checked with :func:`verify_entry`.

Classes with ``b2 = None`` are stable classes with ``b2 >= 2`` that are not
individually identified here; they are counted but never mechanized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any

from . import constructions
from .cohomology import IndexedFano, check_b2_one_stability
from .formats import variety_from_dict, variety_to_dict
from .lattice import LatticeError, degree_form, format_rational
from .stability import (
    SEMISTABLE,
    STABLE,
    UNSTABLE,
    ConstraintSystem,
    Inequality,
    conic_blowup_vanishing,
    maximize_over_branches,
    slope,
    tangent,
    theorem1_check,
)

VERDICTS = ("stable", "semistable", "unstable")
TOTAL_B2_AT_LEAST_2 = 87


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    description: str
    b2: int | None
    verdict: str
    provenance: str
    recipe: dict | None = None
    variety: dict | None = None
    witness: dict | None = None

    @property
    def mechanized(self) -> bool:
        return self.recipe is not None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "b2": self.b2,
            "verdict": self.verdict,
            "provenance": self.provenance,
            "recipe": self.recipe,
            "variety": self.variety,
            "witness": self.witness,
        }


_SEMISTABLE = [
    ("i.1", "P^3 blown up along a line", 2, "p3_line"),
    ("i.2", "P^3 blown up along two disjoint lines, then along two fibres over the first line", 5,
     "p3_two_lines_two_fibres"),
    ("i.3.p2", "P^2 x P^1", 2, "p2xp1"),
    ("i.3.p1xp1", "P^1 x P^1 x P^1", 3, "p1xp1xp1"),
    *[(f"i.3.dp{k}", f"(P^2 blown up in {k} general points) x P^1", k + 2, f"dp{k}xp1") for k in range(1, 9)],
]

_UNSTABLE = [
    ("ii.1", "V7 = P(O + O(1)) over P^2, the blow-up of P^3 in a point", 2, "v7"),
    ("ii.2", "P(O + O(2)) over P^2, the Veronese cone blown up in its vertex", 2, "w4_blowup"),
    ("ii.3", "V7 blown up along a line in the exceptional P^2", 3, "v7_line_in_E"),
    ("ii.4", "V7 blown up along the strict transform of a line through the blown-up point", 3,
     "v7_line_through_p"),
    ("ii.5", "P(O + O(1,1)) over P^1 x P^1, the quadric cone blown up in its vertex", 2, "quadric_cone_blowup"),
    ("ii.6", "P^1 x F1 blown up along {t} x e", 4, "p1xf1_blowup"),
    ("ii.7", "P^3 blown up along a line, then along two fibres of the exceptional divisor", 4, "example1"),
]

_STABLE_MECHANIZED = [
    ("iii.1", "P^3 blown up in a plane cubic and a point off the plane", 3, "example2"),
    ("iii.2", "P^3 blown up along two disjoint lines", 3, "p3_two_lines"),
]

# (index, label); quartics and double quadrics are kept as separate classes
_B2_ONE = [
    (4, "P^3"),
    (3, "smooth quadric Q3"),
    *[(2, f"del Pezzo 3-fold V{d} of degree {d}") for d in range(1, 6)],
    (1, "sextic double solid (genus 2)"),
    (1, "quartic 3-fold (genus 3)"),
    (1, "double cover of Q3 branched in an octic section (genus 3)"),
    *[(1, f"prime Fano 3-fold of genus {g}") for g in (4, 5, 6, 7, 8, 9, 10, 12)],
]


def _preset_entry(eid, description, b2, verdict, provenance, name) -> CatalogEntry:
    X = constructions.preset(name)
    witness = theorem1_check(X).to_dict()
    return CatalogEntry(eid, description, b2, verdict, provenance,
                        {"kind": "preset", "name": name}, variety_to_dict(X), witness)


def build_entries() -> list[CatalogEntry]:
    entries = []
    for r_idx, (r, desc) in enumerate(_B2_ONE, start=1):
        eid = f"b1.{r_idx}"
        recipe = {"kind": "b2one", "dim": 3, "index": r}
        variety = None
        if r == 4:
            recipe["preset"] = "p3"
            variety = variety_to_dict(constructions.preset("p3"))
        elif r == 3:
            recipe["preset"] = "q3"
            variety = variety_to_dict(constructions.preset("q3"))
        witness = check_b2_one_stability(IndexedFano.of_index(r)).to_dict()
        entries.append(CatalogEntry(eid, f"{desc}, index {r}", 1, "stable", "b2=1 index criterion",
                                    recipe, variety, witness))
    for eid, desc, b2, name in _SEMISTABLE:
        entries.append(_preset_entry(eid, desc, b2, "semistable", f"list {eid}", name))
    for eid, desc, b2, name in _UNSTABLE:
        entries.append(_preset_entry(eid, desc, b2, "unstable", f"list {eid}", name))
    for eid, desc, b2, name in _STABLE_MECHANIZED:
        entries.append(_preset_entry(eid, desc, b2, "stable", "list iii", name))
    n_stable = TOTAL_B2_AT_LEAST_2 - len(_SEMISTABLE) - len(_UNSTABLE)
    for k in range(len(_STABLE_MECHANIZED) + 1, n_stable + 1):
        entries.append(CatalogEntry(f"iii.{k}", "stable class with b2 >= 2, not individually identified",
                                    None, "stable", "list iii"))
    return entries


def build_document() -> dict:
    return {"schema": "fano-stability-catalog/1", "entries": [e.to_dict() for e in build_entries()]}


def _sort_key(eid: str):
    parts = []
    for p in eid.split("."):
        parts.append((0, int(p), "") if p.isdigit() else (1, 0, p))
    return parts


@lru_cache(maxsize=1)
def load_entries() -> tuple[CatalogEntry, ...]:
    text = resources.files("fano_stability").joinpath("data/catalog.json").read_text()
    doc = json.loads(text)
    entries = [CatalogEntry(**e) for e in doc["entries"]]
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        raise LatticeError("catalog has duplicate ids")
    return tuple(sorted(entries, key=lambda e: _sort_key(e.id)))


def get(eid: str) -> CatalogEntry:
    for e in load_entries():
        if e.id == eid:
            return e
    raise LatticeError(f"no catalog entry {eid!r}")


def list_entries(verdict: str | None = None, b2: int | None = None) -> list[CatalogEntry]:
    if verdict is not None and verdict not in VERDICTS:
        raise LatticeError(f"verdict must be one of {VERDICTS}")
    out = []
    for e in load_entries():
        if verdict is not None and e.verdict != verdict:
            continue
        if b2 is not None and e.b2 != b2:
            continue
        out.append(e)
    return out


def counts() -> dict[str, int]:
    """Verdict counts for ``b2 >= 2`` plus the number of ``b2 = 1`` classes."""
    out = {v: 0 for v in VERDICTS}
    b2_one = 0
    for e in load_entries():
        if e.b2 == 1:
            b2_one += 1
        else:
            out[e.verdict] += 1
    out["total_b2_ge_2"] = sum(out[v] for v in VERDICTS)
    out["b2_one"] = b2_one
    out["total"] = out["total_b2_ge_2"] + b2_one
    return out


def entry_for_preset(name: str) -> CatalogEntry | None:
    for e in load_entries():
        if e.recipe and e.recipe.get("kind") == "preset" and e.recipe.get("name") == name:
            return e
        if e.recipe and e.recipe.get("preset") == name:
            return e
    return None


def agrees(published: str, computed: str) -> bool:
    if published == "unstable":
        return computed == UNSTABLE
    if published == "semistable":
        return computed in (SEMISTABLE, STABLE)
    return computed in (STABLE, "stable")


def example2_certificate() -> dict:
    """Bound the slopes of line subsheaves of ``T_X`` and ``Omega^1_X`` on the
    blow-up of P^3 in a plane cubic and a point.

    Line subsheaves of ``T_X`` mapping nontrivially to ``g*T_{P^2}`` restrict to
    the divisor ``Df2``, giving ``a2 <= 0`` and ``a1 + a2 + 2 a3 <= 1``; the
    conic-bundle vanishing adds ``a2 + a3 <= 0`` once the slope exceeds that of
    ``T_{X/P^2}``. Subsheaves of ``Omega^1_X`` split into the pullback part and
    the relative part. Rank-2 subsheaves are covered by duality.
    """
    X = constructions.example2_variety()
    basis = [X.basis_class(b) for b in ("H1", "H2", "H3")]
    objective = tuple(Fraction(b.dot(degree_form(X))) for b in basis)
    variables = ("a1", "a2", "a3")
    base = ConstraintSystem(variables, objective, (
        Inequality.le((0, 1, 0), 0),
        Inequality.le((1, 1, 2), 1),
    ))
    rule = conic_blowup_vanishing(X, "g", basis, [Inequality.le((0, 1, 1), 0)], hypotheses_asserted=True)
    t_bound = maximize_over_branches(rule.branches(base))
    omega_bound = maximize_over_branches([load_system("ex2-case3"), load_system("ex2-case2")])
    mu = slope(X, tangent(X))
    holds = (t_bound.status == "optimal" and t_bound.value < mu
             and omega_bound.status == "optimal" and omega_bound.value < -mu)
    return {
        "mu_tx": format_rational(mu),
        "relative_tangent_slope": format_rational(rule.threshold),
        "tangent_line_bound": format_rational(t_bound.value),
        "cotangent_line_bound": format_rational(omega_bound.value),
        "holds": holds,
    }


def load_system(name: str) -> ConstraintSystem:
    text = resources.files("fano_stability").joinpath(f"data/{name}.json").read_text()
    return ConstraintSystem.from_dict(json.loads(text))


def verify_entry(eid: str) -> dict:
    e = get(eid)
    report: dict[str, Any] = {"id": e.id, "description": e.description, "b2": e.b2, "verdict": e.verdict}
    if e.recipe is None:
        report.update(mechanized=False, computed=None, agrees=None, note="published claim, not mechanized")
        return report
    report["mechanized"] = True
    if e.recipe["kind"] == "b2one":
        v = check_b2_one_stability(IndexedFano.of_index(e.recipe["index"], e.recipe["dim"]))
        report.update(computed=v.status, agrees=agrees(e.verdict, v.status), details=v.to_dict())
        return report
    X = constructions.preset(e.recipe["name"])
    if e.variety is not None and variety_from_dict(e.variety) != X:
        raise LatticeError(f"catalog variety for {eid} is out of date with its recipe")
    v = theorem1_check(X)
    report.update(computed=v.status, agrees=agrees(e.verdict, v.status),
                  degree=X.anticanonical_degree(), details=v.to_dict())
    if e.recipe["name"] == "example2":
        cert = example2_certificate()
        report["certificate"] = cert
        report["agrees"] = report["agrees"] and cert["holds"]
    return report


def verify_all() -> list[dict]:
    return [verify_entry(e.id) for e in load_entries()]


if __name__ == "__main__":
    from .formats import dumps

    print(dumps(build_document()), end="")
