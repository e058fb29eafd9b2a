"""Slopes, destabilizer tests against declared contractions, and exact
maximization of a linear slope over systems of linear inequalities.

Slopes are taken with respect to ``-K_X`` unless a polarization is passed.
The destabilizer search space is deliberately small: for each registered
contraction ``f: X -> Y`` the relative tangent sheaf ``T_{X/Y}`` (a subsheaf of
``T_X``) and the pullback ``f*Omega^1_Y`` (a subsheaf of ``Omega^1_X``).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .lattice import (
    DivisorClass,
    FibrationDescriptor,
    LatticeError,
    Variety3Fold,
    degree_form,
    format_rational,
    parse_rational,
)

__all__ = [
    "FibrationDescriptor",
    "SheafDescriptor",
    "Verdict",
    "Witness",
    "slope",
    "tangent",
    "cotangent",
    "relative_tangent",
    "pullback_forms",
    "dual_view",
    "theorem1_check",
    "Inequality",
    "ConstraintSystem",
    "MaxResult",
    "maximize_slope",
    "maximize_over_branches",
    "conic_blowup_vanishing",
]

STABLE = "stable-among-tested"
SEMISTABLE = "strictly-semistable-witness"
UNSTABLE = "unstable"


@dataclass(frozen=True)
class SheafDescriptor:
    """A torsion-free sheaf seen only through its rank and first Chern class."""

    name: str
    rank: int
    c1: DivisorClass
    side: str = "tangent"

    def __post_init__(self):
        if self.rank < 1:
            raise LatticeError(f"sheaf {self.name}: rank must be positive")
        if self.side not in ("tangent", "cotangent"):
            raise LatticeError(f"sheaf {self.name}: side must be tangent or cotangent")


def slope(X: Variety3Fold, F: SheafDescriptor, polarization: DivisorClass | None = None) -> Fraction:
    h = X.anticanonical if polarization is None else polarization
    if F.c1.rank != X.rank:
        raise LatticeError(f"sheaf {F.name} does not live on {X.name}")
    return Fraction(X.product(F.c1, h, h), F.rank)


def tangent(X: Variety3Fold) -> SheafDescriptor:
    return SheafDescriptor("T_X", 3, X.anticanonical, "tangent")


def cotangent(X: Variety3Fold) -> SheafDescriptor:
    return SheafDescriptor("Omega1_X", 3, X.canonical, "cotangent")


def relative_tangent(X: Variety3Fold, f: FibrationDescriptor | str) -> SheafDescriptor:
    """``T_{X/Y}``, with ``c1 = -K_X + f*K_Y``.

    For a conic bundle the relative cotangent sheaf is ``I_Gamma (x) omega_X (x)
    f*omega_Y^{-1}`` with Gamma of codimension 2, so the same class identity holds.
    """
    if isinstance(f, str):
        f = X.fibration(f)
    return SheafDescriptor(f"T_X/{f.name}", f.relative_rank, X.anticanonical + f.pullback_canonical)


def pullback_forms(X: Variety3Fold, f: FibrationDescriptor | str) -> SheafDescriptor:
    """``f*Omega^1_Y`` inside ``Omega^1_X``."""
    if isinstance(f, str):
        f = X.fibration(f)
    return SheafDescriptor(f"{f.name}*Omega1", f.target_dim, f.pullback_canonical, "cotangent")


def dual_view(F: SheafDescriptor) -> SheafDescriptor:
    other = "cotangent" if F.side == "tangent" else "tangent"
    return SheafDescriptor(f"({F.name})^v", F.rank, -F.c1, other)


@dataclass(frozen=True)
class Witness:
    sheaf: SheafDescriptor
    slope: Fraction
    compared: Fraction

    @property
    def excess(self) -> Fraction:
        return self.slope - self.compared


@dataclass(frozen=True)
class Verdict:
    status: str
    mu_tx: Fraction
    witness: Witness | None = None
    tested: tuple[Witness, ...] = ()

    def to_dict(self) -> dict:
        out = {"status": self.status, "mu_tx": format_rational(self.mu_tx)}
        out["witness"] = None if self.witness is None else _witness_dict(self.witness)
        out["tested"] = [_witness_dict(w) for w in self.tested]
        return out


def _witness_dict(w: Witness) -> dict:
    return {
        "sheaf": w.sheaf.name,
        "side": w.sheaf.side,
        "rank": w.sheaf.rank,
        "c1": list(w.sheaf.c1.coeffs),
        "slope": format_rational(w.slope),
        "compared": format_rational(w.compared),
    }


def theorem1_check(X: Variety3Fold, side: str = "both",
                   extra: Iterable[SheafDescriptor] = (),
                   polarization: DivisorClass | None = None) -> Verdict:
    """Compare every contraction-derived candidate against ``T_X`` or ``Omega^1_X``.

    ``side`` restricts to relative tangent sheaves (``"tangent"``) or pullback
    forms (``"cotangent"``). The reported witness is the candidate with the
    largest slope excess; ties keep registration order.
    """
    if side not in ("both", "tangent", "cotangent"):
        raise LatticeError(f"unknown side {side!r}")
    mu_t = slope(X, tangent(X), polarization)
    mu_omega = -mu_t
    candidates: list[SheafDescriptor] = []
    for f in X.fibrations:
        if side in ("both", "tangent"):
            candidates.append(relative_tangent(X, f))
        if side in ("both", "cotangent"):
            candidates.append(pullback_forms(X, f))
    candidates.extend(F for F in extra if side in ("both", F.side))

    tested = []
    for F in candidates:
        ref = mu_t if F.side == "tangent" else mu_omega
        tested.append(Witness(F, slope(X, F, polarization), ref))
    if not tested:
        return Verdict(STABLE, mu_t)
    best = max(tested, key=lambda w: w.excess)
    best = next(w for w in tested if w.excess == best.excess)
    if best.excess > 0:
        status = UNSTABLE
    elif best.excess == 0:
        status = SEMISTABLE
    else:
        return Verdict(STABLE, mu_t, None, tuple(tested))
    return Verdict(status, mu_t, best, tuple(tested))


# -- exact linear programming -------------------------------------------------

@dataclass(frozen=True)
class Inequality:
    """``coeffs . a <= bound``."""

    coeffs: tuple[Fraction, ...]
    bound: Fraction

    @classmethod
    def le(cls, coeffs: Sequence, bound) -> Inequality:
        return cls(tuple(Fraction(c) for c in coeffs), Fraction(bound))

    def to_dict(self) -> dict:
        return {"coeffs": [format_rational(c) for c in self.coeffs], "rel": "<=",
                "rhs": format_rational(self.bound)}


@dataclass(frozen=True)
class ConstraintSystem:
    variables: tuple[str, ...]
    objective: tuple[Fraction, ...]
    inequalities: tuple[Inequality, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "objective", tuple(Fraction(c) for c in self.objective))
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        k = len(self.variables)
        if len(self.objective) != k:
            raise LatticeError(f"objective has {len(self.objective)} coefficients for {k} variables")
        for ineq in self.inequalities:
            if len(ineq.coeffs) != k:
                raise LatticeError(f"constraint has {len(ineq.coeffs)} coefficients for {k} variables")

    def add(self, *inequalities: Inequality) -> ConstraintSystem:
        return ConstraintSystem(self.variables, self.objective, self.inequalities + inequalities)

    @classmethod
    def from_dict(cls, doc: dict) -> ConstraintSystem:
        try:
            variables = [str(v) for v in doc["variables"]]
            objective = [parse_rational(c) for c in doc["objective"]]
            rows = []
            for c in doc.get("constraints", []):
                coeffs = [parse_rational(x) for x in c["coeffs"]]
                rhs = parse_rational(c["rhs"])
                rel = c.get("rel", "<=")
                if rel == "<=":
                    rows.append(Inequality.le(coeffs, rhs))
                elif rel == ">=":
                    rows.append(Inequality.le([-x for x in coeffs], -rhs))
                elif rel in ("=", "=="):
                    rows.append(Inequality.le(coeffs, rhs))
                    rows.append(Inequality.le([-x for x in coeffs], -rhs))
                else:
                    raise LatticeError(f"unsupported relation {rel!r}")
        except (KeyError, TypeError) as exc:
            raise LatticeError(f"malformed constraint system: {exc}") from exc
        return cls(tuple(variables), tuple(objective), tuple(rows))

    @classmethod
    def load(cls, path: str | Path) -> ConstraintSystem:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "variables": list(self.variables),
            "objective": [format_rational(c) for c in self.objective],
            "constraints": [i.to_dict() for i in self.inequalities],
        }


@dataclass(frozen=True)
class MaxResult:
    status: str
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None

    def to_dict(self, variables: Sequence[str] = ()) -> dict:
        out = {"status": self.status,
               "max": None if self.value is None else format_rational(self.value)}
        if self.point is None:
            out["point"] = None
        else:
            names = list(variables) or [f"a{i + 1}" for i in range(len(self.point))]
            out["point"] = {n: format_rational(v) for n, v in zip(names, self.point)}
        return out


Row = tuple[tuple[Fraction, ...], Fraction]


def _normalize(row: Row) -> Row | None:
    coeffs, b = row
    pivot = next((abs(c) for c in coeffs if c != 0), None)
    if pivot is None:
        return None
    return tuple(c / pivot for c in coeffs), b / pivot


def _eliminate(rows: list[Row], j: int) -> list[Row] | None:
    """One Fourier-Motzkin step on variable j. None signals a contradiction."""
    pos, neg, rest = [], [], []
    for coeffs, b in rows:
        if coeffs[j] > 0:
            pos.append((coeffs, b))
        elif coeffs[j] < 0:
            neg.append((coeffs, b))
        else:
            rest.append((coeffs, b))
    for (cp, bp), (cn, bn) in itertools.product(pos, neg):
        lp, ln = -cn[j], cp[j]
        rest.append((tuple(lp * x + ln * y for x, y in zip(cp, cn)), lp * bp + ln * bn))
    out: dict[tuple, Fraction] = {}
    for row in rest:
        norm = _normalize(row)
        if norm is None:
            if row[1] < 0:
                return None
            continue
        coeffs, b = norm
        # parallel rows: only the tightest bound matters
        if coeffs not in out or b < out[coeffs]:
            out[coeffs] = b
    return [(c, b) for c, b in out.items()]


def _interval(rows: list[Row], keep: int, k: int) -> tuple[Fraction | None, Fraction | None] | None:
    """Projection of the polyhedron onto coordinate ``keep``: (low, high), None bounds unbounded."""
    current = rows
    for j in range(k):
        if j == keep:
            continue
        current = _eliminate(current, j)
        if current is None:
            return None
    lo, hi = None, None
    for coeffs, b in current:
        a = coeffs[keep]
        v = b / a
        if a > 0:
            hi = v if hi is None else min(hi, v)
        else:
            lo = v if lo is None else max(lo, v)
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi


def _substitute(rows: list[Row], j: int, value: Fraction) -> list[Row]:
    out = []
    for coeffs, b in rows:
        new = list(coeffs)
        new[j] = Fraction(0)
        out.append((tuple(new), b - coeffs[j] * value))
    return out


def maximize_slope(cs: ConstraintSystem) -> MaxResult:
    """Exact maximum of the objective over ``{a : A a <= b}`` by Fourier-Motzkin.

    An extra variable z with ``z <= objective . a`` is appended and all others
    are eliminated; the remaining upper bounds on z give the optimum. The
    attaining point is recovered coordinate by coordinate, taking the smallest
    feasible value each time (the lexicographically smallest optimal vertex
    when the optimal face is bounded).
    """
    k = len(cs.variables)
    n = k + 1
    rows: list[Row] = [(ineq.coeffs + (Fraction(0),), ineq.bound) for ineq in cs.inequalities]
    rows.append((tuple(-c for c in cs.objective) + (Fraction(1),), Fraction(0)))
    for coeffs, b in rows:
        if all(c == 0 for c in coeffs) and b < 0:
            return MaxResult("infeasible")
    interval = _interval(rows, k, n)
    if interval is None:
        return MaxResult("infeasible")
    _, top = interval
    if top is None:
        return MaxResult("unbounded")

    fixed = _substitute(rows, k, top)
    point = []
    for j in range(k):
        iv = _interval(fixed, j, n)
        if iv is None:  # cannot happen for an exact projection
            raise AssertionError("lost feasibility during back-substitution")
        lo, hi = iv
        if lo is not None:
            v = lo
        elif hi is not None:
            v = min(hi, Fraction(0))
        else:
            v = Fraction(0)
        point.append(v)
        fixed = _substitute(fixed, j, v)
    return MaxResult("optimal", top, tuple(point))


def maximize_over_branches(branches: Iterable[ConstraintSystem]) -> MaxResult:
    """Maximum over a union of polyhedra, e.g. the cases of a vanishing argument."""
    best: MaxResult | None = None
    for cs in branches:
        r = maximize_slope(cs)
        if r.status == "unbounded":
            return r
        if r.status == "optimal" and (best is None or r.value > best.value):
            best = r
    return best if best is not None else MaxResult("infeasible")


@dataclass(frozen=True)
class VanishingRule:
    """Conditional constraint: ``degree(L) > threshold`` implies ``consequence``."""

    threshold: Fraction
    degree: tuple[Fraction, ...]
    consequence: tuple[Inequality, ...]
    hypotheses: tuple[str, ...] = field(default_factory=tuple)

    def branches(self, cs: ConstraintSystem) -> list[ConstraintSystem]:
        # degree <= threshold, or (closure of) degree > threshold with the consequence
        return [cs.add(Inequality.le(self.degree, self.threshold)), cs.add(*self.consequence)]


def conic_blowup_vanishing(X: Variety3Fold, fibration: FibrationDescriptor | str,
                           basis: Sequence[DivisorClass], consequence: Sequence[Inequality],
                           *, hypotheses_asserted: bool = False) -> VanishingRule:
    """Attach the vanishing of ``H^0(T_Y (x) L^-1)`` for ``mu(L) > mu(T_{Y/S})``.

    Applies to the blow-up Y of a conic bundle over S along a smooth subsection,
    for L whose pushforward is relatively ample. Those hypotheses are geometric
    and must be asserted by the caller; the threshold is computed here.
    ``basis`` lists the classes that the variables ``a_i`` multiply.
    """
    if not hypotheses_asserted:
        raise LatticeError("the subsection/relative-ampleness hypotheses must be asserted explicitly")
    if isinstance(fibration, str):
        fibration = X.fibration(fibration)
    if fibration.target_dim != 2:
        raise LatticeError("the rule applies to fibrations over a surface")
    threshold = slope(X, relative_tangent(X, fibration))
    form = degree_form(X)
    degree = tuple(Fraction(b.dot(form)) for b in basis)
    return VanishingRule(threshold, degree, tuple(consequence),
                         ("blow-up of a conic bundle along a subsection", "(pi_* L)** relatively ample"))
