"""Cohomology input for the Picard-rank-one case.

Bott's formula for twisted differential forms on P^n, a small engine of
one-directional vanishing rules, and the threshold arithmetic of Hoppe's
criterion. The rules never turn "inconclusive" into a verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .lattice import LatticeError


class Vanishing(str, Enum):
    VANISHES = "vanishes"
    NONZERO = "nonzero"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class BottQuery:
    n: int
    p: int
    q: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise LatticeError("projective space must have dimension >= 1")
        if not (0 <= self.p <= self.n and 0 <= self.q <= self.n):
            raise LatticeError(f"need 0 <= p, q <= n, got p={self.p}, q={self.q}, n={self.n}")


def bott_dimension(query: BottQuery | None = None, *, n: int = 0, p: int = 0, q: int = 0, k: int = 0) -> int:
    """``h^q(P^n, Omega^p(k))``."""
    if query is None:
        query = BottQuery(n, p, q, k)
    n, p, q, k = query.n, query.p, query.q, query.k
    if q == p and k == 0:
        return 1
    if q == 0 and k > p:
        return math.comb(k + n - p, k) * math.comb(k - 1, p)
    if q == n and k < p - n:
        return math.comb(-k + p, -k) * math.comb(-k - 1, n - p)
    return 0


@dataclass(frozen=True)
class IndexedFano:
    """Fano manifold with Picard group Z: ``-K = r L0``."""

    n: int
    r: int
    generator_degree: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise LatticeError("dimension must be positive")
        if not 1 <= self.r <= self.n + 1:
            raise LatticeError(f"index must satisfy 1 <= r <= n+1, got r={self.r}, n={self.n}")
        if self.r == self.n + 1 and self.generator_degree != 1:
            raise LatticeError("index n+1 forces projective space, generator degree 1")
        if self.r == self.n and self.generator_degree != 2:
            raise LatticeError("index n forces the quadric, generator degree 2")

    @property
    def is_projective_space(self) -> bool:
        return self.r == self.n + 1

    @property
    def is_quadric(self) -> bool:
        return self.r == self.n

    @classmethod
    def of_index(cls, r: int, n: int = 3) -> IndexedFano:
        degree = 1 if r == n + 1 else 2 if r == n else 1
        return cls(n, r, degree)


def hoppe_threshold(X: IndexedFano, i: int, condition: str = "A") -> int:
    """Smallest twist m such that ``L = m L0`` falls under condition A_i (or B_i).

    ``L.(-K)^{n-1} >= -(i/n)(-K)^n`` reduces to ``m >= -i r / n`` for A_i and
    ``m >= i r / n`` for B_i; the boundary is included.
    """
    if not 0 <= i <= X.n:
        raise LatticeError(f"need 0 <= i <= n, got {i}")
    bound = Fraction(i * X.r, X.n)
    if condition == "A":
        bound = -bound
    elif condition != "B":
        raise LatticeError(f"condition must be 'A' or 'B', got {condition!r}")
    return math.ceil(bound)


def kodaira_nakano_vanishes(p: int, m: int) -> Vanishing:
    """``H^0(X, Omega^p (x) L^m)`` on a Fano manifold, L ample.

    Negative twists vanish by Kodaira-Nakano; ``h^0(Omega^p) = h^p(O) = 0`` for
    ``p >= 1`` by Kodaira vanishing. Positive twists are outside the rule.
    """
    if m < 0:
        return Vanishing.VANISHES
    if m == 0:
        return Vanishing.VANISHES if p >= 1 else Vanishing.NONZERO
    return Vanishing.INCONCLUSIVE


RULES = {
    "R1": ("index 1: every A_i holds", "Reid, Theorem 3"),
    "R2": ("A_1 holds in any case", "Kodaira-Nakano and Kodaira vanishing"),
    "R3": ("index <= n: A_{n-1} holds (equivalent to B_1)", "Wahl, Theorem 1"),
    "R4": ("P^n: A_i checked by Bott's formula", "Bott's formula"),
}


@dataclass(frozen=True)
class Fact:
    """One established condition ``A_i`` together with the rule that gave it."""

    condition: str
    i: int
    threshold: int
    rule: str
    hypothesis: str
    citation: str
    checked: tuple[tuple[int, int], ...] = ()

    def to_dict(self) -> dict:
        out = {"condition": f"{self.condition}_{self.i}", "twist_from": self.threshold,
               "rule": self.rule, "hypothesis": self.hypothesis, "citation": self.citation}
        if self.checked:
            out["bott_checked"] = [{"m": m, "h0": h} for m, h in self.checked]
        return out


@dataclass(frozen=True)
class B2OneVerdict:
    status: str
    variety: IndexedFano
    trace: tuple[Fact, ...] = ()
    missing: tuple[int, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {"status": self.status, "dim": self.variety.n, "index": self.variety.r,
                "trace": [f.to_dict() for f in self.trace], "missing": list(self.missing)}


def _bott_sweep(X: IndexedFano, i: int, threshold: int) -> tuple[tuple[int, int], ...] | None:
    """h^0(Omega^i (x) O(-m)) for m from the threshold up to n+1.

    Beyond m = n+1 the twist is negative and the q = 0 branch of Bott's formula
    (which needs k > p >= 1) is empty, so the finite sweep settles the range.
    """
    rows = []
    for m in range(threshold, X.n + 2):
        h = bott_dimension(n=X.n, p=i, q=0, k=-m)
        if h:
            return None
        rows.append((m, h))
    return tuple(rows)


def check_b2_one_stability(X: IndexedFano) -> B2OneVerdict:
    """Decide stability of ``T_X`` for ``b_2 = 1`` from the rule base.

    Stability follows once every ``A_i``, ``1 <= i <= n-1``, is established.
    Rules are tried in the order R1, R4, R2, R3.
    """
    n, r = X.n, X.r
    trace = []
    missing = []
    for i in range(1, n):
        t = hoppe_threshold(X, i, "A")
        fact = None
        if r == 1:
            fact = Fact("A", i, t, "R1", "r = 1", RULES["R1"][1])
        elif X.is_projective_space:
            sweep = _bott_sweep(X, i, t)
            if sweep is not None:
                fact = Fact("A", i, t, "R4", f"r = n + 1 = {r}", RULES["R4"][1], sweep)
        if fact is None and i == 1:
            fact = Fact("A", i, t, "R2", "i = 1", RULES["R2"][1])
        if fact is None and i == n - 1 and r <= n:
            fact = Fact("A", i, t, "R3", f"r = {r} <= n = {n}", RULES["R3"][1])
        if fact is None:
            missing.append(i)
        else:
            trace.append(fact)
    status = "stable" if not missing else "inconclusive"
    return B2OneVerdict(status, X, tuple(trace), tuple(missing))


def euler_characteristic(n: int, p: int, k: int) -> int:
    return sum((-1) ** q * bott_dimension(n=n, p=p, q=q, k=k) for q in range(n + 1))
