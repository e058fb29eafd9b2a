"""Exact arithmetic on Picard lattices of smooth projective 3-folds.

A variety is described numerically: a basis of divisor classes, the symmetric
cubic intersection form on that basis, the canonical class, and whatever curves
and fibrations the caller has declared. Everything is integral and exact;
rationals only appear once a slope divides by a rank.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Rational = Fraction


class LatticeError(ValueError):
    """Malformed lattice input: dimension mismatch, bad basis change, ..."""


def format_rational(q: Fraction | int) -> str:
    """Serialize as ``"p/q"`` in lowest terms, or ``"n"`` when integral."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str | int) -> Fraction:
    if isinstance(text, bool):
        raise LatticeError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not re.fullmatch(r"\s*[+-]?\d+(\s*/\s*\d+)?\s*", text):
        raise LatticeError(f"not a rational: {text!r}")
    try:
        return Fraction(text.replace(" ", ""))
    except ZeroDivisionError as exc:
        raise LatticeError(f"zero denominator in {text!r}") from exc


@dataclass(frozen=True)
class DivisorClass:
    """Integer coordinates of a divisor class against a variety's basis."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        for c in coeffs:
            if isinstance(c, bool) or not isinstance(c, int):
                raise LatticeError(f"divisor coefficients must be integers, got {c!r}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls, rank: int) -> DivisorClass:
        return cls((0,) * rank)

    @classmethod
    def unit(cls, rank: int, i: int) -> DivisorClass:
        return cls(tuple(int(j == i) for j in range(rank)))

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def _check(self, other: DivisorClass) -> None:
        if not isinstance(other, DivisorClass):
            raise TypeError(f"expected DivisorClass, got {type(other).__name__}")
        if other.rank != self.rank:
            raise LatticeError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other: DivisorClass) -> DivisorClass:
        self._check(other)
        return DivisorClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        self._check(other)
        return DivisorClass(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> DivisorClass:
        return DivisorClass(tuple(-a for a in self.coeffs))

    def __mul__(self, m: int) -> DivisorClass:
        if isinstance(m, bool) or not isinstance(m, int):
            return NotImplemented
        return DivisorClass(tuple(m * a for a in self.coeffs))

    __rmul__ = __mul__

    def dot(self, vector: Sequence[int | Fraction]) -> int | Fraction:
        if len(vector) != self.rank:
            raise LatticeError(f"rank mismatch: {self.rank} vs {len(vector)}")
        return sum((a * b for a, b in zip(self.coeffs, vector)), 0)

    def extend(self, extra: int = 0) -> DivisorClass:
        """The same class after a blow-up appends one basis element."""
        return DivisorClass(self.coeffs + (extra,))

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return len(self.coeffs)


@dataclass(frozen=True)
class TrilinearForm:
    """Symmetric integer 3-tensor, stored sparsely by sorted index triple."""

    rank: int
    entries: Mapping[tuple[int, int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[tuple[int, int, int], int] = {}
        for key, value in dict(self.entries).items():
            if len(key) != 3:
                raise LatticeError(f"bad triple {key!r}")
            if any(not 0 <= i < self.rank for i in key):
                raise LatticeError(f"triple {key!r} out of range for rank {self.rank}")
            if isinstance(value, bool) or not isinstance(value, int):
                raise LatticeError(f"intersection numbers must be integers, got {value!r}")
            k = tuple(sorted(key))
            if k in clean and clean[k] != value:
                raise LatticeError(f"conflicting values for triple {k}")
            if value:
                clean[k] = value
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    def __hash__(self):
        return hash((self.rank, tuple(self.entries.items())))

    def __eq__(self, other):
        if not isinstance(other, TrilinearForm):
            return NotImplemented
        return self.rank == other.rank and self.entries == other.entries

    def __getitem__(self, key: tuple[int, int, int]) -> int:
        return self.entries.get(tuple(sorted(key)), 0)

    def triples(self) -> list[tuple[int, int, int, int]]:
        return [(i, j, k, v) for (i, j, k), v in self.entries.items()]


def triple_product(form: TrilinearForm, d1: DivisorClass, d2: DivisorClass, d3: DivisorClass) -> int:
    """Full trilinear expansion of ``d1 . d2 . d3``."""
    for d in (d1, d2, d3):
        if d.rank != form.rank:
            raise LatticeError(f"class of rank {d.rank} against form of rank {form.rank}")
    total = 0
    # Only stored (nonzero) triples contribute; each sorted key stands for all
    # of its distinct permutations.
    for (i, j, k), value in form.entries.items():
        for a, b, c in set(itertools.permutations((i, j, k))):
            total += d1.coeffs[a] * d2.coeffs[b] * d3.coeffs[c] * value
    return total


@dataclass(frozen=True)
class CurveClass:
    """A tracked curve: its genus and the intersection numbers ``D_i . C``."""

    name: str
    genus: int
    meets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "meets", tuple(self.meets))
        if self.genus < 0:
            raise LatticeError(f"curve {self.name}: negative genus")
        for v in self.meets:
            if isinstance(v, bool) or not isinstance(v, int):
                raise LatticeError(f"curve {self.name}: intersections must be integers")

    def degree(self, d: DivisorClass) -> int:
        return d.dot(self.meets)


@dataclass(frozen=True)
class FibrationDescriptor:
    """A declared contraction ``f: X -> Y`` onto a curve or a surface.

    ``pullback_canonical`` is ``f*K_Y`` in the variety's lattice. The relative
    rank is ``3 - target_dim`` for a fibre space, which for a target surface is
    the conic-bundle case.
    """

    name: str
    target_dim: int
    relative_rank: int
    pullback_canonical: DivisorClass
    discriminant: bool = False

    def __post_init__(self):
        if self.target_dim not in (1, 2):
            raise LatticeError(f"fibration {self.name}: target dimension must be 1 or 2")
        if self.relative_rank != 3 - self.target_dim:
            raise LatticeError(
                f"fibration {self.name}: relative rank {self.relative_rank} "
                f"does not match target dimension {self.target_dim}"
            )


@dataclass(frozen=True)
class Variety3Fold:
    name: str
    basis: tuple[str, ...]
    form: TrilinearForm
    canonical: DivisorClass
    curves: tuple[CurveClass, ...] = ()
    fibrations: tuple[FibrationDescriptor, ...] = ()
    named: tuple[tuple[str, DivisorClass], ...] = ()
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "curves", tuple(self.curves))
        object.__setattr__(self, "fibrations", tuple(self.fibrations))
        object.__setattr__(self, "named", tuple((str(k), v) for k, v in self.named))
        object.__setattr__(self, "provenance", tuple(self.provenance))
        rho = len(self.basis)
        if len(set(self.basis)) != rho:
            raise LatticeError(f"{self.name}: duplicate basis labels {self.basis}")
        if self.form.rank != rho:
            raise LatticeError(f"{self.name}: form rank {self.form.rank} != basis size {rho}")
        if self.canonical.rank != rho:
            raise LatticeError(f"{self.name}: canonical class has wrong length")
        for c in self.curves:
            if len(c.meets) != rho:
                raise LatticeError(f"{self.name}: curve {c.name} has {len(c.meets)} intersections, expected {rho}")
        names = [c.name for c in self.curves]
        if len(set(names)) != len(names):
            raise LatticeError(f"{self.name}: duplicate curve names")
        for f in self.fibrations:
            if f.pullback_canonical.rank != rho:
                raise LatticeError(f"{self.name}: fibration {f.name} lives in a different lattice")
        for label, d in self.named:
            if d.rank != rho:
                raise LatticeError(f"{self.name}: named class {label} has wrong length")

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def anticanonical(self) -> DivisorClass:
        return -self.canonical

    def anticanonical_degree(self) -> int:
        a = self.anticanonical
        return triple_product(self.form, a, a, a)

    def product(self, d1: DivisorClass, d2: DivisorClass, d3: DivisorClass) -> int:
        return triple_product(self.form, d1, d2, d3)

    def basis_class(self, label: str) -> DivisorClass:
        return DivisorClass.unit(self.rank, self.basis.index(label))

    def named_class(self, label: str) -> DivisorClass:
        for k, v in self.named:
            if k == label:
                return v
        if label in self.basis:
            return self.basis_class(label)
        if label == "K":
            return self.canonical
        raise LatticeError(f"{self.name}: unknown class {label!r}")

    def curve(self, name: str) -> CurveClass:
        for c in self.curves:
            if c.name == name:
                return c
        raise LatticeError(f"{self.name}: no tracked curve {name!r}")

    def fibration(self, name: str) -> FibrationDescriptor:
        for f in self.fibrations:
            if f.name == name:
                return f
        raise LatticeError(f"{self.name}: no fibration {name!r}")

    def canonical_degree(self, c: CurveClass) -> int:
        """``K_X . C``."""
        return c.degree(self.canonical)

    def cls(self, text: str) -> DivisorClass:
        """Parse an integer combination such as ``"2H1 + 2H2 - D11 - D1"``."""
        return parse_class(self, text)

    def with_named(self, **classes: DivisorClass | str) -> Variety3Fold:
        named = dict(self.named)
        for k, v in classes.items():
            named[k] = self.cls(v) if isinstance(v, str) else v
        return replace(self, named=tuple(named.items()))

    def with_curve(self, curve: CurveClass) -> Variety3Fold:
        return replace(self, curves=self.curves + (curve,))

    def with_fibration(self, fibration: FibrationDescriptor) -> Variety3Fold:
        if any(f.name == fibration.name for f in self.fibrations):
            raise LatticeError(f"{self.name}: fibration {fibration.name!r} already registered")
        return replace(self, fibrations=self.fibrations + (fibration,))

    def renamed(self, name: str, step: str | None = None) -> Variety3Fold:
        prov = self.provenance + ((step,) if step else ())
        return replace(self, name=name, provenance=prov)


_TERM = re.compile(r"\s*([+-])?\s*(\d+)?\s*\*?\s*([A-Za-z_][A-Za-z0-9_']*)\s*")


def parse_class(X: Variety3Fold, text: str) -> DivisorClass:
    text = text.strip()
    if not text:
        raise LatticeError("empty class expression")
    if text == "0":
        return DivisorClass.zero(X.rank)
    total = DivisorClass.zero(X.rank)
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise LatticeError(f"cannot parse class expression {text!r} at {pos}")
        sign, coef, label = m.groups()
        if sign is None and not first:
            raise LatticeError(f"missing operator in {text!r}")
        k = int(coef) if coef else 1
        if sign == "-":
            k = -k
        total = total + k * X.named_class(label)
        pos = m.end()
        first = False
    return total


def degree_form(X: Variety3Fold, polarization: DivisorClass | None = None) -> tuple[int, ...]:
    """The linear form ``D -> D . H^2`` as a vector over the basis (``H = -K`` by default)."""
    h = X.anticanonical if polarization is None else polarization
    return tuple(X.product(DivisorClass.unit(X.rank, i), h, h) for i in range(X.rank))


def verify_relation(X: Variety3Fold, lhs: DivisorClass | str, rhs: DivisorClass | str) -> bool:
    lhs = X.cls(lhs) if isinstance(lhs, str) else lhs
    rhs = X.cls(rhs) if isinstance(rhs, str) else rhs
    if lhs.rank != X.rank or rhs.rank != X.rank:
        raise LatticeError("relation classes do not live in this lattice")
    return lhs == rhs


def integer_inverse(matrix: Sequence[Sequence[int]]) -> list[list[int]]:
    """Inverse of a unimodular integer matrix; raises on singular or non-unimodular input."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise LatticeError("transition matrix must be square")
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise LatticeError("transition matrix is singular")
        if pivot != col:
            aug[col], aug[pivot] = aug[pivot], aug[col]
            det = -det
        p = aug[col][col]
        det *= p
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    if det not in (1, -1):
        raise LatticeError(f"transition matrix has determinant {det}, expected +-1")
    return [[int(x) for x in row[n:]] for row in aug]


def rebase(X: Variety3Fold, new_basis: Sequence[DivisorClass | str], labels: Sequence[str]) -> Variety3Fold:
    """Re-express X in a new integral basis.

    ``new_basis[i]`` gives the i-th new basis element in the old coordinates.
    """
    if len(new_basis) != X.rank or len(labels) != X.rank:
        raise LatticeError(f"new basis must have {X.rank} elements")
    rows = [X.cls(b) if isinstance(b, str) else b for b in new_basis]
    for b in rows:
        if b.rank != X.rank:
            raise LatticeError("new basis element has wrong length")
    M = [list(b.coeffs) for b in rows]
    Minv = integer_inverse(M)
    n = X.rank

    def to_new(d: DivisorClass) -> DivisorClass:
        # old coords x satisfy x = y M, so y = x M^{-1}
        return DivisorClass(tuple(sum(d.coeffs[i] * Minv[i][j] for i in range(n)) for j in range(n)))

    entries = {}
    for i, j, k in itertools.combinations_with_replacement(range(n), 3):
        v = X.product(rows[i], rows[j], rows[k])
        if v:
            entries[(i, j, k)] = v
    curves = tuple(
        CurveClass(c.name, c.genus, tuple(b.dot(c.meets) for b in rows)) for c in X.curves
    )
    fibrations = tuple(replace(f, pullback_canonical=to_new(f.pullback_canonical)) for f in X.fibrations)
    old = [(lab, DivisorClass.unit(n, i)) for i, lab in enumerate(X.basis) if lab not in labels]
    named = dict(old)
    named.update(X.named)
    named = {k: to_new(v) for k, v in named.items() if k not in labels}
    return Variety3Fold(
        name=X.name,
        basis=tuple(labels),
        form=TrilinearForm(n, entries),
        canonical=to_new(X.canonical),
        curves=curves,
        fibrations=fibrations,
        named=tuple(named.items()),
        provenance=X.provenance + ("rebase:" + ",".join(labels),),
    )


def transition_product(X: Variety3Fold, d1: DivisorClass, d2: DivisorClass, d3: DivisorClass,
                       new_basis: Iterable[DivisorClass]) -> int:
    """Product of classes given in new coordinates, evaluated through the old form."""
    rows = list(new_basis)

    def to_old(d: DivisorClass) -> DivisorClass:
        return DivisorClass(tuple(sum(d.coeffs[i] * rows[i].coeffs[j] for i in range(len(rows)))
                                  for j in range(X.rank)))

    return X.product(to_old(d1), to_old(d2), to_old(d3))
