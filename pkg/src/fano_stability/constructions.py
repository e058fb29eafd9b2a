"""Builders for the varieties used throughout: projective space, the quadric,
del Pezzo surfaces and their products with P^1, P^1-bundles over surfaces, and
blow-ups along points and smooth curves.

Blow-up conventions (E the new exceptional divisor, appended last):

* point: ``f*D . E^2 = 0``, ``E^3 = 1``, ``K' = f*K + 2E``
* curve C of genus g: ``f*D . E^2 = -(D.C)``, ``E^3 = K.C + 2 - 2g``,
  ``K' = f*K + E``

Strict transforms of tracked curves are never guessed: every tracked curve has
to be declared either disjoint from the center or given its intersection with E.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Mapping

from .lattice import (
    CurveClass,
    DivisorClass,
    FibrationDescriptor,
    LatticeError,
    TrilinearForm,
    Variety3Fold,
    rebase,
)


@dataclass(frozen=True)
class Surface:
    name: str
    basis: tuple[str, ...]
    pairing: Mapping[tuple[int, int], int]
    canonical: DivisorClass

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        pairing = {}
        for (i, j), v in dict(self.pairing).items():
            k = (min(i, j), max(i, j))
            if k in pairing and pairing[k] != v:
                raise LatticeError(f"{self.name}: asymmetric pairing at {k}")
            if v:
                pairing[k] = v
        object.__setattr__(self, "pairing", dict(sorted(pairing.items())))
        if self.canonical.rank != self.rank:
            raise LatticeError(f"{self.name}: canonical class has wrong length")

    def __hash__(self):
        return hash((self.name, self.basis, tuple(self.pairing.items()), self.canonical))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def dot(self, a: DivisorClass, b: DivisorClass) -> int:
        return sum(a.coeffs[i] * b.coeffs[j] * self.pairing.get((min(i, j), max(i, j)), 0)
                   for i in range(self.rank) for j in range(self.rank))

    def degree(self) -> int:
        """``K_S^2``."""
        return self.dot(self.canonical, self.canonical)

    def cls(self, **coeffs: int) -> DivisorClass:
        return DivisorClass(tuple(coeffs.get(b, 0) for b in self.basis))


@dataclass(frozen=True)
class BlowUpSpec:
    """Center of a blow-up plus the strict-transform bookkeeping for tracked curves.

    ``transforms`` maps a tracked curve to ``E . C~``; ``disjoint`` lists curves
    that miss the center (their E-entry is 0). Fibrations survive only if named
    in ``keep_fibrations``: whether the composite is still equidimensional is
    geometric input.
    """

    kind: str
    curve: CurveClass | None = None
    label: str = "E"
    transforms: Mapping[str, int] = field(default_factory=dict)
    disjoint: tuple[str, ...] = ()
    keep_fibrations: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("point", "curve"):
            raise LatticeError(f"blow-up center must be 'point' or 'curve', got {self.kind!r}")
        if self.kind == "curve" and self.curve is None:
            raise LatticeError("curve blow-up needs a CurveClass center")
        object.__setattr__(self, "disjoint", tuple(self.disjoint))
        object.__setattr__(self, "keep_fibrations", tuple(self.keep_fibrations))

    @classmethod
    def point(cls, **kw) -> BlowUpSpec:
        return cls("point", **kw)

    @classmethod
    def along(cls, curve: CurveClass, **kw) -> BlowUpSpec:
        return cls("curve", curve=curve, **kw)


def blow_up(X: Variety3Fold, spec: BlowUpSpec, name: str | None = None) -> Variety3Fold:
    rho = X.rank
    e = rho
    if spec.label in X.basis:
        raise LatticeError(f"{X.name}: basis label {spec.label!r} already in use")
    entries = dict(X.form.entries)
    center = spec.curve
    if spec.kind == "point":
        entries[(e, e, e)] = 1
        k_shift = 2
        step = "blowup:point"
    else:
        if len(center.meets) != rho:
            raise LatticeError(f"center {center.name} has {len(center.meets)} intersections, expected {rho}")
        for i in range(rho):
            entries[(i, e, e)] = -center.meets[i]
        entries[(e, e, e)] = X.canonical_degree(center) + 2 - 2 * center.genus
        k_shift = 1
        step = f"blowup:curve:{center.name}"

    curves = []
    center_name = center.name if center is not None else None
    for c in X.curves:
        if c.name == center_name:
            continue
        if c.name in spec.transforms:
            curves.append(CurveClass(c.name, c.genus, c.meets + (spec.transforms[c.name],)))
        elif c.name in spec.disjoint:
            curves.append(CurveClass(c.name, c.genus, c.meets + (0,)))
        else:
            raise LatticeError(
                f"tracked curve {c.name!r} is neither declared disjoint from the center "
                f"nor given an E-intersection"
            )
    unknown = (set(spec.transforms) | set(spec.disjoint)) - {c.name for c in X.curves}
    if unknown:
        raise LatticeError(f"bookkeeping refers to unknown curves {sorted(unknown)}")

    fibrations = []
    for fname in spec.keep_fibrations:
        f = X.fibration(fname)
        conic = f.discriminant or (spec.kind == "curve" and f.target_dim == 2)
        fibrations.append(replace(f, pullback_canonical=f.pullback_canonical.extend(0), discriminant=conic))

    return Variety3Fold(
        name=name or f"Bl({X.name})",
        basis=X.basis + (spec.label,),
        form=TrilinearForm(rho + 1, entries),
        canonical=X.canonical.extend(k_shift),
        curves=tuple(curves),
        fibrations=tuple(fibrations),
        named=tuple((k, v.extend(0)) for k, v in X.named),
        provenance=X.provenance + (step,),
    )


def p1_bundle(S: Surface, D: DivisorClass, name: str | None = None) -> Variety3Fold:
    """``P(O + O(D))`` over S, basis ``(xi, pi*basis(S))`` with ``xi^2 = xi . pi*D``."""
    if D.rank != S.rank:
        raise LatticeError("twisting class does not live on the surface")
    r = S.rank
    entries = {(0, 0, 0): S.dot(D, D)}
    for a in range(r):
        ua = DivisorClass.unit(r, a)
        entries[(0, 0, a + 1)] = S.dot(D, ua)
        for b in range(a, r):
            entries[(0, a + 1, b + 1)] = S.dot(ua, DivisorClass.unit(r, b))
    canonical = DivisorClass((-2,) + (S.canonical + D).coeffs)
    pullback_ks = DivisorClass((0,) + S.canonical.coeffs)
    return Variety3Fold(
        name=name or f"P(O+O(D)) over {S.name}",
        basis=("xi",) + S.basis,
        form=TrilinearForm(r + 1, entries),
        canonical=canonical,
        fibrations=(FibrationDescriptor("pi", 2, 1, pullback_ks),),
        provenance=(f"preset:{S.name}", "p1bundle:" + ",".join(map(str, D.coeffs))),
    )


def product_with_p1(S: Surface, name: str | None = None) -> Variety3Fold:
    """``S x P^1``, basis ``basis(S) + (F,)`` with F the class of a fibre ``S x {pt}``."""
    r = S.rank
    f = r
    entries = {}
    for a in range(r):
        for b in range(a, r):
            entries[(a, b, f)] = S.dot(DivisorClass.unit(r, a), DivisorClass.unit(r, b))
    canonical = DivisorClass(S.canonical.coeffs + (-2,))
    return Variety3Fold(
        name=name or f"{S.name}xP1",
        basis=S.basis + ("F",),
        form=TrilinearForm(r + 1, entries),
        canonical=canonical,
        fibrations=(
            FibrationDescriptor("pr_S", 2, 1, S.canonical.extend(0)),
            FibrationDescriptor("pr_P1", 1, 2, DivisorClass((0,) * r + (-2,))),
        ),
        provenance=(f"preset:{S.name}", "product:P1"),
    )


# -- surfaces -----------------------------------------------------------------

def projective_plane() -> Surface:
    return Surface("p2", ("h",), {(0, 0): 1}, DivisorClass((-3,)))


def p1xp1() -> Surface:
    return Surface("p1xp1", ("h1", "h2"), {(0, 1): 1}, DivisorClass((-2, -2)))


def del_pezzo(k: int) -> Surface:
    """Blow-up of P^2 in k general points (degree 9 - k), basis ``(h, e1..ek)``."""
    if not 0 <= k <= 8:
        raise LatticeError(f"del Pezzo blow-up count must be in 0..8, got {k}")
    if k == 0:
        return projective_plane()
    pairing = {(0, 0): 1}
    pairing.update({(i, i): -1 for i in range(1, k + 1)})
    return Surface(f"dp{k}", ("h",) + tuple(f"e{i}" for i in range(1, k + 1)), pairing,
                   DivisorClass((-3,) + (1,) * k))


# -- 3-folds ------------------------------------------------------------------

def projective_space() -> Variety3Fold:
    return Variety3Fold("p3", ("H",), TrilinearForm(1, {(0, 0, 0): 1}), DivisorClass((-4,)),
                        provenance=("preset:p3",))


def quadric() -> Variety3Fold:
    return Variety3Fold("q3", ("H",), TrilinearForm(1, {(0, 0, 0): 2}), DivisorClass((-3,)),
                        provenance=("preset:q3",))


def v7() -> Variety3Fold:
    S = projective_plane()
    X = p1_bundle(S, S.cls(h=1), name="v7")
    return X


def v7_as_blowup() -> Variety3Fold:
    return blow_up(projective_space(), BlowUpSpec.point(), name="v7_blowup")


def veronese_cone_blowup() -> Variety3Fold:
    S = projective_plane()
    return p1_bundle(S, S.cls(h=2), name="w4_blowup")


def quadric_cone_blowup() -> Variety3Fold:
    S = p1xp1()
    return p1_bundle(S, S.cls(h1=1, h2=1), name="quadric_cone_blowup")


def line(name: str = "L") -> CurveClass:
    """A line of P^3, before any blow-up."""
    return CurveClass(name, 0, (1,))


def p3_blown_up_in_line() -> Variety3Fold:
    X = blow_up(projective_space().with_curve(line()), BlowUpSpec.along(line()), name="p3_line")
    return X.with_fibration(FibrationDescriptor("pencil", 1, 2, X.cls("-2H + 2E")))


def p3_blown_up_in_two_lines() -> Variety3Fold:
    P = projective_space().with_curve(line("L1")).with_curve(line("L2"))
    Y = blow_up(P, BlowUpSpec.along(P.curve("L1"), label="E1", disjoint=("L2",)))
    Y = blow_up(Y, BlowUpSpec.along(Y.curve("L2"), label="E2"), name="p3_two_lines")
    Y = Y.with_fibration(FibrationDescriptor("pencil_L1", 1, 2, Y.cls("-2H + 2E1")))
    Y = Y.with_fibration(FibrationDescriptor("pencil_L2", 1, 2, Y.cls("-2H + 2E2")))
    return Y.with_fibration(FibrationDescriptor("to_p1xp1", 2, 1, Y.cls("-4H + 2E1 + 2E2")))


def example1_variety() -> Variety3Fold:
    """P^3 blown up in a line L and then in two fibres of the exceptional divisor.

    Realized as the tower P^3 <- V7 (point p1 on L) <- blow-up along the strict
    transform of L <- blow-up along a fibre over a second point of L, then
    rebased to ``(H1, H2, D11, D1)`` with ``H1 = H - Ep`` the pullback of a
    line from P^2.
    """
    P = projective_space().with_curve(line("L"))
    X = blow_up(P, BlowUpSpec.point(label="Ep", transforms={"L": 1}))
    X = blow_up(X, BlowUpSpec.along(X.curve("L"), label="EL"))
    fibre = CurveClass("ell", 0, (0, 0, -1))
    X = blow_up(X.with_curve(fibre), BlowUpSpec.along(fibre, label="Eell"))
    X = rebase(X, ["H - Ep", "H", "EL", "Eell"], ["H1", "H2", "D11", "D1"])
    X = X.with_named(H3="H1 - D11")
    # g: X -> F1 -> P^1, the ruling through the blown-up point of P^2
    X = X.with_fibration(FibrationDescriptor("g", 1, 2, X.cls("-2H3")))
    return X.renamed("example1")


def example2_variety() -> Variety3Fold:
    """P^3 blown up in a point p and a plane cubic C not through p.

    Rebased to ``(H1, H2, H3)`` with ``H1 = H - Ep``, ``H2 = H`` and
    ``H3 = 3H - 2Ep - EC`` the tautological class of ``P(O + O(2))``.
    """
    cubic = CurveClass("C", 1, (3,))
    P = projective_space().with_curve(cubic)
    X = blow_up(P, BlowUpSpec.point(label="Ep", disjoint=("C",)))
    X = blow_up(X, BlowUpSpec.along(X.curve("C"), label="EC"))
    X = rebase(X, ["H - Ep", "H", "3H - 2Ep - EC"], ["H1", "H2", "H3"])
    X = X.with_named(Df1="EC", Df2="3H1 - EC")
    X = X.with_fibration(FibrationDescriptor("g", 2, 1, X.cls("-3H1"), discriminant=True))
    return X.renamed("example2")


def v7_blown_up_in_exceptional_line() -> Variety3Fold:
    X = v7_as_blowup()
    X = X.with_curve(CurveClass("ell", 0, (0, -1)))
    X = blow_up(X, BlowUpSpec.along(X.curve("ell"), label="El"), name="v7_line_in_E")
    # the line in E ~ P^2 maps isomorphically onto a line of P^2: a conic bundle
    return X.with_fibration(FibrationDescriptor("pi", 2, 1, X.cls("-3H + 3E"), discriminant=True))


def v7_blown_up_in_line_through_center() -> Variety3Fold:
    P = projective_space().with_curve(line("L"))
    X = blow_up(P, BlowUpSpec.point(transforms={"L": 1}))
    X = blow_up(X, BlowUpSpec.along(X.curve("L"), label="EL"), name="v7_line_through_p")
    # P^1-bundle over F1; the exceptional curve of F1 pulls back to EL
    return X.with_fibration(FibrationDescriptor("to_F1", 2, 1, X.cls("-3H + 3E + EL")))


def p1xf1_blown_up_in_exceptional_curve() -> Variety3Fold:
    S = del_pezzo(1)
    X = product_with_p1(S, name="dp1xp1")
    center = CurveClass("txe", 0, (0, -1, 0))
    X = blow_up(X.with_curve(center),
                BlowUpSpec.along(center, label="E", keep_fibrations=("pr_S", "pr_P1")),
                name="p1xf1_blowup")
    # composite with the ruling F1 -> P^1: every fibre P^1 x P^1 is blown up in one point
    X = X.with_fibration(FibrationDescriptor("ruling", 1, 2, X.cls("-2h + 2e1")))
    return X.with_fibration(
        FibrationDescriptor("to_p1xp1", 2, 1, X.cls("-2F - 2h + 2e1"), discriminant=True))


def two_lines_blown_up_in_two_fibres() -> Variety3Fold:
    Y = replace(p3_blown_up_in_two_lines(), fibrations=())
    ell = CurveClass("ell", 0, (0, -1, 0))
    ell2 = CurveClass("ell2", 0, (0, -1, 0))
    X = Y.with_curve(ell).with_curve(ell2)
    X = blow_up(X, BlowUpSpec.along(ell, label="E3", disjoint=("ell2",)))
    X = blow_up(X, BlowUpSpec.along(X.curve("ell2"), label="E4"), name="p3_two_lines_two_fibres")
    X = X.with_fibration(FibrationDescriptor("pencil_L1", 1, 2, X.cls("-2H + 2E1")))
    X = X.with_fibration(FibrationDescriptor("pencil_L2", 1, 2, X.cls("-2H + 2E2")))
    return X.with_fibration(
        FibrationDescriptor("to_p1xp1", 2, 1, X.cls("-4H + 2E1 + 2E2"), discriminant=True))


_SURFACES = {
    "p2": projective_plane,
    "p1xp1": p1xp1,
    "f1": lambda: replace(del_pezzo(1), name="f1"),
    **{f"dp{k}": (lambda k=k: del_pezzo(k)) for k in range(1, 9)},
}

_THREEFOLDS = {
    "p3": projective_space,
    "q3": quadric,
    "v7": v7,
    "v7_blowup": v7_as_blowup,
    "w4_blowup": veronese_cone_blowup,
    "quadric_cone_blowup": quadric_cone_blowup,
    "p3_line": p3_blown_up_in_line,
    "p3_two_lines": p3_blown_up_in_two_lines,
    "p3_two_lines_two_fibres": two_lines_blown_up_in_two_fibres,
    "v7_line_in_E": v7_blown_up_in_exceptional_line,
    "v7_line_through_p": v7_blown_up_in_line_through_center,
    "p1xf1_blowup": p1xf1_blown_up_in_exceptional_curve,
    "example1": example1_variety,
    "example2": example2_variety,
    "p2xp1": lambda: product_with_p1(projective_plane(), name="p2xp1"),
    "p1xp1xp1": lambda: product_with_p1(p1xp1(), name="p1xp1xp1"),
    **{f"dp{k}xp1": (lambda k=k: product_with_p1(del_pezzo(k), name=f"dp{k}xp1")) for k in range(1, 9)},
}


def surface_presets() -> list[str]:
    return list(_SURFACES)


def threefold_presets() -> list[str]:
    return list(_THREEFOLDS)


def preset(name: str) -> Variety3Fold | Surface:
    if name in _THREEFOLDS:
        X = _THREEFOLDS[name]()
        return X if X.name == name else replace(X, name=name)
    if name in _SURFACES:
        return _SURFACES[name]()
    raise LatticeError(f"unknown preset {name!r}")


def product_presets() -> list[str]:
    """The ten del Pezzo surfaces times P^1."""
    return ["p2xp1", "p1xp1xp1", *(f"dp{k}xp1" for k in range(1, 9))]


def pullback_triples_equal(X: Variety3Fold, Y: Variety3Fold) -> bool:
    """True if every basis triple of X keeps its value among the first ``rank(X)`` classes of Y."""
    for i, j, k in itertools.combinations_with_replacement(range(X.rank), 3):
        if X.form[(i, j, k)] != Y.form[(i, j, k)]:
            return False
    return True
