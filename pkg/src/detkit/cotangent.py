"""Cotangent cohomology T^0, T^1, T^2 of a presented algebra over Q[t].

For ``A = P/J`` with ``P = Q[t, z_1..z_n]`` and ``J = (f_1..f_m)`` the
three-term complex of free ``A``-modules

    L_2 = Q/Q_0  <-  L_1 = A^m  <-  L_0 = A^n

(``Q`` the relation module of the ``f_i``, ``Q_0`` its Koszul part, the map
``L_1 <- L_0`` the Jacobian) is dualised into a coefficient module ``M``:

    Hom(L_0, M) = M^n  --d0-->  Hom(L_1, M) = M^m  --d1-->  Hom(Q/Q_0, M)

and ``T^i`` is the ``i``-th cohomology.  Every module is a finitely presented
``P``-module ``P^g / R`` whose relations include ``J P^g``; kernels and
subquotients are computed with :func:`detkit.groebner.modulo`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .groebner import ModuleElement, SyzygyBasis, buchberger, modulo, syzygy_basis
from .rings import Polynomial, Ring


@dataclass(frozen=True)
class Presentation:
    """``A = Q[t][z]/(f_1..f_m)``, optionally over the truncated base ``Q[t]/(t^L)``."""

    ring: Ring
    generators: tuple[Polynomial, ...] = ()
    base_order: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        for f in self.generators:
            if f.ring != self.ring:
                raise ValueError("generator from a different ring")
        if self.base_order is not None and self.base_order < 1:
            raise ValueError("base_order must be positive")

    @property
    def n(self) -> int:
        return self.ring.n

    @property
    def m(self) -> int:
        return len(self.generators)

    def ideal(self) -> list[Polynomial]:
        """Generators of the defining ideal of ``A`` in ``P`` (including ``t^L`` for a truncated base)."""
        out = [f for f in self.generators if not f.is_zero()]
        if self.base_order is not None:
            out.append(self.ring.t_power(self.base_order))
        return out

    def base_change(self, L: int) -> Presentation:
        return Presentation(self.ring, self.generators, L)

    def __str__(self) -> str:
        gens = ", ".join(str(f) for f in self.generators)
        base = f" over Q[{self.ring.base}]/({self.ring.base}^{self.base_order})" if self.base_order else ""
        return f"({gens}){base}"


@dataclass(frozen=True)
class CotangentComplexData:
    jacobian: tuple[tuple[Polynomial, ...], ...]
    syzygies: SyzygyBasis
    koszul: tuple[ModuleElement, ...]


@dataclass(frozen=True)
class CoefficientModule:
    """The ``A``-module ``(N + J) / (D + J)`` for ideals ``D`` inside ``N``.

    ``CoefficientModule.ring_itself()`` is ``A``; the truncation module
    ``A / aA`` has ``N = (1)`` and ``D = a``.
    """

    numerator: tuple[Polynomial, ...] | None = None  # None means the unit ideal
    denominator: tuple[Polynomial, ...] = ()
    label: str = "A"

    @classmethod
    def ring_itself(cls) -> CoefficientModule:
        return cls()

    @classmethod
    def quotient(cls, denominator: Sequence[Polynomial], label: str = "A/aA") -> CoefficientModule:
        return cls(None, tuple(denominator), label)

    @classmethod
    def ideal_quotient(cls, numerator: Sequence[Polynomial], denominator: Sequence[Polynomial], label: str = "I/I'") -> CoefficientModule:
        return cls(tuple(numerator), tuple(denominator), label)

    def presentation(self, pres: Presentation) -> tuple[int, list[ModuleElement]]:
        """``(g, R)`` with ``M = P^g / R`` as a ``P``-module; ``R`` contains ``J P^g``."""
        J = pres.ideal()
        den = [d for d in self.denominator if not d.is_zero()]
        if self.numerator is None:
            return 1, [ModuleElement([p]) for p in J + den]
        num = [p for p in self.numerator if not p.is_zero()]
        if not num:
            return 0, []
        rels = modulo(num, J + den)
        return len(num), list(rels)


def truncation_ideal(ring: Ring, L: int, d: int) -> list[Polynomial]:
    """``(t^L)`` plus all fibre monomials of degree ``d + 1``."""
    out = [ring.t_power(L)]
    out.extend(Polynomial(ring, {m: 1}) for m in ring.z_monomials(d + 1))
    return out


def truncation_module(ring: Ring, L: int, d: int) -> CoefficientModule:
    return CoefficientModule.quotient(truncation_ideal(ring, L, d), label=f"A/a(L={L},d={d})")


# ---------------------------------------------------------------------------
# module presentations


@dataclass
class ModulePresentation:
    """A module ``P^g / relations`` over the presented ring.

    ``embedding`` (optional) records the generators as elements of the ambient
    free module from which the module was cut out.
    """

    ring: Presentation
    rank: int
    relations: tuple[ModuleElement, ...]
    embedding: tuple[ModuleElement, ...] | None = None
    _gb: object = field(default=None, repr=False, compare=False)

    def groebner(self):
        if self._gb is None:
            if self.rank == 0:
                self._gb = None
                return None
            rels = list(self.relations) or [ModuleElement.zero(self.ring.ring, self.rank)]
            self._gb = buchberger(rels)
        return self._gb

    def relation_columns(self) -> list[list[Polynomial]]:
        return [list(r) for r in self.relations]

    def reduce(self, v: ModuleElement) -> ModuleElement:
        return self.groebner().reduce(v)

    def __str__(self) -> str:
        if self.rank == 0:
            return "0"
        return f"A^{self.rank} / <{len(self.relations)} relations>"


def _free_relations(ring: Ring, rank: int, J: Sequence[Polynomial]) -> list[ModuleElement]:
    return [_unit(ring, rank, i, f) for f in J for i in range(rank)]


def _unit(ring: Ring, rank: int, i: int, p: Polynomial | None = None) -> ModuleElement:
    p = ring.one if p is None else p
    return ModuleElement(p if j == i else ring.zero for j in range(rank))


def _block(ring: Ring, blocks: int, g: int, rels: Sequence[ModuleElement]) -> list[ModuleElement]:
    """``R`` repeated in each of ``blocks`` copies of ``P^g``."""
    out = []
    zero = ring.zero
    for b in range(blocks):
        for r in rels:
            comps = [zero] * (blocks * g)
            comps[b * g : (b + 1) * g] = list(r)
            out.append(ModuleElement(comps))
    return out


def _prune(ring: Ring, rank: int, rels: list[ModuleElement], emb: list[ModuleElement] | None):
    """Drop generators that a relation expresses through the others."""
    while rank > 0:
        nonzero = [r for r in rels if not r.is_zero()]
        if not nonzero:
            break
        gb = buchberger(nonzero)
        unit = None
        for (comp, mono), v in zip(gb.leading_terms(), gb.generators):
            if not any(mono):
                unit = (comp, v)
                break
        if unit is None:
            rels = list(gb.generators)
            break
        i, v = unit
        # v = e_i + sum_{j>i} c_j e_j with constants c_j: substitute e_i away
        new = []
        for r in gb.generators:
            if r is v:
                continue
            coef = r[i]
            rr = r - v.scale(coef) if not coef.is_zero() else r
            comps = [c for j, c in enumerate(rr) if j != i]
            if comps:
                new.append(ModuleElement(comps))
        rank -= 1
        rels = [r for r in new if not r.is_zero()]
        if emb is not None:
            emb = emb[:i] + emb[i + 1 :]
    if rank == 0:
        return 0, [], [] if emb is not None else None
    return rank, rels, emb


def _subquotient(pres: Presentation, K: Sequence[ModuleElement], rels: Sequence[ModuleElement]) -> ModulePresentation:
    """``<K> / (<K> meet <rels>)``, given ``rels`` inside the span of ``K``'s ambient."""
    ring = pres.ring
    K = [k for k in K if not k.is_zero()]
    if not K:
        return ModulePresentation(pres, 0, (), ())
    R = modulo(K, list(rels))
    rank, R, emb = _prune(ring, len(K), list(R), list(K))
    return ModulePresentation(pres, rank, tuple(R), tuple(emb) if emb is not None else None)


# ---------------------------------------------------------------------------
# the complex


@lru_cache(maxsize=256)
def ls_complex(pres: Presentation) -> CotangentComplexData:
    ring = pres.ring
    fs = pres.generators
    jac = tuple(tuple(f.diff(j + 1) for j in range(ring.n)) for f in fs)
    if not fs:
        return CotangentComplexData(jac, SyzygyBasis(()), ())
    m = len(fs)
    if pres.base_order is None:
        syz = syzygy_basis(list(fs))
    else:
        tl = ring.t_power(pres.base_order)
        full = modulo(list(fs) + [tl])
        gens = []
        for s in full:
            v = ModuleElement(s[:m])
            if not v.is_zero():
                gens.append(v)
        syz = SyzygyBasis(tuple(gens))
    kos = []
    for i in range(m):
        for j in range(i + 1, m):
            comps = [ring.zero] * m
            comps[i] = fs[j]
            comps[j] = -fs[i]
            kos.append(ModuleElement(comps))
    return CotangentComplexData(jac, syz, tuple(kos))


def _qq0_relations(pres: Presentation, data: CotangentComplexData) -> list[ModuleElement]:
    """Relations ``C`` of ``Q/Q_0 = P^r / C`` on the syzygy generators."""
    ring = pres.ring
    m = pres.m
    extra = list(data.koszul)
    if pres.base_order is not None:
        tl = ring.t_power(pres.base_order)
        extra += [_unit(ring, m, i, tl) for i in range(m)]
    return modulo(list(data.syzygies.generators), extra)


def _coefficients(pres: Presentation, M: CoefficientModule | None) -> tuple[int, list[ModuleElement]]:
    return (M or CoefficientModule.ring_itself()).presentation(pres)


def _jacobian_images(pres: Presentation, data: CotangentComplexData, g: int) -> list[ModuleElement]:
    """Images under ``d0`` of the basis ``e_(j,c)`` of ``P^(n g)``, as vectors in ``P^(m g)``."""
    ring = pres.ring
    m = pres.m
    out = []
    for j in range(pres.n):
        for c in range(g):
            comps = [ring.zero] * (m * g)
            for i in range(m):
                comps[i * g + c] = data.jacobian[i][j]
            out.append(ModuleElement(comps))
    return out


def _syzygy_images(pres: Presentation, data: CotangentComplexData, g: int) -> list[ModuleElement]:
    """Images under ``d1`` of the basis ``e_(i,c)`` of ``P^(m g)``, as vectors in ``P^(r g)``."""
    ring = pres.ring
    S = data.syzygies.generators
    r = len(S)
    out = []
    for i in range(pres.m):
        for c in range(g):
            comps = [ring.zero] * (r * g)
            for l, s in enumerate(S):
                comps[l * g + c] = s[i]
            out.append(ModuleElement(comps))
    return out


def t0(pres: Presentation, M: CoefficientModule | None = None) -> ModulePresentation:
    """Derivations ``A -> M`` over the base: ``ker d0`` inside ``M^n``."""
    ring = pres.ring
    g, R = _coefficients(pres, M)
    n, m = pres.n, pres.m
    if g == 0 or n == 0:
        return ModulePresentation(pres, 0, (), ())
    data = ls_complex(pres)
    Rn = _block(ring, n, g, R)
    if m == 0:
        K = [_unit(ring, n * g, i) for i in range(n * g)]
    else:
        cols = _jacobian_images(pres, data, g)
        K = modulo(cols, _block(ring, m, g, R))
    return _subquotient(pres, K, Rn)


def _t1_cycles(pres: Presentation, g: int, R: list[ModuleElement]) -> list[ModuleElement]:
    ring = pres.ring
    m = pres.m
    data = ls_complex(pres)
    r = len(data.syzygies)
    if r == 0:
        return [_unit(ring, m * g, i) for i in range(m * g)]
    cols = _syzygy_images(pres, data, g)
    return modulo(cols, _block(ring, r, g, R))


def t1(pres: Presentation, M: CoefficientModule | None = None) -> ModulePresentation:
    """``ker d1 / im d0`` inside ``M^m``."""
    ring = pres.ring
    g, R = _coefficients(pres, M)
    m = pres.m
    if g == 0 or m == 0:
        return ModulePresentation(pres, 0, (), ())
    data = ls_complex(pres)
    K = _t1_cycles(pres, g, R)
    rels = _jacobian_images(pres, data, g) + _block(ring, m, g, R)
    return _subquotient(pres, K, rels)


def hom_qq0(pres: Presentation, M: CoefficientModule | None = None) -> tuple[list[ModuleElement], int, list[ModuleElement]]:
    """``Hom(Q/Q_0, M)`` as a submodule of ``M^r``: returns ``(H, g, R)``."""
    ring = pres.ring
    g, R = _coefficients(pres, M)
    data = ls_complex(pres)
    r = len(data.syzygies)
    if g == 0 or r == 0:
        return [], g, R
    C = _qq0_relations(pres, data)
    if not C:
        return [_unit(ring, r * g, i) for i in range(r * g)], g, R
    cols = []
    for l in range(r):
        for c in range(g):
            comps = [ring.zero] * (len(C) * g)
            for k, rel in enumerate(C):
                comps[k * g + c] = rel[l]
            cols.append(ModuleElement(comps))
    H = modulo(cols, _block(ring, len(C), g, R))
    return H, g, R


def t2(pres: Presentation, M: CoefficientModule | None = None) -> ModulePresentation:
    """``Hom(Q/Q_0, M) / im d1``."""
    ring = pres.ring
    H, g, R = hom_qq0(pres, M)
    if not H:
        return ModulePresentation(pres, 0, (), ())
    data = ls_complex(pres)
    r = len(data.syzygies)
    rels = _syzygy_images(pres, data, g) + _block(ring, r, g, R)
    return _subquotient(pres, H, rels)


# ---------------------------------------------------------------------------
# module invariants


def is_zero_module(mp: ModulePresentation) -> bool:
    if mp.rank == 0:
        return True
    return mp.groebner().is_unit()


def annihilator(mp: ModulePresentation) -> list[Polynomial]:
    """Reduced Groebner basis of ``Ann(M)`` as an ideal of ``P`` containing ``J``."""
    ring = mp.ring.ring
    J = mp.ring.ideal()
    if is_zero_module(mp):
        return [ring.one]
    g = mp.rank
    v = [ring.zero] * (g * g)
    for i in range(g):
        v[i * g + i] = ring.one
    rels = _block(ring, g, g, list(mp.relations) + _free_relations(ring, g, J))
    ker = modulo([ModuleElement(v)], rels)
    gens = [k[0] for k in ker if not k[0].is_zero()]
    if not gens:
        return [] if not J else list(buchberger(J).generators)
    return list(buchberger(gens).generators)


def torsion_kernel(mp: ModulePresentation, i: int):
    """Groebner basis of the preimage in ``P^g`` of ``{x in M : t^i x = 0}``."""
    ring = mp.ring.ring
    g = mp.rank
    ti = ring.t_power(i)
    cols = [_unit(ring, g, j, ti) for j in range(g)]
    rels = list(mp.relations) + _free_relations(ring, g, mp.ring.ideal())
    ker = modulo(cols, rels)
    return buchberger(ker) if ker else buchberger([ModuleElement.zero(ring, g)])


def truncated_dimension(mp: ModulePresentation, L: int, d: int) -> int:
    """``dim_Q`` of ``mp / a mp`` where ``a = (t^L) + (fibre degree d+1)``."""
    if mp.rank == 0:
        return 0
    ring = mp.ring.ring
    a = truncation_ideal(ring, L, d)
    rels = list(mp.relations) + _free_relations(ring, mp.rank, a)
    gb = buchberger(rels)
    return gb.standard_monomial_count(L, d)


def t1_truncated_dimension(pres: Presentation, L: int, d: int) -> int:
    """``dim_Q T^1(A/B, A/aA)`` for the truncation ideal ``a`` of the box ``(L, d)``."""
    return truncated_dimension(t1(pres, truncation_module(pres.ring, L, d)), L, d)


def t2_truncated_dimension(pres: Presentation, L: int, d: int) -> int:
    return truncated_dimension(t2(pres, truncation_module(pres.ring, L, d)), L, d)
