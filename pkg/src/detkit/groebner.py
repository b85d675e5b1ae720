"""Groebner bases for ideals and submodules of free modules over Q[t, z].

The engine works on sparse vectors ``{(component, monomial): Fraction}``; an
ideal is a submodule of rank one.  Buchberger's algorithm runs with the sugar
selection strategy and the Gebauer--Moeller pair criteria.

Certificates come from one construction: to express elements in terms of the
generators ``g_1..g_s`` of a submodule of ``P^r`` we compute a Groebner basis
of the vectors ``(g_i, e_i)`` in ``P^r + P^s`` under an order in which every
term of the first ``r`` components beats every term of the last ``s``.  Basis
elements with a nonzero first block carry their cofactors in the second
block; elements whose first block vanishes are syzygies.  Adding further
vectors ``(h, 0)`` computes kernels of maps into quotient modules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .errors import ContextMismatchError, ResourceLimitError
from .rings import MonomialOrder, Polynomial, Ring, sum_polys

Term = tuple  # (component, monomial)
Vec = dict  # Term -> Fraction


@dataclass
class Limits:
    """Hard resource caps; exceeding either raises :class:`ResourceLimitError`."""

    max_pairs: int = 200_000
    max_terms: int = 400_000


LIMITS = Limits()


def configure_limits(max_pairs: int | None = None, max_terms: int | None = None) -> None:
    if max_pairs is not None:
        LIMITS.max_pairs = max_pairs
    if max_terms is not None:
        LIMITS.max_terms = max_terms
    _clear_caches()


# ---------------------------------------------------------------------------
# module elements


@dataclass(frozen=True)
class ModuleElement:
    """A vector in a free module ``P^m`` with polynomial entries."""

    components: tuple[Polynomial, ...]

    def __init__(self, components: Iterable[Polynomial]):
        object.__setattr__(self, "components", tuple(components))
        if not self.components:
            raise ValueError("module elements need at least one component")
        ring = self.components[0].ring
        if any(c.ring != ring for c in self.components):
            raise ContextMismatchError("components from different rings")

    @classmethod
    def unit(cls, ring: Ring, rank: int, i: int) -> ModuleElement:
        return cls(ring.one if j == i else ring.zero for j in range(rank))

    @classmethod
    def zero(cls, ring: Ring, rank: int) -> ModuleElement:
        return cls(ring.zero for _ in range(rank))

    @property
    def ring(self) -> Ring:
        return self.components[0].ring

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def _check(self, other: ModuleElement) -> None:
        if len(other) != len(self):
            raise ContextMismatchError("module elements of different ranks")

    def __add__(self, other: ModuleElement) -> ModuleElement:
        self._check(other)
        return ModuleElement(a + b for a, b in zip(self, other))

    def __sub__(self, other: ModuleElement) -> ModuleElement:
        self._check(other)
        return ModuleElement(a - b for a, b in zip(self, other))

    def __neg__(self) -> ModuleElement:
        return ModuleElement(-a for a in self)

    def scale(self, p) -> ModuleElement:
        return ModuleElement(a * p for a in self)

    def dot(self, polys: Sequence[Polynomial]) -> Polynomial:
        """``sum_i self[i] * polys[i]``."""
        if len(polys) != len(self):
            raise ContextMismatchError("length mismatch in dot product")
        return sum_polys(self.ring, (a * b for a, b in zip(self, polys)))

    def truncate(self, L: int) -> ModuleElement:
        return ModuleElement(a.truncate(L) for a in self)

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self)

    def __str__(self) -> str:
        return "(" + ", ".join(str(a) for a in self) + ")"


Element = Union[Polynomial, ModuleElement]


def combine(elements: Sequence[Element], coeffs: Sequence[Polynomial]) -> Element:
    """``sum_i coeffs[i] * elements[i]``."""
    if not elements:
        raise ValueError("empty combination")
    first = elements[0]
    if isinstance(first, Polynomial):
        return sum_polys(first.ring, (c * e for c, e in zip(coeffs, elements)))
    rank = len(first)
    return ModuleElement(
        sum_polys(first.ring, (c * e[i] for c, e in zip(coeffs, elements))) for i in range(rank)
    )


def _rank_of(x: Element) -> int | None:
    return None if isinstance(x, Polynomial) else len(x)


def _to_vec(x: Element, offset: int = 0) -> Vec:
    if isinstance(x, Polynomial):
        return {(offset, m): c for m, c in x.items()}
    v: Vec = {}
    for i, p in enumerate(x):
        for m, c in p.items():
            v[(offset + i, m)] = c
    return v


def _from_vec(vec: Vec, ring: Ring, rank: int | None, offset: int = 0) -> Element:
    if rank is None:
        return Polynomial(ring, {m: c for (i, m), c in vec.items() if i == offset}, _clean=True)
    comps: list[dict] = [{} for _ in range(rank)]
    for (i, m), c in vec.items():
        j = i - offset
        if 0 <= j < rank:
            comps[j][m] = c
    return ModuleElement(Polynomial(ring, d, _clean=True) for d in comps)


# ---------------------------------------------------------------------------
# term orders on module terms


class _TermOrder:
    """Module term order: term-over-position, optionally with an eliminated block.

    With ``split = s`` every term in a component ``< s`` is larger than every
    term in a component ``>= s``.
    """

    def __init__(self, order: MonomialOrder, split: int | None = None):
        self.order = order
        self.split = split
        self._memo: dict = {}

    def key(self, term: Term):
        k = self._memo.get(term)
        if k is None:
            comp, mono = term
            k = (self.order.key(mono), -comp)
            if self.split is not None:
                k = (comp < self.split,) + k
            if len(self._memo) > 500_000:
                self._memo.clear()
            self._memo[term] = k
        return k


def _divides(a, b) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def _quo(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _coprime(a, b) -> bool:
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


class _Elt:
    __slots__ = ("vec", "lt", "sugar")

    def __init__(self, vec: Vec, lt: Term, sugar: int):
        self.vec = vec
        self.lt = lt
        self.sugar = sugar


def _monic(vec: Vec, lt: Term) -> Vec:
    c = vec[lt]
    if c == 1:
        return vec
    inv = 1 / c
    return {k: v * inv for k, v in vec.items()}


def _sugar(vec: Vec) -> int:
    return max(sum(m) for (_, m) in vec)


def _sub_multiple(f: Vec, g: Vec, coef: Fraction, shift) -> None:
    """In place: ``f -= coef * x^shift * g``."""
    for (gc, gm), gv in g.items():
        t = (gc, tuple(a + b for a, b in zip(gm, shift)))
        s = f.get(t, 0) - coef * gv
        if s:
            f[t] = s
        else:
            f.pop(t, None)


def _reduce(
    vec: Vec,
    elts: Sequence[_Elt],
    K,
    *,
    split: int | None = None,
    top_only: bool = False,
    quotients: list | None = None,
) -> Vec:
    """Full (or top) reduction of ``vec`` by monic ``elts``, first divisor wins.

    With ``split`` the reduction stops once the leading term leaves the first
    block; the remaining (cofactor) terms are returned untouched.
    ``quotients``, when given, receives one ``{monomial: coeff}`` dict per
    element.
    """
    f = dict(vec)
    rem: Vec = {}
    by_comp: dict[int, list[int]] = {}
    for idx, e in enumerate(elts):
        by_comp.setdefault(e.lt[0], []).append(idx)
    limit = LIMITS.max_terms
    while f:
        lt = max(f, key=K)
        if split is not None and lt[0] >= split:
            rem.update(f)
            break
        comp, mono = lt
        hit = None
        for idx in by_comp.get(comp, ()):
            if _divides(elts[idx].lt[1], mono):
                hit = idx
                break
        if hit is None:
            c = f.pop(lt)
            rem[lt] = c
            if top_only:
                rem.update(f)
                break
            continue
        g = elts[hit]
        coef = f[lt]
        shift = _quo(mono, g.lt[1])
        _sub_multiple(f, g.vec, coef, shift)
        if quotients is not None:
            q = quotients[hit]
            q[shift] = q.get(shift, 0) + coef
        if len(f) > limit:
            raise ResourceLimitError(f"intermediate vector exceeded {limit} terms")
    return rem


class _Buchberger:
    def __init__(self, order: _TermOrder, *, split: int | None, full: bool, ideal: bool):
        self.K = order.key
        self.split = split
        self.full = full
        self.ideal = ideal
        self.elts: list[_Elt] = []
        self.G: list[int] = []
        self.pairs: list[tuple] = []
        self.processed = 0

    def _keep(self, vec: Vec) -> _Elt | None:
        if not vec:
            return None
        lt = max(vec, key=self.K)
        if not self.full and self.split is not None and lt[0] >= self.split:
            return None
        return _Elt(_monic(vec, lt), lt, _sugar(vec))

    def _pair_record(self, i: int, j: int) -> tuple:
        a, b = self.elts[i], self.elts[j]
        L = _lcm(a.lt[1], b.lt[1])
        dL = sum(L)
        sugar = max(a.sugar + dL - sum(a.lt[1]), b.sugar + dL - sum(b.lt[1]))
        return (sugar, self.K((a.lt[0], L)), i, j, L)

    def _update(self, h: int) -> None:
        E = self.elts
        hc, hm = E[h].lt
        same = [g for g in self.G if E[g].lt[0] == hc]
        C = list(same)
        D: list[int] = []
        while C:
            g1 = C.pop(0)
            l1 = _lcm(hm, E[g1].lt[1])
            if self.ideal and _coprime(hm, E[g1].lt[1]):
                D.append(g1)
                continue
            redundant = any(_divides(_lcm(hm, E[g2].lt[1]), l1) for g2 in C) or any(
                _divides(_lcm(hm, E[g2].lt[1]), l1) for g2 in D
            )
            if not redundant:
                D.append(g1)
        new = [g for g in D if not (self.ideal and _coprime(hm, E[g].lt[1]))]
        kept = []
        for rec in self.pairs:
            i, j, L = rec[2], rec[3], rec[4]
            if E[i].lt[0] == hc and _divides(hm, L):
                if _lcm(E[i].lt[1], hm) != L and _lcm(hm, E[j].lt[1]) != L:
                    continue
            kept.append(rec)
        kept.extend(self._pair_record(g, h) for g in new)
        self.pairs = kept
        self.G = [g for g in self.G if not (E[g].lt[0] == hc and _divides(hm, E[g].lt[1]))] + [h]

    def _add(self, elt: _Elt) -> None:
        self.elts.append(elt)
        self._update(len(self.elts) - 1)

    def run(self, vectors: Sequence[Vec]) -> list[Vec]:
        for v in vectors:
            e = self._keep(dict(v))
            if e is not None:
                self._add(e)
        max_pairs = LIMITS.max_pairs
        while self.pairs:
            best = min(range(len(self.pairs)), key=lambda k: self.pairs[k][:4])
            _, _, i, j, L = self.pairs.pop(best)
            self.processed += 1
            if self.processed > max_pairs:
                raise ResourceLimitError(f"S-pair budget of {max_pairs} exhausted")
            a, b = self.elts[i], self.elts[j]
            s: Vec = {}
            _sub_multiple(s, a.vec, Fraction(-1), _quo(L, a.lt[1]))
            _sub_multiple(s, b.vec, Fraction(1), _quo(L, b.lt[1]))
            sugar = max(a.sugar + sum(L) - sum(a.lt[1]), b.sugar + sum(L) - sum(b.lt[1]))
            active = [self.elts[g] for g in self.G]
            r = _reduce(s, active, self.K, split=None if self.full else self.split)
            e = self._keep(r)
            if e is not None:
                e.sugar = max(e.sugar, sugar)
                self._add(e)
        return self._interreduce()

    def _interreduce(self) -> list[Vec]:
        E = self.elts
        G = sorted(self.G, key=lambda g: self.K(E[g].lt))
        minimal = [
            g
            for g in G
            if not any(
                h != g and E[h].lt[0] == E[g].lt[0] and _divides(E[h].lt[1], E[g].lt[1]) for h in G
            )
        ]
        out: list[Vec] = []
        elts = [E[g] for g in minimal]
        for idx, e in enumerate(elts):
            others = elts[:idx] + elts[idx + 1 :]
            tail = dict(e.vec)
            c = tail.pop(e.lt)
            red = _reduce(tail, others, self.K, split=None if self.full else self.split)
            red[e.lt] = c
            out.append(_monic(red, e.lt))
        for idx, v in enumerate(out):
            elts[idx] = _Elt(v, elts[idx].lt, elts[idx].sugar)
        return out


def _run(vectors: Sequence[Vec], order: MonomialOrder, *, split=None, full=True, ideal=False) -> tuple[list[Vec], _TermOrder]:
    to = _TermOrder(order, split)
    engine = _Buchberger(to, split=split, full=full, ideal=ideal)
    return engine.run(vectors), to


# ---------------------------------------------------------------------------
# public data types


@dataclass(frozen=True)
class DivisionCertificate:
    """``dividend = sum_i quotients[i] * divisors[i] + remainder`` exactly."""

    quotients: tuple[Polynomial, ...]
    remainder: Element

    def expand(self, divisors: Sequence[Element]) -> Element:
        total = combine(list(divisors), list(self.quotients))
        return total + self.remainder if isinstance(total, Polynomial) else total + self.remainder

    def check(self, dividend: Element, divisors: Sequence[Element]) -> bool:
        if len(divisors) != len(self.quotients):
            return False
        return self.expand(divisors) == dividend


@dataclass
class GroebnerBasis:
    """A reduced Groebner basis of an ideal (``rank is None``) or a submodule."""

    ring: Ring
    rank: int | None
    order: MonomialOrder
    generators: tuple[Element, ...]
    reduced: bool = True
    cofactors: tuple[tuple[Polynomial, ...], ...] | None = None
    _vecs: list = field(default_factory=list, repr=False)
    _to: _TermOrder | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def _elts(self) -> list[_Elt]:
        K = self._to.key
        return [_Elt(v, max(v, key=K), 0) for v in self._vecs]

    def leading_terms(self) -> list[Term]:
        K = self._to.key
        return [max(v, key=K) for v in self._vecs]

    def reduce(self, x: Element) -> Element:
        r = _reduce(_to_vec(x), self._elts(), self._to.key)
        return _from_vec(r, self.ring, self.rank)

    def contains(self, x: Element) -> bool:
        return not _reduce(_to_vec(x), self._elts(), self._to.key, top_only=True)

    def is_unit(self) -> bool:
        """True when the basis generates the whole ring (or free module)."""
        rank = self.rank or 1
        lts = self.leading_terms()
        units = {c for c, m in lts if not any(m)}
        return len(units) == rank

    def same_as(self, other: GroebnerBasis) -> bool:
        return self.rank == other.rank and self._vecs == other._vecs

    def standard_monomial_count(self, L: int, d: int) -> int:
        """Number of standard terms with ``t``-degree ``< L`` and fibre degree ``<= d``."""
        lts = self.leading_terms()
        ring = self.ring
        monos = [m for deg in range(d + 1) for m in ring.z_monomials(deg)]
        count = 0
        for comp in range(self.rank or 1):
            lt_c = [m for c, m in lts if c == comp]
            for a in range(L):
                for m in monos:
                    mm = (a,) + m[1:]
                    if not any(_divides(l, mm) for l in lt_c):
                        count += 1
        return count


def _ring_of(items: Sequence[Element]) -> Ring:
    for x in items:
        return x.ring
    raise ValueError("cannot infer ring from an empty generator list")


def _check_same(items: Sequence[Element]) -> tuple[Ring, int | None]:
    ring = _ring_of(items)
    rank = _rank_of(items[0])
    for x in items:
        if x.ring != ring:
            raise ContextMismatchError("generators from different rings")
        if _rank_of(x) != rank:
            raise ContextMismatchError("generators of different ranks")
    return ring, rank


def _gb_from_vecs(ring, rank, order, vecs, to, cofactors=None) -> GroebnerBasis:
    gens = tuple(_from_vec(v, ring, rank) for v in vecs)
    return GroebnerBasis(ring, rank, order, gens, True, cofactors, list(vecs), to)


@lru_cache(maxsize=512)
def _plain_gb(gens: tuple, order: MonomialOrder) -> GroebnerBasis:
    ring, rank = _check_same(gens)
    vecs, to = _run([_to_vec(g) for g in gens], order, ideal=rank is None)
    return _gb_from_vecs(ring, rank, order, vecs, to)


def buchberger(gens: Sequence[Element], order: MonomialOrder | None = None, ring: Ring | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal or submodule spanned by ``gens``.

    ``ring`` is only needed when ``gens`` is empty (the zero ideal).
    """
    gens = tuple(gens)
    if not gens:
        if ring is None:
            raise ValueError("empty generator list needs an explicit ring")
        order = order or ring.order
        return _gb_from_vecs(ring, None, order, [], _TermOrder(order))
    order = order or gens[0].ring.order
    return _plain_gb(gens, order)


@lru_cache(maxsize=512)
def _lift_gb(gens: tuple, order: MonomialOrder) -> GroebnerBasis:
    """Basis of ``<gens>`` whose elements carry cofactors w.r.t. ``gens``."""
    ring, rank = _check_same(gens)
    r = rank or 1
    s = len(gens)
    vecs = []
    for i, g in enumerate(gens):
        v = _to_vec(g)
        v[(r + i, ring._zero_mono)] = Fraction(1)
        vecs.append(v)
    out, to = _run(vecs, order, split=r, full=False)
    first = [{k: c for k, c in v.items() if k[0] < r} for v in out]
    # each element is (sum_i c_i gens_i, c): the second block is the cofactor row
    cof = tuple(
        tuple(_from_vec({k: c for k, c in v.items() if k[0] >= r}, ring, s, offset=r)) for v in out
    )
    gb = _gb_from_vecs(ring, rank, order, first, _TermOrder(order), cof)
    gb._aug = (out, to, r, s)  # type: ignore[attr-defined]
    return gb


def lift_basis(gens: Sequence[Element], order: MonomialOrder | None = None) -> GroebnerBasis:
    """Groebner basis with a cofactor row (w.r.t. ``gens``) for every element."""
    gens = tuple(gens)
    order = order or gens[0].ring.order
    return _lift_gb(gens, order)


def normal_form(p: Element, gb: GroebnerBasis) -> tuple[Element, DivisionCertificate]:
    """Remainder of ``p`` modulo ``gb`` with the quotient certificate."""
    elts = gb._elts()
    quotients: list[dict] = [{} for _ in elts]
    rem = _reduce(_to_vec(p), elts, gb._to.key, quotients=quotients)
    remainder = _from_vec(rem, gb.ring, gb.rank)
    qs = tuple(Polynomial(gb.ring, q, _clean=True) for q in quotients)
    qs = tuple(Polynomial(gb.ring, {m: c for m, c in q.items() if c}, _clean=True) for q in qs)
    return remainder, DivisionCertificate(qs, remainder)


def membership_certificate(p: Element, gens: Sequence[Element], order: MonomialOrder | None = None) -> list[Polynomial] | None:
    """Coefficients ``c`` with ``p = sum c_i gens_i``, or ``None`` if ``p`` is not in the span."""
    gens = tuple(gens)
    if not gens:
        return [] if p.is_zero() else None
    if p.ring != gens[0].ring or _rank_of(p) != _rank_of(gens[0]):
        raise ContextMismatchError("element and generators live in different modules")
    if p.is_zero():
        return [p.ring.zero for _ in gens]
    gb = lift_basis(gens, order)
    out, to, r, s = gb._aug  # type: ignore[attr-defined]
    K = to.key
    elts = [_Elt(v, max(v, key=K), 0) for v in out]
    rem = _reduce(_to_vec(p), elts, K, split=r)
    if any(k[0] < r for k in rem):
        return None
    # (p, 0) - sum q_j (G_j, C_j) = (0, -sum q_j C_j)
    coeffs = [-x for x in _from_vec(rem, p.ring, s, offset=r)]
    if combine(list(gens), coeffs) != p:
        raise AssertionError("internal error: membership certificate does not expand")
    return coeffs


def contains(gens: Sequence[Element], p: Element, order: MonomialOrder | None = None) -> bool:
    gens = tuple(gens)
    if not gens:
        return p.is_zero()
    return buchberger(gens, order).contains(p)


@dataclass(frozen=True)
class SyzygyBasis:
    """Generators of the module of relations among ``gens``."""

    generators: tuple[ModuleElement, ...]

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def check(self, gens: Sequence[Element]) -> bool:
        return all(_is_zero(combine(list(gens), list(s))) for s in self.generators)


def _is_zero(x: Element) -> bool:
    return x.is_zero()


@lru_cache(maxsize=512)
def _modulo(cols: tuple, rels: tuple, order: MonomialOrder) -> tuple[ModuleElement, ...]:
    items = cols + rels
    ring, rank = _check_same(items)
    r = rank or 1
    a = len(cols)
    vecs = []
    for i, c in enumerate(cols):
        v = _to_vec(c)
        v[(r + i, ring._zero_mono)] = Fraction(1)
        vecs.append(v)
    vecs.extend(_to_vec(x) for x in rels)
    out, _ = _run(vecs, order, split=r, full=True)
    kernel = []
    for v in out:
        if all(k[0] >= r for k in v):
            kernel.append(_from_vec(v, ring, a, offset=r))
    return tuple(kernel)


def modulo(cols: Sequence[Element], rels: Sequence[Element] = (), order: MonomialOrder | None = None) -> list[ModuleElement]:
    """Generators of ``{x : sum_j x_j cols_j in <rels>}`` (a reduced Groebner basis).

    This is the kernel of the map ``P^a -> P^r / <rels>`` given by the columns.
    """
    cols = tuple(cols)
    if not cols:
        return []
    order = order or cols[0].ring.order
    return list(_modulo(cols, tuple(rels), order))


def syzygy_basis(gens: Sequence[Element], order: MonomialOrder | None = None) -> SyzygyBasis:
    """Generators of the first syzygy module of ``gens``; each is checked by expansion."""
    gens = tuple(gens)
    syz = SyzygyBasis(tuple(_positive_first(s) for s in modulo(gens, (), order)))
    if not syz.check(gens):
        raise AssertionError("internal error: syzygy does not expand to zero")
    return syz


def _positive_first(v: ModuleElement) -> ModuleElement:
    """Flip the sign so the first nonzero component has a positive leading coefficient."""
    for c in v:
        if not c.is_zero():
            return -v if c.leading_coefficient() < 0 else v
    return v


def module_kernel(columns: Sequence[ModuleElement | Polynomial], J: Sequence[Polynomial], order: MonomialOrder | None = None) -> list[ModuleElement]:
    """Kernel of ``A^a -> A^b`` over ``A = P/(J)``; ``columns[j]`` is the image of ``e_j``.

    Polynomial columns are read as ``b = 1``.
    """
    cols = [c if isinstance(c, ModuleElement) else ModuleElement([c]) for c in columns]
    if not cols:
        return []
    ring = cols[0].ring
    b = len(cols[0])
    rels = []
    for f in J:
        if f.is_zero():
            continue
        for i in range(b):
            rels.append(ModuleElement(f if k == i else ring.zero for k in range(b)))
    return modulo(cols, rels, order)


def radical_membership(p: Polynomial, gens: Sequence[Polynomial], aux: str = "u_aux") -> bool:
    """Decide ``p in sqrt(gens)`` via ``1 in (gens) + (1 - u p)`` in a ring with one more variable."""
    gens = [g for g in gens]
    ring = p.ring
    if p.is_zero():
        return True
    name = aux
    while name in ring.names:
        name += "_"
    big = ring.extend([name])
    u = big.gen(name)
    ext = [g.embed(big) for g in gens] + [big.one - u * p.embed(big)]
    return buchberger(ext).is_unit()


def ideal_quotient(I: Sequence[Polynomial], f: Polynomial) -> list[Polynomial]:
    """Generators of ``(I : f)``."""
    ker = modulo([f], list(I))
    return [k[0] for k in ker]


def _clear_caches() -> None:
    _plain_gb.cache_clear()
    _lift_gb.cache_clear()
    _modulo.cache_clear()
