"""Brute-force checks by exact linear algebra inside a finite box of monomials.

Nothing here calls the Groebner engine: membership, dimensions of truncated
cotangent modules and coordinate changes are all found by Gaussian
elimination over Q on explicit monomial bases.  The box ``(L, d)`` holds the
monomials ``t^a z^u`` with ``a < L`` and ``|u| <= d``; its complement spans
the monomial ideal ``a = (t^L) + (z)^(d+1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Sequence

from .errors import BoxTooSmallError
from .rings import Polynomial, Ring


@dataclass(frozen=True)
class TruncationBox:
    L: int
    d: int

    def __post_init__(self):
        if self.L < 1 or self.d < 0:
            raise ValueError("a box needs L >= 1 and d >= 0")

    def contains(self, mono: tuple) -> bool:
        return mono[0] < self.L and sum(mono[1:]) <= self.d

    def monomials(self, ring: Ring) -> list[tuple]:
        zs = [m for deg in range(self.d + 1) for m in ring.z_monomials(deg)]
        return [(a,) + m[1:] for a in range(self.L) for m in zs]


# ---------------------------------------------------------------------------
# exact elimination


class Echelon:
    """Incremental echelon form of sparse vectors ``{column: Fraction}``.

    Each stored row remembers which inserted vectors it combines, so
    dependencies (kernel vectors) and solutions of linear systems come out
    exactly.
    """

    def __init__(self):
        self._piv: dict[Hashable, tuple[dict, dict]] = {}

    def __len__(self) -> int:
        return len(self._piv)

    @property
    def pivots(self) -> set:
        return set(self._piv)

    def reduce(self, vec: dict, combo: dict | None = None) -> tuple[dict, dict]:
        """Return ``(residual, x)`` with ``vec - sum x_k v_k = residual`` fully reduced."""
        row = dict(vec)
        x = dict(combo or {})
        while True:
            hits = [c for c in row if c in self._piv]
            if not hits:
                return row, x
            c = min(hits)
            prow, pcombo = self._piv[c]
            coef = row[c]
            for k, v in prow.items():
                s = row.get(k, 0) - coef * v
                if s:
                    row[k] = s
                else:
                    row.pop(k, None)
            for k, v in pcombo.items():
                s = x.get(k, 0) + coef * v
                if s:
                    x[k] = s
                else:
                    x.pop(k, None)

    def insert(self, vec: dict, label: Hashable | None = None) -> dict | None:
        """Insert a vector; returns a dependency ``{label: coeff}`` summing to zero, or ``None``."""
        combo = {label: Fraction(1)} if label is not None else {}
        row, x = self.reduce(vec)
        # residual = vec - sum x_k v_k, so the dependency is combo - x
        dep = dict(combo)
        for k, v in x.items():
            s = dep.get(k, 0) - v
            if s:
                dep[k] = s
            else:
                dep.pop(k, None)
        if not row:
            return dep
        c = min(row)
        inv = 1 / row[c]
        self._piv[c] = ({k: v * inv for k, v in row.items()}, {k: v * inv for k, v in dep.items()})
        return None

    def solve(self, vec: dict) -> dict | None:
        """``x`` with ``vec = sum x_k v_k`` over the inserted vectors, or ``None``."""
        row, x = self.reduce(vec)
        return None if row else x


def _poly_vec(p: Polynomial, comp: int = 0) -> dict:
    return {(comp, m): c for m, c in p.items()}


def _mono_mul(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def _shift(p: Polynomial, mono: tuple) -> dict:
    return {_mono_mul(m, mono): c for m, c in p.items()}


# ---------------------------------------------------------------------------
# membership


def brute_membership(p: Polynomial, gens: Sequence[Polynomial], box: TruncationBox, *, truncated: bool = False) -> bool:
    """Decide ``p in (gens)`` by linear algebra inside ``box``.

    Default mode searches for an exact witness ``p = sum c_i gens_i`` whose
    products ``c_i gens_i`` stay in the box; ``False`` then means "not a
    member within the box".  With ``truncated=True`` the question is
    membership in ``(gens) + a``, which the box decides exactly.
    """
    ring = p.ring
    if p.is_zero():
        return True
    outside = [m for m in p.terms if not box.contains(m)]
    if outside and not truncated:
        raise BoxTooSmallError(f"{p} does not fit the box (L={box.L}, d={box.d})")
    monos = box.monomials(ring)
    ech = Echelon()
    for g in gens:
        if g.is_zero():
            continue
        for u in monos:
            v = _shift(g, u)
            if truncated:
                v = {m: c for m, c in v.items() if box.contains(m)}
            elif not all(box.contains(m) for m in v):
                continue
            if v:
                ech.insert(v)
    target = {m: c for m, c in p.items() if box.contains(m)}
    return not ech.reduce(target)[0]


# ---------------------------------------------------------------------------
# truncated quotient M = P / (J + a)


class _Quotient:
    """``P/(J + a)`` with coordinates on the non-pivot box monomials."""

    def __init__(self, ring: Ring, J: Sequence[Polynomial], box: TruncationBox):
        self.ring = ring
        self.box = box
        self.monos = box.monomials(ring)
        self.W = Echelon()
        for f in J:
            if f.is_zero():
                continue
            for u in self.monos:
                v = {m: c for m, c in _shift(f, u).items() if box.contains(m)}
                if v:
                    self.W.insert(v)
        piv = self.W.pivots
        self.basis = [m for m in self.monos if m not in piv]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def normal(self, vec: dict) -> dict:
        v = {m: c for m, c in vec.items() if self.box.contains(m)}
        return self.W.reduce(v)[0]

    def mul(self, p: Polynomial, b: tuple) -> dict:
        """Coordinates of ``p * b`` for a basis monomial ``b``."""
        return self.normal(_shift(p, b))


def _exact_syzygies(fs: Sequence[Polynomial], box: TruncationBox) -> list[dict]:
    """A Q-basis of the syzygies of ``fs`` with every coefficient inside ``box``."""
    ring = fs[0].ring
    ech = Echelon()
    out = []
    for i, f in enumerate(fs):
        if f.is_zero():
            out.extend({(i, u): Fraction(1)} for u in box.monomials(ring))
            continue
        for u in box.monomials(ring):
            dep = ech.insert(_shift(f, u), label=(i, u))
            if dep is not None:
                out.append(dep)
    return out


@dataclass(frozen=True)
class OracleDimension:
    dimension: int
    conclusive: bool
    hom_dimension: int
    image_dimension: int


def _hom_kernel_dim(Mq: _Quotient, fs: Sequence[Polynomial], syz: list[dict], m: int) -> int:
    """``dim {phi in M^m : sum_i s_i phi_i = 0 for every syzygy s}``."""
    box = Mq.box
    # drop syzygy terms that act as zero on M and remove linear redundancy
    ded = Echelon()
    kept = []
    for s in syz:
        v = {k: c for k, c in s.items() if box.contains(k[1])}
        if v and ded.insert(v) is None:
            kept.append(v)
    if not kept:
        return m * Mq.dim
    ech = Echelon()
    for i in range(m):
        for b in Mq.basis:
            img = {}
            for idx, s in enumerate(kept):
                for (j, u), c in s.items():
                    if j != i:
                        continue
                    prod = Mq.normal({_mono_mul(u, b): Fraction(1)})
                    for mono, cc in prod.items():
                        key = (idx, mono)
                        val = img.get(key, 0) + c * cc
                        if val:
                            img[key] = val
                        else:
                            img.pop(key, None)
            if img:
                ech.insert(img)
    return m * Mq.dim - len(ech)


def truncated_t1(fs: Sequence[Polynomial], box: TruncationBox, base_order: int | None = None) -> OracleDimension:
    """``dim_Q T^1(A/B, A/aA)`` from raw linear algebra.

    ``Hom(J, M)`` is cut out of ``M^m`` by the syzygies of the ``f_i`` found
    in an enlarged box; the enlargement is increased once more to check that
    the answer has stabilised.
    """
    fs = [f for f in fs]
    if not fs:
        return OracleDimension(0, True, 0, 0)
    ring = fs[0].ring
    m = len(fs)
    J = list(fs)
    if base_order is not None:
        J.append(ring.t_power(base_order))
    Mq = _Quotient(ring, J, box)
    if Mq.dim == 0:
        return OracleDimension(0, True, 0, 0)
    gens = list(J)
    dt = max(f.t_degree() for f in gens)
    dz = max(f.z_degree() for f in gens)

    def hom_dim(extra: int) -> int:
        big = TruncationBox(box.L + dt + extra, box.d + dz + extra)
        syz = _exact_syzygies(gens, big)
        syz = [{k: c for k, c in s.items() if k[0] < m} for s in syz]
        return _hom_kernel_dim(Mq, fs, [s for s in syz if s], m)

    h0 = hom_dim(0)
    h1 = hom_dim(1)
    ech = Echelon()
    for j in range(ring.n):
        for b in Mq.basis:
            img = {}
            for i, f in enumerate(fs):
                for mono, c in Mq.mul(f.diff(j + 1), b).items():
                    img[(i, mono)] = c
            if img:
                ech.insert(img)
    return OracleDimension(h1 - len(ech), h0 == h1, h1, len(ech))


def truncated_t1_dimension(fs: Sequence[Polynomial], box: TruncationBox, base_order: int | None = None) -> int:
    res = truncated_t1(fs, box, base_order)
    if not res.conclusive:
        raise BoxTooSmallError("syzygies have not stabilised; enlarge the box")
    return res.dimension


def truncated_t0_dimension(fs: Sequence[Polynomial], ring: Ring, box: TruncationBox) -> int:
    """``dim_Q`` of the derivations ``A -> A/aA`` over the base."""
    Mq = _Quotient(ring, fs, box)
    n = ring.n
    if not fs:
        return n * Mq.dim
    ech = Echelon()
    for j in range(n):
        for b in Mq.basis:
            img = {}
            for i, f in enumerate(fs):
                for mono, c in Mq.mul(f.diff(j + 1), b).items():
                    img[(i, mono)] = c
            if img:
                ech.insert(img)
    return n * Mq.dim - len(ech)


# ---------------------------------------------------------------------------
# coordinate change search


def _coeff_vec(p: Polynomial, comp, hi: int) -> dict:
    return {(comp, m): c for m, c in p.items() if m[0] < hi}


def truncated_iso_search(
    original: Sequence[Polynomial],
    perturbed: Sequence[Polynomial],
    k: int,
    box: TruncationBox,
) -> list[Polynomial] | None:
    """Images ``h(z_j)`` with ``h(f') in (f) + (t^L)`` and ``h = id mod t``, or ``None``.

    Proceeds order by order from ``l = k``.  At order ``l`` the correction
    has ``t``-degrees in ``[ceil((l+1)/2), l]`` so that its square vanishes
    modulo ``t^(l+1)`` and the step is an exact linear system; the cofactors
    range over the box.  ``None`` means nothing was found inside the box,
    which is not a proof that no coordinate change exists.
    """
    fs = list(original)
    gs = list(perturbed)
    if not fs:
        return []
    ring = fs[0].ring
    n = ring.n
    zs = [m for deg in range(box.d + 1) for m in ring.z_monomials(deg)]
    # the identity already works modulo t^k
    h = [ring.z(j) for j in range(n)]
    for l in range(max(k, 1), box.L):
        lo = max(1, -(-(l + 1) // 2))
        nh = _step_solve(fs, gs, h, l, zs, ring, n, lo=lo)
        if nh is None:
            return None
        h = nh
    return [p.truncate(box.L) for p in h]


def _step_solve(fs, gs, h, l, zs, ring, n, lo):
    """One linear step; returns the new images or ``None``."""
    hi = l + 1
    m = len(fs)
    residual = [g.subs(h, hi) for g in gs]
    jac = [[g.diff(j + 1).subs(h, hi) for j in range(n)] for g in gs]
    ech = Echelon()
    # cofactor columns first so that the solver prefers leaving h alone
    for i in range(m):
        for j in range(m):
            for a in range(hi):
                for u in zs:
                    mono = (a,) + u[1:]
                    v = {}
                    for mm, c in _shift(fs[j], mono).items():
                        if mm[0] < hi:
                            v[(i, mm)] = -c
                    if v:
                        ech.insert(v, label=("c", i, j, mono))
    for jv in range(n):
        for a in range(lo, hi):
            for u in zs:
                mono = (a,) + u[1:]
                v = {}
                for i in range(m):
                    for mm, c in _shift(jac[i][jv], mono).items():
                        if mm[0] < hi:
                            key = (i, mm)
                            s = v.get(key, 0) + c
                            if s:
                                v[key] = s
                            else:
                                v.pop(key, None)
                if v:
                    ech.insert(v, label=("d", jv, mono))
    target = {}
    for i, r in enumerate(residual):
        for mm, c in r.items():
            if mm[0] < hi:
                target[(i, mm)] = -c
    x = ech.solve(target)
    if x is None:
        return None
    out = []
    for jv in range(n):
        terms = {mono: c for (kind, *rest), c in x.items() if kind == "d" and rest[0] == jv for mono in [rest[1]]}
        out.append(h[jv] + Polynomial(ring, terms))
    return out
