"""Lifting an isomorphism of truncated families order by order.

Two presentations ``(f)`` and ``(f')`` over the same ``Q[t][z]`` agreeing
modulo ``t^k`` are compared through a map ``h`` on the fibre coordinates with
``h(f') in (f) + (t^l)``.  One step raises ``l`` by one: the residual of
``h(f')`` is written as ``J_f . theta + (f) + (t^(l+1))`` with ``theta`` in
``t^(l-2N)``, and ``h`` is replaced by ``h - theta``.  For ``k > 4N`` the
step always succeeds and never disturbs ``h`` modulo ``t^(l-2N)``.

In divisor mode (variable ``w``, exponent ``r``) every ``t^j`` is replaced by
``t^j w^r`` and corrections live in ``t^(l-2N) w^(r-2M)``.  Intermediate maps
are then reduced modulo the monomial ``t^l w^r``; the final map, like the
completed isomorphism it approximates, is reduced modulo ``t^L``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .cotangent import Presentation
from .determinacy import DEFAULT_CAP, determinacy_report, divisor_report, t2_stable_index
from .errors import ContextMismatchError, HypothesisError, VerificationError
from .groebner import ModuleElement, buchberger, lift_basis, membership_certificate, normal_form
from .rings import Polynomial, Ring, sum_polys


@dataclass(frozen=True)
class Divisor:
    variable: str
    r: int

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("divisor exponent must be non-negative")


@dataclass(frozen=True)
class FamilyPair:
    """Two presentations with the same variables agreeing modulo ``t^k`` (or ``t^k w^r``)."""

    original: Presentation
    perturbed: Presentation
    k: int
    divisor: Divisor | None = None
    validate: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.original.ring != self.perturbed.ring:
            raise ContextMismatchError("the two families must share their variables")
        if self.original.m != self.perturbed.m:
            raise ContextMismatchError("the two families need the same number of equations")
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.divisor is not None:
            idx = self.ring.index(self.divisor.variable)
            if idx == 0:
                raise ValueError("the divisor variable must be a fibre variable")
        if self.validate:
            self._check_agreement()

    @property
    def ring(self) -> Ring:
        return self.original.ring

    @property
    def f(self) -> tuple[Polynomial, ...]:
        return self.original.generators

    @property
    def g(self) -> tuple[Polynomial, ...]:
        return self.perturbed.generators

    def window(self) -> Polynomial:
        """``w^r`` in divisor mode, ``1`` otherwise."""
        if self.divisor is None:
            return self.ring.one
        return self.ring.gen(self.divisor.variable) ** self.divisor.r

    def _check_agreement(self) -> None:
        mod = self.ring.t_power(self.k) * self.window()
        for name, src, dst in (("perturbed", self.g, self.f), ("original", self.f, self.g)):
            gb = buchberger(list(dst) + [mod])
            for i, p in enumerate(src):
                if not gb.contains(p):
                    raise HypothesisError(
                        f"{name} equation {i + 1} is not in the other ideal modulo {mod}",
                        {"index": i, "equation": str(p), "modulus": str(mod)},
                    )


@dataclass(frozen=True)
class MapTruncation:
    """Images of the fibre coordinates, reduced modulo ``t^order``."""

    images: tuple[Polynomial, ...]
    order: int

    def apply(self, p: Polynomial, L: int | None = None) -> Polynomial:
        return p.subs(self.images, L)


@dataclass(frozen=True)
class StepRecord:
    order: int
    theta: tuple[Polynomial, ...]


@dataclass
class LiftCertificate:
    """``f'_i(h) = sum_j cofactors[i][j] f_j + t^order * window * remainders[i]`` exactly."""

    images: tuple[Polynomial, ...]
    order: int
    window: Polynomial
    cofactors: tuple[tuple[Polynomial, ...], ...]
    remainders: tuple[Polynomial, ...]
    agreement_order: int
    agreement_factor: Polynomial
    N: int = 0
    M: int = 0
    trace: tuple[StepRecord, ...] = ()
    start: tuple[Polynomial, ...] = ()
    start_order: int = 0

    def stages(self, cut) -> dict[int, tuple[Polynomial, ...]]:
        """Replay the trace: the map at every order from ``start_order`` on."""
        h = tuple(self.start)
        out = {self.start_order: h}
        for step in self.trace:
            h = tuple(cut(a - b, step.order + 1) for a, b in zip(h, step.theta))
            out[step.order + 1] = h
        return out


@dataclass(frozen=True)
class PolynomialSystem:
    """Equations ``f'_i(a_1..a_n) - sum_j b_ij f_j`` over ``Q[t][z][a, b]``."""

    ring: Ring
    a_names: tuple[str, ...]
    b_names: tuple[tuple[str, ...], ...]
    equations: tuple[Polynomial, ...]

    @property
    def unknowns(self) -> tuple[str, ...]:
        return self.a_names + tuple(b for row in self.b_names for b in row)

    def substitute(self, a: Sequence[Polynomial], b: Sequence[Sequence[Polynomial]]) -> list[Polynomial]:
        """Plug in values from the base ring; returns the residuals there."""
        base = a[0].ring if a else b[0][0].ring
        vals: dict[str, Polynomial] = {}
        for name, v in zip(self.a_names, a):
            vals[name] = v
        for row_names, row in zip(self.b_names, b):
            for name, v in zip(row_names, row):
                vals[name] = v
        images = []
        for name in self.ring.fibre:
            if name in vals:
                images.append(vals[name])
            else:
                images.append(base.gen(name))
        return [eq.subs(images) for eq in self.equations]


# ---------------------------------------------------------------------------
# truncation helpers


def _cutter(pair: FamilyPair):
    """Reduction modulo ``t^L`` or modulo the monomial ``t^L w^r``."""
    if pair.divisor is None:
        return lambda p, L: p.truncate(L)
    wi = pair.ring.index(pair.divisor.variable)
    r = pair.divisor.r

    def cut(p: Polynomial, L: int) -> Polynomial:
        return Polynomial(p.ring, {m: c for m, c in p.items() if not (m[0] >= L and m[wi] >= r)}, _clean=True)

    return cut


def _identity(ring: Ring) -> tuple[Polynomial, ...]:
    return tuple(ring.z(j) for j in range(ring.n))


# ---------------------------------------------------------------------------
# lifting equations and relations


def lift_equations(pair: FamilyPair) -> list[Polynomial]:
    """``g_i`` with ``f_i + t^k g_i in (f')`` (``g_i`` a multiple of ``w^r`` in divisor mode)."""
    ring = pair.ring
    tk = ring.t_power(pair.k)
    w = pair.window()
    out = []
    for i, (f, fp) in enumerate(zip(pair.f, pair.g)):
        diff = fp - f
        g = None
        try:
            q = diff.divide_t_power(pair.k)
            if w == 1 or membership_certificate(q, [w]) is not None:
                g = q
        except ValueError:
            pass
        if g is None:
            cert = membership_certificate(f, list(pair.g) + [tk * w])
            if cert is None:
                raise HypothesisError(
                    f"equation {i + 1} of the original family is not in the perturbed ideal modulo t^k",
                    {"index": i, "equation": str(f)},
                )
            g = -cert[-1] * w
        if membership_certificate(f + tk * g, list(pair.g)) is None:
            raise HypothesisError(f"lifted equation {i + 1} is not in the perturbed ideal", {"index": i})
        out.append(g)
    return out


def lift_relation(a: Sequence[Polynomial], pres: Presentation, l: int) -> list[Polynomial]:
    """Correct ``a`` by ``t^l a'`` so that ``sum (a_i + t^l a'_i) f_i = 0`` exactly."""
    fs = pres.generators
    if len(a) != len(fs):
        raise ContextMismatchError("one coefficient per generator is required")
    ring = pres.ring
    s = sum_polys(ring, (ai * fi for ai, fi in zip(a, fs)))
    if s.is_zero():
        return list(a)
    try:
        c = s.divide_t_power(l)
    except ValueError:
        raise HypothesisError(f"sum a_i f_i is not divisible by t^{l}", {"sum": str(s)}) from None
    cert = membership_certificate(-c, list(fs))
    if cert is None:
        raise HypothesisError(
            "sum a_i f_i / t^l is not in the ideal; the family is not flat over the base",
            {"quotient": str(c)},
        )
    tl = ring.t_power(l)
    out = [ai + tl * ci for ai, ci in zip(a, cert)]
    if not sum_polys(ring, (ai * fi for ai, fi in zip(out, fs))).is_zero():
        raise AssertionError("internal error: lifted relation does not vanish")
    return out


# ---------------------------------------------------------------------------
# the step


@lru_cache(maxsize=4096)
def _step_generators(fs: tuple, l: int, N: int, omega: Polynomial, tau: Polynomial) -> tuple:
    """Generators of ``U_l``: scaled Jacobian columns, then ``f_k e_i``, then ``t^(l+1) tau e_i``."""
    ring = fs[0].ring
    m = len(fs)
    scale = ring.t_power(l - 2 * N) * omega
    top = ring.t_power(l + 1) * tau
    if m == 1:
        f = fs[0]
        cols = [scale * f.diff(j + 1) for j in range(ring.n)]
        return tuple(cols + [f, top])
    cols = [ModuleElement(scale * f.diff(j + 1) for f in fs) for j in range(ring.n)]
    rels = []
    for i in range(m):
        for f in fs:
            rels.append(ModuleElement(f if q == i else ring.zero for q in range(m)))
    tops = [ModuleElement(top if q == i else ring.zero for q in range(m)) for i in range(m)]
    return tuple(cols + rels + tops)


@lru_cache(maxsize=4096)
def _ideal_gb(gens: tuple):
    return buchberger(list(gens))


def _windows(pair: FamilyPair, M: int) -> tuple[Polynomial, Polynomial]:
    ring = pair.ring
    if pair.divisor is None:
        return ring.one, ring.one
    w = ring.gen(pair.divisor.variable)
    return w ** (pair.divisor.r - 2 * M), w**pair.divisor.r


def _solve_step(pair: FamilyPair, h: tuple, l: int, N: int, M: int, cut) -> tuple[Polynomial, ...]:
    """``theta`` for the step from order ``l`` to ``l + 1``."""
    ring = pair.ring
    fs = pair.f
    omega, tau = _windows(pair, M)
    residual = [cut(g.subs(list(h)), l + 1) for g in pair.g]
    if all(r.is_zero() for r in residual):
        return tuple(ring.zero for _ in range(ring.n))
    gens = _step_generators(fs, l, N, omega, tau)
    target = residual[0] if len(fs) == 1 else ModuleElement(residual)
    cert = membership_certificate(target, list(gens))
    if cert is None:
        raise HypothesisError(
            f"lifting step at order {l} has no solution: the residual is not in the image of the Jacobian",
            {"order": l, "residual": [str(r) for r in residual], "N": N, "M": M},
        )
    scale = ring.t_power(l - 2 * N) * omega
    return tuple(cut(scale * cert[j], l + 1) for j in range(ring.n))


def _certify_order(pair: FamilyPair, h: tuple, l: int, cut) -> None:
    ring = pair.ring
    _, tau = _windows(pair, 0)
    gb = _ideal_gb(tuple(pair.f) + (ring.t_power(l) * tau,))
    for i, g in enumerate(pair.g):
        if not gb.contains(cut(g.subs(list(h)), l)):
            raise HypothesisError(
                f"image of perturbed equation {i + 1} is not in the original ideal modulo order {l}",
                {"index": i, "order": l},
            )


def lift_iso_step(h: MapTruncation, pair: FamilyPair, N: int, M: int = 0) -> tuple[MapTruncation, StepRecord]:
    """Raise a map valid at order ``l = h.order`` to order ``l + 1``."""
    l = h.order
    if l < pair.k:
        raise ValueError("steps start at the matching order k")
    cut = _cutter(pair)
    _certify_order(pair, h.images, l, cut)
    theta = _solve_step(pair, h.images, l, N, M, cut)
    new = tuple(cut(a - b, l + 1) for a, b in zip(h.images, theta))
    _certify_order(pair, new, l + 1, cut)
    return MapTruncation(new, l + 1), StepRecord(l, theta)


# ---------------------------------------------------------------------------
# full lift


@dataclass(frozen=True)
class Constants:
    N: int
    M: int = 0


def lifting_constants(pair: FamilyPair, cap: int = DEFAULT_CAP) -> Constants:
    if pair.divisor is None:
        return Constants(determinacy_report(pair.original, cap).N)
    rep = divisor_report(pair.original, pair.divisor.variable, cap)
    n2 = t2_stable_index(pair.original, cap)
    return Constants(max(rep.N, n2), rep.M)


def _check_thresholds(pair: FamilyPair, c: Constants) -> None:
    if pair.k <= 4 * c.N:
        raise HypothesisError(
            f"matching order k = {pair.k} does not exceed 4N = {4 * c.N}",
            {"k": pair.k, "N": c.N, "threshold_k": 4 * c.N + 1},
        )
    if pair.divisor is not None and pair.divisor.r <= 4 * c.M:
        raise HypothesisError(
            f"divisor exponent r = {pair.divisor.r} does not exceed 4M = {4 * c.M}",
            {"r": pair.divisor.r, "M": c.M},
        )


def formal_lift(
    pair: FamilyPair,
    target_L: int,
    constants: Constants | None = None,
    initial: Sequence[Polynomial] | None = None,
    cap: int = DEFAULT_CAP,
) -> tuple[MapTruncation, LiftCertificate]:
    """A map carrying ``(f')`` into ``(f)`` modulo ``t^target_L`` with its certificate.

    Intermediate stages run to order ``target_L + 2N + 1``; the returned map is
    the last stage reduced modulo ``t^target_L``.
    """
    if target_L < 1:
        raise ValueError("target order must be positive")
    c = constants or lifting_constants(pair, cap)
    _check_thresholds(pair, c)
    ring = pair.ring
    cut = _cutter(pair)
    start = tuple(initial) if initial is not None else _identity(ring)
    if len(start) != ring.n:
        raise ContextMismatchError("initial map needs one image per fibre variable")
    start = tuple(cut(p, pair.k) for p in start) if initial is not None else start
    _certify_order(pair, start, pair.k, cut)
    work = target_L + 2 * c.N + 1
    h = start
    trace = []
    for l in range(pair.k, work):
        theta = _solve_step(pair, h, l, c.N, c.M, cut)
        h = tuple(cut(a - b, l + 1) for a, b in zip(h, theta))
        _certify_order(pair, h, l + 1, cut)
        trace.append(StepRecord(l, theta))
    # the completed isomorphism is t-adic, so the output is a plain truncation
    final = tuple(p.truncate(target_L) for p in h)
    cert = _certificate(pair, final, target_L, c, tuple(trace), start)
    return MapTruncation(final, target_L), cert


def _agreement(pair: FamilyPair, c: Constants) -> tuple[int, Polynomial]:
    omega, _ = _windows(pair, c.M)
    return pair.k - 2 * c.N, omega


def _certificate(pair, images, L, c, trace, start) -> LiftCertificate:
    ring = pair.ring
    tau = ring.one
    mod = ring.t_power(L)
    cofs, rems = [], []
    for i, g in enumerate(pair.g):
        val = g.subs(list(images))
        coeffs = membership_certificate(val, list(pair.f) + [mod])
        if coeffs is None:
            raise HypothesisError(f"final map does not carry equation {i + 1} into the ideal", {"index": i})
        cofs.append(tuple(coeffs[:-1]))
        rems.append(coeffs[-1])
    a_ord, a_fac = _agreement(pair, c)
    return LiftCertificate(
        images=tuple(images),
        order=L,
        window=tau,
        cofactors=tuple(cofs),
        remainders=tuple(rems),
        agreement_order=a_ord,
        agreement_factor=a_fac,
        N=c.N,
        M=c.M,
        trace=trace,
        start=tuple(start),
        start_order=pair.k,
    )


# ---------------------------------------------------------------------------
# checks


def linear_part_determinant(images: Sequence[Polynomial]) -> Fraction:
    """Determinant of the linear part at the origin of the map modulo ``t``."""
    n = len(images)
    if n == 0:
        return Fraction(1)
    ring = images[0].ring
    mat = []
    for p in images:
        row = []
        for j in range(n):
            e = [0] * ring.nvars
            e[j + 1] = 1
            row.append(p.coefficient(tuple(e)))
        mat.append(row)
    return _det(mat)


def _det(mat: list[list[Fraction]]) -> Fraction:
    a = [list(map(Fraction, r)) for r in mat]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            fac = a[r][col] / a[col][col]
            if fac:
                for cc in range(col, n):
                    a[r][cc] -= fac * a[col][cc]
    return det


def _in_window(p: Polynomial, order: int, factor: Polynomial, ring: Ring) -> bool:
    """Is ``p`` a multiple of ``t^order * factor`` (a monomial)?"""
    if p.is_zero():
        return True
    if order <= 0 and factor == ring.one:
        return True
    mono = (max(order, 0),) + next(iter(factor.terms))[1:]
    return all(all(a >= b for a, b in zip(m, mono)) for m in p.terms)


def check_agreement(images: Sequence[Polynomial], reference: Sequence[Polynomial], order: int, factor: Polynomial) -> bool:
    """``images - reference`` lies in the monomial ideal ``(t^order * factor)``."""
    if not images:
        return True
    ring = images[0].ring
    return all(_in_window(a - b, order, factor, ring) for a, b in zip(images, reference))


def stage_agreement(cert: LiftCertificate, pair: FamilyPair) -> bool:
    """Consecutive stages agree modulo ``t^(l-2N)`` (times the window)."""
    stages = cert.stages(_cutter(pair))
    omega, _ = _windows(pair, cert.M)
    ls = sorted(stages)
    return all(
        check_agreement(stages[b], stages[a], a - 2 * cert.N, omega) for a, b in zip(ls, ls[1:])
    )


def psi_tower(cert: LiftCertificate, pair: FamilyPair) -> dict[int, tuple[Polynomial, ...]]:
    """``psi_l = stage(l + 2N + 1)`` reduced at order ``l``, wherever the stage exists."""
    stages = cert.stages(_cutter(pair))
    out = {}
    for s, imgs in stages.items():
        l = s - 2 * cert.N - 1
        if l >= 1:
            out[l] = tuple(p.truncate(l) for p in imgs)
    return out


def psi_coherent(cert: LiftCertificate, pair: FamilyPair) -> bool:
    tower = psi_tower(cert, pair)
    for l in sorted(tower):
        if l + 1 in tower:
            if tuple(p.truncate(l) for p in tower[l + 1]) != tower[l]:
                return False
    return True


def verify_lift(map_: MapTruncation, pair: FamilyPair, L: int | None = None, constants: Constants | None = None) -> LiftCertificate:
    """Re-derive the certificate of ``map_`` from scratch.

    The cofactors come from a division by a freshly computed Groebner basis of
    ``(t^L, f_1..f_m)`` composed with its transformation matrix.  Raises
    :class:`VerificationError` naming the first failing equation.
    """
    ring = pair.ring
    L = map_.order if L is None else L
    tau = ring.one
    mod = ring.t_power(L)
    gens = [mod] + list(pair.f)
    gb = lift_basis(gens)
    cofs, rems = [], []
    for i, g in enumerate(pair.g):
        val = g.subs(list(map_.images))
        rem, div = normal_form(val, gb)
        if not rem.is_zero():
            raise VerificationError(f"equation {i + 1} is not carried into the ideal modulo {mod}", i)
        coeffs = [ring.zero] * len(gens)
        for q, row in zip(div.quotients, gb.cofactors):
            if q.is_zero():
                continue
            for k, cf in enumerate(row):
                coeffs[k] = coeffs[k] + q * cf
        total = sum_polys(ring, (c * x for c, x in zip(coeffs, gens)))
        if total != val:
            raise VerificationError(f"certificate for equation {i + 1} does not expand", i)
        cofs.append(tuple(coeffs[1:]))
        rems.append(coeffs[0])
    if linear_part_determinant([p.truncate(1) for p in map_.images]) == 0:
        raise VerificationError("the map is not invertible modulo t", None)
    c = constants or Constants(0, 0)
    a_ord, a_fac = _agreement(pair, c)
    if constants is not None and not check_agreement(map_.images, _identity(ring), a_ord, a_fac):
        raise VerificationError("the map does not agree with the identity on the agreement window", None)
    return LiftCertificate(
        images=tuple(map_.images),
        order=L,
        window=tau,
        cofactors=tuple(cofs),
        remainders=tuple(rems),
        agreement_order=a_ord,
        agreement_factor=a_fac,
        N=c.N,
        M=c.M,
    )


def check_certificate(cert: LiftCertificate, pair: FamilyPair) -> None:
    """Pure expansion check of every identity in ``cert``; raises on the first failure."""
    ring = pair.ring
    mod = ring.t_power(cert.order) * cert.window
    if len(cert.cofactors) != len(pair.g) or len(cert.remainders) != len(pair.g):
        raise VerificationError("certificate has the wrong number of equations", None)
    for i, g in enumerate(pair.g):
        lhs = g.subs(list(cert.images))
        rhs = sum_polys(ring, (c * f for c, f in zip(cert.cofactors[i], pair.f))) + mod * cert.remainders[i]
        if len(cert.cofactors[i]) != len(pair.f) or lhs != rhs:
            raise VerificationError(f"identity for equation {i + 1} does not expand", i)
    if not check_agreement(cert.images, _identity(ring), cert.agreement_order, cert.agreement_factor):
        raise VerificationError("map leaves the agreement window", None)
    if linear_part_determinant([p.truncate(1) for p in cert.images]) == 0:
        raise VerificationError("the map is not invertible modulo t", None)


# ---------------------------------------------------------------------------
# Artin system


def _fresh(ring: Ring, base: str, taken: set) -> str:
    name = base
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def emit_artin_system(pair: FamilyPair) -> PolynomialSystem:
    """Equations ``f'_i(a) - sum_j b_ij f_j`` in unknowns ``a_1..a_n``, ``b_ij``."""
    ring = pair.ring
    n, m = ring.n, pair.original.m
    taken = set(ring.names)
    a_names = tuple(_fresh(ring, f"a{j + 1}", taken) for j in range(n))
    b_names = tuple(tuple(_fresh(ring, f"b{i + 1}{j + 1}" if m < 10 else f"b{i + 1}_{j + 1}", taken) for j in range(m)) for i in range(m))
    big = ring.extend(list(a_names) + [b for row in b_names for b in row])
    a_vars = [big.gen(a) for a in a_names]
    fs = [f.embed(big) for f in pair.f]
    # substitute z_j -> a_j in f'; the extended ring keeps z_j as variables too
    images = a_vars + [big.gen(x) for x in big.fibre[n:]]
    eqs = []
    for i, g in enumerate(pair.g):
        ge = g.embed(big)
        lhs = ge.subs(images)
        rhs = sum_polys(big, (big.gen(b_names[i][j]) * fs[j] for j in range(m)))
        eqs.append(lhs - rhs)
    return PolynomialSystem(big, a_names, b_names, tuple(eqs))
