"""Exact polynomials over Q in a base parameter ``t`` and fibre variables.

A :class:`Ring` fixes the variable names; exponent vectors are tuples whose
entry 0 is the power of ``t`` and whose entries ``1..n`` are the powers of the
fibre variables ``z_1..z_n``.  A :class:`Polynomial` is an immutable sparse
map from exponent tuples to :class:`fractions.Fraction` coefficients.

Example::

    >>> R = Ring(["x", "y"])
    >>> p = R.parse("x*y - t^2")
    >>> str(p * p.ring.one)
    'x*y - t^2'
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ContextMismatchError, ParseError

Monomial = tuple[int, ...]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


class MonomialOrder:
    """A monomial order on exponent tuples ``(t, z_1, ..., z_n)``.

    ``block`` (the default) compares the fibre exponents by degrevlex first
    and only then the power of ``t``; every monomial involving a fibre
    variable is therefore larger than every pure power of ``t``.  ``lex`` and
    ``degrevlex`` treat ``t`` as the smallest variable.  ``permutation``
    reorders the fibre variables by priority (index 0 is the largest).
    """

    BLOCK = "block_z_over_t_degrevlex"
    LEX = "lex"
    DEGREVLEX = "degrevlex"
    KINDS = (BLOCK, LEX, DEGREVLEX)

    def __init__(self, kind: str = BLOCK, permutation: Sequence[int] | None = None):
        if kind in ("block", "default"):
            kind = self.BLOCK
        if kind not in self.KINDS:
            raise ValueError(f"unknown monomial order {kind!r}")
        self.kind = kind
        self.permutation = tuple(permutation) if permutation is not None else None
        self._cache: dict[Monomial, tuple] = {}

    def _fibre(self, m: Monomial) -> tuple[int, ...]:
        if self.permutation is None:
            return m[1:]
        return tuple(m[1 + i] for i in self.permutation)

    def key(self, m: Monomial) -> tuple:
        """Sort key; a larger key means a larger monomial."""
        k = self._cache.get(m)
        if k is not None:
            return k
        z = self._fibre(m)
        if self.kind == self.BLOCK:
            k = (sum(z), tuple(-e for e in reversed(z)), m[0])
        elif self.kind == self.LEX:
            k = z + (m[0],)
        else:
            k = (sum(m), (-m[0],) + tuple(-e for e in reversed(z)))
        if len(self._cache) > 500_000:
            self._cache.clear()
        self._cache[m] = k
        return k

    def compare(self, m1: Monomial, m2: Monomial) -> int:
        """Return -1, 0 or 1 as ``m1`` is less than, equal to or greater than ``m2``."""
        if len(m1) != len(m2):
            raise ContextMismatchError("monomials from different variable contexts")
        k1, k2 = self.key(m1), self.key(m2)
        return (k1 > k2) - (k1 < k2)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MonomialOrder)
            and self.kind == other.kind
            and self.permutation == other.permutation
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.permutation))

    def __repr__(self) -> str:
        if self.permutation is None:
            return f"MonomialOrder({self.kind!r})"
        return f"MonomialOrder({self.kind!r}, {self.permutation!r})"


DEFAULT_ORDER = MonomialOrder()


def compare_monomials(order: MonomialOrder, m1: Monomial, m2: Monomial) -> str:
    """Compare two monomials, answering ``"less"``, ``"equal"`` or ``"greater"``."""
    return ("less", "equal", "greater")[order.compare(m1, m2) + 1]


class Ring:
    """The polynomial ring Q[t, z_1, ..., z_n] with fixed variable names."""

    def __init__(self, fibre: Sequence[str], base: str = "t", order: MonomialOrder | None = None):
        fibre = tuple(fibre)
        for name in (base,) + fibre:
            if not _IDENT.match(name):
                raise ValueError(f"invalid variable name {name!r}")
        if len(set(fibre)) != len(fibre) or base in fibre:
            raise ValueError("variable names must be distinct")
        self.base = base
        self.fibre = fibre
        self.names = (base,) + fibre
        self.n = len(fibre)
        self.nvars = self.n + 1
        self.order = order or DEFAULT_ORDER
        self._index = {name: i for i, name in enumerate(self.names)}
        self._zero_mono = (0,) * self.nvars

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ring) and self.names == other.names and self.order == other.order

    def __hash__(self) -> int:
        return hash((self.names, self.order))

    def __repr__(self) -> str:
        return f"Ring({list(self.fibre)!r}, base={self.base!r})"

    # constructors -----------------------------------------------------
    @property
    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    @property
    def one(self) -> Polynomial:
        return Polynomial(self, {self._zero_mono: Fraction(1)})

    @property
    def t(self) -> Polynomial:
        return self.var(0)

    def const(self, c) -> Polynomial:
        return Polynomial(self, {self._zero_mono: Fraction(c)})

    def var(self, index: int) -> Polynomial:
        """Variable by position: 0 is ``t``, ``1..n`` the fibre variables."""
        e = [0] * self.nvars
        e[index] = 1
        return Polynomial(self, {tuple(e): Fraction(1)})

    def z(self, j: int) -> Polynomial:
        """Fibre variable ``z_j`` (0-based)."""
        return self.var(j + 1)

    def gen(self, name: str) -> Polynomial:
        return self.var(self.index(name))

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown variable {name!r}") from None

    def monomial(self, t_exponent: int = 0, z_exponents: Sequence[int] | None = None, coeff=1) -> Polynomial:
        z = tuple(z_exponents) if z_exponents is not None else (0,) * self.n
        if len(z) != self.n:
            raise ContextMismatchError("exponent vector length does not match the ring")
        return Polynomial(self, {(t_exponent,) + z: Fraction(coeff)})

    def t_power(self, k: int) -> Polynomial:
        return self.monomial(k)

    def coerce(self, x) -> Polynomial:
        if isinstance(x, Polynomial):
            if x.ring != self:
                raise ContextMismatchError("polynomial belongs to a different ring")
            return x
        if isinstance(x, (int, Fraction)):
            return self.const(x)
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to a polynomial")

    def parse(self, text: str) -> Polynomial:
        return _Parser(self, text).parse()

    def extend(self, names: Sequence[str]) -> Ring:
        """A ring with extra fibre variables appended (same base and order kind)."""
        return Ring(self.fibre + tuple(names), base=self.base, order=MonomialOrder(self.order.kind))

    def with_order(self, order: MonomialOrder) -> Ring:
        return Ring(self.fibre, base=self.base, order=order)

    def z_monomials(self, degree: int) -> list[Monomial]:
        """All pure fibre monomials of exactly the given total degree."""
        out: list[Monomial] = []

        def rec(i: int, left: int, acc: list[int]) -> None:
            if i == self.n - 1:
                out.append((0,) + tuple(acc + [left]))
                return
            for e in range(left, -1, -1):
                rec(i + 1, left - e, acc + [e])

        if self.n == 0:
            return [self._zero_mono] if degree == 0 else []
        rec(0, degree, [])
        return out


class Polynomial:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Monomial, Fraction] | None = None, *, _clean: bool = False):
        self.ring = ring
        if terms is None:
            self._terms: dict[Monomial, Fraction] = {}
        elif _clean:
            self._terms = terms  # type: ignore[assignment]
        else:
            d = {}
            for m, c in terms.items():
                if len(m) != ring.nvars:
                    raise ContextMismatchError("exponent vector length does not match the ring")
                if any(e < 0 for e in m):
                    raise ValueError("negative exponents are not supported")
                c = Fraction(c)
                if c:
                    d[tuple(m)] = c
            self._terms = d
        self._hash = None

    # basic access -----------------------------------------------------
    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def coefficient(self, m: Monomial) -> Fraction:
        return self._terms.get(tuple(m), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get(self.ring._zero_mono, Fraction(0))

    def monomials(self, order: MonomialOrder | None = None) -> list[Monomial]:
        """Monomials in decreasing order."""
        order = order or self.ring.order
        return sorted(self._terms, key=order.key, reverse=True)

    def leading_monomial(self, order: MonomialOrder | None = None) -> Monomial:
        if not self._terms:
            raise ValueError("zero polynomial has no leading monomial")
        order = order or self.ring.order
        return max(self._terms, key=order.key)

    def leading_coefficient(self, order: MonomialOrder | None = None) -> Fraction:
        return self._terms[self.leading_monomial(order)]

    def t_degree(self) -> int:
        return max((m[0] for m in self._terms), default=-1)

    def t_order(self) -> float:
        """Largest ``k`` with the polynomial divisible by ``t^k`` (inf for zero)."""
        return min((m[0] for m in self._terms), default=float("inf"))

    def z_degree(self) -> int:
        return max((sum(m[1:]) for m in self._terms), default=-1)

    def total_degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def variables_used(self) -> set[int]:
        return {i for m in self._terms for i, e in enumerate(m) if e}

    # arithmetic -------------------------------------------------------
    def _other(self, other) -> Polynomial | None:
        if isinstance(other, Polynomial):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ContextMismatchError("polynomials from different variable contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return None

    def __add__(self, other) -> Polynomial:
        o = self._other(other)
        if o is None:
            return NotImplemented
        d = dict(self._terms)
        for m, c in o._terms.items():
            s = d.get(m, 0) + c
            if s:
                d[m] = s
            else:
                d.pop(m, None)
        return Polynomial(self.ring, d, _clean=True)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(self.ring, {m: -c for m, c in self._terms.items()}, _clean=True)

    def __sub__(self, other) -> Polynomial:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> Polynomial:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return self.ring.zero
            return Polynomial(self.ring, {m: v * c for m, v in self._terms.items()}, _clean=True)
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.mul_truncated(o, None)

    __rmul__ = __mul__

    def mul_truncated(self, other: Polynomial, L: int | None) -> Polynomial:
        """Product with every term of ``t``-degree ``>= L`` dropped."""
        o = self._other(other)
        d: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            if L is not None and m1[0] >= L:
                continue
            for m2, c2 in o._terms.items():
                if L is not None and m1[0] + m2[0] >= L:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                s = d.get(m, 0) + c1 * c2
                if s:
                    d[m] = s
                else:
                    del d[m]
        return Polynomial(self.ring, d, _clean=True)

    def __pow__(self, k: int) -> Polynomial:
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        return self.pow_truncated(k, None)

    def pow_truncated(self, k: int, L: int | None) -> Polynomial:
        result = self.ring.one.truncate(L) if L is not None else self.ring.one
        base = self.truncate(L) if L is not None else self
        while k:
            if k & 1:
                result = result.mul_truncated(base, L)
            k >>= 1
            if k:
                base = base.mul_truncated(base, L)
        return result

    def __truediv__(self, other) -> Polynomial:
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == self.ring.const(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring.names, frozenset(self._terms.items())))
        return self._hash

    # t-adic helpers ---------------------------------------------------
    def truncate(self, L: int) -> Polynomial:
        """Drop every term whose ``t``-exponent is at least ``L``."""
        if L is None:
            return self
        if all(m[0] < L for m in self._terms):
            return self
        return Polynomial(self.ring, {m: c for m, c in self._terms.items() if m[0] < L}, _clean=True)

    def t_part(self, lo: int, hi: int | None = None) -> Polynomial:
        """Terms with ``lo <= t-exponent < hi``."""
        return Polynomial(
            self.ring,
            {m: c for m, c in self._terms.items() if m[0] >= lo and (hi is None or m[0] < hi)},
            _clean=True,
        )

    def divide_t_power(self, k: int) -> Polynomial:
        """Exact division by ``t^k``; raises ``ValueError`` when not divisible."""
        if any(m[0] < k for m in self._terms):
            raise ValueError(f"polynomial is not divisible by {self.ring.base}^{k}")
        return Polynomial(self.ring, {(m[0] - k,) + m[1:]: c for m, c in self._terms.items()}, _clean=True)

    def shift(self, mono: Monomial, coeff=1) -> Polynomial:
        """Multiply by a single term."""
        c = Fraction(coeff)
        return Polynomial(
            self.ring,
            {tuple(a + b for a, b in zip(m, mono)): v * c for m, v in self._terms.items()},
            _clean=True,
        )

    # calculus and substitution ----------------------------------------
    def diff(self, var: int | str) -> Polynomial:
        """Partial derivative; ``var`` is a name or a position (0 is ``t``)."""
        i = self.ring.index(var) if isinstance(var, str) else var
        d = {}
        for m, c in self._terms.items():
            if m[i]:
                e = list(m)
                e[i] -= 1
                d[tuple(e)] = c * m[i]
        return Polynomial(self.ring, d, _clean=True)

    def subs(self, images: Sequence[Polynomial], L: int | None = None) -> Polynomial:
        """Substitute ``z_j -> images[j]`` (``t`` is fixed), optionally mod ``t^L``."""
        if len(images) != self.ring.n:
            raise ContextMismatchError("need one image per fibre variable")
        target = images[0].ring if images else self.ring
        powers: list[dict[int, Polynomial]] = [dict() for _ in images]

        def power(j: int, e: int) -> Polynomial:
            cache = powers[j]
            if e not in cache:
                cache[e] = images[j].pow_truncated(e, L)
            return cache[e]

        out: dict[Monomial, Fraction] = {}
        zero_t = (0,) * target.nvars
        for m, c in self._terms.items():
            if L is not None and m[0] >= L:
                continue
            term = Polynomial(target, {(m[0],) + zero_t[1:]: c}, _clean=True)
            for j, e in enumerate(m[1:]):
                if e:
                    term = term.mul_truncated(power(j, e), L)
                    if not term:
                        break
            for mm, cc in term._terms.items():
                s = out.get(mm, 0) + cc
                if s:
                    out[mm] = s
                else:
                    del out[mm]
        return Polynomial(target, out, _clean=True)

    def embed(self, ring: Ring) -> Polynomial:
        """View the polynomial in a ring whose variable list extends this one's."""
        if ring.names[: self.ring.nvars] != self.ring.names:
            raise ContextMismatchError("target ring does not extend the source ring")
        pad = (0,) * (ring.nvars - self.ring.nvars)
        return Polynomial(ring, {m + pad: c for m, c in self._terms.items()}, _clean=True)

    def restrict(self, ring: Ring) -> Polynomial:
        """Inverse of :meth:`embed`; fails if a dropped variable occurs."""
        k = ring.nvars
        if self.ring.names[:k] != ring.names:
            raise ContextMismatchError("rings are not compatible")
        d = {}
        for m, c in self._terms.items():
            if any(m[k:]):
                raise ValueError("polynomial involves variables outside the target ring")
            d[m[:k]] = c
        return Polynomial(ring, d, _clean=True)

    # rendering --------------------------------------------------------
    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"Polynomial({render(self)!r})"


def truncate(p: Polynomial, L: int) -> Polynomial:
    """Remove all terms of ``t``-degree ``>= L``."""
    return p.truncate(L)


def poly_arith(op: str, p: Polynomial, q: Polynomial) -> Polynomial:
    """Dispatch ``add``/``sub``/``mul`` with a context check."""
    if p.ring != q.ring:
        raise ContextMismatchError("polynomials from different variable contexts")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_monomial(ring: Ring, m: Monomial) -> str:
    parts = []
    for name, e in zip(ring.names, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def render(p: Polynomial, order: MonomialOrder | None = None) -> str:
    """Canonical text: terms in decreasing monomial order, rationals as ``a/b``."""
    if not p._terms:
        return "0"
    out = []
    for i, m in enumerate(p.monomials(order)):
        c = p._terms[m]
        neg = c < 0
        a = -c if neg else c
        mono = render_monomial(p.ring, m)
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(a)}*{mono}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# parsing --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class _Parser:
    def __init__(self, ring: Ring, text: str, line: int | None = None, col_offset: int = 0):
        self.ring = ring
        self.text = text
        self.line = line
        self.col_offset = col_offset
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            mt = _TOKEN.match(stripped, pos)
            if not mt or mt.end() == pos:
                self._fail(f"unexpected character {stripped[pos]!r}", pos)
            col = mt.start(mt.lastindex)
            if mt.group(1):
                self.tokens.append(("num", mt.group(1), col))
            elif mt.group(2):
                self.tokens.append(("id", mt.group(2), col))
            else:
                op = mt.group(3)
                self.tokens.append(("op", "^" if op == "**" else op, col))
            pos = mt.end()
        self.i = 0

    def _fail(self, msg: str, pos: int | None = None):
        col = None if pos is None else pos + 1 + self.col_offset
        raise ParseError(msg, self.line, col)

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _next(self):
        tok = self._peek()
        if tok is None:
            self._fail("unexpected end of expression", len(self.text.rstrip()))
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        if not self.tokens:
            self._fail("empty expression", 0)
        p = self._expr()
        tok = self._peek()
        if tok is not None:
            self._fail(f"unexpected token {tok[1]!r}", tok[2])
        return p

    def _expr(self) -> Polynomial:
        p = self._term()
        while (tok := self._peek()) is not None and tok[0] == "op" and tok[1] in "+-":
            self.i += 1
            q = self._term()
            p = p + q if tok[1] == "+" else p - q
        return p

    def _term(self) -> Polynomial:
        p = self._unary()
        while (tok := self._peek()) is not None and tok[0] == "op" and tok[1] in "*/":
            self.i += 1
            q = self._unary()
            if tok[1] == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    self._fail("division only by a non-zero rational constant", tok[2])
                p = p * (1 / q.constant_term())
        return p

    def _unary(self) -> Polynomial:
        tok = self._peek()
        if tok is not None and tok[0] == "op" and tok[1] in "+-":
            self.i += 1
            p = self._unary()
            return -p if tok[1] == "-" else p
        return self._power()

    def _power(self) -> Polynomial:
        p = self._atom()
        tok = self._peek()
        if tok is not None and tok[0] == "op" and tok[1] == "^":
            self.i += 1
            e = self._next()
            if e[0] != "num":
                self._fail("exponent must be a non-negative integer", e[2])
            p = p ** int(e[1])
        return p

    def _atom(self) -> Polynomial:
        tok = self._next()
        kind, val, col = tok
        if kind == "num":
            return self.ring.const(int(val))
        if kind == "id":
            if val not in self.ring._index:
                self._fail(f"undeclared variable {val!r}", col)
            return self.ring.gen(val)
        if val == "(":
            p = self._expr()
            close = self._next()
            if close[1] != ")":
                self._fail("expected ')'", close[2])
            return p
        self._fail(f"unexpected token {val!r}", col)


def parse_polynomial(ring: Ring, text: str, line: int | None = None, col_offset: int = 0) -> Polynomial:
    """Parse polynomial text; diagnostics carry the given line and column offset."""
    return _Parser(ring, text, line, col_offset).parse()


def sum_polys(ring: Ring, polys: Iterable[Polynomial]) -> Polynomial:
    d: dict[Monomial, Fraction] = {}
    for p in polys:
        for m, c in p._terms.items():
            s = d.get(m, 0) + c
            if s:
                d[m] = s
            else:
                d.pop(m, None)
    return Polynomial(ring, d, _clean=True)
