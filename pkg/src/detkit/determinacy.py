"""Finite-determinacy constants read off from T^1 and T^2.

``N1`` is the least power of ``t`` killing ``T^1(A/B, A)``, ``N2`` the index
where the chain ``ker(t^i) on T^2`` stops growing.  With ``N = max(N1, N2)``
two families agreeing modulo ``t^k`` for ``k > 4N`` are isomorphic, with the
isomorphism equal to the identity modulo ``t^(k - 2N)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cotangent import (
    CoefficientModule,
    ModulePresentation,
    Presentation,
    annihilator,
    is_zero_module,
    t1,
    t2,
    torsion_kernel,
)
from .errors import HypothesisError
from .groebner import buchberger, radical_membership
from .rings import Polynomial

DEFAULT_CAP = 64


@dataclass(frozen=True)
class DeterminacyReport:
    N1: int
    N2: int
    N: int
    threshold_k: int
    precision_loss: int

    def as_dict(self) -> dict:
        return {
            "N1": self.N1,
            "N2": self.N2,
            "N": self.N,
            "threshold_k": self.threshold_k,
            "precision_loss": self.precision_loss,
        }


@dataclass(frozen=True)
class DivisorReport:
    N: int
    M: int
    variable: str

    def as_dict(self) -> dict:
        return {"N": self.N, "M": self.M, "w": self.variable}


def _check_cap(cap: int) -> None:
    if cap < 1:
        raise ValueError("cap must be at least 1")


def t1_annihilator(pres: Presentation, M: CoefficientModule | None = None) -> list[Polynomial]:
    return annihilator(t1(pres, M))


def t_power_annihilating_t1(pres: Presentation, cap: int = DEFAULT_CAP) -> int:
    """Least ``N1 <= cap`` with ``t^N1`` in ``Ann T^1(A/B, A)``."""
    _check_cap(cap)
    ring = pres.ring
    gb = buchberger(t1_annihilator(pres), ring=ring)
    for k in range(cap + 1):
        if gb.contains(ring.t_power(k)):
            return k
    raise HypothesisError(
        f"no power t^N with N <= {cap} annihilates T^1; T^1 is not t-power torsion",
        {"cap": cap, "annihilator": [str(a) for a in gb.generators]},
    )


def t2_stable_index(pres: Presentation, cap: int = DEFAULT_CAP) -> int:
    """Least ``N2 <= cap`` with ``ker(t^N2) = ker(t^(N2+1))`` on ``T^2(A/B, A)``."""
    _check_cap(cap)
    T2 = t2(pres)
    return _stable_index(T2, cap)


def _stable_index(T2: ModulePresentation, cap: int) -> int:
    if is_zero_module(T2):
        return 0
    prev = torsion_kernel(T2, 0)
    for i in range(cap + 1):
        nxt = torsion_kernel(T2, i + 1)
        if prev.same_as(nxt):
            return i
        # the chain is increasing: every generator of the smaller kernel lies in the larger one
        if not all(nxt.contains(v) for v in prev.generators):
            raise AssertionError("internal error: t-torsion kernels are not increasing")
        prev = nxt
    raise HypothesisError(
        f"the t-torsion kernels of T^2 do not stabilise by index {cap}", {"cap": cap}
    )


def determinacy_report(pres: Presentation, cap: int = DEFAULT_CAP) -> DeterminacyReport:
    n1 = t_power_annihilating_t1(pres, cap)
    n2 = t2_stable_index(pres, cap)
    N = max(n1, n2)
    return DeterminacyReport(n1, n2, N, 4 * N + 1, 2 * N)


def _divisor_modules(pres: Presentation, w: Polynomial) -> list[CoefficientModule]:
    return [CoefficientModule.ring_itself(), CoefficientModule.ideal_quotient([w], [], label="(w)")]


def divisor_report(pres: Presentation, w: int | str, cap: int = DEFAULT_CAP) -> DivisorReport:
    """Lexicographically least ``(N, M)`` with ``t^N w^M`` killing ``T^1(A/B, (w^s))`` for ``s = 0, 1``."""
    _check_cap(cap)
    ring = pres.ring
    idx = ring.index(w) if isinstance(w, str) else w + 1
    if idx == 0:
        raise ValueError("the divisor variable must be a fibre variable")
    wv = ring.var(idx)
    anns = [buchberger(annihilator(t1(pres, M)), ring=ring) for M in _divisor_modules(pres, wv)]
    for N in range(cap + 1):
        tn = ring.t_power(N)
        for M in range(cap + 1):
            e = tn * wv**M
            if all(gb.contains(e) for gb in anns):
                return DivisorReport(N, M, ring.names[idx])
    raise HypothesisError(
        f"no t^N w^M with N, M <= {cap} annihilates T^1; T^1 is not supported in tw = 0",
        {"cap": cap},
    )


def check_t1_support(pres: Presentation, cutouts: Sequence[Polynomial]) -> bool:
    """Is ``T^1(A/B, A)`` supported inside the zero locus of the product of ``cutouts``?"""
    ring = pres.ring
    prod = ring.one
    for c in cutouts:
        prod = prod * c
    return radical_membership(prod, t1_annihilator(pres))
