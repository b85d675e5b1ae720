from __future__ import annotations

import pytest

from detkit.cotangent import t2, torsion_kernel
from detkit.determinacy import (
    check_t1_support,
    determinacy_report,
    divisor_report,
    t1_annihilator,
    t2_stable_index,
    t_power_annihilating_t1,
)
from detkit.errors import HypothesisError
from detkit.groebner import buchberger

from conftest import make_pres

CASES = [
    (["x", "y"], ("x*y - t",), 1, 5),
    (["x", "y"], ("x*y - t^2",), 2, 9),
    (["x", "y"], ("x*y - t^3",), 3, 13),
    (["x", "y"], (), 0, 1),
    (["z1"], ("z1 - t",), 0, 1),
    (["x", "y", "z"], ("x*y", "x*z"), 0, 1),
]


@pytest.mark.parametrize("names, gens, N, threshold", CASES)
def test_bound_examples(names, gens, N, threshold):
    rep = determinacy_report(make_pres(names, *gens))
    assert rep.N == N
    assert rep.threshold_k == threshold
    assert rep.precision_loss == 2 * N
    assert rep.N == max(rep.N1, rep.N2)


@pytest.mark.parametrize("names, gens, N, threshold", CASES)
def test_n1_is_minimal(names, gens, N, threshold):
    p = make_pres(names, *gens)
    n1 = t_power_annihilating_t1(p)
    ann = buchberger(t1_annihilator(p), ring=p.ring)
    assert ann.contains(p.ring.t_power(n1))
    if n1 > 0:
        assert not ann.contains(p.ring.t_power(n1 - 1))


@pytest.mark.parametrize("names, gens, N, threshold", CASES)
def test_n2_is_the_first_stable_index(names, gens, N, threshold):
    p = make_pres(names, *gens)
    n2 = t2_stable_index(p)
    T2 = t2(p)
    if T2.rank:
        assert torsion_kernel(T2, n2).same_as(torsion_kernel(T2, n2 + 1))
        if n2 > 0:
            assert not torsion_kernel(T2, n2 - 1).same_as(torsion_kernel(T2, n2))


def test_non_torsion_t1_is_a_hypothesis_error():
    p = make_pres(["x", "y", "w"], "x*y - w^2*t")
    with pytest.raises(HypothesisError) as exc:
        determinacy_report(p, cap=16)
    assert exc.value.exit_code == 1


def test_cap_bounds_the_search():
    p = make_pres(["x", "y"], "x*y - t^3")
    with pytest.raises(HypothesisError):
        t_power_annihilating_t1(p, cap=2)
    assert t_power_annihilating_t1(p, cap=3) == 3


def test_divisor_bound_examples():
    rep = divisor_report(make_pres(["x", "y", "w"], "x*y - w^2*t"), "w")
    assert (rep.N, rep.M) == (1, 1)
    rep = divisor_report(make_pres(["x", "y", "w"], "x*y - t^2"), "w")
    assert (rep.N, rep.M) == (2, 0)
    with pytest.raises(ValueError):
        divisor_report(make_pres(["x", "y"], "x*y - t"), -1)


def test_support_examples():
    p = make_pres(["x", "y", "w"], "x*y - w^2*t")
    ring = p.ring
    assert not check_t1_support(p, [ring.t])
    assert check_t1_support(p, [ring.t, ring.gen("w")])


@pytest.mark.parametrize(
    "names, gens",
    [
        (["x", "y"], ("x*y - t",)),
        (["x", "y"], ("x*y - t^2",)),
        (["x", "y", "w"], ("x*y - w^2*t",)),
        (["x", "y", "w"], ("x*y - w*t",)),
        (["x", "y"], ("x^2 - y^3 - t",)),
        (["x", "y", "w"], ("x*y - w",)),
    ],
)
def test_support_in_t_iff_bound_exists(names, gens):
    p = make_pres(names, *gens)
    supported = check_t1_support(p, [p.ring.t])
    try:
        t_power_annihilating_t1(p, cap=24)
        found = True
    except HypothesisError:
        found = False
    assert supported == found
