from __future__ import annotations

import dataclasses

import pytest

from detkit.cotangent import Presentation
from detkit.errors import ContextMismatchError, HypothesisError, VerificationError
from detkit.groebner import membership_certificate
from detkit.lifting import (
    Constants,
    Divisor,
    FamilyPair,
    MapTruncation,
    check_agreement,
    check_certificate,
    emit_artin_system,
    formal_lift,
    lift_equations,
    lift_iso_step,
    lift_relation,
    linear_part_determinant,
    psi_coherent,
    stage_agreement,
    verify_lift,
)
from detkit.rings import Ring, sum_polys


def make_pair(names, f, g, k, divisor=None, validate=True):
    ring = Ring(names)
    a = Presentation(ring, tuple(ring.parse(p) for p in f))
    b = Presentation(ring, tuple(ring.parse(p) for p in g))
    return FamilyPair(a, b, k, divisor, validate)


NODE = (["x", "y"], ["x*y - t^2"], ["x*y - t^2 - t^9"], 9)
DIV = (["x", "y", "w"], ["x*y - w^2*t"], ["x*y - w^2*t + t^5*w^5*x + t^5*w^5"], 5, Divisor("w", 5))


def test_pair_validation():
    with pytest.raises(HypothesisError):
        make_pair(["x", "y"], ["x*y - t^2"], ["x*y - t^2 - t^3"], 9)
    with pytest.raises(ContextMismatchError):
        make_pair(["x", "y"], ["x*y - t^2"], ["x*y", "x"], 9)
    with pytest.raises(ValueError):
        make_pair(["x", "y"], ["x*y"], ["x*y"], 0)


def test_lift_equations_examples():
    pair = make_pair(*NODE)
    g = lift_equations(pair)
    assert [str(p) for p in g] == ["-1"]
    pair = make_pair(*DIV)
    g = lift_equations(pair)
    w5 = pair.ring.gen("w") ** 5
    assert membership_certificate(g[0], [w5]) is not None


def test_lift_relation_examples():
    ring = Ring(["x", "y"])
    x, y = ring.gen("x"), ring.gen("y")
    pres = Presentation(ring, (x, y))
    assert lift_relation([y, -x], pres, 3) == [y, -x]
    pres = Presentation(ring, (ring.parse("x*y - t^2"),))
    assert [str(p) for p in lift_relation([ring.zero], pres, 2)] == ["0"]
    pres = Presentation(ring, (x, y + ring.t))
    out = lift_relation([y, -x], pres, 1)
    assert sum_polys(ring, (a * f for a, f in zip(out, pres.generators))).is_zero()
    assert all((a - b).truncate(1).is_zero() for a, b in zip(out, [y, -x]))


def test_lift_relation_rejects_bad_input():
    ring = Ring(["x", "y"])
    pres = Presentation(ring, (ring.parse("x"),))
    with pytest.raises(HypothesisError):
        lift_relation([ring.one], pres, 1)


def test_node_lift():
    pair = make_pair(*NODE)
    map_, cert = formal_lift(pair, 16)
    assert cert.N == 2 and map_.order == 16
    check_certificate(cert, pair)
    assert stage_agreement(cert, pair)
    assert psi_coherent(cert, pair)
    again = verify_lift(map_, pair, constants=Constants(2))
    assert again.images == cert.images
    assert check_agreement(map_.images, (pair.ring.gen("x"), pair.ring.gen("y")), pair.k - 4, pair.ring.one)


def test_closed_form_is_accepted_and_identity_rejected():
    pair = make_pair(*NODE)
    ring = pair.ring
    closed = MapTruncation((ring.parse("x + t^7*x"), ring.gen("y")), 16)
    cert = verify_lift(closed, pair)
    assert [str(c) for c in cert.cofactors[0]] == ["t^7 + 1"]
    ident = MapTruncation((ring.gen("x"), ring.gen("y")), 16)
    with pytest.raises(VerificationError) as exc:
        verify_lift(ident, pair)
    assert exc.value.index == 0


def test_smooth_lift():
    pair = make_pair(["z1"], ["z1 - t"], ["z1 - t - t^6"], 6)
    map_, cert = formal_lift(pair, 12)
    assert [str(p) for p in map_.images] == ["z1 + t^6"]
    check_certificate(cert, pair)


def test_identical_pair_lifts_to_identity():
    pair = make_pair(["x", "y"], ["x*y - t^2"], ["x*y - t^2"], 9)
    map_, cert = formal_lift(pair, 14)
    assert map_.images == (pair.ring.gen("x"), pair.ring.gen("y"))


def test_single_step():
    pair = make_pair(*NODE)
    ring = pair.ring
    h = MapTruncation((ring.gen("x"), ring.gen("y")), 9)
    nxt, rec = lift_iso_step(h, pair, 2)
    assert nxt.order == 10 and rec.order == 9
    for g in pair.g:
        val = g.subs(list(nxt.images))
        assert membership_certificate(val, list(pair.f) + [ring.t_power(10)]) is not None
    with pytest.raises(ValueError):
        lift_iso_step(MapTruncation(h.images, 3), pair, 2)


def test_threshold_is_enforced():
    pair = make_pair(["x", "y"], ["x*y - t^2"], ["x*y - t^2 - t^8"], 8)
    with pytest.raises(HypothesisError):
        formal_lift(pair, 12)


def test_divisor_lift_preserves_divisor():
    pair = make_pair(*DIV)
    map_, cert = formal_lift(pair, 9)
    assert (cert.N, cert.M) == (1, 1)
    check_certificate(cert, pair)
    assert stage_agreement(cert, pair) and psi_coherent(cert, pair)
    ring = pair.ring
    w = ring.gen("w")
    wi = ring.fibre.index("w")
    image_w = map_.images[wi]
    q = membership_certificate(image_w, [w])
    assert q is not None
    assert q[0].coefficient(ring._zero_mono) != 0


def test_divisor_threshold_on_r():
    pair = make_pair(["x", "y", "w"], ["x*y - w^2*t"], ["x*y - w^2*t + t^5*w^3"], 5, Divisor("w", 3))
    with pytest.raises(HypothesisError):
        formal_lift(pair, 9)


def test_non_isolated_perturbation_is_rejected():
    pair = make_pair(["x", "y", "w"], ["x*y - w^2*t"], ["x*y - w^2*t - t^3"], 3, validate=True)
    with pytest.raises(HypothesisError):
        formal_lift(pair, 9)


def test_check_certificate_detects_tampering():
    pair = make_pair(*NODE)
    _, cert = formal_lift(pair, 16)
    ring = pair.ring
    bad = dataclasses.replace(cert, images=(cert.images[0] + ring.t_power(3), cert.images[1]))
    with pytest.raises(VerificationError) as exc:
        check_certificate(bad, pair)
    assert exc.value.index == 0
    bad = dataclasses.replace(cert, cofactors=((cert.cofactors[0][0] + ring.one,),))
    with pytest.raises(VerificationError):
        check_certificate(bad, pair)


def test_linear_part_determinant():
    ring = Ring(["x", "y"])
    assert linear_part_determinant([ring.parse("2*x + y"), ring.parse("x + t")]) == -1
    assert linear_part_determinant([ring.parse("x^2"), ring.gen("y")]) == 0


@pytest.mark.parametrize("case", [NODE, DIV])
def test_artin_system_residual(case):
    pair = make_pair(*case)
    _, cert = formal_lift(pair, 9 if case is DIV else 16)
    system = emit_artin_system(pair)
    assert len(system.unknowns) == pair.ring.n + pair.original.m ** 2
    res = system.substitute(cert.images, cert.cofactors)
    for r in res:
        assert r.truncate(cert.order).is_zero()


def test_artin_system_names_avoid_clashes():
    pair = make_pair(["a1", "y"], ["a1*y - t"], ["a1*y - t"], 5)
    system = emit_artin_system(pair)
    assert "a1" not in system.a_names
    assert len(set(system.ring.names)) == len(system.ring.names)


def test_lift_relation_corrections():
    ring = Ring(["x", "y"])
    x, y, t = ring.gen("x"), ring.gen("y"), ring.t
    pres = Presentation(ring, (x, y))
    assert lift_relation([y + t**3, -x], pres, 3) == [y, -x]
    pres = Presentation(ring, (ring.parse("x*y - t^2"),))
    assert lift_relation([t**5], pres, 5) == [ring.zero]


def test_artin_system_smooth_example():
    pair = make_pair(["z1"], ["z1 - t"], ["z1 - t - t^6"], 6)
    system = emit_artin_system(pair)
    assert system.unknowns == ("a1", "b11")
    big = system.ring
    assert str(system.equations[0]) == str(big.parse("a1 - t - t^6 - b11*z1 + b11*t"))
    ring = pair.ring
    res = system.substitute([ring.parse("z1 + t^6")], [[ring.one]])
    assert [str(r) for r in res] == ["0"]
