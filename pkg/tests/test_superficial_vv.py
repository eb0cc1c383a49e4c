import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from vvalla.errors import PreconditionError, UnstabilizedError
from vvalla.kernel.ideal import ideal_colon, ideal_colon_element
from vvalla.kernel.module import subquotient_length
from vvalla.local_model import declare_ideal
from vvalla.superficial_vv import (PowerPlus, VVLengths, sample_superficial_sequence, superficial_defect,
                                   verify_superficial, vv_annihilator, vv_module, vv_pieces_explicit)


def dicts(polys):
    return [dict(f.terms) for f in polys]


def test_power_plus_matches_direct_sum(d0, plane):
    x = plane.poly("x^4 + 3*y^4")
    plus = PowerPlus(d0, [x])
    xi = d0.ring.ideal([x])
    for n in range(1, 5):
        assert plus.get(n) == d0.power(n) + xi
    assert plus.get(0).is_unit()


@pytest.mark.parametrize("x", ["x^4 + 3*y^4", "x^3*y", "x^4 + x^3*y - 2*x*y^3 + 5*y^4"])
def test_superficial_defect_matches_oracle(d0, plane, x):
    f = plane.poly(x)
    plus = PowerPlus(d0, [f])
    for n in range(1, 4):
        d = superficial_defect(d0, f, n, plus)
        direct = d0.power(n).colength() - ideal_colon_element(d0.power(n + 1), f).colength()
        assert d == direct == O.colon_defect(dicts(d0.gens), dict(f.terms), n, 2, (1, 1))


def test_superficial_defect_on_cusp(cusp):
    I = declare_ideal(cusp, ["x", "y"])
    rel = dicts(cusp.ring.relations)
    for x in ["x", "y"]:
        f = cusp.poly(x)
        got = [superficial_defect(I, f, n) for n in range(1, 4)]
        want = [O.colon_defect(dicts(I.gens), dict(f.terms), n, 2, (3, 4), rel) for n in range(1, 4)]
        assert got == want


def test_verify_superficial_certificates(plane, d0):
    m = declare_ideal(plane, ["x", "y"])
    cert = verify_superficial(plane.poly("x + 2*y"), m)
    assert cert.passed and cert.c == 0
    with pytest.raises(PreconditionError):
        verify_superficial(plane.poly("x^2"), m)


def test_cusp_y_is_not_superficial(cusp):
    # y^3 = x^4 puts y* in the nilradical of the tangent cone
    I = declare_ideal(cusp, ["x", "y"])
    assert not verify_superficial(cusp.poly("y"), I).passed
    assert verify_superficial(cusp.poly("x"), I).passed


@given(st.integers(0, 2**32))
@settings(max_examples=8, deadline=None)
def test_sampling_is_deterministic_and_certified(seed):
    from vvalla.local_model import build_ring
    model = build_ring(vars=("x", "y"))
    I = declare_ideal(model, ["x^3", "x^2*y", "y^3"])
    a = sample_superficial_sequence(I, 2, seed)
    b = sample_superficial_sequence(I, 2, seed)
    assert a.render() == b.render()
    assert len(a.certificates) == 2 and all(c.passed for c in a.certificates)


def test_sampling_rejects_long_sequences(d0):
    with pytest.raises(PreconditionError):
        sample_superficial_sequence(d0, 3, 0)


@pytest.mark.parametrize("xs", [["x^4 + 3*y^4"], ["x^3*y"], ["x^4 + y^4", "x^3*y - x*y^3"]])
def test_vv_lengths_match_linear_algebra(d0, plane, xs):
    fs = [plane.poly(x) for x in xs]
    vl = VVLengths(d0, fs)
    got = [vl.length(n) for n in range(1, 4)]
    want = [O.vv_length_oracle(dicts(d0.gens), dicts(fs), n, 2, (1, 1)) for n in range(1, 4)]
    assert got == want


@pytest.mark.parametrize("xs,expected", [(["x^3"], [2, 1, 1]), (["y^2"], [1, 0, 0]), (["x^3", "y^2"], [0, 0, 0])])
def test_vv_lengths_on_cusp(cusp, xs, expected):
    I = declare_ideal(cusp, ["x^3", "y^2"])
    fs = [cusp.poly(x) for x in xs]
    vl = VVLengths(I, fs)
    got = [vl.length(n) for n in range(1, 4)]
    rel = dicts(cusp.ring.relations)
    assert got == expected
    assert got == [O.vv_length_oracle(dicts(I.gens), dicts(fs), n, 2, (3, 4), rel) for n in range(1, 4)]


def test_vv_length_formula_against_subquotient(d1, plane):
    seq = sample_superficial_sequence(d1, 2, 11)
    vl = VVLengths(d1, seq.elements)
    for n in range(1, 4):
        U, W = vv_pieces_explicit(d1, seq.elements, n)
        assert vl.length(n) == subquotient_length(U, W)


def test_vv_module_annihilator_kills_pieces(d0):
    seq = sample_superficial_sequence(d0, 1, 5)
    rep = vv_module(seq.elements, d0, seed=5)
    assert rep.stabilized and rep.total_length > 0
    for pc in rep.pieces:
        if pc.length:
            assert pc.W.contains_ideal(pc.ann * pc.U)
            assert pc.ann == ideal_colon(pc.W, pc.U)
            assert rep.annihilator <= pc.ann
    assert rep.verdict.kind == "m-primary"


def test_vv_module_zero_for_regular_sequence(plane):
    I = declare_ideal(plane, ["x^2", "y^2"])
    rep = vv_module([plane.poly("x^2"), plane.poly("y^2")], I)
    assert rep.is_zero
    ann, verdict = vv_annihilator([plane.poly("x^2"), plane.poly("y^2")], I, report=rep)
    assert verdict.kind == "unit"


def test_vv_module_reports_unstabilized(d0):
    seq = sample_superficial_sequence(d0, 1, 5)
    rep = vv_module(seq.elements, d0, window=50, cap=4)
    assert not rep.stabilized and rep.status == "unstabilized"
    with pytest.raises(UnstabilizedError):
        vv_annihilator(seq.elements, d0, report=rep)
