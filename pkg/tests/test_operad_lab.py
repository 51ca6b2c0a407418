from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from tatecalc.operad_lab import (IDENTITY, OperadError, bimodule_closed_form, coaction, compose, compose_many,
                                 config, d_product_associative, dprime_product_associative, face_dimension,
                                 flatten, g_left_inverse, interval_bimodule_check, is_cubes, is_partition,
                                 left_action_associative, moore_coherent, moore_mu, operad_check,
                                 pseudocellular_q, right_action_associative, unit_action, validate)

unit = st.fractions(min_value=0, max_value=1, max_denominator=30)


@st.composite
def intervals(draw, lo_open=False, hi_open=False):
    a, b = draw(unit), draw(unit)
    assume(a != b)
    x, y = min(a, b), max(a, b)
    assume(not (lo_open and x == 0) and not (hi_open and y == 1))
    return (x, y)


@st.composite
def overlapping(draw, max_arity=3):
    return tuple(draw(intervals()) for _ in range(draw(st.integers(1, max_arity))))


@st.composite
def cubes(draw, max_arity=3):
    n = draw(st.integers(1, max_arity))
    pts = sorted(set(draw(st.lists(unit, min_size=2 * n, max_size=2 * n))))
    assume(len(pts) == 2 * n)
    return tuple((pts[2 * k], pts[2 * k + 1]) for k in range(n))


@settings(max_examples=100, deadline=None)
@given(overlapping(), st.data())
def test_unit_laws(c, data):
    i = data.draw(st.integers(1, len(c)))
    assert compose(c, i, IDENTITY) == c
    assert compose(IDENTITY, 1, c) == c


@settings(max_examples=100, deadline=None)
@given(overlapping(), overlapping(), overlapping(), st.data())
def test_sequential_associativity(a, b, c, data):
    i = data.draw(st.integers(1, len(a)))
    j = data.draw(st.integers(1, len(b)))
    assert compose(compose(a, i, b), i + j - 1, c) == compose(a, i, compose(b, j, c))


@settings(max_examples=100, deadline=None)
@given(overlapping(), overlapping(), overlapping())
def test_parallel_associativity(a, b, c):
    assume(len(a) >= 2)
    # filling slot 1 with b shifts slot 2 to position len(b) + 1
    assert compose(compose(a, 1, b), len(b) + 1, c) == compose(compose(a, 2, c), 1, b)


@settings(max_examples=100, deadline=None)
@given(cubes(), cubes(), st.data())
def test_little_cubes_are_closed_under_composition(a, b, data):
    assert is_cubes(a) and is_cubes(b)
    assert is_cubes(compose(a, data.draw(st.integers(1, len(a))), b))


def test_validation():
    with pytest.raises(OperadError):
        validate(config((Fraction(1, 2), Fraction(1, 2))))
    with pytest.raises(OperadError):
        validate(config((0, Fraction(2, 3)), (Fraction(1, 3), 1)), "cubes")
    validate(config((0, Fraction(2, 3)), (Fraction(1, 3), 1)), "overlapping")
    with pytest.raises(OperadError):
        compose(IDENTITY, 2, IDENTITY)


@settings(max_examples=100, deadline=None)
@given(intervals(), unit)
def test_left_inverse(iv, t):
    s = g_left_inverse(iv, iv[0] + (iv[1] - iv[0]) * t)
    assert s == t
    assert 0 <= g_left_inverse(iv, t) <= 1


@settings(max_examples=100, deadline=None)
@given(st.lists(unit, min_size=1, max_size=5).map(sorted), overlapping(), overlapping(), st.data())
def test_coaction_is_compatible_with_composition(u, a, b, data):
    i = data.draw(st.integers(1, len(a)))
    whole = coaction(u, compose(a, i, b))
    outer = coaction(u, a)
    inner = coaction(outer[i - 1], b)
    assert whole == outer[:i - 1] + inner + outer[i:]
    for v in whole:
        assert face_dimension(v) <= face_dimension(u)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.fractions(min_value=Fraction(1, 20), max_value=5, max_denominator=20), min_size=1, max_size=6),
       st.data())
def test_moore_coherence(lengths, data):
    n = len(lengths)
    cuts = sorted(data.draw(st.sets(st.integers(1, n - 1), max_size=n - 1))) if n > 1 else []
    bounds = [0, *cuts, n]
    blocks = [b - a for a, b in zip(bounds, bounds[1:])]
    assert is_partition(moore_mu(lengths))
    assert moore_coherent(lengths, blocks)


@given(st.lists(st.lists(st.sampled_from("ab"), max_size=5), min_size=1, max_size=4))
def test_q_is_subadditive_under_flattening(words):
    assert pseudocellular_q(flatten(words)) <= sum(pseudocellular_q(w) for w in words)


def test_q_examples():
    assert pseudocellular_q("abab") == 4
    assert pseudocellular_q("aabb") == 2
    assert flatten(["ab", "ba"]) == tuple("abba")


@st.composite
def bimodule_inputs(draw):
    pts = sorted(set(draw(st.lists(unit, min_size=4, max_size=4))))
    assume(len(pts) == 4)
    return draw(intervals(hi_open=True)), tuple(zip(pts[::2], pts[1::2])), draw(intervals(lo_open=True))


@settings(max_examples=150, deadline=None)
@given(bimodule_inputs())
def test_bimodule_orders_commute(data):
    dl, c, dr = data
    assert interval_bimodule_check(dl, c, dr).ok


def test_printed_sign_in_closed_form_fails():
    """Replacing (c - b) by (b - c) in the middle breakpoint breaks agreement."""
    dl, c, dr = ((Fraction(1, 5), Fraction(1, 2)), ((Fraction(0), Fraction(1, 4)), (Fraction(1, 2), Fraction(1))),
                 (Fraction(1, 3), Fraction(2, 3)))
    (a, b), (cc, dd) = c
    head = (b - a) * (1 - dl[1])
    ell = head + cc - b + (dd - cc) * dr[0]
    printed = (head + b - cc) / ell
    good = bimodule_closed_form(dl, c, dr)[0][1][1]
    assert printed != good
    assert interval_bimodule_check(dl, c, dr).left_first[0][1][1] == good


@settings(max_examples=100, deadline=None)
@given(bimodule_inputs(), intervals(lo_open=True), intervals(hi_open=True))
def test_action_associativity(data, d2, e):
    dl, c, dr = data
    assert right_action_associative(c, dr, d2)
    assert left_action_associative(e, dl, c)
    assert d_product_associative(dr, d2, dr)
    assert dprime_product_associative(dl, e, dl)
    assert unit_action(c)


def test_compose_many_matches_iterated_compose():
    a = config((0, Fraction(1, 2)), (Fraction(1, 3), 1))
    b = config((0, Fraction(1, 2)), (Fraction(1, 2), 1))
    assert compose_many(a, [b, IDENTITY]) == compose(a, 1, b)


def test_operad_check_small():
    res = operad_check(seed=7, trials=50)
    assert res and all(s.ok for s in res)
