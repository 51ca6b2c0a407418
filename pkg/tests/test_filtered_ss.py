import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tatecalc.filtered_ss import (FilteredComplex, FilteredMap, FiltrationError, SpectralSequence,
                                  associated_graded, canonical_form, compare, day_tensor, graded_tensor,
                                  random_filtered_complex)


def two_step():
    # Z --2--> Z, degree 1 at level 1, degree 0 at level 0
    return FilteredComplex.from_levels({0: 1, 1: 1}, {1: [[2]]}, {0: [0], 1: [1]})


def test_first_differential_is_multiplication_by_two():
    ss = SpectralSequence(two_step())
    assert ss.E(1, 1, 1).orders == [0]
    assert ss.E(1, 0, 0).orders == [0]
    assert ss.differential(1, 1, 1) == [[2]]
    assert ss.E(2, 0, 0).orders == [2]
    assert ss.E(2, 1, 1).orders == []
    assert ss.collapse_page() == 2
    assert ss.check_convergence()


def test_same_level_kills_on_E0():
    F = FilteredComplex.from_levels({0: 1, 1: 1}, {1: [[3]]}, {0: [0], 1: [0]})
    ss = SpectralSequence(F)
    assert ss.E(1, 0, 0).orders == [3]
    assert ss.E(1, 0, 1).orders == []


def test_differential_must_respect_filtration():
    F = FilteredComplex.from_levels({0: 1, 1: 1}, {1: [[1]]}, {0: [1], 1: [0]})
    with pytest.raises(FiltrationError):
        F.validate()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([None, 2, 3]))
def test_random_complexes_converge(seed, torsion):
    F = random_filtered_complex(random.Random(seed), torsion=torsion)
    ss = SpectralSequence(F)
    assert ss.check_convergence()
    for r in range(ss.r_infinity + 1):
        assert ss.check_d_squared(r)
        assert ss.check_next_page(r)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_unit_for_day_tensor(seed):
    F = random_filtered_complex(random.Random(seed), max_rank=3, levels=3)
    T = day_tensor(F, FilteredComplex.unit())
    a, b = SpectralSequence(F), SpectralSequence(T)
    for n in F.degrees():
        assert canonical_form(F.homology(n).orders) == canonical_form(T.homology(n).orders)
        for p in range(F.bottom + 1, F.top + 1):
            assert canonical_form(a.E(1, p, n).orders) == canonical_form(b.E(1, p, n).orders)


def test_day_tensor_grading_is_the_tensor_of_gradings():
    F = two_step()
    G = FilteredComplex.from_levels({0: 2}, {}, {0: [0, 1]})
    T = day_tensor(F, G)
    T.validate()
    gr = {k: canonical_form(v) for k, v in associated_graded(T).items() if v}
    expected = {k: v for k, v in graded_tensor(associated_graded(F), associated_graded(G)).items() if v[0] or v[1]}
    assert gr == expected


def test_compare_identity_is_an_isomorphism():
    F = two_step()
    phi = FilteredMap(F, F, {0: [[1]], 1: [[1]]})
    v = compare(phi)
    assert v.e1_iso and v.abutment_iso


def test_compare_detects_non_quasi_isomorphism():
    F = two_step()
    phi = FilteredMap(F, F, {0: [[2]], 1: [[2]]})
    v = compare(phi)
    assert not v.abutment_iso and not v.e1_iso
