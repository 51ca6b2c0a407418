from hypothesis import given, settings
from hypothesis import strategies as st

from tatecalc.lattice import Lattice, PresentedComplex, Subquotient, localize


def vectors(n, k, bound=6):
    return st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n), min_size=0, max_size=k)


@settings(max_examples=100, deadline=None)
@given(vectors(3, 4), st.lists(st.integers(-4, 4), min_size=4, max_size=4))
def test_span_contains_integer_combinations(gens, coeffs):
    L = Lattice.span(gens, 3)
    v = [sum(c * g[i] for c, g in zip(coeffs, gens)) for i in range(3)]
    assert L.contains(v)
    for g in gens:
        assert L.contains(g)


def test_span_excludes_non_members():
    L = Lattice.span([[2, 0], [0, 3]], 2)
    assert not L.contains([1, 0])
    assert L.contains([4, -3])


@settings(max_examples=100, deadline=None)
@given(vectors(3, 3), vectors(3, 3))
def test_intersection_is_contained_in_both(a, b):
    A, B = Lattice.span(a, 3), Lattice.span(b, 3)
    I = A.intersect(B)
    assert A.contains_lattice(I) and B.contains_lattice(I)


def test_subquotient_orders():
    top = Lattice.full(3)
    bottom = Lattice.span([[2, 0, 0], [0, 6, 0]], 3)
    Q = Subquotient(top, bottom)
    assert Q.orders == [2, 6, 0]
    assert Q.torsion() == [2, 6] and Q.free_rank() == 1
    assert Q.is_zero([2, 6, 0])
    assert not Q.is_zero([0, 3, 0])


def test_localize_keeps_primary_parts():
    assert localize([6, 0, 4], 2) == [2, 4, 0]
    assert localize([6, 9], 3) == [3, 9]
    assert localize([5], 2) == []


def test_homology_of_multiplication_by_n():
    # Z --n--> Z has H_0 = Z/n and H_1 = 0
    C = PresentedComplex({0: 1, 1: 1}, {1: [[5]]})
    C.check()
    assert C.homology(0).orders == [5]
    assert C.homology(1).orders == []


def test_relations_are_quotiented():
    # Z/4 --2--> Z/4: kernel {0,2}, image {0,2}
    C = PresentedComplex({0: 1, 1: 1}, {1: [[2]]}, {0: [[4]], 1: [[4]]})
    C.check()
    assert C.homology(1).orders == [2]
    assert C.homology(0).orders == [2]
