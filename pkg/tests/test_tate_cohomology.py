import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tatecalc.exact_coeff import identity, matmul
from tatecalc.lattice import Lattice, Subquotient, preimage, localize
from tatecalc.tate_cohomology import (CocycleError, CupEngine, CyclicGroup, GModule, TateClass, TateError,
                                      cup_truncation, tate_GT, tate_HMT, verify_cup_ring)


def periodic_oracle(X: GModule) -> tuple[list[int], list[int]]:
    """Even and odd Tate groups of a cyclic group from X^G / N X and ker N / (g-1) X."""
    G, r = X.group, X.rank
    R = Lattice.span(X.rels, r)
    gm1 = [[X.action[i][j] - int(i == j) for j in range(r)] for i in range(r)]
    N = [[0] * r for _ in range(r)]
    P = identity(r)
    for _ in range(G.n):
        N = [[N[i][j] + P[i][j] for j in range(r)] for i in range(r)]
        P = matmul(X.action, P)
    cols = lambda M: [[M[i][j] for i in range(r)] for j in range(r)]
    even = Subquotient(preimage(gm1, R, r), Lattice.span(cols(N) + X.rels, r)).orders
    odd = Subquotient(preimage(N, R, r), Lattice.span(cols(gm1) + X.rels, r)).orders
    return sorted(even), sorted(odd)


@st.composite
def gmodules(draw):
    n = draw(st.sampled_from([2, 3, 4, 6]))
    G = CyclicGroup(n)
    parts = []
    for k in range(draw(st.integers(1, 2))):
        # the HMT model of a permutation module grows fast, so keep one small free summand at most
        kinds = ["trivial"] + (["sign"] if n % 2 == 0 else []) + (["free"] if n <= 4 and k == 0 else [])
        kind = draw(st.sampled_from(kinds))
        order = draw(st.sampled_from([0, 0, 2, 3, 4, 9]))
        parts.append(getattr(GModule, kind)(G, order))
    X = parts[0]
    for Y in parts[1:]:
        r1, r2 = X.rank, Y.rank
        act = [[X.action[i][j] if i < r1 and j < r1 else (Y.action[i - r1][j - r1] if i >= r1 and j >= r1 else 0)
                for j in range(r1 + r2)] for i in range(r1 + r2)]
        rels = [v + [0] * r2 for v in X.rels] + [[0] * r1 + w for w in Y.rels]
        X = GModule(G, r1 + r2, act, rels)
    return X


@settings(max_examples=40, deadline=None)
@given(gmodules())
def test_both_pipelines_match_the_periodic_oracle(X):
    even, odd = periodic_oracle(X)
    window = (-3, 3)
    gt = tate_GT(X.group, X, window)
    hmt = tate_HMT(X.group, X, window)
    assert gt == hmt
    for i in range(-3, 4):
        assert sorted(gt[i]) == (even if i % 2 == 0 else odd)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bar_and_minimal_resolutions_agree(n):
    G = CyclicGroup(n)
    X = GModule.free(G, 0) if n == 3 else GModule.trivial(G)
    assert tate_GT(G, X, (-2, 2), kind="bar") == tate_GT(G, X, (-2, 2))


def test_free_module_is_acyclic():
    G = CyclicGroup(4)
    X = GModule.free(G)
    assert all(v == [] for v in tate_GT(G, X, (-4, 4)).values())


def test_sign_module_swaps_parity():
    G = CyclicGroup(4)
    X = GModule.sign(G)
    t = tate_GT(G, X, (-4, 4))
    assert all(t[i] == ([] if i % 2 == 0 else [2]) for i in range(-4, 5))


def test_localization_of_C6():
    G = CyclicGroup(6)
    t = tate_GT(G, GModule.trivial(G), (-2, 2), p=3)
    assert t[0] == [3] and t[2] == [3] and t[1] == []
    assert localize([6], 2) == [2]


def test_invalid_actions_are_rejected():
    G = CyclicGroup(3)
    with pytest.raises(TateError):
        GModule(G, 1, [[-1]])
    with pytest.raises(TateError):
        GModule.sign(G)
    with pytest.raises(TateError):
        CyclicGroup(1)


def test_cup_product_duality_for_C3():
    G = CyclicGroup(3)
    Z = GModule.trivial(G)
    E = CupEngine(G, *cup_truncation([-2, 2], [0]))
    a = E.generators(Z, -2)[0]
    b = E.generators(Z, 2)[0]
    # generators of H^2 and H^-2 multiply to a generator of H^0 = Z/3
    assert E.class_of(E.product(a, b, Z)) in ((1,), (2,))
    assert E.class_of(E.product(b, a, Z)) in ((1,), (2,))
    assert E.class_of(E.unit(Z)) in ((1,), (2,))


def test_cup_rejects_non_cocycles():
    G = CyclicGroup(2)
    X = GModule.trivial(G, 2)
    E = CupEngine(G, 6, 3)
    m, _ = E.model(X)
    vec = [0] * m.dim(1)
    vec[0] = 1
    bad = TateClass(1, vec, X)
    with pytest.raises(CocycleError):
        E.class_of(bad)


def test_cup_ring_small_window():
    r = verify_cup_ring((-2, 2), perturbations=15, seed=5)
    assert r.ok and r.triples == 125
