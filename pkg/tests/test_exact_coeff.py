import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tatecalc.exact_coeff import (QQ, ZZ, CoeffError, Fp, Scalar, Wn, determinant, from_teichmuller_digits,
                                  invariant_factors, matmul, nullspace_mod_p, rank_mod_p, smith_normal_form,
                                  teichmuller, teichmuller_digits)


def small_matrices(max_dim=4, bound=9):
    return st.integers(1, max_dim).flatmap(
        lambda m: st.integers(1, max_dim).flatmap(
            lambda n: st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n),
                               min_size=m, max_size=m)))


def leibniz_det(M):
    n = len(M)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = (-1) ** inv
        for i, j in enumerate(perm):
            term *= M[i][j]
        total += term
    return total


def determinantal_divisors(M):
    """d_k = gcd of all k x k minors; invariant factors are d_k / d_{k-1}."""
    m, n = len(M), len(M[0])
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = math.gcd(g, leibniz_det([[M[r][c] for c in cols] for r in rows]))
        out.append(g)
    return out


@settings(max_examples=150, deadline=None)
@given(small_matrices())
def test_smith_form_identity_and_divisibility(M):
    s = smith_normal_form(M)
    m, n = len(M), len(M[0])
    D = matmul(matmul(s.left, M), s.right)
    for i in range(m):
        for j in range(n):
            assert D[i][j] == (s.diag[i] if i == j and i < len(s.diag) else 0)
    assert abs(leibniz_det(s.left)) == 1 and abs(leibniz_det(s.right)) == 1
    assert matmul(s.left, s.left_inv) == [[int(i == j) for j in range(m)] for i in range(m)]
    assert matmul(s.right, s.right_inv) == [[int(i == j) for j in range(n)] for i in range(n)]
    nz = [d for d in s.diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@settings(max_examples=150, deadline=None)
@given(small_matrices(max_dim=3))
def test_invariant_factors_match_minors(M):
    dk = determinantal_divisors(M)
    expected, prev = [], 1
    for d in dk:
        if d == 0:
            break
        expected.append(d // prev)
        prev = d
    assert invariant_factors(M) == expected


@settings(max_examples=100, deadline=None)
@given(small_matrices(max_dim=3), st.sampled_from([(2, 3), (3, 2), (5, 1)]))
def test_local_smith_form_agrees_with_integer_one(M, pN):
    p, N = pN
    mod = p ** N

    def local(d):
        v = 0
        while d % p == 0 and v < N:
            d //= p
            v += 1
        return p ** v

    expected = [q for q in (local(d) for d in invariant_factors(M)) if q != mod]
    got = [d for d in invariant_factors(M, mod, p) if d % mod]
    assert sorted(got) == sorted(expected)


@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=3, max_size=3))
def test_determinant_matches_leibniz(M):
    assert determinant(M) == leibniz_det(M)


@settings(max_examples=100)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 6), st.integers(0, 10 ** 6))
def test_teichmuller_is_frobenius_fixed(p, N, a):
    t = teichmuller(a, N, p)
    assert t.ring == Wn(p, N)
    assert t.value % p == a % p
    assert pow(t.value, p, p ** N) == t.value


@settings(max_examples=200)
@given(st.sampled_from([3, 5]), st.integers(1, 8), st.integers(0, 10 ** 9))
def test_teichmuller_digits_round_trip(p, N, x):
    digits = teichmuller_digits(x, p, N)
    assert len(digits) == N and all(0 <= c < p for c in digits)
    assert from_teichmuller_digits(digits, p, N) == x % p ** N


def test_teichmuller_digits_known_value():
    # omega(2) in Z/25 is 7 (7^5 = 7 mod 25), so 7 has digits (2, 0)
    assert teichmuller(2, 2, 5).value == 7
    assert teichmuller_digits(7, 5, 2) == [2, 0]
    assert teichmuller_digits(12, 5, 2) == [2, 1]


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_scalar_arithmetic_mod_p(a, b):
    F = Fp(7)
    x, y = F(a), F(b)
    assert (x + y).value == (a + b) % 7
    assert (x * y).value == (a * b) % 7
    assert (x - y) + y == x
    if b % 7:
        assert (x / y) * y == x


def test_scalar_rings_do_not_mix():
    with pytest.raises(CoeffError):
        Fp(3)(1) + Fp(5)(1)
    with pytest.raises(CoeffError):
        Wn(3, 2)(3).inverse()
    with pytest.raises(CoeffError):
        ZZ(2).inverse()
    assert QQ(Fraction(2, 3)).inverse() == Fraction(3, 2)


@given(st.sampled_from([ZZ(-17), QQ(Fraction(-4, 9)), Fp(11)(3), Wn(3, 4)(80)]))
def test_scalar_json_round_trip(s):
    assert Scalar.from_json(s.to_json()) == s


def test_scalar_json_rejects_bad_input():
    with pytest.raises(CoeffError):
        Scalar.from_json({"ring": "Fp", "p": 4, "value": "1"})
    with pytest.raises(CoeffError):
        Scalar.from_json({"ring": "Wn", "p": 3, "N": 2, "value": "9"})
    with pytest.raises(CoeffError):
        Scalar.from_json({"ring": "Z", "value": 3})


def test_valuation():
    assert Wn(3, 5)(54).valuation() == 3
    assert Wn(3, 5)(0).valuation() is None


@settings(max_examples=100, deadline=None)
@given(small_matrices(max_dim=4, bound=6), st.sampled_from([2, 3, 5]))
def test_nullspace_mod_p(M, p):
    n = len(M[0])
    N = nullspace_mod_p(M, p, n)
    assert len(N) + rank_mod_p(M, p) == n
    for x in N:
        assert all(sum(a * b for a, b in zip(row, x)) % p == 0 for row in M)
