"""Exact interval combinatorics for the little and overlapping little 1-cubes operads.

Configurations are tuples of (x, y) pairs of Fractions; the pair (x, y)
stands for the affine embedding t -> x + (y - x) t of [0, 1].
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Sequence

Interval = tuple[Fraction, Fraction]
Config = tuple[Interval, ...]
ZERO, ONE = Fraction(0), Fraction(1)


class OperadError(ValueError):
    pass


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def config(*pairs) -> Config:
    return tuple((_frac(x), _frac(y)) for x, y in pairs)


def validate(c: Config, variant: str = "overlapping") -> None:
    """Overlapping: 0 <= x < y <= 1.  Little cubes: additionally y_i <= x_{i+1}."""
    for x, y in c:
        if not (ZERO <= x < y <= ONE):
            raise OperadError(f"interval ({x}, {y}) is not a proper subinterval of [0, 1]")
    if variant == "cubes":
        for (_, y), (x2, _) in zip(c, c[1:]):
            if y > x2:
                raise OperadError("little-cubes intervals must be disjoint and in order")
    elif variant != "overlapping":
        raise OperadError(f"unknown variant {variant!r}")


def is_cubes(c: Config) -> bool:
    try:
        validate(c, "cubes")
    except OperadError:
        return False
    return True


IDENTITY: Config = ((ZERO, ONE),)


def embed(iv: Interval, t: Fraction) -> Fraction:
    x, y = iv
    return x + (y - x) * t


def compose(outer: Config, i: int, inner: Config) -> Config:
    """outer o_i inner (slots are 1-based)."""
    if not 1 <= i <= len(outer):
        raise OperadError(f"slot {i} out of range for arity {len(outer)}")
    iv = outer[i - 1]
    mid = tuple((embed(iv, x), embed(iv, y)) for x, y in inner)
    return outer[:i - 1] + mid + outer[i:]


def compose_many(outer: Config, inners: Sequence[Config]) -> Config:
    """Full composition gamma(outer; inners)."""
    if len(inners) != len(outer):
        raise OperadError("need one inner configuration per slot")
    out: list[Interval] = []
    for iv, inner in zip(outer, inners):
        out += [(embed(iv, x), embed(iv, y)) for x, y in inner]
    return tuple(out)


def g_left_inverse(iv: Interval, t) -> Fraction:
    """The weakly increasing left inverse of t -> x + (y - x) t."""
    x, y = iv
    if x == y:
        raise OperadError("degenerate interval has no left inverse")
    t = _frac(t)
    if t < x:
        return ZERO
    if t > y:
        return ONE
    return (t - x) / (y - x)


# --------------------------------------------------------------------------
# coaction on simplices in Milnor coordinates


def validate_milnor(u: Sequence[Fraction]) -> None:
    if any(not ZERO <= v <= ONE for v in u) or any(a > b for a, b in zip(u, u[1:])):
        raise OperadError("Milnor coordinates must be weakly increasing in [0, 1]")


def coaction(u: Sequence[Fraction], c: Config) -> list[tuple[Fraction, ...]]:
    """v^i_j = g_{c_i}(u_j): one Milnor point per interval of c."""
    return [tuple(g_left_inverse(iv, t) for t in u) for iv in c]


def face_dimension(v: Sequence[Fraction]) -> int:
    """Number of distinct coordinates strictly inside (0, 1): the smallest face holding v."""
    return len({t for t in v if ZERO < t < ONE})


def barycentric(u: Sequence[Fraction]) -> list[Fraction]:
    """t_0, ..., t_n with u_j = t_0 + ... + t_{j-1}."""
    pts = [ZERO, *u, ONE]
    return [b - a for a, b in zip(pts, pts[1:])]


# --------------------------------------------------------------------------
# Moore rectification


def moore_mu(lengths: Sequence) -> Config:
    """Lengths l_1..l_n to the partition [0, l_1/l], [l_1/l, (l_1+l_2)/l], ..."""
    ls = [_frac(v) for v in lengths]
    if any(v <= 0 for v in ls):
        raise OperadError("Moore lengths must be positive")
    total = sum(ls, ZERO)
    out, acc = [], ZERO
    for v in ls:
        out.append((acc / total, (acc + v) / total))
        acc += v
    return tuple(out)


def moore_coherent(lengths: Sequence, blocks: Sequence[int]) -> bool:
    """mu_n(l) = mu_k(block sums) o (mu(block_1), ..., mu(block_k))."""
    ls = [_frac(v) for v in lengths]
    if sum(blocks) != len(ls) or any(b <= 0 for b in blocks):
        raise OperadError("blocks must partition the lengths")
    pieces, k = [], 0
    for b in blocks:
        pieces.append(ls[k:k + b])
        k += b
    return compose_many(moore_mu([sum(p) for p in pieces]), [moore_mu(p) for p in pieces]) == moore_mu(ls)


def is_partition(c: Config) -> bool:
    return bool(c) and c[0][0] == ZERO and c[-1][1] == ONE and all(a[1] == b[0] for a, b in zip(c, c[1:]))


# --------------------------------------------------------------------------
# pseudocellular filtration


def pseudocellular_q(w: Sequence[Hashable]) -> int:
    """n minus the number of adjacent equal letters."""
    return len(w) - sum(1 for a, b in zip(w, w[1:]) if a == b)


def flatten(words: Sequence[Sequence[Hashable]]) -> tuple:
    """Concatenate the words in order, as the operad action does."""
    return tuple(g for w in words for g in w)


# --------------------------------------------------------------------------
# enveloping-algebra interval data


def in_D(iv: Interval) -> bool:
    """Intervals of the little 1-cubes arity one space not starting at 0."""
    return ZERO < iv[0] < iv[1] <= ONE


def in_Dprime(iv: Interval) -> bool:
    """Intervals not ending at 1."""
    return ZERO <= iv[0] < iv[1] < ONE


def in_C(c: Config) -> bool:
    """Pairs [a,b], [c,d] with b < c."""
    return len(c) == 2 and ZERO <= c[0][0] < c[0][1] < c[1][0] < c[1][1] <= ONE


def _split(p: Fraction) -> Config:
    return ((ZERO, p), (p, ONE))


def d_product(d1: Interval, d2: Interval) -> tuple[Config, Interval]:
    """Product on D: the arity-two element multiplying (B_{d1}, B_{d2}) and the new D element."""
    (x1, y1), (x2, y2) = d1, d2
    s = x1 + (y1 - x1) * x2
    return _split(x1 / s), (s, x1 + (y1 - x1) * y2)


def dprime_product(d1: Interval, d2: Interval) -> tuple[Config, Interval]:
    """Product on D': the arity-two element multiplying (B_{d1}, B_{d2}) and the new D' element."""
    (x1, y1), (x2, y2) = d1, d2
    num = (y2 - x2) * (1 - y1)
    return _split(num / (num + (1 - y2))), (x2 + (y2 - x2) * x1, x2 + (y2 - x2) * y1)


def right_action(c: Config, d: Interval) -> tuple[Config, Config]:
    """C x D -> (arity two, C), multiplying (B_c, B_d)."""
    (a, b), (cc, dd) = c
    x, y = d
    gap = cc - b
    return _split(gap / (gap + x * (dd - cc))), ((a, b), (cc + (dd - cc) * x, cc + (dd - cc) * y))


def left_action(d: Interval, c: Config) -> tuple[Config, Config]:
    """D' x C -> (arity two, C), multiplying (B_d, B_c)."""
    (a, b), (cc, dd) = c
    x, y = d
    head = (b - a) * (1 - y)
    return _split(head / (head + cc - b)), ((a + (b - a) * x, a + (b - a) * y), (cc, dd))


def bimodule_closed_form(dl: Interval, c: Config, dr: Interval) -> tuple[Config, Config]:
    """The common value of both orders of D' . C . D: an arity-three element and a C element.

    The middle breakpoint is ((b-a)(1-y') + (c-b))/l with
    l = (b-a)(1-y') + c - b + (d-c)x.
    """
    (a, b), (cc, dd) = c
    xp, yp = dl
    x, y = dr
    head = (b - a) * (1 - yp)
    ell = head + cc - b + (dd - cc) * x
    p1, p2 = head / ell, (head + cc - b) / ell
    arity3 = ((ZERO, p1), (p1, p2), (p2, ONE))
    return arity3, ((a + (b - a) * xp, a + (b - a) * yp), (cc + (dd - cc) * x, cc + (dd - cc) * y))


@dataclass
class BimoduleVerdict:
    left_first: tuple[Config, Config]
    right_first: tuple[Config, Config]
    closed_form: tuple[Config, Config]

    @property
    def ok(self) -> bool:
        return self.left_first == self.right_first == self.closed_form


def interval_bimodule_check(dl: Interval, c: Config, dr: Interval) -> BimoduleVerdict:
    """Both orders of the left D' and right D actions on C, and the closed form."""
    if not in_Dprime(dl):
        raise OperadError("left factor must be an interval not ending at 1")
    if not in_C(c):
        raise OperadError("middle factor must be a pair [a,b],[c,d] with b < c")
    if not in_D(dr):
        raise OperadError("right factor must be an interval not starting at 0")
    m1, cd = right_action(c, dr)
    m2, out1 = left_action(dl, cd)
    n1, dc = left_action(dl, c)
    n2, out2 = right_action(dc, dr)
    return BimoduleVerdict((compose(m2, 2, m1), out1), (compose(n2, 1, n1), out2),
                           bimodule_closed_form(dl, c, dr))


def right_action_associative(c: Config, d: Interval, d2: Interval) -> bool:
    """(c.d).d2 = c.(d.d2), including the arity-three multiplication."""
    m1, cd = right_action(c, d)
    m2, lhs = right_action(cd, d2)
    n1, dd = d_product(d, d2)
    n2, rhs = right_action(c, dd)
    return (compose(m2, 1, m1), lhs) == (compose(n2, 2, n1), rhs)


def left_action_associative(e: Interval, d: Interval, c: Config) -> bool:
    """(e.d).c = e.(d.c) for the D' product."""
    m1, ed = dprime_product(e, d)
    m2, lhs = left_action(ed, c)
    n1, dc = left_action(d, c)
    n2, rhs = left_action(e, dc)
    return (compose(m2, 1, m1), lhs) == (compose(n2, 2, n1), rhs)


def d_product_associative(d1: Interval, d2: Interval, d3: Interval) -> bool:
    m1, d12 = d_product(d1, d2)
    m2, lhs = d_product(d12, d3)
    n1, d23 = d_product(d2, d3)
    n2, rhs = d_product(d1, d23)
    return (compose(m2, 1, m1), lhs) == (compose(n2, 2, n1), rhs)


def dprime_product_associative(d1: Interval, d2: Interval, d3: Interval) -> bool:
    m1, d12 = dprime_product(d1, d2)
    m2, lhs = dprime_product(d12, d3)
    n1, d23 = dprime_product(d2, d3)
    n2, rhs = dprime_product(d1, d23)
    return (compose(m2, 1, m1), lhs) == (compose(n2, 2, n1), rhs)


def unit_action(c: Config) -> bool:
    """Acting by the unit interval [0, 1] on either side leaves C unchanged."""
    u = (ZERO, ONE)
    mr, cr = right_action(c, u)
    ml, cl = left_action(u, c)
    return cr == c and cl == c and mr[0][1] == ONE and ml[0][1] == ZERO


# --------------------------------------------------------------------------
# random instances


@dataclass
class RandomIntervals:
    rng: random.Random
    denom: int = 24

    def point(self) -> Fraction:
        return Fraction(self.rng.randint(0, self.denom), self.denom)

    def points(self, k: int, strict: bool = False) -> list[Fraction]:
        """k sorted points in [0, 1]; distinct when strict."""
        if strict:
            return [Fraction(v, self.denom) for v in sorted(self.rng.sample(range(self.denom + 1), k))]
        return sorted(self.point() for _ in range(k))

    def interval(self) -> Interval:
        x, y = self.points(2, strict=True)
        return x, y

    def overlapping(self, n: int) -> Config:
        return tuple(self.interval() for _ in range(n))

    def cubes(self, n: int) -> Config:
        pts = self.points(2 * n, strict=True) if 2 * n <= self.denom + 1 else []
        return tuple((pts[2 * i], pts[2 * i + 1]) for i in range(n))

    def milnor(self, n: int) -> tuple[Fraction, ...]:
        return tuple(self.points(n))

    def D(self) -> Interval:
        x, y = self.points(2, strict=True)
        return (x, y) if x > 0 else (Fraction(1, self.denom * 2), y)

    def Dprime(self) -> Interval:
        x, y = self.points(2, strict=True)
        return (x, y) if y < 1 else (x, (x + 1) / 2)

    def C(self) -> Config:
        a, b, c, d = self.points(4, strict=True)
        return (a, b), (c, d)

    def lengths(self, n: int) -> list[Fraction]:
        return [Fraction(self.rng.randint(1, self.denom), self.rng.randint(1, 6)) for _ in range(n)]


@dataclass
class SuiteResult:
    name: str
    trials: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _run(name: str, trials: int, fn: Callable[[int], object]) -> SuiteResult:
    res = SuiteResult(name, trials)
    for k in range(trials):
        bad = fn(k)
        if bad:
            res.failures.append(bad)
    return res


def axiom_suite(rng: random.Random, trials: int = 1000, max_arity: int = 4) -> list[SuiteResult]:
    R = RandomIntervals(rng)

    def gen(variant: str, n: int) -> Config:
        return R.cubes(n) if variant == "cubes" else R.overlapping(n)

    out = []
    for variant in ("overlapping", "cubes"):
        def unit(_k, variant=variant):
            c = gen(variant, rng.randint(1, max_arity))
            i = rng.randint(1, len(c))
            return None if compose(IDENTITY, 1, c) == c and compose(c, i, IDENTITY) == c else c

        def nested(_k, variant=variant):
            a, b, c = (gen(variant, rng.randint(1, max_arity)) for _ in range(3))
            i, j = rng.randint(1, len(a)), rng.randint(1, len(b))
            lhs = compose(compose(a, i, b), i + j - 1, c)
            rhs = compose(a, i, compose(b, j, c))
            ok = lhs == rhs and (variant != "cubes" or is_cubes(lhs))
            return None if ok else (a, i, b, j, c)

        def parallel(_k, variant=variant):
            a = gen(variant, rng.randint(2, max_arity))
            b, c = gen(variant, rng.randint(1, max_arity)), gen(variant, rng.randint(1, max_arity))
            i, j = sorted(rng.sample(range(1, len(a) + 1), 2))
            lhs = compose(compose(a, i, b), j + len(b) - 1, c)
            rhs = compose(compose(a, j, c), i, b)
            return None if lhs == rhs else (a, i, b, j, c)

        out += [_run(f"{variant}: unit", trials, unit), _run(f"{variant}: nested associativity", trials, nested),
                _run(f"{variant}: parallel associativity", trials, parallel)]
    return out


def coaction_suite(rng: random.Random, trials: int = 1000, max_dim: int = 6, max_arity: int = 4
                   ) -> list[SuiteResult]:
    R = RandomIntervals(rng)

    def compat(_k):
        u = R.milnor(rng.randint(0, max_dim))
        a, b = R.overlapping(rng.randint(1, max_arity)), R.overlapping(rng.randint(1, max_arity))
        i = rng.randint(1, len(a))
        va = coaction(u, a)
        rhs = va[:i - 1] + coaction(va[i - 1], b) + va[i:]
        return None if coaction(u, compose(a, i, b)) == rhs else (u, a, i, b)

    def diagonal(_k):
        u = R.milnor(rng.randint(0, max_dim))
        m = rng.randint(0, max_arity)
        return None if coaction(u, IDENTITY * m) == [tuple(u)] * m else (u, m)

    def filtered(_k):
        n = rng.randint(0, max_dim)
        u = R.milnor(n)
        c = R.cubes(rng.randint(1, max_arity))
        vs = coaction(u, c)
        ok = sum(face_dimension(v) for v in vs) <= face_dimension(u) <= n
        ok = ok and all(all(a <= b for a, b in zip(v, v[1:])) for v in vs)
        return None if ok else (u, c)

    return [_run("coaction: compatible with composition", trials, compat),
            _run("coaction: commutative case is the diagonal", trials, diagonal),
            _run("coaction: little cubes preserve the filtration", trials, filtered)]


def moore_suite(rng: random.Random, trials: int = 1000, max_arity: int = 6) -> list[SuiteResult]:
    R = RandomIntervals(rng)

    def coherent(_k):
        n = rng.randint(1, max_arity)
        ls = R.lengths(n)
        cuts = sorted(rng.sample(range(1, n), rng.randint(0, n - 1))) if n > 1 else []
        bounds = [0, *cuts, n]
        blocks = [b - a for a, b in zip(bounds, bounds[1:])]
        ok = moore_coherent(ls, blocks) and is_partition(moore_mu(ls))
        return None if ok else (ls, blocks)

    def q_sub(_k):
        words = [tuple(rng.randint(0, 2) for _ in range(rng.randint(0, 5))) for _ in range(rng.randint(1, 4))]
        flat = flatten(words)
        ok = pseudocellular_q(flat) <= sum(pseudocellular_q(w) for w in words)
        ok = ok and all(pseudocellular_q(w) <= len(w) for w in words)
        return None if ok else words

    return [_run("moore: coherence and partition", trials, coherent),
            _run("pseudocellular q: subadditive under flattening", trials, q_sub)]


def bimodule_suite(rng: random.Random, trials: int = 1000) -> list[SuiteResult]:
    R = RandomIntervals(rng)

    def commute(_k):
        dl, c, dr = R.Dprime(), R.C(), R.D()
        return None if interval_bimodule_check(dl, c, dr).ok else (dl, c, dr)

    def assoc(_k):
        ok = (d_product_associative(R.D(), R.D(), R.D()) and dprime_product_associative(R.Dprime(), R.Dprime(), R.Dprime())
              and right_action_associative(R.C(), R.D(), R.D())
              and left_action_associative(R.Dprime(), R.Dprime(), R.C()) and unit_action(R.C()))
        return None if ok else "associativity"

    return [_run("bimodule: left and right actions commute", trials, commute),
            _run("bimodule: products and actions are associative and unital", trials, assoc)]


def operad_check(seed: int = 0, trials: int = 1000, axioms: bool = True, coaction_: bool = True,
                 moore: bool = True, bimodule: bool = True) -> list[SuiteResult]:
    rng = random.Random(seed)
    out = []
    if axioms:
        out += axiom_suite(rng, trials)
    if coaction_:
        out += coaction_suite(rng, trials)
    if moore:
        out += moore_suite(rng, trials)
    if bimodule:
        out += bimodule_suite(rng, trials)
    return out
