"""Tate cohomology of finite cyclic groups with cup products.

Two chain-level models are provided.  Both use a free Z[G]-resolution P_*
and its dual Q^* = Hom(P_*, Z) with the contragredient action.

* ``tate_GT`` splices  ... -> P_1 (x) X -> P_0 (x) X -> Q^0 (x) X -> Q^1 (x) X -> ...
  and takes G-fixed points.  P_n (x) X sits in degree n+1, Q^n (x) X in degree -n.
* ``tate_HMT`` takes fixed points of Tot(Hom(P_*, X) (x) P~_*) where P~ is the
  augmented resolution (P~_0 = Z, P~_b = P_{b-1}); Hom(P_a, X) (x) P~_b sits in
  degree b - a.

Degree i of either complex computes Ĥ^{-i}_G(X).  All modules that appear are
of the form V (x) X with V a permutation module whose orbits are free, so the
fixed points are X^{#orbits} and never need a kernel computation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Sequence

from .exact_coeff import Matrix, identity, matmul, matvec
from .lattice import Lattice, PresentedComplex, Subquotient, localize

Basis = Hashable


class TateError(ValueError):
    pass


@dataclass(frozen=True)
class CyclicGroup:
    n: int
    generator: str = "g"

    def __post_init__(self) -> None:
        if self.n < 2:
            raise TateError("cyclic group order must be >= 2")

    def mul(self, a: int, b: int) -> int:
        return (a + b) % self.n

    def inv(self, a: int) -> int:
        return (-a) % self.n

    def elements(self) -> range:
        return range(self.n)


@dataclass
class GModule:
    """Z^rank / span(rels) with the generator acting by ``action``."""

    group: CyclicGroup
    rank: int
    action: Matrix
    rels: list[list[int]] = field(default_factory=list)
    name: str = ""

    def __post_init__(self) -> None:
        n, r = self.group.n, self.rank
        if len(self.action) != r or any(len(row) != r for row in self.action):
            raise TateError("action matrix has the wrong shape")
        lat = Lattice.span(self.rels, r)
        for v in self.rels:
            if not lat.contains(matvec(self.action, v)):
                raise TateError("action does not preserve the relations")
        An = identity(r)
        for _ in range(n):
            An = matmul(self.action, An) if r else An
        for j in range(r):
            col = [An[i][j] - int(i == j) for i in range(r)]
            if not lat.contains(col):
                raise TateError(f"action does not have order dividing {n}")
        self._powers = [identity(r)]
        for _ in range(n - 1):
            self._powers.append(matmul(self.action, self._powers[-1]) if r else [])

    def rho(self, h: int) -> Matrix:
        return self._powers[h % self.group.n]

    def invariants(self) -> list[int]:
        s = Subquotient(Lattice.full(self.rank), Lattice.span(self.rels, self.rank))
        return s.orders

    @staticmethod
    def trivial(group: CyclicGroup, order: int = 0) -> "GModule":
        """Z (order 0) or Z/order with trivial action."""
        rels = [[order]] if order else []
        return GModule(group, 1, [[1]], rels, "Z" if not order else f"Z/{order}")

    @staticmethod
    def sign(group: CyclicGroup, order: int = 0) -> "GModule":
        if group.n % 2:
            raise TateError("sign action needs even order")
        rels = [[order]] if order else []
        return GModule(group, 1, [[-1]], rels, "Z-sign")

    @staticmethod
    def free(group: CyclicGroup, order: int = 0) -> "GModule":
        n = group.n
        act = [[int(i == (j + 1) % n) for j in range(n)] for i in range(n)]
        rels = [[order * int(i == j) for i in range(n)] for j in range(n)] if order else []
        return GModule(group, n, act, rels, "Z[G]")

    def tensor(self, other: "GModule") -> "GModule":
        r1, r2 = self.rank, other.rank
        act = [[self.action[i1][j1] * other.action[i2][j2] for j1 in range(r1) for j2 in range(r2)]
               for i1 in range(r1) for i2 in range(r2)]
        rels = []
        for v in self.rels:
            for j2 in range(r2):
                rels.append([v[i1] * int(i2 == j2) for i1 in range(r1) for i2 in range(r2)])
        for w in other.rels:
            for j1 in range(r1):
                rels.append([int(i1 == j1) * w[i2] for i1 in range(r1) for i2 in range(r2)])
        return GModule(self.group, r1 * r2, act, rels, f"{self.name}⊗{other.name}")


# --------------------------------------------------------------------------
# free resolutions as permutation modules


class Resolution:
    """A free Z[G]-resolution whose Z-basis in each degree is permuted by G.

    Subclasses give orbit representatives, the action on basis elements,
    the differential d(e) for orbit representatives and the augmentation.
    """

    group: CyclicGroup

    def orbit_reps(self, a: int) -> list[Basis]:
        raise NotImplementedError

    def act(self, h: int, e: Basis) -> Basis:
        raise NotImplementedError

    def locate(self, e: Basis) -> tuple[int, int]:
        """(index of orbit, h) with e = h · rep."""
        raise NotImplementedError

    def d_rep(self, a: int, e: Basis) -> dict[Basis, int]:
        raise NotImplementedError

    def d(self, a: int, e: Basis) -> dict[Basis, int]:
        o, h = self.locate(e)
        rep = self.orbit_reps(a)[o]
        return {self.act(h, k): c for k, c in self.d_rep(a, rep).items()}

    def basis(self, a: int) -> list[Basis]:
        return [self.act(h, r) for r in self.orbit_reps(a) for h in self.group.elements()]

    def rank(self, a: int) -> int:
        return len(self.orbit_reps(a))


class MinimalResolution(Resolution):
    """Rank one in each degree; d alternates g - 1 and the norm element."""

    def __init__(self, group: CyclicGroup):
        self.group = group

    def orbit_reps(self, a: int) -> list[Basis]:
        return [(a, 0)] if a >= 0 else []

    def act(self, h: int, e: Basis) -> Basis:
        return (e[0], (e[1] + h) % self.group.n)

    def locate(self, e: Basis) -> tuple[int, int]:
        return 0, e[1]

    def d_rep(self, a: int, e: Basis) -> dict[Basis, int]:
        if a == 0:
            return {}
        if a % 2:
            return {(a - 1, 1): 1, (a - 1, 0): -1}
        return {(a - 1, h): 1 for h in self.group.elements()}


@lru_cache(maxsize=None)
def _bar_cells(n: int, a: int) -> list[Basis]:
    """Cells (0, g_1..g_a) with consecutive entries distinct, in lexicographic order."""
    if a < 0:
        return []
    if a == 0:
        return [(0,)]
    return [t + (g,) for t in _bar_cells(n, a - 1) for g in range(n) if g != t[-1]]


class BarResolution(Resolution):
    """Normalized bar resolution: a-cells are tuples (g_0..g_a), consecutive entries distinct."""

    def __init__(self, group: CyclicGroup):
        self.group = group

    def orbit_reps(self, a: int) -> list[Basis]:
        return _bar_cells(self.group.n, a)

    @lru_cache(maxsize=None)
    def _index(self, a: int) -> dict:
        return {r: i for i, r in enumerate(self.orbit_reps(a))}

    def act(self, h: int, e: Basis) -> Basis:
        n = self.group.n
        return tuple((x + h) % n for x in e)

    def locate(self, e: Basis) -> tuple[int, int]:
        h = e[0]
        rep = self.act(-h, e)
        return self._index(len(e) - 1)[rep], h

    def d_rep(self, a: int, e: Basis) -> dict[Basis, int]:
        return face_sum(e) if a > 0 else {}

    def diagonal(self, e: Basis) -> list[tuple[Basis, Basis]]:
        """Alexander-Whitney: (g_0..g_n) -> sum_k (g_0..g_k) (x) (g_k..g_n)."""
        return [(e[:k + 1], e[k:]) for k in range(len(e))]


def face_sum(e: tuple) -> dict[tuple, int]:
    """sum_i (-1)^i (e with entry i removed), dropping degenerate faces."""
    out: dict[tuple, int] = {}
    for i in range(len(e)):
        f = e[:i] + e[i + 1:]
        if any(f[j] == f[j + 1] for j in range(len(f) - 1)):
            continue
        out[f] = out.get(f, 0) + (-1) ** i
    return {k: v for k, v in out.items() if v}


def resolution(group: CyclicGroup, kind: str = "minimal") -> Resolution:
    if kind == "minimal":
        return MinimalResolution(group)
    if kind == "bar":
        return BarResolution(group)
    raise TateError(f"unknown resolution {kind!r}")


# --------------------------------------------------------------------------
# fixed points of permutation modules tensored with X


def fixed_map(
    src_reps: Sequence[Basis],
    tgt_reps: Sequence[Basis],
    tgt_locate: Callable[[Basis], tuple[int, int]],
    image: Callable[[Basis], dict[Basis, int]],
    X: GModule,
) -> Matrix:
    """Matrix of the induced map (V (x) X)^G -> (V' (x) X)^G in orbit coordinates.

    ``image(rep)`` is the equivariant map V -> V' on an orbit representative.
    Block (o', o) is  sum over w in orbit o' of coeff(w, d e_o) * rho(h_w^{-1}).
    """
    r = X.rank
    rows = len(tgt_reps) * r
    cols = len(src_reps) * r
    M = [[0] * cols for _ in range(rows)]
    for o, rep in enumerate(src_reps):
        for w, c in image(rep).items():
            o2, h = tgt_locate(w)
            R = X.rho(-h)
            for i in range(r):
                row = M[o2 * r + i]
                Ri = R[i]
                for j in range(r):
                    if Ri[j]:
                        row[o * r + j] += c * Ri[j]
    return M


def expand_fixed(reps: Sequence[Basis], act, vec: Sequence[int], X: GModule) -> dict[Basis, list[int]]:
    """Orbit coordinates -> the full fixed element sum_h h e_o (x) rho(h) y_o."""
    r = X.rank
    out: dict[Basis, list[int]] = {}
    for o, rep in enumerate(reps):
        y = list(vec[o * r:(o + 1) * r])
        if not any(y):
            continue
        for h in X.group.elements():
            out[act(h, rep)] = matvec(X.rho(h), y)
    return out


# --------------------------------------------------------------------------
# the two complexes


@dataclass
class TateComplex:
    """A presented complex plus bookkeeping for building cocycles."""

    group: CyclicGroup
    X: GModule
    complex: PresentedComplex
    valid: tuple[int, int]
    blocks: dict[int, list[tuple]] = field(default_factory=dict)
    _homology: dict[int, Subquotient] = field(default_factory=dict)

    def homology(self, i: int) -> Subquotient:
        lo, hi = self.valid
        if not lo <= i <= hi:
            raise TateError(f"degree {i} is outside the valid range {self.valid} of this truncation")
        if i not in self._homology:
            self._homology[i] = self.complex.homology(i)
        return self._homology[i]

    def table(self, window: tuple[int, int], p: int | None = None) -> dict[int, list[int]]:
        return {i: localize(self.homology(i).orders, p) for i in range(window[0], window[1] + 1)}


def _fixed_rels(X: GModule, k: int) -> list[list[int]]:
    r = X.rank
    out = []
    for o in range(k):
        for v in X.rels:
            row = [0] * (k * r)
            row[o * r:(o + 1) * r] = v
            out.append(row)
    return out


def gt_complex(G: CyclicGroup, X: GModule, window: tuple[int, int], kind: str = "minimal") -> TateComplex:
    lo, hi = window
    P = resolution(G, kind)
    dims, diff, rels = {}, {}, {}
    r = X.rank
    top, bottom = hi + 1, lo - 1

    def reps(i):
        return P.orbit_reps(i - 1) if i >= 1 else P.orbit_reps(-i)

    for i in range(bottom, top + 1):
        k = len(reps(i))
        dims[i] = k * r
        rels[i] = _fixed_rels(X, k)
    for i in range(bottom + 1, top + 1):
        if i >= 2:
            a = i - 1
            diff[i] = fixed_map(P.orbit_reps(a), P.orbit_reps(a - 1), P.locate,
                                lambda e, a=a: P.d_rep(a, e), X)
        elif i == 1:
            # P_0 -> Z -> Q^0 : e -> sum of all dual basis vectors
            diff[i] = fixed_map(P.orbit_reps(0), P.orbit_reps(0), P.locate,
                                lambda e: {b: 1 for b in P.basis(0)}, X)
        else:
            a = -i  # Q^a -> Q^{a+1}, dual of d_{a+1}
            diff[i] = fixed_map(P.orbit_reps(a), P.orbit_reps(a + 1), P.locate,
                                lambda e, a=a: _codiff(P, a, e), X)
    cx = PresentedComplex(dims, diff, rels)
    return TateComplex(G, X, cx, (lo, hi))


def _codiff(P: Resolution, a: int, u: Basis) -> dict[Basis, int]:
    """u* o d_{a+1} written in the dual basis of P_{a+1}."""
    out = {}
    o, h = P.locate(u)
    # coefficient of u in d(v) for v in P_{a+1}; use equivariance over orbit reps
    for rep in P.orbit_reps(a + 1):
        for k, c in P.d_rep(a + 1, rep).items():
            o2, h2 = P.locate(k)
            if o2 == o:
                v = P.act((h - h2) % P.group.n, rep)
                out[v] = out.get(v, 0) + c
    return {k: v for k, v in out.items() if v}


class HMTModel:
    """Fixed points of Hom(P_a, X) (x) P~_b, truncated to a <= A, b <= B."""

    def __init__(self, G: CyclicGroup, X: GModule, A: int, B: int, kind: str = "minimal"):
        self.G, self.X, self.A, self.B = G, X, A, B
        self.P = resolution(G, kind)
        self.kind = kind

    # basis of P~_b: () for b = 0, else basis elements of P_{b-1}
    def pt_basis(self, b: int) -> list[Basis]:
        return [()] if b == 0 else self.P.basis(b - 1)

    def pt_act(self, h: int, w: Basis) -> Basis:
        return w if w == () else self.P.act(h, w)

    def pt_d(self, b: int, w: Basis) -> dict[Basis, int]:
        if b == 1:
            return {(): 1}
        if b <= 0:
            return {}
        return self.P.d(b - 1, w)

    # pair basis (u, w): u a basis element of P_a (standing for its dual u*), w in P~_b
    @lru_cache(maxsize=None)
    def reps(self, a: int, b: int) -> list[tuple]:
        return [(u, w) for u in self.P.orbit_reps(a) for w in self.pt_basis(b)]

    @lru_cache(maxsize=None)
    def _rep_index(self, a: int, b: int) -> dict:
        return {x: i for i, x in enumerate(self.reps(a, b))}

    def act(self, h: int, x: tuple) -> tuple:
        return (self.P.act(h, x[0]), self.pt_act(h, x[1]))

    def locate(self, a: int, b: int, x: tuple) -> tuple[int, int]:
        o, h = self.P.locate(x[0])
        rep = (self.P.orbit_reps(a)[o], self.pt_act(-h, x[1]))
        return self._rep_index(a, b)[rep], h

    def delta(self, a: int, u: Basis) -> dict[Basis, int]:
        """Koszul coboundary of u* (degree -a): -(-1)^a u* o d."""
        s = -((-1) ** a)
        return {v: s * c for v, c in _codiff(self.P, a, u).items()}

    def D(self, a: int, b: int, x: tuple) -> dict[tuple, tuple[int, int, int]]:
        """Differential of a basis pair; values keyed by (target pair) -> coefficient with bidegree."""
        u, w = x
        out = {}
        if a + 1 <= self.A:
            for v, c in self.delta(a, u).items():
                out[(a + 1, b, (v, w))] = c
        sign = (-1) ** a
        for w2, c in self.pt_d(b, w).items():
            key = (a, b - 1, (u, w2))
            out[key] = out.get(key, 0) + sign * c
        return out

    def bidegrees(self, i: int) -> list[tuple[int, int]]:
        return [(a, a + i) for a in range(0, self.A + 1) if 0 <= a + i <= self.B]

    def offsets(self, i: int) -> dict[tuple[int, int], int]:
        off, k = {}, 0
        for ab in self.bidegrees(i):
            off[ab] = k
            k += len(self.reps(*ab)) * self.X.rank
        return off

    def dim(self, i: int) -> int:
        return sum(len(self.reps(*ab)) for ab in self.bidegrees(i)) * self.X.rank

    def build(self, lo: int, hi: int) -> TateComplex:
        X, r = self.X, self.X.rank
        dims, diff, rels = {}, {}, {}
        for i in range(lo - 1, hi + 2):
            dims[i] = self.dim(i)
            rels[i] = _fixed_rels(X, dims[i] // r) if r else []
        for i in range(lo, hi + 2):
            off_s, off_t = self.offsets(i), self.offsets(i - 1)
            M = [[0] * dims[i] for _ in range(dims[i - 1])]
            for (a, b), os_ in off_s.items():
                for o, rep in enumerate(self.reps(a, b)):
                    for (a2, b2, y), c in self.D(a, b, rep).items():
                        o2, h = self.locate(a2, b2, y)
                        R = X.rho(-h)
                        base_t = off_t[(a2, b2)] + o2 * r
                        base_s = os_ + o * r
                        for ii in range(r):
                            for jj in range(r):
                                if R[ii][jj]:
                                    M[base_t + ii][base_s + jj] += c * R[ii][jj]
            diff[i] = M
        cx = PresentedComplex(dims, diff, rels)
        valid = (max(lo, self.B - self.A + 1), min(hi, self.B - 1))
        return TateComplex(self.G, X, cx, valid)

    # ---- elements as dictionaries {(a, b, (u, w)): X-vector}

    def expand(self, i: int, vec: Sequence[int]) -> dict[tuple, list[int]]:
        r = self.X.rank
        out = {}
        for (a, b), off in self.offsets(i).items():
            reps = self.reps(a, b)
            part = vec[off:off + len(reps) * r]
            for x, y in expand_fixed(reps, self.act, part, self.X).items():
                out[(a, b, x)] = y
        return out

    def compress(self, i: int, elem: dict[tuple, list[int]], r: int) -> list[int]:
        offs = self.offsets(i)
        k = sum(len(self.reps(*ab)) for ab in offs)
        vec = [0] * (k * r)
        for (a, b, x), y in elem.items():
            if (a, b) not in offs:
                continue
            o, h = self.locate(a, b, x)
            if h != 0:
                continue
            base = offs[(a, b)] + o * r
            for t in range(r):
                vec[base + t] += y[t]
        return vec


def choose_truncation(window: tuple[int, int], extra: int = 0) -> tuple[int, int]:
    lo, hi = window
    B = max(hi + 1, 1) + extra
    A = max(B - lo + 1, 0)
    return A, B


def tate_GT(G: CyclicGroup, X: GModule, window: tuple[int, int], kind: str = "minimal",
            p: int | None = None) -> dict[int, list[int]]:
    """Table i -> cyclic orders of Ĥ^{-i}_G(X) (0 marks a free summand)."""
    return gt_complex(G, X, window, kind).table(window, p)


def hmt_complex(G: CyclicGroup, X: GModule, window: tuple[int, int], kind: str = "minimal",
                extra: int = 0) -> tuple[HMTModel, TateComplex]:
    A, B = choose_truncation(window, extra)
    model = HMTModel(G, X, A, B, kind)
    return model, model.build(window[0], window[1])


def tate_HMT(G: CyclicGroup, X: GModule, window: tuple[int, int], kind: str = "minimal",
             p: int | None = None) -> dict[int, list[int]]:
    return hmt_complex(G, X, window, kind)[1].table(window, p)


# --------------------------------------------------------------------------
# cup products on the HMT model over the bar resolution


def _cup_duals(u: tuple, u2: tuple) -> tuple | None:
    """u* ∪ u2* for bar cells, as (sign, cell) or None."""
    if u[-1] != u2[0]:
        return None
    a, a2 = len(u) - 1, len(u2) - 1
    return (-1) ** (a * a2), u + u2[1:]


def _concat(w: tuple, w2: tuple) -> tuple | None:
    if w and w2 and w[-1] == w2[0]:
        return None
    return w + w2


def multiply_elements(e1: dict, e2: dict, r2: int) -> dict:
    """Product of two expanded HMT elements; X-vectors multiply by the Kronecker rule."""
    out: dict = {}
    for (a, b, (u, w)), y in e1.items():
        for (a2, b2, (u2, w2)), y2 in e2.items():
            cu = _cup_duals(u, u2)
            if cu is None:
                continue
            ww = _concat(w, w2)
            if ww is None:
                continue
            sign = cu[0] * (-1) ** (b * a2)
            key = (a + a2, b + b2, (cu[1], ww))
            vec = out.get(key)
            if vec is None:
                vec = out[key] = [0] * (len(y) * r2)
            for i1, c1 in enumerate(y):
                if c1:
                    for i2, c2 in enumerate(y2):
                        if c2:
                            vec[i1 * r2 + i2] += sign * c1 * c2
    return out


class CocycleError(TateError):
    def __init__(self, msg: str, coboundary):
        super().__init__(msg)
        self.coboundary = coboundary


@dataclass
class TateClass:
    """A cocycle of the HMT model in degree i (standing for Ĥ^{-i}), in orbit coordinates."""

    degree: int
    vector: list[int]
    module: GModule


class _LazyTate:
    """HMT differentials and homology built only for the degrees that are queried."""

    def __init__(self, model: HMTModel, lo: int, hi: int):
        self.model, self.valid = model, (lo, hi)
        self._d: dict[int, Matrix] = {}
        self._h: dict[int, Subquotient] = {}

    def d(self, i: int) -> Matrix:
        if i not in self._d:
            m, X, r = self.model, self.model.X, self.model.X.rank
            off_s, off_t = m.offsets(i), m.offsets(i - 1)
            M = [[0] * m.dim(i) for _ in range(m.dim(i - 1))]
            for (a, b), os_ in off_s.items():
                for o, rep in enumerate(m.reps(a, b)):
                    for (a2, b2, y), c in m.D(a, b, rep).items():
                        o2, h = m.locate(a2, b2, y)
                        R = X.rho(-h)
                        bt, bs = off_t[(a2, b2)] + o2 * r, os_ + o * r
                        for ii in range(r):
                            for jj in range(r):
                                if R[ii][jj]:
                                    M[bt + ii][bs + jj] += c * R[ii][jj]
            self._d[i] = M
        return self._d[i]

    def relations(self, i: int) -> Lattice:
        X = self.model.X
        n = self.model.dim(i)
        return Lattice.span(_fixed_rels(X, n // X.rank) if X.rank else [], n)

    def homology(self, i: int) -> Subquotient:
        lo, hi = self.valid
        if not lo <= i <= hi:
            raise TateError(f"degree {i} is outside the valid range {self.valid} of this truncation")
        if i not in self._h:
            m = self.model
            ks = (i - 1, i, i + 1)
            cx = PresentedComplex({k: m.dim(k) for k in ks},
                                  {i: self.d(i), i + 1: self.d(i + 1)},
                                  {k: _fixed_rels(m.X, m.dim(k) // m.X.rank) for k in ks})
            self._h[i] = cx.homology(i)
        return self._h[i]


class CupEngine:
    """Cup products Ĥ(X) x Ĥ(Y) -> Ĥ(X (x) Y) on the bar-resolution HMT model.

    The truncation T(A, B) must contain every cocycle that gets multiplied and
    must be valid (B - A < i <= B - 1) in each degree whose class is read off.
    """

    def __init__(self, G: CyclicGroup, A: int, B: int):
        self.G, self.A, self.B = G, A, B
        self.bar = BarResolution(G)
        self._models: dict[int, tuple] = {}
        self._tensors: dict[tuple[int, int], GModule] = {}

    def model(self, X: GModule) -> tuple[HMTModel, _LazyTate]:
        key = id(X)
        if key not in self._models:
            m = HMTModel(self.G, X, self.A, self.B, "bar")
            self._models[key] = (m, _LazyTate(m, self.B - self.A + 1, self.B - 1), X)
        return self._models[key][:2]

    def tensor(self, X: GModule, Y: GModule) -> GModule:
        key = (id(X), id(Y))
        if key not in self._tensors:
            self._tensors[key] = X.tensor(Y)
        return self._tensors[key]

    def homology(self, X: GModule, i: int) -> Subquotient:
        return self.model(X)[1].homology(i)

    def check_cocycle(self, c: TateClass) -> None:
        _, cx = self.model(c.module)
        dv = matvec(cx.d(c.degree), c.vector)
        if not cx.relations(c.degree - 1).contains(dv):
            raise CocycleError(f"input in degree {c.degree} is not a cocycle", dv)

    def coboundary_of(self, X: GModule, i: int, z: Sequence[int]) -> TateClass:
        """D z for a chain z in degree i + 1, as a (null-homologous) cocycle in degree i."""
        _, cx = self.model(X)
        return TateClass(i, matvec(cx.d(i + 1), z), X)

    def unit(self, X: GModule) -> TateClass:
        """epsilon (x) 1, with 1 the first generator of X."""
        m, _ = self.model(X)
        vec = [0] * m.dim(0)
        vec[m.offsets(0)[(0, 0)]] = 1
        return TateClass(0, vec, X)

    def add(self, c1: TateClass, c2: TateClass) -> TateClass:
        return TateClass(c1.degree, [x + y for x, y in zip(c1.vector, c2.vector)], c1.module)

    def product(self, c1: TateClass, c2: TateClass, target: GModule | None = None) -> TateClass:
        """Cup product of two cocycles; ``target`` may replace X (x) Y by an equal-rank module."""
        self.check_cocycle(c1)
        self.check_cocycle(c2)
        m1, _ = self.model(c1.module)
        m2, _ = self.model(c2.module)
        Z = target if target is not None else self.tensor(c1.module, c2.module)
        if Z.rank != c1.module.rank * c2.module.rank:
            raise TateError("target module has the wrong rank")
        mz, _ = self.model(Z)
        prod = multiply_elements(m1.expand(c1.degree, c1.vector), m2.expand(c2.degree, c2.vector),
                                 c2.module.rank)
        for a, b, _ in prod:
            if a <= self.A and b > self.B:
                raise TateError("product leaves the truncation; enlarge B")
        deg = c1.degree + c2.degree
        return TateClass(deg, mz.compress(deg, prod, Z.rank), Z)

    def class_of(self, c: TateClass) -> tuple[int, ...]:
        self.check_cocycle(c)
        return self.homology(c.module, c.degree).coords(c.vector)

    def generators(self, X: GModule, i: int) -> list[TateClass]:
        """Genuine cocycles generating Ĥ^{-i}(X), built from small complexes.

        For i <= 0 they are f (x) 1 with f a cocycle of Hom(P_*, X)^G; for
        i >= 1 they are epsilon (x) w with w a cycle of (X (x) P~_*)^G.
        """
        m, _ = self.model(X)
        P, r = self.bar, X.rank
        if i <= 0:
            a = -i
            ks = range(max(a - 1, 0), a + 2)
            dims = {-k: len(P.orbit_reps(k)) * r for k in ks}
            diff = {-k: fixed_map(P.orbit_reps(k), P.orbit_reps(k + 1), P.locate,
                                  lambda e, k=k: m.delta(k, e), X)
                    for k in range(max(a - 1, 0), a + 1)}
            rels = {d: _fixed_rels(X, n // r) for d, n in dims.items()}
            H = PresentedComplex(dims, diff, rels).homology(-a)
            out = []
            off = m.offsets(i)[(a, 0)]
            for rep in H.reps:
                vec = [0] * m.dim(i)
                vec[off:off + len(rep)] = rep
                out.append(TateClass(i, vec, X))
            return out

        def reps(b):
            return P.orbit_reps(b - 1)

        dims, diff, rels = {}, {}, {}
        for b in range(i - 1, i + 2):
            if b == 0:
                dims[b], rels[b] = r, [list(v) for v in X.rels]
            else:
                dims[b], rels[b] = len(reps(b)) * r, _fixed_rels(X, len(reps(b)))
        for b in range(i, i + 2):
            if b == 1:
                Nm = [[sum(X.rho(h)[s][t] for h in self.G.elements()) for t in range(r)] for s in range(r)]
                diff[b] = Nm
            else:
                diff[b] = fixed_map(reps(b), reps(b - 1), P.locate,
                                    lambda e, b=b: P.d_rep(b - 1, e), X)
        H = PresentedComplex(dims, diff, rels).homology(i)
        u0 = P.orbit_reps(0)[0]
        out = []
        for rep in H.reps:
            full = expand_fixed(reps(i), P.act, rep, X)
            elem = {(0, i, (u0, w)): y for w, y in full.items()}
            out.append(TateClass(i, m.compress(i, elem, r), X))
        return out


def cup_truncation(rep_degrees: Iterable[int], target_degrees: Iterable[int], slack: int = 0) -> tuple[int, int]:
    """Smallest (A, B) holding genuine representatives and valid on the targets.

    A representative in degree i lives at (a, b) = (-i, 0) or (0, i); a product
    of such lives at the sum.  ``slack`` adds room for perturbations.
    """
    reps = list(rep_degrees)
    targets = list(target_degrees)
    a_need = sum(-i for i in reps if i < 0) + slack
    b_need = sum(i for i in reps if i > 0) + slack
    B = max(b_need, max(targets) + 1, 1)
    A = max(a_need, B - min(targets) + 1)
    return A, B


def random_perturbation(engine: CupEngine, X: GModule, i: int, rng, b_max: int,
                        density: float = 0.3) -> TateClass:
    """A random coboundary in degree i, built from a chain supported on b <= b_max."""
    m, _ = engine.model(X)
    r = X.rank
    z = [0] * m.dim(i + 1)
    for (a, b), off in m.offsets(i + 1).items():
        if b > b_max:
            continue
        for k in range(len(m.reps(a, b)) * r):
            if rng.random() < density:
                z[off + k] = rng.randint(-3, 3)
    return engine.coboundary_of(X, i, z)


@dataclass
class CupRingReport:
    ok: bool
    nonzero_square: bool
    unital: bool
    products_nonzero: bool
    associative: bool
    triples: int
    perturbations: int
    independent: bool
    failures: list = field(default_factory=list)


def verify_cup_ring(window: tuple[int, int] = (-4, 4), perturbations: int = 100, seed: int = 0,
                    slack: int = 2) -> CupRingReport:
    """Check the ring Ĥ*(C_2; F_2) = F_2[u, 1/u] at cocycle level on a degree window.

    Degrees here are HMT degrees i (the class lives in Ĥ^{-i}).  Every product
    of generators must be a generator, the unit must act trivially, all triples
    must associate, and random coboundary perturbations of both factors must
    leave the class of a product unchanged.
    """
    import random

    lo, hi = window
    G = CyclicGroup(2)
    X = GModule.trivial(G, 2)
    span = max(-lo, hi)
    A, B = cup_truncation([-span] * 3, [3 * lo, 3 * hi], slack=0)
    B = max(B, 3 * span + 1)
    A = max(A, B - 3 * lo + 1)
    E = CupEngine(G, A, B)
    gen = {}
    for i in range(lo, hi + 1):
        gs = E.generators(X, i)
        if len(gs) != 1 or E.class_of(gs[0]) != (1,):
            raise TateError(f"unexpected generators in degree {i}")
        gen[i] = gs[0]
    fails = []
    u = gen[-1]
    nonzero_square = E.class_of(E.product(u, u, X)) == (1,)
    one = E.unit(X)
    unital = all(E.class_of(E.product(one, g, X)) == (1,) and E.class_of(E.product(g, one, X)) == (1,)
                 for g in gen.values())
    pair = {}
    for i, j in itertools.product(gen, repeat=2):
        pair[i, j] = E.product(gen[i], gen[j], X)
        if E.class_of(pair[i, j]) != (1,):
            fails.append(("product", i, j))
    products_nonzero = not any(f[0] == "product" for f in fails)
    triples = 0
    for i, j, k in itertools.product(gen, repeat=3):
        left = E.class_of(E.product(pair[i, j], gen[k], X))
        right = E.class_of(E.product(gen[i], pair[j, k], X))
        triples += 1
        if left != right:
            fails.append(("assoc", i, j, k))
    associative = not any(f[0] == "assoc" for f in fails)
    rng = random.Random(seed)
    keys = list(gen)
    for _ in range(perturbations):
        i, j = rng.choice(keys), rng.choice(keys)
        c1 = E.add(gen[i], random_perturbation(E, X, i, rng, max(i, 0) + slack))
        c2 = E.add(gen[j], random_perturbation(E, X, j, rng, max(j, 0) + slack))
        if E.class_of(c1) != (1,) or E.class_of(c2) != (1,) or \
                E.class_of(E.product(c1, c2, X)) != E.class_of(pair[i, j]):
            fails.append(("perturb", i, j))
    independent = not any(f[0] == "perturb" for f in fails)
    ok = nonzero_square and unital and products_nonzero and associative and independent
    return CupRingReport(ok, nonzero_square, unital, products_nonzero, associative, triples,
                         perturbations, independent, fails)
