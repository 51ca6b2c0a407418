"""sigma-modules over Lambda = Z[eta]/(2 eta) and the E^1-model of the circle Tate spectral sequence.

A sigma-module is a graded Lambda-module with a degree one operator sigma
satisfying sigma^2 = eta sigma.  Because 2 eta = 0, every sign that sigma
could pick up when passing eta vanishes, so sigma is simply Lambda-linear.

The E^1-model of X is the free Lambda-module on the symbols

    a'_n, b'_n                        (n >= 0, summand C_n)
    p'_n (x) u_m, p in {a,b}, u in {a,b}  (m > 0, n >= 0, summand CC_{m,n})

tensored with X, where |a_m| = 2m-1, |b_m| = 2m, |a'_n| = -2n-1, |b'_n| = -2n
and sigma acts by

    sigma a_m = b_m + (m-1) eta a_m,   sigma b_m = m eta b_m   (same for primes).

An element of degree q in the summand CC_{m,n} (or C_n, with m = 0) sits in
bidegree (i, j) = (2(m-n), q - 2(m-n)).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .exact_coeff import matvec
from .filtered_ss import canonical_form, is_isomorphism
from .graded_algebra import GradedModulePresentation, PresentationError, _component_data, lambda_eta
from .lattice import Lattice, Subquotient, preimage

Term = tuple[int, tuple[int, ...]]


class SigmaError(ValueError):
    pass


class TruncationOverflow(SigmaError):
    pass


# --------------------------------------------------------------------------
# sigma-modules


class SigmaModule:
    """A Lambda-module presentation plus sigma on generators.

    ``sigma[g]`` is sigma of generator g as {(h, (k,)): c}, meaning
    sum c eta^k h, homogeneous of degree deg(g) + 1.
    """

    def __init__(self, pres: GradedModulePresentation, sigma: Sequence[dict[Term, int]], name: str = ""):
        if pres.ring.name != "Lambda":
            raise SigmaError("sigma-modules live over Lambda = Z[eta]/(2 eta)")
        if len(sigma) != len(pres.gens):
            raise SigmaError("sigma must be given on every generator")
        self.pres = pres
        self.ring = pres.ring
        self.top = dict(self.ring.params)["top"]
        self.sigma = [{k: c for k, c in s.items() if c} for s in sigma]
        self.name = name
        self._groups: dict[int, tuple] = {}
        for g, s in enumerate(self.sigma):
            for (h, mono), _ in s.items():
                if self.ring.degree(mono)[0] + pres.gen_degree(h)[0] != pres.gen_degree(g)[0] + 1:
                    raise SigmaError(f"sigma of generator {g} is not homogeneous of degree +1")

    # ---- constructors

    @staticmethod
    def sphere(top: int = 4) -> "SigmaModule":
        """Lambda itself with sigma = 0 (the shadow of the sphere with trivial action)."""
        L = lambda_eta(top)
        return SigmaModule(GradedModulePresentation(L, [("1", (0,))]), [{}], "S")

    @staticmethod
    def build(gens: Sequence[tuple[str, int]], sigma: dict[str, dict[tuple[str, int], int]] | None = None,
              relations: Sequence[dict[tuple[str, int], int]] = (), top: int = 4, name: str = "") -> "SigmaModule":
        """Generators (symbol, degree); sigma and relations as {(symbol, eta power): coeff}."""
        L = lambda_eta(top)
        idx = {s: k for k, (s, _) in enumerate(gens)}

        def conv(d: dict[tuple[str, int], int]) -> dict[Term, int]:
            return {(idx[s], (k,)): c for (s, k), c in d.items()}

        pres = GradedModulePresentation(L, [(s, (d,)) for s, d in gens], [conv(r) for r in relations])
        sig = [conv((sigma or {}).get(s, {})) for s, _ in gens]
        return SigmaModule(pres, sig, name)

    # ---- structure

    @property
    def gens(self) -> list[tuple[str, tuple[int, ...]]]:
        return self.pres.gens

    def degree_range(self) -> range:
        degs = [d[0] for _, d in self.pres.gens]
        if not degs:
            return range(0)
        return range(min(degs), max(degs) + self.top + 1)

    def _monos(self, e: tuple[int, ...]) -> list[tuple[int, ...]]:
        k = e[0]
        return [(k,)] if 0 <= k <= self.top else []

    def group(self, q: int) -> tuple[list[Term], dict[Term, int], Lattice]:
        """Basis (gen, eta^k) of the free group in degree q, its index and the relation lattice."""
        if q not in self._groups:
            basis, rels = _component_data(self.pres, (q,), self._monos)
            self._groups[q] = (basis, {t: k for k, t in enumerate(basis)}, Lattice.span(rels, len(basis)))
        return self._groups[q]

    def dim(self, q: int) -> int:
        return len(self.group(q)[0])

    def quotient(self, q: int) -> Subquotient:
        n = self.dim(q)
        return Subquotient(Lattice.full(n), self.group(q)[2])

    def _apply(self, q: int, vec: Sequence[int], table: str) -> list[int]:
        basis, _, _ = self.group(q)
        _, tidx, _ = self.group(q + 1)
        out = [0] * len(tidx)
        for (g, (k,)), c in zip(basis, vec):
            if not c:
                continue
            if table == "eta":
                if k + 1 <= self.top:
                    out[tidx[(g, (k + 1,))]] += c
                continue
            for (h, (l,)), s in self.sigma[g].items():
                if k + l <= self.top:
                    out[tidx[(h, (k + l,))]] += c * s
        return out

    def sigma_vec(self, q: int, vec: Sequence[int]) -> list[int]:
        return self._apply(q, vec, "sigma")

    def eta_vec(self, q: int, vec: Sequence[int]) -> list[int]:
        return self._apply(q, vec, "eta")

    def matrix(self, q: int, table: str) -> list[list[int]]:
        n, m = self.dim(q), self.dim(q + 1)
        cols = [self._apply(q, [int(i == j) for i in range(n)], table) for j in range(n)]
        return [[cols[j][i] for j in range(n)] for i in range(m)]

    def validate(self) -> None:
        """sigma respects relations and sigma^2 = eta sigma, in every degree."""
        for q in self.degree_range():
            basis, _, rel = self.group(q)
            if not basis:
                continue
            rel1, rel2 = self.group(q + 1)[2], self.group(q + 2)[2]
            for r in rel.basis:
                if not rel1.contains(self.sigma_vec(q, r)):
                    raise SigmaError(f"sigma does not respect relations in degree {q}")
            for j in range(len(basis)):
                e = [int(i == j) for i in range(len(basis))]
                s = self.sigma_vec(q, e)
                ss = self.sigma_vec(q + 1, s)
                es = self.eta_vec(q + 1, s)
                if not rel2.contains([a - b for a, b in zip(ss, es)]):
                    raise SigmaError(f"sigma^2 != eta sigma on {basis[j]} in degree {q}")

    def kernel_sigma(self, q: int) -> Lattice:
        n = self.dim(q)
        if not n:
            return Lattice.zero(0)
        if not self.dim(q + 1):
            return Lattice.full(n)
        return preimage(self.matrix(q, "sigma"), self.group(q + 1)[2], n)

    def image_sigma_plus_eta(self, q: int) -> Lattice:
        n = self.dim(q)
        gens = list(self.group(q)[2].basis)
        if self.dim(q - 1):
            S, E = self.matrix(q - 1, "sigma"), self.matrix(q - 1, "eta")
            for j in range(self.dim(q - 1)):
                gens.append([S[i][j] + E[i][j] for i in range(n)])
        return Lattice.span(gens, n)

    def tensor(self, other: "SigmaModule", name: str = "") -> "SigmaModule":
        """X (x)_Lambda Y with sigma(v w) = sigma(v) w + (-1)^{|v|} v sigma(w)."""
        if self.top != other.top:
            raise SigmaError("Lambda truncations differ")
        A, B = self.pres, other.pres
        nb = len(B.gens)
        gens = [(f"{s}.{t}", (d[0] + e[0],)) for s, d in A.gens for t, e in B.gens]

        def pair(i: int, j: int) -> int:
            return i * nb + j

        rels = []
        for r in A.relations:
            for j in range(nb):
                rels.append({(pair(g, j), mono): c for (g, mono), c in r.items()})
        for r in B.relations:
            for i in range(len(A.gens)):
                rels.append({(pair(i, h), mono): c for (h, mono), c in r.items()})
        sig = []
        for i, (_, d) in enumerate(A.gens):
            for j in range(nb):
                s: dict[Term, int] = {}
                for (h, mono), c in self.sigma[i].items():
                    key = (pair(h, j), mono)
                    s[key] = s.get(key, 0) + c
                sign = (-1) ** (d[0] % 2)
                for (h, mono), c in other.sigma[j].items():
                    key = (pair(i, h), mono)
                    s[key] = s.get(key, 0) + sign * c
                sig.append(s)
        pres = GradedModulePresentation(A.ring, gens, rels)
        return SigmaModule(pres, sig, name or f"{self.name}⊗{other.name}")

    def to_json(self) -> dict:
        R = self.ring
        return {
            "top": self.top,
            "generators": [{"sym": s, "deg": d[0]} for s, d in self.gens],
            "sigma": {s: [{"gen": self.gens[h][0], "eta": m[0], "coeff": str(c)}
                          for (h, m), c in sorted(self.sigma[g].items())] for g, (s, _) in enumerate(self.gens)},
            "relations": [[{"gen": self.gens[h][0], "eta": m[0], "coeff": str(c)} for (h, m), c in sorted(r.items())]
                          for r in self.pres.relations],
            "name": self.name,
        }

    @staticmethod
    def from_json(d: dict) -> "SigmaModule":
        try:
            gens = [(g["sym"], int(g["deg"])) for g in d["generators"]]
            sig = {s: {(t["gen"], int(t.get("eta", 0))): int(t["coeff"]) for t in terms}
                   for s, terms in d.get("sigma", {}).items()}
            rels = [{(t["gen"], int(t.get("eta", 0))): int(t["coeff"]) for t in row} for row in d.get("relations", [])]
            syms = {s for s, _ in gens}
            for table in list(sig.values()) + rels:
                for (s, _) in table:
                    if s not in syms:
                        raise SigmaError(f"unknown generator {s!r}")
            return SigmaModule.build(gens, sig, rels, int(d.get("top", 4)), d.get("name", ""))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, SigmaError):
                raise
            raise SigmaError(f"malformed sigma-module: {e}") from None


def circle_module(top: int = 4) -> SigmaModule:
    """Lambda<1, s> with sigma(1) = s and sigma(s) = eta s (the shadow of S[T])."""
    return SigmaModule.build([("1", 0), ("s", 1)], {"1": {("s", 0): 1}, "s": {("s", 1): 1}}, top=top, name="S[T]")


def sample_modules(top: int = 4) -> list[SigmaModule]:
    """Five test modules: free, torsion, sigma nonzero with eta-torsion, and mixtures."""
    return [
        SigmaModule.sphere(top),
        SigmaModule.build([("u", 0), ("w", 2)], top=top, name="Λ⊕Λ[2]"),
        circle_module(top),
        SigmaModule.build([("u", 0), ("s", 1)], {"u": {("s", 0): 1}, "s": {("s", 1): 1}},
                          [{("u", 0): 4}, {("s", 0): 4}], top=top, name="S[T]/4"),
        SigmaModule.build([("u", -1), ("v", 0), ("w", 0)],
                          {"u": {("v", 0): 1, ("w", 0): 1}, "v": {("v", 1): 1}, "w": {("w", 1): 1}},
                          [{("w", 0): 2}], top=top, name="mixed"),
    ]


# --------------------------------------------------------------------------
# symbols of the E^1-model


@dataclass(frozen=True, order=True)
class Symbol:
    """p'_n (x) u_m; u is None (and m = 0) for the C_n summand."""

    p: str          # "a" or "b" (the primed generator)
    n: int
    u: str | None = None
    m: int = 0

    @property
    def degree(self) -> int:
        d = -2 * self.n - (1 if self.p == "a" else 0)
        if self.u is not None:
            d += 2 * self.m - (1 if self.u == "a" else 0)
        return d

    @property
    def summand(self) -> tuple[int, int]:
        return self.m, self.n

    @property
    def filtration(self) -> int:
        return 2 * (self.m - self.n)

    def label(self) -> str:
        s = f"{self.p}'{self.n}"
        return s if self.u is None else f"{s}⊗{self.u}{self.m}"


def _sigma_letter(letter: str, k: int) -> dict[tuple[str, int], int]:
    """sigma of a_k or b_k as {(letter, eta power): coeff}."""
    if letter == "a":
        return {("b", 0): 1, ("a", 1): (k - 1) % 2}
    return {("b", 1): k % 2}


def sigma_symbol(s: Symbol) -> dict[tuple[Symbol, int], int]:
    """sigma(s) = sigma(p') (x) u + (-1)^{|p'|} p' (x) sigma(u)."""
    out: dict[tuple[Symbol, int], int] = {}

    def put(key, c):
        if c:
            out[key] = out.get(key, 0) + c

    for (q, k), c in _sigma_letter(s.p, s.n).items():
        put((Symbol(q, s.n, s.u, s.m), k), c)
    if s.u is not None:
        sign = -1 if s.p == "a" else 1
        for (q, k), c in _sigma_letter(s.u, s.m).items():
            put((Symbol(s.p, s.n, q, s.m), k), sign * c)
    return {k: c for k, c in out.items() if c}


_TABLE = {("b", "b"): "b", ("b", "a"): "a", ("a", "b"): "a"}


def symbol_product(s: Symbol, t: Symbol) -> tuple[int, Symbol] | None:
    """(p (x) u)(r (x) w) = (-1)^{|u||r|} (p r) (x) (u w), with the letter table above."""
    p = _TABLE.get((s.p, t.p))
    if p is None:
        return None
    if s.u is None and t.u is None:
        return 1, Symbol(p, s.n + t.n)
    if s.u is None:
        return 1, Symbol(p, s.n + t.n, t.u, t.m)
    if t.u is None:
        sign = -1 if (s.u == "a" and t.p == "a") else 1
        return sign, Symbol(p, s.n + t.n, s.u, s.m)
    u = _TABLE.get((s.u, t.u))
    if u is None:
        return None
    sign = -1 if (s.u == "a" and t.p == "a") else 1
    return sign, Symbol(p, s.n + t.n, u, s.m + t.m)


# --------------------------------------------------------------------------
# elements of E^1(X)

Key = tuple[Symbol, int, int]   # (symbol, generator of X, eta power)


@dataclass
class E1Element:
    """sum c * eta^k * (symbol (x) generator) in E^1(X)."""

    terms: dict[Key, int]
    module: SigmaModule

    def __post_init__(self) -> None:
        self.terms = _normalize(self.terms, self.module.top)

    def __add__(self, other: "E1Element") -> "E1Element":
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return E1Element(t, self.module)

    def __neg__(self) -> "E1Element":
        return E1Element({k: -c for k, c in self.terms.items()}, self.module)

    def __sub__(self, other: "E1Element") -> "E1Element":
        return self + (-other)

    def scale(self, c: int, eta: int = 0) -> "E1Element":
        return E1Element({(s, g, k + eta): c * v for (s, g, k), v in self.terms.items()}, self.module)

    def degree(self) -> int | None:
        degs = {s.degree + self.module.gens[g][1][0] + k for (s, g, k) in self.terms}
        if len(degs) > 1:
            raise SigmaError("inhomogeneous element")
        return degs.pop() if degs else None

    def summands(self) -> set[tuple[int, int]]:
        return {s.summand for (s, _, _) in self.terms}

    def is_zero(self) -> bool:
        return not self.terms

    def label(self) -> str:
        parts = []
        for (s, g, k), c in sorted(self.terms.items()):
            eta = "" if k == 0 else ("η" if k == 1 else f"η^{k}")
            v = self.module.gens[g][0]
            parts.append(f"{c}{eta}{s.label()}⊗{v}")
        return " + ".join(parts) or "0"


def _normalize(terms: dict[Key, int], top: int) -> dict[Key, int]:
    out = {}
    for (s, g, k), c in terms.items():
        if k > top:
            continue
        if k >= 1:
            c %= 2
        if c:
            out[(s, g, k)] = c
    return out


def element(module: SigmaModule, *terms: tuple[int, Symbol, str, int]) -> E1Element:
    """Build sum c eta^k symbol (x) gen from (c, symbol, generator symbol, k) tuples."""
    idx = {s: i for i, (s, _) in enumerate(module.gens)}
    t: dict[Key, int] = {}
    for c, s, g, k in terms:
        key = (s, idx[g], k)
        t[key] = t.get(key, 0) + c
    return E1Element(t, module)


def e1_sigma(e: E1Element) -> E1Element:
    """sigma(s (x) v) = sigma(s) (x) v + (-1)^{|s|} s (x) sigma(v)."""
    X = e.module
    out: dict[Key, int] = {}
    for (s, g, k), c in e.terms.items():
        for (s2, k2), c2 in sigma_symbol(s).items():
            key = (s2, g, k + k2)
            out[key] = out.get(key, 0) + c * c2
        sign = (-1) ** (s.degree % 2)
        for (h, (l,)), c2 in X.sigma[g].items():
            key = (s, h, k + l)
            out[key] = out.get(key, 0) + sign * c * c2
    return E1Element(out, X)


def e1_multiply(u: E1Element, w: E1Element, target: SigmaModule | None = None,
                bounds: tuple[int, int] | None = None) -> E1Element:
    """Product E^1(X) x E^1(Y) -> E^1(X (x) Y) from the symbol table with Koszul signs.

    When X is the sphere the product is read in E^1(Y) (and symmetrically),
    so E^1(S) acts on every E^1(X).  ``bounds`` = (m_max, n_max) flags
    products leaving the truncation.
    """
    X, Y = u.module, w.module
    if target is None:
        if X.name == "S" and len(X.gens) == 1:
            target = Y
        elif Y.name == "S" and len(Y.gens) == 1:
            target = X
        else:
            target = X.tensor(Y)
    ny = len(Y.gens)
    out: dict[Key, int] = {}
    for (s, g, k), c in u.terms.items():
        vdeg = X.gens[g][1][0]
        for (t, h, l), d in w.terms.items():
            pr = symbol_product(s, t)
            if pr is None:
                continue
            sign, st = pr
            if bounds is not None and (st.m > bounds[0] or st.n > bounds[1]):
                raise TruncationOverflow(f"product {st.label()} leaves the truncation {bounds}")
            sign *= (-1) ** ((vdeg * t.degree) % 2)
            if target is Y:
                gg = h
            elif target is X:
                gg = g
            else:
                gg = g * ny + h
            key = (st, gg, k + l)
            out[key] = out.get(key, 0) + sign * c * d
    return E1Element(out, target)


def unit(module: SigmaModule | None = None) -> E1Element:
    """b'_0 (x) 1 in E^1(S)."""
    S = module or SigmaModule.sphere()
    return E1Element({(Symbol("b", 0), 0, 0): 1}, S)


# --------------------------------------------------------------------------
# the E^1-model, summand by summand


class E1Model:
    """E^1(X) truncated to summands with m <= m_max and n <= n_max."""

    def __init__(self, X: SigmaModule, m_max: int, n_max: int):
        self.X, self.m_max, self.n_max = X, m_max, n_max
        self._summands: dict[tuple[int, int], SigmaModule] = {}
        self._symbols: dict[tuple[int, int], list[Symbol]] = {}

    def symbols(self, m: int, n: int) -> list[Symbol]:
        if (m, n) not in self._symbols:
            if m == 0:
                syms = [Symbol("a", n), Symbol("b", n)]
            else:
                syms = [Symbol(p, n, u, m) for p in "ab" for u in "ab"]
            self._symbols[(m, n)] = syms
        return self._symbols[(m, n)]

    def summands(self) -> list[tuple[int, int]]:
        return [(m, n) for m in range(self.m_max + 1) for n in range(self.n_max + 1)]

    def summands_at(self, i: int) -> list[tuple[int, int]]:
        if i % 2:
            return []
        return [(m, n) for (m, n) in self.summands() if 2 * (m - n) == i]

    def summand(self, m: int, n: int) -> SigmaModule:
        """The summand as a sigma-module; generator index = symbol index * |gens X| + gen index."""
        if (m, n) not in self._summands:
            X = self.X
            syms = self.symbols(m, n)
            nx = len(X.gens)
            sidx = {s: k for k, s in enumerate(syms)}
            gens = [(f"{s.label()}⊗{g}", (s.degree + d[0],)) for s in syms for g, d in X.gens]
            rels = []
            for s in syms:
                for r in X.pres.relations:
                    rels.append({(sidx[s] * nx + h, mono): c for (h, mono), c in r.items()})
            sig = []
            for s in syms:
                for g in range(nx):
                    e = e1_sigma(E1Element({(s, g, 0): 1}, X))
                    sig.append({(sidx[t] * nx + h, (k,)): c for (t, h, k), c in e.terms.items()})
            pres = GradedModulePresentation(X.ring, gens, rels)
            self._summands[(m, n)] = SigmaModule(pres, sig, f"E1[{m},{n}]")
        return self._summands[(m, n)]

    def vector(self, e: E1Element, q: int) -> tuple[tuple[int, int], list[int]]:
        """Coordinates of a homogeneous single-summand element in its summand group."""
        sums = e.summands()
        if len(sums) > 1:
            raise SigmaError("element spans several summands")
        (m, n) = sums.pop() if sums else (0, 0)
        M = self.summand(m, n)
        syms = self.symbols(m, n)
        sidx = {s: k for k, s in enumerate(syms)}
        nx = len(self.X.gens)
        _, idx, _ = M.group(q)
        v = [0] * len(idx)
        for (s, g, k), c in e.terms.items():
            v[idx[(sidx[s] * nx + g, (k,))]] += c
        return (m, n), v

    def bidegree_groups(self, i: int, j: int) -> list[tuple[tuple[int, int], SigmaModule, int]]:
        q = i + j
        return [((m, n), self.summand(m, n), q) for (m, n) in self.summands_at(i)]


# --------------------------------------------------------------------------
# kernels


@dataclass
class KernelReport:
    bidegree: tuple[int, int]
    kernel_orders: list[int]
    basis: list[list[int]]
    equals_image: bool


def sigma_kernel(M: SigmaModule | E1Model, window: Iterable[int] | Iterable[tuple[int, int]]
                 ) -> dict:
    """ker sigma per degree (sigma-module) or per bidegree (E^1-model), checked against im(sigma + eta)."""
    out = {}
    if isinstance(M, SigmaModule):
        for q in window:
            K = M.kernel_sigma(q)
            rel = M.group(q)[2]
            sq = Subquotient(K, rel) if M.dim(q) else None
            eq = K == M.image_sigma_plus_eta(q) if M.dim(q) else True
            out[q] = KernelReport((q, 0), sq.orders if sq else [], sq.reps if sq else [], eq)
        return out
    for (i, j) in window:
        if abs(i) > 2 * max(M.m_max, M.n_max):
            raise SigmaError(f"bidegree {(i, j)} exceeds the truncation")
        orders, basis, eq = [], [], True
        for (mn, S, q) in M.bidegree_groups(i, j):
            if not S.dim(q):
                continue
            K = S.kernel_sigma(q)
            sq = Subquotient(K, S.group(q)[2])
            orders += sq.orders
            basis += sq.reps
            eq = eq and K == S.image_sigma_plus_eta(q)
        out[(i, j)] = KernelReport((i, j), orders, basis, eq)
    return out


# --------------------------------------------------------------------------
# HM monomials and the theorem on E^1(S)


@dataclass(frozen=True)
class HMMonomial:
    """x^m y^e z^n with e in {0, 1}."""

    m: int
    e: int
    n: int

    @property
    def bidegree(self) -> tuple[int, int]:
        return 2 * self.m + 2 * self.e - 2 * self.n, -self.e

    @property
    def degree(self) -> int:
        return sum(self.bidegree)

    @property
    def summand(self) -> tuple[int, int]:
        return self.m + self.e, self.n

    def label(self) -> str:
        parts = []
        for s, k in (("x", self.m), ("y", self.e), ("z", self.n)):
            if k:
                parts.append(s if k == 1 else f"{s}^{k}")
        return "".join(parts) or "1"


def x_elem(S: SigmaModule | None = None) -> E1Element:
    S = S or SigmaModule.sphere()
    return element(S, (1, Symbol("b", 0, "b", 1), "1", 0), (1, Symbol("b", 0, "a", 1), "1", 1))


def y_elem(S: SigmaModule | None = None) -> E1Element:
    S = S or SigmaModule.sphere()
    return element(S, (1, Symbol("a", 0, "b", 1), "1", 0), (-1, Symbol("b", 0, "a", 1), "1", 0))


def z_elem(S: SigmaModule | None = None) -> E1Element:
    S = S or SigmaModule.sphere()
    return element(S, (1, Symbol("b", 1), "1", 0), (1, Symbol("a", 1), "1", 1))


def monomial_element(mu: HMMonomial, S: SigmaModule | None = None, bounds: tuple[int, int] | None = None
                     ) -> E1Element:
    """x^m y^e z^n computed by repeated e1_multiply."""
    S = S or SigmaModule.sphere()
    out = unit(S)
    for _ in range(mu.m):
        out = e1_multiply(out, x_elem(S), bounds=bounds)
    for _ in range(mu.e):
        out = e1_multiply(out, y_elem(S), bounds=bounds)
    for _ in range(mu.n):
        out = e1_multiply(out, z_elem(S), bounds=bounds)
    return out


def monomial_closed_form(mu: HMMonomial, S: SigmaModule | None = None) -> E1Element:
    """The closed formulas for x^m z^n and x^m y z^n."""
    S = S or SigmaModule.sphere()
    m, n = mu.m, mu.n
    if mu.e == 0:
        if m == 0:
            return element(S, (1, Symbol("b", n), "1", 0), (n, Symbol("a", n), "1", 1))
        return element(S, (1, Symbol("b", n, "b", m), "1", 0), (n, Symbol("a", n, "b", m), "1", 1),
                       (m, Symbol("b", n, "a", m), "1", 1), (m * n, Symbol("a", n, "a", m), "1", 2))
    return element(S, (1, Symbol("a", n, "b", m + 1), "1", 0), (-1, Symbol("b", n, "a", m + 1), "1", 0),
                   (n + m, Symbol("a", n, "a", m + 1), "1", 1))


def monomials_in_summand(m: int, n: int) -> list[HMMonomial]:
    if m == 0:
        return [HMMonomial(0, 0, n)]
    return [HMMonomial(m, 0, n), HMMonomial(m - 1, 1, n)]


def _lambda_orders(k: int, top: int) -> list[int]:
    if k == 0:
        return [0]
    if 1 <= k <= top:
        return [2]
    return []


@dataclass
class CCSVerdict:
    bidegree: tuple[int, int]
    predicted: tuple
    kernel: tuple
    in_kernel: bool
    spans: bool
    equals_image: bool
    witness: list[tuple[str, int, str]]   # (monomial, eta power, element)

    @property
    def ok(self) -> bool:
        return self.predicted == self.kernel and self.in_kernel and self.spans and self.equals_image


def verify_CCS(i_range: Iterable[int], j_range: Iterable[int], n_max: int = 3, top: int = 4
               ) -> dict[tuple[int, int], CCSVerdict]:
    """Check that ker sigma on E^1(S) is the free Lambda-module on x^m z^n, x^m y z^n.

    Summands are truncated at n <= n_max (and m = n + i/2).  For every
    bidegree the monomial images (computed with e1_multiply) must lie in
    ker sigma and span it, and ker sigma must have the iso type of
    sum Lambda_{j - j_mu} over monomials mu of filtration i.
    """
    S = SigmaModule.sphere(top)
    i_list, j_list = list(i_range), list(j_range)
    m_max = n_max + max(0, max(i_list) // 2)
    E = E1Model(S, m_max, n_max)
    out = {}
    cache: dict[HMMonomial, E1Element] = {}
    for i in i_list:
        for j in j_list:
            q = i + j
            pred, korders = [], []
            in_ker = spans = eq = True
            witness = []
            for (mn, M, _) in E.bidegree_groups(i, j):
                mus = monomials_in_summand(*mn)
                vecs = []
                for mu in mus:
                    k = q - mu.degree
                    pred += _lambda_orders(k, top)
                    if not 0 <= k <= top:
                        continue
                    if mu not in cache:
                        cache[mu] = monomial_element(mu, S)
                    e = cache[mu].scale(1, k)
                    if e.is_zero():
                        continue
                    _, v = E.vector(e, q)
                    vecs.append(v)
                    witness.append((mu.label(), k, e.label()))
                if not M.dim(q):
                    continue
                K = M.kernel_sigma(q)
                rel = M.group(q)[2]
                korders += Subquotient(K, rel).orders
                in_ker = in_ker and all(K.contains(v) for v in vecs)
                spans = spans and Lattice.span(vecs + rel.basis, M.dim(q)) == K
                eq = eq and K == M.image_sigma_plus_eta(q)
            out[(i, j)] = CCSVerdict((i, j), canonical_form(pred), canonical_form(korders), in_ker, spans, eq,
                                     witness)
    return out


# --------------------------------------------------------------------------
# E^1(X) = HM (x) pi_* X


def comparison_map(mu: HMMonomial, X: SigmaModule, g: int, eta: int = 0, printed_sign: bool = False
                   ) -> E1Element:
    """Image of mu (x) eta^k v_g under HM (x) pi_*X -> E^1(X), by the closed formulas.

    z^n (x) v      -> (b'_n + n eta a'_n) (x) v - a'_n (x) sigma v
    x^m z^n (x) v  -> x^m z^n (x) v - (a'_n (x) b_m + m eta a'_n (x) a_m) (x) sigma v
    x^m y z^n (x) v -> x^m y z^n (x) v - a'_n (x) a_{m+1} (x) sigma v

    ``printed_sign`` flips the sign of the last sigma v term, giving the
    variant that fails HM-linearity (kept for the tests that show it).
    """
    m, n = mu.m, mu.n
    sv = X.sigma[g]
    terms: dict[Key, int] = {}

    def put(s: Symbol, h: int, k: int, c: int) -> None:
        key = (s, h, k + eta)
        terms[key] = terms.get(key, 0) + c

    base = monomial_closed_form(mu)
    for (s, _, k), c in base.terms.items():
        put(s, g, k, c)
    for (h, (l,)), c in sv.items():
        if mu.e == 0 and m == 0:
            put(Symbol("a", n), h, l, -c)
        elif mu.e == 0:
            put(Symbol("a", n, "b", m), h, l, -c)
            put(Symbol("a", n, "a", m), h, l + 1, -m * c)
        else:
            put(Symbol("a", n, "a", m + 1), h, l, c if printed_sign else -c)
    return E1Element(terms, X)


def comparison_by_action(mu: HMMonomial, X: SigmaModule, g: int, eta: int = 0) -> E1Element:
    """mu . (b'_0 (x) v - a'_0 (x) sigma v), computed with e1_multiply."""
    S = SigmaModule.sphere(X.top)
    v = E1Element({(Symbol("b", 0), g, eta): 1}, X)
    sv = E1Element({(Symbol("a", 0), h, l + eta): -c for (h, (l,)), c in X.sigma[g].items()}, X)
    return e1_multiply(monomial_element(mu, S), v + sv)


@dataclass
class IsoVerdict:
    summand: tuple[int, int]
    degree: int
    bidegree: tuple[int, int]
    domain: tuple
    kernel: tuple
    in_kernel: bool
    bijective: bool

    @property
    def ok(self) -> bool:
        return self.in_kernel and self.bijective


def e1_of_module(X: SigmaModule, i_max: int = 4, n_max: int = 3, printed_sign: bool = False
                 ) -> tuple[E1Model, list[IsoVerdict]]:
    """Build E^1(X) and check that HM (x) pi_*X -> ker sigma is bijective per bidegree."""
    m_max = n_max + i_max // 2
    E = E1Model(X, m_max, n_max)
    verdicts = []
    qrange = range(min(X.degree_range(), default=0) - 2 * n_max - 2,
                   max(X.degree_range(), default=0) + 2 * m_max + 2)
    for (m, n) in E.summands():
        i = 2 * (m - n)
        if abs(i) > i_max:
            continue
        M = E.summand(m, n)
        mus = monomials_in_summand(m, n)
        for q in qrange:
            if not M.dim(q):
                continue
            # domain: sum over monomials of X in degree q - |mu|, as a presented group
            dom_gens, dom_rel_blocks = [], []
            for mu in mus:
                qx = q - mu.degree
                if not X.dim(qx):
                    continue
                Q = X.quotient(qx)
                basis, _, _ = X.group(qx)
                for rep, order in zip(Q.reps, Q.orders):
                    img = E1Element({}, X)
                    for (gidx, (k,)), c in zip(basis, rep):
                        if c:
                            img = img + comparison_map(mu, X, gidx, k, printed_sign).scale(c)
                    dom_gens.append(img)
                    dom_rel_blocks.append(order)
            K = M.kernel_sigma(q)
            rel = M.group(q)[2]
            cod = Subquotient(K, rel)
            vecs = [E.vector(e, q)[1] if not e.is_zero() else [0] * M.dim(q) for e in dom_gens]
            in_ker = all(K.contains(v) for v in vecs)
            bij = False
            if in_ker:
                cols = [list(cod.coords(v)) for v in vecs]
                mat = [[c[r] for c in cols] for r in range(len(cod.orders))]
                bij = is_isomorphism(mat, dom_rel_blocks, cod.orders)
            verdicts.append(IsoVerdict((m, n), q, (i, q - i), canonical_form(dom_rel_blocks),
                                       canonical_form(cod.orders), in_ker, bij))
    return E, verdicts


def random_element(rng: random.Random, X: SigmaModule, m_max: int, n_max: int, q: int | None = None
                   ) -> E1Element:
    """A random homogeneous element of E^1(X) supported on the truncation."""
    E = E1Model(X, m_max, n_max)
    terms: dict[Key, int] = {}
    choices = []
    for (m, n) in E.summands():
        for s in E.symbols(m, n):
            for g, (_, d) in enumerate(X.gens):
                for k in range(X.top + 1):
                    choices.append((s, g, k, s.degree + d[0] + k))
    if q is None:
        q = rng.choice(choices)[3]
    pool = [c for c in choices if c[3] == q]
    for s, g, k, _ in rng.sample(pool, min(len(pool), rng.randint(1, 4))):
        terms[(s, g, k)] = rng.randint(-3, 3)
    return E1Element(terms, X)


# --------------------------------------------------------------------------
# linearity and monoidality of the comparison map


def is_zero_mod_relations(e: E1Element) -> bool:
    """Is e zero once the relations of X are imposed, symbol by symbol?"""
    X = e.module
    groups: dict[tuple[Symbol, int], dict[tuple[int, int], int]] = {}
    for (s, g, k), c in e.terms.items():
        qx = X.gens[g][1][0] + k
        groups.setdefault((s, qx), {})[(g, k)] = c
    for (s, qx), terms in groups.items():
        _, idx, rel = X.group(qx)
        v = [0] * len(idx)
        for (g, k), c in terms.items():
            v[idx[(g, (k,))]] += c
        if not rel.contains(v):
            return False
    return True


def hm_multiply(mu: HMMonomial, nu: HMMonomial) -> HMMonomial | None:
    """Product of monomials; y^2 = 0 and every reordering sign is +1 (only y is odd)."""
    if mu.e + nu.e > 1:
        return None
    return HMMonomial(mu.m + nu.m, mu.e + nu.e, mu.n + nu.n)


def _random_monomial(rng: random.Random, size: int) -> HMMonomial:
    return HMMonomial(rng.randint(0, size), rng.randint(0, 1), rng.randint(0, size))


def _random_generator(rng: random.Random, X: SigmaModule) -> tuple[int, int]:
    return rng.randrange(len(X.gens)), rng.randint(0, 1)


def check_hm_linearity(X: SigmaModule, rng: random.Random, trials: int = 200, size: int = 2,
                       printed_sign: bool = False) -> list[tuple[str, str, str]]:
    """f(nu . (mu (x) v)) = nu . f(mu (x) v); returns the failures."""
    S = SigmaModule.sphere(X.top)
    bad = []
    for _ in range(trials):
        mu, nu = _random_monomial(rng, size), _random_monomial(rng, size)
        g, k = _random_generator(rng, X)
        lhs = e1_multiply(monomial_element(nu, S), comparison_map(mu, X, g, k, printed_sign))
        prod = hm_multiply(nu, mu)
        rhs = comparison_map(prod, X, g, k, printed_sign) if prod else E1Element({}, X)
        if not is_zero_mod_relations(lhs - rhs):
            bad.append((nu.label(), mu.label(), X.gens[g][0]))
    return bad


def check_monoidal(X: SigmaModule, Y: SigmaModule, rng: random.Random, trials: int = 200, size: int = 2
                   ) -> list[tuple[str, str]]:
    """f((mu (x) v)(nu (x) w)) = f(mu (x) v) f(nu (x) w) in E^1(X (x) Y); returns the failures."""
    XY = X.tensor(Y)
    ny = len(Y.gens)
    bad = []
    for _ in range(trials):
        mu, nu = _random_monomial(rng, size), _random_monomial(rng, size)
        (g, k), (h, l) = _random_generator(rng, X), _random_generator(rng, Y)
        lhs = e1_multiply(comparison_map(mu, X, g, k), comparison_map(nu, Y, h, l), target=XY)
        prod = hm_multiply(mu, nu)
        if prod is None:
            rhs = E1Element({}, XY)
        else:
            sign = (-1) ** ((X.gens[g][1][0] + k) * nu.degree % 2)
            rhs = comparison_map(prod, XY, g * ny + h, k + l).scale(sign)
        if not is_zero_mod_relations(lhs - rhs):
            bad.append((f"{mu.label()}⊗{X.gens[g][0]}", f"{nu.label()}⊗{Y.gens[h][0]}"))
    return bad


def bidegree(m: int, n: int, q: int) -> tuple[int, int]:
    """(i, j) of a degree q element in the summand CC_{m,n} (m = 0 for C_n)."""
    i = 2 * (m - n)
    return i, q - i
