"""Graded monomial rings, finitely presented graded modules, resolutions and Tor.

Rings are graded-commutative monomial algebras: generators with a degree
vector, optionally Laurent (invertible), optionally nilpotent (x^e = 0) or
carrying additive torsion (2 eta = 0).  This covers every ring used here:
k[t], k[t]/t^e, W[v^±], k[v^±], Q[v^±], k[vbar^±, t, b]/b^2, Z[x,y,z]/y^2 and
Z[eta]/(2 eta).

Tor is computed by two unrelated engines:

* graded PIDs R[v^±] (R = Z_(p), F_p or Q, v of even degree): a graded module
  is determined by its components in one period, so Tor reduces to Tor over
  R of those components;
* connected algebras over F_p (every generator has positive weight): minimal
  free resolutions built degree by degree, checked against the normalized bar
  complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

from .exact_coeff import (QQ, ZZ, CoeffRing, Fp, ModSubspace, Wn, nullspace_mod_p, rank_mod_p,
                          smith_normal_form)
from .lattice import Lattice, PresentedComplex, kernel_basis, localize

Mono = tuple[int, ...]
Deg = tuple[int, ...]


class PresentationError(ValueError):
    pass


class TruncationError(PresentationError):
    pass


# --------------------------------------------------------------------------
# rings


@dataclass(frozen=True)
class RingGen:
    sym: str
    deg: Deg
    laurent: bool = False
    nil: int | None = None       # x^nil = 0
    torsion: int | None = None   # every monomial containing x has this additive order


@dataclass(frozen=True)
class GradedRing:
    """Graded-commutative monomial ring over a coefficient ring.

    ``parity_mask`` selects the degree components whose sum decides the
    Koszul sign; ``weight`` is an integer functional on degrees that is
    positive on every generator of a connected ring.
    """

    name: str
    coeff: CoeffRing
    gens: tuple[RingGen, ...]
    parity_mask: tuple[int, ...] | None = None
    weight: tuple[int, ...] | None = None
    params: tuple[tuple[str, int], ...] = ()

    @property
    def ndeg(self) -> int:
        return len(self.gens[0].deg) if self.gens else 1

    def zero_deg(self) -> Deg:
        return (0,) * self.ndeg

    def gen_index(self, sym: str) -> int:
        for i, g in enumerate(self.gens):
            if g.sym == sym:
                return i
        raise PresentationError(f"ring {self.name} has no generator {sym!r}")

    def one(self) -> Mono:
        return (0,) * len(self.gens)

    def mono(self, **exps: int) -> Mono:
        e = [0] * len(self.gens)
        for s, k in exps.items():
            e[self.gen_index(s)] = k
        return tuple(e)

    def mono_from_dict(self, d: dict[str, int]) -> Mono:
        e = [0] * len(self.gens)
        for s, k in d.items():
            e[self.gen_index(s)] = int(k)
        return tuple(e)

    def mono_to_dict(self, m: Mono) -> dict[str, int]:
        return {g.sym: e for g, e in zip(self.gens, m) if e}

    def mono_label(self, m: Mono) -> str:
        parts = [g.sym if e == 1 else f"{g.sym}^{e}" for g, e in zip(self.gens, m) if e]
        return "*".join(parts) or "1"

    def degree(self, m: Mono) -> Deg:
        out = [0] * self.ndeg
        for g, e in zip(self.gens, m):
            if e:
                for k, x in enumerate(g.deg):
                    out[k] += e * x
        return tuple(out)

    def parity_of_degree(self, d: Deg) -> int:
        mask = self.parity_mask or (1,) * len(d)
        return sum(x for x, w in zip(d, mask) if w) % 2

    def parity(self, m: Mono) -> int:
        return self.parity_of_degree(self.degree(m))

    def weight_of_degree(self, d: Deg) -> int:
        if self.weight is None:
            raise PresentationError(f"ring {self.name} has no weight functional")
        return sum(a * b for a, b in zip(self.weight, d))

    def is_connected(self) -> bool:
        return (self.weight is not None and not any(g.laurent for g in self.gens)
                and all(self.weight_of_degree(g.deg) > 0 for g in self.gens))

    def laurent_period(self) -> int | None:
        """Degree period for a ring k[v^±] with a single Laurent generator."""
        if len(self.gens) == 1 and self.gens[0].laurent and self.ndeg == 1:
            return abs(self.gens[0].deg[0])
        return None

    def order(self, m: Mono) -> int:
        """Additive order of the monomial (0 = infinite, 1 = the monomial is zero)."""
        o = self.coeff.modulus or 0
        for g, e in zip(self.gens, m):
            if e and g.torsion:
                o = gcd(o, g.torsion)
        return o

    def is_zero(self, m: Mono) -> bool:
        for g, e in zip(self.gens, m):
            if e < 0 and not g.laurent:
                return True
            if g.nil is not None and e >= g.nil:
                return True
        return self.order(m) == 1

    def _odd(self) -> list[bool]:
        return [self.parity_of_degree(g.deg) == 1 for g in self.gens]

    def mul(self, a: Mono, b: Mono) -> tuple[int, Mono] | None:
        """a*b as (sign, monomial), or None if it vanishes."""
        m = tuple(x + y for x, y in zip(a, b))
        if self.is_zero(m):
            return None
        odd = self._odd()
        s = 0
        for i in range(len(a)):
            if a[i] and odd[i]:
                for j in range(i):
                    if b[j] and odd[j]:
                        s += a[i] * b[j]
        return (-1) ** (s % 2), m

    # ---- enumeration

    def monomials_by_weight(self, cap: int) -> list[Mono]:
        """Nonzero monomials of weight <= cap (connected rings only)."""
        if not self.is_connected():
            raise PresentationError(f"ring {self.name} is not connected")
        ws = [self.weight_of_degree(g.deg) for g in self.gens]
        out: list[Mono] = []

        def rec(i: int, left: int, cur: list[int]) -> None:
            if i == len(self.gens):
                m = tuple(cur)
                if not self.is_zero(m):
                    out.append(m)
                return
            e = 0
            while e * ws[i] <= left:
                g = self.gens[i]
                if g.nil is not None and e >= g.nil:
                    break
                cur.append(e)
                rec(i + 1, left - e * ws[i], cur)
                cur.pop()
                e += 1

        rec(0, cap, [])
        return out

    def monomials_of_degree(self, d: Deg, max_length: int) -> list[Mono]:
        """Nonzero monomials of degree d with sum |exponent| <= max_length."""
        n = len(self.gens)
        out: list[Mono] = []

        def rec(i: int, left: int, cur: list[int], acc: list[int]) -> None:
            if i == n:
                if tuple(acc) == tuple(d):
                    m = tuple(cur)
                    if not self.is_zero(m):
                        out.append(m)
                return
            g = self.gens[i]
            rng = range(-left, left + 1) if g.laurent else range(0, left + 1)
            for e in rng:
                if g.nil is not None and e >= g.nil:
                    break
                cur.append(e)
                rec(i + 1, left - abs(e), cur, [a + e * b for a, b in zip(acc, g.deg)])
                cur.pop()

        rec(0, max_length, [], [0] * self.ndeg)
        return out

    def to_json(self) -> dict:
        return {"name": self.name, **dict(self.params)}


# ---- built-in rings


def _coeff_for(p: int | None, N: int | None = None) -> CoeffRing:
    if p is None:
        return ZZ
    return Wn(p, N) if N else Fp(p)


def poly_t(p: int) -> GradedRing:
    """k[t] with |t| = 2."""
    return GradedRing("k[t]", Fp(p), (RingGen("t", (2,)),), weight=(1,), params=(("p", p),))


def truncated_poly(p: int, e: int = 2, deg: int = 2) -> GradedRing:
    """k[t]/t^e."""
    return GradedRing("k[t]/t^e", Fp(p), (RingGen("t", (deg,), nil=e),), weight=(1,),
                      params=(("p", p), ("e", e), ("deg", deg)))


def laurent_W(p: int, N: int = 8) -> GradedRing:
    """W(F_p)[v^±] with |v| = -2, W carried at precision N."""
    return GradedRing("W[v^±]", Wn(p, N), (RingGen("v", (-2,), laurent=True),), params=(("p", p), ("N", N)))


def laurent_k(p: int) -> GradedRing:
    return GradedRing("k[v^±]", Fp(p), (RingGen("v", (-2,), laurent=True),), params=(("p", p),))


def laurent_Q() -> GradedRing:
    return GradedRing("Q[v^±]", QQ, (RingGen("v", (-2,), laurent=True),))


def tate_ring(p: int, exterior: bool = True) -> GradedRing:
    """k[vbar^±, t] or k[vbar^±, t, b]/b^2 in bidegrees vbar (-2,0), t (0,2), b (1,0)."""
    gens = [RingGen("vbar", (-2, 0), laurent=True), RingGen("t", (0, 2))]
    if exterior:
        gens.append(RingGen("b", (1, 0), nil=2))
    name = "k[vbar^±,t,b]/b^2" if exterior else "k[vbar^±,t]"
    return GradedRing(name, Fp(p), tuple(gens), params=(("p", p),))


def hm_ring(p: int | None = None) -> GradedRing:
    """Z[x,y,z]/y^2 with x (2,0), y (2,-1), z (-2,0); over F_p if p is given."""
    coeff = Fp(p) if p else ZZ
    gens = (RingGen("x", (2, 0)), RingGen("y", (2, -1), nil=2), RingGen("z", (-2, 0)))
    return GradedRing("HM", coeff, gens, params=(("p", p),) if p else ())


def lambda_eta(top: int = 4) -> GradedRing:
    """Z[eta]/(2 eta) with |eta| = 1 and eta^(top+1) = 0."""
    return GradedRing("Lambda", ZZ, (RingGen("eta", (1,), nil=top + 1, torsion=2),), params=(("top", top),))


def hm_tensor(A: GradedRing) -> GradedRing:
    """HM (x) A over F_p with degrees (i, j, A-degree, HM word length).

    The last component is a bookkeeping weight and does not enter signs.
    """
    if A.ndeg != 1 or not A.is_connected() or not A.coeff.is_field:
        raise PresentationError("hm_tensor expects a connected singly graded algebra over F_p")
    gens = (RingGen("x", (2, 0, 0, 1)), RingGen("y", (2, -1, 0, 1), nil=2), RingGen("z", (-2, 0, 0, 1)))
    gens += tuple(RingGen(g.sym, (0, 0, g.deg[0], 0), nil=g.nil, torsion=g.torsion) for g in A.gens)
    wa = A.weight[0]
    weight = (0, 0, wa, max(1, max(A.weight_of_degree(g.deg) for g in A.gens)))
    return GradedRing(f"HM⊗{A.name}", A.coeff, gens, parity_mask=(1, 1, 1, 0), weight=weight,
                      params=(("base", 0),) + A.params)


_BUILTINS = {
    "k[t]": lambda d: poly_t(d["p"]),
    "k[t]/t^e": lambda d: truncated_poly(d["p"], d.get("e", 2), d.get("deg", 2)),
    "W[v^±]": lambda d: laurent_W(d["p"], d.get("N", 8)),
    "k[v^±]": lambda d: laurent_k(d["p"]),
    "Q[v^±]": lambda d: laurent_Q(),
    "k[vbar^±,t,b]/b^2": lambda d: tate_ring(d["p"], True),
    "k[vbar^±,t]": lambda d: tate_ring(d["p"], False),
    "HM": lambda d: hm_ring(d.get("p")),
    "Lambda": lambda d: lambda_eta(d.get("top", 4)),
}


def ring_from_json(d: dict) -> GradedRing:
    name = d.get("name")
    if isinstance(name, str) and name.startswith("HM⊗"):
        base = ring_from_json({**d, "name": name[3:]})
        return hm_tensor(base)
    if name not in _BUILTINS:
        raise PresentationError(f"unknown ring {name!r}; known: {sorted(_BUILTINS)}")
    try:
        return _BUILTINS[name](d)
    except KeyError as e:
        raise PresentationError(f"ring {name!r} needs parameter {e}") from None


def ring_to_json(R: GradedRing) -> dict:
    d = {"name": R.name}
    for k, v in R.params:
        if k != "base":
            d[k] = v
    return d


# --------------------------------------------------------------------------
# module presentations


Term = tuple[int, Mono]   # (generator index, monomial)


@dataclass
class GradedModulePresentation:
    """Generators with degrees and homogeneous relations sum c * mono * gen."""

    ring: GradedRing
    gens: list[tuple[str, Deg]]
    relations: list[dict[Term, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.gens = [(s, tuple(d)) for s, d in self.gens]
        self.relations = [{k: c for k, c in r.items() if c} for r in self.relations]
        for r in self.relations:
            self.relation_degree(r)

    def gen_degree(self, i: int) -> Deg:
        return self.gens[i][1]

    def relation_degree(self, r: dict[Term, int]) -> Deg | None:
        degs = set()
        for (gi, m), _ in r.items():
            if not 0 <= gi < len(self.gens):
                raise PresentationError(f"relation refers to missing generator {gi}")
            degs.add(tuple(a + b for a, b in zip(self.ring.degree(m), self.gen_degree(gi))))
        if len(degs) > 1:
            raise PresentationError(f"non-homogeneous relation with degrees {sorted(degs)}")
        return degs.pop() if degs else None

    # ---- constructors

    @staticmethod
    def free(ring: GradedRing, degrees: Sequence[Deg]) -> "GradedModulePresentation":
        return GradedModulePresentation(ring, [(f"g{k}", tuple(d)) for k, d in enumerate(degrees)], [])

    @staticmethod
    def cyclic(ring: GradedRing, relations: Sequence[tuple[Mono, int]], degree: Deg | None = None
               ) -> "GradedModulePresentation":
        """R/(c_1 m_1, c_2 m_2, ...) on one generator."""
        d = tuple(degree) if degree is not None else ring.zero_deg()
        return GradedModulePresentation(ring, [("g", d)], [{(0, m): c} for m, c in relations])

    @staticmethod
    def residue_field(ring: GradedRing) -> "GradedModulePresentation":
        """k = R / (all generators), for connected R."""
        return GradedModulePresentation.cyclic(ring, [(ring.mono(**{g.sym: 1}), 1) for g in ring.gens])

    def direct_sum(self, other: "GradedModulePresentation") -> "GradedModulePresentation":
        k = len(self.gens)
        rels = list(self.relations) + [{(gi + k, m): c for (gi, m), c in r.items()} for r in other.relations]
        return GradedModulePresentation(self.ring, self.gens + other.gens, rels)

    def to_json(self) -> dict:
        R = self.ring
        return {
            "ring": ring_to_json(R),
            "generators": [{"sym": s, "deg": list(d)} for s, d in self.gens],
            "relations": [[{"gen": gi, "mono": R.mono_to_dict(m), "coeff": str(c)}
                           for (gi, m), c in sorted(r.items())] for r in self.relations],
        }

    @staticmethod
    def from_json(d: dict) -> "GradedModulePresentation":
        try:
            R = ring_from_json(d["ring"])
            gens = [(g["sym"], tuple(int(x) for x in g["deg"])) for g in d["generators"]]
            for _, dg in gens:
                if len(dg) != R.ndeg:
                    raise PresentationError(f"generator degree {list(dg)} has the wrong length for {R.name}")
            rels = []
            for row in d.get("relations", []):
                rel: dict[Term, int] = {}
                for t in row:
                    key = (int(t["gen"]), R.mono_from_dict(t.get("mono", {})))
                    rel[key] = rel.get(key, 0) + int(t["coeff"])
                rels.append(rel)
        except (KeyError, TypeError) as e:
            raise PresentationError(f"malformed module presentation: missing or bad field {e}") from None
        return GradedModulePresentation(R, gens, rels)


# --------------------------------------------------------------------------
# degreewise components


@dataclass(frozen=True)
class DegreeComponent:
    """Iso class of one degree: free rank over the coefficients plus torsion orders."""

    free: int
    torsion: tuple[int, ...] = ()

    def label(self) -> str:
        parts = ([f"R^{self.free}"] if self.free > 1 else ["R"] if self.free == 1 else []) + \
                [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) or "0"


def _component_data(M: GradedModulePresentation, d: Deg, monos_of) -> tuple[list[Term], list[list[int]]]:
    """Basis (gen, mono) of the free module in degree d and the relation vectors there."""
    R = M.ring
    basis: list[Term] = []
    for gi, (_, gd) in enumerate(M.gens):
        for m in monos_of(tuple(a - b for a, b in zip(d, gd))):
            basis.append((gi, m))
    index = {t: k for k, t in enumerate(basis)}
    rels: list[list[int]] = []
    for (gi, m) in basis:
        o = R.order(m)
        if o:
            v = [0] * len(basis)
            v[index[(gi, m)]] = o
            rels.append(v)
    for r in M.relations:
        e = M.relation_degree(r)
        if e is None:
            continue
        for m in monos_of(tuple(a - b for a, b in zip(d, e))):
            v = [0] * len(basis)
            for (gi, m2), c in r.items():
                pr = R.mul(m, m2)
                if pr is None:
                    continue
                s, mm = pr
                k = index.get((gi, mm))
                if k is None:
                    raise TruncationError("relation multiple leaves the enumerated monomials; raise max_length")
                v[k] += s * c
            if any(v):
                rels.append(v)
    return basis, rels


def _classify(coeff: CoeffRing, n: int, rels: list[list[int]]) -> DegreeComponent:
    if n == 0:
        return DegreeComponent(0)
    if coeff.kind == "Q":
        r = smith_normal_form([list(c) for c in zip(*rels)]).rank if rels else 0
        return DegreeComponent(n - r)
    if coeff.kind == "Fp":
        return DegreeComponent(n - rank_mod_p(rels, coeff.p) if rels else n)
    lat = Lattice.span(rels, n)
    from .lattice import Subquotient
    orders = Subquotient(Lattice.full(n), lat).orders
    if coeff.kind == "Wn":
        q = coeff.p ** coeff.N
        orders = localize(orders, coeff.p)
        free = sum(1 for o in orders if o == 0 or o % q == 0)
        tors = tuple(o for o in orders if o and o % q)
        return DegreeComponent(free, tors)
    return DegreeComponent(sum(1 for o in orders if o == 0), tuple(o for o in orders if o))


def degreewise_rank(M: GradedModulePresentation, window: Iterable[Deg | int],
                    max_length: int | None = None) -> dict[Deg, DegreeComponent]:
    """Iso class of M_d for each degree d of the window.

    Connected rings enumerate monomials by weight.  Otherwise monomials are
    enumerated up to ``max_length`` (sum of |exponents|); without an explicit
    cap the enumeration is certified finite by checking that doubling the cap
    adds no monomials, and an error is raised when it does.
    """
    R = M.ring
    out: dict[Deg, DegreeComponent] = {}
    for d in window:
        d = (d,) if isinstance(d, int) else tuple(d)
        if max_length is not None:
            cap = max_length
        else:
            cap = 4 + sum(abs(x) for x in d) + max((sum(abs(x) for x in g[1]) for g in M.gens), default=0)

        def monos_of(e: Deg, cap=cap) -> list[Mono]:
            return R.monomials_of_degree(e, cap)

        if max_length is None:
            for gi, (_, gd) in enumerate(M.gens):
                e = tuple(a - b for a, b in zip(d, gd))
                if len(R.monomials_of_degree(e, 2 * cap)) != len(monos_of(e)):
                    raise TruncationError(
                        f"degree {list(d)} of ring {R.name} is not finite; pass max_length")
        basis, rels = _component_data(M, d, monos_of)
        out[d] = _classify(R.coeff, len(basis), rels)
    return out


# --------------------------------------------------------------------------
# graded PID rings R[v^±]


def _laurent_parts(M: GradedModulePresentation) -> dict[int, tuple[list[int], list[list[int]]]]:
    """Per residue class of degree mod the period: generator indices and relation columns."""
    R = M.ring
    P = R.laurent_period()
    if P is None:
        raise PresentationError(f"ring {R.name} is not a Laurent ring in one variable")
    parts: dict[int, tuple[list[int], list[list[int]]]] = {rho: ([], []) for rho in range(P)}
    pos: dict[int, int] = {}
    for gi, (_, d) in enumerate(M.gens):
        rho = d[0] % P
        pos[gi] = len(parts[rho][0])
        parts[rho][0].append(gi)
    for r in M.relations:
        e = M.relation_degree(r)
        if e is None:
            continue
        rho = e[0] % P
        col = [0] * len(parts[rho][0])
        for (gi, _), c in r.items():
            col[pos[gi]] += c
        if any(col):
            parts[rho][1].append(col)
    return parts


def _snf_orders(n: int, cols: list[list[int]]) -> list[int]:
    from .lattice import Subquotient
    return Subquotient(Lattice.full(n), Lattice.span(cols, n)).orders


@dataclass
class LaurentSummand:
    """A cyclic summand shift(R) or shift(R/p^k) of a graded module over W[v^±]."""

    degree: int
    order: int          # 0 for a free summand


def classify_laurent(M: GradedModulePresentation) -> list[LaurentSummand]:
    """Decompose a f.g. graded W[v^±]-module into shifts of the ring and of ring/p^k."""
    R = M.ring
    p = R.coeff.p
    out = []
    for rho, (gens, cols) in sorted(_laurent_parts(M).items()):
        for o in localize(_snf_orders(len(gens), cols), p) if p else _snf_orders(len(gens), cols):
            out.append(LaurentSummand(rho, o))
    return out


def _kron_id(A: list[list[int]], k: int) -> list[list[int]]:
    """A (x) I_k."""
    rows, cols = len(A), (len(A[0]) if A else 0)
    out = [[0] * (cols * k) for _ in range(rows * k)]
    for i in range(rows):
        for j in range(cols):
            a = A[i][j]
            if a:
                for t in range(k):
                    out[i * k + t][j * k + t] = a
    return out


def _tor_pid_component(nm: int, rel_m: list[list[int]], nn: int, rel_n: list[list[int]],
                       coeff: CoeffRing, bound: int) -> dict[int, list[int]]:
    """Tor_s over the coefficient PID of coker(rel_m) and coker(rel_n), s <= bound.

    The resolution is the raw one: F_0 = generators, F_1 = the given relation
    columns, F_2 = their syzygies.  Nothing is minimized, so Tor_2 = 0 is a
    genuine check.
    """
    kind = coeff.kind
    p = coeff.p
    if kind == "Fp":
        R = [list(r) for r in zip(*rel_m)] if rel_m else []
        rank_r = rank_mod_p(R, p) if R else 0
        syz = nullspace_mod_p(R, p, len(rel_m)) if rel_m else []
        dims = {0: nm, 1: len(rel_m), 2: len(syz)}
        ranks = {1: rank_r, 2: len(syz) and rank_mod_p([list(r) for r in zip(*syz)], p)}
        RN = [list(r) for r in zip(*rel_n)] if rel_n else []
        dn = nn - (rank_mod_p(RN, p) if RN else 0)
        out = {}
        for s in range(bound + 1):
            c = dims.get(s, 0)
            h = c - ranks.get(s, 0) - ranks.get(s + 1, 0)
            out[s] = [p] * (h * dn)
        return out
    if kind == "Q":
        R = [list(r) for r in zip(*rel_m)] if rel_m else []
        rank_r = smith_normal_form(R).rank if R else 0
        syz = kernel_basis(R, len(rel_m)) if rel_m else []
        dims = {0: nm, 1: len(rel_m), 2: len(syz)}
        ranks = {1: rank_r, 2: len(syz)}
        RN = [list(r) for r in zip(*rel_n)] if rel_n else []
        dn = nn - (smith_normal_form(RN).rank if RN else 0)
        return {s: [0] * ((dims.get(s, 0) - ranks.get(s, 0) - ranks.get(s + 1, 0)) * dn)
                for s in range(bound + 1)}
    # Z or Z_(p): homology of F (x) N over Z, then localize
    Rm = [list(r) for r in zip(*rel_m)] if rel_m else [[] for _ in range(nm)]
    syz = kernel_basis(Rm, len(rel_m)) if rel_m else []
    S = [list(r) for r in zip(*syz)] if syz else [[] for _ in range(len(rel_m))]
    f = {0: nm, 1: len(rel_m), 2: len(syz)}
    dims = {s: f[s] * nn for s in f}
    diff = {}
    if f[1] and nm:
        diff[1] = _kron_id(Rm, nn)
    if f[2]:
        diff[2] = _kron_id(S, nn)
    rels = {}
    for s in f:
        rr = []
        for blk in range(f[s]):
            for col in rel_n:
                v = [0] * dims[s]
                v[blk * nn:(blk + 1) * nn] = col
                rr.append(v)
        rels[s] = rr
    cx = PresentedComplex(dims, diff, rels)
    out = {}
    for s in range(bound + 1):
        orders = cx.homology(s).orders if s in dims and dims[s] else []
        out[s] = localize(orders, p if kind == "Wn" else None)
    return out


def _tor_pid_closed_form(orders_m: list[int], orders_n: list[int], p: int | None) -> dict[int, list[int]]:
    t0, t1 = [], []
    for a in orders_m:
        for b in orders_n:
            g = gcd(a, b)
            t0.append(g)
            if a and b:
                t1.append(g)
    return {0: localize(t0, p), 1: localize(t1, p)}


@dataclass
class TorTable:
    """Tor_s in each internal degree; entries are cyclic orders (0 = free, p = F_p line)."""

    ring: str
    entries: dict[tuple[int, Deg], list[int]]
    bound: int
    truncated: bool = False
    method: str = ""

    def group(self, s: int, d: Deg | int) -> list[int]:
        d = (d,) if isinstance(d, int) else tuple(d)
        return self.entries.get((s, d), [])

    def nonzero(self) -> dict[tuple[int, Deg], list[int]]:
        return {k: v for k, v in self.entries.items() if v}

    def canonical(self) -> dict[tuple[int, Deg], tuple]:
        from .filtered_ss import canonical_form
        return {k: canonical_form(v) for k, v in self.entries.items() if v}

    def rows(self) -> list[tuple]:
        return [(s, list(d), ";".join(str(x) for x in v)) for (s, d), v in sorted(self.entries.items()) if v]


def _window_degrees(window: Iterable[Deg | int]) -> list[Deg]:
    return [(d,) if isinstance(d, int) else tuple(d) for d in window]


def tor_laurent(M: GradedModulePresentation, N: GradedModulePresentation, bound: int,
                window: Iterable[int], oracle: str = "resolution") -> TorTable:
    """Tor over R[v^±] by reduction to one period.

    ``oracle`` selects the computation: "resolution" resolves M, "swapped"
    resolves N, "closed" uses the cyclic decomposition and gcd formulas.
    """
    R = M.ring
    if N.ring != R:
        raise PresentationError("modules live over different rings")
    P = R.laurent_period()
    pm, pn = _laurent_parts(M), _laurent_parts(N)
    p = R.coeff.p if R.coeff.kind == "Wn" else None
    per_class: dict[int, dict[int, list[int]]] = {}
    for rho in range(P):
        acc: dict[int, list[int]] = {s: [] for s in range(bound + 1)}
        for a in range(P):
            b = (rho - a) % P
            (gm, rm), (gn, rn) = pm[a], pn[b]
            if oracle == "resolution":
                part = _tor_pid_component(len(gm), rm, len(gn), rn, R.coeff, bound)
            elif oracle == "swapped":
                part = _tor_pid_component(len(gn), rn, len(gm), rm, R.coeff, bound)
            elif oracle == "closed":
                if R.coeff.kind in ("Fp", "Q"):
                    raise PresentationError("the closed form oracle is for Z_(p) coefficients")
                part = _tor_pid_closed_form(_snf_orders(len(gm), rm), _snf_orders(len(gn), rn), p)
            else:
                raise PresentationError(f"unknown oracle {oracle!r}")
            for s in range(bound + 1):
                acc[s] += part.get(s, [])
        per_class[rho] = acc
    entries = {}
    for d in window:
        for s in range(bound + 1):
            g = per_class[d % P][s]
            entries[(s, (d,))] = sorted(g, key=lambda x: (x == 0, x))
    return TorTable(R.name, entries, bound, False, oracle)


# --------------------------------------------------------------------------
# connected algebras over F_p


class DegreewiseModule:
    """A module over a connected F_p-algebra, made explicit degree by degree."""

    def __init__(self, M: GradedModulePresentation, cap: int):
        R = M.ring
        if not R.is_connected() or R.coeff.kind != "Fp":
            raise PresentationError(f"ring {R.name} is not a connected algebra over F_p")
        self.M, self.R, self.p, self.cap = M, R, R.coeff.p, cap
        self.monos = R.monomials_by_weight(cap + max(0, -min((R.weight_of_degree(d) for _, d in M.gens),
                                                                default=0)))
        self.by_degree: dict[Deg, list[Mono]] = {}
        for m in self.monos:
            self.by_degree.setdefault(R.degree(m), []).append(m)
        self._cache: dict[Deg, tuple] = {}

    def monos_of(self, d: Deg) -> list[Mono]:
        return self.by_degree.get(tuple(d), [])

    def degrees(self) -> list[Deg]:
        out = set()
        for _, gd in self.M.gens:
            for e in self.by_degree:
                d = tuple(a + b for a, b in zip(gd, e))
                if self.R.weight_of_degree(d) <= self.cap:
                    out.add(d)
        return sorted(out, key=lambda d: (self.R.weight_of_degree(d), d))

    def data(self, d: Deg):
        d = tuple(d)
        if d not in self._cache:
            basis, rels = _component_data(self.M, d, self.monos_of)
            S = ModSubspace(len(basis), self.p, rels)
            comp = S.complement_coords()
            self._cache[d] = (basis, {t: k for k, t in enumerate(basis)}, S, comp)
        return self._cache[d]

    def dim(self, d: Deg) -> int:
        return len(self.data(d)[3])

    def project(self, d: Deg, vec: Sequence[int]) -> list[int]:
        _, _, S, comp = self.data(d)
        w = S.reduce(vec)
        return [w[k] for k in comp]

    def lift(self, d: Deg, q: Sequence[int]) -> list[int]:
        basis, _, _, comp = self.data(d)
        v = [0] * len(basis)
        for k, c in zip(comp, q):
            v[k] = c
        return v

    def act(self, m: Mono, d: Deg, q: Sequence[int], right: bool = False) -> tuple[Deg, list[int]]:
        """m * x for x in the quotient at degree d (or x * m when ``right``)."""
        R = self.R
        basis, _, _, _ = self.data(d)
        vec = self.lift(d, q)
        e = tuple(a + b for a, b in zip(d, R.degree(m)))
        tb, tidx, _, _ = self.data(e)
        out = [0] * len(tb)
        sx = R.parity_of_degree(d) * R.parity(m) if right else 0
        for k, c in enumerate(vec):
            if not c:
                continue
            gi, m2 = basis[k]
            pr = R.mul(m, m2)
            if pr is None:
                continue
            s, mm = pr
            idx = tidx.get((gi, mm))
            if idx is None:
                raise TruncationError("product leaves the weight cap")
            out[idx] += s * c * (-1) ** sx
        return e, self.project(e, out)


def _add(a: Deg, b: Deg) -> Deg:
    return tuple(x + y for x, y in zip(a, b))


def _sub(a: Deg, b: Deg) -> Deg:
    return tuple(x - y for x, y in zip(a, b))


@dataclass
class FreeResolution:
    """F_s free on generators of the listed degrees; ``maps[s][k]`` is d(gen k of F_s) in F_{s-1}.

    For s = 0 the map is the projection to the module.  ``truncated`` is set
    when the construction stopped at the weight cap or the length bound
    before reaching zero.
    """

    ring: GradedRing
    degrees: list[list[Deg]]
    maps: list[list[dict[Term, int]]]
    truncated: bool
    weight_cap: int | None = None

    @property
    def length(self) -> int:
        return max((s for s, g in enumerate(self.degrees) if g), default=0)

    def ranks(self) -> list[int]:
        return [len(g) for g in self.degrees]


def _free_action(R: GradedRing, m: Mono, elem: dict[Term, int]) -> dict[Term, int]:
    out: dict[Term, int] = {}
    for (gi, m2), c in elem.items():
        pr = R.mul(m, m2)
        if pr is None:
            continue
        s, mm = pr
        out[(gi, mm)] = out.get((gi, mm), 0) + s * c
    return out


def _resolve_connected(M: GradedModulePresentation, length: int, cap: int) -> FreeResolution:
    R, p = M.ring, M.ring.coeff.p
    D = DegreewiseModule(M, cap)
    monos_of = D.monos_of
    degrees: list[list[Deg]] = [[gd for _, gd in M.gens]]
    maps: list[list[dict[Term, int]]] = [[{(k, R.one()): 1} for k in range(len(M.gens))]]
    # kernel of F_0 -> M is the relation subspace; kernels of later maps by nullspace
    truncated = False
    for s in range(0, length):
        src_degs = degrees[s]
        new_degs: list[Deg] = []
        new_maps: list[dict[Term, int]] = []
        cand = set()
        for gd in src_degs:
            for e in D.by_degree:
                d = _add(gd, e)
                if R.weight_of_degree(d) <= cap:
                    cand.add(d)
        for d in sorted(cand, key=lambda d: (R.weight_of_degree(d), d)):
            basis = [(k, m) for k, gd in enumerate(src_degs) for m in monos_of(_sub(d, gd))]
            if not basis:
                continue
            idx = {t: i for i, t in enumerate(basis)}
            if s == 0:
                _, rels = _component_data(M, d, monos_of)
                kernel = rels
            else:
                tgt_degs = degrees[s - 1]
                tbasis = [(k, m) for k, gd in enumerate(tgt_degs) for m in monos_of(_sub(d, gd))]
                tidx = {t: i for i, t in enumerate(tbasis)}
                cols = []
                for k, m in basis:
                    v = [0] * len(tbasis)
                    for (gi, mm), c in _free_action(R, m, maps[s][k]).items():
                        v[tidx[(gi, mm)]] += c
                    cols.append(v)
                rows = [list(r) for r in zip(*cols)] if tbasis else []
                kernel = nullspace_mod_p(rows, p, len(basis)) if rows else \
                    [[int(i == j) for i in range(len(basis))] for j in range(len(basis))]
            if not kernel:
                continue
            span = ModSubspace(len(basis), p)
            for j, gd in enumerate(new_degs):
                for m in monos_of(_sub(d, gd)):
                    v = [0] * len(basis)
                    for (gi, mm), c in _free_action(R, m, new_maps[j]).items():
                        v[idx[(gi, mm)]] += c
                    span.add(v)
            for v in kernel:
                if span.add(v):
                    new_degs.append(d)
                    new_maps.append({basis[i]: c % p for i, c in enumerate(v) if c % p})
        degrees.append(new_degs)
        maps.append(new_maps)
        if not new_degs:
            break
    else:
        truncated = bool(degrees[-1])
    if any(R.weight_of_degree(d) > cap - 1 for g in degrees for d in g):
        truncated = True
    return FreeResolution(R, degrees, maps, truncated, cap)


def _resolve_laurent(M: GradedModulePresentation, minimal: bool = True) -> FreeResolution:
    R = M.ring
    degrees = [[gd for _, gd in M.gens]]
    maps = [[{(k, R.one()): 1} for k in range(len(M.gens))]]
    vdeg = R.gens[0].deg[0]
    rel_degs, rel_maps = [], []
    if minimal:
        parts = _laurent_parts(M)
        for rho, (gens, cols) in parts.items():
            if not cols:
                continue
            lat = Lattice.span(cols, len(gens))
            base = M.gen_degree(gens[0])[0]
            for b in lat.basis:
                elem: dict[Term, int] = {}
                for k, c in zip(gens, b):
                    if c:
                        e = (M.gen_degree(k)[0] - base) // vdeg
                        elem[(k, R.mono(v=-e))] = c
                rel_degs.append((base,))
                rel_maps.append(elem)
    else:
        for r in M.relations:
            e = M.relation_degree(r)
            if e is not None:
                rel_degs.append(e)
                rel_maps.append(dict(r))
    degrees.append(rel_degs)
    maps.append(rel_maps)
    return FreeResolution(R, degrees, maps, False)


def free_resolution(M: GradedModulePresentation, length: int, weight_cap: int = 12) -> FreeResolution:
    """A free resolution of M up to homological degree ``length``.

    Graded PID rings get a length <= 1 resolution (relations replaced by a
    basis of the relation lattice); connected F_p-algebras get the minimal
    resolution in weights <= weight_cap.
    """
    R = M.ring
    if R.laurent_period() is not None:
        return _resolve_laurent(M)
    if R.is_connected() and R.coeff.kind == "Fp":
        return _resolve_connected(M, length, weight_cap)
    raise PresentationError(f"no resolution algorithm for ring {R.name}")


def _tensor_complex_ranks(F: FreeResolution, N: DegreewiseModule, d: Deg, s_max: int) -> dict[int, int]:
    """dim H_s(F (x)_A N) in degree d for s <= s_max (needs F up to s_max + 1)."""
    R, p = F.ring, N.p

    def basis(s: int) -> list[tuple[int, int]]:
        if s >= len(F.degrees):
            return []
        return [(k, i) for k, gd in enumerate(F.degrees[s]) for i in range(N.dim(_sub(d, gd)))]

    def matrix(s: int) -> list[list[int]]:
        src, tgt = basis(s), basis(s - 1)
        tidx = {t: i for i, t in enumerate(tgt)}
        cols = []
        for k, i in src:
            gd = F.degrees[s][k]
            nd = _sub(d, gd)
            q = [int(j == i) for j in range(N.dim(nd))]
            v = [0] * len(tgt)
            for (h, a), c in F.maps[s][k].items():
                hd = F.degrees[s - 1][h]
                sign = (-1) ** (R.parity(a) * R.parity_of_degree(hd))
                e, img = N.act(a, nd, q)
                for j, x in enumerate(img):
                    if x:
                        v[tidx[(h, j)]] += sign * c * x
            cols.append(v)
        return [list(r) for r in zip(*cols)] if cols and tgt else []

    ranks = {}
    for s in range(1, s_max + 2):
        m = matrix(s)
        ranks[s] = rank_mod_p(m, p) if m else 0
    return {s: len(basis(s)) - ranks.get(s, 0) - ranks.get(s + 1, 0) for s in range(s_max + 1)}


def tor_connected(M: GradedModulePresentation, N: GradedModulePresentation, bound: int,
                  weight_cap: int, swapped: bool = False) -> TorTable:
    """Tor^A(M, N) over a connected F_p-algebra in weights <= weight_cap."""
    if swapped:
        t = tor_connected(N, M, bound, weight_cap)
        t.method = "swapped"
        return t
    R = M.ring
    F = _resolve_connected(M, bound + 1, weight_cap)
    ND = DegreewiseModule(N, weight_cap)
    MD = DegreewiseModule(M, weight_cap)
    degs = set()
    for d1 in MD.degrees():
        for d2 in ND.degrees():
            for e in MD.by_degree:
                d = _add(_add(d1, d2), e)
                if R.weight_of_degree(d) <= weight_cap:
                    degs.add(d)
    for s, gl in enumerate(F.degrees):
        for gd in gl:
            for d2 in ND.degrees():
                d = _add(gd, d2)
                if R.weight_of_degree(d) <= weight_cap:
                    degs.add(d)
    entries = {}
    p = R.coeff.p
    for d in sorted(degs):
        h = _tensor_complex_ranks(F, ND, d, bound)
        for s, k in h.items():
            if k:
                entries[(s, d)] = [p] * k
    return TorTable(R.name, entries, bound, F.truncated, "resolution")


class BarComplex:
    """The normalized bar complex M (x) Abar^{(x)s} (x) N, one degree at a time.

    M is used as a right module through m * a = (-1)^{|m||a|} a m.  Cells are
    (deg m, i, (a_1, ..., a_s), deg n, j) with i, j indexing quotient bases.
    """

    def __init__(self, M: GradedModulePresentation, N: GradedModulePresentation, weight_cap: int):
        R = M.ring
        self.R, self.p, self.cap = R, R.coeff.p, weight_cap
        self.MD, self.ND = DegreewiseModule(M, weight_cap), DegreewiseModule(N, weight_cap)
        self.abar = [m for m in R.monomials_by_weight(weight_cap) if any(m)]
        self.wt = {m: R.weight_of_degree(R.degree(m)) for m in self.abar}
        self.mdeg = [d for d in self.MD.degrees() if self.MD.dim(d)]
        self.ndeg = [d for d in self.ND.degrees() if self.ND.dim(d)]
        self.wmin_n = min((R.weight_of_degree(d) for d in self.ndeg), default=0)

    def degrees(self) -> list[Deg]:
        R = self.R
        # degrees of bar words: sums of degrees of Abar, not degrees of products
        words = {R.zero_deg()}
        frontier = set(words)
        steps = {R.degree(a) for a in self.abar}
        while frontier:
            nxt = set()
            for w in frontier:
                for e in steps:
                    x = _add(w, e)
                    if R.weight_of_degree(x) <= self.cap and x not in words:
                        nxt.add(x)
            words |= nxt
            frontier = nxt
        out = set()
        for dm in self.mdeg:
            for dn in self.ndeg:
                for w in words:
                    d = _add(_add(dm, dn), w)
                    if R.weight_of_degree(d) <= self.cap:
                        out.add(d)
        return sorted(out)

    def _words(self, s: int, budget: int):
        if s == 0:
            yield ()
            return
        for a in self.abar:
            if self.wt[a] <= budget:
                for rest in self._words(s - 1, budget - self.wt[a]):
                    yield (a,) + rest

    def cells(self, s: int, d: Deg) -> list:
        R, out = self.R, []
        for dm in self.mdeg:
            budget = self.cap - R.weight_of_degree(dm) - self.wmin_n
            if budget < 0:
                continue
            for w in self._words(s, budget):
                wdeg = R.degree(tuple(map(sum, zip(*w)))) if w else R.zero_deg()
                dn = _sub(_sub(d, dm), wdeg)
                if R.weight_of_degree(dn) > self.cap:
                    continue
                k = self.ND.dim(dn)
                for i in range(self.MD.dim(dm)):
                    for j in range(k):
                        out.append((dm, i, w, dn, j))
        return out

    def boundary(self, cell) -> dict:
        R, p = self.R, self.p
        dm, i, w, dn, j = cell
        s = len(w)
        out: dict = {}

        def put(key, c):
            out[key] = (out.get(key, 0) + c) % p

        qm = [int(k == i) for k in range(self.MD.dim(dm))]
        qn = [int(k == j) for k in range(self.ND.dim(dn))]
        pre = R.parity_of_degree(dm)
        e, img = self.MD.act(w[0], dm, qm, right=True)
        for k, c in enumerate(img):
            if c:
                put((e, k, w[1:], dn, j), (-1) ** pre * c)
        for t in range(s - 1):
            pre += R.parity(w[t]) + 1
            pr = R.mul(w[t], w[t + 1])
            if pr is None:
                continue
            sg, mm = pr
            put((dm, i, w[:t] + (mm,) + w[t + 2:], dn, j), (-1) ** pre * sg)
        pre += R.parity(w[-1]) + 1
        e, img = self.ND.act(w[-1], dn, qn)
        for k, c in enumerate(img):
            if c:
                put((dm, i, w[:-1], e, k), (-1) ** pre * c)
        return out

    def matrix(self, s: int, d: Deg) -> list[list[int]]:
        """d: B_s -> B_{s-1} in degree d (rows index B_{s-1})."""
        src, tgt = self.cells(s, d), self.cells(s - 1, d)
        if not src or not tgt:
            return []
        tidx = {c: k for k, c in enumerate(tgt)}
        rows = [[0] * len(src) for _ in range(len(tgt))]
        for jc, cell in enumerate(src):
            for key, c in self.boundary(cell).items():
                if c:
                    rows[tidx[key]][jc] = c
        return rows

    def d_squared_defect(self, s: int, d: Deg) -> int:
        """Rank of d∘d from B_s in degree d; zero for a genuine complex."""
        A, B = self.matrix(s, d), self.matrix(s - 1, d)
        if not A or not B:
            return 0
        prod = [[sum(B[i][k] * A[k][j] for k in range(len(A))) % self.p for j in range(len(A[0]))]
                for i in range(len(B))]
        return rank_mod_p(prod, self.p)

    def homology_dims(self, d: Deg, bound: int) -> dict[int, int]:
        sizes = {s: len(self.cells(s, d)) for s in range(bound + 2)}
        ranks = {}
        for s in range(1, bound + 2):
            m = self.matrix(s, d)
            ranks[s] = rank_mod_p(m, self.p) if m else 0
        return {s: sizes[s] - ranks.get(s, 0) - ranks.get(s + 1, 0) for s in range(bound + 1)}


def tor_bar(M: GradedModulePresentation, N: GradedModulePresentation, bound: int, weight_cap: int) -> TorTable:
    """Tor from the normalized bar complex, an oracle independent of any resolution."""
    B = BarComplex(M, N, weight_cap)
    entries = {}
    for d in B.degrees():
        for s, k in B.homology_dims(d, bound).items():
            if k:
                entries[(s, d)] = [B.p] * k
    return TorTable(M.ring.name, entries, bound, False, "bar")


def tor(M: GradedModulePresentation, N: GradedModulePresentation, bound: int,
        window: Iterable[int] | None = None, weight_cap: int = 12, check: bool = True) -> TorTable:
    """Tor^R_{s}(M, N) for s <= bound, cross-checked against an independent oracle when ``check``."""
    R = M.ring
    if R.laurent_period() is not None:
        if window is None:
            raise PresentationError("a degree window is needed over a Laurent ring")
        t = tor_laurent(M, N, bound, window)
        if check:
            other = "closed" if R.coeff.kind in ("Wn", "Z") else "swapped"
            o = tor_laurent(M, N, bound, window, other)
            if t.canonical() != o.canonical():
                raise AssertionError("Tor disagrees with its oracle")
        return t
    if R.is_connected() and R.coeff.kind == "Fp":
        t = tor_connected(M, N, bound, weight_cap)
        if check:
            o = tor_bar(M, N, bound, weight_cap)
            if t.canonical() != o.canonical():
                raise AssertionError("Tor disagrees with the bar complex")
        return t
    raise PresentationError(f"no Tor algorithm for ring {R.name}")
