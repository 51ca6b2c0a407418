"""Filtered chain complexes of abelian groups and their spectral sequences.

A chain group is C_n = Z^{dims[n]} / R_n and a filtration level F_p C_n is a
lattice containing R_n.  Prime-field coefficients are the special case
R_n = p Z^{dims[n]}.  Pages are computed directly from the filtration,

    Z^r_p = F_p ∩ d^{-1}(F_{p-r}),   E^r_p = Z^r_p / (Z^{r-1}_{p-1} + d Z^{r-1}_{p+r-1}),

so no exact couple is involved and every page is an explicit subquotient.
Bidegrees are (p, n) with p the filtration and n the total degree; the
complementary degree is q = n - p and d^r has bidegree (-r, r-1) in (p, q).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Iterable, Sequence

from .exact_coeff import Matrix, matvec, transpose
from .lattice import Lattice, PresentedComplex, Subquotient, preimage

Vec = list[int]


class FiltrationError(ValueError):
    pass


@dataclass
class FilteredComplex:
    """Bounded complex with an increasing, exhaustive, Hausdorff filtration.

    ``new_gens[n][p]`` lists the generators added at level p, so that
    F_p C_n = span(new_gens[n][q] for q <= p) + R_n.  F_bottom = R (zero) and
    F_top is everything.
    """

    dims: dict[int, int]
    diff: dict[int, Matrix]
    new_gens: dict[int, dict[int, list[Vec]]]
    bottom: int
    top: int
    rels: dict[int, list[Vec]] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self) -> None:
        self._filt: dict[tuple[int, int], Lattice] = {}
        self._rel: dict[int, Lattice] = {}

    # ---- construction helpers

    @staticmethod
    def from_levels(dims: dict[int, int], diff: dict[int, Matrix], levels: dict[int, Sequence[int]],
                    rels: dict[int, list[Vec]] | None = None, name: str = "") -> "FilteredComplex":
        """Filtration spanned by basis vectors: basis vector k of C_n sits at level levels[n][k]."""
        new: dict[int, dict[int, list[Vec]]] = {}
        all_levels = [lv for n in levels for lv in levels[n]]
        lo = min(all_levels) if all_levels else 0
        hi = max(all_levels) if all_levels else 0
        for n, lv in levels.items():
            d = dims[n]
            for k, p in enumerate(lv):
                new.setdefault(n, {}).setdefault(p, []).append([int(i == k) for i in range(d)])
        return FilteredComplex(dims, diff, new, lo - 1, hi, rels or {}, name)

    @staticmethod
    def unit() -> "FilteredComplex":
        """The unit for the Day product: Z in degree 0, level 0."""
        return FilteredComplex.from_levels({0: 1}, {}, {0: [0]}, name="S")

    # ---- accessors

    def degrees(self) -> list[int]:
        return sorted(n for n, d in self.dims.items() if d)

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def d(self, n: int) -> Matrix:
        m = self.diff.get(n)
        if m is None or (self.dim(n) and self.dim(n - 1) and not m):
            return [[0] * self.dim(n) for _ in range(self.dim(n - 1))]
        return m

    def relations(self, n: int) -> Lattice:
        if n not in self._rel:
            self._rel[n] = Lattice.span(self.rels.get(n, []), self.dim(n))
        return self._rel[n]

    def F(self, p: int, n: int) -> Lattice:
        key = (p, n)
        if key not in self._filt:
            dn = self.dim(n)
            if p <= self.bottom:
                lat = self.relations(n)
            elif p >= self.top:
                lat = Lattice.full(dn)
            else:
                gens = list(self.rels.get(n, []))
                for q, g in self.new_gens.get(n, {}).items():
                    if q <= p:
                        gens += g
                lat = Lattice.span(gens, dn)
            self._filt[key] = lat
        return self._filt[key]

    def levels(self) -> range:
        return range(self.bottom, self.top + 1)

    # ---- validation

    def validate(self) -> None:
        for n in self.degrees():
            full = Lattice.full(self.dim(n))
            top_gens = list(self.rels.get(n, []))
            for g in self.new_gens.get(n, {}).values():
                top_gens += g
            if Lattice.span(top_gens, self.dim(n)) != full:
                raise FiltrationError(f"filtration is not exhaustive in degree {n}")
            for q in self.new_gens.get(n, {}):
                if not self.bottom < q <= self.top:
                    raise FiltrationError(f"level {q} outside ({self.bottom}, {self.top}]")
            if self.dim(n - 1) == 0:
                continue
            dn = self.d(n)
            for r in self.rels.get(n, []):
                if not self.relations(n - 1).contains(matvec(dn, r)):
                    raise FiltrationError(f"d does not respect relations in degree {n}")
            for p in self.levels():
                low = self.F(p, n - 1)
                for b in self.F(p, n).basis:
                    if not low.contains(matvec(dn, b)):
                        raise FiltrationError(f"d does not preserve the filtration (level {p}, degree {n})")
            if self.dim(n - 2):
                dd = self.d(n - 1)
                for k in range(self.dim(n)):
                    col = [row[k] for row in dn]
                    if not self.relations(n - 2).contains(matvec(dd, col)):
                        raise FiltrationError(f"d∘d != 0 from degree {n}")

    def is_split(self) -> bool:
        """Every inclusion F_{p-1} C_n <= F_p C_n splits (checked via iso types)."""
        for n in self.degrees():
            R = self.relations(n)
            for p in self.levels():
                sub = Subquotient(self.F(p - 1, n), R).orders
                quo = Subquotient(self.F(p, n), self.F(p - 1, n)).orders
                mid = Subquotient(self.F(p, n), R).orders
                if canonical_form(list(sub) + list(quo)) != canonical_form(mid):
                    return False
        return True

    # ---- homology of the whole complex

    def cycles(self, n: int) -> Lattice:
        if self.dim(n - 1) == 0:
            return Lattice.full(self.dim(n))
        return preimage(self.d(n), self.relations(n - 1), self.dim(n))

    def boundaries(self, n: int) -> Lattice:
        gens = list(self.rels.get(n, []))
        if self.dim(n + 1):
            gens += transpose(self.d(n + 1))
        return Lattice.span(gens, self.dim(n))

    def homology(self, n: int) -> Subquotient:
        return Subquotient(self.cycles(n), self.boundaries(n))

    def graded_homology(self, p: int, n: int) -> Subquotient:
        """Gr_p of the filtration induced on H_n, computed without any pages."""
        Zc, Bd = self.cycles(n), self.boundaries(n)
        top = Zc.intersect(self.F(p, n)) + Bd
        bot = Zc.intersect(self.F(p - 1, n)) + Bd
        return Subquotient(top, bot)


# --------------------------------------------------------------------------
# abelian group bookkeeping


def _factor(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            q = 1
            while n % d == 0:
                n //= d
                q *= d
            out.append(q)
        d += 1
    if n > 1:
        out.append(n)
    return out


def canonical_form(orders: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    """(free rank, sorted prime-power cyclic factors) of a direct sum of cyclics."""
    free, pp = 0, []
    for d in orders:
        if d == 0:
            free += 1
        elif d > 1:
            pp += _factor(d)
    return free, tuple(sorted(pp))


def is_isomorphism(M: Matrix, src: Sequence[int], tgt: Sequence[int]) -> bool:
    """Is the map Z^k/diag(src) -> Z^m/diag(tgt) with matrix M bijective?"""
    k, m = len(src), len(tgt)
    tgt_rel = [[d * int(i == j) for i in range(m)] for j, d in enumerate(tgt) if d]
    src_rel = Lattice.span([[d * int(i == j) for i in range(k)] for j, d in enumerate(src) if d], k)
    cols = transpose(M) if M and k else []
    if Lattice.span(cols + tgt_rel, m) != Lattice.full(m):
        return False
    if m == 0:
        return src_rel == Lattice.full(k)
    ker = preimage(M, Lattice.span(tgt_rel, m), k)
    return ker == src_rel


# --------------------------------------------------------------------------
# pages


@dataclass
class SpectralSequencePage:
    r: int
    groups: dict[tuple[int, int], list[int]]   # (p, n) -> cyclic orders
    differentials: dict[tuple[int, int], Matrix]  # (p, n) -> matrix of d^r in generator coordinates

    def table(self) -> dict[tuple[int, int], list[int]]:
        """Keyed by (p, q) with q = n - p."""
        return {(p, n - p): g for (p, n), g in self.groups.items()}


class SpectralSequence:
    """All pages of a filtered complex, with built-in consistency checks."""

    def __init__(self, F: FilteredComplex, validate: bool = True):
        if validate:
            F.validate()
        self.F = F
        self._Z: dict[tuple[int, int, int], Lattice] = {}
        self._E: dict[tuple[int, int, int], Subquotient] = {}

    @property
    def r_infinity(self) -> int:
        return self.F.top - self.F.bottom + 1

    def Zr(self, r: int, p: int, n: int) -> Lattice:
        F = self.F
        key = (max(r, 0), p, n)
        if key not in self._Z:
            if r <= 0 or F.dim(n - 1) == 0:
                lat = F.F(p, n)
            else:
                pre = preimage(F.d(n), F.F(p - r, n - 1), F.dim(n))
                lat = F.F(p, n).intersect(pre)
            self._Z[key] = lat
        return self._Z[key]

    def Br(self, r: int, p: int, n: int) -> Lattice:
        """d Z^r_{p+r} + R_n, the boundaries that die by page r+1 at level p."""
        F = self.F
        gens = list(F.rels.get(n, []))
        if F.dim(n + 1):
            src = self.Zr(r, p + r, n + 1)
            dn = F.d(n + 1)
            gens += [matvec(dn, b) for b in src.basis]
        return Lattice.span(gens, F.dim(n))

    def E(self, r: int, p: int, n: int) -> Subquotient:
        r = min(r, self.r_infinity)
        key = (r, p, n)
        if key not in self._E:
            top = self.Zr(r, p, n)
            bot = self.Zr(r - 1, p - 1, n) + self.Br(r - 1, p, n)
            self._E[key] = Subquotient(top, bot)
        return self._E[key]

    def bidegrees(self) -> list[tuple[int, int]]:
        """Bidegrees where E^0 can be nonzero: some generator enters at level p."""
        F = self.F
        return [(p, n) for n in F.degrees() for p in range(F.bottom + 1, F.top + 1)
                if F.new_gens.get(n, {}).get(p)]

    def differential(self, r: int, p: int, n: int) -> Matrix:
        """d^r: E^r_{p,n} -> E^r_{p-r,n-1} in generator coordinates (rows = target)."""
        src = self.E(r, p, n)
        if self.F.dim(n - 1) == 0 or p - r <= self.F.bottom:
            return []
        tgt = self.E(r, p - r, n - 1)
        dn = self.F.d(n)
        cols = [list(tgt.coords(matvec(dn, x))) for x in src.reps]
        return [[c[i] for c in cols] for i in range(len(tgt))] if cols else [[] for _ in range(len(tgt))]

    def page(self, r: int) -> SpectralSequencePage:
        groups, diffs = {}, {}
        for p, n in self.bidegrees():
            groups[(p, n)] = self.E(r, p, n).orders
            diffs[(p, n)] = self.differential(r, p, n)
        return SpectralSequencePage(r, groups, diffs)

    def pages(self, max_page: int, start: int = 0) -> list[SpectralSequencePage]:
        return [self.page(r) for r in range(start, max_page + 1)]

    def e_infinity(self) -> dict[tuple[int, int], list[int]]:
        return {(p, n): self.E(self.r_infinity, p, n).orders for p, n in self.bidegrees()}

    def collapse_page(self) -> int:
        """First r with E^r = E^infinity in every bidegree (as groups)."""
        inf = {k: canonical_form(v) for k, v in self.e_infinity().items()}
        for r in range(0, self.r_infinity + 1):
            if all(canonical_form(self.E(r, p, n).orders) == inf[(p, n)] for p, n in self.bidegrees()):
                return r
        return self.r_infinity

    # ---- checks

    def check_d_squared(self, r: int) -> bool:
        for p, n in self.bidegrees():
            if p - 2 * r <= self.F.bottom or self.F.dim(n - 2) == 0:
                continue
            a = self.differential(r, p, n)
            b = self.differential(r, p - r, n - 1)
            tgt = self.E(r, p - 2 * r, n - 2)
            if not a or not b or not tgt.orders:
                continue
            src = self.E(r, p, n)
            for j in range(len(src)):
                col = [a[i][j] for i in range(len(a))]
                img = matvec(b, col)
                if any((x % d if d else x) for x, d in zip(img, tgt.orders)):
                    return False
        return True

    def check_next_page(self, r: int) -> bool:
        """E^{r+1} ≅ H(E^r, d^r) in every bidegree."""
        for p, n in self.bidegrees():
            mid = self.E(r, p, n)
            ins = self.E(r, p + r, n + 1) if p + r <= self.F.top and self.F.dim(n + 1) else None
            outs = self.E(r, p - r, n - 1) if p - r > self.F.bottom and self.F.dim(n - 1) else None
            dims = {0: len(mid)}
            diff, rels = {}, {0: _diag_rels(mid.orders)}
            if ins is not None:
                dims[1] = len(ins)
                rels[1] = _diag_rels(ins.orders)
                diff[1] = self.differential(r, p + r, n + 1) if len(ins) and len(mid) else []
                if not diff[1]:
                    diff[1] = [[0] * len(ins) for _ in range(len(mid))]
            if outs is not None:
                dims[-1] = len(outs)
                rels[-1] = _diag_rels(outs.orders)
                diff[0] = self.differential(r, p, n) if len(mid) and len(outs) else []
                if not diff[0]:
                    diff[0] = [[0] * len(mid) for _ in range(len(outs))]
            h = PresentedComplex(dims, diff, rels).homology(0).orders
            if canonical_form(h) != canonical_form(self.E(r + 1, p, n).orders):
                return False
        return True

    def check_convergence(self) -> bool:
        """E^infinity_{p,n} ≅ Gr_p H_n for all bidegrees."""
        for p, n in self.bidegrees():
            a = canonical_form(self.E(self.r_infinity, p, n).orders)
            b = canonical_form(self.F.graded_homology(p, n).orders)
            if a != b:
                return False
        return True

    def leibniz_defect(self, r: int, mult: Callable[[int, Vec, int, Vec], Vec],
                       sign: Callable[[int], int],
                       x: tuple[int, int, Vec], y: tuple[int, int, Vec]) -> tuple[int, ...]:
        """Coordinates of d^r(xy) - d^r(x) y - sign(n_x) x d^r(y) in E^r.

        x and y are (p, n, vector) with vector in Z^r_{p,n}; ``mult(n1, v1, n2, v2)``
        multiplies chains and lands in degree n1 + n2.
        """
        (p1, n1, v1), (p2, n2, v2) = x, y
        dn = self.F.d
        xy = mult(n1, v1, n2, v2)
        lhs = matvec(dn(n1 + n2), xy)
        a = mult(n1 - 1, matvec(dn(n1), v1), n2, v2)
        b = mult(n1, v1, n2 - 1, matvec(dn(n2), v2))
        diffv = [u - s - sign(n1) * t for u, s, t in zip(lhs, a, b)]
        tgt = self.E(r, p1 + p2 - r, n1 + n2 - 1)
        return tgt.coords(diffv)


def _diag_rels(orders: Sequence[int]) -> list[Vec]:
    k = len(orders)
    return [[d * int(i == j) for i in range(k)] for j, d in enumerate(orders) if d]


# --------------------------------------------------------------------------
# Day convolution and associated graded


def _tensor_vec(u: Sequence[int], v: Sequence[int]) -> Vec:
    return [a * b for a in u for b in v]


def day_tensor(F: FilteredComplex, G: FilteredComplex) -> FilteredComplex:
    """F (x) G with level s generated by F_i (x) G_j, i + j = s.

    The differential is d (x) 1 + (-1)^a 1 (x) d on C_a (x) D_b.
    """
    dims: dict[int, int] = {}
    blocks: dict[int, list[tuple[int, int, int]]] = {}
    for a in F.degrees():
        for b in G.degrees():
            n = a + b
            off = dims.get(n, 0)
            blocks.setdefault(n, []).append((a, b, off))
            dims[n] = off + F.dim(a) * G.dim(b)

    def embed(n: int, a: int, b: int, vec: Vec) -> Vec:
        out = [0] * dims[n]
        for aa, bb, off in blocks[n]:
            if (aa, bb) == (a, b):
                out[off:off + len(vec)] = vec
        return out

    diff: dict[int, Matrix] = {}
    for n in dims:
        if n - 1 not in dims:
            continue
        M = [[0] * dims[n] for _ in range(dims[n - 1])]
        for a, b, off in blocks[n]:
            da, db = F.dim(a), G.dim(b)
            for ka in range(da):
                for kb in range(db):
                    col = off + ka * db + kb
                    if F.dim(a - 1):
                        src = F.d(a)
                        for _, (aa, bb, off2) in enumerate(blocks[n - 1]):
                            if (aa, bb) == (a - 1, b):
                                for i in range(F.dim(a - 1)):
                                    if src[i][ka]:
                                        M[off2 + i * db + kb][col] += src[i][ka]
                    if G.dim(b - 1):
                        src = G.d(b)
                        s = (-1) ** a
                        for aa, bb, off2 in blocks[n - 1]:
                            if (aa, bb) == (a, b - 1):
                                dbb = G.dim(b - 1)
                                for j in range(dbb):
                                    if src[j][kb]:
                                        M[off2 + ka * dbb + j][col] += s * src[j][kb]
        diff[n] = M

    rels: dict[int, list[Vec]] = {}
    for n in dims:
        rr = []
        for a, b, off in blocks[n]:
            eyeF = [[int(i == k) for i in range(F.dim(a))] for k in range(F.dim(a))]
            eyeG = [[int(i == k) for i in range(G.dim(b))] for k in range(G.dim(b))]
            for r in F.rels.get(a, []):
                rr += [embed(n, a, b, _tensor_vec(r, e)) for e in eyeG]
            for r in G.rels.get(b, []):
                rr += [embed(n, a, b, _tensor_vec(e, r)) for e in eyeF]
        rels[n] = rr

    bottom = F.bottom + G.bottom + 1
    top = F.top + G.top
    new: dict[int, dict[int, list[Vec]]] = {}
    for n in dims:
        for a, b, off in blocks[n]:
            for i, gi in F.new_gens.get(a, {}).items():
                for j, gj in G.new_gens.get(b, {}).items():
                    s = i + j
                    for u in gi:
                        for v in gj:
                            new.setdefault(n, {}).setdefault(s, []).append(embed(n, a, b, _tensor_vec(u, v)))
    return FilteredComplex(dims, diff, new, bottom, top, rels, f"({F.name})⊗({G.name})")


def associated_graded(F: FilteredComplex) -> dict[tuple[int, int], list[int]]:
    """(p, n) -> cyclic orders of F_p C_n / F_{p-1} C_n."""
    out = {}
    for n in F.degrees():
        for p in range(F.bottom + 1, F.top + 1):
            out[(p, n)] = Subquotient(F.F(p, n), F.F(p - 1, n)).orders
    return out


def graded_tensor(gr1: dict[tuple[int, int], list[int]], gr2: dict[tuple[int, int], list[int]]
                  ) -> dict[tuple[int, int], tuple[int, tuple[int, ...]]]:
    """Canonical forms of sum_{i+j=s, a+b=n} Gr_i,a (x) Gr_j,b."""
    acc: dict[tuple[int, int], list[int]] = {}
    for (i, a), g1 in gr1.items():
        for (j, b), g2 in gr2.items():
            lst = acc.setdefault((i + j, a + b), [])
            for x in g1:
                for y in g2:
                    if x == 0 and y == 0:
                        lst.append(0)
                    elif x == 0 or y == 0:
                        lst.append(x or y)
                    else:
                        lst.append(gcd(x, y))
    return {k: canonical_form(v) for k, v in acc.items()}


# --------------------------------------------------------------------------
# filtered maps and the comparison principle


@dataclass
class FilteredMap:
    source: FilteredComplex
    target: FilteredComplex
    matrices: dict[int, Matrix]  # f_n: C_n(source) -> C_n(target)

    def f(self, n: int) -> Matrix:
        m = self.matrices.get(n)
        if m is None:
            return [[0] * self.source.dim(n) for _ in range(self.target.dim(n))]
        return m

    def validate(self) -> None:
        S, T = self.source, self.target
        for n in set(S.degrees()) | set(T.degrees()):
            if not S.dim(n) or not T.dim(n):
                continue
            f = self.f(n)
            for r in S.rels.get(n, []):
                if not T.relations(n).contains(matvec(f, r)):
                    raise FiltrationError(f"map does not respect relations in degree {n}")
            for p in S.levels():
                tl = T.F(p, n)
                for b in S.F(p, n).basis:
                    if not tl.contains(matvec(f, b)):
                        raise FiltrationError(f"map is not filtration preserving at level {p}, degree {n}")
            if S.dim(n - 1) and T.dim(n - 1):
                fd = [matvec(self.f(n - 1), [row[k] for row in S.d(n)]) for k in range(S.dim(n))]
                df = [matvec(T.d(n), [row[k] for row in f]) for k in range(S.dim(n))]
                rel = T.relations(n - 1)
                for u, v in zip(fd, df):
                    if not rel.contains([x - y for x, y in zip(u, v)]):
                        raise FiltrationError(f"map does not commute with d in degree {n}")
            elif S.dim(n - 1) and not T.dim(n - 1):
                pass
            elif T.dim(n - 1):
                df = [matvec(T.d(n), [row[k] for row in f]) for k in range(S.dim(n))]
                rel = T.relations(n - 1)
                if any(not rel.contains(v) for v in df):
                    raise FiltrationError(f"map does not commute with d in degree {n}")


@dataclass
class CompareVerdict:
    e1_iso: bool
    abutment_iso: bool
    failing_e1: list[tuple[int, int]]
    failing_abutment: list[int]


def _map_iso(f: Matrix, src: Subquotient, tgt: Subquotient) -> bool:
    cols = [list(tgt.coords(matvec(f, x))) for x in src.reps] if f else [[0] * len(tgt) for _ in src.reps]
    M = [[c[i] for c in cols] for i in range(len(tgt))]
    return is_isomorphism(M, src.orders, tgt.orders)


def compare(phi: FilteredMap) -> CompareVerdict:
    """Report separately whether phi is an iso on E^1 and on total homology."""
    phi.validate()
    S, T = phi.source, phi.target
    ssS, ssT = SpectralSequence(S), SpectralSequence(T)
    lo = min(S.bottom, T.bottom)
    hi = max(S.top, T.top)
    degrees = sorted(set(S.degrees()) | set(T.degrees()))
    bad_e1, bad_h = [], []
    for n in degrees:
        for p in range(lo + 1, hi + 1):
            src = ssS.E(1, p, n) if S.dim(n) else None
            tgt = ssT.E(1, p, n) if T.dim(n) else None
            so = src.orders if src else []
            to = tgt.orders if tgt else []
            if src is None or tgt is None:
                if so or to:
                    bad_e1.append((p, n))
                continue
            if not _map_iso(phi.f(n), src, tgt):
                bad_e1.append((p, n))
        hs = S.homology(n) if S.dim(n) else None
        ht = T.homology(n) if T.dim(n) else None
        if hs is None or ht is None:
            if (hs and hs.orders) or (ht and ht.orders):
                bad_h.append(n)
            continue
        if not _map_iso(phi.f(n), hs, ht):
            bad_h.append(n)
    return CompareVerdict(not bad_e1, not bad_h, bad_e1, bad_h)


# --------------------------------------------------------------------------
# random instances


def _elementary_pair(rng, n: int, steps: int, bound: int = 2) -> tuple[Matrix, Matrix]:
    """A random unimodular S and its inverse, as a product of row additions."""
    S = [[int(i == j) for j in range(n)] for i in range(n)]
    Si = [row[:] for row in S]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([c for c in range(-bound, bound + 1) if c])
        for k in range(n):
            S[i][k] += c * S[j][k]
        for k in range(n):
            Si[k][j] -= c * Si[k][i]
    return S, Si


def _mul(A: Matrix, B: Matrix, rows: int, cols: int) -> Matrix:
    inner = len(B)
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)] for i in range(rows)]


@dataclass
class _Pieces:
    dims: dict[int, int] = field(default_factory=dict)
    levels: dict[int, list[int]] = field(default_factory=dict)
    entries: list[tuple[int, int, int, int]] = field(default_factory=list)  # (n, row, col, value)

    def add(self, n: int, level: int) -> int:
        k = self.dims.get(n, 0)
        self.dims[n] = k + 1
        self.levels.setdefault(n, []).append(level)
        return k

    def complex(self, torsion: int | None, name: str) -> FilteredComplex:
        diff: dict[int, Matrix] = {}
        for n in self.dims:
            if self.dims.get(n - 1):
                diff[n] = [[0] * self.dims[n] for _ in range(self.dims[n - 1])]
        for n, r, c, v in self.entries:
            diff[n][r][c] += v
        rels = {}
        if torsion:
            rels = {n: [[torsion * int(i == j) for i in range(d)] for j in range(d)] for n, d in self.dims.items()}
        F = FilteredComplex.from_levels(self.dims, diff, self.levels, rels, name)
        return F


def _random_pieces(rng, pieces: _Pieces, degrees: Sequence[int], max_rank: int, levels: int,
                   kinds: Sequence[str]) -> None:
    lo, hi = 0, levels - 1
    for _ in range(rng.randint(1, 2 * max_rank)):
        kind = rng.choice(kinds)
        if kind == "point":
            n = rng.choice(degrees)
            if pieces.dims.get(n, 0) < max_rank:
                pieces.add(n, rng.randint(lo, hi))
        else:
            n = rng.choice([d for d in degrees if d - 1 in degrees] or [degrees[0]])
            if n - 1 not in degrees:
                continue
            if pieces.dims.get(n, 0) >= max_rank or pieces.dims.get(n - 1, 0) >= max_rank:
                continue
            ps = rng.randint(lo, hi)
            pt = ps if kind == "flat" else rng.randint(lo, ps)
            m = 1 if kind in ("flat", "drop") else rng.choice([1, 1, 2, 3])
            c = pieces.add(n, ps)
            r = pieces.add(n - 1, pt)
            pieces.entries.append((n, r, c, m))


def transport(F: FilteredComplex, S: dict[int, tuple[Matrix, Matrix]], name: str = "") -> FilteredComplex:
    """The same filtered complex written in the basis changed by S[n] = (matrix, inverse)."""
    diff = {}
    for n, d in F.diff.items():
        if not F.dim(n) or not F.dim(n - 1):
            continue
        A, _ = S[n - 1]
        _, Bi = S[n]
        diff[n] = _mul(_mul(A, d, F.dim(n - 1), F.dim(n)), Bi, F.dim(n - 1), F.dim(n))
    new = {n: {p: [matvec(S[n][0], g) for g in gs] for p, gs in lv.items()} for n, lv in F.new_gens.items()}
    rels = {n: [matvec(S[n][0], r) for r in rs] for n, rs in F.rels.items()}
    return FilteredComplex(dict(F.dims), diff, new, F.bottom, F.top, rels, name or F.name)


def random_filtered_complex(rng, degrees: Sequence[int] = (0, 1, 2), max_rank: int = 6, levels: int = 4,
                            torsion: int | None = None, scramble: int = 6) -> FilteredComplex:
    """A bounded filtered complex with at most ``levels`` filtration jumps.

    Built from elementary pieces (single generators and arrows x -> m y) and
    then written in a random unimodular basis, so filtration levels are
    general lattices rather than coordinate subspaces.
    """
    pieces = _Pieces()
    _random_pieces(rng, pieces, list(degrees), max_rank, levels, ["point", "arrow", "arrow", "flat"])
    if not pieces.dims:
        pieces.add(degrees[0], 0)
    F = pieces.complex(torsion, "random")
    S = {n: _elementary_pair(rng, d, scramble) for n, d in F.dims.items()}
    G = transport(F, S)
    G.bottom, G.top = -1, levels - 1
    return G


def random_quasi_iso(rng, degrees: Sequence[int] = (0, 1, 2), max_rank: int = 4, levels: int = 4,
                     torsion: int | None = None) -> FilteredMap:
    """phi: F -> F' (+) K with F' a rebased copy of F and K built from acyclic arrows.

    K uses arrows x -> y with y at the same level as x (E^1-acyclic) or at a
    lower level (acyclic, but visible on E^1), so phi is always a
    quasi-isomorphism and sometimes an E^1-isomorphism.
    """
    base = _Pieces()
    _random_pieces(rng, base, list(degrees), max_rank, levels, ["point", "arrow", "flat"])
    if not base.dims:
        base.add(degrees[0], 0)
    F0 = base.complex(torsion, "F")
    extra = _Pieces()
    _random_pieces(rng, extra, list(degrees), 2, levels, ["flat", "flat", "drop"])
    allp = _Pieces({n: base.dims.get(n, 0) for n in set(base.dims) | set(extra.dims)},
                   {n: list(base.levels.get(n, [])) for n in set(base.dims) | set(extra.dims)},
                   list(base.entries))
    for n in extra.dims:
        for lv in extra.levels[n]:
            allp.add(n, lv)
    for n, r, c, v in extra.entries:
        allp.entries.append((n, base.dims.get(n - 1, 0) + r, base.dims.get(n, 0) + c, v))
    G0 = allp.complex(torsion, "G")
    SF = {n: _elementary_pair(rng, d, 4) for n, d in F0.dims.items()}
    SG = {n: _elementary_pair(rng, d, 4) for n, d in G0.dims.items()}
    F, G = transport(F0, SF), transport(G0, SG)
    for X in (F, G):
        X.bottom, X.top = -1, levels - 1
    mats = {}
    for n in F.dims:
        if not F.dim(n):
            continue
        incl = [[int(i == j) for j in range(F.dim(n))] for i in range(G.dim(n))]
        mats[n] = _mul(_mul(SG[n][0], incl, G.dim(n), F.dim(n)), SF[n][1], G.dim(n), F.dim(n))
    return FilteredMap(F, G, mats)


def counterexample_map() -> FilteredMap:
    """A quasi-isomorphism that is not an E^1-isomorphism.

    Source: Z -> Z (identity) from degree 1 at level 1 to degree 0 at level 0,
    which is acyclic but has E^1 = Z (+) Z.  Target: the zero complex.
    """
    F = FilteredComplex.from_levels({0: 1, 1: 1}, {1: [[1]]}, {0: [0], 1: [1]}, name="arrow")
    G = FilteredComplex({0: 0, 1: 0}, {}, {}, -1, 1, {}, "zero")
    F.bottom, F.top = -1, 1
    return FilteredMap(F, G, {0: [], 1: []})
