"""Tate spectral sequences for periodic topological cyclic homology of F_p, Witt assembly and Kunneth.

The E^2-term is k[vbar^±, t] (circle) or k[vbar^±, t, b]/b^2 (C_{p^r}),
vbar in bidegree (-2, 0), t in (0, 2), b in (1, 0), optionally tensored with a
module M = sum of cyclic k[vbar^±, t]-modules.  Bidegree (p, j) has total
degree n = p + j, and the only differential is d^{2r+1} b = vbar^r t^r,
extended by the Leibniz rule (module generators are permanent cycles).

The model is a filtered complex over Z with p in every relation.  Because
the t-tower is infinite, it is cut at t^C.  The part {c > C} is a
subcomplex, so the cut is a quotient complex; a class with c <= C - r has
all of its incoming and outgoing differentials inside the cut, so its E^infinity
group is exact.  run_tate_ss recomputes at C + 1 and compares those
bidegrees as a certificate.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .exact_coeff import from_teichmuller_digits, teichmuller, teichmuller_digits
from .filtered_ss import FilteredComplex, SpectralSequence, canonical_form
from .graded_algebra import GradedModulePresentation, PresentationError, TorTable, laurent_k, laurent_Q, laurent_W, tor


class TateSSError(ValueError):
    pass


@dataclass(frozen=True)
class ModuleSummand:
    """k[vbar^±, t] / t^e on a generator of internal degree ``shift`` (e = None: free)."""

    shift: int = 0
    t_exp: int | None = None

    def cap(self, C: int) -> int:
        return C if self.t_exp is None else min(C, self.t_exp - 1)


@dataclass
class TateSSInput:
    group: str = "cyclic"          # "cyclic" (C_{p^r}) or "circle"
    p: int = 3
    r: int = 1
    summands: list[ModuleSummand] = field(default_factory=lambda: [ModuleSummand()])

    def __post_init__(self) -> None:
        if self.group not in ("cyclic", "circle"):
            raise TateSSError(f"unknown group {self.group!r}")
        if self.p < 2 or any(self.p % q == 0 for q in range(2, int(math.isqrt(self.p)) + 1)):
            raise TateSSError(f"{self.p} is not prime")
        if self.group == "cyclic" and self.r < 1:
            raise TateSSError("C_{p^r} needs r >= 1")
        if not self.summands:
            raise TateSSError("module has no generators")
        for s in self.summands:
            if s.t_exp is not None and s.t_exp < 1:
                raise TateSSError("t-exponents must be positive")

    @property
    def exterior(self) -> bool:
        return self.group == "cyclic"

    @property
    def page_of_differential(self) -> int:
        return 2 * self.r + 1 if self.exterior else 0

    @staticmethod
    def from_presentation(group: str, p: int, r: int, M: GradedModulePresentation | dict) -> "TateSSInput":
        """Read a k[vbar^±, t]-module given by monomial relations t^e g = 0."""
        if isinstance(M, dict):
            if not isinstance(M.get("generators"), list):
                raise TateSSError("module input must list finitely many generators")
            M = GradedModulePresentation.from_json(M)
        if M.ring.name != "k[vbar^±,t]":
            raise TateSSError(f"module must be over k[vbar^±,t], not {M.ring.name}")
        exps: dict[int, int | None] = {k: None for k in range(len(M.gens))}
        for rel in M.relations:
            if len(rel) != 1:
                raise TateSSError("only monomial relations t^e g = 0 are supported")
            ((g, mono), c), = rel.items()
            if c % p == 0:
                continue
            e = M.ring.mono_to_dict(mono).get("t", 0)
            exps[g] = e if exps[g] is None else min(exps[g], e)
        summands = []
        for k, (_, deg) in enumerate(M.gens):
            if deg[0] % 2:
                raise TateSSError("generators must sit at even vbar-filtration")
            if exps[k] == 0:
                continue
            summands.append(ModuleSummand(deg[0] + deg[1], exps[k]))
        if not summands:
            raise TateSSError("module is zero")
        return TateSSInput(group, p, r, summands)


Basis = tuple[int, int, int, int]   # (summand, a, c, eps): x_k vbar^a t^c b^eps


class TateSSModel:
    """The cut filtered complex for total degrees lo-1 .. hi+1 and t-exponents <= C."""

    def __init__(self, inp: TateSSInput, lo: int, hi: int, C: int):
        self.inp, self.lo, self.hi, self.C = inp, lo, hi, C
        self.r_d = inp.r if inp.exterior else 0
        eps_range = (0, 1) if inp.exterior else (0,)
        self.basis: dict[int, list[Basis]] = {}
        for n in range(lo - 1, hi + 2):
            cells = []
            for k, s in enumerate(inp.summands):
                for eps in eps_range:
                    for c in range(s.cap(C) + 1):
                        rest = n - s.shift - 2 * c - eps
                        if rest % 2 == 0:
                            cells.append((k, -rest // 2, c, eps))
            self.basis[n] = cells
        self.index = {n: {b: i for i, b in enumerate(cells)} for n, cells in self.basis.items()}
        self.complex = self._build()

    @staticmethod
    def level(b: Basis) -> int:
        return -2 * b[1] + b[3]

    def degree(self, b: Basis) -> int:
        k, a, c, eps = b
        return self.inp.summands[k].shift - 2 * a + 2 * c + eps

    def d_basis(self, b: Basis) -> Basis | None:
        k, a, c, eps = b
        if not eps:
            return None
        r = self.inp.r
        tgt = (k, a + r, c + r, 0)
        return tgt if c + r <= self.inp.summands[k].cap(self.C) else None

    def _build(self) -> FilteredComplex:
        p = self.inp.p
        dims = {n: len(cells) for n, cells in self.basis.items()}
        diff = {}
        for n, cells in self.basis.items():
            if n - 1 not in self.basis or not cells or not self.basis[n - 1]:
                continue
            M = [[0] * len(cells) for _ in self.basis[n - 1]]
            for j, b in enumerate(cells):
                t = self.d_basis(b)
                if t is not None:
                    M[self.index[n - 1][t]][j] = 1
            diff[n] = M
        levels = {n: [self.level(b) for b in cells] for n, cells in self.basis.items()}
        rels = {n: [[p * int(i == j) for i in range(d)] for j in range(d)] for n, d in dims.items()}
        return FilteredComplex.from_levels(dims, diff, levels, rels, name="tate-ss")

    def trusted(self, p: int, n: int) -> bool:
        """Every cell at (p, n) has c <= C - r, so its E^infinity is exact."""
        j = n - p
        for s in self.inp.summands:
            if s.t_exp is not None and s.t_exp - 1 <= self.C:
                continue
            c = (j - s.shift) // 2
            if (j - s.shift) % 2 == 0 and c > self.C - self.r_d:
                return False
        return True

    def multiply(self, n1: int, v1: Sequence[int], n2: int, v2: Sequence[int]) -> list[int]:
        """Product of chains for a single free summand (the ring itself)."""
        n = n1 + n2
        out = [0] * len(self.basis.get(n, []))
        for i, c1 in enumerate(v1):
            if not c1:
                continue
            _, a1, t1, e1 = self.basis[n1][i]
            for j, c2 in enumerate(v2):
                if not c2:
                    continue
                _, a2, t2, e2 = self.basis[n2][j]
                if e1 and e2:
                    continue
                b = (0, a1 + a2, t1 + t2, e1 + e2)
                if b in self.index.get(n, {}):
                    out[self.index[n][b]] += c1 * c2
        return out


@dataclass
class TateSSReport:
    inp: TateSSInput
    window: tuple[int, int]
    cap: int
    pages: dict[int, dict[tuple[int, int], list[int]]]
    e_infinity: dict[tuple[int, int], list[int]]
    abutment: dict[int, int]                  # total degree -> F_p-length
    target: dict[int, int]
    collapse_page: int
    certificate: bool
    leibniz: bool
    converges: bool
    generators: list[tuple[int, int, int]]    # (summand, c, eps) surviving classes
    generator_bound: int
    finite: bool

    @property
    def matches_target(self) -> bool:
        return self.abutment == self.target

    @property
    def ok(self) -> bool:
        return self.matches_target and self.certificate and self.leibniz and self.converges and self.finite


def _length(orders: Sequence[int], p: int) -> int:
    """F_p-length of a finite p-group given by cyclic orders."""
    total = 0
    for d in orders:
        if d == 0:
            raise TateSSError("unexpected free class in an F_p-linear model")
        total += round(math.log(d, p))
    return total


def _target_lengths(inp: TateSSInput, lo: int, hi: int, N: int) -> dict[int, int]:
    """k-lengths the abutment must have in each total degree."""
    out = {}
    for n in range(lo, hi + 1):
        total = 0
        for s in inp.summands:
            if (n - s.shift) % 2:
                continue
            e = s.t_exp
            if inp.group == "circle":
                total += min(N, e) if e else N
            else:
                r = inp.r
                total += min(r, e) if e else r
        for s in inp.summands:
            if inp.group == "cyclic" and s.t_exp is not None and (n - s.shift - 1) % 2 == 0:
                total += min(inp.r, s.t_exp)
        out[n] = total
    return out


def monomial_leibniz(inp: TateSSInput, lo: int, hi: int) -> bool:
    """d(xy) = d(x) y + (-1)^{|x|} x d(y) on monomials vbar^a t^c b^eps of the ring."""
    r = inp.r
    mons = []
    for n in range(lo, hi + 1):
        for c in range(0, hi - lo + 2 * r + 2):
            for eps in ((0, 1) if inp.exterior else (0,)):
                rest = n - 2 * c - eps
                if rest % 2 == 0:
                    mons.append((-rest // 2, c, eps))

    def d(m):
        a, c, eps = m
        return {(a + r, c + r, 0): 1} if eps and inp.exterior else {}

    def mul(x, y):
        if x[2] and y[2]:
            return None
        return (x[0] + y[0], x[1] + y[1], x[2] + y[2])

    def times(poly, m, left):
        out = {}
        for k, c in poly.items():
            pr = mul(m, k) if left else mul(k, m)
            if pr is not None:
                out[pr] = out.get(pr, 0) + c
        return out

    p = inp.p
    for x in mons:
        for y in mons:
            xy = mul(x, y)
            lhs = d(xy) if xy is not None else {}
            rhs = times(d(x), y, left=False)
            deg_x = -2 * x[0] + 2 * x[1] + x[2]
            for k, c in times(d(y), x, left=True).items():
                rhs[k] = rhs.get(k, 0) + (-1) ** (deg_x % 2) * c
            keys = set(lhs) | set(rhs)
            if any((lhs.get(k, 0) - rhs.get(k, 0)) % p for k in keys):
                return False
    return True


def page_leibniz(model: TateSSModel, ss: SpectralSequence, per_degree: int = 3) -> bool:
    """Leibniz defect of d^{2r+1} on products of basis cells of the ring, read in E^{2r+1}."""
    inp = model.inp
    if not inp.exterior or inp.summands != [ModuleSummand()]:
        return True
    rr = inp.page_of_differential
    degs = [n for n in model.basis if n - 1 in model.basis and model.basis[n]]
    for n1 in degs:
        for n2 in degs:
            n = n1 + n2
            if n not in degs:
                continue
            for i, b1 in enumerate(model.basis[n1][:per_degree]):
                for j, b2 in enumerate(model.basis[n2][:per_degree]):
                    p = model.level(b1) + model.level(b2)
                    if p - rr <= model.complex.bottom or not model.complex.new_gens[n].get(p):
                        continue
                    v1 = [int(k == i) for k in range(len(model.basis[n1]))]
                    v2 = [int(k == j) for k in range(len(model.basis[n2]))]
                    defect = ss.leibniz_defect(rr, model.multiply, lambda m: (-1) ** (m % 2),
                                               (model.level(b1), n1, v1), (model.level(b2), n2, v2))
                    if any(defect):
                        return False
    return True


def default_cap(inp: TateSSInput, N: int = 8) -> int:
    if inp.group == "circle":
        return N - 1
    es = [s.t_exp for s in inp.summands if s.t_exp is not None]
    return max([2 * inp.r] + [e + inp.r for e in es]) + 1


def run_tate_ss(inp: TateSSInput, window: tuple[int, int] = (-6, 6), max_page: int | None = None,
                N: int = 8, cap: int | None = None, certify: bool = True) -> TateSSReport:
    lo, hi = window
    if lo > hi:
        raise TateSSError("empty window")
    C = default_cap(inp, N) if cap is None else cap
    if inp.group == "circle":
        C = min(C, N - 1)
    model = TateSSModel(inp, lo, hi, C)
    ss = SpectralSequence(model.complex)
    in_window = [(p, n) for (p, n) in ss.bidegrees() if lo <= n <= hi]
    last = max_page if max_page is not None else max(2, inp.page_of_differential + 1)
    pages = {r: {(p, n - p): ss.E(r, p, n).orders for (p, n) in in_window if ss.E(r, p, n).orders}
             for r in range(2, last + 1)}
    einf = {(p, n - p): ss.E(ss.r_infinity, p, n).orders for (p, n) in in_window
            if model.trusted(p, n) and ss.E(ss.r_infinity, p, n).orders}
    abut = {n: 0 for n in range(lo, hi + 1)}
    for (p, j), orders in einf.items():
        abut[p + j] += _length(orders, inp.p)

    # the first page agreeing with E^infinity on the trusted part of the window
    collapse = ss.r_infinity
    for r in range(2, ss.r_infinity + 1):
        if all(canonical_form(ss.E(r, p, n).orders) == canonical_form(ss.E(ss.r_infinity, p, n).orders)
               for (p, n) in in_window if model.trusted(p, n)):
            collapse = r
            break

    cert = True
    if certify and inp.group != "circle":
        m2 = TateSSModel(inp, lo, hi, C + 1)
        ss2 = SpectralSequence(m2.complex)
        for (p, n) in in_window:
            if model.trusted(p, n):
                a = canonical_form(ss.E(ss.r_infinity, p, n).orders)
                b = canonical_form(ss2.E(ss2.r_infinity, p, n).orders)
                if a != b:
                    cert = False
                    break

    leib = monomial_leibniz(inp, lo, hi) and page_leibniz(model, ss)

    gens: set[tuple[int, int, int]] = set()
    for (p, n) in in_window:
        if not model.trusted(p, n):
            continue
        E = ss.E(ss.r_infinity, p, n)
        for rep in E.reps:
            for coeff, b in zip(rep, model.basis[n]):
                if coeff % inp.p:
                    gens.add((b[0], b[2], b[3]))
    bound = max((s.t_exp if s.t_exp is not None else max(inp.r, 1)) for s in inp.summands) - 1
    if inp.group == "circle":
        bound = C
    finite = all(c <= bound for (_, c, _) in gens)
    return TateSSReport(inp, (lo, hi), C, pages, einf, abut, _target_lengths(inp, lo, hi, N), collapse, cert,
                        leib, ss.check_convergence(), sorted(gens), bound, finite)


# --------------------------------------------------------------------------
# Witt assembly


@dataclass
class WittGenerator:
    bidegree: tuple[int, int]   # (i_l, j_l)

    @property
    def degree(self) -> int:
        return sum(self.bidegree)


@dataclass
class WittFiltrationData:
    """Generators, offsets s_0 < s_1 < ... and per-target digit tables abar^m_l in F_p."""

    p: int
    N: int
    generators: list[WittGenerator]
    offsets: list[int]

    def __post_init__(self) -> None:
        if any(b <= a for a, b in zip(self.offsets, self.offsets[1:])):
            raise TateSSError("offsets must be strictly increasing")
        if self.N < 1:
            raise TateSSError("precision must be positive")


@dataclass
class WittTarget:
    bidegree: tuple[int, int]              # (i, j)
    digits: list[list[int]]                 # digits[l][m]


@dataclass
class WittLift:
    target: WittTarget
    coefficients: list[int]                 # one per generator, in Z/p^N
    partial_sums: list[list[int]]           # [l][m]
    cauchy: bool


def _exponent(data: WittFiltrationData, target: WittTarget, l: int, m: int) -> int | None:
    e2 = target.bidegree[1] - data.generators[l].bidegree[1] + data.offsets[m]
    return None if e2 % 2 or e2 < 0 else e2 // 2


def witt_lift(data: WittFiltrationData, targets: Sequence[WittTarget]) -> list[WittLift]:
    """Assemble sum_m omega(abar^m_l) p^{(j - j_l + s_m)/2} mod p^N for each generator."""
    p, N = data.p, data.N
    mod = p ** N
    out = []
    for tg in targets:
        if len(tg.digits) != len(data.generators):
            raise TateSSError("need one digit row per generator")
        d = sum(tg.bidegree)
        coeffs, partials, cauchy = [], [], True
        for l, row in enumerate(tg.digits):
            if len(row) > len(data.offsets):
                raise TateSSError("more digits than offsets")
            total, sums = 0, []
            for m, a in enumerate(row):
                a %= p
                e = _exponent(data, tg, l, m)
                if a and (e is None or (data.generators[l].degree - d) % 2):
                    raise TateSSError(f"nonzero digit at generator {l}, offset {data.offsets[m]} "
                                      "has an odd or negative exponent")
                if a and e < N:
                    total = (total + teichmuller(a, N, p).value * p ** e) % mod
                sums.append(total)
            coeffs.append(total)
            partials.append(sums)
            # p-adic Cauchy: y_m agrees with the limit modulo p^{ceil((j - j_l + s_{m+1})/2)}
            for m in range(len(row) - 1):
                e2 = tg.bidegree[1] - data.generators[l].bidegree[1] + data.offsets[m + 1]
                k = min(N, max(0, -(-e2 // 2)))
                if (sums[m] - total) % p ** k:
                    cauchy = False
        out.append(WittLift(tg, coeffs, partials, cauchy))
    return out


def witt_roundtrip(rng: random.Random, p: int, N: int, trials: int = 500) -> tuple[int, int]:
    """Random x in Z/p^N -> Teichmuller digits -> witt_lift -> x.  Returns (exact, cauchy) counts."""
    data = WittFiltrationData(p, N, [WittGenerator((0, 0))], [2 * m for m in range(N)])
    exact = cauchy = 0
    for _ in range(trials):
        x = rng.randrange(p ** N)
        digits = teichmuller_digits(x, p, N)
        (res,) = witt_lift(data, [WittTarget((0, 0), [digits])])
        exact += res.coefficients[0] == x
        cauchy += res.cauchy
    return exact, cauchy


def witt_assembly_bijective(p: int, N: int, rng: random.Random | None = None, samples: int = 2000) -> bool:
    """Digit tuples in F_p^N -> Z/p^N is a bijection (exhaustive when small, sampled otherwise)."""
    mod = p ** N
    if mod <= 20000:
        seen = set()
        for x in range(mod):
            digits = [(x // p ** i) % p for i in range(N)]
            seen.add(from_teichmuller_digits(digits, p, N))
        return len(seen) == mod
    rng = rng or random.Random(0)
    for _ in range(samples):
        digits = [rng.randrange(p) for _ in range(N)]
        if teichmuller_digits(from_teichmuller_digits(digits, p, N), p, N) != digits:
            return False
    return True


# --------------------------------------------------------------------------
# Kunneth


def base_change(M: GradedModulePresentation, target: str) -> GradedModulePresentation:
    """Move a W[v^±]-module to k[v^±] ("Fp") or to Q[v^±] ("Q")."""
    if M.ring.name != "W[v^±]":
        raise PresentationError("base change starts from W[v^±]")
    p = M.ring.coeff.p
    R = laurent_k(p) if target == "Fp" else laurent_Q()
    rels = M.relations
    if target == "Fp":
        rels = [{k: c % p for k, c in r.items() if c % p} for r in rels]
    return GradedModulePresentation(R, M.gens, rels)


@dataclass
class KunnethReport:
    tor: TorTable
    tor_fp: TorTable
    tor_q: TorTable
    two_column: bool          # Tor_{>=2} = 0
    collapses: bool
    fp_field: bool            # Tor_{>0} = 0 over k[v^±]
    q_field: bool             # Tor_{>0} = 0 over Q[v^±]

    @property
    def ok(self) -> bool:
        return self.two_column and self.collapses and self.fp_field and self.q_field


def kunneth_ss(MX: GradedModulePresentation, MY: GradedModulePresentation, window: Sequence[int],
               bound: int = 3) -> KunnethReport:
    """E^2 = Tor over W[v^±] with its F_p and rational shadows.

    A spectral sequence concentrated in two adjacent columns has no room
    for differentials, so it collapses at E^2 as soon as Tor_{>=2} = 0.
    """
    if MX.ring.name != "W[v^±]" or MY.ring.name != "W[v^±]":
        raise PresentationError("Kunneth inputs must be W[v^±]-modules")
    window = list(window)
    T = tor(MX, MY, bound, window)
    Tf = tor(base_change(MX, "Fp"), base_change(MY, "Fp"), bound, window)
    Tq = tor(base_change(MX, "Q"), base_change(MY, "Q"), bound, window)

    def vanishes(t: TorTable, s0: int) -> bool:
        return all(not v for (s, _), v in t.entries.items() if s >= s0)

    two = vanishes(T, 2)
    return KunnethReport(T, Tf, Tq, two, two, vanishes(Tf, 1), vanishes(Tq, 1))


def random_w_module(rng: random.Random, p: int, N: int, max_gens: int = 3) -> GradedModulePresentation:
    """A random finitely generated W[v^±]-module: generators in degrees 0, 1 with random relations."""
    R = laurent_W(p, N)
    k = rng.randint(1, max_gens)
    gens = [(f"g{i}", (rng.choice([0, 1, 2, -1]),)) for i in range(k)]
    rels = []
    for _ in range(rng.randint(0, k + 1)):
        g = rng.randrange(k)
        rel = {}
        for h in range(k):
            diff = gens[g][1][0] - gens[h][1][0]
            if diff % 2 == 0 and (h == g or rng.random() < 0.5):
                mono = R.mono(v=-diff // 2)
                rel[(h, mono)] = rng.choice([1, p, p * p, p ** 3, 2 * p, 0, 1 + p])
        if any(rel.values()):
            rels.append(rel)
    return GradedModulePresentation(R, gens, rels)
