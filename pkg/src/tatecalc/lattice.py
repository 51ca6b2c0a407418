"""Sublattices of Z^n, subquotients and homology of presented complexes.

A finitely generated abelian group is carried as Z^n / L with L a sublattice.
A subgroup of it is carried by its full preimage in Z^n, so every
subquotient that shows up in a spectral sequence or a homology computation
is a pair of lattices ``bottom <= top`` inside a common Z^n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .exact_coeff import Matrix, matvec, p_part, smith_normal_form, transpose

Vec = list[int]


def cols_to_matrix(cols: Sequence[Sequence[int]], n: int) -> Matrix:
    if not cols:
        return [[] for _ in range(n)]
    return [list(r) for r in zip(*cols)]


@dataclass
class Lattice:
    """A sublattice of Z^n given by a basis (list of column vectors)."""

    n: int
    basis: list[Vec] = field(default_factory=list)

    @staticmethod
    def span(gens: Sequence[Sequence[int]], n: int) -> "Lattice":
        """Sublattice spanned by ``gens``, with its basis in Hermite normal form."""
        rows, _ = hermite([g for g in gens if any(g)], n)
        return Lattice(n, rows)

    @staticmethod
    def full(n: int) -> "Lattice":
        return Lattice(n, [[int(i == j) for i in range(n)] for j in range(n)])

    @staticmethod
    def zero(n: int) -> "Lattice":
        return Lattice(n, [])

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice.span(self.basis + other.basis, self.n)

    def solve(self, v: Sequence[int]) -> Vec | None:
        """Coordinates of v in this basis, or None if v is not in the lattice."""
        return _solver(self).solve(v)

    def contains(self, v: Sequence[int]) -> bool:
        return self.solve(v) is not None

    def contains_lattice(self, other: "Lattice") -> bool:
        s = _solver(self)
        return all(s.solve(b) is not None for b in other.basis)

    def intersect(self, other: "Lattice") -> "Lattice":
        if not self.basis or not other.basis:
            return Lattice.zero(self.n)
        k = len(self.basis)
        M = cols_to_matrix(self.basis + [[-x for x in b] for b in other.basis], self.n)
        ker = kernel_basis(M, k + len(other.basis))
        gens = [matvec(cols_to_matrix(self.basis, self.n), v[:k]) for v in ker]
        return Lattice.span(gens, self.n)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Lattice) and self.n == other.n and self.rank == other.rank
                and self.contains_lattice(other) and other.contains_lattice(self))


class _Solver:
    def __init__(self, lat: Lattice):
        self.lat = lat
        self.k = lat.rank
        self.pivots = _echelon_pivots(lat.basis)
        if self.k and self.pivots is None:
            self.snf = smith_normal_form(cols_to_matrix(lat.basis, lat.n))

    def solve(self, v: Sequence[int]) -> Vec | None:
        if not self.k:
            return [] if not any(v) else None
        if self.pivots is not None:
            w = list(v)
            y = []
            for row, c in zip(self.lat.basis, self.pivots):
                q, r = divmod(w[c], row[c])
                if r:
                    return None
                if q:
                    for k in range(c, len(w)):
                        if row[k]:
                            w[k] -= q * row[k]
                y.append(q)
            return None if any(w) else y
        s = self.snf
        w = matvec(s.left, v)
        if any(w[self.k:]):
            return None
        y = []
        for i in range(self.k):
            q, r = divmod(w[i], s.diag[i])
            if r:
                return None
            y.append(q)
        return matvec(s.right, y)


def _echelon_pivots(basis: Sequence[Sequence[int]]) -> list[int] | None:
    """Pivot columns if the basis rows are in echelon form, else None."""
    piv = []
    for row in basis:
        c = next((k for k, x in enumerate(row) if x), None)
        if c is None or (piv and c <= piv[-1]):
            return None
        piv.append(c)
    return piv


def hermite(rows: Sequence[Sequence[int]], limit: int) -> tuple[list[Vec], list[Vec]]:
    """Unimodular row reduction pivoting on the first ``limit`` columns.

    Returns (echelon rows with positive pivots and reduced entries above each
    pivot, remaining rows that vanish on the first ``limit`` columns).
    Integer row operations only, so the two lists together span the same
    lattice as ``rows``.
    """
    work = [list(r) for r in rows if any(r)]
    done: list[Vec] = []
    for c in range(limit):
        active = [r for r in work if r[c]]
        if not active:
            continue
        rest = [r for r in work if not r[c]]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[c]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[c] // piv[c]
                r = [a - q * b for a, b in zip(r, piv)]
                if r[c]:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            active = nxt
        piv = active[0]
        if piv[c] < 0:
            piv = [-x for x in piv]
        for i, r in enumerate(done):
            q = r[c] // piv[c]
            if q:
                done[i] = [a - q * b for a, b in zip(r, piv)]
        done.append(piv)
        work = rest
    return done, work


def _solver(lat: Lattice) -> _Solver:
    s = lat.__dict__.get("_solver")
    if s is None:
        s = _Solver(lat)
        lat.__dict__["_solver"] = s
    return s


def kernel_basis(M: Matrix, ncols: int | None = None) -> list[Vec]:
    """Basis of the integer kernel {x : M x = 0} (a saturated lattice)."""
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    if not M or not M[0]:
        return [[int(i == j) for i in range(n)] for j in range(n)]
    m = len(M)
    # row-reduce [M^T | I]; rows whose M^T part vanishes span the kernel
    aug = [[M[r][j] for r in range(m)] + [int(i == j) for i in range(n)] for j in range(n)]
    _, rest = hermite(aug, m)
    ker, _ = hermite([row[m:] for row in rest], n)
    return ker


def image_lattice(M: Matrix, nrows: int) -> Lattice:
    if not M or not M[0]:
        return Lattice.zero(nrows)
    return Lattice.span(transpose(M), nrows)


def preimage(M: Matrix, target: Lattice, ncols: int) -> Lattice:
    """{x in Z^ncols : M x in target}."""
    rows = target.n
    if rows == 0 or not M:
        return Lattice.full(ncols)
    tb = target.basis
    big = [list(M[r]) + [-b[r] for b in tb] for r in range(rows)]
    ker = kernel_basis(big, ncols + len(tb))
    return Lattice.span([v[:ncols] for v in ker], ncols)


@dataclass
class Subquotient:
    """The group top / bottom for lattices bottom <= top <= Z^n.

    ``orders`` lists the cyclic orders of the canonical generators, torsion
    first (each > 1, successively dividing) then 0 for each free summand.
    """

    top: Lattice
    bottom: Lattice
    orders: list[int] = field(init=False)
    reps: list[Vec] = field(init=False)

    def __post_init__(self) -> None:
        n = self.top.n
        k = self.top.rank
        E = [self.top.solve(b) for b in self.bottom.basis]
        if any(e is None for e in E):
            raise ValueError("bottom lattice is not contained in top")
        if k == 0:
            self.orders, self.reps, self._rows, self._U = [], [], [], []
            return
        Emat = cols_to_matrix(E, k) if E else [[] for _ in range(k)]
        if E:
            s = smith_normal_form(Emat)
            U, Ui, diag, rank = s.left, s.left_inv, s.diag, s.rank
        else:
            U = [[int(i == j) for j in range(k)] for i in range(k)]
            Ui, diag, rank = U, [], 0
        T = cols_to_matrix(self.top.basis, n)
        gens = []
        for i in range(k):
            d = diag[i] if i < rank else 0
            if d == 1:
                continue
            gens.append((i, d))
        self._U = U
        self._rows = [i for i, _ in gens]
        self.orders = [d for _, d in gens]
        self.reps = [matvec(T, [Ui[r][i] for r in range(k)]) for i, _ in gens]

    def __len__(self) -> int:
        return len(self.orders)

    def coords(self, v: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of the class of v (v must lie in ``top``)."""
        c = self.top.solve(v)
        if c is None:
            raise ValueError("vector is not in the top lattice")
        out = []
        for i, d in zip(self._rows, self.orders):
            x = sum(a * b for a, b in zip(self._U[i], c))
            out.append(x % d if d else x)
        return tuple(out)

    def is_zero(self, v: Sequence[int]) -> bool:
        return not any(self.coords(v))

    def free_rank(self) -> int:
        return sum(1 for d in self.orders if d == 0)

    def torsion(self) -> list[int]:
        return [d for d in self.orders if d]


def localize(orders: Sequence[int], p: int | None) -> list[int]:
    """Keep the p-primary part of each cyclic factor; free factors stay 0."""
    if p is None:
        return [d for d in orders if d != 1]
    out = []
    for d in orders:
        q = p_part(d, p) if d else 0
        if q != 1:
            out.append(q)
    return sorted(out, key=lambda x: (x == 0, x))


def group_label(orders: Sequence[int]) -> str:
    if not orders:
        return "0"
    return " + ".join("Z" if d == 0 else f"Z/{d}" for d in orders)


# --------------------------------------------------------------------------
# complexes of presented groups


@dataclass
class PresentedComplex:
    """A bounded chain complex C_i = Z^{dims[i]} / span(rels[i]).

    ``diff[i]`` is the matrix of d: Z^{dims[i]} -> Z^{dims[i-1]} (rows index
    the target).  Missing degrees are zero groups.
    """

    dims: dict[int, int]
    diff: dict[int, Matrix]
    rels: dict[int, list[Vec]] = field(default_factory=dict)

    def dim(self, i: int) -> int:
        return self.dims.get(i, 0)

    def d(self, i: int) -> Matrix:
        m = self.diff.get(i)
        if m is None:
            return [[0] * self.dim(i) for _ in range(self.dim(i - 1))]
        return m

    def relations(self, i: int) -> Lattice:
        return Lattice.span(self.rels.get(i, []), self.dim(i))

    def cycles(self, i: int) -> Lattice:
        n = self.dim(i)
        if self.dim(i - 1) == 0:
            return Lattice.full(n)
        return preimage(self.d(i), self.relations(i - 1), n)

    def boundaries(self, i: int) -> Lattice:
        n = self.dim(i)
        gens = list(self.rels.get(i, []))
        if self.dim(i + 1):
            gens += transpose(self.d(i + 1))
        return Lattice.span(gens, n)

    def homology(self, i: int) -> Subquotient:
        return Subquotient(self.cycles(i), self.boundaries(i))

    def check(self) -> None:
        """Raise if d∘d is not zero modulo relations or d does not respect relations."""
        for i in self.dims:
            if self.dim(i - 1) == 0 or self.dim(i) == 0:
                continue
            d = self.d(i)
            low = self.relations(i - 1)
            for r in self.rels.get(i, []):
                if not low.contains(matvec(d, r)):
                    raise ValueError(f"differential in degree {i} does not respect relations")
            if self.dim(i - 2):
                dd = self.d(i - 1)
                low2 = self.relations(i - 2)
                for j in range(self.dim(i)):
                    col = [row[j] for row in d]
                    if not low2.contains(matvec(dd, col)):
                        raise ValueError(f"d∘d != 0 starting in degree {i}")
