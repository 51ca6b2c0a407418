"""Exact scalars, Smith normal form and Teichmüller lifts.

Everything here works over Python integers and ``fractions.Fraction``.
Four coefficient variants are supported: the integers ``Z``, the rationals
``Q``, a prime field ``Fp`` and the truncated Witt ring ``Wn`` (integers
modulo ``p**N``, i.e. W_N(F_p)).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Matrix = list[list[int]]


class CoeffError(ValueError):
    pass


# --------------------------------------------------------------------------
# coefficient rings and scalars


@dataclass(frozen=True)
class CoeffRing:
    kind: str  # "Z", "Q", "Fp", "Wn"
    p: int | None = None
    N: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("Z", "Q", "Fp", "Wn"):
            raise CoeffError(f"unknown coefficient ring {self.kind!r}")
        if self.kind in ("Fp", "Wn"):
            if self.p is None or not _is_prime(self.p):
                raise CoeffError(f"{self.kind} needs a prime p, got {self.p}")
        if self.kind == "Wn" and (self.N is None or self.N < 1):
            raise CoeffError("Wn needs a precision N >= 1")

    @property
    def modulus(self) -> int | None:
        if self.kind == "Fp":
            return self.p
        if self.kind == "Wn":
            return self.p ** self.N
        return None

    @property
    def is_field(self) -> bool:
        return self.kind in ("Q", "Fp")

    def reduce(self, v):
        if self.kind == "Q":
            return Fraction(v)
        if isinstance(v, Fraction):
            if v.denominator != 1:
                if self.kind == "Z":
                    raise CoeffError(f"{v} is not an integer")
                return (v.numerator * pow(v.denominator, -1, self.modulus)) % self.modulus
            v = v.numerator
        m = self.modulus
        return int(v) % m if m else int(v)

    def __call__(self, v) -> "Scalar":
        return Scalar(self, v)

    def label(self) -> str:
        if self.kind in ("Z", "Q"):
            return self.kind
        if self.kind == "Fp":
            return f"F{self.p}"
        return f"W{self.N}(F{self.p})"


ZZ = CoeffRing("Z")
QQ = CoeffRing("Q")


def Fp(p: int) -> CoeffRing:
    return CoeffRing("Fp", p)


def Wn(p: int, N: int) -> CoeffRing:
    return CoeffRing("Wn", p, N)


class Scalar:
    """An immutable exact coefficient tagged with its ring."""

    __slots__ = ("ring", "value")

    def __init__(self, ring: CoeffRing, value) -> None:
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "value", ring.reduce(value))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def _other(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.ring != self.ring:
                raise CoeffError(f"cannot mix {self.ring.label()} and {other.ring.label()}")
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(self.ring, other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else Scalar(self.ring, self.value + o.value)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else Scalar(self.ring, self.value - o.value)

    def __rsub__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else Scalar(self.ring, o.value - self.value)

    def __mul__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else Scalar(self.ring, self.value * o.value)

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(self.ring, -self.value)

    def __pow__(self, e: int):
        if self.ring.modulus:
            return Scalar(self.ring, pow(self.value, e, self.ring.modulus))
        return Scalar(self.ring, self.value ** e)

    def inverse(self) -> "Scalar":
        r = self.ring
        if r.kind == "Q":
            if self.value == 0:
                raise ZeroDivisionError("0 has no inverse")
            return Scalar(r, 1 / self.value)
        if r.kind == "Z":
            if self.value not in (1, -1):
                raise CoeffError(f"{self.value} is not a unit in Z")
            return self
        if self.value % r.p == 0:
            raise CoeffError(f"{self.value} is not a unit in {r.label()}")
        return Scalar(r, pow(self.value, -1, r.modulus))

    def __truediv__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else self * o.inverse()

    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self.ring == other.ring and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == self.ring.reduce(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ring, self.value))

    def __repr__(self) -> str:
        return f"Scalar({self.ring.label()}, {self.value})"

    def valuation(self) -> int | None:
        """p-adic valuation for Wn; None for zero."""
        if self.value == 0:
            return None
        if self.ring.kind != "Wn":
            raise CoeffError("valuation only defined on Wn")
        return _val(self.value, self.ring.p)

    def to_json(self) -> dict:
        d = {"ring": {"Z": "Z", "Q": "Q", "Fp": "Fp", "Wn": "Wn"}[self.ring.kind], "value": str(self.value)}
        if self.ring.p is not None:
            d["p"] = self.ring.p
        if self.ring.N is not None:
            d["N"] = self.ring.N
        return d

    @staticmethod
    def from_json(d: dict) -> "Scalar":
        try:
            ring = CoeffRing(d["ring"], d.get("p"), d.get("N"))
            raw = d["value"]
        except KeyError as exc:
            raise CoeffError(f"scalar is missing field {exc}") from None
        if not isinstance(raw, str):
            raise CoeffError("scalar value must be a decimal string")
        try:
            value = Fraction(raw) if ring.kind == "Q" else int(raw)
        except ValueError:
            raise CoeffError(f"bad scalar value {raw!r}") from None
        if ring.modulus and not 0 <= value < ring.modulus:
            raise CoeffError(f"value {raw} not reduced for {ring.label()}")
        s = Scalar(ring, value)
        return s


@dataclass(frozen=True)
class IntMatrix:
    """A rectangular matrix whose entries share one coefficient ring."""

    ring: CoeffRing
    rows: tuple[tuple, ...]

    @staticmethod
    def of(ring: CoeffRing, rows: Sequence[Sequence]) -> "IntMatrix":
        rr = tuple(tuple(ring.reduce(v) for v in r) for r in rows)
        if len({len(r) for r in rr}) > 1:
            raise CoeffError("ragged matrix")
        return IntMatrix(ring, rr)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ring != other.ring:
            raise CoeffError("ring mismatch")
        return IntMatrix.of(self.ring, matmul(self.tolist(), other.tolist()))


# --------------------------------------------------------------------------
# small helpers


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _val(a: int, p: int) -> int:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def p_part(a: int, p: int) -> int:
    """The largest power of p dividing a (0 stays 0)."""
    if a == 0:
        return 0
    return p ** _val(abs(a), p)


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    n = len(b[0]) if b else 0
    bt = list(zip(*b)) if b else [()] * n
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        out.append([sum(x * col[k] for k, x in nz) for col in bt] if n else [])
    return out


def matvec(a: Matrix, v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v) if x) for row in a]


def transpose(a: Matrix, ncols: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*a)]


def block_diag(*blocks: Matrix, shapes: Sequence[tuple[int, int]] | None = None) -> Matrix:
    shapes = shapes or [(len(b), len(b[0]) if b else 0) for b in blocks]
    total_c = sum(s[1] for s in shapes)
    out: Matrix = []
    off = 0
    for b, (r, c) in zip(blocks, shapes):
        for i in range(r):
            row = [0] * total_c
            row[off:off + c] = b[i]
            out.append(row)
        off += c
    return out


def hstack(a: Matrix, b: Matrix, rows: int) -> Matrix:
    if rows == 0:
        return []
    a = a or [[] for _ in range(rows)]
    b = b or [[] for _ in range(rows)]
    return [list(x) + list(y) for x, y in zip(a, b)]


# --------------------------------------------------------------------------
# Smith normal form


@dataclass
class SNF:
    """``left @ m @ right == diag`` with ``diag`` in successive-divisibility form.

    ``left_inv`` and ``right_inv`` are the inverse transforms.  ``diag`` lists
    the nonzero diagonal entries followed by zeros up to min(rows, cols).
    """

    diag: list[int]
    left: Matrix
    right: Matrix
    left_inv: Matrix
    right_inv: Matrix
    rank: int


def smith_normal_form(m: Matrix | IntMatrix, modulus: int | None = None, p: int | None = None) -> SNF:
    """Smith normal form with unimodular transforms.

    Over Z when ``modulus`` is None.  Over Z/p^N pass ``modulus=p**N`` and
    ``p``; over a prime field pass ``modulus=p=p``.  An ``IntMatrix`` picks
    these from its ring; for ``Q`` entries use :func:`rank_factorization`.
    """
    if isinstance(m, IntMatrix):
        r = m.ring
        if r.kind == "Q":
            raise CoeffError("Q is a field: use rank_factorization")
        return smith_normal_form(m.tolist(), r.modulus, r.p)
    if modulus is None:
        return _snf_integer(m)
    if p is None:
        raise CoeffError("local SNF needs p")
    return _snf_local(m, modulus, p)


def _snf_integer(m: Matrix) -> SNF:
    A = [list(r) for r in m]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    U, Ui = identity(rows), identity(rows)
    V, Vi = identity(cols), identity(cols)

    def swap_rows(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            U[i], U[j] = U[j], U[i]
            for r in Ui:
                r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        if i != j:
            for r in A:
                r[i], r[j] = r[j], r[i]
            for r in V:
                r[i], r[j] = r[j], r[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(src, dst, q):
        # row_dst += q * row_src
        if q:
            ra, rs = A[dst], A[src]
            for k in range(cols):
                if rs[k]:
                    ra[k] += q * rs[k]
            ua, us = U[dst], U[src]
            for k in range(rows):
                if us[k]:
                    ua[k] += q * us[k]
            for r in Ui:
                if r[dst]:
                    r[src] -= q * r[dst]

    def add_col(src, dst, q):
        # col_dst += q * col_src
        if q:
            for r in A:
                if r[src]:
                    r[dst] += q * r[src]
            for r in V:
                if r[src]:
                    r[dst] += q * r[src]
            vs, vd = Vi[src], Vi[dst]
            for k in range(cols):
                if vd[k]:
                    vs[k] -= q * vd[k]

    def neg_row(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = A[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            piv = A[t][t]
            moved = False
            for i in range(t + 1, rows):
                if A[i][t]:
                    add_row(t, i, -_round_div(A[i][t], piv))
                    if A[i][t] and abs(A[i][t]) < abs(A[t][t]):
                        swap_rows(t, i)
                        moved = True
                        break
            if moved:
                continue
            for j in range(t + 1, cols):
                if A[t][j]:
                    add_col(t, j, -_round_div(A[t][j], piv))
                    if A[t][j] and abs(A[t][j]) < abs(A[t][t]):
                        swap_cols(t, j)
                        moved = True
                        break
            if moved:
                continue
            if any(A[i][t] for i in range(t + 1, rows)) or any(A[t][j] for j in range(t + 1, cols)):
                continue
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if A[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, 1)
        if A[t][t] < 0:
            neg_row(t)
        t += 1
    diag = [A[i][i] for i in range(min(rows, cols))]
    rank = sum(1 for d in diag if d)
    return SNF(diag, U, V, Ui, Vi, rank)


def _round_div(a: int, b: int) -> int:
    q, r = divmod(a, b)
    if 2 * abs(r) > abs(b):
        q += 1 if (r > 0) == (b > 0) else 0
    return q


def _snf_local(m: Matrix, modulus: int, p: int) -> SNF:
    """SNF over Z/modulus with modulus a prime power p^N (p itself for a field)."""
    A = [[x % modulus for x in r] for r in m]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    U, Ui = identity(rows), identity(rows)
    V, Vi = identity(cols), identity(cols)
    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = A[i][j]
                if x:
                    v = _val(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best and best[0] == 0:
                break
        if best is None:
            break
        v, bi, bj = best
        A[t], A[bi] = A[bi], A[t]
        U[t], U[bi] = U[bi], U[t]
        for r in Ui:
            r[t], r[bi] = r[bi], r[t]
        for r in A:
            r[t], r[bj] = r[bj], r[t]
        for r in V:
            r[t], r[bj] = r[bj], r[t]
        Vi[t], Vi[bj] = Vi[bj], Vi[t]
        pv = p ** v
        u = A[t][t] // pv
        ui = pow(u, -1, modulus)
        A[t] = [(x * ui) % modulus for x in A[t]]
        U[t] = [(x * ui) % modulus for x in U[t]]
        for r in Ui:
            r[t] = (r[t] * u) % modulus
        for i in range(rows):
            if i != t and A[i][t]:
                q = A[i][t] // pv
                A[i] = [(a - q * b) % modulus for a, b in zip(A[i], A[t])]
                U[i] = [(a - q * b) % modulus for a, b in zip(U[i], U[t])]
                for r in Ui:
                    r[t] = (r[t] + q * r[i]) % modulus
        for j in range(t + 1, cols):
            if A[t][j]:
                q = A[t][j] // pv
                for r in A:
                    r[j] = (r[j] - q * r[t]) % modulus
                for r in V:
                    r[j] = (r[j] - q * r[t]) % modulus
                Vi[t] = [(a + q * b) % modulus for a, b in zip(Vi[t], Vi[j])]
        t += 1
    diag = [A[i][i] for i in range(min(rows, cols))]
    rank = sum(1 for d in diag if d)
    return SNF(diag, U, V, Ui, Vi, rank)


def invariant_factors(m: Matrix, modulus: int | None = None, p: int | None = None) -> list[int]:
    """Nonzero diagonal of the Smith form (units included)."""
    return [d for d in smith_normal_form(m, modulus, p).diag if d]


def rank_factorization(m: Sequence[Sequence[Fraction]]) -> tuple[int, list[int]]:
    """Rank and pivot columns over Q by exact Gaussian elimination."""
    A = [[Fraction(x) for x in r] for r in m]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    piv = []
    r = 0
    for c in range(cols):
        k = next((i for i in range(r, rows) if A[i][c]), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        piv.append(c)
        r += 1
    return r, piv


def determinant(m: Matrix) -> int:
    n = len(m)
    A = [[Fraction(x) for x in r] for r in m]
    det = Fraction(1)
    for c in range(n):
        k = next((i for i in range(c, n) if A[i][c]), None)
        if k is None:
            return 0
        if k != c:
            A[c], A[k] = A[k], A[c]
            det = -det
        det *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] / A[c][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return int(det)


# --------------------------------------------------------------------------
# Teichmüller lifts


def teichmuller(a: int | Scalar, N: int, p: int | None = None) -> Scalar:
    """The Frobenius-fixed lift of ``a`` in F_p to Z/p^N."""
    if isinstance(a, Scalar):
        if a.ring.kind != "Fp":
            raise CoeffError("teichmuller takes a prime-field element")
        p, a = a.ring.p, a.value
    if p is None:
        raise CoeffError("prime p required")
    if N < 1:
        raise CoeffError("precision N must be >= 1")
    mod = p ** N
    t = a % p
    while True:
        nt = pow(t, p, mod)
        if nt == t:
            return Scalar(Wn(p, N), t)
        t = nt


def teichmuller_digits(x: int, p: int, N: int) -> list[int]:
    """Digits c_i in [0, p) with x = sum omega(c_i) p^i mod p^N."""
    mod = p ** N
    x %= mod
    digits = []
    for _ in range(N):
        c = x % p
        digits.append(c)
        x = ((x - teichmuller(c, N, p).value) % mod) // p
    return digits


def from_teichmuller_digits(digits: Sequence[int], p: int, N: int) -> int:
    mod = p ** N
    return sum(teichmuller(c, N, p).value * p ** i for i, c in enumerate(digits)) % mod


# --------------------------------------------------------------------------
# linear algebra over F_p


class ModSubspace:
    """A subspace of F_p^n kept in echelon form, with residues modulo it."""

    def __init__(self, n: int, p: int, vectors: Sequence[Sequence[int]] = ()):
        self.n, self.p = n, p
        self.rows: list[list[int]] = []   # pivot rows, normalized to pivot 1
        self.pivots: list[int] = []
        for v in vectors:
            self.add(v)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, v: Sequence[int]) -> list[int]:
        p = self.p
        w = [x % p for x in v]
        for row, c in zip(self.rows, self.pivots):
            f = w[c]
            if f:
                for k in range(c, self.n):
                    if row[k]:
                        w[k] = (w[k] - f * row[k]) % p
        return w

    def add(self, v: Sequence[int]) -> bool:
        """Add v; returns True if the dimension grew."""
        w = self.reduce(v)
        c = next((k for k, x in enumerate(w) if x), None)
        if c is None:
            return False
        inv = pow(w[c], -1, self.p)
        w = [(x * inv) % self.p for x in w]
        for row in self.rows:
            f = row[c]
            if f:
                for k in range(c, self.n):
                    if w[k]:
                        row[k] = (row[k] - f * w[k]) % self.p
        self.rows.append(w)
        self.pivots.append(c)
        return True

    def contains(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))

    def complement_coords(self) -> list[int]:
        """Coordinates that are not pivots: a basis of the quotient space."""
        piv = set(self.pivots)
        return [k for k in range(self.n) if k not in piv]


def rank_mod_p(m: Matrix, p: int) -> int:
    if not m or not m[0]:
        return 0
    return ModSubspace(len(m[0]), p, m).dim


def nullspace_mod_p(m: Matrix, p: int, ncols: int | None = None) -> list[list[int]]:
    """Basis of {x in F_p^ncols : m x = 0}."""
    n = ncols if ncols is not None else (len(m[0]) if m else 0)
    if not m or not n:
        return [[int(i == j) for i in range(n)] for j in range(n)]
    S = ModSubspace(n, p, m)
    piv = dict(zip(S.pivots, S.rows))
    basis = []
    for free in range(n):
        if free in piv:
            continue
        x = [0] * n
        x[free] = 1
        for c, row in piv.items():
            x[c] = (-row[free]) % p
        basis.append(x)
    return basis
