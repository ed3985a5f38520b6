"""Exact linear algebra over the rationals and integers.

Dense matrices with arbitrary-precision entries, reduced row echelon form,
circuit-vector kernel bases, integer kernel lattices via Hermite normal form,
and deterministic seeded sampling of kernel vectors.  Everything is exact:
no floating point, no tolerances.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd


class TrivialKernelError(ValueError):
    """Raised when a kernel vector is requested from a matrix with kernel {0}."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class RationalMatrix:
    """Immutable dense matrix over Q, stored row-major as Fractions."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries):
        rows = tuple(tuple(_frac(x) for x in row) for row in entries)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows in matrix")
        else:
            width = 0
        self.rows = len(rows)
        self.cols = width
        self._e = rows

    @classmethod
    def from_shape(cls, rows: int, cols: int, entries) -> "RationalMatrix":
        m = cls(entries)
        if (m.rows, m.cols) != (rows, cols) and not (m.rows == 0 and rows == 0):
            raise ValueError("shape mismatch")
        if m.rows == 0:
            m.cols = cols  # allow 0 x n matrices with explicit width
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        m = cls([[0] * cols for _ in range(rows)])
        m.cols = cols
        return m

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, values) -> "RationalMatrix":
        vals = [_frac(v) for v in values]
        n = len(vals)
        return cls([[vals[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def column(cls, values) -> "RationalMatrix":
        return cls([[v] for v in values])

    def entry(self, i: int, j: int) -> Fraction:
        return self._e[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._e[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._e)

    def to_lists(self) -> list[list[Fraction]]:
        return [list(r) for r in self._e]

    def transpose(self) -> "RationalMatrix":
        t = RationalMatrix([[self._e[i][j] for i in range(self.rows)] for j in range(self.cols)])
        t.cols = self.rows
        return t

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ot = other.transpose()
        prod = RationalMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in ot._e] for row in self._e]
        )
        prod.cols = other.cols
        return prod

    def mul_vector(self, v) -> tuple[Fraction, ...]:
        vv = [_frac(x) for x in v]
        if len(vv) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(row, vv)) for row in self._e)

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return RationalMatrix([list(a) + list(b) for a, b in zip(self._e, other._e)])

    def vstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.cols and self.rows and other.rows:
            raise ValueError("column count mismatch")
        m = RationalMatrix(list(self._e) + list(other._e))
        m.cols = self.cols if self.rows else other.cols
        return m

    def select_columns(self, indices) -> "RationalMatrix":
        m = RationalMatrix([[r[j] for j in indices] for r in self._e])
        m.cols = len(list(indices)) if self.rows == 0 else m.cols
        return m

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._e for x in r)

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalMatrix) and self._e == other._e and self.cols == other.cols

    def __hash__(self) -> int:
        return hash((self._e, self.cols))

    def __repr__(self) -> str:
        return f"RationalMatrix({[[str(x) for x in r] for r in self._e]})"

    def rref(self) -> tuple["RationalMatrix", tuple[int, ...]]:
        """Reduced row echelon form and pivot columns; zero rows trail."""
        m = [list(r) for r in self._e]
        nr, nc = self.rows, self.cols
        pivots = []
        r = 0
        for c in range(nc):
            if r >= nr:
                break
            pr = next((i for i in range(r, nr) if m[i][c] != 0), None)
            if pr is None:
                continue
            m[r], m[pr] = m[pr], m[r]
            pv = m[r][c]
            if pv != 1:
                m[r] = [x / pv for x in m[r]]
            for i in range(nr):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
        out = RationalMatrix(m)
        out.cols = nc
        return out, tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def row_basis(self) -> "RationalMatrix":
        """Nonzero rows of the RREF: a canonical basis of the row space."""
        red, pivots = self.rref()
        m = RationalMatrix([red.row(i) for i in range(len(pivots))])
        m.cols = self.cols
        return m


class IntegerMatrix:
    """Immutable dense matrix over Z."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries):
        rows = tuple(tuple(int(x) for x in row) for row in entries)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows in matrix")
        else:
            width = 0
        self.rows = len(rows)
        self.cols = width
        self._e = rows

    @classmethod
    def with_width(cls, entries, cols: int) -> "IntegerMatrix":
        m = cls(entries)
        if m.rows == 0:
            m.cols = cols
        elif m.cols != cols:
            raise ValueError("shape mismatch")
        return m

    def entry(self, i: int, j: int) -> int:
        return self._e[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self._e[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._e)

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self._e]

    def transpose(self) -> "IntegerMatrix":
        t = IntegerMatrix([[self._e[i][j] for i in range(self.rows)] for j in range(self.cols)])
        t.cols = self.rows
        return t

    def to_rational(self) -> RationalMatrix:
        m = RationalMatrix(self._e)
        m.cols = self.cols
        return m

    def select_columns(self, indices) -> "IntegerMatrix":
        idx = list(indices)
        m = IntegerMatrix([[r[j] for j in idx] for r in self._e])
        if m.rows == 0:
            m.cols = len(idx)
        return m

    def hstack(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return IntegerMatrix([list(a) + list(b) for a, b in zip(self._e, other._e)])

    def mul_vector(self, v):
        vv = list(v)
        if len(vv) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(row, vv)) for row in self._e)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def rank(self) -> int:
        return self.to_rational().rank()

    def __eq__(self, other) -> bool:
        return isinstance(other, IntegerMatrix) and self._e == other._e and self.cols == other.cols

    def __hash__(self) -> int:
        return hash((self._e, self.cols))

    def __repr__(self) -> str:
        return f"IntegerMatrix({self.to_lists()})"


@dataclass(frozen=True)
class CircuitBasis:
    """Kernel basis made of fundamental circuit vectors.

    ``vectors[k]`` is an exact kernel vector whose support ``supports[k]`` is
    minimal among supports of nonzero kernel vectors (one vector per non-pivot
    column of the RREF).
    """

    vectors: tuple[tuple[Fraction, ...], ...]
    supports: tuple[frozenset[int], ...]
    ambient_dim: int

    def __len__(self) -> int:
        return len(self.vectors)

    def support_union(self) -> frozenset[int]:
        u: frozenset[int] = frozenset()
        for s in self.supports:
            u = u | s
        return u

    def as_matrix(self) -> RationalMatrix:
        """Matrix whose columns are the basis vectors."""
        m = RationalMatrix([[v[i] for v in self.vectors] for i in range(self.ambient_dim)])
        m.cols = len(self.vectors)
        return m


def rref(m: RationalMatrix) -> tuple[RationalMatrix, tuple[int, ...]]:
    return m.rref()


def rank(m: RationalMatrix) -> int:
    return m.rank()


def kernel_circuit_basis(m: RationalMatrix) -> CircuitBasis:
    """Fundamental-circuit basis of ker(m) from the RREF pivot structure.

    Each non-pivot column j yields the vector with 1 in position j and the
    negated RREF column entries in the pivot positions; its support is a
    circuit of the column matroid.
    """
    red, pivots = m.rref()
    free = [j for j in range(m.cols) if j not in pivots]
    vectors = []
    supports = []
    for j in free:
        v = [Fraction(0)] * m.cols
        v[j] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -red.entry(i, j)
        vectors.append(tuple(v))
        supports.append(frozenset(k for k in range(m.cols) if v[k] != 0))
    return CircuitBasis(tuple(vectors), tuple(supports), m.cols)


def left_kernel_basis(m: RationalMatrix) -> RationalMatrix:
    """RREF-normalized basis (as rows) of {v : v m = 0}."""
    ker = kernel_circuit_basis(m.transpose())
    rows = [list(v) for v in ker.vectors]
    basis = RationalMatrix(rows)
    basis.cols = m.rows
    return basis.row_basis() if rows else RationalMatrix.zeros(0, m.rows)


def solve(a: RationalMatrix, b) -> tuple[Fraction, ...] | None:
    """One particular solution of a x = b, or None if inconsistent."""
    bb = [_frac(x) for x in b]
    if len(bb) != a.rows:
        raise ValueError("right-hand side length mismatch")
    aug = a.hstack(RationalMatrix.column(bb))
    red, pivots = aug.rref()
    if a.cols in pivots:
        return None
    x = [Fraction(0)] * a.cols
    for i, p in enumerate(pivots):
        x[p] = red.entry(i, a.cols)
    return tuple(x)


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        g = gcd(g, abs(x))
    if g > 1:
        row = [x // g for x in row]
    return row


def clear_denominators(vec) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector (same ray)."""
    fr = [_frac(x) for x in vec]
    lcm = 1
    for x in fr:
        d = x.denominator
        lcm = lcm // gcd(lcm, d) * d
    ints = [int(x * lcm) for x in fr]
    return tuple(_primitive(ints))


def hermite_normal_form(m: IntegerMatrix) -> IntegerMatrix:
    """Row-style Hermite normal form; zero rows dropped.

    Pivots are positive, entries above a pivot are reduced into [0, pivot),
    the row lattice is preserved.  Pivot columns are chosen lowest-first.
    """
    h = [list(r) for r in m._e]
    nr, nc = m.rows, m.cols
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        while True:
            nz = [i for i in range(r, nr) if h[i][c] != 0]
            if not nz:
                break
            if len(nz) == 1:
                i0 = nz[0]
                h[r], h[i0] = h[i0], h[r]
                break
            i0 = min(nz, key=lambda i: abs(h[i][c]))
            for i in nz:
                if i == i0:
                    continue
                q = h[i][c] // h[i0][c]
                if q:
                    h[i] = [a - q * b for a, b in zip(h[i], h[i0])]
        if h[r][c] == 0:
            continue
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
        for i in range(r):
            q = h[i][c] // h[r][c]
            if q:
                h[i] = [a - q * b for a, b in zip(h[i], h[r])]
        r += 1
    out = [row for row in h[:r]]
    return IntegerMatrix.with_width(out, nc)


def smith_normal_form_diagonal(m: IntegerMatrix) -> list[int]:
    """Nonzero elementary divisors d1 | d2 | ... of m."""
    a = [list(r) for r in m._e]
    nr, nc = m.rows, m.cols
    divisors = []
    top = 0
    left = 0
    while top < nr and left < nc:
        # find smallest nonzero entry in the remaining block
        best = None
        for i in range(top, nr):
            for j in range(left, nc):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        a[top], a[bi] = a[bi], a[top]
        for row in a:
            row[left], row[bj] = row[bj], row[left]
        # clear row and column; restart if a remainder pops up
        dirty = False
        for i in range(top + 1, nr):
            q = a[i][left] // a[top][left]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[top])]
            if a[i][left] != 0:
                dirty = True
        for j in range(left + 1, nc):
            q = a[top][j] // a[top][left]
            if q:
                for i in range(top, nr):
                    a[i][j] -= q * a[i][left]
            if a[top][j] != 0:
                dirty = True
        if dirty:
            continue
        pivot = abs(a[top][left])
        # enforce divisibility of the remaining block
        fixed = True
        for i in range(top + 1, nr):
            for j in range(left + 1, nc):
                if a[i][j] % pivot != 0:
                    a[top] = [x + y for x, y in zip(a[top], a[i])]
                    fixed = False
                    break
            if not fixed:
                break
        if not fixed:
            continue
        divisors.append(pivot)
        top += 1
        left += 1
    return divisors


class KernelLattice(Enum):
    RATIONAL_SATURATED = "rational-saturated"
    INTEGER_LATTICE = "integer-lattice"


def integer_kernel_basis(m: IntegerMatrix, lattice: KernelLattice = KernelLattice.RATIONAL_SATURATED) -> IntegerMatrix:
    """Rows form a basis of {v in Z^rows(m) : v m = 0}, i.e. of ker(m^T).

    Computed from the Hermite normal form of [m | I]: the unimodular row
    transform is tracked in the identity block, and rows whose m-part
    vanished carry a lattice basis of the integer kernel.  The integer
    kernel of a rational subspace is saturated, so both lattice modes
    produce the same (canonical, HNF-reduced) basis.
    """
    nr, nc = m.rows, m.cols
    aug = IntegerMatrix.with_width(
        [list(m.row(i)) + [1 if k == i else 0 for k in range(nr)] for i in range(nr)],
        nc + nr,
    )
    h = hermite_normal_form(aug)
    kernel_rows = [list(h.row(i))[nc:] for i in range(h.rows) if all(x == 0 for x in list(h.row(i))[:nc])]
    basis = IntegerMatrix.with_width(kernel_rows, nr)
    return hermite_normal_form(basis) if basis.rows else basis


def random_rng(seed: int) -> random.Random:
    """The deterministic generator used everywhere randomness is needed."""
    return random.Random(seed & 0xFFFFFFFFFFFFFFFF)


RANDOM_NUMERATOR_BOUND = 1 << 16


def random_kernel_vector(m: RationalMatrix, seed: int) -> RationalMatrix:
    """Deterministic random element of ker(m), returned as a column.

    Integer coefficients uniform in [-2^16, 2^16] are combined through the
    circuit kernel basis; the residual is exactly zero.
    """
    basis = kernel_circuit_basis(m)
    if len(basis) == 0:
        raise TrivialKernelError("kernel is trivial")
    rng = random_rng(seed)
    dim = basis.ambient_dim
    while True:
        coeffs = [rng.randint(-RANDOM_NUMERATOR_BOUND, RANDOM_NUMERATOR_BOUND) for _ in basis.vectors]
        w = [Fraction(0)] * dim
        for c, v in zip(coeffs, basis.vectors):
            if c:
                for i in range(dim):
                    w[i] += c * v[i]
        if any(x != 0 for x in w):
            return RationalMatrix.column(w)


def same_row_lattice(a: IntegerMatrix, b: IntegerMatrix) -> bool:
    """Whether two integer matrices generate the same row lattice over Z."""
    if a.cols != b.cols:
        return False
    return hermite_normal_form(a) == hermite_normal_form(b)
