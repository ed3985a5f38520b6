"""Sparse multivariate polynomials with exact rational coefficients.

Terms map exponent vectors to nonzero coefficients; printing and hashing use
the graded lexicographic order.  On top of the ring arithmetic the module
provides symbolic determinants (plain and stacked against a constant block),
coefficient-sign classification, and Sturm-sequence root counting for the
univariate case.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from itertools import combinations

from .exactalg import RationalMatrix, _frac


class VariableMismatchError(ValueError):
    """Operands live in rings with different variable lists."""


class DeterminantSizeError(ValueError):
    """Symbolic expansion refused beyond the supported matrix size."""


class ZeroPolynomialError(ValueError):
    """The zero polynomial has no well-defined root count."""


DET_SIZE_LIMIT = 12


class SparsePolynomial:
    __slots__ = ("variables", "terms")

    def __init__(self, variables, terms=None):
        self.variables = tuple(variables)
        clean = {}
        if terms:
            width = len(self.variables)
            for exps, coeff in terms.items():
                c = _frac(coeff)
                if c == 0:
                    continue
                e = tuple(int(x) for x in exps)
                if len(e) != width:
                    raise ValueError("exponent vector length mismatch")
                if any(x < 0 for x in e):
                    raise ValueError("negative exponents are not stored")
                clean[e] = clean.get(e, Fraction(0)) + c
                if clean[e] == 0:
                    del clean[e]
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, variables) -> "SparsePolynomial":
        return cls(variables)

    @classmethod
    def constant(cls, variables, value) -> "SparsePolynomial":
        variables = tuple(variables)
        c = _frac(value)
        if c == 0:
            return cls(variables)
        return cls(variables, {tuple([0] * len(variables)): c})

    @classmethod
    def variable(cls, variables, name) -> "SparsePolynomial":
        variables = tuple(variables)
        idx = variables.index(name)
        exps = [0] * len(variables)
        exps[idx] = 1
        return cls(variables, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, variables, exps, coeff=1) -> "SparsePolynomial":
        return cls(variables, {tuple(exps): _frac(coeff)})

    # -- ring operations ----------------------------------------------------

    def _check(self, other: "SparsePolynomial"):
        if self.variables != other.variables:
            raise VariableMismatchError(
                f"variables {self.variables} vs {other.variables}"
            )

    def __add__(self, other):
        if not isinstance(other, SparsePolynomial):
            other = SparsePolynomial.constant(self.variables, other)
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            acc = terms.get(e, Fraction(0)) + c
            if acc == 0:
                terms.pop(e, None)
            else:
                terms[e] = acc
        out = SparsePolynomial(self.variables)
        out.terms = terms
        return out

    def __neg__(self):
        out = SparsePolynomial(self.variables)
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if not isinstance(other, SparsePolynomial):
            other = SparsePolynomial.constant(self.variables, other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SparsePolynomial):
            return self.scale(other)
        self._check(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc = terms.get(e, Fraction(0)) + c1 * c2
                if acc == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = acc
        out = SparsePolynomial(self.variables)
        out.terms = terms
        return out

    __rmul__ = __mul__

    def scale(self, scalar) -> "SparsePolynomial":
        c = _frac(scalar)
        out = SparsePolynomial(self.variables)
        if c != 0:
            out.terms = {e: c * v for e, v in self.terms.items()}
        return out

    def __pow__(self, n: int) -> "SparsePolynomial":
        if n < 0:
            raise ValueError("negative power")
        acc = SparsePolynomial.constant(self.variables, 1)
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base if n > 1 else base
            n >>= 1
        return acc

    def substitute(self, name: str, replacement: "SparsePolynomial") -> "SparsePolynomial":
        """Replace a variable by a polynomial of the same ring."""
        self._check(replacement)
        idx = self.variables.index(name)
        out = SparsePolynomial.zero(self.variables)
        powers = {0: SparsePolynomial.constant(self.variables, 1)}

        def power(k):
            if k not in powers:
                powers[k] = power(k - 1) * replacement
            return powers[k]

        for e, c in self.terms.items():
            rest = list(e)
            k = rest[idx]
            rest[idx] = 0
            mono = SparsePolynomial.monomial(self.variables, rest, c)
            out = out + mono * power(k)
        return out

    def extend(self, variables) -> "SparsePolynomial":
        """View the polynomial in a larger ring containing its variables."""
        variables = tuple(variables)
        pos = [variables.index(v) for v in self.variables]
        terms = {}
        for e, c in self.terms.items():
            ee = [0] * len(variables)
            for p, x in zip(pos, e):
                ee[p] = x
            terms[tuple(ee)] = c
        out = SparsePolynomial(variables)
        out.terms = terms
        return out

    def restrict(self, variables) -> "SparsePolynomial":
        """Drop variables the polynomial does not actually use."""
        variables = tuple(variables)
        keep = [self.variables.index(v) for v in variables]
        dropped = [i for i in range(len(self.variables)) if self.variables[i] not in variables]
        terms = {}
        for e, c in self.terms.items():
            if any(e[i] != 0 for i in dropped):
                raise VariableMismatchError("cannot drop a variable in use")
            terms[tuple(e[i] for i in keep)] = c
        out = SparsePolynomial(variables)
        out.terms = terms
        return out

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, name: str) -> int:
        idx = self.variables.index(name)
        return max((e[idx] for e in self.terms), default=0)

    def coefficients(self) -> list[Fraction]:
        return [c for _, c in self.sorted_terms()]

    def sorted_terms(self):
        """Terms in graded lexicographic order, highest first."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def evaluate(self, values: dict) -> Fraction:
        vals = [_frac(values[v]) for v in self.variables]
        total = Fraction(0)
        for e, c in self.terms.items():
            acc = c
            for base, k in zip(vals, e):
                if k:
                    acc *= base ** k
            total += acc
        return total

    def derivative(self, name: str) -> "SparsePolynomial":
        idx = self.variables.index(name)
        terms = {}
        for e, c in self.terms.items():
            k = e[idx]
            if k == 0:
                continue
            ee = list(e)
            ee[idx] = k - 1
            terms[tuple(ee)] = c * k
        out = SparsePolynomial(self.variables)
        out.terms = terms
        return out

    def used_variables(self) -> tuple[str, ...]:
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(self.variables[i])
        return tuple(v for v in self.variables if v in used)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparsePolynomial)
            and self.variables == other.variables
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.variables, tuple(self.sorted_terms())))

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"SparsePolynomial({render(self)!r})"


def render(p: SparsePolynomial) -> str:
    """Canonical text form: graded-lex order, explicit '*' and '^'."""
    if p.is_zero():
        return "0"
    parts = []
    for e, c in p.sorted_terms():
        factors = []
        for name, k in zip(p.variables, e):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        mag = abs(c)
        if factors and mag == 1:
            body = "*".join(factors)
        elif factors:
            body = "*".join([str(mag)] + factors)
        else:
            body = str(mag)
        parts.append(("- " if c < 0 else "+ ") + body)
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


class SignVerdict(Enum):
    ZERO_POLYNOMIAL = "zero-polynomial"
    ALL_POSITIVE = "all-positive"
    ALL_NEGATIVE = "all-negative"
    MIXED_SIGNS = "mixed-signs"


def sign_classify(p: SparsePolynomial) -> SignVerdict:
    if p.is_zero():
        return SignVerdict.ZERO_POLYNOMIAL
    pos = any(c > 0 for c in p.terms.values())
    neg = any(c < 0 for c in p.terms.values())
    if pos and neg:
        return SignVerdict.MIXED_SIGNS
    return SignVerdict.ALL_POSITIVE if pos else SignVerdict.ALL_NEGATIVE


def det_symbolic(matrix) -> SparsePolynomial:
    """Exact determinant of a square matrix of polynomials.

    Expansion proceeds row by row, sparsest rows first, with minors memoized
    on the set of unused columns; matrices above the size guard are refused.
    """
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix not square")
    if n > DET_SIZE_LIMIT:
        raise DeterminantSizeError(
            f"symbolic determinant limited to {DET_SIZE_LIMIT}x{DET_SIZE_LIMIT} (got {n})"
        )
    variables = matrix[0][0].variables
    order = sorted(range(n), key=lambda i: sum(0 if matrix[i][j].is_zero() else 1 for j in range(n)))
    perm_sign = _permutation_sign(order)
    rows = [matrix[i] for i in order]
    zero = SparsePolynomial.zero(variables)
    one = SparsePolynomial.constant(variables, 1)
    memo = {0: one}

    def minor(i, mask):
        if mask in memo:
            return memo[mask]
        total = zero
        sign = 1
        for j in range(n):
            bit = 1 << j
            if not mask & bit:
                continue
            a = rows[i][j]
            if not a.is_zero():
                sub = minor(i + 1, mask & ~bit)
                term = a * sub
                total = total + (term if sign > 0 else -term)
            sign = -sign
        memo[mask] = total
        return total

    full = (1 << n) - 1
    result = minor(0, full)
    return result if perm_sign > 0 else -result


def _permutation_sign(perm) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def det_stacked(top, bottom: RationalMatrix) -> SparsePolynomial:
    """Determinant of [top; bottom] with polynomial top rows and rational bottom.

    Laplace expansion over the top block: for each column subset carrying the
    top minor, the complementary constant minor is an exact rational number,
    which keeps the symbolic work down to s x s determinants.
    """
    s = len(top)
    n = len(top[0]) if s else bottom.cols
    d = bottom.rows
    if s + d != n:
        raise ValueError("stacked matrix is not square")
    if s == 0:
        variables = ()
        raise ValueError("no symbolic rows to expand")
    variables = top[0][0].variables
    total = SparsePolynomial.zero(variables)
    base = s * (s - 1) // 2
    for cols in combinations(range(n), s):
        comp = [j for j in range(n) if j not in cols]
        const = _rational_det(bottom.select_columns(comp)) if d else Fraction(1)
        if const == 0:
            continue
        sub = [[top[i][j] for j in cols] for i in range(s)]
        minor = det_symbolic(sub)
        if minor.is_zero():
            continue
        sign = -1 if (sum(cols) - base) % 2 else 1
        total = total + minor.scale(sign * const)
    return total


def _rational_det(m: RationalMatrix) -> Fraction:
    n = m.rows
    if n != m.cols:
        raise ValueError("determinant of non-square matrix")
    if n == 0:
        return Fraction(1)
    a = m.to_lists()
    det = Fraction(1)
    for i in range(n):
        piv = next((r for r in range(i, n) if a[r][i] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != i:
            a[i], a[piv] = a[piv], a[i]
            det = -det
        det *= a[i][i]
        inv = 1 / a[i][i]
        for r in range(i + 1, n):
            if a[r][i] != 0:
                f = a[r][i] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[i])]
    return det


# ---------------------------------------------------------------------------
# Sturm sequences


def univariate_coefficients(p: SparsePolynomial) -> tuple[list[Fraction], str]:
    """Dense coefficient list (ascending) and the variable name."""
    used = p.used_variables()
    if len(used) > 1:
        raise ValueError(f"polynomial is not univariate: uses {used}")
    if p.is_zero():
        raise ZeroPolynomialError("zero polynomial")
    name = used[0] if used else (p.variables[0] if p.variables else "x")
    idx = p.variables.index(name) if p.variables else 0
    deg = max(e[idx] for e in p.terms) if p.variables else 0
    coeffs = [Fraction(0)] * (deg + 1)
    for e, c in p.terms.items():
        coeffs[e[idx] if p.variables else 0] += c
    return coeffs, name


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_rem(a, b):
    a = _trim(a)
    b = _trim(b)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, bc in enumerate(b):
            a[i + shift] -= f * bc
        a = _trim(a)
    return a


def _poly_quo(a, b):
    a = _trim(a)
    b = _trim(b)
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = f
        for i, bc in enumerate(b):
            a[i + shift] -= f * bc
        a = _trim(a)
    return q


def _poly_gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _poly_rem(a, b)
    return a


def _derivative(c):
    return [i * x for i, x in enumerate(c)][1:]


def squarefree_part(coeffs):
    c = _trim([_frac(x) for x in coeffs])
    if len(c) <= 1:
        return c
    g = _poly_gcd(c, _derivative(c))
    if len(g) <= 1:
        return c
    return _trim(_poly_quo(c, g))


def sturm_chain(coeffs):
    p0 = _trim(coeffs)
    p1 = _trim(_derivative(p0))
    chain = [p0]
    if p1:
        chain.append(p1)
    while len(chain[-1]) > 1:
        rem = _poly_rem(chain[-2], chain[-1])
        if not rem:
            break
        chain.append([-x for x in rem])
    return chain


def _eval(coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _sign_at(coeffs, point) -> int:
    """Sign at a rational point, or at +inf / -inf / 0+ ('pos0')."""
    if point == "+inf":
        return _sgn(coeffs[-1])
    if point == "-inf":
        return _sgn(coeffs[-1]) * (-1 if (len(coeffs) - 1) % 2 else 1)
    if point == "pos0":
        for c in coeffs:
            if c != 0:
                return _sgn(c)
        return 0
    return _sgn(_eval(coeffs, point))


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def _variations(chain, point) -> int:
    signs = [s for s in (_sign_at(c, point) for c in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_distinct_roots(p: SparsePolynomial, lower=None, upper=None) -> int:
    """Distinct real roots of a univariate polynomial in the open interval.

    ``lower``/``upper`` are rationals or None for -inf/+inf; roots exactly at
    finite endpoints are divided out first, so the interval is open.
    """
    coeffs, _ = univariate_coefficients(p)
    return count_distinct_roots_coeffs(coeffs, lower, upper)


def count_distinct_roots_coeffs(coeffs, lower=None, upper=None) -> int:
    c = squarefree_part(coeffs)
    if len(c) <= 1:
        if not c:
            raise ZeroPolynomialError("zero polynomial")
        return 0
    for endpoint in (lower, upper):
        if endpoint is None:
            continue
        e = _frac(endpoint)
        while len(c) > 1 and _eval(c, e) == 0:
            c = _poly_quo(c, [-e, Fraction(1)])
    if len(c) <= 1:
        return 0
    chain = sturm_chain(c)
    lo = "-inf" if lower is None else _frac(lower)
    hi = "+inf" if upper is None else _frac(upper)
    return _variations(chain, lo) - _variations(chain, hi)


def sturm_positive_roots(p: SparsePolynomial) -> int:
    """Number of distinct roots in (0, inf); the squarefree part is counted."""
    coeffs, _ = univariate_coefficients(p)
    # strip the monomial factor so 0 is not a root
    k = 0
    while k < len(coeffs) and coeffs[k] == 0:
        k += 1
    coeffs = coeffs[k:]
    c = squarefree_part(coeffs)
    if len(c) <= 1:
        return 0
    chain = sturm_chain(c)
    return _variations(chain, "pos0") - _variations(chain, "+inf")
