"""Core toricity pipeline for vertically parametrized systems.

A vertical system is a pair (C, M): each column of the integer exponent
matrix M names a monomial, each row of the rational coefficient matrix C a
linear combination of those monomials scaled by one positive parameter per
column.  The pipeline computes the maximal scaling lattice leaving every
zero set invariant, decides nondegeneracy, and classifies how many lattice
cosets the positive zero set consists of.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import comb

from .exactalg import (
    CircuitBasis,
    IntegerMatrix,
    KernelLattice,
    RationalMatrix,
    _frac,
    clear_denominators,
    hermite_normal_form,
    integer_kernel_basis,
    kernel_circuit_basis,
    random_kernel_vector,
    random_rng,
    same_row_lattice,
    solve,
)
from .polyhedra import (
    SupportSet,
    VolumeBudgetError,
    extreme_rays,
    mixed_volume,
    strictly_positive_kernel,
    positive_row_space,
)
from .polyring import (
    DeterminantSizeError,
    SignVerdict,
    SparsePolynomial,
    _rational_det,
    count_distinct_roots_coeffs,
    det_stacked,
    det_symbolic,
    render,
    sign_classify,
)


class GroupMode(Enum):
    POSITIVE = "positive"
    REAL_STAR = "real-star"
    COMPLEX_STAR = "complex-star"


class Verdict(Enum):
    EMPTY_POSITIVE_LOCUS = "empty_positive_locus"
    INVARIANT_ONLY = "invariant_only"
    NOT_LOCALLY_TORIC = "not_locally_toric"
    GENERICALLY_LOCALLY_TORIC = "generically_locally_toric"
    LOCALLY_TORIC = "locally_toric"
    GENERICALLY_TORIC = "generically_toric"
    TORIC = "toric"


class EmptyLocusError(ValueError):
    """The zero sets are empty for every parameter value in the group."""


class InternalInconsistencyError(RuntimeError):
    """s + d > n together with nondegeneracy: impossible, so a bug upstream."""


class DegenerateSliceError(ValueError):
    """The linear slice of the counting system is degenerate."""


# ---------------------------------------------------------------------------
# The system


class VerticalSystem:
    """A pair (C, M) with C of full row rank and matching column counts.

    A coefficient matrix without full row rank is replaced by the canonical
    basis of its row space, which leaves the zero sets unchanged.
    """

    __slots__ = ("C", "M", "variables", "parameters")

    def __init__(self, C: RationalMatrix, M: IntegerMatrix, variables=None, parameters=None):
        if C.cols != M.cols:
            raise ValueError(f"C has {C.cols} columns but M has {M.cols}")
        if C.rank() < C.rows:
            C = C.row_basis()
        if C.rows > M.rows:
            raise ValueError("more independent equations than variables")
        self.C = C
        self.M = M
        self.variables = tuple(variables) if variables else tuple(f"x{i+1}" for i in range(M.rows))
        self.parameters = tuple(parameters) if parameters else tuple(f"k{j+1}" for j in range(M.cols))
        if len(self.variables) != M.rows or len(self.parameters) != M.cols:
            raise ValueError("name list lengths do not match the matrices")

    @property
    def s(self) -> int:
        return self.C.rows

    @property
    def m(self) -> int:
        return self.C.cols

    @property
    def n(self) -> int:
        return self.M.rows

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(repr(self.C).encode())
        h.update(repr(self.M).encode())
        return h.hexdigest()[:12]

    def row_support(self, i: int) -> frozenset[int]:
        return frozenset(j for j in range(self.m) if self.C.entry(i, j) != 0)

    def polynomials(self, kappa) -> list[SparsePolynomial]:
        """Specialized rows C(kappa . x^M) as polynomials in the variables.

        Negative exponents are cleared per row by a monomial factor, which
        does not change zeros with nonzero coordinates.
        """
        kappa = [_frac(k) for k in kappa]
        if len(kappa) != self.m:
            raise ValueError("parameter vector length mismatch")
        out = []
        for i in range(self.s):
            terms: dict[tuple[int, ...], Fraction] = {}
            for j in range(self.m):
                c = self.C.entry(i, j) * kappa[j]
                if c == 0:
                    continue
                e = tuple(self.M.entry(k, j) for k in range(self.n))
                terms[e] = terms.get(e, Fraction(0)) + c
            terms = {e: c for e, c in terms.items() if c != 0}
            if terms:
                mins = [min(e[k] for e in terms) for k in range(self.n)]
                shift = tuple(-m if m < 0 else 0 for m in mins)
                terms = {tuple(x + sft for x, sft in zip(e, shift)): c for e, c in terms.items()}
            out.append(SparsePolynomial(self.variables, terms))
        return out

    def row_support_points(self, i: int) -> SupportSet:
        """Newton support of row i (exponent columns with nonzero coefficient)."""
        pts = [tuple(self.M.col(j)) for j in range(self.m) if self.C.entry(i, j) != 0]
        return SupportSet(tuple(pts))


def build_free_system(supports, signs=None, variables=None) -> VerticalSystem:
    """System with fixed supports and free coefficients of prescribed signs.

    ``supports[i]`` is the ordered point list of the i-th polynomial and
    ``signs[i]`` assigns each point '+', '-', '+-' (both, by repeating the
    monomial), or an explicit rational coefficient.  The coefficient matrix
    is block diagonal with one row per polynomial.
    """
    supports = [list(map(tuple, pts)) for pts in supports]
    if not supports:
        raise ValueError("no supports given")
    n = len(supports[0][0])
    cols: list[tuple[int, ...]] = []
    c_rows: list[list[Fraction]] = []
    for i, pts in enumerate(supports):
        row_coeffs: list[Fraction] = []
        row_cols: list[tuple[int, ...]] = []
        pattern = signs[i] if signs else ["+"] * len(pts)
        if len(pattern) != len(pts):
            raise ValueError("sign pattern length mismatch")
        for p, sgn in zip(pts, pattern):
            if sgn == "+":
                row_cols.append(p)
                row_coeffs.append(Fraction(1))
            elif sgn == "-":
                row_cols.append(p)
                row_coeffs.append(Fraction(-1))
            elif sgn in ("+-", "-+", "pm"):
                row_cols.extend([p, p])
                row_coeffs.extend([Fraction(1), Fraction(-1)])
            else:
                row_cols.append(p)
                row_coeffs.append(_frac(sgn))
        start = len(cols)
        cols.extend(row_cols)
        c_rows.append((start, row_coeffs))
    m = len(cols)
    rows = []
    for start, coeffs in c_rows:
        row = [Fraction(0)] * m
        for k, c in enumerate(coeffs):
            row[start + k] = c
        rows.append(row)
    C = RationalMatrix(rows)
    M = IntegerMatrix([[p[k] for p in cols] for k in range(n)])
    return VerticalSystem(C, M, variables=variables)


# ---------------------------------------------------------------------------
# Matroid partition and invariance


@dataclass(frozen=True)
class MatroidPartition:
    blocks: tuple[frozenset[int], ...]
    ground_size: int

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self, j: int) -> frozenset[int]:
        for b in self.blocks:
            if j in b:
                return b
        raise KeyError(j)

    def refines(self, other: "MatroidPartition") -> bool:
        return all(any(b <= o for o in other.blocks) for b in self.blocks)


def _merge_supports(supports, ground_size: int) -> MatroidPartition:
    parent = list(range(ground_size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in supports:
        items = sorted(s)
        for a, b in zip(items, items[1:]):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra
    groups: dict[int, set[int]] = {}
    for j in range(ground_size):
        groups.setdefault(find(j), set()).add(j)
    blocks = tuple(sorted((frozenset(g) for g in groups.values()), key=min))
    return MatroidPartition(blocks, ground_size)


def matroid_partition(sys: VerticalSystem, basis: CircuitBasis | None = None) -> MatroidPartition:
    """Blocks of the column matroid of C: union-find over circuit supports."""
    if basis is None:
        basis = kernel_circuit_basis(sys.C)
    return _merge_supports(basis.supports, sys.m)


def positive_locus_nonempty(sys: VerticalSystem, mode: GroupMode) -> bool:
    """Whether some parameter value admits a zero over the group."""
    basis = kernel_circuit_basis(sys.C)
    if basis.support_union() != frozenset(range(sys.m)):
        return False
    if mode is GroupMode.POSITIVE:
        return not strictly_positive_kernel(sys.C).is_empty
    return True


@dataclass(frozen=True)
class InvarianceResult:
    """Maximal-rank scaling lattice: zero sets are unions of its cosets."""

    A: IntegerMatrix  # d x n, Hermite normal form, full row rank
    d: int
    mode: GroupMode


def _cayley_matrix(M: IntegerMatrix, partition: MatroidPartition) -> IntegerMatrix:
    rows = M.to_lists()
    for block in partition.blocks:
        rows.append([1 if j in block else 0 for j in range(M.cols)])
    return IntegerMatrix.with_width(rows, M.cols)


def _invariance_from_partition(sys: VerticalSystem, partition: MatroidPartition,
                               lattice: KernelLattice) -> IntegerMatrix:
    mhat = _cayley_matrix(sys.M, partition)
    lattice_rows = integer_kernel_basis(mhat, lattice)
    head = IntegerMatrix.with_width(
        [list(lattice_rows.row(i))[: sys.n] for i in range(lattice_rows.rows)], sys.n
    )
    return hermite_normal_form(head) if head.rows else head


def invariance_group(sys: VerticalSystem, mode: GroupMode = GroupMode.POSITIVE,
                     partition: MatroidPartition | None = None) -> InvarianceResult:
    """Maximal-rank A with every zero set invariant under the A-scalings.

    The exponent matrix is augmented with one indicator row per matroid
    block; the first n coordinates of its transpose-kernel lattice give A.
    Requires a nonempty locus for the chosen group.
    """
    if not positive_locus_nonempty(sys, mode):
        raise EmptyLocusError(f"zero sets empty over {mode.value} for all parameters")
    if partition is None:
        partition = matroid_partition(sys)
    lattice = KernelLattice.INTEGER_LATTICE if mode is GroupMode.REAL_STAR \
        else KernelLattice.RATIONAL_SATURATED
    A = _invariance_from_partition(sys, partition, lattice)
    return InvarianceResult(A, A.rows, mode)


def quasihomogeneity_weights(sys: VerticalSystem) -> IntegerMatrix:
    """Weight lattice from the coarser partition induced by the rows of C.

    Same construction as the invariance lattice but merging columns by row
    supports only; its rank matching the invariance rank means invariance
    is explained by quasihomogeneity alone.
    """
    supports = [sys.row_support(i) for i in range(sys.s)]
    partition = _merge_supports(supports, sys.m)
    return _invariance_from_partition(sys, partition, KernelLattice.RATIONAL_SATURATED)


# ---------------------------------------------------------------------------
# Nondegeneracy


def scaled_jacobian(sys: VerticalSystem, w) -> RationalMatrix:
    """C diag(w) M^T: the Jacobian shape governing nondegeneracy."""
    vec = [_frac(x) for x in w]
    return sys.C @ RationalMatrix.diagonal(vec) @ sys.M.to_rational().transpose()


@dataclass(frozen=True)
class NondegeneracyResult:
    status: str  # "yes" | "no" | "undetermined"
    witness: tuple[Fraction, ...] | None = None


_NONDEG_MINOR_CAP = 5000


def nondegeneracy(sys: VerticalSystem, seed: int = 0) -> NondegeneracyResult:
    """Whether C diag(w) M^T reaches rank s for some kernel vector w.

    Random kernel vectors are tried first; on failure the rank over the
    function field of kernel coordinates is settled exactly through an
    s x s minor sweep when that is affordable, otherwise 'undetermined'.
    """
    basis = kernel_circuit_basis(sys.C)
    if len(basis) == 0:
        return NondegeneracyResult("no" if sys.s > 0 else "yes")
    for attempt in range(6):
        w = random_kernel_vector(sys.C, seed + 7919 * attempt)
        vec = tuple(w.entry(i, 0) for i in range(sys.m))
        if scaled_jacobian(sys, vec).rank() == sys.s:
            return NondegeneracyResult("yes", vec)
    # extra independent evaluations before any symbolic work
    for attempt in range(6, 11):
        w = random_kernel_vector(sys.C, seed + 7919 * attempt)
        vec = tuple(w.entry(i, 0) for i in range(sys.m))
        if scaled_jacobian(sys, vec).rank() == sys.s:
            return NondegeneracyResult("yes", vec)
    if sys.s > 6 or comb(sys.n, sys.s) > _NONDEG_MINOR_CAP:
        return NondegeneracyResult("undetermined")
    lam = tuple(f"l{k+1}" for k in range(len(basis)))
    top = _scaled_jacobian_symbolic(sys, basis.vectors, lam)
    for cols in combinations(range(sys.n), sys.s):
        minor = det_symbolic([[top[i][j] for j in cols] for i in range(sys.s)])
        if not minor.is_zero():
            vec = _witness_from_minor(sys, basis, minor, lam, seed)
            return NondegeneracyResult("yes", vec)
    return NondegeneracyResult("no")


def _scaled_jacobian_symbolic(sys: VerticalSystem, generators, lam):
    """Entries of C diag(w) M^T with w a symbolic combination of generators."""
    entries = []
    for i in range(sys.s):
        row = []
        for k in range(sys.n):
            terms = {}
            for idx, g in enumerate(generators):
                coeff = sum(sys.C.entry(i, j) * g[j] * sys.M.entry(k, j) for j in range(sys.m))
                if coeff != 0:
                    e = [0] * len(lam)
                    e[idx] = 1
                    terms[tuple(e)] = coeff
            row.append(SparsePolynomial(lam, terms))
        entries.append(row)
    return entries


def _witness_from_minor(sys, basis, minor, lam, seed):
    rng = random_rng(seed ^ 0x5EED)
    for _ in range(64):
        point = {name: Fraction(rng.randint(-(1 << 16), 1 << 16)) for name in lam}
        if minor.evaluate(point) != 0:
            w = [Fraction(0)] * sys.m
            for name, g in zip(lam, basis.vectors):
                c = point[name]
                for j in range(sys.m):
                    w[j] += c * g[j]
            return tuple(w)
    return None


@dataclass(frozen=True)
class AllPositiveResult:
    status: str  # "yes" | "unknown"
    minor_columns: tuple[int, ...] | None = None
    certificate: SparsePolynomial | None = None
    reason: str | None = None


_ALLPOS_MINOR_CAP = 20000


def nondegeneracy_all_positive(sys: VerticalSystem) -> AllPositiveResult:
    """Sufficient test for full rank of C diag(w) M^T on the whole positive kernel.

    The positive kernel is parametrized by the extreme rays; a single s x s
    minor that is a nonzero polynomial with one coefficient sign certifies
    the rank for every strictly positive combination.  Failure to find one
    is reported as 'unknown', never as a refutation.
    """
    if strictly_positive_kernel(sys.C).is_empty:
        raise EmptyLocusError("positive kernel is empty")
    if sys.s == 0:
        return AllPositiveResult("yes")  # the rank condition is vacuous
    rays = extreme_rays(sys.C)
    if not rays.rays:
        raise EmptyLocusError("positive kernel is empty")
    if sys.s > 12 or comb(sys.n, sys.s) > _ALLPOS_MINOR_CAP:
        return AllPositiveResult("unknown", reason="minor sweep too large")
    lam = tuple(f"l{k+1}" for k in range(len(rays.rays)))
    top = _scaled_jacobian_symbolic(sys, [tuple(map(Fraction, r)) for r in rays.rays], lam)
    for cols in combinations(range(sys.n), sys.s):
        minor = det_symbolic([[top[i][j] for j in cols] for i in range(sys.s)])
        if sign_classify(minor) in (SignVerdict.ALL_POSITIVE, SignVerdict.ALL_NEGATIVE):
            return AllPositiveResult("yes", cols, minor)
    return AllPositiveResult("unknown", reason="no sign-definite minor")


def local_toricity(sys: VerticalSystem, inv: InvarianceResult, nondeg: NondegeneracyResult,
                   all_positive: AllPositiveResult | None = None) -> Verdict:
    """Dimension test: local toricity holds exactly when s + d = n."""
    if nondeg.status != "yes":
        return Verdict.INVARIANT_ONLY
    total = sys.s + inv.d
    if total > sys.n:
        raise InternalInconsistencyError(
            f"s + d = {total} exceeds n = {sys.n} for a nondegenerate system"
        )
    if total < sys.n:
        return Verdict.NOT_LOCALLY_TORIC
    if all_positive is not None and all_positive.status == "yes":
        return Verdict.LOCALLY_TORIC
    return Verdict.GENERICALLY_LOCALLY_TORIC


# ---------------------------------------------------------------------------
# Injectivity


@dataclass(frozen=True)
class InjectivityResult:
    toric: bool
    determinant: SparsePolynomial | None = None
    sign: SignVerdict | None = None
    reason: str | None = None


_INJECTIVITY_SUBSET_CAP = 20000


def injectivity_test(sys: VerticalSystem, inv: InvarianceResult) -> InjectivityResult:
    """Sign-definite symbolic determinant certifying at most one coset.

    Builds [C diag(mu) M^T diag(al); A] with one symbolic mu per parameter
    and one al per variable; a nonzero determinant with all coefficients of
    one sign certifies toricity over the positive reals.
    """
    if inv.d != sys.n - sys.s:
        raise ValueError("injectivity needs a full-dimensional invariance lattice")
    if sys.s == 0:
        # no equations: the zero set is the full torus, a single coset
        det = SparsePolynomial.constant(("al1",), _rational_det(inv.A.to_rational()))
        sign = sign_classify(det)
        if sign in (SignVerdict.ALL_POSITIVE, SignVerdict.ALL_NEGATIVE):
            return InjectivityResult(True, det, sign)
        return InjectivityResult(False, det, sign, reason="degenerate lattice")
    if sys.s > 12 or comb(sys.n, sys.s) > _INJECTIVITY_SUBSET_CAP:
        return InjectivityResult(False, reason="determinant too large")
    mu = tuple(f"mu{j+1}" for j in range(sys.m))
    al = tuple(f"al{k+1}" for k in range(sys.n))
    variables = mu + al
    top = []
    for i in range(sys.s):
        row = []
        for k in range(sys.n):
            terms = {}
            for j in range(sys.m):
                coeff = sys.C.entry(i, j) * sys.M.entry(k, j)
                if coeff != 0:
                    e = [0] * len(variables)
                    e[j] = 1
                    e[sys.m + k] = 1
                    terms[tuple(e)] = coeff
            row.append(SparsePolynomial(variables, terms))
        top.append(row)
    try:
        det = det_stacked(top, inv.A.to_rational()) if sys.s else None
    except DeterminantSizeError as exc:
        return InjectivityResult(False, reason=str(exc))
    sign = sign_classify(det)
    if sign in (SignVerdict.ALL_POSITIVE, SignVerdict.ALL_NEGATIVE):
        return InjectivityResult(True, det, sign)
    return InjectivityResult(False, det, sign, reason=f"determinant {sign.value}")


# ---------------------------------------------------------------------------
# Coset counting


@dataclass(frozen=True)
class CosetCountingSystem:
    """The square system (C(kappa . x^M), A x - b) whose positive zeros
    are in bijection with the cosets."""

    base: VerticalSystem
    A: IntegerMatrix
    kappa: tuple[Fraction, ...]
    b: tuple[Fraction, ...]
    point: tuple[Fraction, ...]  # strictly positive witness with A point = b


def coset_counting_system(sys: VerticalSystem, inv: InvarianceResult, kappa,
                          seed: int = 0, point=None) -> CosetCountingSystem:
    """Attach the affine slice A x = b with b = A p for a positive point p."""
    if inv.d != sys.n - sys.s:
        raise ValueError("coset counting needs a full-dimensional invariance lattice")
    kap = tuple(_frac(k) for k in kappa)
    if len(kap) != sys.m or any(k <= 0 for k in kap):
        raise ValueError("kappa must be a strictly positive vector of length m")
    if point is not None:
        p = tuple(_frac(x) for x in point)
        if len(p) != sys.n or any(x <= 0 for x in p):
            raise ValueError("point must be strictly positive of length n")
    else:
        rng = random_rng(seed ^ 0xB00)
        p = tuple(Fraction(rng.randint(1, 1 << 16), 1 << 8) for _ in range(sys.n))
    b = tuple(sum(Fraction(inv.A.entry(i, j)) * p[j] for j in range(sys.n))
              for i in range(inv.A.rows))
    return CosetCountingSystem(sys, inv.A, kap, b, p)


@dataclass(frozen=True)
class CountResult:
    kind: str  # "exact" | "heuristic" | "exported"
    count: int | None = None
    path: str | None = None


def count_positive_cosets(h: CosetCountingSystem, seed: int = 0, starts: int = 200,
                          export_path: str | None = None) -> CountResult:
    """Count positive zeros of the counting system.

    One polynomial equation: the slice is eliminated exactly onto a line,
    positivity bounds become an interval, and a Sturm sequence counts the
    distinct roots.  More equations: damped multistart Newton gives a
    clearly labeled heuristic count, or the system is written out for an
    external solver.
    """
    sys_ = h.base
    d = h.A.rows
    if h.A.rank() < d:
        raise DegenerateSliceError("slice matrix does not have full row rank")
    if sys_.s == 1:
        return CountResult("exact", _exact_count_on_line(h))
    if export_path is not None:
        with open(export_path, "w", encoding="utf-8") as fh:
            fh.write(render_exchange(h))
        return CountResult("exported", path=export_path)
    return CountResult("heuristic", _newton_count(h, seed, starts))


def _exact_count_on_line(h: CosetCountingSystem) -> int:
    sys_ = h.base
    n = sys_.n
    if h.A.rows:
        x0 = solve(h.A.to_rational(), h.b)
        if x0 is None:
            raise DegenerateSliceError("inconsistent slice")
        ker = kernel_circuit_basis(h.A.to_rational())
        if len(ker) != 1:
            raise DegenerateSliceError("slice does not cut down to a line")
        direction = clear_denominators(ker.vectors[0])
    else:  # n = 1, no slice: the line is the coordinate axis
        x0 = tuple(Fraction(0) for _ in range(n))
        direction = tuple([1] * n)
    lo = None
    hi = None
    for i in range(n):
        v = direction[i]
        if v == 0:
            if x0[i] <= 0:
                return 0
            continue
        bound = -x0[i] / Fraction(v)
        if v > 0:
            lo = bound if lo is None else max(lo, bound)
        else:
            hi = bound if hi is None else min(hi, bound)
    if lo is not None and hi is not None and lo >= hi:
        return 0
    poly = sys_.polynomials(h.kappa)[0]
    coeffs = _restrict_to_line(poly, x0, direction, sys_.variables)
    if all(c == 0 for c in coeffs):
        raise DegenerateSliceError("system vanishes identically on the slice")
    return count_distinct_roots_coeffs(coeffs, lo, hi)


def _restrict_to_line(poly: SparsePolynomial, x0, direction, variables):
    """Coefficients of t -> poly(x0 + t v), ascending."""
    affine = {}
    for i, name in enumerate(variables):
        affine[name] = (x0[i], Fraction(direction[i]))
    coeffs = [Fraction(0)]

    def mul(a, b):
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return out

    for e, c in poly.terms.items():
        term = [c]
        for name, k in zip(poly.variables, e):
            base = [affine[name][0], affine[name][1]]
            for _ in range(k):
                term = mul(term, base)
        if len(term) > len(coeffs):
            coeffs.extend([Fraction(0)] * (len(term) - len(coeffs)))
        for i, x in enumerate(term):
            coeffs[i] += x
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


NEWTON_RESIDUAL = 1e-12
NEWTON_CLUSTER_RADIUS = 1e-6
NEWTON_POSITIVITY_MARGIN = 1e-9


def _newton_count(h: CosetCountingSystem, seed: int, starts: int) -> int:
    """Damped Newton in log coordinates: x = exp(y) keeps iterates positive."""
    import numpy as np

    sys_ = h.base
    n = sys_.n
    polys = sys_.polynomials(h.kappa)
    rows = []
    for p in polys:
        scale = max((abs(float(c)) for c in p.terms.values()), default=1.0) or 1.0
        rows.append([(float(c) / scale, e) for e, c in p.terms.items()])
    lin_scale = max((abs(float(h.A.entry(i, j)))
                     for i in range(h.A.rows) for j in range(n)), default=1.0) or 1.0
    lin = [([float(a) / lin_scale for a in h.A.row(i)], float(h.b[i]) / lin_scale)
           for i in range(h.A.rows)]

    def fun(x):
        """Row values and per-row magnitudes (sum of |term|) for scaling.

        The residual test is relative to the term magnitudes: an absolute
        test is unreachable in floating point once the root coordinates are
        large, because the row value is a cancellation of huge terms.
        """
        vals = []
        mags = []
        for terms in rows:
            acc = 0.0
            mag = 1.0
            for c, e in terms:
                prod = c
                for xi, k in zip(x, e):
                    if k:
                        prod *= xi ** k
                acc += prod
                mag += abs(prod)
            vals.append(acc)
            mags.append(mag)
        for coefs, rhs in lin:
            acc = -rhs
            mag = 1.0 + abs(rhs)
            for a, xi in zip(coefs, x):
                acc += a * xi
                mag += abs(a * xi)
            vals.append(acc)
            mags.append(mag)
        return np.array(vals), np.array(mags)

    def jac(x):
        out = np.zeros((n, n))
        for r, terms in enumerate(rows):
            for c, e in terms:
                for v in range(n):
                    if e[v]:
                        prod = c * e[v]
                        for u, k in enumerate(e):
                            kk = k - 1 if u == v else k
                            if kk:
                                prod *= x[u] ** kk
                        out[r, v] += prod
        for idx, (coefs, _) in enumerate(lin):
            out[len(rows) + idx, :] = coefs
        return out

    # scale guess from the slice offsets: roots sit at or below b / |A|
    offset_mags = [abs(float(b)) for b in h.b]
    center = np.log10(max(sum(offset_mags) / len(offset_mags), 1e-2)) if offset_mags else 0.0
    anchor = np.log10(np.array([float(p) for p in h.point]))

    rng = random_rng(seed ^ 0xAB1E)
    found = []
    for trial in range(starts):
        if trial % 2 == 0:
            logx = np.array([rng.random() * 7.5 - 5 + center for _ in range(n)])
        else:  # jitter around the known positive point on the slice
            logx = anchor + np.array([rng.random() * 4 - 2 for _ in range(n)])
        x = 10.0 ** logx
        ok = False
        for _ in range(120):
            f, mags = fun(x)
            res = float(np.max(np.abs(f) / mags))
            if res < NEWTON_RESIDUAL:
                ok = True
                break
            try:
                # step in y = log x on magnitude-scaled rows
                scaled_jac = jac(x) * x[None, :] / mags[:, None]
                dy = np.linalg.solve(scaled_jac, -f / mags)
            except np.linalg.LinAlgError:
                break
            if not np.all(np.isfinite(dy)):
                break
            norm = float(np.max(np.abs(dy)))
            if norm > 20.0:  # cap the log-step to stay in float range
                dy = dy * (20.0 / norm)
            alpha = 1.0
            improved = False
            while alpha > 1e-10:
                xn = x * np.exp(alpha * dy)
                fn, mn = fun(xn)
                if np.all(np.isfinite(xn)) and float(np.max(np.abs(fn) / mn)) < res:
                    x = xn
                    improved = True
                    break
                alpha *= 0.5
            if not improved:
                break
        if ok and float(np.min(x)) > NEWTON_POSITIVITY_MARGIN:
            found.append(x)
    clusters: list = []
    for x in found:
        for c in clusters:
            rel = float(np.max(np.abs(c - x) / np.maximum(1.0, np.abs(c))))
            if rel < NEWTON_CLUSTER_RADIUS:
                break
        else:
            clusters.append(x)
    return len(clusters)


def render_exchange(h: CosetCountingSystem) -> str:
    """Text form of the counting system for external solvers.

    Variables line, then one polynomial per line in canonical rendering,
    then the affine slice equations.
    """
    sys_ = h.base
    lines = ["# variables", " ".join(sys_.variables), "# polynomials"]
    for p in sys_.polynomials(h.kappa):
        lines.append(render(p))
    lines.append("# linear")
    for i in range(h.A.rows):
        terms = {}
        for j in range(sys_.n):
            v = h.A.entry(i, j)
            if v:
                e = [0] * sys_.n
                e[j] = 1
                terms[tuple(e)] = v
        terms[tuple([0] * sys_.n)] = -h.b[i]
        lines.append(render(SparsePolynomial(sys_.variables, terms)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Constant coset count


@dataclass(frozen=True)
class ConstantCosetConditions:
    boundary_empty: str          # "yes" | "unknown"  (siphons or user assertion)
    rank_all_positive: str       # "yes" | "unknown"  (sign-definite determinant)
    row_space_positive: bool     # exact LP

    @property
    def all_hold(self) -> bool:
        return self.boundary_empty == "yes" and self.rank_all_positive == "yes" and self.row_space_positive


def constant_coset_conditions(sys: VerticalSystem, inv: InvarianceResult,
                              boundary: str = "unknown") -> ConstantCosetConditions:
    """The three sufficient conditions for a parameter-independent coset count.

    (i) no boundary zeros on the slice (supplied flag), (ii) the augmented
    scaled Jacobian has full rank on the whole positive kernel (checked by a
    sign-definite symbolic determinant), (iii) the row space of A meets the
    positive orthant.
    """
    if inv.d != sys.n - sys.s:
        raise ValueError("constant-count conditions need a full-dimensional lattice")
    if any(sys.M.entry(i, j) < 0 for i in range(sys.n) for j in range(sys.m)):
        raise ValueError("conditions require a nonnegative exponent matrix")
    boundary = "yes" if boundary == "yes" else "unknown"
    cond_iii = positive_row_space(inv.A)
    cond_ii = _augmented_all_positive(sys, inv)
    return ConstantCosetConditions(boundary, cond_ii, cond_iii)


def _augmented_all_positive(sys: VerticalSystem, inv: InvarianceResult) -> str:
    if strictly_positive_kernel(sys.C).is_empty:
        return "unknown"
    rays = extreme_rays(sys.C)
    if not rays.rays:
        return "unknown"
    if sys.n > 12 or comb(sys.n, sys.s) > _ALLPOS_MINOR_CAP:
        return "unknown"
    lam = tuple(f"l{k+1}" for k in range(len(rays.rays)))
    hvars = tuple(f"h{k+1}" for k in range(sys.n))
    variables = lam + hvars
    base = _scaled_jacobian_symbolic(sys, [tuple(map(Fraction, r)) for r in rays.rays], lam)
    top = []
    for i in range(sys.s):
        row = []
        for k in range(sys.n):
            p = base[i][k].extend(variables)
            hk = SparsePolynomial.variable(variables, hvars[k])
            row.append(p * hk)
        top.append(row)
    try:
        det = det_stacked(top, inv.A.to_rational())
    except DeterminantSizeError:
        return "unknown"
    if sign_classify(det) in (SignVerdict.ALL_POSITIVE, SignVerdict.ALL_NEGATIVE):
        return "yes"
    return "unknown"


# ---------------------------------------------------------------------------
# Binomial quick check


def binomial_quickcheck(sys: VerticalSystem) -> bool:
    """Echelon rows that are all two-term with opposite signs: an immediate
    positive-toricity certificate (binomial system)."""
    red, pivots = sys.C.rref()
    for i in range(len(pivots)):
        support = [j for j in range(sys.m) if red.entry(i, j) != 0]
        if len(support) != 2:
            return False
        a, b = (red.entry(i, support[0]), red.entry(i, support[1]))
        if (a > 0) == (b > 0):
            return False
    return True


# ---------------------------------------------------------------------------
# Orchestration


@dataclass
class AnalyzeOptions:
    kappa: tuple | None = None          # parameter point for coset counting
    boundary: str = "unknown"           # condition-(i) flag: "yes" or "unknown"
    mixed_volume_max_dim: int = 8
    newton_starts: int = 200
    all_positive_enrichment_cap: int = 40   # comb(n, s) limit when not needed for the verdict


@dataclass(frozen=True)
class EvidenceRecord:
    test: str
    inputs: str
    outcome: str


@dataclass
class ToricityReport:
    mode: GroupMode
    seed: int
    n: int
    m: int
    s: int
    verdict: Verdict | None = None
    d: int | None = None
    invariance: InvarianceResult | None = None
    partition: MatroidPartition | None = None
    quasihomogeneity_rank: int | None = None
    quasihomogeneity_agrees: bool | None = None
    nondegenerate: str = "unknown"      # "yes" | "no" | "yes-for-all-positive" | "unknown"
    witness: tuple | None = None
    positive_kernel_witness: tuple | None = None
    binomial: bool | None = None
    injectivity: InjectivityResult | None = None
    mixed_volume_bound: int | None = None
    conditions: ConstantCosetConditions | None = None
    count: CountResult | None = None
    coset_count: int | None = None      # exact count when established
    coset_bound: int | None = None
    constant_count: bool = False
    parameter_region_full: bool = False  # all positive parameters admit zeros
    evidence: list[EvidenceRecord] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def log(self, test: str, inputs: str, outcome: str):
        self.evidence.append(EvidenceRecord(test, inputs, outcome))

    def to_dict(self) -> dict:
        inv = None
        if self.invariance is not None:
            inv = {"A": self.invariance.A.to_lists(), "d": self.invariance.d,
                   "mode": self.invariance.mode.value}
        return {
            "schema": 1,
            "mode": self.mode.value,
            "seed": self.seed,
            "n": self.n,
            "m": self.m,
            "s": self.s,
            "d": self.d,
            "verdict": self.verdict.value if self.verdict else None,
            "invariance": inv,
            "matroid_partition": [sorted(j + 1 for j in b) for b in self.partition.blocks]
            if self.partition else None,
            "quasihomogeneity": {"rank": self.quasihomogeneity_rank,
                                 "agrees": self.quasihomogeneity_agrees},
            "nondegenerate": self.nondegenerate,
            "witness": [str(x) for x in self.witness] if self.witness else None,
            "binomial_quickcheck": self.binomial,
            "injectivity": None if self.injectivity is None else {
                "toric": self.injectivity.toric,
                "sign": self.injectivity.sign.value if self.injectivity.sign else None,
                "determinant": render(self.injectivity.determinant)
                if self.injectivity.determinant is not None else None,
                "reason": self.injectivity.reason,
            },
            "mixed_volume": self.mixed_volume_bound,
            "constant_coset_conditions": None if self.conditions is None else {
                "boundary_empty": self.conditions.boundary_empty,
                "rank_all_positive": self.conditions.rank_all_positive,
                "row_space_positive": self.conditions.row_space_positive,
            },
            "coset_count": self.coset_count,
            "coset_count_kind": self.count.kind if self.count else None,
            "coset_bound": self.coset_bound,
            "constant_count": self.constant_count,
            "parameter_region_full": self.parameter_region_full,
            "evidence": [{"test": e.test, "inputs": e.inputs, "outcome": e.outcome}
                         for e in self.evidence],
            "notes": list(self.notes),
        }


def _coset_supports(sys: VerticalSystem, inv: InvarianceResult) -> list[SupportSet]:
    supports = [sys.row_support_points(i) for i in range(sys.s)]
    for i in range(inv.A.rows):
        pts = [tuple([0] * sys.n)]
        for j in range(sys.n):
            if inv.A.entry(i, j) != 0:
                e = [0] * sys.n
                e[j] = 1
                pts.append(tuple(e))
        supports.append(SupportSet(tuple(pts)))
    return supports


def analyze(sys: VerticalSystem, mode: GroupMode = GroupMode.POSITIVE, seed: int = 0,
            options: AnalyzeOptions | None = None) -> ToricityReport:
    """Full decision pipeline over the chosen scalar group.

    Invariance lattice, nondegeneracy, dimension test, injectivity, mixed
    volume, all-positive nondegeneracy, constant-count conditions, and an
    exact or heuristic coset count, in that order; every branch outcome is
    appended to the evidence trail.  Counting and the positivity-specific
    certificates run only for the positive-reals mode.
    """
    opts = options or AnalyzeOptions()
    rep = ToricityReport(mode=mode, seed=seed, n=sys.n, m=sys.m, s=sys.s)
    fp = sys.fingerprint()

    basis = kernel_circuit_basis(sys.C)
    rep.binomial = binomial_quickcheck(sys)
    rep.log("binomial_quickcheck", fp, str(rep.binomial))

    if basis.support_union() != frozenset(range(sys.m)):
        rep.verdict = Verdict.EMPTY_POSITIVE_LOCUS
        rep.log("support_union", fp, "incomplete")
        rep.notes.append(f"zero sets are empty over {mode.value} for every parameter value")
        return rep
    rep.log("support_union", fp, "complete")

    if mode is GroupMode.POSITIVE:
        pos = strictly_positive_kernel(sys.C)
        if pos.is_empty:
            rep.verdict = Verdict.EMPTY_POSITIVE_LOCUS
            rep.log("positive_kernel", fp, "empty")
            rep.notes.append("positive zero sets are empty for every parameter value")
            return rep
        rep.positive_kernel_witness = pos.witness
        rep.log("positive_kernel", fp, "witness")

    partition = matroid_partition(sys, basis)
    rep.partition = partition
    rep.log("matroid_partition", fp, f"{len(partition)} blocks")

    inv = invariance_group(sys, mode, partition)
    rep.invariance = inv
    rep.d = inv.d
    rep.log("invariance_group", fp, f"d={inv.d}")

    quasi = quasihomogeneity_weights(sys)
    rep.quasihomogeneity_rank = quasi.rows
    rep.quasihomogeneity_agrees = quasi.rows == inv.d and (
        inv.d == 0 or same_row_lattice(quasi, inv.A)
    )
    rep.log("quasihomogeneity", fp, f"rank={quasi.rows}")

    nd = nondegeneracy(sys, seed)
    rep.nondegenerate = nd.status if nd.status != "undetermined" else "unknown"
    rep.witness = nd.witness
    rep.log("nondegeneracy", fp, nd.status)
    if nd.status != "yes":
        rep.verdict = Verdict.INVARIANT_ONLY
        if nd.status == "no":
            rep.notes.append("degenerate system: zero sets never have the expected dimension")
        else:
            rep.notes.append("nondegeneracy undecided; only invariance is reported")
        return rep

    if sys.s + inv.d > sys.n:
        raise InternalInconsistencyError(
            f"s + d = {sys.s + inv.d} exceeds n = {sys.n} for a nondegenerate system"
        )
    if sys.s + inv.d < sys.n:
        rep.verdict = Verdict.NOT_LOCALLY_TORIC
        rep.log("dimension_test", fp, f"s+d={sys.s + inv.d}<n={sys.n}")
        rep.notes.append("zero sets have strictly larger dimension than the scaling lattice")
        return rep
    rep.log("dimension_test", fp, f"s+d=n={sys.n}")

    if mode is not GroupMode.POSITIVE:
        rep.verdict = Verdict.GENERICALLY_LOCALLY_TORIC
        rep.notes.append(
            f"counting and positivity certificates apply to the positive mode only; "
            f"over {mode.value} the verdict stops at generic local toricity"
        )
        return rep

    inj = injectivity_test(sys, inv)
    rep.injectivity = inj
    rep.log("injectivity", fp, "toric" if inj.toric else f"inconclusive ({inj.reason})")

    if inj.toric:
        # report enrichment only; the verdict is already settled
        if comb(sys.n, sys.s) <= opts.all_positive_enrichment_cap:
            all_pos = nondegeneracy_all_positive(sys)
            rep.log("all_positive_nondegeneracy", fp, all_pos.status)
            if all_pos.status == "yes":
                rep.nondegenerate = "yes-for-all-positive"
        else:
            rep.log("all_positive_nondegeneracy", fp, "skipped (size)")
        rep.verdict = Verdict.TORIC
        rep.coset_count = 1
        rep.constant_count = True
        rep.notes.append("toric over the positive reals: injectivity determinant is sign-definite")
        return rep

    mv = None
    if sys.n <= opts.mixed_volume_max_dim:
        try:
            mv = mixed_volume(_coset_supports(sys, inv))
            rep.mixed_volume_bound = mv
            rep.log("mixed_volume", fp, str(mv))
        except VolumeBudgetError:
            rep.log("mixed_volume", fp, "skipped (budget)")
    else:
        rep.log("mixed_volume", fp, "skipped (dimension)")
    rep.coset_bound = mv

    all_pos = nondegeneracy_all_positive(sys)
    rep.log("all_positive_nondegeneracy", fp, all_pos.status)
    if all_pos.status == "yes":
        rep.nondegenerate = "yes-for-all-positive"

    m_nonneg = all(sys.M.entry(i, j) >= 0 for i in range(sys.n) for j in range(sys.m))
    conds = None
    if all_pos is not None and all_pos.status == "yes":
        if mv == 1:
            rep.verdict = Verdict.TORIC
            rep.coset_count = 1
            rep.constant_count = True
            rep.notes.append("toric: single coset forced by the root-count bound, "
                             "valid for every positive parameter value")
            return rep
        if m_nonneg:
            conds = constant_coset_conditions(sys, inv, opts.boundary)
            rep.conditions = conds
            rep.log("constant_count_conditions", fp,
                    f"boundary={conds.boundary_empty} rank={conds.rank_all_positive} "
                    f"rowspace={conds.row_space_positive}")
        else:
            rep.log("constant_count_conditions", fp, "skipped (negative exponents)")
        if conds is not None and conds.row_space_positive and conds.boundary_empty == "yes":
            kappa = opts.kappa
            if kappa is None:
                rng = random_rng(seed ^ 0xC0FFEE)
                kappa = tuple(Fraction(rng.randint(1, 1 << 10), 1 << 4) for _ in range(sys.m))
            ccs = coset_counting_system(sys, inv, kappa, seed)
            result = count_positive_cosets(ccs, seed, opts.newton_starts)
            rep.count = result
            rep.log("coset_count", fp, f"{result.kind}:{result.count}")
            if result.kind == "exact":
                rep.coset_count = result.count
                rep.constant_count = True
                rep.parameter_region_full = conds.all_hold
                if result.count == 1:
                    rep.verdict = Verdict.TORIC
                    rep.notes.append("toric: the counting system has exactly one positive zero, "
                                     "and the count is parameter-independent")
                else:
                    rep.verdict = Verdict.LOCALLY_TORIC
                    rep.notes.append(f"locally toric with a constant count of {result.count} cosets")
                return rep
            # heuristic counts never upgrade the verdict
            rep.verdict = Verdict.LOCALLY_TORIC
            rep.constant_count = True
            rep.notes.append(
                f"locally toric with a constant number of cosets (at most {mv}); "
                f"heuristic count {result.count} is advisory only"
            )
            return rep
        rep.verdict = Verdict.LOCALLY_TORIC
        rep.constant_count = True
        rep.notes.append(f"locally toric with a constant number of cosets, at most "
                         f"{mv if mv is not None else 'unknown'}")
        return rep

    if mv == 1:
        rep.verdict = Verdict.GENERICALLY_TORIC
        rep.notes.append("generically toric: root-count bound is one")
        return rep
    rep.verdict = Verdict.GENERICALLY_LOCALLY_TORIC
    if mv is not None:
        rep.notes.append(f"generically locally toric with generically at most {mv} cosets")
    else:
        rep.notes.append("generically locally toric; no root-count bound computed")
    return rep
