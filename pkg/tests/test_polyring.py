import random
from fractions import Fraction
from math import comb

import pytest

from toricity.exactalg import RationalMatrix
from toricity.polyring import (
    DeterminantSizeError,
    SignVerdict,
    SparsePolynomial,
    ZeroPolynomialError,
    count_distinct_roots,
    det_stacked,
    det_symbolic,
    render,
    sign_classify,
    sturm_positive_roots,
    univariate_coefficients,
)

from _oracles import oracle_det, oracle_positive_roots


def P(variables, terms):
    return SparsePolynomial(variables, terms)


def test_mul_difference_of_squares():
    x = SparsePolynomial.variable(("x",), "x")
    one = SparsePolynomial.constant(("x",), 1)
    assert (x + one) * (x - one) == P(("x",), {(2,): 1, (0,): -1})


def test_additive_inverse():
    p = P(("x", "y"), {(1, 2): Fraction(3, 7), (0, 0): -2})
    assert (p + (-p)).is_zero()


def test_variable_mismatch():
    from toricity.polyring import VariableMismatchError

    with pytest.raises(VariableMismatchError):
        SparsePolynomial.variable(("x",), "x") + SparsePolynomial.variable(("y",), "y")


def test_substitute_triangle_slice():
    # slice polynomial of the triangle system at unit parameters: substitute
    # the affine expression for x2 and clear denominators
    vs = ("x1", "x2")
    f = P(vs, {(0, 4): 1, (6, 0): -2})
    x1 = SparsePolynomial.variable(vs, "x1")
    repl = SparsePolynomial.constant(vs, Fraction(5, 3)) + x1.scale(Fraction(-2, 3))
    g = f.substitute("x2", repl).scale(81)
    coeffs, name = univariate_coefficients(g)
    assert name == "x1"
    assert len(coeffs) - 1 == 6
    # independent expansion: 81*((5-2t)/3)^4 - 162 t^6 via the binomial theorem
    expect = [Fraction(0)] * 7
    for k in range(5):
        expect[k] += comb(4, k) * Fraction(5) ** (4 - k) * Fraction(-2) ** k
    expect[6] -= 162
    assert coeffs == expect


def test_det_symbolic_diagonal():
    vs = ("a1", "a2", "a3")
    rows = [[SparsePolynomial.variable(vs, vs[i]) if i == j else SparsePolynomial.zero(vs)
             for j in range(3)] for i in range(3)]
    det = det_symbolic(rows)
    assert det == P(vs, {(1, 1, 1): 1})


IDH_C_ROWS = [
    [-1, 1, 1, 0, 0, 0],
    [-1, 1, 0, 0, 0, 1],
    [0, 0, 0, 1, -1, -1],
]
IDH_M_ROWS = [
    [1, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0],
    [0, 1, 1, 1, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 1],
]
IDH_A_ROWS = [[1, 0, 1, 0, 1], [0, 1, 1, 0, 1]]


def _injectivity_matrix(c_rows, m_rows, a_rows, mu_names, alpha_names):
    vs = tuple(mu_names) + tuple(alpha_names)
    s = len(c_rows)
    n = len(m_rows)
    m = len(c_rows[0])
    rows = []
    for i in range(s):
        row = []
        for k in range(n):
            p = SparsePolynomial.zero(vs)
            for j in range(m):
                coeff = c_rows[i][j] * m_rows[k][j]
                if coeff:
                    e = [0] * len(vs)
                    e[j] = 1
                    e[len(mu_names) + k] = 1
                    p = p + SparsePolynomial(vs, {tuple(e): coeff})
            row.append(p)
        rows.append(row)
    for arow in a_rows:
        rows.append([SparsePolynomial.constant(vs, x) for x in arow])
    return rows, vs


def test_det_symbolic_idh_injectivity():
    mu = tuple(f"u{j}" for j in range(1, 7))
    al = tuple(f"a{i}" for i in range(1, 6))
    rows, vs = _injectivity_matrix(IDH_C_ROWS, IDH_M_ROWS, IDH_A_ROWS, mu, al)
    det = det_symbolic(rows)

    def term(mus, als):
        e = [0] * 11
        for j in mus:
            e[j - 1] = 1
        for i in als:
            e[5 + i] = 1
        return tuple(e)

    expected = SparsePolynomial(vs, {
        term((1, 3, 4), (1, 3, 4)): -1,
        term((1, 4, 6), (1, 4, 5)): -1,
        term((1, 3, 4), (2, 3, 4)): -1,
        term((1, 4, 6), (2, 4, 5)): -1,
        term((2, 4, 6), (3, 4, 5)): -1,
        term((3, 4, 6), (3, 4, 5)): -1,
    })
    assert det == expected
    assert sign_classify(det) == SignVerdict.ALL_NEGATIVE


def test_det_symbolic_gamma_alpha():
    # multistationarity determinant with a fixed kernel basis and laws
    vs = tuple(f"a{i}" for i in range(1, 6))
    bt = [[-1, -1, 0, 0, 1], [0, 0, 0, 1, 0], [-1, -1, 1, 0, 0]]
    l_rows = [[1, 0, 1, 0, 1], [-2, 1, -1, 1, 0]]
    rows = []
    for r in bt:
        row = []
        for k in range(5):
            e = [0] * 5
            e[k] = 1
            row.append(SparsePolynomial(vs, {tuple(e): r[k]}) if r[k] else SparsePolynomial.zero(vs))
        rows.append(row)
    for r in l_rows:
        rows.append([SparsePolynomial.constant(vs, x) for x in r])
    det = det_symbolic(rows)

    def term(idx):
        e = [0] * 5
        for i in idx:
            e[i - 1] = 1
        return tuple(e)

    expected = SparsePolynomial(vs, {
        term((1, 3, 4)): -1,
        term((1, 4, 5)): -1,
        term((2, 3, 4)): -2,
        term((2, 4, 5)): -1,
        term((3, 4, 5)): -1,
    })
    assert det == expected


def test_det_symbolic_size_guard():
    vs = ("x",)
    one = SparsePolynomial.constant(vs, 1)
    big = [[one for _ in range(13)] for _ in range(13)]
    with pytest.raises(DeterminantSizeError):
        det_symbolic(big)


def test_det_symbolic_matches_numeric_evaluation():
    rng = random.Random(21)
    vs = ("x", "y")
    for _ in range(10):
        n = rng.randint(1, 4)
        rows = []
        for _ in range(n):
            row = []
            for _ in range(n):
                terms = {}
                for _ in range(rng.randint(0, 2)):
                    terms[(rng.randint(0, 1), rng.randint(0, 1))] = rng.randint(-3, 3)
                row.append(SparsePolynomial(vs, terms))
            rows.append(row)
        det = det_symbolic(rows)
        for _ in range(4):
            point = {"x": Fraction(rng.randint(-5, 5), rng.randint(1, 3)),
                     "y": Fraction(rng.randint(-5, 5), rng.randint(1, 3))}
            numeric = [[rows[i][j].evaluate(point) for j in range(n)] for i in range(n)]
            assert det.evaluate(point) == oracle_det(numeric)


def test_det_stacked_matches_det_symbolic():
    rng = random.Random(33)
    vs = ("x", "y")
    for _ in range(12):
        n = rng.randint(2, 4)
        s = rng.randint(1, n - 1)
        top = []
        for _ in range(s):
            row = []
            for _ in range(n):
                terms = {}
                for _ in range(rng.randint(0, 2)):
                    terms[(rng.randint(0, 1), rng.randint(0, 1))] = rng.randint(-3, 3)
                row.append(SparsePolynomial(vs, terms))
            top.append(row)
        bottom = RationalMatrix([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n - s)])
        bottom.cols = n
        full = top + [[SparsePolynomial.constant(vs, x) for x in bottom.row(i)]
                      for i in range(n - s)]
        assert det_stacked(top, bottom) == det_symbolic(full)


def test_sign_classify_cases():
    vs = ("x", "y")
    assert sign_classify(SparsePolynomial.zero(vs)) == SignVerdict.ZERO_POLYNOMIAL
    assert sign_classify(P(vs, {(1, 1): 1, (0, 2): -1})) == SignVerdict.MIXED_SIGNS
    assert sign_classify(P(vs, {(1, 0): 2, (0, 1): 3})) == SignVerdict.ALL_POSITIVE
    p = P(vs, {(1, 0): 2, (0, 1): 3})
    assert sign_classify(p.scale(-5)) == SignVerdict.ALL_NEGATIVE
    assert sign_classify(p.scale(Fraction(1, 7))) == SignVerdict.ALL_POSITIVE


def test_sturm_simple():
    x = SparsePolynomial.variable(("x",), "x")
    assert sturm_positive_roots(x * x - SparsePolynomial.constant(("x",), 1)) == 1


def test_sturm_cubic():
    vs = ("x",)
    x = SparsePolynomial.variable(vs, "x")
    c = lambda v: SparsePolynomial.constant(vs, v)
    p = (x - c(1)) * (x - c(2)) * (x + c(3))
    assert sturm_positive_roots(p) == 2


def test_sturm_triangle_slice():
    # (5-2t)^4 - 162 t^6 has exactly one positive root
    vs = ("t",)
    t = SparsePolynomial.variable(vs, "t")
    lin = SparsePolynomial.constant(vs, 5) - t.scale(2)
    p = lin ** 4 - (t ** 6).scale(162)
    assert sturm_positive_roots(p) == 1


def test_sturm_zero_polynomial():
    with pytest.raises(ZeroPolynomialError):
        sturm_positive_roots(SparsePolynomial.zero(("x",)))


def test_sturm_repeated_roots_and_interval():
    vs = ("x",)
    x = SparsePolynomial.variable(vs, "x")
    c = lambda v: SparsePolynomial.constant(vs, v)
    p = (x - c(2)) ** 3 * (x - c(5)) * (x + c(1))
    assert sturm_positive_roots(p) == 2
    assert count_distinct_roots(p, 0, 3) == 1
    assert count_distinct_roots(p, 2, 6) == 1  # endpoint root excluded
    assert count_distinct_roots(p, None, None) == 3


def test_sturm_against_bisection_oracle():
    rng = random.Random(77)
    vs = ("x",)
    for _ in range(40):
        deg = rng.randint(1, 8)
        coeffs = [rng.randint(-6, 6) for _ in range(deg + 1)]
        if all(c == 0 for c in coeffs):
            coeffs[-1] = 1
        if coeffs[-1] == 0:
            coeffs[-1] = rng.choice([-2, -1, 1, 2])
        p = SparsePolynomial(vs, {(i,): c for i, c in enumerate(coeffs) if c})
        if p.is_zero():
            continue
        assert sturm_positive_roots(p) == oracle_positive_roots(coeffs)


def test_render_canonical():
    vs = ("x1", "x2")
    p = P(vs, {(2, 0): -2, (1, 1): 1, (0, 0): Fraction(1, 3)})
    assert render(p) == "-2*x1^2 + x1*x2 + 1/3"
    assert render(SparsePolynomial.zero(vs)) == "0"
