import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kahlerlift import jets as J

finite = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)

# d^a_x d^b_y of exp(x y) sin(x) + 1/(1 + x^2 + y^2) at (0.3, -0.7), from
# tools/derive_oracles.py (sympy, exact arithmetic then 20-digit evaluation).
SYMPY_PARTIALS = {
    (0, 0): 0.87245541629059909356,
    (0, 1): 0.63267077005622315060,
    (0, 2): 0.21424148827846288384,
    (0, 3): -1.6109872275592442551,
    (1, 0): 0.36635379258414053743,
    (1, 1): -0.0043758034251483018195,
    (1, 2): -0.32541790168119585857,
    (2, 0): -1.8249127636707743523,
    (2, 1): -0.083019858091032185780,
    (3, 0): 2.4022926987833121722,
}


def test_product_example():
    x, y = J.variables([3.0, 5.0], order=2)
    f = x * y
    assert f.value == 15.0
    assert f.derivative((1, 0)) == 5.0
    assert f.derivative((0, 1)) == 3.0
    assert f.derivative((1, 1)) == 1.0
    assert f.derivative((2, 0)) == 0.0


def test_rational_derivatives_match_sympy():
    # sympy: diff(1/(1+x^2), x, k) at x = 1 gives 1/2, -1/2, 1/2, 0
    x = J.seed([1.0], 0, 3)
    f = 1.0 / (1.0 + x * x)
    got = [f.derivative((k,)) for k in range(4)]
    np.testing.assert_allclose(got, [0.5, -0.5, 0.5, 0.0], atol=1e-15)


def test_two_variable_partials_match_sympy():
    x, y = J.variables([0.3, -0.7], 3)
    f = J.exp(x * y) * J.sin(x) + 1.0 / (1.0 + x * x + y * y)
    for alpha, expected in SYMPY_PARTIALS.items():
        assert f.derivative(alpha) == pytest.approx(expected, rel=1e-13, abs=1e-15)


def test_exp_coefficients_are_reciprocal_factorials():
    x = J.seed([0.0], 0, 3)
    e = J.exp(x)
    np.testing.assert_allclose([e.coeff((k,)) for k in range(4)], [1, 1, 0.5, 1 / 6])


@given(st.lists(finite, min_size=4, max_size=4), st.lists(finite, min_size=4, max_size=4), finite)
def test_polynomial_product_matches_numpy(a, b, x0):
    pa, pb = np.polynomial.Polynomial(a), np.polynomial.Polynomial(b)
    x = J.seed([x0], 0, 3)
    ja = sum(c * x**k for k, c in enumerate(a))
    jb = sum(c * x**k for k, c in enumerate(b))
    prod = ja * jb
    exact = pa * pb
    for k in range(4):
        assert prod.derivative((k,)) == pytest.approx(exact.deriv(k)(x0), rel=1e-10, abs=1e-9)


@given(finite, finite)
def test_chain_rule_against_finite_differences(x0, y0):
    def f(x, y):
        return J.sin(x * y) + J.exp(0.3 * x) * y

    x, y = J.variables([x0, y0], 1)
    jet = f(x, y)
    h = 1e-6
    fd_x = (f(x0 + h, y0) - f(x0 - h, y0)) / (2 * h)
    fd_y = (f(x0, y0 + h) - f(x0, y0 - h)) / (2 * h)
    np.testing.assert_allclose(jet.gradient(), [fd_x, fd_y], rtol=1e-6, atol=1e-7)


@given(st.floats(0.2, 3.0))
def test_log_exp_sqrt_round_trips(x0):
    x = J.seed([x0], 0, 3)
    for expr in (J.log(J.exp(x)), J.sqrt(x) * J.sqrt(x), J.exp(J.log(x)), J.power(x, 1.5) / J.sqrt(x)):
        np.testing.assert_allclose(expr.coeffs, x.coeffs, atol=1e-12)


@given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_trig_identity(x0, y0):
    x, y = J.variables([x0, y0], 3)
    one = J.sin(x * y) ** 2 + J.cos(x * y) ** 2
    assert one.value == pytest.approx(1.0)
    np.testing.assert_allclose(one.coeffs[1:], 0.0, atol=1e-14)


def test_matrix_inverse(rng):
    P = J.variables(rng.normal(size=3), 3)
    A = J.array([[2.0 + P[0], P[1]], [P[2] * P[0], 3.0 - P[1] * P[1]]])
    prod = J.einsum("ab,bc->ac", A, J.inv(A))
    np.testing.assert_allclose(prod.coeffs[0], np.eye(2), atol=1e-14)
    np.testing.assert_allclose(prod.coeffs[1:], 0.0, atol=1e-13)


def test_compose_is_substitution():
    # f(u) = u^3 about u0 = 2, composed with u = 2 + x - x^2 about x = 0
    u = J.seed([2.0], 0, 3)
    f = u**3
    x = J.seed([0.0], 0, 3)
    inner = J.stack([2.0 + x - x * x])
    direct = (2.0 + x - x * x) ** 3
    np.testing.assert_allclose(f.compose(inner).coeffs, direct.coeffs, atol=1e-13)


def test_diff_and_jacobian_agree():
    x, y = J.variables([0.4, 1.1], 3)
    f = J.stack([x * x * y, J.sin(y) * x])
    jac = f.jacobian()
    np.testing.assert_allclose(jac.value, f.gradient())
    np.testing.assert_allclose(f.diff(1).coeffs, jac[1].coeffs)
    assert f.diff(0).order == 2


def test_einsum_matches_numpy_on_values(rng):
    P = J.variables(rng.normal(size=2), 2)
    A = J.array([[P[0], 1.0], [P[1], P[0] * P[1]]])
    B = rng.normal(size=(2, 2))
    out = J.einsum("ij,jk->ik", A, B)
    np.testing.assert_allclose(out.value, np.einsum("ij,jk->ik", A.value, B))


def test_non_jets_fall_through_to_numpy():
    assert J.exp(0.0) == 1.0
    assert J.sqrt(4.0) == 2.0
    np.testing.assert_allclose(J.einsum("i,i->", np.ones(3), np.arange(3.0)), 3.0)


@pytest.mark.parametrize(
    "fn",
    [lambda x: J.log(x - 1.0), lambda x: J.sqrt(x - 2.0), lambda x: 1.0 / (x - 1.0), lambda x: J.power(-x, 0.5)],
)
def test_domain_errors_name_the_value(fn):
    x = J.seed([1.0], 0, 2)
    with pytest.raises(J.JetDomainError, match="value"):
        fn(x)


def test_order_and_basis_errors():
    with pytest.raises(J.JetError):
        J.variables([0.0], 4)
    with pytest.raises(J.JetError):
        J.seed([0.0, 1.0], 5, 2)
    a = J.seed([0.0], 0, 2)
    b = J.seed([0.0], 0, 3)
    with pytest.raises(J.JetError):
        a + b
    with pytest.raises(J.JetError):
        a.truncate(3)
    with pytest.raises(J.JetError):
        a.derivative((3,))


def test_singular_matrix_inverse_raises():
    x = J.seed([0.0], 0, 1)
    with pytest.raises(J.JetDomainError):
        J.inv(J.array([[x, x], [x, x]]))


def test_basis_size_is_binomial():
    for n in range(1, 5):
        for k in range(4):
            assert J.get_basis(n, k).size == math.comb(n + k, k)
