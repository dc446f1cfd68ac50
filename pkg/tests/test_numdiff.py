import numpy as np
import pytest

from wdvv_lab.errors import DomainError, StencilError, UnstableError
from wdvv_lab.numdiff import DerivSpec, adaptive_derivative_tensor, derivative_tensor


def test_cubic_monomial_is_exact():
    # central differences are exact on cubics; what remains is rounding, ~eps/h^3
    r = derivative_tensor(lambda t: t[0] ** 2 * t[1], [0.4, -0.3], 3)
    expected = np.zeros((2, 2, 2))
    for idx in [(0, 0, 1), (0, 1, 0), (1, 0, 0)]:
        expected[idx] = 2.0
    assert np.max(np.abs(r.tensor - expected)) < 1e-6


@pytest.mark.parametrize("order", [1, 2, 3])
def test_constant_gives_zero(order):
    r = derivative_tensor(lambda t: 3.5 + 1j, [0.1, 0.2, 0.3], order)
    assert r.tensor.shape == (3,) * order
    assert np.all(r.tensor == 0)


@pytest.mark.parametrize("method", [derivative_tensor, adaptive_derivative_tensor])
def test_exponential_hessian(method):
    t = np.array([0.1, -0.2])
    r = method(lambda v: np.exp(v[0] + 2 * v[1]), t, 2)
    e = np.exp(t[0] + 2 * t[1])
    expected = e * np.array([[1, 2], [2, 4]])
    assert np.max(np.abs(r.tensor - expected) / np.abs(expected)) < 1e-8


def test_error_estimate_is_reported():
    r = adaptive_derivative_tensor(lambda v: np.sin(v[0]) * np.cos(v[1]), [0.3, 0.2], 3)
    assert r.error_estimate.shape == r.tensor.shape
    assert 0 <= r.max_error < 1e-6
    exact = -np.cos(0.3) * np.cos(0.2)
    assert abs(r.tensor[0, 0, 0] - exact) < 1e-7


def test_tensor_is_symmetric():
    r = derivative_tensor(lambda v: np.exp(v[0] * v[1]) + v[2] ** 3 * v[0], [0.2, 0.5, -0.4], 3)
    T = r.tensor
    for perm in [(1, 0, 2), (2, 1, 0), (0, 2, 1)]:
        assert np.array_equal(T, T.transpose(perm))


def test_complex_point():
    r = derivative_tensor(lambda v: np.log(v[0]) * v[1], [0.5 + 0.5j, 1.0], 2)
    assert abs(r.tensor[0, 1] - 1 / (0.5 + 0.5j)) < 1e-9


def test_stencil_leaving_domain():
    def f(v):
        if v[0].real > 0.1005:
            raise DomainError("outside")
        return v[0] ** 2

    with pytest.raises(StencilError):
        derivative_tensor(f, [0.1], 1)


def test_non_finite_value():
    with pytest.raises(StencilError):
        derivative_tensor(lambda v: np.inf, [0.1], 1)


def test_bad_order():
    with pytest.raises(DomainError):
        derivative_tensor(lambda v: v[0], [0.1], 4)


def test_spec_halving():
    s = DerivSpec(1e-2, 3)
    assert s.halved().base_step == pytest.approx(5e-3)
    assert s.halved().richardson_levels == 3


def test_unstable_levels_raise():
    # a large step on a rapidly varying function makes the Richardson levels disagree
    with pytest.raises(UnstableError):
        derivative_tensor(lambda v: np.exp(20 * v[0]), [0.1], 3, DerivSpec(0.09, 2), tol=1e-12)


def test_halved_step_within_estimate():
    f = lambda v: np.exp(v[0] * v[1]) + np.sin(v[0])
    pt = [0.3 + 0.1j, -0.2]
    # in the truncation-dominated regime the estimate bounds the halving change
    spec = DerivSpec(2e-2, 2)
    a = derivative_tensor(f, pt, 3, spec)
    b = derivative_tensor(f, pt, 3, spec.halved())
    assert np.all(np.abs(a.tensor - b.tensor) <= a.error_estimate + 1e-9)
