import math
from fractions import Fraction

import numpy as np
import pytest

from almostlinear.kernels import (
    TRIANGULAR,
    XY,
    Kernel,
    Phi,
    compute_alpha,
    eval_phi,
    eval_Phi,
    phi,
)

# Values from the defining branches 1 - v^2 on [-1, 1] and (v - 2)^2 - 1 on [1, 3].
TRI_PHI_TABLE = {
    0: 1, Fraction(1, 2): Fraction(3, 4), Fraction(-1, 2): Fraction(3, 4),
    1: 0, -1: 0, Fraction(3, 2): Fraction(-3, 4), Fraction(-3, 2): Fraction(-3, 4),
    2: -1, -2: -1, 3: 0, -3: 0, 5: 0, -5: 0,
}
TRI_DPHI_TABLE = {
    0: 0, Fraction(1, 2): -1, Fraction(-1, 2): 1, 1: -2, -1: 2,
    Fraction(3, 2): -1, Fraction(-3, 2): 1, 2: 0, -2: 0, 3: 2, -3: -2, 5: -2, -5: 2,
}

# frozen from a 2e5-point grid refined by golden-section search
ALPHA_TRI = 0.8535533905932737
ALPHA_XY = 0.8785672057848517


@pytest.mark.parametrize("v,expected", TRI_PHI_TABLE.items())
def test_triangular_Phi_exact(v, expected):
    assert eval_Phi(TRIANGULAR, Fraction(v)) == expected
    assert eval_Phi(TRIANGULAR, float(v)) == float(expected)


@pytest.mark.parametrize("v,expected", TRI_DPHI_TABLE.items())
def test_triangular_phi_exact(v, expected):
    assert eval_phi(TRIANGULAR, Fraction(v)) == expected
    assert eval_phi(TRIANGULAR, float(v)) == float(expected)


def test_phi_continuous_at_branch_point():
    left = -2 * 1
    right = 2 * (1 - 2)
    assert left == right == eval_phi("triangular", 1.0)


def test_xy_values():
    assert eval_Phi(XY, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert eval_Phi(XY, 0.0) == 1.0
    assert eval_Phi(XY, 2.0) == -1.0
    assert eval_phi(XY, 0.0) == 0.0
    assert eval_phi(XY, 2.0) == pytest.approx(0.0, abs=1e-15)


def test_kernel_validation():
    with pytest.raises(ValueError):
        Kernel("cosine")
    with pytest.raises(ValueError):
        Kernel("triangular", period=6)
    assert Kernel("tri") == TRIANGULAR


@pytest.mark.parametrize("k", [TRIANGULAR, XY])
def test_boundary_conditions(k):
    assert eval_Phi(k, 0.0) == 1.0
    assert eval_Phi(k, 2.0) == pytest.approx(-1.0, abs=1e-15)
    assert eval_Phi(k, -2.0) == pytest.approx(-1.0, abs=1e-15)
    for v in (0.0, 2.0, -2.0):
        assert eval_phi(k, v) == pytest.approx(0.0, abs=1e-15)


def test_triangular_periodicity_exact(rng):
    for _ in range(10_000):
        v = Fraction(int(rng.integers(-10**6, 10**6)), int(rng.integers(1, 10**4)))
        assert eval_Phi(TRIANGULAR, v + 4) == eval_Phi(TRIANGULAR, v)
        assert eval_Phi(TRIANGULAR, -v) == eval_Phi(TRIANGULAR, v)
        assert eval_phi(TRIANGULAR, -v) == -eval_phi(TRIANGULAR, v)


def test_xy_periodicity(rng):
    v = rng.uniform(-20, 20, 10_000)
    assert np.max(np.abs(Phi(XY, v + 4) - Phi(XY, v))) <= 1e-12
    assert np.max(np.abs(Phi(XY, -v) - Phi(XY, v))) <= 1e-12
    assert np.max(np.abs(phi(XY, -v) + phi(XY, v))) <= 1e-12


@pytest.mark.parametrize("k", [TRIANGULAR, XY])
def test_vectorised_matches_scalar(k, rng):
    v = rng.uniform(-9, 9, 500)
    assert np.allclose(Phi(k, v), [eval_Phi(k, x) for x in v], rtol=0, atol=1e-15)
    assert np.allclose(phi(k, v), [eval_phi(k, x) for x in v], rtol=0, atol=1e-15)


@pytest.mark.parametrize("k", [TRIANGULAR, XY])
def test_phi_is_derivative_of_Phi(k, rng):
    h = 1e-6
    v = rng.uniform(-6, 6, 5000)
    if k is TRIANGULAR:
        kinks = np.mod(v, 2.0)  # kinks at odd integers
        v = v[np.abs(kinks - 1.0) >= 1e-3]
    fd = (Phi(k, v + h) - Phi(k, v - h)) / (2 * h)
    assert np.max(np.abs(fd - phi(k, v))) <= 1e-6


def test_alpha_triangular():
    a = compute_alpha(TRIANGULAR)
    assert a == pytest.approx(ALPHA_TRI, abs=1e-12)
    assert a == pytest.approx((2 + math.sqrt(2)) / 4, abs=1e-12)


def test_alpha_xy():
    a = compute_alpha(XY)
    assert a == pytest.approx(ALPHA_XY, abs=1e-12)
    assert 0.877 <= a <= 0.879


def golden_min(f, a, b, tol=1e-12):
    r = (math.sqrt(5) - 1) / 2
    c, d = b - r * (b - a), a + r * (b - a)
    while b - a > tol:
        if f(c) < f(d):
            b, d = d, c
            c = b - r * (b - a)
        else:
            a, c = c, d
            d = a + r * (b - a)
    return f(0.5 * (a + b))


@pytest.mark.parametrize("k", [TRIANGULAR, XY])
def test_alpha_matches_grid_golden_oracle(k):
    f = lambda v: v / (1.0 - float(eval_Phi(k, v)))
    grid = np.linspace(1e-4, 2.0, 200_001)
    i = int(np.argmin([f(v) for v in grid]))
    ref = golden_min(f, grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)])
    assert compute_alpha(k) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("k", [TRIANGULAR, XY])
def test_alpha_at_most_one(k):
    assert compute_alpha(k) <= 1.0


@pytest.mark.parametrize("k", [TRIANGULAR, XY])
def test_per_edge_rounding_bound(k, rng):
    alpha = compute_alpha(k)
    d = rng.uniform(-2, 2, 100_000)
    assert np.all(np.abs(d) >= alpha * (1 - Phi(k, d)) - 1e-12)
