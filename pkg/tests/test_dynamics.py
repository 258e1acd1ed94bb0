import io

import numpy as np
import pytest

from almostlinear.dynamics import (
    DynParams,
    drift,
    evolve,
    lyapunov,
    relaxed_cut,
    step_euler,
    wrap,
    write_energy_trace,
)
from almostlinear.graph import ErdosRenyiSpec, from_edges, gen_er
from almostlinear.kernels import TRIANGULAR, XY
from almostlinear.localsearch import cut_value
from almostlinear.rounding import circ_dist

from conftest import complete, random_graph


def clear_of_kinks(v, g, clearance=1e-3):
    """True when every edge difference and every 2 v_i is `clearance` away from an odd integer."""
    pts = np.concatenate([v[g.edges[:, 0]] - v[g.edges[:, 1]], 2 * v])
    return np.all(np.abs(np.mod(pts, 2.0) - 1.0) >= clearance)


def sample_clear_state(g, rng, clearance=1e-3):
    while True:
        v = rng.uniform(-2, 2, g.n)
        if clear_of_kinks(v, g, clearance):
            return v


def fd_gradient(v, g, Ks, k, h=1e-6):
    out = np.empty_like(v)
    for i in range(v.size):
        e = np.zeros_like(v)
        e[i] = h
        out[i] = (lyapunov(v + e, g, Ks, k) - lyapunov(v - e, g, Ks, k)) / (2 * h)
    return out


def test_wrap_range(rng):
    v = np.concatenate([rng.uniform(-50, 50, 1000), [-2.0, 2.0, 6.0, -1e-17, -2 - 1e-16]])
    w = wrap(v)
    assert np.all((w >= -2) & (w < 2))
    assert np.max(circ_dist(w, v)) <= 1e-12


def test_step_single_edge(edge):
    v = step_euler(np.array([0.0, 1.0]), edge, DynParams(Ks=0.0, dt=0.1))
    assert v == pytest.approx([-0.2, 1.2], abs=1e-15)


@pytest.mark.parametrize("Ks", [0.0, 0.7, 3.0])
def test_antipodal_pair_is_fixed(edge, Ks):
    v = step_euler(np.array([0.0, 2.0]), edge, DynParams(Ks=Ks, dt=0.1))
    assert circ_dist(v[0], 0.0) == 0.0 and circ_dist(v[1], 2.0) == 0.0


def test_anisotropy_pulls_to_lattice():
    g = from_edges(1, [])
    v = step_euler(np.array([0.25]), g, DynParams(Ks=1.0, dt=0.1))
    assert v == pytest.approx([0.15], abs=1e-15)


def test_dimension_mismatch(edge):
    with pytest.raises(ValueError):
        step_euler(np.zeros(3), edge, DynParams())
    with pytest.raises(ValueError):
        lyapunov(np.zeros(3), edge, 0.0)
    with pytest.raises(ValueError):
        relaxed_cut(np.zeros(1), edge)


def test_params_validation():
    with pytest.raises(ValueError):
        DynParams(dt=0.0)
    with pytest.raises(ValueError):
        DynParams(steps=-1)


def test_zero_steps_identity(rng):
    g = random_graph(rng)
    v = rng.uniform(-2, 2, g.n)
    assert np.array_equal(evolve(v, g, DynParams(steps=0)), v)


def test_two_node_flow_reaches_antipode(edge):
    v = evolve(np.array([0.0, 1.0]), edge, DynParams(Ks=0.0, dt=0.01, steps=10_000))
    assert abs(circ_dist(v[0], v[1]) - 2.0) <= 1e-3


def test_evolve_equals_repeated_steps(rng):
    g = random_graph(rng, 30)
    p = DynParams(Ks=0.5, dt=0.02, steps=1)
    v = rng.uniform(-2, 2, g.n)
    w = v.copy()
    for _ in range(25):
        w = step_euler(w, g, p)
    assert np.array_equal(evolve(v, g, DynParams(0.5, 0.02, 25)), w)


def test_lyapunov_examples(edge):
    assert lyapunov(np.array([0.0, 2.0]), edge, 0.0) == -1.0
    assert lyapunov(np.array([0.0, 0.0]), edge, 0.0) == 1.0
    assert lyapunov(np.array([0.0, 0.0]), from_edges(2, []), 2.0) == -2.0


def test_relaxed_cut_examples(edge, k3, rng):
    assert relaxed_cut(np.array([0.0, 2.0]), edge) == 1.0
    g = random_graph(rng)
    assert relaxed_cut(np.full(g.n, 0.37), g) == 0.0
    # Phi(4/3) = (4/3 - 2)^2 - 1 = -5/9 on each of the three edges
    assert relaxed_cut(np.array([0.0, 4 / 3, 8 / 3]), k3) == pytest.approx(1.5 + 5 / 6, abs=1e-12)


@pytest.mark.parametrize("k", [TRIANGULAR, XY])
def test_gradient_consistency(k, rng):
    for _ in range(10):
        g = random_graph(rng, 50)
        Ks = float(rng.uniform(0, 2))
        v = sample_clear_state(g, rng)
        d = drift(v, g, Ks, k)
        fd = -fd_gradient(v, g, Ks, k)
        assert np.max(np.abs(fd - d)) <= 1e-4 * max(np.max(np.abs(d)), 1.0)


@pytest.mark.parametrize("k", [TRIANGULAR, XY])
def test_lyapunov_descent_small_step(k, rng):
    g = gen_er(ErdosRenyiSpec(60, 0.15, 9))
    _, H, _ = evolve(rng.uniform(-1, 1, g.n), g, DynParams(1.0, 1e-3, 2000, k), trace=True)
    assert np.max(np.diff(H)) <= 1e-8 * g.n


def test_trace_matches_direct_evaluation(rng):
    g = random_graph(rng, 40)
    v0 = rng.uniform(-2, 2, g.n)
    p = DynParams(0.8, 0.01, 30, XY)
    v, H, C = evolve(v0, g, p, trace=True)
    assert H.shape == (31,) and C.shape == (31,)
    assert H[-1] == pytest.approx(lyapunov(v, g, 0.8, XY), abs=1e-9)
    assert C[0] == pytest.approx(relaxed_cut(v0, g, XY), abs=1e-9)


def test_wrap_equivariance(rng):
    for _ in range(20):
        g = random_graph(rng, 40)
        v = rng.uniform(-2, 2, g.n)
        shifted = v + 4.0 * rng.integers(-3, 4, g.n)
        p = DynParams(float(rng.uniform(0, 2)), 0.05, 1)
        a, b = step_euler(v, g, p), step_euler(shifted, g, p)
        assert np.max(circ_dist(a, b)) <= 1e-12


@pytest.mark.parametrize("lattice", [(0.0, 2.0), (-1.0, 1.0)])
def test_feasible_point_identity(lattice, rng):
    for _ in range(30):
        g = random_graph(rng, 30)
        bits = rng.integers(0, 2, g.n)
        v = np.where(bits == 1, lattice[0], lattice[1])
        sigma = np.where(bits == 1, 1, -1)
        assert relaxed_cut(v, g) == cut_value(g, sigma)


def test_energy_trace_csv(edge):
    _, H, C = evolve(np.array([0.0, 1.0]), edge, DynParams(0.0, 0.1, 3), trace=True)
    buf = io.StringIO()
    write_energy_trace(buf, H, C)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "step,H,relaxed_cut"
    assert len(lines) == 5 and lines[1].startswith("0,")


def test_complete_graph_energy_decreases_from_random(rng):
    g = complete(12)
    _, H, _ = evolve(rng.uniform(-1, 1, 12), g, DynParams(1.0, 1e-3, 500), trace=True)
    assert H[-1] < H[0]
