"""Explicit-Euler integration of the almost-linear machine.

The equations of motion are the gradient flow of

    H(v) = sum_{(i,j) in E} w_ij Phi(v_i - v_j) - (Ks / 2) sum_i Phi(2 v_i)

i.e. ``dv_i/dt = -sum_j w_ij phi(v_i - v_j) + Ks phi(2 v_i)``. States are
plain float arrays, kept wrapped to one period ``[-2, 2)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .graph import Graph
from .kernels import TRIANGULAR, Kernel, Phi, Phi_nb, as_kernel, phi_nb

def wrap(v) -> np.ndarray:
    """Map values onto the canonical period ``[-2, 2)``."""
    v = np.asarray(v, dtype=float)
    out = v - 4.0 * np.floor((v + 2.0) / 4.0)
    # guard the rounding case x = 2 - tiny -> 2.0
    out[out >= 2.0] -= 4.0
    return out


@dataclass(frozen=True)
class DynParams:
    Ks: float = 1.0
    dt: float = 0.01
    steps: int = 0
    kernel: Kernel = field(default=TRIANGULAR)

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if self.Ks < 0:
            raise ValueError(f"Ks must be >= 0, got {self.Ks}")
        object.__setattr__(self, "kernel", as_kernel(self.kernel))


@njit(cache=True, nogil=True)
def _drift(v, ei, ej, w, Ks, code, out):
    n = v.shape[0]
    for i in range(n):
        out[i] = Ks * phi_nb(code, 2.0 * v[i])
    for e in range(ei.shape[0]):
        i = ei[e]
        j = ej[e]
        # phi is odd: phi(v_j - v_i) = -phi(v_i - v_j)
        f = w[e] * phi_nb(code, v[i] - v[j])
        out[i] -= f
        out[j] += f


@njit(cache=True, nogil=True, inline="always")
def _wrap1(x):
    y = x - 4.0 * np.floor((x + 2.0) / 4.0)
    if y >= 2.0:
        y -= 4.0
    return y


@njit(cache=True, nogil=True)
def _energy(v, ei, ej, w, Ks, code):
    s = 0.0
    for e in range(ei.shape[0]):
        s += w[e] * Phi_nb(code, v[ei[e]] - v[ej[e]])
    a = 0.0
    for i in range(v.shape[0]):
        a += Phi_nb(code, 2.0 * v[i])
    return s - 0.5 * Ks * a, s


@njit(cache=True, nogil=True)
def _evolve(v, ei, ej, w, Ks, dt, steps, code, trace, H, S):
    n = v.shape[0]
    d = np.empty(n)
    if trace:
        H[0], S[0] = _energy(v, ei, ej, w, Ks, code)
    for t in range(steps):
        _drift(v, ei, ej, w, Ks, code, d)
        for i in range(n):
            v[i] = _wrap1(v[i] + dt * d[i])
        if trace:
            H[t + 1], S[t + 1] = _energy(v, ei, ej, w, Ks, code)


def _check_dim(s: np.ndarray, g: Graph) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.shape != (g.n,):
        raise ValueError(f"state has shape {s.shape}, graph has {g.n} nodes")
    return s


def drift(s: np.ndarray, g: Graph, Ks: float, k: Kernel | str = TRIANGULAR) -> np.ndarray:
    """Right-hand side of the equations of motion at state ``s``."""
    s = _check_dim(s, g)
    out = np.empty(g.n)
    _drift(s, *g.edge_arrays, float(Ks), as_kernel(k).code, out)
    return out


def step_euler(s: np.ndarray, g: Graph, p: DynParams) -> np.ndarray:
    """One synchronous Euler step; returns a new wrapped state."""
    return evolve(s, g, DynParams(p.Ks, p.dt, 1, p.kernel))


def evolve(s0: np.ndarray, g: Graph, p: DynParams, trace: bool = False):
    """Run ``p.steps`` Euler steps from ``s0``.

    With ``trace=True`` returns ``(state, H, relaxed)`` where the two arrays
    have ``steps + 1`` entries (initial state included).
    """
    v = wrap(_check_dim(s0, g)).copy()
    nt = p.steps + 1 if trace else 0
    H = np.empty(nt)
    S = np.empty(nt)
    _evolve(v, *g.edge_arrays, float(p.Ks), float(p.dt), int(p.steps), p.kernel.code, trace, H, S)
    if trace:
        return v, H, 0.5 * g.total_weight - 0.5 * S
    return v


def _edge_phi_sum(s: np.ndarray, g: Graph, k: Kernel) -> float:
    s = _check_dim(s, g)
    if g.m == 0:
        return 0.0
    d = s[g.edges[:, 0]] - s[g.edges[:, 1]]
    return float(np.dot(g.weights, Phi(k, d)))


def lyapunov(s: np.ndarray, g: Graph, Ks: float, k: Kernel | str = TRIANGULAR) -> float:
    """Energy ``H`` that the flow descends."""
    k = as_kernel(k)
    s = _check_dim(s, g)
    return _edge_phi_sum(s, g, k) - 0.5 * Ks * float(Phi(k, 2.0 * s).sum())


def relaxed_cut(s: np.ndarray, g: Graph, k: Kernel | str = TRIANGULAR) -> float:
    """Relaxed cut ``W/2 - (1/2) sum_E w Phi(v_i - v_j)``; equals the cut on {0, 2}^N."""
    return 0.5 * g.total_weight - 0.5 * _edge_phi_sum(s, g, as_kernel(k))


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """Default initial condition: i.i.d. uniform on (-1, 1)."""
    return rng.uniform(-1.0, 1.0, size=n)


def write_energy_trace(out, H, relaxed) -> None:
    """Write ``step,H,relaxed_cut`` CSV rows for a traced :func:`evolve`."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("step", "H", "relaxed_cut"))
    for step, (h, c) in enumerate(zip(H, relaxed)):
        writer.writerow((step, repr(float(h)), repr(float(c))))
