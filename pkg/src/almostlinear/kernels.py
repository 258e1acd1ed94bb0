"""Coupling kernels: the potential ``Phi`` and its derivative ``phi``.

Two kinds share the period-4 convention so that the rest of the package is
kernel-agnostic:

* ``triangular``: ``Phi(v) = 1 - v**2`` on ``[-1, 1]`` and ``(v - 2)**2 - 1``
  on ``[1, 3]``; ``phi = dPhi/dv`` is a piecewise-linear triangle wave.
* ``xy``: ``Phi(v) = cos(pi v / 2)``, the rank-2 (Kuramoto) relaxation with
  the phase rescaled to period 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.optimize import minimize_scalar

PERIOD = 4
KINDS = ("triangular", "xy")

_ALIASES = {"tri": "triangular", "triangular": "triangular", "xy": "xy"}


@dataclass(frozen=True)
class Kernel:
    kind: str = "triangular"
    period: int = PERIOD

    def __post_init__(self):
        kind = _ALIASES.get(self.kind)
        if kind is None:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "kind", kind)
        if self.period != PERIOD:
            raise ValueError(f"only period {PERIOD} is supported, got {self.period}")

    @property
    def code(self) -> int:
        """Integer tag used by the compiled loops (0 triangular, 1 xy)."""
        return KINDS.index(self.kind)


TRIANGULAR = Kernel("triangular")
XY = Kernel("xy")


def as_kernel(k: Kernel | str) -> Kernel:
    return k if isinstance(k, Kernel) else Kernel(k)


def _reduce_tri(v):
    # into [-1, 3); works for float and fractions.Fraction alike
    return v - 4 * math.floor((v + 1) / 4)


def eval_Phi(k: Kernel | str, v):
    """Kernel value ``Phi(v)`` for a scalar ``v`` (float or Fraction)."""
    k = as_kernel(k)
    if k.kind == "xy":
        return math.cos(math.pi * v / 2)
    u = _reduce_tri(v)
    if u <= 1:
        return 1 - u * u
    return (u - 2) * (u - 2) - 1


def eval_phi(k: Kernel | str, v):
    """Coupling ``phi(v) = dPhi/dv`` for a scalar ``v``."""
    k = as_kernel(k)
    if k.kind == "xy":
        return -(math.pi / 2) * math.sin(math.pi * v / 2)
    u = _reduce_tri(v)
    if u <= 1:
        return -2 * u
    return 2 * (u - 2)


def Phi(k: Kernel | str, v: np.ndarray) -> np.ndarray:
    """Vectorised ``Phi`` over an array."""
    k = as_kernel(k)
    v = np.asarray(v, dtype=float)
    if k.kind == "xy":
        return np.cos(np.pi * v / 2)
    u = v - 4.0 * np.floor((v + 1.0) / 4.0)
    return np.where(u <= 1.0, 1.0 - u * u, (u - 2.0) ** 2 - 1.0)


def phi(k: Kernel | str, v: np.ndarray) -> np.ndarray:
    """Vectorised ``phi`` over an array."""
    k = as_kernel(k)
    v = np.asarray(v, dtype=float)
    if k.kind == "xy":
        return -(np.pi / 2) * np.sin(np.pi * v / 2)
    u = v - 4.0 * np.floor((v + 1.0) / 4.0)
    return np.where(u <= 1.0, -2.0 * u, 2.0 * (u - 2.0))


@njit(cache=True, nogil=True, inline="always")
def phi_nb(code, v):
    if code == 1:
        return -(math.pi / 2) * math.sin(math.pi * v / 2)
    u = v - 4.0 * math.floor((v + 1.0) / 4.0)
    if u <= 1.0:
        return -2.0 * u
    return 2.0 * (u - 2.0)


@njit(cache=True, nogil=True, inline="always")
def Phi_nb(code, v):
    if code == 1:
        return math.cos(math.pi * v / 2)
    u = v - 4.0 * math.floor((v + 1.0) / 4.0)
    if u <= 1.0:
        return 1.0 - u * u
    return (u - 2.0) * (u - 2.0) - 1.0


def _ratio(k: Kernel, v: float) -> float:
    return (4 / k.period) * v / (1 - eval_Phi(k, v))


def compute_alpha(k: Kernel | str = TRIANGULAR) -> float:
    """Performance-ratio constant ``(4/P) * min_{0<|v|<=2} |v| / (1 - Phi(v))``.

    The ratio is even in ``v`` so only ``(0, 2]`` is searched: a coarse grid
    locates the basin, bounded Brent polishes it. Near ``v = 0`` both kernels
    have ratio ``>= 1`` (triangular: exactly ``1/|v|``), so the grid starts
    just off zero.
    """
    k = as_kernel(k)
    grid = np.linspace(1e-3, 2.0, 4001)
    vals = (4 / k.period) * grid / (1.0 - Phi(k, grid))
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(lambda x: _ratio(k, x), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return float(min(res.fun, vals[i], 1.0))
