"""Scaling-study harness and snapshot traces of free evolution."""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import DynParams, evolve, lyapunov, random_state, relaxed_cut
from .graph import ErdosRenyiSpec, Graph, from_edges, gen_er
from .localsearch import SearchMode
from .rounding import optimal_rounding, random_rounding
from .solver import Schedule, preset, solve

BENCH_COLUMNS = ("N", "p", "M", "seed", "post", "best_C_F",
                 "t_dynamics_s", "t_rounding_s", "t_post_s", "t_total_s")
TRACE_COLUMNS = ("start", "step", "H", "relaxed_cut", "C_R", "C_O")

DESK_NS = tuple(range(200, 1601, 200))
DESK_PS = (0.05, 0.1, 0.2, 0.35)
DESK_REPLICAS = 3

FULL_NS = tuple(range(200, 4001, 200))
FULL_PS = tuple(sorted({round(0.05 * k, 2) for k in range(1, 8)} | {round(0.12 + 0.05 * k, 2) for k in range(5)}))
FULL_REPLICAS = 5


@dataclass(frozen=True)
class Grid:
    ns: tuple[int, ...] = DESK_NS
    ps: tuple[float, ...] = DESK_PS
    replicas: int = DESK_REPLICAS
    modes: tuple[SearchMode, ...] = (SearchMode.NMR, SearchMode.NMR_EMR)

    def __post_init__(self):
        if not self.ns or any(n < 2 for n in self.ns):
            raise ValueError("grid needs node counts >= 2")
        if not self.ps or any(not 0.0 < p <= 1.0 for p in self.ps):
            raise ValueError("grid edge probabilities must lie in (0, 1]")
        if self.replicas < 1:
            raise ValueError("grid needs at least one replica")
        if not self.modes:
            raise ValueError("grid needs at least one post-processing mode")
        object.__setattr__(self, "modes", tuple(SearchMode.parse(m) for m in self.modes))


FULL_GRID = Grid(FULL_NS, FULL_PS, FULL_REPLICAS)


def graph_seed(seed: int, n: int, p: float, replica: int) -> int:
    """Stable 63-bit seed for one ensemble member."""
    ss = np.random.SeedSequence(seed, spawn_key=(n, int(round(p * 10**6)), replica))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


_warmed = False


def warm_up() -> None:
    """Trigger compilation of every kernel so timings exclude JIT cost."""
    global _warmed
    if _warmed:
        return
    g = from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    for mode in SearchMode:
        for kernel in ("triangular", "xy"):
            solve(g, Schedule(steps=2, repetitions=1, post=mode, kernel=kernel))
    _warmed = True


def bench_one(n: int, p: float, replica: int, sch: Schedule, modes, seed: int) -> list[dict]:
    gseed = graph_seed(seed, n, p, replica)
    g = gen_er(ErdosRenyiSpec(n, p, gseed))
    rows = []
    for mode in modes:
        t0 = time.perf_counter()
        res = solve(g, replace(sch, post=mode, seed=gseed))
        t_total = time.perf_counter() - t0
        rows.append({
            "N": n, "p": p, "M": g.m, "seed": gseed, "post": SearchMode.parse(mode).value,
            "best_C_F": res.best_cut,
            "t_dynamics_s": sum(r.t_dynamics_s for r in res.records),
            "t_rounding_s": sum(r.t_rounding_s for r in res.records),
            "t_post_s": sum(r.t_post_s for r in res.records),
            "t_total_s": t_total,
        })
    return rows


def bench_scaling(grid: Grid = Grid(), sch: Schedule | None = None, seed: int = 0,
                  workers: int = 1):
    """Yield one row per (graph, post mode) over the Erdos-Renyi grid."""
    sch = sch or preset("scaling")
    warm_up()
    cells = list(itertools.product(grid.ns, grid.ps, range(grid.replicas)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for rows in pool.map(lambda c: bench_one(*c, sch, grid.modes, seed), cells):
                yield from rows
    else:
        for cell in cells:
            yield from bench_one(*cell, sch, grid.modes, seed)


def loglog_slope(m, t) -> float:
    """Least-squares slope of log(t) against log(m)."""
    m = np.asarray(m, dtype=float)
    t = np.asarray(t, dtype=float)
    return float(np.polyfit(np.log(m), np.log(t), 1)[0])


def trace(g: Graph, params: DynParams, every: int, starts: int = 1, n_rounds: int = 32,
          seed: int = 0):
    """Snapshot rows along free evolution from ``starts`` random initial states.

    Each start yields rows at steps ``0, every, 2*every, ...`` and at the final
    step, with energy, relaxed cut, best-of-``n_rounds`` random rounding and
    optimal rounding.
    """
    if every < 1:
        raise ValueError("snapshot interval must be >= 1")
    for start in range(starts):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(start,)))
        v = random_state(g.n, rng)
        step = 0
        while True:
            yield {
                "start": start,
                "step": step,
                "H": lyapunov(v, g, params.Ks, params.kernel),
                "relaxed_cut": relaxed_cut(v, g, params.kernel),
                "C_R": random_rounding(v, g, n_rounds, rng).cut,
                "C_O": optimal_rounding(v, g).cut,
            }
            if step >= params.steps:
                break
            chunk = min(every, params.steps - step)
            v = evolve(v, g, replace(params, steps=chunk))
            step += chunk

