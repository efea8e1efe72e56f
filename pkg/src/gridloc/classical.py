"""Classical baselines: naive pattern search and particle-filter localization.

These exist to put the amplified search in context. The substring scanner
counts its character probes so query costs can be compared directly, and
the particle filter localizes the same maps with the same perception
model, tracking how much sensing work it spends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gridmap import Cell, GridMap, perceive_at

# Weight given to particles whose perception disagrees with the robot's.
MISMATCH_WEIGHT = 1e-6

# Fraction of particles that must agree on one cell to declare convergence.
CONVERGENCE_SHARE = 0.9

CARDINAL_STEPS = ((-1, 0), (1, 0), (0, -1), (0, 1))


@dataclass
class QueryCounter:
    """Running tally of search effort."""

    comparisons: int = 0
    oracle_calls: int = 0


def substring_search(haystack: str, needle: str) -> tuple[list[int], QueryCounter]:
    """Naive left-to-right scan. Returns match positions and the tally.

    Every window probe counts one oracle call; every character test counts
    one comparison. Worst case does len(needle) work per window.
    """
    if not needle:
        raise ValueError("needle must be non-empty")
    counter = QueryCounter()
    positions: list[int] = []
    for start in range(len(haystack) - len(needle) + 1):
        counter.oracle_calls += 1
        for offset in range(len(needle)):
            counter.comparisons += 1
            if haystack[start + offset] != needle[offset]:
                break
        else:
            positions.append(start)
    return positions, counter


def query_comparison(n: int) -> dict[str, float]:
    """Expected classical probes versus amplified oracle calls for n sites."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return {
        "classical_expected": n / 2.0,
        "grover_calls": math.ceil(math.pi / 4.0 * math.sqrt(n)),
        "sqrt_n": math.sqrt(n),
    }


@dataclass(frozen=True)
class ParticleSet:
    """Weighted particle cloud at one instant."""

    particles: tuple[tuple[int, int, float], ...]
    normalized: bool

    def __post_init__(self):
        if any(w < 0 for _, _, w in self.particles):
            raise ValueError("particle weights must be nonnegative")
        if self.normalized and abs(self.weight_sum() - 1.0) > 1e-9:
            raise ValueError("normalized particle weights must sum to 1")

    def weight_sum(self) -> float:
        return sum(w for _, _, w in self.particles)


@dataclass(frozen=True)
class MclResult:
    estimate: Cell
    iterations_used: int
    converged: bool
    robot: Cell
    sense_ops: int
    history: tuple[ParticleSet, ...] = field(repr=False)


def _systematic_resample(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Low-variance resampling: one uniform draw, evenly spaced pointers."""
    n = len(weights)
    positions = (np.arange(n) + rng.random()) / n
    cumulative = np.cumsum(weights)
    cumulative[-1] = 1.0  # guard against float shortfall
    return np.searchsorted(cumulative, positions)


def _step(grid: GridMap, cell: Cell, delta: tuple[int, int]) -> Cell:
    nxt = (cell[0] + delta[0], cell[1] + delta[1])
    return nxt if grid.is_free(nxt) else cell


def mcl_localize(
    grid: GridMap,
    true_robot: Cell | None = None,
    particle_count: int = 200,
    max_iters: int = 50,
    seed: int = 0,
) -> MclResult:
    """Monte Carlo localization against the map's perception signatures.

    Starts from a uniform cloud over free cells. Each iteration draws one
    cardinal step, applies it to the hidden robot and to every particle
    alike (blocked moves stay put), weights particles by exact perception
    agreement, then resamples systematically. Stops once 90% of the cloud
    sits on one cell or the iteration limit runs out. The estimate is the
    modal particle cell.
    """
    if true_robot is None:
        true_robot = grid.robot
    if true_robot is None:
        raise ValueError("no robot cell to localize")
    if not grid.is_free(true_robot):
        raise ValueError(f"robot cell {true_robot} is not free")
    if particle_count < 1:
        raise ValueError("particle_count must be >= 1")

    free = grid.free_cells()
    # Perception signatures are static per cell; compute each once.
    signature = {cell: perceive_at(grid, cell) for cell in free}

    rng = np.random.default_rng(seed)
    cells = [free[int(i)] for i in rng.integers(len(free), size=particle_count)]
    robot = true_robot
    history: list[ParticleSet] = []
    sense_ops = 0
    converged = False
    iterations = 0

    for iterations in range(1, max_iters + 1):
        delta = CARDINAL_STEPS[int(rng.integers(4))]
        robot = _step(grid, robot, delta)
        cells = [_step(grid, cell, delta) for cell in cells]

        target = signature[robot]
        weights = np.empty(particle_count)
        for i, cell in enumerate(cells):
            sense_ops += 1
            weights[i] = 1.0 if signature[cell] == target else MISMATCH_WEIGHT
        weights /= weights.sum()
        history.append(
            ParticleSet(
                particles=tuple((r, c, float(w)) for (r, c), w in zip(cells, weights)),
                normalized=True,
            )
        )

        cells = [cells[int(i)] for i in _systematic_resample(weights, rng)]

        tally: dict[Cell, int] = {}
        for cell in cells:
            tally[cell] = tally.get(cell, 0) + 1
        top = max(tally.values())
        if top >= CONVERGENCE_SHARE * particle_count:
            converged = True
            break

    tally = {}
    for cell in cells:
        tally[cell] = tally.get(cell, 0) + 1
    estimate = min(tally, key=lambda cell: (-tally[cell], cell))
    return MclResult(
        estimate=estimate,
        iterations_used=iterations,
        converged=converged,
        robot=robot,
        sense_ops=sense_ops,
        history=tuple(history),
    )


def mcl_trace_csv(history) -> str:
    """Per-iteration particle dump: ``iter,row,col,weight``."""
    lines = ["iter,row,col,weight"]
    for i, snapshot in enumerate(history, start=1):
        for r, c, w in snapshot.particles:
            lines.append(f"{i},{r},{c},{w:.9f}")
    return "\n".join(lines) + "\n"
