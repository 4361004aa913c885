"""Axelrod cultural dissemination on a square lattice.

Each cell of an L x L grid holds an agent with f integer traits in
{0, ..., q-1}.  One step: pick a random agent and a random von Neumann
neighbor; with probability equal to their cultural similarity (shared
traits / f) the agent copies one uniformly chosen differing trait from the
neighbor.  The dynamics freeze once every adjacent pair has similarity
exactly 0 or 1 (the absorbing state).

Boundaries are open by default: edge and corner agents pick uniformly among
their existing 2-3 neighbors.  Periodic boundaries are available via
``boundary="periodic"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .core import derive_stream
from .errors import InvalidDimension

__all__ = [
    "CultureGrid",
    "SimulationReport",
    "init_grid",
    "cultural_similarity",
    "step",
    "is_absorbed",
    "count_regions",
    "run",
    "grid_to_csv",
]


@dataclass
class CultureGrid:
    """L x L lattice of agents; ``cells[r, c]`` is an f-vector of traits."""

    cells: np.ndarray
    q: int
    rng: np.random.Generator
    boundary: str = "open"

    def __post_init__(self):
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be 'open' or 'periodic', "
                             f"got {self.boundary!r}")
        self._flat = self.cells.reshape(-1, self.cells.shape[2])
        self._neighbors = _neighbor_table(self.size, self.boundary)

    @property
    def size(self) -> int:
        return self.cells.shape[0]

    @property
    def n_features(self) -> int:
        return self.cells.shape[2]

    def snapshot(self) -> "CultureGrid":
        """Deep copy; the copy's rng resumes from the current state."""
        bit_gen = np.random.Philox()
        bit_gen.state = self.rng.bit_generator.state
        return CultureGrid(
            cells=self.cells.copy(),
            q=self.q,
            rng=np.random.Generator(bit_gen),
            boundary=self.boundary,
        )


@dataclass(frozen=True)
class SimulationReport:
    """Outcome of a lattice run."""

    steps_executed: int
    converged: bool
    region_count: int
    final_grid: CultureGrid


def _neighbor_table(L: int, boundary: str) -> List[np.ndarray]:
    """Flat-index von Neumann neighbor lists, fixed order (up, down, left, right)."""
    table = []
    for r in range(L):
        for c in range(L):
            nbrs = []
            for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                rr, cc = r + dr, c + dc
                if boundary == "periodic":
                    nbrs.append((rr % L) * L + (cc % L))
                elif 0 <= rr < L and 0 <= cc < L:
                    nbrs.append(rr * L + cc)
            table.append(np.array(nbrs, dtype=np.intp))
    return table


def init_grid(L: int, f: int, q: int, seed: int, boundary: str = "open") -> CultureGrid:
    """Random lattice: every trait slot uniform over {0, ..., q-1}.

    Raises:
        InvalidDimension: L, f or q below 1.
    """
    if L < 1 or f < 1 or q < 1:
        raise InvalidDimension(f"need L, f, q >= 1, got L={L}, f={f}, q={q}")
    rng = derive_stream(seed, "lattice")
    cells = rng.integers(0, q, size=(L, L, f), dtype=np.int64)
    return CultureGrid(cells=cells, q=q, rng=rng, boundary=boundary)


def cultural_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Fraction of positions where the two trait vectors agree."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.mean(a == b))


def step(grid: CultureGrid) -> bool:
    """Advance the dynamics by one interaction attempt, in place.

    Returns True iff a trait was actually copied.  Draw order per step:
    agent cell, neighbor, acceptance uniform, then (only on acceptance with
    differing features) the feature choice.  A 1x1 grid never interacts and
    consumes no draws.
    """
    L = grid.size
    if L < 2:
        return False
    rng = grid.rng
    flat = grid._flat
    agent_idx = int(rng.integers(flat.shape[0]))
    nbrs = grid._neighbors[agent_idx]
    nbr_idx = int(nbrs[int(rng.integers(nbrs.size))])

    agent = flat[agent_idx]
    other = flat[nbr_idx]
    shared = int(np.count_nonzero(agent == other))
    if rng.uniform() < shared / grid.n_features:
        differing = np.flatnonzero(agent != other)
        if differing.size > 0:
            feature = int(differing[int(rng.integers(differing.size))])
            agent[feature] = other[feature]
            return True
    return False


def _pair_match_counts(grid: CultureGrid):
    """Per-bond shared-trait counts along both lattice axes (and wraps)."""
    cells = grid.cells
    blocks = [
        (cells[:, :-1, :] == cells[:, 1:, :]).sum(axis=2).ravel(),
        (cells[:-1, :, :] == cells[1:, :, :]).sum(axis=2).ravel(),
    ]
    if grid.boundary == "periodic" and grid.size > 1:
        blocks.append((cells[:, -1, :] == cells[:, 0, :]).sum(axis=1).ravel())
        blocks.append((cells[-1, :, :] == cells[0, :, :]).sum(axis=1).ravel())
    return np.concatenate(blocks) if blocks else np.empty(0, dtype=np.intp)


def is_absorbed(grid: CultureGrid) -> bool:
    """True iff no active bonds: every adjacent pair has similarity 0 or 1."""
    matches = _pair_match_counts(grid)
    if matches.size == 0:
        return True
    f = grid.n_features
    return not np.any((matches > 0) & (matches < f))


def count_regions(grid: CultureGrid) -> int:
    """Connected components of identical cultures under lattice adjacency."""
    L = grid.size
    flat = grid._flat
    table = grid._neighbors
    seen = np.zeros(L * L, dtype=bool)
    regions = 0
    for start in range(L * L):
        if seen[start]:
            continue
        regions += 1
        stack = [start]
        seen[start] = True
        while stack:
            cur = stack.pop()
            for nbr in table[cur]:
                if not seen[nbr] and np.array_equal(flat[cur], flat[nbr]):
                    seen[nbr] = True
                    stack.append(int(nbr))
    return regions


def run(grid: CultureGrid, max_steps: int, check_interval: int = 1000) -> SimulationReport:
    """Step until the absorbing state or ``max_steps``, whichever first.

    Absorption is checked exactly (active-bond scan) every
    ``check_interval`` steps, including once before any step, so an
    already-frozen grid reports zero steps.  The input grid is advanced in
    place; the report holds an independent snapshot.
    """
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    if check_interval < 1:
        raise ValueError(f"check_interval must be >= 1, got {check_interval}")

    steps = 0
    converged = is_absorbed(grid)
    while not converged and steps < max_steps:
        budget = min(check_interval, max_steps - steps)
        for _ in range(budget):
            step(grid)
        steps += budget
        converged = is_absorbed(grid)

    return SimulationReport(
        steps_executed=steps,
        converged=converged,
        region_count=count_regions(grid),
        final_grid=grid.snapshot(),
    )


def grid_to_csv(grid: CultureGrid, path) -> None:
    """Dump the lattice as L*L rows of f trait integers, row-major."""
    np.savetxt(path, grid._flat, fmt="%d", delimiter=",")
