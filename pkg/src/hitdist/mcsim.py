"""Independent Monte Carlo check of the closed-form hit distributions.

Walks are simulated directly on the lattice with a counter-based
random-number scheme: every walk derives its own generator state from
the run seed and its walk index alone. Results are therefore
byte-identical across repeat runs, thread counts, and scheduling
orders; parallelism never touches the sampled trajectories.

A walk that exhausts its step budget is tallied as truncated rather
than silently dropped, and comparisons are considered unusable when
more than ``TRUNCATION_LIMIT`` of the walks truncate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
from numba import njit, prange

from .linsys import HitDistribution
from .surface import PointKind, Surface

__all__ = [
    "WalkConfig",
    "WalkTally",
    "CompareReport",
    "run_walks",
    "raw_stream",
    "compare",
    "TRUNCATION_LIMIT",
    "NEGATIVE_TOLERANCE",
]

TRUNCATION_LIMIT = 0.01
NEGATIVE_TOLERANCE = 1e-3

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_TRUNCATED = np.int64(-(2**62))


@njit(cache=True, inline="always")
def _splitmix64(z):
    z = (z + np.uint64(0x9E3779B97F4A7C15)) & _MASK64
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK64
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK64
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _pcg32(state, inc):
    old = state
    state = (old * np.uint64(6364136223846793005) + inc) & _MASK64
    xorshifted = np.uint32(((old >> np.uint64(18)) ^ old) >> np.uint64(27))
    rot = np.uint32(old >> np.uint64(59))
    out = np.uint32((xorshifted >> rot) | (xorshifted << ((-rot) & np.uint32(31))))
    return state, out


@njit(cache=True, inline="always")
def _stream_init(seed, w):
    s0 = _splitmix64(seed ^ _splitmix64(w))
    inc = (_splitmix64(s0) << np.uint64(1)) | np.uint64(1)
    state = _splitmix64(s0 ^ np.uint64(0x5851F42D4C957F2D))
    return state, inc


@njit(cache=True)
def _stream_kernel(seed, w, length):
    out = np.empty(length, dtype=np.uint32)
    state, inc = _stream_init(seed, w)
    for i in range(length):
        state, r = _pcg32(state, inc)
        out[i] = r
    return out


@njit(cache=True, parallel=True)
def _walk_kernel(heights, m, k0, n0, walks, max_steps, seed):
    hits = np.empty(walks, dtype=np.int64)
    for w in prange(walks):
        state, inc = _stream_init(np.uint64(seed), np.uint64(w))
        x = np.int64(k0)
        y = np.int64(n0)
        hit = _TRUNCATED
        for _ in range(max_steps):
            state, r = _pcg32(state, inc)
            d = r >> np.uint32(30)
            if d == np.uint32(0):
                x += 1
            elif d == np.uint32(1):
                x -= 1
            elif d == np.uint32(2):
                y += 1
            else:
                y -= 1
            sx = heights[x + m - 1] if -m < x < m else np.int64(0)
            if y == sx:
                hit = x
                break
        hits[w] = hit
    return hits


def raw_stream(seed: int, walk_index: int, length: int) -> np.ndarray:
    """Raw 32-bit generator outputs of one walk's private stream.

    Walk ``walk_index`` of a run with ``seed`` consumes exactly these
    values in order, one per step; the step direction is the top two
    bits (0 right, 1 left, 2 up, 3 down). Exposed so external checks
    can replay trajectories without touching the simulation kernel.
    """
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    return _stream_kernel(np.uint64(seed), np.uint64(walk_index), length)


@dataclass(frozen=True)
class WalkConfig:
    """Simulation budget and seeding for one Monte Carlo run."""

    walks: int = 1_000_000
    max_steps: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if self.walks < 1:
            raise ValueError(f"walk count must be positive, got {self.walks}")
        if self.max_steps < 1:
            raise ValueError(f"step budget must be positive, got {self.max_steps}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass
class WalkTally:
    """Absorption counts of one Monte Carlo run."""

    start: tuple[int, int]
    config: WalkConfig
    counts: dict[int, int]
    absorbed: int
    truncated: int

    @property
    def truncated_fraction(self) -> float:
        return self.truncated / self.config.walks

    def empirical(self, x: int) -> float:
        return self.counts.get(x, 0) / self.config.walks


def run_walks(
    s: Surface,
    start: tuple[int, int],
    config: WalkConfig,
    threads: int | None = None,
) -> WalkTally:
    """Simulate first hits from ``start`` and tally the landing columns.

    ``threads`` caps the worker count for this run; the tally itself
    does not depend on it. Starts on the surface are absorbed
    immediately; interior starts are rejected.
    """
    k0, n0 = start
    kind = s.classify_kind(k0, n0)
    if kind is PointKind.INTERNAL:
        raise ValueError(f"start ({k0}, {n0}) lies inside the terrain")
    if kind is PointKind.SURFACE:
        return WalkTally(
            start=(k0, n0),
            config=config,
            counts={k0: config.walks},
            absorbed=config.walks,
            truncated=0,
        )
    m = s.half_width
    heights = np.asarray(s.heights, dtype=np.int64)
    if heights.size == 0:
        heights = np.zeros(1, dtype=np.int64)
    previous = numba.get_num_threads()
    if threads is not None:
        numba.set_num_threads(max(1, min(threads, numba.config.NUMBA_NUM_THREADS)))
    try:
        hits = _walk_kernel(
            heights,
            m,
            k0,
            n0,
            config.walks,
            config.max_steps,
            np.uint64(config.seed),
        )
    finally:
        if threads is not None:
            numba.set_num_threads(previous)
    truncated = int(np.count_nonzero(hits == _TRUNCATED))
    landed = hits[hits != _TRUNCATED]
    columns, tallies = np.unique(landed, return_counts=True)
    counts = {int(c): int(t) for c, t in zip(columns, tallies)}
    return WalkTally(
        start=(k0, n0),
        config=config,
        counts=counts,
        absorbed=int(landed.size),
        truncated=truncated,
    )


@dataclass
class CompareReport:
    """Column-by-column comparison of model output against a tally."""

    start: tuple[int, int]
    targets: np.ndarray
    model: np.ndarray
    empirical: np.ndarray
    stderr: np.ndarray
    walks: int
    absorbed: int
    truncated_fraction: float
    tv_distance: float
    max_abs_diff: float
    negative_model_count: int
    model_mass: float
    empirical_outside_mass: float
    runtime: dict[str, float] = field(default_factory=dict)

    @property
    def truncation_ok(self) -> bool:
        return self.truncated_fraction <= TRUNCATION_LIMIT

    def within(self, threshold: float) -> bool:
        return self.truncation_ok and self.tv_distance <= threshold


def compare(
    dist: HitDistribution,
    tally: WalkTally,
    runtime: dict[str, float] | None = None,
) -> CompareReport:
    """Match a model distribution against a Monte Carlo tally.

    The total-variation distance is taken over the model's target
    window, normalizing the tally by total walks so truncated and
    out-of-window walks count as discrepancy rather than vanishing.
    """
    if tuple(dist.start) != tuple(tally.start):
        raise ValueError(
            f"model start {dist.start} does not match tally start {tally.start}"
        )
    walks = tally.config.walks
    targets = dist.targets
    empirical = np.array([tally.counts.get(int(x), 0) for x in targets]) / walks
    stderr = np.sqrt(np.maximum(empirical * (1.0 - empirical), 0.0) / walks)
    diff = dist.probs - empirical
    inside = sum(tally.counts.get(int(x), 0) for x in targets)
    outside = (tally.absorbed - inside) / walks
    return CompareReport(
        start=tuple(dist.start),
        targets=targets,
        model=dist.probs.copy(),
        empirical=empirical,
        stderr=stderr,
        walks=walks,
        absorbed=tally.absorbed,
        truncated_fraction=tally.truncated_fraction,
        tv_distance=0.5 * float(np.abs(diff).sum()),
        max_abs_diff=float(np.max(np.abs(diff))) if targets.size else 0.0,
        negative_model_count=int(np.count_nonzero(dist.probs < -NEGATIVE_TOLERANCE)),
        model_mass=dist.mass,
        empirical_outside_mass=float(outside),
        runtime=dict(runtime or {}),
    )
