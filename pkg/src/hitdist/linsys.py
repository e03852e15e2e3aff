"""Boundary closure system and hit-distribution evaluation.

Over flat terrain the hit distribution is explicit. A compact
perturbation couples every start to finitely many unknown functions:
the distribution as seen from each point one step above the surface,
and from each open ground-level point. Collocating the evaluation
formula at those same points closes the set into a square linear
system whose matrix depends only on the surface, not on the start or
the target column. One factorization therefore serves every target in
a window, and every start reuses the solved window.

The flow is :func:`assemble_system` (factor once per surface), then
:func:`solve_boundary` (once per target window), then
:func:`hit_distribution` (once per start, cheap).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.special import polygamma

from .coeffs import direct_part, near_boundary_weight, near_boundary_weight_below
from .errors import SystemSolveError
from .kernel import HitCoeffTable, hit_coeff
from .surface import PointKind, Surface

__all__ = [
    "UnknownKind",
    "UnknownIndex",
    "BoundarySystem",
    "BoundarySolution",
    "HitDistribution",
    "assemble_system",
    "solve_boundary",
    "hit_distribution",
]

RESIDUAL_TOLERANCE = 1e-9


class UnknownKind(Enum):
    NEAR_BOUNDARY = "near_boundary"
    GROUND = "ground"


@dataclass(frozen=True)
class UnknownIndex:
    """One unknown of the closure: a column tagged by point family.

    Near-boundary unknowns live one step above the surface of their
    column; ground unknowns live at height zero over open columns. A
    column whose surface sits at height -1 has both points coincide,
    and carries a single ground unknown.
    """

    kind: UnknownKind
    column: int


@dataclass
class BoundarySystem:
    """Factored closure system for one surface.

    The matrix couples the unknown hit distributions among themselves;
    the right-hand side plan records, per equation, which direct parts
    and point-mass terms must be evaluated at each target column.
    """

    surface: Surface
    table: HitCoeffTable
    unknowns: tuple[UnknownIndex, ...]
    matrix: np.ndarray
    _lu: tuple = field(repr=False)
    _rhs_direct: list[list[tuple[int, int, float]]] = field(repr=False)
    _rhs_point: list[list[tuple[int, float]]] = field(repr=False)

    def index_of(self, unknown: UnknownIndex) -> int:
        return self.unknowns.index(unknown)


@dataclass
class BoundarySolution:
    """Unknown hit distributions resolved over a target window."""

    system: BoundarySystem
    x_lo: int
    x_hi: int
    targets: np.ndarray
    values: np.ndarray

    def row(self, kind: UnknownKind, column: int) -> np.ndarray:
        return self.values[self.system.index_of(UnknownIndex(kind, column))]


@dataclass
class HitDistribution:
    """Hit probabilities for one start over a target window."""

    start: tuple[int, int]
    targets: np.ndarray
    probs: np.ndarray
    tail_estimate: float

    @property
    def mass(self) -> float:
        return float(self.probs.sum())

    @property
    def total_estimate(self) -> float:
        return self.mass + self.tail_estimate


def _unknown_layout(s: Surface) -> tuple[UnknownIndex, ...]:
    m = s.half_width
    near = [
        UnknownIndex(UnknownKind.NEAR_BOUNDARY, x)
        for x in range(-m, m + 1)
        if s.height_at(x) != -1
    ]
    ground = [UnknownIndex(UnknownKind.GROUND, j) for j in s.ground_columns]
    return tuple(near + ground)


def assemble_system(s: Surface, table: HitCoeffTable) -> BoundarySystem:
    """Build and factor the closure system for a surface.

    The system has one equation per unknown: a collocation of the
    evaluation formula at each near-boundary point, and a one-step
    balance at each open ground point. Raises
    :class:`~hitdist.errors.SystemSolveError` if the factorization is
    singular or non-finite.
    """
    unknowns = _unknown_layout(s)
    index = {u: i for i, u in enumerate(unknowns)}
    nvars = len(unknowns)
    m = s.half_width
    a = np.zeros((nvars, nvars))
    rhs_direct: list[list[tuple[int, int, float]]] = [[] for _ in range(nvars)]
    rhs_point: list[list[tuple[int, float]]] = [[] for _ in range(nvars)]

    def var_near(column: int) -> int:
        kind = (
            UnknownKind.GROUND
            if s.height_at(column) == -1
            else UnknownKind.NEAR_BOUNDARY
        )
        return index[UnknownIndex(kind, column)]

    def substitute(row: int, k: int, n: int, coef: float):
        # Encode "... - coef * P(start=(k,n)) = 0": unknown parts of P move
        # to the matrix, the direct part joins the right-hand side plan.
        weight = near_boundary_weight if n > 0 else near_boundary_weight_below
        for col in range(-m, m + 1):
            a[row, var_near(col)] += coef * weight(s, table, k, n, col)
        for j in s.ground_columns:
            a[row, index[UnknownIndex(UnknownKind.GROUND, j)]] -= coef * hit_coeff(
                table, abs(n), k - j
            )
        rhs_direct[row].append((k, n, coef))

    for row, unknown in enumerate(unknowns):
        col = unknown.column
        if unknown.kind is UnknownKind.NEAR_BOUNDARY:
            a[row, row] += 1.0
            substitute(row, col, s.height_at(col) + 1, 1.0)
        else:
            a[row, row] += 1.0
            depth = s.height_at(col)
            for nb in (col - 1, col + 1):
                side = s.height_at(nb)
                if side < 0:
                    a[row, index[UnknownIndex(UnknownKind.GROUND, nb)]] -= 0.25
                else:
                    rhs_point[row].append((nb, 0.25))
            substitute(row, col, 1, 0.25)
            if depth == -1:
                rhs_point[row].append((col, 0.25))
            elif depth == -2:
                a[row, var_near(col)] -= 0.25
            else:
                substitute(row, col, -1, 0.25)

    if not np.all(np.isfinite(a)):
        raise SystemSolveError(
            f"closure matrix is not finite for surface {s.digest()[:12]}"
        )
    try:
        lu = lu_factor(a)
    except Exception as exc:
        raise SystemSolveError(
            f"closure matrix is singular for surface {s.digest()[:12]}"
        ) from exc
    if not all(np.all(np.isfinite(part)) for part in lu):
        raise SystemSolveError(
            f"factorization failed for surface {s.digest()[:12]}"
        )
    return BoundarySystem(
        surface=s,
        table=table,
        unknowns=unknowns,
        matrix=a,
        _lu=lu,
        _rhs_direct=rhs_direct,
        _rhs_point=rhs_point,
    )


def solve_boundary(system: BoundarySystem, x_lo: int, x_hi: int) -> BoundarySolution:
    """Resolve the unknown distributions over target columns ``[x_lo, x_hi]``.

    Builds the right-hand side for every target column, back-substitutes
    through the stored factorization, and verifies the residual. Raises
    :class:`~hitdist.errors.SystemSolveError` if the residual exceeds
    the acceptance threshold.
    """
    if x_hi < x_lo:
        raise ValueError(f"empty target window [{x_lo}, {x_hi}]")
    s = system.surface
    table = system.table
    targets = np.arange(x_lo, x_hi + 1)
    nvars = len(system.unknowns)
    b = np.zeros((nvars, targets.size))
    for row in range(nvars):
        for k, n, coef in system._rhs_direct[row]:
            b[row] += coef * np.array(
                [direct_part(s, table, k, n, int(x)) for x in targets]
            )
        for x0, coef in system._rhs_point[row]:
            if x_lo <= x0 <= x_hi:
                b[row, x0 - x_lo] += coef
    values = lu_solve(system._lu, b)
    residual = float(np.max(np.abs(system.matrix @ values - b)))
    if residual > RESIDUAL_TOLERANCE:
        raise SystemSolveError(
            f"solve residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:.1e} "
            f"for surface {s.digest()[:12]}"
        )
    return BoundarySolution(
        system=system, x_lo=x_lo, x_hi=x_hi, targets=targets, values=values
    )


def _edge_calibrated_tail(k: int, solution_window: tuple[int, int], probs: np.ndarray) -> float:
    # Far-field decay is inverse square with a surface-dependent
    # coefficient; calibrate it on the outermost window values, one
    # side at a time.
    x_lo, x_hi = solution_window
    total = 0.0
    for edge_prob, offset in ((probs[0], k - x_lo), (probs[-1], x_hi - k)):
        if offset < 1:
            continue
        coeff = max(float(edge_prob), 0.0) * offset * offset
        total += coeff * float(polygamma(1, offset + 1))
    return total


def hit_distribution(solution: BoundarySolution, k: int, n: int) -> HitDistribution:
    """Hit distribution for a start at column ``k``, level ``n``.

    The start must not lie inside the terrain. Starts on the surface
    give a point mass; all other starts combine the direct part with
    the resolved unknowns. The tail estimate bounds the probability
    mass outside the target window.
    """
    system = solution.system
    s = system.surface
    table = system.table
    kind = s.classify_kind(k, n)
    if kind is PointKind.INTERNAL:
        raise ValueError(f"start ({k}, {n}) lies inside the terrain")
    targets = solution.targets
    x_lo, x_hi = solution.x_lo, solution.x_hi
    if kind is PointKind.SURFACE:
        if not x_lo <= k <= x_hi:
            raise ValueError(
                f"surface start column {k} outside target window [{x_lo}, {x_hi}]"
            )
        probs = np.zeros(targets.size)
        probs[k - x_lo] = 1.0
        return HitDistribution((k, n), targets, probs, 0.0)
    if not x_lo <= k <= x_hi:
        raise ValueError(
            f"start column {k} outside target window [{x_lo}, {x_hi}]"
        )
    if n == 0:
        probs = solution.row(UnknownKind.GROUND, k).copy()
        tail = _edge_calibrated_tail(k, (x_lo, x_hi), probs)
        return HitDistribution((k, n), targets, probs, tail)
    if abs(k) <= s.half_width and n == s.height_at(k) + 1:
        unknown_kind = (
            UnknownKind.GROUND if s.height_at(k) == -1 else UnknownKind.NEAR_BOUNDARY
        )
        probs = solution.row(unknown_kind, k).copy()
    else:
        probs = np.array([direct_part(s, table, k, n, int(x)) for x in targets])
        weight = near_boundary_weight if n > 0 else near_boundary_weight_below
        for col in range(-s.half_width, s.half_width + 1):
            unknown_kind = (
                UnknownKind.GROUND
                if s.height_at(col) == -1
                else UnknownKind.NEAR_BOUNDARY
            )
            probs -= weight(s, table, k, n, col) * solution.row(unknown_kind, col)
        for j in s.ground_columns:
            probs += hit_coeff(table, abs(n), k - j) * solution.row(
                UnknownKind.GROUND, j
            )
    tail = _edge_calibrated_tail(k, (x_lo, x_hi), probs)
    return HitDistribution((k, n), targets, probs, tail)
