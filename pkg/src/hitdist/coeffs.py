"""Coupling coefficients between walk starts and surface columns.

These are the scalar building blocks of the boundary closure: cosine
transforms of the absorbing-floor Green function, and the specific
combinations of them that weight near-boundary values and assemble the
explicit part of a hit distribution. Starts below ground level use the
mirrored variants, which are not naive reflections: the flat far field
stays below the walk in both cases, so the two families carry different
neighbor conditions and the below-ground one is windowed to the columns
where the terrain actually opens downward.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

from .kernel import HitCoeffTable, QuadratureSpec, hit_coeff, vertical_green
from .surface import Surface

__all__ = [
    "coupling_coeff",
    "coupling_coeff_quadrature",
    "near_boundary_weight",
    "near_boundary_weight_below",
    "direct_part",
]


def coupling_coeff(table: HitCoeffTable, k: int, n: int, m: int, l: int) -> float:
    """Couple a start at ``(k, n)`` to an observation height ``l`` in column ``m``.

    Equals a short sum of hit coefficients at offset ``k - m``; zero as
    soon as either height is at or below the absorbing floor.
    """
    if n <= 0 or l <= 0:
        return 0.0
    gap = abs(l - n)
    return sum(hit_coeff(table, 2 * j - 1 + gap, k - m) for j in range(1, min(n, l) + 1))


def coupling_coeff_quadrature(
    k: int, n: int, m: int, l: int, spec: QuadratureSpec | None = None
) -> float:
    """Independent route to :func:`coupling_coeff` via direct integration.

    Integrates the absorbing-floor Green function against a cosine with
    its own panel-doubling control, bypassing the hit-coefficient table
    entirely. Intended for cross-checks, not production use.
    """
    if n <= 0 or l <= 0:
        return 0.0
    spec = spec or QuadratureSpec()
    offset = abs(k - m)
    x, w = leggauss(spec.nodes_per_panel)

    def estimate(panels: int) -> float:
        edges = np.linspace(0.0, np.pi, panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        total = 0.0
        for c, h in zip(mid, half):
            t = c + h * x
            vals = np.array([vertical_green(n, l, ti) for ti in t])
            total += h * float(np.dot(w, np.cos(offset * t) * vals))
        return total / np.pi

    panels = max(spec.min_panels, spec.panel_scale * (offset + n + l))
    coarse = estimate(panels)
    for _ in range(spec.max_refinements):
        panels *= 2
        fine = estimate(panels)
        if abs(fine - coarse) <= spec.abs_tolerance:
            return fine
        coarse = fine
    return coarse


def near_boundary_weight(
    s: Surface, table: HitCoeffTable, k: int, n: int, m: int
) -> float:
    """Weight of the near-boundary value at column ``m`` for a start above ground.

    Sums the coupling of the start to the surface level of ``m`` and to
    each neighbor column that sits one step higher. Requires ``n >= 1``.
    """
    if n < 1:
        raise ValueError(f"start level must be positive, got {n}")
    sm = s.height_at(m)
    total = coupling_coeff(table, k, n, m, sm)
    for nb in (m - 1, m + 1):
        if s.height_at(nb) == sm + 1:
            total += coupling_coeff(table, k, n, nb, sm + 1)
    return total


def near_boundary_weight_below(
    s: Surface, table: HitCoeffTable, k: int, n: int, m: int
) -> float:
    """Weight of the near-boundary value at column ``m`` for a start below ground.

    Mirror of :func:`near_boundary_weight`: observation heights are
    negated while the neighbor conditions keep their orientation.
    Requires ``n <= -1``.
    """
    if n > -1:
        raise ValueError(f"start level must be negative, got {n}")
    depth = -n
    sm = s.height_at(m)
    total = coupling_coeff(table, k, depth, m, -sm)
    for nb in (m - 1, m + 1):
        if s.height_at(nb) == sm + 1:
            total += coupling_coeff(table, k, depth, nb, -(sm + 1))
    return total


def direct_part(s: Surface, table: HitCoeffTable, k: int, n: int, x: int) -> float:
    """Explicit part of the hit probability at column ``x``, before closure.

    For starts above ground this couples the start to the first external
    level of column ``x`` and of each neighbor that sits one step lower.
    Over flat terrain it already equals the full answer. Starts below
    ground use negated observation heights and vanish outside the open
    columns of the perturbation. ``n`` must be nonzero.
    """
    if n == 0:
        raise ValueError("level zero has no direct part")
    sx = s.height_at(x)
    if n > 0:
        total = coupling_coeff(table, k, n, x, sx + 1)
        for nb in (x - 1, x + 1):
            if s.height_at(nb) == sx - 1:
                total += coupling_coeff(table, k, n, nb, sx)
        return total
    if abs(x) >= s.half_width:
        return 0.0
    depth = -n
    total = coupling_coeff(table, k, depth, x, -sx - 1)
    for nb in (x - 1, x + 1):
        if s.height_at(nb) == sx - 1:
            total += coupling_coeff(table, k, depth, nb, -sx)
    return total
