"""Shared fixtures: one coefficient table and solver cache per session."""

from __future__ import annotations

from pathlib import Path

import pytest

from hitdist import (
    BoundarySolution,
    HitCoeffTable,
    Surface,
    assemble_system,
    solve_boundary,
)

SURFACE_DIR = Path(__file__).resolve().parent.parent / "surfaces"

SURFACE_NAMES = (
    "flat",
    "bump_m1",
    "well_m2",
    "ridge_m3",
    "mixed_m4",
    "plateau_m10",
)

# Start points exercised throughout the suite, one list per surface.
STARTS = {
    "flat": [(0, 1), (2, 3), (-4, 2)],
    "bump_m1": [(0, 2), (3, 1)],
    "well_m2": [(0, -1), (0, 1), (5, 2)],
    "ridge_m3": [(0, 3), (-2, 2), (4, 1)],
    "mixed_m4": [(1, 1), (0, 0), (0, 2), (-5, 1)],
    "plateau_m10": [(0, 5), (15, 1)],
}


@pytest.fixture(scope="session")
def table() -> HitCoeffTable:
    return HitCoeffTable()


@pytest.fixture(scope="session")
def surfaces() -> dict[str, Surface]:
    return {
        name: Surface.from_file(SURFACE_DIR / f"{name}.surface")
        for name in SURFACE_NAMES
    }


@pytest.fixture(scope="session")
def solver(table, surfaces):
    """Memoized access to solved windows: solver(name, x_lo, x_hi)."""
    systems: dict[str, object] = {}
    solutions: dict[tuple[str, int, int], BoundarySolution] = {}

    def solve(name: str, x_lo: int, x_hi: int) -> BoundarySolution:
        key = (name, x_lo, x_hi)
        if key not in solutions:
            if name not in systems:
                systems[name] = assemble_system(surfaces[name], table)
            solutions[key] = solve_boundary(systems[name], x_lo, x_hi)
        return solutions[key]

    return solve
