"""Terrain description: a flat floor with a compact perturbation.

A surface is an integer height profile ``S(x)`` over the columns of the
square lattice. Outside a finite half-width ``M`` the profile is zero;
inside, heights may rise or dip but adjacent columns never differ by
more than one step, and the outermost stored columns must actually
deviate from zero so the stated half-width is tight.

The text format is line based::

    # comment lines and blank lines are ignored
    M=<half-width>
    h(-M+1) h(-M+2) ... h(M-1)

with no heights line at all for the flat surface ``M=0``.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import SurfaceFormatError, SurfaceShapeError

__all__ = ["PointKind", "PointClass", "Surface"]

_HALF_WIDTH_RE = re.compile(r"^M\s*=\s*([+-]?\d+)$")


class PointKind(Enum):
    EXTERNAL = "external"
    SURFACE = "surface"
    INTERNAL = "internal"


@dataclass(frozen=True)
class PointClass:
    """Classification of a lattice point relative to a surface."""

    kind: PointKind
    near_boundary: bool = False
    ground: bool = False


@dataclass(frozen=True)
class Surface:
    """Validated compactly-supported height profile.

    ``heights[i]`` stores ``S(-half_width + 1 + i)``; columns at or
    beyond ``|x| = half_width`` sit at height zero.
    """

    half_width: int
    heights: tuple[int, ...] = ()

    def __post_init__(self):
        m = self.half_width
        if m < 0:
            raise SurfaceShapeError(f"half-width must be nonnegative, got {m}")
        expected = max(0, 2 * m - 1)
        if len(self.heights) != expected:
            raise SurfaceShapeError(
                f"half-width {m} requires {expected} heights, got {len(self.heights)}"
            )
        profile = (0,) + self.heights + (0,)
        for i in range(len(profile) - 1):
            if abs(profile[i + 1] - profile[i]) > 1:
                x = -m + i
                raise SurfaceShapeError(
                    f"height step between columns {x} and {x + 1} exceeds one"
                )
        if m >= 1:
            if self.heights[0] == 0:
                raise SurfaceShapeError(
                    f"column {-(m - 1)} is zero; half-width {m} is not tight"
                )
            if self.heights[-1] == 0:
                raise SurfaceShapeError(
                    f"column {m - 1} is zero; half-width {m} is not tight"
                )
        self._audit_near_boundary()

    def _audit_near_boundary(self):
        # Points one step above the surface must never touch the interior.
        m = self.half_width
        for x in range(-m - 1, m + 2):
            y = self.height_at(x) + 1
            for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if self.classify_kind(nx, ny) is PointKind.INTERNAL:
                    raise SurfaceShapeError(
                        f"point above column {x} has interior neighbor at "
                        f"({nx}, {ny})"
                    )

    @classmethod
    def from_text(cls, text: str) -> "Surface":
        significant: list[tuple[int, str]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                significant.append((lineno, line))
        if not significant:
            raise SurfaceFormatError("no half-width line found")
        lineno, line = significant[0]
        match = _HALF_WIDTH_RE.match(line)
        if not match:
            raise SurfaceFormatError(f"expected 'M=<int>', got {line!r}", lineno)
        m = int(match.group(1))
        if m < 0:
            raise SurfaceFormatError(f"half-width must be nonnegative, got {m}", lineno)
        heights: tuple[int, ...] = ()
        rest = significant[1:]
        if m >= 1:
            if not rest:
                raise SurfaceFormatError(f"missing heights line for half-width {m}")
            lineno, line = rest[0]
            tokens = line.split()
            parsed = []
            for tok in tokens:
                try:
                    parsed.append(int(tok))
                except ValueError:
                    raise SurfaceFormatError(f"invalid height {tok!r}", lineno) from None
            if len(parsed) != 2 * m - 1:
                raise SurfaceFormatError(
                    f"expected {2 * m - 1} heights, got {len(parsed)}", lineno
                )
            heights = tuple(parsed)
            rest = rest[1:]
        if rest:
            lineno, line = rest[0]
            raise SurfaceFormatError(f"unexpected extra content {line!r}", lineno)
        try:
            return cls(half_width=m, heights=heights)
        except SurfaceShapeError as exc:
            raise SurfaceFormatError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "Surface":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        if self.half_width == 0:
            return "M=0\n"
        body = " ".join(str(h) for h in self.heights)
        return f"M={self.half_width}\n{body}\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    def height_at(self, x: int) -> int:
        if abs(x) >= self.half_width:
            return 0
        return self.heights[x + self.half_width - 1]

    def classify_kind(self, x: int, y: int) -> PointKind:
        s = self.height_at(x)
        if y == s:
            return PointKind.SURFACE
        return PointKind.EXTERNAL if y > s else PointKind.INTERNAL

    def classify(self, x: int, y: int) -> PointClass:
        kind = self.classify_kind(x, y)
        if kind is not PointKind.EXTERNAL:
            return PointClass(kind)
        return PointClass(
            kind,
            near_boundary=(y == self.height_at(x) + 1),
            ground=(y == 0),
        )

    @property
    def columns(self) -> range:
        """Columns with stored heights."""
        m = self.half_width
        return range(-m + 1, m)

    @property
    def peak_height(self) -> int:
        return max((h for h in self.heights if h > 0), default=0)

    @property
    def trench_depth(self) -> int:
        return max((-h for h in self.heights if h < 0), default=0)

    @property
    def ground_columns(self) -> tuple[int, ...]:
        """Columns whose ground-level point lies strictly above the surface."""
        return tuple(x for x in self.columns if self.height_at(x) < 0)

    @property
    def zero_height_columns(self) -> tuple[int, ...]:
        """Interior columns where the profile touches height zero."""
        return tuple(x for x in self.columns if self.height_at(x) == 0)
