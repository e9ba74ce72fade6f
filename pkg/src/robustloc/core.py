"""Domain model for facility location with interval reports.

Agents report closed intervals on the segment [0, B] instead of exact
points; every report is at most ``delta`` wide.  This module holds the
validated instance model, the sorted endpoint view that every regret
formula consumes, the equispaced grids used by the snapping mechanisms,
and the shared upper-median convention.

All types are immutable and all operations are pure functions, so
everything here can be used concurrently without synchronization.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "Grid",
    "GridMismatchError",
    "Instance",
    "Interval",
    "InvalidInstanceError",
    "LocationVector",
    "SortedEndpoints",
    "build_grid",
    "snap",
    "sorted_endpoints",
    "upper_median",
    "validate_instance",
]

# Relative half-width of the band in which two grid points count as
# equidistant from a point being snapped.  Exact float equality would miss
# ties expressed in decimal (0.15 is not the exact midpoint of float 0.1
# and float 0.2), so near-ties inside this band follow the tie-break rule.
_TIE_BAND = 1e-9


class InvalidInstanceError(ValueError):
    """An interval profile violates the model; ``agent`` names the culprit."""

    def __init__(self, message: str, agent: int | None = None):
        super().__init__(message)
        self.agent = agent


class GridMismatchError(RuntimeError):
    """An interval spans more grid points than its inaccuracy bound allows."""


@dataclass(frozen=True)
class Interval:
    """A closed interval [a, b] of candidate locations for one agent."""

    a: float
    b: float

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def is_exact(self) -> bool:
        return self.a == self.b

    def contains(self, x: float) -> bool:
        return self.a <= x <= self.b


@dataclass(frozen=True)
class Instance:
    """A validated profile of interval reports on [0, B].

    ``delta`` bounds the width of every report; ``delta = 0`` is the exact
    setting where every agent reports a single point.
    """

    B: float
    delta: float
    agents: tuple[Interval, ...]

    @property
    def n(self) -> int:
        return len(self.agents)

    def replace_agent(self, index: int, interval: Interval) -> "Instance":
        agents = list(self.agents)
        agents[index] = interval
        return Instance(self.B, self.delta, tuple(agents))


@dataclass(frozen=True)
class SortedEndpoints:
    """Independently sorted endpoint views of an instance.

    ``L`` and ``R`` are the nondecreasing left and right endpoints (position
    i of L and R need not come from the same agent), ``k = floor(n / 2)``
    and ``M`` is the midpoint of the (k+1)-th smallest endpoints, the pivot
    of the upper-median convention.
    """

    L: tuple[float, ...]
    R: tuple[float, ...]
    k: int
    M: float

    @property
    def n(self) -> int:
        return len(self.L)


@dataclass(frozen=True)
class LocationVector:
    """A sorted realization of true locations, one per agent."""

    values: tuple[float, ...]

    @classmethod
    def from_points(cls, points: Iterable[float]) -> "LocationVector":
        return cls(tuple(sorted(points)))

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Grid:
    """The finite range of a snapping mechanism.

    Points are generated as ``points[0] + m * spacing`` (never by repeated
    addition) so that equal positions compare equal.  ``exact_flag`` marks
    the degenerate ``delta = 0`` grid on which snapping is the identity.
    """

    points: tuple[float, ...]
    anchor: str  # "zero" or "half"
    spacing: float
    exact_flag: bool = False

    @property
    def size(self) -> int:
        return len(self.points)


def validate_instance(
    raw_intervals: Sequence[tuple[float, float]], B: float, delta: float
) -> Instance:
    """Validate raw (a, b) pairs into an Instance, preserving input order.

    Rejects an empty profile and any interval with a > b, a < 0, b > B or
    width above ``delta``; the error message names the offending agent.
    """
    if not B > 0:
        raise InvalidInstanceError(f"domain bound B must be positive, got {B}")
    if not 0 <= delta <= B:
        raise InvalidInstanceError(f"delta must lie in [0, B], got {delta}")
    if len(raw_intervals) == 0:
        raise InvalidInstanceError("empty agent list")
    # Differences like 0.9 - 0.6 overshoot their decimal value by an ulp, so
    # the bounds are enforced up to representation noise, then pinned back.
    slack = 1e-12 * max(B, 1.0)
    agents = []
    for i, (a, b) in enumerate(raw_intervals):
        if a > b:
            raise InvalidInstanceError(
                f"agent {i}: left endpoint {a} exceeds right endpoint {b}", agent=i
            )
        if a < -slack:
            raise InvalidInstanceError(
                f"agent {i}: left endpoint {a} below 0", agent=i
            )
        if b > B + slack:
            raise InvalidInstanceError(
                f"agent {i}: right endpoint {b} above B={B}", agent=i
            )
        if b - a > delta + slack:
            raise InvalidInstanceError(
                f"agent {i}: interval length {b - a} exceeds delta={delta}", agent=i
            )
        agents.append(Interval(max(float(a), 0.0), min(float(b), float(B))))
    return Instance(float(B), float(delta), tuple(agents))


def sorted_endpoints(instance: Instance) -> SortedEndpoints:
    """Sort left and right endpoints independently (stable in agent order)."""
    L = tuple(sorted(iv.a for iv in instance.agents))
    R = tuple(sorted(iv.b for iv in instance.agents))
    k = instance.n // 2
    return SortedEndpoints(L=L, R=R, k=k, M=(L[k] + R[k]) / 2.0)


def upper_median(values: Sequence[float]) -> float:
    """The (floor(n/2) + 1)-th smallest element; the unique median for odd n."""
    if len(values) == 0:
        raise ValueError("upper_median of an empty sequence")
    return sorted(values)[len(values) // 2]


def build_grid(B: float, delta: float, anchor: str = "zero") -> Grid:
    """Build the spacing-``delta/2`` grid anchored at 0 or at B/2.

    The zero grid is {0, d, 2d, ...} up to the largest multiple of d that
    fits below B; the half grid extends symmetrically from B/2 in steps of
    d in both directions.  ``delta = 0`` yields the identity grid.
    """
    if anchor not in ("zero", "half"):
        raise ValueError(f"unknown grid anchor {anchor!r}")
    if not B > 0:
        raise ValueError(f"domain bound B must be positive, got {B}")
    if not 0 <= delta <= B:
        raise ValueError(f"delta must lie in [0, B], got {delta}")
    if delta == 0:
        return Grid(points=(), anchor=anchor, spacing=0.0, exact_flag=True)
    spacing = delta / 2.0
    return _build_spaced_grid(B, spacing, anchor)


def _build_spaced_grid(B: float, spacing: float, anchor: str) -> Grid:
    # Tolerant floor: B is often an exact multiple of the spacing in decimal
    # but not in binary, so allow a 1e-9 relative overshoot and pin the last
    # point back onto B when it lands above only through rounding.
    slack = spacing * _TIE_BAND
    if anchor == "zero":
        m_max = int(math.floor(B / spacing + _TIE_BAND))
        pts = [m * spacing for m in range(m_max + 1)]
    else:
        mid = B / 2.0
        m_lo = int(math.floor(mid / spacing + _TIE_BAND))
        m_hi = int(math.floor((B - mid) / spacing + _TIE_BAND))
        pts = [mid + m * spacing for m in range(-m_lo, m_hi + 1)]
    if pts[0] < 0:
        if pts[0] < -slack:
            raise AssertionError("grid extends below 0")
        pts[0] = 0.0
    if pts[-1] > B:
        if pts[-1] > B + slack:
            raise AssertionError("grid extends above B")
        pts[-1] = B
    return Grid(points=tuple(pts), anchor=anchor, spacing=spacing, exact_flag=False)


def _snap_index(point: float, owning_interval: Interval, grid: Grid) -> int:
    """Index of the grid point nearest to ``point``.

    Near-exact ties between the two bracketing grid points are broken in
    favour of the one inside the owning interval when exactly one of them
    is, and to the left otherwise.
    """
    pts = grid.points
    if point <= pts[0]:
        return 0
    if point >= pts[-1]:
        return len(pts) - 1
    q = (point - pts[0]) / grid.spacing
    m = int(math.floor(q))
    # Guard against rounding in the division above.
    while m > 0 and pts[m] > point:
        m -= 1
    while m + 1 < len(pts) and pts[m + 1] < point:
        m += 1
    if m + 1 >= len(pts):
        return len(pts) - 1
    frac = (point - pts[m]) / grid.spacing
    if abs(frac - 0.5) <= _TIE_BAND:
        left_in = owning_interval.contains(pts[m])
        right_in = owning_interval.contains(pts[m + 1])
        if right_in and not left_in:
            return m + 1
        return m
    return m if frac < 0.5 else m + 1


def snap(point: float, owning_interval: Interval, grid: Grid) -> float:
    """Snap ``point`` to the nearest grid point (identity on exact grids)."""
    if grid.exact_flag:
        return point
    return grid.points[_snap_index(point, owning_interval, grid)]


def merged_upper_median(sorted_values: Sequence[float], extra: float) -> float:
    """Upper median of ``sorted_values`` with one extra element inserted.

    Equivalent to ``upper_median(list(sorted_values) + [extra])`` without
    re-sorting; used by deviation search where one report varies at a time.
    """
    n = len(sorted_values) + 1
    k = n // 2
    if not sorted_values:
        return extra
    idx = bisect_right(sorted_values, extra)
    if k < idx:
        return sorted_values[k]
    if k == idx:
        return extra
    return sorted_values[k - 1]
