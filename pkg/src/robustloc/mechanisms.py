"""Location mechanisms behind one uniform interface.

Five kinds share the interface: a constant mechanism that ignores reports,
the classical exact-report median and phantom-half baselines, and their
grid-snapping extensions for interval reports.  The grid mechanisms pick a
representative grid point per agent (a case analysis on how many grid
points the snapped interval covers) and aggregate representatives; with
``delta = 0`` they degrade exactly to their classical counterparts.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .core import (
    Grid,
    GridMismatchError,
    Instance,
    Interval,
    _snap_index,
    build_grid,
    upper_median,
)

__all__ = [
    "MechanismError",
    "MechanismKind",
    "MechanismOutcome",
    "MechanismSpec",
    "run_mechanism",
    "select_representative",
]


class MechanismError(ValueError):
    """A mechanism was applied to an instance it does not accept."""


class MechanismKind(Enum):
    CONSTANT = "constant"
    EXACT_MEDIAN = "exact-median"
    EXACT_PHANTOM_HALF = "exact-phantom-half"
    EQUISPACED_MEDIAN = "equispaced-median"
    EQUISPACED_PHANTOM_HALF = "equispaced-phantom-half"


@dataclass(frozen=True)
class MechanismSpec:
    """A mechanism kind with the designer's domain bound and width bound.

    The equispaced kinds require ``delta`` as designer knowledge: their
    guarantees are stated for reports no wider than it.  ``location`` is
    the constant mechanism's fixed output.
    """

    kind: MechanismKind
    B: float
    delta: float
    location: float | None = None

    def __post_init__(self):
        if self.kind is MechanismKind.CONSTANT:
            if self.location is None:
                raise MechanismError("constant mechanism needs a location")
            if not 0 <= self.location <= self.B:
                raise MechanismError(
                    f"constant location {self.location} outside [0, {self.B}]"
                )

    @property
    def name(self) -> str:
        if self.kind is MechanismKind.CONSTANT:
            return f"constant({self.location:g})"
        return self.kind.value


@dataclass(frozen=True)
class MechanismOutcome:
    """The chosen point, plus per-agent representatives for grid kinds."""

    p: float
    representatives: tuple[float, ...]
    grid: Grid | None


def select_representative(
    interval: Interval, grid: Grid, allow_wide: bool = False
) -> float:
    """The grid point standing in for an interval report.

    Snap both endpoints, then branch on how many grid points the snapped
    range [x, y] covers: one -> x; two -> x when both x and y lie inside
    the report or when a + b <= x + y, else y; three -> the middle point.
    A spacing of half the width bound guarantees at most three; wider
    coverage means the grid is finer than the reports allow and is only
    legal for attack targets (``allow_wide``), which take the left median
    of the covered points.
    """
    if grid.exact_flag:
        if not interval.is_exact:
            raise GridMismatchError(
                "identity grid cannot represent a non-degenerate interval"
            )
        return interval.a
    a, b = interval.a, interval.b
    ix = _snap_index(a, interval, grid)
    iy = _snap_index(b, interval, grid)
    count = iy - ix + 1
    pts = grid.points
    if count == 1:
        return pts[ix]
    if count == 2:
        x, y = pts[ix], pts[iy]
        if interval.contains(x) and interval.contains(y):
            return x
        return x if a + b <= x + y else y
    if count == 3:
        return pts[ix + 1]
    if allow_wide and count > 3:
        return pts[ix + (count - 1) // 2]
    raise GridMismatchError(
        f"snapped interval covers {count} grid points; spacing/width mismatch"
    )


def _median_of_three(lo: float, mid: float, hi: float) -> float:
    return sorted((lo, mid, hi))[1]


def _require_exact(instance: Instance, kind: MechanismKind) -> list[float]:
    points = []
    for i, iv in enumerate(instance.agents):
        if not iv.is_exact:
            raise MechanismError(
                f"{kind.value} accepts only exact reports; agent {i} sent an interval"
            )
        points.append(iv.a)
    return points


def run_mechanism(spec: MechanismSpec, instance: Instance) -> MechanismOutcome:
    """Apply a mechanism to a profile of reports."""
    if instance.B != spec.B:
        raise MechanismError(
            f"instance bound B={instance.B} differs from mechanism B={spec.B}"
        )
    kind = spec.kind
    if kind is MechanismKind.CONSTANT:
        return MechanismOutcome(p=spec.location, representatives=(), grid=None)
    if kind is MechanismKind.EXACT_MEDIAN:
        points = _require_exact(instance, kind)
        return MechanismOutcome(p=upper_median(points), representatives=(), grid=None)
    if kind is MechanismKind.EXACT_PHANTOM_HALF:
        points = _require_exact(instance, kind)
        p = _median_of_three(min(points), spec.B / 2.0, max(points))
        return MechanismOutcome(p=p, representatives=(), grid=None)
    # Grid kinds: the guarantee is stated for the designer's width bound,
    # so coarser instances are rejected rather than silently re-gridded.
    if instance.delta > spec.delta:
        raise MechanismError(
            f"instance delta={instance.delta} exceeds mechanism delta={spec.delta}"
        )
    if kind is MechanismKind.EQUISPACED_MEDIAN:
        grid = build_grid(spec.B, spec.delta, anchor="zero")
        reps = tuple(select_representative(iv, grid) for iv in instance.agents)
        return MechanismOutcome(p=upper_median(reps), representatives=reps, grid=grid)
    if kind is MechanismKind.EQUISPACED_PHANTOM_HALF:
        grid = build_grid(spec.B, spec.delta, anchor="half")
        reps = tuple(select_representative(iv, grid) for iv in instance.agents)
        p = _median_of_three(min(reps), spec.B / 2.0, max(reps))
        return MechanismOutcome(p=p, representatives=reps, grid=grid)
    raise MechanismError(f"unknown mechanism kind {kind!r}")
