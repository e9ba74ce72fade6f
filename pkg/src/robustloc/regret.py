"""Max-regret evaluators for the average-cost and maximum-cost objectives.

For a point p and an instance of interval reports, the maximum regret of p
is the worst, over all realizations of true locations consistent with the
reports, of the objective value at p minus the best achievable objective
value for that realization.  Both objectives admit closed forms built from
the sorted endpoint views:

* average cost splits into a component driven by realizations whose upper
  median lies right of p (``obj1``, fed by right endpoints) and one driven
  by realizations whose upper median lies left of p (``obj2``, fed by left
  endpoints), each clamped at zero;
* maximum cost reduces to ``(R_1 + R_n)/2 - p`` against ``p - (L_1 + L_n)/2``.

A brute-force oracle that enumerates discretized realizations and
recomputes regret from first principles is included for cross-validation;
it never sees the closed formulas.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .core import Instance, Interval, LocationVector, SortedEndpoints, sorted_endpoints

__all__ = [
    "ORACLE_CAP",
    "Objective",
    "OracleScaleError",
    "RegretEvaluation",
    "agent_max_regret",
    "avgcost_max_regret",
    "brute_force_max_regret",
    "brute_force_max_regret_batch",
    "maxcost_max_regret",
    "regret_of",
]

# Refuse brute-force enumerations beyond this many realization vectors
# rather than silently subsampling.
ORACLE_CAP = 10_000_000

_CHUNK_ROWS = 1 << 18


class Objective(Enum):
    AVG_COST = "avg"
    MAX_COST = "max"


class OracleScaleError(RuntimeError):
    """The brute-force enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class RegretEvaluation:
    """Max regret at ``p`` split into its right-side and left-side parts."""

    p: float
    value: float
    obj1: float
    obj2: float


def regret_of(
    instance: Instance,
    realization: LocationVector | Sequence[float],
    p: float,
    objective: Objective,
) -> float:
    """Regret of p against one realization, from first principles.

    Average cost compares the mean distance at p with the mean distance at
    the realization's own median (any median attains the minimum); maximum
    cost compares the farthest distance at p with half the realization's
    range.
    """
    values = (
        realization.values
        if isinstance(realization, LocationVector)
        else tuple(sorted(realization))
    )
    if len(values) != instance.n:
        raise ValueError(
            f"realization has {len(values)} entries for {instance.n} agents"
        )
    if objective is Objective.AVG_COST:
        med = values[len(values) // 2]
        cost_p = sum(abs(v - p) for v in values)
        cost_opt = sum(abs(v - med) for v in values)
        return max(0.0, (cost_p - cost_opt) / len(values))
    cost_p = max(abs(v - p) for v in values)
    cost_opt = (values[-1] - values[0]) / 2.0
    return max(0.0, cost_p - cost_opt)


class _AvgCostEvaluator:
    """Closed-form average-cost max regret with O(log n) point queries.

    obj1(p) = (1/n) (2 sum_{i=j..k} (R_i - p) + (n - 2k)(R_{k+1} - p)) with
    j the smallest index <= k such that R_j > p, and obj2(p) mirrored on
    the left endpoints with coefficient 2(k+1) - n.  The coefficients agree
    (= 1) for odd n; for even n they differ because the upper-median
    convention is asymmetric, and both are validated against the
    brute-force oracle.
    """

    def __init__(self, se: SortedEndpoints):
        self.se = se
        n = se.n
        k = se.k
        self.n = n
        self.k = k
        self.c1 = n - 2 * k
        self.c2 = 2 * (k + 1) - n
        # Suffix sums of R over sorted positions 0..k-1, prefix sums of L
        # over sorted positions k+1..n-1 (the only ranges the formulas read).
        self._pref_R = [0.0]
        for v in se.R:
            self._pref_R.append(self._pref_R[-1] + v)
        self._pref_L = [0.0]
        for v in se.L:
            self._pref_L.append(self._pref_L[-1] + v)

    def components(self, p: float) -> tuple[float, float]:
        se, n, k = self.se, self.n, self.k
        j0 = bisect_right(se.R, p, 0, k)
        x = k - j0
        s1 = self._pref_R[k] - self._pref_R[j0]
        term1 = 2.0 * (s1 - x * p) + self.c1 * (se.R[k] - p)
        h0 = bisect_left(se.L, p, k + 1, n)
        y = h0 - (k + 1)
        s2 = self._pref_L[h0] - self._pref_L[k + 1]
        term2 = 2.0 * (y * p - s2) + self.c2 * (p - se.L[k])
        return max(0.0, term1 / n), max(0.0, term2 / n)

    def value(self, p: float) -> float:
        o1, o2 = self.components(p)
        return max(o1, o2)


def avgcost_max_regret(instance: Instance, p: float) -> RegretEvaluation:
    """Closed-form max regret of p for the average-cost objective."""
    ev = _AvgCostEvaluator(sorted_endpoints(instance))
    o1, o2 = ev.components(p)
    return RegretEvaluation(p=p, value=max(o1, o2), obj1=o1, obj2=o2)


def maxcost_max_regret(instance: Instance, p: float) -> RegretEvaluation:
    """Closed-form max regret of p for the maximum-cost objective."""
    se = sorted_endpoints(instance)
    o1 = max(0.0, (se.R[0] + se.R[-1]) / 2.0 - p)
    o2 = max(0.0, p - (se.L[0] + se.L[-1]) / 2.0)
    return RegretEvaluation(p=p, value=max(o1, o2), obj1=o1, obj2=o2)


def _interval_lattice(interval: Interval, step: float) -> np.ndarray:
    """Discretize [a, b] at pitch ``step`` with both endpoints included."""
    a, b = interval.a, interval.b
    if b <= a:
        return np.array([a])
    m = int(math.floor((b - a) / step + 1e-9))
    pts = a + step * np.arange(m + 1)
    if b - pts[-1] > step * 1e-9:
        pts = np.append(pts, b)
    else:
        pts[-1] = b
    return pts


def brute_force_max_regret_batch(
    instance: Instance,
    ps: Sequence[float],
    objective: Objective,
    step: float,
    cap: int = ORACLE_CAP,
) -> list[float]:
    """Enumerate discretized realizations once and evaluate several p.

    The product lattice is walked in fixed mixed-radix order, so results
    are deterministic; realizations are processed in chunks to bound
    memory.  Raises :class:`OracleScaleError` when the enumeration would
    exceed ``cap`` vectors.
    """
    if step <= 0:
        raise ValueError(f"oracle step must be positive, got {step}")
    lattices = [_interval_lattice(iv, step) for iv in instance.agents]
    sizes = [len(l) for l in lattices]
    total = math.prod(sizes)
    if total > cap:
        raise OracleScaleError(
            f"oracle scale exceeded: {total} realization vectors > cap {cap}"
        )
    n = instance.n
    m = n // 2
    p_arr = np.asarray(ps, dtype=float)
    best = np.full(len(p_arr), -math.inf)

    strides = [1] * n
    for i in range(n - 2, -1, -1):
        strides[i] = strides[i + 1] * sizes[i + 1]

    for start in range(0, total, _CHUNK_ROWS):
        stop = min(start + _CHUNK_ROWS, total)
        idx = np.arange(start, stop)
        mat = np.empty((stop - start, n))
        for col in range(n):
            mat[:, col] = lattices[col][(idx // strides[col]) % sizes[col]]
        srt = np.sort(mat, axis=1)
        if objective is Objective.AVG_COST:
            # min_q sum |v - q| = (sum of upper half) - (sum of lower half)
            opt = srt[:, n - m :].sum(axis=1) - srt[:, :m].sum(axis=1)
            for pi, p in enumerate(p_arr):
                cost = np.abs(mat - p).sum(axis=1)
                best[pi] = max(best[pi], float((cost - opt).max()) / n)
        else:
            opt = (srt[:, -1] - srt[:, 0]) / 2.0
            for pi, p in enumerate(p_arr):
                cost = np.abs(mat - p).max(axis=1)
                best[pi] = max(best[pi], float((cost - opt).max()))
    return [max(0.0, v) for v in best]


def brute_force_max_regret(
    instance: Instance,
    p: float,
    objective: Objective,
    step: float,
    cap: int = ORACLE_CAP,
) -> float:
    """Max regret of p by enumeration over discretized realizations."""
    return brute_force_max_regret_batch(instance, [p], objective, step, cap=cap)[0]


def agent_max_regret(
    outcome: float,
    best_responses: Mapping[float, float],
    interval: Interval,
    endpoint_shortcut: bool = True,
    sample_step: float | None = None,
) -> float:
    """Worst-case regret of one agent for an outcome, given her interval.

    With the endpoint shortcut (valid whenever exact reports are very
    weakly dominant in the mechanism), only the interval endpoints matter:
    ``best_responses`` must map each endpoint to the outcome the mechanism
    yields when the agent reports it exactly.  Without it, true locations
    are sampled at ``sample_step`` inside the interval and the inner best
    response is taken over every outcome in ``best_responses``.
    """
    if endpoint_shortcut:
        try:
            p_a = best_responses[interval.a]
            p_b = best_responses[interval.b]
        except KeyError as exc:
            raise ValueError(
                f"missing endpoint response for report at {exc.args[0]}"
            ) from exc
        return max(
            0.0,
            abs(interval.a - outcome) - abs(interval.a - p_a),
            abs(interval.b - outcome) - abs(interval.b - p_b),
        )
    if sample_step is None or sample_step <= 0:
        raise ValueError("grid fallback requires a positive sample_step")
    if not best_responses:
        raise ValueError("grid fallback requires a non-empty response map")
    outs = np.fromiter(best_responses.values(), dtype=float)
    locs = _interval_lattice(interval, sample_step)
    inner = np.abs(locs[:, None] - outs[None, :]).min(axis=1)
    return max(0.0, float((np.abs(locs - outcome) - inner).max()))
