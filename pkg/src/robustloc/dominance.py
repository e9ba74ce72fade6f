"""Empirical auditing of dominance properties plus adversarial generators.

The audit is a falsifier, not a verifier: for one agent it enumerates every
deviation interval with endpoints on a finite grid (degenerate reports
included) and compares the agent's worst-case regret under each deviation
with the truthful one.  A clean report certifies no violation on the tested
grid, not dominance over the continuum.

The agent's worst-case regret minimizes over her own alternative behaviour,
including randomized behaviour; since her cost is linear in the mixing
weights, that inner minimum is attained at a pure report, so searching pure
deviations loses nothing.

The generators transcribe the profile families used by the impossibility
arguments: the chained-overlap walk that forces very-weakly-dominant
mechanisms to be constant, the finite-range ladders, the onto-mechanism
four-profile trap, and a wide-interval family that breaks grid mechanisms
whose spacing is finer than half the width bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    Grid,
    Instance,
    Interval,
    build_grid,
    merged_upper_median,
    upper_median,
    validate_instance,
    _build_spaced_grid,
)
from .mechanisms import (
    MechanismError,
    MechanismKind,
    MechanismOutcome,
    MechanismSpec,
    select_representative,
)
from .regret import agent_max_regret

__all__ = [
    "AdversarialScript",
    "DeviationGrid",
    "DominanceReport",
    "GridAttackTarget",
    "check_minimax_dominance",
    "check_very_weak_dominance_exact",
    "gen_fine_grid_attack",
    "gen_finite_range_attack",
    "gen_onto_attack",
    "gen_vwd_chain",
]


@dataclass(frozen=True)
class DeviationGrid:
    """Finite proxy for the agent's report space.

    Candidate report endpoints are all multiples of ``endpoint_pitch`` in
    [0, B], every grid point of the audited mechanism, and the agent's own
    true endpoints (the truthful report must be a candidate).
    """

    endpoint_pitch: float

    def candidate_endpoints(
        self, B: float, extra: Sequence[float] = ()
    ) -> tuple[float, ...]:
        if self.endpoint_pitch <= 0:
            raise ValueError("deviation pitch must be positive")
        m = int(math.floor(B / self.endpoint_pitch + 1e-9))
        pts = {i * self.endpoint_pitch for i in range(m + 1)}
        pts.add(B)
        pts.update(x for x in extra if 0.0 <= x <= B)
        return tuple(sorted(pts))


@dataclass(frozen=True)
class DominanceReport:
    """Outcome of deviation search for one agent."""

    agent: int
    truthful_regret: float
    best_deviation: Interval | None
    best_deviation_regret: float
    gain: float
    violated: bool


@dataclass(frozen=True)
class AdversarialScript:
    """An ordered family of instances plus the property it probes."""

    name: str
    instances: tuple[Instance, ...]
    expected_property: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class GridAttackTarget:
    """A grid-median mechanism with configurable spacing.

    Behaves exactly like the equispaced median when ``spacing = delta/2``;
    finer spacings make reports cover more than three grid points, where
    the representative falls back to the left median of the covered points.
    Offered as an audit target only: no dominance guarantee is claimed for
    spacings below ``delta/2``.
    """

    B: float
    delta: float
    spacing: float

    @property
    def name(self) -> str:
        return f"grid-median(spacing={self.spacing:g})"

    def grid(self) -> Grid:
        return _build_spaced_grid(self.B, self.spacing, anchor="zero")

    def run(self, instance: Instance) -> MechanismOutcome:
        if instance.delta > self.delta:
            raise MechanismError(
                f"instance delta={instance.delta} exceeds target delta={self.delta}"
            )
        grid = self.grid()
        reps = tuple(
            select_representative(iv, grid, allow_wide=True)
            for iv in instance.agents
        )
        return MechanismOutcome(p=upper_median(reps), representatives=reps, grid=grid)


class _OutcomeOracle:
    """Fast outcomes when only one agent's report varies.

    For grid mechanisms the other agents' representatives never change, so
    each deviation costs one representative selection plus a merged-median
    (or min/max) lookup instead of a full mechanism run.
    """

    def __init__(self, target: MechanismSpec | GridAttackTarget, instance: Instance, agent: int):
        self.target = target
        self.instance = instance
        self.agent = agent
        self.B = target.B
        others = [iv for i, iv in enumerate(instance.agents) if i != agent]
        if isinstance(target, GridAttackTarget):
            self._mode = "median"
            self._grid = target.grid()
            self._allow_wide = True
            self._others = sorted(
                select_representative(iv, self._grid, allow_wide=True) for iv in others
            )
        elif target.kind is MechanismKind.CONSTANT:
            self._mode = "constant"
            self._grid = None
        elif target.kind in (MechanismKind.EXACT_MEDIAN, MechanismKind.EXACT_PHANTOM_HALF):
            self._mode = (
                "median" if target.kind is MechanismKind.EXACT_MEDIAN else "phantom"
            )
            self._grid = None
            self._allow_wide = False
            for iv in others:
                if not iv.is_exact:
                    raise MechanismError(
                        f"{target.kind.value} accepts only exact reports"
                    )
            self._others = sorted(iv.a for iv in others)
        else:
            anchor = "zero" if target.kind is MechanismKind.EQUISPACED_MEDIAN else "half"
            if instance.delta > target.delta:
                raise MechanismError(
                    f"instance delta={instance.delta} exceeds mechanism delta={target.delta}"
                )
            self._mode = (
                "median" if target.kind is MechanismKind.EQUISPACED_MEDIAN else "phantom"
            )
            self._grid = build_grid(target.B, target.delta, anchor=anchor)
            self._allow_wide = False
            self._others = sorted(
                select_representative(iv, self._grid) for iv in others
            )

    def grid_points(self) -> tuple[float, ...]:
        return self._grid.points if self._grid is not None else ()

    def exact_only(self) -> bool:
        return isinstance(self.target, MechanismSpec) and self.target.kind in (
            MechanismKind.EXACT_MEDIAN,
            MechanismKind.EXACT_PHANTOM_HALF,
        )

    def _representative(self, report: Interval) -> float:
        if self._grid is None or self._grid.exact_flag:
            if not report.is_exact:
                raise MechanismError("exact mechanism got an interval report")
            return report.a
        return select_representative(report, self._grid, allow_wide=self._allow_wide)

    def outcome(self, report: Interval) -> float:
        if self._mode == "constant":
            return self.target.location
        rep = self._representative(report)
        if self._mode == "median":
            return merged_upper_median(self._others, rep)
        lo = min(self._others[0], rep) if self._others else rep
        hi = max(self._others[-1], rep) if self._others else rep
        return sorted((lo, self.B / 2.0, hi))[1]


#: Mechanism families for which exact reports are very weakly dominant, so
#: the endpoint shortcut for an agent's worst-case regret is valid.
_SHORTCUT_OK = (MechanismSpec, GridAttackTarget)


def _enumerate_deviations(
    endpoints: Sequence[float], max_width: float, exact_only: bool
):
    if exact_only:
        for e in endpoints:
            yield Interval(e, e)
        return
    for i, a in enumerate(endpoints):
        for b in endpoints[i:]:
            if b - a > max_width + 1e-12:
                break
            yield Interval(a, b)


def check_minimax_dominance(
    target: MechanismSpec | GridAttackTarget,
    instance: Instance,
    agent: int,
    grid: DeviationGrid | None = None,
    tolerance: float = 1e-9,
    endpoint_shortcut: bool | None = None,
) -> DominanceReport:
    """Search for a report that beats truth-telling in worst-case regret.

    Enumerates every deviation interval with endpoints on the deviation
    grid, in lexicographic order (ties kept on the first minimum, so the
    reported best deviation is the lexicographically smallest).  The
    endpoint shortcut is used for the built-in mechanism families; pass
    ``endpoint_shortcut=False`` to force the sampled-location fallback.
    """
    if not 0 <= agent < instance.n:
        raise ValueError(f"agent index {agent} out of range")
    if grid is None:
        pitch = instance.delta / 20.0 if instance.delta > 0 else instance.B / 20.0
        grid = DeviationGrid(endpoint_pitch=pitch)
    oracle = _OutcomeOracle(target, instance, agent)
    own = instance.agents[agent]
    endpoints = grid.candidate_endpoints(
        target.B, tuple(oracle.grid_points()) + (own.a, own.b)
    )
    if own.a not in endpoints or own.b not in endpoints:
        raise ValueError(
            "deviation grid does not contain the agent's own endpoints"
        )
    if endpoint_shortcut is None:
        endpoint_shortcut = isinstance(target, _SHORTCUT_OK)

    responses: dict[float, float] = {}
    if endpoint_shortcut:
        responses[own.a] = oracle.outcome(Interval(own.a, own.a))
        responses[own.b] = oracle.outcome(Interval(own.b, own.b))
        sample_step = None
    else:
        for e in endpoints:
            responses[e] = oracle.outcome(Interval(e, e))
        sample_step = grid.endpoint_pitch

    def regret_at(p: float) -> float:
        return agent_max_regret(
            p, responses, own,
            endpoint_shortcut=endpoint_shortcut, sample_step=sample_step,
        )

    truthful_regret = regret_at(oracle.outcome(own))
    best_dev = None
    best_regret = math.inf
    for dev in _enumerate_deviations(endpoints, instance.delta, oracle.exact_only()):
        r = regret_at(oracle.outcome(dev))
        if r < best_regret:
            best_regret = r
            best_dev = dev
    gain = truthful_regret - best_regret
    return DominanceReport(
        agent=agent,
        truthful_regret=truthful_regret,
        best_deviation=best_dev,
        best_deviation_regret=best_regret,
        gain=gain,
        violated=gain > tolerance,
    )


def check_very_weak_dominance_exact(
    target: MechanismSpec | GridAttackTarget,
    points: Sequence[float],
    agent: int,
    grid: DeviationGrid | None = None,
    tolerance: float = 1e-12,
) -> DominanceReport:
    """Check whether, under exact reports, some deviation strictly helps.

    The agent's true location is her reported point; a violation is a
    deviation whose outcome is strictly closer to it.  Only degenerate
    deviations are searched: every reachable outcome of the built-in
    mechanisms is already reached by one.
    """
    instance = validate_instance([(p, p) for p in points], B=target.B, delta=target.delta)
    if not 0 <= agent < instance.n:
        raise ValueError(f"agent index {agent} out of range")
    if grid is None:
        pitch = target.delta / 20.0 if target.delta > 0 else target.B / 20.0
        grid = DeviationGrid(endpoint_pitch=pitch)
    oracle = _OutcomeOracle(target, instance, agent)
    loc = points[agent]
    endpoints = grid.candidate_endpoints(
        target.B, tuple(oracle.grid_points()) + (loc,)
    )
    truthful_cost = abs(loc - oracle.outcome(Interval(loc, loc)))
    best_dev = None
    best_cost = math.inf
    for e in endpoints:
        c = abs(loc - oracle.outcome(Interval(e, e)))
        if c < best_cost:
            best_cost = c
            best_dev = Interval(e, e)
    gain = truthful_cost - best_cost
    return DominanceReport(
        agent=agent,
        truthful_regret=truthful_cost,
        best_deviation=best_dev,
        best_deviation_regret=best_cost,
        gain=gain,
        violated=gain > tolerance,
    )


def gen_vwd_chain(
    B: float, delta: float, eps: float, eps1: float, n: int = 3
) -> AdversarialScript:
    """Chained-overlap walk from all-agents-at-[0, eps] to all-at-[B-eps1, B].

    Consecutive instances differ in exactly one agent's report, and the old
    and new reports always overlap in more than one point, which pins the
    output of any very-weakly-dominant mechanism across the whole chain.
    """
    if not (0 < eps1 < eps < delta <= B):
        raise ValueError(
            f"need 0 < eps1 < eps < delta <= B, got eps1={eps1}, eps={eps}, "
            f"delta={delta}, B={B}"
        )
    if n < 1:
        raise ValueError("need at least one agent")
    walk = [(0.0, eps)]
    prev_b = eps
    i = 1
    while True:
        b_i = eps + i * (delta - eps1)
        if b_i >= B:
            walk.append((prev_b - eps1, B))
            break
        walk.append((prev_b - eps1, b_i))
        prev_b = b_i
        i += 1
    if walk[-1] != (B - eps1, B):
        walk.append((B - eps1, B))

    instances = []
    reports = [(0.0, eps)] * n
    instances.append(validate_instance(reports, B, delta))
    for a in range(n):
        for step in walk[1:]:
            reports = list(reports)
            reports[a] = step
            instances.append(validate_instance(reports, B, delta))
    return AdversarialScript(
        name="VwdChain",
        instances=tuple(instances),
        expected_property=(
            "a very-weakly-dominant mechanism outputs one fixed point on "
            "every instance of the chain, so it pays full-range regret at "
            "one of the two extreme profiles"
        ),
        params={"B": B, "delta": delta, "eps": eps, "eps1": eps1, "n": n},
    )


def gen_finite_range_attack(
    g: Sequence[float],
    gamma: float,
    n: int,
    case: str,
    B: float,
    delta: float,
) -> AdversarialScript:
    """Widening ladders against finite-range mechanisms.

    Case one starts with k+1 exact reports at g1 and the rest at g2, then
    widens the g1 reporters one at a time to [g1, g2 - gamma]; case two
    mirrors it, widening the g2 reporters to [g1 + gamma, g2].  A pinned
    outcome along the ladder forces a regret gap near half the gap between
    g1 and g2 on the final instance.
    """
    if len(g) != 4 or not all(g[i] < g[i + 1] for i in range(3)):
        raise ValueError("g must be four strictly increasing grid points")
    if case not in ("one", "two"):
        raise ValueError(f"case must be 'one' or 'two', got {case!r}")
    g1, g2 = g[0], g[1]
    if not 0 < gamma < min((g2 - g1) / 2.0, delta / 2.0):
        raise ValueError(
            f"need 0 < gamma < min((g2-g1)/2, delta/2), got gamma={gamma}"
        )
    if g2 - g1 - gamma > delta:
        raise ValueError("widened report would exceed the width bound")
    if n < 2:
        raise ValueError("need at least two agents")
    k = n // 2
    low = [(g1, g1)] * (k + 1)
    high = [(g2, g2)] * (n - k - 1)
    instances = [validate_instance(low + high, B, delta)]
    if case == "one":
        wide = (g1, g2 - gamma)
        for c in range(1, k + 2):
            reports = [wide] * c + low[c:] + high
            instances.append(validate_instance(reports, B, delta))
        pinned = g1
    else:
        wide = (g1 + gamma, g2)
        for c in range(1, n - k):
            reports = low + high[: n - k - 1 - c] + [wide] * c
            instances.append(validate_instance(reports, B, delta))
        pinned = g2
    return AdversarialScript(
        name="FiniteRangeAttack",
        instances=tuple(instances),
        expected_property=(
            f"a minimax-dominant finite-range mechanism keeps its output at "
            f"{pinned} along the ladder, while the optimum drifts toward the "
            f"widened reports"
        ),
        params={
            "g": tuple(g), "gamma": gamma, "n": n, "case": case,
            "B": B, "delta": delta,
        },
    )


def gen_onto_attack(
    y_j: float,
    ell: float,
    r: float,
    eps: float,
    n: int,
    B: float,
    delta: float,
) -> AdversarialScript:
    """Four-profile trap for anonymous onto mechanisms.

    The base profile places one agent on the interval [ell, r] and another
    at z = (ell + r)/2 - eps; the three comparison profiles move the
    interval agent to its endpoints and the z agent to the mirror point
    2z - ell.  A mechanism that behaves like a fixed-point median on exact
    reports ends up rewarding the z agent's deviation.
    """
    if not (y_j < ell < r):
        raise ValueError(f"need y_j < ell < r, got {y_j}, {ell}, {r}")
    if not r - ell < delta:
        raise ValueError(f"need r - ell < delta, got width {r - ell}")
    if not 0 < eps < (r - ell) / 2.0:
        raise ValueError(f"need 0 < eps < (r - ell)/2, got eps={eps}")
    if n < 3:
        raise ValueError("need at least three agents")
    z = (ell + r) / 2.0 - eps
    j = n // 2
    prefix = [(y_j, y_j)] * (n - j - 1)
    suffix = [(B, B)] * (j - 1)
    base = prefix + [(ell, r), (z, z)] + suffix
    agent_a = len(prefix)
    agent_b = agent_a + 1
    l0 = validate_instance(base, B, delta)
    l1 = l0.replace_agent(agent_a, Interval(ell, ell))
    l2 = l0.replace_agent(agent_a, Interval(r, r))
    l3 = l0.replace_agent(agent_b, Interval(2 * z - ell, 2 * z - ell))
    return AdversarialScript(
        name="OntoAttack",
        instances=(l0, l1, l2, l3),
        expected_property=(
            "an anonymous, minimax-dominant, onto mechanism must output "
            "(ell + z)/2 on the base profile yet z once the z agent reports "
            "2z - ell, so the z agent gains by deviating"
        ),
        params={
            "y_j": y_j, "ell": ell, "r": r, "eps": eps, "z": z, "n": n,
            "B": B, "delta": delta, "agent_a": agent_a, "agent_b": agent_b,
        },
    )


def gen_fine_grid_attack(
    B: float, delta: float, spacing: float, n: int = 3
) -> AdversarialScript:
    """Wide-interval family breaking grid medians spaced below delta/2.

    One agent's report covers four grid points; its left-median
    representative sits a full grid step left of the report's midpoint,
    and the remaining agents pin the output on that representative.
    Deviating to the grid point nearest the midpoint strictly lowers the
    agent's worst-case regret by roughly one grid step.
    """
    if not 0 < spacing < delta / 2.0:
        raise ValueError(
            f"attack needs 0 < spacing < delta/2, got spacing={spacing}, delta={delta}"
        )
    if n < 3 or n % 2 == 0:
        raise ValueError("need an odd number of agents, at least three")
    if B < 6 * spacing:
        raise ValueError("domain too short for the construction")
    s = spacing
    g1, g2 = s * 1e-3, 2e-3 * s
    m = int(round(0.4 * B / s))
    x = m * s
    a = x + 0.5 * s - g1
    b = min(x + 3.5 * s - g2, a + delta)
    if b < x + 2.5 * s:
        raise ValueError("width bound too tight for a four-point cover")
    far = s * int(math.floor(0.9 * B / s))
    if far <= b:
        raise ValueError("domain too short for the pinning agents")
    k = n // 2
    reports = [(0.0, 0.0)] * k + [(a, b)] + [(far, far)] * k
    instance = validate_instance(reports, B, delta)
    return AdversarialScript(
        name="FineGridAttack",
        instances=(instance,),
        expected_property=(
            f"the grid-median target with spacing {s:g} lets agent {k} gain "
            f"about one grid step of worst-case regret by reporting the "
            f"grid point nearest its interval midpoint"
        ),
        params={
            "B": B, "delta": delta, "spacing": s, "n": n, "wide_agent": k,
        },
    )
