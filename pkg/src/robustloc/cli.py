"""Command-line front end: instance I/O, seeded generation, experiments.

Instances travel as flat JSON objects ``{"B": ..., "delta": ...,
"agents": [{"a": ..., "b": ...}, ...]}``.  Experiments compare mechanism
outputs against the matching minimax optimum over seeded random instances
and emit CSV rows in a fixed deterministic order; randomness comes from
numpy's PCG64 so identical seeds reproduce byte-identical output anywhere.

Exit codes: 0 success, 2 validation or usage error, 3 audit found a
violation (``audit --strict``), 4 oracle scale exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import Instance, InvalidInstanceError, validate_instance
from .dominance import (
    DeviationGrid,
    GridAttackTarget,
    check_minimax_dominance,
    gen_fine_grid_attack,
    gen_finite_range_attack,
    gen_onto_attack,
    gen_vwd_chain,
)
from .mechanisms import (
    MechanismError,
    MechanismKind,
    MechanismSpec,
    run_mechanism,
)
from .optimal import grid_search_minimax, solve_minimax_avgcost, solve_minimax_maxcost
from .regret import (
    Objective,
    OracleScaleError,
    avgcost_max_regret,
    brute_force_max_regret,
    maxcost_max_regret,
)

__all__ = [
    "ExperimentConfig",
    "ExperimentRow",
    "load_instance",
    "main",
    "random_instance",
    "rows_to_csv",
    "run_experiment",
    "theoretical_bound",
]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VIOLATION = 3
EXIT_ORACLE_SCALE = 4

_BOUND_TOL = 1e-9


def load_instance(path: str | Path) -> Instance:
    """Read and validate an instance JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        raw = [(entry["a"], entry["b"]) for entry in data["agents"]]
        return validate_instance(raw, B=data["B"], delta=data["delta"])
    except (KeyError, TypeError) as exc:
        raise InvalidInstanceError(f"malformed instance file {path}: {exc}") from exc


def instance_to_json(instance: Instance) -> dict:
    return {
        "B": instance.B,
        "delta": instance.delta,
        "agents": [{"a": iv.a, "b": iv.b} for iv in instance.agents],
    }


def random_instance(n: int, B: float, delta: float, rng_state) -> Instance:
    """Draw an instance: width uniform in [0, delta], left end uniform in
    [0, B - width].  ``rng_state`` is a numpy Generator or an integer seed
    for PCG64 (documented so seeds reproduce across implementations)."""
    if n < 1:
        raise InvalidInstanceError(f"need at least one agent, got n={n}")
    rng = (
        rng_state
        if isinstance(rng_state, np.random.Generator)
        else np.random.Generator(np.random.PCG64(rng_state))
    )
    raw = []
    for _ in range(n):
        w = rng.uniform(0.0, delta) if delta > 0 else 0.0
        a = rng.uniform(0.0, B - w)
        raw.append((a, a + w))
    return validate_instance(raw, B=B, delta=delta)


@dataclass(frozen=True)
class ExperimentConfig:
    """A seeded sweep over (trial, n, delta, mechanism) combinations."""

    seed: int
    trials: int
    n_values: tuple[int, ...]
    B: float
    delta_values: tuple[float, ...]
    objective: Objective
    mechanisms: tuple[dict, ...]
    oracle_step: float | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidInstanceError(f"trials must be >= 1, got {self.trials}")
        if any(d > self.B for d in self.delta_values):
            raise InvalidInstanceError("every delta must be <= B")

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        try:
            return cls(
                seed=int(data["seed"]),
                trials=int(data["trials"]),
                n_values=tuple(int(v) for v in data["n_values"]),
                B=float(data["B"]),
                delta_values=tuple(float(v) for v in data["delta_values"]),
                objective=Objective(data["objective"]),
                mechanisms=tuple(data["mechanisms"]),
                oracle_step=(
                    float(data["oracle_step"]) if data.get("oracle_step") else None
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInstanceError(f"malformed experiment config: {exc}") from exc


@dataclass(frozen=True)
class ExperimentRow:
    trial: int
    n: int
    delta: float
    mechanism: str
    p: float
    max_regret: float
    omv: float
    gap: float
    bound: float | None
    within_bound: bool
    oracle_omv: float | None = None


def theoretical_bound(
    kind: MechanismKind, objective: Objective, B: float, delta: float
) -> float | None:
    """Additive guarantee for the mechanism under the objective, if proven."""
    if kind is MechanismKind.CONSTANT:
        return B / 2.0
    if objective is Objective.AVG_COST:
        if kind is MechanismKind.EQUISPACED_MEDIAN:
            return 3.0 * delta / 4.0
        if kind is MechanismKind.EXACT_MEDIAN:
            return 0.0
    else:
        if kind is MechanismKind.EQUISPACED_PHANTOM_HALF:
            # Guarantee stated only for delta <= 2B/3.
            return B / 4.0 + 3.0 * delta / 8.0 if delta <= 2.0 * B / 3.0 else None
        if kind is MechanismKind.EXACT_PHANTOM_HALF:
            return B / 4.0
    return None


def _mechanism_spec(descriptor: dict, B: float, delta: float) -> MechanismSpec:
    kind = MechanismKind(descriptor["kind"])
    location = descriptor.get("location")
    if kind is MechanismKind.CONSTANT and location is None:
        location = B / 2.0
    return MechanismSpec(kind=kind, B=B, delta=delta, location=location)


def run_experiment(config: ExperimentConfig) -> list[ExperimentRow]:
    """Evaluate every configured mechanism against the minimax optimum.

    Rows come out in (trial, n, delta, mechanism) order.  Each row draws
    its instance from a generator seeded by (seed, trial, n-index,
    delta-index), so trials could run in parallel without changing output.
    """
    rows = []
    solve = (
        solve_minimax_avgcost
        if config.objective is Objective.AVG_COST
        else solve_minimax_maxcost
    )
    evaluate = (
        avgcost_max_regret
        if config.objective is Objective.AVG_COST
        else maxcost_max_regret
    )
    for trial in range(config.trials):
        for ni, n in enumerate(config.n_values):
            for di, delta in enumerate(config.delta_values):
                seq = np.random.SeedSequence([config.seed, trial, ni, di])
                rng = np.random.Generator(np.random.PCG64(seq))
                instance = random_instance(n, config.B, delta, rng)
                solved = solve(instance)
                oracle_omv = None
                if config.oracle_step is not None:
                    oracle_omv = grid_search_minimax(
                        instance, config.objective, config.oracle_step
                    ).omv
                for descriptor in config.mechanisms:
                    try:
                        spec = _mechanism_spec(descriptor, config.B, delta)
                        outcome = run_mechanism(spec, instance)
                    except MechanismError as exc:
                        raise MechanismError(
                            f"trial={trial} n={n} delta={delta} "
                            f"mechanism={descriptor}: {exc}"
                        ) from exc
                    max_regret = evaluate(instance, outcome.p).value
                    gap = max_regret - solved.omv
                    bound = theoretical_bound(
                        spec.kind, config.objective, config.B, delta
                    )
                    within = bound is None or gap <= bound + _BOUND_TOL
                    rows.append(
                        ExperimentRow(
                            trial=trial,
                            n=n,
                            delta=delta,
                            mechanism=spec.name,
                            p=outcome.p,
                            max_regret=max_regret,
                            omv=solved.omv,
                            gap=gap,
                            bound=bound,
                            within_bound=within,
                            oracle_omv=oracle_omv,
                        )
                    )
    return rows


def _fmt(x: float | None) -> str:
    # 12 significant digits, '.' separator, locale-free.
    return "" if x is None else f"{x:.12g}"


def rows_to_csv(rows: Sequence[ExperimentRow], with_oracle: bool = False) -> str:
    header = "trial,n,delta,mechanism,p,max_regret,omv,gap,bound,within_bound"
    if with_oracle:
        header += ",oracle_omv"
    lines = [header]
    for r in rows:
        cells = [
            str(r.trial),
            str(r.n),
            _fmt(r.delta),
            r.mechanism,
            _fmt(r.p),
            _fmt(r.max_regret),
            _fmt(r.omv),
            _fmt(r.gap),
            _fmt(r.bound),
            "true" if r.within_bound else "false",
        ]
        if with_oracle:
            cells.append(_fmt(r.oracle_omv))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _emit(data, out: str | None) -> None:
    text = json.dumps(data, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    objective = Objective.AVG_COST if args.objective == "avg" else Objective.MAX_COST
    solved = (
        solve_minimax_avgcost(instance)
        if objective is Objective.AVG_COST
        else solve_minimax_maxcost(instance)
    )
    result = {
        "objective": objective.value,
        "p_opt": solved.p_opt,
        "omv": solved.omv,
        "obj1": solved.certificate.obj1,
        "obj2": solved.certificate.obj2,
    }
    if args.oracle_step:
        oracle = grid_search_minimax(instance, objective, args.oracle_step)
        result["oracle_p"] = oracle.p_opt
        result["oracle_omv"] = oracle.omv
        result["oracle_agreement"] = abs(oracle.omv - solved.omv)
    if args.brute_step:
        result["brute_force_max_regret_at_p_opt"] = brute_force_max_regret(
            instance, solved.p_opt, objective, args.brute_step
        )
    _emit(result, args.out)
    return EXIT_OK


def _make_target(args, instance: Instance):
    if args.spacing is not None:
        return GridAttackTarget(B=instance.B, delta=instance.delta, spacing=args.spacing)
    kind = MechanismKind(args.kind)
    location = args.location
    if kind is MechanismKind.CONSTANT and location is None:
        location = instance.B / 2.0
    return MechanismSpec(
        kind=kind, B=instance.B, delta=instance.delta, location=location
    )


def _cmd_mechanism(args) -> int:
    instance = load_instance(args.instance)
    target = _make_target(args, instance)
    outcome = (
        target.run(instance)
        if isinstance(target, GridAttackTarget)
        else run_mechanism(target, instance)
    )
    _emit(
        {
            "mechanism": target.name,
            "p": outcome.p,
            "representatives": list(outcome.representatives),
        },
        args.out,
    )
    return EXIT_OK


def _cmd_audit(args) -> int:
    instance = load_instance(args.instance)
    target = _make_target(args, instance)
    grid = DeviationGrid(endpoint_pitch=args.pitch) if args.pitch else None
    agents = [args.agent] if args.agent is not None else list(range(instance.n))
    reports = []
    any_violation = False
    for agent in agents:
        rep = check_minimax_dominance(
            target, instance, agent, grid=grid, tolerance=args.tolerance
        )
        any_violation = any_violation or rep.violated
        reports.append(
            {
                "agent": rep.agent,
                "truthful_regret": rep.truthful_regret,
                "best_deviation": (
                    [rep.best_deviation.a, rep.best_deviation.b]
                    if rep.best_deviation
                    else None
                ),
                "best_deviation_regret": rep.best_deviation_regret,
                "gain": rep.gain,
                "violated": rep.violated,
            }
        )
    _emit({"mechanism": target.name, "reports": reports}, args.out)
    if any_violation and args.strict:
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_attack(args) -> int:
    if args.family == "vwd-chain":
        script = gen_vwd_chain(args.B, args.delta, args.eps, args.eps1, n=args.n)
    elif args.family == "finite-range":
        if args.g is None:
            raise InvalidInstanceError("finite-range attack needs --g g1,g2,g3,g4")
        g = tuple(float(v) for v in args.g.split(","))
        script = gen_finite_range_attack(
            g, args.gamma, args.n, args.case, args.B, args.delta
        )
    elif args.family == "onto":
        script = gen_onto_attack(
            args.yj, args.ell, args.r, args.eps, args.n, args.B, args.delta
        )
    else:
        script = gen_fine_grid_attack(args.B, args.delta, args.spacing, n=args.n)
    _emit(
        {
            "name": script.name,
            "expected_property": script.expected_property,
            "params": {k: list(v) if isinstance(v, tuple) else v
                       for k, v in script.params.items()},
            "instances": [instance_to_json(inst) for inst in script.instances],
        },
        args.out,
    )
    return EXIT_OK


def _cmd_experiment(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        config = ExperimentConfig.from_json(json.load(fh))
    rows = run_experiment(config)
    csv_text = rows_to_csv(rows, with_oracle=config.oracle_step is not None)
    Path(args.out).write_text(csv_text, encoding="utf-8")
    return EXIT_OK


def _cmd_gen(args) -> int:
    instance = random_instance(args.n, args.B, args.delta, args.seed)
    _emit(instance_to_json(instance), args.out)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustloc",
        description="Minimax-regret facility location for interval reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute the minimax-optimal location")
    p.add_argument("--objective", choices=["avg", "max"], required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--oracle-step", type=float, dest="oracle_step")
    p.add_argument("--brute-step", type=float, dest="brute_step")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_solve)

    kinds = [k.value for k in MechanismKind]
    p = sub.add_parser("mechanism", help="run a mechanism on an instance")
    p.add_argument("--kind", choices=kinds, required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--location", type=float, help="constant mechanism output")
    p.add_argument("--spacing", type=float,
                   help="override: audit-style grid-median with this spacing")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_mechanism)

    p = sub.add_parser("audit", help="deviation search for minimax dominance")
    p.add_argument("--kind", choices=kinds, required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--pitch", type=float)
    p.add_argument("--agent", type=int)
    p.add_argument("--location", type=float)
    p.add_argument("--spacing", type=float,
                   help="audit a grid-median attack target with this spacing")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--strict", action="store_true",
                   help="exit 3 when a violation is found")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("attack", help="emit an adversarial instance family")
    p.add_argument("--family", required=True,
                   choices=["vwd-chain", "finite-range", "onto", "fine-grid"])
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--eps", type=float)
    p.add_argument("--eps1", type=float)
    p.add_argument("--g", help="four comma-separated grid points")
    p.add_argument("--gamma", type=float)
    p.add_argument("--case", choices=["one", "two"], default="one")
    p.add_argument("--yj", type=float)
    p.add_argument("--ell", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--spacing", type=float)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("experiment", help="run a seeded experiment batch")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("gen", help="generate a seeded random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OracleScaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE_SCALE
    except (InvalidInstanceError, MechanismError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
