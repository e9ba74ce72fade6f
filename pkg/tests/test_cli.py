import json

import pytest

from robustloc import random_instance, validate_instance
from robustloc.cli import (
    EXIT_OK,
    EXIT_ORACLE_SCALE,
    EXIT_VALIDATION,
    EXIT_VIOLATION,
    ExperimentConfig,
    load_instance,
    main,
    rows_to_csv,
    run_experiment,
)


def write_instance(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


@pytest.fixture
def instance_file(tmp_path):
    return write_instance(
        tmp_path / "inst.json",
        {
            "B": 1.0,
            "delta": 0.2,
            "agents": [
                {"a": 0.12, "b": 0.28},
                {"a": 0.33, "b": 0.47},
                {"a": 0.81, "b": 0.99},
            ],
        },
    )


class TestInstanceIO:
    def test_round_trip(self, tmp_path):
        path = write_instance(
            tmp_path / "one.json",
            {"B": 1.0, "delta": 0.2, "agents": [{"a": 0.12, "b": 0.28}]},
        )
        inst = load_instance(path)
        assert inst.n == 1 and inst.agents[0].a == 0.12

    def test_reversed_interval_names_agent(self, tmp_path):
        path = write_instance(
            tmp_path / "bad.json",
            {"B": 1.0, "delta": 0.2, "agents": [{"a": 0.5, "b": 0.4}]},
        )
        with pytest.raises(Exception, match="agent 0"):
            load_instance(path)

    def test_empty_agents(self, tmp_path):
        path = write_instance(
            tmp_path / "empty.json", {"B": 1.0, "delta": 0.2, "agents": []}
        )
        with pytest.raises(Exception, match="empty"):
            load_instance(path)

    def test_malformed_file(self, tmp_path):
        path = write_instance(tmp_path / "malformed.json", {"B": 1.0})
        with pytest.raises(Exception, match="malformed"):
            load_instance(path)


class TestRandomInstance:
    def test_deterministic_given_seed(self):
        a = random_instance(3, 1.0, 0.2, 7)
        b = random_instance(3, 1.0, 0.2, 7)
        assert a == b

    def test_delta_zero_degenerate(self):
        inst = random_instance(1, 1.0, 0.0, 123)
        assert inst.agents[0].is_exact

    def test_output_validates(self, rng):
        for _ in range(50):
            inst = random_instance(4, 1.0, 0.3, rng)
            rebuilt = validate_instance(
                [(iv.a, iv.b) for iv in inst.agents], 1.0, 0.3
            )
            assert rebuilt == inst


class TestRunExperiment:
    def config(self, **overrides):
        data = {
            "seed": 11,
            "trials": 2,
            "n_values": (3, 5),
            "B": 1.0,
            "delta_values": (0.1, 0.2),
            "objective": "avg",
            "mechanisms": (
                {"kind": "equispaced-median"},
                {"kind": "constant", "location": 0.5},
            ),
        }
        data.update(overrides)
        return ExperimentConfig(
            seed=data["seed"],
            trials=data["trials"],
            n_values=tuple(data["n_values"]),
            B=data["B"],
            delta_values=tuple(data["delta_values"]),
            objective=__import__("robustloc").Objective(data["objective"]),
            mechanisms=tuple(data["mechanisms"]),
            oracle_step=data.get("oracle_step"),
        )

    def test_rows_in_deterministic_order(self):
        rows = run_experiment(self.config())
        coords = [(r.trial, r.n, r.delta, r.mechanism) for r in rows]
        assert coords == sorted(coords, key=lambda c: (c[0], c[1], c[2]))
        assert len(rows) == 2 * 2 * 2 * 2

    def test_max_regret_dominates_omv(self):
        for row in run_experiment(self.config()):
            assert row.max_regret >= row.omv - 1e-12

    def test_bounds_hold_for_canonical_pairs(self):
        rows = run_experiment(self.config(trials=5))
        for row in rows:
            assert row.within_bound
        mc_rows = run_experiment(
            self.config(
                trials=5,
                objective="max",
                delta_values=(0.2, 0.5),
                mechanisms=({"kind": "equispaced-phantom-half"},),
            )
        )
        for row in mc_rows:
            assert row.within_bound
            assert row.bound == pytest.approx(0.25 + 3 * row.delta / 8)

    def test_no_proven_bound_outside_hypothesis(self):
        from robustloc.cli import theoretical_bound
        from robustloc import MechanismKind, Objective

        assert theoretical_bound(
            MechanismKind.EQUISPACED_PHANTOM_HALF, Objective.MAX_COST, 1.0, 0.8
        ) is None
        assert theoretical_bound(
            MechanismKind.EQUISPACED_MEDIAN, Objective.MAX_COST, 1.0, 0.2
        ) is None

    def test_trials_zero_rejected(self):
        with pytest.raises(Exception):
            self.config(trials=0)

    def test_csv_determinism(self):
        a = rows_to_csv(run_experiment(self.config()))
        b = rows_to_csv(run_experiment(self.config()))
        assert a == b
        assert a.splitlines()[0] == (
            "trial,n,delta,mechanism,p,max_regret,omv,gap,bound,within_bound"
        )

    def test_oracle_column_when_requested(self):
        rows = run_experiment(self.config(oracle_step=0.01, trials=1))
        text = rows_to_csv(rows, with_oracle=True)
        assert text.splitlines()[0].endswith(",oracle_omv")
        assert all(r.oracle_omv is not None for r in rows)


class TestCommandLine:
    def test_gen_solve_mechanism_audit(self, tmp_path, capsys):
        out = tmp_path / "inst.json"
        assert main(["gen", "--n", "3", "--B", "1", "--delta", "0.2",
                     "--seed", "5", "--out", str(out)]) == EXIT_OK
        assert main(["solve", "--objective", "avg", "--instance", str(out),
                     "--oracle-step", "0.01"]) == EXIT_OK
        solved = json.loads(capsys.readouterr().out)
        assert abs(solved["omv"] - solved["oracle_omv"]) <= 0.01
        assert main(["mechanism", "--kind", "equispaced-median",
                     "--instance", str(out)]) == EXIT_OK
        mech = json.loads(capsys.readouterr().out)
        assert 0 <= mech["p"] <= 1
        assert main(["audit", "--kind", "equispaced-median", "--instance",
                     str(out), "--pitch", "0.01", "--strict"]) == EXIT_OK

    def test_solve_maxcost(self, instance_file, capsys):
        assert main(["solve", "--objective", "max",
                     "--instance", instance_file]) == EXIT_OK
        solved = json.loads(capsys.readouterr().out)
        assert solved["p_opt"] == pytest.approx((0.12 + 0.28 + 0.81 + 0.99) / 4)

    def test_validation_exit_code(self, tmp_path, capsys):
        path = write_instance(
            tmp_path / "bad.json",
            {"B": 1.0, "delta": 0.2, "agents": [{"a": 0.5, "b": 0.4}]},
        )
        assert main(["solve", "--objective", "avg",
                     "--instance", str(path)]) == EXIT_VALIDATION
        assert "agent 0" in capsys.readouterr().err

    def test_audit_strict_violation_exit_code(self, tmp_path, capsys):
        assert main(["attack", "--family", "fine-grid", "--delta", "0.2",
                     "--spacing", "0.05", "--n", "3",
                     "--out", str(tmp_path / "attack.json")]) == EXIT_OK
        script = json.loads((tmp_path / "attack.json").read_text())
        inst_path = write_instance(tmp_path / "atk.json", script["instances"][0])
        code = main(["audit", "--kind", "equispaced-median", "--instance",
                     inst_path, "--spacing", "0.05", "--pitch", "0.01",
                     "--strict"])
        assert code == EXIT_VIOLATION

    def test_oracle_scale_exit_code(self, tmp_path, capsys):
        path = write_instance(
            tmp_path / "big.json",
            {
                "B": 1.0,
                "delta": 0.5,
                "agents": [{"a": 0.0, "b": 0.5}] * 5,
            },
        )
        code = main(["solve", "--objective", "avg", "--instance", str(path),
                     "--brute-step", "0.0001"])
        assert code == EXIT_ORACLE_SCALE

    def test_attack_families(self, tmp_path, capsys):
        assert main(["attack", "--family", "vwd-chain", "--delta", "0.2",
                     "--eps", "0.05", "--eps1", "0.01"]) == EXIT_OK
        chain = json.loads(capsys.readouterr().out)
        assert chain["name"] == "VwdChain"
        assert main(["attack", "--family", "finite-range", "--delta", "0.2",
                     "--g", "0.0,0.1,0.2,0.3", "--gamma", "0.002",
                     "--n", "5"]) == EXIT_OK
        ladder = json.loads(capsys.readouterr().out)
        assert ladder["name"] == "FiniteRangeAttack"
        assert main(["attack", "--family", "onto", "--delta", "0.1",
                     "--yj", "0.2", "--ell", "0.3", "--r", "0.38",
                     "--eps", "0.02", "--n", "4"]) == EXIT_OK
        onto = json.loads(capsys.readouterr().out)
        assert len(onto["instances"]) == 4

    def test_experiment_end_to_end(self, tmp_path):
        config = {
            "seed": 3,
            "trials": 2,
            "n_values": [3],
            "B": 1.0,
            "delta_values": [0.2],
            "objective": "avg",
            "mechanisms": [{"kind": "equispaced-median"}],
        }
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps(config), encoding="utf-8")
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert main(["experiment", "--config", str(cfg), "--out", str(out1)]) == EXIT_OK
        assert main(["experiment", "--config", str(cfg), "--out", str(out2)]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()
