import numpy as np
import pytest

from robustloc import random_instance

ACCEPTANCE_LABELS = {
    "test_1_avgcost_formula_matches_oracle": "1 avgCost closed form vs brute-force oracle",
    "test_2_avgcost_solver_matches_grid_search": "2 avgCost solver vs grid-search oracle",
    "test_3_maxcost_closed_form": "3 maxCost closed form and oracle agreement",
    "test_4_equispaced_median_gap_bound": "4 equispaced-median additive gap bound",
    "test_5_equispaced_phantom_half_gap_bound": "5 equispaced-phantom-half additive gap bound",
    "test_6_dominance_audit": "6 minimax-dominance audit (clean + attack target)",
    "test_7_lower_bound_demonstrations": "7 lower-bound gap demonstrations",
    "test_8_exact_report_degeneration": "8 degeneration to classical mechanisms",
    "test_9_regret_sandwich": "9 regret growth sandwich around the optimum",
    "test_10_experiment_csv_determinism": "10 byte-identical experiment CSVs",
}


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(987654321))


def make_instances(seed, count, n_choices, delta_choices, B=1.0):
    """Deterministic instance suite cycling through (n, delta) combinations."""
    gen = np.random.Generator(np.random.PCG64(seed))
    combos = [(n, d) for n in n_choices for d in delta_choices]
    out = []
    for i in range(count):
        n, delta = combos[i % len(combos)]
        out.append(random_instance(n, B, delta, gen))
    return out


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    reports = []
    for status in ("passed", "failed", "error"):
        reports.extend(terminalreporter.stats.get(status, []))
    lines = {}
    for rep in reports:
        if getattr(rep, "when", "call") != "call":
            continue
        name = rep.nodeid.split("::")[-1]
        if name in ACCEPTANCE_LABELS:
            lines[name] = (ACCEPTANCE_LABELS[name], rep.outcome)
    if lines:
        terminalreporter.section("acceptance criteria")
        for name in ACCEPTANCE_LABELS:
            if name in lines:
                label, outcome = lines[name]
                verdict = "PASS" if outcome == "passed" else "FAIL"
                terminalreporter.write_line(f"criterion {label}: {verdict}")
