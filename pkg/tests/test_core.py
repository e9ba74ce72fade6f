import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustloc import (
    Grid,
    Interval,
    InvalidInstanceError,
    build_grid,
    snap,
    sorted_endpoints,
    upper_median,
    validate_instance,
)
from robustloc.core import merged_upper_median


class TestValidateInstance:
    def test_accepts_valid_profile(self):
        inst = validate_instance([(0.0, 1.0), (3.0, 4.0)], B=4, delta=1)
        assert inst.n == 2
        assert inst.agents[0] == Interval(0.0, 1.0)

    def test_rejects_overlong_interval(self):
        with pytest.raises(InvalidInstanceError, match="agent 0"):
            validate_instance([(0.0, 0.5)], B=1, delta=0.2)

    def test_exact_reports_at_delta_zero(self):
        inst = validate_instance([(0.3, 0.3), (0.7, 0.7)], B=1, delta=0)
        assert all(iv.is_exact for iv in inst.agents)

    def test_rejects_empty_profile(self):
        with pytest.raises(InvalidInstanceError, match="empty"):
            validate_instance([], B=1, delta=0.1)

    def test_rejects_reversed_interval_naming_agent(self):
        with pytest.raises(InvalidInstanceError, match="agent 1") as exc:
            validate_instance([(0.1, 0.2), (0.5, 0.4)], B=1, delta=0.2)
        assert exc.value.agent == 1

    def test_rejects_out_of_domain(self):
        with pytest.raises(InvalidInstanceError, match="agent 0"):
            validate_instance([(-0.1, 0.0)], B=1, delta=0.2)
        with pytest.raises(InvalidInstanceError, match="agent 0"):
            validate_instance([(0.9, 1.1)], B=1, delta=0.3)

    def test_rejects_bad_parameters(self):
        with pytest.raises(InvalidInstanceError):
            validate_instance([(0, 0)], B=0, delta=0)
        with pytest.raises(InvalidInstanceError):
            validate_instance([(0, 0)], B=1, delta=2)

    def test_tolerates_representation_noise_in_width(self):
        # 0.9 - 0.6 overshoots 0.3 by one ulp; that is not a real violation.
        inst = validate_instance([(0.0, 0.3), (0.6, 0.9)], B=1, delta=0.3)
        assert inst.n == 2


class TestSortedEndpoints:
    def test_two_agents(self):
        inst = validate_instance([(0, 1), (3, 4)], B=4, delta=1)
        se = sorted_endpoints(inst)
        assert se.L == (0, 3) and se.R == (1, 4)
        assert se.k == 1 and se.M == 3.5

    def test_single_agent(self):
        se = sorted_endpoints(validate_instance([(0.2, 0.3)], B=1, delta=0.1))
        assert se.L == (0.2,) and se.R == (0.3,)
        assert se.k == 0 and se.M == 0.25

    def test_three_agents_sorted_independently(self):
        inst = validate_instance(
            [(0.4, 0.5), (0.9, 1.0), (0.0, 0.1)], B=1, delta=0.1
        )
        se = sorted_endpoints(inst)
        assert se.L == (0.0, 0.4, 0.9)
        assert se.R == (0.1, 0.5, 1.0)
        assert se.k == 1 and se.M == 0.45

    @given(
        st.lists(
            st.tuples(
                st.floats(0, 0.8, allow_nan=False),
                st.floats(0, 0.2, allow_nan=False),
            ),
            min_size=1,
            max_size=9,
        )
    )
    def test_endpoint_views_are_pairwise_ordered(self, raw):
        # Sorted left endpoints never overtake sorted right endpoints, and
        # their gaps stay within the width bound.
        intervals = [(a, a + w) for a, w in raw]
        inst = validate_instance(intervals, B=1.0, delta=0.2)
        se = sorted_endpoints(inst)
        for l, r in zip(se.L, se.R):
            assert l <= r + 1e-12
            assert r - l <= inst.delta + 1e-9


class TestUpperMedian:
    def test_odd(self):
        assert upper_median([0.2, 0.4, 0.9]) == 0.4

    def test_even_takes_upper(self):
        assert upper_median([0.0, 1.0]) == 1.0

    def test_singleton(self):
        assert upper_median([0.7]) == 0.7

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            upper_median([])

    @given(st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=12))
    def test_permutation_invariant_and_member(self, values):
        m = upper_median(values)
        assert m in values
        assert m == upper_median(sorted(values, reverse=True))

    @given(
        st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=12),
        st.floats(0, 1, allow_nan=False),
    )
    def test_merged_matches_full_sort(self, values, extra):
        assert merged_upper_median(sorted(values), extra) == upper_median(
            list(values) + [extra]
        )


class TestBuildGrid:
    def test_zero_anchor_example(self):
        g = build_grid(1.0, 0.2, "zero")
        assert g.size == 11
        assert g.points[0] == 0.0
        assert abs(g.points[-1] - 1.0) < 1e-12
        assert g.spacing == 0.1

    def test_half_anchor_example(self):
        g = build_grid(1.0, 0.3, "half")
        expected = [0.05, 0.20, 0.35, 0.50, 0.65, 0.80, 0.95]
        assert g.size == 7
        for got, want in zip(g.points, expected):
            assert abs(got - want) < 1e-12
        assert 0.5 in g.points

    def test_delta_zero_is_identity(self):
        g = build_grid(1.0, 0.0, "zero")
        assert g.exact_flag
        assert snap(0.123, Interval(0.123, 0.123), g) == 0.123

    @pytest.mark.parametrize("anchor", ["zero", "half"])
    @pytest.mark.parametrize("delta", [0.05, 0.1, 0.2, 0.3, 0.7])
    def test_spacing_and_point_budget(self, anchor, delta):
        B = 1.0
        g = build_grid(B, delta, anchor)
        assert g.spacing == delta / 2
        assert g.size <= math.floor(2 * B / delta) + 1
        for a, b in zip(g.points, g.points[1:]):
            assert abs((b - a) - g.spacing) < 1e-9 * g.spacing
        assert g.points[0] >= 0.0 and g.points[-1] <= B
        if anchor == "zero":
            assert g.points[0] == 0.0
        else:
            assert any(abs(p - B / 2) < 1e-12 for p in g.points)


class TestSnap:
    def setup_method(self):
        self.grid = build_grid(1.0, 0.2, "zero")

    def test_nearest(self):
        assert snap(0.12, Interval(0.12, 0.28), self.grid) == 0.1

    def test_tie_prefers_point_inside_interval(self):
        assert snap(0.15, Interval(0.15, 0.30), self.grid) == pytest.approx(0.2)

    def test_tie_with_neither_inside_breaks_left(self):
        assert snap(0.15, Interval(0.15, 0.15), self.grid) == pytest.approx(0.1)

    def test_tie_with_both_inside_breaks_left(self):
        assert snap(0.15, Interval(0.05, 0.25), self.grid) == pytest.approx(0.1)

    @given(st.floats(0, 1, allow_nan=False))
    def test_idempotent(self, p):
        iv = Interval(p, p)
        q = snap(p, iv, self.grid)
        assert snap(q, Interval(q, q), self.grid) == q

    @given(st.floats(0, 1, allow_nan=False))
    @settings(max_examples=200)
    def test_never_moves_more_than_quarter_delta(self, p):
        q = snap(p, Interval(p, p), self.grid)
        assert abs(q - p) <= 0.2 / 4 + 1e-12

    def test_outside_grid_clamps_to_extreme(self):
        g = Grid(points=(0.2, 0.3, 0.4), anchor="zero", spacing=0.1)
        assert snap(0.05, Interval(0.05, 0.05), g) == 0.2
        assert snap(0.9, Interval(0.9, 0.9), g) == 0.4
