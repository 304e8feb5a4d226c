"""Gate classification, truth-table measurement, and ensemble mining."""

import numpy as np
import pytest

from mycosim import ElectrodeAssignment, RcParams, build_rc_network, make_graph
from mycosim.errors import GateMinerError
from mycosim.gates import (
    GROUP_COLUMNS,
    GateClass,
    GateHistogram,
    TruthTableOutcome,
    classify,
    default_thresholds,
    group_of,
    measure_truth_table,
    mine,
    trend_summary,
)


def outcome(r01, r10, r11, amplitude=0.06):
    return TruthTableOutcome(responses=(0.0, r01, r10, r11), amplitude=amplitude)


class TestClassify:
    @pytest.mark.parametrize(
        "responses,expected",
        [
            ((0.01, 0.01, 0.01), GateClass.FALSE),
            ((0.01, 0.01, 0.05), GateClass.AND),
            ((0.01, 0.05, 0.01), GateClass.AND_NOT_B),
            ((0.05, 0.01, 0.01), GateClass.AND_NOT_A),
            ((0.01, 0.05, 0.05), GateClass.SELECT_A),
            ((0.05, 0.01, 0.05), GateClass.SELECT_B),
            ((0.05, 0.05, 0.01), GateClass.XOR),
            ((0.05, 0.05, 0.05), GateClass.OR),
        ],
    )
    def test_every_reachable_class(self, responses, expected):
        assert classify(outcome(*responses), 0.03) is expected

    def test_threshold_is_strict(self):
        # a response sitting exactly on theta reads as 0
        assert classify(outcome(0.03, 0.01, 0.05), 0.03) is GateClass.AND

    def test_rejects_nonpositive_theta(self):
        with pytest.raises(GateMinerError):
            classify(outcome(0.01, 0.01, 0.01), 0.0)
        with pytest.raises(GateMinerError):
            classify(outcome(0.01, 0.01, 0.01), -0.01)

    def test_groups_cover_all_classes(self):
        for gate in GateClass:
            assert group_of(gate) in GROUP_COLUMNS
        assert group_of(GateClass.AND_NOT_A) == "ANDNOT"
        assert group_of(GateClass.AND_NOT_B) == "ANDNOT"
        assert group_of(GateClass.SELECT_A) == "SELECT"
        assert group_of(GateClass.SELECT_B) == "SELECT"


class TestDefaultThresholds:
    def test_sweep_shape(self):
        thetas = default_thresholds()
        assert thetas.size == 500
        assert thetas[0] == pytest.approx(1e-4)
        assert thetas[-1] == pytest.approx(0.05)
        np.testing.assert_allclose(np.diff(thetas), 1e-4)


class TestOutcomeValidation:
    def test_quiet_row_must_be_exact_zero(self):
        with pytest.raises(GateMinerError):
            TruthTableOutcome(responses=(1e-15, 0.0, 0.0, 0.0), amplitude=0.06)

    def test_rejects_negative_or_excessive_responses(self):
        with pytest.raises(GateMinerError):
            outcome(-0.001, 0.0, 0.0)
        with pytest.raises(GateMinerError):
            outcome(0.0, 0.07, 0.0)
        with pytest.raises(GateMinerError):
            outcome(0.0, 0.0, float("nan"))

    def test_accepts_full_rail(self):
        out = outcome(0.06, 0.06, 0.06)
        assert out.responses[3] == 0.06


class TestElectrodeAssignment:
    def test_rejects_shared_nodes(self):
        with pytest.raises(GateMinerError):
            ElectrodeAssignment(input_a=1, input_b=1, ground=2, output=3)
        with pytest.raises(GateMinerError):
            ElectrodeAssignment(input_a=1, input_b=2, ground=3, output=3)


class TestMeasureTruthTable:
    def test_star_responses_match_hand_analysis(self, star_netlist, star_assignment):
        out = measure_truth_table(star_netlist, star_assignment)
        # one driven arm: 1k into two parallel idle... no, the idle arms
        # carry no DC current, so the center sits at the half divider
        # formed by the driven arm and the ground arm: 0.03 V. Both arms
        # driven: 0.5k source side vs 1k ground side -> 0.04 V.
        assert out.responses[0] == 0.0
        assert out.responses[1] == pytest.approx(0.03, abs=1e-12)
        assert out.responses[2] == pytest.approx(0.03, abs=1e-12)
        assert out.responses[3] == pytest.approx(0.04, abs=1e-12)
        assert out.amplitude == pytest.approx(0.06)

    def test_star_class_depends_on_threshold(self, star_netlist, star_assignment):
        out = measure_truth_table(star_netlist, star_assignment)
        assert classify(out, 0.02) is GateClass.OR
        assert classify(out, 0.035) is GateClass.AND
        assert classify(out, 0.045) is GateClass.FALSE

    def test_grounded_midpoint_selects_one_input(self):
        # chain 1-2-3-4 with ground at 2 and output at 3: a drive at 1
        # is cut off by the grounded node, a drive at 4 is not, so the
        # output follows exactly one input.
        graph = make_graph(
            {1: (0, 0, 0), 2: (100, 0, 0), 3: (200, 0, 0), 4: (300, 0, 0)},
            [(1, 2), (2, 3), (3, 4)],
        )
        net = build_rc_network(graph, RcParams(gmin=0.0))
        follows_b = measure_truth_table(
            net, ElectrodeAssignment(input_a=1, input_b=4, ground=2, output=3)
        )
        assert follows_b.responses == pytest.approx((0.0, 0.03, 0.0, 0.03), abs=1e-12)
        assert classify(follows_b, 0.02) is GateClass.SELECT_B

        follows_a = measure_truth_table(
            net, ElectrodeAssignment(input_a=4, input_b=1, ground=2, output=3)
        )
        assert follows_a.responses == pytest.approx((0.0, 0.0, 0.03, 0.03), abs=1e-12)
        assert classify(follows_a, 0.02) is GateClass.SELECT_A


class TestGateHistogram:
    def histogram(self, **meta):
        thetas = np.array([0.1, 0.25])
        counts = np.array([[1, 0, 0, 0, 0, 2], [0, 0, 0, 0, 0, 3]], dtype=np.int64)
        return GateHistogram(thresholds=thetas, counts=counts, metadata=meta)

    def test_to_csv_layout(self):
        hist = self.histogram(trials=3, failures=[])
        assert hist.to_csv() == (
            "theta,AND,OR,ANDNOT,SELECT,XOR,FALSE\n"
            "0.1000,1,0,0,0,0,2\n"
            "0.2500,0,0,0,0,0,3\n"
        )

    def test_column_accessor(self):
        hist = self.histogram()
        np.testing.assert_array_equal(hist.column("AND"), [1, 0])
        np.testing.assert_array_equal(hist.column("FALSE"), [2, 3])

    def test_rejects_bad_shape(self):
        with pytest.raises(GateMinerError):
            GateHistogram(
                thresholds=np.array([0.1, 0.2]),
                counts=np.zeros((3, 6), dtype=np.int64),
                metadata={},
            )

    def test_rejects_negative_counts(self):
        counts = np.zeros((2, 6), dtype=np.int64)
        counts[0, 0] = -1
        with pytest.raises(GateMinerError):
            GateHistogram(
                thresholds=np.array([0.1, 0.2]), counts=counts, metadata={}
            )

    def test_rejects_rows_that_disagree_with_trial_count(self):
        thetas = np.array([0.1, 0.25])
        counts = np.array([[1, 0, 0, 0, 0, 2], [0, 0, 0, 0, 0, 2]], dtype=np.int64)
        with pytest.raises(GateMinerError):
            GateHistogram(
                thresholds=thetas,
                counts=counts,
                metadata={"trials": 3, "failures": []},
            )


class TestMine:
    def test_reruns_are_identical(self, small_colony):
        a = mine(small_colony, RcParams(), trials=12, seed=3)
        b = mine(small_colony, RcParams(), trials=12, seed=3)
        np.testing.assert_array_equal(a.counts, b.counts)
        assert a.metadata == b.metadata

    def test_job_split_does_not_change_counts(self, small_colony):
        solo = mine(small_colony, RcParams(), trials=12, seed=3)
        split = mine(small_colony, RcParams(), trials=12, seed=3, jobs=2)
        np.testing.assert_array_equal(solo.counts, split.counts)
        assert solo.metadata == split.metadata

    def test_captured_outcomes(self, small_colony):
        hist = mine(
            small_colony, RcParams(), trials=12, seed=3, capture_outcomes=True
        )
        assert hist.outcomes is not None
        assert hist.outcomes.shape == (12, 4)
        done = ~np.isnan(hist.outcomes[:, 0])
        assert done.sum() == 12 - len(hist.metadata["failures"])
        assert np.all(hist.outcomes[done, 0] == 0.0)
        assert np.all(hist.outcomes[done] <= 0.06 + 1e-9)
        assert np.all(hist.outcomes[done] >= 0.0)

    def test_outcomes_absent_by_default(self, small_colony):
        assert mine(small_colony, RcParams(), trials=2, seed=0).outcomes is None

    def test_metadata_shape(self, small_colony):
        hist = mine(small_colony, RcParams(), trials=4, seed=9)
        assert hist.metadata["seed"] == 9
        assert hist.metadata["trials"] == 4
        assert hist.metadata["topology"] == "parallel"
        assert hist.metadata["failures"] == []

    def test_aggregate_counts_shrink_with_threshold(self, small_colony):
        hist = mine(small_colony, RcParams(), trials=20, seed=1)
        nonfalse = hist.counts[:, :-1].sum(axis=1)
        assert np.all(np.diff(nonfalse) <= 0)

    def test_rejects_bad_arguments(self, small_colony):
        with pytest.raises(GateMinerError):
            mine(small_colony, RcParams(), trials=0)
        with pytest.raises(GateMinerError):
            mine(small_colony, RcParams(), trials=1, jobs=0)
        with pytest.raises(GateMinerError):
            mine(
                small_colony,
                RcParams(),
                trials=1,
                thresholds=np.array([0.2, 0.1]),
            )
        with pytest.raises(GateMinerError):
            mine(
                small_colony,
                RcParams(),
                trials=1,
                thresholds=np.array([0.0, 0.1]),
            )

    def test_needs_four_electrode_sites(self):
        pair = make_graph({1: (0, 0, 0), 2: (50, 0, 0)}, [(1, 2)])
        with pytest.raises(GateMinerError, match="need at least 4"):
            mine(pair, RcParams(), trials=1)


class TestTrendSummary:
    def test_recovers_inverse_power_law(self):
        thetas = default_thresholds()
        counts = np.zeros((thetas.size, len(GROUP_COLUMNS)), dtype=np.int64)
        counts[:, 0] = np.round(10.0 / thetas).astype(np.int64)
        hist = GateHistogram(thresholds=thetas, counts=counts, metadata={})
        slope = trend_summary(hist)["nonfalse_loglog_slope"]
        assert slope == pytest.approx(-1.0, abs=0.01)

    def test_extinction_and_peak_semantics(self):
        thetas = np.array([0.1, 0.2, 0.3])
        counts = np.zeros((3, 6), dtype=np.int64)
        counts[:, 0] = [2, 1, 0]
        counts[:, 1] = [1, 0, 0]
        counts[:, 3] = [1, 1, 1]
        summary = trend_summary(
            GateHistogram(thresholds=thetas, counts=counts, metadata={})
        )
        groups = summary["groups"]
        assert groups["AND"] == {
            "theta_extinction": 0.3,
            "theta_argmax": 0.1,
            "count_max": 2,
        }
        assert groups["OR"]["theta_extinction"] == 0.2
        assert groups["XOR"]["theta_extinction"] == 0.1
        assert groups["XOR"]["count_max"] == 0
        assert groups["SELECT"]["theta_extinction"] is None
        assert "FALSE" not in groups

    def test_slope_none_when_everything_is_false(self):
        thetas = np.array([0.1, 0.2])
        counts = np.zeros((2, 6), dtype=np.int64)
        counts[:, 5] = 4
        summary = trend_summary(
            GateHistogram(thresholds=thetas, counts=counts, metadata={})
        )
        assert summary["nonfalse_loglog_slope"] is None
