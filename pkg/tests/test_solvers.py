"""Tests for the stochastic solvers."""

import numpy as np
import pytest

from budgetsvm.analysis.diagnostics import dual_objective
from budgetsvm.config import Algorithm, TrainConfig
from budgetsvm.data.synth import two_blobs
from budgetsvm.models import KernelSpec, SparseDataset, SparseVector, kernel_row
from budgetsvm.training import (
    MaintenanceKind,
    TrainingError,
    bsca_step,
    bsgd_step,
    create_state,
    sca_step,
    sgd_step,
    train,
)
from budgetsvm.training.solvers import run_epoch


@pytest.fixture
def blobs():
    return two_blobs(30, 2, seed=3)


def config_for(algo, **changes):
    base = TrainConfig(algo=algo, C=1.0, kernel=KernelSpec.gaussian(1.0), budget=10, epochs=3, seed=5)
    return base.with_overrides(**changes)


class TestCoordinateStep:
    """Tests for bsca_step and sca_step."""

    def test_first_step(self, blobs):
        """Test the Newton step from alpha = 0 on an empty model."""
        state = create_state(config_for(Algorithm.SCA, C=0.5), blobs)
        report = sca_step(state, blobs, 4)
        assert report.margin == 0.0
        assert report.delta == 0.5
        assert state.alpha.alpha[4] == 0.5
        assert len(state.model) == 1
        assert state.model.entries[0].beta == pytest.approx(0.5 * blobs.labels[4])
        assert state.t == 2

    def test_unclipped_step(self, blobs):
        """Test delta = (1 - y f(x)) / Q_ii when no bound is hit."""
        state = create_state(config_for(Algorithm.SCA, C=100.0), blobs)
        sca_step(state, blobs, 0)
        margin = state.model.predict_margin(blobs.examples[1])
        report = sca_step(state, blobs, 1)
        assert report.delta == pytest.approx(1.0 - blobs.labels[1] * margin)

    def test_repeat_step_is_zero(self, blobs):
        """Test that the step is optimal along its coordinate."""
        state = create_state(config_for(Algorithm.SCA, C=100.0), blobs)
        for i in range(10):
            sca_step(state, blobs, i)
        sca_step(state, blobs, 3)
        assert abs(sca_step(state, blobs, 3).delta) < 1e-12

    def test_dual_never_decreases(self, blobs):
        """Test that exact SCA steps are monotone in the dual."""
        spec = KernelSpec.gaussian(1.0)
        state = create_state(config_for(Algorithm.SCA, C=2.0), blobs)
        previous = 0.0
        rng = np.random.default_rng(0)
        for i in rng.integers(0, blobs.n, size=60):
            sca_step(state, blobs, int(i))
            current = dual_objective(state.alpha, blobs, spec)
            assert current >= previous - 1e-12
            previous = current

    def test_box_constraint(self, blobs):
        """Test 0 <= alpha <= C after many steps."""
        state = create_state(config_for(Algorithm.BSCA, C=0.3), blobs)
        for _ in range(3):
            run_epoch(state, blobs, bsca_step)
        assert state.alpha.in_box()

    def test_sca_rejects_budget(self, blobs):
        """Test exact SCA refuses a bounded model."""
        state = create_state(config_for(Algorithm.BSCA), blobs)
        with pytest.raises(TrainingError):
            sca_step(state, blobs, 0)

    def test_budget_respected(self, blobs):
        """Test BSCA keeps at most B entries between steps."""
        state = create_state(config_for(Algorithm.BSCA, budget=5), blobs)
        for i in range(blobs.n):
            bsca_step(state, blobs, i)
            assert len(state.model) <= 5
        assert state.counters.maintenance_events > 0

    def test_inactive_budget_matches_exact(self, blobs):
        """Test BSCA with B >= n reproduces SCA bit for bit."""
        budgeted = create_state(config_for(Algorithm.BSCA, budget=blobs.n), blobs)
        exact = create_state(config_for(Algorithm.SCA), blobs)
        for _ in range(3):
            run_epoch(budgeted, blobs, bsca_step)
            run_epoch(exact, blobs, sca_step)
        np.testing.assert_array_equal(budgeted.alpha.alpha, exact.alpha.alpha)
        np.testing.assert_array_equal(budgeted.model.betas(), exact.model.betas())

    def test_duplicated_rows_share_entries(self):
        """Test repeated rows coalesce, so B equal to the distinct count never maintains."""
        distinct = [(0.0, 1.0), (1.0, -0.5), (-1.0, 0.0)]
        labels = [1.0, -1.0, 1.0]
        rows = [SparseVector.from_dense(np.array(distinct[k % 3])) for k in range(12)]
        ds = SparseDataset.from_vectors(rows, [labels[k % 3] for k in range(12)])
        budgeted = create_state(config_for(Algorithm.BSCA, budget=3, seed=1), ds)
        exact = create_state(config_for(Algorithm.SCA, seed=1), ds)
        for _ in range(3):
            run_epoch(budgeted, ds, bsca_step)
            run_epoch(exact, ds, sca_step)
        assert budgeted.counters.maintenance_events == 0
        assert len(budgeted.model) <= 3
        np.testing.assert_array_equal(budgeted.alpha.alpha, exact.alpha.alpha)
        np.testing.assert_array_equal(budgeted.model.betas(), exact.model.betas())


class TestGradientStep:
    """Tests for bsgd_step and sgd_step."""

    def test_first_step(self, blobs):
        """Test t = 1 always violates and adds nC y phi(x)."""
        state = create_state(config_for(Algorithm.SGD, C=0.5), blobs)
        report = sgd_step(state, blobs, 2)
        assert report.violated
        assert report.delta == pytest.approx(blobs.n * 0.5)
        assert state.model.effective_coefficients()[0] == pytest.approx(blobs.n * 0.5 * blobs.labels[2])

    def test_dual_coefficients_represent_model(self, blobs):
        """Test the model equals sum_i alpha_i y_i phi(x_i) with alpha = nC v / t."""
        state = create_state(config_for(Algorithm.SGD, C=0.1), blobs)
        for _ in range(2):
            run_epoch(state, blobs, sgd_step)
        coef = state.alpha.values() * blobs.labels
        for x in blobs.examples[:5]:
            expected = float(coef @ kernel_row(state.model.spec, x, blobs.examples))
            assert state.model.predict_margin(x) == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_violation_counts(self, blobs):
        """Test counts track violations."""
        state = create_state(config_for(Algorithm.SGD), blobs)
        run_epoch(state, blobs, sgd_step)
        assert state.alpha.alpha.sum() == state.counters.violations

    def test_sgd_rejects_budget(self, blobs):
        """Test exact SGD refuses a bounded model."""
        state = create_state(config_for(Algorithm.BSGD), blobs)
        with pytest.raises(TrainingError):
            sgd_step(state, blobs, 0)

    def test_bsgd_budget_respected(self, blobs):
        """Test BSGD keeps at most B entries."""
        state = create_state(config_for(Algorithm.BSGD, budget=4), blobs)
        run_epoch(state, blobs, bsgd_step)
        assert len(state.model) <= 4


class TestTrain:
    """Tests for the train driver."""

    def test_records_per_log_interval(self, blobs):
        """Test one record every log_every epochs."""
        result = train(config_for(Algorithm.BSCA, epochs=4, log_every=2), blobs, blobs)
        assert [r.epoch for r in result.records] == [2, 4]

    def test_final_epoch_always_recorded(self, blobs):
        """Test the last epoch gets a record when log_every does not divide epochs."""
        result = train(config_for(Algorithm.BSCA, epochs=5, log_every=2), blobs, blobs)
        assert [r.epoch for r in result.records] == [2, 4, 5]
        sparse = train(config_for(Algorithm.BSCA, epochs=3, log_every=10), blobs, blobs)
        assert [r.epoch for r in sparse.records] == [3]

    def test_progress_reports_degradation(self, blobs):
        """Test the accumulated weight degradation goes to the progress log."""
        messages = []
        train(config_for(Algorithm.BSCA, budget=4, epochs=1), blobs, blobs, progress_callback=messages.append)
        assert len(messages) == 1
        assert " wd=" in messages[0]

    def test_fractions_cover_log_window(self, blobs):
        """Test fractions count every step since the previous record."""
        maintained = []
        result = train(
            config_for(Algorithm.BSCA, budget=5, epochs=2, log_every=2),
            blobs,
            blobs,
            observer=lambda state, report: maintained.append(report.maintenance is not None),
        )
        assert len(maintained) == 2 * blobs.n
        assert result.records[0].merge_fraction == pytest.approx(sum(maintained) / (2 * blobs.n))

    def test_determinism(self, blobs):
        """Test identical configs give identical records and models."""
        config = config_for(Algorithm.BSCA, wall_time=False)
        first = train(config, blobs, blobs)
        second = train(config, blobs, blobs)
        assert first.records == second.records
        np.testing.assert_array_equal(first.model.betas(), second.model.betas())
        assert all(r.wall_time_s == 0.0 for r in first.records)

    def test_seed_changes_run(self, blobs):
        """Test that a different seed gives a different trajectory."""
        a = train(config_for(Algorithm.SCA, wall_time=False), blobs, blobs)
        b = train(config_for(Algorithm.SCA, wall_time=False, seed=6), blobs, blobs)
        assert not np.array_equal(a.state.alpha.alpha, b.state.alpha.alpha)

    def test_record_fields(self, blobs):
        """Test record bookkeeping for a budgeted run."""
        result = train(config_for(Algorithm.BSCA, budget=5), blobs, blobs)
        for record in result.records:
            assert record.sv_count <= 5
            assert 0.0 <= record.merge_fraction <= 1.0
            assert 0.0 <= record.test_accuracy <= 1.0
            assert record.nonzero_step_fraction >= record.merge_fraction

    def test_exact_sca_has_no_merges(self, blobs):
        """Test that exact solvers never maintain the budget."""
        result = train(config_for(Algorithm.SCA), blobs, blobs)
        assert all(r.merge_fraction == 0.0 for r in result.records)

    def test_progress_and_observer(self, blobs):
        """Test the callbacks fire once per record and once per step."""
        messages, steps = [], []
        train(
            config_for(Algorithm.BSGD, epochs=2),
            blobs,
            blobs,
            progress_callback=messages.append,
            observer=lambda state, report: steps.append(report.index),
        )
        assert len(messages) == 2
        assert len(steps) == 2 * blobs.n

    def test_keep_events(self, blobs):
        """Test maintenance events are collected on request."""
        result = train(config_for(Algorithm.BSCA, budget=4), blobs, blobs, keep_events=True)
        assert result.maintenance_events
        assert all(e.step >= 1 for e in result.maintenance_events)

    def test_removal_maintenance(self, blobs):
        """Test the removal-only strategy."""
        result = train(config_for(Algorithm.BSGD, budget=4, maintenance="remove"), blobs, blobs, keep_events=True)
        assert result.maintenance_events
        assert all(e.kind is MaintenanceKind.REMOVE for e in result.maintenance_events)

    def test_learns_blobs(self):
        """Test exact SCA separates two blobs about as well as the Bayes rule."""
        train_ds = two_blobs(150, 2, seed=1)
        test_ds = two_blobs(300, 2, seed=2)
        config = TrainConfig(algo=Algorithm.SCA, C=1.0, kernel=KernelSpec.gaussian(1.0), epochs=5, seed=1)
        result = train(config, train_ds, test_ds)
        assert result.records[-1].test_accuracy > 0.7
