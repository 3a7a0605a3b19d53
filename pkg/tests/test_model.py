import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rulemix import (
    Dataset,
    IntervalCondition,
    LinearSubmodel,
    Pool,
    Rule,
    SolutionCandidate,
    fit_rule,
    mixed_predictions,
    predict_mixed,
    solution_residuals,
)
from rulemix.model import RulePredictionTable

from conftest import linear_dataset


def ridge_oracle(X, y, lam):
    """Normal-equation ridge with an unpenalized intercept via column
    augmentation: solves (Xa' Xa + lam*I~) beta = Xa' y with I~[0,0] = 0."""
    n, d = X.shape
    Xa = np.column_stack([np.ones(n), X])
    penalty = lam * np.eye(d + 1)
    penalty[0, 0] = 0.0
    beta = np.linalg.solve(Xa.T @ Xa + penalty, Xa.T @ y)
    return beta[1:], beta[0]


def make_rule(lower, upper, coef, intercept, experience=10, error=0.0, fitness=0.0):
    return Rule(
        IntervalCondition(lower, upper),
        LinearSubmodel(np.asarray(coef, dtype=float), intercept),
        experience,
        error,
        fitness,
    )


class TestDataset:
    def test_bounds_observed_from_features(self):
        data = Dataset([[0.0, 5.0], [2.0, -1.0], [1.0, 3.0]], [1.0, 2.0, 3.0])
        assert np.array_equal(data.feature_bounds, [[0.0, 2.0], [-1.0, 5.0]])

    def test_rejects_non_finite_features(self):
        with pytest.raises(ValueError, match="non-finite"):
            Dataset([[np.nan], [1.0]], [0.0, 1.0])

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            Dataset([[1.0], [2.0]], [1.0])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Dataset(np.empty((0, 1)), np.empty(0))


class TestMatches:
    def test_boundary_point_is_matched(self):
        cond = IntervalCondition([0.0, 0.0], [1.0, 1.0])
        assert cond.matches([1.0, 0.0])

    def test_point_just_outside_upper(self):
        cond = IntervalCondition([0.0], [1.0])
        assert not cond.matches([1.0000001])

    def test_interior_point(self):
        cond = IntervalCondition([-1.0], [1.0])
        assert cond.matches([0.0])

    def test_dimension_mismatch(self):
        cond = IntervalCondition([0.0], [1.0])
        with pytest.raises(ValueError):
            cond.matches([0.0, 0.0])

    def test_invalid_bounds_rejected(self):
        with pytest.raises(ValueError):
            IntervalCondition([1.0], [0.0])

    @given(
        st.lists(st.floats(-10, 10), min_size=1, max_size=4),
        st.data(),
    )
    def test_widening_never_unmatches(self, point, data):
        d = len(point)
        low = [data.draw(st.floats(-10, 10)) for _ in range(d)]
        high = [max(l, data.draw(st.floats(-10, 10))) for l in low]
        cond = IntervalCondition(low, high)
        grow_low = [data.draw(st.floats(0, 5)) for _ in range(d)]
        grow_high = [data.draw(st.floats(0, 5)) for _ in range(d)]
        wider = IntervalCondition(
            np.asarray(low) - grow_low, np.asarray(high) + grow_high
        )
        if cond.matches(point):
            assert wider.matches(point)

    def test_match_mask_agrees_with_matches(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(-2, 2, size=(50, 3))
        cond = IntervalCondition([-1.0, -0.5, 0.0], [1.0, 0.5, 2.0])
        mask = cond.match_mask(X)
        assert mask.tolist() == [cond.matches(row) for row in X]


class TestFitRule:
    def test_exact_line_through_two_points(self):
        data = Dataset([[0.0], [1.0]], [0.0, 2.0])
        rule = fit_rule(IntervalCondition([0.0], [1.0]), data, 0.0)
        assert rule.experience == 2
        assert rule.submodel.coefficients == pytest.approx([2.0], abs=1e-12)
        assert rule.submodel.intercept == pytest.approx(0.0, abs=1e-12)
        assert rule.in_sample_error == pytest.approx(0.0, abs=1e-24)

    def test_empty_match_is_degenerate(self):
        data = Dataset([[0.0], [1.0]], [0.0, 2.0])
        rule = fit_rule(IntervalCondition([5.0], [6.0]), data, 0.0)
        assert rule.is_degenerate
        assert rule.experience == 0
        assert rule.in_sample_error == np.inf
        assert rule.fitness == 0.0

    def test_matches_normal_equation_oracle(self):
        rng = np.random.default_rng(42)
        X = rng.normal(size=(20, 3))
        y = rng.normal(size=20)
        data = Dataset(X, y)
        cond = IntervalCondition(data.feature_bounds[:, 0], data.feature_bounds[:, 1])
        rule = fit_rule(cond, data, 0.1)
        coef, intercept = ridge_oracle(X, y, 0.1)
        assert rule.experience == 20
        np.testing.assert_allclose(rule.submodel.coefficients, coef, atol=1e-8)
        assert rule.submodel.intercept == pytest.approx(intercept, abs=1e-8)

    def test_zero_lambda_reproduces_ols(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(30, 2))
        y = 3 * X[:, 0] - X[:, 1] + rng.normal(size=30)
        data = Dataset(X, y)
        cond = IntervalCondition(data.feature_bounds[:, 0], data.feature_bounds[:, 1])
        rule = fit_rule(cond, data, 0.0)
        coef, intercept = ridge_oracle(X, y, 0.0)
        np.testing.assert_allclose(rule.submodel.coefficients, coef, atol=1e-8)
        assert rule.submodel.intercept == pytest.approx(intercept, abs=1e-8)

    def test_larger_lambda_never_grows_coefficient_norm(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(25, 3))
        y = rng.normal(size=25)
        data = Dataset(X, y)
        cond = IntervalCondition(data.feature_bounds[:, 0], data.feature_bounds[:, 1])
        norms = [
            np.linalg.norm(fit_rule(cond, data, lam).submodel.coefficients)
            for lam in (0.0, 0.01, 0.1, 1.0, 10.0, 100.0)
        ]
        assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))

    def test_negative_lambda_rejected(self):
        data = Dataset([[0.0], [1.0]], [0.0, 2.0])
        with pytest.raises(ValueError):
            fit_rule(IntervalCondition([0.0], [1.0]), data, -1.0)

    def test_experience_counts_matched_examples(self):
        data = linear_dataset(n=50, noise=0.0)
        cond = IntervalCondition([-0.5], [0.5])
        rule = fit_rule(cond, data, 0.01)
        assert rule.experience == int(cond.match_mask(data.features).sum())


class TestPredictRule:
    def test_constant_submodel(self):
        rule = make_rule([0.0], [1.0], [0.0], 3.25)
        assert rule.predict([0.7]) == 3.25

    def test_identity(self):
        rule = make_rule([0.0], [1.0], [1.0], 0.0)
        assert rule.predict([3.5]) == 3.5

    def test_direct_arithmetic(self):
        rule = make_rule([0.0, 0.0], [1.0, 1.0], [2.0, -1.0], 1.0)
        assert rule.predict([1.0, 1.0]) == 2.0

    def test_prediction_ignores_matching(self):
        rule = make_rule([0.0], [1.0], [1.0], 0.0)
        assert rule.predict([100.0]) == 100.0


class TestPredictMixed:
    def _pool(self, *rules):
        return Pool(rules)

    def _candidate(self, bits):
        genome = np.asarray(bits, dtype=bool)
        return SolutionCandidate(genome, 0.0, int(genome.sum()), 0.0)

    def test_single_matching_rule_wins(self):
        rule = make_rule([0.0], [1.0], [2.0], 0.0, experience=5, error=0.1)
        pool = self._pool(rule)
        assert predict_mixed(self._candidate([1]), pool, [0.5], -9.0) == rule.predict([0.5])

    def test_equal_rules_average(self):
        a = make_rule([0.0], [1.0], [0.0], 1.0, experience=5, error=0.1)
        b = make_rule([0.0], [1.0], [0.0], 3.0, experience=5, error=0.1)
        pool = self._pool(a, b)
        assert predict_mixed(self._candidate([1, 1]), pool, [0.5], -9.0) == pytest.approx(2.0)

    def test_no_match_returns_default(self):
        rule = make_rule([0.0], [1.0], [2.0], 0.0)
        pool = self._pool(rule)
        assert predict_mixed(self._candidate([1]), pool, [5.0], -9.0) == -9.0

    def test_unselected_rules_ignored(self):
        a = make_rule([0.0], [1.0], [0.0], 1.0)
        b = make_rule([0.0], [1.0], [0.0], 100.0)
        pool = self._pool(a, b)
        assert predict_mixed(self._candidate([1, 0]), pool, [0.5], -9.0) == 1.0

    def test_genome_pool_size_mismatch(self):
        pool = self._pool(make_rule([0.0], [1.0], [0.0], 1.0))
        with pytest.raises(ValueError):
            predict_mixed(self._candidate([1, 0]), pool, [0.5], 0.0)

    def test_mix_is_convex_combination(self):
        rng = np.random.default_rng(11)
        rules = [
            make_rule(
                [-1.0],
                [1.0],
                [rng.normal()],
                rng.normal(),
                experience=int(rng.integers(1, 50)),
                error=float(rng.uniform(0.001, 1.0)),
            )
            for _ in range(5)
        ]
        pool = self._pool(*rules)
        candidate = self._candidate([1] * 5)
        for x in rng.uniform(-1, 1, size=20):
            predictions = [rule.predict([x]) for rule in rules]
            mixed = predict_mixed(candidate, pool, [x], 0.0)
            assert min(predictions) - 1e-12 <= mixed <= max(predictions) + 1e-12

    def test_batch_table_agrees_with_per_row(self):
        rng = np.random.default_rng(5)
        rules = []
        for _ in range(6):
            lo, hi = np.sort(rng.uniform(-1, 1, 2))
            rules.append(
                make_rule(
                    [lo],
                    [hi],
                    [rng.normal()],
                    rng.normal(),
                    experience=int(rng.integers(1, 30)),
                    error=float(rng.uniform(0.0, 0.5)),
                )
            )
        pool = self._pool(*rules)
        X = rng.uniform(-1.5, 1.5, size=(40, 1))
        table = RulePredictionTable.build(pool.rules, X)
        genome = np.array([1, 0, 1, 1, 0, 1], dtype=bool)
        candidate = SolutionCandidate(genome, 0.0, 4, 0.0)
        batch = table.mixed(genome, 0.25)
        for j, row in enumerate(X):
            assert batch[j] == pytest.approx(predict_mixed(candidate, pool, row, 0.25), abs=1e-12)


class TestPool:
    def test_append_only_indices_stable(self):
        first = make_rule([0.0], [1.0], [1.0], 0.0)
        pool = Pool([first])
        pool.extend(make_rule([0.0], [1.0], [float(k)], 0.0) for k in range(5))
        assert pool[0] is first
        assert len(pool) == 6

    def test_degenerate_rule_rejected(self):
        degenerate = Rule(
            IntervalCondition([0.0], [1.0]), LinearSubmodel(np.zeros(1), 0.0), 0, np.inf
        )
        pool = Pool()
        with pytest.raises(ValueError, match="degenerate"):
            pool.append(degenerate)

    def test_rules_view_is_tuple(self):
        pool = Pool([make_rule([0.0], [1.0], [1.0], 0.0)])
        assert isinstance(pool.rules, tuple)


class TestSolutionCandidate:
    def test_complexity_must_match_popcount(self):
        with pytest.raises(ValueError, match="popcount"):
            SolutionCandidate(np.array([True, False]), 0.0, 2, 0.5)

    def test_genome_copied(self):
        bits = np.array([True, False])
        candidate = SolutionCandidate(bits, 0.0, 1, 0.5)
        bits[1] = True
        assert candidate.cached_complexity == 1
        assert not candidate.genome[1]


class TestSolutionResiduals:
    def test_empty_selection_centers_on_target_mean(self):
        data = linear_dataset(n=30, noise=0.0)
        pool = Pool([make_rule([-1.0], [1.0], [2.0], 1.0, experience=30)])
        candidate = SolutionCandidate(np.array([False]), 0.0, 0, 0.0)
        residuals = solution_residuals(candidate, pool, data)
        np.testing.assert_allclose(residuals, data.targets - data.targets.mean())

    def test_perfect_rule_zeroes_residuals(self):
        data = linear_dataset(n=30, noise=0.0)
        rule = fit_rule(
            IntervalCondition(data.feature_bounds[:, 0], data.feature_bounds[:, 1]), data, 0.0
        )
        pool = Pool([rule])
        candidate = SolutionCandidate(np.array([True]), 0.0, 1, 0.0)
        residuals = solution_residuals(candidate, pool, data)
        np.testing.assert_allclose(residuals, 0.0, atol=1e-10)

    def test_residuals_match_per_row_recomputation(self):
        data = linear_dataset(n=40, seed=2, noise=0.3)
        rules = [
            fit_rule(
                IntervalCondition([lo], [lo + width]), data, 0.01
            )
            for lo, width in [(-1.0, 0.8), (-0.4, 1.0), (0.2, 0.8)]
        ]
        pool = Pool(rules)
        genome = np.array([True, False, True])
        candidate = SolutionCandidate(genome, 0.0, 2, 0.0)
        residuals = solution_residuals(candidate, pool, data)
        default = data.targets.mean()
        expected = [
            y - predict_mixed(candidate, pool, x, default)
            for x, y in zip(data.features, data.targets)
        ]
        np.testing.assert_allclose(residuals, expected, atol=1e-12)


def test_mixed_predictions_empty_rule_list_gives_default():
    X = np.zeros((4, 2))
    np.testing.assert_array_equal(mixed_predictions([], X, 1.5), np.full(4, 1.5))
