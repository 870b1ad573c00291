"""Win tables, posterior density, HDI, summaries, decisions, PPC."""

import math

import numpy as np
import pytest

from molbench.bbt import (
    AbilityPosterior,
    BBTConfig,
    Decision,
    PairSummary,
    WinTable,
    build_win_table,
    decide,
    hdi,
    log_posterior,
    pair_summary,
    posterior_predictive_check,
    rank_models,
    sample_posterior,
    simulate_win_table,
)
from molbench.errors import ConvergenceError, DataError
from molbench.harness import ScoreRecord, ScoreTable


def _scores(rows):
    table = ScoreTable()
    for model, dataset, value in rows:
        table.add(ScoreRecord(model, dataset, "best", value))
    return table


class TestWinTable:
    def test_mixed_win_and_tie(self):
        scores = _scores(
            [
                ("A", "d1", 0.90),
                ("A", "d2", 0.70),
                ("B", "d1", 0.80),
                ("B", "d2", 0.705),
            ]
        )
        table = build_win_table(scores, 0.01)
        a, b = table.index("A"), table.index("B")
        assert table.wins[a, b] == 1.5
        assert table.wins[b, a] == 0.5

    def test_identical_rows_all_ties(self):
        scores = _scores(
            [(m, d, 0.7) for m in ("A", "B") for d in ("d1", "d2", "d3", "d4")]
        )
        table = build_win_table(scores, 0.01)
        assert table.wins[0, 1] == 2.0
        assert table.wins[1, 0] == 2.0

    def test_zero_epsilon_no_halves(self):
        scores = _scores(
            [("A", "d1", 0.9), ("A", "d2", 0.6), ("B", "d1", 0.8), ("B", "d2", 0.7)]
        )
        table = build_win_table(scores, 0.0)
        assert table.wins[0, 1] + table.wins[1, 0] == 2.0
        assert float(table.wins[0, 1]).is_integer()

    def test_single_model_rejected(self):
        with pytest.raises(DataError):
            build_win_table(_scores([("A", "d1", 0.5)]), 0.01)

    def test_disjoint_datasets_rejected(self):
        with pytest.raises(DataError, match="share no datasets"):
            build_win_table(
                _scores([("A", "d1", 0.5), ("B", "d2", 0.5)]), 0.01
            )

    def test_totals_constant_per_pair(self):
        rng = np.random.default_rng(0)
        rows = [
            (m, f"d{i}", float(rng.random()))
            for m in ("A", "B", "C")
            for i in range(7)
        ]
        table = build_win_table(_scores(rows), 0.05)
        totals = table.totals
        off_diag = totals[~np.eye(3, dtype=bool)]
        assert np.all(off_diag == 7.0)


class TestLogPosterior:
    def test_hand_evaluated_two_model_case(self):
        table = WinTable(("a", "b"), np.array([[0.0, 3.0], [1.0, 0.0]]))
        value = log_posterior(np.array([0.5, -0.5]), 1.0, table)
        pi = 1.0 / (1.0 + math.exp(-1.0))
        expected = (
            3 * math.log(pi)
            + 1 * math.log(1 - pi)
            + 2 * (-0.5 * 0.25 - 0.5 * math.log(2 * math.pi))  # two N(0,1) betas
            + (-math.log(0.5) - 0.5 * math.log(2 * math.pi))  # LogNormal at sigma=1
        )
        assert value == pytest.approx(expected, abs=1e-12)

    def test_flat_abilities_likelihood_term(self):
        table = WinTable(
            ("a", "b", "c"),
            np.array([[0.0, 2.0, 1.0], [3.0, 0.0, 0.5], [1.0, 1.5, 0.0]]),
        )
        at_zero = log_posterior(np.zeros(3), 1.0, table)
        prior_only = log_posterior(np.zeros(3), 1.0, WinTable(("a", "b", "c"), np.zeros((3, 3))))
        n_comparisons = table.totals.sum() / 2
        assert at_zero - prior_only == pytest.approx(math.log(0.5) * n_comparisons)

    def test_likelihood_increases_toward_winner(self):
        table = WinTable(("a", "b"), np.array([[0.0, 9.0], [1.0, 0.0]]))
        low = log_posterior(np.array([0.0, 0.0]), 1.0, table)
        high = log_posterior(np.array([0.8, -0.8]), 1.0, table)
        assert high > low

    def test_invalid_sigma(self):
        table = WinTable(("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]))
        with pytest.raises(ValueError):
            log_posterior(np.zeros(2), 0.0, table)


class TestHdi:
    def test_uniform_grid_width(self):
        draws = np.linspace(0.0, 1.0, 1001)
        low, high = hdi(draws, 0.89)
        assert high - low == pytest.approx(0.89, abs=1.5 / 1000)

    def test_constant_draws(self):
        low, high = hdi(np.full(500, 0.3), 0.89)
        assert (low, high) == (0.3, 0.3)

    def test_matches_quadratic_scan(self):
        def slow_hdi(draws, mass):
            draws = np.sort(draws)
            n = len(draws)
            k = math.ceil(mass * n)
            best = (np.inf, None)
            for i in range(n - k + 1):
                width = draws[i + k - 1] - draws[i]
                if width < best[0]:
                    best = (width, (draws[i], draws[i + k - 1]))
            return best[1]

        rng = np.random.default_rng(3)
        for _ in range(25):
            draws = rng.gamma(2.0, 1.0, size=int(rng.integers(100, 400)))
            for mass in (0.5, 0.89, 0.95):
                assert hdi(draws, mass) == slow_hdi(draws, mass)

    def test_too_few_draws(self):
        with pytest.raises(ValueError):
            hdi(np.arange(50), 0.89)


def _posterior_from_beta(beta_draws, models=None, config=None):
    beta_draws = np.asarray(beta_draws, dtype=float)
    models = models or tuple(f"m{i}" for i in range(beta_draws.shape[1]))
    return AbilityPosterior(
        models=tuple(models),
        beta_draws=beta_draws,
        sigma_draws=np.ones(len(beta_draws)),
        r_hat={m: 1.0 for m in models},
        ess={m: 1e4 for m in models},
        config=config or BBTConfig(),
    )


class TestPairSummary:
    def test_equal_abilities(self):
        posterior = _posterior_from_beta(np.zeros((500, 2)))
        summary = pair_summary(posterior, 0, 1)
        assert summary.mean == 0.5
        assert summary.p_in_rope == 1.0
        assert summary.p_above_half == 0.0  # strict comparison

    def test_antisymmetry(self):
        rng = np.random.default_rng(5)
        draws = rng.normal(0.0, 0.8, size=(4000, 3))
        draws -= draws.mean(axis=1, keepdims=True)
        posterior = _posterior_from_beta(draws)
        forward = pair_summary(posterior, 0, 1)
        backward = pair_summary(posterior, 1, 0)
        assert forward.mean == pytest.approx(1.0 - backward.mean, abs=1e-12)
        assert forward.p_above_half == pytest.approx(
            1.0 - backward.p_above_half, abs=1e-12
        )

    def test_same_model_rejected(self):
        posterior = _posterior_from_beta(np.zeros((200, 2)))
        with pytest.raises(ValueError):
            pair_summary(posterior, 1, 1)


class TestDecide:
    def _summary(self, mean, p_in_rope):
        return PairSummary("i", "j", mean, 0.0, 1.0, p_in_rope, 0.5)

    def test_clear_winner(self):
        assert decide(self._summary(0.86, 0.00), BBTConfig()) is Decision.BETTER

    def test_equivalent(self):
        assert decide(self._summary(0.60, 1.00), BBTConfig()) is Decision.EQUIVALENT

    def test_worse_from_reversed_pair(self):
        assert decide(self._summary(1 - 0.79, 0.19), BBTConfig()) is Decision.WORSE

    def test_total_loss(self):
        assert decide(self._summary(0.00, 0.00), BBTConfig()) is Decision.WORSE

    def test_inconclusive(self):
        assert decide(self._summary(0.50, 0.60), BBTConfig()) is Decision.INCONCLUSIVE

    def test_equivalence_checked_first(self):
        assert decide(self._summary(0.80, 0.96), BBTConfig()) is Decision.EQUIVALENT

    def test_pure_function(self):
        summary = self._summary(0.62, 0.40)
        results = {decide(summary, BBTConfig()) for _ in range(5)}
        assert results == {Decision.INCONCLUSIVE}


class TestRanking:
    def test_dominant_model_first(self):
        rng = np.random.default_rng(1)
        draws = np.column_stack(
            [
                rng.normal(1.0, 0.1, 2000),
                rng.normal(-0.4, 0.1, 2000),
                rng.normal(-0.6, 0.1, 2000),
            ]
        )
        posterior = _posterior_from_beta(draws, ("winner", "mid", "loser"))
        ranking = rank_models(posterior)
        assert ranking.order == ("winner", "mid", "loser")
        assert not ranking.indistinguishable

    def test_symmetric_flagged_indistinguishable(self):
        rng = np.random.default_rng(2)
        draws = rng.normal(0.0, 0.05, size=(2000, 3))
        draws -= draws.mean(axis=1, keepdims=True)
        posterior = _posterior_from_beta(draws)
        assert rank_models(posterior).indistinguishable

    def test_relabeling_permutes_ranking(self):
        rng = np.random.default_rng(3)
        draws = rng.normal(0.0, 0.4, size=(1500, 3)) + np.array([0.5, 0.0, -0.5])
        posterior_ab = _posterior_from_beta(draws, ("a", "b", "c"))
        permuted = _posterior_from_beta(draws[:, [2, 0, 1]], ("c", "a", "b"))
        assert rank_models(posterior_ab).order == rank_models(permuted).order


class TestPpc:
    def test_symmetric_table_mid_pvalues(self):
        rng = np.random.default_rng(4)
        draws = rng.normal(0.0, 0.2, size=(4000, 2))
        draws -= draws.mean(axis=1, keepdims=True)
        posterior = _posterior_from_beta(draws, ("a", "b"))
        table = WinTable(("a", "b"), np.array([[0.0, 10.0], [10.0, 0.0]]))
        result = posterior_predictive_check(posterior, table, seed=0)
        assert not result.flagged.any()
        assert 0.3 < result.p_values[0] < 0.8

    def test_gross_misfit_flagged(self):
        # posterior believes both models are even, data says total domination
        rng = np.random.default_rng(5)
        draws = rng.normal(0.0, 0.05, size=(4000, 2))
        draws -= draws.mean(axis=1, keepdims=True)
        posterior = _posterior_from_beta(draws, ("a", "b"))
        table = WinTable(("a", "b"), np.array([[0.0, 40.0], [0.0, 0.0]]))
        result = posterior_predictive_check(posterior, table, seed=0)
        assert result.flagged.all()

    def test_fractional_counts_rounded(self):
        rng = np.random.default_rng(6)
        draws = rng.normal(0.0, 0.2, size=(1000, 2))
        draws -= draws.mean(axis=1, keepdims=True)
        posterior = _posterior_from_beta(draws, ("a", "b"))
        table = WinTable(("a", "b"), np.array([[0.0, 5.5], [4.5, 0.0]]))
        result = posterior_predictive_check(posterior, table, seed=0)
        assert len(result.p_values) == 1


class TestSamplePosterior:
    def test_symmetric_two_model(self):
        table = WinTable(("a", "b"), np.array([[0.0, 5.0], [5.0, 0.0]]))
        posterior = sample_posterior(
            table, BBTConfig(chains=4, draws_per_chain=2000, warmup=2000, seed=1)
        )
        summary = pair_summary(posterior, 0, 1)
        assert 0.45 <= summary.mean <= 0.55

    def test_sum_to_zero_exact(self):
        table = WinTable(("a", "b", "c"), np.array([[0, 4, 2], [1, 0, 3], [3, 2, 0]], dtype=float))
        posterior = sample_posterior(
            table, BBTConfig(chains=2, draws_per_chain=2500, warmup=1500, seed=2)
        )
        assert np.all(posterior.beta_draws.sum(axis=1) == 0.0)

    def test_relabeling_invariance(self):
        wins = np.array([[0, 7, 2], [3, 0, 4], [8, 6, 0]], dtype=float)
        config = BBTConfig(chains=4, draws_per_chain=2500, warmup=2000, seed=3)
        direct = sample_posterior(WinTable(("a", "b", "c"), wins), config)
        perm = [2, 0, 1]  # new order: c, a, b
        permuted = sample_posterior(
            WinTable(("c", "a", "b"), wins[np.ix_(perm, perm)]), config
        )
        for model in ("a", "b", "c"):
            i, j = direct.models.index(model), permuted.models.index(model)
            assert abs(
                direct.beta_draws[:, i].mean() - permuted.beta_draws[:, j].mean()
            ) < 0.05

    def test_degenerate_table_rejected(self):
        with pytest.raises(DataError):
            sample_posterior(WinTable(("a", "b"), np.zeros((2, 2))))

    def test_diagnostics_gate_fires(self):
        table = WinTable(("a", "b"), np.array([[0.0, 5.0], [5.0, 0.0]]))
        with pytest.raises(ConvergenceError):
            sample_posterior(
                table, BBTConfig(chains=2, draws_per_chain=120, warmup=100, seed=0)
            )

    def test_dominant_model_wins_ranking(self):
        rng = np.random.default_rng(9)
        table = simulate_win_table(
            ("top", "mid", "low"), np.array([1.2, 0.0, -1.2]), 60, rng
        )
        posterior = sample_posterior(
            table, BBTConfig(chains=4, draws_per_chain=2000, warmup=2000, seed=4)
        )
        assert rank_models(posterior).order[0] == "top"


class TestBBTConfig:
    def test_rope_validation(self):
        with pytest.raises(ValueError):
            BBTConfig(rope=(0.6, 0.75))
        with pytest.raises(ValueError):
            BBTConfig(rope=(0.25, 0.45))

    def test_chain_minimum(self):
        with pytest.raises(ValueError):
            BBTConfig(chains=1)

    def test_defaults(self):
        config = BBTConfig()
        assert config.rope == (0.25, 0.75)
        assert config.equivalence_mass == 0.95
        assert config.hdi_mass == 0.89
        assert config.epsilon_tie == 0.01
        assert config.chains == 4
        assert config.draws_per_chain == 5000
        assert config.warmup == 5000
