from fractions import Fraction

import pytest

from protorail import (
    Fragment,
    ProtocolError,
    ProviderFailure,
    RunConfig,
    RunOutcome,
    RunResult,
    ScriptedProvider,
    SourceKind,
    compute_stats,
    load_batch_fixture,
    pearson,
    run_batch,
)

from helpers import FIXTURES

BATCH_FIXTURE = str(FIXTURES / "batch_eight_pairings.json")


def outcome(label="run", pairs=6, electric=3, visions=(), interesting=None):
    interesting = pairs - electric if interesting is None else interesting
    boring = pairs - electric - interesting
    return RunOutcome(
        pairing_label=label,
        fragment_count=4,
        pair_count=pairs,
        electric_count=electric,
        interesting_count=interesting,
        boring_count=boring,
        visions=list(visions),
        result=RunResult.SUCCESS
        if any(min(v) >= 3 for v in visions)
        else RunResult.FAILURE,
    )


class TestPearson:
    def test_perfect_correlation_exact(self):
        assert pearson([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0, abs=1e-12)

    def test_perfect_anticorrelation_exact(self):
        assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-12)

    def test_hand_oracle_vector(self):
        # Frozen from an independent brute-force evaluation of the
        # product-moment formula with exact rationals:
        #   sum dx*dy = -22/5, sum dx^2 = 14/5, sum dy^2 = 36/5
        #   r = (-22/5) / sqrt(14/5 * 36/5) = -11 / (3 * sqrt(14))
        expected = -0.9799578870122228
        assert pearson([5, 4, 3, 3, 4], [2, 3, 5, 5, 3]) == pytest.approx(expected, abs=1e-9)

    def test_length_mismatch(self):
        with pytest.raises(ProtocolError) as err:
            pearson([1, 2], [1, 2, 3])
        assert err.value.code == "length_mismatch"

    def test_zero_variance(self):
        with pytest.raises(ProtocolError) as err:
            pearson([1, 1, 1], [1, 2, 3])
        assert err.value.code == "zero_variance"


class TestComputeStats:
    def test_single_success_run_hit_rate(self):
        stats = compute_stats([outcome(pairs=6, electric=3, visions=[(4, 4, 4, 4)])])
        assert stats.per_run_hit_rates == [Fraction(1, 2)]
        assert stats.success_rate == 1

    def test_empty_batch_rejected(self):
        with pytest.raises(ProtocolError) as err:
            compute_stats([])
        assert err.value.code == "empty_batch"

    def test_zero_pair_run_flagged_not_fatal(self):
        runs = [
            outcome("aborted-at-preflight", pairs=0, electric=0),
            outcome("fine", pairs=6, electric=3, visions=[(4, 4, 4, 4)]),
        ]
        stats = compute_stats(runs)
        assert stats.per_run_hit_rates[0] is None
        assert any("hit rate undefined" in w for w in stats.warnings)

    def test_rates_sum_to_one_exactly(self):
        runs = [outcome(f"r{i}", visions=[(4, 4, 4, 4)] if i % 3 else []) for i in range(9)]
        stats = compute_stats(runs)
        assert stats.success_rate + stats.failure_rate == 1

    def test_permutation_invariance_of_aggregates(self):
        import random

        runs = [
            outcome("a", electric=3, visions=[(5, 3, 4, 4), (4, 4, 4, 3)]),
            outcome("b", electric=2, visions=[(3, 5, 3, 4)]),
            outcome("c", electric=0, visions=[]),
        ]
        base = compute_stats(runs)
        shuffled = runs[:]
        random.Random(3).shuffle(shuffled)
        other = compute_stats(shuffled)
        assert other.success_rate == base.success_rate
        assert other.mean_hit_rate_successful == base.mean_hit_rate_successful
        assert other.total_visions == base.total_visions
        assert other.novelty_feasibility_r == pytest.approx(base.novelty_feasibility_r)

    def test_correlation_absent_for_single_vision(self):
        stats = compute_stats([outcome(visions=[(4, 4, 4, 4)])])
        assert stats.novelty_feasibility_r is None

    def test_inconsistent_counts_rejected(self):
        with pytest.raises(ProtocolError) as err:
            RunOutcome(
                pairing_label="bad",
                fragment_count=4,
                pair_count=6,
                electric_count=3,
                interesting_count=1,
                boring_count=1,
                visions=[],
                result=RunResult.FAILURE,
            )
        assert err.value.code == "inconsistent_run"


class TestRunBatch:
    def test_fixture_replay_matches_reference_statistics(self):
        configs, provider = load_batch_fixture(BATCH_FIXTURE)
        outcomes = run_batch(configs, provider)
        stats = compute_stats(outcomes)
        assert stats.n_runs == 8
        assert stats.success_rate == Fraction(7, 8)
        assert float(stats.success_rate) == 0.875
        assert stats.failure_rate == Fraction(1, 8)
        assert stats.per_run_hit_rates == [
            Fraction(1, 2),
            Fraction(1, 2),
            Fraction(1, 3),
            Fraction(0),
            Fraction(1, 3),
            Fraction(1, 2),
            Fraction(1, 2),
            Fraction(1, 2),
        ]
        assert stats.total_visions == 9
        assert stats.mean_visions_per_successful == Fraction(9, 7)
        assert round(float(stats.mean_visions_per_successful), 2) == 1.29
        assert stats.novelty_feasibility_r is not None
        assert -1.0 <= stats.novelty_feasibility_r <= 1.0

    def test_all_boring_provider_fails_every_run(self):
        configs, provider = load_batch_fixture(BATCH_FIXTURE)

        class AllBoring(ScriptedProvider):
            def collision(self, label, pair, session):
                from protorail import CollisionScore

                return CollisionScore.BORING, ""

        outcomes = run_batch(configs[:3], AllBoring(provider.script))
        assert all(o.result is RunResult.FAILURE for o in outcomes)
        assert all(o.electric_count == 0 for o in outcomes)

    def test_provider_failure_keeps_earlier_outcomes(self):
        configs, provider = load_batch_fixture(BATCH_FIXTURE)

        class ExplodesOnThird(ScriptedProvider):
            def ghost_text(self, label, fragment):
                if label == configs[2].label:
                    raise RuntimeError("generator unreachable")
                return super().ghost_text(label, fragment)

        with pytest.raises(ProviderFailure) as err:
            run_batch(configs[:4], ExplodesOnThird(provider.script))
        assert err.value.run_label == configs[2].label
        assert [o.pairing_label for o in err.value.completed] == [
            configs[0].label,
            configs[1].label,
        ]

    def test_homogeneous_tags_abort_at_preflight_as_failure(self):
        fragments = [
            Fragment(id=f"f{i}", text=f"obs {i}", domain_tag="one-domain",
                     source_kind=SourceKind.OBSERVATION)
            for i in range(1, 5)
        ]
        outcomes = run_batch(
            [RunConfig(label="homog", theme="t", fragments=fragments)],
            ScriptedProvider({"homog": {"ghosts": {}, "scores": {}}}),
        )
        assert outcomes[0].result is RunResult.FAILURE
        assert outcomes[0].pair_count == 0
        assert compute_stats(outcomes).per_run_hit_rates == [None]
