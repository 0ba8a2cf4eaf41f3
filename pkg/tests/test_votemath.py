
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omoe.mip import solve_optimal_weights
from omoe.presets import get_preset
from omoe.votemath import (advantage, brute_force_oec, check_bounding_assumption, coalition_sums,
                           consistency_gap, conservative_advantage, correct_count_pmf, greedy_oec,
                           log_odds_weights, oec_prefix, p_maj, p_maj_egalitarian,
                           p_maj_egalitarian_dp, p_maj_weighted, scenario_weights)

SE1 = get_preset("SE1").p
SE3 = get_preset("SE3").p
WV1 = get_preset("WV1").p

probs = st.floats(0.0, 1.0, allow_nan=False)


def test_top_three_of_se1():
    assert p_maj_egalitarian([0.8, 0.79, 0.77]) == pytest.approx(0.883, abs=5e-4)
    # exact rational evaluation gives 0.88302
    assert p_maj_egalitarian([0.8, 0.79, 0.77]) == pytest.approx(0.88302, abs=1e-12)


@given(probs)
def test_singleton(p):
    assert p_maj_egalitarian([p]) == pytest.approx(p, abs=1e-15)


@given(probs, probs)
def test_pair_is_average(a, b):
    assert p_maj_egalitarian([a, b]) == pytest.approx((a + b) / 2, abs=1e-15)


def test_empty_and_oversized_committees():
    with pytest.raises(ValueError, match="nonempty"):
        p_maj_egalitarian([])
    with pytest.raises(ValueError, match="enumeration too large; use DP variant"):
        p_maj_egalitarian([0.5] * 26)
    assert p_maj([]) == 0.0


def test_out_of_range_competency():
    with pytest.raises(ValueError):
        p_maj([1.2])


def test_dp_values():
    assert p_maj_egalitarian_dp(SE1) == pytest.approx(0.7651361, abs=1e-12)
    assert p_maj_egalitarian_dp([1.0] * 7) == 1.0
    assert p_maj_egalitarian_dp([0.6, 0.6]) == pytest.approx(0.6)


@settings(max_examples=200)
@given(st.lists(probs, min_size=1, max_size=12))
def test_dp_matches_enumeration(p):
    assert abs(p_maj_egalitarian(p) - p_maj_egalitarian_dp(p)) <= 1e-12


@given(st.lists(probs, min_size=1, max_size=10))
def test_pmf_sums_to_one(p):
    assert correct_count_pmf(p).sum() == pytest.approx(1.0)
    assert scenario_weights(p).sum() == pytest.approx(1.0)


@settings(max_examples=200)
@given(st.lists(st.floats(0.0, 0.99), min_size=1, max_size=9), st.data())
def test_monotone_in_each_competency(p, data):
    i = data.draw(st.integers(0, len(p) - 1))
    bumped = list(p)
    bumped[i] += 0.01
    assert p_maj_egalitarian_dp(bumped) >= p_maj_egalitarian_dp(p) - 1e-12
    theta = np.ones(len(p))
    assert p_maj_weighted(bumped, theta, len(p) / 2) >= p_maj_weighted(p, theta, len(p) / 2) - 1e-12


def test_weighted_dictator():
    p = [0.3, 0.9, 0.6]
    assert p_maj_weighted(p, [3.0, 0.0, 0.0], 1.5) == pytest.approx(0.3)


def test_weighted_optimum_of_wv1():
    theta = solve_optimal_weights(WV1, 1.5).weights
    assert p_maj_weighted(WV1, theta, 1.5) == pytest.approx(0.881, abs=1e-12)


@given(st.lists(probs, min_size=1, max_size=9).filter(lambda p: len(p) % 2 == 1))
def test_equal_weights_odd_committee_is_egalitarian(p):
    assert p_maj_weighted(p, np.ones(len(p)), len(p) / 2) == pytest.approx(p_maj_egalitarian(p), abs=1e-12)


def test_exact_quota_coalitions_lose():
    # two equal voters with quota 1: the split coalition sits exactly on the quota
    assert p_maj_weighted([0.5, 0.5], [1.0, 1.0], 1.0) == pytest.approx(0.25)


def test_weighted_input_validation():
    with pytest.raises(ValueError):
        p_maj_weighted([0.5], [-1.0], 1.0)
    with pytest.raises(ValueError):
        p_maj_weighted([0.5], [1.0], 0.0)
    with pytest.raises(ValueError):
        p_maj_weighted([0.5] * 26, [1.0] * 26, 13)


def test_coalition_sums_indexing():
    assert coalition_sums([1.0, 2.0, 4.0]).tolist() == list(range(8))


def test_advantage_examples():
    c = [0.7, 0.6, 0.8]
    assert advantage([], c) == pytest.approx(p_maj(c))
    assert advantage(c, []) == 0.0
    assert advantage([0.9, 0.88], [0.2]) == pytest.approx(-0.0588, abs=1e-12)


def test_advantage_overlap_rejected():
    with pytest.raises(ValueError, match="overlap"):
        advantage({0: 0.9, 1: 0.8}, {1: 0.8})


def test_conservative_with_zero_radius():
    assert conservative_advantage([0.9, 0.6], [0.4]) == advantage([0.9, 0.6], [0.4])


@pytest.mark.parametrize("eps", [0.0, 0.05, 0.2, 0.35])
def test_conservative_two_experts(eps):
    assert conservative_advantage([0.9 - eps], [0.1 + eps]) == pytest.approx(eps - 0.4, abs=1e-12)


def test_pessimistic_base_can_lower_the_conservative_value():
    # random search counterexample: lowering the kept pair shrinks the gain from a third voter
    kept, extra, eps = [0.89478513, 0.83403492], [0.0435735], 0.15529296794307773
    cons = conservative_advantage(np.clip(np.array(kept) - eps, 0, 1), [extra[0] + eps])
    assert cons == pytest.approx(-0.124785, abs=1e-6)
    assert advantage(kept, extra) == pytest.approx(-0.107833, abs=1e-6)


def test_conservative_at_least_true_for_pure_additions():
    rng = np.random.default_rng(5)
    for _ in range(300):
        n = int(rng.integers(2, 7))
        p = rng.random(n)
        eps = rng.uniform(0.001, 0.2)
        split = int(rng.integers(1, n))
        kept, extra = p[:split], p[split:]
        cons = conservative_advantage(kept, np.clip(extra + eps, 0, 1))
        assert cons >= advantage(kept, extra) - 1e-12


def test_oec_prefix_examples():
    se1 = oec_prefix(SE1)
    assert se1.size == 3 and se1.value == pytest.approx(0.883, abs=5e-4)
    assert se1.members == (2, 3, 4)
    se3 = oec_prefix(SE3)
    assert se3.size == 9 and se3.value == pytest.approx(0.992, abs=5e-4)
    single = oec_prefix([0.9])
    assert single.members == (0,) and single.value == 0.9
    with pytest.raises(ValueError):
        oec_prefix([])


def test_prefix_tie_prefers_smaller_committee():
    # one and two experts always tie on value only when both are equal
    assert oec_prefix([0.7, 0.7]).size == 1


def test_oec_handles_unsorted_input():
    shuffled = [0.77, 0.1, 0.8, 0.65, 0.79]
    assert oec_prefix(shuffled).members == (0, 2, 4)


def test_greedy_examples():
    assert greedy_oec(SE1).members == oec_prefix(SE1).members
    assert greedy_oec([0.4]).members == (0,)
    all_equal = greedy_oec([0.7] * 5)
    assert all_equal.size == 5
    # brute force over prefixes confirms the full committee is best: 0.83692
    assert all_equal.value == pytest.approx(0.83692, abs=1e-12)


def test_brute_force_examples():
    se1 = brute_force_oec(SE1)
    assert se1.members == (2, 3, 4) and se1.value == pytest.approx(0.883, abs=5e-4)
    assert brute_force_oec([0.6]).members == (0,)
    with pytest.raises(ValueError):
        brute_force_oec([0.5] * 16)


def test_prefix_and_greedy_match_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(150):
        p = rng.random(int(rng.integers(1, 9)))
        best = brute_force_oec(p)
        assert oec_prefix(p).members == best.members
        assert greedy_oec(p).members == best.members
        assert abs(oec_prefix(p).value - best.value) <= 1e-12


def test_nonpositive_advantage_rules_out_union():
    rng = np.random.default_rng(8)
    checked = 0
    for _ in range(200):
        n = int(rng.integers(2, 8))
        p = rng.random(n)
        best = set(brute_force_oec(p).members)
        idx = list(range(n))
        for k in range(1, n):
            a = tuple(rng.choice(idx, size=k, replace=False))
            rest = [i for i in idx if i not in a]
            b = tuple(rng.choice(rest, size=int(rng.integers(1, len(rest) + 1)), replace=False))
            if advantage(p[list(a)], p[list(b)]) <= 0:
                checked += 1
                assert set(a) | set(b) != best
    assert checked > 50


def test_log_odds():
    w = log_odds_weights([0.5, 0.75, 0.9])
    assert w[0] == 0.0
    assert w[1] == pytest.approx(1.0986122886681098, abs=1e-12)
    assert w[2] == pytest.approx(2.1972245773362196, abs=1e-12)
    with pytest.raises(ValueError, match="degenerate competency"):
        log_odds_weights([0.3, 1.0])


def test_consistency_gap_two_experts():
    assert consistency_gap([0.9, 0.1]) == pytest.approx(0.4, abs=1e-6)
    assert consistency_gap([0.9]) == 1.0


def test_consistency_gap_zero_when_a_split_is_neutral():
    # equal pair: adding the second expert has exactly zero advantage
    assert consistency_gap([0.7, 0.7]) == pytest.approx(0.0, abs=1e-6)


def _gap_by_scan(p, steps=4000):
    p = np.sort(np.asarray(p))[::-1]
    sign = lambda x: 0 if abs(x) <= 1e-12 else (1 if x > 0 else -1)
    truth = [sign(advantage(p[:b], p[b:])) for b in range(1, len(p))]
    last = 0.0
    for eps in np.linspace(0, 1, steps + 1):
        lo, hi = np.clip(p - eps, 0, 1), np.clip(p + eps, 0, 1)
        if any(sign(advantage(lo[:b], hi[b:])) != s for b, s in zip(range(1, len(p)), truth)):
            return last
        last = eps
    return 1.0


def test_consistency_gap_matches_grid_scan():
    rng = np.random.default_rng(12)
    for _ in range(30):
        p = rng.random(int(rng.integers(2, 5)))
        assert consistency_gap(p) == pytest.approx(_gap_by_scan(p), abs=1 / 4000 + 1e-6)


def test_appending_a_weak_expert_can_widen_the_gap():
    # found by brute-force scan: the extra split tolerates wider radii
    p = [0.70617499, 0.61918034, 0.06912998]
    assert consistency_gap(p) == pytest.approx(0.16887, abs=1e-4)
    assert consistency_gap(p + [0.00853337]) == pytest.approx(0.24879, abs=1e-4)


def test_bounding_assumption():
    p = np.array([0.8, 0.7, 0.6])
    fam = coalition_sums([3.0, 0.0, 0.0]) > 1.5
    assert check_bounding_assumption(p, p, fam)
    for eps in (0.01, 0.1, 0.3):
        assert check_bounding_assumption(np.clip(p + eps, 0, 1), np.clip(p - eps, 0, 1), fam)
    with pytest.raises(ValueError):
        check_bounding_assumption(p - 0.1, p, fam)


def test_bounding_assumption_pass_rate_is_reported():
    rng = np.random.default_rng(13)
    passes = 0
    for _ in range(100):
        n = int(rng.integers(1, 7))
        p = rng.uniform(0.05, 0.95, n)
        fam = coalition_sums(solve_optimal_weights(p).weights) > n / 2
        passes += check_bounding_assumption(np.clip(p + 0.05, 0, 1), np.clip(p - 0.05, 0, 1), fam)
    print(f"bounding assumption held on {passes}/100 instances")
    assert 0 <= passes <= 100
