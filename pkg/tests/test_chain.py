import itertools
import math

import numpy as np
import pytest

from qrelay.chain import (
    ChainConfig,
    NoiseSpec,
    ResourceLimitError,
    apply_phase_noise,
    deferred_exponent,
    enumerate_branches,
    full_register_chain,
    run_chain,
    trial_seed,
)
from qrelay.core import ValidationError, basis_state, fidelity, make_state, random_state
from qrelay.teleport import CorrectionMode, apply_correction, teleport_hop

LOCAL = CorrectionMode.LOCAL_EACH_HOP
DEFERRED = CorrectionMode.DEFERRED_FINAL


def config(d=2, n=2, mode=DEFERRED, noise=None, seed=0):
    return ChainConfig(d=d, n=n, mode=mode, noise=noise or NoiseSpec.noiseless(d), seed=seed)


def uniform_state(d):
    return make_state(d, np.full(d, 1 / math.sqrt(d)))


def random_path(d, n, rng):
    return [(int(rng.integers(d)), int(rng.integers(d))) for _ in range(n)]


class TestNoiseSpec:
    def test_noiseless(self):
        spec = NoiseSpec.noiseless(4)
        assert spec.probs == (1.0, 0.0, 0.0, 0.0)
        assert spec.deterministic_exponent() == 0

    def test_deterministic_nonzero(self):
        assert NoiseSpec((0.0, 0.0, 1.0)).deterministic_exponent() == 2

    def test_stochastic_has_no_fixed_exponent(self):
        assert NoiseSpec((0.5, 0.5)).deterministic_exponent() is None

    def test_rejects_negative(self):
        with pytest.raises(ValidationError):
            NoiseSpec((1.5, -0.5))

    def test_rejects_bad_sum(self):
        with pytest.raises(ValidationError):
            NoiseSpec((0.5, 0.4))

    def test_rejects_single_entry(self):
        with pytest.raises(ValidationError):
            NoiseSpec((1.0,))


class TestChainConfig:
    def test_rejects_bad_hop_count(self):
        with pytest.raises(ValidationError):
            config(n=0)

    def test_rejects_noise_length_mismatch(self):
        with pytest.raises(ValidationError):
            ChainConfig(d=3, n=1, mode=LOCAL, noise=NoiseSpec((0.5, 0.5)), seed=0)

    def test_rejects_bad_seed(self):
        with pytest.raises(ValidationError):
            config(seed=-1)
        with pytest.raises(ValidationError):
            config(seed=2**64)

    def test_rejects_non_enum_mode(self):
        with pytest.raises(ValidationError):
            ChainConfig(d=2, n=1, mode="local", noise=NoiseSpec.noiseless(2), seed=0)


class TestDeferredExponent:
    def test_all_zero(self):
        assert deferred_exponent([0, 0, 0, 0], 3) == 0

    def test_wraps(self):
        assert deferred_exponent([1, 2, 2], 3) == 2

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            deferred_exponent([0, 3], 3)

    def test_single_correction_equals_sequence(self):
        rng = np.random.default_rng(30)
        for d in (2, 3, 5):
            psi = random_state(d, 1, rng)
            results = [int(rng.integers(d)) for _ in range(8)]
            sequential = psi
            for r in results:
                sequential = apply_correction(sequential, r)
            at_once = apply_correction(psi, deferred_exponent(results, d))
            np.testing.assert_allclose(sequential.amps, at_once.amps, atol=1e-12)
            # diagonal corrections commute: order of application is irrelevant
            shuffled = psi
            for r in reversed(results):
                shuffled = apply_correction(shuffled, r)
            np.testing.assert_allclose(shuffled.amps, at_once.amps, atol=1e-12)


class TestApplyPhaseNoise:
    def test_noiseless_is_identity(self):
        psi = random_state(3, 1, np.random.default_rng(31))
        out, k = apply_phase_noise(psi, NoiseSpec.noiseless(3), rng=np.random.default_rng(0))
        assert k == 0
        assert out is psi

    def test_basis_states_only_pick_up_global_phase(self):
        for d in (2, 3):
            for j in range(d):
                psi = basis_state(d, 1, (j,))
                for k in range(d):
                    out, applied = apply_phase_noise(psi, NoiseSpec.noiseless(d), forced=k)
                    assert applied == k
                    assert fidelity(psi, out) == pytest.approx(1.0, abs=1e-12)

    def test_phase_flip_orthogonalizes_uniform_qubit(self):
        out, k = apply_phase_noise(uniform_state(2), NoiseSpec.noiseless(2), forced=1)
        assert k == 1
        assert fidelity(uniform_state(2), out) == pytest.approx(0.0, abs=1e-12)

    def test_forced_out_of_range(self):
        with pytest.raises(ValueError):
            apply_phase_noise(uniform_state(2), NoiseSpec.noiseless(2), forced=2)

    def test_needs_rng_or_forced(self):
        with pytest.raises(ValueError):
            apply_phase_noise(uniform_state(2), NoiseSpec.noiseless(2))

    def test_sampling_frequencies(self):
        rng = np.random.default_rng(32)
        spec = NoiseSpec((0.7, 0.3))
        draws = [apply_phase_noise(uniform_state(2), spec, rng=rng)[1] for _ in range(2000)]
        assert 0.25 < np.mean(draws) < 0.35


class TestRunChain:
    @pytest.mark.parametrize("mode", [LOCAL, DEFERRED])
    @pytest.mark.parametrize("d,n", [(2, 1), (2, 6), (3, 3), (5, 2)])
    def test_noiseless_fidelity_one(self, mode, d, n):
        rng = np.random.default_rng(33)
        psi = random_state(d, 1, rng)
        result = run_chain(config(d=d, n=n, mode=mode), psi, forced_outcomes=random_path(d, n, rng))
        assert result.fidelity_vs_initial == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(result.final.amps - psi.amps)) < 1e-12

    def test_strategy_equivalence_same_seed(self):
        rng = np.random.default_rng(34)
        noise = NoiseSpec((0.6, 0.2, 0.2))
        psi = random_state(3, 1, rng)
        for seed in range(6):
            finals = [
                run_chain(config(d=3, n=5, mode=mode, noise=noise, seed=seed), psi).final
                for mode in (LOCAL, DEFERRED)
            ]
            np.testing.assert_allclose(finals[0].amps, finals[1].amps, atol=1e-12)

    def test_single_hop_zero_result_is_identity(self):
        psi = random_state(4, 1, np.random.default_rng(35))
        result = run_chain(config(d=4, n=1), psi, forced_outcomes=[(0, 2)])
        assert result.results == (0,)
        assert result.deferred_exponent == 0
        np.testing.assert_allclose(result.final.amps, psi.amps, atol=1e-12)

    def test_history_contract(self):
        rng = np.random.default_rng(36)
        psi = random_state(3, 1, rng)
        path = [(2, 1), (1, 0), (0, 2)]
        result = run_chain(config(d=3, n=3, mode=LOCAL), psi, forced_outcomes=path)
        assert len(result.history) == 4
        first = result.history.entries[0]
        assert first.r == 0
        np.testing.assert_array_equal(first.state.amps, psi.amps)
        assert [entry.r for entry in result.history.entries[1:]] == [2, 1, 0]

    def test_history_snapshots_are_pre_correction(self):
        psi = random_state(3, 1, np.random.default_rng(37))
        result = run_chain(config(d=3, n=1, mode=LOCAL), psi, forced_outcomes=[(2, 0)])
        hop = teleport_hop(psi, DEFERRED, forced=(2, 0))
        snapshot = result.history.entries[1].state
        np.testing.assert_allclose(snapshot.amps, hop.bob_pre.amps, atol=1e-12)
        np.testing.assert_allclose(result.final.amps, apply_correction(snapshot, 2).amps, atol=1e-12)

    def test_history_snapshots_include_noise(self):
        psi = random_state(2, 1, np.random.default_rng(38))
        result = run_chain(
            config(d=2, n=1, mode=LOCAL), psi, forced_outcomes=[(1, 0)], forced_noise=[1]
        )
        hop = teleport_hop(psi, DEFERRED, forced=(1, 0))
        noisy, _ = apply_phase_noise(hop.bob_pre, NoiseSpec.noiseless(2), forced=1)
        np.testing.assert_allclose(result.history.entries[1].state.amps, noisy.amps, atol=1e-12)

    def test_noise_and_correction_commute(self):
        psi = random_state(3, 1, np.random.default_rng(39))
        result = run_chain(
            config(d=3, n=2, mode=DEFERRED), psi, forced_outcomes=[(1, 0), (2, 2)], forced_noise=[2, 1]
        )
        # applying the channel exponents after the deferred correction instead
        clean = run_chain(config(d=3, n=2, mode=DEFERRED), psi, forced_outcomes=[(1, 0), (2, 2)])
        late_noise = clean.final
        for k in (2, 1):
            late_noise, _ = apply_phase_noise(late_noise, NoiseSpec.noiseless(3), forced=k)
        np.testing.assert_allclose(result.final.amps, late_noise.amps, atol=1e-12)

    def test_deferred_exponent_field(self):
        psi = random_state(3, 1, np.random.default_rng(40))
        path = [(1, 0), (2, 0), (2, 1)]
        deferred = run_chain(config(d=3, n=3, mode=DEFERRED), psi, forced_outcomes=path)
        assert deferred.deferred_exponent == (1 + 2 + 2) % 3
        local = run_chain(config(d=3, n=3, mode=LOCAL), psi, forced_outcomes=path)
        assert local.deferred_exponent is None
        assert local.noise_exponents == (0, 0, 0)

    def test_reproducible_for_fixed_seed(self):
        psi = uniform_state(3)
        noise = NoiseSpec((0.4, 0.3, 0.3))
        first = run_chain(config(d=3, n=4, noise=noise, seed=77), psi)
        second = run_chain(config(d=3, n=4, noise=noise, seed=77), psi)
        assert first.results == second.results
        assert first.noise_exponents == second.noise_exponents
        np.testing.assert_array_equal(first.final.amps, second.final.amps)

    def test_entropy_recording(self):
        result = run_chain(config(d=3, n=2), uniform_state(3), record_entropy=True)
        assert result.hop_entropies is not None
        assert all(e == pytest.approx(1.0, abs=1e-10) for e in result.hop_entropies)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            run_chain(config(d=3, n=1), uniform_state(2))

    def test_forced_length_mismatch(self):
        with pytest.raises(ValueError):
            run_chain(config(d=2, n=2), uniform_state(2), forced_outcomes=[(0, 0)])
        with pytest.raises(ValueError):
            run_chain(config(d=2, n=2), uniform_state(2), forced_noise=[0])


class TestEnumerateBranches:
    def test_eight_uniform_paths(self):
        branches = enumerate_branches(config(d=2, n=3), uniform_state(2))
        assert len(branches) == 8
        assert {branch.path for branch in branches} == set(itertools.product(range(2), repeat=3))
        for branch in branches:
            assert branch.probability == pytest.approx(1 / 8)
            assert branch.fidelity == pytest.approx(1.0, abs=1e-12)
        assert sum(branch.probability for branch in branches) == pytest.approx(1.0, abs=1e-15)

    def test_budget_exceeded(self):
        with pytest.raises(ResourceLimitError):
            enumerate_branches(config(d=3, n=8), uniform_state(3))

    def test_stochastic_noise_rejected(self):
        noisy = config(d=2, n=2, noise=NoiseSpec((0.5, 0.5)))
        with pytest.raises(ValidationError):
            enumerate_branches(noisy, uniform_state(2))

    def test_deterministic_phase_error_breaks_fidelity(self):
        # an always-on, uncorrected Z flips the uniform qubit to orthogonal
        flipping = config(d=2, n=1, noise=NoiseSpec((0.0, 1.0)))
        branches = enumerate_branches(flipping, uniform_state(2))
        for branch in branches:
            assert branch.fidelity == pytest.approx(0.0, abs=1e-12)


class TestFullRegisterChain:
    def test_single_hop_reduces_to_teleport(self):
        for d in (2, 3):
            psi = random_state(d, 1, np.random.default_rng(41))
            for a in range(d):
                for b in range(d):
                    joint = full_register_chain(d, 1, psi, [(a, b)])
                    hop = teleport_hop(psi, LOCAL, forced=(a, b))
                    np.testing.assert_allclose(joint.final.amps, hop.bob_post.amps, atol=1e-12)

    @pytest.mark.parametrize("mode", [LOCAL, DEFERRED])
    def test_matches_factorized_chain(self, mode):
        psi = random_state(2, 1, np.random.default_rng(42))
        for path in itertools.product(itertools.product(range(2), repeat=2), repeat=2):
            joint = full_register_chain(2, 2, psi, list(path), mode=mode)
            factorized = run_chain(config(d=2, n=2, mode=mode), psi, forced_outcomes=list(path))
            np.testing.assert_allclose(joint.final.amps, factorized.final.amps, atol=1e-12)
            assert all(abs(e) < 1e-10 for e in joint.boundary_entropies)

    def test_boundary_entropy_count(self):
        psi = random_state(2, 1, np.random.default_rng(43))
        joint = full_register_chain(2, 3, psi, [(0, 0), (1, 1), (0, 1)])
        assert len(joint.boundary_entropies) == 2

    def test_register_budget(self):
        psi = random_state(16, 1, np.random.default_rng(44))
        with pytest.raises(ResourceLimitError):
            full_register_chain(16, 3, psi, [(0, 0)] * 3)

    def test_path_length_checked(self):
        with pytest.raises(ValueError):
            full_register_chain(2, 2, uniform_state(2), [(0, 0)])


class TestTrialSeed:
    def test_xor_derivation(self):
        assert trial_seed(0, 0) == 0
        assert trial_seed(5, 3) == 5 ^ 3
        assert trial_seed(2**64 - 1, 1) == (2**64 - 1) ^ 1

    def test_distinct_for_small_indices(self):
        seeds = {trial_seed(12345, index) for index in range(64)}
        assert len(seeds) == 64


def test_monte_carlo_outcome_uniformity():
    # 10,000 sampled hops: every (a, b) cell within five standard errors of 1/d^2
    rng = np.random.default_rng(45)
    d = 2
    psi = uniform_state(d)
    counts = np.zeros((d, d))
    hops = 10_000
    for _ in range(hops):
        outcome = teleport_hop(psi, LOCAL, rng=rng)
        counts[outcome.a, outcome.b] += 1
    expected = hops / d**2
    sigma = math.sqrt(hops * (1 / d**2) * (1 - 1 / d**2))
    assert np.max(np.abs(counts - expected)) < 5 * sigma
