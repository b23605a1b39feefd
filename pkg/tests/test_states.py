"""Bloch-vector state container, noise channels, and measurement sampling."""

import math

import numpy as np
import pytest

from erasure_sensing import (
    ChannelKind,
    MeasurementBasis,
    NoiseChannel,
    Outcome,
    SensorState,
    accumulate_phase,
    apply_noise,
    measure_probs,
    prepare_plus,
    sample_outcome,
)


def state_at(phi, contrast=1.0, w=0.0):
    return SensorState(
        bloch=np.array([contrast * math.cos(phi), contrast * math.sin(phi), 0.0]),
        erasure_weight=w,
    )


class TestStateContainer:
    def test_prepare_plus_is_x_axis(self):
        s = prepare_plus()
        assert np.allclose(s.bloch, [1.0, 0.0, 0.0])
        assert s.erasure_weight == 0.0

    def test_accumulate_phase_rotates_about_z(self):
        s = accumulate_phase(prepare_plus(), 0.7)
        assert np.allclose(s.bloch, [math.cos(0.7), math.sin(0.7), 0.0], atol=1e-15)

    def test_quarter_turn_and_zero_phase(self):
        quarter = accumulate_phase(prepare_plus(), math.pi / 2)
        assert np.allclose(quarter.bloch, [0.0, 1.0, 0.0], atol=1e-15)
        null = accumulate_phase(prepare_plus(), 0.0)
        assert np.allclose(null.bloch, prepare_plus().bloch)

    def test_phase_accumulation_composes(self):
        once = accumulate_phase(prepare_plus(), 1.1)
        twice = accumulate_phase(accumulate_phase(prepare_plus(), 0.4), 0.7)
        assert np.allclose(once.bloch, twice.bloch, atol=1e-14)

    def test_bloch_norm_above_one_rejected(self):
        with pytest.raises(ValueError):
            SensorState(bloch=np.array([1.2, 0.0, 0.0]), erasure_weight=0.0)

    def test_erasure_weight_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            SensorState(bloch=np.zeros(3), erasure_weight=1.5)
        with pytest.raises(ValueError):
            SensorState(bloch=np.zeros(3), erasure_weight=-0.1)


class TestChannels:
    def test_depolarizing_scales_whole_bloch_vector(self):
        s = SensorState(bloch=np.array([0.6, -0.2, 0.1]), erasure_weight=0.0)
        out = apply_noise(s, ChannelKind.DEPOLARIZING, q=0.3)
        assert np.allclose(out.bloch, [0.42, -0.14, 0.07], atol=1e-15)
        assert out.erasure_weight == 0.0

    def test_dephasing_scales_coherences_only(self):
        s = SensorState(bloch=np.array([0.8, 0.5, -0.3]), erasure_weight=0.0)
        out = apply_noise(s, ChannelKind.DEPHASING, q=0.4)
        assert np.allclose(out.bloch, [0.8 * 0.2, 0.5 * 0.2, -0.3], atol=1e-15)

    def test_dephasing_at_half_kills_coherences(self):
        s = SensorState(bloch=np.array([0.8, 0.5, -0.3]), erasure_weight=0.0)
        out = apply_noise(s, ChannelKind.DEPHASING, q=0.5)
        assert np.allclose(out.bloch, [0.0, 0.0, -0.3], atol=1e-15)

    def test_dephasing_beyond_half_flips_coherence_sign(self):
        s = SensorState(bloch=np.array([0.8, 0.5, 0.0]), erasure_weight=0.0)
        out = apply_noise(s, ChannelKind.DEPHASING, q=0.75)
        assert np.allclose(out.bloch, [-0.4, -0.25, 0.0], atol=1e-15)

    def test_erasure_moves_weight_out_of_qubit_subspace(self):
        s = SensorState(bloch=np.array([1.0, 0.0, 0.0]), erasure_weight=0.5)
        out = apply_noise(s, ChannelKind.ERASURE, q=0.2)
        assert out.erasure_weight == pytest.approx(0.6, abs=1e-15)
        # surviving Bloch direction is untouched
        assert np.allclose(out.bloch, s.bloch)

    def test_erasure_composition_matches_survival_product(self):
        s = prepare_plus()
        out = apply_noise(apply_noise(s, ChannelKind.ERASURE, q=0.3), ChannelKind.ERASURE, q=0.3)
        assert out.erasure_weight == pytest.approx(1.0 - 0.7**2, abs=1e-15)

    def test_channel_object_and_kind_plus_q_agree(self):
        s = state_at(0.4)
        a = apply_noise(s, NoiseChannel(ChannelKind.DEPOLARIZING, q=0.25))
        b = apply_noise(s, ChannelKind.DEPOLARIZING, q=0.25)
        assert np.allclose(a.bloch, b.bloch)

    def test_rate_form_strength(self):
        ch = NoiseChannel(ChannelKind.ERASURE, gamma=0.5)
        assert ch.strength(2.0) == pytest.approx(0.6321205588285577, abs=1e-15)
        with pytest.raises(ValueError):
            ch.strength()  # rate form needs a duration

    def test_channel_requires_exactly_one_strength(self):
        with pytest.raises(ValueError):
            NoiseChannel(ChannelKind.ERASURE)
        with pytest.raises(ValueError):
            NoiseChannel(ChannelKind.ERASURE, q=0.1, gamma=0.1)

    def test_q_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            NoiseChannel(ChannelKind.DEPOLARIZING, q=1.5)
        with pytest.raises(ValueError):
            apply_noise(prepare_plus(), ChannelKind.DEPOLARIZING, q=-0.2)


class TestMeasurement:
    def test_aligned_and_anti_aligned_states_are_deterministic(self):
        aligned = measure_probs(prepare_plus(), MeasurementBasis(theta=0.0))
        assert aligned.p_plus == pytest.approx(1.0, abs=1e-15)
        flipped = measure_probs(accumulate_phase(prepare_plus(), math.pi), MeasurementBasis(0.0))
        assert flipped.p_minus == pytest.approx(1.0, abs=1e-15)

    def test_maximally_mixed_state_is_a_coin_flip(self):
        mixed = SensorState(bloch=np.zeros(3), erasure_weight=0.0)
        dist = measure_probs(mixed, MeasurementBasis(theta=1.3))
        assert dist.p_plus == pytest.approx(0.5, abs=1e-15)
        assert dist.p_minus == pytest.approx(0.5, abs=1e-15)

    def test_rotated_basis_probabilities(self):
        # independent arithmetic: p_pm = (1-w)(1 +- c cos(phi-theta))/2
        dist = measure_probs(state_at(0.7, contrast=0.9, w=0.15), MeasurementBasis(theta=0.2))
        assert dist.p_plus == pytest.approx(0.7606753299230676, abs=1e-14)
        assert dist.p_minus == pytest.approx(0.08932467007693239, abs=1e-14)
        assert dist.p_erasure == pytest.approx(0.15, abs=1e-15)

    def test_probabilities_form_a_simplex_everywhere(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            phi = rng.uniform(0.0, 2.0 * math.pi)
            theta = rng.uniform(0.0, 2.0 * math.pi)
            c = rng.uniform(0.0, 1.0)
            w = rng.uniform(0.0, 1.0)
            d = measure_probs(state_at(phi, c, w), MeasurementBasis(theta))
            vals = (d.p_plus, d.p_minus, d.p_erasure)
            assert all(v >= -1e-14 for v in vals)
            assert sum(vals) == pytest.approx(1.0, abs=1e-12)

    def test_detection_off_with_erased_weight_raises(self):
        s = state_at(0.3, w=0.2)
        with pytest.raises(ValueError):
            measure_probs(s, MeasurementBasis(0.0), erasure_detection=False)

    def test_detection_off_renormalizes_nothing_when_no_loss(self):
        d_on = measure_probs(state_at(0.3), MeasurementBasis(0.0), erasure_detection=True)
        d_off = measure_probs(state_at(0.3), MeasurementBasis(0.0), erasure_detection=False)
        assert d_on.p_plus == pytest.approx(d_off.p_plus, abs=1e-15)
        assert d_off.p_erasure == 0.0

    def test_sampling_matches_probabilities(self):
        dist = measure_probs(state_at(1.0, contrast=0.8, w=0.25), MeasurementBasis(0.2))
        rng = np.random.default_rng(12345)
        n = 200_000
        counts = {Outcome.PLUS: 0, Outcome.MINUS: 0, Outcome.ERASURE: 0}
        for _ in range(n):
            counts[sample_outcome(dist, rng)] += 1
        for outcome, p in (
            (Outcome.PLUS, dist.p_plus),
            (Outcome.MINUS, dist.p_minus),
            (Outcome.ERASURE, dist.p_erasure),
        ):
            sem = math.sqrt(p * (1 - p) / n)
            assert abs(counts[outcome] / n - p) < 5 * sem + 1e-12

    def test_sampling_degenerate_distribution_always_returns_that_outcome(self):
        dist = measure_probs(prepare_plus(), MeasurementBasis(0.0))
        rng = np.random.default_rng(0)
        assert all(sample_outcome(dist, rng) is Outcome.PLUS for _ in range(200))

    def test_sampling_is_deterministic_per_seed(self):
        dist = measure_probs(state_at(0.5, w=0.3), MeasurementBasis(0.0))
        first = np.random.default_rng(99)
        second = np.random.default_rng(99)
        seq_a = [sample_outcome(dist, first) for _ in range(50)]
        seq_b = [sample_outcome(dist, second) for _ in range(50)]
        assert seq_a == seq_b
