"""Key-distribution session tests: channels, sifting, CHSH audit, verdicts."""

import math

import numpy as np
import pytest

from bellspace.lhv import cosine_model, random_bounded_model
from bellspace.qkd import (
    EVE_DETECTED,
    INCONCLUSIVE,
    SECURE,
    ChshPair,
    LhvEveChannel,
    QkdConfig,
    QuantumLocalizedChannel,
    RoundRecord,
    channel_round_lhv,
    channel_round_quantum,
    config_from_dict,
    config_to_dict,
    decide_verdict,
    detectability_threshold_report,
    report_from_dict,
    report_to_dict,
    rounds_to_csv,
    run_session,
)
from bellspace.rng import make_generator
from bellspace.spatial import separated_gaussian_setup
from bellspace.spin import CHSH_QUANTUM_BOUND, OutcomePair, unit_from_planar_angle

SQRT2 = math.sqrt(2.0)


def quantum_config(g: float, n: int = 100_000, seed: int = 2024) -> QkdConfig:
    return QkdConfig(channel=QuantumLocalizedChannel(g=g), n_rounds=n, seed=seed)


def lhv_config(g: float, n: int = 100_000, seed: int = 2024) -> QkdConfig:
    return QkdConfig(channel=LhvEveChannel(model=cosine_model(g)), n_rounds=n, seed=seed)


class TestQuantumChannelRounds:
    def test_g_one_always_detected(self):
        rng = make_generator(301)
        a = unit_from_planar_angle(0.3)
        b = unit_from_planar_angle(1.1)
        for _ in range(500):
            record = channel_round_quantum(1.0, a, b, rng)
            assert record.detected
            assert record.outcomes is not None

    def test_coincidence_rate(self):
        rng = make_generator(307)
        a = unit_from_planar_angle(0.0)
        b = unit_from_planar_angle(0.5)
        n = 100_000
        detected = sum(
            channel_round_quantum(0.5, a, b, rng).detected for _ in range(n)
        )
        assert abs(detected / n - 0.5) < 4 * math.sqrt(0.25 / n)

    def test_conditional_anticorrelation_at_matched_settings(self):
        rng = make_generator(311)
        a = unit_from_planar_angle(0.9)
        products = []
        for _ in range(20_000):
            record = channel_round_quantum(0.9, a, a, rng)
            if record.detected:
                products.append(record.outcomes.product)
        # matched directions: singlet outcomes are exactly anti-equal
        assert products and all(p == -1 for p in products)

    def test_conditional_correlation_generic_settings(self):
        rng = make_generator(313)
        a = unit_from_planar_angle(0.0)
        b = unit_from_planar_angle(1.0)
        expected = -math.cos(1.0)
        products = []
        for _ in range(60_000):
            record = channel_round_quantum(0.7, a, b, rng)
            if record.detected:
                products.append(record.outcomes.product)
        mean = float(np.mean(products))
        assert abs(mean - expected) < 4 * math.sqrt(
            (1 - expected**2) / len(products)
        )

    def test_g_validation(self):
        with pytest.raises(ValueError):
            channel_round_quantum(
                1.5,
                unit_from_planar_angle(0),
                unit_from_planar_angle(0),
                make_generator(1),
            )


class TestLhvChannelRounds:
    def test_matched_settings_correlation(self):
        model = cosine_model(0.5)
        rng = make_generator(317)
        n = 60_000
        total = 0
        for _ in range(n):
            record = channel_round_lhv(model, 0.7, 0.7, rng)
            assert record.detected
            total += record.outcomes.product
        assert abs(total / n - 0.5) < 4 * math.sqrt((1 - 0.25) / n)

    def test_null_model_fair_coins(self):
        model = cosine_model(0.0)
        rng = make_generator(331)
        n = 20_000
        prods = [channel_round_lhv(model, 0.1, 0.9, rng).outcomes.product for _ in range(n)]
        assert abs(float(np.mean(prods))) < 4 / math.sqrt(n)


class TestDecideVerdict:
    def test_secure(self):
        assert decide_verdict(2.8, 0.01, 3.0) == SECURE

    def test_eve_detected(self):
        assert decide_verdict(1.9, 0.01, 3.0) == EVE_DETECTED

    def test_straddling_inconclusive(self):
        assert decide_verdict(2.01, 0.05, 3.0) == INCONCLUSIVE

    def test_negative_std_error_rejected(self):
        with pytest.raises(ValueError):
            decide_verdict(2.5, -0.1, 3.0)


class TestThresholdReport:
    def test_undetectable_regime(self):
        row = detectability_threshold_report([0.4])[0]
        assert row["regime"] == "undetectable"
        assert row["chsh_max"] == pytest.approx(0.4 * CHSH_QUANTUM_BOUND)

    def test_violation_possible_regime(self):
        row = detectability_threshold_report([0.8])[0]
        assert row["regime"] == "violation possible"
        assert row["chsh_max"] == pytest.approx(2.263, abs=1e-3)

    def test_open_gap(self):
        assert detectability_threshold_report([0.6])[0]["regime"] == "open gap"

    def test_boundaries(self):
        assert detectability_threshold_report([0.5])[0]["regime"] == "undetectable"
        just_above = math.nextafter(1 / SQRT2, 1.0)
        assert detectability_threshold_report([just_above])[0]["regime"] == (
            "violation possible"
        )
        assert detectability_threshold_report([1 / SQRT2])[0]["regime"] == "open gap"

    def test_range_validation(self):
        with pytest.raises(ValueError):
            detectability_threshold_report([1.2])


class TestRunSessionQuantum:
    def test_high_g_session_secure(self):
        report = run_session(quantum_config(0.9))
        assert report.verdict == SECURE
        est = report.chsh_estimate
        assert abs(est.s_value - CHSH_QUANTUM_BOUND) < 3 * est.std_error
        assert report.qber == 0.0
        assert abs(report.coincidence_rate - 0.9) < 0.01

    def test_unconditioned_statistic_scales_with_g(self):
        g = 0.9
        report = run_session(quantum_config(g))
        est = report.chsh_unconditioned
        assert abs(est.s_value - g * CHSH_QUANTUM_BOUND) < 4 * est.std_error

    def test_key_bits_agree_after_flip(self):
        # matched-setting anticorrelation holds down to small g
        for g, n in ((0.5, 20_000), (0.05, 60_000)):
            report = run_session(quantum_config(g, n=n))
            assert report.sifted_key_alice == report.sifted_key_bob
            assert report.qber == 0.0
            assert len(report.sifted_key_alice) == report.n_key_rounds
            assert report.n_key_rounds > 0

    def test_unconditioned_correlations_follow_scaled_cosine(self):
        g = 0.6
        config = quantum_config(g, n=90_000, seed=5)
        report, rounds = run_session(config, return_rounds=True)
        a_idx = np.array([r.alice_setting for r in rounds])
        b_idx = np.array([r.bob_setting for r in rounds])
        prod = np.array(
            [r.outcomes.product if r.outcomes else 0 for r in rounds], dtype=float
        )
        # Bob's flip negates the raw product
        prod = -prod
        for i in range(3):
            for j in range(3):
                mask = (a_idx == i) & (b_idx == j)
                n = int(mask.sum())
                expected = g * math.cos(
                    config.alice_angles[i] - config.bob_angles[j]
                )
                std_error = math.sqrt(max(1 - expected**2, 1e-12) / n)
                assert abs(float(prod[mask].mean()) - expected) < 4 * std_error

    def test_channel_from_spatial_setup(self):
        setup = separated_gaussian_setup(1.0, (100.0, 0.0, 0.0))
        channel = QuantumLocalizedChannel.from_setup(setup, t=0.0)
        assert channel.g == pytest.approx(0.10123700997061108, abs=1e-9)


class TestRunSessionLhv:
    def test_cosine_eve_detected(self):
        report = run_session(lhv_config(0.5))
        est = report.chsh_estimate
        assert est.s_value <= 2.0 + 3 * est.std_error
        assert report.verdict == EVE_DETECTED
        assert report.coincidence_rate == 1.0

    def test_any_bounded_model_respects_chsh(self):
        rng = make_generator(347)
        for trial in range(20):
            model = random_bounded_model(rng)
            config = QkdConfig(
                channel=LhvEveChannel(model=model), n_rounds=20_000, seed=400 + trial
            )
            report = run_session(config)
            est = report.chsh_estimate
            assert est.s_value <= 2.0 + 3 * est.std_error


class TestSifting:
    def test_partition_of_detected_rounds(self):
        config = quantum_config(0.7, n=30_000, seed=11)
        report, rounds = run_session(config, return_rounds=True)
        matched_pairs = {
            (i, j)
            for i in range(3)
            for j in range(3)
            if abs(config.alice_angles[i] - config.bob_angles[j]) < 1e-12
        }
        chsh_pairs = {(p.alice_idx, p.bob_idx) for p in config.chsh_pairs}
        assert not (matched_pairs & chsh_pairs)
        n_key = n_test = n_discard = 0
        for r in rounds:
            if not r.detected:
                continue
            combo = (r.alice_setting, r.bob_setting)
            if combo in matched_pairs:
                n_key += 1
            elif combo in chsh_pairs:
                n_test += 1
            else:
                n_discard += 1
        assert n_key == report.n_key_rounds
        assert n_test == sum(report.n_test_rounds)
        assert n_key + n_test + n_discard == report.n_detected

    def test_low_statistics_inconclusive(self):
        report = run_session(quantum_config(0.02, n=1000, seed=3))
        assert report.verdict == INCONCLUSIVE

    def test_determinism(self):
        r1 = run_session(quantum_config(0.8, n=20_000, seed=99))
        r2 = run_session(quantum_config(0.8, n=20_000, seed=99))
        assert r1 == r2
        r3 = run_session(quantum_config(0.8, n=20_000, seed=98))
        assert r3 != r1


class TestConfigValidation:
    def test_minimum_rounds(self):
        with pytest.raises(ValueError):
            quantum_config(0.5, n=999)

    def test_chsh_pairs_must_not_match_angles(self):
        with pytest.raises(ValueError, match="matched"):
            QkdConfig(
                channel=QuantumLocalizedChannel(g=0.5),
                chsh_pairs=(
                    ChshPair(1, 0, 1),  # pi/4 on both wings
                    ChshPair(2, 2, -1),
                    ChshPair(0, 0, 1),
                    ChshPair(0, 2, -1),
                ),
            )

    def test_pair_validation(self):
        with pytest.raises(ValueError):
            ChshPair(3, 0)
        with pytest.raises(ValueError):
            ChshPair(0, 0, sign=2)

    def test_alarm_sigma(self):
        with pytest.raises(ValueError):
            QkdConfig(channel=QuantumLocalizedChannel(g=0.5), alarm_sigma=0.0)

    def test_round_record_consistency(self):
        with pytest.raises(ValueError):
            RoundRecord(0, 0, True, None)
        with pytest.raises(ValueError):
            RoundRecord(0, 0, False, OutcomePair(1, 1))


class TestSerialization:
    def test_config_round_trip_quantum(self):
        config = quantum_config(0.37, n=5_000, seed=21)
        again = config_from_dict(config_to_dict(config))
        assert again == config

    def test_config_round_trip_lhv(self):
        config = lhv_config(0.25, n=5_000, seed=21)
        data = config_to_dict(config)
        assert data["channel"] == {"variant": "lhv_eve", "model": "cosine", "g": 0.25}
        again = config_from_dict(data)
        assert run_session(again) == run_session(config)

    def test_config_unknown_keys(self):
        data = config_to_dict(quantum_config(0.5))
        data["typo"] = True
        with pytest.raises(ValueError, match="unknown"):
            config_from_dict(data)

    def test_channel_setup_spec(self):
        config = config_from_dict(
            {
                "channel": {
                    "variant": "quantum_localized",
                    "setup": {"width_param": 1.0, "separation": [100.0, 0.0, 0.0]},
                    "t": 0.0,
                },
                "seed": 5,
            }
        )
        assert config.channel.g == pytest.approx(0.101237, abs=1e-5)

    def test_report_round_trip(self):
        report = run_session(quantum_config(0.8, n=2_000, seed=13))
        again = report_from_dict(report_to_dict(report))
        assert again == report

    def test_rounds_csv(self):
        _, rounds = run_session(
            quantum_config(0.5, n=1_000, seed=17), return_rounds=True
        )
        text = rounds_to_csv(rounds)
        lines = text.strip().split("\n")
        assert lines[0] == "round,a_idx,b_idx,detected,s_a,s_b"
        assert len(lines) == 1_001
        undetected = [l for l in lines[1:] if l.endswith(",,")]
        detected = [l for l in lines[1:] if not l.endswith(",,")]
        assert undetected and detected
        for line in detected[:10]:
            fields = line.split(",")
            assert fields[4] in ("1", "-1") and fields[5] in ("1", "-1")
