"""Two-particle entanglement-based key distribution with localized detectors.

Each round the source emits a singlet pair; Alice and Bob draw independent
uniform settings from three directions each and measure.  The quantum
channel registers a coincidence with probability g (the localization factor
of the detector regions) and, conditioned on detection, produces full
singlet statistics.  The eavesdropper channel replaces the pair by a local
hidden-variable model: lambda plays the role of Eve, every round is
detected, and outcomes come from the model's bounded responses.

After the public announcement of settings, rounds split into key rounds
(equal angles on both wings), test rounds (the four configured CHSH setting
pairs) and discarded rounds.  Bob flips all of his announced outcomes: the
physical singlet anticorrelates at equal angles (E = -cos(alpha - beta) with
both wings measuring along (cos, 0, sin)), so the flip makes matched-round
key bits agree and turns the test-round correlations into +cos(alpha -
beta).  Each CHSH pair additionally carries an explicit sign with which its
correlation enters the statistic; the default grids need signs (+,-,+,-) to
map Bob's 3*pi/4 setting onto the canonical -pi/4 slot (cos(x - 3*pi/4) =
-cos(x + pi/4)).

The session report carries the conditioned CHSH estimate (post-selected on
coincidences, which restores full singlet statistics and drives the verdict)
and the unconditioned one (non-coincidences counted as outcome product 0),
whose expectation is g*cos(alpha - beta): the g-scaled correlation law made
empirical.  Whether post-selected statistics legitimately certify security
when g <= 1/2 is exactly the fair-sampling question; the report shows both
numbers and takes no side.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .lhv import HiddenVariableModel, cosine_model, sample_model_signs
from .rng import split_generators
from .spatial import SpatialSetup, separated_gaussian_setup, setup_g_factor
from .spin import (
    CHSH_QUANTUM_BOUND,
    TWO_PI,
    OutcomePair,
    UnitVector3,
    as_angle,
    sample_singlet_outcomes,
)

SECURE = "secure"
EVE_DETECTED = "eve_detected"
INCONCLUSIVE = "inconclusive"

#: Minimum detected test rounds per CHSH pair for a statistically usable S.
MIN_TEST_ROUNDS_PER_PAIR = 50

_ANGLE_MATCH_TOL = 1e-12


@dataclass(frozen=True)
class QuantumLocalizedChannel:
    """Singlet channel with joint-detection probability g."""

    g: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.g <= 1.0:
            raise ValueError(f"detection probability g={self.g!r} outside [0, 1]")

    @classmethod
    def from_setup(cls, setup: SpatialSetup, t: float = 0.0) -> "QuantumLocalizedChannel":
        """Derive g from a spatial packet/region setup at time t."""
        return cls(g=setup_g_factor(setup, t).g)


@dataclass(frozen=True)
class LhvEveChannel:
    """Channel controlled by a hidden-variable model (Eve = lambda)."""

    model: HiddenVariableModel


ChannelModel = Union[QuantumLocalizedChannel, LhvEveChannel]


@dataclass(frozen=True)
class ChshPair:
    """One test-round setting combination and the sign of its correlation.

    ``sign`` multiplies the measured (Bob-flipped) correlation before it
    enters the CHSH statistic; -1 realizes angle relabelings like
    3*pi/4 -> -pi/4 that flip the cosine.
    """

    alice_idx: int
    bob_idx: int
    sign: int = 1

    def __post_init__(self) -> None:
        if self.alice_idx not in (0, 1, 2) or self.bob_idx not in (0, 1, 2):
            raise ValueError("setting indices must be 0, 1 or 2")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")


def default_alice_angles() -> tuple[float, float, float]:
    return (0.0, math.pi / 4, math.pi / 2)


def default_bob_angles() -> tuple[float, float, float]:
    return (math.pi / 4, math.pi / 2, 3 * math.pi / 4)


def default_chsh_pairs() -> tuple[ChshPair, ChshPair, ChshPair, ChshPair]:
    """Canonical quadruple (pi/2, 0) x (pi/4, -pi/4) inside the default grids.

    Bob's -pi/4 is represented by his 3*pi/4 setting with sign -1.
    """
    return (
        ChshPair(2, 0, 1),
        ChshPair(2, 2, -1),
        ChshPair(0, 0, 1),
        ChshPair(0, 2, -1),
    )


def _angles_match(a: float, b: float) -> bool:
    diff = (a - b) % TWO_PI
    return min(diff, TWO_PI - diff) < _ANGLE_MATCH_TOL


@dataclass(frozen=True)
class QkdConfig:
    """Full session specification; deterministic given the seed."""

    channel: ChannelModel
    n_rounds: int = 100_000
    alice_angles: tuple[float, float, float] = None  # type: ignore[assignment]
    bob_angles: tuple[float, float, float] = None  # type: ignore[assignment]
    chsh_pairs: tuple[ChshPair, ...] = None  # type: ignore[assignment]
    alarm_sigma: float = 3.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.alice_angles is None:
            object.__setattr__(self, "alice_angles", default_alice_angles())
        if self.bob_angles is None:
            object.__setattr__(self, "bob_angles", default_bob_angles())
        if self.chsh_pairs is None:
            object.__setattr__(self, "chsh_pairs", default_chsh_pairs())
        object.__setattr__(
            self, "alice_angles", tuple(as_angle(a) for a in self.alice_angles)
        )
        object.__setattr__(
            self, "bob_angles", tuple(as_angle(b) for b in self.bob_angles)
        )
        if len(self.alice_angles) != 3 or len(self.bob_angles) != 3:
            raise ValueError("each wing needs exactly three setting angles")
        if not isinstance(self.n_rounds, int) or self.n_rounds < 1000:
            raise ValueError(f"n_rounds must be an integer >= 1000, got {self.n_rounds!r}")
        if not self.alarm_sigma > 0:
            raise ValueError("alarm_sigma must be positive")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an integer in [0, 2^64)")
        pairs = tuple(self.chsh_pairs)
        if len(pairs) != 4 or not all(isinstance(p, ChshPair) for p in pairs):
            raise ValueError("chsh_pairs must be exactly four ChshPair entries")
        for pair in pairs:
            if _angles_match(
                self.alice_angles[pair.alice_idx], self.bob_angles[pair.bob_idx]
            ):
                raise ValueError(
                    f"CHSH pair {pair} uses matched angles; those rounds are key rounds"
                )
        object.__setattr__(self, "chsh_pairs", pairs)
        if not isinstance(self.channel, (QuantumLocalizedChannel, LhvEveChannel)):
            raise ValueError(f"unsupported channel {self.channel!r}")


@dataclass(frozen=True)
class RoundRecord:
    """A single protocol round; outcomes are present exactly when detected."""

    alice_setting: int
    bob_setting: int
    detected: bool
    outcomes: OutcomePair | None

    def __post_init__(self) -> None:
        if self.detected != (self.outcomes is not None):
            raise ValueError("outcomes must be present exactly when detected")


@dataclass(frozen=True)
class ChshEstimate:
    """A CHSH statistic with its standard error."""

    s_value: float
    std_error: float


@dataclass(frozen=True)
class QkdSessionReport:
    """Everything the parties learn from one session."""

    sifted_key_alice: str
    sifted_key_bob: str
    qber: float | None
    chsh_estimate: ChshEstimate
    chsh_unconditioned: ChshEstimate
    verdict: str
    coincidence_rate: float
    n_rounds: int
    n_detected: int
    n_key_rounds: int
    n_test_rounds: tuple[int, int, int, int]


def channel_round_quantum(
    g: float, a: UnitVector3, b: UnitVector3, rng: np.random.Generator
) -> RoundRecord:
    """One quantum-channel round at directions (a, b).

    Detection fires with probability g; conditioned on it the outcomes are
    full singlet statistics, so the unconditioned expectation of
    s_a * s_b * detected is g * (-(a . b)).
    """
    if not 0.0 <= g <= 1.0:
        raise ValueError(f"detection probability g={g!r} outside [0, 1]")
    detected = bool(rng.random() < g)
    outcomes = sample_singlet_outcomes(a, b, rng) if detected else None
    return RoundRecord(0, 0, detected, outcomes)


def channel_round_lhv(
    model: HiddenVariableModel,
    alpha: float,
    beta: float,
    rng: np.random.Generator,
) -> RoundRecord:
    """One hidden-variable-channel round: draw lambda, always detected."""
    lam = float(model.sample_lambda(rng, 1)[0])
    outcomes = sample_model_signs(model, alpha, beta, lam, rng)
    return RoundRecord(0, 0, True, outcomes)


def decide_verdict(s_value: float, std_error: float, k: float) -> str:
    """Classify a CHSH estimate against the classical bound 2.

    Secure when the k-sigma interval lies entirely above 2; Eve detected when
    it lies entirely below 2; inconclusive when it straddles the bound.
    """
    if std_error < 0:
        raise ValueError("std_error must be nonnegative")
    if s_value - k * std_error > 2.0:
        return SECURE
    if s_value + k * std_error < 2.0:
        return EVE_DETECTED
    return INCONCLUSIVE


def detectability_threshold_report(g_values: Sequence[float]) -> list[dict]:
    """Regime classification of localization factors for eavesdropper detection.

    g <= 1/2: the g-scaled cosine correlations admit an exact hidden-variable
    model, so CHSH on unconditioned correlations cannot expose Eve.
    g > 1/sqrt(2): the unconditioned statistic 2*sqrt(2)*g exceeds 2, so a
    violation (hence detection) is possible.  Between the two lies the gap
    that no known construction or impossibility argument covers.
    """
    rows = []
    for g in g_values:
        g = float(g)
        if not 0.0 <= g <= 1.0:
            raise ValueError(f"g={g!r} outside [0, 1]")
        if g <= 0.5:
            regime = "undetectable"
            description = (
                "LHV-reproducible: Eve undetectable by CHSH on unconditioned correlations"
            )
        elif g > 1.0 / math.sqrt(2.0):
            regime = "violation possible"
            description = "unconditioned CHSH can exceed 2: violation possible"
        else:
            regime = "open gap"
            description = "between 1/2 and 1/sqrt(2): no construction or refutation known"
        rows.append(
            {
                "g": g,
                "regime": regime,
                "chsh_max": CHSH_QUANTUM_BOUND * g,
                "description": description,
            }
        )
    return rows


def _pair_estimate(products: np.ndarray) -> tuple[float, float, int]:
    n = products.size
    if n == 0:
        return 0.0, math.inf, 0
    mean = float(np.mean(products))
    std_error = float(np.std(products, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return mean, std_error, n


def _chsh_from_pairs(
    estimates: list[tuple[float, float]], signs: Sequence[int]
) -> ChshEstimate:
    p = [sign * mean for (mean, _), sign in zip(estimates, signs)]
    s_value = abs(p[0] - p[1]) + abs(p[2] + p[3])
    std_error = math.sqrt(sum(se * se for _, se in estimates))
    return ChshEstimate(s_value=s_value, std_error=std_error)


def run_session(
    config: QkdConfig, return_rounds: bool = False
) -> QkdSessionReport | tuple[QkdSessionReport, list[RoundRecord]]:
    """Simulate a full session: rounds, sifting, CHSH audit, verdict.

    Three independent generator streams (settings, channel, outcome signs)
    are split from the seed, and all rounds are generated vectorized in a
    fixed order, so reports are bit-reproducible for a fixed config.
    """
    n = config.n_rounds
    rng_settings, rng_channel, rng_signs = split_generators(config.seed, 3)

    a_idx = rng_settings.integers(0, 3, n)
    b_idx = rng_settings.integers(0, 3, n)
    alice_theta = np.asarray(config.alice_angles)[a_idx]
    bob_theta = np.asarray(config.bob_angles)[b_idx]

    if isinstance(config.channel, QuantumLocalizedChannel):
        detected = rng_channel.random(n) < config.channel.g
        # Both wings measure along (cos t, 0, sin t); a . b = cos(da - db).
        dot = np.cos(alice_theta - bob_theta)
        u_a = rng_signs.random(n)
        u_b = rng_signs.random(n)
        s_a = np.where(u_a < 0.5, 1, -1)
        s_b = np.where(u_b < (1.0 - dot) / 2.0, s_a, -s_a)
    else:
        model = config.channel.model
        lam = np.asarray(model.sample_lambda(rng_channel, n), dtype=float)
        detected = np.ones(n, dtype=bool)
        xi = np.empty(n)
        eta = np.empty(n)
        for setting in range(3):
            mask = a_idx == setting
            xi[mask] = np.asarray(model.xi(config.alice_angles[setting], lam[mask]))
            mask = b_idx == setting
            eta[mask] = np.asarray(model.eta(config.bob_angles[setting], lam[mask]))
        u_a = rng_signs.random(n)
        u_b = rng_signs.random(n)
        s_a = np.where(u_a < (1.0 + xi) / 2.0, 1, -1)
        s_b = np.where(u_b < (1.0 + eta) / 2.0, 1, -1)

    s_a = np.where(detected, s_a, 0).astype(np.int8)
    s_b = np.where(detected, s_b, 0).astype(np.int8)
    # Bob's public flip: physical singlet outcomes anticorrelate at matched
    # angles, so flipped bits agree and test correlations become +cos.
    s_b_flipped = -s_b

    angle_matched = np.zeros((3, 3), dtype=bool)
    for i in range(3):
        for j in range(3):
            angle_matched[i, j] = _angles_match(
                config.alice_angles[i], config.bob_angles[j]
            )
    key_mask = detected & angle_matched[a_idx, b_idx]

    alice_bits = (1 + s_a[key_mask]) // 2
    bob_bits = (1 + s_b_flipped[key_mask]) // 2
    n_key = int(key_mask.sum())
    qber = float(np.mean(alice_bits != bob_bits)) if n_key > 0 else None

    products = (s_a.astype(np.int32) * s_b_flipped.astype(np.int32)).astype(float)
    conditioned: list[tuple[float, float]] = []
    unconditioned: list[tuple[float, float]] = []
    n_test: list[int] = []
    for pair in config.chsh_pairs:
        combo = (a_idx == pair.alice_idx) & (b_idx == pair.bob_idx)
        mean, se, count = _pair_estimate(products[combo & detected])
        conditioned.append((mean, se))
        n_test.append(count)
        mean_u, se_u, _ = _pair_estimate(products[combo])
        unconditioned.append((mean_u, se_u))

    signs = [pair.sign for pair in config.chsh_pairs]
    chsh_cond = _chsh_from_pairs(conditioned, signs)
    chsh_uncond = _chsh_from_pairs(unconditioned, signs)

    if min(n_test) < MIN_TEST_ROUNDS_PER_PAIR:
        verdict = INCONCLUSIVE
    else:
        verdict = decide_verdict(
            chsh_cond.s_value, chsh_cond.std_error, config.alarm_sigma
        )

    report = QkdSessionReport(
        sifted_key_alice="".join("1" if b else "0" for b in alice_bits),
        sifted_key_bob="".join("1" if b else "0" for b in bob_bits),
        qber=qber,
        chsh_estimate=chsh_cond,
        chsh_unconditioned=chsh_uncond,
        verdict=verdict,
        coincidence_rate=float(np.mean(detected)),
        n_rounds=n,
        n_detected=int(detected.sum()),
        n_key_rounds=n_key,
        n_test_rounds=tuple(n_test),  # type: ignore[arg-type]
    )
    if not return_rounds:
        return report
    rounds = [
        RoundRecord(
            int(a_idx[i]),
            int(b_idx[i]),
            bool(detected[i]),
            OutcomePair(int(s_a[i]), int(s_b[i])) if detected[i] else None,
        )
        for i in range(n)
    ]
    return report, rounds


def rounds_to_csv(rounds: Sequence[RoundRecord]) -> str:
    """Per-round log: round, a_idx, b_idx, detected, s_a, s_b (blank if lost)."""
    buffer = io.StringIO()
    buffer.write("round,a_idx,b_idx,detected,s_a,s_b\n")
    for i, record in enumerate(rounds):
        if record.outcomes is None:
            s_a = s_b = ""
        else:
            s_a = str(record.outcomes.s_a)
            s_b = str(record.outcomes.s_b)
        buffer.write(
            f"{i},{record.alice_setting},{record.bob_setting},"
            f"{int(record.detected)},{s_a},{s_b}\n"
        )
    return buffer.getvalue()


# --- JSON (de)serialization -------------------------------------------------


def _channel_to_dict(channel: ChannelModel) -> dict:
    if isinstance(channel, QuantumLocalizedChannel):
        return {"variant": "quantum_localized", "g": channel.g}
    label = channel.model.label
    if label.startswith("cosine(g="):
        g = float(label[len("cosine(g=") : -1])
        return {"variant": "lhv_eve", "model": "cosine", "g": g}
    raise ValueError(
        "only cosine hidden-variable channels are JSON-serializable; "
        f"got model {label or '<unlabeled>'!r}"
    )


def _channel_from_dict(data: dict) -> ChannelModel:
    variant = data.get("variant")
    if variant == "quantum_localized":
        unknown = set(data) - {"variant", "g", "setup", "t"}
        if unknown:
            raise ValueError(f"unknown channel keys: {sorted(unknown)}")
        if "g" in data:
            if "setup" in data:
                raise ValueError("give either g or setup, not both")
            return QuantumLocalizedChannel(g=float(data["g"]))
        setup_spec = data.get("setup")
        if setup_spec is None:
            raise ValueError("quantum_localized channel needs g or setup")
        unknown = set(setup_spec) - {"width_param", "separation", "mass", "hbar"}
        if unknown:
            raise ValueError(f"unknown setup keys: {sorted(unknown)}")
        setup = separated_gaussian_setup(
            float(setup_spec["width_param"]),
            tuple(float(v) for v in setup_spec["separation"]),
            mass=float(setup_spec.get("mass", 1.0)),
            hbar=float(setup_spec.get("hbar", 1.0)),
        )
        return QuantumLocalizedChannel.from_setup(setup, t=float(data.get("t", 0.0)))
    if variant == "lhv_eve":
        unknown = set(data) - {"variant", "model", "g"}
        if unknown:
            raise ValueError(f"unknown channel keys: {sorted(unknown)}")
        if data.get("model") != "cosine":
            raise ValueError("only the 'cosine' hidden-variable model is supported in JSON")
        return LhvEveChannel(model=cosine_model(float(data["g"])))
    raise ValueError(f"unknown channel variant {variant!r}")


def config_to_dict(config: QkdConfig) -> dict:
    return {
        "n_rounds": config.n_rounds,
        "alice_angles": list(config.alice_angles),
        "bob_angles": list(config.bob_angles),
        "chsh_pairs": [[p.alice_idx, p.bob_idx, p.sign] for p in config.chsh_pairs],
        "alarm_sigma": config.alarm_sigma,
        "channel": _channel_to_dict(config.channel),
        "seed": config.seed,
    }


def config_from_dict(data: dict) -> QkdConfig:
    known = {
        "n_rounds",
        "alice_angles",
        "bob_angles",
        "chsh_pairs",
        "alarm_sigma",
        "channel",
        "seed",
    }
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown QKD config keys: {sorted(unknown)}")
    if "channel" not in data:
        raise ValueError("QKD config needs a channel")
    kwargs: dict = {"channel": _channel_from_dict(data["channel"])}
    if "n_rounds" in data:
        kwargs["n_rounds"] = int(data["n_rounds"])
    if "alice_angles" in data:
        kwargs["alice_angles"] = tuple(float(a) for a in data["alice_angles"])
    if "bob_angles" in data:
        kwargs["bob_angles"] = tuple(float(b) for b in data["bob_angles"])
    if "chsh_pairs" in data:
        kwargs["chsh_pairs"] = tuple(
            ChshPair(int(p[0]), int(p[1]), int(p[2]) if len(p) > 2 else 1)
            for p in data["chsh_pairs"]
        )
    if "alarm_sigma" in data:
        kwargs["alarm_sigma"] = float(data["alarm_sigma"])
    if "seed" in data:
        kwargs["seed"] = int(data["seed"])
    return QkdConfig(**kwargs)


def report_to_dict(report: QkdSessionReport) -> dict:
    return {
        "sifted_key_alice": report.sifted_key_alice,
        "sifted_key_bob": report.sifted_key_bob,
        "qber": report.qber,
        "chsh_estimate": {
            "s_value": report.chsh_estimate.s_value,
            "std_error": report.chsh_estimate.std_error,
        },
        "chsh_unconditioned": {
            "s_value": report.chsh_unconditioned.s_value,
            "std_error": report.chsh_unconditioned.std_error,
        },
        "verdict": report.verdict,
        "coincidence_rate": report.coincidence_rate,
        "n_rounds": report.n_rounds,
        "n_detected": report.n_detected,
        "n_key_rounds": report.n_key_rounds,
        "n_test_rounds": list(report.n_test_rounds),
    }


def report_from_dict(data: dict) -> QkdSessionReport:
    known = {
        "sifted_key_alice",
        "sifted_key_bob",
        "qber",
        "chsh_estimate",
        "chsh_unconditioned",
        "verdict",
        "coincidence_rate",
        "n_rounds",
        "n_detected",
        "n_key_rounds",
        "n_test_rounds",
    }
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown QKD report keys: {sorted(unknown)}")
    return QkdSessionReport(
        sifted_key_alice=str(data["sifted_key_alice"]),
        sifted_key_bob=str(data["sifted_key_bob"]),
        qber=None if data["qber"] is None else float(data["qber"]),
        chsh_estimate=ChshEstimate(
            s_value=float(data["chsh_estimate"]["s_value"]),
            std_error=float(data["chsh_estimate"]["std_error"]),
        ),
        chsh_unconditioned=ChshEstimate(
            s_value=float(data["chsh_unconditioned"]["s_value"]),
            std_error=float(data["chsh_unconditioned"]["std_error"]),
        ),
        verdict=str(data["verdict"]),
        coincidence_rate=float(data["coincidence_rate"]),
        n_rounds=int(data["n_rounds"]),
        n_detected=int(data["n_detected"]),
        n_key_rounds=int(data["n_key_rounds"]),
        n_test_rounds=tuple(int(v) for v in data["n_test_rounds"]),
    )
