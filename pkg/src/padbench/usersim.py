"""Monte Carlo synthetic users for the ring task, trackpad vs chord entry.

Trackpad trials follow a noisy affine movement-time law in the index of
difficulty, with occasional misses (corrective click) and clutch
segments. Chord (pad) trials pay a reaction plus decision cost that
grows with the candidate count and the number of cycle presses, plus a
small residual movement-time slope; release-gap jitter can misfire the
chord into an accidental discard, which costs a retry but is not an
error. The only error source for pad trials is accepting a wrong
suggestion after cycling past the intended one.

Every trial draws from its own seeded substream, so single trials can be
regenerated without replaying the run and runs are reproducible
bit-for-bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from . import taskgen
from .core import DEFAULT_RELEASE_WINDOW_MS
from .prediction import (
    PROFILES,
    AccuracyProfile,
    Scenario,
    draw_rank,
    rank_targets,
)
from .records import RunLog, TrialRecord
from .rng import Xoshiro256StarStar, derive_seed

LEARNING_TRIALS = 5
DEFAULT_LEARNING_AMP = 0.5

# floor on the multiplicative noise factor so times stay positive
_NOISE_FLOOR = 0.05


@dataclass(frozen=True)
class MotorParams:
    """Pointing-side parameters (shared noise model for both devices)."""

    fitts_a: float
    fitts_b: float
    mt_noise_cv: float
    miss_rate: float
    correction_penalty_ms: float
    clutch_rate: float = 0.0  # mean extra gesture segments per trackpad trial

    def __post_init__(self):
        if self.fitts_b <= 0:
            raise ValueError("fitts_b must be positive")
        if not (0.0 <= self.miss_rate < 1.0):
            raise ValueError("miss_rate must be in [0, 1)")
        for name in ("fitts_a", "mt_noise_cv", "correction_penalty_ms", "clutch_rate"):
            if getattr(self, name) < 0:
                raise ValueError("%s must be >= 0" % name)


@dataclass(frozen=True)
class DecisionParams:
    """Chord-side parameters: reaction, per-candidate costs, release jitter."""

    react_ms: float
    hick_ms_per_bit: float
    verify_ms_per_option: float
    cycle_press_ms: float
    release_gap_mu_ms: float
    release_gap_sigma_ms: float
    overshoot_prob: float
    fitts_b_pad: float

    def __post_init__(self):
        for name in ("react_ms", "hick_ms_per_bit", "verify_ms_per_option",
                     "cycle_press_ms", "release_gap_mu_ms", "release_gap_sigma_ms",
                     "fitts_b_pad"):
            if getattr(self, name) < 0:
                raise ValueError("%s must be >= 0" % name)
        if not (0.0 <= self.overshoot_prob < 1.0):
            raise ValueError("overshoot_prob must be in [0, 1)")


@dataclass(frozen=True)
class Params:
    motor: MotorParams
    decision: DecisionParams

    def to_json(self) -> str:
        return json.dumps(
            {"motor": asdict(self.motor), "decision": asdict(self.decision)},
            indent=2, sort_keys=True,
        ) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Params":
        doc = json.loads(text)
        return cls(
            motor=MotorParams(**doc["motor"]),
            decision=DecisionParams(**doc["decision"]),
        )


def load_params(path) -> Params:
    with open(path, "r", encoding="utf-8") as f:
        return Params.from_json(f.read())


def save_params(path, params: Params):
    with open(path, "w", encoding="utf-8") as f:
        f.write(params.to_json())


def learning_multiplier(trial_idx: int, amp: float = DEFAULT_LEARNING_AMP) -> float:
    """Warm-up slowdown: 1+amp at trial 1 decaying to 1 after trial 5."""
    if trial_idx <= LEARNING_TRIALS:
        return 1.0 + amp * (LEARNING_TRIALS + 1 - trial_idx) / LEARNING_TRIALS
    return 1.0


def _noise_mult(rng: Xoshiro256StarStar, cv: float) -> float:
    if cv == 0.0:
        return 1.0
    return max(1.0 + rng.normal(0.0, cv), _NOISE_FLOOR)


def simulate_trackpad_trial(trial_idx: int, id_bits: float, amplitude_px: float,
                            width_px: float, motor: MotorParams,
                            rng: Xoshiro256StarStar,
                            learning_mult: float = 1.0) -> TrialRecord:
    """One pointing trial: mt = (a + b*ID) * noise, plus a miss penalty.

    Clutch segments add strokes but no time (the affine law already
    describes the whole movement); a miss adds a corrective click.
    """
    extra_segments = rng.poisson(motor.clutch_rate)
    miss = rng.chance(motor.miss_rate)
    mt = (motor.fitts_a + motor.fitts_b * id_bits) * _noise_mult(rng, motor.mt_noise_cv)
    if miss:
        mt += motor.correction_penalty_ms
    mt *= learning_mult
    return TrialRecord(
        trial_idx=trial_idx,
        id_bits=id_bits,
        amplitude_px=amplitude_px,
        width_px=width_px,
        mt_ms=mt,
        error=miss,
        strokes=1 + extra_segments + (1 if miss else 0),
        keypresses=0,
        clicks=1 + (1 if miss else 0),
        previews=0,
        cycles=0,
        discards=0,
        pointer_travel_px=amplitude_px + (width_px if miss else 0.0),
        saved_px=0.0,
    )


def _chord_attempt_ms(cycles: int, id_bits: float, n_candidates: int,
                      decision: DecisionParams, cv: float,
                      rng: Xoshiro256StarStar) -> float:
    base = (
        decision.react_ms
        + decision.hick_ms_per_bit * math.log2(n_candidates + 1)
        + cycles * (decision.cycle_press_ms + decision.verify_ms_per_option)
        + decision.fitts_b_pad * id_bits
    )
    return base * _noise_mult(rng, cv)


def simulate_pad_trial(trial_idx: int, id_bits: float, amplitude_px: float,
                       width_px: float, profile: AccuracyProfile,
                       motor: MotorParams, decision: DecisionParams,
                       rng: Xoshiro256StarStar,
                       release_window_ms: float = DEFAULT_RELEASE_WINDOW_MS,
                       learning_mult: float = 1.0) -> TrialRecord:
    """One chord trial against the ranked-suggestion predictor.

    Draw order (fixed for reproducibility): rank, overshoot, wrong-accept,
    attempt noise, release gap, then the retry's noise and gap if the
    first release misfired.
    """
    n = len(profile.p)
    rank = draw_rank(profile, rng)

    if rank is None:
        # predictor never showed the target: scan everything, give up
        cycles = n
        mt = _chord_attempt_ms(cycles, id_bits, n, decision, motor.mt_noise_cv, rng)
        mt *= learning_mult
        return TrialRecord(
            trial_idx=trial_idx, id_bits=id_bits, amplitude_px=amplitude_px,
            width_px=width_px, mt_ms=mt, error=True,
            strokes=1 + cycles, keypresses=2 + cycles, clicks=0,
            previews=1, cycles=cycles, discards=1,
            pointer_travel_px=0.0, saved_px=0.0,
        )

    # overshoot: blow past the intended suggestion mid-list; at the end of
    # the list the wrap to rank 1 is salient, so it cannot slip by unnoticed
    eligible = 2 <= rank <= n - 1
    overshoot = eligible and rng.chance(decision.overshoot_prob)
    wrong = overshoot and rng.chance(1.0 / (2 * n))
    if overshoot:
        cycles = rank if wrong else (rank - 1) + n
    else:
        cycles = rank - 1

    mt = _chord_attempt_ms(cycles, id_bits, n, decision, motor.mt_noise_cv, rng)
    gap = abs(rng.normal(decision.release_gap_mu_ms, decision.release_gap_sigma_ms))
    mt += gap
    previews = 1
    discards = 0
    total_cycles = cycles
    strokes = 1 + cycles
    keypresses = 2 + cycles
    error = wrong

    if gap > release_window_ms:
        # misrelease: accidental discard, then one careful retry
        discards = 1
        error = False
        retry_cycles = rank - 1
        mt += _chord_attempt_ms(retry_cycles, id_bits, n, decision, motor.mt_noise_cv, rng)
        mt += min(abs(rng.normal(decision.release_gap_mu_ms, decision.release_gap_sigma_ms)),
                  float(release_window_ms))
        previews = 2
        total_cycles += retry_cycles
        strokes += 1 + retry_cycles
        keypresses += 2 + retry_cycles

    mt *= learning_mult
    return TrialRecord(
        trial_idx=trial_idx, id_bits=id_bits, amplitude_px=amplitude_px,
        width_px=width_px, mt_ms=mt, error=error,
        strokes=strokes, keypresses=keypresses, clicks=0,
        previews=previews, cycles=total_cycles, discards=discards,
        pointer_travel_px=0.0, saved_px=amplitude_px,
    )


@dataclass(frozen=True)
class SimCondition:
    """What to simulate: device, predictor profile, ring difficulty."""

    name: str
    device: str  # "trackpad" | "pad"
    id_bits: float
    profile: Optional[AccuracyProfile] = None
    width_px: float = taskgen.DEFAULT_WIDTH_PX
    n_targets: int = taskgen.DEFAULT_N_TARGETS

    def __post_init__(self):
        if self.device == "pad" and self.profile is None:
            raise ValueError("pad condition needs an accuracy profile")


def simulate_run(condition: SimCondition, params: Params, seed: int,
                 n_trials: int = taskgen.DEFAULT_N_TRIALS,
                 learning_amp: float = DEFAULT_LEARNING_AMP,
                 run_id: Optional[str] = None,
                 release_window_ms: float = DEFAULT_RELEASE_WINDOW_MS) -> RunLog:
    """One block of trials under a condition; fully determined by `seed`."""
    layout = taskgen.layout_for_id(condition.id_bits, condition.width_px,
                                   condition.n_targets)
    taskgen.trial_sequence(layout, n_trials)  # validates the plan exists
    id_bits = layout.id_bits
    records = []
    for trial_idx in range(1, n_trials + 1):
        rng = Xoshiro256StarStar.from_path(seed, trial_idx)
        mult = learning_multiplier(trial_idx, learning_amp)
        if condition.device == "trackpad":
            rec = simulate_trackpad_trial(
                trial_idx, id_bits, layout.amplitude_px, layout.width_px,
                params.motor, rng, learning_mult=mult,
            )
        else:
            rec = simulate_pad_trial(
                trial_idx, id_bits, layout.amplitude_px, layout.width_px,
                condition.profile, params.motor, params.decision, rng,
                release_window_ms=release_window_ms, learning_mult=mult,
            )
        records.append(rec)
    return RunLog(
        run_id=run_id or ("%s_%g_%d" % (condition.name, condition.id_bits, seed)),
        condition=condition.name,
        device=condition.device,
        profile=condition.profile.name if condition.profile else None,
        seed=seed,
        records=tuple(records),
    )


DEFAULT_IDS = (4.0, 5.0, 6.0)
# runs per ID so that post-warm-up trial counts reach the reference corpus sizes
DEFAULT_RUNS_PER_ID = {"pad_ideal": 3, "pad_uniform3": 4, "trackpad": 7}


def benchmark_conditions(ids=DEFAULT_IDS) -> dict:
    """The three standard conditions at each ring difficulty."""
    out = {}
    for name, device, profile in (
        ("pad_ideal", "pad", PROFILES["ideal"]),
        ("pad_uniform3", "pad", PROFILES["uniform3"]),
        ("trackpad", "trackpad", None),
    ):
        out[name] = [
            SimCondition(name=name, device=device, id_bits=i, profile=profile)
            for i in ids
        ]
    return out


def benchmark_corpus(params: Params, seed: int,
                     runs_per_id: Optional[dict] = None,
                     ids=DEFAULT_IDS,
                     n_trials: int = taskgen.DEFAULT_N_TRIALS,
                     learning_amp: float = DEFAULT_LEARNING_AMP) -> list[RunLog]:
    """Simulate the full three-condition corpus; deterministic in `seed`."""
    runs_per_id = dict(DEFAULT_RUNS_PER_ID if runs_per_id is None else runs_per_id)
    logs = []
    conditions = benchmark_conditions(ids)
    for ci, name in enumerate(sorted(conditions)):
        for ii, cond in enumerate(conditions[name]):
            for run_idx in range(runs_per_id[name]):
                run_seed = derive_seed(seed, ci, ii, run_idx)
                logs.append(simulate_run(
                    cond, params, run_seed, n_trials=n_trials,
                    learning_amp=learning_amp,
                    run_id="%s_%g_%d" % (name, cond.id_bits, run_idx),
                ))
    return logs


# --- scripted scenario walkthrough ------------------------------------------


def replay_scenario_session(scenario: Scenario, task: list[str],
                            cursor: tuple[float, float],
                            decision: DecisionParams,
                            profile: AccuracyProfile = PROFILES["ideal"],
                            rng: Optional[Xoshiro256StarStar] = None,
                            run_id: str = "scenario") -> RunLog:
    """Walk a scenario accepting `task` targets in order, chords only.

    The pointer never moves: every accept records the distance it would
    have had to travel as saved_px. Timing is the deterministic part of
    the decision model (gap at its mean, no noise), so replays are stable
    unless an unscripted screen forces a rank draw through `rng`.
    """
    screen = scenario.screens[scenario.start]
    records = []
    for trial_idx, target_id in enumerate(task, start=1):
        if screen.scripted_ranking is None and rng is None:
            raise ValueError("screen %r has no scripted ranking; pass an rng" % screen.name)
        ranked = rank_targets(screen, target_id, profile,
                              rng or Xoshiro256StarStar(0))
        if ranked.true_rank is None:
            raise ValueError("target %r not in suggestions on screen %r"
                             % (target_id, screen.name))
        rank = ranked.true_rank
        n = len(ranked.targets)
        cycles = rank - 1
        mt = (
            decision.react_ms
            + decision.hick_ms_per_bit * math.log2(n + 1)
            + cycles * (decision.cycle_press_ms + decision.verify_ms_per_option)
            + decision.release_gap_mu_ms
        )
        target = screen.target_by_id(target_id)
        dist = math.hypot(target.center[0] - cursor[0], target.center[1] - cursor[1])
        if dist <= 0:
            raise ValueError("cursor already on target %r; nothing to save" % target_id)
        width = min(target.width, target.height)
        records.append(TrialRecord(
            trial_idx=trial_idx,
            id_bits=taskgen.index_of_difficulty(dist, width),
            amplitude_px=dist,
            width_px=width,
            mt_ms=mt,
            error=False,
            strokes=1 + cycles,
            keypresses=2 + cycles,
            clicks=0,
            previews=1,
            cycles=cycles,
            discards=0,
            pointer_travel_px=0.0,
            saved_px=dist,
        ))
        dest = screen.transitions.get(target_id)
        if dest is None:
            raise ValueError("accepting %r on screen %r leads nowhere"
                             % (target_id, screen.name))
        if dest == "END":
            if trial_idx != len(task):
                raise ValueError("session ended before task did")
            break
        screen = scenario.screens[dest]
    return RunLog(
        run_id=run_id,
        condition="scenario",
        device="pad",
        profile="scripted",
        seed=0,
        records=tuple(records),
    )
