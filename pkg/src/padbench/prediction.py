"""Synthetic click-target prediction: rank draws, suggestion lists, scenarios.

The predictor itself is modeled, not learned: an accuracy profile gives
the probability that the true target appears at each rank of the
suggestion list, and whatever mass is left over is a miss (true target
absent). Scenarios describe mock application screens with clickable
targets and transitions, optionally with a scripted ranking per screen
so replays are fully deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .rng import Xoshiro256StarStar

_SUM_TOL = 1e-9

SCENARIO_VERSION = 1
END_SCREEN = "END"


@dataclass(frozen=True)
class AccuracyProfile:
    """P(true target shown at rank r) for r = 1..len(p); remainder is miss."""

    name: str
    p: tuple[float, ...]

    def __post_init__(self):
        if not self.p:
            raise ValueError("profile needs at least one rank probability")
        if any(x < 0 for x in self.p):
            raise ValueError("rank probabilities must be >= 0")
        if sum(self.p) > 1.0 + _SUM_TOL:
            raise ValueError("rank probabilities sum to %g > 1" % sum(self.p))

    @property
    def miss_mass(self) -> float:
        return max(0.0, 1.0 - sum(self.p))


IDEAL_95_4_1 = AccuracyProfile(name="ideal", p=(0.95, 0.04, 0.01))
UNIFORM3 = AccuracyProfile(name="uniform3", p=(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0))

PROFILES = {p.name: p for p in (IDEAL_95_4_1, UNIFORM3)}


def draw_rank(profile: AccuracyProfile, rng: Xoshiro256StarStar) -> Optional[int]:
    """Sample the true target's rank (1-based); None means a miss."""
    u = rng.random()
    acc = 0.0
    for i, prob in enumerate(profile.p, start=1):
        acc += prob
        if u < acc:
            return i
    return None


@dataclass(frozen=True)
class Target:
    id: str
    label: str
    center: tuple[float, float]
    width: float
    height: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("target %r needs positive width and height" % self.id)


@dataclass(frozen=True)
class Screen:
    name: str
    targets: tuple[Target, ...]
    max_candidates: int
    transitions: dict = field(default_factory=dict)  # target id -> screen name | END
    scripted_ranking: Optional[tuple[str, ...]] = None

    def target_by_id(self, target_id: str) -> Target:
        for t in self.targets:
            if t.id == target_id:
                return t
        raise KeyError("no target %r on screen %r" % (target_id, self.name))


@dataclass(frozen=True)
class Scenario:
    screens: dict  # name -> Screen
    start: str


@dataclass(frozen=True)
class RankedSuggestions:
    """Ordered candidate targets; true_rank is 1-based, None on a miss."""

    targets: tuple[Target, ...]
    true_rank: Optional[int]

    def __post_init__(self):
        ids = [t.id for t in self.targets]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate targets in suggestion list")
        if self.true_rank is not None and not (1 <= self.true_rank <= len(self.targets)):
            raise ValueError("true_rank %r out of range" % (self.true_rank,))


def rank_targets(screen: Screen, true_target_id: str, profile: AccuracyProfile,
                 rng: Xoshiro256StarStar) -> RankedSuggestions:
    """Build the suggestion list the predictor would show for this click.

    The true target's rank is drawn from the profile; remaining slots are
    filled with distinct other targets of the screen, uniformly without
    replacement. A screen's scripted ranking overrides all of this and is
    returned verbatim.
    """
    true_target = screen.target_by_id(true_target_id)

    if screen.scripted_ranking is not None:
        targets = tuple(screen.target_by_id(tid) for tid in screen.scripted_ranking)
        true_rank = None
        for i, t in enumerate(targets, start=1):
            if t.id == true_target_id:
                true_rank = i
                break
        return RankedSuggestions(targets=targets, true_rank=true_rank)

    n = min(len(profile.p), screen.max_candidates)
    length = min(n, len(screen.targets))
    rank = draw_rank(profile, rng)

    others = [t for t in screen.targets if t.id != true_target_id]
    if rank is None:
        # miss: true target not shown at all
        k = min(length, len(others))
        picks = rng.sample_indices(len(others), k)
        return RankedSuggestions(targets=tuple(others[i] for i in picks), true_rank=None)

    rank = min(rank, length)  # only reachable on under-filled screens
    k = min(length - 1, len(others))
    picks = rng.sample_indices(len(others), k)
    fillers = [others[i] for i in picks]
    suggestions = fillers[: rank - 1] + [true_target] + fillers[rank - 1:]
    return RankedSuggestions(targets=tuple(suggestions), true_rank=rank)


# --- scenario documents -----------------------------------------------------


class ScenarioError(ValueError):
    """Invalid scenario document; message names the offending path."""


def _fail(path: str, message: str):
    raise ScenarioError("%s: %s" % (path, message))


def _require(obj: dict, key: str, kind, path: str):
    if key not in obj:
        _fail(path, "missing %r" % key)
    value = obj[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            _fail("%s.%s" % (path, key), "expected a number, got %r" % (value,))
        return float(value)
    if not isinstance(value, kind):
        _fail("%s.%s" % (path, key), "expected %s, got %r" % (kind.__name__, value))
    return value


def load_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document (JSON, versioned)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError("not valid JSON: %s" % e) from e
    if not isinstance(doc, dict):
        _fail("$", "expected an object")
    version = _require(doc, "version", int, "$")
    if version != SCENARIO_VERSION:
        _fail("$.version", "unsupported version %r" % version)
    start = _require(doc, "start", str, "$")
    raw_screens = _require(doc, "screens", list, "$")
    if not raw_screens:
        _fail("$.screens", "scenario has no screens")

    screens: dict = {}
    for si, raw in enumerate(raw_screens):
        path = "$.screens[%d]" % si
        if not isinstance(raw, dict):
            _fail(path, "expected an object")
        name = _require(raw, "name", str, path)
        if name == END_SCREEN:
            _fail("%s.name" % path, "%r is reserved" % END_SCREEN)
        if name in screens:
            _fail("%s.name" % path, "duplicate screen %r" % name)
        max_candidates = _require(raw, "max_candidates", int, path)
        raw_targets = _require(raw, "targets", list, path)
        if not raw_targets:
            _fail("%s.targets" % path, "screen has no targets")
        targets = []
        seen = set()
        for ti, rt in enumerate(raw_targets):
            tpath = "%s.targets[%d]" % (path, ti)
            if not isinstance(rt, dict):
                _fail(tpath, "expected an object")
            tid = _require(rt, "id", str, tpath)
            if tid in seen:
                _fail("%s.id" % tpath, "duplicate target %r" % tid)
            seen.add(tid)
            label = _require(rt, "label", str, tpath)
            x = _require(rt, "x", float, tpath)
            y = _require(rt, "y", float, tpath)
            w = _require(rt, "w", float, tpath)
            h = _require(rt, "h", float, tpath)
            if w <= 0 or h <= 0:
                _fail(tpath, "target %r needs positive w and h" % tid)
            targets.append(Target(id=tid, label=label, center=(x, y), width=w, height=h))
        if not (1 <= max_candidates <= len(targets)):
            _fail("%s.max_candidates" % path,
                  "%d not in 1..%d (target count)" % (max_candidates, len(targets)))

        transitions = raw.get("transitions", {})
        if not isinstance(transitions, dict):
            _fail("%s.transitions" % path, "expected an object")
        for tid in transitions:
            if tid not in seen:
                _fail("%s.transitions.%s" % (path, tid), "unknown target %r" % tid)

        scripted = raw.get("scripted_ranking")
        if scripted is not None:
            spath = "%s.scripted_ranking" % path
            if not isinstance(scripted, list) or not all(isinstance(s, str) for s in scripted):
                _fail(spath, "expected a list of target ids")
            if len(set(scripted)) != len(scripted):
                _fail(spath, "duplicate target ids")
            if len(scripted) > max_candidates:
                _fail(spath, "longer than max_candidates (%d)" % max_candidates)
            for s in scripted:
                if s not in seen:
                    _fail(spath, "unknown target %r" % s)
            scripted = tuple(scripted)

        screens[name] = Screen(
            name=name,
            targets=tuple(targets),
            max_candidates=max_candidates,
            transitions=dict(transitions),
            scripted_ranking=scripted,
        )

    if start not in screens:
        _fail("$.start", "unknown screen %r" % start)
    for name, screen in screens.items():
        for tid, dest in screen.transitions.items():
            if not isinstance(dest, str):
                _fail("$.screens[%s].transitions.%s" % (name, tid), "expected a screen name")
            if dest != END_SCREEN and dest not in screens:
                _fail("$.screens[%s].transitions.%s" % (name, tid),
                      "unknown destination screen %r" % dest)

    return Scenario(screens=screens, start=start)


def load_scenario_file(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as f:
        return load_scenario(f.read())
