"""Preview-Accept-Discard chord grammar as a pure, replayable state machine.

Two modifier keys held together open a preview of the predicted click
target; a cycle key steps through ranked candidates; releasing both
modifiers within the release window accepts the highlighted candidate,
releasing them further apart discards. The machine is driven purely by
timestamped key edges, so any interactive session can be recorded and
replayed bit-identically.

State diagram (window = release_window_ms, N = max_candidates)::

    Idle --ModA/ModB down--> Armed{which, t_down}
    Armed --other mod down--> Preview{1}            emits EnterPreview
    Armed --held mod up-----> Idle
    Preview{i} --cycle down--> Preview{(i mod N)+1}  emits Cycle
    Preview{i} --mod up------> ReleasePending{i, t, remaining}
    ReleasePending --remaining up, dt <= window--> Idle   emits Accept{i}
    ReleasePending --remaining up, dt >  window--> Idle   emits Discard
    ReleasePending --timeout at t >= deadline----> Expired emits Discard
    ReleasePending --released mod down again-----> Preview{i}
    Expired --remaining up--> Idle
    Expired --other mod down--> Preview{1}          emits EnterPreview

Everything else (ordinary typing, cycle presses outside Preview, key
repeats) is a Noop that leaves the state unchanged, so the grammar is
total over the whole event alphabet. Timeouts are injected as events by
the caller; `next_deadline` says when one is due, which keeps the
machine itself free of clocks.

The boundary is inclusive: a release gap of exactly `release_window_ms`
still accepts.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Union

DEFAULT_RELEASE_WINDOW_MS = 170
DEFAULT_MAX_CANDIDATES = 6


class Key(Enum):
    MOD_A = "MOD_A"
    MOD_B = "MOD_B"
    CYCLE = "CYCLE"
    TIMEOUT = "TIMEOUT"
    OTHER = "OTHER"


class Edge(Enum):
    DOWN = "down"
    UP = "up"


_MODS = (Key.MOD_A, Key.MOD_B)


@dataclass(frozen=True)
class KeyEvent:
    """One key edge. `code` distinguishes pass-through (OTHER) keys."""

    t: int
    key: Key
    edge: Edge
    code: Optional[int] = None

    def ident(self) -> tuple:
        # identity used for down/up bookkeeping
        return (self.key, self.code)


@dataclass(frozen=True)
class PadConfig:
    release_window_ms: int = DEFAULT_RELEASE_WINDOW_MS
    max_candidates: int = DEFAULT_MAX_CANDIDATES
    emit_discard_on_timeout: bool = True

    def __post_init__(self):
        if self.release_window_ms <= 0:
            raise ValueError("release_window_ms must be positive")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be >= 1")


# --- states ---------------------------------------------------------------


@dataclass(frozen=True)
class Idle:
    pass


@dataclass(frozen=True)
class Armed:
    which: Key
    t_down: int


@dataclass(frozen=True)
class Preview:
    index: int


@dataclass(frozen=True)
class ReleasePending:
    index: int
    first_release_t: int
    remaining: Key


@dataclass(frozen=True)
class Expired:
    remaining: Key


PadState = Union[Idle, Armed, Preview, ReleasePending, Expired]


# --- actions --------------------------------------------------------------


@dataclass(frozen=True)
class EnterPreview:
    index: int = 1


@dataclass(frozen=True)
class Cycle:
    index: int


@dataclass(frozen=True)
class Accept:
    index: int


@dataclass(frozen=True)
class Discard:
    pass


@dataclass(frozen=True)
class Noop:
    pass


PadAction = Union[EnterPreview, Cycle, Accept, Discard, Noop]


def render_action(action: PadAction) -> str:
    if isinstance(action, EnterPreview):
        return "EnterPreview"
    if isinstance(action, Cycle):
        return "Cycle{%d}" % action.index
    if isinstance(action, Accept):
        return "Accept{%d}" % action.index
    if isinstance(action, Discard):
        return "Discard"
    return "Noop"


@dataclass(frozen=True)
class TimedAction:
    t: int
    action: PadAction

    def render(self) -> str:
        return "%s@%d" % (render_action(self.action), self.t)


class ReleaseKind(Enum):
    SIMULTANEOUS = "simultaneous"
    SEQUENTIAL = "sequential"


def classify_release(delta_ms: float, window_ms: float = DEFAULT_RELEASE_WINDOW_MS) -> ReleaseKind:
    """Simultaneous iff the gap between the two mod releases is <= window."""
    if delta_ms < 0:
        raise ValueError("release gap cannot be negative")
    if delta_ms <= window_ms:
        return ReleaseKind.SIMULTANEOUS
    return ReleaseKind.SEQUENTIAL


def next_deadline(state: PadState, config: PadConfig) -> Optional[int]:
    """When a timeout event is due, or None. Callers schedule from this."""
    if isinstance(state, ReleasePending) and config.emit_discard_on_timeout:
        return state.first_release_t + config.release_window_ms
    return None


def _other_mod(mod: Key) -> Key:
    return Key.MOD_B if mod is Key.MOD_A else Key.MOD_A


def step(state: PadState, event: KeyEvent, config: PadConfig) -> tuple[PadState, PadAction]:
    """One transition. Total: every (state, event) yields exactly one result.

    Assumes a valid stream (monotonic timestamps, alternating edges per
    key); `replay` and `PadMachine` enforce that and report violations.
    """
    key, edge, t = event.key, event.edge, event.t

    if isinstance(state, Idle):
        if key in _MODS and edge is Edge.DOWN:
            return Armed(which=key, t_down=t), Noop()
        return state, Noop()

    if isinstance(state, Armed):
        if key in _MODS and edge is Edge.DOWN and key is not state.which:
            return Preview(index=1), EnterPreview()
        if key is state.which and edge is Edge.UP:
            return Idle(), Noop()
        return state, Noop()

    if isinstance(state, Preview):
        if key is Key.CYCLE and edge is Edge.DOWN:
            nxt = (state.index % config.max_candidates) + 1
            return Preview(index=nxt), Cycle(index=nxt)
        if key in _MODS and edge is Edge.UP:
            return (
                ReleasePending(index=state.index, first_release_t=t, remaining=_other_mod(key)),
                Noop(),
            )
        return state, Noop()

    if isinstance(state, ReleasePending):
        if key is state.remaining and edge is Edge.UP:
            delta = t - state.first_release_t
            if classify_release(delta, config.release_window_ms) is ReleaseKind.SIMULTANEOUS:
                return Idle(), Accept(index=state.index)
            return Idle(), Discard()
        if key is _other_mod(state.remaining) and edge is Edge.DOWN:
            # re-press before the window runs out: back to previewing
            return Preview(index=state.index), Noop()
        if key is Key.TIMEOUT and edge is Edge.DOWN:
            if config.emit_discard_on_timeout and t >= state.first_release_t + config.release_window_ms:
                return Expired(remaining=state.remaining), Discard()
            return state, Noop()
        return state, Noop()

    if isinstance(state, Expired):
        if key is state.remaining and edge is Edge.UP:
            return Idle(), Noop()
        if key is _other_mod(state.remaining) and edge is Edge.DOWN:
            # both mods held again: a fresh preview session
            return Preview(index=1), EnterPreview()
        return state, Noop()

    raise TypeError("unknown state %r" % (state,))


# --- stream validation and replay ----------------------------------------


class StreamError(ValueError):
    """Invalid event stream; `index` is the offending event's position."""

    def __init__(self, index: int, message: str):
        super().__init__("event %d: %s" % (index, message))
        self.index = index
        self.message = message


class PadMachine:
    """Stateful wrapper: feeds events through `step` with stream checks.

    Timeout events are synthetic scheduler ticks, so they are exempt from
    the down/up alternation rule that applies to physical keys.
    """

    def __init__(self, config: Optional[PadConfig] = None):
        self.config = config or PadConfig()
        self.state: PadState = Idle()
        self._down: set = set()
        self._last_t: Optional[int] = None
        self._count = 0

    def feed(self, event: KeyEvent) -> PadAction:
        index = self._count
        if event.t < 0:
            raise StreamError(index, "negative timestamp %d" % event.t)
        if self._last_t is not None and event.t < self._last_t:
            raise StreamError(
                index, "timestamp %d is before %d" % (event.t, self._last_t)
            )
        if event.key is not Key.TIMEOUT:
            ident = event.ident()
            if event.edge is Edge.DOWN:
                if ident in self._down:
                    raise StreamError(index, "key %s already down" % _render_key(event))
                self._down.add(ident)
            else:
                if ident not in self._down:
                    raise StreamError(index, "key %s is not down" % _render_key(event))
                self._down.discard(ident)
        self._last_t = event.t
        self._count += 1
        self.state, action = step(self.state, event, self.config)
        return action

    def next_deadline(self) -> Optional[int]:
        return next_deadline(self.state, self.config)


def replay(events: Iterable[KeyEvent], config: Optional[PadConfig] = None) -> list[TimedAction]:
    """Fold a recorded stream into its action sequence (Noop suppressed).

    Raises StreamError with the offending event index on invalid input.
    Pure: same events and config always give the identical action list.
    """
    machine = PadMachine(config)
    out: list[TimedAction] = []
    for event in events:
        action = machine.feed(event)
        if not isinstance(action, Noop):
            out.append(TimedAction(t=event.t, action=action))
    return out


def render_actions(actions: Iterable[TimedAction]) -> str:
    return "\n".join(a.render() for a in actions)


# --- event-log text format -------------------------------------------------

EVENT_LOG_HEADER = "t_ms,key,edge"


class EventLogError(ValueError):
    """Malformed event-log text; `line` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__("line %d: %s" % (line, message))
        self.line = line
        self.message = message


def _render_key(event: KeyEvent) -> str:
    if event.key is Key.OTHER:
        return "OTHER:%d" % (event.code if event.code is not None else 0)
    return event.key.value


def format_events(events: Iterable[KeyEvent]) -> str:
    """Serialize to the event-log text format (header + one edge per line)."""
    lines = [EVENT_LOG_HEADER]
    for e in events:
        lines.append("%d,%s,%s" % (e.t, _render_key(e), e.edge.value))
    return "\n".join(lines) + "\n"


def _parse_key(text: str, line: int) -> tuple[Key, Optional[int]]:
    if text.startswith("OTHER:"):
        raw = text[len("OTHER:"):]
        if not raw.isdigit():
            raise EventLogError(line, "bad key code %r" % raw)
        return Key.OTHER, int(raw)
    for key in (Key.MOD_A, Key.MOD_B, Key.CYCLE, Key.TIMEOUT):
        if text == key.value:
            return key, None
    raise EventLogError(line, "unknown key %r" % text)


def parse_events(text: str) -> list[KeyEvent]:
    """Parse the event-log text format. Empty input is an empty trace."""
    if text.strip() == "":
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    if lines[0] != EVENT_LOG_HEADER:
        raise EventLogError(1, "expected header %r, got %r" % (EVENT_LOG_HEADER, lines[0]))
    events: list[KeyEvent] = []
    for i, raw in enumerate(lines[1:], start=2):
        if raw == "":
            raise EventLogError(i, "blank line")
        parts = raw.split(",")
        if len(parts) != 3:
            raise EventLogError(i, "expected 3 fields, got %d" % len(parts))
        t_raw, key_raw, edge_raw = parts
        if not t_raw.isdigit():
            raise EventLogError(i, "bad timestamp %r" % t_raw)
        key, code = _parse_key(key_raw, i)
        if edge_raw == Edge.DOWN.value:
            edge = Edge.DOWN
        elif edge_raw == Edge.UP.value:
            edge = Edge.UP
        else:
            raise EventLogError(i, "unknown edge %r" % edge_raw)
        events.append(KeyEvent(t=int(t_raw), key=key, edge=edge, code=code))
    return events
