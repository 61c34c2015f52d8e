// Preview-Accept-Discard chord grammar as a pure, replayable state machine.
//
// This is a line-for-line port of the reference engine that ships with the
// padbench Python package; the shared golden traces in that package are the
// conformance contract between the two. Two modifier keys held together open
// a preview of the predicted click target; the cycle key steps through ranked
// candidates; releasing both modifiers within the release window accepts,
// releasing them further apart discards. The machine is driven purely by
// timestamped key edges, so any interactive session can be recorded and
// replayed bit-identically.
//
// The release boundary is inclusive: a gap of exactly releaseWindowMs still
// accepts. Timeouts are injected as events by the caller; nextDeadline says
// when one is due, which keeps the machine itself free of clocks.

export const DEFAULT_RELEASE_WINDOW_MS = 170;
export const DEFAULT_MAX_CANDIDATES = 6;

export type ModKey = "MOD_A" | "MOD_B";
export type Key = ModKey | "CYCLE" | "TIMEOUT" | "OTHER";
export type Edge = "down" | "up";

// One key edge. `code` distinguishes pass-through (OTHER) keys.
export type KeyEvent = {
  t: number;
  key: Key;
  edge: Edge;
  code?: number;
};

export type PadConfig = {
  releaseWindowMs: number;
  maxCandidates: number;
  emitDiscardOnTimeout: boolean;
};

export function makeConfig(overrides: Partial<PadConfig> = {}): PadConfig {
  const config: PadConfig = {
    releaseWindowMs: DEFAULT_RELEASE_WINDOW_MS,
    maxCandidates: DEFAULT_MAX_CANDIDATES,
    emitDiscardOnTimeout: true,
    ...overrides,
  };
  if (!Number.isInteger(config.releaseWindowMs) || config.releaseWindowMs <= 0) {
    throw new Error("releaseWindowMs must be a positive integer");
  }
  if (!Number.isInteger(config.maxCandidates) || config.maxCandidates < 1) {
    throw new Error("maxCandidates must be >= 1");
  }
  return config;
}

export type PadState =
  | { kind: "idle" }
  | { kind: "armed"; which: ModKey; tDown: number }
  | { kind: "preview"; index: number }
  | { kind: "releasePending"; index: number; firstReleaseT: number; remaining: ModKey }
  | { kind: "expired"; remaining: ModKey };

export const IDLE: PadState = { kind: "idle" };

export type PadAction =
  | { kind: "enterPreview"; index: 1 }
  | { kind: "cycle"; index: number }
  | { kind: "accept"; index: number }
  | { kind: "discard" }
  | { kind: "noop" };

const NOOP: PadAction = { kind: "noop" };
const ENTER_PREVIEW: PadAction = { kind: "enterPreview", index: 1 };

export function renderAction(action: PadAction): string {
  switch (action.kind) {
    case "enterPreview":
      return "EnterPreview";
    case "cycle":
      return `Cycle{${action.index}}`;
    case "accept":
      return `Accept{${action.index}}`;
    case "discard":
      return "Discard";
    case "noop":
      return "Noop";
  }
}

export type TimedAction = { t: number; action: PadAction };

export function renderTimedAction(a: TimedAction): string {
  return `${renderAction(a.action)}@${a.t}`;
}

export function isMod(key: Key): key is ModKey {
  return key === "MOD_A" || key === "MOD_B";
}

export function otherMod(mod: ModKey): ModKey {
  return mod === "MOD_A" ? "MOD_B" : "MOD_A";
}

export type ReleaseKind = "simultaneous" | "sequential";

// Simultaneous iff the gap between the two mod releases is <= window.
export function classifyRelease(
  deltaMs: number,
  windowMs: number = DEFAULT_RELEASE_WINDOW_MS,
): ReleaseKind {
  if (deltaMs < 0) throw new Error("release gap cannot be negative");
  return deltaMs <= windowMs ? "simultaneous" : "sequential";
}

// When a timeout event is due, or null. Callers schedule from this.
export function nextDeadline(state: PadState, config: PadConfig): number | null {
  if (state.kind === "releasePending" && config.emitDiscardOnTimeout) {
    return state.firstReleaseT + config.releaseWindowMs;
  }
  return null;
}

// One transition. Total: every (state, event) yields exactly one result.
// Assumes a valid stream (monotonic timestamps, alternating edges per key);
// replay and PadMachine enforce that and report violations.
export function step(
  state: PadState,
  event: KeyEvent,
  config: PadConfig,
): [PadState, PadAction] {
  const { t, key, edge } = event;

  switch (state.kind) {
    case "idle":
      if (isMod(key) && edge === "down") {
        return [{ kind: "armed", which: key, tDown: t }, NOOP];
      }
      return [state, NOOP];

    case "armed":
      if (isMod(key) && edge === "down" && key !== state.which) {
        return [{ kind: "preview", index: 1 }, ENTER_PREVIEW];
      }
      if (key === state.which && edge === "up") {
        return [IDLE, NOOP];
      }
      return [state, NOOP];

    case "preview":
      if (key === "CYCLE" && edge === "down") {
        const next = (state.index % config.maxCandidates) + 1;
        return [{ kind: "preview", index: next }, { kind: "cycle", index: next }];
      }
      if (isMod(key) && edge === "up") {
        return [
          { kind: "releasePending", index: state.index, firstReleaseT: t, remaining: otherMod(key) },
          NOOP,
        ];
      }
      return [state, NOOP];

    case "releasePending":
      if (key === state.remaining && edge === "up") {
        const delta = t - state.firstReleaseT;
        if (classifyRelease(delta, config.releaseWindowMs) === "simultaneous") {
          return [IDLE, { kind: "accept", index: state.index }];
        }
        return [IDLE, { kind: "discard" }];
      }
      if (key === otherMod(state.remaining) && edge === "down") {
        // re-press before the window runs out: back to previewing
        return [{ kind: "preview", index: state.index }, NOOP];
      }
      if (key === "TIMEOUT" && edge === "down") {
        if (config.emitDiscardOnTimeout && t >= state.firstReleaseT + config.releaseWindowMs) {
          return [{ kind: "expired", remaining: state.remaining }, { kind: "discard" }];
        }
        return [state, NOOP];
      }
      return [state, NOOP];

    case "expired":
      if (key === state.remaining && edge === "up") {
        return [IDLE, NOOP];
      }
      if (key === otherMod(state.remaining) && edge === "down") {
        // both mods held again: a fresh preview session
        return [{ kind: "preview", index: 1 }, ENTER_PREVIEW];
      }
      return [state, NOOP];
  }
}

// --- stream validation and replay ------------------------------------------

export class StreamError extends Error {
  index: number;

  constructor(index: number, message: string) {
    super(`event ${index}: ${message}`);
    this.name = "StreamError";
    this.index = index;
  }
}

function renderKey(event: KeyEvent): string {
  if (event.key === "OTHER") return `OTHER:${event.code ?? 0}`;
  return event.key;
}

// identity used for down/up bookkeeping
function eventIdent(event: KeyEvent): string {
  return renderKey(event);
}

// Stateful wrapper: feeds events through `step` with stream checks.
// Timeout events are synthetic scheduler ticks, so they are exempt from the
// down/up alternation rule that applies to physical keys.
export class PadMachine {
  config: PadConfig;
  state: PadState = IDLE;
  private down = new Set<string>();
  private lastT: number | null = null;
  private count = 0;

  constructor(config?: Partial<PadConfig>) {
    this.config = makeConfig(config);
  }

  feed(event: KeyEvent): PadAction {
    const index = this.count;
    if (event.t < 0) {
      throw new StreamError(index, `negative timestamp ${event.t}`);
    }
    if (this.lastT !== null && event.t < this.lastT) {
      throw new StreamError(index, `timestamp ${event.t} is before ${this.lastT}`);
    }
    if (event.key !== "TIMEOUT") {
      const ident = eventIdent(event);
      if (event.edge === "down") {
        if (this.down.has(ident)) {
          throw new StreamError(index, `key ${renderKey(event)} already down`);
        }
        this.down.add(ident);
      } else {
        if (!this.down.has(ident)) {
          throw new StreamError(index, `key ${renderKey(event)} is not down`);
        }
        this.down.delete(ident);
      }
    }
    this.lastT = event.t;
    this.count += 1;
    const [state, action] = step(this.state, event, this.config);
    this.state = state;
    return action;
  }

  nextDeadline(): number | null {
    return nextDeadline(this.state, this.config);
  }
}

// Fold a recorded stream into its action sequence (Noop suppressed).
// Raises StreamError with the offending event index on invalid input.
// Pure: same events and config always give the identical action list.
export function replay(events: Iterable<KeyEvent>, config?: Partial<PadConfig>): TimedAction[] {
  const machine = new PadMachine(config);
  const out: TimedAction[] = [];
  for (const event of events) {
    const action = machine.feed(event);
    if (action.kind !== "noop") {
      out.push({ t: event.t, action });
    }
  }
  return out;
}

export function renderActions(actions: Iterable<TimedAction>): string {
  return Array.from(actions, renderTimedAction).join("\n");
}

// --- event-log text format ---------------------------------------------------

export const EVENT_LOG_HEADER = "t_ms,key,edge";

export class EventLogError extends Error {
  line: number;

  constructor(line: number, message: string) {
    super(`line ${line}: ${message}`);
    this.name = "EventLogError";
    this.line = line;
  }
}

// Serialize to the event-log text format (header + one edge per line).
export function formatEvents(events: Iterable<KeyEvent>): string {
  const lines = [EVENT_LOG_HEADER];
  for (const e of events) {
    lines.push(`${e.t},${renderKey(e)},${e.edge}`);
  }
  return lines.join("\n") + "\n";
}

function parseKey(text: string, line: number): { key: Key; code?: number } {
  if (text.startsWith("OTHER:")) {
    const raw = text.slice("OTHER:".length);
    if (!/^[0-9]+$/.test(raw)) {
      throw new EventLogError(line, `bad key code '${raw}'`);
    }
    return { key: "OTHER", code: parseInt(raw, 10) };
  }
  if (text === "MOD_A" || text === "MOD_B" || text === "CYCLE" || text === "TIMEOUT") {
    return { key: text };
  }
  throw new EventLogError(line, `unknown key '${text}'`);
}

// Parse the event-log text format. Empty input is an empty trace.
export function parseEvents(text: string): KeyEvent[] {
  if (text.trim() === "") return [];
  const lines = text.split("\n");
  if (lines[lines.length - 1] === "") lines.pop();
  if (lines[0] !== EVENT_LOG_HEADER) {
    throw new EventLogError(1, `expected header '${EVENT_LOG_HEADER}', got '${lines[0]}'`);
  }
  const events: KeyEvent[] = [];
  for (let i = 1; i < lines.length; i++) {
    const lineNo = i + 1;
    const raw = lines[i];
    if (raw === "") throw new EventLogError(lineNo, "blank line");
    const parts = raw.split(",");
    if (parts.length !== 3) {
      throw new EventLogError(lineNo, `expected 3 fields, got ${parts.length}`);
    }
    const [tRaw, keyRaw, edgeRaw] = parts;
    if (!/^[0-9]+$/.test(tRaw)) {
      throw new EventLogError(lineNo, `bad timestamp '${tRaw}'`);
    }
    const { key, code } = parseKey(keyRaw, lineNo);
    if (edgeRaw !== "down" && edgeRaw !== "up") {
      throw new EventLogError(lineNo, `unknown edge '${edgeRaw}'`);
    }
    const event: KeyEvent = { t: parseInt(tRaw, 10), key, edge: edgeRaw };
    if (code !== undefined) event.code = code;
    events.push(event);
  }
  return events;
}
