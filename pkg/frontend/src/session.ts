// Interactive session engines for the ring task and the scenario walkthrough.
//
// Both engines are DOM-free: they consume already-timestamped pointer and
// key edges and produce the same artifacts as the simulator (a run log in
// CSV schema v1 plus the raw chord event log), which keeps them drivable
// from tests and from the browser glue alike. One PadMachine spans the
// whole session, so the recorded event log replays through the reference
// engine to exactly the action sequence the UI acted on.
//
// The grammar always runs with the default candidate modulus; a preview
// index is mapped onto the visible suggestion list by modulo, which makes
// cycling wrap seamlessly over however many candidates a screen shows
// while the recorded log stays replayable under default configuration.

import type { ChordOverlay } from "./chord.js";
import {
  DEFAULT_N_TRIALS,
  indexOfDifficulty,
  layoutIdBits,
  targetPositions,
  trialOrder,
  type RingLayout,
} from "./iso.js";
import {
  formatEvents,
  PadMachine,
  type Edge,
  type Key,
  type KeyEvent,
  type PadAction,
  type PadConfig,
  type TimedAction,
} from "./pad.js";
import {
  PROFILES,
  rankTargets,
  targetById,
  type RankedSuggestions,
  type Scenario,
  type Screen,
  type Target,
} from "./prediction.js";
import { makeRecord, makeRunLog, exportCsv, type RunLog, type TrialRecord } from "./records.js";
import { Xoshiro256StarStar } from "./rng.js";
import { conditionName, keyBindings, padConfigFrom, type UiSettings } from "./settings.js";
import { totalsFromRecords, type StatTotals } from "./stats.js";

// Browser clock reading onto the event-log grid: truncate the
// high-resolution value to 0.1ms, then round to integer milliseconds.
export function stampMs(hiResMs: number): number {
  return Math.round(Math.trunc(hiResMs * 10) / 10);
}

export type Point = { x: number; y: number };

const dist = (a: Point, b: Point): number => Math.hypot(b.x - a.x, b.y - a.y);

// Pause length that splits pointer motion into separate strokes; matches
// the analyzer's segmentation rule (a gap of exactly 100ms already splits).
const STROKE_PAUSE_MS = 100;

type TrialCounters = {
  keypresses: number;
  releases: number;
  clicks: number;
  previews: number;
  cycles: number;
  discards: number;
  travelPx: number;
  savedPx: number;
  segments: number;
};

function zeroCounters(): TrialCounters {
  return {
    keypresses: 0,
    releases: 0,
    clicks: 0,
    previews: 0,
    cycles: 0,
    discards: 0,
    travelPx: 0,
    savedPx: 0,
    segments: 0,
  };
}

export type SessionCommonOptions = {
  settings: UiSettings;
  seed: number;
  runId?: string;
  t0?: number; // session clock origin; defaults to 0
  cursor?: Point; // initial pointer position
};

abstract class ChordSession {
  readonly settings: UiSettings;
  readonly seed: number;
  readonly runId: string;
  readonly config: PadConfig;

  readonly events: KeyEvent[] = [];
  readonly actions: TimedAction[] = [];
  readonly records: TrialRecord[] = [];
  readonly flagged: number[] = [];

  overlay: ChordOverlay | null = null;
  done = false;

  protected machine: PadMachine;
  protected cursor: Point;
  protected trialIdx = 1;
  protected trialStart: number;
  protected counters = zeroCounters();
  protected errLatch = false;

  private bindings: { modA: string; modB: string; cycle: string };
  private otherCodes = new Map<string, number>();
  private physicalDown: string[] = [];
  private lastMotionT: number | null = null;
  private flushing = false;
  private pendingRefocus = false;

  constructor(opts: SessionCommonOptions, defaultRunId: string) {
    this.settings = opts.settings;
    this.seed = opts.seed;
    this.runId = opts.runId ?? defaultRunId;
    this.config = padConfigFrom(opts.settings);
    this.machine = new PadMachine(this.config);
    this.bindings = keyBindings(opts.settings.modifierPair);
    this.cursor = opts.cursor ? { ...opts.cursor } : { x: 0, y: 0 };
    this.trialStart = opts.t0 ?? 0;
  }

  get currentTrialIdx(): number {
    return this.trialIdx;
  }

  get cursorPosition(): Point {
    return { ...this.cursor };
  }

  // --- inputs ---------------------------------------------------------------

  pointerMove(t: number, x: number, y: number): void {
    if (this.done) return;
    const next = { x, y };
    this.counters.travelPx += dist(this.cursor, next);
    if (this.lastMotionT === null || t - this.lastMotionT >= STROKE_PAUSE_MS) {
      this.counters.segments += 1;
    }
    this.lastMotionT = t;
    this.cursor = next;
  }

  click(t: number): void {
    if (this.done) return;
    this.counters.clicks += 1;
    this.onClick(t);
  }

  key(t: number, code: string, edge: Edge): void {
    if (this.done) return;
    if (this.settings.device === "trackpad") return; // chords are off in the baseline condition
    // auto-repeat and edges lost to focus changes would corrupt the log
    const held = this.physicalDown.includes(code);
    if (edge === "down" ? held : !held) return;
    if (edge === "down") this.physicalDown.push(code);
    else this.physicalDown = this.physicalDown.filter((c) => c !== code);

    if (edge === "down") this.counters.keypresses += 1;
    else this.counters.releases += 1;
    const action = this.feed({ t, ...this.classify(code), edge });
    this.onAction(action, t);
  }

  // Inject a timeout tick if one is due at time t; the machine stays
  // clock-free, so the caller decides when to look.
  tick(t: number): void {
    if (this.done || this.settings.device === "trackpad") return;
    const deadline = this.machine.nextDeadline();
    if (deadline === null || t < deadline) return;
    const action = this.feed({ t, key: "TIMEOUT", edge: "down" });
    this.onAction(action, t);
  }

  // The window lost focus mid-trial: close out any held keys so the log
  // stays replayable, flag the trial, and restart it.
  blur(t: number): void {
    if (this.done) return;
    const active =
      this.machine.state.kind !== "idle" ||
      this.counters.keypresses > 0 ||
      this.counters.clicks > 0 ||
      this.counters.travelPx > 0;
    if (!active) return;
    this.flushing = true;
    for (const code of [...this.physicalDown]) {
      this.feed({ t, ...this.classify(code), edge: "up" });
    }
    this.flushing = false;
    this.physicalDown = [];
    this.flagged.push(this.trialIdx);
    this.resetTrial(t);
    this.pendingRefocus = true;
  }

  // Focus came back after a flagged trial: restart the clock so the time
  // spent away does not count against the retried trial.
  focus(t: number): void {
    if (this.done || !this.pendingRefocus) return;
    this.pendingRefocus = false;
    this.trialStart = t;
  }

  // --- exports ----------------------------------------------------------------

  statsTotals(): StatTotals {
    const totals = totalsFromRecords(this.records, this.settings.device);
    const c = this.counters;
    totals.keypresses += c.keypresses;
    totals.releases += c.releases;
    totals.clicks += c.clicks;
    totals.previews += c.previews;
    totals.cycles += c.cycles;
    totals.discards += c.discards;
    totals.pointerTravelPx += c.travelPx;
    totals.savedPx += c.savedPx;
    return totals;
  }

  toRunLog(): RunLog {
    return makeRunLog({
      runId: this.runId,
      condition: this.conditionLabel(),
      device: this.settings.device,
      profile: this.settings.device === "pad" ? this.settings.profile : null,
      seed: this.seed,
      records: this.records,
    });
  }

  exportCsvText(): string {
    return exportCsv(this.toRunLog());
  }

  exportEventLog(): string {
    return formatEvents(this.events);
  }

  // --- shared internals -------------------------------------------------------

  protected conditionLabel(): string {
    return conditionName(this.settings);
  }

  protected feed(event: KeyEvent): PadAction {
    this.events.push(event);
    const action = this.machine.feed(event);
    if (action.kind !== "noop") this.actions.push({ t: event.t, action });
    return action;
  }

  private classify(code: string): { key: Key; code?: number } {
    if (code === this.bindings.modA) return { key: "MOD_A" };
    if (code === this.bindings.modB) return { key: "MOD_B" };
    if (code === this.bindings.cycle) return { key: "CYCLE" };
    let n = this.otherCodes.get(code);
    if (n === undefined) {
      n = this.otherCodes.size + 1;
      this.otherCodes.set(code, n);
    }
    return { key: "OTHER", code: n };
  }

  protected onAction(action: PadAction, t: number): void {
    if (this.flushing || action.kind === "noop") return;
    switch (action.kind) {
      case "enterPreview":
        this.counters.previews += 1;
        this.openOverlay(t, this.candidate(1));
        break;
      case "cycle":
        this.counters.cycles += 1;
        this.openOverlay(t, this.candidate(action.index));
        break;
      case "discard":
        this.counters.discards += 1;
        if (this.overlay) {
          this.overlay = { ...this.overlay, phase: "retract_to_cursor", phaseStart: t };
        }
        break;
      case "accept": {
        const target = this.candidate(action.index);
        if (this.overlay) {
          this.overlay = { ...this.overlay, phase: "retract_to_target", phaseStart: t };
        }
        this.onAccept(target, t);
        break;
      }
    }
  }

  // Exactly one chord is ever on screen: opening a preview (or retargeting
  // on cycle) replaces whatever was there.
  private openOverlay(t: number, target: Target): void {
    const anchor = this.overlay ? this.overlay.anchor : { ...this.cursor };
    this.overlay = { anchor, target: { ...target.center }, phase: "appearing", phaseStart: t };
  }

  protected mtSince(t: number): number {
    // the format wants mt > 0; sub-ms completions only happen in synthetic drives
    return Math.max(1, t - this.trialStart);
  }

  protected resetTrial(t: number): void {
    this.counters = zeroCounters();
    this.errLatch = false;
    this.lastMotionT = null;
    this.trialStart = t;
    this.overlay = null;
  }

  protected pushRecord(t: number, fields: { error: boolean; strokes: number }): void {
    const c = this.counters;
    this.records.push(
      makeRecord({
        trialIdx: this.records.length + 1,
        idBits: this.trialIdBits(),
        amplitudePx: this.trialAmplitude(),
        widthPx: this.trialWidth(),
        mtMs: this.mtSince(t),
        error: fields.error,
        strokes: Math.max(1, fields.strokes),
        keypresses: c.keypresses,
        clicks: c.clicks,
        previews: c.previews,
        cycles: c.cycles,
        discards: c.discards,
        pointerTravelPx: c.travelPx,
        savedPx: c.savedPx,
      }),
    );
  }

  // What the preview index points at, folded onto the visible list.
  protected candidate(index: number): Target {
    const list = this.suggestionTargets();
    if (list.length === 0) throw new Error("no suggestions to preview");
    return list[(index - 1) % list.length];
  }

  protected abstract suggestionTargets(): Target[];
  protected abstract trialIdBits(): number;
  protected abstract trialAmplitude(): number;
  protected abstract trialWidth(): number;
  protected abstract onClick(t: number): void;
  protected abstract onAccept(target: Target, t: number): void;
}

// --- ISO 9241-9 ring session ---------------------------------------------------

export type IsoSessionOptions = SessionCommonOptions & {
  layout: RingLayout;
  nTrials?: number;
};

// Build the ring as a screen so suggestion lists come from the same
// ranking code the scenario screens use.
export function ringScreen(layout: RingLayout): Screen {
  const positions = targetPositions(layout);
  const targets: Target[] = positions.map((p, k) => ({
    id: `t${k}`,
    label: `target ${k}`,
    center: p,
    width: layout.widthPx,
    height: layout.widthPx,
  }));
  return {
    name: "ring",
    targets,
    maxCandidates: Math.min(6, targets.length - 1),
    transitions: {},
    scriptedRanking: null,
  };
}

export class IsoSession extends ChordSession {
  readonly layout: RingLayout;
  readonly nTrials: number;

  private screen: Screen;
  private order: number[];
  private idBitsNominal: number;
  private suggestions: RankedSuggestions | null = null;

  constructor(opts: IsoSessionOptions) {
    super(opts, "ui_iso");
    this.layout = opts.layout;
    this.nTrials = opts.nTrials ?? DEFAULT_N_TRIALS;
    if (this.nTrials < 1) throw new Error("need at least one trial");
    this.screen = ringScreen(opts.layout);
    this.order = trialOrder(opts.layout.nTargets, this.nTrials);
    this.idBitsNominal = layoutIdBits(opts.layout);
    this.armTrial();
  }

  // The highlighted target the participant should act on next.
  cuedTarget(): Target {
    return this.screen.targets[this.order[this.trialIdx - 1]];
  }

  currentSuggestions(): RankedSuggestions | null {
    return this.suggestions;
  }

  private armTrial(): void {
    if (this.settings.device !== "pad") return;
    const rng = Xoshiro256StarStar.fromPath(this.seed, this.trialIdx);
    const profile = PROFILES[this.settings.profile];
    if (!profile) throw new Error(`unknown profile '${this.settings.profile}'`);
    this.suggestions = rankTargets(this.screen, this.cuedTarget().id, profile, rng);
  }

  protected suggestionTargets(): Target[] {
    return this.suggestions ? this.suggestions.targets : [];
  }

  protected trialIdBits(): number {
    return this.idBitsNominal;
  }

  protected trialAmplitude(): number {
    return this.layout.amplitudePx;
  }

  protected trialWidth(): number {
    return this.layout.widthPx;
  }

  protected onClick(t: number): void {
    const cue = this.cuedTarget();
    const hit = dist(this.cursor, cue.center) <= this.layout.widthPx / 2;
    if (!hit) {
      this.errLatch = true;
      return;
    }
    const strokes =
      this.settings.device === "pad"
        ? this.counters.previews + this.counters.cycles + 1
        : this.counters.segments;
    this.pushRecord(t, { error: this.errLatch, strokes });
    this.advance(t);
  }

  protected onAccept(target: Target, t: number): void {
    this.counters.savedPx += dist(this.cursor, target.center);
    const error = this.errLatch || target.id !== this.cuedTarget().id;
    this.pushRecord(t, { error, strokes: this.counters.previews + this.counters.cycles });
    this.advance(t);
  }

  private advance(t: number): void {
    const overlay = this.overlay; // keep the retract animation across the reset
    this.trialIdx += 1;
    this.resetTrial(t);
    this.overlay = overlay;
    if (this.trialIdx > this.nTrials) {
      this.done = true;
      return;
    }
    this.armTrial();
  }
}

// --- scenario (email mockup) session ---------------------------------------------

export type ScenarioSessionOptions = SessionCommonOptions & {
  scenario: Scenario;
  task: string[]; // target ids to act on, in order
};

export class ScenarioSession extends ChordSession {
  readonly scenario: Scenario;
  readonly task: string[];

  private screen: Screen;
  private taskPos = 0;
  private suggestions: RankedSuggestions | null = null;
  private stepAmplitude = 1;
  private stepWidth = 1;

  constructor(opts: ScenarioSessionOptions) {
    super(opts, "ui_email");
    if (opts.task.length === 0) throw new Error("task needs at least one target");
    this.scenario = opts.scenario;
    this.task = [...opts.task];
    this.screen = opts.scenario.screens[opts.scenario.start];
    if (!this.screen) throw new Error(`unknown start screen '${opts.scenario.start}'`);
    this.armStep();
  }

  currentScreen(): Screen {
    return this.screen;
  }

  taskTarget(): Target {
    return targetById(this.screen, this.task[this.taskPos]);
  }

  currentSuggestions(): RankedSuggestions | null {
    return this.suggestions;
  }

  private armStep(): void {
    const target = this.taskTarget();
    // nominal step difficulty: how far the pointer would have to go
    const d = dist(this.cursor, target.center);
    this.stepAmplitude = Math.max(1, d);
    this.stepWidth = Math.min(target.width, target.height);
    if (this.settings.device === "pad") {
      const rng = Xoshiro256StarStar.fromPath(this.seed, this.trialIdx);
      const profile = PROFILES[this.settings.profile];
      if (!profile) throw new Error(`unknown profile '${this.settings.profile}'`);
      this.suggestions = rankTargets(this.screen, target.id, profile, rng);
    }
  }

  protected suggestionTargets(): Target[] {
    return this.suggestions ? this.suggestions.targets : [];
  }

  protected trialIdBits(): number {
    return indexOfDifficulty(this.stepAmplitude, this.stepWidth);
  }

  protected trialAmplitude(): number {
    return this.stepAmplitude;
  }

  protected trialWidth(): number {
    return this.stepWidth;
  }

  private inside(target: Target, p: Point): boolean {
    return (
      Math.abs(p.x - target.center.x) <= target.width / 2 &&
      Math.abs(p.y - target.center.y) <= target.height / 2
    );
  }

  protected onClick(t: number): void {
    const target = this.taskTarget();
    if (!this.inside(target, this.cursor)) {
      this.errLatch = true;
      return;
    }
    const strokes =
      this.settings.device === "pad"
        ? this.counters.previews + this.counters.cycles + 1
        : this.counters.segments;
    this.pushRecord(t, { error: this.errLatch, strokes });
    this.transition(target, t);
  }

  protected onAccept(target: Target, t: number): void {
    this.counters.savedPx += dist(this.cursor, target.center);
    const error = this.errLatch || target.id !== this.taskTarget().id;
    this.pushRecord(t, { error, strokes: this.counters.previews + this.counters.cycles });
    this.transition(target, t);
  }

  // Follow the accepted (or clicked) target's transition. Acting on a
  // target that leads nowhere records the step and stays on the screen.
  private transition(acted: Target, t: number): void {
    const correct = acted.id === this.task[this.taskPos];
    const dest = this.screen.transitions[acted.id];
    if (correct) this.taskPos += 1;
    this.resetTrial(t);
    this.trialIdx += 1;
    if (dest === "END" || this.taskPos >= this.task.length) {
      this.done = true;
      return;
    }
    if (dest !== undefined) {
      this.screen = this.scenario.screens[dest];
    }
    this.armStep();
  }
}
