import { execFileSync } from "node:child_process";
import { mkdtempSync, readdirSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { makeLayout } from "../src/iso.js";
import { parseEvents, renderActions, replay, type KeyEvent } from "../src/pad.js";
import { loadScenario } from "../src/prediction.js";
import { DEFAULT_SETTINGS, type UiSettings } from "../src/settings.js";
import { IsoSession, ringScreen, ScenarioSession, stampMs } from "../src/session.js";
import { savedPerAccept } from "../src/stats.js";
import { dataDir, python } from "./helpers.js";

const LAYOUT = makeLayout(750, 50, 9);

function settings(overrides: Partial<UiSettings> = {}): UiSettings {
  return { ...DEFAULT_SETTINGS, ...overrides };
}

// Drive one clean chord: arm, preview, cycle to the wanted rank, release
// both modifiers 50ms apart (inside the default window). Returns the
// accept timestamp.
function chordAccept(
  s: { key(t: number, code: string, edge: "down" | "up"): void },
  t0: number,
  rank: number,
): number {
  s.key(t0, "KeyZ", "down");
  s.key(t0 + 10, "KeyX", "down");
  let t = t0 + 10;
  for (let k = 1; k < rank; k++) {
    s.key(t + 10, "Space", "down");
    s.key(t + 20, "Space", "up");
    t += 20;
  }
  s.key(t + 30, "KeyZ", "up");
  s.key(t + 80, "KeyX", "up");
  return t + 80;
}

function newIso(over: Partial<UiSettings> = {}, seed = 1): IsoSession {
  return new IsoSession({ settings: settings(over), seed, layout: LAYOUT, runId: "ui_test" });
}

// Run a full 22-trial pad session, always accepting the true target.
function driveFullIso(): IsoSession {
  const s = newIso();
  let t = 0;
  for (let trial = 1; trial <= 22; trial++) {
    const sug = s.currentSuggestions();
    expect(sug).not.toBeNull();
    expect(sug!.trueRank).not.toBeNull();
    t = chordAccept(s, t + 100, sug!.trueRank!);
  }
  return s;
}

describe("clock stamping", () => {
  it("truncates to 0.1ms then rounds to integer milliseconds", () => {
    expect(stampMs(16.69)).toBe(17);
    expect(stampMs(16.44)).toBe(16);
    expect(stampMs(1234.5678)).toBe(1235);
    expect(stampMs(0.04)).toBe(0);
    expect(stampMs(999.96)).toBe(1000);
    expect(stampMs(200)).toBe(200);
  });
});

describe("ring screen", () => {
  it("exposes the ring as a ranked-suggestion screen", () => {
    const screen = ringScreen(LAYOUT);
    expect(screen.targets.map((t) => t.id)).toEqual(
      Array.from({ length: 9 }, (_, k) => `t${k}`),
    );
    expect(screen.maxCandidates).toBe(6);
    expect(screen.targets[0].center.x).toBeCloseTo(0, 9);
    expect(screen.targets[0].center.y).toBeCloseTo(-375, 9);
    expect(screen.targets.every((t) => t.width === 50 && t.height === 50)).toBe(true);
    expect(screen.scriptedRanking).toBeNull();
  });
});

describe("ring session on the pad device", () => {
  it("serves the reference suggestion lists for seed 1", () => {
    const s = newIso();
    const want = [
      ["t0", "t8", "t7"],
      ["t5", "t8", "t2"],
      ["t1", "t8", "t5"],
      ["t6", "t0", "t7"],
      ["t2", "t5", "t4"],
    ];
    let t = 0;
    for (const expected of want) {
      const sug = s.currentSuggestions()!;
      expect(sug.targets.map((tg) => tg.id)).toEqual(expected);
      expect(sug.trueRank).toBe(1);
      t = chordAccept(s, t + 100, 1);
    }
    expect(s.records).toHaveLength(5);
  });

  it("completes 22 trials with simulator-convention records", () => {
    const s = driveFullIso();
    expect(s.done).toBe(true);
    expect(s.records).toHaveLength(22);
    expect(s.currentTrialIdx).toBe(23);
    expect(s.flagged).toHaveLength(0);

    // seed 1 draws rank 2 on trials 18 and 19, rank 1 everywhere else
    const cycled = s.records.map((r) => r.cycles);
    expect(cycled).toEqual(cycled.map((_, i) => (i === 17 || i === 18 ? 1 : 0)));
    for (const r of s.records) {
      expect(r.error).toBe(false);
      expect(r.clicks).toBe(0);
      expect(r.previews).toBe(1);
      expect(r.discards).toBe(0);
      expect(r.keypresses).toBe(2 + r.cycles);
      expect(r.strokes).toBe(1 + r.cycles);
      expect(r.idBits).toBe(4);
      expect(r.amplitudePx).toBe(750);
      expect(r.widthPx).toBe(50);
      expect(r.pointerTravelPx).toBe(0);
      // pointer never moved, so each accept saves a full ring radius
      expect(r.savedPx).toBeCloseTo(375, 9);
    }
    expect(s.records[0].mtMs).toBe(190);
    expect(s.records[17].mtMs).toBe(210);

    // a further input after completion is ignored
    s.click(99999);
    s.key(99999, "KeyZ", "down");
    expect(s.records).toHaveLength(22);
    expect(s.events).toHaveLength(22 * 4 + 2 * 2);
  });

  it("records an event log that replays to the actions the UI acted on", () => {
    const s = driveFullIso();
    expect(s.actions).toHaveLength(46); // 22 previews + 2 cycles + 22 accepts
    const replayed = replay(s.events);
    expect(renderActions(replayed)).toBe(renderActions(s.actions));
  });

  it("replays identically through the reference engine's CLI", () => {
    const s = driveFullIso();
    const dir = mkdtempSync(join(tmpdir(), "padbench-ui-"));
    try {
      const file = join(dir, "session.events");
      writeFileSync(file, s.exportEventLog());
      const out = execFileSync("python3", ["-m", "padbench.cli", "replay", file], {
        encoding: "utf-8",
      });
      expect(out).toBe(renderActions(s.actions) + "\n");
    } finally {
      rmSync(dir, { recursive: true, force: true });
    }
  });

  it("exports CSV the reference parser accepts verbatim", () => {
    const s = driveFullIso();
    const text = s.exportCsvText();
    const report = JSON.parse(
      python(
        "import sys, json\n" +
          "from padbench.records import parse_csv, export_csv\n" +
          "text = sys.stdin.read()\n" +
          "log = parse_csv(text)\n" +
          "print(json.dumps({\n" +
          "  'identical': export_csv(log) == text,\n" +
          "  'warnings': len(log.warnings),\n" +
          "  'n': len(log.records),\n" +
          "  'condition': log.condition,\n" +
          "  'device': log.device,\n" +
          "  'profile': log.profile,\n" +
          "  'seed': log.seed,\n" +
          "}))\n",
        text,
      ),
    );
    expect(report).toEqual({
      identical: true,
      warnings: 0,
      n: 22,
      condition: "pad_ideal",
      device: "pad",
      profile: "ideal",
      seed: 1,
    });
  });

  it("stats panel totals equal the analyzer's recomputation on the export", () => {
    const s = driveFullIso();
    const totals = s.statsTotals();
    expect(totals.accepts).toBe(22);
    expect(totals.keypresses).toBe(46);
    expect(totals.releases).toBe(46);
    expect(totals.clicks).toBe(0);

    const m = JSON.parse(
      python(
        "import sys, json\n" +
          "from padbench.records import parse_csv\n" +
          "from padbench.metrics import motion_accounting\n" +
          "m = motion_accounting(parse_csv(sys.stdin.read()))\n" +
          "print(json.dumps({'travel': m.pointer_travel_px, 'saved': m.saved_px,\n" +
          "  'accepts': m.accepts, 'per': m.saved_per_accept,\n" +
          "  'clicks': m.clicks, 'keypresses': m.keypresses}))\n",
        s.exportCsvText(),
      ),
    );
    // the CSV quantizes floats to 6 significant digits
    const close = (a: number, b: number) =>
      expect(Math.abs(a - b)).toBeLessThanOrEqual(1e-6 * Math.max(1, Math.abs(b)));
    expect(m.accepts).toBe(totals.accepts);
    expect(m.clicks).toBe(totals.clicks);
    expect(m.keypresses).toBe(totals.keypresses);
    close(m.travel, totals.pointerTravelPx);
    close(m.saved, totals.savedPx);
    close(m.per, savedPerAccept(totals)!);
  });

  it("keeps one overlay, anchored where the preview opened", () => {
    const s = newIso();
    s.pointerMove(5, 40, -30);
    s.key(10, "KeyZ", "down");
    expect(s.overlay).toBeNull();
    s.key(20, "KeyX", "down");
    const first = s.overlay!;
    expect(first.phase).toBe("appearing");
    expect(first.anchor).toEqual({ x: 40, y: -30 });
    expect(first.target.y).toBeCloseTo(-375, 9); // candidate 1 is t0 for seed 1

    s.key(40, "Space", "down");
    s.key(50, "Space", "up");
    const second = s.overlay!;
    expect(second.anchor).toEqual(first.anchor); // retarget keeps the anchor
    expect(second.target).not.toEqual(first.target);
    expect(second.phaseStart).toBe(40); // cycles act on the down edge

    // sequential release just past the window discards
    s.key(100, "KeyZ", "up");
    s.key(271, "KeyX", "up");
    expect(s.overlay!.phase).toBe("retract_to_cursor");
    expect(s.records).toHaveLength(0);
    expect(renderActions(replay(s.events))).toBe(renderActions(s.actions));
  });

  it("injects a timeout at the deadline and lets the trial retry", () => {
    const s = newIso();
    s.key(10, "KeyZ", "down");
    s.key(20, "KeyX", "down");
    s.key(100, "KeyZ", "up"); // hold the other: deadline is 100 + 170
    s.tick(269);
    expect(s.overlay!.phase).toBe("appearing");
    s.tick(270);
    expect(s.overlay!.phase).toBe("retract_to_cursor");
    s.key(300, "KeyX", "up");
    expect(s.records).toHaveLength(0); // trial is still open

    chordAccept(s, 400, 1);
    expect(s.records).toHaveLength(1);
    const r = s.records[0];
    expect(r.previews).toBe(2);
    expect(r.discards).toBe(1);
    expect(r.cycles).toBe(0);
    expect(r.keypresses).toBe(4);
    expect(r.strokes).toBe(2);
    expect(r.error).toBe(false);

    expect(s.events.filter((e) => e.key === "TIMEOUT")).toHaveLength(1);
    expect(renderActions(replay(s.events))).toBe(renderActions(s.actions));
  });

  it("completing by click still records pad-convention strokes", () => {
    const s = newIso();
    const cue = s.cuedTarget();
    s.pointerMove(50, cue.center.x, -200);
    s.pointerMove(120, cue.center.x, cue.center.y);
    s.click(200);
    expect(s.records).toHaveLength(1);
    const r = s.records[0];
    expect(r.clicks).toBe(1);
    expect(r.keypresses).toBe(0);
    expect(r.previews).toBe(0);
    expect(r.strokes).toBe(1); // previews + cycles + the click
    expect(r.savedPx).toBe(0);
    expect(r.error).toBe(false);
    expect(r.pointerTravelPx).toBeCloseTo(375, 9);
    expect(s.currentTrialIdx).toBe(2);
  });

  it("a missed click latches an error onto the completed trial", () => {
    const s = newIso();
    s.click(100); // cursor still at the ring center, far off the cue
    expect(s.records).toHaveLength(0);
    const cue = s.cuedTarget();
    s.pointerMove(150, cue.center.x, cue.center.y);
    s.click(220);
    expect(s.records).toHaveLength(1);
    expect(s.records[0].error).toBe(true);
    expect(s.records[0].clicks).toBe(2);
  });

  it("flags the trial on blur and keeps the log replayable", () => {
    const s = newIso();
    s.key(10, "KeyZ", "down");
    s.key(20, "KeyX", "down");
    expect(s.overlay).not.toBeNull();

    s.blur(50);
    expect(s.flagged).toEqual([1]);
    expect(s.overlay).toBeNull();
    expect(s.records).toHaveLength(0);
    expect(s.currentTrialIdx).toBe(1);
    // the held keys were closed out in the log
    expect(s.events).toHaveLength(4);
    expect(s.events[2]).toMatchObject({ t: 50, edge: "up" });
    expect(s.events[3]).toMatchObject({ t: 50, edge: "up" });

    s.focus(500);
    const end = chordAccept(s, 600, s.currentSuggestions()!.trueRank!);
    expect(s.records).toHaveLength(1);
    const r = s.records[0];
    expect(r.error).toBe(false);
    expect(r.keypresses).toBe(2); // the flushed chord does not leak in
    expect(r.previews).toBe(1);
    expect(r.mtMs).toBe(end - 500); // clock re-armed when focus returned

    expect(renderActions(replay(s.events))).toBe(renderActions(s.actions));
  });

  it("stats start at zero and move after the first accept", () => {
    const s = newIso();
    expect(Object.values(s.statsTotals()).every((v) => v === 0)).toBe(true);
    chordAccept(s, 100, 1);
    const t = s.statsTotals();
    expect(t.previews).toBeGreaterThanOrEqual(1);
    expect(t.savedPx).toBeGreaterThan(0);
    expect(t.accepts).toBe(1);
  });

  it("blur without any trial activity is a no-op", () => {
    const s = newIso();
    s.blur(100);
    expect(s.flagged).toHaveLength(0);
    expect(s.events).toHaveLength(0);
  });
});

describe("ring session on the trackpad device", () => {
  it("runs chord-free with an empty event log", () => {
    const s = new IsoSession({
      settings: settings({ device: "trackpad" }),
      seed: 3,
      layout: LAYOUT,
    });
    expect(s.currentSuggestions()).toBeNull();

    let t = 0;
    for (let trial = 1; trial <= 22; trial++) {
      const cue = s.cuedTarget();
      s.pointerMove(t + 50, cue.center.x / 2, cue.center.y / 2);
      s.pointerMove(t + 250, cue.center.x, cue.center.y); // 200ms pause: new stroke
      s.key(t + 260, "KeyZ", "down"); // chords are inert in this condition
      s.key(t + 270, "KeyZ", "up");
      s.click(t + 300);
      t += 300;
    }

    expect(s.done).toBe(true);
    expect(s.records).toHaveLength(22);
    for (const r of s.records) {
      expect(r.keypresses).toBe(0);
      expect(r.previews).toBe(0);
      expect(r.cycles).toBe(0);
      expect(r.discards).toBe(0);
      expect(r.savedPx).toBe(0);
      expect(r.clicks).toBe(1);
      expect(r.strokes).toBe(2);
      expect(r.error).toBe(false);
      expect(r.pointerTravelPx).toBeGreaterThan(0);
    }

    expect(s.exportEventLog()).toBe("t_ms,key,edge\n");
    expect(s.actions).toHaveLength(0);
    const log = s.toRunLog();
    expect(log.condition).toBe("trackpad");
    expect(log.profile).toBeNull();

    const totals = s.statsTotals();
    expect(totals.accepts).toBe(0);
    expect(savedPerAccept(totals)).toBeNull();

    const report = JSON.parse(
      python(
        "import sys, json\n" +
          "from padbench.records import parse_csv, export_csv\n" +
          "from padbench.metrics import motion_accounting\n" +
          "text = sys.stdin.read()\n" +
          "log = parse_csv(text)\n" +
          "m = motion_accounting(log)\n" +
          "print(json.dumps({'identical': export_csv(log) == text,\n" +
          "  'warnings': len(log.warnings), 'accepts': m.accepts, 'per': m.saved_per_accept}))\n",
        s.exportCsvText(),
      ),
    );
    expect(report).toEqual({ identical: true, warnings: 0, accepts: 0, per: null });
  });
});

// Map an abstract trace key onto the KeyboardEvent.code the default
// bindings classify back to it.
function codeFor(e: KeyEvent): string {
  switch (e.key) {
    case "MOD_A":
      return "KeyZ";
    case "MOD_B":
      return "KeyX";
    case "CYCLE":
      return "Space";
    case "OTHER":
      return `Other${e.code ?? 0}`;
    default:
      throw new Error(`unmapped key ${e.key}`);
  }
}

describe("golden traces through the session input surface", () => {
  const tracesDir = join(dataDir, "traces");
  const names = readdirSync(tracesDir)
    .filter((f) => f.endsWith(".events"))
    .map((f) => f.slice(0, -".events".length))
    .sort();

  it("ships the full trace corpus", () => {
    expect(names.length).toBeGreaterThanOrEqual(10);
  });

  it.each(names)("%s produces the core replay's action sequence", (name) => {
    const events = parseEvents(readFileSync(join(tracesDir, `${name}.events`), "utf-8"));
    const golden = readFileSync(join(tracesDir, `${name}.golden`), "utf-8");
    const s = newIso();
    for (const e of events) {
      // timeouts reach the session through its clock, not the keyboard
      if (e.key === "TIMEOUT") s.tick(e.t);
      else s.key(e.t, codeFor(e), e.edge);
    }
    const rendered = renderActions(s.actions);
    expect(rendered === "" ? rendered : rendered + "\n").toBe(golden);
    // what the session recorded replays to what it acted on
    expect(renderActions(replay(s.events))).toBe(rendered);
  });
});

describe("scenario session", () => {
  const email = () =>
    loadScenario(readFileSync(join(dataDir, "email_mockup.json"), "utf-8"));

  it("walks the email mockup without moving the pointer", () => {
    const s = new ScenarioSession({
      settings: settings(),
      seed: 7,
      scenario: email(),
      task: ["reply", "send"],
      cursor: { x: 200, y: 400 },
    });

    // inbox is scripted: reply sits at rank 1
    expect(s.currentScreen().name).toBe("inbox");
    expect(s.currentSuggestions()!.targets.map((t) => t.id)).toEqual([
      "reply",
      "archive",
      "forward",
    ]);
    let t = chordAccept(s, 100, 1);
    expect(s.done).toBe(false);
    expect(s.currentScreen().name).toBe("compose_view");
    expect(s.currentSuggestions()!.targets.map((t) => t.id)).toEqual(["send", "attach"]);
    chordAccept(s, t + 100, 1);
    expect(s.done).toBe(true);

    const d1 = Math.hypot(460 - 200, 120 - 400);
    const d2 = Math.hypot(420 - 200, 700 - 400);
    expect(s.records).toHaveLength(2);
    const [r1, r2] = s.records;
    expect(r1.amplitudePx).toBeCloseTo(d1, 9);
    expect(r1.widthPx).toBe(36);
    expect(r1.idBits).toBeCloseTo(Math.log2(d1 / 36 + 1), 9);
    expect(r1.savedPx).toBeCloseTo(d1, 9);
    expect(r2.amplitudePx).toBeCloseTo(d2, 9);
    expect(r2.widthPx).toBe(40);
    expect(r2.savedPx).toBeCloseTo(d2, 9);
    for (const r of s.records) {
      expect(r.error).toBe(false);
      expect(r.clicks).toBe(0);
      expect(r.keypresses).toBe(2);
      expect(r.previews).toBe(1);
      expect(r.pointerTravelPx).toBe(0);
    }
    expect(s.cursorPosition).toEqual({ x: 200, y: 400 }); // accepts never warp the pointer

    expect(renderActions(replay(s.events))).toBe(renderActions(s.actions));
    const report = JSON.parse(
      python(
        "import sys, json\n" +
          "from padbench.records import parse_csv, export_csv\n" +
          "text = sys.stdin.read()\n" +
          "log = parse_csv(text)\n" +
          "print(json.dumps({'identical': export_csv(log) == text,\n" +
          "  'warnings': len(log.warnings), 'n': len(log.records)}))\n",
        s.exportCsvText(),
      ),
    );
    expect(report).toEqual({ identical: true, warnings: 0, n: 2 });
  });

  it("cycles to deeper ranks and stays on screens without a transition", () => {
    const s = new ScenarioSession({
      settings: settings(),
      seed: 7,
      scenario: email(),
      task: ["forward", "archive"],
      cursor: { x: 200, y: 400 },
    });
    // forward is scripted at rank 3: two cycles
    const t = chordAccept(s, 100, 3);
    expect(s.records).toHaveLength(1);
    expect(s.records[0].cycles).toBe(2);
    expect(s.records[0].error).toBe(false);
    expect(s.currentScreen().name).toBe("inbox"); // forward leads nowhere
    expect(s.done).toBe(false);

    chordAccept(s, t + 100, 2); // archive at rank 2 ends the scenario
    expect(s.done).toBe(true);
    expect(s.records).toHaveLength(2);
    expect(s.records[1].savedPx).toBeCloseTo(Math.hypot(760 - 200, 120 - 400), 9);
  });

  it("accepting a wrong suggestion records an error and the task continues", () => {
    const s = new ScenarioSession({
      settings: settings(),
      seed: 7,
      scenario: email(),
      task: ["reply", "send"],
      cursor: { x: 200, y: 400 },
    });
    // rank 3 = forward while the task wants reply; forward leads nowhere
    let t = chordAccept(s, 100, 3);
    expect(s.records).toHaveLength(1);
    expect(s.records[0].error).toBe(true);
    expect(s.records[0].savedPx).toBeCloseTo(Math.hypot(660 - 200, 120 - 400), 9);
    expect(s.currentScreen().name).toBe("inbox");
    expect(s.done).toBe(false);

    t = chordAccept(s, t + 100, 1); // recover: reply, then send
    expect(s.currentScreen().name).toBe("compose_view");
    chordAccept(s, t + 100, 1);
    expect(s.done).toBe(true);
    expect(s.records.map((r) => r.error)).toEqual([true, false, false]);
  });

  it("fails loudly when a wrong accept navigates away from the task", () => {
    const s = new ScenarioSession({
      settings: settings(),
      seed: 7,
      scenario: email(),
      task: ["archive"],
      cursor: { x: 200, y: 400 },
    });
    // rank 1 = reply; it transitions to a screen that has no archive button
    expect(() => chordAccept(s, 100, 1)).toThrowError(/no target 'archive'/);
    expect(s.records).toHaveLength(1); // the error trial was still recorded
    expect(s.records[0].error).toBe(true);
  });

  it("trackpad mode completes the task with two real clicks", () => {
    const s = new ScenarioSession({
      settings: settings({ device: "trackpad" }),
      seed: 7,
      scenario: email(),
      task: ["reply", "send"],
      cursor: { x: 200, y: 400 },
    });
    s.pointerMove(100, 460, 120);
    s.click(150);
    expect(s.done).toBe(false);
    expect(s.currentScreen().name).toBe("compose_view");
    s.pointerMove(300, 420, 700);
    s.click(400);
    expect(s.done).toBe(true);
    expect(s.records).toHaveLength(2);
    for (const r of s.records) {
      expect(r.clicks).toBe(1);
      expect(r.keypresses).toBe(0);
      expect(r.savedPx).toBe(0);
      expect(r.error).toBe(false);
    }
    expect(s.records[0].pointerTravelPx).toBeCloseTo(Math.hypot(260, 280), 9);
    expect(s.exportEventLog()).toBe("t_ms,key,edge\n");
  });

  it("accumulates exact saved distance over a chained scenario", () => {
    const screens = [1, 2, 3, 4, 5].map((i) => ({
      name: `s${i}`,
      max_candidates: 1,
      targets: [{ id: "go", label: "Go", x: 600, y: 0, w: 48, h: 48 }],
      transitions: { go: i === 5 ? "END" : `s${i + 1}` },
      scripted_ranking: ["go"],
    }));
    const scenario = loadScenario(JSON.stringify({ version: 1, start: "s1", screens }));
    const s = new ScenarioSession({
      settings: settings(),
      seed: 11,
      scenario,
      task: ["go", "go", "go", "go", "go"],
      cursor: { x: 0, y: 0 },
    });
    let t = 0;
    for (let i = 0; i < 5; i++) t = chordAccept(s, t + 100, 1);
    expect(s.done).toBe(true);
    expect(s.records).toHaveLength(5);
    for (const r of s.records) {
      expect(r.amplitudePx).toBe(600);
      expect(r.widthPx).toBe(48);
      expect(r.savedPx).toBe(600);
      expect(r.idBits).toBeCloseTo(Math.log2(600 / 48 + 1), 12);
    }
    expect(s.statsTotals().savedPx).toBe(3000);
    expect(renderActions(replay(s.events))).toBe(renderActions(s.actions));
  });
});
