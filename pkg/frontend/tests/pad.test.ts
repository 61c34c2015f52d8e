import { readdirSync, readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  EVENT_LOG_HEADER,
  EventLogError,
  formatEvents,
  makeConfig,
  nextDeadline,
  PadMachine,
  parseEvents,
  renderActions,
  replay,
  step,
  StreamError,
  type KeyEvent,
  type PadState,
} from "../src/pad.js";
import { dataDir } from "./helpers.js";

const TRACES = join(dataDir, "traces");

function goldenNames(): string[] {
  return readdirSync(TRACES)
    .filter((f) => f.endsWith(".events"))
    .map((f) => f.slice(0, -".events".length))
    .sort();
}

describe("golden trace parity", () => {
  it("ships enough traces to be meaningful", () => {
    expect(goldenNames().length).toBeGreaterThanOrEqual(10);
  });

  for (const name of goldenNames()) {
    it(`replays ${name} to its frozen action sequence`, () => {
      const events = parseEvents(readFileSync(join(TRACES, `${name}.events`), "utf-8"));
      const golden = readFileSync(join(TRACES, `${name}.golden`), "utf-8");
      const rendered = renderActions(replay(events));
      expect(rendered === "" ? rendered : rendered + "\n").toBe(golden);
    });
  }
});

describe("release window semantics", () => {
  const chord = (delta: number): KeyEvent[] => [
    { t: 0, key: "MOD_A", edge: "down" },
    { t: 10, key: "MOD_B", edge: "down" },
    { t: 1000, key: "MOD_A", edge: "up" },
    { t: 1000 + delta, key: "MOD_B", edge: "up" },
  ];

  it("accepts on the inclusive boundary", () => {
    const actions = replay(chord(170));
    expect(actions.map((a) => a.action.kind)).toEqual(["enterPreview", "accept"]);
  });

  it("discards one ms past the boundary", () => {
    const actions = replay(chord(171));
    expect(actions.map((a) => a.action.kind)).toEqual(["enterPreview", "discard"]);
  });

  it("honors a custom window", () => {
    const actions = replay(chord(250), { releaseWindowMs: 250 });
    expect(actions[1].action.kind).toBe("accept");
  });

  it("cycling wraps at maxCandidates", () => {
    const events: KeyEvent[] = [
      { t: 0, key: "MOD_A", edge: "down" },
      { t: 10, key: "MOD_B", edge: "down" },
    ];
    for (let i = 0; i < 3; i++) {
      events.push({ t: 20 + 10 * i, key: "CYCLE", edge: "down" });
      events.push({ t: 25 + 10 * i, key: "CYCLE", edge: "up" });
    }
    const actions = replay(events, { maxCandidates: 3 });
    const cycles = actions.filter((a) => a.action.kind === "cycle");
    expect(cycles.map((a) => (a.action.kind === "cycle" ? a.action.index : 0))).toEqual([2, 3, 1]);
  });
});

describe("timeout handling", () => {
  it("announces the deadline only while a release is pending", () => {
    const config = makeConfig();
    const machine = new PadMachine();
    machine.feed({ t: 0, key: "MOD_A", edge: "down" });
    machine.feed({ t: 10, key: "MOD_B", edge: "down" });
    expect(machine.nextDeadline()).toBeNull();
    machine.feed({ t: 500, key: "MOD_A", edge: "up" });
    expect(machine.nextDeadline()).toBe(670);
    expect(nextDeadline(machine.state, config)).toBe(670);
  });

  it("expires into a discard, then a re-press previews afresh", () => {
    const machine = new PadMachine();
    machine.feed({ t: 0, key: "MOD_A", edge: "down" });
    machine.feed({ t: 10, key: "MOD_B", edge: "down" });
    machine.feed({ t: 500, key: "MOD_A", edge: "up" });
    const expired = machine.feed({ t: 700, key: "TIMEOUT", edge: "down" });
    expect(expired.kind).toBe("discard");
    const again = machine.feed({ t: 900, key: "MOD_A", edge: "down" });
    expect(again).toEqual({ kind: "enterPreview", index: 1 });
  });

  it("an early timeout is a noop", () => {
    const machine = new PadMachine();
    machine.feed({ t: 0, key: "MOD_A", edge: "down" });
    machine.feed({ t: 10, key: "MOD_B", edge: "down" });
    machine.feed({ t: 500, key: "MOD_A", edge: "up" });
    expect(machine.feed({ t: 600, key: "TIMEOUT", edge: "down" }).kind).toBe("noop");
    expect(machine.state.kind).toBe("releasePending");
  });
});

describe("totality", () => {
  it("every state consumes every event without throwing", () => {
    const config = makeConfig();
    const states: PadState[] = [
      { kind: "idle" },
      { kind: "armed", which: "MOD_A", tDown: 0 },
      { kind: "preview", index: 2 },
      { kind: "releasePending", index: 2, firstReleaseT: 100, remaining: "MOD_B" },
      { kind: "expired", remaining: "MOD_B" },
    ];
    const keys = ["MOD_A", "MOD_B", "CYCLE", "TIMEOUT", "OTHER"] as const;
    for (const state of states) {
      for (const key of keys) {
        for (const edge of ["down", "up"] as const) {
          const [next, action] = step(state, { t: 300, key, edge, code: 7 }, config);
          expect(next.kind).toBeTruthy();
          expect(action.kind).toBeTruthy();
        }
      }
    }
  });
});

describe("stream validation", () => {
  it("rejects negative timestamps with the event index", () => {
    const machine = new PadMachine();
    machine.feed({ t: 5, key: "MOD_A", edge: "down" });
    expect(() => machine.feed({ t: -1, key: "MOD_A", edge: "up" })).toThrowError(StreamError);
    try {
      new PadMachine().feed({ t: -1, key: "MOD_A", edge: "down" });
    } catch (e) {
      expect((e as StreamError).index).toBe(0);
    }
  });

  it("rejects time going backwards", () => {
    const machine = new PadMachine();
    machine.feed({ t: 100, key: "MOD_A", edge: "down" });
    expect(() => machine.feed({ t: 99, key: "MOD_A", edge: "up" })).toThrowError(/event 1/);
  });

  it("rejects double downs and ups without downs", () => {
    const machine = new PadMachine();
    machine.feed({ t: 0, key: "MOD_A", edge: "down" });
    expect(() => machine.feed({ t: 1, key: "MOD_A", edge: "down" })).toThrowError(/already down/);
    expect(() => new PadMachine().feed({ t: 0, key: "CYCLE", edge: "up" })).toThrowError(
      /is not down/,
    );
  });

  it("distinguishes pass-through keys by code", () => {
    const machine = new PadMachine();
    machine.feed({ t: 0, key: "OTHER", edge: "down", code: 1 });
    expect(machine.feed({ t: 1, key: "OTHER", edge: "down", code: 2 }).kind).toBe("noop");
    machine.feed({ t: 2, key: "OTHER", edge: "up", code: 1 });
    machine.feed({ t: 3, key: "OTHER", edge: "up", code: 2 });
  });

  it("timeout ticks are exempt from alternation", () => {
    const machine = new PadMachine();
    machine.feed({ t: 0, key: "TIMEOUT", edge: "down" });
    machine.feed({ t: 1, key: "TIMEOUT", edge: "down" });
  });
});

describe("event-log text format", () => {
  it("round-trips a stream through format and parse", () => {
    const events: KeyEvent[] = [
      { t: 0, key: "MOD_A", edge: "down" },
      { t: 4, key: "OTHER", edge: "down", code: 33 },
      { t: 9, key: "OTHER", edge: "up", code: 33 },
      { t: 12, key: "MOD_A", edge: "up" },
    ];
    const text = formatEvents(events);
    expect(text.startsWith(EVENT_LOG_HEADER + "\n")).toBe(true);
    expect(text).toContain("4,OTHER:33,down");
    expect(parseEvents(text)).toEqual(events);
  });

  it("parses empty input as an empty trace", () => {
    expect(parseEvents("")).toEqual([]);
    expect(parseEvents("  \n ")).toEqual([]);
  });

  it.each([
    ["nope,key,edge\n0,MOD_A,down\n", 1, /expected header/],
    ["t_ms,key,edge\n0,MOD_A\n", 2, /expected 3 fields/],
    ["t_ms,key,edge\n0,MOD_A,down\n\n1,MOD_A,up\n", 3, /blank line/],
    ["t_ms,key,edge\n-5,MOD_A,down\n", 2, /bad timestamp/],
    ["t_ms,key,edge\n0,SHIFT,down\n", 2, /unknown key/],
    ["t_ms,key,edge\n0,OTHER:x,down\n", 2, /bad key code/],
    ["t_ms,key,edge\n0,MOD_A,sideways\n", 2, /unknown edge/],
  ])("rejects malformed text with its line number", (text, line, message) => {
    try {
      parseEvents(text);
      expect.unreachable("should have thrown");
    } catch (e) {
      expect(e).toBeInstanceOf(EventLogError);
      expect((e as EventLogError).line).toBe(line);
      expect((e as EventLogError).message).toMatch(message);
    }
  });
});
