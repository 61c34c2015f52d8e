// Synthetic click-target prediction: rank draws, suggestion lists, scenarios.
//
// The predictor is modeled, not learned: an accuracy profile gives the
// probability that the true target appears at each rank of the suggestion
// list, and whatever mass is left over is a miss. Draw order and filler
// sampling follow the padbench reference exactly, so a seed yields the
// same suggestion lists in the browser as in the simulator.

import { Xoshiro256StarStar } from "./rng.js";

const SUM_TOL = 1e-9;

export const SCENARIO_VERSION = 1;
export const END_SCREEN = "END";

// P(true target shown at rank r) for r = 1..p.length; remainder is miss.
export type AccuracyProfile = {
  name: string;
  p: number[];
};

export function makeProfile(name: string, p: number[]): AccuracyProfile {
  if (p.length === 0) throw new Error("profile needs at least one rank probability");
  if (p.some((x) => x < 0)) throw new Error("rank probabilities must be >= 0");
  const sum = p.reduce((a, b) => a + b, 0);
  if (sum > 1 + SUM_TOL) throw new Error(`rank probabilities sum to ${sum} > 1`);
  return { name, p: [...p] };
}

export function missMass(profile: AccuracyProfile): number {
  return Math.max(0, 1 - profile.p.reduce((a, b) => a + b, 0));
}

export const IDEAL_95_4_1 = makeProfile("ideal", [0.95, 0.04, 0.01]);
export const UNIFORM3 = makeProfile("uniform3", [1 / 3, 1 / 3, 1 / 3]);

export const PROFILES: Record<string, AccuracyProfile> = {
  [IDEAL_95_4_1.name]: IDEAL_95_4_1,
  [UNIFORM3.name]: UNIFORM3,
};

// Sample the true target's rank (1-based); null means a miss.
export function drawRank(profile: AccuracyProfile, rng: Xoshiro256StarStar): number | null {
  const u = rng.random();
  let acc = 0;
  for (let i = 0; i < profile.p.length; i++) {
    acc += profile.p[i];
    if (u < acc) return i + 1;
  }
  return null;
}

export type Target = {
  id: string;
  label: string;
  center: { x: number; y: number };
  width: number;
  height: number;
};

export type Screen = {
  name: string;
  targets: Target[];
  maxCandidates: number;
  transitions: Record<string, string>; // target id -> screen name | END
  scriptedRanking: string[] | null;
};

export type Scenario = {
  screens: Record<string, Screen>;
  start: string;
};

export function targetById(screen: Screen, targetId: string): Target {
  const t = screen.targets.find((t) => t.id === targetId);
  if (!t) throw new Error(`no target '${targetId}' on screen '${screen.name}'`);
  return t;
}

// Ordered candidate targets; trueRank is 1-based, null on a miss.
export type RankedSuggestions = {
  targets: Target[];
  trueRank: number | null;
};

// Build the suggestion list the predictor would show for this click.
// The true target's rank is drawn from the profile; remaining slots are
// filled with distinct other targets of the screen, uniformly without
// replacement. A screen's scripted ranking overrides all of this and is
// returned verbatim.
export function rankTargets(
  screen: Screen,
  trueTargetId: string,
  profile: AccuracyProfile,
  rng: Xoshiro256StarStar,
): RankedSuggestions {
  const trueTarget = targetById(screen, trueTargetId);

  if (screen.scriptedRanking !== null) {
    const targets = screen.scriptedRanking.map((tid) => targetById(screen, tid));
    let trueRank: number | null = null;
    for (let i = 0; i < targets.length; i++) {
      if (targets[i].id === trueTargetId) {
        trueRank = i + 1;
        break;
      }
    }
    return { targets, trueRank };
  }

  const n = Math.min(profile.p.length, screen.maxCandidates);
  const length = Math.min(n, screen.targets.length);
  const rank = drawRank(profile, rng);

  const others = screen.targets.filter((t) => t.id !== trueTargetId);
  if (rank === null) {
    // miss: true target not shown at all
    const k = Math.min(length, others.length);
    const picks = rng.sampleIndices(others.length, k);
    return { targets: picks.map((i) => others[i]), trueRank: null };
  }

  const shownRank = Math.min(rank, length); // only reachable on under-filled screens
  const k = Math.min(length - 1, others.length);
  const picks = rng.sampleIndices(others.length, k);
  const fillers = picks.map((i) => others[i]);
  const suggestions = [
    ...fillers.slice(0, shownRank - 1),
    trueTarget,
    ...fillers.slice(shownRank - 1),
  ];
  return { targets: suggestions, trueRank: shownRank };
}

// --- scenario documents ------------------------------------------------------

export class ScenarioError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ScenarioError";
  }
}

function fail(path: string, message: string): never {
  throw new ScenarioError(`${path}: ${message}`);
}

function requireField(obj: Record<string, unknown>, key: string, path: string): unknown {
  if (!(key in obj)) fail(path, `missing '${key}'`);
  return obj[key];
}

function requireString(obj: Record<string, unknown>, key: string, path: string): string {
  const v = requireField(obj, key, path);
  if (typeof v !== "string") fail(`${path}.${key}`, `expected a string, got ${JSON.stringify(v)}`);
  return v;
}

function requireNumber(obj: Record<string, unknown>, key: string, path: string): number {
  const v = requireField(obj, key, path);
  if (typeof v !== "number") fail(`${path}.${key}`, `expected a number, got ${JSON.stringify(v)}`);
  return v;
}

function requireInt(obj: Record<string, unknown>, key: string, path: string): number {
  const v = requireNumber(obj, key, path);
  if (!Number.isInteger(v)) fail(`${path}.${key}`, `expected an integer, got ${v}`);
  return v;
}

function isObject(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

// Parse and validate a scenario document (JSON, versioned).
export function loadScenario(text: string): Scenario {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (e) {
    throw new ScenarioError(`not valid JSON: ${(e as Error).message}`);
  }
  if (!isObject(doc)) fail("$", "expected an object");
  const version = requireInt(doc, "version", "$");
  if (version !== SCENARIO_VERSION) fail("$.version", `unsupported version ${version}`);
  const start = requireString(doc, "start", "$");
  const rawScreens = requireField(doc, "screens", "$");
  if (!Array.isArray(rawScreens)) fail("$.screens", "expected a list");
  if (rawScreens.length === 0) fail("$.screens", "scenario has no screens");

  const screens: Record<string, Screen> = {};
  rawScreens.forEach((raw, si) => {
    const path = `$.screens[${si}]`;
    if (!isObject(raw)) fail(path, "expected an object");
    const name = requireString(raw, "name", path);
    if (name === END_SCREEN) fail(`${path}.name`, `'${END_SCREEN}' is reserved`);
    if (name in screens) fail(`${path}.name`, `duplicate screen '${name}'`);
    const maxCandidates = requireInt(raw, "max_candidates", path);
    const rawTargets = requireField(raw, "targets", path);
    if (!Array.isArray(rawTargets)) fail(`${path}.targets`, "expected a list");
    if (rawTargets.length === 0) fail(`${path}.targets`, "screen has no targets");

    const targets: Target[] = [];
    const seen = new Set<string>();
    rawTargets.forEach((rt, ti) => {
      const tpath = `${path}.targets[${ti}]`;
      if (!isObject(rt)) fail(tpath, "expected an object");
      const tid = requireString(rt, "id", tpath);
      if (seen.has(tid)) fail(`${tpath}.id`, `duplicate target '${tid}'`);
      seen.add(tid);
      const label = requireString(rt, "label", tpath);
      const x = requireNumber(rt, "x", tpath);
      const y = requireNumber(rt, "y", tpath);
      const w = requireNumber(rt, "w", tpath);
      const h = requireNumber(rt, "h", tpath);
      if (w <= 0 || h <= 0) fail(tpath, `target '${tid}' needs positive w and h`);
      targets.push({ id: tid, label, center: { x, y }, width: w, height: h });
    });
    if (maxCandidates < 1 || maxCandidates > targets.length) {
      fail(`${path}.max_candidates`, `${maxCandidates} not in 1..${targets.length} (target count)`);
    }

    const transitions: Record<string, string> = {};
    if ("transitions" in raw) {
      const rawTrans = raw.transitions;
      if (!isObject(rawTrans)) fail(`${path}.transitions`, "expected an object");
      for (const tid of Object.keys(rawTrans)) {
        if (!seen.has(tid)) fail(`${path}.transitions.${tid}`, `unknown target '${tid}'`);
        transitions[tid] = rawTrans[tid] as string;
      }
    }

    let scripted: string[] | null = null;
    if ("scripted_ranking" in raw && raw.scripted_ranking !== null) {
      const spath = `${path}.scripted_ranking`;
      const rawScripted = raw.scripted_ranking;
      if (!Array.isArray(rawScripted) || rawScripted.some((s) => typeof s !== "string")) {
        fail(spath, "expected a list of target ids");
      }
      const list = rawScripted as string[];
      if (new Set(list).size !== list.length) fail(spath, "duplicate target ids");
      if (list.length > maxCandidates) fail(spath, `longer than max_candidates (${maxCandidates})`);
      for (const s of list) {
        if (!seen.has(s)) fail(spath, `unknown target '${s}'`);
      }
      scripted = [...list];
    }

    screens[name] = { name, targets, maxCandidates, transitions, scriptedRanking: scripted };
  });

  if (!(start in screens)) fail("$.start", `unknown screen '${start}'`);
  for (const [name, screen] of Object.entries(screens)) {
    for (const [tid, dest] of Object.entries(screen.transitions)) {
      if (typeof dest !== "string") {
        fail(`$.screens[${name}].transitions.${tid}`, "expected a screen name");
      }
      if (dest !== END_SCREEN && !(dest in screens)) {
        fail(`$.screens[${name}].transitions.${tid}`, `unknown destination screen '${dest}'`);
      }
    }
  }

  return { screens, start };
}
