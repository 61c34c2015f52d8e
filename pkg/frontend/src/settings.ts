// Harness settings: modifier pair, release window, animation speed,
// condition under test. Persisted in localStorage between visits.
//
// The release window mirrors PadConfig's field exactly; the grammar the
// session runs is configured from here and nothing else.

import { DEFAULT_RELEASE_WINDOW_MS, makeConfig, type PadConfig } from "./pad.js";
import { PROFILES } from "./prediction.js";
import type { Device } from "./records.js";

export type ModifierPair = "Z+X" | "Q+W";

export type UiSettings = {
  modifierPair: ModifierPair;
  releaseWindowMs: number;
  animationMs: number;
  device: Device;
  profile: string; // accuracy profile name; ignored on the trackpad device
  showStats: boolean;
};

export const DEFAULT_SETTINGS: UiSettings = {
  modifierPair: "Z+X",
  releaseWindowMs: DEFAULT_RELEASE_WINDOW_MS,
  animationMs: 200,
  device: "pad",
  profile: "ideal",
  showStats: true,
};

export function conditionName(settings: UiSettings): string {
  return settings.device === "pad" ? `pad_${settings.profile}` : "trackpad";
}

export function padConfigFrom(settings: UiSettings): PadConfig {
  return makeConfig({ releaseWindowMs: settings.releaseWindowMs });
}

// KeyboardEvent.code values for the chord keys. The cycle key is Space
// for either pair; everything else passes through as ordinary typing.
export function keyBindings(pair: ModifierPair): { modA: string; modB: string; cycle: string } {
  if (pair === "Q+W") return { modA: "KeyQ", modB: "KeyW", cycle: "Space" };
  return { modA: "KeyZ", modB: "KeyX", cycle: "Space" };
}

const SETTINGS_KEY = "padbench.settings";

export type StorageLike = {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
};

function validated(raw: unknown): UiSettings {
  const out = { ...DEFAULT_SETTINGS };
  if (typeof raw !== "object" || raw === null) return out;
  const doc = raw as Record<string, unknown>;
  if (doc.modifierPair === "Z+X" || doc.modifierPair === "Q+W") {
    out.modifierPair = doc.modifierPair;
  }
  if (
    typeof doc.releaseWindowMs === "number" &&
    Number.isInteger(doc.releaseWindowMs) &&
    doc.releaseWindowMs > 0
  ) {
    out.releaseWindowMs = doc.releaseWindowMs;
  }
  if (typeof doc.animationMs === "number" && doc.animationMs >= 0) {
    out.animationMs = doc.animationMs;
  }
  if (doc.device === "pad" || doc.device === "trackpad") {
    out.device = doc.device;
  }
  if (typeof doc.profile === "string" && doc.profile in PROFILES) {
    out.profile = doc.profile;
  }
  if (typeof doc.showStats === "boolean") {
    out.showStats = doc.showStats;
  }
  return out;
}

// Forgiving load: anything missing or malformed falls back to the default,
// so a stale blob can never brick the page.
export function loadSettings(storage: StorageLike): UiSettings {
  const text = storage.getItem(SETTINGS_KEY);
  if (text === null) return { ...DEFAULT_SETTINGS };
  try {
    return validated(JSON.parse(text));
  } catch {
    return { ...DEFAULT_SETTINGS };
  }
}

export function saveSettings(storage: StorageLike, settings: UiSettings): void {
  storage.setItem(SETTINGS_KEY, JSON.stringify(settings));
}
