// Browser glue: wires DOM events into the session engines and renders the
// ring task, the email mockup, the chord overlay and the stats panel.

import { chordPolyline, overlayDone, overlaySpan } from "./chord.js";
import { layoutForId, targetPositions } from "./iso.js";
import { loadScenario, type Scenario } from "./prediction.js";
import { IsoSession, ScenarioSession, stampMs, type Point } from "./session.js";
import {
  DEFAULT_SETTINGS,
  keyBindings,
  loadSettings,
  saveSettings,
  type UiSettings,
} from "./settings.js";
import { statLines } from "./stats.js";

const canvas = document.querySelector<HTMLCanvasElement>("#stage")!;
const ctx = canvas.getContext("2d")!;
const statsBox = document.querySelector<HTMLDivElement>("#stats")!;
const messageBox = document.querySelector<HTMLDivElement>("#message")!;
const cheatSheet = document.querySelector<HTMLDivElement>("#cheatsheet")!;

let settings: UiSettings = loadSettings(localStorage);
let session: IsoSession | ScenarioSession | null = null;
let scenario: Scenario | null = null;
let emailTask: string[] = ["reply", "send"];
let pointer: Point = { x: canvas.width / 2, y: canvas.height / 2 };

const now = (): number => stampMs(performance.now());

// --- settings panel ----------------------------------------------------------

const pairSelect = document.querySelector<HTMLSelectElement>("#pair")!;
const windowInput = document.querySelector<HTMLInputElement>("#window")!;
const animInput = document.querySelector<HTMLInputElement>("#anim")!;
const deviceSelect = document.querySelector<HTMLSelectElement>("#device")!;
const profileSelect = document.querySelector<HTMLSelectElement>("#profile")!;
const statsToggle = document.querySelector<HTMLInputElement>("#showstats")!;
const seedInput = document.querySelector<HTMLInputElement>("#seed")!;

function settingsToPanel(): void {
  pairSelect.value = settings.modifierPair;
  windowInput.value = String(settings.releaseWindowMs);
  animInput.value = String(settings.animationMs);
  deviceSelect.value = settings.device;
  profileSelect.value = settings.profile;
  statsToggle.checked = settings.showStats;
  profileSelect.disabled = settings.device !== "pad";
  statsBox.style.display = settings.showStats ? "block" : "none";
}

function panelToSettings(): void {
  const windowMs = parseInt(windowInput.value, 10);
  const animMs = parseInt(animInput.value, 10);
  settings = {
    modifierPair: pairSelect.value === "Q+W" ? "Q+W" : "Z+X",
    releaseWindowMs: Number.isInteger(windowMs) && windowMs > 0 ? windowMs : DEFAULT_SETTINGS.releaseWindowMs,
    animationMs: Number.isInteger(animMs) && animMs >= 0 ? animMs : DEFAULT_SETTINGS.animationMs,
    device: deviceSelect.value === "trackpad" ? "trackpad" : "pad",
    profile: profileSelect.value,
    showStats: statsToggle.checked,
  };
  saveSettings(localStorage, settings);
  settingsToPanel();
  renderCheatSheet();
}

for (const el of [pairSelect, windowInput, animInput, deviceSelect, profileSelect, statsToggle]) {
  el.addEventListener("change", panelToSettings);
}

function renderCheatSheet(): void {
  const b = keyBindings(settings.modifierPair);
  const pretty = (code: string): string => code.replace("Key", "");
  cheatSheet.innerHTML = `
    <b>PAD chords</b><br>
    Hold <kbd>${pretty(b.modA)}</kbd>+<kbd>${pretty(b.modB)}</kbd> to preview the top suggestion.<br>
    Tap <kbd>${pretty(b.cycle)}</kbd> to cycle candidates.<br>
    Release both together (&le;${settings.releaseWindowMs}ms apart) to accept; apart to discard.`;
}

// --- session control -----------------------------------------------------------

function sessionSeed(): number {
  const n = parseInt(seedInput.value, 10);
  return Number.isInteger(n) && n >= 0 ? n : 1;
}

document.querySelector<HTMLButtonElement>("#start-iso")!.addEventListener("click", () => {
  const layout = {
    ...layoutForId(4, 50, 9),
    center: { x: canvas.width / 2, y: canvas.height / 2 },
  };
  session = new IsoSession({
    layout,
    settings,
    seed: sessionSeed(),
    t0: now(),
    cursor: pointer,
  });
  messageBox.textContent = "Select the highlighted target.";
});

document.querySelector<HTMLButtonElement>("#start-email")!.addEventListener("click", () => {
  if (!scenario) {
    messageBox.textContent = "Scenario still loading...";
    return;
  }
  session = new ScenarioSession({
    scenario,
    task: emailTask,
    settings,
    seed: sessionSeed(),
    t0: now(),
    cursor: pointer,
  });
  messageBox.textContent = `Task: ${emailTask.join(", then ")}.`;
});

function download(name: string, text: string): void {
  const blob = new Blob([text], { type: "text/plain" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = name;
  a.click();
  URL.revokeObjectURL(a.href);
}

document.querySelector<HTMLButtonElement>("#dl-csv")!.addEventListener("click", () => {
  if (session) download(`${session.runId}.csv`, session.exportCsvText());
});

document.querySelector<HTMLButtonElement>("#dl-events")!.addEventListener("click", () => {
  if (session) download(`${session.runId}.events`, session.exportEventLog());
});

// --- input wiring ----------------------------------------------------------------

canvas.addEventListener("pointermove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  pointer = { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
  session?.pointerMove(now(), pointer.x, pointer.y);
});

canvas.addEventListener("pointerdown", () => {
  session?.click(now());
});

window.addEventListener("keydown", (ev) => {
  if (ev.repeat || !session) return;
  session.key(now(), ev.code, "down");
  ev.preventDefault();
});

window.addEventListener("keyup", (ev) => {
  if (!session) return;
  session.key(now(), ev.code, "up");
  ev.preventDefault();
});

window.addEventListener("blur", () => {
  if (!session || session.done) return;
  session.blur(now());
  messageBox.textContent = "Window lost focus: trial flagged and restarted.";
});

window.addEventListener("focus", () => {
  session?.focus(now());
});

// --- rendering --------------------------------------------------------------------

function drawIso(s: IsoSession): void {
  const cue = s.cuedTarget();
  const r = s.layout.widthPx / 2;
  for (const p of targetPositions(s.layout)) {
    ctx.beginPath();
    ctx.arc(p.x, p.y, r, 0, 2 * Math.PI);
    ctx.fillStyle = p.x === cue.center.x && p.y === cue.center.y ? "#e33" : "#ccc";
    ctx.fill();
  }
  const ranked = s.currentSuggestions();
  if (ranked) {
    ctx.fillStyle = "#222";
    ctx.font = "13px sans-serif";
    ranked.targets.forEach((t, i) => {
      ctx.fillText(String(i + 1), t.center.x - 4, t.center.y + 4);
    });
  }
}

function drawScenario(s: ScenarioSession): void {
  ctx.font = "13px sans-serif";
  for (const t of s.currentScreen().targets) {
    ctx.fillStyle = t.id === s.taskTarget().id ? "#fbb" : "#ddd";
    ctx.fillRect(t.center.x - t.width / 2, t.center.y - t.height / 2, t.width, t.height);
    ctx.strokeStyle = "#555";
    ctx.strokeRect(t.center.x - t.width / 2, t.center.y - t.height / 2, t.width, t.height);
    ctx.fillStyle = "#222";
    ctx.fillText(t.label, t.center.x - t.width / 2 + 6, t.center.y + 4);
  }
}

function drawOverlay(t: number): void {
  const overlay = session?.overlay;
  if (!overlay || !session) return;
  if (overlayDone(overlay, t, settings.animationMs)) {
    session.overlay = null;
    return;
  }
  const [u0, u1] = overlaySpan(overlay, t, settings.animationMs);
  const pts = chordPolyline(overlay.anchor, overlay.target, u0, u1);
  ctx.beginPath();
  ctx.moveTo(pts[0].x, pts[0].y);
  for (const p of pts.slice(1)) ctx.lineTo(p.x, p.y);
  ctx.strokeStyle = overlay.phase === "retract_to_cursor" ? "#c80" : "#08c";
  ctx.lineWidth = 3;
  ctx.stroke();
}

function frame(): void {
  const t = now();
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (session) {
    session.tick(t);
    if (session instanceof IsoSession && !session.done) drawIso(session);
    if (session instanceof ScenarioSession && !session.done) drawScenario(session);
    drawOverlay(t);
    if (session.done) {
      messageBox.textContent = "Session complete. Download the CSV and event log above.";
    }
    if (settings.showStats) {
      statsBox.innerHTML = statLines(session.statsTotals())
        .map((l) => `<div>${l.label}: <b>${l.value}</b></div>`)
        .join("");
    }
  }
  requestAnimationFrame(frame);
}

fetch("./email_mockup.json")
  .then((r) => r.text())
  .then((text) => {
    scenario = loadScenario(text);
  })
  .catch(() => {
    messageBox.textContent = "Could not load the email scenario; ring task only.";
  });

settingsToPanel();
renderCheatSheet();
requestAnimationFrame(frame);
