// Chord overlay geometry: the curved connector from cursor to previewed
// target, and its accept/discard retraction animations.
//
// The curve is a quadratic Bezier whose control point sits at the segment
// midpoint, pushed perpendicular to the cursor-target segment by 20% of
// its length. Animations run on an ease-in-out profile, 200ms by default.

export type Point = { x: number; y: number };

export type OverlayPhase = "appearing" | "steady" | "retract_to_target" | "retract_to_cursor";

export type ChordOverlay = {
  anchor: Point; // cursor position when the preview opened
  target: Point; // center of the previewed candidate
  phase: OverlayPhase;
  phaseStart: number; // ms timestamp of the last phase change
};

export const easeInOutQuad = (t: number): number =>
  t < 0.5 ? 2 * t * t : 1 - (-2 * t + 2) ** 2 / 2;

// Control point of the chord curve: midpoint offset perpendicular to the
// anchor-target segment by 20% of the segment length. Degenerates to the
// anchor itself when the two points coincide.
export function chordControl(anchor: Point, target: Point): Point {
  const dx = target.x - anchor.x;
  const dy = target.y - anchor.y;
  if (dx === 0 && dy === 0) return { x: anchor.x, y: anchor.y };
  return {
    x: (anchor.x + target.x) / 2 - 0.2 * dy,
    y: (anchor.y + target.y) / 2 + 0.2 * dx,
  };
}

// Point on the quadratic curve at parameter u in [0, 1].
export function chordPoint(anchor: Point, target: Point, u: number): Point {
  const c = chordControl(anchor, target);
  const v = 1 - u;
  return {
    x: v * v * anchor.x + 2 * v * u * c.x + u * u * target.x,
    y: v * v * anchor.y + 2 * v * u * c.y + u * u * target.y,
  };
}

// Polyline approximation of the curve between parameters u0 and u1,
// ready for a canvas path.
export function chordPolyline(
  anchor: Point,
  target: Point,
  u0: number,
  u1: number,
  steps: number = 24,
): Point[] {
  const out: Point[] = [];
  for (let i = 0; i <= steps; i++) {
    out.push(chordPoint(anchor, target, u0 + ((u1 - u0) * i) / steps));
  }
  return out;
}

// SVG path for the full curve ("M anchor Q control target").
export function chordPath(anchor: Point, target: Point): string {
  const c = chordControl(anchor, target);
  return `M ${anchor.x} ${anchor.y} Q ${c.x} ${c.y} ${target.x} ${target.y}`;
}

// Eased animation progress of the overlay's current phase, clamped to [0, 1].
export function overlayProgress(overlay: ChordOverlay, nowMs: number, animationMs: number): number {
  if (overlay.phase === "steady") return 1;
  if (animationMs <= 0) return 1;
  const raw = (nowMs - overlay.phaseStart) / animationMs;
  return easeInOutQuad(Math.min(1, Math.max(0, raw)));
}

// The parameter range of the curve to draw for the current phase:
// appearing grows from the anchor, retract_to_target collapses into the
// target, retract_to_cursor collapses back into the anchor.
export function overlaySpan(
  overlay: ChordOverlay,
  nowMs: number,
  animationMs: number,
): [number, number] {
  const e = overlayProgress(overlay, nowMs, animationMs);
  switch (overlay.phase) {
    case "appearing":
      return [0, e];
    case "steady":
      return [0, 1];
    case "retract_to_target":
      return [e, 1];
    case "retract_to_cursor":
      return [0, 1 - e];
  }
}

// A retracting overlay is spent once its animation has run out.
export function overlayDone(overlay: ChordOverlay, nowMs: number, animationMs: number): boolean {
  if (overlay.phase !== "retract_to_target" && overlay.phase !== "retract_to_cursor") {
    return false;
  }
  return nowMs - overlay.phaseStart >= animationMs;
}
