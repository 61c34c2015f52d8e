// Multidirectional ring pointing task: difficulty math, layouts, ordering.
//
// Targets sit on a circle of diameter amplitudePx; trials hop across the
// ring so successive movements are near-diametric, per the ISO 9241-9
// multidirectional tapping arrangement. Index of difficulty uses the
// Shannon formulation ID = log2(A/W + 1). Same math as the padbench
// analyzer, so recorded rows carry the exact values it expects.

export const DEFAULT_WIDTH_PX = 50;
export const DEFAULT_N_TARGETS = 9;
export const DEFAULT_N_TRIALS = 22;

// ID in bits, log2(A/W + 1). Both arguments must be positive.
export function indexOfDifficulty(amplitudePx: number, widthPx: number): number {
  if (amplitudePx <= 0) throw new Error("amplitude must be positive");
  if (widthPx <= 0) throw new Error("width must be positive");
  return Math.log2(amplitudePx / widthPx + 1);
}

export type RingLayout = {
  amplitudePx: number;
  widthPx: number;
  nTargets: number;
  center: { x: number; y: number };
};

export function makeLayout(
  amplitudePx: number,
  widthPx: number,
  nTargets: number = DEFAULT_N_TARGETS,
  center: { x: number; y: number } = { x: 0, y: 0 },
): RingLayout {
  if (widthPx <= 0) throw new Error("width must be positive");
  if (amplitudePx <= widthPx) throw new Error("amplitude must exceed width");
  if (nTargets < 3 || nTargets % 2 === 0) throw new Error("nTargets must be odd and >= 3");
  return { amplitudePx, widthPx, nTargets, center };
}

// Invert the ID formula: A = W * (2^ID - 1). Rejects ID <= 1 (A <= W).
export function layoutForId(
  idBits: number,
  widthPx: number = DEFAULT_WIDTH_PX,
  nTargets: number = DEFAULT_N_TARGETS,
): RingLayout {
  if (widthPx <= 0) throw new Error("width must be positive");
  const amplitude = widthPx * (2 ** idBits - 1);
  if (amplitude <= widthPx) {
    throw new Error(`ID ${idBits} gives amplitude ${amplitude} <= width ${widthPx}`);
  }
  return makeLayout(amplitude, widthPx, nTargets);
}

export function layoutIdBits(layout: RingLayout): number {
  return indexOfDifficulty(layout.amplitudePx, layout.widthPx);
}

// Centers of the ring targets, equally spaced, first at 12 o'clock.
export function targetPositions(layout: RingLayout): Array<{ x: number; y: number }> {
  const r = layout.amplitudePx / 2;
  const out: Array<{ x: number; y: number }> = [];
  for (let k = 0; k < layout.nTargets; k++) {
    const theta = -Math.PI / 2 + (2 * Math.PI * k) / layout.nTargets;
    out.push({
      x: layout.center.x + r * Math.cos(theta),
      y: layout.center.y + r * Math.sin(theta),
    });
  }
  return out;
}

// Cross-ring target order: position j is (j * ceil(n/2)) mod n. With odd n
// the stride is coprime to n, so any n consecutive trials visit every
// target exactly once.
export function trialOrder(nTargets: number, nTrials: number = DEFAULT_N_TRIALS): number[] {
  if (nTrials < 1) throw new Error("need at least one trial");
  const stride = Math.ceil(nTargets / 2);
  return Array.from({ length: nTrials }, (_, j) => (j * stride) % nTargets);
}
