import { describe, expect, it } from "vitest";

import {
  indexOfDifficulty,
  layoutForId,
  layoutIdBits,
  makeLayout,
  targetPositions,
  trialOrder,
} from "../src/iso.js";

describe("index of difficulty", () => {
  it.each([
    [750, 50, 4],
    [1550, 50, 5],
    [3150, 50, 6],
  ])("ID(%d, %d) = %d exactly", (a, w, id) => {
    expect(indexOfDifficulty(a, w)).toBe(id);
  });

  it("rejects non-positive geometry", () => {
    expect(() => indexOfDifficulty(0, 50)).toThrowError(/amplitude/);
    expect(() => indexOfDifficulty(750, 0)).toThrowError(/width/);
  });

  it("round-trips through layoutForId", () => {
    for (const id of [1.5, 2, 3.25, 4, 5, 6]) {
      expect(layoutIdBits(layoutForId(id))).toBeCloseTo(id, 12);
    }
  });

  it("layoutForId rejects IDs at or below one bit", () => {
    expect(() => layoutForId(1)).toThrowError(/amplitude/);
  });
});

describe("ring layout", () => {
  it("validates its geometry", () => {
    expect(() => makeLayout(40, 50)).toThrowError(/exceed/);
    expect(() => makeLayout(750, 50, 8)).toThrowError(/odd/);
    expect(() => makeLayout(750, 50, 1)).toThrowError(/odd/);
  });

  it("places the first target at 12 o'clock on the ring radius", () => {
    const layout = makeLayout(750, 50, 9, { x: 100, y: 200 });
    const pos = targetPositions(layout);
    expect(pos).toHaveLength(9);
    expect(pos[0].x).toBeCloseTo(100, 9);
    expect(pos[0].y).toBeCloseTo(200 - 375, 9);
    for (const p of pos) {
      expect(Math.hypot(p.x - 100, p.y - 200)).toBeCloseTo(375, 9);
    }
  });
});

describe("trial order", () => {
  it("hops across the ring with the half-ring stride", () => {
    expect(trialOrder(9, 10)).toEqual([0, 5, 1, 6, 2, 7, 3, 8, 4, 0]);
  });

  it("visits every target once per n consecutive trials", () => {
    const order = trialOrder(7, 7);
    expect(new Set(order).size).toBe(7);
  });

  it("rejects empty sessions", () => {
    expect(() => trialOrder(9, 0)).toThrowError(/at least one/);
  });
});
