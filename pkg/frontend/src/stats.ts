// "Your Stats" panel accounting: live counters over the session event
// stream plus the fold over completed trial records.
//
// The panel must agree with what the padbench analyzer recomputes from the
// exported CSV, so the record fold mirrors its motion accounting: on the
// pad device a trial ends in exactly one accept unless it died in a
// discard (error with nothing saved).

import type { Device, TrialRecord } from "./records.js";

export type StatTotals = {
  keypresses: number; // physical key downs (timeout ticks excluded)
  releases: number; // physical key ups
  clicks: number;
  previews: number;
  cycles: number;
  discards: number;
  accepts: number;
  pointerTravelPx: number;
  savedPx: number;
};

export function emptyTotals(): StatTotals {
  return {
    keypresses: 0,
    releases: 0,
    clicks: 0,
    previews: 0,
    cycles: 0,
    discards: 0,
    accepts: 0,
    pointerTravelPx: 0,
    savedPx: 0,
  };
}

export function savedPerAccept(totals: StatTotals): number | null {
  return totals.accepts > 0 ? totals.savedPx / totals.accepts : null;
}

// Fold one completed trial into the totals. Completed trials have every
// key released again, so releases advance with keypresses.
export function addRecord(totals: StatTotals, record: TrialRecord, device: Device): void {
  totals.keypresses += record.keypresses;
  totals.releases += record.keypresses;
  totals.clicks += record.clicks;
  totals.previews += record.previews;
  totals.cycles += record.cycles;
  totals.discards += record.discards;
  totals.pointerTravelPx += record.pointerTravelPx;
  totals.savedPx += record.savedPx;
  if (device === "pad" && !(record.error && record.savedPx === 0)) {
    totals.accepts += 1;
  }
}

export function totalsFromRecords(records: Iterable<TrialRecord>, device: Device): StatTotals {
  const totals = emptyTotals();
  for (const r of records) {
    addRecord(totals, r, device);
  }
  return totals;
}

export type StatLine = { label: string; value: string };

const px = (v: number): string => `${Math.round(v)}px`;

// The panel rows, in display order.
export function statLines(totals: StatTotals): StatLine[] {
  const per = savedPerAccept(totals);
  return [
    { label: "Key presses / releases", value: `${totals.keypresses} / ${totals.releases}` },
    { label: "Previews / discards", value: `${totals.previews} / ${totals.discards}` },
    { label: "Cycles", value: String(totals.cycles) },
    { label: "Accepts / clicks", value: `${totals.accepts} / ${totals.clicks}` },
    { label: "Pointer travel", value: px(totals.pointerTravelPx) },
    { label: "Saved distance", value: px(totals.savedPx) },
    { label: "Saved per accept", value: per === null ? "-" : px(per) },
  ];
}
