// Trial records and the padbench v1 CSV wire format (export side).
//
// The browser harness only writes run files; parsing and analysis stay in
// the Python package. Field layout, number formatting and header syntax
// must match that parser byte for byte, so formatFloat reimplements C's
// %.6g (which Python's exporter uses) rather than leaning on toPrecision,
// whose exponent thresholds differ.

export const CSV_MAGIC = "#padbench";
export const CSV_VERSION = "v1";
export const SCHEMA_VERSION = 1;

export const CSV_COLUMNS =
  "trial_idx,id_bits,amplitude_px,width_px,mt_ms,error,strokes,keypresses," +
  "clicks,previews,cycles,discards,pointer_travel_px,saved_px";

export const DEVICES = ["trackpad", "pad"] as const;
export type Device = (typeof DEVICES)[number];

export type TrialRecord = {
  trialIdx: number;
  idBits: number;
  amplitudePx: number;
  widthPx: number;
  mtMs: number;
  error: boolean;
  strokes: number;
  keypresses: number;
  clicks: number;
  previews: number;
  cycles: number;
  discards: number;
  pointerTravelPx: number;
  savedPx: number;
};

export function makeRecord(fields: TrialRecord): TrialRecord {
  if (!Number.isInteger(fields.trialIdx) || fields.trialIdx < 1) {
    throw new Error("trialIdx must be >= 1");
  }
  if (!(fields.idBits > 0)) throw new Error("idBits must be positive");
  if (!(fields.mtMs > 0)) throw new Error("mtMs must be positive");
  if (!Number.isInteger(fields.strokes) || fields.strokes < 1) {
    throw new Error("strokes must be >= 1");
  }
  const counters = ["keypresses", "clicks", "previews", "cycles", "discards"] as const;
  for (const name of counters) {
    if (!Number.isInteger(fields[name]) || fields[name] < 0) {
      throw new Error(`${name} must be >= 0`);
    }
  }
  const lengths = ["amplitudePx", "widthPx", "pointerTravelPx", "savedPx"] as const;
  for (const name of lengths) {
    if (!(fields[name] >= 0)) throw new Error(`${name} must be >= 0`);
  }
  return { ...fields };
}

export type RunLog = {
  runId: string;
  condition: string;
  device: Device;
  profile: string | null;
  seed: number;
  records: TrialRecord[];
};

function checkToken(name: string, value: string): void {
  if (value === "" || /[,\n\r=]/.test(value)) {
    throw new Error(`${name} '${value}' must be non-empty and free of , = and newlines`);
  }
}

export function makeRunLog(log: RunLog): RunLog {
  if (!DEVICES.includes(log.device)) {
    throw new Error(`device must be one of ${DEVICES.join(", ")}`);
  }
  if (!Number.isInteger(log.seed) || log.seed < 0) {
    throw new Error("seed must be a non-negative integer");
  }
  checkToken("runId", log.runId);
  checkToken("condition", log.condition);
  if (log.profile !== null) checkToken("profile", log.profile);
  return { ...log, records: [...log.records] };
}

// Exact decimal digits of |x| (finite, nonzero) plus its scientific
// exponent. A double is mantissa * 2^e, so scaling the mantissa by 5^-e
// for negative e gives the full decimal expansion as one BigInt.
function exactDigits(x: number): { digits: string; exp: number } {
  const view = new DataView(new ArrayBuffer(8));
  view.setFloat64(0, Math.abs(x));
  const bits = (BigInt(view.getUint32(0)) << 32n) | BigInt(view.getUint32(4));
  const biasedExp = Number((bits >> 52n) & 0x7ffn);
  const frac = bits & ((1n << 52n) - 1n);
  const mantissa = biasedExp === 0 ? frac : frac | (1n << 52n);
  const exp2 = (biasedExp === 0 ? 1 : biasedExp) - 1075;
  let whole: bigint;
  let pointShift = 0;
  if (exp2 >= 0) {
    whole = mantissa << BigInt(exp2);
  } else {
    whole = mantissa * 5n ** BigInt(-exp2);
    pointShift = -exp2;
  }
  const digits = whole.toString();
  return { digits, exp: digits.length - 1 - pointShift };
}

// Round a digit string to nSig significant digits, half-to-even on exact
// ties like printf does. `bump` reports a carry out of the leading digit.
function roundDigits(digits: string, nSig: number): { digits: string; bump: boolean } {
  if (digits.length <= nSig) {
    return { digits: digits.padEnd(nSig, "0"), bump: false };
  }
  const head = digits.slice(0, nSig);
  const next = digits.charCodeAt(nSig) - 48;
  let up: boolean;
  if (next !== 5) {
    up = next > 5;
  } else if (/[1-9]/.test(digits.slice(nSig + 1))) {
    up = true;
  } else {
    up = (digits.charCodeAt(nSig - 1) - 48) % 2 === 1;
  }
  if (!up) return { digits: head, bump: false };
  const carried = (BigInt(head) + 1n).toString();
  if (carried.length > nSig) {
    return { digits: carried.slice(0, nSig), bump: true };
  }
  return { digits: carried, bump: false };
}

// Up to 6 significant digits; stable through a parse/format cycle and
// byte-identical to the Python exporter's %.6g (including its half-even
// tie rounding, which toPrecision/toExponential get wrong).
export function formatFloat(x: number): string {
  if (!Number.isFinite(x)) throw new Error("non-finite value in record");
  if (x === 0) return "0";
  const sign = x < 0 ? "-" : "";
  const raw = exactDigits(x);
  const rounded = roundDigits(raw.digits, 6);
  const d = rounded.digits;
  const e = raw.exp + (rounded.bump ? 1 : 0);
  if (e < -4 || e >= 6) {
    let mant = d[0] + "." + d.slice(1);
    mant = mant.replace(/0+$/, "").replace(/\.$/, "");
    const expDigits = String(Math.abs(e)).padStart(2, "0");
    return `${sign}${mant}e${e < 0 ? "-" : "+"}${expDigits}`;
  }
  let out: string;
  if (e >= 0) {
    out = d.slice(0, e + 1) + "." + d.slice(e + 1);
  } else {
    out = "0." + "0".repeat(-e - 1) + d;
  }
  if (out.includes(".")) out = out.replace(/0+$/, "").replace(/\.$/, "");
  return sign + out;
}

// Serialize a run to CSV v1 text (LF line endings, trailing newline).
export function exportCsv(log: RunLog): string {
  const head =
    `${CSV_MAGIC},${CSV_VERSION},run_id=${log.runId},condition=${log.condition},` +
    `device=${log.device},profile=${log.profile ?? "none"},seed=${log.seed}`;
  const lines = [head, CSV_COLUMNS];
  for (const r of log.records) {
    lines.push(
      [
        String(r.trialIdx),
        formatFloat(r.idBits),
        formatFloat(r.amplitudePx),
        formatFloat(r.widthPx),
        formatFloat(r.mtMs),
        r.error ? "1" : "0",
        String(r.strokes),
        String(r.keypresses),
        String(r.clicks),
        String(r.previews),
        String(r.cycles),
        String(r.discards),
        formatFloat(r.pointerTravelPx),
        formatFloat(r.savedPx),
      ].join(","),
    );
  }
  return lines.join("\n") + "\n";
}
