// Portable 64-bit PRNG: splitmix64 seed expansion feeding xoshiro256** streams.
//
// Same generator as the padbench Python package, so a seed produces the same
// draw sequence here as it does there. BigInt keeps the 64-bit arithmetic
// exact; random() narrows to a 53-bit double exactly like the reference.

const MASK64 = (1n << 64n) - 1n;
const GOLDEN = 0x9e3779b97f4a7c15n;

// splitmix64 output finalizer (Steele, Lea & Flood; public domain).
function mix64(z: bigint): bigint {
  z &= MASK64;
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
  return z ^ (z >> 31n);
}

// Advance a splitmix64 state; returns [new state, output].
export function splitmix64(state: bigint): [bigint, bigint] {
  state = (state + GOLDEN) & MASK64;
  return [state, mix64(state)];
}

// Hash an index path into a seed, giving an independent substream seed.
export function deriveSeed(seed: number | bigint, ...path: Array<number | bigint>): bigint {
  let s = BigInt(seed) & MASK64;
  for (const p of path) {
    s = mix64((s + GOLDEN + (BigInt(p) & MASK64)) & MASK64);
  }
  return s;
}

function rotl(x: bigint, k: bigint): bigint {
  return ((x << k) | (x >> (64n - k))) & MASK64;
}

// xoshiro256** 1.0 (Blackman & Vigna), seeded via splitmix64 expansion.
export class Xoshiro256StarStar {
  private s: [bigint, bigint, bigint, bigint];

  constructor(seed: number | bigint) {
    let state = BigInt(seed) & MASK64;
    const lanes: bigint[] = [];
    for (let i = 0; i < 4; i++) {
      const [next, out] = splitmix64(state);
      state = next;
      lanes.push(out);
    }
    this.s = [lanes[0], lanes[1], lanes[2], lanes[3]];
  }

  static fromPath(seed: number | bigint, ...path: Array<number | bigint>): Xoshiro256StarStar {
    return new Xoshiro256StarStar(deriveSeed(seed, ...path));
  }

  static fromState(s0: bigint, s1: bigint, s2: bigint, s3: bigint): Xoshiro256StarStar {
    const rng = new Xoshiro256StarStar(0n);
    rng.s = [s0 & MASK64, s1 & MASK64, s2 & MASK64, s3 & MASK64];
    return rng;
  }

  nextU64(): bigint {
    const s = this.s;
    const result = (rotl((s[1] * 5n) & MASK64, 7n) * 9n) & MASK64;
    const t = (s[1] << 17n) & MASK64;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45n);
    return result;
  }

  // Uniform in [0, 1) with 53 bits of precision.
  random(): number {
    return Number(this.nextU64() >> 11n) * 2 ** -53;
  }

  chance(p: number): boolean {
    return this.random() < p;
  }

  // Unbiased integer in [0, n) by rejection.
  randbelow(n: number): number {
    if (n <= 0) throw new Error("randbelow needs n >= 1");
    const nn = BigInt(n);
    const limit = MASK64 - ((MASK64 + 1n) % nn);
    for (;;) {
      const x = this.nextU64();
      if (x <= limit) return Number(x % nn);
    }
  }

  // k distinct indices from 0..n-1, uniform without replacement.
  sampleIndices(n: number, k: number): number[] {
    if (k > n) throw new Error(`cannot sample ${k} from ${n}`);
    const pool = Array.from({ length: n }, (_, i) => i);
    const out: number[] = [];
    for (let i = 0; i < k; i++) {
      const j = i + this.randbelow(n - i);
      const tmp = pool[i];
      pool[i] = pool[j];
      pool[j] = tmp;
      out.push(pool[i]);
    }
    return out;
  }
}
