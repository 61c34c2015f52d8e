import { execFileSync } from "node:child_process";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

// The Python package this harness is built against; its shipped data files
// are the shared contract (golden traces, email scenario).
export const dataDir = join(
  dirname(fileURLToPath(import.meta.url)),
  "..",
  "..",
  "src",
  "padbench",
  "data",
);

// Run a short Python snippet against the installed padbench package and
// return its stdout. Used to cross-check byte formats end to end.
export function python(code: string, input?: string): string {
  return execFileSync("python3", ["-c", code], {
    input: input ?? "",
    encoding: "utf-8",
    maxBuffer: 1 << 24,
  });
}
