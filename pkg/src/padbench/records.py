"""Trial records, run logs, and the v1 CSV wire format.

One CSV file holds one run: a `#padbench,v1` metadata line, a fixed
column header, then one row per trial. The format is the interchange
surface between the simulator, the analyzer and the browser harness, so
export and parse are strict and byte-stable: export -> parse -> export
reproduces the file exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace as _dc_replace
from typing import Optional

CSV_MAGIC = "#padbench"
CSV_VERSION = "v1"
SCHEMA_VERSION = 1

CSV_COLUMNS = (
    "trial_idx,id_bits,amplitude_px,width_px,mt_ms,error,strokes,keypresses,"
    "clicks,previews,cycles,discards,pointer_travel_px,saved_px"
)

DEVICES = ("trackpad", "pad")


@dataclass(frozen=True)
class TrialRecord:
    trial_idx: int
    id_bits: float
    amplitude_px: float
    width_px: float
    mt_ms: float
    error: bool
    strokes: int
    keypresses: int
    clicks: int
    previews: int
    cycles: int
    discards: int
    pointer_travel_px: float
    saved_px: float

    def __post_init__(self):
        if self.trial_idx < 1:
            raise ValueError("trial_idx must be >= 1")
        if self.id_bits <= 0:
            raise ValueError("id_bits must be positive")
        if self.mt_ms <= 0:
            raise ValueError("mt_ms must be positive")
        if self.strokes < 1:
            raise ValueError("strokes must be >= 1")
        for name in ("keypresses", "clicks", "previews", "cycles", "discards"):
            if getattr(self, name) < 0:
                raise ValueError("%s must be >= 0" % name)
        for name in ("amplitude_px", "width_px", "pointer_travel_px", "saved_px"):
            if getattr(self, name) < 0:
                raise ValueError("%s must be >= 0" % name)


@dataclass(frozen=True)
class RunLog:
    run_id: str
    condition: str
    device: str
    profile: Optional[str]
    seed: int
    records: tuple = ()
    schema_version: int = SCHEMA_VERSION
    warmup_excluded_k: Optional[int] = None
    warnings: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.device not in DEVICES:
            raise ValueError("device must be one of %s" % (DEVICES,))
        if not (0 <= self.seed <= (1 << 64) - 1):
            raise ValueError("seed must fit in u64")
        for name in ("run_id", "condition"):
            _check_token(name, getattr(self, name))
        if self.profile is not None:
            _check_token("profile", self.profile)

    def with_records(self, records, **meta) -> "RunLog":
        return _dc_replace(self, records=tuple(records), **meta)


def _check_token(name: str, value: str):
    if value == "" or any(c in value for c in ",\n\r="):
        raise ValueError("%s %r must be non-empty and free of , = and newlines" % (name, value))


def format_float(x: float) -> str:
    """Up to 6 significant digits; stable through a parse/format cycle."""
    x = float(x)
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError("non-finite value in record")
    if x == 0.0:
        return "0"
    return format(x, ".6g")


class CsvError(ValueError):
    """Malformed run CSV; `line` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__("line %d: %s" % (line, message))
        self.line = line
        self.message = message


def export_csv(log: RunLog) -> str:
    """Serialize a run to CSV v1 text (LF line endings, trailing newline)."""
    head = "%s,%s,run_id=%s,condition=%s,device=%s,profile=%s,seed=%d" % (
        CSV_MAGIC,
        CSV_VERSION,
        log.run_id,
        log.condition,
        log.device,
        log.profile if log.profile is not None else "none",
        log.seed,
    )
    lines = [head, CSV_COLUMNS]
    for r in log.records:
        lines.append(
            ",".join(
                (
                    "%d" % r.trial_idx,
                    format_float(r.id_bits),
                    format_float(r.amplitude_px),
                    format_float(r.width_px),
                    format_float(r.mt_ms),
                    "1" if r.error else "0",
                    "%d" % r.strokes,
                    "%d" % r.keypresses,
                    "%d" % r.clicks,
                    "%d" % r.previews,
                    "%d" % r.cycles,
                    "%d" % r.discards,
                    format_float(r.pointer_travel_px),
                    format_float(r.saved_px),
                )
            )
        )
    return "\n".join(lines) + "\n"


_HEAD_KEYS = ("run_id", "condition", "device", "profile", "seed")


def _parse_int(raw: str, line: int, what: str) -> int:
    if not raw.isdigit():
        raise CsvError(line, "bad %s %r (expected a non-negative integer)" % (what, raw))
    return int(raw)


def _parse_float(raw: str, line: int, what: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise CsvError(line, "bad %s %r (expected a number)" % (what, raw)) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise CsvError(line, "bad %s %r (must be finite)" % (what, raw))
    return value


def parse_csv(text: str) -> RunLog:
    """Parse CSV v1 text back into a RunLog; strict, errors carry line numbers."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 2:
        raise CsvError(1, "truncated file: need metadata and column header lines")

    head = lines[0].split(",")
    if len(head) != 2 + len(_HEAD_KEYS) or head[0] != CSV_MAGIC:
        raise CsvError(1, "expected '%s,%s,run_id=...' metadata line" % (CSV_MAGIC, CSV_VERSION))
    if head[1] != CSV_VERSION:
        raise CsvError(1, "unsupported format version %r" % head[1])
    meta = {}
    for pos, (key, part) in enumerate(zip(_HEAD_KEYS, head[2:])):
        prefix = key + "="
        if not part.startswith(prefix):
            raise CsvError(1, "field %d must be %s<value>, got %r" % (pos + 3, prefix, part))
        meta[key] = part[len(prefix):]

    if lines[1] != CSV_COLUMNS:
        raise CsvError(2, "column header mismatch")

    if meta["device"] not in DEVICES:
        raise CsvError(1, "unknown device %r" % meta["device"])
    seed = _parse_int(meta["seed"], 1, "seed")
    if seed > (1 << 64) - 1:
        raise CsvError(1, "seed %d does not fit in u64" % seed)

    records = []
    n_cols = len(CSV_COLUMNS.split(","))
    for i, raw in enumerate(lines[2:], start=3):
        parts = raw.split(",")
        if len(parts) != n_cols:
            raise CsvError(i, "expected %d fields, got %d" % (n_cols, len(parts)))
        if parts[5] not in ("0", "1"):
            raise CsvError(i, "bad error flag %r (expected 0 or 1)" % parts[5])
        try:
            rec = TrialRecord(
                trial_idx=_parse_int(parts[0], i, "trial_idx"),
                id_bits=_parse_float(parts[1], i, "id_bits"),
                amplitude_px=_parse_float(parts[2], i, "amplitude_px"),
                width_px=_parse_float(parts[3], i, "width_px"),
                mt_ms=_parse_float(parts[4], i, "mt_ms"),
                error=parts[5] == "1",
                strokes=_parse_int(parts[6], i, "strokes"),
                keypresses=_parse_int(parts[7], i, "keypresses"),
                clicks=_parse_int(parts[8], i, "clicks"),
                previews=_parse_int(parts[9], i, "previews"),
                cycles=_parse_int(parts[10], i, "cycles"),
                discards=_parse_int(parts[11], i, "discards"),
                pointer_travel_px=_parse_float(parts[12], i, "pointer_travel_px"),
                saved_px=_parse_float(parts[13], i, "saved_px"),
            )
        except ValueError as e:
            if isinstance(e, CsvError):
                raise
            raise CsvError(i, str(e)) from None
        if records and rec.trial_idx <= records[-1].trial_idx:
            raise CsvError(i, "trial_idx %d does not increase (previous %d)"
                           % (rec.trial_idx, records[-1].trial_idx))
        records.append(rec)

    return RunLog(
        run_id=meta["run_id"],
        condition=meta["condition"],
        device=meta["device"],
        profile=None if meta["profile"] == "none" else meta["profile"],
        seed=seed,
        records=tuple(records),
    )
