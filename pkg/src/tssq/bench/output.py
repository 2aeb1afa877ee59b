"""CSV and console output of experiment records."""
from __future__ import annotations

import csv
import io
import math
from typing import Iterable, TextIO

from .experiments import ErrorRecord

HEADER = ("experiment", "d", "method", "m", "err_min", "err_max", "err_mean", "ecancel_max",
          "targets_used", "oracle_ok")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        # repr is the shortest string that round-trips
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def _key(r: ErrorRecord):
    return (r.experiment, r.d, r.method, r.m)


def sorted_records(records: Iterable[ErrorRecord]) -> list[ErrorRecord]:
    """Records in the canonical (experiment, d, method, m) order."""
    return sorted(records, key=_key)


def write_csv(records: Iterable[ErrorRecord], stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(HEADER)
    for r in sorted_records(records):
        w.writerow([_fmt(getattr(r, f)) for f in HEADER])


def emit_csv(records: Iterable[ErrorRecord], path) -> None:
    """Write records to ``path``; I/O errors propagate unchanged."""
    with open(path, "w", newline="") as fh:
        write_csv(records, fh)


def csv_text(records: Iterable[ErrorRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def read_csv(path) -> list[ErrorRecord]:
    """Parse a file written by :func:`emit_csv`."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(ErrorRecord(
                row["experiment"], float(row["d"]), row["method"], row["m"],
                float(row["err_min"]), float(row["err_max"]), float(row["err_mean"]),
                float(row["ecancel_max"]), int(row["targets_used"]), row["oracle_ok"] == "true",
            ))
    return out


def emit_summary(records: Iterable[ErrorRecord]) -> str:
    """Fixed-width table of the records; distances without a valid oracle are marked."""
    lines = [f"{'experiment':<16}{'d':>11} {'method':<20}{'m':>6}{'min':>10}{'mean':>10}{'max':>10}"
             f"{'Ecancel':>10}{'used':>6}"]
    for r in sorted_records(records):
        flag = "" if r.oracle_ok else "  (no valid oracle)"
        lines.append(f"{r.experiment:<16}{r.d:>11.3e} {r.method:<20}{r.m:>6}{r.err_min:>10.1e}"
                     f"{r.err_mean:>10.1e}{r.err_max:>10.1e}{r.ecancel_max:>10.1e}{r.targets_used:>6}{flag}")
    return "\n".join(lines)
