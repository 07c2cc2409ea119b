"""CSV tables and the fixed number formats used in every emitted file.

Tables hold already-formatted strings, so writing a table and parsing it
back gives an identical object.
"""

import csv
import io
import math
from dataclasses import dataclass

from .exceptions import ConfigParseError
from .photonics.raman import NoiseDataPoint


def fmt_db(x):
    """dB values: two decimals, with explicit infinities."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.2f}"


def fmt_prob(x):
    """Probabilities and rates: six significant digits."""
    return f"{x:.6g}"


def fmt_num(x, digits=10):
    return f"{x:.{digits}g}"


@dataclass(frozen=True)
class Table:
    header: tuple
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "header", tuple(self.header))
        object.__setattr__(self, "rows", tuple(tuple(str(v) for v in r) for r in self.rows))
        for row in self.rows:
            if len(row) != len(self.header):
                raise ValueError(f"row {row} does not match header {self.header}")

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        writer.writerows(self.rows)
        return buf.getvalue()

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text):
        reader = csv.reader(io.StringIO(text))
        rows = list(reader)
        if not rows:
            raise ConfigParseError("empty CSV", line=1)
        return cls(rows[0], rows[1:])

    def column(self, name):
        i = self.header.index(name)
        return [row[i] for row in self.rows]

    def __len__(self):
        return len(self.rows)


def read_noise_csv(text, source="<noise data>"):
    """Parse measured noise rows (``pump_mw, counts_per_s[, length_cm]``)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ConfigParseError(f"{source}: empty file", line=1) from None
    for required in ("pump_mw", "counts_per_s"):
        if required not in header:
            raise ConfigParseError(f"{source}: missing column {required!r}", line=1)
    unknown = set(header) - {"pump_mw", "counts_per_s", "length_cm"}
    if unknown:
        raise ConfigParseError(f"{source}: unknown column(s) {sorted(unknown)}", line=1)
    idx = {name: header.index(name) for name in header}
    points = []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ConfigParseError(f"{source}: expected {len(header)} fields, got {len(row)}", line)
        try:
            pump_w = float(row[idx["pump_mw"]]) * 1e-3
            counts = float(row[idx["counts_per_s"]])
            length = float(row[idx["length_cm"]]) if "length_cm" in idx else None
            points.append(NoiseDataPoint(pump_w, counts, length))
        except ValueError as exc:
            raise ConfigParseError(f"{source}: {exc}", line) from None
    return points
