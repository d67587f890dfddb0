"""Delimited-text scan tables with reproducible metadata."""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field


@dataclass
class ScanTable:
    """Column-oriented results of one scan plus its provenance metadata.

    The CSV rendering starts with '#'-prefixed metadata lines (config hash
    and snapshot, units note), then one header row, then data rows in full
    shortest-roundtrip precision.
    """

    metadata: dict
    columns: list
    rows: list = field(default_factory=list)

    def add_row(self, values):
        if len(values) != len(self.columns):
            raise ValueError(
                f"row arity {len(values)} != column count {len(self.columns)}")
        self.rows.append([float(v) for v in values])

    def to_csv_text(self):
        lines = [f"# {key}: {value}" for key, value in self.metadata.items()]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(repr(v) for v in row))
        return "\n".join(lines) + "\n"

    def write(self, path, plot_script=True):
        text = self.to_csv_text()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        if plot_script:
            with open(f"{path}.plot.py", "w", encoding="utf-8") as fh:
                fh.write(_plot_script(path, self.columns))
        return path


def standard_metadata(kind, cfg_hash, cfg_line, extra=None):
    from . import __version__

    md = {
        "table": kind,
        "version": __version__,
        "config_hash": cfg_hash,
        "config": cfg_line,
        "units": "reduced (C*N_d = 1) unless a physical scale block is set; "
                 "sweep values in the unit of the swept config field",
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        md.update(extra)
    return md


def _plot_script(csv_path, columns):
    cols = ", ".join(repr(c) for c in columns)
    return f'''"""Companion plot for {csv_path}."""
import matplotlib.pyplot as plt
import numpy as np

data = np.genfromtxt({csv_path!r}, delimiter=",", comments="#", names=True)
columns = [{cols}]
x = data[columns[0]]
fig, ax = plt.subplots()
for name in columns[1:]:
    y = np.atleast_1d(data[name])
    if np.all(np.isfinite(y)):
        ax.plot(np.atleast_1d(x), y, label=name)
ax.set_xlabel(columns[0])
ax.legend(fontsize="small")
fig.tight_layout()
fig.savefig({csv_path!r} + ".png", dpi=160)
print("wrote", {csv_path!r} + ".png")
'''
