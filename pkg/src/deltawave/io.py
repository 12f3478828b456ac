"""CSV output shared by every producer.

Comma separated, one header row, numbers with 12 significant digits and
line-feed line endings. ``SCHEMAS`` lists every artifact header.
"""

from __future__ import annotations

import csv
from numbers import Real

SCHEMAS = {
    "snapshots": ("t", "x", "u", "v", "w", "z"),
    "fields": ("x", "t", "u", "v", "w", "z"),
    "compare": ("h", "component", "sup_error"),
    "amplitudes": ("line", "speed", "component", "t", "delta_amp", "delta_prime_amp"),
    "moments": ("epsilon", "component", "line_speed", "t", "M0", "M1", "R1", "R2", "R3", "R4"),
    "entropy": ("line_speed", "epsilon", "term1", "term2", "verdict"),
    "macroscopic": ("epsilon", "beta", "sup_z", "sup_zx", "sup_z_sqrt_eps", "sup_zx_eps", "residual_z"),
    "moderateness": ("j", "epsilon", "sup_norm", "fitted_p", "fit_residual"),
    "extrapolation": ("component", "line_speed", "t", "quantity", "order", "value"),
}


def fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, Real):
        return format(float(value), ".12g")
    return str(value)


def write_csv(path, schema: str, rows) -> None:
    header = SCHEMAS[schema]
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row of length {len(row)} does not fit schema {schema!r}")
            out.writerow([fmt(v) for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def gnuplot_script(csv_path, x_col: str, y_cols, schema: str) -> str:
    """Plain gnuplot commands plotting ``y_cols`` against ``x_col``."""
    header = SCHEMAS[schema]
    xi = header.index(x_col) + 1
    plots = ", ".join(
        f"'{csv_path}' using {xi}:{header.index(c) + 1} with lines title '{c}'" for c in y_cols
    )
    return "set datafile separator ','\nset key autotitle columnhead\nplot " + plots + "\n"
