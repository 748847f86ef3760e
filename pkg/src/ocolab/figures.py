"""Post-count probability sweeps behind the four published figures.

fig1  P0, P1 for the A and E models against chi_0, coherent input
fig2  the same for thermal input
fig3  thermal input against chi_1, one section per chi_0 branch
fig4  P0, P1 for the H model against y at a fixed thermal chi_0
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .jumps import chi0_branches

DEFAULT_POINTS = 200
DEFAULT_MARGIN = 1e-3
FIG4_CHI0 = 0.6
FIG4_Y_RANGE = (1.0, 10.0)
FIG3_NBAR_MAX = 5.0

AE_COLUMNS = ("x", "P0_A", "P1_A", "P0_E", "P1_E")
H_COLUMNS = ("y", "P0_H", "P1_H")
FIGURES = ("fig1", "fig2", "fig3", "fig4")


@dataclass(frozen=True, eq=False)
class SweepTable:
    """Columns plus one or more labelled blocks of rows (fig3 has two branches)."""

    figure: str
    columns: tuple[str, ...]
    sections: tuple[tuple[str | None, np.ndarray], ...]
    meta: dict = field(default_factory=dict)

    def column(self, name, section=0) -> np.ndarray:
        return self.sections[section][1][:, self.columns.index(name)]

    def section(self, label) -> np.ndarray:
        for lab, rows in self.sections:
            if lab == label:
                return rows
        raise KeyError(label)

    def equals(self, other: "SweepTable") -> bool:
        if self.columns != other.columns or len(self.sections) != len(other.sections):
            return False
        return all(
            a[0] == b[0] and a[1].shape == b[1].shape and np.array_equal(a[1], b[1])
            for a, b in zip(self.sections, other.sections)
        )


def _ae_rows(x, chi0, chi1, chi2, nbar):
    p0a = chi1 / nbar
    p1a = 2.0 * chi2 / nbar
    p0e = chi1 / (1.0 - chi0)
    p1e = chi2 / (1.0 - chi0)
    return np.column_stack([x, p0a, p1a, p0e, p1e])


def _thermal_rows(x, chi0):
    nbar = (1.0 - chi0) / chi0
    chi1 = chi0 * (1.0 - chi0)
    chi2 = chi1 * (1.0 - chi0)
    return _ae_rows(x, chi0, chi1, chi2, nbar)


def _coherent_rows(x, chi0):
    nbar = -np.log(chi0)
    chi1 = chi0 * nbar
    chi2 = chi1 * nbar / 2.0
    return _ae_rows(x, chi0, chi1, chi2, nbar)


def h_model_p01(y, chi0=FIG4_CHI0):
    """P0 and P1 of the H model for thermal input with vacuum occupation ``chi0``.

    The excitation weight <sin^2(y sqrt n)> is summed until the thermal terms
    drop below 1e-18.
    """
    y = np.asarray(y, dtype=float)
    q = 1.0 - chi0
    size = max(3, int(math.ceil(math.log(1e-18) / math.log(q))) + 2) if q > 0 else 3
    n = np.arange(size)
    chi = chi0 * q**n
    s2 = np.sin(np.multiply.outer(y, np.sqrt(n))) ** 2
    den = s2 @ chi
    p0 = s2[..., 1] * chi[1] / den
    p1 = s2[..., 2] * chi[2] / den
    return p0, p1


def _grid(grid, points, lo, hi):
    if grid is not None:
        g = np.asarray(grid, dtype=float)
    else:
        if points < 1:
            raise ValueError("sweep grid must have at least one point")
        g = np.linspace(lo, hi, points)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("sweep grid is empty")
    return g


def sweep_figure(which, grid=None, points=DEFAULT_POINTS, start=None, stop=None,
                 margin=DEFAULT_MARGIN, chi0=FIG4_CHI0, nbar_max=FIG3_NBAR_MAX) -> SweepTable:
    """Build the sweep table for ``which`` in {fig1, fig2, fig3, fig4}.

    The independent variable comes from ``grid`` when given, otherwise from
    ``points`` uniform samples of [start, stop]. Defaults keep a ``margin``
    away from the singular ends chi_0 = 0 and 1.
    """
    if which in ("fig1", "fig2"):
        lo = margin if start is None else start
        hi = 1.0 - margin if stop is None else stop
        x = _grid(grid, points, lo, hi)
        if np.any((x <= 0) | (x >= 1)):
            raise ValueError("chi_0 grid must lie in the open interval (0, 1)")
        rows = _coherent_rows(x, x) if which == "fig1" else _thermal_rows(x, x)
        state = "coherent" if which == "fig1" else "thermal"
        return SweepTable(which, AE_COLUMNS, ((None, rows),), {"state": state, "x": "chi0"})

    if which == "fig3":
        lo = margin if start is None else start
        hi = 0.25 if stop is None else stop
        x = _grid(grid, points, lo, hi)
        if np.any((x <= 0) | (x > 0.25)):
            raise ValueError("chi_1 grid must lie in (0, 1/4]")
        roots = np.array([chi0_branches(v) for v in x])
        upper = _thermal_rows(x, roots[:, 0])
        keep = (1.0 - roots[:, 1]) / roots[:, 1] < nbar_max
        lower = _thermal_rows(x[keep], roots[keep, 1])
        meta = {"state": "thermal", "x": "chi1", "lower_branch_nbar_max": nbar_max}
        return SweepTable(which, AE_COLUMNS, (("upper", upper), ("lower", lower)), meta)

    if which == "fig4":
        lo = FIG4_Y_RANGE[0] if start is None else start
        hi = FIG4_Y_RANGE[1] if stop is None else stop
        y = _grid(grid, points, lo, hi)
        if np.any(y <= 0):
            raise ValueError("y grid must be positive")
        p0, p1 = h_model_p01(y, chi0)
        rows = np.column_stack([y, p0, p1])
        return SweepTable(which, H_COLUMNS, ((None, rows),), {"state": "thermal", "chi0": chi0})

    raise ValueError(f"unknown figure {which!r}; expected one of {FIGURES}")


def zero_locations(x, p, rel_tol=1e-3):
    """Grid points where ``p`` has an interior local minimum at or below rel_tol * max(p)."""
    x = np.asarray(x)
    p = np.asarray(p)
    if p.size < 3:
        return np.array([])
    mid = p[1:-1]
    is_min = (mid <= p[:-2]) & (mid <= p[2:]) & (mid <= rel_tol * p.max())
    return x[1:-1][is_min]


# -- serialization ------------------------------------------------------------


def write_csv(table: SweepTable, path):
    with open(path, "w") as fh:
        fh.write(",".join(table.columns) + "\n")
        for label, rows in table.sections:
            if label is not None:
                fh.write(f"# branch={label}\n")
            for row in rows:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_csv(path, figure="") -> SweepTable:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty file")
    columns = tuple(lines[0].split(","))
    sections = []
    label, rows = None, []
    for ln in lines[1:]:
        if ln.startswith("# branch="):
            if label is not None or rows:
                sections.append((label, rows))
            label, rows = ln[len("# branch="):], []
            continue
        vals = [float(v) for v in ln.split(",")]
        if len(vals) != len(columns):
            raise ValueError(f"{path}: row has {len(vals)} fields, expected {len(columns)}")
        rows.append(vals)
    sections.append((label, rows))
    sections = tuple((lab, np.array(r, dtype=float).reshape(-1, len(columns))) for lab, r in sections)
    return SweepTable(figure, columns, sections)


def table_report(table: SweepTable) -> dict:
    """Summary used by ``ocolab figure --report``: ranges per column and fig4 zeros."""
    out = {"figure": table.figure, "meta": table.meta, "columns": list(table.columns), "sections": []}
    for label, rows in table.sections:
        sec = {"label": label, "rows": int(rows.shape[0]), "min": {}, "max": {}}
        for j, name in enumerate(table.columns):
            if rows.shape[0]:
                sec["min"][name] = float(rows[:, j].min())
                sec["max"][name] = float(rows[:, j].max())
        if table.figure == "fig4" and rows.shape[0]:
            sec["zeros"] = {
                name: zero_locations(rows[:, 0], rows[:, j]).tolist()
                for j, name in enumerate(table.columns) if j > 0
            }
        out["sections"].append(sec)
    return out


def dumps_report(report) -> str:
    return json.dumps(report, indent=2) + "\n"
