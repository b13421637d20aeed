"""Deterministic tabular output and figure rendering.

Floats are formatted with 17 significant digits so that CSV/JSON output
is byte-stable across runs on the same platform. Figures are rendered
with the Agg backend; they are a visual aid and carry no data not
already present in the tables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

_FMT = "%.17g"


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _FMT % float(v)
    if isinstance(v, complex):
        return f"{_FMT % v.real}{'+' if v.imag >= 0 else '-'}{_FMT % abs(v.imag)}j"
    return str(v)


@dataclass
class ResultTable:
    """A named table of columns of equal length."""
    name: str
    columns: dict = field(default_factory=dict)

    def add_column(self, name: str, values):
        self.columns[name] = list(values)
        return self

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0


def emit_table(table: ResultTable, directory, fmt: str = "csv") -> Path:
    """Write a table as CSV (LF line endings) or JSON. Returns the path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = directory / f"{table.name}.csv"
        lines = [",".join(table.columns.keys())]
        for i in range(table.n_rows):
            lines.append(",".join(format_value(col[i])
                                  for col in table.columns.values()))
        path.write_text("\n".join(lines) + "\n", newline="\n")
    elif fmt == "json":
        path = directory / f"{table.name}.json"
        payload = {name: [format_value(v) for v in col]
                   for name, col in table.columns.items()}
        path.write_text(json.dumps(payload, indent=2) + "\n", newline="\n")
    else:
        raise ValueError(f"unknown table format '{fmt}'")
    return path


def emit_summary(summary: dict, directory) -> Path:
    """Write summary.json with stringified floats for determinism."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    def conv(v):
        if isinstance(v, dict):
            return {k: conv(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [conv(x) for x in v]
        if isinstance(v, (float, np.floating, complex, np.integer, np.bool_)):
            return format_value(v)
        return v

    path = directory / "summary.json"
    path.write_text(json.dumps(conv(summary), indent=2, sort_keys=True) + "\n",
                    newline="\n")
    return path


def render_spectrum(energies, directory, name: str = "spectrum") -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    idx = np.arange(len(energies))
    ax.plot(idx, energies, "o", markersize=3)
    ax.set_xlabel("level index")
    ax.set_ylabel("energy")
    ax.set_title("eigenvalue ladder")
    path = directory / f"{name}.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def render_field(fld, directory, tag: str) -> Path:
    """Heatmap of |psi|^2 and phase for a reconstructed cross-section field."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    extent = [fld.q1[0], fld.q1[-1], fld.q2[0], fld.q2[-1]]
    dens = fld.amplitude ** 2
    im0 = axes[0].imshow(dens.T, origin="lower", extent=extent, cmap="viridis")
    axes[0].set_title(f"density s={fld.s:g}")
    fig.colorbar(im0, ax=axes[0])
    phase = np.where(dens > 1e-3 * dens.max(), fld.phase, np.nan)
    im1 = axes[1].imshow(phase.T, origin="lower", extent=extent,
                         cmap="twilight", vmin=-np.pi, vmax=np.pi)
    axes[1].set_title("phase")
    fig.colorbar(im1, ax=axes[1])
    for ax in axes:
        ax.set_xlabel("q1")
        ax.set_ylabel("q2")
    path = directory / f"field_{tag}.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def render_qgt_grid(omega, f, values, directory, name: str = "qgt_grid",
                    label: str = "Berry curvature") -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    im = ax.pcolormesh(omega, f, np.asarray(values).T, shading="auto",
                       cmap="RdBu_r")
    ax.set_xlabel("rotation rate")
    ax.set_ylabel("deformation amplitude")
    ax.set_title(label)
    fig.colorbar(im, ax=ax)
    path = directory / f"{name}.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path
