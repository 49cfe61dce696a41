"""Built-in parameter sets for the reference figure data, written as CSV."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .fock import SystemShape
from .loss import component_values, sweep_lossy
from .optics import MeasurementSetting, outcome_distribution
from .sources import SourceSpec, db_to_r, generate_postselected, sweep_displacement

SHAPE_211 = SystemShape(3, 5, (2, 1, 1))
FULL_L = (0, 1, 2, 3, 4)
J_144 = (1, 4, 4)
J_112 = (1, 1, 2)
FIG4_PATTERNS = ((0, 0, 0, 0, 0), (1, 0, 0, 0, 0), (2, 0, 0, 0, 0), (1, 1, 0, 0, 0), (1, 0, 1, 0, 0))
FIG4_EPSILONS = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25)

FIGURES = ("fig2a", "fig2b", "fig4", "fig5")


def fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive, evenly spaced grid rounded to 12 decimals."""
    if step <= 0:
        raise ValueError(f"grid step must be positive, got {step}")
    if stop < start:
        raise ValueError(f"grid end {stop} lies below its start {start}")
    count = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def sweep_csv(rows) -> str:
    return rows_to_csv(
        ["x", "kappa", "expectation", "bound"], [(r.x, r.kappa, r.expectation, r.bound) for r in rows]
    )


def lossy_csv(rows) -> str:
    return rows_to_csv(
        ["x", "kappa", "epsilon", "expectation", "bound", "retained_probability"],
        [(r.x, r.kappa, r.epsilon, r.expectation, r.bound, r.retained_probability) for r in rows],
    )


def basis_label(basis) -> str:
    return "|".join(" ".join(str(v) for v in part) for part in basis)


def stats_csv(distribution, counts=None) -> str:
    header = ["basis", "probability"] + (["count"] if counts is not None else [])
    rows = []
    for b, p in distribution.items():
        row = [basis_label(b), p]
        if counts is not None:
            row.append(counts.get(b, 0))
        rows.append(row)
    return rows_to_csv(header, rows)


def fig2a(threads=None) -> dict[str, str]:
    r = db_to_r(0.5)
    xs = grid(0.0, 1.0, 0.001)
    return {
        "fig2a_j144.csv": sweep_csv(sweep_displacement(SHAPE_211, r, xs, J_144, FULL_L, threads=threads)),
        "fig2a_j112.csv": sweep_csv(sweep_displacement(SHAPE_211, r, xs, J_112, FULL_L, threads=threads)),
    }


def fig2b(threads=None) -> dict[str, str]:
    xs = grid(0.0, 1.0, 0.005)
    out = {}
    for db in (0.5, 5.0, 10.0):
        rows = sweep_displacement(SHAPE_211, db_to_r(db), xs, J_144, FULL_L, threads=threads)
        out[f"fig2b_r{db:g}dB.csv"] = sweep_csv(rows)
    return out


def fig4(threads=None) -> dict[str, str]:
    r = db_to_r(5.0)
    xs = grid(0.0, 1.0, 0.005)
    mixture = lossy_csv(sweep_lossy(SHAPE_211, r, xs, FIG4_EPSILONS, J_144, FULL_L, cutoff=3, threads=threads))
    comp_rows = []
    for x in xs:
        values, _ = component_values(SHAPE_211, r, x, FIG4_PATTERNS, J_144, FULL_L)
        for nu, vals in zip(FIG4_PATTERNS, values):
            if np.isnan(vals).any():
                continue  # pattern impossible at this x
            for kappa, v in enumerate(vals):
                comp_rows.append((x, "".join(map(str, nu)), kappa, v))
    components = rows_to_csv(["x", "nu_tot", "kappa", "expectation"], comp_rows)
    return {"fig4.csv": mixture, "fig4_components.csv": components}


def fig5(threads=None) -> dict[str, str]:
    state = generate_postselected(SHAPE_211, SourceSpec.squeezed(db_to_r(10.0), 0.0)).state
    settings = {
        "fig5_computational.csv": MeasurementSetting(),
        "fig5_l0.csv": MeasurementSetting.hadamard(0, J_144),
        "fig5_l1.csv": MeasurementSetting.hadamard(1, J_144),
    }
    return {name: stats_csv(outcome_distribution(state, s)) for name, s in settings.items()}


def reproduce(figure: str, outdir: str | Path, threads=None) -> list[Path]:
    builders = {"fig2a": fig2a, "fig2b": fig2b, "fig4": fig4, "fig5": fig5}
    if figure not in builders:
        raise ValueError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in builders[figure](threads).items():
        path = outdir / name
        path.write_text(text)
        written.append(path)
    return written
