"""Scenario execution: pick bases, run the integrators, write CSV and summaries."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np

from .basis import BasisMap
from .evolution import DensityMatrix, TimeSeries, evolve_closed, evolve_open
from .observables import (config_label, config_populations, parity_defect_observer,
                          standard_observer)
from .scenario import ScenarioConfig

CORE_COLUMNS = ("P0", "P1", "P2", "P3", "P4", "P5", "S", "trace", "N_exp", "parity_exp")


def full_config_observer(work: BasisMap, full: BasisMap):
    """cfg_<occupations> for every configuration of ``full``; zero off the working basis."""
    positions = np.array([full.index(c) for c in work.configs])
    labels = [config_label(c) for c in full.configs]

    def observe(state) -> Dict[str, float]:
        pops = np.zeros(full.size)
        pops[positions] = np.clip(config_populations(state), 0.0, None)
        return dict(zip(labels, pops.tolist()))

    return observe


def run_scenario(config: ScenarioConfig, open_system: Optional[bool] = None) -> TimeSeries:
    """Evolve the scenario's initial state; ``open_system`` overrides the file."""
    is_open = config.open_system if open_system is None else open_system
    params = config.lattice_params()
    schedule = config.schedule()
    basis = config.open_basis() if is_open else config.closed_basis()
    observers = [standard_observer(basis), parity_defect_observer(basis)]
    if config.record_configs:
        observers.append(full_config_observer(basis, config.full_basis()))
    psi0 = config.initial_state(basis)
    if is_open:
        rho0 = DensityMatrix.from_state(psi0)
        return evolve_open(rho0, params, config.noise_params(), schedule, observers, reduce=False)
    return evolve_closed(psi0, params, schedule, observers)


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("FRACRES_THREADS", "2")))
    except ValueError:
        return 1


def run_pair(config: ScenarioConfig):
    """(closed, open) runs on the same time grid, concurrently when allowed."""
    with ThreadPoolExecutor(max_workers=min(2, max_workers())) as pool:
        closed = pool.submit(run_scenario, config, False)
        opened = pool.submit(run_scenario, config, True)
        return closed.result(), opened.result()


def csv_columns(series: TimeSeries) -> List[str]:
    cols = ["t_over_T"] + [c for c in CORE_COLUMNS if c in series.columns]
    cols += [c for c in series.columns if c.startswith("cfg_")]
    return cols


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path_or_buffer, columns: Sequence[str], data: Dict[str, np.ndarray]):
    close = False
    if isinstance(path_or_buffer, (str, os.PathLike)):
        handle = open(path_or_buffer, "w", newline="", encoding="utf-8")
        close = True
    else:
        handle = path_or_buffer
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        n = len(data[columns[0]])
        for i in range(n):
            writer.writerow([_fmt(data[c][i]) for c in columns])
    finally:
        if close:
            handle.close()


def series_table(series: TimeSeries) -> Dict[str, np.ndarray]:
    table = {"t_over_T": series.t_over_T}
    table.update(series.columns)
    return table


def compare_table(closed: TimeSeries, opened: TimeSeries):
    """Columns t_over_T, P_i, P_i_D side by side; also returns max |P_i - P_i^D| per i."""
    if not np.array_equal(closed.t_over_T, opened.t_over_T):
        raise ValueError("closed and open runs are sampled on different grids")
    names = [c for c in CORE_COLUMNS if c.startswith("P") and c in closed.columns and c in opened.columns]
    columns = ["t_over_T"]
    table = {"t_over_T": closed.t_over_T}
    deviations = {}
    for name in names:
        columns += [name, name + "_D"]
        table[name] = closed.columns[name]
        table[name + "_D"] = opened.columns[name]
        deviations[name] = float(np.max(np.abs(closed.columns[name] - opened.columns[name])))
    return columns, table, deviations


def first_crossing(t: np.ndarray, values: np.ndarray, level: float) -> Optional[float]:
    hits = np.nonzero(values > level)[0]
    return float(t[hits[0]]) if hits.size else None


def dominant_period(t: np.ndarray, values: np.ndarray) -> Optional[float]:
    """Period of the strongest non-constant Fourier component, in the units of ``t``."""
    if len(t) < 4:
        return None
    centered = values - values.mean()
    if not np.any(np.abs(centered) > 1e-12):
        return None
    spectrum = np.abs(np.fft.rfft(centered))
    freqs = np.fft.rfftfreq(len(t), d=t[1] - t[0])
    k = int(np.argmax(spectrum[1:]) + 1)
    return float(1.0 / freqs[k])


def summarize(config: ScenarioConfig, series: TimeSeries, is_open: bool) -> Dict[str, object]:
    t = series.t_over_T
    out: Dict[str, object] = {
        "samples": len(t),
        "t_final_over_T": float(t[-1]),
        "final_S": float(series["S"][-1]),
        "final_trace_defect": float(abs(series["trace"][-1] - 1.0)),
        "max_parity_defect": float(np.max(series["parity_defect"])),
        "parity_exp_drift": float(np.max(np.abs(series["parity_exp"] - series["parity_exp"][0]))),
    }
    if is_open:
        out["max_hermiticity_defect"] = float(np.max(series.diagnostics["hermiticity"]))
        out["min_eigenvalue"] = float(np.min(series.diagnostics["min_eigenvalue"]))
    else:
        out["final_norm_defect"] = float(abs(series.diagnostics["norm"][-1] - 1.0))
    if config.drive == "fractional" and "P3" in series.columns:
        k = int(np.argmax(series["P3"]))
        out["peak_P3"] = float(series["P3"][k])
        out["peak_P3_t_over_T"] = float(t[k])
    elif config.drive == "integer" and "P1" in series.columns:
        out["P1_period_over_T"] = dominant_period(t, series["P1"])
    return out


def format_summary(summary: Dict[str, object]) -> str:
    lines = []
    for key, value in summary.items():
        if isinstance(value, float):
            value = format(value, ".6g")
        lines.append(f"{key:<24} {value}")
    return "\n".join(lines)
