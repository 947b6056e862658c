"""CSV and JSON writers for experiment results.

Column orders:

* ``population.csv``: ``bitstring, probability, stderr`` (bitstring is the
  N-character 0/1 label, qubit 0 first);
* ``parity.csv``: ``phi_radians, parity, stderr``;
* ``calibration.csv``: ``n, target, simulated, residual``.

Floats are written with ``repr`` so repeated runs are byte-identical.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Mapping

from . import __version__
from .experiments import CalibrationResult, FidelityReport, ParityScanResult, PopulationResult
from .noise import FIDELITY_CONVENTION

__all__ = [
    "write_population_csv",
    "write_parity_csv",
    "write_calibration_csv",
    "build_report",
    "write_report",
]


def _f(x: float) -> str:
    return repr(float(x))


def write_population_csv(path: Path, result: PopulationResult) -> None:
    n = result.probabilities.size.bit_length() - 1
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bitstring", "probability", "stderr"])
        for i, (p, s) in enumerate(zip(result.probabilities, result.stderrs)):
            w.writerow([format(i, f"0{n}b"), _f(p), _f(s)])


def write_parity_csv(path: Path, scan: ParityScanResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["phi_radians", "parity", "stderr"])
        for phi, p, s in zip(scan.phases, scan.parities, scan.stderrs):
            w.writerow([_f(phi), _f(p), _f(s)])


def write_calibration_csv(path: Path, result: CalibrationResult, targets: Mapping[int, float]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "target", "simulated", "residual"])
        for n in sorted(result.fidelities):
            w.writerow([n, _f(targets[n]), _f(result.fidelities[n]), _f(result.residuals[n])])


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else repr(value)
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    return value


def build_report(
    config,
    fidelity: FidelityReport | None = None,
    population: PopulationResult | None = None,
    scan: ParityScanResult | None = None,
    direct: float | None = None,
) -> dict:
    report: dict = {
        "version": __version__,
        "config_hash": config.digest(),
        "seed": config.seed,
        "shots": config.shots,
        "spam_corrected": config.spam_correct,
        "noise_preset": config.noise_preset,
        "noise": config.noise.as_dict(),
        "fidelity_convention": FIDELITY_CONVENTION,
    }
    if population is not None:
        report.update(A=population.a_value, A_stderr=population.stderr, A_raw=population.a_raw)
    if scan is not None:
        report.update(
            n=scan.n,
            B=scan.fitted_b,
            B_stderr=scan.b_stderr,
            phi0=scan.fitted_phi0,
            parity_rms_residual=scan.rms_residual,
            phase_points=len(scan.phases),
        )
    if fidelity is not None:
        report.update(
            F=fidelity.fidelity,
            W=fidelity.witness,
            entangled=fidelity.entangled,
            verdict=fidelity.verdict,
        )
        if direct is not None:
            report.update(direct_fidelity=direct, protocol_minus_direct=fidelity.fidelity - direct)
    return _clean(report)


def write_report(path: Path, report: dict) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
