"""Batch command-line front end.

Subcommands::

    ghzsim ghz-run      --n 4 [--exact] [--out DIR]     # population + parity + report
    ghzsim population   --n 4
    ghzsim parity-scan  --n 4 --shots 500 --seed 3
    ghzsim calibrate    [--table FILE]                  # fit (p2, sigma) to GHZ fidelities
    ghzsim transpile    FILE | --n 8 [--output FILE]

Exit codes: 0 success, 1 simulation/internal failure, 2 bad input.
"""
from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

import numpy as np

from .circuit import Circuit, TranspileError, format_circuit, read_circuit, transpile
from .config import NOISE_PRESETS, ConfigError, RunConfig, format_noise_config, resolve_config
from .exceptions import CircuitParseError, GhzSimError
from .experiments import (
    MEASURED_GHZ_FIDELITIES,
    calibrate_noise_to_table1,
    default_phases,
    direct_fidelity,
    fidelity_and_witness,
    parity_scan,
    population_experiment,
)
from .ghz import build_ghz_circuit
from .reporting import (
    build_report,
    write_calibration_csv,
    write_parity_csv,
    write_population_csv,
    write_report,
)
from .simulator import simulate


class InputError(GhzSimError):
    """User-supplied file or argument is unusable (exit code 2)."""


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat key=value run configuration")
    p.add_argument("--n", type=int, dest="ghz_n", help="GHZ size (2..10)")
    p.add_argument("--circuit", type=Path, help="prepare with a circuit file instead of the GHZ builder")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--exact", action="store_true", help="infinite-shot mode (shots = 0)")
    p.add_argument("--no-spam-correct", action="store_true")
    p.add_argument("--no-dd", action="store_true", help="omit the R_y(+-pi) echo layers")
    p.add_argument("--noise", choices=NOISE_PRESETS, help="noise preset (default: calibrated)")
    p.add_argument("--phase-points", type=int)
    p.add_argument("--out", type=Path, help="output directory (default: results)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ghzsim", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("ghz-run", "population and parity experiments, fidelity and witness"),
        ("population", "computational-basis population experiment only"),
        ("parity-scan", "parity oscillation scan and fit only"),
    ):
        _common(sub.add_parser(name, help=help_))
    cal = sub.add_parser("calibrate", help="fit p2 and sigma_collective to a fidelity table")
    _common(cal)
    cal.add_argument("--table", type=Path, help="rows of 'N F' (default: shipped measured table)")
    tr = sub.add_parser("transpile", help="expand to native gates and fold virtual Z")
    _common(tr)
    tr.add_argument("file", nargs="?", type=Path, help="circuit text file")
    tr.add_argument("--output", "-o", type=Path, help="native circuit destination")
    return parser


def _config_from_args(args: argparse.Namespace, need_target: bool = True) -> RunConfig:
    overrides = {
        "ghz_n": args.ghz_n,
        "circuit": args.circuit,
        "shots": 0 if args.exact else args.shots,
        "seed": args.seed,
        "spam_correct": False if args.no_spam_correct else None,
        "include_dd": False if args.no_dd else None,
        "noise": args.noise,
        "phase_points": args.phase_points,
        "out": args.out,
        "table": getattr(args, "table", None),
    }
    return resolve_config(args.config, overrides).validate(need_target)


def _load_circuit(path: Path) -> Circuit:
    try:
        return read_circuit(path)
    except OSError as exc:
        raise InputError(f"cannot read circuit {path}: {exc}") from None
    except CircuitParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _prepare(cfg: RunConfig) -> tuple[Circuit, int]:
    if cfg.ghz_n is not None:
        return build_ghz_circuit(cfg.ghz_n, cfg.include_dd), cfg.ghz_n
    circuit = _load_circuit(cfg.circuit)
    if circuit.n_qubits < 2:
        raise InputError("GHZ protocol needs at least 2 qubits")
    return circuit, circuit.n_qubits


def _phases(cfg: RunConfig, n: int) -> np.ndarray:
    if cfg.phase_points is None:
        return default_phases(n)
    return np.linspace(0.0, 2 * np.pi, cfg.phase_points, endpoint=False)


def _run_experiments(cfg: RunConfig, do_population: bool, do_parity: bool) -> int:
    circuit, n = _prepare(cfg)
    rho = simulate(circuit, cfg.noise)
    pop = scan = fid = None
    if do_population:
        pop = population_experiment(circuit, cfg.noise, cfg.shots, cfg.seed, cfg.spam_correct, rho=rho)
    if do_parity:
        scan = parity_scan(circuit, n, cfg.noise, _phases(cfg, n), cfg.shots, cfg.seed, cfg.spam_correct, rho=rho)
    direct = direct_fidelity(rho, n)
    if pop is not None and scan is not None:
        fid = fidelity_and_witness(pop.a_value, scan.fitted_b, n=n, spam_corrected=cfg.spam_correct, shots=cfg.shots, seed=cfg.seed)

    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    if pop is not None:
        write_population_csv(out / "population.csv", pop)
    if scan is not None:
        write_parity_csv(out / "parity.csv", scan)
    report = build_report(cfg, fid, pop, scan, direct if fid is not None else None)
    report.setdefault("n", n)
    write_report(out / "report.json", report)

    if pop is not None:
        print(f"A = {pop.a_value:.6f}")
    if scan is not None:
        print(f"B = {scan.fitted_b:.6f}")
    if fid is not None:
        print(f"F = {fid.fidelity:.6f}")
        print(f"<W> = {fid.witness:.6f}")
        print(f"verdict: {fid.verdict}")
    return 0


_UNCERTAINTY = re.compile(r"\(\d+\)$")


def read_fidelity_table(path: Path) -> dict[int, float]:
    """Rows ``N F`` (whitespace or comma separated, ``#`` comments).

    Values like ``0.968(5)`` are accepted; the uncertainty is dropped.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read table {path}: {exc}") from None
    table: dict[int, float] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split("#", 1)[0].replace(",", " ").split()
        if not fields:
            continue
        if len(fields) != 2:
            raise InputError(f"{path}:{lineno}: expected 'N F'")
        try:
            n = int(fields[0])
            f = float(_UNCERTAINTY.sub("", fields[1]))
        except ValueError:
            if not table and not fields[0].isdigit():
                continue  # header row
            raise InputError(f"{path}:{lineno}: cannot parse {line.strip()!r}") from None
        if not 2 <= n <= 10 or not 0.0 <= f <= 1.0:
            raise InputError(f"{path}:{lineno}: N must be 2..10 and F in [0, 1]")
        table[n] = f
    if not table:
        raise InputError(f"{path}: no (N, F) rows")
    return table


def _calibrate(cfg: RunConfig) -> int:
    targets = read_fidelity_table(cfg.table) if cfg.table is not None else dict(MEASURED_GHZ_FIDELITIES)
    result = calibrate_noise_to_table1(targets, fixed=cfg.noise)
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    header = (
        f"fitted p2, sigma_collective; rms = {result.rms!r}; converged = {result.converged}\n"
        f"config_hash = {cfg.digest()}"
    )
    (out / "fitted_noise.cfg").write_text(format_noise_config(result.noise, header))
    write_calibration_csv(out / "calibration.csv", result, targets)
    print(f"p2 = {result.noise.p2:.6g}")
    print(f"sigma_collective = {result.noise.sigma_collective:.6g}")
    for n in sorted(result.residuals):
        print(f"N={n}: target {targets[n]:.4f} simulated {result.fidelities[n]:.4f}")
    print(f"RMS = {result.rms:.4g}{'' if result.converged else ' (search did not converge)'}")
    return 0


def _transpile(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.file is not None:
        circuit = _load_circuit(args.file)
        default_name = f"{args.file.stem}.native.txt"
    elif cfg.ghz_n is not None or cfg.circuit is not None:
        circuit, _ = _prepare(cfg)
        default_name = f"ghz{cfg.ghz_n}.native.txt" if cfg.ghz_n else f"{cfg.circuit.stem}.native.txt"
    else:
        raise InputError("transpile needs a circuit file or --n")
    native = transpile(circuit, check=circuit.n_qubits <= 8)
    dest = args.output
    if dest is None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        dest = cfg.out / default_name
    Path(dest).write_text(format_circuit(native))
    counts = native.gate_counts()
    summary = ", ".join(f"{k}={counts[k]}" for k in sorted(counts))
    duration = native.total_duration(cfg.noise.dur_1q_seconds, cfg.noise.dur_2q_seconds)
    print(f"wrote {dest}")
    print(f"gates: {summary or 'none'}")
    print(f"total duration: {duration * 1e6:.3f} us")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "transpile":
            cfg = _config_from_args(args, need_target=False)
            return _transpile(cfg, args)
        if args.command == "calibrate":
            return _calibrate(_config_from_args(args, need_target=False))
        cfg = _config_from_args(args)
        if args.command == "ghz-run":
            return _run_experiments(cfg, True, True)
        if args.command == "population":
            return _run_experiments(cfg, True, False)
        return _run_experiments(cfg, False, True)
    except (ConfigError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TranspileError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    except GhzSimError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
