"""Command-line interface.

Subcommands: spectrum, spacings, eigenstates, chaos-scan, bands, pulse,
pulse-scan. Parameters come from an optional YAML config (--config) with
command-line flags taking precedence. Results go to --out (atomic write)
or standard output; all diagnostics go to standard error.

Exit codes: 0 success, 1 configuration error, 2 numeric failure,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import os
import sys

import numpy as np

from . import __version__
from .config import RunConfig, from_mapping, parse_config
from .dynamics import (FRAME_SIGN, EvolutionConfig, pulse_error_scan, run_pulse,
                       uniform_pulse_duration)
from .errors import ConfigError, ConfigConstraintError, NumericError
from .hamiltonian import build_rotating, diagonal_energies, predicted_border, sample_couplings
from .localization import component_moments, delocalization_scan, participation_ratio
from .spectral import (SpacingHistogram, band_partition, diagonalize, ks_distance,
                       spacings, unfold)
from .sweep import derive_stream_seed, map_cells
from .tables import Table, write_table

WORKERS_ENV = "GRADCHAIN_WORKERS"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage errors via ConfigError (exit code 1)."""

    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML config file")
    common.add_argument("--qubits", type=int, help="chain length L")
    common.add_argument("--gradient", type=float, help="frequency gradient a")
    common.add_argument("--rabi", type=float, help="Rabi frequency Omega")
    common.add_argument("--nu", type=float, help="drive frequency (default: ladder center)")
    common.add_argument("--phase", type=float, help="pulse phase (default pi/2)")
    common.add_argument("--coupling", choices=("nn-constant", "nn-random", "all-random"),
                        help="coupling model")
    common.add_argument("--j", type=float, help="coupling scale J")
    common.add_argument("--distribution", choices=("symmetric", "nonnegative"),
                        help="random coupling support: [-J,J] or [0,J]")
    common.add_argument("--seed", type=int, help="master seed for random couplings")
    common.add_argument("--realizations", type=int, help="disorder realizations")
    common.add_argument("--workers", type=int, help="parallel workers")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (default csv)")

    parser = _Parser(prog="gradchain",
                     description="Chaos diagnostics for a driven Ising chain in a gradient field")
    parser.add_argument("--version", action="version", version=f"gradchain {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    sub.add_parser("spectrum", parents=[common],
                   help="eigenvalues of the rotating-frame Hamiltonian")

    p = sub.add_parser("spacings", parents=[common],
                       help="nearest-neighbor spacing distribution P(s)")
    p.add_argument("--bins", type=int, help="histogram bins")
    p.add_argument("--unfold-degree", type=int, dest="unfold_degree")
    p.add_argument("--unfold-trim", type=float, dest="unfold_trim")
    p.add_argument("--scope", choices=("full", "per-band"), dest="spacings_scope",
                   help="use the full spectrum or drop spacings across band edges")
    p.add_argument("--gap-factor", type=float, dest="gap_factor")

    p = sub.add_parser("eigenstates", parents=[common],
                       help="participation ratio and component kurtosis per eigenstate")
    p.add_argument("--window", type=float, help="central fraction of states")

    p = sub.add_parser("chaos-scan", parents=[common],
                       help="participation ratio vs J and the delocalization border")
    p.add_argument("--j-grid", dest="j_grid", help="comma-separated J values")
    p.add_argument("--window", type=float)
    p.add_argument("--threshold", type=float, help="border doubling factor")

    p = sub.add_parser("bands", parents=[common], help="gap-clustered band structure")
    p.add_argument("--gap-factor", type=float, dest="gap_factor")

    p = sub.add_parser("pulse", parents=[common],
                       help="single-pulse superposition preparation errors")
    p.add_argument("--tau", type=float, help="pulse duration (default pi/(2 Omega))")
    p.add_argument("--dt", type=float, help="step for the stepped method")
    p.add_argument("--method", choices=("spectral", "stepped"))
    p.add_argument("--frame", choices=("rotating", "lab"))

    p = sub.add_parser("pulse-scan", parents=[common],
                       help="eta and phi scaling across a Rabi-frequency grid")
    p.add_argument("--omega-grid", dest="omega_grid", help="comma-separated Omega values")
    p.add_argument("--tau", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--method", choices=("spectral", "stepped"))
    p.add_argument("--frame", choices=("rotating", "lab"))
    p.add_argument("--gap-factor", type=float, dest="gap_factor")
    return parser


_FLAG_KEYS = ("qubits", "gradient", "rabi", "nu", "phase", "coupling", "j",
              "distribution", "seed", "realizations", "workers", "bins",
              "window", "threshold", "gap_factor", "unfold_degree",
              "unfold_trim", "spacings_scope", "tau", "dt", "method", "frame",
              "j_grid", "omega_grid")


def _effective_config(args) -> RunConfig:
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from None
        cfg = parse_config(text)
    else:
        cfg = RunConfig()
    overrides = {}
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if "workers" not in overrides and cfg.workers == 1 and os.environ.get(WORKERS_ENV):
        try:
            overrides["workers"] = int(os.environ[WORKERS_ENV])
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer") from None
    doc = cfg.as_dict()
    doc.update(overrides)
    return from_mapping(doc)


def _provenance(cfg: RunConfig, command: str) -> dict:
    return {
        "command": command,
        "parameters": cfg.as_dict(),
        "version": __version__,
        "frame_sign": FRAME_SIGN,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }


def _spectrum_table(cfg: RunConfig) -> Table:
    spec = cfg.chain_spec()
    cm = sample_couplings(cfg.coupling_spec(), spec.L)
    s = diagonalize(build_rotating(spec, cm))
    rows = [(i, float(v)) for i, v in enumerate(s.values)]
    return Table(columns=("index", "eigenvalue"), rows=rows)


def _pooled_spacings(cfg: RunConfig, spec, coupling) -> np.ndarray:
    """Unfolded spacings pooled over realizations; per-band scope drops
    spacings that straddle a band edge of the trimmed raw spectrum."""
    def one(ri: int) -> np.ndarray:
        if coupling.is_random:
            seed = derive_stream_seed(cfg.seed, 0, ri)
            cs = type(coupling)(kind=coupling.kind, J=coupling.J, seed=seed,
                                distribution=coupling.distribution)
        else:
            cs = coupling
        values = diagonalize(build_rotating(spec, sample_couplings(cs, spec.L))).values
        n = values.shape[0]
        cut = int(round(n * cfg.unfold_trim))
        kept = values[cut:n - cut] if cut else values
        u = unfold(kept, cfg.unfold_degree, trim=0.0)
        s = np.diff(u)
        if cfg.spacings_scope == "per-band":
            splits = np.cumsum([b - a for a, b in band_partition(kept, cfg.gap_factor).ranges])
            crossing = splits[:-1] - 1  # spacing i joins levels i and i+1
            mask = np.ones(s.shape[0], dtype=bool)
            mask[crossing] = False
            s = s[mask]
        return s

    parts = map_cells(one, list(range(cfg.realizations)), cfg.workers)
    return np.concatenate(parts)


def _spacings_table(cfg: RunConfig) -> Table:
    spec = cfg.chain_spec()
    coupling = cfg.coupling_spec()
    s = _pooled_spacings(cfg, spec, coupling)
    hist = SpacingHistogram.from_spacings(s, bins=cfg.bins)
    rows = [(float(lo), float(hi), float(d), int(c))
            for lo, hi, d, c in zip(hist.bin_edges[:-1], hist.bin_edges[1:],
                                    hist.densities, hist.counts)]
    table = Table(columns=("s_bin_lo", "s_bin_hi", "density", "count"), rows=rows)
    table.provenance["ks_poisson"] = ks_distance(s, "poisson")
    table.provenance["ks_wigner_dyson"] = ks_distance(s, "wigner-dyson")
    table.provenance["mean_spacing"] = hist.mean_spacing
    table.provenance["sample_count"] = hist.sample_count
    return table


def _eigenstates_table(cfg: RunConfig) -> Table:
    spec = cfg.chain_spec()
    cm = sample_couplings(cfg.coupling_spec(), spec.L)
    s = diagonalize(build_rotating(spec, cm))
    moments = component_moments(s, window=cfg.window)
    rows = []
    for idx, kurt in zip(moments.state_indices, moments.kurtoses):
        rows.append((int(idx), float(s.values[idx]),
                     participation_ratio(s.vectors[:, idx]), float(kurt)))
    table = Table(columns=("index", "energy", "pr", "excess_kurtosis"), rows=rows)
    table.provenance["aggregate_kurtosis"] = moments.aggregate_kurtosis
    return table


def _chaos_scan_table(cfg: RunConfig) -> Table:
    if not cfg.j_grid:
        raise ConfigConstraintError("key 'j_grid': chaos-scan needs a J grid")
    spec = cfg.chain_spec()
    result = delocalization_scan(
        spec, cfg.coupling, np.array(cfg.j_grid), cfg.realizations,
        master_seed=cfg.seed if cfg.seed is not None else 0,
        window=cfg.window, threshold=cfg.threshold, workers=cfg.workers,
        distribution=cfg.distribution)
    rows = [(float(J), float(m), float(e), result.predicted_border, cfg.realizations)
            for J, m, e in zip(result.j_grid, result.mean_pr, result.stderr_pr)]
    table = Table(columns=("J", "mean_pr", "stderr_pr", "predicted_jcr", "realizations"),
                  rows=rows)
    table.provenance["estimated_border"] = result.estimated_border
    table.provenance["window"] = result.window
    table.provenance["threshold"] = result.threshold
    return table


def _bands_table(cfg: RunConfig) -> Table:
    spec = cfg.chain_spec()
    cm = sample_couplings(cfg.coupling_spec(), spec.L)
    values = diagonalize(build_rotating(spec, cm)).values
    part = band_partition(values, cfg.gap_factor)
    rows = [(b, lo, hi - 1, hi - lo, float(values[lo]), float(values[hi - 1]))
            for b, (lo, hi) in enumerate(part.ranges)]
    table = Table(columns=("band", "first_level", "last_level", "count", "e_lo", "e_hi"),
                  rows=rows)
    undriven = band_partition(np.sort(diagonal_energies(spec, cm)), cfg.gap_factor)
    table.provenance["band_count"] = part.count
    table.provenance["band_count_undriven"] = undriven.count
    table.provenance["overlap"] = float(np.clip(1.0 - part.count / undriven.count, 0.0, 1.0))
    table.provenance["gap_threshold"] = part.gap_threshold
    return table


def _pulse_table(cfg: RunConfig) -> Table:
    spec = cfg.chain_spec()
    cm = sample_couplings(cfg.coupling_spec(), spec.L)
    evo = EvolutionConfig(method=cfg.method, dt=cfg.dt, duration=cfg.tau)
    metrics, duration, stepped = run_pulse(spec, cm, evo, frame=cfg.frame,
                                           phase_convention=cfg.phase_convention)
    rows = [(metrics.eta, metrics.phi, metrics.max_amplitude_error,
             metrics.max_abs_phase, duration)]
    table = Table(columns=("eta", "phi", "max_amplitude_error", "max_abs_phase",
                           "duration"), rows=rows)
    if stepped is not None:
        table.provenance["steps"] = stepped.steps
        table.provenance["dt"] = stepped.dt
        table.provenance["norm_drift"] = stepped.norm_drift
        table.provenance["warnings"] = list(stepped.warnings)
    return table


def _pulse_scan_table(cfg: RunConfig) -> Table:
    if not cfg.omega_grid:
        raise ConfigConstraintError("key 'omega_grid': pulse-scan needs an Omega grid")
    spec = cfg.chain_spec()
    cm = sample_couplings(cfg.coupling_spec(), spec.L)
    evo = EvolutionConfig(method=cfg.method, dt=cfg.dt, duration=cfg.tau)
    result = pulse_error_scan(spec, cm, np.array(cfg.omega_grid), evo,
                              gap_factor=cfg.gap_factor, workers=cfg.workers,
                              frame=cfg.frame, phase_convention=cfg.phase_convention)
    rows = [(float(w), float(e), float(p), float(b), float(d))
            for w, e, p, b, d in zip(result.omegas, result.eta, result.phi,
                                     result.band_overlap, result.durations)]
    table = Table(columns=("omega", "eta", "phi", "band_overlap", "duration"), rows=rows)
    table.provenance["slope_eta"] = result.slope_eta
    table.provenance["slope_phi"] = result.slope_phi
    table.provenance["regime_ok"] = result.regime_ok
    return table


_COMMANDS = {
    "spectrum": _spectrum_table,
    "spacings": _spacings_table,
    "eigenstates": _eigenstates_table,
    "chaos-scan": _chaos_scan_table,
    "bands": _bands_table,
    "pulse": _pulse_table,
    "pulse-scan": _pulse_scan_table,
}


def cli_dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise ConfigError("missing command")
        cfg = _effective_config(args)
        table = _COMMANDS[args.command](cfg)
        table.task = cfg.as_dict()
        prov = _provenance(cfg, args.command)
        prov.update(table.provenance)
        table.provenance = prov
        write_table(table, args.format or "csv", args.out)
        return EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
