"""Batch experiment driver.

Usage: ``ymgap <subcommand> [config=FILE] [key=value ...]``

Subcommands: spectrum, scaling, converge, ellipticity, evolve, symbols.
Values on the command line override those read from the config file.
Outputs go to ``<out>/<run_id>.csv`` and ``<out>/<run_id>.json``; the CSV is
deterministic (no timings), the JSON also carries wall-clock timings.
"""
from __future__ import annotations

import hashlib
import logging
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    constraint_residual,
    constrained_random_state,
    evolve,
    plane_wave_exact,
    plane_wave_state,
)
from .fock import enumerate_basis
from .quantize import quantize
from .spectra import (
    SpectrumConfig,
    convergence_study,
    dumps_json,
    galerkin_monotonicity,
    report_rows,
    scaling_study,
    table_to_csv,
    ym_ellipticity,
    ym_spectrum,
)
from .symbols import Ordering, PolySymbol, convert_ordering
from .yangmills import Lattice, algebra_by_name, build_mode_basis

log = logging.getLogger("ymgap")

CODE_HASH = hashlib.sha256(f"ymgap {__version__}".encode()).hexdigest()


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str = ""
    algebra: str = "su2"
    L: float = 1.0
    kmax: int = 0
    D: int = 6
    k_eigs: int = 10
    ordering: str = "antinormal"
    form: str = "reduced"
    modes: str = ""  # comma-separated variable indices; empty keeps all
    solver: str = "auto"
    L_list: str = "1,2,4"
    D_list: str = "4,6"
    subsets: str = ""  # "colors" or ";"-separated comma lists
    route: str = "restrict"
    N: int = 16
    dt: float = 1e-3
    t_end: float = 1.0
    record_every: int = 10
    initial: str = "random"  # random | plane
    amplitude: float = 0.5
    kcut: int = 2
    seed: int = 0
    out: str = "runs"
    run_id: str = ""
    given: set = field(default_factory=set, repr=False)

    def resolved(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "given"}

    def spectrum_config(self) -> SpectrumConfig:
        modes = tuple(_int_list(self.modes)) if self.modes else None
        return SpectrumConfig(
            algebra=self.algebra, L=self.L, kmax=self.kmax, D=self.D, k=self.k_eigs,
            ordering=self.ordering, form=self.form, modes=modes, solver=self.solver,
        )


REQUIRED = {
    "spectrum": ("algebra", "L", "kmax", "D"),
    "scaling": ("algebra", "kmax", "D", "L_list"),
    "converge": ("algebra", "L", "kmax", "D_list"),
    "ellipticity": ("algebra", "L", "kmax", "D"),
    "evolve": ("algebra", "N", "L", "dt", "t_end"),
    "symbols": (),
}
ALIASES = {"k": "k_eigs"}


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.replace(" ", "").split(",") if v]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.replace(" ", "").split(",") if v]


def _read_config_file(path: str) -> dict[str, str]:
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def parse_args(argv: list[str]) -> RunConfig:
    if not argv or argv[0] in ("-h", "--help"):
        raise UsageError(__doc__.strip())
    sub = argv[0]
    if sub not in REQUIRED:
        raise UsageError(f"unknown subcommand {sub!r}; choose from {', '.join(REQUIRED)}")
    pairs: dict[str, str] = {}
    overrides: dict[str, str] = {}
    for tok in argv[1:]:
        if "=" not in tok:
            raise UsageError(f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        if key == "config":
            pairs.update(_read_config_file(val))
        else:
            overrides[key] = val
    pairs.update(overrides)
    cfg = RunConfig(subcommand=sub)
    types = {f.name: f.type for f in fields(RunConfig)}
    for key, val in pairs.items():
        key = ALIASES.get(key, key)
        if key not in types or key in ("given", "subcommand"):
            raise UsageError(f"unknown config key {key!r}")
        caster = {"int": int, "float": float}.get(types[key], str)
        try:
            setattr(cfg, key, caster(val))
        except ValueError as exc:
            raise UsageError(f"bad value for {key}: {val!r}") from exc
        cfg.given.add(key)
    missing = [k for k in REQUIRED[sub] if k not in cfg.given]
    if missing:
        raise UsageError(f"{sub}: missing required key(s): {', '.join(missing)}")
    try:
        Ordering(cfg.ordering)
        algebra_by_name(cfg.algebra)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for key in ("kmax", "D", "k_eigs", "N", "record_every"):
        if getattr(cfg, key) < (1 if key in ("k_eigs", "N", "record_every") else 0):
            raise UsageError(f"{key} out of range")
    if cfg.L <= 0 or cfg.dt <= 0 or cfg.t_end < 0:
        raise UsageError("L and dt must be positive, t_end nonnegative")
    return cfg


def _run_id(cfg: RunConfig) -> str:
    if cfg.run_id:
        return cfg.run_id
    items = {k: v for k, v in cfg.resolved().items() if k not in ("out", "run_id")}
    digest = hashlib.sha256(repr(sorted(items.items())).encode()).hexdigest()[:10]
    return f"{cfg.subcommand}-{digest}"


def _header(cfg: RunConfig) -> dict:
    head = dict(sorted(cfg.resolved().items()))
    head["code_version_sha256"] = CODE_HASH
    return head


def _write(cfg: RunConfig, columns, rows, payload: dict) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    rid = _run_id(cfg)
    csv_path = out / f"{rid}.csv"
    csv_path.write_text(table_to_csv(_header(cfg), columns, rows))
    payload = {"config": cfg.resolved(), "code_version_sha256": CODE_HASH, "columns": list(columns),
               "rows": [list(r) for r in rows], **payload}
    (out / f"{rid}.json").write_text(dumps_json(payload) + "\n")
    return csv_path


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(cfg: RunConfig) -> int:
    report = ym_spectrum(cfg.spectrum_config())
    cols, rows = report_rows(report)
    path = _write(cfg, cols, rows, {"metadata": report.metadata, "gap_bottom": report.gap_bottom,
                                     "gap_first": report.gap_first})
    ev = report.eigenvalues
    print(f"lambda_1 = {ev[0]:.12g}")
    if len(ev) > 1:
        print(f"lambda_2 = {ev[1]:.12g}")
    print(f"gap_bottom = {report.gap_bottom:.12g}  gap_first = {report.gap_first:.12g}")
    print(f"n_modes = {report.metadata['n_modes']}  basis_size = {report.metadata['basis_size']}  -> {path}")
    return 0


def cmd_scaling(cfg: RunConfig) -> int:
    L_values = _float_list(cfg.L_list)
    if len(L_values) < 1:
        raise UsageError("L_list needs at least one value")
    t0 = time.perf_counter()
    table = scaling_study(cfg.spectrum_config(), L_values)
    cols = ["L", "n", "lambda_times_L"]
    rows = [[L, n + 1, float(v)] for L, row in zip(table.L_values, table.products) for n, v in enumerate(row)]
    dev = table.max_relative_deviation()
    path = _write(cfg, cols, rows, {"max_relative_deviation": dev, "seconds": time.perf_counter() - t0})
    print(f"max relative deviation of lambda_n(L)*L: {dev:.3e}  -> {path}")
    return 0


def _subsets(cfg: RunConfig) -> list[list[int]]:
    if not cfg.subsets:
        return []
    if cfg.subsets == "colors":
        modes = build_mode_basis(cfg.L, cfg.kmax, algebra_by_name(cfg.algebra))
        return [modes.select(colors=range(c + 1)) for c in range(modes.dim)]
    return [_int_list(part) for part in cfg.subsets.split(";") if part.strip()]


def cmd_converge(cfg: RunConfig) -> int:
    spec = cfg.spectrum_config()
    D_values = _int_list(cfg.D_list)
    table = convergence_study(spec, D_values)
    cols = ["study", "cutoff", "n", "eigenvalue", "relative_change"]
    changes = table.relative_changes()
    rows = []
    for i, D in enumerate(table.D_values):
        for n, v in enumerate(table.eigenvalues[i]):
            delta = float(changes[i - 1, n]) if i > 0 else float("nan")
            rows.append(["degree", D, n + 1, float(v), delta])
    payload = {"degree_timings": table.timings}
    subsets = _subsets(cfg)
    if subsets:
        mono = galerkin_monotonicity(spec, subsets, route=cfg.route)
        inc = mono.increments()
        for i, size in enumerate(mono.subset_sizes):
            for n, v in enumerate(mono.eigenvalues[i]):
                delta = float(inc[i - 1, n]) if i > 0 else float("nan")
                rows.append([f"galerkin_{mono.route}", size, n + 1, float(v), delta])
        payload["galerkin_nondecreasing"] = mono.is_nondecreasing()
        print(f"galerkin ({mono.route}) nondecreasing: {mono.is_nondecreasing()}")
    path = _write(cfg, cols, rows, payload)
    for D, row in zip(table.D_values, table.eigenvalues):
        print(f"D={D}: " + " ".join(f"{v:.8g}" for v in row[:4]))
    if len(D_values) > 1:
        print(f"last relative change (lambda_1, lambda_2): {changes[-1][:2]}")
    print(f"-> {path}")
    return 0


def cmd_ellipticity(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    result, meta = ym_ellipticity(cfg.spectrum_config())
    cols = ["constant", "generalized_eigenvalue", "iterations", "algebra", "L", "kmax", "D", "n_modes"]
    rows = [[result.constant, result.generalized, result.iterations, meta["algebra"], float(meta["L"]),
             meta["kmax"], meta["D"], meta["n_modes"]]]
    path = _write(cfg, cols, rows, {"metadata": meta, "seconds": time.perf_counter() - t0})
    print(f"ellipticity constant C* = {result.constant:.10g} (generalized eigenvalue {result.generalized:.10g})  -> {path}")
    return 0


def cmd_evolve(cfg: RunConfig) -> int:
    lat = Lattice(cfg.N, cfg.L, algebra_by_name(cfg.algebra))
    if cfg.initial == "plane":
        wave = dict(m=(1, 0, 0), polarization=(0, 1, 0), amplitude=cfg.amplitude)
        state = plane_wave_state(lat, **wave)
    elif cfg.initial == "random":
        state = constrained_random_state(lat, np.random.default_rng(cfg.seed), kcut=cfg.kcut, amplitude=cfg.amplitude)
    else:
        raise UsageError(f"unknown initial data {cfg.initial!r}")
    t0 = time.perf_counter()
    traj = evolve(lat, state, cfg.dt, cfg.t_end, record_every=cfg.record_every)
    payload = {"energy_drift": traj.energy_drift, "residual_growth": traj.residual_growth,
               "seconds": time.perf_counter() - t0}
    print(f"relative energy drift {traj.energy_drift:.3e}; constraint residual "
          f"{traj.rows[0][2]:.3e} -> {constraint_residual(lat, traj.final):.3e}")
    if cfg.initial == "plane" and algebra_by_name(cfg.algebra).is_abelian:
        err = float(np.abs(traj.final.A - plane_wave_exact(lat, traj.final.t, **wave)).max())
        payload["plane_wave_error"] = err
        print(f"L-infinity error vs exact plane wave: {err:.3e}")
    path = _write(cfg, ["t", "energy", "constraint_residual"], [list(r) for r in traj.rows], payload)
    print(f"-> {path}")
    return 0


def cmd_symbols(cfg: RunConfig) -> int:
    """Symbols of ``a a^dagger`` (one mode) in the three orderings, with quantized diagonals."""
    antinormal = PolySymbol.number(1)
    D = min(cfg.D, 12)
    basis = enumerate_basis(1, D)
    cols = ["ordering", "symbol", "constant_term", "operator_diagonal"]
    rows = []
    for tag in (Ordering.NORMAL, Ordering.WEYL, Ordering.ANTINORMAL):
        sym = convert_ordering(antinormal, Ordering.ANTINORMAL, tag)
        diag = quantize(sym, tag, basis).toarray().diagonal().real
        const = complex(sym.coefficient((0,), (0,))).real
        text = "z*z" + (f" + {const:g}" if const else "")
        rows.append([tag.value, text, const, " ".join(f"{v:g}" for v in diag)])
        print(f"{tag.value:>10}: {text:<12} diag {rows[-1][3]}")
    path = _write(cfg, cols, rows, {})
    print(f"-> {path}")
    return 0


COMMANDS = {
    "spectrum": cmd_spectrum,
    "scaling": cmd_scaling,
    "converge": cmd_converge,
    "ellipticity": cmd_ellipticity,
    "evolve": cmd_evolve,
    "symbols": cmd_symbols,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_args(argv)
        return COMMANDS[cfg.subcommand](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures map to exit 1
        log.error("%s: %s", type(exc).__name__, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
