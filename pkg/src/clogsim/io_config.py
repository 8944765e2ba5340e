"""Configuration parsing and CSV serialization shared by the subcommands.

Configuration is a flat key=value mapping, either from command-line flags
or from a plain-text file (one pair per line, ``#`` comments); flags
override file values.  All validation lives here so every error names the
offending key.

CSV files carry a header row, serialize floats with 9 significant digits,
and are written atomically (temp file + rename): re-running an identical
spec reproduces byte-identical files.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
from dataclasses import dataclass

from .montecarlo import (
    DEFAULT_REGEN_LIMIT,
    DESK_DEGREE_LIST,
    DESK_PHI_LIST,
    DESK_RUNS_PER_CELL,
    CellResult,
    SweepSpec,
)
from .scenarios import ScenarioConfig

__all__ = [
    "ConfigError",
    "RunArtifacts",
    "read_config_file",
    "merge_pairs",
    "parse_sweep_config",
    "parse_run_config",
    "format_field",
    "write_csv",
    "write_sweep_outputs",
]


class ConfigError(ValueError):
    """Bad configuration input; the message names the offending key."""


_COMMON_KEYS = ("scenario", "phi", "seed", "n", "attach", "alpha", "max_iters", "regen_limit")
SWEEP_KEYS = _COMMON_KEYS + ("degrees", "runs")
RUN_KEYS = _COMMON_KEYS + ("degree", "run_index")


@dataclass(frozen=True)
class RunArtifacts:
    """File layout for one output directory."""

    cells_path: str
    runs_path: str
    nodes_path: str
    edges_path: str
    trajectory_path: str

    @classmethod
    def in_dir(cls, out_dir: str) -> "RunArtifacts":
        return cls(
            cells_path=os.path.join(out_dir, "cells.csv"),
            runs_path=os.path.join(out_dir, "runs.csv"),
            nodes_path=os.path.join(out_dir, "nodes.csv"),
            edges_path=os.path.join(out_dir, "edges.csv"),
            trajectory_path=os.path.join(out_dir, "trajectory.csv"),
        )


def read_config_file(path: str) -> dict:
    """key=value pairs from a plain-text file; later lines win."""
    pairs: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                pairs[key.strip()] = value.strip()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    return pairs


def merge_pairs(file_pairs: dict, cli_pairs: dict) -> dict:
    """Flag values override file values; None flags are ignored."""
    merged = dict(file_pairs)
    merged.update({k: v for k, v in cli_pairs.items() if v is not None})
    return merged


def _check_keys(pairs: dict, allowed) -> None:
    for key in pairs:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r}; expected one of {sorted(allowed)}")


def _parse_int(pairs: dict, key: str, default=None):
    if key not in pairs:
        return default
    try:
        return int(pairs[key])
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {pairs[key]!r}") from None


def _parse_float(pairs: dict, key: str, default=None):
    if key not in pairs:
        return default
    try:
        value = float(pairs[key])
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {pairs[key]!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: expected a finite number, got {pairs[key]!r}")
    return value


def _parse_list(pairs: dict, key: str, conv, default):
    """Comma list (``45,60,90``) or inclusive range (``2:20`` / ``2:20:3``)."""
    if key not in pairs:
        return default
    text = pairs[key]
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (2, 3):
                raise ValueError
            lo, hi = conv(parts[0]), conv(parts[1])
            step = conv(parts[2]) if len(parts) == 3 else conv("1")
            if step <= 0 or hi < lo:
                raise ValueError
            values = []
            v = lo
            while v <= hi:
                values.append(v)
                v += step
            return tuple(values)
        return tuple(conv(tok) for tok in text.split(","))
    except ValueError:
        raise ConfigError(
            f"{key}: expected a comma list or lo:hi[:step] range, got {text!r}"
        ) from None


def _require_seed(pairs: dict) -> int:
    if "seed" not in pairs:
        raise ConfigError("seed: a master seed is required")
    seed = _parse_int(pairs, "seed")
    if seed < 0:
        raise ConfigError(f"seed: must be non-negative, got {seed}")
    return seed


def _scenario_from(pairs: dict, phi_deg: float, degree: int) -> ScenarioConfig:
    if "scenario" not in pairs:
        raise ConfigError("scenario: a scenario kind is required")
    try:
        return ScenarioConfig(
            kind=pairs["scenario"],
            phi_deg=phi_deg,
            alpha=_parse_float(pairs, "alpha", 0.1),
            n=_parse_int(pairs, "n", 256),
            attach_count=_parse_int(pairs, "attach", 2),
            innovator_degree=degree,
            max_iters=_parse_int(pairs, "max_iters", 10_000),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None


def parse_sweep_config(pairs: dict) -> SweepSpec:
    """Validated SweepSpec from key=value pairs.

    Defaults: n=256, attach=2, alpha=0.1, max_iters=10000, and the
    desk-scale phi/degree/runs grid.  ``seed`` and ``scenario`` have no
    defaults and are required.
    """
    _check_keys(pairs, SWEEP_KEYS)
    seed = _require_seed(pairs)
    phi_list = _parse_list(pairs, "phi", float, tuple(DESK_PHI_LIST))
    degree_list = _parse_list(pairs, "degrees", int, tuple(DESK_DEGREE_LIST))
    if not phi_list:
        raise ConfigError("phi: list must not be empty")
    if not degree_list:
        raise ConfigError("degrees: list must not be empty")
    scenario = _scenario_from(pairs, phi_deg=float(phi_list[0]), degree=int(degree_list[0]))
    try:
        return SweepSpec(
            scenario=scenario,
            phi_list=tuple(float(p) for p in phi_list),
            degree_list=tuple(int(d) for d in degree_list),
            runs_per_cell=_parse_int(pairs, "runs", DESK_RUNS_PER_CELL),
            master_seed=seed,
            regen_limit=_parse_int(pairs, "regen_limit", DEFAULT_REGEN_LIMIT),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None


def parse_run_config(pairs: dict):
    """(ScenarioConfig, seed, regen_limit, run_index) for a single run."""
    _check_keys(pairs, RUN_KEYS)
    seed = _require_seed(pairs)
    if "phi" not in pairs:
        raise ConfigError("phi: an angle is required")
    if "degree" not in pairs:
        raise ConfigError("degree: an innovator degree is required")
    config = _scenario_from(
        pairs, phi_deg=_parse_float(pairs, "phi"), degree=_parse_int(pairs, "degree")
    )
    regen_limit = _parse_int(pairs, "regen_limit", DEFAULT_REGEN_LIMIT)
    if regen_limit < 1:
        raise ConfigError(f"regen_limit: must be at least 1, got {regen_limit}")
    run_index = _parse_int(pairs, "run_index", 0)
    if run_index < 0:
        raise ConfigError(f"run_index: must be non-negative, got {run_index}")
    return config, seed, regen_limit, run_index


def format_field(value) -> str:
    """CSV field: floats at 9 significant digits, blanks for undefined."""
    if value is None:
        return ""
    if isinstance(value, float):
        if not math.isfinite(value):
            return ""
        return f"{value:.9g}"
    return str(value)


def write_csv(path: str, header, rows) -> None:
    """Write a CSV atomically: temp file in the target directory + rename."""
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    writer.writerow([format_field(v) for v in row])
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e


CELLS_HEADER = (
    "phi_deg", "innovator_degree", "runs", "n_survival", "n_dominance",
    "n_completion", "mean_mbar_final", "sd_mbar_final", "mean_t_final",
    "n_regen_failures",
)
RUNS_HEADER = ("scenario", "phi_deg", "degree", "run_index", "mbar_final", "t_final", "outcome")


def write_sweep_outputs(cells, records, scenario_kind: str, out_dir: str):
    """Write cells.csv and runs.csv; returns their paths."""
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create output directory {out_dir}: {e}") from e
    artifacts = RunArtifacts.in_dir(out_dir)

    def cell_row(c: CellResult):
        return (
            c.phi_deg, c.innovator_degree, c.runs, c.n_survival, c.n_dominance,
            c.n_completion, c.mean_mbar_final, c.sd_mbar_final, c.mean_t_final,
            c.n_regen_failures,
        )

    def run_row(r):
        mbar = None if r.failed else r.mbar_final
        t_final = None if r.failed else r.t_final
        return (scenario_kind, r.phi_deg, r.degree, r.run_index, mbar, t_final, r.outcome_label)

    write_csv(artifacts.cells_path, CELLS_HEADER, (cell_row(c) for c in cells))
    write_csv(artifacts.runs_path, RUNS_HEADER, (run_row(r) for r in records))
    return artifacts.cells_path, artifacts.runs_path
