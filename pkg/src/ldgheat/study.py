"""Convergence-study harness.

A study sweeps one discretization over a doubling family of meshes, runs
each to the final time, evaluates every error functional, and attaches the
observed log2 rates.  Records serialize to JSON losslessly; the CSV, table,
and plot emitters are deterministic byte-for-byte across reruns of the same
configuration.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__ as _version
from .correction import initial_interpolant
from .mesh import BCKind, FluxChoice, build_mesh
from .metrics import ERROR_COLUMNS, ErrorReport, error_report, rate
from .problems import ProblemSpec, builtin_problem, make_problem
from .projection import project_l2, project_minus, project_plus
from .solver import SemidiscreteOp
from .timestep import StepPolicy, integrate

__all__ = [
    "StudyConfig",
    "StudyRecord",
    "PRESETS",
    "preset_config",
    "run_study",
    "emit",
]


@dataclass(frozen=True)
class StudyConfig:
    """Everything needed to reproduce one study run."""

    problem: object  # builtin id, or {"name": ..., "expression": ...}
    flux: str
    bc: str
    degree: int
    mesh_kind: str
    n_list: tuple
    scheme: str = "rk4"
    dt_rule: str = "h2"  # "h2" | "steps" | "steps_per_n2"
    dt_value: float = 0.01
    final_time: float = 1.0
    init_mode: str = "correction"  # "correction" | "projection" | "l2"
    init_order: int = None

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        ns = self.n_list
        if not ns:
            raise ValueError("need at least one mesh size")
        for a, b in zip(ns[:-1], ns[1:]):
            if b <= a:
                raise ValueError("mesh sizes must be strictly increasing")
        for n in ns:
            q, r = divmod(n, ns[0])
            if r or q & (q - 1):
                raise ValueError("mesh sizes must be power-of-two multiples of the first")
        if self.init_mode not in ("correction", "projection", "l2"):
            raise ValueError(f"unknown initialization mode {self.init_mode!r}")
        if self.init_mode == "correction":
            order = self.degree if self.init_order is None else self.init_order
            if not 1 <= order <= self.degree:
                raise ValueError("correction order must satisfy 1 <= l <= degree")
            object.__setattr__(self, "init_order", order)
        if self.dt_rule not in ("h2", "steps", "steps_per_n2"):
            raise ValueError(f"unknown dt rule {self.dt_rule!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_list"] = list(self.n_list)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StudyConfig":
        return cls(**d)

    @classmethod
    def from_json_file(cls, path) -> "StudyConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


# Desk-scale presets; larger meshes are reachable through max_n since the
# quadratic step restriction makes them minutes-to-hours.
PRESETS = {
    "example1-k3": dict(
        problem="example1", flux="alt1", bc="periodic", degree=3,
        mesh_kind="split", n_list=(4, 8, 16, 32),
        scheme="rk4", dt_rule="h2", dt_value=0.005,
        final_time=1.0, init_mode="correction", init_order=3,
    ),
    "example1-k4": dict(
        problem="example1", flux="alt1", bc="periodic", degree=4,
        mesh_kind="split", n_list=(4, 8, 16),
        scheme="rk4", dt_rule="h2", dt_value=0.002,
        final_time=1.0, init_mode="correction", init_order=4,
    ),
    "example2-k3": dict(
        problem="example2", flux="alt2", bc="neumann-dirichlet", degree=3,
        mesh_kind="uniform", n_list=(4, 8, 16, 32),
        scheme="dopri5", dt_rule="steps_per_n2", dt_value=20,
        final_time=1.0, init_mode="correction", init_order=3,
    ),
    "example2-k4": dict(
        problem="example2", flux="alt2", bc="neumann-dirichlet", degree=4,
        mesh_kind="uniform", n_list=(4, 8, 16),
        scheme="dopri5", dt_rule="steps_per_n2", dt_value=80,
        final_time=1.0, init_mode="correction", init_order=4,
    ),
}


def preset_config(name: str, max_n: int = None) -> StudyConfig:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; have {sorted(PRESETS)}")
    spec = dict(PRESETS[name])
    if max_n is not None:
        ns = [spec["n_list"][0]]
        while 2 * ns[-1] <= max_n:
            ns.append(2 * ns[-1])
        spec["n_list"] = tuple(ns)
    return StudyConfig(**spec)


@dataclass(frozen=True)
class StudyRecord:
    config: dict
    reports: tuple
    rates: dict
    wall_clock: tuple
    version: str = _version

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "reports": [r.to_dict() for r in self.reports],
            "rates": self.rates,
            "wall_clock": list(self.wall_clock),
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StudyRecord":
        return cls(
            config=d["config"],
            reports=tuple(ErrorReport.from_dict(r) for r in d["reports"]),
            rates=d["rates"],
            wall_clock=tuple(d["wall_clock"]),
            version=d["version"],
        )

    def column(self, name: str) -> list:
        return [r.value(name) for r in self.reports]


def _resolve_problem(cfg: StudyConfig) -> ProblemSpec:
    if isinstance(cfg.problem, str):
        problem = builtin_problem(cfg.problem, final_time=cfg.final_time)
    else:
        spec = dict(cfg.problem)
        problem = make_problem(
            spec.get("name", "custom"), spec["expression"], cfg.bc, final_time=cfg.final_time
        )
    if problem.bc.kind.value != cfg.bc:
        raise ValueError(
            f"config boundary kind {cfg.bc!r} does not match the problem's "
            f"{problem.bc.kind.value!r}"
        )
    return problem


def _initial_state(problem: ProblemSpec, mesh, cfg: StudyConfig, flux: FluxChoice):
    if cfg.init_mode == "correction":
        u_i, _ = initial_interpolant(problem.u0, mesh, cfg.degree, cfg.init_order, flux)
        return u_i
    if cfg.init_mode == "projection":
        project = project_minus if flux is FluxChoice.ALT1 else project_plus
        return project(problem.u0, mesh, cfg.degree)
    return project_l2(problem.u0, mesh, cfg.degree)


def _policy_for(cfg: StudyConfig, n: int) -> StepPolicy:
    if cfg.dt_rule == "h2":
        return StepPolicy.h_squared(cfg.dt_value, cfg.scheme)
    if cfg.dt_rule == "steps":
        return StepPolicy.fixed_steps(int(cfg.dt_value), cfg.scheme)
    return StepPolicy.fixed_steps(int(cfg.dt_value) * n * n, cfg.scheme)


def run_study(cfg: StudyConfig, progress=None) -> StudyRecord:
    """Run every mesh in the family and assemble the record.

    Aborts with the offending mesh size attached if the integrator blows up
    or the flux/boundary pairing is invalid.
    """
    problem = _resolve_problem(cfg)
    flux = FluxChoice(cfg.flux)
    reports = []
    clocks = []
    for n in cfg.n_list:
        start = time.perf_counter()
        try:
            mesh = build_mesh(cfg.mesh_kind, n)
            op = SemidiscreteOp(mesh, cfg.degree, flux, problem.bc)
            u_h0 = _initial_state(problem, mesh, cfg, flux)
            u_h = integrate(op, u_h0, cfg.final_time, _policy_for(cfg, n))
            report = error_report(op, u_h, problem.exact, cfg.final_time, mesh_kind=cfg.mesh_kind)
        except Exception as exc:
            raise RuntimeError(f"study failed at N={n}: {exc}") from exc
        reports.append(report)
        clocks.append(time.perf_counter() - start)
        if progress is not None:
            progress(n, report)
    rates = {col: rate([r.value(col) for r in reports]) for col in ERROR_COLUMNS}
    return StudyRecord(
        config=cfg.to_dict(),
        reports=tuple(reports),
        rates=rates,
        wall_clock=tuple(clocks),
    )


# --- emission ---

_TABLE_BLOCKS = (
    ("u", ["xi_u_L2", "e_u_radau", "e_ux_radau", "e_u_n", "e_u_star", "e_u_cell", "e_u_dom"]),
    ("q", ["xi_q_L2", "e_q_radau", "e_qx_radau", "e_q_n", "e_q_star", "e_q_cell", "e_q_dom"]),
)


def _format_table(record: StudyRecord) -> str:
    cfg = record.config
    lines = [
        f"problem={cfg['problem']} flux={cfg['flux']} bc={cfg['bc']} "
        f"k={cfg['degree']} mesh={cfg['mesh_kind']} T={cfg['final_time']} "
        f"init={cfg['init_mode']}"
        + (f" l={cfg['init_order']}" if cfg["init_mode"] == "correction" else "")
    ]
    for label, cols in _TABLE_BLOCKS:
        lines.append("")
        header = f"{'N':>5}  " + "  ".join(f"{c:>10}" for c in cols)
        lines.append(f"[{label}]")
        lines.append(header)
        for r in record.reports:
            row = f"{r.n_cells:>5}  " + "  ".join(f"{r.value(c):>10.3e}" for c in cols)
            lines.append(row)
        if len(record.reports) > 1:
            for i in range(len(record.reports) - 1):
                cells = []
                for c in cols:
                    value = record.rates[c][i]
                    cells.append(f"{value:>10.2f}" if value is not None else f"{'--':>10}")
                lines.append(f"{'rate':>5}  " + "  ".join(cells))
        lines.append("")
    return "\n".join(lines)


def _write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write output file {path}: {exc}") from exc
    return path


def emit(record: StudyRecord, fmt: str, out_dir, stem: str = "study") -> list:
    """Write the record in the requested format(s); returns written paths.

    csv: one row per mesh size, one column per metric (plus a companion
    rates file); json: the full record; table: paper-style fixed-width
    blocks; plot: long-format curve data plus rendered log-log figures.
    """
    out_dir = Path(out_dir)
    if fmt == "all":
        paths = []
        for f in ("csv", "json", "table", "plot"):
            paths.extend(emit(record, f, out_dir, stem))
        return paths
    if fmt == "csv":
        lines = ["N," + ",".join(ERROR_COLUMNS)]
        for r in record.reports:
            lines.append(f"{r.n_cells}," + ",".join(repr(r.value(c)) for c in ERROR_COLUMNS))
        main = _write_text(out_dir / f"{stem}.csv", "\n".join(lines) + "\n")
        lines = ["pair," + ",".join(ERROR_COLUMNS)]
        ns = [r.n_cells for r in record.reports]
        for i in range(len(ns) - 1):
            cells = [
                "" if record.rates[c][i] is None else repr(record.rates[c][i])
                for c in ERROR_COLUMNS
            ]
            lines.append(f"{ns[i]}->{ns[i+1]}," + ",".join(cells))
        rates = _write_text(out_dir / f"{stem}_rates.csv", "\n".join(lines) + "\n")
        return [main, rates]
    if fmt == "json":
        text = json.dumps(record.to_dict(), indent=2, sort_keys=True)
        return [_write_text(out_dir / f"{stem}.json", text + "\n")]
    if fmt == "table":
        return [_write_text(out_dir / f"{stem}.txt", _format_table(record))]
    if fmt == "plot":
        from .plots import render_study_plots

        return render_study_plots(record, out_dir, stem)
    raise ValueError(f"unknown format {fmt!r}")
