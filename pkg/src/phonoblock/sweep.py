"""Configuration-driven parameter sweeps producing the CSV figure datasets.

A sweep is described by an INI file (configparser syntax, ``key = value``)
with the sections below.  Unknown sections or keys are hard errors.

``[model]``
    ``kind``          ``mech-only`` (default) or ``full-optomech``.
    ``optimal-mode``  ``off`` (default), ``single-drive``, ``two-drive-plus``
                      or ``two-drive-minus``.  ``single-drive`` fills delta
                      and u from j at each grid point; the two-drive modes
                      fill zeta and phi from (u, j, delta).
    ``branch``        ``plus`` (default) or ``minus``; sign of the filled
                      detuning, only valid with ``optimal-mode = single-drive``.

``[params]``
    Keys ``delta``, ``u``, ``j``, ``zeta``, ``phi``, ``nth``, ``tau`` take a
    scalar, a comma list, or a grid ``start:stop:count`` (append ``:log`` for
    geometric spacing).  Any list or grid value makes the key a sweep axis;
    axes nest in declaration order, last axis fastest (row-major rows).
    Appending the word ``pi`` to a value scales it by pi, e.g.
    ``phi = 0:2:61 pi``.  Keys ``omega1`` (default 0.1), ``delta_a``, ``g``,
    ``kappa`` are scalar-only; ``g`` and ``kappa`` are required for the
    full-optomech model.  All rates are in units of the mechanical linewidth
    gamma, which is fixed to 1 internally; the second drive is specified by
    the ratio zeta = omega2/omega1 (default 0) and phase phi (default 0).

``[output]``
    ``observables``        comma list from g2_b, n_b1, n_b2, g2_a, n_a,
                           g2_tau.  Defaults to everything the model offers;
                           g2_a and n_a require the full-optomech model, and
                           g2_tau requires (and is required by) a tau axis.
    ``convergence-check``  ``true`` re-solves each point with every mode
                           dimension incremented and records a per-row flag
                           (not part of the CSV).  Default ``false``.

``[truncation]``
    ``dims``  comma list of per-mode Fock dimensions: two entries for
              mech-only (default ``6,6``), three for full-optomech
              (default ``5,5,3``).

The CSV output has a fixed 13-column schema — delta, u, j, zeta, phi, nth,
g2_b, n_b1, n_b2, g2_a, n_a, tau, error_code — with floats printed to 12
significant digits, ``nan`` marking unavailable values, and one row per grid
point in row-major axis order.  Rows produced by a tau sweep hold the delayed
correlation of the driven mode in the g2_b column.  Lines starting with ``#``
are comments (config echo, axis shapes, timestamp); two runs of the same
config produce bit-identical files apart from the timestamp line.

Per-row error codes: 0 success, 1 invalid parameters at the point (including
optimal-mode domain failures), 2 steady-state solver failure, 3 correlation
undefined at vacuum occupancy, 4 other numerical failure.  The first failure
wins; observables computed before it keep their values.
"""

from __future__ import annotations

import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from configparser import ConfigParser, Error as ConfigParserError
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from functools import partial
from io import StringIO
from itertools import product
from pathlib import Path

import numpy as np

from . import __version__
from .correl import UndefinedCorrelationError, g2_tau, g2_zero, occupation
from .model import (
    DEFAULT_FULL_DIMS,
    DEFAULT_MECH_DIMS,
    MechParams,
    OmParams,
    WEAK_DRIVE_LIMIT,
    WeakDriveWarning,
    build_full_hamiltonian,
    build_liouvillian,
    build_mech_hamiltonian,
    full_collapse_ops,
    mech_collapse_ops,
)
from .fock import HilbertSpace
from .optimal import single_drive_optimal, two_drive_optimal
from .steady import (
    DegenerateSteadyStateError,
    SteadyStateError,
    convergence_check,
    steady_state,
)

__all__ = [
    "CSV_COLUMNS",
    "AxisSpec",
    "ConfigError",
    "SweepConfig",
    "SweepResult",
    "SweepRow",
    "load_config",
    "parse_config",
    "resolve_workers",
    "run_sweep",
]

WORKERS_ENV_VAR = "PHONOBLOCK_WORKERS"

CSV_COLUMNS = (
    "delta", "u", "j", "zeta", "phi", "nth",
    "g2_b", "n_b1", "n_b2", "g2_a", "n_a", "tau", "error_code",
)

ERR_OK = 0
ERR_PARAMS = 1
ERR_STEADY = 2
ERR_UNDEFINED = 3
ERR_NUMERICAL = 4

_AXIS_KEYS = ("delta", "u", "j", "zeta", "phi", "nth", "tau")
_SCALAR_KEYS = ("omega1", "delta_a", "g", "kappa")
_MODEL_KINDS = ("mech-only", "full-optomech")
_OPTIMAL_MODES = ("off", "single-drive", "two-drive-plus", "two-drive-minus")
_MECH_OBSERVABLES = ("g2_b", "n_b1", "n_b2", "g2_tau")
_FULL_OBSERVABLES = ("g2_b", "n_b1", "n_b2", "g2_a", "n_a", "g2_tau")


class ConfigError(ValueError):
    """A sweep configuration is malformed or inconsistent."""


@dataclass(frozen=True)
class AxisSpec:
    """One sweep axis: parameter name and its ordered grid values."""

    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise ConfigError(f"axis {self.name} has no values")


@dataclass(frozen=True)
class SweepConfig:
    """Validated sweep description; immutable and safe to share with workers."""

    kind: str
    optimal_mode: str
    branch: int
    axes: tuple[AxisSpec, ...]
    fixed: dict[str, float]
    observables: tuple[str, ...]
    dims: tuple[int, ...]
    convergence: bool = False
    raw_lines: tuple[str, ...] = ()

    @property
    def tau_axis(self) -> AxisSpec | None:
        for ax in self.axes:
            if ax.name == "tau":
                return ax
        return None

    @property
    def grid_size(self) -> int:
        return math.prod(len(ax.values) for ax in self.axes)


@dataclass
class SweepRow:
    """One grid point: inputs, requested observables, and bookkeeping.

    The convergence flag and wall time are in-memory metadata only; the CSV
    schema carries the thirteen fixed columns.
    """

    delta: float = math.nan
    u: float = math.nan
    j: float = math.nan
    zeta: float = math.nan
    phi: float = math.nan
    nth: float = math.nan
    g2_b: float = math.nan
    n_b1: float = math.nan
    n_b2: float = math.nan
    g2_a: float = math.nan
    n_a: float = math.nan
    tau: float = math.nan
    error_code: int = ERR_OK
    converged: bool | None = None
    wall_time: float = 0.0
    weak_drive: bool = False


def _parse_value_list(key: str, text: str) -> list[float]:
    """Parse a params value: scalar, comma list, or (log) grid, with pi scaling."""
    tokens = text.split()
    factor = 1.0
    if tokens and tokens[-1] == "pi":
        factor = math.pi
        tokens = tokens[:-1]
    body = " ".join(tokens)
    if not body:
        raise ConfigError(f"{key}: empty value")

    def one(s: str) -> float:
        try:
            v = float(s)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse number {s!r}") from None
        if not math.isfinite(v):
            raise ConfigError(f"{key}: non-finite value {s!r}")
        return v

    if "," in body:
        return [one(p) * factor for p in body.split(",")]
    if ":" in body:
        parts = [p.strip() for p in body.split(":")]
        log = False
        if len(parts) == 4 and parts[3] == "log":
            log = True
            parts = parts[:3]
        if len(parts) != 3:
            raise ConfigError(
                f"{key}: grid must be start:stop:count or start:stop:count:log"
            )
        start, stop = one(parts[0]), one(parts[1])
        try:
            count = int(parts[2])
        except ValueError:
            raise ConfigError(f"{key}: grid count {parts[2]!r} is not an integer") from None
        if count < 1:
            raise ConfigError(f"{key}: grid count must be >= 1")
        if log:
            if start <= 0 or stop <= 0:
                raise ConfigError(f"{key}: log grid endpoints must be positive")
            values = np.geomspace(start, stop, count)
        else:
            values = np.linspace(start, stop, count)
        return [float(v) * factor for v in values]
    return [one(body) * factor]


def _is_grid_syntax(text: str) -> bool:
    body = text.split()
    if body and body[-1] == "pi":
        body = body[:-1]
    joined = " ".join(body)
    return "," in joined or ":" in joined


def parse_config(text: str, source: str = "<config>") -> SweepConfig:
    """Parse and validate an INI sweep description."""
    parser = ConfigParser(
        delimiters=("=",), inline_comment_prefixes=("#",), interpolation=None
    )
    try:
        parser.read_string(text, source=source)
    except ConfigParserError as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    known = {
        "model": {"kind", "optimal-mode", "branch"},
        "params": set(_AXIS_KEYS) | set(_SCALAR_KEYS),
        "output": {"observables", "convergence-check"},
        "truncation": {"dims"},
    }
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"{source}: unknown section [{section}]")
        extra = set(parser[section]) - known[section]
        if extra:
            raise ConfigError(
                f"{source}: unknown key(s) in [{section}]: {', '.join(sorted(extra))}"
            )
    if not parser.has_section("params"):
        raise ConfigError(f"{source}: missing required section [params]")

    model = parser["model"] if parser.has_section("model") else {}
    kind = model.get("kind", "mech-only").strip()
    if kind not in _MODEL_KINDS:
        raise ConfigError(f"{source}: kind must be one of {', '.join(_MODEL_KINDS)}")
    mode = model.get("optimal-mode", "off").strip()
    if mode not in _OPTIMAL_MODES:
        raise ConfigError(
            f"{source}: optimal-mode must be one of {', '.join(_OPTIMAL_MODES)}"
        )
    branch_text = model.get("branch", "").strip() if "branch" in model else ""
    if branch_text and mode != "single-drive":
        raise ConfigError(f"{source}: branch is only valid with optimal-mode = single-drive")
    if branch_text not in ("", "plus", "minus"):
        raise ConfigError(f"{source}: branch must be plus or minus")
    branch = -1 if branch_text == "minus" else 1

    axes: list[AxisSpec] = []
    fixed: dict[str, float] = {"zeta": 0.0, "phi": 0.0, "nth": 0.0, "omega1": 0.1}
    for key, raw in parser["params"].items():
        if key in _SCALAR_KEYS:
            if _is_grid_syntax(raw):
                raise ConfigError(f"{source}: {key} must be a single value, not a grid")
            fixed[key] = _parse_value_list(key, raw)[0]
            continue
        values = _parse_value_list(key, raw)
        if _is_grid_syntax(raw):
            axes.append(AxisSpec(name=key, values=tuple(values)))
        else:
            fixed[key] = values[0]

    filled = {"single-drive": ("delta", "u"), "two-drive-plus": ("zeta", "phi"),
              "two-drive-minus": ("zeta", "phi")}.get(mode, ())
    axis_names = [ax.name for ax in axes]
    for name in filled:
        if name in axis_names or (name in fixed and name not in ("zeta", "phi")):
            raise ConfigError(
                f"{source}: {name} is filled by optimal-mode = {mode}; do not set it"
            )
        if name in ("zeta", "phi") and parser.has_option("params", name):
            raise ConfigError(
                f"{source}: {name} is filled by optimal-mode = {mode}; do not set it"
            )
    if mode == "single-drive":
        for name in ("zeta", "phi"):
            if parser.has_option("params", name):
                raise ConfigError(
                    f"{source}: {name} has no effect with optimal-mode = single-drive"
                )
    required = {"off": ("delta", "u", "j"), "single-drive": ("j",),
                "two-drive-plus": ("delta", "u", "j"),
                "two-drive-minus": ("delta", "u", "j")}[mode]
    for name in required:
        if name not in axis_names and name not in fixed:
            raise ConfigError(f"{source}: {name} must be given (axis or scalar)")
    if not axes:
        raise ConfigError(f"{source}: at least one sweep axis is required")
    if "tau" in axis_names and axis_names[-1] != "tau":
        raise ConfigError(f"{source}: the tau axis must be declared last")
    if "tau" in fixed:
        raise ConfigError(f"{source}: tau only makes sense as an axis")
    tau_values = axes[-1].values if axis_names and axis_names[-1] == "tau" else None
    if tau_values is not None:
        diffs = np.diff(tau_values)
        if tau_values[0] < 0 or (len(tau_values) > 1 and np.any(diffs <= 0)):
            raise ConfigError(f"{source}: tau axis must be nonnegative and increasing")

    if kind == "mech-only":
        for key in ("g", "kappa", "delta_a"):
            if key in fixed:
                raise ConfigError(f"{source}: {key} requires kind = full-optomech")
    else:
        for key in ("g", "kappa"):
            if key not in fixed:
                raise ConfigError(f"{source}: {key} is required for full-optomech")

    allowed_obs = _FULL_OBSERVABLES if kind == "full-optomech" else _MECH_OBSERVABLES
    output = parser["output"] if parser.has_section("output") else {}
    if "observables" in output:
        names, seen = [], set()
        for name in output["observables"].split(","):
            name = name.strip()
            if name not in allowed_obs:
                raise ConfigError(
                    f"{source}: observable {name!r} not available for kind = {kind}"
                )
            if name not in seen:
                seen.add(name)
                names.append(name)
        observables = tuple(names)
    else:
        observables = tuple(
            o for o in allowed_obs if o != "g2_tau" or tau_values is not None
        )
    if ("g2_tau" in observables) != (tau_values is not None):
        raise ConfigError(
            f"{source}: g2_tau and a tau axis require each other"
        )
    convergence = False
    if "convergence-check" in output:
        flag = output["convergence-check"].strip().lower()
        if flag not in ("true", "false"):
            raise ConfigError(f"{source}: convergence-check must be true or false")
        convergence = flag == "true"

    default_dims = DEFAULT_FULL_DIMS if kind == "full-optomech" else DEFAULT_MECH_DIMS
    dims = default_dims
    if parser.has_section("truncation") and parser.has_option("truncation", "dims"):
        parts = parser["truncation"]["dims"].split(",")
        try:
            dims = tuple(int(p) for p in parts)
        except ValueError:
            raise ConfigError(f"{source}: dims must be comma-separated integers") from None
        if len(dims) != len(default_dims):
            raise ConfigError(
                f"{source}: dims needs {len(default_dims)} entries for kind = {kind}"
            )
        if any(d < 2 for d in dims):
            raise ConfigError(f"{source}: every dim must be at least 2")

    raw_lines = tuple(
        line.rstrip() for line in text.splitlines() if line.strip()
    )
    return SweepConfig(
        kind=kind, optimal_mode=mode, branch=branch, axes=tuple(axes),
        fixed=fixed, observables=observables, dims=dims,
        convergence=convergence, raw_lines=raw_lines,
    )


def load_config(path) -> SweepConfig:
    """Read and validate a sweep configuration file."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return parse_config(text, source=str(p))


def _point_params(config: SweepConfig, point: dict[str, float]):
    """Resolve one grid point to model parameters, applying optimal-mode fills."""
    vals = dict(config.fixed)
    vals.update(point)
    if config.optimal_mode == "single-drive":
        opt = single_drive_optimal(vals["j"], 1.0, config.branch)
        vals["delta"], vals["u"] = opt.delta_opt, opt.u_opt
    elif config.optimal_mode.startswith("two-drive"):
        pair = two_drive_optimal(vals["u"], vals["j"], vals["delta"], 1.0)
        opt = pair[0] if config.optimal_mode.endswith("plus") else pair[1]
        vals["zeta"], vals["phi"] = opt.zeta, opt.phi
    params = MechParams(
        delta=vals["delta"], u=vals["u"], j=vals["j"],
        omega1=vals["omega1"], omega2=vals["zeta"] * vals["omega1"],
        phi=vals["phi"], gamma=1.0, nth=vals["nth"],
    )
    om = None
    if config.kind == "full-optomech":
        om = OmParams(g=vals["g"], kappa=vals["kappa"], delta_a=vals.get("delta_a"))
    return vals, params, om


def _compute_item(config: SweepConfig, point: dict[str, float]) -> list[SweepRow]:
    """Compute all rows for one non-tau grid point; never raises."""
    t0 = time.perf_counter()
    taus = config.tau_axis.values if config.tau_axis is not None else None
    nrows = len(taus) if taus is not None else 1
    base = SweepRow()
    for name in ("delta", "u", "j", "zeta", "phi", "nth"):
        if name in point:
            setattr(base, name, point[name])
        elif name in config.fixed:
            setattr(base, name, config.fixed[name])

    def finish(rows: list[SweepRow]) -> list[SweepRow]:
        dt = (time.perf_counter() - t0) / len(rows)
        for k, row in enumerate(rows):
            row.wall_time = dt
            if taus is not None:
                row.tau = taus[k]
        return rows

    def fail(code: int) -> list[SweepRow]:
        base.error_code = code
        return finish([replace(base) for _ in range(nrows)] if nrows > 1 else [base])

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeakDriveWarning)
        try:
            vals, params, om = _point_params(config, point)
        except ValueError:
            return fail(ERR_PARAMS)
        except Exception:
            return fail(ERR_NUMERICAL)
        for name in ("delta", "u", "j", "zeta", "phi", "nth"):
            setattr(base, name, vals[name])
        base.weak_drive = max(params.omega1, params.omega2) > WEAK_DRIVE_LIMIT * params.gamma
        try:
            space = HilbertSpace(config.dims)
            if om is None:
                h = build_mech_hamiltonian(params, space)
                cops = mech_collapse_ops(params, space)
            else:
                h = build_full_hamiltonian(params, om, space)
                cops = full_collapse_ops(params, om, space)
            liouv = build_liouvillian(h, cops)
            rho = steady_state(liouv)
        except (SteadyStateError, DegenerateSteadyStateError):
            return fail(ERR_STEADY)
        except Exception:
            return fail(ERR_NUMERICAL)

        code = ERR_OK

        def observe(fn):
            nonlocal code
            try:
                return fn()
            except UndefinedCorrelationError:
                code = code or ERR_UNDEFINED
            except Exception:
                code = code or ERR_NUMERICAL
            return math.nan

        if "g2_b" in config.observables:
            base.g2_b = observe(lambda: g2_zero(rho, space, 0))
        if "n_b1" in config.observables:
            base.n_b1 = observe(lambda: occupation(rho, space, 0))
        if "n_b2" in config.observables:
            base.n_b2 = observe(lambda: occupation(rho, space, 1))
        if "g2_a" in config.observables:
            base.g2_a = observe(lambda: g2_zero(rho, space, 2))
        if "n_a" in config.observables:
            base.n_a = observe(lambda: occupation(rho, space, 2))
        if config.convergence:
            try:
                base.converged = convergence_check(params, config.dims, om=om).converged
            except Exception:
                base.converged = False

        if taus is None:
            base.error_code = code
            return finish([base])

        series = observe(lambda: g2_tau(liouv, rho, space, np.asarray(taus), mode=0))
        rows = [replace(base) for _ in range(nrows)]
        for k, row in enumerate(rows):
            row.error_code = code
            row.g2_b = series.values[k] if not isinstance(series, float) else math.nan
        return finish(rows)


def resolve_workers(cli_value: int | None = None) -> int:
    """Worker count: CLI flag wins, then the environment variable, then 1."""
    if cli_value is not None:
        if cli_value < 1:
            raise ConfigError("workers must be >= 1")
        return cli_value
    env = os.environ.get(WORKERS_ENV_VAR)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV_VAR} must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError(f"{WORKERS_ENV_VAR} must be >= 1")
        return n
    return 1


@dataclass
class SweepResult:
    """All rows of a finished sweep, in row-major grid order."""

    config: SweepConfig
    rows: list[SweepRow] = field(default_factory=list)

    @property
    def n_failed(self) -> int:
        return sum(1 for r in self.rows if r.error_code != ERR_OK)

    @property
    def n_weak_drive(self) -> int:
        return sum(1 for r in self.rows if r.weak_drive)

    @property
    def n_unconverged(self) -> int:
        return sum(1 for r in self.rows if r.converged is False)

    def write_csv(self, target, *, timestamp: bool = True) -> None:
        """Write the fixed-schema CSV; target is a path or a text file object."""
        if hasattr(target, "write"):
            self._write(target, timestamp)
        else:
            with open(target, "w", encoding="utf-8", newline="\n") as fh:
                self._write(fh, timestamp)

    def _write(self, fh, timestamp: bool) -> None:
        fh.write(f"# phonoblock {__version__} sweep\n")
        if timestamp:
            stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
            fh.write(f"# timestamp: {stamp}\n")
        for line in self.config.raw_lines:
            fh.write(f"# > {line}\n")
        for ax in self.config.axes:
            fh.write(f"# axis: {ax.name} {len(ax.values)}\n")
        if self.config.tau_axis is not None:
            j = self.config.fixed.get("j")
            if j:
                fh.write(f"# tau_period_2pi_over_j: {2 * math.pi / j:.12g}\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in self.rows:
            cells = [f"{getattr(row, c):.12g}" for c in CSV_COLUMNS[:-1]]
            cells.append(str(row.error_code))
            fh.write(",".join(cells) + "\n")

    def csv_text(self, *, timestamp: bool = True) -> str:
        buf = StringIO()
        self._write(buf, timestamp)
        return buf.getvalue()


def run_sweep(config: SweepConfig, *, workers: int | None = None) -> SweepResult:
    """Execute every grid point and assemble rows in row-major order.

    Points are independent work items; with more than one worker they are
    dispatched to a process pool, and results are identical to a serial run.
    """
    nworkers = resolve_workers(workers)
    point_axes = [ax for ax in config.axes if ax.name != "tau"]
    names = [ax.name for ax in point_axes]
    points = [
        dict(zip(names, combo))
        for combo in product(*[ax.values for ax in point_axes])
    ]
    result = SweepResult(config=config)
    if nworkers == 1 or len(points) <= 1:
        for point in points:
            result.rows.extend(_compute_item(config, point))
        return result
    chunk = max(1, len(points) // (nworkers * 4))
    with ProcessPoolExecutor(max_workers=nworkers) as pool:
        for rows in pool.map(partial(_compute_item, config), points, chunksize=chunk):
            result.rows.extend(rows)
    return result
