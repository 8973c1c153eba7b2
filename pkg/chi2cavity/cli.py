"""chi2cavity command line.

Examples:
  chi2cavity evolve --scheme two-mode --tau-a 9.5ps --tau-b 9.5ps --omega 2e11 --t-final 100ps
  chi2cavity spectrum --omega 1e11 --tau-a 10ps --tau-b 20ps \
      --detuning-min=-2THz --detuning-max=2THz
  chi2cavity feasibility --platform all --format json
  chi2cavity sweep --platform pcdmc --axis n=1e4:1e8:9:log --jobs 4
  chi2cavity coupling --polarizations 1,1,1 1,1,1 1,1,1 --growth-axis 1,1,1

Every parameter may also come from ``--config file.json`` (keys are the flag
names); flags win. Exit codes: 0 ok, 2 usage or domain error, 3 numerical or
resource limit.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import math
import sys
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import structlog

from chi2cavity import __version__
from chi2cavity.analytic import (
    CrossingPoint,
    ReducedModel,
    avoided_crossing,
    damped_rabi_frequency,
    dressed_spectrum,
    generalized_rabi,
    transmission_spectrum,
)
from chi2cavity.chi2_overlap import (
    Chi2Tensor,
    complex_overlap_integral,
    contract_polarizations,
    coupling_constant,
    overlap_integral,
)
from chi2cavity.core import (
    CONSTANTS,
    CavityMode,
    CoupledSystem,
    Platform,
    Scheme,
    angular_frequency,
    get_preset,
)
from chi2cavity.dynamics import (
    TRACE_COLUMNS,
    SubsystemState,
    evolve_lindblad,
    evolve_subsystem,
)
from chi2cavity.errors import DomainError, ResourceError
from chi2cavity.feasibility import (
    ASSUMPTION_SETS,
    FeasibilityReport,
    get_assumptions,
    platform_report,
    report_payload,
    report_text,
)
from chi2cavity.fields import read_field
from chi2cavity.metrics import sweep_points_total
from chi2cavity.output import (
    build_metadata,
    metadata_lines,
    open_output,
    write_csv,
    write_json,
)
from chi2cavity.units import Kind, parse_quantity

log = structlog.get_logger()

MAX_GRID_POINTS = 10**7

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_UNIT_KINDS = frozenset(Kind)
SCHEMES = tuple(s.value for s in Scheme)
PLATFORMS = tuple(p.value for p in Platform)


class UsageError(DomainError):
    """A flag is missing, malformed or does not fit the other flags."""


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Param:
    name: str
    kind: str  # a units.Kind value, or "float" | "int" | "str" | "list"
    default: Any = None
    help: str = ""
    choices: tuple[str, ...] | None = None
    nargs: str | int | None = None
    echo: bool = True

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")

    def convert(self, raw: Any) -> Any:
        if raw is None:
            return None
        try:
            if self.kind in _UNIT_KINDS:
                return parse_quantity(raw, self.kind)
            if self.kind == "float":
                return float(raw)
            if self.kind == "int":
                value = float(raw)
                if not value.is_integer():
                    raise ValueError(f"{raw!r} is not an integer")
                return int(value)
            if self.kind == "list":
                items = raw if isinstance(raw, list | tuple) else [raw]
                return [
                    ",".join(str(x) for x in v) if isinstance(v, list | tuple) else str(v)
                    for v in items
                ]
            value = str(raw)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{self.flag}: {exc}") from exc
        if self.choices is not None and value not in self.choices:
            raise UsageError(f"{self.flag}: {value!r} is not one of {', '.join(self.choices)}")
        return value


def _common(format_choices: tuple[str, ...]) -> list[Param]:
    return [
        Param("output", "str", "-", "output file, - for stdout", echo=False),
        Param("format", "str", format_choices[0], "output format", choices=format_choices),
    ]


def _scheme_params() -> list[Param]:
    return [
        Param("scheme", "str", Scheme.TWO_MODE.value, "coupling scheme", choices=SCHEMES),
        Param("tau_a", Kind.TIME, help="mode a photon lifetime, e.g. 9.5ps"),
        Param("tau_b", Kind.TIME, help="mode b photon lifetime"),
        Param("omega", Kind.ANGULAR, help="bare coupling Ω (rad/s, or Hz-suffixed)"),
        Param("seed_amplitude", "float", help="|α| of the seed (three-mode only)"),
    ]


EVOLVE_PARAMS = [
    *_scheme_params(),
    Param("detuning", Kind.ANGULAR, 0.0, "Δ (rad/s)"),
    Param("t_final", Kind.TIME, help="end time"),
    Param("dt_max", Kind.TIME, help="largest RK4 step (default t_final/1000)"),
    Param("max_samples", "int", 10_000, "rows kept in the trace"),
    Param("oracle", "str", "none", "cross-check integrator", choices=("none", "full-lindblad")),
    Param("truncation", "str", help="Fock truncation N_a,N_b for the oracle"),
    *_common(("csv", "json")),
]

SPECTRUM_PARAMS = [
    *_scheme_params(),
    Param("wavelength_a", Kind.LENGTH, 0.75e-6, "fixed mode a wavelength"),
    Param("detuning_min", Kind.ANGULAR, help="first Δ sample"),
    Param("detuning_max", Kind.ANGULAR, help="last Δ sample"),
    Param("points", "int", 201, "samples"),
    Param("lineshape_at", Kind.ANGULAR, help="emit S(ω) at this Δ instead of E±(Δ)"),
    Param("window", Kind.ANGULAR, help="half width of the S(ω) window around the line centre"),
    *_common(("csv", "json")),
]

FEASIBILITY_PARAMS = [
    Param("platform", "str", "all", "platform preset", choices=(*PLATFORMS, "all")),
    Param("assumptions", "str", "published", "assumption set", choices=tuple(ASSUMPTION_SETS)),
    Param("f_c", "float", 1.0, "seed mode volume ratio V_c/V_a"),
    *_common(("text", "json")),
]

SWEEP_PARAMS = [
    Param("platform", "str", Platform.PCDMC.value, "platform preset", choices=PLATFORMS),
    Param("assumptions", "str", "published", "assumption set", choices=tuple(ASSUMPTION_SETS)),
    Param(
        "axis",
        "list",
        [],
        "grid axis NAME=START:STOP:COUNT[:log] or NAME=V1,V2,...; "
        "NAME in n, f_c, quality_factor, detuning",
        nargs="append",
    ),
    Param("jobs", "int", 1, "worker threads"),
    *_common(("csv", "json")),
]

COUPLING_PARAMS = [
    Param("chi2", Kind.CHI2, 200e-12, "|χ⁽²⁾| of the 4̄3m tensor, e.g. 200pm/V"),
    Param("growth_axis", "str", "0,0,1", "crystal axis along lab z"),
    Param("polarizations", "list", help="three vectors x,y,z to contract", nargs=3),
    Param("fields", "list", help="field files a, b[, c] for the overlap integral", nargs="+"),
    Param("platform", "str", help="preset for the ½|χ⁽²⁾|V_a estimate", choices=PLATFORMS),
    Param("wavelength_b", Kind.LENGTH, 1.5e-6, "mode b wavelength for Ω from --fields"),
    Param("refractive_index", "float", 3.4, "index for Ω from --fields"),
    Param("volume_factor", "float", 1.0, "mode volumes in (λ/n)³ for Ω from --fields"),
    *_common(("csv", "json")),
]


def _add_params(parser: argparse.ArgumentParser, params: Sequence[Param]) -> None:
    for p in params:
        kwargs: dict[str, Any] = {"dest": p.name, "default": None, "help": p.help}
        if p.choices is not None:
            kwargs["choices"] = p.choices
        if p.nargs == "append":
            kwargs["action"] = "append"
        elif p.nargs is not None:
            kwargs["nargs"] = p.nargs
        flags = [p.flag, "-o"] if p.name == "output" else [p.flag]
        parser.add_argument(*flags, **kwargs)


def load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"--config: cannot read {path}: {exc}") from exc
    if not isinstance(document, dict):
        raise UsageError("--config: top level must be a JSON object")
    return {str(k).replace("-", "_"): v for k, v in document.items() if k != "command"}


def resolve(params: Sequence[Param], args: argparse.Namespace) -> dict[str, Any]:
    """Defaults, then config file, then flags."""
    config = load_config(args.config)
    known = {p.name for p in params}
    unknown = sorted(set(config) - known)
    if unknown:
        raise UsageError(f"--config: unknown keys {unknown}")
    resolved = {}
    for p in params:
        raw = getattr(args, p.name)
        if raw is None:
            raw = config.get(p.name, p.default)
        resolved[p.name] = p.convert(raw)
    return resolved


def _echo(params: Sequence[Param], resolved: dict[str, Any]) -> dict[str, Any]:
    return {p.name: resolved[p.name] for p in params if p.echo}


def _require(params: Sequence[Param], resolved: dict[str, Any], *names: str) -> None:
    flags = {p.name: p.flag for p in params}
    for name in names:
        if resolved[name] is None:
            raise UsageError(f"{flags[name]} is required")


def _emit_table(
    params: Sequence[Param],
    command: str,
    resolved: dict[str, Any],
    columns: Sequence[str],
    rows: Sequence[Sequence[Any]],
    extra: dict[str, Any] | None = None,
) -> None:
    metadata = build_metadata(command, _echo(params, resolved))
    metadata.update(extra or {})
    with open_output(resolved["output"]) as stream:
        if resolved["format"] == "json":
            payload = {"columns": list(columns), "rows": [list(row) for row in rows]}
            write_json(stream, payload, metadata)
        else:
            write_csv(stream, columns, rows, metadata)


# ---------------------------------------------------------------------------
# evolve
# ---------------------------------------------------------------------------


def _system_from(params: Sequence[Param], resolved: dict[str, Any]) -> CoupledSystem:
    _require(params, resolved, "tau_a", "tau_b", "omega")
    scheme = Scheme(resolved["scheme"])
    seed = resolved["seed_amplitude"]
    if scheme is Scheme.TWO_MODE and seed is not None:
        raise UsageError("--seed-amplitude only applies to --scheme three-mode")
    if scheme is Scheme.THREE_MODE and seed is None:
        seed = resolved["seed_amplitude"] = 1.0
    return CoupledSystem.from_rates(
        scheme,
        resolved["tau_a"],
        resolved["tau_b"],
        resolved["omega"],
        detuning=resolved.get("detuning") or 0.0,
        seed_amplitude=seed if seed is not None else 1.0,
    )


def _truncation(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        n_a, n_b = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--truncation: expected N_a,N_b, got {text!r}") from exc
    return n_a, n_b


def cmd_evolve(args: argparse.Namespace) -> None:
    resolved = resolve(EVOLVE_PARAMS, args)
    _require(EVOLVE_PARAMS, resolved, "t_final")
    system = _system_from(EVOLVE_PARAMS, resolved)
    if resolved["oracle"] == "none" and resolved["truncation"] is not None:
        raise UsageError("--truncation only applies to --oracle full-lindblad")
    if resolved["dt_max"] is None:
        resolved["dt_max"] = resolved["t_final"] / 1000.0
    model = ReducedModel.from_system(system)
    trace = evolve_subsystem(
        model,
        SubsystemState.excited(),
        resolved["t_final"],
        resolved["dt_max"],
        max_samples=resolved["max_samples"],
    )
    columns = list(TRACE_COLUMNS)
    rows = [list(row) for row in trace.rows()]
    extra: dict[str, Any] = {"integrator": trace.metadata}
    if resolved["oracle"] == "full-lindblad":
        oracle = evolve_lindblad(
            system,
            resolved["t_final"],
            resolved["dt_max"],
            trunc=_truncation(resolved["truncation"]),
            max_samples=resolved["max_samples"],
        ).trace
        columns += ["rho11_lindblad", "rho22_lindblad"]
        for row, r11, r22 in zip(rows, oracle.rho11, oracle.rho22, strict=True):
            row += [float(r11), float(r22)]
        deviation = np.max(np.abs(oracle.values[:, :4] - trace.values[:, :4]))
        extra["oracle_max_deviation"] = float(deviation)
    _emit_table(EVOLVE_PARAMS, "evolve", resolved, columns, rows, extra)


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

SPECTRUM_COLUMNS = CrossingPoint._fields


def _model_at(system_params: dict[str, Any], detuning: float) -> ReducedModel:
    seed = system_params["seed_amplitude"]
    return ReducedModel.from_lifetimes(
        Scheme(system_params["scheme"]),
        system_params["tau_a"],
        system_params["tau_b"],
        system_params["omega"],
        seed_amplitude=1.0 if seed is None else seed,
        detuning=detuning,
    )


def cmd_spectrum(args: argparse.Namespace) -> None:
    resolved = resolve(SPECTRUM_PARAMS, args)
    _require(SPECTRUM_PARAMS, resolved, "tau_a", "tau_b", "omega")
    if resolved["scheme"] == Scheme.TWO_MODE and resolved["seed_amplitude"] is not None:
        raise UsageError("--seed-amplitude only applies to --scheme three-mode")
    points = resolved["points"]
    if points < 1:
        raise UsageError("--points must be >= 1")
    if points > MAX_GRID_POINTS:
        raise ResourceError(f"{points} spectrum points exceed the limit of {MAX_GRID_POINTS}")
    omega_a = angular_frequency(resolved["wavelength_a"])

    if resolved["lineshape_at"] is not None:
        detuning = resolved["lineshape_at"]
        spectrum = dressed_spectrum(_model_at(resolved, detuning), 2.0 * omega_a - detuning)
        center = 0.5 * (spectrum.e_plus + spectrum.e_minus) / CONSTANTS.hbar
        window = resolved["window"] or (
            spectrum.omega_prime + 5.0 * max(spectrum.gamma_plus, spectrum.gamma_minus)
        )
        grid = np.linspace(center - window, center + window, points)
        omega, response = transmission_spectrum(spectrum, grid)
        rows = [(float(w), float(s)) for w, s in zip(omega, response, strict=True)]
        _emit_table(SPECTRUM_PARAMS, "spectrum", resolved, ("omega", "transmission"), rows)
        return

    _require(SPECTRUM_PARAMS, resolved, "detuning_min", "detuning_max")
    detunings = np.linspace(resolved["detuning_min"], resolved["detuning_max"], points)
    rows = avoided_crossing(_model_at(resolved, 0.0), omega_a, detunings)
    _emit_table(SPECTRUM_PARAMS, "spectrum", resolved, SPECTRUM_COLUMNS, rows)


# ---------------------------------------------------------------------------
# feasibility
# ---------------------------------------------------------------------------


def _reports(platform: str, assumptions: str, f_c: float) -> list[FeasibilityReport]:
    names = PLATFORMS if platform == "all" else (platform,)
    chosen = get_assumptions(assumptions)
    return [platform_report(name, chosen, f_c) for name in names]


def cmd_feasibility(args: argparse.Namespace) -> None:
    resolved = resolve(FEASIBILITY_PARAMS, args)
    reports = _reports(resolved["platform"], resolved["assumptions"], resolved["f_c"])
    metadata = build_metadata("feasibility", _echo(FEASIBILITY_PARAMS, resolved))
    metadata["assumption_set"] = get_assumptions(resolved["assumptions"]).model_dump()
    with open_output(resolved["output"]) as stream:
        if resolved["format"] == "json":
            write_json(stream, report_payload(reports), metadata)
        else:
            for line in metadata_lines(metadata):
                stream.write(line + "\n")
            stream.write(report_text(reports))


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

AXIS_ORDER = ("n", "f_c", "quality_factor", "detuning")
_AXIS_KIND = {"n": "float", "f_c": "float", "quality_factor": "float", "detuning": Kind.ANGULAR}

SWEEP_COLUMNS = (
    "n",
    "f_c",
    "quality_factor",
    "detuning",
    "tau_eff",
    "half_period_coeff",
    "n_min_time",
    "n_min_spectral",
    "half_period",
    "time_margin",
    "time_passed",
    "spectral_margin",
    "spectral_passed",
    "rabi_frequency",
    "splitting",
)


def _axis_value(name: str, raw: Any) -> float:
    kind = _AXIS_KIND[name]
    if kind == "float":
        try:
            return float(raw)
        except ValueError as exc:
            raise UsageError(f"--axis {name}: {exc}") from exc
    return parse_quantity(raw, kind)


def parse_axis(spec: str) -> tuple[str, list[float]]:
    """``name=start:stop:count[:log]`` or ``name=v1,v2,...``."""
    name, sep, body = spec.partition("=")
    name = {"Q": "quality_factor"}.get(name.strip(), name.strip())
    if not sep or name not in _AXIS_KIND:
        raise UsageError(f"--axis: expected NAME=VALUES with NAME in {AXIS_ORDER}, got {spec!r}")
    if ":" not in body:
        return name, [_axis_value(name, v) for v in body.split(",") if v.strip()]
    parts = body.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("lin", "log")):
        raise UsageError(f"--axis {name}: expected START:STOP:COUNT[:lin|log], got {body!r}")
    start, stop = _axis_value(name, parts[0]), _axis_value(name, parts[1])
    try:
        count = int(float(parts[2]))
    except ValueError as exc:
        raise UsageError(f"--axis {name}: bad count {parts[2]!r}") from exc
    if count < 1:
        raise UsageError(f"--axis {name}: count must be >= 1")
    if count > MAX_GRID_POINTS:
        raise ResourceError(f"--axis {name}: {count} points exceed the limit of {MAX_GRID_POINTS}")
    if len(parts) == 4 and parts[3] == "log":
        if start <= 0 or stop <= 0:
            raise UsageError(f"--axis {name}: log spacing needs positive bounds")
        return name, [float(v) for v in np.geomspace(start, stop, count)]
    return name, [float(v) for v in np.linspace(start, stop, count)]


def sweep_grid(axis_specs: Sequence[str], default_q: float) -> list[tuple[float, ...]]:
    axes: dict[str, list[float]] = {
        "n": [1e6],
        "f_c": [1.0],
        "quality_factor": [default_q],
        "detuning": [0.0],
    }
    for spec in axis_specs:
        name, values = parse_axis(spec)
        if not values:
            raise UsageError(f"--axis {name}: no values")
        axes[name] = values
    total = math.prod(len(axes[name]) for name in AXIS_ORDER)
    if total > MAX_GRID_POINTS:
        raise ResourceError(f"sweep grid has {total} points, limit is {MAX_GRID_POINTS}")
    return list(itertools.product(*(axes[name] for name in AXIS_ORDER)))


def _sweep_row(
    reports: dict[tuple[float, float], FeasibilityReport], point: tuple[float, ...]
) -> tuple[Any, ...]:
    n, f_c, q, detuning = point
    report = reports[(q, f_c)]
    model = report.reduced_model(n).model_copy(update={"detuning": detuning})
    time, spectral = report.margins(n)
    return (
        n,
        f_c,
        q,
        detuning,
        report.tau_eff,
        report.half_period_coeff,
        report.n_min_time,
        report.n_min_spectral,
        report.seeded_half_period(n),
        time.margin,
        time.passed,
        spectral.margin,
        spectral.passed,
        damped_rabi_frequency(model),
        generalized_rabi(model.g, detuning),
    )


def cmd_sweep(args: argparse.Namespace) -> None:
    resolved = resolve(SWEEP_PARAMS, args)
    if resolved["jobs"] < 1:
        raise UsageError("--jobs must be >= 1")
    preset_name = Platform(resolved["platform"])
    preset = get_preset(preset_name)
    assumptions = get_assumptions(resolved["assumptions"])
    grid = sweep_grid(resolved["axis"], preset.quality_factor)
    for n, f_c, q, _ in grid:
        if n <= 0 or f_c <= 0 or q <= 0:
            raise UsageError("--axis: n, f_c and quality_factor must be > 0")

    reports: dict[tuple[float, float], FeasibilityReport] = {}
    for _, f_c, q, _ in grid:
        if (q, f_c) not in reports:
            variant = preset.model_copy(update={"quality_factor": q})
            reports[(q, f_c)] = platform_report(variant, assumptions, f_c)

    def row(point: tuple[float, ...]) -> tuple[Any, ...]:
        return _sweep_row(reports, point)

    if resolved["jobs"] == 1:
        rows = [row(point) for point in grid]
    else:
        with ThreadPoolExecutor(max_workers=resolved["jobs"]) as pool:
            rows = list(pool.map(row, grid))
    sweep_points_total.inc(len(rows))
    log.info("sweep_done", platform=preset_name.value, points=len(rows), jobs=resolved["jobs"])
    _emit_table(SWEEP_PARAMS, "sweep", resolved, SWEEP_COLUMNS, rows)


# ---------------------------------------------------------------------------
# coupling
# ---------------------------------------------------------------------------


def _vector(text: str, flag: str) -> np.ndarray:
    try:
        values = np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"{flag}: expected x,y,z, got {text!r}") from exc
    if values.shape != (3,) or not np.linalg.norm(values) > 0:
        raise UsageError(f"{flag}: expected a non-zero x,y,z vector, got {text!r}")
    return values / np.linalg.norm(values)


def cmd_coupling(args: argparse.Namespace) -> None:
    resolved = resolve(COUPLING_PARAMS, args)
    if not (resolved["polarizations"] or resolved["fields"] or resolved["platform"]):
        raise UsageError("coupling needs --polarizations, --fields or --platform")
    tensor = Chi2Tensor.for_growth_axis(
        resolved["chi2"], _vector(resolved["growth_axis"], "--growth-axis")
    )
    rows: list[tuple[str, Any]] = []

    if resolved["polarizations"]:
        e1, e2, e3 = (_vector(v, "--polarizations") for v in resolved["polarizations"])
        rows.append(("contraction", contract_polarizations(tensor, e1, e2, e3)))

    if resolved["fields"]:
        paths = resolved["fields"]
        if len(paths) not in (2, 3):
            raise UsageError("--fields takes two (two-mode) or three (three-mode) files")
        grids = [read_field(p) for p in paths]
        fa, fb = grids[0], grids[1]
        fc = grids[2] if len(grids) == 3 else fb
        value = complex_overlap_integral(tensor, fa, fb, fc)
        rows += [("overlap_real", value.real), ("overlap_imag", value.imag)]
        wavelength_b = resolved["wavelength_b"]
        n, factor = resolved["refractive_index"], resolved["volume_factor"]
        mode_b = CavityMode.from_q(wavelength_b, 1.0, n, factor)
        mode_a = CavityMode.from_q(0.5 * wavelength_b, 1.0, n, factor)
        if len(grids) == 2:
            system = CoupledSystem.two_mode(mode_a, mode_b, 0.0)
        else:
            system = CoupledSystem.three_mode(mode_a, mode_b, mode_b, 0.0, 1.0)
        rows.append(("omega", coupling_constant(system, overlap_integral(tensor, fa, fb, fc))))

    if resolved["platform"]:
        report = platform_report(resolved["platform"], get_assumptions("published"))
        rows += [
            ("estimated_overlap", report.overlap),
            ("omega_three_mode", report.omega_single),
            ("omega_two_mode", report.unseeded_omega),
        ]
    _emit_table(COUPLING_PARAMS, "coupling", resolved, ("quantity", "value"), rows)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

COMMANDS: dict[str, tuple[Callable[[argparse.Namespace], None], list[Param], str]] = {
    "evolve": (cmd_evolve, EVOLVE_PARAMS, "populations versus time from one photon in a"),
    "spectrum": (cmd_spectrum, SPECTRUM_PARAMS, "dressed energies and linewidths versus Δ"),
    "feasibility": (cmd_feasibility, FEASIBILITY_PARAMS, "platform feasibility reports"),
    "sweep": (cmd_sweep, SWEEP_PARAMS, "criterion margins over a parameter grid"),
    "coupling": (cmd_coupling, COUPLING_PARAMS, "tensor contraction and overlap utilities"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chi2cavity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (handler, params, help_text) in COMMANDS.items():
        command = sub.add_parser(name, help=help_text)
        command.add_argument("--config", help="JSON document of parameters; flags override it")
        command.add_argument(
            "--log-level",
            default="warning",
            choices=("debug", "info", "warning", "error"),
            help="diagnostics on stderr",
        )
        _add_params(command, params)
        command.set_defaults(handler=handler)
    return parser


def configure_logging(level: str) -> None:
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(getattr(logging, level.upper())),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
    )


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse usage errors, --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    configure_logging(args.log_level)
    try:
        with np.errstate(over="raise", invalid="raise"):
            args.handler(args)
    except (ResourceError, FloatingPointError) as exc:
        log.error("command_failed", command=args.command, error=str(exc))
        print(f"chi2cavity {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # DomainError, UsageError and pydantic ValidationError
        print(f"chi2cavity {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
