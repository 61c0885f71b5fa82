"""Command-line driver: one subcommand per study, CSV out.

Every output file starts with ``#`` lines echoing the version and the full
parameter set (``# key=value``), so ``read_config_from_csv`` can rebuild
the configuration that produced it.  Numbers are written with 17
significant digits.

Exit statuses: 0 success, 1 usage, 2 resource limit, 3 validation failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analytic import bath_correlation, correlation_phase_report
from .errors import OutputError, SpinStarError, UsageError, ValidationFailure
from .evolution import run_trajectory
from .grid import TimeGrid
from .model import DEFAULT_ORACLE_LIMIT, CentralState
from .observables import (
    bloch_series,
    coherence_ratio,
    coherence_series,
    fluctuation,
    mutual_entropy_series,
    probability_series,
)
from .oracle import run_full_trajectory
from .spectral import NORMALIZATION, find_peaks, power_spectrum
from .symmetry import INFINITE, ModelParams, parse_beta

MODES = ("dynamics", "spectrum", "fluctuation", "decoherence", "mutual-info", "correlation", "validate")
INITS = ("up", "down", "plus", "custom")
VALIDATION_TOL = 1e-9

# mode-specific defaults layered under the config file and the flags
_MODE_DEFAULTS = {
    "spectrum": {"t_max": 400.0},
    "decoherence": {"init": "plus"},
    "validate": {"n": 6, "dt": 0.1, "t_max": 50.0},
    "correlation": {"t_max": 50.0},
}
_DEFAULTS = {
    "n": 201,
    "g": 0.1,
    "omega": 1.0,
    "omega0": 1.0,
    "beta": 0.0,
    "init": "up",
    "a": None,
    "b": None,
    "dephase": False,
    "dt": 0.05,
    "t_max": 200.0,
    "t_min_fluct": 50.0,
    "oracle_cap": DEFAULT_ORACLE_LIMIT,
    "output": None,
    "workers": 1,
    "sweep_n": [21, 51, 101, 201],
    "sweep_beta": [0.0, 0.1, 3.0],
    "rel_threshold": 0.1,
    "weight_floor": 0.0,
}
# keys echoed in the preamble; workers is left out so files do not depend on it
_ECHO_KEYS = (
    "n", "g", "omega", "omega0", "beta", "init", "a", "b", "dephase", "dt", "t_max",
    "t_min_fluct", "oracle_cap", "sweep_n", "sweep_beta", "rel_threshold", "weight_floor",
)


@dataclass(frozen=True)
class RunConfig:
    mode: str
    params: ModelParams
    init: str
    grid: TimeGrid
    a: complex | None = None
    b: complex | None = None
    dephase: bool = False
    t_min_fluct: float = 50.0
    oracle_cap: int = DEFAULT_ORACLE_LIMIT
    output: str | None = None
    workers: int = 1
    sweep_n: tuple[int, ...] = (21, 51, 101, 201)
    sweep_beta: tuple = (0.0, 0.1, 3.0)
    rel_threshold: float = 0.1
    weight_floor: float = 0.0
    t_max: float = field(default=200.0, repr=False)

    def central_state(self) -> CentralState:
        if self.init == "custom":
            state = CentralState.from_amplitudes(self.a, self.b)
        else:
            state = getattr(CentralState, self.init)()
        return state.dephased() if self.dephase else state

    def echo(self) -> dict:
        values = {
            "n": self.params.n_spins,
            "g": self.params.g,
            "omega": self.params.omega,
            "omega0": self.params.omega0,
            "beta": self.params.beta,
            "init": self.init,
            "a": self.a,
            "b": self.b,
            "dephase": self.dephase,
            "dt": self.grid.dt,
            "t_max": self.t_max,
            "t_min_fluct": self.t_min_fluct,
            "oracle_cap": self.oracle_cap,
            "sweep_n": list(self.sweep_n),
            "sweep_beta": list(self.sweep_beta),
            "rel_threshold": self.rel_threshold,
            "weight_floor": self.weight_floor,
        }
        return {key: values[key] for key in _ECHO_KEYS}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _number_list(kind):
    def parse(text):
        return [kind(item) for item in text.split(",") if item.strip()]

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinstar", allow_abbrev=False, description="Exact dynamics of a central spin coupled to a spin bath.")
    parser.add_argument("--version", action="version", version=f"spinstar {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    for mode in MODES:
        p = sub.add_parser(mode, allow_abbrev=False)
        p.add_argument("--config", help="JSON file of parameters; flags override it")
        p.add_argument("--n", type=int, help="number of bath spins (default 201)")
        p.add_argument("--g", type=float, help="coupling (default 0.1)")
        p.add_argument("--omega", type=float, help="bath level splitting (default 1)")
        p.add_argument("--omega0", type=float, help="central level splitting (default 1)")
        p.add_argument("--beta", type=str, help="inverse temperature, decimal or 'inf' (default 0)")
        p.add_argument("--init", choices=INITS, help="initial central state")
        p.add_argument("--a", type=complex, help="amplitude of |up> for --init custom")
        p.add_argument("--b", type=complex, help="amplitude of |down> for --init custom")
        p.add_argument("--dephase", action="store_true", default=None, help="drop initial coherences")
        p.add_argument("--dt", type=float, help="time step (default 0.05)")
        p.add_argument("--t-max", dest="t_max", type=float, help="final time")
        p.add_argument("--t-min-fluct", dest="t_min_fluct", type=float, help="fluctuation window start (default 50)")
        p.add_argument("--oracle-cap", dest="oracle_cap", type=int, help="largest N for full-space runs")
        p.add_argument("--output", "-o", help="output CSV path (default stdout)")
        p.add_argument("--workers", type=int, help="worker processes for the sector loop")
        p.add_argument("--sweep-n", dest="sweep_n", type=_number_list(int), help="comma-separated N list")
        p.add_argument("--sweep-beta", dest="sweep_beta", type=_number_list(str), help="comma-separated beta list")
        p.add_argument("--rel-threshold", dest="rel_threshold", type=float, help="peak threshold (default 0.1)")
        p.add_argument("--weight-floor", dest="weight_floor", type=float, help="skip sectors at or below this weight")
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise OutputError(f"--config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"--config: {path} is not valid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"--config: {path} must hold a JSON object")
    values = {}
    for key, value in data.items():
        name = key.replace("-", "_")
        if name not in _DEFAULTS:
            raise UsageError(f"--config: unknown key {key!r}")
        values[name] = value
    return values


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def config_from_values(mode: str, values: dict) -> RunConfig:
    """Validate merged raw values into a RunConfig; errors name the offending flag."""
    if mode not in MODES:
        raise UsageError(f"unknown mode {mode!r}")
    v = dict(values)

    def convert(name, kind):
        try:
            v[name] = kind(v[name])
        except (TypeError, ValueError):
            raise UsageError(f"{_flag(name)}: cannot parse {v[name]!r}") from None

    for name in ("n", "oracle_cap", "workers"):
        convert(name, int)
    for name in ("g", "omega", "omega0", "dt", "t_max", "t_min_fluct", "rel_threshold", "weight_floor"):
        convert(name, float)
    for name in ("a", "b"):
        if v[name] is not None:
            convert(name, complex)

    try:
        beta = parse_beta(v["beta"])
    except SpinStarError as exc:
        raise UsageError(f"--beta: {exc}") from None
    try:
        sweep_beta = tuple(parse_beta(b) for b in v["sweep_beta"])
    except SpinStarError as exc:
        raise UsageError(f"--sweep-beta: {exc}") from None
    try:
        sweep_n = tuple(int(n) for n in v["sweep_n"])
    except (TypeError, ValueError):
        raise UsageError(f"--sweep-n: cannot parse {v['sweep_n']!r}") from None

    if v["init"] not in INITS:
        raise UsageError(f"--init: expected one of {', '.join(INITS)}, got {v['init']!r}")
    if v["init"] == "custom":
        if v["a"] is None or v["b"] is None:
            raise UsageError("--init custom needs both --a and --b")
        norm2 = abs(v["a"]) ** 2 + abs(v["b"]) ** 2
        if abs(norm2 - 1) > 1e-10:
            raise UsageError(f"--a/--b: |a|^2 + |b|^2 = {norm2!r}, expected 1")
    if v["workers"] < 1:
        raise UsageError(f"--workers: must be >= 1, got {v['workers']}")
    if v["oracle_cap"] < 1:
        raise UsageError(f"--oracle-cap: must be >= 1, got {v['oracle_cap']}")
    if not 0 < v["rel_threshold"] <= 1:
        raise UsageError(f"--rel-threshold: must lie in (0, 1], got {v['rel_threshold']}")
    if any(n < 1 for n in sweep_n) or not sweep_n:
        raise UsageError(f"--sweep-n: need positive spin numbers, got {list(sweep_n)}")

    try:
        params = ModelParams(v["omega0"], v["omega"], v["g"], v["n"], beta)
    except SpinStarError as exc:
        raise UsageError(f"{_flag(_param_flag(str(exc)))}: {exc}") from None
    try:
        grid = TimeGrid.from_t_max(v["dt"], v["t_max"])
    except SpinStarError as exc:
        raise UsageError(f"--dt/--t-max: {exc}") from None

    return RunConfig(
        mode=mode,
        params=params,
        init=v["init"],
        grid=grid,
        a=v["a"],
        b=v["b"],
        dephase=bool(v["dephase"]),
        t_min_fluct=v["t_min_fluct"],
        oracle_cap=v["oracle_cap"],
        output=v["output"],
        workers=v["workers"],
        sweep_n=sweep_n,
        sweep_beta=sweep_beta,
        rel_threshold=v["rel_threshold"],
        weight_floor=v["weight_floor"],
        t_max=v["t_max"],
    )


def _param_flag(message: str) -> str:
    for name in ("n_spins", "omega0", "omega", "g"):
        if message.startswith(name):
            return "n" if name == "n_spins" else name
    return "n"


def parse_config(argv=None, config_file: str | None = None) -> RunConfig:
    """Parse command-line arguments, layered over an optional JSON config file."""
    args = build_parser().parse_args(argv)
    values = dict(_DEFAULTS)
    values.update(_MODE_DEFAULTS.get(args.mode, {}))
    path = args.config or config_file
    if path:
        values.update(_load_config_file(path))
    for key, value in vars(args).items():
        if key in ("mode", "config") or value is None:
            continue
        values[key] = value
    return config_from_values(args.mode, values)


# ---------------------------------------------------------------- CSV output


def _fmt(value) -> str:
    if value is INFINITE:
        return "inf"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if value is None:
        return ""
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(item) for item in value)
    return str(value)


def format_csv(config: RunConfig, columns, rows, extra_meta=()) -> str:
    lines = [f"# spinstar {__version__}", f"# mode={config.mode}"]
    lines += [f"# {key}={_fmt(value)}" for key, value in config.echo().items()]
    lines += [f"# {line}" for line in extra_meta]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(float(x)) if not isinstance(x, str) else x for x in row))
    return "\n".join(lines) + "\n"


def read_config_from_csv(path_or_text: str) -> RunConfig:
    """Rebuild the RunConfig echoed in the preamble of an output file."""
    if "\n" in path_or_text:
        text = path_or_text
    else:
        with open(path_or_text) as fh:
            text = fh.read()
    mode = None
    values = dict(_DEFAULTS)
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        if "=" not in body:
            continue
        key, _, raw = body.partition("=")
        if key == "mode":
            mode = raw
        elif key in _DEFAULTS:
            values[key] = _unformat(key, raw)
    if mode is None:
        raise UsageError("file has no '# mode=' preamble line")
    return config_from_values(mode, values)


def _unformat(key: str, raw: str):
    if key in ("a", "b"):
        return complex(raw) if raw else None
    if key == "dephase":
        return raw == "true"
    if key == "init":
        return raw
    if key == "sweep_n":
        return [int(x) for x in raw.split(",") if x]
    if key == "sweep_beta":
        return [x for x in raw.split(",") if x]
    return raw


# ---------------------------------------------------------------- run modes


def _trajectory(config: RunConfig, params=None, want_entropies=False):
    return run_trajectory(
        params or config.params,
        config.central_state(),
        config.grid,
        want_entropies=want_entropies,
        workers=config.workers,
        weight_floor=config.weight_floor,
    )


def _run_dynamics(config, log):
    traj = _trajectory(config)
    sx, sy, sz = bloch_series(traj)
    rows = zip(config.grid.times, traj.probability, sx.values, sy.values, sz.values)
    return ("t", "P", "sx", "sy", "sz"), rows, ()


def _run_spectrum(config, log):
    traj = _trajectory(config)
    spec = power_spectrum(probability_series(traj))
    peaks = find_peaks(spec, config.rel_threshold)
    for peak in peaks:
        log(f"peak omega={peak.omega:.10g} amplitude={peak.amplitude:.6g}")
    meta = (f"normalization={NORMALIZATION}", f"bin_width={spec.bin_width:.17g}")
    return ("omega", "amplitude"), zip(spec.angular_frequencies, spec.amplitudes), meta


def _run_fluctuation(config, log):
    rows = []
    for n in config.sweep_n:
        for beta in config.sweep_beta:
            params = ModelParams(config.params.omega0, config.params.omega, config.params.g, n, beta)
            traj = _trajectory(config, params)
            delta = fluctuation(probability_series(traj), config.t_min_fluct)
            beta_value = math.inf if beta is INFINITE else beta
            rows.append((n, beta_value, delta))
            log(f"n={n} beta={_fmt(beta)} deltaP={delta:.6g}")
    return ("n", "beta", "deltaP"), rows, ()


def _run_decoherence(config, log):
    ratio = coherence_ratio(coherence_series(_trajectory(config))).values
    rows = zip(config.grid.times, ratio.real, ratio.imag, np.abs(ratio))
    return ("t", "reL", "imL", "absL"), rows, ()


def _run_mutual_info(config, log):
    traj = _trajectory(config, want_entropies=True)
    info = mutual_entropy_series(traj).values
    rows = zip(config.grid.times, info, traj.entropy_central, traj.entropy_bath, traj.entropy_joint)
    return ("t", "I_bits", "S_s", "S_b", "S_sb"), rows, ()


def _run_correlation(config, log):
    params = config.params
    samples = [bath_correlation(params, dt) for dt in config.grid.times]
    rows = [(s.dt, s.value.real, s.value.imag, s.modulus) for s in samples]
    # the brute-force reference scales as 2^N; its phase does not depend on N
    n_check = min(params.n_spins, 8, config.oracle_cap)
    check = ModelParams(params.omega0, params.omega, params.g, n_check, params.beta)
    probe = np.linspace(0.0, min(config.grid.t_max, 4 * math.pi / params.omega), 9)
    report = correlation_phase_report(check, probe, oracle_limit=config.oracle_cap)
    log(f"phase check with a brute-force bath of N={n_check} spins")
    for line in report.lines():
        log(line)
    return ("dt", "re", "im", "abs"), rows, tuple(f"phase-check: {line}" for line in report.lines())


@dataclass(frozen=True)
class ValidationReport:
    max_dp: float
    max_dc: float
    max_di: float

    @property
    def passed(self) -> bool:
        return max(self.max_dp, self.max_dc, self.max_di) <= VALIDATION_TOL


def validate(config: RunConfig) -> ValidationReport:
    rho0 = config.central_state()
    block = run_trajectory(config.params, rho0, config.grid, want_entropies=True, workers=config.workers)
    full = run_full_trajectory(config.params, rho0, config.grid, oracle_limit=config.oracle_cap)
    info_block = mutual_entropy_series(block).values
    info_full = mutual_entropy_series(full).values
    return ValidationReport(
        float(np.max(np.abs(block.probability - full.probability))),
        float(np.max(np.abs(block.coherence - full.coherence))),
        float(np.max(np.abs(info_block - info_full))),
    )


def _run_validate(config, log):
    report = validate(config)
    rows = [
        ("max_abs_dP", report.max_dp),
        ("max_abs_dC", report.max_dc),
        ("max_abs_dI_bits", report.max_di),
    ]
    for name, value in rows:
        log(f"{name}={value:.3e}")
    log("PASS" if report.passed else f"FAIL: deviation above {VALIDATION_TOL:g}")
    csv_rows = [(name, _fmt(value)) for name, value in rows]
    return ("quantity", "max_deviation"), csv_rows, (f"tolerance={VALIDATION_TOL:g}",), report


_RUNNERS = {
    "dynamics": _run_dynamics,
    "spectrum": _run_spectrum,
    "fluctuation": _run_fluctuation,
    "decoherence": _run_decoherence,
    "mutual-info": _run_mutual_info,
    "correlation": _run_correlation,
}


def _write(config: RunConfig, text: str, stdout):
    if config.output is None:
        stdout.write(text)
        return
    try:
        with open(config.output, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"--output: cannot write {config.output}: {exc.strerror}") from None


def execute(config: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    def log(message):
        print(message, file=stderr)

    if config.mode == "validate":
        columns, rows, meta, report = _run_validate(config, log)
        _write(config, format_csv(config, columns, rows, meta), stdout)
        if not report.passed:
            raise ValidationFailure(f"block and full-space results differ by more than {VALIDATION_TOL:g}")
        return 0
    columns, rows, meta = _RUNNERS[config.mode](config, log)
    _write(config, format_csv(config, columns, rows, meta), stdout)
    return 0


def main(argv=None) -> int:
    try:
        return execute(parse_config(argv))
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except SpinStarError as exc:
        print(f"spinstar: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except MemoryError as exc:
        print(f"spinstar: error: out of memory ({exc})", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"spinstar: error: {exc}", file=sys.stderr)
        return 4
