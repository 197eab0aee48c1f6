"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 unstable operating point,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bath_spectrum import FlatOccupation, OccupationSpectrum, OhmicMatchedOccupation, TabulatedOccupation
from .detection import count_peaks, heterodyne_spectrum, homodyne_spectrum
from .energy_cooling import cooling_map
from .errors import ConfigError, DomainError, InstabilityError, OptomechError
from .fluctuation_spectra import auto_grid, lyapunov_moments, moment_integrals, spectrum_table
from .optomech_linear import operating_point, self_consistent_detuning
from .oscillator_markov import equilibrium_moments
from .params import PRESETS, SystemParams, ThermalEnv, ZERO_TEMPERATURE, load_config, parse_frequency, planck_occupation
from .pole_analysis import (
    PoleSet,
    critical_cavity_decay,
    poles_approximate,
    poles_exact_resonant,
    poles_numeric,
)
from .selftest import run_selftest

EXIT_OK, EXIT_CONFIG, EXIT_UNSTABLE, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _freq(text: str) -> float:
    try:
        return parse_frequency(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


@dataclass(frozen=True)
class GridSpec:
    """``min:max:n`` with optional ``:log`` spacing; ends accept the ``hz`` suffix."""

    lo: float
    hi: float
    n: int
    log: bool = False

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        log = len(parts) == 4 and parts[3].lower() == "log"
        if len(parts) != 3 and not log:
            raise ConfigError(f"grid must be min:max:n[:log], got {text!r}")
        lo, hi = parse_frequency(parts[0]), parse_frequency(parts[1])
        try:
            n = int(parts[2])
        except ValueError:
            raise ConfigError(f"grid size must be an integer, got {parts[2]!r}") from None
        if n < 2 or not lo < hi:
            raise ConfigError(f"grid needs n >= 2 and min < max, got {text!r}")
        if log and lo <= 0:
            raise ConfigError("log grids need a positive lower end")
        return cls(lo, hi, n, log)

    def values(self) -> np.ndarray:
        return np.geomspace(self.lo, self.hi, self.n) if self.log else np.linspace(self.lo, self.hi, self.n)


def _base_params(args) -> SystemParams:
    try:
        return _build_params(args)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _build_params(args) -> SystemParams:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        params = load_config(args.config)
    else:
        name = args.preset or "P0"
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
        params = PRESETS[name]()
    if args.gamma_c is not None:
        params = params.with_cavity_decay(args.gamma_c)
    if args.power is not None:
        params = params.with_power(args.power)
    if args.temperature is not None:
        params = params.with_env(ZERO_TEMPERATURE if args.temperature == 0
                                 else ThermalEnv.from_temperature(args.temperature))
    return params


def _detuning(args, params: SystemParams) -> float:
    text = args.delta
    if text is None or text == "self":
        roots = self_consistent_detuning(params)
        return next(r.detuning for r in roots if r.primary)
    if text == "omega_m":
        return params.mech.damped_frequency
    return parse_frequency(text)


def _occupation(args, params: SystemParams) -> OccupationSpectrum:
    text = args.spectrum or "flat"
    kind, _, arg = text.partition(":")
    if kind == "flat":
        value = float(arg) if arg else planck_occupation(params.env, params.mech.damped_frequency)
        return FlatOccupation(value)
    if kind == "ohmic":
        return OhmicMatchedOccupation(params.mech, params.env)
    if kind == "tabulated":
        if not arg:
            raise ConfigError("tabulated spectrum needs a CSV path: tabulated:PATH")
        return TabulatedOccupation.from_csv(arg)
    raise ConfigError(f"unknown spectrum {text!r} (flat[:N], ohmic, tabulated:PATH)")


def _emit(text: str, output: str | None, out=sys.stdout) -> None:
    if output:
        Path(output).write_text(text)
    else:
        out.write(text)


def _sweep(text: str | None):
    if not text:
        return None
    key, _, spec = text.partition("=")
    if key != "gamma_c":
        raise ConfigError(f"only gamma_c can be swept, got {key!r}")
    return GridSpec.parse(spec).values()


def _suffixed(output: str | None, index: int) -> str | None:
    if not output:
        return None
    path = Path(output)
    return str(path.with_name(f"{path.stem}_{index:03d}{path.suffix}"))


def _header(params: SystemParams, **extra) -> str:
    items = params.describe() | extra
    return "# params: " + ";".join(f"{k}={v}" for k, v in items.items()) + "\n"


def _cmd_equilibrium(args, params, out):
    spec = _occupation(args, params)
    dl = _detuning(args, params)
    op = _op(args, params, dl, spec)
    lines = [_header(params, detuning_rad_s=dl), "quantity,method,value\n"]
    n = planck_occupation(params.env, params.mech.damped_frequency)
    free = equilibrium_moments(params.mech, n)
    rows = [("q2", "uncoupled", free.q2), ("p2", "uncoupled", free.p2), ("qp_sym", "uncoupled", free.qp_sym)]
    if not op.stable:
        raise InstabilityError(_instability_text(op))
    coupled = moment_integrals(op, spec)
    rows += [("q2", "quadrature", coupled.q2), ("p2", "quadrature", coupled.p2),
             ("qp_sym", "quadrature", coupled.qp_sym), ("mean_q", "static", coupled.mean_q)]
    if spec.is_flat:
        lyap = lyapunov_moments(op)
        rows += [("q2", "lyapunov", lyap.q2), ("p2", "lyapunov", lyap.p2), ("qp_sym", "lyapunov", lyap.qp_sym)]
    lines += [f"{k},{m},{v:.12e}\n" for k, m, v in rows]
    _emit("".join(lines), args.output, out)


def _grid_or_auto(args, op):
    if args.grid in (None, "auto"):
        return auto_grid(op, symmetric=True)
    return GridSpec.parse(args.grid).values()


def _cmd_spectra(args, params, out):
    spec = _occupation(args, params)
    op = _stable_point(args, params, spec)
    table = spectrum_table(op, _grid_or_auto(args, op), spec)
    _emit(table.to_csv(), args.output, out)


def _pole_lines(label: str, poles: PoleSet) -> list[str]:
    return [f"{label},{poles.method.value},{poles.branch or ''},{poles.gamma_m:.12e},{poles.gamma_c:.12e},"
            f"{poles.omega_eff:.12e},{poles.delta_eff:.12e}\n"]


def _cmd_poles(args, params, out):
    dl = _detuning(args, params)
    op = _op(args, params, dl)
    lines = [_header(params, detuning_rad_s=dl, coupling_rad_s=op.coupling),
             "label,method,branch,gamma_m_eff,gamma_c_eff,omega_eff,delta_eff\n"]
    lines += _pole_lines("numeric", poles_numeric(op.char_poly))
    if args.delta == "omega_m":
        lines += _pole_lines("exact", poles_exact_resonant(params, op.coupling))
    try:
        lines += _pole_lines("approximate", poles_approximate(params, dl, op.coupling))
    except OptomechError as exc:
        lines.append(f"approximate,unavailable,{type(exc).__name__},,,,\n")
    _emit("".join(lines), args.output, out)
    if not op.stable:
        raise InstabilityError(_instability_text(op))


def _op(args, params, detuning, spec=None):
    return operating_point(params, detuning, spec, coupling=args.coupling)


def _instability_text(op) -> str:
    s = op.stability
    return (f"unstable at detuning {op.detuning:.6e} rad/s: {s.criterion} "
            f"lhs={s.lhs:.6e} rhs={s.rhs:.6e} margin={s.margin:.6e}")


def _stable_point(args, params, spec=None):
    op = _op(args, params, _detuning(args, params), spec)
    if not op.stable:
        raise InstabilityError(_instability_text(op))
    return op


def _cmd_stability(args, params, out):
    dl = _detuning(args, params)
    op = _op(args, params, dl)
    s = op.stability
    text = _header(params, detuning_rad_s=dl, coupling_rad_s=op.coupling)
    text += "stable,criterion,lhs,rhs,margin\n"
    text += f"{int(s.stable)},{s.criterion},{s.lhs:.12e},{s.rhs:.12e},{s.margin:.12e}\n"
    try:
        text += f"# critical_gamma_c_rad_s={critical_cavity_decay(params):.12e}\n"
    except OptomechError:
        pass
    _emit(text, args.output, out)
    if not s.stable:
        raise InstabilityError(_instability_text(op))


def _cmd_cooling_map(args, params, out):
    if not args.delta_grid or not args.gamma_c_grid:
        raise ConfigError("cooling-map needs --delta-grid and --gamma-c-grid")
    spec = _occupation(args, params) if args.spectrum else None
    cmap = cooling_map(params, spec, GridSpec.parse(args.delta_grid).values(),
                       GridSpec.parse(args.gamma_c_grid).values(), method=args.method)
    _emit(cmap.to_csv(), args.output, out)
    d, g, c = cmap.argmin()
    print(f"min cooling factor {c:.6e} at delta={d:.6e} gamma_c={g:.6e}", file=sys.stderr)


def _cmd_homodyne(args, params, out):
    spec = _occupation(args, params)
    op = _stable_point(args, params, spec)
    res = homodyne_spectrum(op, spec, args.theta, _grid_or_auto(args, op))
    _emit(res.to_csv(), args.output, out)


def _cmd_heterodyne(args, params, out):
    sweep = _sweep(args.sweep)
    values = [params.cavity.decay] if sweep is None else list(sweep)
    for i, gc in enumerate(values):
        p = params.with_cavity_decay(gc)
        spec = _occupation(args, p)
        op = _stable_point(args, p, spec)
        offsets = _grid_or_auto(args, op)
        res = heterodyne_spectrum(op, spec, args.laser_omega0, offsets, args.kappa, offsets=True)
        window = (res.offsets > 0) & (res.offsets < 2 * op.damped_frequency)
        peaks = count_peaks(res.sigma_inel[window]) if np.count_nonzero(window) > 2 else 0
        target = args.output if sweep is None else _suffixed(args.output, i)
        _emit(res.to_csv(), target, out)
        print(f"gamma_c={gc:.6e} peaks={peaks}", file=sys.stderr)


def _cmd_selftest(args, params, out):
    results = run_selftest(params)
    for r in results:
        out.write(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}\n")
    if not all(r.passed for r in results):
        raise _SelftestFailure()


class _SelftestFailure(Exception):
    pass


COMMANDS = {
    "equilibrium": _cmd_equilibrium,
    "spectra": _cmd_spectra,
    "poles": _cmd_poles,
    "stability": _cmd_stability,
    "cooling-map": _cmd_cooling_map,
    "homodyne": _cmd_homodyne,
    "heterodyne": _cmd_heterodyne,
    "selftest": _cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="optomech", description="Linearised optomechanics: spectra, poles, cooling, detection.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    src = common.add_argument_group("parameters")
    src.add_argument("--config", help="key = value parameter file")
    src.add_argument("--preset", help="named parameter set (P0)")
    src.add_argument("--gamma-c", type=_freq, help="cavity decay, rad/s or with hz suffix")
    src.add_argument("--power", type=float, help="laser power in W")
    src.add_argument("--temperature", type=float, help="bath temperature in K (0 for zero temperature)")
    src.add_argument("--delta", help="effective detuning: a frequency, 'omega_m' or 'self' (default)")
    src.add_argument("--coupling", type=_freq, help="override of the effective coupling G")
    src.add_argument("--spectrum", help="flat[:N], ohmic or tabulated:PATH")
    src.add_argument("--grid", help="min:max:n[:log] or 'auto'")
    src.add_argument("--output", "-o", help="output file (default stdout)")
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "cooling-map":
            p.add_argument("--delta-grid", help="detuning grid min:max:n[:log]")
            p.add_argument("--gamma-c-grid", help="cavity decay grid min:max:n[:log]")
            p.add_argument("--method", default="auto", choices=("auto", "approximate", "numeric"))
        if name == "homodyne":
            p.add_argument("--theta", type=float, default=0.0, help="quadrature angle in rad")
        if name == "heterodyne":
            p.add_argument("--kappa", type=_freq, help="detector bandwidth")
            p.add_argument("--laser-omega0", type=_freq, help="laser frequency (default: drive frequency)")
            p.add_argument("--sweep", help="gamma_c=min:max:n[:log]")
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        params = _base_params(args)
        COMMANDS[args.command](args, params, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InstabilityError as exc:
        print(f"unstable: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except _SelftestFailure:
        return EXIT_NUMERIC
    except (OptomechError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main_entry() -> None:
    try:
        code = main()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main_entry()
