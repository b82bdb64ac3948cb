"""Command-line front end: parameter sweeps, cycles, contours, phase analysis
and the reproduction verifier. Emits CSV or JSON with fixed formatting so
identical configs produce byte-identical files.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 verification
mismatch. Errors print a single machine-parsable line `error_code: detail`
to stderr. PTCYCLE_NUM_THREADS caps grid-evaluation parallelism (0 or unset
selects automatic, which is serial for this CPU-bound pure-Python work).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from . import cycles, phase, thermo, verify
from .errors import PtcycleError
from .numerics import DEFAULT_CONFIG, NumericsConfig, Plane, trace_level_set
from .spectrum import ModelParams, TimeDependence, split_at_time, static_split
from .thermo import EvalDomain, entropy

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

_PLANES = {"lambda-t": Plane.LAMBDA_T, "nu-t": Plane.NU_T, "time-t": Plane.TIME_T}


class ConfigError(Exception):
    pass


def _fmt(x: float, precision: int) -> str:
    return f"%.{precision}g" % x


def _round_floats(obj, precision: int):
    if isinstance(obj, float):
        return float(_fmt(obj, precision))
    if isinstance(obj, dict):
        return {k: _round_floats(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, precision) for v in obj]
    return obj


def _write_out(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:  # LF endings on every platform
            fh.write(text)


def _emit_csv(header: str, rows, path: Optional[str], precision: int) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(_fmt(v, precision) if isinstance(v, float) else str(v)
                              for v in row))
    _write_out("\n".join(lines) + "\n", path)


def _emit_json(obj, path: Optional[str], precision: int) -> None:
    text = json.dumps(_round_floats(obj, precision), indent=2) + "\n"
    _write_out(text, path)


def _num_threads() -> int:
    raw = os.environ.get("PTCYCLE_NUM_THREADS", "")
    if raw.strip() == "":
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"PTCYCLE_NUM_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ConfigError("PTCYCLE_NUM_THREADS must be >= 0")
    return n if n > 0 else 1  # auto: serial (pure-Python math gains nothing)


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    allowed = {"model", "time", "numerics", "output"}
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _merged(args, cfg: dict, section: str, key: str, flag_value, default=None):
    """Flag > config file > default."""
    if flag_value is not None:
        return flag_value
    return cfg.get(section, {}).get(key, default)


def _model_from(args, cfg: dict) -> ModelParams:
    N = _merged(args, cfg, "model", "N", args.N)
    nu = _merged(args, cfg, "model", "nu", args.nu)
    lam = _merged(args, cfg, "model", "lambda", getattr(args, "lambda_"))
    missing = [n for n, v in (("--N", N), ("--nu", nu), ("--lambda", lam)) if v is None]
    if missing:
        raise ConfigError(f"missing model parameters: {', '.join(missing)}")
    try:
        return ModelParams(N=int(N), nu=float(nu), lam=float(lam))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _time_from(args, cfg: dict) -> TimeDependence:
    c1 = _merged(args, cfg, "time", "c1", getattr(args, "c1", None))
    c2 = _merged(args, cfg, "time", "c2", getattr(args, "c2", None), 0.0)
    if c1 is None:
        raise ConfigError("missing --c1")
    try:
        return TimeDependence(c1=float(c1), c2=float(c2))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _numerics_from(cfg: dict) -> NumericsConfig:
    section = cfg.get("numerics", {})
    try:
        return NumericsConfig(**section) if section else DEFAULT_CONFIG
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad numerics config: {exc}") from exc


def _output_params(args, cfg: dict):
    out = _merged(args, cfg, "output", "path", args.out)
    fmt = _merged(args, cfg, "output", "format", args.format, "csv")
    precision = int(_merged(args, cfg, "output", "precision", args.precision, 9))
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    if not 6 <= precision <= 17:
        raise ConfigError(f"precision must be in [6, 17], got {precision}")
    return out, fmt, precision


# --- subcommands ---------------------------------------------------------------

def cmd_thermo(args, cfg) -> int:
    model = _model_from(args, cfg)
    out, fmt, precision = _output_params(args, cfg)
    if args.steps < 1 or args.tmin <= 0 or (args.steps > 1 and args.tmax <= args.tmin):
        raise ConfigError("need steps >= 1, tmin > 0 and tmax > tmin")
    if args.steps == 1:
        Ts = [args.tmin]
    else:
        Ts = [args.tmin + (args.tmax - args.tmin) * i / (args.steps - 1)
              for i in range(args.steps)]

    def one(T: float):
        pt = thermo.thermo_point(T, model)
        return (pt.T, pt.Z, pt.F, pt.U, pt.S, pt.p)

    workers = _num_threads()
    try:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(one, Ts))  # map preserves order
        else:
            rows = [one(T) for T in Ts]
    except PtcycleError as exc:
        raise PtcycleError(f"thermo sweep failed: {exc}") from exc
    if fmt == "json":
        _emit_json([dict(zip(("T", "Z", "F", "U", "S", "p"), r)) for r in rows],
                   out, precision)
    else:
        _emit_csv("T,Z,F,U,S,p", rows, out, precision)
    return EXIT_OK


def _cycle_kind(name: str) -> cycles.CycleKind:
    try:
        return cycles.CycleKind(name)
    except ValueError as exc:
        raise ConfigError(f"unknown cycle kind {name!r}") from exc


def cmd_cycle(args, cfg) -> int:
    out, _fmt_ignored, precision = _output_params(args, cfg)
    kind = _cycle_kind(args.kind)
    ncfg = _numerics_from(cfg)
    kwargs = dict(T1=args.T1, T2=args.T2, nu=args.nu, N=args.N, cfg=ncfg)
    if None in (args.T1, args.T2, args.nu, args.N):
        raise ConfigError("cycle needs --T1 --T2 --nu --N")
    if kind is cycles.CycleKind.CARNOT_SYMMETRIC:
        if args.s1 is None or args.s2 is None:
            raise ConfigError("carnot-symmetric needs --s1 and --s2")
        kwargs.update(S1=args.s1, S2=args.s2)
    else:
        if getattr(args, "lambda1") is None:
            raise ConfigError(f"{args.kind} needs --lambda1")
        kwargs.update(lam1=args.lambda1)
        if args.lambda2 is not None:
            kwargs.update(lam2=args.lambda2)
        elif args.lambda2_bracket is not None:
            kwargs.update(lambda2_bracket=_pair(args.lambda2_bracket),
                          target_S2=args.target_s2)
        else:
            raise ConfigError("need --lambda2 or --lambda2-bracket")
    report = cycles.build_cycle(kind, **kwargs)
    obj = {
        "kind": kind.value,
        "points": [{"label": p.label, "T": p.T, "lambda": p.lam, "nu": p.nu,
                    "S": p.S, "U": p.U} for p in report.points],
        "steps": [{"from": s.from_label, "to": s.to_label, "kind": s.kind.value,
                   "dQ": s.dQ, "dW": s.dW, "dU": s.dU} for s in report.steps],
        "totals": {"Q": report.loop_Q, "W": report.loop_W, "U": report.loop_U},
        "efficiency": report.efficiency,
        "path": report.path_label.value,
    }
    _emit_json(obj, out, precision)
    return EXIT_OK


def _pair(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"expected LO,HI pair, got {text!r}")
    return (float(parts[0]), float(parts[1]))


def _quad(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise ConfigError(f"expected X0,X1,Y0,Y1 window, got {text!r}")
    return tuple(float(p) for p in parts)


def cmd_contour(args, cfg) -> int:
    out, _f, precision = _output_params(args, cfg)
    plane = _PLANES.get(args.plane)
    if plane is None:
        raise ConfigError(f"plane must be one of {sorted(_PLANES)}")
    ncfg = _numerics_from(cfg)
    window = _quad(args.window)
    N = int(_merged(args, cfg, "model", "N", args.N))
    nu = _merged(args, cfg, "model", "nu", args.nu)

    if plane is Plane.LAMBDA_T:
        if nu is None:
            raise ConfigError("lambda-t plane needs --nu")
        f = lambda lam, T: entropy(
            EvalDomain(static_split(ModelParams(N, nu, lam)), T))
    elif plane is Plane.NU_T:
        lam = _merged(args, cfg, "model", "lambda", args.lambda_)
        if lam is None:
            raise ConfigError("nu-t plane needs --lambda")
        f = lambda nu_x, T: entropy(
            EvalDomain(static_split(ModelParams(N, nu_x, lam)), T))
    else:
        lam = _merged(args, cfg, "model", "lambda", args.lambda_)
        if nu is None or lam is None:
            raise ConfigError("time-t plane needs --nu and --lambda")
        td = _time_from(args, cfg)
        model = ModelParams(N, nu, lam)
        f = lambda t, T: entropy(EvalDomain(split_at_time(t, model, td), T))

    def safe(x, y):
        try:
            return f(x, y)
        except PtcycleError:
            return float("nan")

    contour = trace_level_set(safe, args.level, window, args.resolution,
                              ncfg, plane=plane)
    rows = [(i, x, y) for i, line in enumerate(contour.polylines)
            for (x, y) in line]
    if not rows:
        print("warning: contour is empty", file=sys.stderr)
    _emit_csv("polyline_id,x,y", rows, out, precision)
    return EXIT_OK


def cmd_phase(args, cfg) -> int:
    out, _f, precision = _output_params(args, cfg)
    ncfg = _numerics_from(cfg)
    N = _merged(args, cfg, "model", "N", args.N)
    nu = _merged(args, cfg, "model", "nu", args.nu)
    if None in (N, nu) or args.T is None:
        raise ConfigError("phase needs --T --nu --N")
    regions = phase.phase_regions(args.T, nu, int(N), args.branch, cfg=ncfg)
    obj = {
        "T": regions.T,
        "zeros": list(regions.zeros),
        "binodal": list(regions.binodal),
        "spinodal": list(regions.spinodal),
        "maxwell_pressure": regions.maxwell_pressure,
        "f_het": regions.f_het,
    }
    _emit_json(obj, out, precision)
    return EXIT_OK


def cmd_isentrope(args, cfg) -> int:
    out, _f, precision = _output_params(args, cfg)
    ncfg = _numerics_from(cfg)
    N = int(_merged(args, cfg, "model", "N", args.N))
    if args.vary == "nu":
        lam = _merged(args, cfg, "model", "lambda", args.lambda_)
        if lam is None or args.nu_guess is None:
            raise ConfigError("isentrope --vary nu needs --lambda and --nu-guess")
        path = cycles.trace_isentrope_nu(args.level, lam, N, args.tfrom,
                                         args.tto, args.steps, args.nu_guess, ncfg)
        header = "T,nu"
    else:
        nu = _merged(args, cfg, "model", "nu", args.nu)
        if nu is None or args.lambda_window is None:
            raise ConfigError("isentrope --vary lambda needs --nu and --lambda-window")
        path = cycles.trace_isentrope_lambda(args.level, nu, N, args.tfrom,
                                             args.tto, args.steps,
                                             _pair(args.lambda_window), ncfg)
        header = "T,lambda"
    _emit_csv(header, path.samples, out, precision)
    return EXIT_OK


def cmd_verify(args, cfg) -> int:
    report = verify.run_all()
    for line in report.lines:
        print(line)
    print(report.summary)
    return EXIT_OK if report.ok else EXIT_VERIFY


# --- argument parsing ------------------------------------------------------------

def _add_common(sp):
    sp.add_argument("--config", help="JSON config file mirroring the run options")
    sp.add_argument("--out", help="output path (default: stdout)")
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--precision", type=int)


def _add_model(sp, with_time=False):
    sp.add_argument("--N", type=int)
    sp.add_argument("--nu", type=float)
    sp.add_argument("--lambda", dest="lambda_", type=float)
    if with_time:
        sp.add_argument("--c1", type=float)
        sp.add_argument("--c2", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ptcycle",
        description="Thermodynamics, heat cycles and phase structure of a "
                    "PT-symmetric boson-bath model (hbar = k_B = 1)")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("thermo", help="sweep T and tabulate Z, F, U, S, p")
    _add_model(sp)
    sp.add_argument("--tmin", type=float, required=True)
    sp.add_argument("--tmax", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    _add_common(sp)
    sp.set_defaults(fn=cmd_thermo)

    sp = sub.add_parser("cycle", help="construct a cycle and report its budget")
    sp.add_argument("--kind", required=True,
                    choices=[k.value for k in cycles.CycleKind])
    sp.add_argument("--T1", type=float)
    sp.add_argument("--T2", type=float)
    sp.add_argument("--nu", type=float)
    sp.add_argument("--N", type=int)
    sp.add_argument("--lambda1", type=float)
    sp.add_argument("--lambda2", type=float)
    sp.add_argument("--lambda2-bracket", dest="lambda2_bracket",
                    help="LO,HI bracket to derive lambda2")
    sp.add_argument("--target-s2", dest="target_s2", type=float,
                    help="entropy level selecting among bracket roots")
    sp.add_argument("--s1", type=float, help="lower entropy level (symmetric kind)")
    sp.add_argument("--s2", type=float, help="upper entropy level (symmetric kind)")
    _add_common(sp)
    sp.set_defaults(fn=cmd_cycle)

    sp = sub.add_parser("contour", help="extract a constant-entropy contour")
    _add_model(sp, with_time=True)
    sp.add_argument("--plane", required=True, choices=sorted(_PLANES))
    sp.add_argument("--level", type=float, required=True)
    sp.add_argument("--window", required=True, help="X0,X1,Y0,Y1")
    sp.add_argument("--resolution", type=int, default=201)
    _add_common(sp)
    sp.set_defaults(fn=cmd_contour)

    sp = sub.add_parser("phase", help="Maxwell construction for one isotherm")
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--nu", type=float)
    sp.add_argument("--N", type=int)
    sp.add_argument("--branch", type=int, default=1)
    _add_common(sp)
    sp.set_defaults(fn=cmd_phase)

    sp = sub.add_parser("isentrope", help="trace a constant-entropy path")
    sp.add_argument("--vary", required=True, choices=("nu", "lambda"))
    sp.add_argument("--level", type=float, required=True)
    sp.add_argument("--tfrom", type=float, required=True)
    sp.add_argument("--tto", type=float, required=True)
    sp.add_argument("--steps", type=int, default=65)
    sp.add_argument("--nu-guess", dest="nu_guess", type=float)
    sp.add_argument("--lambda-window", dest="lambda_window", help="LO,HI")
    _add_model(sp)
    _add_common(sp)
    sp.set_defaults(fn=cmd_isentrope)

    sp = sub.add_parser("verify", help="run the reference-value verification suite")
    _add_common(sp)
    sp.set_defaults(fn=cmd_verify)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return args.fn(args, cfg)
    except ConfigError as exc:
        print(f"config_error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PtcycleError as exc:
        print(f"numerical_error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"config_error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
