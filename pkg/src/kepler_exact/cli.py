"""Command line front end.

Exit codes: 0 success, 2 bad arguments, 3 domain error (escape or
degeneracy; partial output is still written), 4 output failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from typing import Any, Callable, Optional, Sequence

from . import baselines
from .conic import ConicElements, conic_velocity, period
from .core_types import (
    DomainError,
    InvalidArgument,
    KeplerError,
    PhysicalParams,
    PlanarVec,
    SchemeParams,
    SeedData,
    angle_between,
)
from .discrete import (
    VARIANTS,
    fit_alpha_for_period,
    initial_state,
    invariants_at,
    run_trajectory,
    seed_from_conic,
    step,
)
from .oscillator import osc_trajectory
from .report import emit_report, fmt, table_csv, table_json

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 2, 3, 4

DEFAULTS: dict[str, Any] = {
    "phi0": 0.0,
    "alpha": 1.0,
    "m": 1.0,
    "k": 1.0,
    "n_steps": 100,
    "format": "csv",
    "variant": "corrected",
    "revolutions": 100,
    "methods": "exact,rk4,explicit-euler,leapfrog",
    "x0": 1.0,
    "v0": 0.0,
}


class UsageError(Exception):
    pass


def _vec(text: str) -> PlanarVec:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from None
    return PlanarVec(x, y)


def _add(p: argparse.ArgumentParser, flag: str, type: Callable[[str], Any] = float, **kw: Any) -> None:
    # defaults stay None so config-file values can fill in what flags leave out
    p.add_argument(flag, type=type, default=None, **kw)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="flat key=value file; flags override it")
    _add(p, "--output", type=str, help="output path (default: stdout)")
    _add(p, "--format", type=str, choices=("csv", "json"))


def _conic_args(p: argparse.ArgumentParser) -> None:
    _add(p, "--p", help="semi-latus rectum")
    _add(p, "--e", help="eccentricity")
    _add(p, "--phi0", help="perihelion angle [rad]")
    _add(p, "--phi-init", help="polar angle of the first point [rad] (default: phi0)")


def _scheme_args(p: argparse.ArgumentParser) -> None:
    _add(p, "--delta", help="half step angle [rad]")
    _add(p, "--steps-per-rev", type=int, help="sets delta = pi/N")
    _add(p, "--alpha")


def _phys_args(p: argparse.ArgumentParser) -> None:
    _add(p, "--m")
    _add(p, "--k")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kepler-exact", description="Exact discrete Kepler orbits and their diagnostics.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="run the exact discrete scheme")
    _common(sim)
    _conic_args(sim)
    _add(sim, "--r0", type=_vec, help="raw seed first point 'x,y'")
    _add(sim, "--r1", type=_vec, help="raw seed second point 'x,y'")
    _add(sim, "--dt0", help="raw seed first time step")
    _scheme_args(sim)
    _phys_args(sim)
    _add(sim, "--n-steps", type=int)
    _add(sim, "--variant", type=str, choices=VARIANTS)

    osc = sub.add_parser("oscillator", help="exact harmonic oscillator recurrence")
    _common(osc)
    _add(osc, "--x0")
    _add(osc, "--v0")
    _add(osc, "--h", help="time step in (0, pi)")
    _add(osc, "--n-steps", type=int)

    cmp_ = sub.add_parser("compare", help="energy drift of the exact scheme against baselines")
    _common(cmp_)
    _conic_args(cmp_)
    _add(cmp_, "--steps-per-rev", type=int)
    _add(cmp_, "--alpha")
    _phys_args(cmp_)
    _add(cmp_, "--revolutions", type=int)
    _add(cmp_, "--methods", type=str, help="comma list from exact,rk4,explicit-euler,leapfrog")

    fit = sub.add_parser("fit-alpha", help="alpha matching the continuous period")
    _common(fit)
    _conic_args(fit)
    _add(fit, "--steps-per-rev", type=int)
    _phys_args(fit)
    return parser


def _read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def _merge_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> argparse.Namespace:
    sub = next(
        a for a in parser._subparsers._group_actions  # type: ignore[union-attr]
        if isinstance(a, argparse._SubParsersAction)
    ).choices[args.subcommand]
    actions = {a.dest: a for a in sub._actions}
    if args.config:
        try:
            cfg = _read_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        for key, raw in cfg.items():
            if key not in actions or key in ("config", "help"):
                raise UsageError(f"unknown config key {key!r}")
            if getattr(args, key) is None:
                conv = actions[key].type or str
                try:
                    value = conv(raw)
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    raise UsageError(f"bad config value for {key}: {exc}") from None
                if actions[key].choices and value not in actions[key].choices:
                    raise UsageError(f"config value for {key} must be one of {actions[key].choices}")
                setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if key in actions and getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _phys(args: argparse.Namespace) -> PhysicalParams:
    return PhysicalParams(m=args.m, k=args.k)


def _conic(args: argparse.Namespace, phys: PhysicalParams) -> ConicElements:
    if args.p is None or args.e is None:
        raise UsageError("conic input needs --p and --e")
    return ConicElements.from_shape(args.p, args.e, args.phi0, phys)


def _scheme(args: argparse.Namespace, delta_hint: Optional[float] = None) -> SchemeParams:
    delta = getattr(args, "delta", None)
    if delta is not None and args.steps_per_rev is not None:
        raise UsageError("give either --delta or --steps-per-rev, not both")
    if args.steps_per_rev is not None:
        return SchemeParams.from_steps_per_rev(args.steps_per_rev, args.alpha)
    if delta is None:
        if delta_hint is None:
            raise UsageError("need --delta or --steps-per-rev")
        delta = delta_hint
    return SchemeParams(alpha=args.alpha, delta=delta)


def _write(args: argparse.Namespace, data: bytes) -> None:
    if args.output is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(args.output, "wb") as fh:
            fh.write(data)


def cmd_simulate(args: argparse.Namespace) -> int:
    phys = _phys(args)
    conic_given = args.p is not None or args.e is not None
    raw_given = any(v is not None for v in (args.r0, args.r1, args.dt0))
    if conic_given == raw_given:
        raise UsageError("supply exactly one of conic inputs (--p, --e) or raw seed (--r0, --r1, --dt0)")
    if args.n_steps < 0:
        raise UsageError("--n-steps must be >= 0")
    if raw_given:
        if None in (args.r0, args.r1, args.dt0):
            raise UsageError("raw seed needs --r0, --r1 and --dt0")
        hint = None
        if args.r0.norm() > 0 and args.r1.norm() > 0:
            hint = 0.5 * angle_between(args.r0, args.r1)
        scheme = _scheme(args, delta_hint=hint)
        seed = SeedData(args.r0, args.r1, args.dt0)
    else:
        scheme = _scheme(args)
        conic = _conic(args, phys)
        phi_init = conic.phi0 if args.phi_init is None else args.phi_init
        seed = seed_from_conic(conic, phi_init, scheme, phys)
    traj = run_trajectory(seed, scheme, phys, args.n_steps, variant=args.variant)
    _write(args, emit_report(traj, args.format))
    if traj.escaped:
        print(f"kepler-exact: escape: {traj.escape_reason}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_oscillator(args: argparse.Namespace) -> int:
    if args.h is None:
        raise UsageError("--h is required")
    if args.n_steps < 0:
        raise UsageError("--n-steps must be >= 0")
    x0, v0, h = args.x0, args.v0, args.h
    xs = osc_trajectory(x0, x0 * math.cos(h) + v0 * math.sin(h), h, args.n_steps)
    cols = ("n", "t", "x", "x_exact", "abs_error")
    rows = []
    for n, x in enumerate(xs):
        exact = x0 * math.cos(n * h) + v0 * math.sin(n * h)
        rows.append((n, n * h, x, exact, abs(x - exact)))
    max_err = max(r[4] for r in rows)
    if args.format == "csv":
        data = table_csv(cols, rows)
    else:
        data = table_json(cols, rows, max_abs_error=max_err)
    _write(args, data.encode("ascii"))
    return EXIT_OK


def compare_drifts(
    conic: ConicElements,
    n_per_rev: int,
    revolutions: int,
    phys: PhysicalParams,
    methods: Sequence[str] = ("exact", "rk4", "explicit-euler", "leapfrog"),
    alpha: float = 1.0,
    phi_init: Optional[float] = None,
) -> list[tuple[str, int, float, float]]:
    """Per method: ``(name, steps, |E(end) - E(0)|, max |E(n) - E(0)|)``.

    The exact scheme reports its conserved discrete energy; the baselines
    report the continuous energy at a fixed step of one period over
    ``n_per_rev``.
    """
    start = conic.phi0 if phi_init is None else phi_init
    n_steps = n_per_rev * revolutions
    rows = []
    for method in methods:
        if method == "exact":
            scheme = SchemeParams.from_steps_per_rev(n_per_rev, alpha)
            seed = seed_from_conic(conic, start, scheme, phys)
            state = initial_state(seed, scheme, phys)
            e0 = invariants_at(seed.r0, seed.r1, seed.dt0, scheme, phys).E
            worst = 0.0
            e_now = e0
            for _ in range(n_steps):
                prev = state
                state = step(state, scheme, phys)
                e_now = invariants_at(prev.r_curr, state.r_curr, state.dt_prev, scheme, phys).E
                worst = max(worst, abs(e_now - e0))
            rows.append((method, n_steps, abs(e_now - e0), worst))
        elif method in baselines.METHODS:
            dt = period(conic, phys) / n_per_rev
            r0 = PlanarVec.polar(conic.p / (1.0 + conic.e * math.cos(start - conic.phi0)), start)
            s = baselines.PhaseState(r0, conic_velocity(start, conic, phys))
            e0 = baselines.energy_of(s, phys)
            worst = 0.0
            e_now = e0
            for _ in range(n_steps):
                s = baselines.reference_step(method, s, dt, phys)
                e_now = baselines.energy_of(s, phys)
                worst = max(worst, abs(e_now - e0))
            rows.append((method, n_steps, abs(e_now - e0), worst))
        else:
            raise InvalidArgument(f"unknown method {method!r}")
    return rows


def cmd_compare(args: argparse.Namespace) -> int:
    phys = _phys(args)
    conic = _conic(args, phys)
    if conic.e >= 1.0:
        raise DomainError("compare needs a bound orbit (e < 1)")
    if args.steps_per_rev is None:
        raise UsageError("--steps-per-rev is required")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    rows = compare_drifts(
        conic, args.steps_per_rev, args.revolutions, phys, methods, args.alpha, args.phi_init
    )
    cols = ("method", "steps", "energy_drift", "max_energy_drift")
    data = table_csv(cols, rows) if args.format == "csv" else table_json(cols, rows)
    _write(args, data.encode("ascii"))
    return EXIT_OK


def cmd_fit_alpha(args: argparse.Namespace) -> int:
    phys = _phys(args)
    conic = _conic(args, phys)
    if args.steps_per_rev is None:
        raise UsageError("--steps-per-rev is required")
    alpha = fit_alpha_for_period(conic, args.steps_per_rev, phys, args.phi_init)
    scheme = SchemeParams.from_steps_per_rev(args.steps_per_rev, alpha)
    start = conic.phi0 if args.phi_init is None else args.phi_init
    traj = run_trajectory(seed_from_conic(conic, start, scheme, phys), scheme, phys, args.steps_per_rev)
    T = period(conic, phys)
    resim = traj[-1].t
    if args.format == "json":
        data = table_json(
            ("alpha", "period", "resimulated_period", "relative_error"),
            [(alpha, T, resim, abs(resim - T) / T)],
        )
    else:
        data = (
            f"alpha = {fmt(alpha)}\nperiod = {fmt(T)}\n"
            f"resimulated_period = {fmt(resim)}\nrelative_error = {fmt(abs(resim - T) / T)}\n"
        )
    _write(args, data.encode("ascii"))
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "oscillator": cmd_oscillator,
    "compare": cmd_compare,
    "fit-alpha": cmd_fit_alpha,
}


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args = _merge_config(parser, args)
        return COMMANDS[args.subcommand](args)
    except (UsageError, InvalidArgument) as exc:
        print(f"kepler-exact: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, KeplerError) as exc:
        print(f"kepler-exact: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"kepler-exact: output failed: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
