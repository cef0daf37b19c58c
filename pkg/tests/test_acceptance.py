"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (shown in the terminal summary, and inline
with ``-s``) before asserting, so a red criterion still reports its numbers.
"""
import csv
import io
import math
import random
import subprocess
import sys

import pytest

from kepler_exact.cli import compare_drifts
from kepler_exact.conic import ConicElements
from kepler_exact.core_types import PhysicalParams, PlanarVec, SchemeParams, SeedData, angle_between
from kepler_exact.discrete import (
    CORRECTED,
    PRINTED,
    angular_momentum_direct,
    fit_alpha_for_period,
    initial_state,
    run_trajectory,
    seed_from_conic,
    step,
    radial_oscillator_residuals,
    u_transform,
)
from kepler_exact.oscillator import osc_exactness_deviation

PHYS = PhysicalParams()
SCHEME_12 = SchemeParams(1.0, math.pi / 12)

# frozen from 30-digit mpmath evaluations
ALPHA_CIRC6 = 1.26627083505867919
T_E05 = 9.67359660924916187
# figures as quoted in the requirements; they disagree with the values above
QUOTED_ALPHA_CIRC6 = 1.2662773
QUOTED_T_E05 = 9.6736602


@pytest.fixture(scope="module")
def long_run():
    seed = seed_from_conic(ConicElements.from_shape(1.0, 0.6), 0.0, SCHEME_12, PHYS)
    return run_trajectory(seed, SCHEME_12, PHYS, 100_000)


def _drifts(traj):
    i0 = traj[0].inv
    dl = max(abs(s.inv.L_z - i0.L_z) for s in traj) / abs(i0.L_z)
    de = max(abs(s.inv.E - i0.E) for s in traj) / abs(i0.E)
    a0 = i0.A.norm()
    da = max(max(abs(s.inv.A.x - i0.A.x), abs(s.inv.A.y - i0.A.y)) for s in traj) / a0
    return dl, de, da


def test_c01_oscillator_exactness(verdict):
    worst = max(
        osc_exactness_deviation(x0, v0, h, 10_000)
        for h in (0.01, 0.1, math.pi / 5, 1.0)
        for x0 in (0.0, 1.0, 0.3)
        for v0 in (0.0, -1.2)
    )
    assert verdict("criterion 1 oscillator exactness", worst <= 1e-9, f"max deviation {worst:.3g} (bound 1e-9)")


def test_c02_discrete_conservation(verdict, long_run):
    dl, de, da = _drifts(long_run)
    ok = len(long_run) == 100_001 and dl <= 1e-11 and de <= 1e-10 and da <= 1e-10
    detail = f"10^5 steps, drift L {dl:.3g}, E {de:.3g}, A {da:.3g} (bounds 1e-11, 1e-10, 1e-10)"
    assert verdict("criterion 2 discrete conservation", ok, detail)


def _random_raw_seeds(count, rng):
    d = SCHEME_12.cap_delta
    for _ in range(count):
        r0, r1 = rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0)
        phi, sense = rng.uniform(-math.pi, math.pi), rng.choice((1.0, -1.0))
        yield SeedData(PlanarVec.polar(r0, phi), PlanarVec.polar(r1, phi + sense * d), rng.uniform(0.01, 2.0))


def test_c03_orbit_membership(verdict, long_run):
    worst_long = max(s.orbit_residual for s in long_run)
    worst_raw, escaped = 0.0, 0
    for seed in _random_raw_seeds(20, random.Random(20240603)):
        assert abs(angle_between(seed.r0, seed.r1) - SCHEME_12.cap_delta) <= 1e-12
        traj = run_trajectory(seed, SCHEME_12, PHYS, 10_000)
        escaped += traj.escaped
        worst_raw = max(worst_raw, max(s.orbit_residual for s in traj))
    ok = worst_long <= 1e-10 and worst_raw <= 1e-10
    detail = (
        f"long run {worst_long:.3g}, 20 raw seeds {worst_raw:.3g} "
        f"({escaped} unbound, checked up to escape) (bound 1e-10)"
    )
    assert verdict("criterion 3 orbit membership", ok, detail)


def _conic_error(traj, conic):
    return max(
        abs(s.radius * (1.0 + conic.e * math.cos(s.phi - conic.phi0)) - conic.p) / conic.p for s in traj
    )


def test_c04_exactness_conditions(verdict):
    parts = []
    for e in (0.0, 0.3, 0.6, 0.9):
        conic = ConicElements.from_shape(1.0, e)
        traj = run_trajectory(seed_from_conic(conic, 0.0, SCHEME_12, PHYS), SCHEME_12, PHYS, 2_000)
        parts.append((f"e={e}", _conic_error(traj, conic), not traj.escaped))
    parab = ConicElements.from_shape(1.0, 1.0)
    start = -math.radians(147.0)
    traj = run_trajectory(seed_from_conic(parab, start, SCHEME_12, PHYS), SCHEME_12, PHYS, 10)
    parts.append(("e=1 (147 deg to 153 deg)", _conic_error(traj, parab), not traj.escaped))
    hyp = ConicElements.from_shape(1.0, 1.5)
    traj = run_trajectory(seed_from_conic(hyp, -math.radians(120.0), SCHEME_12, PHYS), SCHEME_12, PHYS, 1_000)
    parts.append((f"e=1.5 ({len(traj)} points)", _conic_error(traj, hyp), traj.escaped))
    ok = all(err <= 1e-10 and good for _, err, good in parts)
    detail = ", ".join(f"{name} {err:.2g}" for name, err, _ in parts) + " (bound 1e-10)"
    assert verdict("criterion 4 exactness conditions", ok, detail)


def test_c05_structural_identities(verdict):
    seeds = [seed_from_conic(ConicElements.from_shape(1.0, 0.6), 0.0, SCHEME_12, PHYS)]
    for raw in _random_raw_seeds(200, random.Random(7)):
        if len(seeds) == 6:
            break
        if not run_trajectory(raw, SCHEME_12, PHYS, 2_000).escaped:
            seeds.append(raw)
    w_ratio = w_bis = w_law = w_rec = w_15 = w_16 = w_l = 0.0
    c2 = 2.0 * math.cos(SCHEME_12.cap_delta)
    for seed in seeds:
        states = [initial_state(seed, SCHEME_12, PHYS)]
        traj = run_trajectory(seed, SCHEME_12, PHYS, 2_000)
        for _ in range(len(traj) - 2):
            states.append(step(states[-1], SCHEME_12, PHYS))
        r0, r1 = seed.r0.norm(), seed.r1.norm()
        for prev, cur in zip(states, states[1:]):
            r_prev, r_n, r_next = prev.r_prev, prev.r_curr, cur.r_curr
            lhs = r_next.norm() * prev.dt_prev
            w_ratio = max(w_ratio, abs(lhs - r_prev.norm() * cur.dt_prev) / lhs)
            hat = lambda v: v * (1.0 / v.norm())  # noqa: E731
            w_bis = max(w_bis, (hat(r_next) + hat(r_prev) - hat(r_n) * c2).norm())
            law = r_n.norm() * r_prev.norm() * seed.dt0
            w_law = max(w_law, abs(law - r1 * r0 * prev.dt_prev) / law)
        u = [u_transform(s.radius, traj.orbit, SCHEME_12) for s in traj]
        rec, s15, s16 = radial_oscillator_residuals(u, SCHEME_12)
        w_rec, w_15, w_16 = max(w_rec, rec), max(w_15, s15), max(w_16, s16)
        for a, b in zip(traj.samples, traj.samples[1:]):
            direct = angular_momentum_direct(a.r, b.r, a.dt, SCHEME_12, PHYS)
            w_l = max(w_l, abs(a.inv.L_z - direct) / abs(direct))
    ok = len(seeds) == 6 and max(w_ratio, w_bis, w_law, w_l) <= 1e-12 and max(w_15, w_16) <= 1e-11
    detail = (
        f"e=0.6 seed and 5 bound raw seeds, 2000 steps: radius ratio {w_ratio:.2g}, bisector {w_bis:.2g}, time-step law {w_law:.2g}, "
        f"L forms {w_l:.2g} (bound 1e-12); energy-form spreads {w_15:.2g}, {w_16:.2g} (bound 1e-11); "
        f"u recurrence {w_rec:.2g}"
    )
    assert verdict("criterion 5 structural identities", ok, detail)


def test_c06_cos_delta_arbitration(verdict):
    scheme = SchemeParams(1.0, math.pi / 6)
    seed = seed_from_conic(ConicElements.from_shape(1.0, 0.0), 0.0, scheme, PHYS)
    drift = {}
    for variant in (PRINTED, CORRECTED):
        traj = run_trajectory(seed, scheme, PHYS, 100, variant=variant)
        drift[variant] = max(abs(s.inv.E - traj[0].inv.E) for s in traj)
    ok = drift[PRINTED] > 1e-3 and drift[CORRECTED] <= 1e-12
    detail = f"100 steps, printed-form energy drift {drift[PRINTED]:.3g} (> 1e-3), corrected {drift[CORRECTED]:.3g} (<= 1e-12)"
    assert verdict("criterion 6 cos(Delta) arbitration", ok, detail)


def _resimulated_period(conic, n, alpha):
    scheme = SchemeParams.from_steps_per_rev(n, alpha)
    traj = run_trajectory(seed_from_conic(conic, conic.phi0, scheme, PHYS), scheme, PHYS, n)
    return traj[-1].t


def test_c07_period_fit(verdict):
    circ, ell = ConicElements.from_shape(1.0, 0.0), ConicElements.from_shape(1.0, 0.5)
    a6 = fit_alpha_for_period(circ, 6, PHYS)
    t6 = _resimulated_period(circ, 6, a6)
    e6 = abs(t6 - 2 * math.pi) / (2 * math.pi)
    t12 = _resimulated_period(ell, 12, fit_alpha_for_period(ell, 12, PHYS))
    e12 = abs(t12 - T_E05) / T_E05
    a360 = fit_alpha_for_period(circ, 360, PHYS)
    ok = abs(a6 - ALPHA_CIRC6) <= 1e-6 and e6 <= 1e-10 and e12 <= 1e-9 and abs(a360 - 1.0) <= 1e-3
    detail = (
        f"alpha(N=6) {a6:.10f} vs {ALPHA_CIRC6:.10f}; circle period error {e6:.2g}; "
        f"e=0.5 N=12 period {t12:.10f} vs {T_E05:.10f} (rel {e12:.2g}); alpha(N=360) {a360:.7f}; "
        f"quoted {QUOTED_ALPHA_CIRC6} and {QUOTED_T_E05} are off by {a6 - QUOTED_ALPHA_CIRC6:.2g} and "
        f"{(t12 - QUOTED_T_E05) / QUOTED_T_E05:.2g} rel, see test_c07_quoted_*"
    )
    assert verdict("criterion 7 period fit", ok, detail)


@pytest.mark.xfail(strict=True, reason="quoted alpha disagrees with the 30-digit evaluation by 6.5e-6")
def test_c07_quoted_alpha():
    assert abs(fit_alpha_for_period(ConicElements.from_shape(1.0, 0.0), 6, PHYS) - QUOTED_ALPHA_CIRC6) <= 1e-6


@pytest.mark.xfail(strict=True, reason="quoted period disagrees with the closed form and quadrature by 6.6e-6 rel")
def test_c07_quoted_period():
    ell = ConicElements.from_shape(1.0, 0.5)
    t12 = _resimulated_period(ell, 12, fit_alpha_for_period(ell, 12, PHYS))
    assert abs(t12 - QUOTED_T_E05) / QUOTED_T_E05 <= 1e-9


def _revolution_time_error(n):
    return abs(_resimulated_period(ConicElements.from_shape(1.0, 0.0), n, 1.0) - 2 * math.pi) / (2 * math.pi)


def test_c08_continuum_order(verdict):
    e24, e48 = _revolution_time_error(24), _revolution_time_error(48)
    order = math.log2(e24 / e48)
    detail = f"error {e24:.4g} at pi/24, {e48:.4g} at pi/48, order {order:.4f} (range [1.9, 2.1])"
    assert verdict("criterion 8 continuum order", 1.9 <= order <= 2.1, detail)


def test_c09_baseline_contrast(verdict):
    conic = ConicElements.from_shape(1.0, 0.6)
    rows = {r[0]: r for r in compare_drifts(conic, 24, 1_000, PHYS, ("exact", "rk4", "explicit-euler"))}
    exact = rows["exact"][2]
    # a zero exact drift would make any positive baseline drift infinitely larger
    floor = max(exact, 2.0**-52 * abs(conic.E))
    ratios = {m: rows[m][2] / floor for m in ("rk4", "explicit-euler")}
    ok = all(v >= 1e4 for v in ratios.values())
    detail = (
        f"1000 revolutions at 24 steps: exact {exact:.3g}, rk4 {rows['rk4'][2]:.3g} (x{ratios['rk4']:.2g}), "
        f"explicit-euler {rows['explicit-euler'][2]:.3g} (x{ratios['explicit-euler']:.2g}) (need x1e4)"
    )
    assert verdict("criterion 9 baseline contrast", ok, detail)


def _cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "kepler_exact", *argv], capture_output=True, check=False
    )


def test_c10_determinism_and_formats(verdict):
    runs = [
        ("simulate", "--p", "1", "--e", "0.6", "--steps-per-rev", "24", "--n-steps", "500"),
        ("simulate", "--p", "1", "--e", "0.6", "--steps-per-rev", "24", "--n-steps", "50", "--format", "json"),
        ("simulate", "--p", "1", "--e", "1.5", "--steps-per-rev", "12", "--phi-init", "-2.0", "--n-steps", "50"),
        ("oscillator", "--h", "0.3", "--v0", "-1.2", "--n-steps", "200"),
        ("compare", "--p", "1", "--e", "0.6", "--steps-per-rev", "24", "--revolutions", "5"),
        ("fit-alpha", "--p", "1", "--e", "0.5", "--steps-per-rev", "12"),
    ]
    identical = True
    fields = bad = 0
    for argv in runs:
        a, b = _cli(*argv), _cli(*argv)
        identical &= a.stdout == b.stdout and a.returncode == b.returncode and bool(a.stdout)
        if "--format" in argv or argv[0] == "fit-alpha":
            continue
        lines = [ln for ln in a.stdout.decode("ascii").splitlines() if not ln.startswith("#")]
        for row in list(csv.reader(io.StringIO("\n".join(lines))))[1:]:
            for text in row:
                if text and text[0] not in "abcdefghijklmnopqrstuvwxyz":
                    fields += 1
                    bad += format(float(text), ".17g") != text
    ok = identical and bad == 0 and fields > 0
    detail = f"{len(runs)} commands run twice, byte-identical {identical}; {fields} CSV numbers, {bad} failed round trip"
    assert verdict("criterion 10 determinism and formats", ok, detail)
