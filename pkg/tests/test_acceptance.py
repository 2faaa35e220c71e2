"""Acceptance gates: twelve end-to-end runs with pinned tolerances.

Every test prints one PASS/FAIL line (visible under pytest -rA) with the
worst measured residual and the elapsed time.  Time boxes are part of the
gate: a run that exceeds its box fails even if the residuals are fine.
Inputs are frozen seeds so the numbers are reproducible bit for bit.
"""

import json
import math
import time

import numpy as np

from fermihot import cli, verify
from fermihot.hotbang import (F_z, SeriesSchedule, hotbang_smeared,
                              log_convexity_check, two_point_series_pair)
from fermihot.minkowski import FourVector
from fermihot.quad import QuadConfig
from fermihot.states import (Ordering, StateSpec, anticommutator,
                             kernel_double_smear, two_point,
                             two_point_direct_psi_psibar, weyl_null_check)
from fermihot.testfn import TestFunction, random_family
from fermihot.thermal import (MacroObservable, ThermalIndex, c_coeff,
                              point_split_expectation, point_split_scale,
                              thermal_function, wave_residual)

E0 = FourVector(1.0, 0.0, 0.0, 0.0)
QUAD_FAST = QuadConfig(24, 8, 12, tol=1e-6)
QUAD_REF = QuadConfig(48, 16, 24, tol=1e-8)


def _report(name: str, ok: bool, detail: str) -> bool:
    print(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


def test_a1_ordering_sum_normalization():
    """Sum of orderings telescopes to the anticommutator by construction,
    and the independently quadrature'd sum is beta-independent to 1e-8.

    The psi-psibar slot is built as anticommutator minus psibar-psi, so the
    construction identity is s2 == ac - s1 bit for bit (s1 + s2 == ac would
    additionally demand a double-rounding coincidence).  Beta independence
    cancels node by node, so a coarse grid does not weaken that leg.
    """
    t0 = time.time()
    cfg = QuadConfig(12, 8, 8, tol=1e-6)
    betas = [FourVector(0.5, 0.0, 0.0, 0.0), E0,
             FourVector(1.5, 0.5, 0.0, 0.0),
             FourVector(2.0, 0.3, -0.2, 0.1),
             FourVector(3.0, 0.0, 0.8, 0.0)]
    worst_spread = 0.0
    worst_dev = 0.0
    exact = True
    for i in range(20):
        f = random_family(i, 1, max_terms=2)[0]
        fbar = f.conjugate()
        ac = anticommutator(f, fbar, cfg, order=32)
        indep = []
        for beta in betas:
            kms = StateSpec.kms(beta)
            s1 = two_point(kms, fbar, f, Ordering.PSIBAR_PSI, cfg, order=32)
            s2 = two_point(kms, fbar, f, Ordering.PSI_PSIBAR, cfg, order=32)
            exact = exact and (s2 == ac - s1)
            indep.append(s1 + two_point_direct_psi_psibar(kms, fbar, f, cfg,
                                                          order=32))
        spread = max(abs(a - b) for a in indep for b in indep) / abs(ac)
        worst_spread = max(worst_spread, spread)
        worst_dev = max(worst_dev, max(abs(v - ac) for v in indep) / abs(ac))
    dt = time.time() - t0
    ok = exact and worst_spread <= 1e-8 and dt < 60
    assert _report("A1 ordering-sum normalization", ok,
                   f"construction exact={exact}, beta spread {worst_spread:.2e}"
                   f" <= 1e-8, dev from anticommutator {worst_dev:.2e},"
                   f" {dt:.1f}s < 60s")


def test_a2_hotbang_positivity():
    """600 smeared self-pairings stay above -tail_bound; at least 95%
    strictly positive beyond 1e-10 of the anticommutator scale."""
    t0 = time.time()
    strict = 0
    total = 0
    floor_ok = True
    for i in range(100):
        f = random_family(i, 1, max_terms=2)[0]
        for lam in (0.25, 1.0, 4.0):
            vals = []
            for ordering in Ordering:
                v, b = hotbang_smeared(f, lam, ordering, QUAD_FAST, tol=1e-6)
                floor_ok = floor_ok and v >= -b
                vals.append(v)
            scale = vals[0] + vals[1]
            for v in vals:
                total += 1
                strict += v > 1e-10 * scale
    dt = time.time() - t0
    frac = strict / total
    ok = floor_ok and frac >= 0.95 and dt < 600
    assert _report("A2 hotbang positivity", ok,
                   f"all {total} values >= -bound: {floor_ok}, strict"
                   f" fraction {frac:.3f} >= 0.95, {dt:.1f}s < 600s")


def test_a3_hotbang_ordering_sum():
    """Series assembly of both orderings sums to the anticommutator."""
    t0 = time.time()
    cases = []
    for k in range(5):
        f = random_family(30 + k, 1, max_terms=2)[0]
        cases.append((f.conjugate(), f))
    for k in range(5):
        g, f = random_family(40 + k, 2, max_terms=1,
                             width_range=(0.25, 0.4))
        cases.append((g.conjugate(), f))
    lams = (0.25, 0.7, 1.0, 2.0, 4.0)
    worst = 0.0
    for k, (fbar, f) in enumerate(cases):
        pair = two_point_series_pair(fbar, f,
                                     SeriesSchedule(lam=lams[k % 5], tol=1e-8),
                                     QUAD_FAST)
        total = pair[Ordering.PSIBAR_PSI][0] + pair[Ordering.PSI_PSIBAR][0]
        ac = anticommutator(f, fbar, QUAD_FAST)
        worst = max(worst, abs(total - ac) / abs(ac))
    dt = time.time() - t0
    ok = worst <= 1e-6 and dt < 120
    assert _report("A3 hotbang ordering sum", ok,
                   f"worst rel {worst:.2e} <= 1e-6 on 10 cases,"
                   f" {dt:.1f}s < 120s")


def test_a3prime_kernel_smeared_consistency():
    """Double-smeared normal-ordered kernel reproduces the smeared thermal
    difference; this arbitrates the kernel/smeared convention chain."""
    t0 = time.time()
    kms = StateSpec.kms(FourVector(0.5, 0.0, 0.0, 0.0))
    vac = StateSpec.vacuum()
    worst = 0.0
    for seed in (9, 13, 21):
        f, g = random_family(seed, 2, max_terms=1, width_range=(0.3, 0.45))
        want = (two_point(kms, f, g, Ordering.PSIBAR_PSI, QUAD_REF)
                - two_point(vac, f, g, Ordering.PSIBAR_PSI, QUAD_REF))
        got = kernel_double_smear(kms, f, g, QUAD_FAST, points_per_width=7)
        worst = max(worst, abs(got - want) / abs(want))
    dt = time.time() - t0
    ok = worst <= 1e-3 and dt < 300
    assert _report("A3' kernel/smeared consistency", ok,
                   f"worst rel {worst:.2e} <= 1e-3 on 3 cases,"
                   f" {dt:.1f}s < 300s")


def test_a4_log_convexity():
    t0 = time.time()
    grid = np.linspace(0.1, math.pi - 0.1, 19)
    bad = []
    worst = -math.inf
    for i in range(50):
        f = random_family(i, 1)[0]
        rep = log_convexity_check(f, grid, 0.01, QUAD_FAST)
        worst = max(worst, rep.worst_violation)
        if rep.verdict != "pass":
            bad.append((i, rep.verdict))
    dt = time.time() - t0
    ok = not bad and dt < 300
    assert _report("A4 log-convexity", ok,
                   f"50 bumps x 19 angles, slack 1e-8, worst violation"
                   f" {worst:.2e}, non-pass {bad}, {dt:.1f}s < 300s")


def test_a5_deformed_ray_identity():
    """F(z) continues to z^(3 alpha) F_alpha(z) on the unit circle.

    Profile order 24 is the accuracy optimum here: the two sides share the
    radial cut but not the integrand, and the residual grows with the
    band-limit extent once the transform arguments go complex.
    """
    t0 = time.time()
    cfg = QuadConfig(48, 16, 24, tol=1e-9)
    worst = 0.0
    for seed in (3, 5, 11, 17, 23):
        f = random_family(seed, 1, max_terms=1, width_range=(0.3, 0.45))[0]
        for phi in (0.2, 0.5, 0.9, 1.3, 1.7):
            z = complex(math.cos(phi), math.sin(phi))
            base = F_z(f, z, 0.0, cfg, order=24)
            for alpha in (0.25, 1.0 / 3.0):
                cont = z ** (3 * alpha) * F_z(f, z, alpha, cfg, order=24)
                worst = max(worst, abs(base - cont) / abs(base))
    dt = time.time() - t0
    ok = worst < 1e-8 and dt < 60
    assert _report("A5 deformed ray identity", ok,
                   f"worst rel {worst:.2e} < 1e-8 over 5 bumps x 5 z x"
                   f" 2 alpha, {dt:.1f}s < 60s")


def test_a6_bernoulli_convention_oracle():
    """Point-split route vs closed form at rest.

    Both conventions fit the 16 m=1 pairs up to one global constant (they
    differ by a uniform factor 5 at m=1), so the tiebreak is m=3: the
    classical convention carries a consistent constant there too, while the
    modern one puts the closed form at exactly zero against a clearly
    nonzero split value.  Even-m observables must vanish either way.
    """
    t0 = time.time()
    kms = StateSpec.kms(E0)
    splits = {}
    uncs = {}
    for mu in range(4):
        for nu in range(4):
            idx = ThermalIndex((mu,), nu)
            splits[(mu, nu)], uncs[(mu, nu)] = point_split_expectation(
                kms, E0, idx)
    scale00 = abs(splits[(0, 0)])

    fit = {}
    for conv in ("classical", "modern"):
        ratios = []
        dev = 0.0
        zero_dev = 0.0
        for (mu, nu), s in splits.items():
            closed = thermal_function(ThermalIndex((mu,), nu), E0, conv)
            if closed != 0:
                ratios.append(s / closed)
        k = np.mean(ratios)
        for (mu, nu), s in splits.items():
            closed = thermal_function(ThermalIndex((mu,), nu), E0, conv)
            if closed != 0:
                dev = max(dev, abs(s - k * closed) / abs(k * closed))
            else:
                zero_dev = max(zero_dev, abs(s) /
                               max(10 * uncs[(mu, nu)], 1e-3 * scale00))
        fit[conv] = (k, dev, zero_dev)

    s3, u3 = point_split_expectation(kms, E0, ThermalIndex((0, 0, 0), 0))
    closed3 = thermal_function(ThermalIndex((0, 0, 0), 0), E0, "classical")
    k3 = s3 / closed3
    modern3_zero = thermal_function(ThermalIndex((0, 0, 0), 0), E0, "modern")
    modern_refuted = modern3_zero == 0 and abs(s3) > 100 * u3

    even_ok = True
    for idx in (ThermalIndex((), 0), ThermalIndex((0, 1), 2)):
        s, u = point_split_expectation(kms, E0, idx)
        even_ok = even_ok and abs(s) <= max(10 * u, 1e-6 * scale00)

    k1, dev1, zero1 = fit["classical"]
    dt = time.time() - t0
    ok = (dev1 <= 1e-3 and zero1 <= 1.0
          and abs(k1 - 7.0 / 6.0) <= 1e-3 * (7.0 / 6.0)
          and abs(k3 - 31.0 / 30.0) <= 1e-3 * (31.0 / 30.0)
          and modern_refuted and even_ok and dt < 600)
    assert _report("A6 coefficient convention oracle", ok,
                   f"classical m=1 constant {complex(k1):.6f} (target 7/6),"
                   f" worst rel dev {dev1:.2e} <= 1e-3 over 16 pairs;"
                   f" m=3 constant {complex(k3):.6f} (target 31/30);"
                   f" modern refuted at m=3: {modern_refuted}"
                   f" (split {abs(s3):.3e} vs closed 0, unc {u3:.1e});"
                   f" even-m vanish: {even_ok}; {dt:.1f}s < 600s")


def test_a7_thermal_coincidence():
    t0 = time.time()
    points = [E0, FourVector(1.5, 0.3, 0.0, -0.2),
              FourVector(2.0, 0.0, 0.5, -0.4)]
    worst = 0.0
    bad = []
    for lam in (0.5, 1.0):
        for x in points:
            for idx in (ThermalIndex((0,), 0), ThermalIndex((3,), 3)):
                rep = verify.thermal_coincidence(lam, x, idx)
                worst = max(worst, rep.residuals["relative"])
                if rep.verdict != "pass":
                    bad.append(rep.name)
    dt = time.time() - t0
    ok = not bad and worst < 1e-2 and dt < 600
    assert _report("A7 thermal coincidence", ok,
                   f"worst rel {worst:.2e} < 1e-2 over 2 lam x 3 x x"
                   f" 2 indices, non-pass {bad}, {dt:.1f}s < 600s")


def test_a8_transport():
    t0 = time.time()
    rng = np.random.default_rng(8)
    hb = StateSpec.hotbang(1.0)
    worst = 0.0
    for _ in range(10):
        x = FourVector(rng.uniform(1.0, 2.0), *rng.uniform(-0.4, 0.4, 3))
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        p = FourVector(1.0, *n)
        rep = verify.transport_residual(hb, x, p, step=0.008)
        worst = max(worst, rep.residuals["relative"])
    mix = StateSpec.mixture([(0.4, E0), (0.6, FourVector(2.0, 0.3, 0.0, -0.4))])
    rep = verify.transport_residual(mix, FourVector(1.2, 0.1, 0.0, 0.0),
                                    FourVector(1.0, 0.0, 0.0, 1.0))
    mix_exact = rep.residuals["raw"] == 0.0 and rep.residuals["relative"] == 0.0
    dt = time.time() - t0
    ok = worst < 1e-6 and mix_exact and dt < 60
    assert _report("A8 transport", ok,
                   f"worst normalized residual {worst:.2e} < 1e-6 on 10 rays,"
                   f" mixture exactly zero: {mix_exact}, {dt:.1f}s < 60s")


def test_a9_wave_equations():
    t0 = time.time()
    rng = np.random.default_rng(9)
    worst_beta = 0.0
    for _ in range(10):
        b = FourVector(rng.uniform(0.8, 2.2), *rng.uniform(-0.35, 0.35, 3))
        for m in (1, 3):
            mu = tuple(int(k) for k in rng.integers(0, 4, size=m))
            nu = int(rng.integers(0, 4))
            fn = lambda beta, _idx=ThermalIndex(mu, nu): thermal_function(
                _idx, beta).imag
            worst_beta = max(worst_beta, abs(wave_residual(fn, b, step=0.005)))

    hb = StateSpec.hotbang(1.0)
    x = FourVector(1.5, 0.3, -0.2, 0.4)
    worst_box = 0.0
    bad = []
    for xi in (MacroObservable.t2(), MacroObservable.energy(0, 0)):
        rep = verify.pde_residuals(hb, xi, x)
        worst_box = max(worst_box, rep.residuals["box"])
        if rep.verdict != "pass":
            bad.append(rep.name)
    dt = time.time() - t0
    ok = worst_beta < 1e-5 and worst_box < 1e-5 and not bad and dt < 60
    assert _report("A9 wave equations", ok,
                   f"worst beta-wave residual {worst_beta:.2e} < 1e-5"
                   f" (m in {{1,3}}, 10 beta), worst x-box {worst_box:.2e}"
                   f" < 1e-5, non-pass {bad}, {dt:.1f}s < 60s")


def _apex_bump(seed: int) -> TestFunction:
    # two offset terms near the cone apex; the translate direction then
    # carries the support away from the apex so the n >= 1 tail decays
    rng = np.random.default_rng(seed)
    c0 = 0.40 + rng.uniform(0.0, 0.04)
    sp1 = rng.uniform(-0.06, 0.06, 3)
    sp2 = rng.uniform(-0.06, 0.06, 3)
    t1 = TestFunction.single(center=(c0, *sp1), half_widths=(0.1,) * 4,
                             amplitude=(1.0 + 0.3j, 0.4 + 1.0j))
    t2 = TestFunction.single(center=(c0 + 0.04, *sp2),
                             half_widths=(0.11, 0.1, 0.1, 0.1),
                             amplitude=(1.0, 1.0 + 0.7j), scale=0.8)
    return TestFunction(terms=t1.terms + t2.terms).scaled(3.0)


def test_a10_vacuum_limit():
    t0 = time.time()
    worst = 0.0
    bad = []
    for seed in (101, 102, 103, 104, 105):
        rep = verify.vacuum_limit(_apex_bump(seed), 1.0, E0,
                                  (1.0, 2.0, 4.0, 8.0), order=48)
        worst = max(worst, rep.residuals["decay_ratio"])
        if rep.verdict != "pass":
            bad.append(rep.name)
    dt = time.time() - t0
    ok = not bad and worst < 1e-3 and dt < 300
    assert _report("A10 vacuum limit", ok,
                   f"worst d(8)/d(1) {worst:.2e} < 1e-3, strictly decreasing"
                   f" on all 5 bumps, non-pass {bad}, {dt:.1f}s < 300s")


def test_a11_weyl_null():
    t0 = time.time()
    f = random_family(2, 1)[0]
    fbar = f.conjugate()
    states = [StateSpec.vacuum(),
              StateSpec.kms(FourVector(1.3, 0.2, -0.1, 0.3)),
              StateSpec.mixture([(0.5, FourVector(2.0, 0.3, 0.0, -0.4)),
                                 (0.5, E0)]),
              StateSpec.hotbang(1.0)]
    worst = 0.0
    for omega in states:
        rep = weyl_null_check(omega, fbar, f, QUAD_FAST)
        worst = max(worst, rep["psi"] / rep["scale"],
                    rep["psibar"] / rep["scale"])
    dt = time.time() - t0
    ok = worst < 1e-12 and dt < 60
    assert _report("A11 weyl null check", ok,
                   f"worst residual/scale {worst:.2e} < 1e-12 across 4"
                   f" state variants, {dt:.1f}s < 60s")


def test_a12_determinism(tmp_path):
    t0 = time.time()
    config = {
        "seed": 5,
        "state": {"hotbang": {"lambda": 1.0}},
        "family": {"count": 2, "max_terms": 1},
        "quad": {"radial_order": 32, "costheta_order": 8,
                 "azimuth_order": 16, "tol": 1e-6},
        "positivity": {"lam_values": [1.0], "series_tol": 1e-6},
        "scan": {"observable": {"t2": {}},
                 "points": [[1.0, 0.0, 0.0, 0.0]]},
        "verify": {},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    payloads = []
    for sub in ("run1", "run2"):
        out = tmp_path / sub
        out.mkdir()
        code = cli.main(["--command", "verify", "--config", str(path),
                         "--seed", "5", "--out", str(out)])
        assert code == 0
        payloads.append((out / "verify.json").read_bytes())
    dt = time.time() - t0
    ok = payloads[0] == payloads[1]
    assert _report("A12 determinism", ok,
                   f"verify.json byte-identical across two runs"
                   f" ({len(payloads[0])} bytes), {dt:.1f}s")
