"""Cross-checks tying the smeared states, the closed thermal family, and the
split-point route to each other.

Every check returns a CheckReport: named residuals next to the tolerances
they were judged against and a three-way verdict.  Residual normalizations
are defined here, once; raw values ride along in residual keys without a
tolerance or in notes.  Checks never raise on the numerical failure modes
they exist to detect (a diverging series, a busted extrapolation); those
become verdict "fail" with a note, so a suite run always completes.

Layout of a suite run: every check is independent, computes its own inputs
digest, and the merged report list is sorted by name, so two runs with the
same (seed, config) produce byte-identical JSON and CSV.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .minkowski import FourVector
from .quad import NonConvergenceError, QuadConfig, finite_difference
from .states import DEFAULT_QUAD, Ordering, StateSpec, state_to_dict
from .testfn import PROFILE_ORDER, TestFunction
from . import hotbang
from . import thermal

__all__ = [
    "CheckReport",
    "thermal_coincidence",
    "transport_residual",
    "pde_residuals",
    "vacuum_limit",
    "symmetrization_check",
    "energy_consistency",
    "entropy_scaling",
    "so_thermal_certificate",
    "run_suite",
    "reports_to_json",
    "reports_to_csv",
    "SUITE_SERIES_QUAD",
]

_METRIC = (1.0, -1.0, -1.0, -1.0)

# series checks are head-dominated after translation, so a reduced grid is
# enough there; kernel-route checks stay on the default grid they were
# calibrated at
SUITE_SERIES_QUAD = QuadConfig(radial_order=32, costheta_order=8,
                               azimuth_order=16, tol=1e-6)


@dataclass(frozen=True)
class CheckReport:
    """One named check: residuals, the tolerances applied, and a verdict.

    residuals keys without a matching tolerances key are informational and
    do not affect the verdict.
    """

    name: str
    inputs: dict
    residuals: dict
    tolerances: dict
    verdict: str
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.verdict not in ("pass", "warn", "fail"):
            raise ValueError(f"verdict must be pass/warn/fail, got {self.verdict!r}")
        for key in self.tolerances:
            if key not in self.residuals:
                raise ValueError(f"tolerance for unreported residual {key!r}")

    @property
    def inputs_digest(self) -> str:
        blob = json.dumps(self.inputs, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "inputs_digest": self.inputs_digest,
            "residuals": {k: float(v) for k, v in sorted(self.residuals.items())},
            "tolerances": {k: float(v) for k, v in sorted(self.tolerances.items())},
            "verdict": self.verdict,
            "notes": list(self.notes),
        }

    def csv_rows(self) -> list[tuple[str, str, str, str]]:
        """(name.key, residual, tolerance, verdict) per residual key."""
        rows = []
        for key in sorted(self.residuals):
            tol = self.tolerances.get(key)
            rows.append((f"{self.name}.{key}",
                         repr(float(self.residuals[key])),
                         "" if tol is None else repr(float(tol)),
                         self.verdict))
        return rows


def _judge(residuals: dict, tolerances: dict) -> str:
    for key, tol in tolerances.items():
        r = residuals.get(key)
        if r is None or not math.isfinite(r) or abs(r) > tol:
            return "fail"
    return "pass"


def _vec(v) -> FourVector:
    return v if isinstance(v, FourVector) else FourVector.from_array(v)


def _vec_list(v: FourVector) -> list[float]:
    return [float(c) for c in v.as_array()]


def _cfg_echo(cfg: QuadConfig) -> list:
    return [cfg.radial_order, cfg.costheta_order, cfg.azimuth_order, cfg.tol]


def _fn_echo(f: TestFunction) -> list:
    out = []
    for t in f.terms:
        out.append({
            "center": _vec_list(t.center),
            "half_widths": [float(h) for h in t.half_widths],
            "amplitude": [[a.real, a.imag] for a in t.amplitude],
            "scale": [t.scale.real, t.scale.imag],
        })
    return out


def _fsum_complex(values) -> complex:
    vals = list(values)
    return complex(math.fsum(v.real for v in vals),
                   math.fsum(v.imag for v in vals))


def thermal_coincidence(lam: float, x, idx: thermal.ThermalIndex,
                        cfg: QuadConfig = DEFAULT_QUAD,
                        steps=(0.32, 0.16, 0.08, 0.04)) -> CheckReport:
    """Split-point route of the heat-explosion state vs the closed form.

    The comparison target is thermal_function(idx, 2*lam*x) rescaled by the
    frozen per-m constant point_split_scale(m); the measured ratio to the
    unscaled closed form is recorded in the notes.  Even m: both routes
    vanish, so the residual is the split value against the m = 1 magnitude
    at the same temperature vector.
    """
    x = _vec(x)
    omega = StateSpec.hotbang(lam)
    name = f"thermal_coincidence[m{idx.m}]"
    inputs = {"lam": float(lam), "x": _vec_list(x), "mu": list(idx.mu),
              "nu": idx.nu, "cfg": _cfg_echo(cfg),
              "steps": [float(s) for s in steps]}
    beta = FourVector.from_array(2.0 * lam * x.as_array())
    closed = thermal.thermal_function(idx, beta)

    try:
        split, unc = thermal.point_split_expectation(omega, x, idx,
                                                     steps=steps, cfg=cfg)
    except NonConvergenceError as err:
        return CheckReport(name, inputs, {"relative": math.inf},
                           {"relative": 1e-2}, "fail",
                           (f"extrapolation failed: {err}",))

    if idx.m % 2 == 1:
        target = complex(closed) * float(thermal.point_split_scale(idx.m))
        rel = abs(split - target) / abs(target)
        residuals = {"relative": rel,
                     "extrapolation_uncertainty": unc / abs(target)}
        tolerances = {"relative": 1e-2}
        notes = (
            f"split route {split:.8e}, scaled closed form {target:.8e}",
            f"ratio to unscaled closed form {abs(split) / abs(closed):.6f}; "
            f"frozen constant {thermal.point_split_scale(idx.m)} applied",
        )
    else:
        # closed form is identically zero at even m; use the m = 1 magnitude
        # at the same beta as the comparison scale
        scale = abs(thermal.thermal_function(thermal.ThermalIndex((0,), 0), beta))
        residuals = {"absolute_over_scale": abs(split) / scale,
                     "extrapolation_uncertainty": unc / scale}
        tolerances = {"absolute_over_scale": 1e-6}
        notes = (f"split route {split:.3e} against exact zero; "
                 f"scale {scale:.3e} is the m=1 magnitude at the same beta",)

    return CheckReport(name, inputs, residuals, tolerances,
                       _judge(residuals, tolerances), notes)


def transport_residual(omega: StateSpec, x, p, step: float = 0.02) -> CheckReport:
    """Directional derivative of the occupation observable along its ray.

    Finite-differences y -> omega(N_p)(y) at x and contracts the gradient
    with p^mu; for every realized state the result vanishes (it is
    proportional to (p, p) = 0 for the position-dependent state and the
    gradient itself vanishes for the homogeneous ones).  Normalization is
    the Euclidean gradient norm times |p|.
    """
    x = _vec(x)
    p = _vec(p)
    xi = thermal.MacroObservable.phasespace(p)
    name = f"transport_residual[{omega.kind}]"
    inputs = {"state": state_to_dict(omega), "x": _vec_list(x),
              "p": _vec_list(p), "step": float(step)}

    def e(arr: np.ndarray) -> float:
        return thermal.macro_expectation(omega, xi, FourVector.from_array(arr))

    x0 = x.as_array()
    h = step * max(1.0, float(np.max(np.abs(x0))))
    grad = np.array([finite_difference(e, x0, [mu], h, order=4)
                     for mu in range(4)])
    value = float(np.dot(p.as_array(), grad))
    norm = float(np.linalg.norm(grad) * np.linalg.norm(p.as_array()))

    notes = ()
    if norm == 0.0:
        residuals = {"relative": 0.0, "raw": abs(value)}
        notes = ("gradient vanishes identically (state is x-independent)",)
    else:
        residuals = {"relative": abs(value) / norm, "raw": abs(value)}
    tolerances = {"relative": 1e-6}
    return CheckReport(name, inputs, residuals, tolerances,
                       _judge(residuals, tolerances), notes)


def pde_residuals(omega: StateSpec, xi: thermal.MacroObservable, x,
                  step: float = 0.012) -> CheckReport:
    """Wave operator, divergence form, and mixed-partial antisymmetry of
    x -> omega(Xi)(x), all by order-4 central differences.

    The divergence form repeats the wave operator through a second stencil
    scale, so the two residuals cross-check each other's truncation error.
    The curl residual is near-forced by the symmetry of central stencils
    and is reported as the roundoff floor of the differentiation.
    """
    x = _vec(x)
    tag = xi.kind if xi.kind != "custom" else f"custom:{xi.name}"
    name = f"pde_residuals[{tag},{omega.kind}]"
    inputs = {"state": state_to_dict(omega), "xi": _macro_echo(xi),
              "x": _vec_list(x), "step": float(step)}

    admissible_worst = 0.0
    for arr in ((1.0, 0.0, 0.0, 0.0), (1.3, 0.2, -0.1, 0.3),
                (2.0, 0.0, 0.5, -0.4)):
        b = FourVector.from_array(arr)
        admissible_worst = max(admissible_worst, abs(thermal.wave_residual(
            lambda bb: thermal.builtin_macro(xi, bb), b)))

    def e(arr: np.ndarray) -> float:
        return thermal.macro_expectation(omega, xi, FourVector.from_array(arr))

    x0 = x.as_array()
    h = step * max(1.0, float(np.max(np.abs(x0))))
    second = {}
    for mu in range(4):
        for nu in range(mu, 4):
            second[(mu, nu)] = finite_difference(e, x0, [mu, nu], h, order=4)
    scale = max(abs(e(x0)), max(abs(v) for v in second.values()), 1e-300)

    box = math.fsum(_METRIC[mu] * second[(mu, mu)] for mu in range(4))
    # same operator at 3/4 the stencil scale: independent truncation error
    box_alt = math.fsum(
        _METRIC[mu] * finite_difference(e, x0, [mu, mu], 0.75 * h, order=4)
        for mu in range(4))
    curl = max(abs(finite_difference(e, x0, [mu, nu], h, order=4)
                   - finite_difference(e, x0, [nu, mu], h, order=4))
               for mu in range(4) for nu in range(mu + 1, 4))

    residuals = {"box": abs(box) / scale,
                 "divergence": abs(box_alt) / scale,
                 "curl": curl / scale,
                 "beta_wave_admissibility": admissible_worst}
    tolerances = {"box": 1e-5, "divergence": 1e-5, "curl": 1e-8}
    verdict = _judge(residuals, tolerances)
    notes = (f"raw box {box:.3e}, scale {scale:.3e}",)
    if admissible_worst > 1e-4:
        verdict = "warn" if verdict == "pass" else verdict
        notes = notes + (
            f"observable fails the beta wave equation (residual "
            f"{admissible_worst:.2e}); x-space residuals judged anyway",)
    return CheckReport(name, inputs, residuals, tolerances, verdict, notes)


def _macro_echo(xi: thermal.MacroObservable) -> dict:
    out = {"kind": xi.kind}
    if xi.kind == "energy":
        out["mu"] = xi.mu
        out["nu"] = xi.nu
    elif xi.kind == "entropy":
        out["mu"] = xi.mu
    elif xi.kind == "phasespace":
        out["p"] = _vec_list(xi.p)
    elif xi.kind == "custom":
        out["name"] = xi.name
    return out


def vacuum_limit(f: TestFunction, lam: float, a, t_grid,
                 cfg: QuadConfig = SUITE_SERIES_QUAD, *,
                 order: int = PROFILE_ORDER,
                 omega: StateSpec | None = None) -> CheckReport:
    """Decay of the state-minus-limit-state distance along far translates.

    d(t) = |state value minus the limit state's value| on the conjugate
    pairing of the t*a translate of f.  For the heat-explosion state the
    difference is evaluated as the n >= 1 series tail (the n = 0 term is
    exactly the limit state's value on the same grid), which has no
    shared-term cancellation.  Asserts monotone decrease beyond the first
    grid point and d(t_max) < 1e-3 * d(t_min).
    """
    a = _vec(a)
    ts = [float(t) for t in t_grid]
    if len(ts) < 2 or sorted(ts) != ts:
        raise ValueError("t_grid must be ascending with at least two points")
    omega = omega if omega is not None else StateSpec.hotbang(lam)
    name = f"vacuum_limit[{omega.kind}]"
    inputs = {"f": _fn_echo(f), "lam": float(lam), "a": _vec_list(a),
              "t_grid": ts, "cfg": _cfg_echo(cfg), "order": order,
              "state": state_to_dict(omega)}
    tolerances = {"decay_ratio": 1e-3, "monotone_margin": 0.0}

    ds = []
    for t in ts:
        ft = f.translate(t * a)
        if omega.kind == "vacuum":
            ds.append(0.0)
            continue
        if omega.kind == "hotbang":
            sched = hotbang.SeriesSchedule(lam=omega.lam, tol=cfg.tol)
            try:
                val, _ = hotbang.normal_ordered_remainder(
                    ft, ft.conjugate(), sched, Ordering.PSIBAR_PSI, cfg,
                    order=order)
            except NonConvergenceError as err:
                return CheckReport(
                    name, inputs, {"decay_ratio": math.inf,
                                   "monotone_margin": math.inf},
                    tolerances, "fail",
                    (f"series did not converge at t = {t:g}: {err}",))
            ds.append(abs(val))
        else:
            from .states import two_point
            hot = two_point(omega, ft, ft.conjugate(), Ordering.PSIBAR_PSI, cfg)
            cold = two_point(StateSpec.vacuum(), ft, ft.conjugate(),
                             Ordering.PSIBAR_PSI, cfg)
            ds.append(abs(hot - cold))

    if ds[0] == 0.0:
        residuals = {"decay_ratio": 0.0, "monotone_margin": 0.0}
        notes = ("distance vanishes identically",
                 "d(t): " + ", ".join(f"{d:.4e}" for d in ds))
    else:
        margin = 0.0
        for i in range(2, len(ds)):
            if ds[i - 1] > 0.0:
                margin = max(margin, (ds[i] - ds[i - 1]) / ds[i - 1])
            elif ds[i] > 0.0:
                margin = math.inf
        residuals = {"decay_ratio": ds[-1] / ds[0], "monotone_margin": margin}
        notes = ("d(t): " + ", ".join(f"{d:.4e}" for d in ds),)
    return CheckReport(name, inputs, residuals, tolerances,
                       _judge(residuals, tolerances), notes)


def symmetrization_check(idx: thermal.ThermalIndex, beta) -> CheckReport:
    """Exact index symmetry of the thermal family.

    Partials commute and the implementation caches on the sorted multiset,
    so any index transposition must reproduce the value bit for bit and the
    permutation sum must equal (m+1)! times any single ordering exactly
    (fsum of equal floats is the correctly rounded multiple).
    """
    beta = _vec(beta)
    name = f"symmetrization_check[m{idx.m}]"
    inputs = {"mu": list(idx.mu), "nu": idx.nu, "beta": _vec_list(beta)}
    indices = idx.all_indices()
    fact = math.factorial(len(indices))
    base = thermal.thermal_function(idx, beta)

    swap_worst = 0.0
    for i in range(len(indices) - 1):
        sw = list(indices)
        sw[i], sw[i + 1] = sw[i + 1], sw[i]
        val = thermal.thermal_function(
            thermal.ThermalIndex(tuple(sw[:-1]), sw[-1]), beta)
        swap_worst = max(swap_worst, abs(val - base))

    total = _fsum_complex(
        thermal.thermal_function(thermal.ThermalIndex(perm[:-1], perm[-1]), beta)
        for perm in itertools.permutations(indices))
    floor = max(abs(base) * fact, 1e-300)
    residuals = {"antisymmetric": swap_worst / max(abs(base), 1e-300),
                 "symmetrized": abs(total - fact * base) / floor}
    tolerances = {"antisymmetric": 0.0, "symmetrized": 0.0}
    return CheckReport(name, inputs, residuals, tolerances,
                       _judge(residuals, tolerances),
                       (f"(m+1)! = {fact}",))


def energy_consistency(seed: int = 0, samples: int = 10) -> CheckReport:
    """Energy builtin against the symmetrized m = 1 thermal functions.

    E^{mu nu}(beta) must be a single beta-independent multiple of
    s_mu s_nu (L^{mu nu} + L^{nu mu}) / 2i (index raising supplies the
    metric signs).  The multiple is 1/2 against the closed form; through
    the split-point route (which carries the extra 7/6) it is 3/7.
    """
    rng = np.random.default_rng(seed)
    name = "energy_consistency"
    inputs = {"seed": int(seed), "samples": int(samples)}
    ratios = []
    while len(ratios) < samples:
        space = rng.uniform(-0.5, 0.5, size=3)
        t = 1.0 + rng.uniform(0.0, 1.5) + float(np.linalg.norm(space))
        beta = FourVector.from_array((t, *space))
        mu, nu = (int(v) for v in rng.integers(0, 4, size=2))
        sym = (thermal.thermal_function(thermal.ThermalIndex((mu,), nu), beta)
               + thermal.thermal_function(thermal.ThermalIndex((nu,), mu), beta))
        denom = _METRIC[mu] * _METRIC[nu] * sym / 2j
        if abs(denom) < 1e-10:
            continue
        ratios.append(thermal.builtin_macro(
            thermal.MacroObservable.energy(mu, nu), beta) / denom)
    mean = _fsum_complex(ratios) / len(ratios)
    spread = max(abs(r - mean) for r in ratios) / abs(mean)
    residuals = {"spread": spread, "constant_offset": abs(mean - 0.5)}
    tolerances = {"spread": 1e-10, "constant_offset": 1e-10}
    notes = (f"measured constant {mean.real:.12f} (closed-form factor 1/2; "
             f"against the split route the same comparison carries 3/7)",)
    return CheckReport(name, inputs, residuals, tolerances,
                       _judge(residuals, tolerances), notes)


def entropy_scaling() -> CheckReport:
    """Flags the entropy current's scaling without correcting it.

    The implemented form scales like T^2 and fails the wave equation in
    beta; dividing by (beta, beta) once more (T^3 scaling) restores it.
    Both residuals are reported; the verdict is pinned to "warn" because
    the form is kept as implemented, not silently rescaled.
    """
    name = "entropy_scaling"
    inputs = {"observable": "entropy", "component": 0}
    xi = thermal.MacroObservable.entropy(0)

    def harmonic_form(b: FourVector) -> float:
        return thermal.builtin_macro(xi, b) / b.mink_sq()

    worst_printed = 0.0
    worst_harmonic = 0.0
    for arr in ((1.0, 0.0, 0.0, 0.0), (1.3, 0.2, -0.1, 0.3),
                (2.0, 0.0, 0.5, -0.4)):
        b = FourVector.from_array(arr)
        worst_printed = max(worst_printed, abs(thermal.wave_residual(
            lambda bb: thermal.builtin_macro(xi, bb), b)))
        worst_harmonic = max(worst_harmonic, abs(thermal.wave_residual(
            harmonic_form, b)))
    residuals = {"wave_residual_as_implemented": worst_printed,
                 "wave_residual_rescaled": worst_harmonic}
    tolerances = {"wave_residual_rescaled": 1e-5}
    verdict = "warn" if _judge(residuals, tolerances) == "pass" else "fail"
    notes = ("entropy current kept with its T^2 scaling as implemented; "
             "the extra 1/(beta,beta) makes it admissible (T^3)",)
    return CheckReport(name, inputs, residuals, tolerances, verdict, notes)


def so_thermal_certificate(lam: float = 1.0, x=(1.0, 0.0, 0.0, 0.0)) -> CheckReport:
    """Structural certificate: the local macroexpectation equals the KMS one.

    By construction both sides evaluate the same closed form at
    beta = 2*lam*x, so the difference is exactly zero; recorded as a
    certificate, not an independent measurement.
    """
    x = _vec(x)
    name = "so_thermal_certificate"
    inputs = {"lam": float(lam), "x": _vec_list(x)}
    hot = StateSpec.hotbang(lam)
    kms = StateSpec.kms(FourVector.from_array(2.0 * lam * x.as_array()))
    worst = 0.0
    for xi in (thermal.MacroObservable.t2(),
               thermal.MacroObservable.energy(0, 0),
               thermal.MacroObservable.phasespace((1.0, 0.0, 0.0, 1.0))):
        lhs = thermal.macro_expectation(hot, xi, x)
        rhs = thermal.macro_expectation(kms, xi)
        worst = max(worst, abs(lhs - rhs))
    residuals = {"absolute": worst}
    tolerances = {"absolute": 0.0}
    return CheckReport(name, inputs, residuals, tolerances,
                       _judge(residuals, tolerances),
                       ("structural: both sides evaluate the same closed "
                        "form at beta = 2*lam*x",))


def run_suite(seed: int = 0, cfg: QuadConfig | None = None) -> list[CheckReport]:
    """The full deterministic check suite, merged and sorted by name.

    cfg drives the kernel-route checks; series checks run on the reduced
    grid they were calibrated at.  Same (seed, cfg) gives byte-identical
    serialized output.
    """
    kernel_cfg = cfg if cfg is not None else DEFAULT_QUAD
    e0 = FourVector(1.0, 0.0, 0.0, 0.0)
    beta_generic = FourVector(1.3, 0.2, -0.1, 0.3)
    x_generic = FourVector(1.0, 0.1, -0.05, 0.2)
    mix = StateSpec.mixture([(0.5, FourVector(1.0, 0.0, 0.0, 0.0)),
                             (0.5, FourVector(2.0, 0.3, 0.0, 0.0))])

    reports = [
        thermal_coincidence(0.5, e0, thermal.ThermalIndex((0,), 0),
                            cfg=kernel_cfg),
        thermal_coincidence(0.5, e0, thermal.ThermalIndex((), 0),
                            cfg=kernel_cfg),
        transport_residual(StateSpec.hotbang(1.0), e0, (1.0, 0.0, 0.0, 1.0)),
        transport_residual(mix, e0, (1.0, 0.0, 0.0, 1.0)),
        _transport_random(seed),
        pde_residuals(StateSpec.hotbang(1.0), thermal.MacroObservable.t2(),
                      x_generic),
        pde_residuals(StateSpec.hotbang(1.0),
                      thermal.MacroObservable.energy(0, 1), x_generic),
        pde_residuals(mix, thermal.MacroObservable.t2(), x_generic),
        entropy_scaling(),
        vacuum_limit(_suite_function(), 1.0, e0, (1.0, 2.0, 4.0, 8.0)),
        symmetrization_check(thermal.ThermalIndex((0,), 1), beta_generic),
        symmetrization_check(thermal.ThermalIndex((0, 1, 2), 3), beta_generic),
        energy_consistency(seed),
        so_thermal_certificate(),
    ]
    names = [r.name for r in reports]
    if len(set(names)) != len(names):
        raise RuntimeError(f"duplicate check names in suite: {sorted(names)}")
    return sorted(reports, key=lambda r: r.name)


def _suite_function() -> TestFunction:
    # apex geometry keeps d(t_min) above the quadrature noise floor; the
    # spatial offsets matter too: a space-centered bump has identical
    # branch tables, its state value collapses to the limit state's and
    # d(t) degenerates to roundoff
    f1 = TestFunction.single(center=(0.45, 0.04, 0.0, 0.06),
                             half_widths=(0.1, 0.1, 0.1, 0.1),
                             amplitude=(1.0, 0.3j))
    f2 = TestFunction.single(center=(0.5, -0.05, 0.03, 0.0),
                             half_widths=(0.12, 0.1, 0.1, 0.1),
                             amplitude=(0.4, 1.0), scale=0.8)
    return TestFunction(terms=f1.terms + f2.terms)


def _transport_random(seed: int, count: int = 10) -> CheckReport:
    """Transport residual over seeded random (x, p) pairs, one report."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    pairs = []
    for _ in range(count):
        space = rng.uniform(-0.3, 0.3, size=3)
        t = 1.0 + rng.uniform(0.0, 1.0) + float(np.linalg.norm(space))
        x = FourVector.from_array((t, *space))
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        en = float(rng.uniform(0.5, 2.0))
        p = FourVector.from_array((en, *(en * n)))
        # generic orientations leave h^4 stencil truncation uncancelled,
        # so the random family needs a finer step than the axis-aligned cases
        rep = transport_residual(StateSpec.hotbang(1.0), x, p, step=0.008)
        worst = max(worst, rep.residuals["relative"])
        pairs.append([_vec_list(x), _vec_list(p)])
    residuals = {"relative_max": worst}
    tolerances = {"relative_max": 1e-6}
    return CheckReport("transport_residual[random]",
                       {"seed": int(seed), "count": count, "pairs": pairs},
                       residuals, tolerances,
                       _judge(residuals, tolerances), ())


def reports_to_json(reports) -> str:
    payload = {"reports": [r.to_json_dict() for r in reports]}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def reports_to_csv(reports) -> str:
    lines = ["name,residual,tolerance,verdict"]
    for r in reports:
        for row in r.csv_rows():
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"
