"""Two-point functionals of the heat-explosion state via alternating series.

The state assigns to each pair of forward-cone-supported test functions an
alternating series over complexified field arguments z_n = 1 + i n lam and
z'_n = -1 + i n lam:

    PsiBarPsi(f, g) = 2pi [ sum_{n>=0} (-1)^n T_n + sum_{n>=1} (-1)^{n-1} T'_n ]
    PsiPsiBar(f, g) = 2pi [ sum_{n>=1} (-1)^{n-1} T_n + sum_{n>=0} (-1)^n T'_n ]

    T_n  = shell integral of g(z_n p')^T p'_M f(z'_n p')
    T'_n = the same with the two branches swapped,

so the orderings sum to 2pi (T_0 + T'_0), the anticommutator.  For the
self-pairing (fbar, f) the terms are real and nonnegative shell integrals,

    T_n = cos^3(phi_n) L(phi_n),   T'_n = |cos(pi - phi_n)|^3 L(pi - phi_n),

with phi_n = arg z_n and L the positive ray functional below, which is where
the positivity and log-convexity machinery lives:

    L(phi)   = shell integral of f(e^{i phi} p')^T p'_M conj(f(e^{i phi} p')),
    F(z)     = shell integral of f(z p')^T p'_M conj(f(zbar^{-1} p')),
    F_a(z)   = the same with arguments z^{1+a}, zbar^{a-1}.

F is holomorphic on the open upper half-plane with F(e^{i phi}) = L(phi);
F_a relates to F by scaling.  A note on that relation: restricted to the
positive real axis, substituting p -> r^{-a} p gives F_a(r) = r^{-3a} F(r)
directly, so the identity that extends by holomorphy is

    F_a(z) = z^{-3a} F(z),   equivalently   F(z) = z^{+3a} F_a(z).

Both sides here are computed independently and compared in that direction.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _fields
from .quad import QuadConfig, _neumaier_add, alternating_sum, shell_grid
from .states import DEFAULT_QUAD, Ordering, SMEARING_PREFACTOR
from .testfn import PROFILE_ORDER, TestFunction

__all__ = [
    "SeriesSchedule",
    "ConvexProfile",
    "L_phi",
    "F_z",
    "two_point_series",
    "two_point_series_pair",
    "normal_ordered_remainder",
    "hotbang_smeared",
    "series_terms",
    "SeriesTermsResult",
    "log_convexity_check",
    "LogConvexityReport",
]

BRACKET_LAMBDA_THRESHOLD = 0.05


@dataclass(frozen=True)
class SeriesSchedule:
    """Truncation policy and derived angle sequence for one value of lam.

    phi_n = arg(1 + i n lam) increases strictly from 0 toward pi/2, with
    cos(phi_n) = (1 + n^2 lam^2)^{-1/2} exactly.  reference picks which pair
    anchors the absolute tolerance: the n = 0 terms ("leading") or the n = 1
    terms ("tail", for consumers of the n >= 1 remainder only).  bracketed
    None resolves to lam <= 0.05: slowly growing angles make the two
    interleaved sums individually ill-conditioned, and the regrouped brackets
    T_n + T'_{n+1} keep the sign structure.
    """

    lam: float
    tol: float = 1e-9
    max_terms: int = 4000
    reference: str = "leading"
    bracketed: bool | None = None

    def __post_init__(self):
        if not (self.lam > 0):
            raise ValueError("lam must be positive")
        if not (self.tol > 0):
            raise ValueError("tol must be positive")
        if self.max_terms < 4:
            raise ValueError("max_terms too small")
        if self.reference not in ("leading", "tail"):
            raise ValueError("reference must be 'leading' or 'tail'")

    @property
    def use_brackets(self) -> bool:
        if self.bracketed is not None:
            return self.bracketed
        return self.lam <= BRACKET_LAMBDA_THRESHOLD

    def phi(self, n):
        return np.arctan(np.asarray(n, dtype=float) * self.lam)

    def cos_phi(self, n):
        n = np.asarray(n, dtype=float)
        return 1.0 / np.sqrt(1.0 + (n * self.lam) ** 2)

    def z(self, n: int) -> complex:
        return complex(1.0, n * self.lam)

    def z_prime(self, n: int) -> complex:
        return complex(-1.0, n * self.lam)


def L_phi(f, phi: float, cfg: QuadConfig = DEFAULT_QUAD,
          order: int = PROFILE_ORDER) -> float:
    """Positive ray functional at angle phi in [0, pi].

    The integrand is pointwise a PSD sandwich, so the imaginary part is pure
    roundoff (asserted below 1e-10 of scale and discarded) and the value is
    nonnegative up to roundoff.
    """
    if not (0.0 <= phi <= math.pi):
        raise ValueError("phi must lie in [0, pi]")
    grid = shell_grid(_fields.bandlimit(cfg, f, order=order))
    v = _fields.field_on_grid(f, grid, complex(math.cos(phi), math.sin(phi)),
                              order)
    val = _fields.pauli_contract(v, np.conj(v), grid)
    scale = max(abs(val), 1e-300)
    if abs(val.imag) > 1e-10 * scale:
        raise AssertionError(
            f"L(phi) imaginary part {val.imag:.3e} exceeds roundoff scale")
    out = val.real
    if out < -1e-12 * scale:
        raise AssertionError(f"L(phi) = {out:.3e} below the roundoff floor")
    return out


def F_z(f, z: complex, alpha: float = 0.0, cfg: QuadConfig = DEFAULT_QUAD,
        order: int = PROFILE_ORDER) -> complex:
    """Holomorphic continuation of the ray functional (alpha deforms it).

    alpha = 0 evaluates the pair (z, zbar^{-1}); alpha in (0, 1) the pair
    (z^{1+alpha}, zbar^{alpha-1}), defined on the sector
    arg z in [0, pi/(1+alpha)).  Raises ValueError outside the domain.
    """
    z = complex(z)
    if z == 0:
        raise ValueError("z = 0 is outside the domain")
    if z.imag < -1e-12:
        raise ValueError("z must lie in the closed upper half-plane")
    if not (0.0 <= alpha < 1.0):
        raise ValueError("alpha must lie in [0, 1)")
    if alpha == 0.0:
        w1 = z
        w2 = 1.0 / z.conjugate()
    else:
        if np.angle(z) >= math.pi / (1.0 + alpha):
            raise ValueError(
                f"arg z = {np.angle(z):.4f} outside the alpha = {alpha} sector")
        w1 = z ** (1.0 + alpha)
        w2 = z.conjugate() ** (alpha - 1.0)
    # arguments are scaled by |w_i|, so the resolvable radius shrinks too
    grid = shell_grid(_fields.bandlimit(cfg, f, order=order,
                                        arg_scale=max(abs(w1), abs(w2))))
    left = _fields.field_on_grid(f, grid, w1, order)
    right = np.conj(_fields.field_on_grid(f, grid, w2, order))
    return _fields.pauli_contract(left, right, grid)


def _assemble(first: Sequence[complex], second: Sequence[complex],
              bracketed: bool, start: int = 0) -> tuple[complex, float]:
    """sum_{n>=start} (-1)^n first[n] + sum_{n>=max(start,1)} (-1)^{n-1} second[n].

    Neumaier-compensated in a fixed ascending order; bracketed regroups into
    c_n = first[n] + second[n+1].  Returns (value, magnitude of the last
    group) where the last-group magnitude feeds the alternating tail bound.
    """
    n_max = max(len(first), len(second))
    fa = lambda n: first[n] if n < len(first) else 0.0 + 0.0j
    sb = lambda n: second[n] if n < len(second) else 0.0 + 0.0j
    re_t = re_c = im_t = im_c = 0.0
    last = 0.0
    if bracketed:
        for n in range(start, n_max):
            c = fa(n) + sb(n + 1)
            s = 1.0 if n % 2 == 0 else -1.0
            re_t, re_c = _neumaier_add(re_t, re_c, s * c.real)
            im_t, im_c = _neumaier_add(im_t, im_c, s * c.imag)
            last = abs(c)
        if start >= 1:
            # the regrouping c_n = first[n] + second[n+1] drops second[start]
            s = 1.0 if (start - 1) % 2 == 0 else -1.0
            d = sb(start)
            re_t, re_c = _neumaier_add(re_t, re_c, s * d.real)
            im_t, im_c = _neumaier_add(im_t, im_c, s * d.imag)
    else:
        for n in range(start, n_max):
            s = 1.0 if n % 2 == 0 else -1.0
            c = fa(n)
            re_t, re_c = _neumaier_add(re_t, re_c, s * c.real)
            im_t, im_c = _neumaier_add(im_t, im_c, s * c.imag)
            if n >= 1:
                d = sb(n)
                re_t, re_c = _neumaier_add(re_t, re_c, -s * d.real)
                im_t, im_c = _neumaier_add(im_t, im_c, -s * d.imag)
        if n_max > start:
            last = abs(fa(n_max - 1)) + abs(sb(n_max - 1))
    return complex(re_t + re_c, im_t + im_c), last


def _tables(f, g, schedule: SeriesSchedule, cfg: QuadConfig, order: int,
            weyl: str | None, eps_floor: float):
    if not isinstance(f, TestFunction) or not isinstance(g, TestFunction):
        raise TypeError(
            "series evaluation needs factored product-bump test functions")
    # Re z_n = +-1 for every n, so oscillation speed never exceeds the real
    # ray's and arg_scale stays 1; the growing Im z_n only damps.
    grid = shell_grid(_fields.bandlimit(cfg, f, g, order=order))
    return _fields.series_tables(
        f, g, schedule.lam, grid, order=order, rel_tol=schedule.tol,
        reference=schedule.reference, max_terms=schedule.max_terms,
        weyl=weyl, eps_floor=eps_floor)


def _bound(last: float, eps_abs: float, ta, tb, cfg: QuadConfig) -> float:
    # truncation (last alternating group + per-table tolerance) plus a
    # quadrature allowance keyed to the leading-term scale and cfg.tol
    lead = max(abs(ta[0]), abs(tb[0])) if ta else 0.0
    return SMEARING_PREFACTOR * (last + eps_abs + cfg.tol * lead)


def two_point_series(f, g, schedule: SeriesSchedule,
                     ordering: Ordering = Ordering.PSIBAR_PSI,
                     cfg: QuadConfig = DEFAULT_QUAD, *,
                     order: int = PROFILE_ORDER, weyl: str | None = None,
                     eps_floor: float = 0.0) -> tuple[complex, float]:
    """One ordered two-point value of the heat-explosion state.

    Returns (value, error_bound); the bound covers series truncation plus a
    quadrature allowance at cfg.tol relative to the leading term.
    """
    ta, tb, eps_abs = _tables(f, g, schedule, cfg, order, weyl, eps_floor)
    first, second = (ta, tb) if ordering is Ordering.PSIBAR_PSI else (tb, ta)
    value, last = _assemble(first, second, schedule.use_brackets)
    return (SMEARING_PREFACTOR * value,
            _bound(last, eps_abs, ta, tb, cfg))


def two_point_series_pair(f, g, schedule: SeriesSchedule,
                          cfg: QuadConfig = DEFAULT_QUAD, *,
                          order: int = PROFILE_ORDER
                          ) -> dict[Ordering, tuple[complex, float]]:
    """Both orderings from a single table build (they share all terms)."""
    ta, tb, eps_abs = _tables(f, g, schedule, cfg, order, None, 0.0)
    out = {}
    for ordering in Ordering:
        first, second = (ta, tb) if ordering is Ordering.PSIBAR_PSI else (tb, ta)
        value, last = _assemble(first, second, schedule.use_brackets)
        out[ordering] = (SMEARING_PREFACTOR * value,
                         _bound(last, eps_abs, ta, tb, cfg))
    return out


def normal_ordered_remainder(f, g, schedule: SeriesSchedule,
                             ordering: Ordering = Ordering.PSIBAR_PSI,
                             cfg: QuadConfig = DEFAULT_QUAD, *,
                             order: int = PROFILE_ORDER
                             ) -> tuple[complex, float]:
    """The n >= 1 part of the series: the state minus its limit-state term.

    The n = 0 term is exactly the limit state's value on the same grid, so
    this difference has no shared-term cancellation error.  The schedule is
    forced to reference="tail" so the truncation tolerance keys to the n = 1
    terms rather than the (much larger) leading ones.
    """
    if schedule.reference != "tail":
        schedule = dataclasses.replace(schedule, reference="tail")
    ta, tb, eps_abs = _tables(f, g, schedule, cfg, order, None, 0.0)
    first, second = (ta, tb) if ordering is Ordering.PSIBAR_PSI else (tb, ta)
    value, last = _assemble(first, second, schedule.use_brackets, start=1)
    lead = max((abs(t) for t in (ta[1:2] + tb[1:2])), default=0.0)
    bound = SMEARING_PREFACTOR * (last + eps_abs + cfg.tol * lead)
    return SMEARING_PREFACTOR * value, bound


def hotbang_smeared(f: TestFunction, lam: float,
                    ordering: Ordering = Ordering.PSIBAR_PSI,
                    cfg: QuadConfig = DEFAULT_QUAD, *,
                    order: int = PROFILE_ORDER, tol: float = 1e-9,
                    schedule: SeriesSchedule | None = None
                    ) -> tuple[float, float]:
    """State value on the self-pairing (fbar, f): real and nonnegative.

    Both interleavings are series of real nonnegative terms
    cos^3(phi_n) L(phi_n) and cos^3(phi_n) L(pi - phi_n); the return is
    (value, error_bound) with the alternating-tail truncation rule.
    """
    sched = schedule or SeriesSchedule(lam=lam, tol=tol)
    value, bound = two_point_series(f.conjugate(), f, sched, ordering, cfg,
                                    order=order)
    scale = max(abs(value), bound, 1e-300)
    if abs(value.imag) > 1e-8 * scale:
        raise AssertionError(
            f"self-pairing value has imaginary part {value.imag:.3e}")
    return value.real, bound


@dataclass(frozen=True)
class ConvexProfile:
    """A declared-positive, declared-convex angle profile on [0, pi].

    The hypotheses are declared, not proven: spot_check verifies positivity
    and midpoint convexity on a uniform grid.  provenance records where the
    callable came from (a test function's ray functional or a synthetic
    closed form).
    """

    fn: Callable[[float], float]
    provenance: str

    def __call__(self, phi: float) -> float:
        return float(self.fn(phi))

    @staticmethod
    def synthetic(name: str, fn: Callable[[float], float]) -> "ConvexProfile":
        return ConvexProfile(fn=fn, provenance=f"Synthetic({name})")

    @staticmethod
    def from_test_function(f: TestFunction, cfg: QuadConfig = DEFAULT_QUAD,
                           order: int = PROFILE_ORDER) -> "ConvexProfile":
        cache: dict[float, float] = {}

        def fn(phi: float) -> float:
            key = float(phi)
            if key not in cache:
                cache[key] = L_phi(f, key, cfg, order)
            return cache[key]

        return ConvexProfile(fn=fn, provenance="FromTestFunction")

    @staticmethod
    def from_series_tables(f: TestFunction, schedule: SeriesSchedule,
                           cfg: QuadConfig = DEFAULT_QUAD,
                           order: int = PROFILE_ORDER) -> "ConvexProfile":
        """Profile backed by the series engine's own term tables.

        At the schedule angles phi_n and pi - phi_n the values are the
        engine's terms divided by cos^3, so re-summing them through the
        profile route exercises only the summation order, not a second
        quadrature.  Other angles fall back to the direct evaluation.
        """
        ta, tb, _ = _tables(f.conjugate(), f, schedule, cfg, order, None, 0.0)
        lut: dict[float, float] = {}
        for n, t in enumerate(ta):
            c3 = float(schedule.cos_phi(n)) ** 3
            lut[float(schedule.phi(n))] = max(t.real, 0.0) / c3
        for n, t in enumerate(tb):
            c3 = float(schedule.cos_phi(n)) ** 3
            lut[float(math.pi - schedule.phi(n))] = max(t.real, 0.0) / c3

        def fn(phi: float) -> float:
            key = float(phi)
            if key in lut:
                return lut[key]
            return L_phi(f, key, cfg, order)

        return ConvexProfile(fn=fn, provenance="FromTestFunction")

    def spot_check(self, n: int = 101) -> dict:
        """Positivity and midpoint convexity on an n-point uniform grid."""
        phis = np.linspace(0.0, math.pi, n)
        vals = np.array([self(p) for p in phis])
        scale = float(np.max(np.abs(vals))) if vals.size else 0.0
        pos_ok = bool(np.all(vals >= -1e-12 * max(scale, 1e-300)))
        mid = 0.5 * (vals[:-2] + vals[2:]) - vals[1:-1]
        conv_ok = bool(np.all(mid >= -1e-9 * max(scale, 1e-300)))
        return {"positive": pos_ok, "midpoint_convex": conv_ok,
                "scale": scale,
                "worst_midpoint": float(np.min(mid)) if mid.size else 0.0}


@dataclass(frozen=True)
class SeriesTermsResult:
    value: float
    error_bound: float
    partial_sums: tuple[float, ...]
    n_terms: int


def series_terms(profile: ConvexProfile, schedule: SeriesSchedule,
                 which: str = "A") -> SeriesTermsResult:
    """Regrouped alternating series of a positive convex angle profile.

    which = "A" sums (-1)^n [g(phi_n) + g(pi - phi_{n+1})], which = "B" the
    companion (-1)^n [g(pi - phi_n) + g(phi_{n+1})], with
    g(phi) = |cos phi|^3 profile(phi).  Terms are clamped at zero against
    roundoff (the positivity hypothesis is the profile's, checked
    separately).  Returns the limit, the first omitted magnitude, and the
    partial-sum trace.
    """
    if which not in ("A", "B"):
        raise ValueError("which must be 'A' or 'B'")

    def g(phi: float) -> float:
        return abs(math.cos(phi)) ** 3 * profile(phi)

    def bracket(n: int) -> float:
        pn = float(schedule.phi(n))
        pn1 = float(schedule.phi(n + 1))
        if which == "A":
            raw = g(pn) + g(math.pi - pn1)
        else:
            raw = g(math.pi - pn) + g(pn1)
        return max(raw, 0.0)

    memo: dict[int, float] = {}

    def term(n: int) -> float:
        if n not in memo:
            memo[n] = bracket(n)
        return memo[n]

    t0 = term(0)
    if t0 == 0.0 and term(1) == 0.0:
        return SeriesTermsResult(0.0, 0.0, (0.0, 0.0), 2)
    tol_abs = schedule.tol * t0
    value, omitted = alternating_sum(term, tol_abs,
                                     max_terms=schedule.max_terms)
    partial = 0.0
    partials = []
    for n in range(max(memo) + 1):
        if n not in memo:
            break
        partial += memo[n] if n % 2 == 0 else -memo[n]
        partials.append(partial)
    return SeriesTermsResult(value=value, error_bound=omitted,
                             partial_sums=tuple(partials),
                             n_terms=len(partials))


@dataclass(frozen=True)
class LogConvexityReport:
    phis: tuple[float, ...]
    l_values: tuple[float, ...]
    violations: tuple[float, ...]
    worst_violation: float
    verdict: str            # "pass" | "warn" | "fail" | "zero"
    eps: float
    slack: float
    warn_level: float


def log_convexity_check(f, phis: Sequence[float], eps: float,
                        cfg: QuadConfig = DEFAULT_QUAD,
                        order: int = PROFILE_ORDER, *,
                        slack: float = 1e-8,
                        warn_level: float = 1e-6) -> LogConvexityReport:
    """L(phi)^2 <= L(phi+eps) L(phi-eps) (1 + slack) on a grid.

    With alpha = eps/phi this is simultaneously the multiplicative form
    L(phi)^2 <= L((1+alpha) phi) L((1-alpha) phi) at the same three angles.
    Violations below warn_level downgrade to a warning (quadrature noise on
    coarse grids); failures are reported in the verdict, never raised.
    """
    phis = [float(p) for p in phis]
    if not phis:
        raise ValueError("need at least one grid angle")
    for p in phis:
        if not (0.0 < p - eps and p + eps < math.pi):
            raise ValueError(f"phi = {p} with eps = {eps} leaves (0, pi)")

    cache: dict[float, float] = {}

    def L(phi: float) -> float:
        if phi not in cache:
            cache[phi] = L_phi(f, phi, cfg, order)
        return cache[phi]

    l_vals = [L(p) for p in phis]
    scale = max((abs(v) for v in l_vals), default=0.0)
    if scale < 1e-280:
        return LogConvexityReport(
            phis=tuple(phis), l_values=tuple(l_vals),
            violations=tuple(0.0 for _ in phis), worst_violation=0.0,
            verdict="zero", eps=eps, slack=slack, warn_level=warn_level)

    violations = []
    verdicts = []
    for p, lv in zip(phis, l_vals):
        rhs = L(p + eps) * L(p - eps)
        lhs = lv * lv
        if rhs <= 0.0:
            v = 0.0 if lhs <= (1e-12 * scale) ** 2 else math.inf
        else:
            v = lhs / rhs - 1.0
        violations.append(v)
        if v <= slack:
            verdicts.append("pass")
        elif v < warn_level:
            verdicts.append("warn")
        else:
            verdicts.append("fail")
    worst = max(violations)
    if "fail" in verdicts:
        verdict = "fail"
    elif "warn" in verdicts:
        verdict = "warn"
    else:
        verdict = "pass"
    return LogConvexityReport(
        phis=tuple(phis), l_values=tuple(l_vals), violations=tuple(violations),
        worst_violation=worst, verdict=verdict, eps=eps, slack=slack,
        warn_level=warn_level)
