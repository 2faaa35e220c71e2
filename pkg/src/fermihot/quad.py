"""Quadrature engines: forward light-cone shell integrals, alternating series,
finite differences and limit extrapolation.

The mass-shell measure used everywhere is

    integral d^3p / (2|p|) h(p)

over the upper shell p = (|p|, vec p).  Nodes are a product rule: radial
Gauss-Legendre (semi-infinite map rho = s/(1-s) by default, or a truncated
composite of a log-mapped head and a linear bulk when rho_max is set),
Gauss-Legendre in cos(theta), uniform trapezoid in azimuth (exact for
trigonometric polynomials).  Node ordering is fixed, which the callers rely on
for bit-reproducibility.

Engineering note: products of quadratures resolve oscillatory integrands only
up to |w| of order the node count per axis; far beyond that the computed value
is aliasing noise rather than the true (superalgebraically small) tail.  For
integrands built from transforms of compactly supported functions the noise
does not decay with rho either, so integrating past the rule's bandwidth is
fatal on the semi-infinite map: always band-limit those (see gl_bandwidth and
the rho_max field).  The self_check mode, which doubles all orders, is the
cheap way to expose resolution problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "QuadConfig",
    "ShellGrid",
    "NonConvergenceError",
    "shell_grid",
    "shell_integrate",
    "gl_bandwidth",
    "alternating_sum",
    "finite_difference",
    "extrapolate_limit",
]


class NonConvergenceError(RuntimeError):
    """Raised when a rule's self-check or a series' stopping rule fails."""


@dataclass(frozen=True)
class QuadConfig:
    """Order bundle for shell integrals.

    tol is the target for self-checks and for series truncation driven by this
    config; it is not a guarantee on absolute quadrature error.
    """

    radial_order: int = 96
    costheta_order: int = 32
    azimuth_order: int = 64
    tol: float = 1e-9
    rho_max: float | None = None

    def __post_init__(self):
        if min(self.radial_order, self.costheta_order, self.azimuth_order) < 4:
            raise ValueError("quadrature orders must be >= 4")
        if not (self.tol > 0.0):
            raise ValueError("tol must be positive")
        if self.rho_max is not None and not (self.rho_max > 0.0):
            raise ValueError("rho_max must be positive when set")

    def doubled(self) -> "QuadConfig":
        return replace(self,
                       radial_order=2 * self.radial_order,
                       costheta_order=2 * self.costheta_order,
                       azimuth_order=2 * self.azimuth_order)


@lru_cache(maxsize=64)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@dataclass(frozen=True)
class ShellGrid:
    """Flattened product nodes for the shell measure.

    weight already contains the full measure factor rho/2 * jacobians, so
    sum(weight * h(p)) approximates the shell integral of h.
    """

    rho: np.ndarray       # (N,)
    nhat: np.ndarray      # (N, 3) unit directions
    weight: np.ndarray    # (N,)

    @property
    def size(self) -> int:
        return self.rho.shape[0]

    def momenta(self) -> np.ndarray:
        """Spatial momenta p = rho * nhat, shape (N, 3)."""
        return self.rho[:, None] * self.nhat

    def pprime(self) -> np.ndarray:
        """Upper-shell four-momenta (|p|, p), shape (N, 4)."""
        out = np.empty((self.size, 4))
        out[:, 0] = self.rho
        out[:, 1:] = self.momenta()
        return out


@lru_cache(maxsize=32)
def _shell_grid_cached(radial_order: int, costheta_order: int,
                       azimuth_order: int,
                       rho_max: float | None) -> ShellGrid:
    xs, ws = _leggauss(radial_order)
    s = (xs + 1.0) / 2.0
    w_s = ws / 2.0
    if rho_max is None:
        rho_1d = s / (1.0 - s)
        jac = 1.0 / (1.0 - s) ** 2
    else:
        # Finite interval.  Callers that integrate transforms of compactly
        # supported functions must truncate: past the rule's bandwidth the
        # computed transform stops decaying (it is quadrature noise), and the
        # semi-infinite map would integrate that noise with unbounded weights.
        #
        # Composite rule: a log-mapped head covers thermal scales that can sit
        # many decades below rho_max (Fermi weights at large beta, deeply
        # damped series terms), the linear bulk carries the oscillatory
        # transform mass.  The head is harmless when nothing lives there: its
        # nodes then just sample the smooth rho^1 rise of the measure.
        knee = rho_max / 32.0
        lo = rho_max * 1e-7
        n_head = max(24, radial_order // 3)
        xh, wh = _leggauss(n_head)
        t = 0.5 * (xh + 1.0) * math.log(knee / lo) + math.log(lo)
        rho_head = np.exp(t)
        jac_head = rho_head * 0.5 * math.log(knee / lo)
        w_head = wh
        rho_bulk = knee + s * (rho_max - knee)
        jac_bulk = np.full_like(s, rho_max - knee)
        rho_1d = np.concatenate([rho_head, rho_bulk])
        jac = np.concatenate([jac_head, jac_bulk])
        w_s = np.concatenate([w_head, w_s])
    radial_count = rho_1d.shape[0]

    xc, wc = _leggauss(costheta_order)      # cos(theta) on (-1, 1)
    m = azimuth_order
    phi = 2.0 * np.pi * np.arange(m) / m
    w_phi = 2.0 * np.pi / m

    sin_theta = np.sqrt(1.0 - xc**2)
    # direction table, shape (costheta, azimuth, 3)
    nx = sin_theta[:, None] * np.cos(phi)[None, :]
    ny = sin_theta[:, None] * np.sin(phi)[None, :]
    nz = np.broadcast_to(xc[:, None], nx.shape)
    dirs = np.stack([nx, ny, nz], axis=-1).reshape(-1, 3)
    w_ang = (wc[:, None] * w_phi * np.ones(m)[None, :]).reshape(-1)

    n_ang = dirs.shape[0]
    rho = np.repeat(rho_1d, n_ang)
    nhat = np.tile(dirs, (radial_count, 1))
    # measure: (1/2) rho drho dOmega with drho = jac ds
    weight = np.repeat(0.5 * rho_1d * jac * w_s, n_ang) * np.tile(w_ang, radial_count)
    rho.setflags(write=False)
    nhat.setflags(write=False)
    weight.setflags(write=False)
    return ShellGrid(rho=rho, nhat=nhat, weight=weight)


def gl_bandwidth(n: int) -> float:
    """Largest |w| for which an order-n rule integrates e^{iwu} on [-1, 1]
    to ~1e-9 absolute accuracy.  Conservative envelope of measured values
    (true thresholds are 0.46 n at n=8 rising to 1.8 n at n=256)."""
    return max(2.0, 1.25 * n - 12.0)


def shell_grid(cfg: QuadConfig) -> ShellGrid:
    return _shell_grid_cached(cfg.radial_order, cfg.costheta_order,
                              cfg.azimuth_order, cfg.rho_max)


def shell_integrate(h: Callable[[np.ndarray], np.ndarray],
                    cfg: QuadConfig,
                    *,
                    self_check: bool = False):
    """Integrate h over the upper mass shell.

    h receives the (N, 3) array of spatial momenta and returns values of shape
    (N,) or (N, ...); the integral is taken over the leading axis.  With
    self_check=True the rule is repeated at doubled orders and a
    NonConvergenceError is raised if the two disagree beyond cfg.tol
    (absolute, relative to max(1, |value|)).
    """
    grid = shell_grid(cfg)
    vals = np.asarray(h(grid.momenta()))
    if vals.shape[0] != grid.size:
        raise ValueError("integrand returned wrong leading dimension")
    value = np.tensordot(grid.weight, vals, axes=(0, 0))
    if self_check:
        fine = shell_integrate(h, cfg.doubled(), self_check=False)
        delta = np.max(np.abs(np.atleast_1d(fine - value)))
        scale = max(1.0, float(np.max(np.abs(np.atleast_1d(value)))))
        if delta > cfg.tol * scale:
            raise NonConvergenceError(
                f"shell integral self-check failed: delta={delta:.3e} "
                f"exceeds tol={cfg.tol:.1e} at scale {scale:.3e}")
    if value.shape == ():
        return complex(value) if np.iscomplexobj(vals) else float(value)
    return value


def alternating_sum(term: Callable[[int], float],
                    tol: float,
                    max_terms: int = 100000) -> tuple[float, float]:
    """Sum sum_n (-1)^n a_n for a_n = term(n) >= 0 given as magnitudes.

    term(n) must return the magnitude of the n-th term; signs (-1)^n are
    applied here.  Stops at the first n where |a_n| < tol and the magnitudes
    have decreased for three consecutive indices; the error bound returned is
    that first omitted magnitude.  Accumulation is compensated (Neumaier) with
    a fixed ascending summation order.
    """
    if not (tol > 0.0):
        raise ValueError("tol must be positive")
    total = 0.0
    comp = 0.0
    decreasing_run = 0
    prev = math.inf
    for n in range(max_terms):
        a = float(term(n))
        if a < 0.0:
            raise ValueError(f"term magnitude a_{n} = {a} is negative")
        if a < prev:
            decreasing_run += 1
        else:
            decreasing_run = 0
        if a < tol and decreasing_run >= 3:
            return total + comp, a
        signed = a if n % 2 == 0 else -a
        total, comp = _neumaier_add(total, comp, signed)
        prev = a
    raise NonConvergenceError(
        f"alternating series did not meet tol={tol:.1e} within {max_terms} terms")


def _neumaier_add(total: float, comp: float, x: float) -> tuple[float, float]:
    t = total + x
    if abs(total) >= abs(x):
        comp += (total - t) + x
    else:
        comp += (x - t) + total
    return t, comp


# central difference coefficients on symmetric stencils
_CENTRAL = {
    2: ((1, 0.5), (-1, -0.5)),
    4: ((1, 2.0 / 3.0), (-1, -2.0 / 3.0), (2, -1.0 / 12.0), (-2, 1.0 / 12.0)),
}


def finite_difference(g: Callable[[np.ndarray], float],
                      x,
                      directions: Sequence[int],
                      step: float,
                      order: int = 4) -> float:
    """Mixed partial derivative of g at x by nested central differences.

    directions lists coordinate indices, one per derivative; repeated indices
    give higher-order partials.  order is the accuracy order of each 1D
    stencil (2 or 4).  Exact on polynomials of degree < order + 1 per axis up
    to roundoff.
    """
    if order not in _CENTRAL:
        raise ValueError("order must be 2 or 4")
    x = np.asarray(x, dtype=float).copy()
    dirs = list(directions)
    if not dirs:
        return float(g(x))
    stencil = _CENTRAL[order]

    def rec(point: np.ndarray, remaining: list[int]) -> float:
        if not remaining:
            return float(g(point))
        axis = remaining[0]
        acc = 0.0
        for offset, coeff in stencil:
            shifted = point.copy()
            shifted[axis] += offset * step
            acc += coeff * rec(shifted, remaining[1:])
        return acc / step

    return rec(x, dirs)


def extrapolate_limit(samples: Sequence[tuple[float, float]],
                      kind: str = "richardson_poly") -> tuple[float, float]:
    """Extrapolate v(h) -> v(0) from (h, value) pairs.

    richardson_poly assumes an even error expansion v(h) = L + c2 h^2 + c4 h^4
    + ... on a geometrically decreasing h ladder; exponential_tail applies
    Aitken's delta-squared to the value sequence.  Returns (limit,
    uncertainty) where the uncertainty is the magnitude of the last applied
    correction.  Raises NonConvergenceError if corrections grow instead of
    shrinking (non-monotone convergence).
    """
    pts = sorted(((float(h), float(v)) for h, v in samples), key=lambda p: -p[0])
    if len(pts) < 2:
        raise ValueError("need at least two samples")
    hs = np.array([p[0] for p in pts])
    vs = np.array([p[1] for p in pts], dtype=float)
    if np.any(hs <= 0):
        raise ValueError("step sizes must be positive")

    if kind == "richardson_poly":
        ratios = hs[:-1] / hs[1:]
        table = vs.copy()
        corrections = []
        n = len(table)
        for stage in range(1, n):
            p = 2 * stage
            new = np.empty(n - stage)
            for i in range(n - stage):
                r = ratios[i + stage - 1] ** p
                new[i] = table[i + 1] + (table[i + 1] - table[i]) / (r - 1.0)
            corrections.append(abs(new[-1] - table[-1]))
            table = new
        if len(corrections) >= 2 and corrections[-1] > 4.0 * corrections[-2] \
                and corrections[-1] > 1e-14 * max(1.0, abs(table[-1])):
            raise NonConvergenceError(
                f"Richardson corrections grew: {corrections}")
        unc = corrections[-1] if corrections else abs(vs[-1] - vs[0])
        return float(table[-1]), float(unc)

    if kind == "exponential_tail":
        if len(vs) < 3:
            raise ValueError("exponential_tail needs >= 3 samples")
        v0, v1, v2 = vs[-3], vs[-2], vs[-1]
        denom = (v2 - v1) - (v1 - v0)
        if denom == 0.0:
            return float(v2), abs(v2 - v1)
        limit = v2 - (v2 - v1) ** 2 / denom
        return float(limit), abs(limit - v2)

    raise ValueError(f"unknown extrapolation kind {kind!r}")
