"""Compactly supported C^2-valued test functions and their Fourier transforms.

A test function is a finite sum of product bumps

    f(x) = sum_t scale_t * amp_t * prod_k b((x^k - c_t^k) / r_t^k),
    b(u) = exp(-1/(1-u^2)) for |u| < 1, else 0,

with every support box contained strictly in the open forward cone V+.  The
Fourier convention is

    ft(zeta) = (2pi)^-2 * integral e^{i (zeta, x)} f(x) d^4x,

with the Minkowski pairing in the exponent, so the transform of a product bump
factorizes into four 1D transforms of b:

    ft(zeta) = (2pi)^-2 scale amp e^{i (zeta, c)}
               * r0 B(zeta^0 r0) * prod_i r_i B(-zeta^i r_i),
    B(w) = integral_{-1}^{1} e^{i w u} b(u) du  (entire, even).

B is evaluated by Gauss-Legendre of order 64 (PROFILE_ORDER; doubled for
oracle runs).  Beyond |w| of roughly twice the order the rule aliases; see the
quad module note.  Scalar fourier() calls share one cache of B values keyed by
(w, order), which pays off in finite-difference stencils that revisit points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .minkowski import FourVector, mink_product

__all__ = [
    "PROFILE_ORDER",
    "FOURIER_NORM",
    "Bump",
    "TestFunction",
    "TransformedFunction",
    "PaleyWienerReport",
    "bump_profile",
    "profile_transform",
    "evaluate",
    "fourier",
    "paley_wiener_check",
    "transform",
    "random_family",
    "testfunction_to_dict",
    "testfunction_from_dict",
    "TESTFUNCTION_SCHEMA",
]

PROFILE_ORDER = 64
FOURIER_NORM = 1.0 / (2.0 * np.pi) ** 2


def bump_profile(u):
    """b(u) = exp(-1/(1-u^2)) inside (-1, 1), zero outside."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ui * ui))
    if out.shape == ():
        return float(out)
    return out


@lru_cache(maxsize=8)
def profile_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """GL nodes u_j on (-1,1) and weights a_j = w_j * b(u_j) for B(w)."""
    x, w = np.polynomial.legendre.leggauss(order)
    a = w * bump_profile(x)
    x.setflags(write=False)
    a.setflags(write=False)
    return x, a


@lru_cache(maxsize=200000)
def _profile_transform_scalar(w: complex, order: int) -> complex:
    u, a = profile_nodes(order)
    return complex(np.sum(a * np.exp(1j * w * u)))


def profile_transform(w, order: int = PROFILE_ORDER):
    """B(w) for scalar or array w (complex allowed)."""
    if np.isscalar(w) or np.asarray(w).shape == ():
        return _profile_transform_scalar(complex(w), order)
    u, a = profile_nodes(order)
    w = np.asarray(w)
    return np.exp(1j * w[..., None] * u) @ a


@dataclass(frozen=True)
class Bump:
    """Single product bump; support box must sit strictly inside V+."""

    center: FourVector
    half_widths: tuple[float, float, float, float]
    amplitude: tuple[complex, complex]
    scale: complex = 1.0 + 0.0j

    def __post_init__(self):
        if len(self.half_widths) != 4 or min(self.half_widths) <= 0.0:
            raise ValueError("half_widths must be four positive numbers")
        if len(self.amplitude) != 2:
            raise ValueError("amplitude must have two components")
        if self.cone_margin() <= 0.0:
            raise ValueError(
                f"support box not strictly inside the forward cone "
                f"(margin {self.cone_margin():.3g})")

    def cone_margin(self) -> float:
        """min over the support box of (x^0 - |vec x|); positive iff in V+."""
        c = self.center.as_array()
        r = np.asarray(self.half_widths)
        t_min = c[0] - r[0]
        # |vec x| is maximized at a corner with each |x_i| pushed outward
        corner = np.abs(c[1:]) + r[1:]
        return float(t_min - np.sqrt(np.sum(corner**2)))

    def box_min(self) -> np.ndarray:
        return self.center.as_array() - np.asarray(self.half_widths)

    def box_max(self) -> np.ndarray:
        return self.center.as_array() + np.asarray(self.half_widths)


@dataclass(frozen=True)
class TestFunction:
    """Finite sum of product bumps with C^2 amplitudes."""

    terms: tuple[Bump, ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("test function needs at least one term")

    @staticmethod
    def single(center, half_widths, amplitude, scale=1.0 + 0.0j) -> "TestFunction":
        if not isinstance(center, FourVector):
            center = FourVector.from_array(center)
        return TestFunction(terms=(Bump(center=center,
                                        half_widths=tuple(float(h) for h in half_widths),
                                        amplitude=tuple(complex(a) for a in amplitude),
                                        scale=complex(scale)),))

    def delta(self) -> float:
        """Distance proxy to the cone boundary: min term margin."""
        return min(t.cone_margin() for t in self.terms)

    def rho_bandwidth(self, order: int = PROFILE_ORDER) -> float:
        """Largest shell radius at which the order-point profile rule still
        resolves this function's transform.  Past it the computed transform is
        noise (it stops decaying), so shell integrals must be truncated there."""
        from .quad import gl_bandwidth
        h = max(max(t.half_widths) for t in self.terms)
        return gl_bandwidth(order) / h

    def conjugate(self) -> "TestFunction":
        """Pointwise complex conjugate (profiles are real, so it stays product)."""
        return TestFunction(terms=tuple(
            replace(t,
                    amplitude=tuple(np.conj(a) for a in t.amplitude),
                    scale=np.conj(t.scale))
            for t in self.terms))

    def translate(self, a) -> "TestFunction":
        if not isinstance(a, FourVector):
            a = FourVector.from_array(a)
        return TestFunction(terms=tuple(
            replace(t, center=t.center + a) for t in self.terms))

    def scaled(self, c: complex) -> "TestFunction":
        return TestFunction(terms=tuple(
            replace(t, scale=t.scale * complex(c)) for t in self.terms))


def evaluate(f: TestFunction, x) -> np.ndarray:
    """f(x) in C^2 at a single point."""
    xv = x.as_array() if isinstance(x, FourVector) else np.asarray(x, dtype=float)
    val = np.zeros(2, dtype=complex)
    for t in f.terms:
        u = (xv - t.center.as_array()) / np.asarray(t.half_widths)
        prof = 1.0
        for uk in u:
            prof *= bump_profile(uk)
            if prof == 0.0:
                break
        if prof != 0.0:
            val += t.scale * prof * np.asarray(t.amplitude)
    return val


def evaluate_many(f: TestFunction, xs: np.ndarray) -> np.ndarray:
    """Vectorized f on points of shape (K, 4); returns (K, 2)."""
    xs = np.asarray(xs, dtype=float)
    out = np.zeros((xs.shape[0], 2), dtype=complex)
    for t in f.terms:
        u = (xs - t.center.as_array()) / np.asarray(t.half_widths)
        prof = (bump_profile(u[:, 0]) * bump_profile(u[:, 1])
                * bump_profile(u[:, 2]) * bump_profile(u[:, 3]))
        out += (t.scale * prof)[:, None] * np.asarray(t.amplitude)[None, :]
    return out


def _fourier_term(t: Bump, zeta: np.ndarray, order: int) -> complex:
    """Scalar factor of one bump's transform (without amplitude vector)."""
    c = t.center.as_array()
    r = np.asarray(t.half_widths)
    phase = 1j * (zeta[0] * c[0] - zeta[1] * c[1] - zeta[2] * c[2] - zeta[3] * c[3])
    w = np.array([zeta[0] * r[0], -zeta[1] * r[1], -zeta[2] * r[2], -zeta[3] * r[3]])
    prod = r[0] * r[1] * r[2] * r[3]
    b = 1.0 + 0.0j
    for wk in w:
        b *= _profile_transform_scalar(complex(wk), order)
    return FOURIER_NORM * t.scale * np.exp(phase) * prod * b


def fourier(f: TestFunction, zeta, order: int = PROFILE_ORDER) -> np.ndarray:
    """ft(zeta) in C^2 at one complexified four-vector argument."""
    z = np.asarray(zeta, dtype=complex).reshape(4)
    val = np.zeros(2, dtype=complex)
    for t in f.terms:
        val += _fourier_term(t, z, order) * np.asarray(t.amplitude)
    return val


def fourier_many(f: TestFunction, zetas: np.ndarray,
                 order: int = PROFILE_ORDER) -> np.ndarray:
    """Vectorized transform at arguments of shape (K, 4); returns (K, 2)."""
    z = np.asarray(zetas, dtype=complex)
    out = np.zeros((z.shape[0], 2), dtype=complex)
    u, a = profile_nodes(order)
    for t in f.terms:
        c = t.center.as_array()
        r = np.asarray(t.half_widths)
        phase = 1j * (z[:, 0] * c[0] - z[:, 1] * c[1]
                      - z[:, 2] * c[2] - z[:, 3] * c[3])
        w = np.stack([z[:, 0] * r[0], -z[:, 1] * r[1],
                      -z[:, 2] * r[2], -z[:, 3] * r[3]])
        b = np.ones(z.shape[0], dtype=complex)
        for k in range(4):
            b *= np.exp(1j * w[k][:, None] * u) @ a
        factor = FOURIER_NORM * t.scale * np.prod(r) * np.exp(phase) * b
        out += factor[:, None] * np.asarray(t.amplitude)[None, :]
    return out


@dataclass(frozen=True)
class PaleyWienerReport:
    c_n: float
    decay_rate: float       # delta: min over supports of (x^0 - |vec x|)
    worst_ratio: float      # max |ft| / envelope over the samples, = 1 at fit
    refine_ratio: float     # C_N at doubled sampling / C_N
    n_samples: int


def paley_wiener_check(f: TestFunction, n_order: int = 4,
                       n_samples: int = 200, seed: int = 0) -> PaleyWienerReport:
    """Fit the decay envelope C_N e^{-delta rho Im z} (1 + |z| rho)^{-N}.

    Samples ft(z p') on random shell rays with Im z >= 0.  The constant C_N is
    the smallest making the envelope a bound on the samples (so worst_ratio is
    1 by construction); refine_ratio reports its stability when the sample
    count doubles.  The check verifies existence and stability, not optimality
    of the constant.
    """
    delta = f.delta()

    def fit(count: int, rng_seed: int) -> float:
        rng = np.random.default_rng(rng_seed)
        best = 0.0
        for _ in range(count):
            mod = rng.uniform(0.3, 2.0)
            arg = rng.uniform(0.0, np.pi)
            z = mod * np.exp(1j * arg)
            rho = rng.uniform(0.1, 6.0)
            nhat = rng.normal(size=3)
            nhat /= np.linalg.norm(nhat)
            pprime = np.array([rho, *(rho * nhat)])
            val = np.linalg.norm(fourier(f, z * pprime))
            envelope = np.exp(-delta * rho * z.imag) / (1.0 + abs(z) * rho) ** n_order
            best = max(best, val / envelope)
        return best

    c_n = fit(n_samples, seed)
    c_n_fine = fit(2 * n_samples, seed + 1)
    return PaleyWienerReport(c_n=c_n, decay_rate=delta, worst_ratio=1.0,
                             refine_ratio=c_n_fine / c_n if c_n > 0 else 1.0,
                             n_samples=n_samples)


class TransformedFunction:
    """Poincare/SL(2,C)-wrapped test function (general A: slow path).

    evaluate is exact; fourier integrates e^{i(zeta,x)} f'(x) by a direct
    non-factorized 4D Gauss-Legendre rule over the bounding box of the
    transformed support, at reduced order.  slow_path is True so callers can
    warn about the cost.
    """

    slow_path = True

    def __init__(self, base: TestFunction, matrix: np.ndarray,
                 lorentz: np.ndarray, shift: np.ndarray, order: int = 16):
        self.base = base
        self.matrix = np.asarray(matrix, dtype=complex).reshape(2, 2)
        self.lorentz = np.asarray(lorentz, dtype=float).reshape(4, 4)
        self.shift = np.asarray(shift, dtype=float).reshape(4)
        self.order = order
        self._lorentz_inv = np.linalg.inv(self.lorentz)
        self._nodes = None

    def evaluate(self, x) -> np.ndarray:
        xv = x.as_array() if isinstance(x, FourVector) else np.asarray(x, dtype=float)
        y = self._lorentz_inv @ (xv - self.shift)
        return self.matrix @ evaluate(self.base, y)

    def _quad_nodes(self):
        """4D GL nodes/values over the transformed support's bounding box."""
        if self._nodes is not None:
            return self._nodes
        corners = []
        for t in self.base.terms:
            lo, hi = t.box_min(), t.box_max()
            for mask in range(16):
                corner = np.where([(mask >> k) & 1 for k in range(4)], hi, lo)
                corners.append(self.lorentz @ corner + self.shift)
        corners = np.array(corners)
        lo = corners.min(axis=0)
        hi = corners.max(axis=0)
        x1, w1 = np.polynomial.legendre.leggauss(self.order)
        axes = [(lo[k] + hi[k]) / 2 + (hi[k] - lo[k]) / 2 * x1 for k in range(4)]
        wts = [(hi[k] - lo[k]) / 2 * w1 for k in range(4)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 4)
        weight = (wts[0][:, None, None, None] * wts[1][None, :, None, None]
                  * wts[2][None, None, :, None] * wts[3][None, None, None, :]).reshape(-1)
        ys = (self._lorentz_inv @ (grid - self.shift).T).T
        fvals = (self.matrix @ evaluate_many(self.base, ys).T).T  # (K, 2)
        self._nodes = (grid, weight[:, None] * fvals)
        return self._nodes

    def rho_bandwidth(self, order: int = PROFILE_ORDER) -> float:
        """Resolvable shell radius of the box rule.  Only the oscillation
        across the box extent counts (the center phase factors out of the
        node sum exactly); the rule's own order governs, not the profile
        order."""
        from .quad import gl_bandwidth
        grid, _ = self._quad_nodes()
        half = float(np.max(grid.max(axis=0) - grid.min(axis=0)) / 2.0)
        return gl_bandwidth(self.order) / half

    def fourier_many(self, zetas: np.ndarray, order: int = PROFILE_ORDER,
                     chunk: int = 128) -> np.ndarray:
        grid, wf = self._quad_nodes()
        z = np.asarray(zetas, dtype=complex)
        out = np.empty((z.shape[0], 2), dtype=complex)
        sign = np.array([1.0, -1.0, -1.0, -1.0])
        for i in range(0, z.shape[0], chunk):
            zi = z[i:i + chunk]
            phase = np.exp(1j * (zi * sign) @ grid.T)     # (k, K)
            out[i:i + chunk] = FOURIER_NORM * phase @ wf
        return out

    def fourier(self, zeta) -> np.ndarray:
        return self.fourier_many(np.asarray(zeta, dtype=complex).reshape(1, 4))[0]


def transform(f: TestFunction, a_element=None, shift=None,
              kind: str = "psi", phase: float = 0.0):
    """Covariance action on smearing functions.

    Pure translations and gauge phases preserve the product form and return a
    TestFunction.  kind selects the slot: "psi" transforms with (A^T)^{-1} and
    gauge factor e^{+i phase}, "psibar" with the conjugate matrix and e^{-i
    phase}, so simultaneous transformation of both slots leaves vacuum
    two-point values invariant.  A general SL(2,C) element returns the
    slow-path wrapper.
    """
    from .minkowski import SL2Element, lorentz_from_sl2

    if kind not in ("psi", "psibar"):
        raise ValueError("kind must be 'psi' or 'psibar'")
    gauge = np.exp(1j * phase) if kind == "psi" else np.exp(-1j * phase)
    shift_vec = np.zeros(4) if shift is None else (
        shift.as_array() if isinstance(shift, FourVector)
        else np.asarray(shift, dtype=float).reshape(4))

    identity = a_element is None or (
        isinstance(a_element, SL2Element)
        and np.allclose(a_element.matrix(), np.eye(2), atol=1e-15))
    if identity:
        out = f if not np.any(shift_vec) else f.translate(shift_vec)
        if gauge != 1.0:
            out = out.scaled(gauge)
        return out

    amat = a_element.matrix()
    m = np.linalg.inv(amat.T)
    if kind == "psibar":
        m = m.conj()
    lam = lorentz_from_sl2(a_element)
    wrapped = TransformedFunction(base=f.scaled(gauge), matrix=m,
                                  lorentz=lam, shift=shift_vec)
    return wrapped


def random_family(seed: int, count: int, margin: float = 0.2,
                  max_terms: int = 3, center_time: tuple[float, float] = (1.2, 2.0),
                  width_range: tuple[float, float] = (0.15, 0.4)) -> list[TestFunction]:
    """Deterministic family of test functions with cone margin >= margin."""
    if margin <= 0:
        raise ValueError("margin must be positive")
    rng = np.random.default_rng(seed)
    fam = []
    while len(fam) < count:
        n_terms = int(rng.integers(1, max_terms + 1))
        terms = []
        ok = True
        for _ in range(n_terms):
            r = rng.uniform(*width_range, size=4)
            c0 = rng.uniform(*center_time)
            cs = rng.uniform(-0.25, 0.25, size=3)
            center = FourVector(c0, *cs)
            amp = rng.normal(size=2) + 1j * rng.normal(size=2)
            scale = rng.uniform(0.5, 1.5) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            try:
                b = Bump(center=center, half_widths=tuple(r),
                         amplitude=tuple(amp), scale=complex(scale))
            except ValueError:
                ok = False
                break
            if b.cone_margin() < margin:
                ok = False
                break
            terms.append(b)
        if ok and terms:
            fam.append(TestFunction(terms=tuple(terms)))
    return fam


TESTFUNCTION_SCHEMA = {
    "type": "object",
    "required": ["terms"],
    "additionalProperties": False,
    "properties": {
        "terms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["center", "half_widths", "amplitude", "scale"],
                "additionalProperties": False,
                "properties": {
                    "center": {"type": "array", "minItems": 4, "maxItems": 4,
                               "items": {"type": "number"}},
                    "half_widths": {"type": "array", "minItems": 4, "maxItems": 4,
                                    "items": {"type": "number", "exclusiveMinimum": 0}},
                    "amplitude": {
                        "type": "array", "minItems": 2, "maxItems": 2,
                        "items": {"type": "array", "minItems": 2, "maxItems": 2,
                                  "items": {"type": "number"}},
                    },
                    "scale": {"type": "array", "minItems": 2, "maxItems": 2,
                              "items": {"type": "number"}},
                },
            },
        },
    },
}


def testfunction_to_dict(f: TestFunction) -> dict:
    return {
        "terms": [
            {
                "center": list(t.center.as_array()),
                "half_widths": list(t.half_widths),
                "amplitude": [[a.real, a.imag] for a in t.amplitude],
                "scale": [t.scale.real, t.scale.imag],
            }
            for t in f.terms
        ]
    }


def testfunction_from_dict(d: dict) -> TestFunction:
    terms = []
    for td in d["terms"]:
        terms.append(Bump(
            center=FourVector.from_array(td["center"]),
            half_widths=tuple(float(h) for h in td["half_widths"]),
            amplitude=tuple(complex(a[0], a[1]) for a in td["amplitude"]),
            scale=complex(td["scale"][0], td["scale"][1]),
        ))
    return TestFunction(terms=tuple(terms))
