"""Internal performance core: momentum-space fields on shell grids and the
incremental evaluation of the alternating heat-series.

Everything here works on the flattened shell grids from quad.py.  The two
facts this module exploits:

* For a product bump, the transform at argument z*p' factorizes per axis into
  B(z*q_k) with q_0 = rho*r0, q_i = -rho*nhat_i*r_i, times the center phase
  e^{i z rho gamma} with gamma = c0 - nhat.cvec.

* Along the series z_n = 1 + i n lam the per-node factors are geometric in n:
  e^{i z_n q u} = e^{i q u} (e^{-lam q u})^n, so stepping n -> n+1 is an
  elementwise multiply, never a fresh exp.  Overflow is impossible after
  rebalancing: each axis factor is scaled by exp(-lam*sigma_k) with
  sigma_k = |q_k| u_max, and the surplus decay exp(-lam(rho gamma - sum
  sigma_k)) is nonnegative exactly because the supports sit strictly inside
  the forward cone (rho gamma >= rho * (R(nhat) + delta) > sum |q_k|).

The companion angles pi - phi_n need no second stream: profiles are real, so
the z'_n = -1 + i n lam branch is the complex conjugate of the z_n branch.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .quad import QuadConfig, ShellGrid
from .testfn import (PROFILE_ORDER, FOURIER_NORM, TestFunction,
                     profile_nodes)

__all__ = [
    "bandlimit",
    "field_on_grid",
    "pauli_contract",
    "fermi_weight",
    "series_tables",
]

_CHUNK = 32768


def bandlimit(cfg: QuadConfig, *functions, arg_scale: float = 1.0,
              order: int = PROFILE_ORDER) -> QuadConfig:
    """Config with the radial interval truncated to the resolvable range.

    Shell integrands built from transforms of compactly supported functions
    must not be sampled past the evaluating rule's bandwidth: out there the
    computed transform is noise that does not decay, and on a semi-infinite
    map the noise integrates to garbage that grows with the radial order.
    Truncation is safe because every integrand here carries at least two
    transform factors, whose true product at the cut is below 1e-8 of peak
    (single factor ~1e-4) and falls off exponentially beyond.

    arg_scale covers evaluations at scaled arguments z*p': oscillation speeds
    up by |z|, so the resolvable radius shrinks by the same factor.  A config
    with rho_max already set is returned unchanged.
    """
    if cfg.rho_max is not None:
        return cfg
    if not functions:
        raise ValueError("bandlimit needs at least one smearing function")
    cut = min(f.rho_bandwidth(order) for f in functions) / arg_scale
    return replace(cfg, rho_max=cut)


def fermi_weight(x: np.ndarray) -> np.ndarray:
    """1 / (1 + e^x), overflow-safe for large |x|."""
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = np.exp(-x[pos]) / (1.0 + np.exp(-x[pos]))
    out[~pos] = 1.0 / (1.0 + np.exp(x[~pos]))
    return out


class _TermGeometry:
    """Per-(bump, grid) arrays for the factored transform at z * p'."""

    def __init__(self, term, grid: ShellGrid):
        c = term.center.as_array()
        r = np.asarray(term.half_widths)
        rho = grid.rho
        # w_k(z) = z * q_k per axis; q carries the transform's sign convention
        self.q = np.empty((4, grid.size))
        self.q[0] = rho * r[0]
        for i in range(3):
            self.q[i + 1] = -rho * grid.nhat[:, i] * r[i + 1]
        self.rho_gamma = rho * (c[0] - grid.nhat @ c[1:])
        self.const = FOURIER_NORM * float(np.prod(r))
        self.scale = complex(term.scale)
        self.amp = np.asarray(term.amplitude, dtype=complex)
        self.key = (tuple(c), tuple(r))   # profile identity for dedup


def _term_profile_chunk(geo: _TermGeometry, sl: slice, z: complex,
                        u: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Scalar profile P(z p') on a node chunk: everything except scale*amp."""
    re, im = z.real, z.imag
    if im < -1e-12:
        raise ValueError("field arguments must stay in the closed upper half-plane")
    im = max(im, 0.0)
    q = geo.q[:, sl]
    rg = geo.rho_gamma[sl]
    prod = np.ones(q.shape[1], dtype=complex)
    if im == 0.0:
        for k in range(4):
            prod *= np.exp(1j * re * q[k][:, None] * u) @ a
        return geo.const * np.exp(1j * re * rg) * prod
    u_max = float(np.max(np.abs(u)))
    sigma_sum = np.zeros(q.shape[1])
    for k in range(4):
        sigma = np.abs(q[k]) * u_max
        sigma_sum += sigma
        expo = (1j * re - im) * q[k][:, None] * u - im * sigma[:, None]
        prod *= np.exp(expo) @ a
    # leftover decay is >= 0 by the forward-cone support condition
    leftover = im * (rg - sigma_sum)
    return geo.const * np.exp(1j * re * rg - leftover) * prod


def field_on_grid(f, grid: ShellGrid, z: complex,
                  order: int = PROFILE_ORDER) -> np.ndarray:
    """ft(z * p') on all grid nodes, shape (N, 2).

    Accepts TestFunction (fast factored path) or any object with a
    fourier_many method (slow path, e.g. TransformedFunction).
    """
    if isinstance(f, TestFunction):
        u, a = profile_nodes(order)
        out = np.zeros((grid.size, 2), dtype=complex)
        for term in f.terms:
            geo = _TermGeometry(term, grid)
            for start in range(0, grid.size, _CHUNK):
                sl = slice(start, min(start + _CHUNK, grid.size))
                p = _term_profile_chunk(geo, sl, complex(z), u, a)
                out[sl] += (geo.scale * p)[:, None] * geo.amp[None, :]
        return out
    zetas = complex(z) * grid.pprime().astype(complex)
    return f.fourier_many(zetas, order=order)


def pauli_contract(gf: np.ndarray, ff: np.ndarray, grid: ShellGrid,
                   extra: np.ndarray | None = None,
                   weyl: str | None = None,
                   z_g: complex = 1.0, z_f: complex = -1.0) -> complex:
    """sum_nodes weight * rho * g^T phat_M f, with optional extras.

    phat_M is the lowered spinor matrix of the unit shell ray (1, nhat).
    extra multiplies the weight pointwise (Fermi factors).  weyl replaces the
    kernel by the on-shell-null sandwich: "psi" substitutes the g-slot by its
    momentum-multiplied version (-g^T (arg^M) phat_M f with arg = z_g p'),
    "psibar" the f-slot (g^T phat_M (arg^M) f with arg = z_f p'); both reduce
    to (p,p) Id on the shell, so the result is pure quadrature roundoff.
    """
    n1, n2, n3 = grid.nhat[:, 0], grid.nhat[:, 1], grid.nhat[:, 2]
    w = grid.weight * grid.rho
    if extra is not None:
        w = w * extra
    if weyl is None:
        s = (gf[:, 0] * ff[:, 0] * (1.0 + n3)
             + gf[:, 0] * ff[:, 1] * (n1 - 1j * n2)
             + gf[:, 1] * ff[:, 0] * (n1 + 1j * n2)
             + gf[:, 1] * ff[:, 1] * (1.0 - n3))
        return complex(np.sum(w * s))
    null_sq = 1.0 - (n1 * n1 + n2 * n2 + n3 * n3)   # (phat, phat), ~roundoff
    dot = gf[:, 0] * ff[:, 0] + gf[:, 1] * ff[:, 1]
    if weyl == "psi":
        s = -z_g * grid.rho * null_sq * dot
    elif weyl == "psibar":
        s = z_f * grid.rho * null_sq * dot
    else:
        raise ValueError("weyl must be None, 'psi' or 'psibar'")
    return complex(np.sum(w * s))


class _SlotTerms:
    """Slot description referencing deduplicated profiles."""

    def __init__(self, f: TestFunction, profiles: dict):
        self.scales = []
        self.amps = []
        self.profile_idx = []
        for term in f.terms:
            key = (tuple(term.center.as_array()), tuple(term.half_widths))
            if key not in profiles:
                profiles[key] = (len(profiles), term)
            self.profile_idx.append(profiles[key][0])
            self.scales.append(complex(term.scale))
            self.amps.append(np.asarray(term.amplitude, dtype=complex))


def series_tables(fslot: TestFunction, gslot: TestFunction, lam: float,
                  grid: ShellGrid, *, order: int = PROFILE_ORDER,
                  rel_tol: float = 1e-9, reference: str = "leading",
                  max_terms: int = 4000, weyl: str | None = None,
                  block: int = 4096, eps_floor: float = 0.0):
    """Tables T_n, T'_n of the heat-series for the pair (fslot, gslot).

    T_n  = shell integral of  g(z_n p')^T p'_M f(z'_n p'),
    T'_n = shell integral of  g(z'_n p')^T p'_M f(z_n p'),
    z_n = 1 + i n lam, z'_n = -1 + i n lam (no 2 pi prefactor here).

    Terms are accumulated blockwise over nodes; each block advances its
    geometric state until its own contributions stay below an equal share of
    the absolute tolerance for three consecutive steps.  Returns (TA, TB,
    eps_abs) where eps_abs = rel_tol * (reference magnitude): the n = 0 pair
    for reference="leading", the n = 1 pair for reference="tail" (used when
    the caller consumes only the n >= 1 part, e.g. vacuum-limit distances).
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    if reference not in ("leading", "tail"):
        raise ValueError("reference must be 'leading' or 'tail'")
    u, a = profile_nodes(order)
    u_max = float(np.max(np.abs(u)))

    # reference scale from one-shot evaluations
    g_p = field_on_grid(gslot, grid, 1.0, order)
    f_m = field_on_grid(fslot, grid, -1.0, order)
    g_m = field_on_grid(gslot, grid, -1.0, order)
    f_p = field_on_grid(fslot, grid, 1.0, order)
    t0 = pauli_contract(g_p, f_m, grid, weyl=weyl, z_g=1.0, z_f=-1.0)
    t0p = pauli_contract(g_m, f_p, grid, weyl=weyl, z_g=-1.0, z_f=1.0)
    if reference == "leading":
        scale = max(abs(t0), abs(t0p))
    else:
        z1, z1p = complex(1.0, lam), complex(-1.0, lam)
        t1 = pauli_contract(field_on_grid(gslot, grid, z1, order),
                            field_on_grid(fslot, grid, z1p, order),
                            grid, weyl=weyl, z_g=z1, z_f=z1p)
        t1p = pauli_contract(field_on_grid(gslot, grid, z1p, order),
                             field_on_grid(fslot, grid, z1, order),
                             grid, weyl=weyl, z_g=z1p, z_f=z1)
        scale = max(abs(t1), abs(t1p))
    # eps_floor lets callers whose terms all vanish (Weyl-null sandwiches)
    # terminate instead of chasing roundoff down to max_terms
    eps_abs = max(rel_tol * max(scale, 1e-300), eps_floor)

    profiles: dict = {}
    fterms = _SlotTerms(fslot, profiles)
    gterms = _SlotTerms(gslot, profiles)
    geo_list = [None] * len(profiles)
    for _, (idx, term) in profiles.items():
        geo_list[idx] = _TermGeometry(term, grid)

    n_blocks = (grid.size + block - 1) // block
    eps_block = eps_abs / (4.0 * n_blocks)
    ta: list[complex] = []
    tb: list[complex] = []

    for b in range(n_blocks):
        sl = slice(b * block, min((b + 1) * block, grid.size))
        sub = ShellGrid(rho=grid.rho[sl], nhat=grid.nhat[sl],
                        weight=grid.weight[sl])
        states = []
        for geo in geo_list:
            q = geo.q[:, sl]
            rg = geo.rho_gamma[sl]
            axis_state = []
            axis_decay = []
            sigma_sum = np.zeros(q.shape[1])
            for k in range(4):
                sigma = np.abs(q[k]) * u_max
                sigma_sum += sigma
                axis_state.append(np.exp(1j * q[k][:, None] * u))
                axis_decay.append(np.exp(-lam * (q[k][:, None] * u
                                                 + sigma[:, None])))
            leftover = np.exp(-lam * (rg - sigma_sum))
            base = geo.const * np.exp(1j * rg)
            states.append({"axis": axis_state, "decay": axis_decay,
                           "leftpow": np.ones(q.shape[1]), "left": leftover,
                           "base": base})

        quiet = 0
        for n in range(max_terms):
            pvals = []
            for st in states:
                p = st["base"] * st["leftpow"]
                for k in range(4):
                    p = p * (st["axis"][k] @ a)
                pvals.append(p)
            nb = sub.size
            g_a = np.zeros((nb, 2), dtype=complex)
            f_a = np.zeros((nb, 2), dtype=complex)
            g_b = np.zeros((nb, 2), dtype=complex)
            f_b = np.zeros((nb, 2), dtype=complex)
            for scale_t, amp_t, idx in zip(gterms.scales, gterms.amps,
                                           gterms.profile_idx):
                g_a += (scale_t * pvals[idx])[:, None] * amp_t[None, :]
                g_b += (scale_t * np.conj(pvals[idx]))[:, None] * amp_t[None, :]
            for scale_t, amp_t, idx in zip(fterms.scales, fterms.amps,
                                           fterms.profile_idx):
                f_a += (scale_t * np.conj(pvals[idx]))[:, None] * amp_t[None, :]
                f_b += (scale_t * pvals[idx])[:, None] * amp_t[None, :]
            zn = complex(1.0, n * lam)
            znp = complex(-1.0, n * lam)
            t_a = pauli_contract(g_a, f_a, sub, weyl=weyl, z_g=zn, z_f=znp)
            t_b = pauli_contract(g_b, f_b, sub, weyl=weyl, z_g=znp, z_f=zn)
            if n >= len(ta):
                ta.append(0.0 + 0.0j)
                tb.append(0.0 + 0.0j)
            ta[n] += t_a
            tb[n] += t_b
            if max(abs(t_a), abs(t_b)) < eps_block:
                quiet += 1
            else:
                quiet = 0
            if quiet >= 3 and n >= 2:
                break
            for st in states:
                st["leftpow"] *= st["left"]
                for k in range(4):
                    st["axis"][k] *= st["decay"][k]
        else:
            from .quad import NonConvergenceError
            raise NonConvergenceError(
                f"heat series block failed to settle within {max_terms} terms "
                f"(lam={lam}, eps_block={eps_block:.3e})")

    return ta, tb, eps_abs
