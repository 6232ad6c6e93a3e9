"""Plancherel energy of radially profiled initial data and its polynomial decay."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.optimize import linear_sum_assignment

from .errors import AssumptionViolated, QuadratureFailure, RegressionUnstable
from .material import MaterialSpec, classify_dissipativity
from .modal import build_modal, spectral_decomposition

DEFAULT_MARGIN = 0.05
SMOOTH_PHASE = 0.5


@dataclass(frozen=True)
class InitialDataProfile:
    """Radial profile ``g(k) = amplitude * k**p * (1 + k)**-(p + s + 3/2 + margin)``.

    Applied as ``E0 = H0 = g(|k|) e1`` with every auxiliary field zero. With
    ``support = (a, b)`` the profile is cut to ``a <= |k| <= b``.
    """

    p: float
    s: float
    tail_margin: float = DEFAULT_MARGIN
    amplitude: float = 1.0
    support: tuple[float, float] | None = None

    def __post_init__(self):
        if self.p < 0 or self.s < 0:
            raise ValueError("p and s must be nonnegative")
        if self.tail_margin <= 0:
            raise ValueError("tail_margin must be positive")

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        g = self.amplitude * k**self.p * (1 + k) ** -(self.p + self.s + 1.5 + self.tail_margin)
        if self.support is not None:
            g = np.where((k >= self.support[0]) & (k <= self.support[1]), g, 0.0)
        return g

    def membership_bound(self, k=None) -> float:
        """Sampled ``sup |k|**-p (1 + |k|**p) g(|k|)``."""
        k = np.geomspace(1e-8, 1e8, 4001) if k is None else np.asarray(k, dtype=float)
        return float(np.max(k**-self.p * (1 + k**self.p) * self(k)))

    def sobolev_norm_sq(self) -> float:
        """``int (1 + k**2)**s g**2 k**2 dk``."""
        f = lambda k: (1 + k * k) ** self.s * float(self(k)) ** 2 * k * k
        a, _ = integrate.quad(f, 0, 1, limit=200)
        b, _ = integrate.quad(f, 1, np.inf, limit=200)
        return a + b


# ------------------------------------------------------------ modal table


@dataclass(frozen=True)
class ModalTable:
    """Per-node modal expansion of the profiled data, shared by all times.

    For node ``i`` and polarization block ``b``: ``omega[b, i, n]`` and the pair
    weights ``em[b, i, n, m]`` (electromagnetic) and ``full[b, i, n, m]`` (all
    fields), so that the block energy at time ``t`` is
    ``sum_nm w[n, m] exp(-i (omega_n - conj(omega_m)) t)``.
    """

    k: np.ndarray
    regions: np.ndarray  # 0 = LF, 1 = MF, 2 = HF per node
    omega: np.ndarray
    em: np.ndarray
    full: np.ndarray
    cuts: tuple[float, float]
    head_rate: float
    tail_rate: float


def region_cuts(spec: MaterialSpec) -> tuple[float, float]:
    res = [o.resonance for o in spec.oscillators if o.resonance > 0]
    return 0.1 * (min(res) if res else 1.0), 10 * (max(res) if res else 1.0)


def _grid(cuts, points, kmin, kmax):
    m, M = cuts
    pieces = [(kmin, m), (m, M), (M, kmax)]
    decades = [math.log10(b / a) for a, b in pieces]
    mf_share = max(0.3, decades[1] / sum(decades))
    shares = [decades[0] / (decades[0] + decades[2]) * (1 - mf_share), mf_share,
              decades[2] / (decades[0] + decades[2]) * (1 - mf_share)]
    nodes, regions = [], []
    for r, ((a, b), sh) in enumerate(zip(pieces, shares)):
        segs = max(2, 2 * round(sh * (points - 1) / 2))  # even: Simpson pairs
        ks = np.geomspace(a, b, segs + 1)
        if nodes:
            ks = ks[1:]
        nodes.append(ks)
        regions.append(np.full(len(ks), r))
    return np.concatenate(nodes), np.concatenate(regions)


def _modes(spec, k, sign, u0):
    """Eigenvalues and rank-one projections of ``u0`` for one block.

    ``k`` is nudged when an eigenvector pair is nearly self-orthogonal (a defective
    point, where rank-one projectors do not exist).
    """
    for nudge in (0.0, 1e-7, -1e-7, 1e-5):
        sys = build_modal(spec, k * (1 + nudge), sign)
        dec = spectral_decomposition(sys, degeneracy_rtol=0.0)
        v, w = dec.right, dec.left
        overlap = np.einsum("in,in->n", w.conj(), v)
        if np.min(np.abs(overlap)) > 1e-8:
            break
    coeff = (v * ((w.conj().T @ u0) / overlap)[None, :]).T  # (n, dim)
    return dec.eigenvalues, coeff, sys.weights


def modal_table(spec: MaterialSpec, profile: InitialDataProfile, points: int = 2000,
                kmin: float | None = None, kmax: float | None = None,
                threads: int = 1) -> ModalTable:
    """Decompose the data at every node of a composite log grid.

    The grid is split at the region cuts and eigenvalues are matched between
    neighbouring nodes so each pair weight varies continuously along ``k``.
    """
    cuts = region_cuts(spec)
    kmin = kmin or 1e-6 * cuts[0] / 0.1
    kmax = kmax or 1e8 * max(1.0, cuts[1] / 10)
    k, regions = _grid(cuts, points, kmin, kmax)
    dim = 2 + 2 * spec.n_oscillators
    omegas = np.empty((2, len(k), dim), dtype=complex)
    em = np.empty((2, len(k), dim, dim), dtype=complex)
    full = np.empty_like(em)
    for b, sign in enumerate((1, -1)):
        # E.e1 lives in the + block, H.e1 in the - block
        slot = 0 if sign == 1 else 1

        def node(kk, sign=sign, slot=slot):
            u0 = np.zeros(dim, dtype=complex)
            u0[slot] = float(profile(kk))
            return _modes(spec, kk, sign, u0)

        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                raw = list(pool.map(node, k))
        else:
            raw = [node(kk) for kk in k]
        prev = None
        for i, (w, c, weights) in enumerate(raw):
            if prev is not None:
                r, col = linear_sum_assignment(np.abs(prev[:, None] - w[None, :]))
                order = col[np.argsort(r)]
                w, c = w[order], c[order]
            prev = w
            omegas[b, i] = w
            wc = c * weights[None, :]
            full[b, i] = 0.5 * wc @ c.conj().T
            em[b, i] = 0.5 * (wc[:, :2] @ c[:, :2].conj().T)
    # in log k the integrand behaves like k**(2p+3) below the grid and k**-(2s+2 margin) above
    head = 2 * profile.p + 3
    tail = 2 * profile.s + 2 * profile.tail_margin
    return ModalTable(k, regions, omegas, em, full, cuts, head, tail)


# --------------------------------------------------------------- quadrature


def _filon_linear(a0, a1, z0, z1, h):
    """``h * int_0^1 (a0 + (a1 - a0) tau) exp(z0 + (z1 - z0) tau) dtau``."""
    d = z1 - z0
    small = np.abs(d) < 1e-3
    ds = np.where(small, 1.0, d)
    e0, e1 = np.exp(z0), np.exp(z1)
    # written with exp(z0), exp(z1) only so a steep decay cannot overflow
    i0 = np.where(small, e0 * (1 + d / 2 + d * d / 6), (e1 - e0) / ds)
    i1 = np.where(small, e0 * (0.5 + d / 3 + d * d / 8), (e1 * (d - 1) + e0) / (ds * ds))
    return h * (a0 * i0 + (a1 - a0) * i1)


def _integrate(table: ModalTable, weights: np.ndarray, t: float) -> np.ndarray:
    """Energy split by region: Simpson in ``log k`` where the phases are smooth,
    exact linear-exponential (Filon) integration where they are not.

    Beyond the grid ends the integrand follows the profile's power law; those
    pieces are added in closed form for pairs whose phase is not oscillating.
    """
    u = np.log(table.k)
    out = np.zeros(3)
    h = np.diff(u)[0::2][:, None, None]
    region = table.regions[1::2]
    for b in range(2):
        w = table.omega[b]
        z = -1j * (w[:, :, None] - w[:, None, :].conj()) * t  # (K, n, m)
        amp = weights[b] * (4 * math.pi * table.k**3)[:, None, None]
        z0, z1, z2 = z[0:-2:2], z[1::2], z[2::2]
        a0, a1, a2 = amp[0:-2:2], amp[1::2], amp[2::2]
        spread = np.maximum(np.abs(z1 - z0), np.abs(z2 - z0))
        simpson = h / 3 * (a0 * np.exp(z0) + 4 * a1 * np.exp(z1) + a2 * np.exp(z2))
        filon = _filon_linear(a0, a1, z0, z1, h) + _filon_linear(a1, a2, z1, z2, h)
        seg = np.where(spread <= SMOOTH_PHASE, simpson, filon).sum(axis=(1, 2)).real
        out += np.bincount(region, weights=seg, minlength=3)
        for node, rate, reg in ((0, table.head_rate, 0), (-1, table.tail_rate, 2)):
            calm = np.abs(z[node].imag) <= SMOOTH_PHASE
            out[reg] += float(np.sum(np.where(calm, amp[node] * np.exp(z[node]), 0)).real) / rate
    return out


def total_energy(spec: MaterialSpec, profile: InitialDataProfile, t: float,
                 table: ModalTable | None = None) -> float:
    """Electromagnetic energy ``1/2 int (eps0 |E|**2 + mu0 |H|**2)`` at time ``t``."""
    table = table or modal_table(spec, profile)
    return float(_integrate(table, table.em, t).sum())


@dataclass(frozen=True)
class EnergyTrace:
    """Energies on a time grid; ``fitted_exponent`` is the decay rate ``-slope``."""

    times: np.ndarray
    energies: np.ndarray
    energy_total: np.ndarray
    lf: np.ndarray
    mf: np.ndarray
    hf: np.ndarray
    cuts: tuple[float, float]
    fitted_exponent: float | None = None
    fit_window: tuple[float, float] | None = None
    r2: float | None = None

    def rows(self):
        for i in range(len(self.times)):
            yield (self.times[i], self.energies[i], self.energy_total[i],
                   self.lf[i], self.mf[i], self.hf[i])


def energy_trace(spec: MaterialSpec, profile: InitialDataProfile, t_grid,
                 table: ModalTable | None = None, fit_window=None,
                 points: int = 2000, threads: int = 1) -> EnergyTrace:
    """Energy at every time of ``t_grid``.

    The power-law fit uses ``fit_window`` (default: the last sampled decade);
    ``fit_window=False`` skips it.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0) or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be nonnegative and increasing")
    table = table or modal_table(spec, profile, points=points, threads=threads)
    parts = np.array([_integrate(table, table.em, t) for t in t_grid])
    tot = np.array([_integrate(table, table.full, t).sum() for t in t_grid])
    energies = parts.sum(axis=1)
    if not np.all(np.isfinite(energies)):
        raise QuadratureFailure("non-finite energy in radial quadrature")
    trace = EnergyTrace(t_grid, energies, tot, parts[:, 0], parts[:, 1], parts[:, 2], table.cuts)
    positive = t_grid[t_grid > 0]
    if fit_window is not False and len(positive) >= 3:
        window = fit_window or (max(positive[0], positive[-1] / 10), positive[-1])
        slope, r2 = fit_decay_exponent(trace, window)
        trace = EnergyTrace(**{**trace.__dict__, "fitted_exponent": -slope,
                               "fit_window": tuple(window), "r2": r2})
    return trace


def fit_decay_exponent(trace: EnergyTrace, window, r2_min: float = 0.99) -> tuple[float, float]:
    """Least-squares slope of ``log E`` against ``log t`` on ``window``; returns (slope, r2)."""
    lo, hi = window
    mask = (trace.times >= lo * (1 - 1e-12)) & (trace.times <= hi * (1 + 1e-12)) & (trace.times > 0)
    t, e = trace.times[mask], trace.energies[mask]
    if len(t) < 2:
        raise ValueError("fit window holds fewer than two samples")
    if np.any(e <= 0):
        raise RegressionUnstable("non-positive energy inside the fit window")
    from .dispersion import loglog_fit

    slope, _, r2 = loglog_fit(t, e)
    if r2 < r2_min:
        raise RegressionUnstable(f"decay fit R^2={r2:.4f} below {r2_min}", r2=r2)
    return slope, r2


def fit_exponential_rate(trace: EnergyTrace, window, r2_min: float = 0.99) -> tuple[float, float]:
    """Least-squares rate ``r`` of ``E ~ exp(-r t)`` on ``window``; returns (rate, r2)."""
    lo, hi = window
    mask = (trace.times >= lo) & (trace.times <= hi)
    t, e = trace.times[mask], trace.energies[mask]
    if len(t) < 2 or np.any(e <= 0):
        raise RegressionUnstable("exponential fit needs two or more positive samples")
    slope, icpt = np.polyfit(t, np.log(e), 1)
    resid = np.log(e) - (slope * t + icpt)
    ss = np.sum((np.log(e) - np.log(e).mean()) ** 2)
    r2 = 1 - np.sum(resid**2) / ss if ss > 0 else 1.0
    if r2 < r2_min:
        raise RegressionUnstable(f"exponential fit R^2={r2:.4f} below {r2_min}", r2=r2)
    return float(-slope), float(r2)


def predicted_exponent(spec: MaterialSpec, profile: InitialDataProfile) -> float:
    """``min(s_eff, p + 3/2)`` with ``s_eff = s`` (strong) or ``s/2`` (weak dissipation)."""
    cls = classify_dissipativity(spec)
    if not cls["dissipative"]:
        raise AssumptionViolated("dissipative", "decay rates need some damping > 0")
    s_eff = profile.s / 2 if cls["weakly_dissipative"] else profile.s
    return min(s_eff, profile.p + 1.5)


def initial_energy(spec: MaterialSpec, profile: InitialDataProfile) -> float:
    """``1/2 * 4 pi int (eps0 + mu0) g**2 k**2 dk`` by adaptive quadrature."""
    f = lambda k: float(profile(k)) ** 2 * k * k
    a, _ = integrate.quad(f, 0, 1, limit=400, epsrel=1e-12)
    b, _ = integrate.quad(f, 1, np.inf, limit=400, epsrel=1e-12)
    return 0.5 * 4 * math.pi * (spec.eps0 + spec.mu0) * (a + b)
