"""Dispersion relation ``D(omega) = |k|**2``: roots, branches, bands, asymptotics."""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import linear_sum_assignment

from .errors import (
    AssumptionViolated,
    BranchSwapSuspected,
    DerivativeVanishes,
    RegressionUnstable,
)
from .material import (
    CLUSTER_RTOL,
    MaterialSpec,
    RationalSymbol,
    StructureReport,
    classify_dissipativity,
    dispersion_symbol,
    eval_epsilon,
    eval_mu,
    expand,
    poles_and_zeros,
    validate_assumptions,
)

RESIDUAL_TOL = 1e-9


@functools.lru_cache(maxsize=256)
def symbol(spec: MaterialSpec) -> RationalSymbol:
    return dispersion_symbol(spec)


@functools.lru_cache(maxsize=256)
def structure(spec: MaterialSpec) -> StructureReport:
    return validate_assumptions(spec)


def require_assumptions(spec: MaterialSpec, allow_drude: bool = True) -> StructureReport:
    """Raise :class:`AssumptionViolated` unless assumptions 1 and 3 hold.

    Assumption 2 (no pole at 0) only produces a warning when ``allow_drude``.
    """
    rep = structure(spec)
    for flag in ("assumption1_ok", "assumption3_ok"):
        if not getattr(rep, flag):
            raise AssumptionViolated(flag)
    if not rep.assumption2_ok:
        if not allow_drude:
            raise AssumptionViolated("assumption2_ok")
        warnings.warn("medium has a Drude term (pole at omega = 0)", stacklevel=3)
    return rep


def dispersion_polynomial(spec: MaterialSpec, k_abs: float) -> np.ndarray:
    """Ascending coefficients in ``s = -i omega`` of ``num(D) - k**2 den(D)``."""
    sym = symbol(spec)
    k2 = float(k_abs) ** 2
    n = max(len(sym.numerator), len(sym.denominator))
    num = np.pad(sym.numerator, (0, n - len(sym.numerator)))
    den = np.pad(sym.denominator, (0, n - len(sym.denominator)))
    return num - k2 * den


def _backward_error(coeffs, r) -> float:
    absr = abs(r)
    scale = sum(abs(c) * absr**i for i, c in enumerate(coeffs))
    return abs(P.polyval(r, coeffs)) / scale if scale else 0.0


def _newton(coeffs, r, steps=2):
    d1 = P.polyder(coeffs)
    d2 = P.polyder(d1)
    best, best_err = r, _backward_error(coeffs, r)
    for _ in range(steps):
        f, fp = P.polyval(r, coeffs), P.polyval(r, d1)
        if fp == 0:
            break
        if abs(fp) < 1e-8 * max(abs(f), 1e-300) ** 0.5:
            # near-double root: Halley step
            fpp = P.polyval(r, d2)
            denom = 2 * fp * fp - f * fpp
            if denom == 0:
                break
            r = r - 2 * f * fp / denom
        else:
            r = r - f / fp
        err = _backward_error(coeffs, r)
        if err < best_err:
            best, best_err = r, err
    return best


def _sort_roots(roots):
    return np.array(sorted(roots, key=lambda w: (w.real, w.imag)), dtype=complex)


# ------------------------------------------------------- extended precision


def _mp_law(oscillators):
    dens = [[mpmath.mpf(o.resonance) ** 2, mpmath.mpf(o.damping), mpmath.mpf(1)]
            for o in oscillators]
    den = [mpmath.mpf(1)]
    for d in dens:
        den = _mp_mul(den, d)
    num = list(den)
    for j, o in enumerate(oscillators):
        term = [mpmath.mpf(o.coupling) ** 2]
        for i, d in enumerate(dens):
            if i != j:
                term = _mp_mul(term, d)
        num = _mp_add(num, term)
    return num, den


def _mp_mul(a, b):
    out = [mpmath.mpf(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _mp_add(a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return [x + y for x, y in zip(a, b)]


def _mp_polynomial(spec, k_abs):
    ne, de = _mp_law(spec.electric)
    nm, dm = _mp_law(spec.magnetic)
    num = _mp_mul([0, 0, -mpmath.mpf(spec.eps0) * mpmath.mpf(spec.mu0)], _mp_mul(ne, nm))
    den = _mp_mul(de, dm)
    while len(num) > 1 and len(den) > 1 and num[0] == 0 and den[0] == 0:
        num, den = num[1:], den[1:]
    k2 = mpmath.mpf(k_abs) ** 2
    return _mp_add(num, [-k2 * c for c in den])


def _mp_eval(coeffs, x):
    acc = mpmath.mpc(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _mp_polish(coeffs, starts, dps):
    dcoeffs = [i * c for i, c in enumerate(coeffs)][1:]
    out = []
    with mpmath.workdps(dps):
        tol = mpmath.mpf(10) ** (-(dps - 8))
        for r0 in starts:
            r = mpmath.mpc(r0)
            for _ in range(80):
                fp = _mp_eval(dcoeffs, r)
                if fp == 0:
                    break
                step = _mp_eval(coeffs, r) / fp
                r -= step
                if abs(step) <= tol * max(1, abs(r)):
                    break
            out.append(r)
        # Newton may collapse two starts onto one root; fall back to a global solver
        distinct = all(abs(out[i] - out[j]) > tol * 1e3 * max(1, abs(out[i]))
                       for i in range(len(out)) for j in range(i + 1, len(out)))
        if not distinct:
            out = mpmath.polyroots(list(reversed(coeffs)), maxsteps=400, extraprec=2 * dps)
        return [complex(mpmath.re(r), mpmath.im(r)) for r in out]


# ------------------------------------------------------------------ roots


def roots_at_k(spec: MaterialSpec, k_abs: float, dps: int | None = None,
               check: bool = True) -> np.ndarray:
    """All roots ``omega`` of ``D(omega) = k_abs**2``, sorted by real part.

    With ``dps`` the double-precision roots are refined by Newton iteration at
    ``dps`` significant digits on exactly assembled coefficients; needed when
    ``Im omega`` is many orders of magnitude below ``|omega|``.
    """
    if k_abs < 0:
        raise ValueError("k_abs must be >= 0")
    if check:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            require_assumptions(spec)
    coeffs = dispersion_polynomial(spec, k_abs)
    even = not np.any(coeffs[1::2])
    if even:
        # D is even in omega: solve in u = s**2 and take both square roots
        q = coeffs[0::2]
        us = [_newton(q, u) for u in P.polyroots(q)] if len(q) > 1 else []
        s_roots = []
        for u in us:
            r = np.sqrt(complex(u))
            s_roots += [r, -r]
    else:
        s_roots = [_newton(coeffs, r) for r in P.polyroots(coeffs)]
    if dps:
        with mpmath.workdps(dps):
            s_roots = _mp_polish(_mp_polynomial(spec, k_abs), s_roots, dps)
    omegas = [1j * s for s in s_roots]
    if check and not dps:
        for s in s_roots:
            if _backward_error(coeffs, s) > RESIDUAL_TOL:
                raise ArithmeticError(f"root polish failed at k={k_abs}: s={s}")
    return _sort_roots(omegas)


# --------------------------------------------------------------- branches


@dataclass(frozen=True)
class BranchSet:
    """Continuous branches ``omega_n(|k|)`` on a wavenumber grid.

    ``omega[n]`` is branch ``n`` (0-based). Branches anchored to poles come first,
    ordered by pole; the two unbounded branches are last (towards -inf, then +inf).
    ``ends[n]`` is the limiting pole, or ``inf`` (signed on the real axis).
    """

    k: np.ndarray
    omega: np.ndarray
    zeros: np.ndarray
    ends: np.ndarray
    suspects: tuple = ()

    @property
    def n_branches(self) -> int:
        return self.omega.shape[0]

    def unbounded(self) -> list[int]:
        return [n for n in range(self.n_branches) if not np.isfinite(self.ends[n].real)]

    def value(self, n: int, k_abs: float) -> complex:
        """Linear interpolation of branch ``n`` at ``k_abs``."""
        re = np.interp(k_abs, self.k, self.omega[n].real)
        im = np.interp(k_abs, self.k, self.omega[n].imag)
        return complex(re, im)


def default_k_grid(spec: MaterialSpec, points: int = 400) -> np.ndarray:
    scale = max([1.0] + [o.resonance for o in spec.oscillators])
    return np.concatenate([[0.0], np.geomspace(1e-3, 1e4, points) * scale])


def _match(prev, new, tie_tol):
    cost = np.abs(prev[:, None] - new[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = cols[np.argsort(rows)]
    matched = new[perm]
    disp = np.abs(matched - prev)
    n = len(prev)
    ok = True
    # displacement must stay below half the distance to the nearest other root
    for i in range(n):
        if n < 2:
            break
        coincident = np.sum(np.abs(prev - prev[i]) < tie_tol) > 1
        if coincident:
            continue
        others = np.delete(matched, i)
        if disp[i] >= 0.5 * np.min(np.abs(others - matched[i])):
            ok = False
    # every transposition must be clearly worse than the optimum
    for i in range(n):
        for j in range(i + 1, n):
            if abs(prev[i] - prev[j]) < tie_tol:
                continue
            swapped = abs(matched[j] - prev[i]) + abs(matched[i] - prev[j])
            if disp[i] + disp[j] > 0.9 * swapped:
                ok = False
    return matched, ok


def trace_branches(spec: MaterialSpec, k_grid=None, refine_budget: int = 2000,
                   strict: bool = False) -> BranchSet:
    """Follow every root of ``D(omega) = k**2`` from ``k = 0`` along ``k_grid``.

    Consecutive samples are matched by optimal assignment on ``|delta omega|``.
    Ambiguous steps are bisected until ``refine_budget`` extra points are used;
    steps still ambiguous are recorded in ``suspects`` (or raised when ``strict``).
    """
    require_assumptions(spec)
    k_grid = default_k_grid(spec) if k_grid is None else np.asarray(k_grid, dtype=float)
    if k_grid[0] != 0 or np.any(np.diff(k_grid) <= 0):
        raise ValueError("k_grid must start at 0 and be strictly increasing")

    ks = [0.0]
    vals = [roots_at_k(spec, 0.0, check=False)]
    tie_tol = 1e-7 * max(1.0, float(np.max(np.abs(vals[0])))) if len(vals[0]) else 1.0
    suspects = []
    used = 0
    for k_target in k_grid[1:]:
        pending = [float(k_target)]
        while pending:
            kt = pending[0]
            new = roots_at_k(spec, kt, check=False)
            matched, ok = _match(vals[-1], new, tie_tol)
            if not ok and used < refine_budget and kt - ks[-1] > 1e-12 * max(kt, 1.0):
                pending.insert(0, 0.5 * (ks[-1] + kt))
                used += 1
                continue
            if not ok:
                if strict:
                    raise BranchSwapSuspected(f"ambiguous branch assignment near k={kt:.6g}")
                suspects.append(kt)
            ks.append(kt)
            vals.append(matched)
            pending.pop(0)

    omega = np.array(vals).T
    zeros = omega[:, 0].copy()
    ends = _end_anchors(spec, omega[:, -1])
    order = _branch_order(omega[:, -1], ends)
    return BranchSet(np.array(ks), omega[order], zeros[order], ends[order], tuple(suspects))


def _end_anchors(spec, final):
    poles = expand(poles_and_zeros(symbol(spec)).poles)
    n = len(final)
    n_unb = n - len(poles)
    ends = np.empty(n, dtype=complex)
    by_size = np.argsort(-np.abs(final))
    unb = list(by_size[:n_unb])
    for i in unb:
        ends[i] = complex(math.copysign(math.inf, final[i].real), 0.0)
    rest = [i for i in range(n) if i not in unb]
    if rest:
        cost = np.abs(final[rest][:, None] - np.array(poles)[None, :])
        r, c = linear_sum_assignment(cost)
        for ri, ci in zip(r, c):
            ends[rest[ri]] = poles[ci]
    return ends


def _branch_order(final, ends):
    def key(i):
        e = ends[i]
        if np.isfinite(e.real):
            return (0, round(e.real, 9), round(e.imag, 9), final[i].real)
        return (1, e.real, 0.0, 0.0)

    return sorted(range(len(final)), key=key)


# ---------------------------------------------------------------- bands


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float
    forward: bool
    zero: float
    pole: float

    def contains(self, w: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= w <= self.hi + tol


@dataclass(frozen=True)
class BandStructure:
    bands: tuple[Band, ...]
    gaps: tuple[tuple[float, float], ...]
    forward_set: tuple[int, ...]
    backward_set: tuple[int, ...]
    negative_index: bool

    def to_dict(self) -> dict:
        def num(x):
            return x if math.isfinite(x) else "inf"

        return {
            "bands": [
                {"lo": num(b.lo), "hi": num(b.hi), "forward": b.forward,
                 "orientation": "increasing" if b.forward else "decreasing",
                 "zero": num(b.zero), "pole": num(b.pole)}
                for b in self.bands
            ],
            "gaps": [[num(a), num(b)] for a, b in self.gaps],
            "forward_set": list(self.forward_set),
            "backward_set": list(self.backward_set),
            "negative_index": self.negative_index,
        }


def nonnegative_branches(bs: BranchSet) -> list[int]:
    """Indices of branches with ``Re omega > 0`` for ``k > 0`` (one per +/- pair)."""
    j = 1 if bs.omega.shape[1] > 1 else 0
    return [n for n in range(bs.n_branches) if bs.omega[n, j].real > 0]


def band_structure(spec: MaterialSpec, branch_set: BranchSet | None = None) -> BandStructure:
    """Spectral bands, gaps and forward/backward classification of a lossless medium."""
    if spec.dissipative:
        raise AssumptionViolated("non_dissipative", "band structure needs all damping = 0")
    bs = branch_set if branch_set is not None else trace_branches(spec)
    raw = []
    for n in nonnegative_branches(bs):
        z = float(bs.zeros[n].real)
        p = float(bs.ends[n].real)
        lo, hi = min(z, p), max(z, p)
        probe = 0.5 * (lo + hi) if math.isfinite(hi) else max(2 * lo, lo + 1.0)
        forward = bool(np.real(eval_epsilon(spec, probe)) > 0)
        raw.append(Band(lo, hi, forward, z, p))
    raw.sort(key=lambda b: (b.lo, b.hi))
    gaps = []
    edge = 0.0
    for b in raw:
        if b.lo > edge * (1 + 1e-12) + 1e-12:
            gaps.append((edge, b.lo))
        edge = max(edge, b.hi)
    fwd = tuple(i for i, b in enumerate(raw) if b.forward)
    bwd = tuple(i for i, b in enumerate(raw) if not b.forward)
    return BandStructure(tuple(raw), tuple(gaps), fwd, bwd, bool(bwd))


@dataclass(frozen=True)
class CharacterizationReport:
    n_points: int
    membership_violations: int
    orientation_violations: int


def characterization_check(spec: MaterialSpec, bands: BandStructure, n: int = 10_000,
                           omega_max: float | None = None) -> CharacterizationReport:
    """Compare band membership with the sign of ``eps*mu`` on a frequency grid.

    A frequency off the poles lies in a band iff ``eps*mu > 0``; forward bands have
    ``eps, mu > 0`` and backward bands ``eps, mu < 0``.
    """
    edges = [x for b in bands.bands for x in (b.lo, b.hi) if math.isfinite(x)]
    poles = [o.resonance for o in spec.oscillators]
    top = max(edges + poles + [1.0])
    omega_max = omega_max or 3 * top
    grid = np.linspace(0, omega_max, n + 1)[1:]
    special = np.array(edges + poles)
    tol = 1e-9 * top
    mem = ori = 0
    for w in grid:
        if special.size and np.min(np.abs(special - w)) < tol:
            continue
        e = float(np.real(eval_epsilon(spec, w)))
        m = float(np.real(eval_mu(spec, w)))
        hits = [b for b in bands.bands if b.lo < w < b.hi]
        if bool(hits) != (e * m > 0):
            mem += 1
        for b in hits:
            if b.forward != (e > 0 and m > 0) or (not b.forward) != (e < 0 and m < 0):
                ori += 1
    return CharacterizationReport(len(grid), mem, ori)


def group_velocity(spec: MaterialSpec, branch_set: BranchSet, n: int, k_abs: float) -> float:
    """``d omega_n / d|k| = 2|k| / D'(omega_n)`` on a lossless branch."""
    if spec.dissipative:
        raise AssumptionViolated("non_dissipative", "group velocity needs all damping = 0")
    if k_abs <= 0:
        raise ValueError("k_abs must be > 0")
    guess = branch_set.value(n, k_abs)
    roots = roots_at_k(spec, k_abs)
    w = roots[np.argmin(np.abs(roots - guess))]
    dD = symbol(spec).derivative(w)
    if abs(dD) < 1e-14 * max(1.0, abs(k_abs) ** 2 / max(abs(w), 1e-300)):
        raise DerivativeVanishes(f"D'(omega) vanishes at omega={w}")
    return float(np.real(2 * k_abs / dD))


# ------------------------------------------------------------ asymptotics


@dataclass(frozen=True)
class AsymptoticEntry:
    """Expected behaviour of the branches attached to one anchor.

    HF (``hf_order2``/``hf_order4``): ``Im omega ~ -value / (2 c**2 |k|**2)`` or
    ``-value / (2 c**4 |k|**4)`` near the pole ``anchor``. LF (``lf_order2``):
    ``Im omega ~ -value * c**2 |k|**2`` near the zero ``anchor``.
    ``value`` is the leading-order coefficient (``None`` when no closed form is
    known); ``reference_value`` is an alternative closed form kept for comparison.
    """

    anchor: complex
    kind: str
    value: float | None
    reference_value: float | None = None


@dataclass(frozen=True)
class AsymptoticCoefficients:
    A_infinity: float
    entries: tuple[AsymptoticEntry, ...] = ()

    def find(self, kind: str, anchor: complex, tol: float = 1e-6):
        for e in self.entries:
            if e.kind == kind and abs(e.anchor - anchor) < tol * max(1.0, abs(anchor)):
                return e
        return None


def _im_q_sum(oscs, p, skip=None):
    total = 0.0
    for o in oscs:
        if o is skip or o.damping == 0:
            continue
        q = o.resonance**2 - 1j * o.damping * p - p * p
        total += o.coupling**2 * o.damping / abs(q) ** 2
    return total


def asymptotic_coefficients(spec: MaterialSpec) -> AsymptoticCoefficients:
    """Closed-form coefficients of ``Im omega_n`` at high and low ``|k|``."""
    if not spec.dissipative:
        raise AssumptionViolated("dissipative", "asymptotic coefficients need some damping > 0")
    cls = classify_dissipativity(spec)
    c2 = spec.c**2
    a_inf = math.fsum(o.damping * o.coupling**2 for o in spec.oscillators)
    entries = []
    slow = set(cls["slow_resonances"])

    for w in sorted(set(cls["R_e"]) | set(cls["R_m"])):
        if w == 0:
            continue
        e_osc = next((o for o in spec.electric if o.damping == 0 and o.resonance == w), None)
        m_osc = next((o for o in spec.magnetic if o.damping == 0 and o.resonance == w), None)
        if w in slow:
            value = ref = None
            kind = "hf_order4"
        elif e_osc and m_osc:
            kind = "hf_order2"
            value = ref = w * w * (
                0.5 * m_osc.coupling**2 * _im_q_sum(spec.electric, w, skip=e_osc)
                + 0.5 * e_osc.coupling**2 * _im_q_sum(spec.magnetic, w, skip=m_osc)
            )
        elif e_osc:
            kind = "hf_order2"
            im_wmu = float(np.imag(w * eval_mu(spec, w)))
            value = c2 * spec.eps0 * e_osc.coupling**2 * im_wmu
            ref = 0.5 * spec.eps0 * im_wmu * e_osc.coupling**2
        else:
            kind = "hf_order2"
            im_weps = float(np.imag(w * eval_epsilon(spec, w)))
            value = c2 * spec.mu0 * m_osc.coupling**2 * im_weps
            ref = 0.5 * spec.mu0 * im_weps * m_osc.coupling**2
        for sgn in (-1, 1):
            entries.append(AsymptoticEntry(complex(sgn * w), kind, value, ref))

    rep = structure(spec)
    if rep.assumption2_ok:
        eps_s = float(np.real(eval_epsilon(spec, 0.0)))
        mu_s = float(np.real(eval_mu(spec, 0.0)))
        se = math.fsum(o.damping * o.coupling**2 / o.resonance**4 for o in spec.electric)
        sm = math.fsum(o.damping * o.coupling**2 / o.resonance**4 for o in spec.magnetic)
        a_e = spec.eps0 * se / eps_s
        a_m = spec.mu0 * sm / mu_s
        value = spec.eps0 * spec.mu0 * (a_e + a_m) / (2 * eps_s * mu_s)
        ref = spec.eps0**2 * c2 / 2 * se + spec.mu0 * c2 / 2 * sm
        entries.append(AsymptoticEntry(0j, "lf_order2", value, ref))

    tol = CLUSTER_RTOL * spec.frequency_scale()
    for z, _ in poles_and_zeros(symbol(spec)).zeros:
        if abs(z.imag) > tol or abs(z) < tol:
            continue
        x = z.real
        e, m = complex(eval_epsilon(spec, x)), complex(eval_mu(spec, x))
        h = 1e-6 * max(1.0, abs(x))
        if abs(e) < abs(m):
            dwe = (complex((x + h) * eval_epsilon(spec, x + h)) - complex((x - h) * eval_epsilon(spec, x - h))) / (2 * h)
            other = x * m
            value = float((other.imag / abs(other) ** 2) / dwe.real / c2)
        else:
            dwm = (complex((x + h) * eval_mu(spec, x + h)) - complex((x - h) * eval_mu(spec, x - h))) / (2 * h)
            other = x * e
            value = float((other.imag / abs(other) ** 2) / dwm.real / c2)
        entries.append(AsymptoticEntry(complex(x), "lf_order2", abs(value), None))
    return AsymptoticCoefficients(a_inf, tuple(entries))


@dataclass(frozen=True)
class AsymptoticFit:
    anchor: complex
    regime: str
    expected_exponent: float
    fitted_exponent: float
    fitted_coefficient: float
    predicted_coefficient: float | None
    reference_coefficient: float | None
    relative_defect: float | None
    r2: float

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["anchor"] = [self.anchor.real, self.anchor.imag] if np.isfinite(self.anchor.real) else str(self.anchor.real)
        return d


def loglog_fit(x, y) -> tuple[float, float, float]:
    """Least squares ``log y = slope log x + intercept``; returns (slope, intercept, r2)."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + icpt)
    ss = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss if ss > 0 else 1.0
    return float(slope), float(icpt), float(r2)


def verify_asymptotics(spec: MaterialSpec, coeffs: AsymptoticCoefficients | None = None,
                       hf_window=(1e2, 1e4), lf_window=(1e-3, 1e-2), points: int = 9,
                       dps: int = 50, r2_min: float = 0.999) -> list[AsymptoticFit]:
    """Fit ``log(-Im omega)`` against ``log |k|`` for every anchored regime.

    HF windows are scaled by the largest resonance (at least 1), LF windows by the
    smallest nonzero resonance. Roots are refined at ``dps`` digits.
    """
    coeffs = coeffs or asymptotic_coefficients(spec)
    res = [o.resonance for o in spec.oscillators if o.resonance > 0]
    w_max = max(res + [1.0])
    w_min = min(res) if res else 1.0
    c2 = spec.c**2
    fits = []

    k_hf = np.geomspace(hf_window[0] * w_max, hf_window[1] * w_max, points)
    hf_roots = [roots_at_k(spec, k, dps=dps) for k in k_hf]
    targets = [(complex(-math.inf), "hf_inf", coeffs.A_infinity, None),
               (complex(math.inf), "hf_inf", coeffs.A_infinity, None)]
    targets += [(e.anchor, e.kind, e.value, e.reference_value)
                for e in coeffs.entries if e.kind.startswith("hf")]
    for anchor, kind, value, ref in targets:
        ims = []
        for k, rs in zip(k_hf, hf_roots):
            if np.isinf(anchor.real):
                cand = rs[rs.real < 0] if anchor.real < 0 else rs[rs.real > 0]
                w = cand[np.argmax(np.abs(cand))]
            else:
                w = rs[np.argmin(np.abs(rs - anchor))]
            ims.append(-w.imag)
        expected = -4.0 if kind == "hf_order4" else -2.0
        order = -expected
        fitted_coef = ims[-1] * 2 * c2 ** (order / 2) * k_hf[-1] ** order
        fits.append(_fit(anchor, "hf", expected, k_hf, ims, fitted_coef, value, ref, r2_min))

    lf = [e for e in coeffs.entries if e.kind == "lf_order2"]
    if lf:
        k_lf = np.geomspace(lf_window[0] * w_min, lf_window[1] * w_min, points)
        lf_roots = [roots_at_k(spec, k, dps=dps) for k in k_lf]
        for e in lf:
            signs = (-1, 1) if e.anchor == 0 else (0,)
            for sgn in signs:
                ims = []
                for rs in lf_roots:
                    cand = rs if sgn == 0 else (rs[rs.real < 0] if sgn < 0 else rs[rs.real > 0])
                    w = cand[np.argmin(np.abs(cand - e.anchor))]
                    ims.append(-w.imag)
                fitted_coef = ims[0] / (c2 * k_lf[0] ** 2)
                fits.append(_fit(e.anchor, "lf", 2.0, k_lf, ims, fitted_coef,
                                 e.value, e.reference_value, r2_min))
    return fits


def _fit(anchor, regime, expected, ks, ims, fitted_coef, value, ref, r2_min):
    ims = np.asarray(ims)
    if np.any(ims <= 0):
        raise RegressionUnstable(f"non-negative Im omega on branch anchored at {anchor}")
    slope, _, r2 = loglog_fit(ks, ims)
    if r2 < r2_min:
        raise RegressionUnstable(f"log-log fit at {anchor} has R^2={r2:.6f}", r2=r2)
    defect = abs(fitted_coef / value - 1) if value else None
    return AsymptoticFit(anchor, regime, expected, slope, float(fitted_coef),
                         value, ref, defect, r2)
