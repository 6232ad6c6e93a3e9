"""Nevanlinna measures of Lorentz media, reconstruction and Stieltjes inversion.

For a Lorentz law ``eps(omega) = eps0 * (1 + int dnu(xi) / (xi**2 - omega**2))``
the measure ``nu`` is an even combination of Dirac masses (undamped oscillators)
and rational densities (damped oscillators).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NonConvergent, QuadratureFailure, TruncationError
from .material import MaterialSpec, Oscillator

QUAD_RTOL = 1e-8


@dataclass(frozen=True)
class DensityTerm:
    """``coupling**2 / pi * alpha xi**2 / ((xi**2 - w0**2)**2 + alpha**2 xi**2)``."""

    coupling: float
    resonance: float
    damping: float

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        a, w0 = self.damping, self.resonance
        x2 = xi * xi
        return self.coupling**2 / math.pi * a * x2 / ((x2 - w0 * w0) ** 2 + a * a * x2)

    @property
    def mass(self) -> float:
        # each normalized density carries unit mass, the weight of the pair of Diracs it replaces
        return self.coupling**2


@dataclass(frozen=True)
class MeasureRepresentation:
    herglotz_slope: float
    point_masses: tuple[tuple[float, float], ...] = ()
    densities: tuple[DensityTerm, ...] = ()

    def density(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = np.zeros_like(xi)
        for d in self.densities:
            out = out + d(xi)
        return out

    def integrate(self, phi, rtol=QUAD_RTOL) -> float:
        """``int phi dnu`` for a real test function ``phi``."""
        total = math.fsum(w * phi(x) for x, w in self.point_masses)
        for d in self.densities:
            pts = [-d.resonance, d.resonance] if d.resonance > 0 else None
            val = 0.0
            for lo, hi in ((-np.inf, -10 * _span(d)), (-10 * _span(d), 10 * _span(d)),
                           (10 * _span(d), np.inf)):
                kw = {"points": pts} if (pts and np.isfinite(lo) and np.isfinite(hi)) else {}
                v, _ = integrate.quad(lambda x: phi(x) * d(x), lo, hi,
                                      epsrel=rtol, epsabs=0, limit=400, **kw)
                val += v
            total += val
        return total


def _span(d: DensityTerm) -> float:
    return max(d.resonance, d.damping, 1.0)


def measure_of(spec: MaterialSpec, channel: str = "electric") -> MeasureRepresentation:
    """Closed-form measure of ``eps`` (``channel='electric'``) or ``mu``."""
    if channel not in ("electric", "magnetic"):
        raise ValueError(f"unknown channel {channel!r}")
    oscs = spec.electric if channel == "electric" else spec.magnetic
    slope = spec.eps0 if channel == "electric" else spec.mu0
    masses: list[tuple[float, float]] = []
    densities = []
    for o in oscs:
        if o.damping == 0:
            w = 0.5 * o.coupling**2
            if o.resonance == 0:
                masses.append((0.0, 2 * w))
            else:
                masses += [(-o.resonance, w), (o.resonance, w)]
        else:
            densities.append(DensityTerm(o.coupling, o.resonance, o.damping))
    masses.sort()
    return MeasureRepresentation(slope, tuple(masses), tuple(densities))


def _density_cauchy(d: DensityTerm, omega: complex, rtol: float) -> complex:
    """``int_R d(xi) / (xi**2 - omega**2) dxi`` by adaptive quadrature plus analytic tail."""
    w2 = omega * omega
    L = 100 * max(d.resonance, d.damping, abs(omega), 1.0)
    pts = sorted({p for p in (d.resonance, abs(omega.real)) if 0 < p < L})

    def part(fn):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                v, _ = integrate.quad(fn, 0.0, L, points=pts or None, epsrel=rtol,
                                      epsabs=0, limit=1000)
            except integrate.IntegrationWarning as exc:
                raise QuadratureFailure(
                    f"density quadrature did not converge at omega={omega}: {exc}"
                ) from exc
        return v

    re = part(lambda x: (d(x) / (x * x - w2)).real)
    im = part(lambda x: (d(x) / (x * x - w2)).imag)
    # tail: d(xi) ~ C/xi**2 and 1/(xi**2 - w2) ~ 1/xi**2, so int_L^inf ~ C / (3 L**3)
    tail = d.coupling**2 * d.damping / math.pi / (3 * L**3)
    return 2 * (complex(re, im) + tail)


def reconstruct(measure: MeasureRepresentation, omega, rtol: float = QUAD_RTOL):
    """Evaluate ``slope * (1 + int dnu(xi) / (xi**2 - omega**2))``."""
    scalar = np.ndim(omega) == 0
    omegas = np.atleast_1d(np.asarray(omega, dtype=complex))
    out = np.empty_like(omegas)
    for i, w in enumerate(omegas):
        terms = [m / (x * x - w * w) for x, m in measure.point_masses]
        acc = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
        for d in measure.densities:
            acc += _density_cauchy(d, complex(w), rtol)
        out[i] = measure.herglotz_slope * (1 + acc)
    return out[0] if scalar else out


def _extrapolate_to_zero(etas, values) -> tuple[float, float]:
    """Neville extrapolation to ``eta = 0``; returns (limit, lower-order estimate)."""
    x = list(etas)
    table = list(values)
    prev = table[-1]
    n = len(x)
    for level in range(1, n):
        prev = table[-1]
        for i in range(n - level):
            j = i + level
            table[i] = (x[j] * table[i] - x[i] * table[i + 1]) / (x[j] - x[i])
        table = table[: n - level]
    return table[0], prev


@dataclass(frozen=True)
class Extrapolation:
    limit: float
    etas: tuple
    sequence: tuple


def _check(etas):
    etas = [float(e) for e in etas]
    if len(etas) < 2 or any(b >= a for a, b in zip(etas, etas[1:])):
        raise ValueError("eta sequence must be strictly decreasing with at least 2 values")
    if etas[-1] < 1e-6:
        raise ValueError("eta values must stay >= 1e-6")
    return etas


def _finish(etas, seq) -> Extrapolation:
    limit, lower = _extrapolate_to_zero(etas, seq)
    increment = abs(seq[-1] - seq[-2])
    residual = abs(limit - seq[-1])
    scale = max(abs(v) for v in seq)
    if residual > 10 * increment + 1e-10 * max(scale, 1.0):
        raise NonConvergent(
            f"extrapolation residual {residual:.3g} exceeds 10x last increment {increment:.3g}"
        )
    return Extrapolation(float(limit), tuple(etas), tuple(seq))


def stieltjes_window(f, a: float, b: float, etas=(1e-2, 5e-3, 2.5e-3), points=None) -> Extrapolation:
    """Extrapolated ``(2/pi) int_a^b Im f(x + i eta) dx`` as ``eta -> 0``.

    The limit is ``nu([a,b]) + nu((a,b))``: an interior atom counts twice.
    ``points`` lists known peak locations inside the window for the quadrature.
    """
    if not a < b:
        raise ValueError("need a < b")
    etas = _check(etas)
    inner = sorted(p for p in (points or ()) if a < p < b)
    seq = []
    for eta in etas:
        # split around each peak so the quadrature resolves width-eta features
        brk = sorted({a, b, *inner, *(p - 20 * eta for p in inner), *(p + 20 * eta for p in inner)})
        brk = [x for x in brk if a <= x <= b]
        total = 0.0
        for lo, hi in zip(brk, brk[1:]):
            v, _ = integrate.quad(lambda x: np.imag(f(x + 1j * eta)), lo, hi,
                                  epsrel=1e-10, epsabs=1e-13, limit=500)
            total += v
        seq.append(2 / math.pi * total)
    return _finish(etas, seq)


def atom_weight(f, a: float, etas=(1e-2, 5e-3, 2.5e-3)) -> Extrapolation:
    """Extrapolated ``eta * Im f(a + i eta)`` as ``eta -> 0``: the atom of the measure at ``a``."""
    etas = _check(etas)
    seq = [float(eta * np.imag(f(a + 1j * eta))) for eta in etas]
    return _finish(etas, seq)


# ------------------------------------------------------------ time kernels


def susceptibility_kernel(osc: Oscillator, t):
    """Causal kernel of one oscillator: ``chi'' + alpha chi' + w0**2 chi = 0``,
    ``chi(0) = 0``, ``chi'(0) = coupling**2``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("kernel is defined for t >= 0")
    a, w0 = osc.damping, osc.resonance
    disc = w0 * w0 - a * a / 4
    env = np.exp(-0.5 * a * t)
    if disc > 0:
        wd = math.sqrt(disc)
        shape = t * np.sinc(wd * t / math.pi)  # sin(wd t) / wd
    elif disc < 0:
        beta = math.sqrt(-disc)
        # sinh(beta t)/beta folded into the envelope to avoid overflow
        shape = np.where(
            t > 0,
            (np.exp((beta - 0.5 * a) * t) - np.exp(-(beta + 0.5 * a) * t)) / (2 * beta),
            0.0,
        )
        env = 1.0
    else:
        shape = t
    out = osc.coupling**2 * env * shape
    return out[()] if out.ndim == 0 else out


def kernel_transform(osc: Oscillator, omega: complex, tol: float = 1e-10) -> complex:
    """``int_0^inf exp(i omega t) chi(t) dt`` on a truncated horizon.

    With ``eps = eps0 (1 + hat chi)`` this is the oscillator's susceptibility, so the
    transform is taken without the ``1/sqrt(2 pi)`` prefactor.
    """
    y, x = omega.imag, omega.real
    a, w0 = osc.damping, osc.resonance
    disc = a * a / 4 - w0 * w0
    gamma = 0.5 * a - (math.sqrt(disc) if disc > 0 else 0.0)  # kernel decays like exp(-gamma t)
    lam = y + gamma
    if y <= 0 or lam <= 0:
        raise TruncationError(f"Im omega = {y} gives no exponential decay of the integrand")
    target = tol * osc.coupling**2 / max(abs(w0 * w0 - 1j * a * omega - omega * omega), 1e-300)
    # |chi(t)| <= coupling**2 t exp(-gamma t) -> tail <= coupling**2 e^{-lam T} (T/lam + 1/lam**2)
    T = 1.0 / lam
    while osc.coupling**2 * math.exp(-lam * T) * (T / lam + 1 / lam**2) > target:
        T *= 1.5
        if T * lam > 800:
            raise TruncationError("tail bound cannot reach the requested tolerance")

    def g(t):
        return float(np.exp(-y * t) * susceptibility_kernel(osc, t))

    kw = dict(epsrel=1e-12, epsabs=1e-2 * target, limit=2000)
    if x != 0:
        re, _ = integrate.quad(g, 0, T, weight="cos", wvar=x, **kw)
        im, _ = integrate.quad(g, 0, T, weight="sin", wvar=x, **kw)
    else:
        re, _ = integrate.quad(g, 0, T, **kw)
        im = 0.0
    return complex(re, im)


def kernel_transform_check(osc: Oscillator, omega: complex, tol: float = 1e-10) -> float:
    """Relative defect between the transformed kernel and ``coupling**2 / q(omega)``."""
    omega = complex(omega)
    closed = osc.susceptibility(omega)
    return abs(kernel_transform(osc, omega, tol) - closed) / abs(closed)


def density_samples(measure: MeasureRepresentation, xi) -> np.ndarray:
    """Rows of ``(xi, density)`` for plotting."""
    xi = np.asarray(xi, dtype=float)
    return np.column_stack([xi, measure.density(xi)])
