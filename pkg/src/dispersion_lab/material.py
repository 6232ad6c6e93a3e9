"""Generalized (dissipative) Lorentz material laws.

A medium is described by its background constants ``eps0``, ``mu0`` and two
finite lists of oscillators. Each oscillator contributes

    Omega**2 / (omega0**2 - 1j*alpha*omega - omega**2)

to ``eps/eps0 - 1`` (electric) or ``mu/mu0 - 1`` (magnetic).

Polynomials are stored with real ascending coefficients in the variable
``s = -1j*omega``; each oscillator denominator becomes ``s**2 + alpha*s + omega0**2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import IllConditioned, PoleHit, SchemaError, ValidationError

# SI vacuum constants
EPS0_SI = 1e-9 / (36 * math.pi)
MU0_SI = 4 * math.pi * 1e-7

CLUSTER_RTOL = 1e-8


@dataclass(frozen=True)
class Oscillator:
    """One Lorentz (``resonance > 0``) or Drude (``resonance == 0``) term."""

    coupling: float
    resonance: float = 0.0
    damping: float = 0.0

    def __post_init__(self):
        for name in ("coupling", "resonance", "damping"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not math.isfinite(v):
                raise ValidationError(f"oscillator {name} must be finite, got {v}")
        if self.coupling <= 0:
            raise ValidationError(f"oscillator coupling must be > 0, got {self.coupling}")
        if self.resonance < 0 or self.damping < 0:
            raise ValidationError("oscillator resonance and damping must be >= 0")

    @property
    def denominator(self) -> np.ndarray:
        """``s**2 + alpha*s + omega0**2`` in ascending order."""
        return np.array([self.resonance**2, self.damping, 1.0])

    def denominator_roots(self) -> tuple[complex, complex]:
        """Roots in ``omega`` of ``omega**2 + 1j*alpha*omega - omega0**2``."""
        a, w0 = self.damping, self.resonance
        disc = a * a - 4 * w0 * w0
        if disc >= 0:
            r = math.sqrt(disc)
            # both roots on the closed negative imaginary axis
            s1 = -(a + r) / 2
            s2 = (w0 * w0) / s1 if s1 != 0 else -(a - r) / 2
            return (1j * s1, 1j * s2)
        r = math.sqrt(-disc) / 2
        return (r - 0.5j * a, -r - 0.5j * a)

    def susceptibility(self, omega):
        q = self.resonance**2 - 1j * self.damping * omega - omega * omega
        return self.coupling**2 / q


def _oscillators(items) -> tuple[Oscillator, ...]:
    out = []
    for it in items:
        if isinstance(it, Oscillator):
            out.append(it)
        elif isinstance(it, dict):
            out.append(Oscillator(**it))
        else:
            out.append(Oscillator(*it))
    return tuple(out)


@dataclass(frozen=True)
class MaterialSpec:
    electric: tuple[Oscillator, ...] = ()
    magnetic: tuple[Oscillator, ...] = ()
    eps0: float = 1.0
    mu0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "electric", _oscillators(self.electric))
        object.__setattr__(self, "magnetic", _oscillators(self.magnetic))
        object.__setattr__(self, "eps0", float(self.eps0))
        object.__setattr__(self, "mu0", float(self.mu0))
        if not (self.eps0 > 0 and self.mu0 > 0):
            raise ValidationError("eps0 and mu0 must be positive")
        for name in ("electric", "magnetic"):
            seen = set()
            for j, osc in enumerate(getattr(self, name)):
                key = (osc.damping, osc.resonance)
                if key in seen:
                    raise ValidationError(
                        f"{name}[{j}]: duplicate (damping, resonance) pair {key}"
                    )
                seen.add(key)

    @property
    def n_electric(self) -> int:
        return len(self.electric)

    @property
    def n_magnetic(self) -> int:
        return len(self.magnetic)

    @property
    def n_oscillators(self) -> int:
        return len(self.electric) + len(self.magnetic)

    @property
    def c(self) -> float:
        """Light speed, defined by ``eps0 * mu0 * c**2 == 1``."""
        return 1.0 / math.sqrt(self.eps0 * self.mu0)

    @property
    def dissipative(self) -> bool:
        return any(o.damping > 0 for o in self.electric + self.magnetic)

    @property
    def oscillators(self) -> tuple[Oscillator, ...]:
        return self.electric + self.magnetic

    def frequency_scale(self) -> float:
        """Largest oscillator parameter, at least 1."""
        vals = [1.0]
        for o in self.oscillators:
            vals += [o.coupling, o.resonance, o.damping]
        return max(vals)

    def to_dict(self) -> dict:
        def osc(o):
            return {"omega": o.resonance, "coupling": o.coupling, "damping": o.damping}

        return {
            "eps0": self.eps0,
            "mu0": self.mu0,
            "electric": [osc(o) for o in self.electric],
            "magnetic": [osc(o) for o in self.magnetic],
        }


VACUUM = MaterialSpec()


def parse_spec(text: str | dict) -> MaterialSpec:
    """Build a :class:`MaterialSpec` from JSON text (or an already decoded dict).

    Oscillators use the keys ``omega``, ``coupling`` and ``damping`` (default 0).
    With ``"units": "si"`` missing ``eps0``/``mu0`` default to the SI vacuum values
    instead of 1.
    """
    if isinstance(text, (str, bytes)):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc.msg}") from exc
    else:
        data = text
    if not isinstance(data, dict):
        raise SchemaError("$", "expected a JSON object")

    units = data.get("units", "normalized")
    if units not in ("normalized", "si"):
        raise SchemaError("units", f"unknown units {units!r}")
    si = units == "si"

    def number(obj, key, path, default=None):
        if key not in obj:
            if default is None:
                raise SchemaError(path, "missing required field")
            return default
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaError(path, f"expected a number, got {type(v).__name__}")
        return float(v)

    eps0 = number(data, "eps0", "eps0", EPS0_SI if si else 1.0)
    mu0 = number(data, "mu0", "mu0", MU0_SI if si else 1.0)

    lists = {}
    for name in ("electric", "magnetic"):
        raw = data.get(name, [])
        if not isinstance(raw, list):
            raise SchemaError(name, "expected a list")
        oscs = []
        for j, item in enumerate(raw):
            path = f"{name}[{j}]"
            if not isinstance(item, dict):
                raise SchemaError(path, "expected an object")
            oscs.append(
                Oscillator(
                    coupling=number(item, "coupling", f"{path}.coupling"),
                    resonance=number(item, "omega", f"{path}.omega"),
                    damping=number(item, "damping", f"{path}.damping", 0.0),
                )
            )
        lists[name] = tuple(oscs)
    return MaterialSpec(lists["electric"], lists["magnetic"], eps0=eps0, mu0=mu0)


def load_spec(path) -> MaterialSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


# ---------------------------------------------------------------- evaluation


def _law(oscillators, background, omega):
    omega = np.asarray(omega, dtype=complex)
    total = np.ones_like(omega)
    for osc in oscillators:
        q = osc.resonance**2 - 1j * osc.damping * omega - omega * omega
        if np.any(q == 0):
            raise PoleHit(f"evaluation at a pole of the oscillator {osc}")
        total = total + osc.coupling**2 / q
    out = background * total
    return out[()] if out.ndim == 0 else out


def eval_epsilon(spec: MaterialSpec, omega):
    """Permittivity at complex frequency ``omega`` (scalar or array)."""
    return _law(spec.electric, spec.eps0, omega)


def eval_mu(spec: MaterialSpec, omega):
    """Permeability at complex frequency ``omega`` (scalar or array)."""
    return _law(spec.magnetic, spec.mu0, omega)


# ------------------------------------------------------- polynomial plumbing


def _trim(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=float))
    nz = np.nonzero(c)[0]
    if len(nz) == 0:
        return np.zeros(1)
    return c[: nz[-1] + 1]


def _poly_sum(polys) -> np.ndarray:
    """Coefficient-wise sum with compensated (``math.fsum``) accumulation."""
    polys = [np.asarray(p, dtype=float) for p in polys]
    n = max(len(p) for p in polys)
    out = np.zeros(n)
    for i in range(n):
        out[i] = math.fsum(p[i] for p in polys if i < len(p))
    return _trim(out)


def _poly_prod(polys) -> np.ndarray:
    out = np.ones(1)
    for p in polys:
        out = np.convolve(out, p)
    return out


def _law_polys(oscillators) -> tuple[np.ndarray, np.ndarray]:
    """``(numerator, denominator)`` of ``eps/eps0`` as polynomials in ``s``."""
    dens = [o.denominator for o in oscillators]
    den = _poly_prod(dens)
    terms = [den]
    for j, o in enumerate(oscillators):
        others = [d for i, d in enumerate(dens) if i != j]
        terms.append(o.coupling**2 * _poly_prod(others))
    return _poly_sum(terms), den


def _eval_s(coeffs, omega):
    return P.polyval(-1j * np.asarray(omega, dtype=complex), coeffs)


@dataclass(frozen=True)
class RationalSymbol:
    """Rational function of ``omega`` stored as real polynomials in ``s = -i omega``.

    ``zero_factors``/``pole_factors`` optionally keep the unexpanded factors of the
    numerator/denominator so their roots can be computed factor by factor.
    """

    numerator: np.ndarray
    denominator: np.ndarray
    zero_factors: tuple = field(default=(), compare=False, repr=False)
    pole_factors: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        num = _trim(self.numerator)
        den = _trim(self.denominator)
        if not np.any(den):
            raise ValidationError("zero denominator")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @property
    def num_degree(self) -> int:
        return len(self.numerator) - 1

    @property
    def den_degree(self) -> int:
        return len(self.denominator) - 1

    def __call__(self, omega):
        num = _eval_s(self.numerator, omega)
        den = _eval_s(self.denominator, omega)
        if np.any(den == 0):
            raise PoleHit("evaluation at a pole of the symbol")
        return num / den

    def derivative(self, omega):
        """d/d omega, using ``ds/domega = -i``."""
        s = -1j * np.asarray(omega, dtype=complex)
        n, d = P.polyval(s, self.numerator), P.polyval(s, self.denominator)
        dn = P.polyval(s, P.polyder(self.numerator))
        dd = P.polyval(s, P.polyder(self.denominator))
        if np.any(d == 0):
            raise PoleHit("evaluation at a pole of the symbol")
        return -1j * (dn * d - n * dd) / (d * d)

    def reduced(self) -> "RationalSymbol":
        """Cancel common factors of numerator and denominator.

        Common powers of ``s`` are removed exactly; any other common root is
        deflated numerically (real or conjugate-pair factor).
        """
        num, den = self.numerator, self.denominator
        k = 0
        while k < min(len(num), len(den)) - 1 and num[k] == 0 and den[k] == 0:
            k += 1
        num, den = num[k:], den[k:]
        zf = _drop_s_powers(self.zero_factors, k)
        pf = _drop_s_powers(self.pole_factors, k)

        if len(num) > 1 and len(den) > 1:
            tol = CLUSTER_RTOL * max(1.0, _root_scale(num), _root_scale(den))
            rn = list(P.polyroots(num))
            rd = list(P.polyroots(den))
            for r in list(rd):
                hits = [x for x in rn if abs(x - r) < tol]
                if not hits or r not in rd:
                    continue
                if abs(r.imag) < tol:
                    f = np.array([-r.real, 1.0])
                    used = [r]
                else:
                    f = np.array([abs(r) ** 2, -2 * r.real, 1.0])
                    used = [r, _nearest(rd, r.conjugate())]
                num = _trim(P.polydiv(num, f)[0])
                den = _trim(P.polydiv(den, f)[0])
                for u in used:
                    rd.remove(u)
                    rn.remove(_nearest(rn, u))
                zf, pf = (), ()
        return RationalSymbol(num, den, zf, pf)


def _drop_s_powers(factors, k):
    if k == 0 or not factors:
        return tuple(factors)
    out = []
    for f in factors:
        f = np.asarray(f, dtype=float)
        while k > 0 and len(f) > 1 and f[0] == 0:
            f = f[1:]
            k -= 1
        out.append(f)
    return tuple(out) if k == 0 else ()


def _nearest(values, target):
    return min(values, key=lambda v: abs(v - target))


def _root_scale(c) -> float:
    """Fujiwara-style bound on root moduli of an ascending polynomial."""
    c = _trim(c)
    if len(c) < 2:
        return 0.0
    lead = abs(c[-1])
    n = len(c) - 1
    return 2 * max(abs(c[n - i] / lead) ** (1.0 / i) for i in range(1, n + 1))


def dispersion_symbol(spec: MaterialSpec) -> RationalSymbol:
    """``D(omega) = omega**2 * eps(omega) * mu(omega)`` as a reduced rational symbol."""
    ne, de = _law_polys(spec.electric)
    nm, dm = _law_polys(spec.magnetic)
    s2 = np.array([0.0, 0.0, -spec.eps0 * spec.mu0])  # omega**2 eps0 mu0 = -eps0 mu0 s**2
    num = _poly_prod([s2, ne, nm])
    den = _poly_prod([de, dm])
    zf = (s2, ne, nm)
    pf = tuple(o.denominator for o in spec.oscillators)
    return RationalSymbol(num, den, zf, pf).reduced()


# ---------------------------------------------------------------- root sets


class PolesZeros(NamedTuple):
    zeros: tuple[tuple[complex, int], ...]
    poles: tuple[tuple[complex, int], ...]


def expand(multiset) -> list[complex]:
    return [v for v, m in multiset for _ in range(m)]


def _polish(coeffs, root, steps=3):
    d = P.polyder(coeffs)
    for _ in range(steps):
        fd = P.polyval(root, d)
        if fd == 0:
            break
        step = P.polyval(root, coeffs) / fd
        if not np.isfinite(step):
            break
        root = root - step
    return root


def _factor_roots(f) -> list[complex]:
    """Roots in ``s`` of one real factor; exact for degree <= 2."""
    f = _trim(f)
    k = 0
    while k < len(f) - 1 and f[k] == 0:
        k += 1
    roots = [0j] * k
    f = f[k:]
    n = len(f) - 1
    if n == 1:
        roots.append(complex(-f[0] / f[1]))
    elif n == 2:
        c, b, a = f
        disc = b * b - 4 * a * c
        if disc >= 0:
            q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
            roots += [complex(q / a), complex(c / q)]
        else:
            r = math.sqrt(-disc) / (2 * a)
            roots += [complex(-b / (2 * a), r), complex(-b / (2 * a), -r)]
    elif n > 2:
        roots += [_polish(f, r) for r in P.polyroots(f)]
    return roots


def cluster(values, tol) -> list[tuple[complex, int]]:
    """Merge values closer than ``tol`` (transitively) into (mean, count) pairs."""
    values = list(values)
    parent = list(range(len(values)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if abs(values[i] - values[j]) < tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i, v in enumerate(values):
        groups.setdefault(find(i), []).append(v)
    out = [(complex(np.mean(g)), len(g)) for g in groups.values()]
    centers = [v for v, _ in out]
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if abs(centers[i] - centers[j]) < 10 * tol:
                raise IllConditioned(
                    f"root clusters {centers[i]:.6g} and {centers[j]:.6g} are within "
                    f"10x the cluster tolerance {tol:.3g}"
                )
    return out


def _symmetrize(ms, tol):
    """Enforce invariance under ``omega -> -conj(omega)`` on (value, mult) pairs."""
    out = []
    for v, m in ms:
        if abs(v.real) < tol:
            v = complex(0.0, v.imag)
        partner = [w for w, _ in ms if abs(w + v.conjugate()) < tol]
        if partner:
            w = partner[0]
            v = complex(0.5 * (v.real - w.real), 0.5 * (v.imag + w.imag))
        if abs(v.imag) < tol:
            v = complex(v.real, 0.0)
        if v.real == 0:
            v = complex(0.0, v.imag)
        out.append((v, m))
    return sorted(out, key=lambda p: (round(p[0].real, 12), p[0].imag))


def _roots_to_multiset(s_roots, scale):
    tol = CLUSTER_RTOL * max(1.0, scale)
    omegas = [1j * r for r in s_roots]
    return _symmetrize(cluster(omegas, tol), tol), tol


def poles_and_zeros(sym: RationalSymbol) -> PolesZeros:
    """Zeros and poles of a symbol, in ``omega``, with multiplicities.

    Roots that appear in both sets cancel (the reduced symbol is irreducible).
    """
    if sym.zero_factors:
        zs = [r for f in sym.zero_factors for r in _factor_roots(f)]
    else:
        zs = _factor_roots(sym.numerator)
    if sym.pole_factors:
        ps = [r for f in sym.pole_factors for r in _factor_roots(f)]
    else:
        ps = _factor_roots(sym.denominator)
    scale = max([1.0] + [abs(r) for r in zs + ps])
    zeros, tol = _roots_to_multiset(zs, scale)
    poles, _ = _roots_to_multiset(ps, scale)
    zeros, poles = _cancel(zeros, poles, tol)
    return PolesZeros(tuple(zeros), tuple(poles))


def _cancel(zeros, poles, tol):
    z = dict(zeros)
    p = dict(poles)
    for zv in list(z):
        for pv in list(p):
            if abs(zv - pv) < tol and zv in z:
                m = min(z[zv], p[pv])
                z[zv] -= m
                p[pv] -= m
                if z[zv] == 0:
                    del z[zv]
                if p[pv] == 0:
                    del p[pv]
    key = lambda t: (round(t[0].real, 12), t[0].imag)
    return sorted(z.items(), key=key), sorted(p.items(), key=key)


def law_roots(spec: MaterialSpec, channel: str) -> PolesZeros:
    """Zeros and poles of ``eps`` (``channel='electric'``) or ``mu``."""
    oscs = spec.electric if channel == "electric" else spec.magnetic
    num, _ = _law_polys(oscs)
    sym = RationalSymbol(num, _poly_prod([o.denominator for o in oscs]),
                         (num,), tuple(o.denominator for o in oscs))
    return poles_and_zeros(sym)


# --------------------------------------------------------- structure checks


@dataclass(frozen=True)
class StructureReport:
    poles_e: tuple
    zeros_e: tuple
    poles_m: tuple
    zeros_m: tuple
    # resonances, stored as nonnegative representatives of the +/- pairs
    R_e: tuple
    R_m: tuple
    R_e_s: tuple
    R_e_d: tuple
    R_m_s: tuple
    R_m_d: tuple
    assumption1_ok: bool
    assumption2_ok: bool
    assumption3_ok: bool
    e_n_d: bool
    m_n_d: bool
    dissipative: bool
    weakly_dissipative: bool
    strongly_dissipative: bool
    magnetically_weak: bool = False
    electrically_weak: bool = False
    slow_resonances: tuple = ()

    def violated(self) -> list[str]:
        return [
            name
            for name in ("assumption1_ok", "assumption2_ok", "assumption3_ok")
            if not getattr(self, name)
        ]

    def to_dict(self) -> dict:
        def ms(x):
            return [{"re": v.real, "im": v.imag, "multiplicity": m} for v, m in x]

        out = {}
        for k, v in self.__dict__.items():
            if k in ("poles_e", "zeros_e", "poles_m", "zeros_m"):
                out[k] = ms(v)
            elif isinstance(v, tuple):
                out[k] = list(v)
            else:
                out[k] = v
        return out


def _intersects(a, b, tol) -> bool:
    return any(abs(x - y) < tol for x, _ in a for y, _ in b)


def _in(value, values, tol):
    return any(abs(value - v) <= tol * max(1.0, abs(v)) for v in values)


def _split_resonances(spec):
    tol = CLUSTER_RTOL
    r_e = sorted({o.resonance for o in spec.electric if o.damping == 0})
    r_m = sorted({o.resonance for o in spec.magnetic if o.damping == 0})
    r_e_s = tuple(w for w in r_e if not _in(w, r_m, tol))
    r_e_d = tuple(w for w in r_e if _in(w, r_m, tol))
    r_m_s = tuple(w for w in r_m if not _in(w, r_e, tol))
    r_m_d = tuple(w for w in r_m if _in(w, r_e, tol))
    return tuple(r_e), tuple(r_m), r_e_s, r_e_d, r_m_s, r_m_d


def classify_dissipativity(spec: MaterialSpec) -> dict:
    """Resonance sets and the weak/strong dissipativity flags.

    A medium is weakly dissipative when some high-frequency branch has
    ``Im omega ~ |k|**-4``. That happens at a simple resonance of one channel when
    the *other* channel is lossless: magnetic resonances in ``R_m_s`` of an
    electrically lossless medium, electric resonances in ``R_e_s`` of a
    magnetically lossless one. ``slow_resonances`` lists those poles.
    """
    r_e, r_m, r_e_s, r_e_d, r_m_s, r_m_d = _split_resonances(spec)
    e_n_d = all(o.damping == 0 for o in spec.electric)
    m_n_d = all(o.damping == 0 for o in spec.magnetic)
    dissipative = spec.dissipative
    mag_weak = dissipative and e_n_d and bool(r_m_s)
    el_weak = dissipative and m_n_d and bool(r_e_s)
    slow = (r_m_s if mag_weak else ()) + (r_e_s if el_weak else ())
    weak = mag_weak or el_weak
    return dict(
        R_e=r_e, R_m=r_m, R_e_s=r_e_s, R_e_d=r_e_d, R_m_s=r_m_s, R_m_d=r_m_d,
        e_n_d=e_n_d, m_n_d=m_n_d, dissipative=dissipative,
        weakly_dissipative=weak, strongly_dissipative=dissipative and not weak,
        magnetically_weak=mag_weak, electrically_weak=el_weak,
        slow_resonances=tuple(sorted(slow)),
    )


def validate_assumptions(spec: MaterialSpec) -> StructureReport:
    """Check the three irreducibility assumptions; violations are reported, not raised."""
    rep_e = law_roots(spec, "electric")
    rep_m = law_roots(spec, "magnetic")
    scale = max(
        [1.0] + [abs(v) for v, _ in rep_e.zeros + rep_e.poles + rep_m.zeros + rep_m.poles]
    )
    tol = CLUSTER_RTOL * scale
    a1 = not (
        _intersects(rep_e.poles, rep_m.zeros, tol)
        or _intersects(rep_m.poles, rep_e.zeros, tol)
    )
    a2 = not any(abs(v) < tol for v, _ in rep_e.poles + rep_m.poles)
    a3 = True
    for oscs in (spec.electric, spec.magnetic):
        roots = [[1j * r for r in _factor_roots(o.denominator)] for o in oscs]
        for i in range(len(roots)):
            for j in range(i + 1, len(roots)):
                if any(abs(x - y) < tol for x in roots[i] for y in roots[j]):
                    a3 = False
    return StructureReport(
        poles_e=rep_e.poles, zeros_e=rep_e.zeros, poles_m=rep_m.poles, zeros_m=rep_m.zeros,
        assumption1_ok=a1, assumption2_ok=a2, assumption3_ok=a3,
        **classify_dissipativity(spec),
    )


# ------------------------------------------------------------ passivity


@dataclass(frozen=True)
class HerglotzReport:
    min_im_omega_eps: float
    min_im_omega_mu: float
    max_symmetry_defect: float
    n_points: int

    @property
    def passive(self) -> bool:
        return self.min_im_omega_eps > 0 and self.min_im_omega_mu > 0


def log_polar_grid(n: int, rmin: float = 1e-2, rmax: float = 1e2, margin: float = 1e-3):
    """About ``n`` points in the open upper half-plane, log-spaced in modulus."""
    n_r = max(2, int(round(math.sqrt(n))))
    n_t = max(2, n // n_r)
    r = np.geomspace(rmin, rmax, n_r)
    theta = np.linspace(margin, math.pi - margin, n_t)
    return (r[:, None] * np.exp(1j * theta)[None, :]).ravel()


def herglotz_sample(spec: MaterialSpec, grid) -> HerglotzReport:
    """Sample ``omega*eps`` and ``omega*mu`` on upper half-plane points."""
    grid = np.asarray(grid, dtype=complex)
    if np.any(grid.imag <= 0):
        raise ValidationError("herglotz_sample needs points with Im(omega) > 0")
    fe = grid * eval_epsilon(spec, grid)
    fm = grid * eval_mu(spec, grid)
    refl = -grid.conj()
    de = np.abs(refl * eval_epsilon(spec, refl) + fe.conj())
    dm = np.abs(refl * eval_mu(spec, refl) + fm.conj())
    return HerglotzReport(
        float(fe.imag.min()), float(fm.imag.min()),
        float(max(de.max(), dm.max())), len(grid),
    )
