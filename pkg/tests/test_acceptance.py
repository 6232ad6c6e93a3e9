"""Acceptance suite: one test per criterion, each recording a pass/fail line."""

import math

import numpy as np
import pytest
from scipy import linalg

from conftest import DRUDE, LOSSLESS, STRONG, WEAK, random_spec
from dispersion_lab.decay import InitialDataProfile, energy_trace
from dispersion_lab.dispersion import (
    asymptotic_coefficients,
    band_structure,
    characterization_check,
    default_k_grid,
    nonnegative_branches,
    roots_at_k,
    trace_branches,
    verify_asymptotics,
)
from dispersion_lab.material import (
    MaterialSpec,
    eval_epsilon,
    eval_mu,
    herglotz_sample,
    log_polar_grid,
)
from dispersion_lab.measure import atom_weight, kernel_transform_check, measure_of, reconstruct
from dispersion_lab.modal import build_modal, evolve, rk4_reference, spectral_decomposition, spectrum_consistency


def test_criterion_01_drude_bands(acceptance):
    b = band_structure(DRUDE)
    lo, hi = b.bands
    ok = (
        len(b.bands) == 2
        and abs(lo.lo) < 1e-9 and abs(lo.hi - 1) < 1e-9 and not lo.forward
        and abs(hi.lo - 2) < 1e-9 and hi.hi == math.inf and hi.forward
        and len(b.gaps) == 1 and abs(b.gaps[0][0] - 1) < 1e-9 and abs(b.gaps[0][1] - 2) < 1e-9
        and b.negative_index
    )
    acceptance(1, ok, f"bands {[(x.lo, x.hi, x.forward) for x in b.bands]}, gaps {b.gaps}")
    assert ok


def test_criterion_02_roots_match_eigenvalues(acceptance):
    rng = np.random.default_rng(2)
    specs = [random_spec(rng, dissipative=True) for _ in range(5)]
    worst = max(spectrum_consistency(s, k) for s in specs for k in np.geomspace(1e-2, 1e2, 20))
    acceptance(2, worst < 1e-8, f"max matched distance {worst:.2e} (< 1e-8 (1+|w|))")
    assert worst < 1e-8


def _band_violations(spec):
    bs = trace_branches(spec, default_k_grid(spec, points=999))
    bad = []
    if np.max(np.abs(bs.omega.imag)) >= 1e-8:
        bad.append("complex root")
    for n in nonnegative_branches(bs):
        d = np.diff(bs.omega[n].real)
        if not (np.all(d > 0) or np.all(d < 0)):
            bad.append(f"branch {n} not strictly monotone")
    bands = band_structure(spec, bs)
    for a, b in zip(bands.bands, bands.bands[1:]):
        if a.hi > b.lo:
            bad.append("overlapping bands")
    if not (bands.bands[0].forward and bands.bands[-1].forward):
        bad.append("outer band decreasing")
    rep = characterization_check(spec, bands, n=10_000)
    if rep.membership_violations or rep.orientation_violations:
        bad.append(f"characterization {rep}")
    return bad


def test_criterion_03_band_properties(acceptance):
    rng = np.random.default_rng(3)
    violations = []
    for i in range(20):
        violations += [f"spec {i}: {v}" for v in _band_violations(random_spec(rng, dissipative=False))]
    acceptance(3, not violations, f"{len(violations)} violations over 20 specs")
    assert violations == []


def test_criterion_04_high_frequency_coefficient(acceptance):
    co = asymptotic_coefficients(STRONG)
    k = 1e3 * 2.0
    roots = roots_at_k(STRONG, k, dps=50)
    ends = [roots[roots.real > 0], roots[roots.real < 0]]
    ends = [r[np.argmax(np.abs(r))] for r in ends]
    defects = [abs(w.imag * 2 * STRONG.c**2 * k**2 / co.A_infinity + 1) for w in ends]
    fits = [f for f in verify_asymptotics(STRONG, co) if f.regime == "hf" and np.isinf(f.anchor.real)]
    slopes = [f.fitted_exponent for f in fits]
    ok = max(defects) < 0.02 and all(abs(s + 2) < 0.05 for s in slopes) and len(fits) == 2
    acceptance(4, ok, f"coefficient defects {max(defects):.2e}, slopes {np.round(slopes, 4).tolist()}")
    assert ok


def test_criterion_05_weak_resonant_exponent(acceptance):
    fits = [f for f in verify_asymptotics(WEAK) if f.expected_exponent == -4.0]
    slopes = [f.fitted_exponent for f in fits]
    ok = len(fits) > 0 and all(abs(s + 4) < 0.05 for s in slopes)
    acceptance(5, ok, f"resonant branch slopes {np.round(slopes, 4).tolist()} (target -4 +/- 0.05)")
    assert ok


def test_criterion_06_low_frequency(acceptance):
    fits = [f for f in verify_asymptotics(STRONG) if f.regime == "lf" and f.anchor == 0]
    slopes = [f.fitted_exponent for f in fits]
    ratios = [f.fitted_coefficient / f.reference_coefficient for f in fits]
    derived = [f.relative_defect for f in fits]
    ok = len(fits) == 2 and all(abs(s - 2) < 0.05 for s in slopes)
    acceptance(6, ok, f"slopes {np.round(slopes, 4).tolist()}; fitted/reference coefficient "
                      f"{np.round(ratios, 4).tolist()}; defect vs derived {max(derived):.1e}")
    assert ok


def _frequency_scale(sys):
    return float(np.max(np.abs(linalg.eigvals(sys.matrix))))


def test_criterion_07_conservation(acceptance):
    sys = build_modal(LOSSLESS, 1.5)
    w = _frequency_scale(sys)
    u0 = np.random.default_rng(7).standard_normal(sys.dim).astype(complex)
    t = 100 / w
    led = rk4_reference(sys, u0, t, 1e-3 / w, record_every=1000)
    rk4 = led.relative_drift
    e0 = sys.energy(u0)
    exact = abs(sys.energy(evolve(spectral_decomposition(sys), u0, t)) - e0) / e0
    ok = rk4 < 1e-8 and exact < 1e-12
    acceptance(7, ok, f"RK4 drift {rk4:.2e} (< 1e-8), exact drift {exact:.2e} (< 1e-12)")
    assert ok


def test_criterion_08_dissipation_identity(acceptance):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(5):
        spec = random_spec(rng, dissipative=True)
        sys = build_modal(spec, float(rng.uniform(0.2, 5.0)))
        w = _frequency_scale(sys)
        u0 = rng.standard_normal(sys.dim) + 1j * rng.standard_normal(sys.dim)
        led = rk4_reference(sys, u0, 20 / w, 1e-3 / w)
        worst = max(worst, led.max_balance_defect / (np.max(led.energy) * w))
    acceptance(8, worst < 1e-6, f"max |de/dt + dissipation| / (max e * w_max) = {worst:.2e}")
    assert worst < 1e-6


DECAY_CASES = [
    ("strong", STRONG, 4, 0, 1.5, 0.15),
    ("strong", STRONG, 1, 3, 1.0, 0.1),
    ("weak", WEAK, 2, 3, 1.0, 0.1),
    ("weak", WEAK, 4, 0, 1.5, 0.15),
]


@pytest.mark.slow
@pytest.mark.parametrize("label,spec,s,p,target,tol", DECAY_CASES,
                         ids=[f"{c[0]}-s{c[2]}-p{c[3]}" for c in DECAY_CASES])
def test_criterion_09_decay_exponents(acceptance, label, spec, s, p, target, tol):
    tr = energy_trace(spec, InitialDataProfile(p, s), np.geomspace(1.0, 1e7, 43), threads=4)
    fitted = tr.fitted_exponent
    ok = abs(fitted - target) <= tol
    acceptance(9, ok, f"{label} (s={s}, p={p}): fitted {fitted:.3f}, "
                      f"target {target} +/- {tol}, R^2 {tr.r2:.5f}")
    assert abs(fitted - target) <= tol


def test_criterion_10_measure_round_trip(acceptance):
    rng = np.random.default_rng(10)
    worst = 0.0
    for spec in (STRONG, WEAK):
        for channel, law in (("electric", eval_epsilon), ("magnetic", eval_mu)):
            m = measure_of(spec, channel)
            w = rng.uniform(-5, 5, 50) + 1j * rng.uniform(0.05, 5, 50)
            ref = law(spec, w)
            worst = max(worst, float(np.max(np.abs(reconstruct(m, w) - ref) / np.abs(ref))))
    osc_spec = MaterialSpec(electric=[(1.3, 2.0, 0.0)])
    weight = atom_weight(lambda z: z * eval_epsilon(osc_spec, z) / osc_spec.eps0, 2.0).limit
    atom_err = abs(weight / (1.3**2 / 2) - 1)
    mins = []
    for _ in range(20):
        h = herglotz_sample(random_spec(rng, dissipative=True), log_polar_grid(10_000))
        mins.append(min(h.min_im_omega_eps, h.min_im_omega_mu))
    ok = worst < 1e-6 and atom_err < 0.01 and min(mins) > 0
    acceptance(10, ok, f"reconstruction {worst:.1e}, atom weight error {atom_err:.1e}, "
                       f"Herglotz minimum {min(mins):.2e}")
    assert ok


def test_criterion_11_kernel_transform(acceptance):
    worst = 0.0
    for osc in STRONG.oscillators + WEAK.oscillators:
        lift = osc.damping / 2 + 1
        for x in np.linspace(-4, 4, 10):
            worst = max(worst, kernel_transform_check(osc, complex(x, lift + 0.1 * abs(x))))
    acceptance(11, worst < 1e-6, f"max kernel Laplace defect {worst:.1e}")
    assert worst < 1e-6
