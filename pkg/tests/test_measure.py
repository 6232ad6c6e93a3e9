import math

import numpy as np
import pytest
from scipy import integrate

from conftest import STRONG, WEAK
from dispersion_lab.errors import NonConvergent, TruncationError
from dispersion_lab.material import MaterialSpec, Oscillator, eval_epsilon, eval_mu
from dispersion_lab.measure import (
    DensityTerm,
    atom_weight,
    kernel_transform,
    kernel_transform_check,
    measure_of,
    reconstruct,
    stieltjes_window,
    susceptibility_kernel,
)


def test_undamped_masses():
    m = measure_of(MaterialSpec(electric=[(2.0, 3.0, 0.0)]))
    assert m.point_masses == ((-3.0, 2.0), (3.0, 2.0))
    assert m.herglotz_slope == 1.0


def test_drude_mass_at_zero():
    m = measure_of(MaterialSpec(magnetic=[(2.0, 0.0, 0.0)], mu0=2.0), "magnetic")
    assert m.point_masses == ((0.0, 4.0),)
    assert m.herglotz_slope == 2.0


def test_density_mass_equals_coupling_squared():
    d = DensityTerm(1.5, 2.0, 0.7)
    total, _ = integrate.quad(d, -np.inf, np.inf, limit=400)
    assert total == pytest.approx(d.mass, rel=1e-8)


def test_density_even():
    d = DensityTerm(1.0, 1.0, 0.3)
    xi = np.linspace(0.1, 5, 11)
    assert np.allclose(d(xi), d(-xi))


@pytest.mark.parametrize("spec,channel", [(STRONG, "electric"), (STRONG, "magnetic"), (WEAK, "magnetic")])
def test_reconstruct_matches_closed_form(spec, channel):
    m = measure_of(spec, channel)
    law = eval_epsilon if channel == "electric" else eval_mu
    for w in (0.5 + 0.5j, 2.0 + 0.1j, -1.3 + 2.0j, 8.0 + 0.05j):
        assert reconstruct(m, w) == pytest.approx(law(spec, w), rel=1e-8)


def test_integrate_total_mass():
    m = measure_of(WEAK, "magnetic")
    assert m.integrate(lambda x: 1.0) == pytest.approx(2.0, rel=1e-7)


def test_atom_weight_recovers_half_coupling_squared():
    spec = MaterialSpec(electric=[(1.5, 2.0, 0.0)])
    res = atom_weight(lambda w: w * eval_epsilon(spec, w) / spec.eps0, 2.0)
    # omega*eps/eps0 has residue coupling**2 / 2 at the resonance
    assert res.limit == pytest.approx(1.5**2 / 2, rel=1e-6)


def test_atom_weight_off_atom_is_zero():
    spec = MaterialSpec(electric=[(1.0, 2.0, 0.0)])
    res = atom_weight(lambda w: w * eval_epsilon(spec, w), 1.0)
    assert abs(res.limit) < 1e-6


def test_window_counts_interior_atom_twice():
    spec = MaterialSpec(electric=[(1.0, 2.0, 0.0)])
    res = stieltjes_window(lambda w: w * eval_epsilon(spec, w), 1.5, 2.5, points=[2.0])
    assert res.limit == pytest.approx(2 * 0.5, rel=1e-4)


def test_window_matches_density_integral():
    spec = MaterialSpec(electric=[(1.0, 1.5, 0.4)])
    d = measure_of(spec).densities[0]
    exact, _ = integrate.quad(d, 1.0, 2.0, epsabs=1e-13)
    res = stieltjes_window(lambda w: w * eval_epsilon(spec, w), 1.0, 2.0)
    # no atoms: both halves of the window sum equal the density integral
    assert res.limit == pytest.approx(2 * exact, rel=1e-5)


def test_eta_sequence_validated():
    with pytest.raises(ValueError):
        atom_weight(lambda w: w, 0.0, etas=(1e-3, 1e-2))


def test_nonconvergent_detected():
    # a function whose eta-dependence is not polynomial near zero
    with pytest.raises(NonConvergent):
        atom_weight(lambda w: 1j * np.sin(1 / w.imag) / w.imag, 0.0, etas=(1e-2, 9e-3, 8e-3))


@pytest.mark.parametrize("w0,a", [(2.0, 0.5), (1.0, 2.0), (1.0, 3.0), (0.0, 1.0)])
def test_kernel_solves_ode(w0, a):
    o = Oscillator(1.3, w0, a)
    t = np.linspace(0.0, 6.0, 4001)
    chi = susceptibility_kernel(o, t)
    dt = t[1] - t[0]
    d1 = np.gradient(chi, dt, edge_order=2)
    d2 = np.gradient(d1, dt, edge_order=2)
    resid = d2 + a * d1 + w0**2 * chi
    assert np.max(np.abs(resid[5:-5])) < 1e-4
    assert chi[0] == 0 and d1[0] == pytest.approx(1.3**2, rel=1e-5)


def test_kernel_closed_values():
    # undamped: sin(w0 t) / w0 * coupling**2
    o = Oscillator(1.0, 2.0, 0.0)
    assert susceptibility_kernel(o, math.pi / 4) == pytest.approx(0.5)
    # critical: t exp(-t) for alpha = 2, w0 = 1
    assert susceptibility_kernel(Oscillator(1.0, 1.0, 2.0), 1.0) == pytest.approx(math.exp(-1))


@pytest.mark.parametrize("o", [Oscillator(1.0, 2.0, 0.5), Oscillator(0.7, 1.0, 3.0), Oscillator(1.0, 0.0, 1.0)])
def test_kernel_transform_defect(o):
    for x in (-3.0, 0.0, 0.7, 4.0):
        w = x + 1j * (o.damping / 2 + 1.0)
        assert kernel_transform_check(o, w) < 1e-8


def test_kernel_transform_requires_decay():
    with pytest.raises(TruncationError):
        kernel_transform(Oscillator(1.0, 2.0, 0.0), 1.0 + 0j)
