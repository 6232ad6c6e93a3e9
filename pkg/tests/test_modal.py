import math

import numpy as np
import pytest
from scipy import linalg
from scipy.integrate import solve_ivp

from conftest import DRUDE, LOSSLESS, STRONG, WEAK, random_spec
from dispersion_lab.dispersion import roots_at_k
from dispersion_lab.errors import ClusterSeparationFailure, StepTooLarge
from dispersion_lab.material import VACUUM, MaterialSpec
from dispersion_lab.modal import (
    ModalSystem,
    build_modal,
    decay_rate,
    evolve,
    projector_bounds,
    rk4_reference,
    spectral_decomposition,
    spectrum_consistency,
)


def generic_state(dim, seed=0):
    rng = np.random.default_rng(seed)
    return rng.normal(size=dim) + 1j * rng.normal(size=dim)


class TestBuild:
    def test_vacuum(self):
        sys = build_modal(VACUUM, 1.0)
        assert sys.matrix.shape == (2, 2)
        assert np.allclose(np.sort(linalg.eigvals(sys.matrix).real), [-1, 1])

    def test_dimension(self):
        assert build_modal(WEAK, 2.0).dim == 2 + 2 * 3

    def test_k0_eigenvalues_are_zeros(self):
        eig = linalg.eigvals(build_modal(LOSSLESS, 0.0).matrix)
        zeros = roots_at_k(LOSSLESS, 0.0)
        for z in zeros:
            assert np.min(np.abs(eig - z)) < 1e-10

    def test_polarizations_share_spectrum(self):
        a = np.sort_complex(linalg.eigvals(build_modal(STRONG, 2.5, 1).matrix))
        b = np.sort_complex(linalg.eigvals(build_modal(STRONG, 2.5, -1).matrix))
        assert np.allclose(a, b)

    @pytest.mark.parametrize("spec", [LOSSLESS, DRUDE, STRONG, WEAK])
    def test_lossless_part_is_self_adjoint(self, spec):
        assert build_modal(spec, 1.7).skew_defect() < 1e-12

    def test_damping_block(self):
        sys = build_modal(STRONG, 1.0)
        a0 = sys.matrix + 1j * np.diag(sys.damping)
        w = np.sqrt(sys.weights)
        h = w[:, None] * a0 / w[None, :]
        assert np.allclose(h, h.conj().T, atol=1e-12)
        assert np.all(sys.damping >= 0)

    def test_rejects_negative_k(self):
        with pytest.raises(ValueError):
            build_modal(VACUUM, -1.0)


class TestDecomposition:
    def test_vacuum_projectors(self):
        dec = spectral_decomposition(build_modal(VACUUM, 1.0))
        assert dec.completeness_defect() < 1e-15
        for p in dec.projectors:
            assert np.linalg.matrix_rank(p) == 1
        assert np.allclose(dec.projectors[0] @ dec.projectors[1], 0)

    def test_strong_high_k_residuals(self):
        sys = build_modal(STRONG, 200.0)
        dec = spectral_decomposition(sys)
        assert dec.completeness_defect() < 1e-9 and dec.idempotency_defect() < 1e-9
        for g, p in zip(dec.groups, dec.projectors):
            w = dec.eigenvalues[g[0]]
            assert np.linalg.norm(sys.matrix @ p - w * p) < 1e-9 * max(1, abs(w))

    def test_lossless_projectors_are_orthogonal(self):
        dec = spectral_decomposition(build_modal(LOSSLESS, 1.3))
        assert np.allclose(dec.condition, 1.0, atol=1e-10)

    def test_degenerate_cluster_uses_contour(self):
        # at k = 0 the E and H subsystems both have an eigenvalue at 0
        dec = spectral_decomposition(build_modal(LOSSLESS, 0.0))
        assert not dec.diagonalizable
        assert any(len(g) == 2 for g in dec.groups)
        assert dec.completeness_defect() < 1e-9 and dec.idempotency_defect() < 1e-9

    def test_cluster_separation_failure(self):
        # 0 and 0.9e-3 merge, but 2e-3 sits within 10x of the merged cluster's radius
        vals = np.array([0.0, 0.9e-3, 2e-3, 5.0])
        sys = ModalSystem(1.0, 1, np.diag(vals).astype(complex), np.ones(4), np.zeros(4), VACUUM)
        with pytest.raises(ClusterSeparationFailure):
            spectral_decomposition(sys, degeneracy_rtol=2e-4)

    def test_conjugate_symmetry(self):
        eig = spectral_decomposition(build_modal(WEAK, 3.0)).eigenvalues
        assert np.allclose(np.sort_complex(eig), np.sort_complex(-eig.conj()))


class TestEvolve:
    def test_identity_at_zero(self):
        sys = build_modal(STRONG, 2.0)
        u0 = generic_state(sys.dim)
        assert np.allclose(evolve(spectral_decomposition(sys), u0, 0.0), u0, atol=1e-12)

    def test_vacuum_half_period(self):
        dec = spectral_decomposition(build_modal(VACUUM, 1.0))
        u = evolve(dec, [1.0, 0.0], math.pi)
        assert np.allclose(u, [-1.0, 0.0], atol=1e-12)

    @pytest.mark.parametrize("spec", [STRONG, WEAK, DRUDE])
    def test_matches_matrix_exponential(self, spec):
        sys = build_modal(spec, 1.4)
        u0 = generic_state(sys.dim, 3)
        exact = linalg.expm(-1j * sys.matrix * 2.5) @ u0
        assert np.allclose(evolve(spectral_decomposition(sys), u0, 2.5), exact, atol=1e-10)

    def test_matches_ode_solver(self):
        sys = build_modal(WEAK, 0.8)
        u0 = generic_state(sys.dim, 5)
        sol = solve_ivp(lambda t, u: -1j * sys.matrix @ u, (0, 4.0), u0, rtol=1e-11, atol=1e-13)
        assert np.allclose(evolve(spectral_decomposition(sys), u0, 4.0), sol.y[:, -1], atol=1e-8)

    def test_cluster_evolution(self):
        sys = build_modal(LOSSLESS, 0.0)
        u0 = generic_state(sys.dim, 2)
        exact = linalg.expm(-1j * sys.matrix * 3.0) @ u0
        assert np.allclose(evolve(spectral_decomposition(sys), u0, 3.0), exact, atol=1e-9)


class TestReference:
    def test_step_too_large(self):
        sys = build_modal(STRONG, 10.0)
        with pytest.raises(StepTooLarge):
            rk4_reference(sys, np.ones(sys.dim), 1.0, 0.1)

    def test_zero_state_stays_zero(self):
        sys = build_modal(STRONG, 1.0)
        led = rk4_reference(sys, np.zeros(sys.dim), 1.0, 1e-3)
        assert np.all(led.state == 0) and np.all(led.energy == 0)

    def test_dissipative_energy_strictly_decreasing(self):
        sys = build_modal(STRONG, 1.0)
        led = rk4_reference(sys, generic_state(sys.dim), 5.0, 1e-3, record_every=10)
        assert np.all(np.diff(led.energy) < 0)

    def test_agrees_with_evolve(self):
        sys = build_modal(STRONG, 1.5)
        u0 = generic_state(sys.dim, 1)
        t = 10 / 2.0
        led = rk4_reference(sys, u0, t, 1e-3 / 2.0, record_every=100)
        exact = evolve(spectral_decomposition(sys), u0, t)
        assert abs(sys.energy(led.state) / sys.energy(exact) - 1) < 1e-6


class TestConsistency:
    def test_drude_k1(self):
        assert spectrum_consistency(DRUDE, 1.0) < 1e-12

    def test_vacuum(self):
        assert spectrum_consistency(VACUUM, 5.0) < 1e-14

    def test_random_dissipative(self):
        rng = np.random.default_rng(42)
        spec = random_spec(rng)
        for k in rng.uniform(0.05, 50.0, 20):
            assert spectrum_consistency(spec, k) < 1e-8

    def test_projector_bound_stable(self):
        ks = np.geomspace(10 * 2.0, 1e4 * 2.0, 50)
        b = projector_bounds(STRONG, ks)
        assert np.all(np.isfinite(b)) and b.max() < 2 * b.min()

    def test_middle_frequency_exponential_decay(self):
        k = 1.0
        sys = build_modal(STRONG, k)
        dec = spectral_decomposition(sys)
        nu = decay_rate(STRONG, k)
        u0 = generic_state(sys.dim, 9)
        ts = np.linspace(40, 80, 9)
        norms = [math.sqrt(sys.energy(evolve(dec, u0, t))) for t in ts]
        rate = -np.polyfit(ts, np.log(norms), 1)[0]
        assert rate == pytest.approx(nu, rel=0.05)
