"""Modal operator at fixed wavenumber: assembly, spectral projectors, time evolution.

One transverse polarization block is a ``(2N+2)``-dimensional system on
``U = (E, H, P_1, dP_1, ..., M_1, dM_1, ...)`` written as ``U' = -i A U``.
In the frame ``(e1, e2, k/|k|)`` the ``+1`` block carries ``(E.e1, H.e2)`` and the
``-1`` block ``(E.e2, H.e1)``; the two blocks only differ by the sign of the
curl coupling and have the same spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.optimize import linear_sum_assignment

from .errors import ClusterSeparationFailure, StepTooLarge
from .material import MaterialSpec

DEGENERACY_RTOL = 1e-6
CONTOUR_NODES = 128


@dataclass(frozen=True)
class ModalSystem:
    """``A`` (``U' = -i A U``) with its energy weights and damping diagonal.

    ``A = A0 - i diag(damping)`` where ``A0`` is self-adjoint for the weights.
    """

    k_abs: float
    polarization_sign: int
    matrix: np.ndarray
    weights: np.ndarray
    damping: np.ndarray
    spec: MaterialSpec

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def energy(self, u) -> float:
        """``0.5 * sum(weights * |u|**2)``."""
        return 0.5 * float(np.sum(self.weights * np.abs(u) ** 2))

    def dissipation(self, u) -> float:
        """Rate of energy loss: ``sum(weights * damping * |u|**2)``."""
        return float(np.sum(self.weights * self.damping * np.abs(u) ** 2))

    def electromagnetic_energy(self, u) -> float:
        return 0.5 * float(self.weights[0] * abs(u[0]) ** 2 + self.weights[1] * abs(u[1]) ** 2)

    def skew_defect(self) -> float:
        """``||G W + W G^H||`` for the lossless generator ``G = -i A0`` and ``W = diag(weights)``.

        Zero iff ``A0`` is self-adjoint in the weighted product; stays meaningful
        when a Drude term gives a zero weight.
        """
        a0 = self.matrix + 1j * np.diag(self.damping)
        g = -1j * a0
        w = np.diag(self.weights)
        scale = max(np.linalg.norm(g) * np.max(self.weights), 1e-300)
        return float(np.linalg.norm(w @ g + g.conj().T @ w) / scale)


def build_modal(spec: MaterialSpec, k_abs: float, polarization_sign: int = 1) -> ModalSystem:
    """Assemble the modal matrix of one polarization block at wavenumber ``k_abs``."""
    if k_abs < 0:
        raise ValueError("k_abs must be >= 0")
    if polarization_sign not in (1, -1):
        raise ValueError("polarization_sign must be +1 or -1")
    n = 2 + 2 * spec.n_oscillators
    g = np.zeros((n, n), dtype=complex)
    weights = np.empty(n)
    damping = np.zeros(n)
    ik = 1j * polarization_sign * k_abs
    g[0, 1] = ik / spec.eps0
    g[1, 0] = ik / spec.mu0
    weights[0], weights[1] = spec.eps0, spec.mu0
    idx = 2
    for field_row, base, oscs in ((0, spec.eps0, spec.electric), (1, spec.mu0, spec.magnetic)):
        for o in oscs:
            p, dp = idx, idx + 1
            g[field_row, dp] = -o.coupling**2
            g[p, dp] = 1.0
            g[dp, field_row] = 1.0
            g[dp, p] = -o.resonance**2
            g[dp, dp] = -o.damping
            weights[p] = base * o.coupling**2 * o.resonance**2
            weights[dp] = base * o.coupling**2
            damping[dp] = o.damping
            idx += 2
    return ModalSystem(float(k_abs), polarization_sign, 1j * g, weights, damping, spec)


# ------------------------------------------------------------ projectors


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues and spectral projectors of a :class:`ModalSystem`.

    ``groups[i]`` lists the eigenvalue indices sharing projector ``projectors[i]``;
    singleton groups are ordinary rank-one projectors, larger groups come from the
    contour fallback on a near-degenerate cluster.
    """

    system: ModalSystem
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    projectors: tuple[np.ndarray, ...]
    groups: tuple[tuple[int, ...], ...]
    diagonalizable: bool
    condition: np.ndarray

    def completeness_defect(self) -> float:
        s = sum(self.projectors)
        return float(np.linalg.norm(s - np.eye(self.system.dim)))

    def idempotency_defect(self) -> float:
        worst = 0.0
        for i, pi in enumerate(self.projectors):
            for j, pj in enumerate(self.projectors):
                target = pi if i == j else 0
                worst = max(worst, float(np.linalg.norm(pi @ pj - target)))
        return worst


def _weighted_norm(sys: ModalSystem, m: np.ndarray) -> float:
    if np.all(sys.weights > 0):
        w = np.sqrt(sys.weights)
        return float(np.linalg.norm(w[:, None] * m / w[None, :], 2))
    return float(np.linalg.norm(m, 2))


def _clusters(vals, tol):
    n = len(vals)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(vals[i] - vals[j]) < tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])


def _contour_projector(a, vals, members, nodes=CONTOUR_NODES):
    center = np.mean(vals[list(members)])
    rho = max(float(np.max(np.abs(vals[list(members)] - center))), 1e-14 * max(1.0, abs(center)))
    others = [vals[i] for i in range(len(vals)) if i not in members]
    d = min((abs(v - center) for v in others), default=math.inf)
    if d < 10 * rho:
        raise ClusterSeparationFailure(
            f"cluster at {center:.6g} (radius {rho:.3g}) lies within 10x of another eigenvalue"
        )
    r = math.sqrt(rho * d) if math.isfinite(d) else 2 * rho + 1.0
    n = a.shape[0]
    eye = np.eye(n)
    acc = np.zeros((n, n), dtype=complex)
    for th in 2 * math.pi * np.arange(nodes) / nodes:
        z = center + r * np.exp(1j * th)
        # (1/2 pi i) oint (z - A)^-1 dz with dz = i r e^{i th} dth
        acc += np.linalg.solve(z * eye - a, eye) * r * np.exp(1j * th)
    return acc / nodes


def spectral_decomposition(sys: ModalSystem, degeneracy_rtol: float = DEGENERACY_RTOL) -> SpectralDecomposition:
    """Eigenvalues with right/left eigenvectors and spectral projectors.

    Left eigenvectors come from the adjoint eigenproblem. Eigenvalues closer than
    ``degeneracy_rtol * scale`` are merged and their joint projector is computed by
    trapezoidal quadrature of the resolvent on a separating circle.
    """
    a = sys.matrix
    vals, right = linalg.eig(a)
    order = sorted(range(len(vals)), key=lambda i: (round(vals[i].real, 12), vals[i].imag))
    vals, right = vals[order], right[:, order]
    lvals, left = linalg.eig(a.conj().T)
    cost = np.abs(vals[:, None] - lvals.conj()[None, :])
    rows, cols = linear_sum_assignment(cost)
    left = left[:, cols[np.argsort(rows)]]

    scale = max(1.0, float(np.max(np.abs(vals))) if len(vals) else 1.0)
    groups = _clusters(vals, degeneracy_rtol * scale)
    projectors = []
    cond = np.empty(len(groups))
    for gi, g in enumerate(groups):
        if len(g) == 1:
            v, w = right[:, g[0]], left[:, g[0]]
            proj = np.outer(v, w.conj()) / (w.conj() @ v)
        else:
            proj = _contour_projector(a, vals, g)
        projectors.append(proj)
        cond[gi] = _weighted_norm(sys, proj)
    diagonalizable = all(len(g) == 1 for g in groups)
    return SpectralDecomposition(sys, vals, right, left, tuple(projectors), tuple(groups),
                                 diagonalizable, cond)


def evolve(decomp: SpectralDecomposition, u0, t: float) -> np.ndarray:
    """``exp(-i A t) u0`` as a sum over spectral projectors."""
    if t < 0:
        raise ValueError("t must be >= 0")
    u0 = np.asarray(u0, dtype=complex)
    out = np.zeros_like(u0)
    a = decomp.system.matrix
    for g, proj in zip(decomp.groups, decomp.projectors):
        pu = proj @ u0
        if len(g) == 1:
            out += np.exp(-1j * decomp.eigenvalues[g[0]] * t) * pu
        else:
            # the block may be defective: apply the exponential restricted to the cluster
            out += linalg.expm(-1j * a * t) @ pu
    return out


# ------------------------------------------------------------- reference


@dataclass(frozen=True)
class EnergyLedger:
    """RK4 trajectory summary: ``balance_defect = de/dt + dissipation`` by centred differences."""

    state: np.ndarray
    times: np.ndarray
    energy: np.ndarray
    dissipation: np.ndarray
    balance_defect: np.ndarray

    @property
    def max_balance_defect(self) -> float:
        return float(np.max(np.abs(self.balance_defect))) if self.balance_defect.size else 0.0

    @property
    def relative_drift(self) -> float:
        e0 = self.energy[0]
        return float(np.max(np.abs(self.energy - e0)) / e0) if e0 else 0.0


def rk4_reference(sys: ModalSystem, u0, t: float, dt: float, record_every: int = 1) -> EnergyLedger:
    """Classic fourth-order Runge-Kutta for ``U' = -i A U`` with an energy ledger."""
    norm_a = float(np.linalg.norm(sys.matrix, 2))
    if dt <= 0 or dt > 0.1 / max(norm_a, 1e-300):
        raise StepTooLarge(f"dt={dt:.3g} exceeds 0.1/||A|| = {0.1 / max(norm_a, 1e-300):.3g}")
    steps = max(1, math.ceil(t / dt - 1e-12))
    h = t / steps
    g = -1j * sys.matrix
    # one RK4 step is multiplication by the degree-4 Taylor polynomial of h*G
    hg = h * g
    step = np.eye(sys.dim) + hg @ (np.eye(sys.dim) + hg @ (np.eye(sys.dim) / 2
                                   + hg @ (np.eye(sys.dim) / 6 + hg / 24)))
    u = np.asarray(u0, dtype=complex).copy()
    states = [u.copy()]
    for i in range(steps):
        u = step @ u
        if (i + 1) % record_every == 0 or i + 1 == steps:
            states.append(u.copy())
    states = np.array(states)
    times = np.concatenate([[0.0], np.minimum(
        h * record_every * np.arange(1, len(states)), t)])
    energy = 0.5 * np.sum(sys.weights * np.abs(states) ** 2, axis=1)
    diss = np.sum(sys.weights * sys.damping * np.abs(states) ** 2, axis=1)
    if len(times) >= 3:
        dedt = (energy[2:] - energy[:-2]) / (times[2:] - times[:-2])
        defect = dedt + diss[1:-1]
    else:
        defect = np.zeros(0)
    return EnergyLedger(u, times, energy, diss, defect)


# ------------------------------------------------------------- checks


def spectrum_consistency(spec: MaterialSpec, k_abs: float) -> float:
    """Largest ``|eig - root| / (1 + |root|)`` after optimally matching dispersion roots
    into the eigenvalues of both polarization blocks.

    Drude terms add eigenvalues at 0 with no dispersion root; only roots are matched.
    """
    from .dispersion import roots_at_k

    if k_abs <= 0:
        raise ValueError("k_abs must be > 0")
    roots = roots_at_k(spec, k_abs)
    worst = 0.0
    for sign in (1, -1):
        eig = linalg.eigvals(build_modal(spec, k_abs, sign).matrix)
        cost = np.abs(roots[:, None] - eig[None, :])
        r, c = linear_sum_assignment(cost)
        worst = max(worst, float(np.max(cost[r, c] / (1 + np.abs(roots[r])))))
    return worst


def projector_bounds(spec: MaterialSpec, k_grid) -> np.ndarray:
    """``max_n ||Pi_n||`` (weighted operator norm) at every wavenumber of ``k_grid``."""
    return np.array([
        float(np.max(spectral_decomposition(build_modal(spec, k)).condition)) for k in k_grid
    ])


def decay_rate(spec: MaterialSpec, k_abs: float) -> float:
    """``min_n (-Im omega_n)``: the slowest exponential rate of the block at ``k_abs``."""
    eig = linalg.eigvals(build_modal(spec, k_abs).matrix)
    return float(np.min(-eig.imag))
