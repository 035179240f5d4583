"""Vertex-operator correlators and quantum kink profiles.

Vertex operators exp(i alpha phi_n) factor over modes as displacements
exp(i alpha V[n, s] x_s), all diagonal in the joint position basis.  The
connected correlator uses the ground-state phase identity
<O| exp(iHt) = exp(i E0 t) <O| so only the annihilation-side state is evolved.

Kink sector: the classical lattice kink (fixed boundary values, no periodic
wrap in the classical energy) is projected onto the mode basis and enters the
quantum Hamiltonian as a per-site shift of the cosine argument; the quadratic
part is unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import HybridState, OperatorMatrix, RegisterShape, _apply_local
from .lattice import (
    FourierData,
    SineGordonParams,
    fourier_data,
    ground_state,
    hamiltonian_matrix,
    position_basis,
)
from .qite import QiteConfig, qite_run

GROUND_ED = "ed"
GROUND_QITE = "qite"


@dataclass(frozen=True)
class VertexConfig:
    alpha: float
    site_n: int
    site_k: int
    t_grid: tuple
    ground_source: str = GROUND_ED


@dataclass(frozen=True)
class KinkConfig:
    phi_left: float
    phi_right: float
    grad_tol: float = 1e-10
    max_iter: int = 200


@dataclass
class KinkProfile:
    mean_phi: np.ndarray
    variance: np.ndarray
    classical_phi: np.ndarray


def vertex_operator(alpha: float, site: int, fourier: FourierData, cutoff: int) -> list[np.ndarray]:
    """Per-mode factors exp(i alpha V[site, s] x_s) of exp(i alpha phi_site)."""
    xi, q = position_basis(cutoff)
    out = []
    for s in range(fourier.v.shape[0]):
        phase = np.exp(1j * alpha * fourier.v[site, s] * xi)
        out.append((q * phase) @ q.conj().T)
    return out


def apply_vertex(state: HybridState, alpha: float, site: int, fourier: FourierData) -> HybridState:
    """exp(i alpha phi_site) |state>, applied mode-locally."""
    shape = state.shape
    factors = vertex_operator(alpha, site, fourier, shape.cutoff)
    psi = state.amplitudes.reshape(shape.dims)
    for s, f in enumerate(factors):
        psi = _apply_local(psi, f, [shape.mode(s)], shape.dims)
    return HybridState(shape, psi.reshape(-1), state.norm_factor)


def _prepare_ground(params, cutoff, source, qite_config, shift=None):
    """Ground state and its energy from the chosen source, on bare modes.

    The QITE source is self-consistent: its energy estimate (not the ED
    value) provides the correlator phase.
    """
    bare = RegisterShape(0, params.L, cutoff)
    if source == GROUND_ED:
        (e0, vec), = ground_state(params, cutoff, k=1, shift=shift)
        return HybridState(bare, vec), float(e0)
    if source == GROUND_QITE:
        cfg = qite_config or QiteConfig(dtau=0.5, steps=10)
        trace, final = qite_run(params, cutoff, cfg, shift=shift)
        if final.shape.n_qubits:
            # project the ancillas back onto |0...0> and renormalize
            dim = cutoff**params.L
            psi = final.amplitudes.reshape(-1, dim)[0]
            final = HybridState(bare, psi / np.linalg.norm(psi))
        return final, float(trace.energy[-1])
    raise ValueError(f"unknown ground source {source!r}")


def vertex_correlator_series(
    params: SineGordonParams,
    cutoff: int,
    config: VertexConfig,
    qite_config: QiteConfig | None = None,
) -> tuple[np.ndarray, np.ndarray, dict]:
    """Connected vertex correlator G_c(n, k, t) on an ascending grid from 0.

    G_c = exp(i E0 t) <O| exp(i a phi_n) U(t) exp(-i a phi_k) |O>
          - <O| exp(i a phi_n) |O> <O| exp(-i a phi_k) |O>
    with U(t) = exp(-i H t) applied through the dense eigendecomposition (so
    an ED-sourced ground state gives G_c(alpha=0) = 0 identically) and E0
    taken from the same ground source as |O>.
    """
    t_grid = np.asarray(config.t_grid, dtype=float)
    if t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must ascend from 0")
    if not (0 <= config.site_n < params.L and 0 <= config.site_k < params.L):
        raise ValueError("correlator sites outside the lattice")
    fd = fourier_data(params.L)
    omega, e0 = _prepare_ground(params, cutoff, config.ground_source, qite_config)
    bra = apply_vertex(omega, -config.alpha, config.site_n, fd)  # (e^{ia phi_n})† |O>
    chi = apply_vertex(omega, -config.alpha, config.site_k, fd)
    disc = complex(np.vdot(bra.amplitudes, omega.amplitudes)) * complex(
        np.vdot(omega.amplitudes, chi.amplitudes)
    )
    evals, vecs = np.linalg.eigh(hamiltonian_matrix(params, cutoff).mat)
    chi_modes = vecs.conj().T @ chi.amplitudes
    bra_modes = vecs.conj().T @ bra.amplitudes
    values = []
    for t in t_grid:
        g1 = np.exp(1j * e0 * t) * complex(
            np.vdot(bra_modes, np.exp(-1j * evals * t) * chi_modes)
        )
        values.append(g1 - disc)
    meta = {"e0": e0, "ground_source": config.ground_source, "propagator": "eigh"}
    return t_grid, np.array(values), meta


def classical_energy(params: SineGordonParams, phi: np.ndarray) -> float:
    """Clamped-boundary lattice energy: gradient links 0..L-2 plus the cosine
    potential on every site (no periodic wrap term)."""
    grad = 0.5 * float(np.sum(np.diff(phi) ** 2))
    pot = params.pot_amplitude * float(np.sum(1.0 - np.cos(params.beta * phi)))
    return grad + pot


def classical_kink(params: SineGordonParams, config: KinkConfig) -> np.ndarray:
    """Static field minimizing the clamped-boundary energy, by damped Newton
    iteration from the linear interpolation between the boundary values."""
    L = params.L
    phi = np.linspace(config.phi_left, config.phi_right, L)
    if L == 2:
        return phi
    m2 = params.m**2

    def grad_hess(p):
        interior = p[1:-1]
        g = -(p[2:] - 2 * interior + p[:-2]) + (m2 / params.beta) * np.sin(params.beta * interior)
        h = np.diag(2.0 + m2 * np.cos(params.beta * interior))
        idx = np.arange(L - 3)
        h[idx, idx + 1] = -1.0
        h[idx + 1, idx] = -1.0
        return g, h

    energy = classical_energy(params, phi)
    for _ in range(config.max_iter):
        g, h = grad_hess(phi)
        if np.linalg.norm(g) < config.grad_tol:
            return phi
        lam = 0.0
        while True:
            try:
                step = np.linalg.solve(h + lam * np.eye(L - 2), -g)
            except np.linalg.LinAlgError:
                step = -g
            trial = phi.copy()
            trial[1:-1] += step
            e_new = classical_energy(params, trial)
            if e_new <= energy + 1e-15:
                phi, energy = trial, e_new
                break
            lam = 1.0 if lam == 0.0 else lam * 10.0
            if lam > 1e8:  # Levenberg damping exhausted: plain descent step
                phi[1:-1] -= 1e-3 * g
                energy = classical_energy(params, phi)
                break
    g, _ = grad_hess(phi)
    if np.linalg.norm(g) >= config.grad_tol:
        raise RuntimeError(f"kink minimizer stalled at |grad| = {np.linalg.norm(g):.3e}")
    return phi


def fourier_shift(classical_phi: np.ndarray, fourier: FourierData) -> np.ndarray:
    """Projection of the classical profile onto the mode basis: V^T phi_cl."""
    return fourier.v.T @ np.asarray(classical_phi, dtype=float)


def kink_hamiltonian(params: SineGordonParams, cutoff: int, classical_phi) -> OperatorMatrix:
    """Lattice Hamiltonian with the cosine argument shifted by the classical
    kink; the quadratic part is unchanged."""
    return hamiltonian_matrix(params, cutoff, shift=classical_phi)


def kink_profile(
    params: SineGordonParams,
    cutoff: int,
    config: KinkConfig,
    ground_source: str = GROUND_QITE,
    qite_config: QiteConfig | None = None,
) -> KinkProfile:
    """Per-site <phi_n> and variance of the shifted-sector ground state.

    mean_phi[n] = sum_s V[n,s] <x_s> + phi_cl[n]; the variance uses only the
    dynamical part (the classical c-number shift drops out).
    """
    phi_cl = classical_kink(params, config)
    omega, _ = _prepare_ground(params, cutoff, ground_source, qite_config, shift=phi_cl)
    xi, q = position_basis(cutoff)
    shape = omega.shape
    psi = omega.amplitudes.reshape(shape.dims)
    axes = [shape.mode(s) for s in range(params.L)]
    for ax in axes:
        psi = _apply_local(psi, q.conj().T, [ax], shape.dims)
    weights = np.abs(psi.reshape((-1,) + (cutoff,) * params.L)) ** 2
    weights = weights.sum(axis=0)  # trace out any ancillas
    weights = weights / weights.sum()
    grids = np.meshgrid(*([xi] * params.L), indexing="ij")
    m1 = np.array([float(np.sum(weights * grids[s])) for s in range(params.L)])
    m2 = np.array(
        [
            [float(np.sum(weights * grids[s] * grids[r])) for r in range(params.L)]
            for s in range(params.L)
        ]
    )
    cov = m2 - np.outer(m1, m1)
    fd = fourier_data(params.L)
    mean_phi = fd.v @ m1 + phi_cl
    variance = np.einsum("ns,nr,sr->n", fd.v, fd.v, cov)
    return KinkProfile(mean_phi, variance, phi_cl)
