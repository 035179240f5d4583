"""Lattice sine-Gordon model in the real-DFT mode basis.

The model on L periodic sites (lattice spacing 1) has one bosonic mode per
Fourier index s after the real discrete Fourier transform

    phi_n = sum_s V[n, s] x_s ,

which diagonalizes the hopping matrix K (eigenvalues w_s^2 = 2 - 2 cos(2 pi
s / L)).  The quadratic part becomes a sum of local terms A_s p_s^2 + B_s
x_s^2; the zero mode (B_0 = 0) evolves by a quadratic phase gate and every
other mode by the squeeze-rotation-squeeze factor S(r_s) R(W_s t) S†(r_s).
The potential is a product of L cosine gates, one per physical site, each
with the multi-mode argument beta * V[n, :] . x.

All evolutions come in two modes: "reference" (truncated matrix exponentials,
applied mode-locally or as a position-basis diagonal) and "compiled"
(elementary-gate circuits from :mod:`sgsim.trig`, two reused ancilla qubits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse.linalg

from .circuits import Circuit, simulate
from .fock import (
    DimensionGuardError,
    HybridState,
    OperatorMatrix,
    RegisterShape,
    _apply_local,
    quadrature_matrices,
    vacuum,
)
from .gates import GateSpec
from .trig import LinearInX, TrotterSchedule, trig_gate_circuit

MODE_REFERENCE = "reference"
MODE_COMPILED = "compiled"

DIMENSION_GUARD = 200_000
_DENSE_EIG_MAX = 3000  # above this, ground states come from Lanczos iteration


@dataclass(frozen=True)
class SineGordonParams:
    """Lattice sites L, mass parameter m, coupling beta (a = 1, periodic)."""

    L: int
    m: float
    beta: float

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("need at least two lattice sites")
        if self.m <= 0 or self.beta <= 0:
            raise ValueError("m and beta must be positive")

    @property
    def pot_amplitude(self) -> float:
        return self.m**2 / self.beta**2


def coupling_matrix(L: int) -> np.ndarray:
    """Circulant hopping matrix K with rows (2, -1, 0, ..., 0, -1)."""
    shift = np.roll(np.eye(L), 1, axis=0)
    return 2.0 * np.eye(L) - shift - shift.T


def real_dft_matrix(L: int) -> np.ndarray:
    """Orthogonal V with phi_n = sum_s V[n, s] x_s; V.T K V = diag(w^2).

    Rows of V.T: constant mode s=0, cosine modes 0 < s < L/2, the alternating
    Nyquist mode s = L/2 for even L, sine modes L/2 < s < L.
    """
    n = np.arange(L)
    m_rows = np.empty((L, L))
    for s in range(L):
        if s == 0:
            m_rows[s] = 1.0 / math.sqrt(L)
        elif 2 * s < L:
            m_rows[s] = math.sqrt(2.0 / L) * np.cos(2.0 * np.pi * n * s / L)
        elif 2 * s == L:
            m_rows[s] = (-1.0) ** n / math.sqrt(L)
        else:
            m_rows[s] = math.sqrt(2.0 / L) * np.sin(2.0 * np.pi * n * s / L)
    return m_rows.T


def mode_frequencies_sq(L: int) -> np.ndarray:
    """w_s^2 = 2 - 2 cos(2 pi s / L)."""
    s = np.arange(L)
    return 2.0 - 2.0 * np.cos(2.0 * np.pi * s / L)


def quad_coefficients(L: int) -> tuple[np.ndarray, np.ndarray]:
    """Weights (A_s, B_s) of the local quadratic terms A_s p_s^2 + B_s x_s^2.

    Zero mode: A = 1/2, B = 0.  Nyquist mode (even L): A = 1/2, B = w^2/2.
    Paired modes carry quarter weights A = 1/4, B = w^2/4.
    """
    w2 = mode_frequencies_sq(L)
    a = np.full(L, 0.25)
    b = w2 / 4.0
    a[0], b[0] = 0.5, 0.0
    if L % 2 == 0:
        a[L // 2], b[L // 2] = 0.5, w2[L // 2] / 2.0
    return a, b


def srs_parameters(a_s: float, b_s: float) -> tuple[float, float]:
    """Squeeze parameter and rotation frequency with
    S(r) R(W t) S†(r) = exp(-i t (A p^2 + B x^2)); requires A, B > 0.

    With the squeeze convention S(z) = exp((z* aa - z a†a†)/2) the parameter
    is r = ln(B/A)/4; the frequency is W = 2 sqrt(A B).
    """
    if a_s <= 0 or b_s <= 0:
        raise ValueError("SRS factorization needs strictly positive A and B")
    return 0.25 * math.log(b_s / a_s), 2.0 * math.sqrt(a_s * b_s)


@dataclass(frozen=True, eq=False)
class FourierData:
    """Derived mode data: DFT matrix, frequencies, quadratic weights, SRS
    parameters (r and W are 0 at the zero mode, which never uses them)."""

    v: np.ndarray
    omega_sq: np.ndarray
    a_coeff: np.ndarray
    b_coeff: np.ndarray
    r: np.ndarray
    omega_big: np.ndarray


def fourier_data(L: int) -> FourierData:
    v = real_dft_matrix(L)
    w2 = mode_frequencies_sq(L)
    a, b = quad_coefficients(L)
    r = np.zeros(L)
    omega = np.zeros(L)
    for s in range(L):
        if b[s] > 0:
            r[s], omega[s] = srs_parameters(a[s], b[s])
    return FourierData(v, w2, a, b, r, omega)


@lru_cache(maxsize=None)
def position_basis(cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of the truncated x quadrature: x = Q diag(xi) Q†."""
    x, _ = quadrature_matrices(cutoff)
    xi, q = np.linalg.eigh(x.mat)
    return xi, q


def _quad_generators(params: SineGordonParams, cutoff: int) -> list[np.ndarray]:
    x, p = quadrature_matrices(cutoff)
    x2, p2 = x.mat @ x.mat, p.mat @ p.mat
    a, b = quad_coefficients(params.L)
    return [a[s] * p2 + b[s] * x2 for s in range(params.L)]


class LatticeOps:
    """Mode-local application machinery for one (params, cutoff, shift) triple.

    ``shift`` is an optional per-site classical field offset entering the
    cosine argument (used for the kink sector); the quadratic part is
    unaffected by it.  All methods act on the mode axes of a HybridState and
    ignore any ancilla qubits in the register.
    """

    def __init__(self, params: SineGordonParams, cutoff: int, shift=None):
        self.params = params
        self.cutoff = cutoff
        self.fourier = fourier_data(params.L)
        self.shift = None if shift is None else np.asarray(shift, dtype=float)
        self.xi, self.q = position_basis(cutoff)
        self._quad_gens = _quad_generators(params, cutoff)
        self._pot = None
        self._quad_gate_cache: dict = {}

    def potential_values(self) -> np.ndarray:
        """(m^2/b^2) sum_n (1 - cos(beta phi_n)) on the joint position grid,
        shaped (cutoff,) * L."""
        if self._pot is None:
            L, lam = self.params.L, self.cutoff
            grids = np.meshgrid(*([self.xi] * L), indexing="ij")
            tot = np.zeros((lam,) * L)
            for n in range(L):
                phi_n = sum(self.fourier.v[n, s] * grids[s] for s in range(L))
                if self.shift is not None:
                    phi_n = phi_n + self.shift[n]
                tot += 1.0 - np.cos(self.params.beta * phi_n)
            self._pot = self.params.pot_amplitude * tot
        return self._pot

    def _mode_axes(self, shape: RegisterShape) -> list[int]:
        if shape.n_modes != self.params.L or shape.cutoff != self.cutoff:
            raise ValueError("state register does not match this lattice")
        return [shape.mode(s) for s in range(self.params.L)]

    def _to_position(self, psi: np.ndarray, axes, dims) -> np.ndarray:
        qh = self.q.conj().T
        for ax in axes:
            psi = _apply_local(psi, qh, [ax], dims)
        return psi

    def _from_position(self, psi: np.ndarray, axes, dims) -> np.ndarray:
        for ax in axes:
            psi = _apply_local(psi, self.q, [ax], dims)
        return psi

    def apply_exp_quad(self, state: HybridState, scale: complex) -> HybridState:
        """exp(scale * H_quad) applied mode-locally (exact, commuting terms)."""
        shape = state.shape
        axes = self._mode_axes(shape)
        psi = state.amplitudes.reshape(shape.dims)
        for s, gen in enumerate(self._quad_gens):
            evals, vecs = np.linalg.eigh(gen)
            u = (vecs * np.exp(scale * evals)) @ vecs.conj().T
            psi = _apply_local(psi, u, [axes[s]], shape.dims)
        return HybridState(shape, psi.reshape(-1), state.norm_factor)

    def apply_quad_gates(self, state: HybridState, t: float) -> HybridState:
        """One u_quad_circuit pass, applied as fused per-mode matrices: the
        quadratic phase on the zero mode and S(r) R(W t) S†(r) elsewhere.
        Equals the circuit gate sequence by construction (same factors)."""
        mats = self._quad_gate_cache.get(t)
        if mats is None:
            from .gates import mode_rotation, quadratic_phase, squeeze

            fd = self.fourier
            mats = [quadratic_phase(t, self.cutoff).mat]
            for s in range(1, self.params.L):
                sq = squeeze(fd.r[s], self.cutoff, check_leakage=False).mat
                rot = mode_rotation(fd.omega_big[s] * t, self.cutoff).mat
                mats.append(sq @ rot @ sq.conj().T)
            self._quad_gate_cache[t] = mats
        shape = state.shape
        axes = self._mode_axes(shape)
        psi = state.amplitudes.reshape(shape.dims)
        for s, u in enumerate(mats):
            psi = _apply_local(psi, u, [axes[s]], shape.dims)
        return HybridState(shape, psi.reshape(-1), state.norm_factor)

    def apply_exp_pot(self, state: HybridState, scale: complex) -> HybridState:
        """exp(scale * H_pot) via the joint position-basis diagonal (exact)."""
        shape = state.shape
        axes = self._mode_axes(shape)
        psi = state.amplitudes.reshape(shape.dims)
        psi = self._to_position(psi, axes, shape.dims)
        diag = np.exp(scale * self.potential_values())
        psi = psi * diag.reshape((1,) * shape.n_qubits + diag.shape)
        psi = self._from_position(psi, axes, shape.dims)
        return HybridState(shape, psi.reshape(-1), state.norm_factor)

    def apply_h(self, state: HybridState) -> HybridState:
        """H applied once (quadratic local terms plus potential diagonal)."""
        shape = state.shape
        axes = self._mode_axes(shape)
        psi = state.amplitudes.reshape(shape.dims)
        out = np.zeros_like(psi)
        for s, gen in enumerate(self._quad_gens):
            out += _apply_local(psi, gen, [axes[s]], shape.dims)
        pos = self._to_position(psi, axes, shape.dims)
        diag = self.potential_values()
        pos = pos * diag.reshape((1,) * shape.n_qubits + diag.shape)
        out += self._from_position(pos, axes, shape.dims)
        return HybridState(shape, out.reshape(-1), state.norm_factor)

    def energy(self, state: HybridState) -> float:
        """<psi|H|psi> / <psi|psi> with H acting on the mode sector."""
        h_psi = self.apply_h(state)
        num = np.vdot(state.amplitudes, h_psi.amplitudes)
        den = np.vdot(state.amplitudes, state.amplitudes)
        return float((num / den).real)

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        shape = RegisterShape(0, self.params.L, self.cutoff)
        return self.apply_h(HybridState(shape, vec)).amplitudes


def hamiltonian_matrix(params: SineGordonParams, cutoff: int, shift=None) -> OperatorMatrix:
    """Dense sine-Gordon Hamiltonian on the bare mode register.

    The cosine is evaluated through the eigendecomposition of its truncated
    Hermitian argument, which coincides with the joint position-basis diagonal
    used by the fast application path.
    """
    dim = cutoff**params.L
    if dim > DIMENSION_GUARD:
        raise DimensionGuardError(f"dense Hamiltonian dim {dim} exceeds guard {DIMENSION_GUARD}")
    ops = LatticeOps(params, cutoff, shift=shift)
    shape = RegisterShape(0, params.L, cutoff)
    block = np.eye(dim, dtype=complex).reshape(shape.dims + (dim,))
    out = np.zeros_like(block)
    axes = list(range(params.L))
    for s, gen in enumerate(ops._quad_gens):
        out += _apply_local(block, gen, [axes[s]], shape.dims)
    pos = block
    qh = ops.q.conj().T
    for ax in axes:
        pos = _apply_local(pos, qh, [ax], shape.dims)
    pos = pos * ops.potential_values().reshape(ops.potential_values().shape + (1,))
    for ax in axes:
        pos = _apply_local(pos, ops.q, [ax], shape.dims)
    out += pos
    return OperatorMatrix(out.reshape(dim, dim))


def ground_state(
    params: SineGordonParams, cutoff: int, k: int = 1, shift=None
) -> list[tuple[float, np.ndarray]]:
    """k lowest eigenpairs of the (possibly shifted) lattice Hamiltonian.

    Dense eigensolve at small dimension, Lanczos with a deterministic start
    vector above ``_DENSE_EIG_MAX``.
    """
    dim = cutoff**params.L
    if dim > DIMENSION_GUARD:
        raise DimensionGuardError(f"dim {dim} exceeds guard {DIMENSION_GUARD}")
    if dim <= _DENSE_EIG_MAX:
        h = hamiltonian_matrix(params, cutoff, shift=shift).mat
        evals, vecs = np.linalg.eigh(h)
        return [(float(evals[i]), vecs[:, i].astype(complex)) for i in range(k)]
    ops = LatticeOps(params, cutoff, shift=shift)
    lin = scipy.sparse.linalg.LinearOperator(
        (dim, dim), matvec=ops.matvec, dtype=complex
    )
    v0 = np.full(dim, 1.0 / math.sqrt(dim))
    evals, vecs = scipy.sparse.linalg.eigsh(lin, k=k, which="SA", v0=v0, tol=1e-12)
    order = np.argsort(evals)
    return [(float(evals[i]), vecs[:, i].astype(complex)) for i in order]


def u_quad_circuit(params: SineGordonParams, t: float, shape: RegisterShape) -> Circuit:
    """Exact quadratic evolution: quadratic phase on the zero mode, then the
    squeeze-rotation-squeeze factor on every mode with B_s > 0."""
    fd = fourier_data(params.L)
    steps = [GateSpec("QP", (t,), (shape.mode(0),))]
    for s in range(1, params.L):
        mode = shape.mode(s)
        steps += [
            GateSpec("S", (-fd.r[s],), (mode,)),
            GateSpec("ROT", (fd.omega_big[s] * t,), (mode,)),
            GateSpec("S", (fd.r[s],), (mode,)),
        ]
    return Circuit(shape, steps, {"t": t})


def u_pot_circuit(
    params: SineGordonParams,
    t: float,
    schedule: TrotterSchedule,
    mode: str,
    shape: RegisterShape,
) -> Circuit:
    """Potential evolution exp(-i t H_pot) up to the tracked constant phase
    exp(-i t L m^2 / beta^2): one cosine gate exp(+i t m^2/b^2 cos(b V_n . x))
    per site.  Compiled mode emits trig circuits on the two register ancillas;
    reference mode emits one REF gate per site."""
    fd = fourier_data(params.L)
    amp = params.pot_amplitude
    steps: list = []
    if mode == MODE_COMPILED:
        if shape.n_qubits < 2:
            raise ValueError("compiled potential needs two ancilla qubits")
        for n in range(params.L):
            arg = LinearInX(tuple(params.beta * fd.v[n, s] for s in range(params.L)))
            sub = trig_gate_circuit("cos", arg, t * amp, schedule, shape.cutoff)
            if sub.shape.n_qubits != shape.n_qubits or sub.shape.n_modes != shape.n_modes:
                from .circuits import reindex

                sub = reindex(sub, shape, [0, 1], list(range(params.L)))
            steps += list(sub.steps)
    elif mode == MODE_REFERENCE:
        xi, q = position_basis(shape.cutoff)
        for n in range(params.L):
            grids = np.meshgrid(*([xi] * params.L), indexing="ij")
            phi_n = sum(fd.v[n, s] * grids[s] for s in range(params.L))
            diag = np.exp(1j * t * amp * np.cos(params.beta * phi_n)).reshape(-1)
            w = q
            for _ in range(params.L - 1):
                w = np.kron(w, q)
            mat = (w * diag) @ w.conj().T
            steps.append(
                GateSpec("REF", (), tuple(shape.mode(s) for s in range(params.L)), matrix=mat)
            )
    else:
        raise ValueError(f"unknown potential mode {mode!r}")
    return Circuit(shape, steps, {"t": t, "global_phase": -t * amp * params.L, "mode": mode})


def evolution_shape(params: SineGordonParams, cutoff: int, mode: str) -> RegisterShape:
    """Register for time evolution: bare modes, plus two reused ancilla qubits
    in compiled mode."""
    n_qubits = 2 if mode == MODE_COMPILED else 0
    return RegisterShape(n_qubits, params.L, cutoff)


def trotter_evolve(
    state: HybridState,
    params: SineGordonParams,
    t_total: float,
    schedule: TrotterSchedule,
    mode: str = MODE_REFERENCE,
    inner: TrotterSchedule = TrotterSchedule(),
) -> tuple[HybridState, dict]:
    """Trotterized exp(-i t (H_quad + H_pot)); per step the potential factor
    acts first, matching the product-formula reading.  Both modes apply the
    same SRS quadratic circuit (the mode switch concerns the potential only,
    so the compiled-vs-reference comparison isolates the cosine compilation);
    ``inner`` controls the sub-Trotterization of each compiled cosine gate.

    Returns the final state and metadata (steps, mode, accumulated constant
    phase of the potential; the compiled state itself omits that phase)."""
    dt = t_total / schedule.steps
    meta = {
        "steps": schedule.steps,
        "order": schedule.order,
        "mode": mode,
        "global_phase": -t_total * params.pot_amplitude * params.L if mode == MODE_COMPILED else 0.0,
    }
    if mode == MODE_REFERENCE:
        ops = LatticeOps(params, state.shape.cutoff)
        for _ in range(schedule.steps):
            if schedule.order == "first":
                state = ops.apply_exp_pot(state, -1j * dt)
                state = ops.apply_quad_gates(state, dt)
            else:
                state = ops.apply_quad_gates(state, dt / 2.0)
                state = ops.apply_exp_pot(state, -1j * dt)
                state = ops.apply_quad_gates(state, dt / 2.0)
        return state, meta
    shape = state.shape
    pot = u_pot_circuit(params, dt, inner, MODE_COMPILED, shape)
    if schedule.order == "first":
        quad = u_quad_circuit(params, dt, shape)
        step_circuit = pot.extended(quad)
    else:
        half = u_quad_circuit(params, dt / 2.0, shape)
        step_circuit = half.extended(pot).extended(half)
    for _ in range(schedule.steps):
        state = simulate(step_circuit, state)
    return state, meta


def resolve_trotter_steps(
    params: SineGordonParams,
    cutoff: int,
    t_max: float,
    order: str = "second_symmetric",
    tol: float = 1e-4,
    start: int = 16,
    max_steps: int = 65536,
) -> int:
    """Double the (reference-mode) step count until the survival probability
    at t_max moves by less than ``tol``; returns the refined count."""
    shape = evolution_shape(params, cutoff, MODE_REFERENCE)
    vac = vacuum(shape)

    def survival(steps: int) -> float:
        out, _ = trotter_evolve(vac, params, t_max, TrotterSchedule(order, steps))
        return abs(np.vdot(vac.amplitudes, out.amplitudes)) ** 2

    steps = start
    prev = survival(steps)
    while steps < max_steps:
        steps *= 2
        cur = survival(steps)
        if abs(cur - prev) < tol:
            return steps
        prev = cur
    raise RuntimeError(f"Trotter refinement did not converge below {tol}")


def survival_series(
    params: SineGordonParams,
    cutoff: int,
    t_grid,
    schedule: TrotterSchedule,
    mode: str = MODE_REFERENCE,
    inner: TrotterSchedule = TrotterSchedule("second_symmetric", 1),
) -> tuple[np.ndarray, np.ndarray, dict]:
    """P(t) = |<vac| U(t) |vac>|^2 on an ascending uniform grid starting at 0.

    ``schedule.steps`` is the total step budget, split evenly across grid
    intervals (rounded up)."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must ascend from 0")
    n_int = len(t_grid) - 1
    per = max(1, -(-schedule.steps // n_int)) if n_int else 0
    shape = evolution_shape(params, cutoff, mode)
    vac = vacuum(shape)
    state = vac
    probs = [1.0]
    for i in range(n_int):
        dt_seg = t_grid[i + 1] - t_grid[i]
        state, _ = trotter_evolve(
            state, params, dt_seg, TrotterSchedule(schedule.order, per), mode, inner
        )
        probs.append(float(abs(np.vdot(vac.amplitudes, state.amplitudes)) ** 2))
    meta = {"steps_per_interval": per, "total_steps": per * n_int, "mode": mode,
            "order": schedule.order}
    return t_grid, np.array(probs), meta
