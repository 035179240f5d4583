import numpy as np
import pytest

from sgsim.circuits import Circuit, circuit_unitary, simulate
from sgsim.fock import (
    HybridState,
    RegisterShape,
    embed,
    hermitian_function,
    matrix_exponential,
    quadrature_matrices,
)
from sgsim.gates import pauli
from sgsim.trig import (
    ExplicitArg,
    LinearInX,
    TrotterSchedule,
    _csigma_steps,
    arg_matrix,
    cosine_x_circuit,
    nonunitary_pauli_circuit,
    nonunitary_prefactor,
    nonunitary_trig_circuit,
    pauli_exponential_circuit,
    sigma_matrix,
    trig_gate_circuit,
)


def pauli_string_matrix(s):
    m = pauli(s[0])
    for ch in s[1:]:
        m = np.kron(m, pauli(ch))
    return m


def trig_of_x(fn, coeff, cutoff):
    x, _ = quadrature_matrices(cutoff)
    return hermitian_function(coeff * x.mat, fn).mat


def mode_state(circ, mode_vec):
    """Register state with ancillas in |0...0> and the mode(s) in mode_vec."""
    amp = np.zeros(circ.shape.dim, dtype=complex)
    amp.reshape((2,) * circ.shape.n_qubits + (-1,))[(0,) * circ.shape.n_qubits] = mode_vec
    return HybridState(circ.shape, amp)


def prepared_sector(state, n_qubits):
    return state.amplitudes.reshape((2,) * n_qubits + (-1,))[(0,) * n_qubits]


# ---------------------------------------------------------------- Pauli block


@pytest.mark.parametrize("string,t", [("Z", np.pi), ("XZ", 0.7), ("YY", 1.3), ("IX", 0.4)])
def test_pauli_exponential_is_exact(string, t):
    circ = pauli_exponential_circuit(string, t)
    u = circuit_unitary(circ).mat
    gen = np.kron(pauli_string_matrix(string), pauli("Z"))  # ancilla is last
    oracle = matrix_exponential(gen, -0.5j * t).mat
    assert np.max(np.abs(u - oracle)) < 1e-12


def test_pauli_exponential_action_and_ancilla_return():
    circ = pauli_exponential_circuit("Z", np.pi)
    rng = np.random.default_rng(1)
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    v /= np.linalg.norm(v)
    out = simulate(circ, mode_state_qubits(circ, v))
    block = out.amplitudes.reshape(2, 2)
    expected = matrix_exponential(pauli("Z"), -0.5j * np.pi).mat @ v
    assert np.max(np.abs(block[:, 0] - expected)) < 1e-12
    assert np.max(np.abs(block[:, 1])) < 1e-12  # ancilla back in |0>


def mode_state_qubits(circ, sys_vec):
    amp = np.zeros(circ.shape.dim, dtype=complex)
    amp.reshape(-1, 2)[:, 0] = sys_vec
    return HybridState(circ.shape, amp)


def test_pauli_exponential_t_zero_and_identity_string():
    circ = pauli_exponential_circuit("XZ", 0.0)
    assert np.max(np.abs(circuit_unitary(circ).mat - np.eye(8))) < 1e-12
    # all-identity string degenerates to the global phase exp(-i t/2)
    circ = pauli_exponential_circuit("II", 0.8)
    u = circuit_unitary(circ).mat
    proj = u.reshape(2, 2, 2, 2, 2, 2)[:, :, 0, :, :, 0].reshape(4, 4)
    assert np.max(np.abs(proj - np.exp(-0.4j) * np.eye(4))) < 1e-12
    with pytest.raises(ValueError):
        pauli_exponential_circuit("XQ", 0.1)


# ---------------------------------------------------------------- Sigma block


def test_sigma_zero_argument():
    lam = 6
    sig = sigma_matrix(ExplicitArg(np.zeros((lam, lam))), bar=False, cutoff=lam).mat
    assert np.max(np.abs(sig - np.kron(pauli("Z"), np.eye(lam)))) < 1e-14


@pytest.mark.parametrize("seed", range(5))
def test_sigma_hermitian_unitary_random(seed):
    rng = np.random.default_rng(seed)
    coeffs = tuple(rng.uniform(-2, 2, size=2))
    if all(abs(c) < 1e-12 for c in coeffs):
        coeffs = (1.0, 0.0)
    for bar in (False, True):
        sig = sigma_matrix(LinearInX(coeffs), bar, cutoff=8)
        assert sig.is_hermitian(1e-10)
        assert sig.is_unitary(1e-10)
        assert np.max(np.abs((sig @ sig).mat - np.eye(sig.dim))) < 1e-10


def test_sigma_trig_identities():
    lam = 8
    arg = LinearInX((1.0,))
    s = sigma_matrix(arg, False, lam).mat
    sb = sigma_matrix(arg, True, lam).mat
    cosx = trig_of_x(np.cos, 1.0, lam)
    sinx = trig_of_x(np.sin, 1.0, lam)
    assert np.max(np.abs(s + sb - 2 * np.kron(pauli("Z"), cosx))) < 1e-10
    assert np.max(np.abs(s - sb - 2 * np.kron(pauli("Y"), sinx))) < 1e-10


def test_sigma_involution():
    sig = sigma_matrix(LinearInX((0.7,)), False, 10).mat
    assert np.max(np.abs(sig - sig.conj().T)) < 1e-10
    assert np.max(np.abs(sig - np.linalg.inv(sig))) < 1e-10


def test_explicit_arg_requires_hermitian():
    with pytest.raises(ValueError):
        ExplicitArg(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(ValueError):
        LinearInX(())
    with pytest.raises(ValueError):
        LinearInX((0.0, 0.0))


# ------------------------------------------------------- controlled-Sigma


def _csigma_oracle(coeffs, bar, lam):
    shape = RegisterShape(2, len(coeffs), lam)
    a_full = embed(arg_matrix(LinearInX(coeffs), lam),
                   [shape.mode(s) for s in range(len(coeffs))], shape).mat
    x_a = embed(pauli("X"), [0], shape).mat
    pi_b = embed((np.eye(2) - pauli("Z")) / 2, [1], shape).mat
    sign = -1.0 if bar else 1.0
    cz = embed(np.diag([1, 1, 1, -1.0]), [0, 1], shape).mat
    return matrix_exponential(a_full @ x_a @ pi_b, sign * 1j).mat @ cz, shape


@pytest.mark.parametrize("bar", [False, True])
def test_controlled_sigma_matches_oracle(bar):
    lam = 10
    oracle, shape = _csigma_oracle((1.0,), bar, lam)
    u = circuit_unitary(Circuit(shape, _csigma_steps(LinearInX((1.0,)), bar, shape, lam))).mat
    assert np.max(np.abs(u - oracle)) < 1e-10


def test_controlled_sigma_two_modes_sequential_displacements():
    # multi-mode argument c0 x0 + c1 x1 built from per-mode CDs in sequence
    lam = 6
    coeffs = (0.8, -0.5)
    oracle, shape = _csigma_oracle(coeffs, False, lam)
    u = circuit_unitary(Circuit(shape, _csigma_steps(LinearInX(coeffs), False, shape, lam))).mat
    assert np.max(np.abs(u - oracle)) < 1e-10


def test_controlled_sigma_zero_argument_is_cz():
    lam = 5
    shape = RegisterShape(2, 1, lam)
    steps = _csigma_steps(ExplicitArg(np.zeros((lam, lam))), False, shape, lam)
    u = circuit_unitary(Circuit(shape, steps)).mat
    cz = embed(np.diag([1, 1, 1, -1.0]), [0, 1], shape).mat
    assert np.max(np.abs(u - cz)) < 1e-12


def test_controlled_sigma_explicit_fallback_matches_compiled():
    lam = 8
    shape = RegisterShape(2, 1, lam)
    x, _ = quadrature_matrices(lam)
    compiled = circuit_unitary(
        Circuit(shape, _csigma_steps(LinearInX((1.3,)), False, shape, lam))
    ).mat
    explicit = circuit_unitary(
        Circuit(shape, _csigma_steps(ExplicitArg(1.3 * x.mat), False, shape, lam))
    ).mat
    assert np.max(np.abs(compiled - explicit)) < 1e-10


# ---------------------------------------------------------------- trig gates


def test_trig_gate_t_zero_is_identity_action():
    lam = 8
    circ = trig_gate_circuit("cos", LinearInX((1.0,)), 0.0, TrotterSchedule(), lam)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(lam) + 1j * rng.standard_normal(lam)
    v /= np.linalg.norm(v)
    out = simulate(circ, mode_state(circ, v))
    assert np.max(np.abs(prepared_sector(out, 2) - v)) < 1e-12


def test_sin_gate_zero_argument_identity():
    lam = 6
    circ = trig_gate_circuit("sin", ExplicitArg(np.zeros((lam, lam))), 0.3,
                             TrotterSchedule(), lam)
    rng = np.random.default_rng(4)
    v = rng.standard_normal(lam) + 1j * rng.standard_normal(lam)
    v /= np.linalg.norm(v)
    out = simulate(circ, mode_state(circ, v))
    # ancilla a ends in the Y eigenstate S H |0>; project it out
    block = out.amplitudes.reshape(2, 2, lam)
    got = (block[0, 0] + (-1j) * block[1, 0]) / np.sqrt(2.0)
    assert np.max(np.abs(got - v)) < 1e-12


def _trig_state_error(kind, t, lam, order="first", steps=1, coeff=1.0):
    arg = LinearInX((coeff,))
    circ = trig_gate_circuit(kind, arg, t, TrotterSchedule(order, steps), lam)
    rng = np.random.default_rng(8)
    v = rng.standard_normal(lam) + 1j * rng.standard_normal(lam)
    v /= np.linalg.norm(v)
    out = simulate(circ, mode_state(circ, v))
    fn = np.cos if kind == "cos" else np.sin
    target = matrix_exponential(trig_of_x(fn, coeff, lam), 1j * t).mat @ v
    if kind == "cos":
        ideal = mode_state(circ, target).amplitudes
    else:
        ideal = np.zeros_like(out.amplitudes)
        y_plus = np.array([1.0, 1j]) / np.sqrt(2.0)
        ideal.reshape(2, 2, lam)[:, 0, :] = np.outer(y_plus, target)
    return float(np.linalg.norm(out.amplitudes - ideal))


def test_trig_gate_first_order_error_scaling():
    errs = {t: _trig_state_error("cos", t, 12) for t in (0.4, 0.2, 0.1, 0.05)}
    for big, small in ((0.4, 0.2), (0.2, 0.1), (0.1, 0.05)):
        ratio = errs[big] / errs[small]
        assert 3.5 < ratio < 4.5
    # error itself bounded by C t^2 with modest constant
    assert errs[0.2] < 0.5 * 0.2**2


def test_trig_gate_second_order_error_scaling():
    errs = {t: _trig_state_error("cos", t, 12, order="second_symmetric") for t in (0.4, 0.2, 0.1)}
    for big, small in ((0.4, 0.2), (0.2, 0.1)):
        ratio = errs[big] / errs[small]
        assert 6.5 < ratio < 9.5


def test_sin_gate_action():
    err = _trig_state_error("sin", 0.2, 12)
    assert err < 0.5 * 0.2**2


def test_ancilla_decoupling_fidelity():
    lam, t = 10, 0.2
    circ = trig_gate_circuit("cos", LinearInX((1.0,)), t, TrotterSchedule(), lam)
    rng = np.random.default_rng(9)
    v = rng.standard_normal(lam) + 1j * rng.standard_normal(lam)
    v /= np.linalg.norm(v)
    out = simulate(circ, mode_state(circ, v))
    block = out.amplitudes.reshape(4, lam)
    anc_weight = float(np.linalg.norm(block[0]) ** 2)
    assert anc_weight > 1 - 5 * t**2


# --------------------------------------------------- simplified cos layout


def test_cosine_circuit_matches_generic_builder():
    lam, c, t = 10, 1.0, 0.2
    for steps in (1, 2):
        fig = circuit_unitary(cosine_x_circuit(c, t, TrotterSchedule("first", steps), lam)).mat
        gen = circuit_unitary(
            trig_gate_circuit("cos", LinearInX((c,)), -t, TrotterSchedule("first", steps), lam)
        ).mat
        assert np.max(np.abs(fig - gen)) < 1e-12


def test_cosine_circuit_gate_counts_per_step():
    circ = cosine_x_circuit(1.0, 0.2, TrotterSchedule("first", 1), 6)
    kinds = [g.kind for g in circ.gates]
    assert kinds.count("CD") == 3
    assert kinds.count("CNOT") == 4
    assert kinds.count("RX") == 2
    assert kinds.count("H") == 2
    assert kinds.count("RY") == 2
    three_steps = cosine_x_circuit(1.0, 0.2, TrotterSchedule("first", 3), 6)
    assert len(three_steps.gates) == 3 * len(circ.gates)


def test_cosine_circuit_fidelity_on_coherent_state():
    lam, c, t = 14, 1.0, 0.1
    from sgsim.gates import displacement

    v = displacement(0.5, lam).mat[:, 0]
    circ = cosine_x_circuit(c, t, TrotterSchedule(), lam)
    out = simulate(circ, mode_state(circ, v))
    target = matrix_exponential(trig_of_x(np.cos, c, lam), -1j * t).mat @ v
    ideal = mode_state(circ, target).amplitudes
    infidelity = 1 - abs(np.vdot(ideal, out.amplitudes)) ** 2
    assert infidelity < 1e-3


def test_cosine_circuit_zero_coefficient_global_phase():
    lam, t = 6, 0.7
    for order in ("first", "second_symmetric"):
        circ = cosine_x_circuit(0.0, t, TrotterSchedule(order, 1), lam)
        rng = np.random.default_rng(3)
        v = rng.standard_normal(lam) + 1j * rng.standard_normal(lam)
        v /= np.linalg.norm(v)
        st = mode_state(circ, v)
        out = simulate(circ, st)
        assert np.linalg.norm(out.amplitudes - np.exp(-1j * t) * st.amplitudes) < 1e-12


# ------------------------------------------------------------- non-unitary


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_nonunitary_pauli_z(t):
    circ = nonunitary_pauli_circuit("Z", t)
    rng = np.random.default_rng(7)
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    v /= np.linalg.norm(v)
    amp = np.zeros(circ.shape.dim, dtype=complex)
    amp.reshape(2, 2, 2)[:, 0, 0] = v
    out = simulate(circ, HybridState(circ.shape, amp))
    target = np.exp(-0.5 * t * np.array([1.0, -1.0])) * v
    norm_target = np.linalg.norm(target)
    got = out.amplitudes.reshape(2, 2, 2)[:, 0, 0]
    assert np.max(np.abs(got - target / norm_target)) < 1e-12
    # success amplitude equals the prefactor times the unnormalized norm
    assert out.norm_factor == pytest.approx(nonunitary_prefactor(t) * norm_target, abs=1e-12)


def test_nonunitary_t_zero():
    circ = nonunitary_pauli_circuit("Z", 0.0)
    rng = np.random.default_rng(2)
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    v /= np.linalg.norm(v)
    amp = np.zeros(circ.shape.dim, dtype=complex)
    amp.reshape(2, 2, 2)[:, 0, 0] = v
    out = simulate(circ, HybridState(circ.shape, amp))
    got = out.amplitudes.reshape(2, 2, 2)[:, 0, 0]
    assert np.max(np.abs(got - v)) < 1e-12
    assert out.norm_factor == pytest.approx(1 / np.sqrt(2.0))


def test_nonunitary_trig_cosine():
    lam, t = 10, 0.2
    circ = nonunitary_trig_circuit("cos", LinearInX((1.0,)), t, cutoff=lam)
    rng = np.random.default_rng(12)
    v = rng.standard_normal(lam) + 1j * rng.standard_normal(lam)
    v /= np.linalg.norm(v)
    amp = np.zeros(circ.shape.dim, dtype=complex)
    amp.reshape(2, 2, 2, lam)[0, 0, 0, :] = v
    out = simulate(circ, HybridState(circ.shape, amp))
    decay = hermitian_function(trig_of_x(np.cos, 1.0, lam), lambda e: np.exp(-0.5 * t * e)).mat
    target = decay @ v
    target /= np.linalg.norm(target)
    got = out.amplitudes.reshape(2, 2, 2, lam)[0, 0, 0, :]
    got /= np.linalg.norm(out.amplitudes)
    assert np.linalg.norm(got - target) < 0.05 * t  # O(t^2) trig error
