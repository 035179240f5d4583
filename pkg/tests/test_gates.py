import numpy as np
import pytest

from sgsim.fock import matrix_exponential, quadrature_matrices
from sgsim.gates import (
    GateSpec,
    TruncationWarning,
    beamsplitter,
    conditional_displacement,
    cubic_phase,
    displacement,
    gate_matrix,
    mode_rotation,
    pauli,
    quadratic_phase,
    qubit_gate,
    squeeze,
    squeeze_leakage,
)


def test_displacement_identity_and_overlap():
    assert np.allclose(displacement(0.0, 8).mat, np.eye(8))
    d = displacement(1.0, 20).mat
    assert abs(d[0, 0]) ** 2 == pytest.approx(np.exp(-1.0), abs=1e-6)


def test_displacement_inverse_and_unitarity():
    xi = 0.5 + 0.3j
    d = displacement(xi, 16)
    assert np.max(np.abs((d @ displacement(-xi, 16)).mat - np.eye(16))) < 1e-10
    assert d.is_unitary(1e-10)


def test_squeeze_identity_and_inverse():
    assert np.allclose(squeeze(0.0, 8).mat, np.eye(8))
    s = squeeze(0.3, 24, check_leakage=False).mat
    si = squeeze(-0.3, 24, check_leakage=False).mat
    assert np.max(np.abs(s @ si - np.eye(24))) < 1e-9


def test_squeeze_scales_position_quadrature():
    # standard action S†(r) x S(r) = exp(-r) x, checked on the low-Fock block
    r, lam = 0.2, 24
    s = squeeze(r, lam, check_leakage=False).mat
    x, _ = quadrature_matrices(lam)
    conj = s.conj().T @ x.mat @ s
    blk = 8
    assert np.max(np.abs((conj - np.exp(-r) * x.mat)[:blk, :blk])) < 1e-6


def test_squeeze_leakage_flag():
    assert squeeze_leakage(0.05, 24) < 1e-6
    with pytest.warns(TruncationWarning):
        squeeze(2.0, 6)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        squeeze(0.05, 24)  # quiet in the safe regime


def test_beamsplitter_swap_and_number_conservation():
    lam = 4
    assert np.allclose(beamsplitter(0.0, lam).mat, np.eye(lam * lam))
    bs = beamsplitter(np.pi / 2, lam).mat
    ket10 = np.zeros(lam * lam)
    ket10[np.ravel_multi_index((1, 0), (lam, lam))] = 1.0
    out = bs @ ket10
    idx01 = np.ravel_multi_index((0, 1), (lam, lam))
    assert abs(out[idx01]) == pytest.approx(1.0, abs=1e-10)
    # commutes with total number
    n = np.diag(np.arange(lam))
    ntot = np.kron(n, np.eye(lam)) + np.kron(np.eye(lam), n)
    assert np.max(np.abs(bs @ ntot - ntot @ bs)) < 1e-10
    rng = np.random.default_rng(0)
    v = rng.standard_normal(lam * lam) + 1j * rng.standard_normal(lam * lam)
    v /= np.linalg.norm(v)
    before = np.vdot(v, ntot @ v)
    after = np.vdot(bs @ v, ntot @ (bs @ v))
    assert abs(before - after) < 1e-10


def test_cubic_phase():
    assert np.allclose(cubic_phase(0.0, 8).mat, np.eye(8))
    v = cubic_phase(0.1, 16)
    assert np.max(np.abs((v @ cubic_phase(-0.1, 16)).mat - np.eye(16))) < 1e-9
    x, _ = quadrature_matrices(16)
    ref = matrix_exponential(x.mat @ x.mat @ x.mat, 1j * 0.1 / 3.0).mat
    assert np.max(np.abs(v.mat - ref)) < 1e-14


def test_quadratic_phase_spreads_wavepacket():
    lam = 20
    assert np.allclose(quadratic_phase(0.0, lam).mat, np.eye(lam))
    x, p = quadrature_matrices(lam)
    assert np.max(np.abs(p.mat @ p.mat - (p.mat @ p.mat).conj().T)) < 1e-14
    qp = quadratic_phase(0.1, lam).mat
    x2 = x.mat @ x.mat
    v = np.zeros(lam, dtype=complex)
    v[0] = 1.0
    variances = []
    for _ in range(5):
        v = qp @ v
        variances.append(np.vdot(v, x2 @ v).real - np.vdot(v, x.mat @ v).real ** 2)
    assert all(b > a for a, b in zip(variances, variances[1:]))


def test_mode_rotation():
    lam = 6
    assert np.allclose(mode_rotation(0.0, lam).mat, np.eye(lam))
    theta = 0.37
    expected = np.exp(-1j * theta * (np.arange(lam) + 0.5))
    assert np.allclose(np.diag(mode_rotation(theta, lam).mat), expected)
    assert np.allclose(mode_rotation(2 * np.pi, lam).mat, -np.eye(lam))


def test_conditional_displacement_blocks():
    lam = 10
    assert np.allclose(conditional_displacement(0.0, lam).mat, np.eye(2 * lam))
    alpha = 0.4 + 0.2j
    cd = conditional_displacement(alpha, lam).mat
    assert np.max(np.abs(cd[:lam, :lam] - displacement(alpha, lam).mat)) < 1e-12
    assert np.max(np.abs(cd[lam:, lam:] - displacement(-alpha, lam).mat)) < 1e-12
    assert np.max(np.abs(cd[:lam, lam:])) == 0


def test_conditional_displacement_generator():
    # CD(ic/(2 sqrt 2)) = exp(i (c/2) x ⊗ Z) for c = 1
    c, lam = 1.0, 10
    cd = conditional_displacement(1j * c / (2 * np.sqrt(2.0)), lam).mat
    x, _ = quadrature_matrices(lam)
    gen = np.kron(pauli("Z"), 0.5 * c * x.mat)
    ref = matrix_exponential(gen, 1j).mat
    assert np.max(np.abs(cd - ref)) < 1e-12


def test_qubit_gates():
    assert np.allclose(qubit_gate("RX", 0.0).mat, np.eye(2))
    plus_i = qubit_gate("SGATE").mat @ qubit_gate("H").mat @ np.array([1.0, 0.0])
    assert np.max(np.abs(pauli("Y") @ plus_i - plus_i)) < 1e-14
    h = qubit_gate("H").mat
    cnot = qubit_gate("CNOT").mat
    hb = np.kron(np.eye(2), h)
    assert np.allclose(hb @ cnot @ hb, qubit_gate("CZ").mat)
    for kind in ("H", "X", "Y", "Z", "SGATE", "CNOT", "CZ"):
        assert qubit_gate(kind).is_unitary(1e-14)
    for kind in ("RX", "RY", "RZ"):
        assert qubit_gate(kind, 0.7).is_unitary(1e-14)


@pytest.mark.parametrize(
    "spec",
    [
        GateSpec("D", (0.3 + 0.1j,), (0,)),
        GateSpec("S", (0.1,), (0,)),
        GateSpec("V", (0.2,), (0,)),
        GateSpec("QP", (0.4,), (0,)),
        GateSpec("ROT", (0.9,), (0,)),
        GateSpec("CD", (0.2j,), (0, 1)),
        GateSpec("BS", (0.3,), (0, 1)),
    ],
)
def test_every_gate_unitary_and_matches_generator_path(spec):
    lam = 8
    mat = gate_matrix(spec, lam)
    d = mat.shape[0]
    assert np.max(np.abs(mat.conj().T @ mat - np.eye(d))) < 1e-10


def test_gate_spec_validation():
    with pytest.raises(ValueError):
        GateSpec("NOPE", (), (0,))
    with pytest.raises(ValueError):
        GateSpec("D", (), (0,))
    with pytest.raises(ValueError):
        GateSpec("CNOT", (), (0,))
    with pytest.raises(ValueError):
        GateSpec("H", (), (0,), matrix=np.eye(2))
