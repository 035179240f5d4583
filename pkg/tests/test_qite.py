import numpy as np
import pytest

from sgsim.fock import HybridState, RegisterShape, ShapeError, basis_state, vacuum
from sgsim.lattice import LatticeOps, SineGordonParams, ground_state, hamiltonian_matrix
from sgsim.qite import (
    POT_COMPILED,
    QiteConfig,
    energy_estimate,
    fidelity,
    qite_run,
)


def test_config_validation():
    with pytest.raises(ValueError):
        QiteConfig(dtau=0.0, steps=5)
    with pytest.raises(ValueError):
        QiteConfig(dtau=0.5, steps=0)
    with pytest.raises(ValueError):
        QiteConfig(dtau=0.5, steps=5, pot_mode="bogus")


def test_fidelity_basics():
    shape = RegisterShape(0, 2, 4)
    a = basis_state(shape, fock=(0, 0))
    b = basis_state(shape, fock=(1, 0))
    assert fidelity(a, a) == pytest.approx(1.0)
    assert fidelity(a, b) == 0.0
    with pytest.raises(ShapeError):
        fidelity(a, vacuum(RegisterShape(0, 3, 4)))


def test_energy_estimate_on_eigenstate():
    params = SineGordonParams(2, 1.0, 1.0)
    (e0, vec), = ground_state(params, 8, k=1)
    st = HybridState(RegisterShape(0, 2, 8), vec)
    assert energy_estimate(st, params, 8) == pytest.approx(e0, abs=1e-10)


def test_energy_estimate_quadratic_ground_formula():
    # weak coupling: the quadratic-part ground energy approaches
    # sum_{B>0} Omega_s/2 plus half the lowest truncated p^2 eigenvalue
    params = SineGordonParams(3, 1e-3, 1.0)
    lam = 12
    ops = LatticeOps(params, lam)
    vecs = []
    for gen in ops._quad_gens:
        evals, vv = np.linalg.eigh(gen)
        vecs.append(vv[:, 0])
    amp = vecs[0]
    for v in vecs[1:]:
        amp = np.kron(amp, v)
    st = HybridState(RegisterShape(0, 3, lam), amp)
    from sgsim.fock import quadrature_matrices

    fd = ops.fourier
    expected = sum(fd.omega_big[s] / 2.0 for s in range(3) if fd.b_coeff[s] > 0)
    _, p = quadrature_matrices(lam)
    expected += 0.5 * np.linalg.eigvalsh(p.mat @ p.mat)[0]
    e = energy_estimate(st, params, lam)
    # potential contributes at most 2 L m^2/beta^2 = 6e-6
    assert e == pytest.approx(expected, abs=1e-5)


def test_qite_reference_converges_to_ground():
    params = SineGordonParams(2, 1.0, 1.0)
    lam = 8
    trace, final = qite_run(params, lam, QiteConfig(0.5, 12))
    (e0, _), = ground_state(params, lam, k=1)
    assert trace.fidelity[-1] > 0.99
    assert trace.energy[-1] >= e0 - 1e-9  # variational from above at the plateau
    assert abs(trace.energy[-1] - e0) < 0.05 * abs(e0)
    assert np.all(trace.success_prob == 1.0)
    assert final.norm() == pytest.approx(1.0)


def test_qite_from_ground_state_stays_close():
    # the split-step fixed point sits near (not exactly on) the ED ground state
    params = SineGordonParams(2, 1.0, 1.0)
    lam = 8
    (e0, vec), = ground_state(params, lam, k=1)
    init = HybridState(RegisterShape(0, 2, lam), vec)
    trace, _ = qite_run(params, lam, QiteConfig(0.5, 8), initial=init)
    assert np.all(trace.fidelity > 0.99)
    assert np.max(np.abs(trace.energy - e0)) < 0.03


def test_qite_energy_monotone_at_moderate_coupling():
    # non-increasing energy within the split-step tolerance (beta >= 2 configs)
    for beta in (2.0, 5.0):
        params = SineGordonParams(2, 1.0, beta)
        trace, _ = qite_run(params, 8, QiteConfig(0.5, 10))
        assert np.all(np.diff(trace.energy) <= 1e-9)


def test_qite_convergence_rate_matches_gap():
    # seeded first-excited contamination decays as exp(-2 tau (E1 - E0))
    params = SineGordonParams(2, 1.0, 1.0)
    lam = 10
    h = hamiltonian_matrix(params, lam).mat
    evals, vecs = np.linalg.eigh(h)
    gap = evals[1] - evals[0]
    init = vecs[:, 0] + 0.3 * vecs[:, 1]
    init /= np.linalg.norm(init)
    st = HybridState(RegisterShape(0, 2, lam), init)
    trace, _ = qite_run(params, lam, QiteConfig(0.05, 30), initial=st)
    resid = np.abs(trace.energy - evals[0])
    sel = slice(2, 20)
    slope = np.polyfit(trace.tau[sel], np.log(resid[sel]), 1)[0]
    assert slope == pytest.approx(-2.0 * gap, rel=0.2)


def test_qite_compiled_agrees_with_reference():
    params = SineGordonParams(2, 1.0, 1.0)
    lam = 8
    dtau, steps = 0.1, 5
    _, fin_ref = qite_run(params, lam, QiteConfig(dtau, steps))
    trace_c, fin_c = qite_run(params, lam, QiteConfig(dtau, steps, pot_mode=POT_COMPILED))
    dim = lam**2
    psi = fin_c.amplitudes.reshape(-1, dim)[0]
    psi /= np.linalg.norm(psi)
    f = abs(np.vdot(fin_ref.amplitudes, psi)) ** 2
    assert f > 1 - 0.5 * dtau**2 * steps
    assert np.all(trace_c.success_prob < 1.0)
    assert np.all(trace_c.success_prob > 0.0)
    # norm_factor accumulated the per-step success amplitudes
    assert fin_c.norm_factor == pytest.approx(
        np.sqrt(np.prod(trace_c.success_prob)), rel=1e-10
    )


def test_qite_initial_shape_checked():
    params = SineGordonParams(2, 1.0, 1.0)
    with pytest.raises(ShapeError):
        qite_run(params, 6, QiteConfig(0.5, 2), initial=vacuum(RegisterShape(1, 2, 6)))


def test_qite_vanishing_overlap_warns():
    params = SineGordonParams(2, 1.0, 1.0)
    lam = 6
    (_, vec), = ground_state(params, lam, k=1)
    # orthogonalize a basis state against the ground vector
    amp = np.zeros_like(vec)
    amp[3] = 1.0
    amp -= vec * np.vdot(vec, amp)
    amp /= np.linalg.norm(amp)
    with pytest.warns(UserWarning):
        qite_run(params, lam, QiteConfig(0.1, 1),
                 initial=HybridState(RegisterShape(0, 2, lam), amp))
