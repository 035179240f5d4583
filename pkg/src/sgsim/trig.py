"""Ancilla-based exponentiation of Hermitian hybrid operators.

Builds circuits for exp(i t cos(A)) and exp(i t sin(A)) where A is a Hermitian
mode operator, by embedding U = exp(iA) into a Hermitian-and-unitary operator

    Sigma    = exp(i A ⊗ X) (1 ⊗ Z)         Sigma + SigmaBar = 2 cos(A) ⊗ Z
    SigmaBar = (1 ⊗ Z) exp(i A ⊗ X)         Sigma - SigmaBar = 2 sin(A) ⊗ Y

and exponentiating it with the standard two-ancilla Pauli-string circuit.

Register convention for all builders here: qubit 0 is the embedding ancilla
``a`` (CD-coupled, prepared |0> for cos and S.H|0> for sin), qubit 1 is the
exponentiation ancilla ``b`` (carries the interleaved R_x rotations, prepared
|0>), modes follow.  The non-unitary wrapper appends one more qubit ``c``.

Sign conventions (one table, used everywhere):

    pauli_exponential_circuit(P, t)          = exp(-i t/2 P ⊗ Z_anc)   exact
    block for C-Sigma at angle th            = exp(-i th/2 Sigma ⊗ Z_b) exact
    trig_gate_circuit(Cos/Sin, A, t)  acts as exp(+i t cos A) / exp(+i t sin A)
    cosine_x_circuit(c, t)            acts as exp(-i t cos(c x))
    cosine_x_circuit(c, t, s) == trig_gate_circuit(Cos, [c], -t, s)  as matrices
    nonunitary wrapper at parameter t  yields exp(-(t/2) G) after <0|_c
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, PostSelect, reindex
from .fock import (
    OperatorMatrix,
    RegisterShape,
    as_matrix,
    matrix_exponential,
    quadrature_matrices,
)
from .gates import GateSpec, pauli

ORDER_FIRST = "first"
ORDER_SECOND = "second_symmetric"


@dataclass(frozen=True)
class TrotterSchedule:
    order: str = ORDER_FIRST
    steps: int = 1

    def __post_init__(self):
        if self.order not in (ORDER_FIRST, ORDER_SECOND):
            raise ValueError(f"unknown Trotter order {self.order!r}")
        if self.steps < 1:
            raise ValueError("Trotter schedule needs at least one step")


@dataclass(frozen=True)
class LinearInX:
    """A = sum_s coeffs[s] x_s over len(coeffs) modes; the compiled variant."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if not c or all(v == 0.0 for v in c):
            raise ValueError("LinearInX needs at least one nonzero coefficient")
        object.__setattr__(self, "coeffs", c)

    @property
    def n_modes(self) -> int:
        return len(self.coeffs)


@dataclass(frozen=True, eq=False)
class ExplicitArg:
    """A given directly as a Hermitian matrix on ``n_modes`` modes."""

    matrix: np.ndarray
    n_modes: int = 1

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValueError("explicit argument must be Hermitian to 1e-10")
        object.__setattr__(self, "matrix", m)


HermitianArg = LinearInX | ExplicitArg


def arg_matrix(arg: HermitianArg, cutoff: int) -> np.ndarray:
    """Dense matrix of A on the bare mode register."""
    if isinstance(arg, ExplicitArg):
        return arg.matrix
    x, _ = quadrature_matrices(cutoff)
    mats = []
    for s, c in enumerate(arg.coeffs):
        before, after = s, arg.n_modes - s - 1
        mats.append(
            c
            * np.kron(
                np.kron(np.eye(cutoff**before), x.mat), np.eye(cutoff**after)
            )
        )
    return sum(mats)


def pauli_exponential_circuit(pauli_string: str, t: float) -> Circuit:
    """exp(-i t/2 P) on qubits 0..n-1 via one ancilla (qubit n); exact.

    The ancilla starts and ends in |0>.  An all-identity string degenerates to
    a global phase exp(-i t/2) carried by the same circuit.
    """
    pauli_string = pauli_string.upper()
    if not pauli_string or any(ch not in "IXYZ" for ch in pauli_string):
        raise ValueError(f"bad Pauli string {pauli_string!r}")
    n = len(pauli_string)
    shape = RegisterShape(n + 1, 0)
    anc = n
    controlled = []
    for q, ch in enumerate(pauli_string):
        if ch == "I":
            continue
        if ch == "X":
            controlled.append(GateSpec("CNOT", (), (anc, q)))
        elif ch == "Z":
            controlled.append(GateSpec("CZ", (), (anc, q)))
        else:  # CY = S CNOT S†, with S† emitted as SGATE then Z
            controlled += [
                GateSpec("SGATE", (), (q,)),
                GateSpec("Z", (), (q,)),
                GateSpec("CNOT", (), (anc, q)),
                GateSpec("SGATE", (), (q,)),
            ]
    steps = (
        [GateSpec("H", (), (anc,))]
        + controlled
        + [GateSpec("RX", (t,), (anc,))]
        + controlled
        + [GateSpec("H", (), (anc,))]
    )
    return Circuit(shape, steps, {"pauli": pauli_string, "t": t, "ancilla": anc})


def sigma_matrix(arg: HermitianArg, bar: bool, cutoff: int) -> OperatorMatrix:
    """Sigma (or SigmaBar) on (qubit a ⊗ modes); Hermitian and unitary."""
    a_mat = arg_matrix(arg, cutoff)
    gen = np.kron(pauli("X"), a_mat)
    e = matrix_exponential(gen, scale=1j).mat
    z_full = np.kron(pauli("Z"), np.eye(a_mat.shape[0]))
    return OperatorMatrix(z_full @ e if bar else e @ z_full)


def _trig_shape(arg: HermitianArg, cutoff: int) -> RegisterShape:
    n_modes = arg.n_modes if isinstance(arg, LinearInX) else arg.n_modes
    return RegisterShape(2, n_modes, cutoff)


def _csigma_steps(arg: HermitianArg, bar: bool, shape: RegisterShape, cutoff: int):
    """Gate list for controlled-Sigma, control qubit b = 1, over ``shape``.

    Compiled form (LinearInX):  CSigma = R_ya [prod_s CD_s(+)]
    [N_{b->a} prod_s CD_s(-) N_{b->a}] R_ya† . H_b CNOT_{a->b} H_b, with
    CD_s(±) = CD(± i c_s / (2 sqrt 2)) on (a, mode s); sign pattern flips for
    the bar variant.  Explicit arguments fall back to one REF gate.
    """
    a, b = 0, 1
    if isinstance(arg, ExplicitArg):
        sig = sigma_matrix(arg, bar, cutoff).mat
        ctrl = np.block(
            [[np.eye(sig.shape[0]), np.zeros_like(sig)], [np.zeros_like(sig), sig]]
        )
        targets = (b, a) + tuple(shape.mode(s) for s in range(shape.n_modes))
        return [GateSpec("REF", (), targets, matrix=ctrl)]
    sign = -1.0 if bar else 1.0
    half = [
        GateSpec("CD", (sign * 1j * c / (2.0 * math.sqrt(2.0)),), (a, shape.mode(s)))
        for s, c in enumerate(arg.coeffs)
        if c != 0.0
    ]
    other = [
        GateSpec("CD", (-sign * 1j * c / (2.0 * math.sqrt(2.0)),), (a, shape.mode(s)))
        for s, c in enumerate(arg.coeffs)
        if c != 0.0
    ]
    return (
        [GateSpec("H", (), (b,)), GateSpec("CNOT", (), (a, b)), GateSpec("H", (), (b,))]
        + [GateSpec("RY", (-math.pi / 2,), (a,))]
        + [GateSpec("CNOT", (), (b, a))]
        + other
        + [GateSpec("CNOT", (), (b, a))]
        + half
        + [GateSpec("RY", (math.pi / 2,), (a,))]
    )


def _sigma_block(arg, bar, theta, shape, cutoff):
    """Ancilla-b exponentiation block around controlled-Sigma:
    exp(-i th/2 Sigma ⊗ Z_b), exact."""
    b = 1
    cs = _csigma_steps(arg, bar, shape, cutoff)
    return (
        [GateSpec("H", (), (b,))]
        + cs
        + [GateSpec("RX", (theta,), (b,))]
        + cs
        + [GateSpec("H", (), (b,))]
    )


def trig_gate_circuit(
    kind: str, arg: HermitianArg, t: float, schedule: TrotterSchedule = TrotterSchedule(), cutoff: int = 8
) -> Circuit:
    """Circuit acting as exp(+i t cos A) (kind="cos") or exp(+i t sin A)
    (kind="sin") on the mode sector, ancillas decoupling up to the Trotter
    error of the schedule.

    Ancilla a (qubit 0) must start in |0>; for the sin gate the circuit
    prepends its preparation S.H into the +1 eigenstate of Y.  Ancilla b
    (qubit 1) starts in |0> and returns there exactly.
    """
    if kind not in ("cos", "sin"):
        raise ValueError("kind must be 'cos' or 'sin'")
    shape = _trig_shape(arg, cutoff)
    tau = t / schedule.steps
    steps: list = []
    if kind == "sin":
        steps += [GateSpec("H", (), (0,)), GateSpec("SGATE", (), (0,))]
    # block(P, th) = exp(-i th/2 P ⊗ Z_b); per step we need
    #   cos:  exp(+i tau/2 SigmaBar) exp(+i tau/2 Sigma)   (Sigma factor first)
    #   sin:  exp(-i tau/2 SigmaBar) exp(+i tau/2 Sigma)
    # Emitting the Sigma block first makes the first-order cos sequence equal
    # to the simplified cosine_x_circuit layout as a full matrix.
    bar_sign = 1.0 if kind == "cos" else -1.0
    for _ in range(schedule.steps):
        if schedule.order == ORDER_FIRST:
            steps += _sigma_block(arg, False, -tau, shape, cutoff)
            steps += _sigma_block(arg, True, -bar_sign * tau, shape, cutoff)
        else:
            steps += _sigma_block(arg, False, -tau / 2, shape, cutoff)
            steps += _sigma_block(arg, True, -bar_sign * tau, shape, cutoff)
            steps += _sigma_block(arg, False, -tau / 2, shape, cutoff)
    return Circuit(shape, steps, {"kind": kind, "t": t, "schedule": schedule})


def cosine_x_circuit(
    c: float, t: float, schedule: TrotterSchedule = TrotterSchedule(), cutoff: int = 8
) -> Circuit:
    """exp(-i t cos(c x)) on one mode from the simplified first-order layout:
    per step, three CD blocks and two CNOT-conjugated R_x(t) rotations between
    the R_y / H basis changes.  Equal as a full matrix to
    ``trig_gate_circuit("cos", LinearInX([c]), -t, schedule)``; second-order
    schedules delegate to that generic builder.
    """
    if schedule.order != ORDER_FIRST:
        arg = LinearInX((c,)) if c != 0.0 else ExplicitArg(np.zeros((cutoff, cutoff)))
        circ = trig_gate_circuit("cos", arg, -t, schedule, cutoff)
        meta = {**circ.metadata, "layout": "generic", "t": t}
        return Circuit(circ.shape, circ.steps, meta)
    shape = RegisterShape(2, 1, cutoff)
    a, b, mode = 0, 1, shape.mode(0)
    tau = t / schedule.steps
    cd_end = GateSpec("CD", (1j * c / (2.0 * math.sqrt(2.0)),), (a, mode))
    cd_mid = GateSpec("CD", (-1j * c / math.sqrt(2.0),), (a, mode))
    flip = [GateSpec("CNOT", (), (b, a))]
    rot = [GateSpec("RX", (tau,), (b,))]
    steps: list = []
    for _ in range(schedule.steps):
        steps += [GateSpec("RY", (math.pi / 2,), (a,)), GateSpec("H", (), (b,))]
        steps += [cd_end] + flip + rot + flip + [cd_mid] + flip + rot + flip + [cd_end]
        steps += [GateSpec("RY", (-math.pi / 2,), (a,)), GateSpec("H", (), (b,))]
    return Circuit(shape, steps, {"layout": "simplified", "c": c, "t": t, "schedule": schedule})


def nonunitary_angle(t: float) -> float:
    """Rotation angle substitution tan(th/2) -> tanh(t/2) for the wrapper."""
    return 2.0 * math.atan(math.tanh(t / 2.0))


def nonunitary_prefactor(t: float) -> float:
    """Scalar in front of exp(-(t/2) G) after post-selecting the wrap ancilla."""
    th = math.tanh(t / 2.0)
    return 1.0 / (math.cosh(t / 2.0) * math.sqrt(2.0 * (1.0 + th * th)))


def nonunitary_wrap(inner: Circuit, t: float, coupling_qubit: int) -> Circuit:
    """Wrap a circuit acting as exp(-i th/2 G ⊗ Z_coupling) (th already the
    substituted angle ``nonunitary_angle(t)``) into a post-selected circuit
    whose <0|_c branch applies exp(-(t/2) G), with the success amplitude
    recorded in ``norm_factor``.

    The wrap ancilla c is appended after the inner circuit's qubits.
    """
    old = inner.shape
    if not 0 <= coupling_qubit < old.n_qubits:
        raise ValueError("coupling qubit outside the inner circuit register")
    shape = RegisterShape(old.n_qubits + 1, old.n_modes, old.cutoff)
    inner_re = reindex(
        inner, shape, list(range(old.n_qubits)), list(range(old.n_modes))
    )
    c = old.n_qubits
    a = coupling_qubit
    steps = (
        [GateSpec("RX", (-math.pi / 2,), (c,)), GateSpec("CNOT", (), (c, a))]
        + list(inner_re.steps)
        + [
            GateSpec("CNOT", (), (c, a)),
            GateSpec("RX", (math.pi / 2,), (c,)),
            GateSpec("H", (), (c,)),
            PostSelect(c, 0),
        ]
    )
    meta = {
        **inner_re.metadata,
        "nonunitary_t": t,
        "prefactor": nonunitary_prefactor(t),
        "wrap_ancilla": c,
    }
    return Circuit(shape, steps, meta)


def nonunitary_pauli_circuit(pauli_string: str, t: float) -> Circuit:
    """Post-selected circuit for exp(-(t/2) P) / norm on a qubit register."""
    theta = nonunitary_angle(t)
    inner = pauli_exponential_circuit(pauli_string, theta)
    return nonunitary_wrap(inner, t, coupling_qubit=inner.metadata["ancilla"])


def nonunitary_trig_circuit(
    kind: str, arg: HermitianArg, t: float, schedule: TrotterSchedule = TrotterSchedule(), cutoff: int = 8
) -> Circuit:
    """Post-selected circuit for exp(-(t/2) cos A) or exp(-(t/2) sin A), up to
    the trig builder's O(t^2) Trotter error; ancillas a, b, c as documented."""
    theta = nonunitary_angle(t)
    inner = trig_gate_circuit(kind, arg, -theta / 2.0, schedule, cutoff)
    return nonunitary_wrap(inner, t, coupling_qubit=0)
