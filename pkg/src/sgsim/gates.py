"""Elementary hybrid gate set: Gaussian/non-Gaussian mode gates, the
qubit-conditioned displacement that couples the two sectors, and standard
qubit gates.

Every constructor builds its generator in the truncated Fock space and
exponentiates it there, so a gate equals ``matrix_exponential`` of its
documented generator under the shared truncation convention.

Conventions (hbar = 1, a = (x + ip)/sqrt(2)):

    D(xi)   = exp(xi a† - xi* a)
    S(z)    = exp((z* aa - z a†a†)/2)          S†(r) x S(r) = exp(-r) x
    BS(z)   = exp(z a†b - z* ab†)              two modes, number conserving
    V(g)    = exp(i g x³ / 3)
    QP(t)   = exp(-i (t/2) p²)
    ROT(th) = exp(-i th (n + 1/2))             includes the vacuum half-quantum
    CD(al)  = exp((al a† - al* a) ⊗ Z)         Z on the qubit; block D(±al)
    R_s(th) = exp(-i (th/2) sigma),  S = diag(1, i),  CNOT/CZ standard
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .fock import (
    OperatorMatrix,
    annihilation_matrix,
    as_matrix,
    matrix_exponential,
    quadrature_matrices,
)


class TruncationWarning(UserWarning):
    """Gate parameters push amplitude against the Fock cutoff."""


# kind -> (number of params, number of targets)
GATE_ARITY = {
    "D": (1, 1),
    "S": (1, 1),
    "BS": (1, 2),
    "V": (1, 1),
    "QP": (1, 1),
    "ROT": (1, 1),
    "CD": (1, 2),
    "RX": (1, 1),
    "RY": (1, 1),
    "RZ": (1, 1),
    "H": (0, 1),
    "X": (0, 1),
    "Y": (0, 1),
    "Z": (0, 1),
    "SGATE": (0, 1),
    "CNOT": (0, 2),
    "CZ": (0, 2),
    "REF": (0, None),
}


@dataclass(frozen=True, eq=False)
class GateSpec:
    """One gate application: kind, scalar parameters, flat target indices.

    Two-target conventions: CD = (qubit, mode), BS = (mode, mode),
    CNOT = (control, target).  ``matrix`` is only set for REF gates, which
    carry an explicit (reference-path) unitary instead of a compiled kind.
    """

    kind: str
    params: tuple = ()
    targets: tuple = ()
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_par, n_tgt = GATE_ARITY[self.kind]
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(self.params) != n_par:
            raise ValueError(f"{self.kind} takes {n_par} parameter(s)")
        if n_tgt is not None and len(self.targets) != n_tgt:
            raise ValueError(f"{self.kind} takes {n_tgt} target(s)")
        if (self.kind == "REF") != (self.matrix is not None):
            raise ValueError("REF gates (and only REF gates) carry a matrix")


def _exp_antihermitian(gen: np.ndarray) -> OperatorMatrix:
    # exp(G) for anti-Hermitian G via the Hermitian eigensolve of iG
    return matrix_exponential(1j * np.asarray(gen), scale=-1j)


def displacement(xi: complex, cutoff: int) -> OperatorMatrix:
    """Phase-space displacement D(xi) on the truncated space."""
    a = annihilation_matrix(cutoff).mat
    return _exp_antihermitian(xi * a.conj().T - np.conj(xi) * a)


def squeeze_leakage(z: complex, cutoff: int) -> float:
    """Norm distance of the truncated squeezed vacuum from its double-cutoff
    reference; proxy for how badly S(z) presses against the cutoff."""
    small = squeeze(z, cutoff, check_leakage=False).mat[:, 0]
    big = _squeeze_mat(z, 2 * cutoff)[:, 0]
    diff = small - big[:cutoff]
    return float(math.hypot(np.linalg.norm(diff), np.linalg.norm(big[cutoff:])))


def _squeeze_mat(z: complex, cutoff: int) -> np.ndarray:
    a = annihilation_matrix(cutoff).mat
    ad = a.conj().T
    return _exp_antihermitian(0.5 * (np.conj(z) * a @ a - z * ad @ ad)).mat


def squeeze(z: complex, cutoff: int, check_leakage: bool = True) -> OperatorMatrix:
    """Single-mode squeeze S(z); warns when truncation leakage exceeds 1e-6."""
    if check_leakage and squeeze_leakage(z, cutoff) > 1e-6:
        warnings.warn(
            f"squeeze(z={z!r}) leaks above the cutoff {cutoff}", TruncationWarning, stacklevel=2
        )
    return OperatorMatrix(_squeeze_mat(z, cutoff))


def beamsplitter(z: complex, cutoff: int) -> OperatorMatrix:
    """Two-mode beamsplitter exp(z a†b - z* ab†); first target is mode a."""
    a = annihilation_matrix(cutoff).mat
    ad = a.conj().T
    eye = np.eye(cutoff)
    gen = z * np.kron(ad, a) - np.conj(z) * np.kron(a, ad)
    return _exp_antihermitian(gen)


def cubic_phase(gamma: float, cutoff: int) -> OperatorMatrix:
    """Cubic phase gate exp(i gamma x³/3)."""
    x, _ = quadrature_matrices(cutoff)
    return matrix_exponential(x.mat @ x.mat @ x.mat, scale=1j * gamma / 3.0)


def quadratic_phase(t: float, cutoff: int) -> OperatorMatrix:
    """Free-particle factor exp(-i (t/2) p²)."""
    _, p = quadrature_matrices(cutoff)
    return matrix_exponential(p.mat @ p.mat, scale=-0.5j * t)


def mode_rotation(theta: float, cutoff: int) -> OperatorMatrix:
    """Fock-space rotation exp(-i theta (n + 1/2)), diagonal in the Fock basis."""
    n = np.arange(cutoff)
    return OperatorMatrix(np.diag(np.exp(-1j * theta * (n + 0.5))))


def conditional_displacement(alpha: complex, cutoff: int) -> OperatorMatrix:
    """Qubit-conditioned displacement exp((alpha a† - alpha* a) Z), qubit first."""
    a = annihilation_matrix(cutoff).mat
    gen = alpha * a.conj().T - np.conj(alpha) * a
    z = np.diag([1.0, -1.0]).astype(complex)
    return _exp_antihermitian(np.kron(z, gen))


_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "I": np.eye(2, dtype=complex),
}


def pauli(name: str) -> np.ndarray:
    """Single-qubit Pauli matrix (I, X, Y or Z)."""
    return _PAULI[name].copy()


def qubit_gate(kind: str, angle: float | None = None) -> OperatorMatrix:
    """Standard qubit gates; rotations are R_s(th) = exp(-i th/2 sigma)."""
    if kind in ("RX", "RY", "RZ"):
        if angle is None:
            raise ValueError(f"{kind} needs an angle")
        s = _PAULI[kind[1]]
        return OperatorMatrix(
            math.cos(angle / 2) * np.eye(2) - 1j * math.sin(angle / 2) * s
        )
    fixed = {
        "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0),
        "X": _PAULI["X"],
        "Y": _PAULI["Y"],
        "Z": _PAULI["Z"],
        "SGATE": np.diag([1.0, 1j]),
        "CNOT": np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        ),
        "CZ": np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex),
    }
    if kind not in fixed:
        raise ValueError(f"unknown qubit gate {kind!r}")
    return OperatorMatrix(fixed[kind])


def gate_matrix(spec: GateSpec, cutoff: int) -> np.ndarray:
    """Dense local matrix for a GateSpec, axes ordered like spec.targets.

    Skips the squeeze leakage warning: circuit-level truncation quality is
    checked against oracles by the callers, not per gate application."""
    k, p = spec.kind, spec.params
    if k == "D":
        return displacement(p[0], cutoff).mat
    if k == "S":
        return squeeze(p[0], cutoff, check_leakage=False).mat
    if k == "BS":
        return beamsplitter(p[0], cutoff).mat
    if k == "V":
        return cubic_phase(float(np.real(p[0])), cutoff).mat
    if k == "QP":
        return quadratic_phase(float(np.real(p[0])), cutoff).mat
    if k == "ROT":
        return mode_rotation(float(np.real(p[0])), cutoff).mat
    if k == "CD":
        return conditional_displacement(p[0], cutoff).mat
    if k in ("RX", "RY", "RZ"):
        return qubit_gate(k, float(np.real(p[0]))).mat
    if k == "REF":
        return as_matrix(spec.matrix)
    return qubit_gate(k).mat
