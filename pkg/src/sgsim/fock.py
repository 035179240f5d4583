"""Truncated-Fock-space linear algebra for hybrid qubit-qumode registers.

A register holds ``n_qubits`` qubits followed by ``n_modes`` bosonic modes,
each mode truncated to ``cutoff`` Fock levels (0 .. cutoff-1).  Subsystems are
addressed by a flat index: qubit ``i`` is subsystem ``i`` and mode ``s`` is
subsystem ``n_qubits + s``.  Amplitude vectors are laid out in C order over
``(2,)*n_qubits + (cutoff,)*n_modes``: qubit 0 varies slowest, the Fock index
of the last mode varies fastest.  Every function here treats its inputs as
immutable and returns fresh arrays.

Generators (x, p, products, cosines of them) are always built in the
truncated space first and exponentiated afterwards; oracles and circuit
constructions share this single truncation convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg


class ShapeError(ValueError):
    """Raised when operator/state/register shapes are incompatible."""


class DimensionGuardError(RuntimeError):
    """Raised when a requested dense object exceeds the desk-scale guard."""


def _check_cutoff(cutoff: int) -> int:
    if int(cutoff) != cutoff or cutoff < 2:
        raise ValueError(f"Fock cutoff must be an integer >= 2, got {cutoff!r}")
    return int(cutoff)


@dataclass(frozen=True)
class RegisterShape:
    """Shape of a hybrid register: qubits first, then equal-cutoff modes."""

    n_qubits: int
    n_modes: int
    cutoff: int = 2

    def __post_init__(self):
        if self.n_qubits < 0 or self.n_modes < 0 or self.n_qubits + self.n_modes < 1:
            raise ValueError("register needs at least one subsystem")
        if self.n_modes > 0:
            _check_cutoff(self.cutoff)

    @property
    def dims(self) -> tuple[int, ...]:
        return (2,) * self.n_qubits + (self.cutoff,) * self.n_modes

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    @property
    def n_subsystems(self) -> int:
        return self.n_qubits + self.n_modes

    def qubit(self, i: int) -> int:
        """Flat subsystem index of qubit ``i``."""
        if not 0 <= i < self.n_qubits:
            raise ShapeError(f"qubit index {i} out of range")
        return i

    def mode(self, s: int) -> int:
        """Flat subsystem index of mode ``s``."""
        if not 0 <= s < self.n_modes:
            raise ShapeError(f"mode index {s} out of range")
        return self.n_qubits + s


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense complex square matrix with tolerance-explicit structure queries."""

    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"operator must be square, got shape {m.shape}")
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.mat - self.mat.conj().T)) <= tol)

    def is_unitary(self, tol: float = 1e-10) -> bool:
        d = self.mat.conj().T @ self.mat - np.eye(self.dim)
        return bool(np.max(np.abs(d)) <= tol)

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.mat.conj().T)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.mat @ other.mat)


def as_matrix(op) -> np.ndarray:
    """Unwrap an OperatorMatrix (or pass a ndarray through) as complex array."""
    if isinstance(op, OperatorMatrix):
        return op.mat
    return np.asarray(op, dtype=complex)


@dataclass(frozen=True, eq=False)
class HybridState:
    """State vector over a hybrid register plus post-selection bookkeeping.

    ``norm_factor`` accumulates the success amplitudes of post-selections; it
    stays 1 under purely unitary evolution.
    """

    shape: RegisterShape
    amplitudes: np.ndarray
    norm_factor: float = 1.0

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size != self.shape.dim:
            raise ShapeError(
                f"amplitude vector has {amp.size} entries, register dim is {self.shape.dim}"
            )
        object.__setattr__(self, "amplitudes", amp)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "HybridState":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return replace(self, amplitudes=self.amplitudes / n)


def basis_state(shape: RegisterShape, qubits: tuple[int, ...] = (), fock: tuple[int, ...] = ()) -> HybridState:
    """Computational basis state |qubits...> ⊗ |fock...>; defaults to all zeros."""
    qubits = tuple(qubits) + (0,) * (shape.n_qubits - len(qubits))
    fock = tuple(fock) + (0,) * (shape.n_modes - len(fock))
    if len(qubits) != shape.n_qubits or len(fock) != shape.n_modes:
        raise ShapeError("too many basis labels for this register")
    idx = np.ravel_multi_index(qubits + fock, shape.dims)
    amp = np.zeros(shape.dim, dtype=complex)
    amp[idx] = 1.0
    return HybridState(shape, amp)


def vacuum(shape: RegisterShape) -> HybridState:
    """All qubits |0>, all modes in Fock level 0."""
    return basis_state(shape)


def random_state(shape: RegisterShape, seed: int) -> HybridState:
    """Normalized Haar-ish random state (tests only; seeded, deterministic)."""
    rng = np.random.default_rng(seed)
    amp = rng.standard_normal(shape.dim) + 1j * rng.standard_normal(shape.dim)
    return HybridState(shape, amp / np.linalg.norm(amp))


def annihilation_matrix(cutoff: int) -> OperatorMatrix:
    """Truncated bosonic annihilation operator: a[n-1, n] = sqrt(n)."""
    lam = _check_cutoff(cutoff)
    a = np.zeros((lam, lam), dtype=complex)
    ns = np.arange(1, lam)
    a[ns - 1, ns] = np.sqrt(ns)
    return OperatorMatrix(a)


def quadrature_matrices(cutoff: int) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Position and momentum quadratures x = (a+a†)/√2, p = -i(a-a†)/√2."""
    a = annihilation_matrix(cutoff).mat
    ad = a.conj().T
    x = (a + ad) / math.sqrt(2.0)
    p = -1j * (a - ad) / math.sqrt(2.0)
    return OperatorMatrix(x), OperatorMatrix(p)


def number_matrix(cutoff: int) -> OperatorMatrix:
    """Truncated number operator diag(0..cutoff-1)."""
    lam = _check_cutoff(cutoff)
    return OperatorMatrix(np.diag(np.arange(lam, dtype=complex)))


def _target_dims(targets, shape: RegisterShape) -> tuple[int, ...]:
    seen = set()
    for t in targets:
        if not 0 <= t < shape.n_subsystems:
            raise ShapeError(f"target {t} out of range for {shape}")
        if t in seen:
            raise ShapeError(f"duplicate target {t}")
        seen.add(t)
    return tuple(shape.dims[t] for t in targets)


def embed(op, targets, shape: RegisterShape) -> OperatorMatrix:
    """Extend ``op`` acting on ``targets`` (flat indices) by identity elsewhere."""
    m = as_matrix(op)
    targets = list(targets)
    tdims = _target_dims(targets, shape)
    d_t = int(np.prod(tdims, dtype=np.int64))
    if m.shape[0] != d_t:
        raise ShapeError(f"operator dim {m.shape[0]} != product of target dims {d_t}")
    rest = [k for k in range(shape.n_subsystems) if k not in targets]
    d_r = shape.dim // d_t
    full = np.kron(m, np.eye(d_r, dtype=complex))
    axdims = list(tdims) + [shape.dims[k] for k in rest]
    tensor = full.reshape(axdims + axdims)
    perm = list(np.argsort(targets + rest))
    n = shape.n_subsystems
    tensor = tensor.transpose(perm + [n + p for p in perm])
    return OperatorMatrix(tensor.reshape(shape.dim, shape.dim))


def _apply_local(block: np.ndarray, op: np.ndarray, targets, dims) -> np.ndarray:
    """Apply ``op`` on the tensor axes ``targets`` of a (dims..., batch?) array."""
    k = len(targets)
    moved = np.moveaxis(block, targets, range(k))
    head = moved.shape[:k]
    tail = moved.shape[k:]
    out = (op @ moved.reshape(int(np.prod(head, dtype=np.int64)), -1)).reshape(head + tail)
    return np.moveaxis(out, range(k), targets)


def apply(state: HybridState, op, targets) -> HybridState:
    """Apply a gate-local operator without materializing its full embedding."""
    m = as_matrix(op)
    targets = list(targets)
    tdims = _target_dims(targets, state.shape)
    if m.shape[0] != int(np.prod(tdims, dtype=np.int64)):
        raise ShapeError("operator dim does not match target subsystem dims")
    psi = _apply_local(state.amplitudes.reshape(state.shape.dims), m, targets, state.shape.dims)
    return replace(state, amplitudes=psi.reshape(-1))


def matrix_exponential(generator, scale: complex = 1.0) -> OperatorMatrix:
    """exp(scale * G); eigendecomposition for Hermitian G, expm otherwise."""
    g = as_matrix(generator)
    if not np.all(np.isfinite(g)):
        raise ValueError("generator has non-finite entries")
    if np.max(np.abs(g - g.conj().T)) <= 1e-10:
        evals, vecs = np.linalg.eigh(g)
        return OperatorMatrix((vecs * np.exp(scale * evals)) @ vecs.conj().T)
    return OperatorMatrix(scipy.linalg.expm(scale * g))


def hermitian_function(generator, fn) -> OperatorMatrix:
    """fn applied to a Hermitian operator through its eigendecomposition."""
    g = as_matrix(generator)
    if np.max(np.abs(g - g.conj().T)) > 1e-10:
        raise ShapeError("generator is not Hermitian")
    evals, vecs = np.linalg.eigh(g)
    return OperatorMatrix((vecs * fn(evals)) @ vecs.conj().T)


def hermitian_eigensolve(h, k: int = 1) -> list[tuple[float, np.ndarray]]:
    """k lowest eigenpairs of a Hermitian matrix, eigenvalues ascending."""
    m = as_matrix(h)
    if np.max(np.abs(m - m.conj().T)) > 1e-10:
        raise ShapeError("matrix is not Hermitian to 1e-10")
    if not 1 <= k <= m.shape[0]:
        raise ValueError(f"k={k} out of range for dim {m.shape[0]}")
    evals, vecs = scipy.linalg.eigh(m)
    return [(float(evals[i]), vecs[:, i].astype(complex)) for i in range(k)]


def inner_product(a: HybridState, b: HybridState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.shape != b.shape:
        raise ShapeError("states live on different registers")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
