"""Circuit representation and dense state-vector simulation.

A Circuit is an ordered list of steps over a fixed register: GateSpec entries
(elementary or REF gates) interleaved with PostSelect entries.  Simulation
applies each gate as a local factor on the state tensor; it never builds the
embedded matrix.  Post-selection projects a qubit onto a basis outcome,
renormalizes, and folds the success amplitude into ``HybridState.norm_factor``.

Text serialization (one step per line, used by ``sgsim --dump-circuit``)::

    KIND param ... @t1,t2     e.g.  CD 0+0.3535533905932738j @0,2
    POST q=outcome            e.g.  POST 1=0
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .fock import HybridState, OperatorMatrix, RegisterShape, ShapeError, _apply_local, vacuum
from .gates import GateSpec, gate_matrix


class PostselectionError(RuntimeError):
    """Post-selection success probability fell below the configured floor."""

    def __init__(self, probability: float, floor: float):
        super().__init__(
            f"post-selection probability {probability:.3e} below floor {floor:.3e}"
        )
        self.probability = probability
        self.floor = floor


@dataclass(frozen=True)
class PostSelect:
    """Project ``qubit`` onto computational-basis ``outcome`` (0 or 1)."""

    qubit: int
    outcome: int


@dataclass(frozen=True, eq=False)
class Circuit:
    shape: RegisterShape
    steps: tuple = ()
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        for step in self.steps:
            if isinstance(step, PostSelect):
                if not 0 <= step.qubit < self.shape.n_qubits or step.outcome not in (0, 1):
                    raise ShapeError(f"invalid post-selection {step}")
            elif isinstance(step, GateSpec):
                for t in step.targets:
                    if not 0 <= t < self.shape.n_subsystems:
                        raise ShapeError(f"target {t} out of range in {step.kind}")
            else:
                raise TypeError(f"unsupported circuit step {step!r}")

    @property
    def postselections(self) -> tuple[PostSelect, ...]:
        return tuple(s for s in self.steps if isinstance(s, PostSelect))

    @property
    def gates(self) -> tuple[GateSpec, ...]:
        return tuple(s for s in self.steps if isinstance(s, GateSpec))

    def extended(self, other: "Circuit") -> "Circuit":
        """Concatenate two circuits over the same register."""
        if other.shape != self.shape:
            raise ShapeError("cannot concatenate circuits over different registers")
        meta = {**self.metadata, **other.metadata}
        return Circuit(self.shape, self.steps + other.steps, meta)


# gate matrices keyed by (kind, params, cutoff); REF gates bypass the cache
_GATE_CACHE: dict = {}


def _step_matrix(step: GateSpec, cutoff: int) -> np.ndarray:
    if step.kind == "REF":
        return np.asarray(step.matrix, dtype=complex)
    key = (step.kind, step.params, cutoff)
    mat = _GATE_CACHE.get(key)
    if mat is None:
        mat = gate_matrix(step, cutoff)
        _GATE_CACHE[key] = mat
    return mat


def simulate(
    circuit: Circuit,
    state: HybridState | None = None,
    postselect_floor: float = 1e-6,
) -> HybridState:
    """Run the circuit on ``state`` (defaults to the register vacuum)."""
    if state is None:
        state = vacuum(circuit.shape)
    if state.shape != circuit.shape:
        raise ShapeError("state register does not match circuit register")
    dims = circuit.shape.dims
    psi = state.amplitudes.reshape(dims)
    norm_factor = state.norm_factor
    for step in circuit.steps:
        if isinstance(step, GateSpec):
            psi = _apply_local(psi, _step_matrix(step, circuit.shape.cutoff), list(step.targets), dims)
        else:
            keep = [slice(None)] * len(dims)
            keep[step.qubit] = step.outcome
            proj = np.zeros_like(psi)
            proj[tuple(keep)] = psi[tuple(keep)]
            prob = float(np.linalg.norm(proj.reshape(-1)) ** 2)
            if prob < postselect_floor:
                raise PostselectionError(prob, postselect_floor)
            psi = proj / np.sqrt(prob)
            norm_factor *= np.sqrt(prob)
    return HybridState(circuit.shape, psi.reshape(-1), norm_factor)


def circuit_unitary(circuit: Circuit) -> OperatorMatrix:
    """Full dense unitary of a post-selection-free circuit (oracle use)."""
    if circuit.postselections:
        raise ValueError("circuit with post-selections has no unitary")
    dims = circuit.shape.dims
    dim = circuit.shape.dim
    block = np.eye(dim, dtype=complex).reshape(dims + (dim,))
    for step in circuit.steps:
        block = _apply_local(block, _step_matrix(step, circuit.shape.cutoff), list(step.targets), dims)
    return OperatorMatrix(block.reshape(dim, dim))


def reindex(circuit: Circuit, new_shape: RegisterShape, qubit_map, mode_map) -> Circuit:
    """Relabel subsystems: old qubit i -> new qubit qubit_map[i], old mode
    s -> new mode mode_map[s].  Used when wrappers add ancillas."""
    old = circuit.shape

    def remap(t: int) -> int:
        if t < old.n_qubits:
            return new_shape.qubit(qubit_map[t])
        return new_shape.mode(mode_map[t - old.n_qubits])

    steps = []
    for step in circuit.steps:
        if isinstance(step, GateSpec):
            steps.append(replace(step, targets=tuple(remap(t) for t in step.targets)))
        else:
            steps.append(PostSelect(new_shape.qubit(qubit_map[step.qubit]), step.outcome))
    return Circuit(new_shape, tuple(steps), dict(circuit.metadata))


def _format_param(p) -> str:
    c = complex(p)
    if c.imag == 0.0:
        return repr(c.real)
    return repr(c)[1:-1] if repr(c).startswith("(") else repr(c)


def to_text(circuit: Circuit) -> str:
    """Line-oriented dump: ``KIND param... @targets`` and ``POST q=outcome``."""
    lines = []
    for step in circuit.steps:
        if isinstance(step, PostSelect):
            lines.append(f"POST {step.qubit}={step.outcome}")
            continue
        parts = [step.kind, *(_format_param(p) for p in step.params)]
        lines.append(" ".join(parts) + " @" + ",".join(str(t) for t in step.targets))
    return "\n".join(lines) + "\n"
