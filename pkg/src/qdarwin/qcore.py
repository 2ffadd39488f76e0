"""Dense complex linear algebra for few-qubit pure and mixed states.

Qubit convention used across the whole package: qubits carry 1-based labels
and qubit 1 is the most significant bit of the amplitude index, so the basis
ket |q1 q2 ... qn> sits at index int("q1q2...qn", 2).  All containers are
immutable after construction and safe to share between threads.  Entropies
are in bits (log base 2).
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from math import sqrt

import numpy as np

DEFAULT_MAX_QUBITS = 24
_ENV_MAX_QUBITS = "QDARWIN_MAX_QUBITS"

_HERMITIAN_TOL = 1e-10
_TRACE_TOL = 1e-10
_NORM_TOL = 1e-10
_EIGENVALUE_FLOOR = -1e-9
_LOG_CUTOFF = 1e-12

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / sqrt(2)


def max_qubits() -> int:
    """Size cap in qubits; override with the QDARWIN_MAX_QUBITS env var."""
    raw = os.environ.get(_ENV_MAX_QUBITS)
    if raw is None:
        return DEFAULT_MAX_QUBITS
    value = int(raw)
    if value < 1:
        raise ValueError(f"{_ENV_MAX_QUBITS} must be a positive integer, got {raw!r}")
    return value


def _check_qubit_budget(n_qubits: int) -> None:
    cap = max_qubits()
    if n_qubits > cap:
        raise ValueError(
            f"state of {n_qubits} qubits exceeds the configured cap of {cap} "
            f"(set {_ENV_MAX_QUBITS} to raise it)"
        )


def _freeze(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=complex, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state of n qubits: 2^n complex amplitudes with unit norm."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size < 2 or amps.size != 2**n:
            raise ValueError(f"amplitude count {amps.size} is not 2^n for n >= 1")
        _check_qubit_budget(n)
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > _NORM_TOL:
            raise ValueError(f"state is not normalized: sum |a|^2 = {norm_sq!r}")
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @classmethod
    def computational_basis(cls, bits: str) -> "StateVector":
        """Basis ket |bits>, e.g. "0101"."""
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"bits must be a nonempty 0/1 string, got {bits!r}")
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    @classmethod
    def plus_state(cls, n_qubits: int) -> "StateVector":
        """|+>^n, the uniform superposition."""
        if n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        _check_qubit_budget(n_qubits)
        return cls(np.full(2**n_qubits, 1.0 / sqrt(2**n_qubits), dtype=complex))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian unit-trace operator on n qubits.

    The `physical` flag asserts a nonnegative spectrum (within -1e-9); it is
    trusted at construction and enforced where a spectrum is actually needed,
    e.g. by von_neumann_entropy.  Linear-inversion reconstructions set it to
    False when negative eigenvalues are detected.
    """

    entries: np.ndarray
    physical: bool = True

    def __post_init__(self) -> None:
        mat = np.asarray(self.entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"entries must be a square matrix, got shape {mat.shape}")
        n = mat.shape[0].bit_length() - 1
        if mat.shape[0] < 2 or mat.shape[0] != 2**n:
            raise ValueError(f"matrix dimension {mat.shape[0]} is not 2^n for n >= 1")
        _check_qubit_budget(n)
        deviation = float(np.max(np.abs(mat - mat.conj().T)))
        if deviation > _HERMITIAN_TOL:
            raise ValueError(f"matrix is not Hermitian: max |rho - rho^dag| = {deviation:.3e}")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > _TRACE_TOL:
            raise ValueError(f"trace must be 1, got {trace!r}")
        object.__setattr__(self, "entries", _freeze(mat))

    @property
    def n_qubits(self) -> int:
        return self.entries.shape[0].bit_length() - 1

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        dim = 2**n_qubits
        return cls(np.eye(dim, dtype=complex) / dim)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, e.g. "ZIZI" (letters I,X,Y,Z)."""

    labels: str

    def __post_init__(self) -> None:
        if not self.labels or set(self.labels) - set("IXYZ"):
            raise ValueError(f"labels must be a nonempty string over IXYZ, got {self.labels!r}")

    @classmethod
    def from_indices(cls, indices) -> "PauliString":
        """Build from the numeric convention 0=I, 1=X, 2=Y, 3=Z."""
        return cls("".join("IXYZ"[int(i)] for i in indices))

    @property
    def weight(self) -> int:
        """Number of non-identity letters."""
        return sum(1 for c in self.labels if c != "I")

    def matrix(self) -> np.ndarray:
        out = np.array([[1.0 + 0j]])
        for c in self.labels:
            out = np.kron(out, PAULI_MATRICES[c])
        return out

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, i) -> str:
        return self.labels[i]

    def __str__(self) -> str:
        return self.labels


def as_pauli(value) -> PauliString:
    return value if isinstance(value, PauliString) else PauliString(str(value))


def all_pauli_strings(n_qubits: int):
    """All 4^n Pauli strings in lexicographic I<X<Y<Z order."""
    import itertools

    return [PauliString("".join(t)) for t in itertools.product("IXYZ", repeat=n_qubits)]


_GATE_ARITY = {
    "hadamard": 1,
    "pauli_x": 1,
    "pauli_z": 1,
    "single_qubit": 1,
    "swap": 2,
    "controlled_phase": 2,
}
_FIXED_1Q = {
    "hadamard": HADAMARD,
    "pauli_x": PAULI_MATRICES["X"],
    "pauli_z": PAULI_MATRICES["Z"],
}


@dataclass(frozen=True, eq=False)
class Gate:
    """A unitary to apply: fixed single-qubit gates, Swap, a controlled phase,
    or an arbitrary 2x2 unitary."""

    kind: str
    targets: tuple[int, ...]
    phase: float = 0.0
    matrix: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in _GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        targets = tuple(int(t) for t in self.targets)
        if len(targets) != _GATE_ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {_GATE_ARITY[self.kind]} target(s), got {targets}")
        if len(set(targets)) != len(targets):
            raise ValueError(f"duplicate gate targets {targets}")
        if any(t < 1 for t in targets):
            raise ValueError(f"qubit labels are 1-based, got {targets}")
        if not np.isfinite(self.phase):
            raise ValueError("gate phase must be finite")
        if self.kind == "single_qubit":
            mat = np.asarray(self.matrix, dtype=complex)
            if mat.shape != (2, 2):
                raise ValueError(f"single-qubit matrix must be 2x2, got {mat.shape}")
            if np.max(np.abs(mat.conj().T @ mat - np.eye(2))) > _HERMITIAN_TOL:
                raise ValueError("single-qubit matrix is not unitary within 1e-10")
            object.__setattr__(self, "matrix", _freeze(mat))
        elif self.matrix is not None:
            raise ValueError(f"{self.kind} does not take an explicit matrix")
        object.__setattr__(self, "targets", targets)

    @classmethod
    def hadamard(cls, qubit: int) -> "Gate":
        return cls("hadamard", (qubit,))

    @classmethod
    def pauli_x(cls, qubit: int) -> "Gate":
        return cls("pauli_x", (qubit,))

    @classmethod
    def pauli_z(cls, qubit: int) -> "Gate":
        return cls("pauli_z", (qubit,))

    @classmethod
    def swap(cls, qubit_a: int, qubit_b: int) -> "Gate":
        return cls("swap", (qubit_a, qubit_b))

    @classmethod
    def controlled_phase(cls, phase: float, qubit_a: int, qubit_b: int) -> "Gate":
        return cls("controlled_phase", (qubit_a, qubit_b), phase=phase)

    @classmethod
    def single_qubit(cls, matrix: np.ndarray, qubit: int) -> "Gate":
        return cls("single_qubit", (qubit,), matrix=matrix)

    def is_entangling(self) -> bool:
        """True for gates that can create entanglement (controlled phase with
        nonzero phase); Swap only relabels qubits."""
        return self.kind == "controlled_phase" and self.phase % (2 * np.pi) != 0.0


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply a unitary gate; the output norm is preserved within 1e-10."""
    n = state.n_qubits
    for t in gate.targets:
        if t > n:
            raise ValueError(f"gate target {t} out of range for {n} qubits")
    tensor = state.amplitudes.reshape([2] * n).copy()
    if gate.kind in _FIXED_1Q or gate.kind == "single_qubit":
        mat = _FIXED_1Q.get(gate.kind, gate.matrix)
        axis = gate.targets[0] - 1
        tensor = np.moveaxis(np.tensordot(mat, tensor, axes=(1, axis)), 0, axis)
    elif gate.kind == "swap":
        tensor = np.swapaxes(tensor, gate.targets[0] - 1, gate.targets[1] - 1)
    else:  # controlled_phase
        idx = [slice(None)] * n
        idx[gate.targets[0] - 1] = 1
        idx[gate.targets[1] - 1] = 1
        tensor[tuple(idx)] *= np.exp(1j * gate.phase)
    return StateVector(tensor.reshape(-1))


def apply_circuit(state: StateVector, gates) -> StateVector:
    for gate in gates:
        state = apply_gate(state, gate)
    return state


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product with a's qubits first (most significant)."""
    _check_qubit_budget(a.n_qubits + b.n_qubits)
    return StateVector(np.kron(a.amplitudes, b.amplitudes))


def _split_axes(n: int, keep: tuple[int, ...]) -> list[int]:
    traced = [q for q in range(1, n + 1) if q not in keep]
    return [q - 1 for q in keep] + [q - 1 for q in traced]


def _validate_keep(n: int, keep) -> tuple[int, ...]:
    keep = tuple(int(q) for q in keep)
    if not keep:
        raise ValueError("keep set must be nonempty")
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate qubit labels in keep set {keep}")
    for q in keep:
        if q < 1 or q > n:
            raise ValueError(f"qubit label {q} out of range for {n} qubits")
    return keep


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on the given qubits, in the order they are listed."""
    n = rho.n_qubits
    keep = _validate_keep(n, keep)
    axes = _split_axes(n, keep)
    d_keep = 2 ** len(keep)
    d_traced = 2 ** (n - len(keep))
    tensor = rho.entries.reshape([2] * (2 * n))
    tensor = tensor.transpose(axes + [a + n for a in axes])
    tensor = tensor.reshape(d_keep, d_traced, d_keep, d_traced)
    reduced = np.einsum("aibi->ab", tensor)
    return DensityMatrix(reduced, physical=rho.physical)


def reduced_density(state: StateVector, keep) -> DensityMatrix:
    """Reduced density matrix of a pure state (no 2^n x 2^n intermediate)."""
    n = state.n_qubits
    keep = _validate_keep(n, keep)
    axes = _split_axes(n, keep)
    mat = state.amplitudes.reshape([2] * n).transpose(axes).reshape(2 ** len(keep), -1)
    return DensityMatrix(mat @ mat.conj().T)


def _spectrum_entropy(values: np.ndarray) -> float:
    """Shannon entropy in bits of a spectrum; contributions below 1e-12 are 0."""
    values = np.asarray(values, dtype=float)
    low = float(values.min()) if values.size else 0.0
    if low < _EIGENVALUE_FLOOR:
        raise ValueError(
            f"negative eigenvalue {low:.3e} below the -1e-9 tolerance; "
            "project the state to the physical set first"
        )
    positive = values[values > _LOG_CUTOFF]
    if positive.size == 0:
        return 0.0
    return float(max(-np.sum(positive * np.log2(positive)), 0.0))


def subsystem_entropy(state: StateVector, subset) -> float:
    """Entropy of a reduction of a pure state, via singular values of the
    bipartition matrix (never forms the global density matrix)."""
    n = state.n_qubits
    subset = _validate_keep(n, subset)
    axes = _split_axes(n, subset)
    mat = state.amplitudes.reshape([2] * n).transpose(axes).reshape(2 ** len(subset), -1)
    singular = np.linalg.svd(mat, compute_uv=False)
    return _spectrum_entropy(singular**2)


def hermitian_eigenvalues(rho: DensityMatrix) -> np.ndarray:
    """Real eigenvalues in descending order; their sum equals the trace."""
    eigs = np.linalg.eigvalsh(rho.entries)[::-1]
    if abs(float(np.sum(eigs)) - float(np.real(np.trace(rho.entries)))) > 1e-9:
        raise ValueError("eigenvalue sum deviates from the trace beyond 1e-9")
    return eigs


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-Tr[rho log2 rho] with 0 log 0 := 0.

    Eigenvalues in [-1e-9, 0) are clamped to 0 (round-off on rank-deficient
    states); anything more negative raises, since the flag promised a
    physical state.
    """
    eigs = np.linalg.eigvalsh(rho.entries)
    if float(eigs.min()) < _EIGENVALUE_FLOOR:
        raise ValueError(
            f"eigenvalue {float(eigs.min()):.3e} below -1e-9 on a state flagged "
            f"physical={rho.physical}; use project_to_physical first"
        )
    return _spectrum_entropy(np.clip(eigs, 0.0, None))


@lru_cache(maxsize=4096)
def _pauli_action(labels: str) -> tuple[np.ndarray, np.ndarray]:
    """Permutation/phase form of a Pauli string: P|j> = phases[j] |perm[j]>."""
    n = len(labels)
    dim = 2**n
    indices = np.arange(dim)
    flip_mask = 0
    phases = np.ones(dim, dtype=complex)
    for pos, letter in enumerate(labels):
        shift = n - 1 - pos
        bit = (indices >> shift) & 1
        if letter == "X":
            flip_mask |= 1 << shift
        elif letter == "Y":
            flip_mask |= 1 << shift
            phases = phases * (1j * (1 - 2 * bit))
        elif letter == "Z":
            phases = phases * (1 - 2 * bit)
    perm = indices ^ flip_mask
    perm.flags.writeable = False
    phases.flags.writeable = False
    return perm, phases


def pauli_expectation(state, pauli) -> float:
    """Expectation value of a Pauli string; real within a 1e-9 residue check."""
    pauli = as_pauli(pauli)
    n = state.n_qubits
    if len(pauli) != n:
        raise ValueError(f"Pauli string length {len(pauli)} != {n} qubits")
    perm, phases = _pauli_action(pauli.labels)
    if isinstance(state, StateVector):
        psi = state.amplitudes
        transformed = np.empty_like(psi)
        transformed[perm] = phases * psi
        value = complex(np.vdot(psi, transformed))
    else:
        # Tr[rho P] = sum_j rho[j, perm[j]] * phases[j]
        value = complex(np.sum(state.entries[np.arange(perm.size), perm] * phases))
    if abs(value.imag) > 1e-9:
        raise ValueError(f"expectation has imaginary residue {value.imag:.3e} beyond 1e-9")
    return float(value.real)


def _fidelity_pure_pure(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.abs(np.vdot(a, b)) ** 2)


def _fidelity_pure_mixed(psi: np.ndarray, rho: np.ndarray) -> float:
    return float(np.real(psi.conj() @ rho @ psi))


def fidelity(a, b) -> float:
    """Fidelity between states given as StateVector or DensityMatrix.

    Pure inputs use the overlap forms; two mixed inputs fall back to the
    square-root formula (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
    """
    dim_a = a.amplitudes.size if isinstance(a, StateVector) else a.entries.shape[0]
    dim_b = b.amplitudes.size if isinstance(b, StateVector) else b.entries.shape[0]
    if dim_a != dim_b:
        raise ValueError(f"dimension mismatch: {dim_a} vs {dim_b}")
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        value = _fidelity_pure_pure(a.amplitudes, b.amplitudes)
    elif isinstance(a, StateVector):
        value = _fidelity_pure_mixed(a.amplitudes, b.entries)
    elif isinstance(b, StateVector):
        value = _fidelity_pure_mixed(b.amplitudes, a.entries)
    else:
        eigs, vecs = np.linalg.eigh(a.entries)
        sqrt_a = (vecs * np.sqrt(np.clip(eigs, 0.0, None))) @ vecs.conj().T
        inner = np.linalg.eigvalsh(sqrt_a @ b.entries @ sqrt_a)
        value = float(np.sum(np.sqrt(np.clip(inner, 0.0, None))) ** 2)
    if value < -1e-9 or value > 1.0 + 1e-9:
        raise ValueError(f"fidelity {value!r} outside [0, 1] beyond tolerance")
    return float(min(max(value, 0.0), 1.0))


def overlap(a: StateVector, b: StateVector) -> complex:
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def states_equal_up_to_phase(a: StateVector, b: StateVector, tol: float = 1e-10) -> bool:
    """Equality modulo a global phase: | |<a|b>| - 1 | <= tol."""
    return abs(abs(overlap(a, b)) - 1.0) <= tol


def project_to_physical(rho: DensityMatrix) -> DensityMatrix:
    """Closest (Frobenius) positive-semidefinite unit-trace matrix.

    Eigenvalue water-filling: zero out negatives, shift the surviving
    (strictly positive) eigenvalues uniformly to restore the trace, and
    repeat if the shift drove new eigenvalues negative.
    """
    eigs, vecs = np.linalg.eigh(rho.entries)
    if float(eigs.min()) >= 0.0:
        return rho if rho.physical else DensityMatrix(rho.entries, physical=True)
    lam = eigs.astype(float).copy()
    while True:
        lam[lam < 0.0] = 0.0
        survivors = lam > 0.0
        deficit = 1.0 - float(lam.sum())
        lam[survivors] += deficit / int(survivors.sum())
        if float(lam.min()) >= 0.0:
            break
    projected = (vecs * lam) @ vecs.conj().T
    projected = (projected + projected.conj().T) / 2
    projected /= np.real(np.trace(projected))
    return DensityMatrix(projected, physical=True)
