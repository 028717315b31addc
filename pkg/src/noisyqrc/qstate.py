"""Pure states, density matrices and the pure-vs-mixed fidelity.

States are stored densely with qubit 0 as the most significant bit of the
computational-basis index. Both containers are immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 12

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-8


class ValidationError(ValueError):
    """Raised when a state or operation argument violates its contract."""


def _n_qubits_for(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise ValidationError(f"dimension {dim} is not a power of two >= 2")
    if n > MAX_QUBITS:
        raise ValidationError(f"{n} qubits exceeds the dense-storage cap of {MAX_QUBITS}")
    return n


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes)
        if amps.ndim != 1:
            raise ValidationError("state vector must be one-dimensional")
        _n_qubits_for(amps.shape[0])
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state vector norm {norm!r} is not 1")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> StateVector:
        amps = np.zeros(2**n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def normalized(cls, amplitudes) -> StateVector:
        amps = np.asarray(amplitudes, dtype=np.complex128)
        return cls(amps / np.linalg.norm(amps))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A 2^n x 2^n Hermitian, unit-trace, positive semidefinite matrix.

    The constructor checks every invariant (the PSD check costs an
    eigendecomposition). Simulation internals that preserve the invariants
    by construction go through :meth:`trusted` instead.
    """

    elements: np.ndarray

    def __post_init__(self) -> None:
        rho = np.asarray(self.elements)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValidationError("density matrix must be square")
        _n_qubits_for(rho.shape[0])
        object.__setattr__(self, "elements", _frozen(rho))
        problems = self.violations()
        if problems:
            raise ValidationError("; ".join(problems))

    @classmethod
    def trusted(cls, elements: np.ndarray) -> DensityMatrix:
        obj = object.__new__(cls)
        object.__setattr__(obj, "elements", _frozen(elements))
        return obj

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> DensityMatrix:
        dim = 2**n_qubits
        return cls(np.eye(dim) / dim)

    @property
    def n_qubits(self) -> int:
        return self.elements.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    def violations(self) -> list[str]:
        rho = self.elements
        out = []
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm >= HERMITIAN_TOL:
            out.append(f"not Hermitian (max deviation {herm:.3g})")
        tr = np.trace(rho)
        if abs(tr - 1.0) >= TRACE_TOL:
            out.append(f"trace {tr:.12g} is not 1")
        if not out:
            lo = np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0]
            if lo < -PSD_TOL:
                out.append(f"not positive semidefinite (min eigenvalue {lo:.3g})")
        return out

    def is_valid(self) -> bool:
        return not self.violations()


def pure_to_density(psi: StateVector) -> DensityMatrix:
    """Return the projector |psi><psi|."""
    if not isinstance(psi, StateVector):
        psi = StateVector(np.asarray(psi))
    a = psi.amplitudes
    return DensityMatrix.trusted(np.outer(a, a.conj()))


def fidelity_pure_mixed(psi: StateVector, rho: DensityMatrix) -> float:
    """Squared-overlap fidelity <psi|rho|psi>.

    One argument is always pure, so this is the probability that ``rho``
    passes a projective test for ``psi``. Note it is the square of the
    root-fidelity convention; values are not interchangeable.
    """
    if psi.dim != rho.dim:
        raise ValidationError(f"dimension mismatch: state {psi.dim}, density matrix {rho.dim}")
    a = psi.amplitudes
    f = float(np.real(a.conj() @ rho.elements @ a))
    return min(max(f, 0.0), 1.0)


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2), computed as the squared Frobenius norm."""
    return float(np.sum(np.abs(rho.elements) ** 2))
