"""Single-qubit Kraus noise channels and their embedding into n-qubit states."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from noisyqrc.kernels import apply_superop_density, superoperator
from noisyqrc.qstate import DensityMatrix, ValidationError

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

COMPLETENESS_TOL = 1e-12
UNITAL_TOL = 1e-12


class NoiseKind(str, enum.Enum):
    AMPLITUDE_DAMPING = "amp"
    PHASE_DAMPING = "phase"
    DEPOLARIZING = "depol"

    @classmethod
    def parse(cls, value) -> NoiseKind:
        if isinstance(value, cls):
            return value
        aliases = {
            "amp": cls.AMPLITUDE_DAMPING,
            "amp_damp": cls.AMPLITUDE_DAMPING,
            "amplitude_damping": cls.AMPLITUDE_DAMPING,
            "phase": cls.PHASE_DAMPING,
            "phase_damp": cls.PHASE_DAMPING,
            "phase_damping": cls.PHASE_DAMPING,
            "depol": cls.DEPOLARIZING,
            "depolarizing": cls.DEPOLARIZING,
        }
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValidationError(f"unknown noise kind {value!r}") from None


# depolarizing is only contractive on Pauli terms up to p = 3/4
P_MAX = {
    NoiseKind.AMPLITUDE_DAMPING: 1.0,
    NoiseKind.PHASE_DAMPING: 1.0,
    NoiseKind.DEPOLARIZING: 0.75,
}


@dataclass(frozen=True, eq=False)
class KrausChannel:
    kind: NoiseKind
    p: float
    kraus_ops: tuple[np.ndarray, ...]
    superop: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        ops = tuple(np.array(m, dtype=np.complex128) for m in self.kraus_ops)
        for m in ops:
            m.flags.writeable = False
        object.__setattr__(self, "kraus_ops", ops)
        sop = superoperator(ops)
        sop[np.abs(sop) < 1e-15] = 0
        sop.flags.writeable = False
        object.__setattr__(self, "superop", sop)

    def completeness_error(self) -> float:
        total = sum(m.conj().T @ m for m in self.kraus_ops)
        return float(np.max(np.abs(total - I2)))

    def apply_matrix(self, op: np.ndarray) -> np.ndarray:
        """Kraus sum on a bare 2x2 operator (need not be a state)."""
        return sum(m @ op @ m.conj().T for m in self.kraus_ops)


def _check_p(kind: NoiseKind, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= P_MAX[kind]:
        raise ValidationError(f"{kind.name.lower()} probability {p} outside [0, {P_MAX[kind]}]")
    return p


def amplitude_damping(p: float) -> KrausChannel:
    """Energy relaxation: M1 = sqrt(p)|0><1| moves population from |1> to |0>."""
    p = _check_p(NoiseKind.AMPLITUDE_DAMPING, p)
    m0 = np.array([[1, 0], [0, np.sqrt(1 - p)]])
    m1 = np.array([[0, np.sqrt(p)], [0, 0]])
    return KrausChannel(NoiseKind.AMPLITUDE_DAMPING, p, (m0, m1))


def phase_damping(p: float) -> KrausChannel:
    p = _check_p(NoiseKind.PHASE_DAMPING, p)
    m0 = np.sqrt(1 - p) * I2
    m1 = np.array([[np.sqrt(p), 0], [0, 0]])
    m2 = np.array([[0, 0], [0, np.sqrt(p)]])
    return KrausChannel(NoiseKind.PHASE_DAMPING, p, (m0, m1, m2))


def depolarizing(p: float) -> KrausChannel:
    """X, Y or Z error, each with probability p/3.

    Built from the Kraus operators, so Pauli terms shrink by 1 - 4p/3 and
    the fixed point is I/2.
    """
    p = _check_p(NoiseKind.DEPOLARIZING, p)
    s = np.sqrt(p / 3)
    return KrausChannel(NoiseKind.DEPOLARIZING, p, (np.sqrt(1 - p) * I2, s * X, s * Y, s * Z))


_CONSTRUCTORS = {
    NoiseKind.AMPLITUDE_DAMPING: amplitude_damping,
    NoiseKind.PHASE_DAMPING: phase_damping,
    NoiseKind.DEPOLARIZING: depolarizing,
}


def make_channel(kind, p: float) -> KrausChannel:
    return _CONSTRUCTORS[NoiseKind.parse(kind)](p)


def apply_channel(rho: DensityMatrix, ch: KrausChannel, qubit: int) -> DensityMatrix:
    """Apply ``ch`` to ``qubit`` of ``rho``, acting as identity elsewhere."""
    n = rho.n_qubits
    if not 0 <= qubit < n:
        raise ValidationError(f"qubit {qubit} out of range for {n} qubits")
    return DensityMatrix.trusted(apply_superop_density(rho.elements, ch.superop, qubit, n))


def is_unital(ch: KrausChannel) -> bool:
    total = sum(m @ m.conj().T for m in ch.kraus_ops)
    return bool(np.max(np.abs(total - I2)) < UNITAL_TOL)
