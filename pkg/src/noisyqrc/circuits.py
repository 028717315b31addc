"""G3 = {CNOT, H, T} reservoir circuits: sampling, serialization, execution."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from noisyqrc import kernels
from noisyqrc.channels import KrausChannel, NoiseKind, make_channel
from noisyqrc.qstate import DensityMatrix, StateVector, ValidationError

# Which qubits of a gate receive the noise channel after it: "all" hits
# every qubit the gate touches (control first, then target, for CNOT);
# "target" hits only the last listed qubit.
DEFAULT_NOISE_ON = "all"


class GateKind(str, enum.Enum):
    H = "H"
    T = "T"
    CNOT = "CNOT"


GATE_KINDS = (GateKind.H, GateKind.T, GateKind.CNOT)

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
_T = np.diag([1, np.exp(1j * np.pi / 4)]).astype(np.complex128)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
for _m in (_H, _T, _CNOT):
    _m.flags.writeable = False


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        arity = 2 if self.kind is GateKind.CNOT else 1
        if len(self.qubits) != arity:
            raise ValidationError(f"{self.kind.value} takes {arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != arity:
            raise ValidationError(f"CNOT control and target must differ, got {self.qubits}")
        if min(self.qubits) < 0:
            raise ValidationError(f"negative qubit index in {self.qubits}")

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "qubits": list(self.qubits)}


def gate_matrix(g: Gate) -> np.ndarray:
    """Unitary of ``g``; CNOT is 4x4 in (control, target) order."""
    return {GateKind.H: _H, GateKind.T: _T, GateKind.CNOT: _CNOT}[g.kind]


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...]
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits:
                raise ValidationError(f"gate {g} out of range for {self.n_qubits} qubits")

    def __len__(self) -> int:
        return len(self.gates)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "seed": self.seed,
            "gates": [g.to_dict() for g in self.gates],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> Circuit:
        gates = tuple(Gate(GateKind(g["kind"]), tuple(g["qubits"])) for g in d["gates"])
        return cls(int(d["n_qubits"]), gates, d.get("seed"))

    @classmethod
    def from_json(cls, text: str) -> Circuit:
        return cls.from_dict(json.loads(text))


def sample_circuit(n_qubits: int, n_gates: int, seed: int) -> Circuit:
    """Draw ``n_gates`` G3 gates uniformly at random.

    Each gate kind is chosen uniformly from {H, T, CNOT}; single-qubit gates
    pick a uniform qubit and CNOT an ordered (control, target) pair uniform
    over the n(n-1) possibilities. Uses numpy's PCG64 seeded with ``seed``.
    """
    if n_qubits < 2:
        raise ValidationError("G3 circuits need at least 2 qubits (CNOT)")
    if n_gates < 0:
        raise ValidationError("n_gates must be non-negative")
    rng = np.random.default_rng(seed)
    gates = []
    for _ in range(n_gates):
        kind = GATE_KINDS[rng.integers(3)]
        k = 2 if kind is GateKind.CNOT else 1
        qubits = rng.choice(n_qubits, size=k, replace=False)
        gates.append(Gate(kind, tuple(int(q) for q in qubits)))
    return Circuit(n_qubits, tuple(gates), seed)


def _check_width(c: Circuit, n: int) -> None:
    if c.n_qubits != n:
        raise ValidationError(f"circuit acts on {c.n_qubits} qubits, state has {n}")


def evolve_vector(c: Circuit, psi: np.ndarray) -> np.ndarray:
    """Raw-array noiseless evolution; ``psi`` may carry leading batch axes."""
    n = c.n_qubits
    for g in c.gates:
        if g.kind is GateKind.CNOT:
            psi = kernels.apply_perm_vector(psi, kernels.cnot_permutation(n, *g.qubits))
        else:
            psi = kernels.apply_1q_vector(psi, gate_matrix(g), g.qubits[0], n)
    return psi


def evolve_density(
    c: Circuit,
    rho: np.ndarray,
    channel: Optional[KrausChannel] = None,
    noise_on: str = DEFAULT_NOISE_ON,
) -> np.ndarray:
    """Raw-array noisy evolution; ``rho`` may carry leading batch axes.

    A single 2-D matrix takes the fused in-place path when numba is
    available; batched input uses the numpy kernels.
    """
    n = c.n_qubits
    noisy = channel is not None
    if kernels.HAVE_NUMBA and rho.ndim == 2:
        return _evolve_density_fused(c, rho, channel, noise_on)
    for g in c.gates:
        if g.kind is GateKind.CNOT:
            rho = kernels.apply_perm_density(rho, kernels.cnot_permutation(n, *g.qubits))
        else:
            rho = kernels.apply_1q_density(rho, gate_matrix(g), g.qubits[0], n)
        if noisy:
            hit = g.qubits if noise_on == "all" else g.qubits[-1:]
            for q in hit:
                rho = kernels.apply_superop_density(rho, channel.superop, q, n)
    return rho


def _evolve_density_fused(c, rho, channel, noise_on):
    n = c.n_qubits
    out = np.array(rho, dtype=np.complex128, order="C", copy=True)
    fused = {}
    for kind in (GateKind.H, GateKind.T):
        sop = kernels.block_superop(gate_matrix(Gate(kind, (0,))))
        fused[kind] = sop if channel is None else channel.superop @ sop
    for g in c.gates:
        if g.kind is GateKind.CNOT:
            kernels.cnot_inplace(out, g.qubits[0], g.qubits[1], n)
            if channel is not None:
                hit = g.qubits if noise_on == "all" else g.qubits[-1:]
                for q in hit:
                    kernels.superop_inplace(out, channel.superop, q, n)
        else:
            kernels.superop_inplace(out, fused[g.kind], g.qubits[0], n)
    return out


def run_noiseless(c: Circuit, psi0: StateVector) -> StateVector:
    _check_width(c, psi0.n_qubits)
    out = evolve_vector(c, psi0.amplitudes)
    return StateVector(out / np.linalg.norm(out))


def run_noisy(
    c: Circuit,
    rho0: DensityMatrix,
    noise_kind=None,
    p: float = 0.0,
    noise_on: str = DEFAULT_NOISE_ON,
) -> DensityMatrix:
    """Apply each gate, then the single-qubit channel to the qubits it touched.

    ``noise_kind=None`` gives noiseless density-matrix evolution; a kind with
    ``p=0`` still applies the (identity) channel.
    """
    _check_width(c, rho0.n_qubits)
    if noise_on not in ("all", "target"):
        raise ValidationError(f"noise_on must be 'all' or 'target', got {noise_on!r}")
    channel = None if noise_kind is None else make_channel(NoiseKind.parse(noise_kind), p)
    return DensityMatrix.trusted(evolve_density(c, rho0.elements, channel, noise_on))
