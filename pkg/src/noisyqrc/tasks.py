"""Regression datasets of (parameter, ground state, gap) samples.

The on-disk format is JSON::

    {"n_qubits": int,
     "samples": [{"parameter": float, "re": [...], "im": [...], "target": float}]}

with amplitudes in computational-basis order, qubit 0 most significant.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from noisyqrc.qstate import StateVector, ValidationError

log = logging.getLogger(__name__)

RENORMALIZE_TOL = 1e-6
MAX_TFIM_QUBITS = 10

LIH_TEST_INTERVAL = (1.1, 2.0)


class DatasetFormatError(ValueError):
    pass


@dataclass(frozen=True)
class TaskSample:
    parameter: float
    state: StateVector
    target: float


@dataclass(frozen=True)
class TaskDataset:
    n_qubits: int
    samples: tuple[TaskSample, ...]
    test_mask: tuple[bool, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))
        if not self.samples:
            raise ValidationError("dataset has no samples")
        for s in self.samples:
            if s.state.n_qubits != self.n_qubits:
                raise ValidationError(
                    f"sample at parameter {s.parameter} has {s.state.n_qubits} qubits, "
                    f"dataset declares {self.n_qubits}"
                )
        mask = tuple(bool(m) for m in self.test_mask) or (False,) * len(self.samples)
        if len(mask) != len(self.samples):
            raise ValidationError("test_mask length does not match sample count")
        object.__setattr__(self, "test_mask", mask)

    def __len__(self) -> int:
        return len(self.samples)

    def parameters(self) -> np.ndarray:
        return np.array([s.parameter for s in self.samples])

    def states(self) -> np.ndarray:
        return np.stack([s.state.amplitudes for s in self.samples])

    def targets(self) -> np.ndarray:
        return np.array([s.target for s in self.samples])

    @property
    def test_fraction(self) -> float:
        return sum(self.test_mask) / len(self.samples)


def save_dataset(dataset: TaskDataset, path) -> Path:
    path = Path(path)
    payload = {
        "n_qubits": dataset.n_qubits,
        "samples": [
            {
                "parameter": s.parameter,
                "re": s.state.amplitudes.real.tolist(),
                "im": s.state.amplitudes.imag.tolist(),
                "target": s.target,
            }
            for s in dataset.samples
        ],
    }
    try:
        path.write_text(json.dumps(payload))
    except OSError as exc:
        raise OSError(f"cannot write dataset to {path}: {exc.strerror or exc}") from exc
    return path


def load_dataset(path) -> TaskDataset:
    """Read a dataset file, validating sizes and norms.

    States within 1e-6 of unit norm are renormalised; anything further off
    is rejected. Duplicate parameters only produce a warning.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
        n = int(raw["n_qubits"])
        entries = raw["samples"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetFormatError(f"{path}: malformed dataset file ({exc})") from exc
    dim = 2**n
    samples = []
    for k, e in enumerate(entries):
        try:
            param = float(e["parameter"])
            re = np.asarray(e["re"], dtype=float)
            im = np.asarray(e.get("im", np.zeros_like(re)), dtype=float)
            target = float(e["target"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetFormatError(f"{path}: sample {k} malformed ({exc})") from exc
        if re.shape != (dim,) or im.shape != (dim,):
            raise DatasetFormatError(
                f"{path}: sample {k} (parameter {param}) has {re.size} amplitudes, "
                f"expected {dim} for n_qubits={n}"
            )
        amps = np.empty(dim, dtype=np.complex128)
        amps.real, amps.imag = re, im
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > RENORMALIZE_TOL:
            raise ValidationError(
                f"{path}: sample {k} (parameter {param}) has norm {norm:.9g}"
            )
        if abs(norm - 1) > 1e-14:
            amps = amps / norm
        samples.append(TaskSample(param, StateVector(amps), target))
    params = [s.parameter for s in samples]
    if len(set(params)) != len(params):
        log.warning("%s: duplicate parameter values present; keeping all samples", path)
    return TaskDataset(n, tuple(samples))


def tfim_hamiltonian(n_qubits: int, h: float) -> np.ndarray:
    """Dense H = -sum Z_i Z_{i+1} - h sum X_i on an open chain."""
    dim = 2**n_qubits
    idx = np.arange(dim)
    bits = (idx[:, None] >> (n_qubits - 1 - np.arange(n_qubits))) & 1
    spins = 1 - 2 * bits
    H = np.diag(-np.sum(spins[:, :-1] * spins[:, 1:], axis=1).astype(float))
    for q in range(n_qubits):
        H[idx ^ (1 << (n_qubits - 1 - q)), idx] -= h
    return H


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # first amplitude within rounding of the largest magnitude is made real positive
    mag = np.abs(v)
    k = int(np.argmax(mag >= mag.max() * (1 - 1e-9)))
    return v * (np.conj(v[k]) / mag[k])


def tfim_ground_state(n_qubits: int, h: float) -> tuple[np.ndarray, float, float]:
    """Return (ground state, E0, E1) by dense Hermitian diagonalisation."""
    evals, evecs = np.linalg.eigh(tfim_hamiltonian(n_qubits, h))
    psi = _fix_phase(evecs[:, 0].astype(np.complex128))
    return psi / np.linalg.norm(psi), float(evals[0]), float(evals[1])


def generate_tfim_task(n_qubits: int, h_values) -> TaskDataset:
    """Synthetic task: predict the gap E1 - E0 from the TFIM ground state."""
    if not 1 <= n_qubits <= MAX_TFIM_QUBITS:
        raise ValidationError(f"TFIM generation supports 1..{MAX_TFIM_QUBITS} qubits")
    h_values = np.atleast_1d(np.asarray(h_values, dtype=float))
    if h_values.size == 0 or np.any(h_values <= 0):
        raise ValidationError("h_values must be non-empty and strictly positive")
    samples = []
    for h in h_values:
        psi, e0, e1 = tfim_ground_state(n_qubits, float(h))
        samples.append(TaskSample(float(h), StateVector(psi), e1 - e0))
    return TaskDataset(n_qubits, tuple(samples))


def split_contiguous(dataset: TaskDataset, test_lo: float, test_hi: float) -> TaskDataset:
    """Mark samples with parameter in [test_lo, test_hi] as the test set."""
    params = dataset.parameters()
    mask = (params >= test_lo) & (params <= test_hi)
    if not mask.any():
        raise ValidationError(f"test interval [{test_lo}, {test_hi}] contains no samples")
    if mask.all():
        raise ValidationError(f"test interval [{test_lo}, {test_hi}] leaves no training samples")
    return replace(dataset, test_mask=tuple(mask.tolist()))


def split_central(dataset: TaskDataset, fraction: float = 0.3) -> TaskDataset:
    """Hold out a contiguous block of ``round(fraction * N)`` samples in the
    middle of the parameter range, forcing interpolation across a gap."""
    if not 0 < fraction < 1:
        raise ValidationError("fraction must lie in (0, 1)")
    order = np.argsort(dataset.parameters(), kind="stable")
    n = len(order)
    k = min(max(int(round(fraction * n)), 1), n - 1)
    start = (n - k) // 2
    mask = np.zeros(n, dtype=bool)
    mask[order[start : start + k]] = True
    return replace(dataset, test_mask=tuple(mask.tolist()))


def default_synthetic_h_values() -> np.ndarray:
    return np.round(np.linspace(0.2, 2.0, 37), 10)
