"""Pauli strings, Pauli-basis coefficients and channel action on Paulis.

Canonical order of the 4^n strings: read the string as a base-4 integer with
qubit 0 as the most significant digit and letters ordered I < X < Y < Z, so
for two qubits the order is II, IX, IY, IZ, XI, ..., ZZ.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from noisyqrc.channels import I2, X, Y, Z, KrausChannel
from noisyqrc.qstate import DensityMatrix, ValidationError

LETTERS = "IXYZ"
SINGLE = {"I": I2, "X": X, "Y": Y, "Z": Z}
MAX_DENSE_QUBITS = 6


def _check_string(s: str, n: int | None = None) -> str:
    s = s.upper()
    if not s or any(ch not in LETTERS for ch in s):
        raise ValidationError(f"invalid Pauli string {s!r}")
    if n is not None and len(s) != n:
        raise ValidationError(f"Pauli string {s!r} has length {len(s)}, expected {n}")
    return s


def pauli_labels(n_qubits: int) -> list[str]:
    return ["".join(t) for t in itertools.product(LETTERS, repeat=n_qubits)]


def local_string(n_qubits: int, qubit: int, letter: str) -> str:
    letters = ["I"] * n_qubits
    letters[qubit] = letter
    return "".join(letters)


def pauli_matrix(s: str) -> np.ndarray:
    """Dense Kronecker product of the letters of ``s`` (qubit 0 leftmost)."""
    s = _check_string(s)
    if len(s) > MAX_DENSE_QUBITS:
        raise ValidationError(
            f"refusing to materialise a {len(s)}-qubit Pauli matrix; use expectation()"
        )
    out = np.ones((1, 1), dtype=np.complex128)
    for ch in s:
        out = np.kron(out, SINGLE[ch])
    return out


def _flip_and_phase(s: str) -> tuple[int, np.ndarray]:
    # P|y> = phase[y] |y ^ flip>
    n = len(s)
    idx = np.arange(2**n)
    flip = 0
    phase = np.ones(2**n, dtype=np.complex128)
    for q, ch in enumerate(s):
        shift = n - 1 - q
        b = (idx >> shift) & 1
        if ch in "XY":
            flip |= 1 << shift
        if ch == "Z":
            phase *= 1 - 2 * b
        elif ch == "Y":
            phase *= np.where(b == 0, 1j, -1j)
    return flip, phase


def expectation(rho: DensityMatrix, s: str) -> float:
    """tr(P rho) by index arithmetic over the entries of rho.

    tr(P rho) = sum_y phase(y) rho[y, y ^ flip], so no operator is built.
    """
    s = _check_string(s, rho.n_qubits)
    flip, phase = _flip_and_phase(s)
    y = np.arange(rho.dim)
    val = np.sum(phase * rho.elements[y, y ^ flip])
    return float(val.real)


@dataclass(frozen=True, eq=False)
class PauliCoefficients:
    """Real coefficients a_i = tr(P_i rho) / 2^n in canonical order."""

    n_qubits: int
    coeffs: np.ndarray

    @property
    def labels(self) -> list[str]:
        return pauli_labels(self.n_qubits)

    def __getitem__(self, label: str) -> float:
        label = _check_string(label, self.n_qubits)
        return float(self.coeffs[pauli_index(label)])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.coeffs.tolist()))

    def reconstruct(self) -> np.ndarray:
        return sum(a * pauli_matrix(s) for s, a in zip(self.labels, self.coeffs))


def pauli_index(label: str) -> int:
    idx = 0
    for ch in label:
        idx = 4 * idx + LETTERS.index(ch)
    return idx


def decompose(rho: DensityMatrix) -> PauliCoefficients:
    n = rho.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise ValidationError(f"decompose scans 4^n strings; refusing n={n} > {MAX_DENSE_QUBITS}")
    coeffs = np.array([expectation(rho, s) for s in pauli_labels(n)]) / 2**n
    coeffs.flags.writeable = False
    return PauliCoefficients(n, coeffs)


@dataclass(frozen=True)
class PauliTransferRow:
    """Image of one single-qubit Pauli under a channel, as Pauli terms."""

    input: str
    output_terms: tuple[tuple[str, float], ...]

    def as_dict(self) -> dict[str, float]:
        return dict(self.output_terms)


def pauli_transfer_matrix(ch: KrausChannel) -> np.ndarray:
    """R[i, j] = tr(P_i ch(P_j)) / 2 over I, X, Y, Z."""
    r = np.empty((4, 4))
    for j, pj in enumerate(LETTERS):
        image = ch.apply_matrix(SINGLE[pj])
        for i, pi in enumerate(LETTERS):
            r[i, j] = np.real(np.trace(SINGLE[pi] @ image)) / 2
    return r


def channel_on_pauli(ch: KrausChannel, letter: str, tol: float = 1e-14) -> PauliTransferRow:
    letter = _check_string(letter, 1)
    column = pauli_transfer_matrix(ch)[:, LETTERS.index(letter)]
    terms = tuple((LETTERS[i], float(c)) for i, c in enumerate(column) if abs(c) > tol)
    return PauliTransferRow(letter, terms)


def write_coefficients_csv(path, columns: dict[str, PauliCoefficients]) -> None:
    """CSV with a ``string_label`` column followed by one column per entry."""
    columns = dict(columns)
    ns = {c.n_qubits for c in columns.values()}
    if len(ns) != 1:
        raise ValidationError("all coefficient columns must share n_qubits")
    labels = pauli_labels(ns.pop())
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["string_label", *columns])
        for i, label in enumerate(labels):
            w.writerow([label, *(repr(float(c.coeffs[i])) for c in columns.values())])
