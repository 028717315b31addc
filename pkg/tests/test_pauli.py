import csv
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from noisyqrc.channels import amplitude_damping, apply_channel, depolarizing, phase_damping
from noisyqrc.pauli import (
    channel_on_pauli,
    decompose,
    expectation,
    pauli_labels,
    pauli_matrix,
    pauli_transfer_matrix,
    write_coefficients_csv,
)
from noisyqrc.qstate import DensityMatrix, StateVector, ValidationError, pure_to_density, purity
from oracles import PAULI, dense_coefficients, dense_kraus, dense_pauli, random_density

seeds = st.integers(0, 2**32 - 1)


def test_pauli_matrix_examples():
    np.testing.assert_array_equal(pauli_matrix("Z"), np.diag([1, -1]))
    np.testing.assert_array_equal(pauli_matrix("XI"), np.kron(PAULI["X"], np.eye(2)))
    np.testing.assert_array_equal(pauli_matrix("II"), np.eye(4))


@pytest.mark.parametrize("label", ["Y", "XZ", "YYI", "ZXYI"])
def test_pauli_matrix_hermitian_involutory(label):
    p = pauli_matrix(label)
    assert np.max(np.abs(p - p.conj().T)) < 1e-12
    assert np.max(np.abs(p @ p - np.eye(len(p)))) < 1e-12


def test_pauli_matrix_guard_and_validation():
    with pytest.raises(ValidationError):
        pauli_matrix("I" * 7)
    with pytest.raises(ValidationError):
        pauli_matrix("XQ")


def test_canonical_order():
    assert pauli_labels(1) == ["I", "X", "Y", "Z"]
    assert pauli_labels(2)[:5] == ["II", "IX", "IY", "IZ", "XI"]
    assert pauli_labels(2)[-1] == "ZZ"


def test_decompose_examples():
    zero = decompose(pure_to_density(StateVector.basis(1)))
    np.testing.assert_allclose(zero.coeffs, [0.5, 0, 0, 0.5], atol=1e-15)
    mixed = decompose(DensityMatrix.maximally_mixed(3))
    assert mixed["III"] == pytest.approx(1 / 8)
    assert np.max(np.abs(mixed.coeffs[1:])) < 1e-15


def test_bell_state_coefficients():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = np.outer(bell, bell)
    labels, oracle = dense_coefficients(rho, 2)
    nonzero = {s: round(a, 12) for s, a in zip(labels, oracle) if abs(a) > 1e-12}
    assert nonzero == {"II": 0.25, "XX": 0.25, "YY": -0.25, "ZZ": 0.25}
    got = decompose(DensityMatrix(rho)).as_dict()
    for s in labels:
        assert got[s] == pytest.approx(nonzero.get(s, 0.0), abs=1e-14)


def test_expectation_examples():
    zeros = pure_to_density(StateVector.basis(3))
    assert expectation(zeros, "ZII") == pytest.approx(1)
    assert expectation(zeros, "XII") == pytest.approx(0)
    damped = apply_channel(DensityMatrix(np.diag([0, 1]).astype(complex)), amplitude_damping(0.2), 0)
    assert expectation(damped, "Z") == pytest.approx(-0.6, abs=1e-12)
    with pytest.raises(ValidationError):
        expectation(zeros, "ZI")


@given(seed=seeds, n=st.integers(1, 4), data=st.data())
def test_expectation_matches_dense_trace(seed, n, data):
    label = data.draw(st.text(alphabet="IXYZ", min_size=n, max_size=n))
    rho = random_density(np.random.default_rng(seed), n)
    ref = np.trace(dense_pauli(label) @ rho)
    assert abs(ref.imag) < 1e-12
    assert abs(expectation(DensityMatrix(rho), label) - ref.real) < 1e-12


@given(seed=seeds, n=st.integers(2, 3))
def test_roundtrip_and_parseval(seed, n):
    rho = random_density(np.random.default_rng(seed), n)
    coeffs = decompose(DensityMatrix(rho))
    assert np.max(np.abs(coeffs.reconstruct() - rho)) < 1e-10
    assert coeffs.coeffs[0] == pytest.approx(2.0**-n, abs=1e-10)
    assert abs(purity(DensityMatrix(rho)) - 2**n * np.sum(coeffs.coeffs**2)) < 1e-8


@pytest.mark.parametrize("p", [0.0, 0.1, 0.37, 0.5])
def test_channel_on_pauli_table(p):
    ad, dp, pd = amplitude_damping(p), depolarizing(p), phase_damping(p)
    s = np.sqrt(1 - p)
    table = {
        (ad, "X"): {"X": s},
        (ad, "Y"): {"Y": s},
        (ad, "Z"): {"Z": 1 - p},
        (ad, "I"): {"I": 1, "Z": p},
        (dp, "X"): {"X": 1 - 4 * p / 3},
        (dp, "Y"): {"Y": 1 - 4 * p / 3},
        (dp, "Z"): {"Z": 1 - 4 * p / 3},
        (dp, "I"): {"I": 1},
        (pd, "X"): {"X": 1 - p},
        (pd, "Y"): {"Y": 1 - p},
        (pd, "Z"): {"Z": 1},
        (pd, "I"): {"I": 1},
    }
    for (ch, letter), expected in table.items():
        got = channel_on_pauli(ch, letter).as_dict()
        expected = {k: v for k, v in expected.items() if v != 0}
        assert set(got) == set(expected), (ch.kind, letter, got)
        for k, v in expected.items():
            assert abs(got[k] - v) < 1e-12


def test_transfer_matrix_unital_rows_are_diagonal():
    for ch in (depolarizing(0.3), phase_damping(0.6)):
        r = pauli_transfer_matrix(ch)
        assert np.max(np.abs(r - np.diag(np.diag(r)))) < 1e-15
        assert np.all((np.diag(r) >= 0) & (np.diag(r) <= 1))
        for letter in "IXYZ":
            row = channel_on_pauli(ch, letter)
            assert len(row.output_terms) == 1 and abs(row.output_terms[0][1]) <= 1


def _instances(draw_rng, n):
    rho = random_density(draw_rng, n)
    j = int(draw_rng.integers(n))
    return rho, j


@given(seed=seeds, n=st.integers(1, 3), p=st.floats(0, 0.75), unital=st.sampled_from([depolarizing, phase_damping]))
def test_unital_channels_only_mitigate(seed, n, p, unital):
    rho, j = _instances(np.random.default_rng(seed), n)
    ch = unital(p)
    _, a = dense_coefficients(rho, n)
    _, b = dense_coefficients(dense_kraus(rho, ch.kraus_ops, j, n), n)
    assert np.all(np.abs(b) <= np.abs(a) + 1e-10)


@given(seed=seeds, n=st.integers(1, 3), p=st.floats(0, 1))
def test_amplitude_damping_injection_theorem(seed, n, p):
    rho, j = _instances(np.random.default_rng(seed), n)
    labels, a = dense_coefficients(rho, n)
    _, b = dense_coefficients(dense_kraus(rho, amplitude_damping(p).kraus_ops, j, n), n)
    index = {s: i for i, s in enumerate(labels)}
    fast = decompose(apply_channel(DensityMatrix(rho), amplitude_damping(p), j)).coeffs
    assert np.max(np.abs(fast - b)) < 1e-12
    for s in labels:
        if s[j] != "Z":
            continue
        k = index[s[:j] + "I" + s[j + 1 :]]
        assert abs(b[index[s]] - ((1 - p) * a[index[s]] + p * a[k])) < 1e-10


def test_injection_exists():
    # |+><+| has no Z component; damping introduces one of size p * a_I
    p = 0.3
    plus = DensityMatrix(np.full((2, 2), 0.5, dtype=complex))
    a = decompose(plus)
    b = decompose(apply_channel(plus, amplitude_damping(p), 0))
    assert abs(a["Z"]) < 1e-15
    assert b["Z"] == pytest.approx(p * a["I"], abs=1e-14)
    assert b["Z"] != 0


def test_coefficient_csv(tmp_path):
    rho = DensityMatrix(random_density(np.random.default_rng(0), 2))
    cols = {"noiseless": decompose(rho), "amp_damp": decompose(apply_channel(rho, amplitude_damping(0.2), 1))}
    path = tmp_path / "coeffs.csv"
    write_coefficients_csv(path, cols)
    with path.open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["string_label", "noiseless", "amp_damp"]
    assert [r[0] for r in rows[1:]] == ["".join(t) for t in itertools.product("IXYZ", repeat=2)]
    assert float(rows[1][1]) == pytest.approx(0.25)
