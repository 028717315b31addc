import json
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from noisyqrc.channels import make_channel
from noisyqrc.circuits import (
    Circuit,
    Gate,
    GateKind,
    gate_matrix,
    run_noiseless,
    run_noisy,
    sample_circuit,
)
from noisyqrc.qstate import (
    DensityMatrix,
    StateVector,
    ValidationError,
    fidelity_pure_mixed,
    pure_to_density,
    purity,
)
from oracles import dense_cnot, dense_kraus, embed, random_density, random_state

KINDS = ["amp", "phase", "depol"]


def dense_unitary(g, n):
    if g.kind is GateKind.CNOT:
        return dense_cnot(*g.qubits, n)
    return embed(gate_matrix(g), g.qubits[0], n)


def dense_run(c, rho, kind, p):
    ch = make_channel(kind, p) if kind else None
    for g in c.gates:
        u = dense_unitary(g, c.n_qubits)
        rho = u @ rho @ u.conj().T
        if ch is not None:
            for q in g.qubits:
                rho = dense_kraus(rho, ch.kraus_ops, q, c.n_qubits)
    return rho


def test_gate_matrices():
    np.testing.assert_allclose(gate_matrix(Gate("T", (0,))), np.diag([1, np.exp(1j * np.pi / 4)]))
    np.testing.assert_allclose(gate_matrix(Gate("H", (0,))), np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    for kind, qs in [("H", (0,)), ("T", (0,)), ("CNOT", (0, 1))]:
        u = gate_matrix(Gate(kind, qs))
        assert np.max(np.abs(u.conj().T @ u - np.eye(len(u)))) < 1e-12


def test_cnot_action():
    c = Circuit(2, (Gate("CNOT", (0, 1)),))
    out = run_noiseless(c, StateVector.basis(2, 0b10))
    np.testing.assert_allclose(out.amplitudes, [0, 0, 0, 1])
    reverse = Circuit(2, (Gate("CNOT", (1, 0)),))
    np.testing.assert_allclose(run_noiseless(reverse, StateVector.basis(2, 0b10)).amplitudes, [0, 0, 1, 0])


def test_gate_validation():
    with pytest.raises(ValidationError):
        Gate("CNOT", (1, 1))
    with pytest.raises(ValidationError):
        Gate("H", (0, 1))
    with pytest.raises(ValidationError):
        Circuit(2, (Gate("H", (2,)),))


def test_sample_circuit_basics():
    assert len(sample_circuit(3, 0, 1)) == 0
    assert sample_circuit(5, 40, 123) == sample_circuit(5, 40, 123)
    assert sample_circuit(5, 40, 123) != sample_circuit(5, 40, 124)
    with pytest.raises(ValidationError):
        sample_circuit(1, 5, 0)


def test_gate_kind_frequencies():
    gates = [g for s in range(100) for g in sample_circuit(4, 100, s).gates]
    counts = Counter(g.kind for g in gates)
    for kind in GateKind:
        assert 0.323 <= counts[kind] / len(gates) <= 0.343


def test_cnot_pairs_cover_all_ordered_pairs():
    pairs = Counter(g.qubits for s in range(50) for g in sample_circuit(3, 100, s).gates if g.kind is GateKind.CNOT)
    assert set(pairs) == {(a, b) for a in range(3) for b in range(3) if a != b}
    freqs = np.array(list(pairs.values())) / sum(pairs.values())
    assert np.all(np.abs(freqs - 1 / 6) < 0.02)


def test_json_round_trip():
    c = sample_circuit(4, 25, 99)
    text = c.to_json()
    assert set(json.loads(text)) == {"n_qubits", "seed", "gates"}
    assert Circuit.from_json(text) == c


def test_run_noiseless_examples():
    psi0 = StateVector(random_state(np.random.default_rng(0), 3))
    np.testing.assert_array_equal(run_noiseless(Circuit(3, ()), psi0).amplitudes, psi0.amplitudes)
    plus = run_noiseless(Circuit(1, (Gate("H", (0,)),)), StateVector.basis(1))
    np.testing.assert_allclose(plus.amplitudes, np.array([1, 1]) / np.sqrt(2))
    bell = run_noiseless(Circuit(2, (Gate("H", (0,)), Gate("CNOT", (0, 1)))), StateVector.basis(2))
    np.testing.assert_allclose(bell.amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-15)


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 4))
def test_run_noiseless_matches_dense(seed, n):
    rng = np.random.default_rng(seed)
    c = sample_circuit(n, 30, seed)
    psi = random_state(rng, n)
    ref = psi
    for g in c.gates:
        ref = dense_unitary(g, n) @ ref
    np.testing.assert_allclose(run_noiseless(c, StateVector(psi)).amplitudes, ref, atol=1e-12)


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 4), kind=st.sampled_from(KINDS), p=st.floats(0, 0.5))
def test_run_noisy_matches_dense(seed, n, kind, p):
    rng = np.random.default_rng(seed)
    c = sample_circuit(n, 20, seed)
    rho = random_density(rng, n)
    out = run_noisy(c, DensityMatrix(rho), kind, p)
    assert np.max(np.abs(out.elements - dense_run(c, rho, kind, p))) < 1e-12
    assert out.is_valid()


def test_noiseless_limit_of_noisy():
    psi = StateVector(random_state(np.random.default_rng(3), 5))
    c = sample_circuit(5, 80, 3)
    for kind in KINDS + [None]:
        out = run_noisy(c, pure_to_density(psi), kind, 0.0)
        ref = pure_to_density(run_noiseless(c, psi)).elements
        assert np.max(np.abs(out.elements - ref)) < 1e-10


def test_one_gate_amplitude_damping():
    c = Circuit(1, (Gate("H", (0,)),))
    out = run_noisy(c, pure_to_density(StateVector.basis(1)), "amp", 0.2)
    s = np.sqrt(0.8) / 2
    np.testing.assert_allclose(out.elements, [[0.6, s], [s, 0.4]], atol=1e-15)


def test_cnot_noise_placement_options():
    c = Circuit(2, (Gate("CNOT", (0, 1)),))
    rho = pure_to_density(StateVector.basis(2, 0b11))
    both = run_noisy(c, rho, "amp", 0.5).elements
    target = run_noisy(c, rho, "amp", 0.5, noise_on="target").elements
    # CNOT maps |11> to |10>; only the control still has population to decay
    np.testing.assert_allclose(np.diag(both).real, [0.5, 0, 0.5, 0])
    np.testing.assert_allclose(np.diag(target).real, [0, 0, 1, 0])
    with pytest.raises(ValidationError):
        run_noisy(c, rho, "amp", 0.5, noise_on="every")


@pytest.mark.parametrize("kind", ["phase", "depol"])
def test_unital_purity_non_increasing(kind, rng):
    rho0 = DensityMatrix(random_density(rng, 3, rank=2))
    for s in range(5):
        out = run_noisy(sample_circuit(3, 40, s), rho0, kind, 0.05)
        assert purity(out) <= purity(rho0) + 1e-10


@pytest.mark.parametrize("kind", ["phase", "depol"])
def test_unital_fixed_point(kind):
    rho = DensityMatrix.maximally_mixed(5)
    out = run_noisy(sample_circuit(5, 120, 8), rho, kind, 0.1)
    assert np.max(np.abs(out.elements - rho.elements)) < 1e-10


@pytest.mark.parametrize("kind", KINDS)
def test_trace_after_longest_grid_circuit(kind):
    psi = StateVector(random_state(np.random.default_rng(1), 8))
    out = run_noisy(sample_circuit(8, 900, 5), pure_to_density(psi), kind, 0.003)
    assert abs(np.trace(out.elements) - 1) < 1e-10


@pytest.mark.parametrize("kind", KINDS)
def test_fidelity_decreases_with_gate_count_on_average(kind):
    psi = StateVector(random_state(np.random.default_rng(2), 4))
    rho0 = pure_to_density(psi)
    means = []
    for gates in (10, 40, 80, 160):
        fids = []
        for s in range(30):
            c = sample_circuit(4, gates, 1000 * gates + s)
            fids.append(fidelity_pure_mixed(run_noiseless(c, psi), run_noisy(c, rho0, kind, 0.01)))
        means.append(np.mean(fids))
    assert all(a >= b for a, b in zip(means, means[1:])), means


def test_determinism_bit_identical():
    rho = pure_to_density(StateVector(random_state(np.random.default_rng(4), 6)))
    c = sample_circuit(6, 100, 4)
    a = run_noisy(c, rho, "amp", 0.01).elements
    b = run_noisy(c, rho, "amp", 0.01).elements
    assert a.tobytes() == b.tobytes()


def test_width_mismatch():
    with pytest.raises(ValidationError):
        run_noiseless(sample_circuit(3, 5, 0), StateVector.basis(2))
    with pytest.raises(ValidationError):
        run_noisy(sample_circuit(3, 5, 0), DensityMatrix.maximally_mixed(2), "amp", 0.1)
