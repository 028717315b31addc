"""Reservoir readout: local Pauli features, ridge regression, trial runner."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from noisyqrc.channels import NoiseKind, make_channel
from noisyqrc.circuits import Circuit, evolve_density, evolve_vector
from noisyqrc.qstate import DensityMatrix, ValidationError

DEFAULT_ALPHA = 1e-9


class SingularSystemError(np.linalg.LinAlgError):
    pass


def _local_masks(n: int):
    idx = np.arange(2**n)
    for j in range(n):
        bit = 1 << (n - 1 - j)
        yield bit, 1 - 2 * ((idx & bit) != 0)


def extract_features(rho: DensityMatrix) -> np.ndarray:
    """(<X_0>, <Z_0>, ..., <X_{n-1}>, <Z_{n-1}>) of a density matrix."""
    r = rho.elements
    n = rho.n_qubits
    y = np.arange(rho.dim)
    diag = np.real(np.diagonal(r))
    out = np.empty(2 * n)
    for j, (bit, sign) in enumerate(_local_masks(n)):
        out[2 * j] = np.real(np.sum(r[y, y ^ bit]))
        out[2 * j + 1] = diag @ sign
    return out


def features_from_vector(psi: np.ndarray) -> np.ndarray:
    """Same features for a pure state given by its amplitudes."""
    n = psi.shape[0].bit_length() - 1
    y = np.arange(psi.shape[0])
    prob = np.abs(psi) ** 2
    out = np.empty(2 * n)
    for j, (bit, sign) in enumerate(_local_masks(n)):
        out[2 * j] = np.real(np.vdot(psi, psi[y ^ bit]))
        out[2 * j + 1] = prob @ sign
    return out


@dataclass(frozen=True, eq=False)
class RidgeModel:
    weights: np.ndarray
    intercept: float
    alpha: float
    x_scale: Optional[np.ndarray] = None


def ridge_fit(
    X,
    y,
    alpha: float = DEFAULT_ALPHA,
    fit_intercept: bool = True,
    standardize: bool = False,
) -> RidgeModel:
    """Minimise ||y - Xw - b||^2 + alpha ||w||^2 in closed form.

    The intercept is unpenalised: X and y are centred before solving
    (X^T X + alpha I) w = X^T y by Cholesky. If the Cholesky factorisation
    fails for alpha > 0 the equivalent augmented least-squares problem is
    solved instead.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.shape[0]:
        raise ValidationError(f"{X.shape[0]} feature rows but {y.shape[0]} targets")
    if y.shape[0] < 2:
        raise ValidationError("ridge_fit needs at least 2 samples")
    if alpha < 0:
        raise ValidationError("alpha must be non-negative")

    scale = None
    if standardize:
        scale = X.std(axis=0)
        scale[scale == 0] = 1.0
        X = X / scale
    if fit_intercept:
        x_mean, y_mean = X.mean(axis=0), y.mean()
        Xc, yc = X - x_mean, y - y_mean
    else:
        x_mean, y_mean = np.zeros(X.shape[1]), 0.0
        Xc, yc = X, y

    d = X.shape[1]
    if alpha == 0 and np.linalg.matrix_rank(Xc) < d:
        raise SingularSystemError(
            "normal equations are singular with alpha=0; use a positive alpha"
        )
    gram = Xc.T @ Xc + alpha * np.eye(d)
    try:
        w = scipy.linalg.cho_solve(scipy.linalg.cho_factor(gram), Xc.T @ yc)
    except np.linalg.LinAlgError:
        if alpha == 0:
            raise SingularSystemError(
                "normal equations are singular with alpha=0; use a positive alpha"
            ) from None
        aug = np.vstack([Xc, np.sqrt(alpha) * np.eye(d)])
        w = scipy.linalg.lstsq(aug, np.concatenate([yc, np.zeros(d)]))[0]
    b = y_mean - x_mean @ w
    if scale is not None:
        w = w / scale
    return RidgeModel(weights=w, intercept=float(b), alpha=float(alpha), x_scale=scale)


def ridge_predict(m: RidgeModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != m.weights.shape[0]:
        raise ValidationError(
            f"model has {m.weights.shape[0]} features, input has {X.shape[1]}"
        )
    return X @ m.weights + m.intercept


def mse(y_true, y_pred) -> float:
    y_true = np.asarray(y_true, dtype=float).ravel()
    y_pred = np.asarray(y_pred, dtype=float).ravel()
    if y_true.size == 0:
        raise ValidationError("mse of empty arrays")
    if y_true.shape != y_pred.shape:
        raise ValidationError(f"length mismatch {y_true.size} vs {y_pred.size}")
    return float(np.mean((y_true - y_pred) ** 2))


@dataclass(frozen=True)
class TrialResult:
    mse_test: float
    mean_fidelity: float
    mse_train: float


def reservoir_outputs(
    states: np.ndarray,
    circuit: Circuit,
    noise_kind=None,
    p: float = 0.0,
    noiseless: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Features and fidelities for a stack of input states ``(S, 2^n)``.

    ``noiseless`` may carry the precomputed noiseless outputs so sweeps over
    several noise settings evolve each pure state only once.
    """
    if noiseless is None:
        noiseless = evolve_vector(circuit, states)
    if noise_kind is None or p == 0:
        feats = np.array([features_from_vector(v) for v in noiseless])
        return feats, np.ones(len(states))
    channel = make_channel(NoiseKind.parse(noise_kind), p)
    feats = np.empty((len(states), 2 * circuit.n_qubits))
    fids = np.empty(len(states))
    for s, (psi0, psi) in enumerate(zip(states, noiseless)):
        rho = evolve_density(circuit, np.outer(psi0, psi0.conj()), channel)
        out = DensityMatrix.trusted(rho)
        feats[s] = extract_features(out)
        fids[s] = min(max(float(np.real(psi.conj() @ rho @ psi)), 0.0), 1.0)
    return feats, fids


def score_features(feats, targets, test_mask, alpha=DEFAULT_ALPHA, fit_intercept=True):
    test_mask = np.asarray(test_mask, dtype=bool)
    model = ridge_fit(feats[~test_mask], targets[~test_mask], alpha, fit_intercept)
    return (
        mse(targets[test_mask], ridge_predict(model, feats[test_mask])),
        mse(targets[~test_mask], ridge_predict(model, feats[~test_mask])),
    )


def run_qrc_trial(
    dataset,
    circuit: Circuit,
    noise_kind=None,
    p: float = 0.0,
    alpha: float = DEFAULT_ALPHA,
    fit_intercept: bool = True,
) -> TrialResult:
    """Evolve every sample through the noisy reservoir, fit, and score.

    Ridge is fitted on the training split and scored on the test split;
    ``mean_fidelity`` averages <psi|rho|psi> over all samples.
    """
    if dataset.n_qubits != circuit.n_qubits:
        raise ValidationError(
            f"dataset has {dataset.n_qubits} qubits, circuit has {circuit.n_qubits}"
        )
    feats, fids = reservoir_outputs(dataset.states(), circuit, noise_kind, p)
    test_mse, train_mse = score_features(
        feats, dataset.targets(), dataset.test_mask, alpha, fit_intercept
    )
    return TrialResult(test_mse, float(np.mean(fids)), train_mse)
