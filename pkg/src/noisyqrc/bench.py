"""Experiment runners: MSE-vs-gates grid, fidelity tables, 2-qubit toy model."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

import noisyqrc
from noisyqrc.channels import P_MAX, NoiseKind, make_channel
from noisyqrc.circuits import evolve_density, evolve_vector, sample_circuit
from noisyqrc.pauli import PauliCoefficients, decompose, pauli_labels, write_coefficients_csv
from noisyqrc.qstate import DensityMatrix, StateVector, pure_to_density
from noisyqrc.reservoir import DEFAULT_ALPHA, reservoir_outputs, score_features
from noisyqrc.tasks import (
    LIH_TEST_INTERVAL,
    TaskDataset,
    generate_tfim_task,
    load_dataset,
    split_central,
    split_contiguous,
)

log = logging.getLogger(__name__)

DEFAULT_P_VALUES = (0.0001, 0.0005, 0.001, 0.003)
DEFAULT_GATE_COUNTS = tuple(range(25, 216, 10)) + (300, 500, 700, 900)
ALL_KINDS = (NoiseKind.AMPLITUDE_DAMPING, NoiseKind.DEPOLARIZING, NoiseKind.PHASE_DAMPING)
BASELINE = "none"
FIDELITY_GATE_LIMIT = 200

GRID_COLUMNS = ("noise_kind", "p", "gates", "mean_mse", "std_mse", "mean_fidelity")
TOY_COLUMNS = {
    "noiseless": None,
    "amp_damp": NoiseKind.AMPLITUDE_DAMPING,
    "depol": NoiseKind.DEPOLARIZING,
    "phase_damp": NoiseKind.PHASE_DAMPING,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    dataset_path: Optional[str] = None
    # (n_qubits, h_lo, h_hi, steps) used when no dataset file is given
    synthetic: tuple = (8, 0.2, 2.0, 37)
    test_interval: Optional[tuple] = None
    test_fraction: float = 0.3
    noise_kinds: tuple = ALL_KINDS
    p_values: tuple = DEFAULT_P_VALUES
    gate_counts: tuple = DEFAULT_GATE_COUNTS
    n_seeds: int = 100
    alpha: float = DEFAULT_ALPHA
    base_seed: int = 0
    output_dir: str = "results"
    workers: int = 1
    fit_intercept: bool = True
    toy_qubits: int = 2
    toy_gates: int = 10
    toy_p: float = 0.2
    toy_seed: int = 0
    ensemble: int = 4000

    def __post_init__(self) -> None:
        object.__setattr__(self, "noise_kinds", tuple(NoiseKind.parse(k) for k in self.noise_kinds))
        object.__setattr__(self, "p_values", tuple(float(p) for p in self.p_values))
        object.__setattr__(self, "gate_counts", tuple(int(g) for g in self.gate_counts))
        self.validate()

    def validate(self) -> None:
        if not self.noise_kinds:
            raise ConfigError("no noise kinds selected")
        for kind in self.noise_kinds:
            for p in self.p_values:
                if not 0 <= p <= P_MAX[kind]:
                    raise ConfigError(f"p={p} invalid for {kind.value} (range [0, {P_MAX[kind]}])")
        if not self.gate_counts or min(self.gate_counts) <= 0:
            raise ConfigError("gate_counts must be positive")
        if self.n_seeds < 1:
            raise ConfigError("n_seeds must be at least 1")
        if self.alpha < 0:
            raise ConfigError("alpha must be non-negative")

    def fast(self) -> ExperimentConfig:
        """CI profile: 20 seeds, gate counts up to 215."""
        return replace(
            self,
            n_seeds=min(self.n_seeds, 20),
            gate_counts=tuple(g for g in self.gate_counts if g <= 215) or self.gate_counts,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["noise_kinds"] = [k.value for k in self.noise_kinds]
        return d


def build_dataset(cfg: ExperimentConfig) -> TaskDataset:
    """Load or synthesise the task and apply the train/test split."""
    if cfg.dataset_path is not None:
        ds = load_dataset(cfg.dataset_path)
        lo, hi = cfg.test_interval or LIH_TEST_INTERVAL
        return split_contiguous(ds, lo, hi)
    n, h_lo, h_hi, steps = cfg.synthetic
    ds = generate_tfim_task(int(n), np.round(np.linspace(h_lo, h_hi, int(steps)), 10))
    if cfg.test_interval is not None:
        return split_contiguous(ds, *cfg.test_interval)
    return split_central(ds, cfg.test_fraction)


def circuit_seed(base_seed: int, gates: int, trial: int) -> int:
    """64-bit seed of the ``trial``-th circuit with ``gates`` gates.

    Independent of noise kind and p, so every noise setting (and the
    noiseless baseline) is evaluated on the same circuit ensemble.
    """
    digest = hashlib.sha256(f"noisyqrc:{base_seed}:{gates}:{trial}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass
class GridReport:
    rows: list
    # (kind, p, gates) -> arrays of per-trial mse and fidelity, trial order
    trials: dict = field(repr=False)

    def row(self, kind: str, p: float, gates: int) -> dict:
        for r in self.rows:
            if r["noise_kind"] == kind and r["p"] == p and r["gates"] == gates:
                return r
        raise KeyError((kind, p, gates))


_WORKER_STATE: dict = {}


def _init_worker(dataset, cfg) -> None:
    _WORKER_STATE["dataset"] = dataset
    _WORKER_STATE["cfg"] = cfg


def _circuit_job(job):
    gates, trial = job
    ds: TaskDataset = _WORKER_STATE["dataset"]
    cfg: ExperimentConfig = _WORKER_STATE["cfg"]
    circuit = sample_circuit(ds.n_qubits, gates, circuit_seed(cfg.base_seed, gates, trial))
    states = ds.states()
    targets = ds.targets()
    noiseless = evolve_vector(circuit, states)
    settings = [(BASELINE, 0.0)] + [(k.value, p) for k in cfg.noise_kinds for p in cfg.p_values]
    out = []
    for kind, p in settings:
        feats, fids = reservoir_outputs(
            states, circuit, None if kind == BASELINE else kind, p, noiseless=noiseless
        )
        test_mse, _ = score_features(feats, targets, ds.test_mask, cfg.alpha, cfg.fit_intercept)
        out.append((kind, p, gates, trial, test_mse, float(np.mean(fids))))
    return out


def _run_jobs(dataset, cfg, jobs):
    if cfg.workers <= 1:
        _init_worker(dataset, cfg)
        try:
            return [_circuit_job(j) for j in jobs]
        finally:
            _WORKER_STATE.clear()
    with ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(dataset, cfg)) as ex:
        return list(ex.map(_circuit_job, jobs, chunksize=1))


def run_mse_grid(cfg: ExperimentConfig, dataset: Optional[TaskDataset] = None) -> GridReport:
    """Average test MSE and fidelity over ``n_seeds`` circuits per grid cell.

    One row per (noise kind, p, gates) plus a noiseless row per gate count.
    """
    dataset = dataset if dataset is not None else build_dataset(cfg)
    if dataset.n_qubits < 2:
        raise ConfigError(f"G3 reservoirs need at least 2 qubits; dataset has {dataset.n_qubits}")
    if not any(dataset.test_mask) or all(dataset.test_mask):
        raise ConfigError("dataset split must leave both train and test samples")
    jobs = [(g, t) for g in sorted(cfg.gate_counts) for t in range(cfg.n_seeds)]
    log.info("mse grid: %d circuits x %d samples", len(jobs), len(dataset))
    collected: dict = {}
    for result in _run_jobs(dataset, cfg, jobs):
        for kind, p, gates, trial, m, f in result:
            collected.setdefault((kind, p, gates), {})[trial] = (m, f)

    kinds_order = [BASELINE] + [k.value for k in cfg.noise_kinds]
    rows, trials = [], {}
    for key in sorted(collected, key=lambda k: (kinds_order.index(k[0]), k[1], k[2])):
        per_trial = collected[key]
        arr = np.array([per_trial[t] for t in sorted(per_trial)])
        trials[key] = {"mse": arr[:, 0], "fidelity": arr[:, 1]}
        kind, p, gates = key
        rows.append(
            {
                "noise_kind": kind,
                "p": p,
                "gates": gates,
                "mean_mse": float(np.mean(arr[:, 0])),
                "std_mse": float(np.std(arr[:, 0], ddof=1)) if len(arr) > 1 else 0.0,
                "mean_fidelity": float(np.mean(arr[:, 1])),
            }
        )
    return GridReport(rows, trials)


@dataclass
class FidelityTable:
    rows: list
    optimal: list


def run_fidelity_table(cfg: ExperimentConfig, grid: Optional[GridReport] = None, dataset=None) -> FidelityTable:
    """Fidelity averaged over circuits with fewer than 200 gates, per (kind, p),
    and the per-p optimal gate count.

    The optimal gate count is the largest grid gate count whose noisy mean
    MSE does not exceed the noiseless mean MSE; its fidelity is averaged over
    seeds and all dataset samples at that gate count.
    """
    if not any(g < FIDELITY_GATE_LIMIT for g in cfg.gate_counts):
        raise ConfigError(f"fidelity table needs gate counts below {FIDELITY_GATE_LIMIT}")
    grid = grid if grid is not None else run_mse_grid(cfg, dataset)
    gates_below = sorted(g for g in cfg.gate_counts if g < FIDELITY_GATE_LIMIT)
    rows, optimal = [], []
    for kind in cfg.noise_kinds:
        for p in cfg.p_values:
            fids = np.concatenate([grid.trials[(kind.value, p, g)]["fidelity"] for g in gates_below])
            se = float(np.std(fids, ddof=1) / np.sqrt(fids.size)) if fids.size > 1 else 0.0
            rows.append(
                {
                    "noise_kind": kind.value,
                    "p": p,
                    "mean_fidelity": float(np.mean(fids)),
                    "se_fidelity": se,
                    "n_circuits": int(fids.size),
                }
            )
            best = None
            for g in sorted(cfg.gate_counts):
                noisy = grid.row(kind.value, p, g)
                if noisy["mean_mse"] <= grid.row(BASELINE, 0.0, g)["mean_mse"]:
                    best = noisy
            optimal.append(
                {
                    "noise_kind": kind.value,
                    "p": p,
                    "optimal_gates": "" if best is None else best["gates"],
                    "mean_fidelity": "" if best is None else best["mean_fidelity"],
                }
            )
    return FidelityTable(rows, optimal)


def _fmt(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def write_rows_csv(path, rows, columns, comment: Optional[str] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])
    return path


def write_provenance(out_dir, cfg: ExperimentConfig, command: str, extra: Optional[dict] = None) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    record = {
        "command": command,
        "config": cfg.to_dict(),
        "versions": {
            "noisyqrc": noisyqrc.__version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }
    record.update(extra or {})
    path = out / f"{command}.json"
    path.write_text(json.dumps(record, indent=2, sort_keys=True))
    return path


def toy_coefficients(seed: int, n_gates: int = 10, p: float = 0.2, psi0: Optional[StateVector] = None) -> dict:
    """Pauli coefficients of one random 2-qubit reservoir, noiseless and per channel."""
    psi0 = psi0 if psi0 is not None else StateVector.basis(2)
    if psi0.n_qubits != 2:
        raise ConfigError("the toy model is defined on 2 qubits")
    circuit = sample_circuit(2, n_gates, seed)
    rho0 = pure_to_density(psi0).elements
    out: dict[str, PauliCoefficients] = {}
    for col, kind in TOY_COLUMNS.items():
        channel = None if kind is None else make_channel(kind, p)
        out[col] = decompose(DensityMatrix.trusted(evolve_density(circuit, rho0, channel)))
    return out


def run_toy_pauli(cfg: ExperimentConfig) -> dict:
    """Write toy_pauli.csv (single circuit) and toy_ensemble.csv (raw 16-D rows)."""
    if cfg.toy_qubits != 2:
        raise ConfigError(f"toy model needs n_qubits = 2, got {cfg.toy_qubits}")
    out_dir = Path(cfg.output_dir)
    seed = circuit_seed(cfg.base_seed, cfg.toy_gates, cfg.toy_seed)
    coeffs = toy_coefficients(seed, cfg.toy_gates, cfg.toy_p)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_coefficients_csv(out_dir / "toy_pauli.csv", coeffs)
    if cfg.ensemble > 0:
        labels = pauli_labels(2)
        rows = []
        for t in range(cfg.ensemble):
            per = toy_coefficients(circuit_seed(cfg.base_seed, cfg.toy_gates, t), cfg.toy_gates, cfg.toy_p)
            for col, c in per.items():
                rows.append({"circuit": t, "channel": col, **dict(zip(labels, c.coeffs))})
        write_rows_csv(out_dir / "toy_ensemble.csv", rows, ["circuit", "channel", *labels])
    return coeffs
