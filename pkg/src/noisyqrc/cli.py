"""Command-line harness: ``noisyqrc {mse-grid,fidelity-table,toy-pauli,gen-task}``.

Failures exit with status 1 and a one-line JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from noisyqrc import bench
from noisyqrc.bench import ALL_KINDS, ExperimentConfig
from noisyqrc.channels import NoiseKind
from noisyqrc.tasks import generate_tfim_task, save_dataset


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str) -> tuple:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            # lo:hi:step, inclusive of hi
            lo, hi, step = (int(x) for x in part.split(":"))
            out.extend(range(lo, hi + 1, step))
        elif part:
            out.append(int(part))
    return tuple(out)


def _synthetic(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected n,h_lo,h_hi,steps")
    return (int(parts[0]), float(parts[1]), float(parts[2]), int(parts[3]))


def _noise(text: str) -> tuple:
    if text == "all":
        return ALL_KINDS
    return tuple(NoiseKind.parse(t) for t in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--dataset", type=Path, help="JSON dataset file")
    src.add_argument("--synthetic", type=_synthetic, metavar="n,h_lo,h_hi,steps",
                     help="synthetic TFIM task (default 8,0.2,2.0,37)")
    common.add_argument("--test-interval", type=_floats, metavar="lo,hi")
    common.add_argument("--noise", type=_noise, default=ALL_KINDS,
                        help="amp, phase, depol, a comma list, or all")
    common.add_argument("--p", type=_floats, metavar="LIST")
    common.add_argument("--gates", type=_ints, metavar="LIST", help="e.g. 25:215:10,300")
    common.add_argument("--seeds", type=int)
    common.add_argument("--alpha", type=float)
    common.add_argument("--base-seed", type=int, default=0)
    common.add_argument("--out", type=Path, default=Path("results"))
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--fast", action="store_true", help="20 seeds, gates <= 215")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="noisyqrc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("mse-grid", parents=[common], help="MSE vs gate count grid")
    sub.add_parser("fidelity-table", parents=[common], help="averaged fidelities and optimal gate counts")
    toy = sub.add_parser("toy-pauli", parents=[common], help="2-qubit Pauli coefficient toy model")
    toy.add_argument("--ensemble", type=int, default=4000, help="circuits in the raw 16-D export")
    toy.add_argument("--toy-gates", type=int, default=10)
    toy.add_argument("--toy-p", type=float, default=0.2)
    gen = sub.add_parser("gen-task", parents=[common], help="write a synthetic TFIM dataset")
    gen.add_argument("--output", type=Path, help="dataset file (default OUT/task.json)")
    return parser


def config_from_args(args) -> ExperimentConfig:
    kw = {
        "noise_kinds": args.noise,
        "base_seed": args.base_seed,
        "output_dir": str(args.out),
        "workers": args.workers,
    }
    if args.dataset is not None:
        kw["dataset_path"] = str(args.dataset)
    if args.synthetic is not None:
        kw["synthetic"] = args.synthetic
    if args.test_interval is not None:
        kw["test_interval"] = args.test_interval
    if args.p is not None:
        kw["p_values"] = args.p
    if args.gates is not None:
        kw["gate_counts"] = args.gates
    if args.seeds is not None:
        kw["n_seeds"] = args.seeds
    if args.alpha is not None:
        kw["alpha"] = args.alpha
    if args.command == "toy-pauli":
        kw.update(ensemble=args.ensemble, toy_gates=args.toy_gates, toy_p=args.toy_p)
        if args.synthetic is not None:
            kw["toy_qubits"] = args.synthetic[0]
    cfg = ExperimentConfig(**kw)
    return cfg.fast() if args.fast else cfg


def _cmd_mse_grid(cfg: ExperimentConfig) -> list[Path]:
    grid = bench.run_mse_grid(cfg)
    out = Path(cfg.output_dir)
    paths = [bench.write_rows_csv(out / "mse_grid.csv", grid.rows, bench.GRID_COLUMNS)]
    paths.append(bench.write_provenance(out, cfg, "mse-grid"))
    return paths


def _cmd_fidelity_table(cfg: ExperimentConfig) -> list[Path]:
    grid = bench.run_mse_grid(cfg)
    table = bench.run_fidelity_table(cfg, grid)
    out = Path(cfg.output_dir)
    return [
        bench.write_rows_csv(out / "mse_grid.csv", grid.rows, bench.GRID_COLUMNS),
        bench.write_rows_csv(
            out / "fidelity_table.csv",
            table.rows,
            ["noise_kind", "p", "mean_fidelity", "se_fidelity", "n_circuits"],
            comment=f"fidelity <psi|rho|psi> averaged over all seeds and samples of circuits with < {bench.FIDELITY_GATE_LIMIT} gates",
        ),
        bench.write_rows_csv(
            out / "optimal_gates.csv",
            table.optimal,
            ["noise_kind", "p", "optimal_gates", "mean_fidelity"],
            comment="largest gate count with noisy mean MSE <= noiseless mean MSE; fidelity averaged over seeds and all samples at that gate count",
        ),
        bench.write_provenance(out, cfg, "fidelity-table"),
    ]


def _cmd_toy_pauli(cfg: ExperimentConfig) -> list[Path]:
    bench.run_toy_pauli(cfg)
    out = Path(cfg.output_dir)
    paths = [out / "toy_pauli.csv"]
    if cfg.ensemble > 0:
        paths.append(out / "toy_ensemble.csv")
    paths.append(bench.write_provenance(out, cfg, "toy-pauli"))
    return paths


def gen_task(cfg: ExperimentConfig, output: Path) -> Path:
    n, h_lo, h_hi, steps = cfg.synthetic
    ds = generate_tfim_task(int(n), np.round(np.linspace(h_lo, h_hi, int(steps)), 10))
    return save_dataset(ds, output)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        if args.command == "mse-grid":
            paths = _cmd_mse_grid(cfg)
        elif args.command == "fidelity-table":
            paths = _cmd_fidelity_table(cfg)
        elif args.command == "toy-pauli":
            paths = _cmd_toy_pauli(cfg)
        else:
            paths = [gen_task(cfg, args.output or Path(cfg.output_dir) / "task.json")]
    except Exception as exc:  # noqa: BLE001 - report every failure as a record
        record = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        print(json.dumps(record), file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
