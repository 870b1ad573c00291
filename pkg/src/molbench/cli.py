"""Command-line entry points.

Subcommands: ``fingerprint`` (SMILES file to feature matrix), ``split``
(dataset to index lists), ``evaluate`` (config to score table), ``compare``
(score table to pairwise decisions and ranking), ``report`` (score table to
aggregate tables). Exit codes: 0 success, 2 config error, 3 data error,
4 sampling diagnostics failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bbt import BBTConfig
from .errors import ConfigError, ConvergenceError, DataError
from .fingerprints import FingerprintConfig, compute_fingerprint
from .harness import ScoreTable, scaffold_split, write_embeddings, write_matrix_csv
from .molgraph import SmilesParseError, parse_smiles
from .pipeline import (
    load_config,
    run_evaluation,
    write_comparison_outputs,
    write_report_outputs,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_DIAGNOSTICS = 4

logger = logging.getLogger(__name__)


def _read_smiles(path: Path, smiles_column: str | None) -> list[str]:
    """SMILES from a CSV column, or one per line when no column is given."""
    if smiles_column is None:
        lines = path.read_text(encoding="utf-8").splitlines()
        return [line.strip() for line in lines if line.strip()]
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or smiles_column not in header:
            raise DataError(f"{path}: missing column {smiles_column!r}")
        idx = header.index(smiles_column)
        return [row[idx].strip() for row in reader if row and row[idx].strip()]


def _cmd_fingerprint(args) -> int:
    try:
        cfg = FingerprintConfig(
            kind=args.kind,
            radius=args.radius,
            length=args.length,
            counted=not args.binary,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    smiles = _read_smiles(Path(args.input), args.smiles_column)
    if not smiles:
        raise DataError(f"{args.input}: no SMILES found")
    rows = []
    for i, text in enumerate(smiles):
        try:
            rows.append(compute_fingerprint(parse_smiles(text), cfg))
        except (SmilesParseError, ValueError) as exc:
            raise DataError(f"{args.input} entry {i}: {exc}") from None
    matrix = np.stack(rows)
    output = Path(args.output)
    if output.suffix == ".emb":
        write_embeddings(output, matrix)
    else:
        write_matrix_csv(output, matrix)
    print(f"wrote {matrix.shape[0]} x {matrix.shape[1]} fingerprints to {output}")
    return EXIT_OK


def _cmd_split(args) -> int:
    smiles = _read_smiles(Path(args.input), args.smiles_column)
    molecules = []
    kept_rows = []
    dropped = []
    for i, text in enumerate(smiles):
        try:
            molecules.append(parse_smiles(text))
            kept_rows.append(i)
        except (SmilesParseError, ValueError):
            dropped.append(i)
    if not molecules:
        raise DataError(f"{args.input}: no parseable SMILES")
    split = scaffold_split(molecules, args.frac_train, args.seed)
    payload = {
        "frac_train": args.frac_train,
        "train": [kept_rows[i] for i in split.train_idx],
        "test": [kept_rows[i] for i in split.test_idx],
        "dropped_rows": dropped,
    }
    Path(args.output).write_text(json.dumps(payload, sort_keys=True) + "\n")
    print(
        f"split {len(molecules)} molecules: {len(split.train_idx)} train, "
        f"{len(split.test_idx)} test ({len(dropped)} dropped)"
    )
    return EXIT_OK


def _load_config_with_overrides(args):
    config = load_config(args.config)
    document = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if getattr(args, "seed", None) is not None:
        config = dataclasses.replace(
            config,
            split_seed=args.seed,
            classifier_seed=args.seed,
            bbt=dataclasses.replace(config.bbt, seed=args.seed),
        )
        document.setdefault("split", {})["seed"] = args.seed
        document["classifier_seed"] = args.seed
        document.setdefault("bbt", {})["seed"] = args.seed
    return config, document


def _cmd_evaluate(args) -> int:
    config, document = _load_config_with_overrides(args)
    table = run_evaluation(
        config,
        args.output_dir,
        config_document=document,
        jobs=args.jobs,
        resume=args.resume,
    )
    print(
        f"scored {len(table.models())} representations on "
        f"{len(table.datasets())} datasets -> {Path(args.output_dir) / 'scores.csv'}"
    )
    return EXIT_OK


def _cmd_compare(args) -> int:
    scores = ScoreTable.from_csv(args.scores)
    if args.config:
        config, _ = _load_config_with_overrides(args)
        bbt_cfg = config.bbt
    else:
        bbt_cfg = BBTConfig(seed=args.seed if args.seed is not None else 0)
    write_comparison_outputs(scores, bbt_cfg, args.output_dir)
    print(f"wrote pairwise_summary.csv and ranking.json to {args.output_dir}")
    return EXIT_OK


def _cmd_report(args) -> int:
    scores = ScoreTable.from_csv(args.scores)
    if args.config:
        config, _ = _load_config_with_overrides(args)
        baseline = config.baseline
        near_win = config.near_win_epsilon
    else:
        baseline = args.baseline
        near_win = args.near_win_epsilon
    if baseline is None:
        raise ConfigError("report needs --config or --baseline")
    write_report_outputs(
        scores, args.output_dir, baseline=baseline, near_win_epsilon=near_win
    )
    print(f"wrote report tables to {args.output_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="molbench",
        description="Benchmark molecular representations with Bayesian ranking",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fingerprint", help="SMILES file -> fingerprint matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--smiles-column", default=None, help="CSV column; omit for plain lines")
    p.add_argument("--kind", default="ecfp", choices=("ecfp", "atom_pair", "topological_torsion"))
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--length", type=int, default=2048)
    p.add_argument("--binary", action="store_true", help="presence bits instead of counts")
    p.add_argument("--output", required=True, help=".csv or packed .emb")
    p.set_defaults(func=_cmd_fingerprint)

    p = sub.add_parser("split", help="dataset -> scaffold-grouped index lists")
    p.add_argument("--input", required=True)
    p.add_argument("--smiles-column", default=None)
    p.add_argument("--frac-train", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="JSON index lists")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("evaluate", help="config -> score table")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--seed", type=int, default=None, help="override all config seeds")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--resume", action="store_true", help="reuse cached cells")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("compare", help="score table -> pairwise decisions + ranking")
    p.add_argument("--scores", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("report", help="score table -> aggregate report tables")
    p.add_argument("--scores", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--baseline", default=None)
    p.add_argument("--near-win-epsilon", type=float, default=0.01)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, SmilesParseError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConvergenceError as exc:
        print(f"diagnostics failure: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS


if __name__ == "__main__":
    sys.exit(main())
