"""Config-driven benchmark pipeline with per-cell caching.

The configuration is one versioned JSON document naming datasets,
representations (built-in fingerprints or external embedding files), the
split, classifier seed and ranking settings. Every (representation, dataset)
cell is cached under a content hash, so interrupted runs resume and a rerun
from the same config reproduces byte-identical outputs.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .bbt import (
    BBTConfig,
    build_win_table,
    decide,
    pair_summary,
    posterior_predictive_check,
    rank_models,
    sample_posterior,
)
from .errors import ConfigError, DataError
from .fingerprints import FingerprintConfig, compute_fingerprint
from .harness import (
    ScoreRecord,
    ScoreTable,
    load_dataset,
    load_embeddings,
    scaffold_split,
    tune_and_evaluate,
)
from .harness.evaluate import DatasetSkipped, default_specs
from .reports import (
    aggregate_report,
    baseline_comparison,
    win_matrix,
    write_aggregate_csv,
    write_baseline_csv,
    write_near_win_csv,
    write_win_matrix_csv,
)

logger = logging.getLogger(__name__)

CONFIG_VERSION = 1
_GRID_REVISION = 1  # bump to invalidate caches when grids/heads change


@dataclass(frozen=True)
class DatasetEntry:
    name: str
    path: str
    smiles_column: str
    task_columns: tuple[str, ...]


@dataclass(frozen=True)
class RepresentationEntry:
    name: str
    kind: str  # "fingerprint" or "embedding"
    fingerprint: Optional[FingerprintConfig] = None
    embedding_paths: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class BenchmarkConfig:
    datasets: tuple[DatasetEntry, ...]
    representations: tuple[RepresentationEntry, ...]
    frac_train: float = 0.8
    split_seed: int = 0
    classifier_seed: int = 0
    bbt: BBTConfig = field(default_factory=BBTConfig)
    baseline: str = "ECFP-count"
    near_win_epsilon: float = 0.01
    keep_largest_fragment: bool = False

    def representation(self, name: str) -> RepresentationEntry:
        for entry in self.representations:
            if entry.name == name:
                return entry
        raise ConfigError(f"unknown representation {name!r}")


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"{context}: missing required key {key!r}")
    return mapping[key]


def parse_config(document: dict) -> BenchmarkConfig:
    """Validate a configuration dictionary (ConfigError on any defect)."""
    if not isinstance(document, dict):
        raise ConfigError("config must be a JSON object")
    version = document.get("version")
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {version!r}")

    dataset_entries = []
    for idx, raw in enumerate(_require(document, "datasets", "config")):
        context = f"datasets[{idx}]"
        dataset_entries.append(
            DatasetEntry(
                name=str(_require(raw, "name", context)),
                path=str(_require(raw, "path", context)),
                smiles_column=str(_require(raw, "smiles_column", context)),
                task_columns=tuple(
                    str(c) for c in _require(raw, "task_columns", context)
                ),
            )
        )
    if not dataset_entries:
        raise ConfigError("config needs at least one dataset")
    names = [d.name for d in dataset_entries]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate dataset names: {names}")

    rep_entries = []
    for idx, raw in enumerate(_require(document, "representations", "config")):
        context = f"representations[{idx}]"
        name = str(_require(raw, "name", context))
        rep_type = _require(raw, "type", context)
        if rep_type == "fingerprint":
            try:
                cfg = FingerprintConfig(
                    kind=str(_require(raw, "kind", context)),
                    radius=int(raw.get("radius", 2)),
                    length=int(raw.get("length", 2048)),
                    counted=bool(raw.get("counted", True)),
                )
            except ValueError as exc:
                raise ConfigError(f"{context}: {exc}") from None
            rep_entries.append(
                RepresentationEntry(name=name, kind="fingerprint", fingerprint=cfg)
            )
        elif rep_type == "embedding":
            paths = {
                str(k): str(v) for k, v in _require(raw, "paths", context).items()
            }
            missing = [d for d in names if d not in paths]
            if missing:
                raise ConfigError(
                    f"{context}: representation {name!r} lacks embedding paths "
                    f"for datasets {missing}"
                )
            rep_entries.append(
                RepresentationEntry(name=name, kind="embedding", embedding_paths=paths)
            )
        else:
            raise ConfigError(f"{context}: unknown representation type {rep_type!r}")
    if not rep_entries:
        raise ConfigError("config needs at least one representation")
    rep_names = [r.name for r in rep_entries]
    if len(set(rep_names)) != len(rep_names):
        raise ConfigError(f"duplicate representation names: {rep_names}")

    split_raw = document.get("split", {})
    bbt_raw = document.get("bbt", {})
    try:
        bbt_cfg = BBTConfig(
            epsilon_tie=float(bbt_raw.get("epsilon_tie", 0.01)),
            rope=tuple(bbt_raw.get("rope", (0.25, 0.75))),
            equivalence_mass=float(bbt_raw.get("equivalence_mass", 0.95)),
            hdi_mass=float(bbt_raw.get("hdi_mass", 0.89)),
            chains=int(bbt_raw.get("chains", 4)),
            draws_per_chain=int(bbt_raw.get("draws_per_chain", 5_000)),
            warmup=int(bbt_raw.get("warmup", 5_000)),
            seed=int(bbt_raw.get("seed", 0)),
        )
    except ValueError as exc:
        raise ConfigError(f"bbt: {exc}") from None

    baseline = str(document.get("baseline", "ECFP-count"))
    if baseline not in rep_names:
        raise ConfigError(
            f"baseline {baseline!r} is not among representations {rep_names}"
        )
    frac_train = float(split_raw.get("frac_train", 0.8))
    if not 0.0 < frac_train < 1.0:
        raise ConfigError(f"split.frac_train must be in (0, 1), got {frac_train}")

    return BenchmarkConfig(
        datasets=tuple(dataset_entries),
        representations=tuple(rep_entries),
        frac_train=frac_train,
        split_seed=int(split_raw.get("seed", 0)),
        classifier_seed=int(document.get("classifier_seed", 0)),
        bbt=bbt_cfg,
        baseline=baseline,
        near_win_epsilon=float(document.get("near_win_epsilon", 0.01)),
        keep_largest_fragment=bool(document.get("keep_largest_fragment", False)),
    )


def load_config(path: Union[str, Path]) -> BenchmarkConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(document)


def _cell_cache_key(config: BenchmarkConfig, entry: DatasetEntry, rep: RepresentationEntry) -> str:
    digest = hashlib.sha256()
    digest.update(Path(entry.path).read_bytes())
    if rep.kind == "embedding":
        digest.update(Path(rep.embedding_paths[entry.name]).read_bytes())
    descriptor = {
        "grid_revision": _GRID_REVISION,
        "dataset": [entry.name, entry.smiles_column, list(entry.task_columns)],
        "representation": [
            rep.name,
            rep.kind,
            None if rep.fingerprint is None else [
                rep.fingerprint.kind,
                rep.fingerprint.radius,
                rep.fingerprint.length,
                rep.fingerprint.counted,
            ],
        ],
        "split": [config.frac_train, config.split_seed],
        "classifier_seed": config.classifier_seed,
        "keep_largest_fragment": config.keep_largest_fragment,
    }
    digest.update(json.dumps(descriptor, sort_keys=True).encode())
    return digest.hexdigest()[:16]


def _evaluate_cell(config: BenchmarkConfig, dataset_name: str, rep_name: str) -> dict:
    """Compute one (representation, dataset) cell; skips are marked, not fatal."""
    entry = next(d for d in config.datasets if d.name == dataset_name)
    rep = config.representation(rep_name)
    try:
        dataset = load_dataset(
            entry.path,
            entry.smiles_column,
            entry.task_columns,
            name=entry.name,
            keep_largest_fragment=config.keep_largest_fragment,
        )
        if rep.kind == "fingerprint":
            features = np.stack(
                [compute_fingerprint(mol, rep.fingerprint) for mol in dataset.molecules]
            )
        else:
            features = load_embeddings(
                rep.embedding_paths[dataset_name],
                model_name=rep.name,
                expected_rows=dataset.n_molecules,
            ).vectors
        split = scaffold_split(dataset, config.frac_train, config.split_seed)
        records = tune_and_evaluate(
            dataset,
            features,
            split,
            model_name=rep.name,
            specs=default_specs(config.classifier_seed),
        )
    except DatasetSkipped as exc:
        logger.warning("skipping cell: %s", exc)
        return {"skipped": str(exc), "records": []}
    except (DataError, OSError, ValueError) as exc:
        raise DataError(f"[{rep_name} x {dataset_name}] {exc}") from exc
    return {"records": [{"head": r.head, "auroc": r.auroc} for r in records]}


def _cell_worker(args):
    config_document, dataset_name, rep_name = args
    config = parse_config(config_document)
    return dataset_name, rep_name, _evaluate_cell(config, dataset_name, rep_name)


def run_evaluation(
    config: BenchmarkConfig,
    out_dir: Union[str, Path],
    *,
    config_document: Optional[dict] = None,
    jobs: int = 1,
    resume: bool = False,
) -> ScoreTable:
    """Fill the score table cell by cell, caching each completed cell."""
    out_dir = Path(out_dir)
    cache_dir = out_dir / "cache"
    cache_dir.mkdir(parents=True, exist_ok=True)

    cells = [
        (entry, rep) for rep in config.representations for entry in config.datasets
    ]
    pending = []
    results: dict[tuple[str, str], dict] = {}
    for entry, rep in cells:
        try:
            cache_key = _cell_cache_key(config, entry, rep)
        except OSError as exc:
            raise DataError(f"[{rep.name} x {entry.name}] {exc}") from exc
        cache_path = cache_dir / f"{rep.name}__{entry.name}__{cache_key}.json"
        if resume and cache_path.exists():
            results[(entry.name, rep.name)] = json.loads(cache_path.read_text())
        else:
            pending.append((entry, rep, cache_path))

    if pending:
        if jobs > 1 and config_document is not None and len(pending) > 1:
            tasks = [
                (config_document, entry.name, rep.name) for entry, rep, _ in pending
            ]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(pool.map(_cell_worker, tasks))
            for (entry, rep, cache_path), (dname, rname, payload) in zip(
                pending, outcomes
            ):
                results[(dname, rname)] = payload
                cache_path.write_text(json.dumps(payload, sort_keys=True))
        else:
            for entry, rep, cache_path in pending:
                logger.info("evaluating %s x %s", rep.name, entry.name)
                payload = _evaluate_cell(config, entry.name, rep.name)
                results[(entry.name, rep.name)] = payload
                cache_path.write_text(json.dumps(payload, sort_keys=True))

    table = ScoreTable()
    for entry in config.datasets:
        for rep in config.representations:
            for raw in results[(entry.name, rep.name)]["records"]:
                table.add(
                    ScoreRecord(rep.name, entry.name, raw["head"], float(raw["auroc"]))
                )
    table.to_csv(out_dir / "scores.csv")
    return table


def write_comparison_outputs(
    scores: ScoreTable, bbt_config: BBTConfig, out_dir: Union[str, Path]
) -> None:
    """Fit the ranking model and emit the pairwise summary CSV and ranking JSON."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = build_win_table(scores, bbt_config.epsilon_tie)
    posterior = sample_posterior(table, bbt_config)

    with open(out_dir / "pairwise_summary.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["pair", "mean", "hdi_low", "hdi_high", "p_in_rope", "p_above_half", "decision"]
        )
        m = len(table.models)
        for i in range(m):
            for j in range(i + 1, m):
                summary = pair_summary(posterior, i, j, bbt_config)
                writer.writerow(
                    [
                        f"{table.models[i]}>{table.models[j]}",
                        f"{summary.mean:.6f}",
                        f"{summary.hdi_low:.6f}",
                        f"{summary.hdi_high:.6f}",
                        f"{summary.p_in_rope:.6f}",
                        f"{summary.p_above_half:.6f}",
                        decide(summary, bbt_config).value,
                    ]
                )

    ranking = rank_models(posterior, bbt_config)
    ppc = posterior_predictive_check(posterior, table, seed=bbt_config.seed)
    payload = {
        "ranking": list(ranking.order),
        "posterior_mean": ranking.posterior_mean,
        "posterior_sd": ranking.posterior_sd,
        "indistinguishable": ranking.indistinguishable,
        "diagnostics": {
            "r_hat": posterior.r_hat,
            "ess": posterior.ess,
        },
        "ppc_flagged_pairs": [
            [pair[0], pair[1]]
            for pair, flag in zip(ppc.pairs, ppc.flagged)
            if flag
        ],
    }
    (out_dir / "ranking.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )


def write_report_outputs(
    scores: ScoreTable,
    out_dir: Union[str, Path],
    *,
    baseline: str,
    near_win_epsilon: float = 0.01,
    epsilon: float = 0.01,
) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_aggregate_csv(out_dir / "aggregate_report.csv", aggregate_report(scores))
    write_win_matrix_csv(out_dir / "win_matrix.csv", win_matrix(scores, epsilon))
    comparison = baseline_comparison(
        scores, baseline, near_win_epsilon=near_win_epsilon, epsilon=epsilon
    )
    write_baseline_csv(out_dir / "baseline_per_dataset.csv", comparison)
    write_near_win_csv(out_dir / "win_near_win.csv", comparison)


def run_pipeline(
    config: BenchmarkConfig,
    out_dir: Union[str, Path],
    *,
    config_document: Optional[dict] = None,
    jobs: int = 1,
    resume: bool = False,
) -> ScoreTable:
    """Full workflow: evaluate all cells, rank models, emit all reports."""
    scores = run_evaluation(
        config, out_dir, config_document=config_document, jobs=jobs, resume=resume
    )
    if len(scores.models()) >= 2:
        write_comparison_outputs(scores, config.bbt, out_dir)
    write_report_outputs(
        scores,
        out_dir,
        baseline=config.baseline,
        near_win_epsilon=config.near_win_epsilon,
    )
    return scores
