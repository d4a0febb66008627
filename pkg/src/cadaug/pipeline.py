"""End-to-end experiment orchestration.

Runs ingest -> label -> featurize -> split -> derive the three dataset
provenances -> train every model on each training set -> evaluate on
every testing set, writing every intermediate artifact under the output
directory.  All randomness flows from one master seed through
:func:`cadaug.seeding.derive_seed`, so a fixed config reproduces every
table cell bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from .augment import augment_full, balance, split
from .dataset import Dataset, PROVENANCES, Row, save_dataset
from .features import FeatureSchema, featurize, featurize_exact, fit_distinct_filter
from .labelling import (
    DEFAULT_TIMEOUT,
    label_by_sotd,
    label_from_timings,
    read_timings_csv,
)
from .ml import CVPlan, DEFAULT_GRIDS, MODEL_KINDS, RandomBaseline, TrainedModel
from .ml import accuracy as model_accuracy
from .ml import train as train_model
from .seeding import derive_seed
from .smtlib import IngestError, ProblemInstance, ingest_directory, write_instances_jsonl

__all__ = [
    "ExperimentConfig",
    "PipelineError",
    "ResultMatrix",
    "improvement_summary",
    "run_pipeline",
]

LABELLERS = ("timings", "sotd")


class PipelineError(Exception):
    """A pipeline stage failed; the message names the stage."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a full experiment run depends on."""

    input_dir: Path
    out_dir: Path
    labeller: str = "sotd"
    timings_csv: Optional[Path] = None
    timeout: float = DEFAULT_TIMEOUT
    test_fraction: float = 0.2
    balance_mode: str = "random"
    seed: int = 0
    models: tuple[str, ...] = MODEL_KINDS
    cv_folds: int = 5
    grids: Mapping[str, Sequence[Mapping[str, Any]]] = field(
        default_factory=lambda: DEFAULT_GRIDS
    )

    def __post_init__(self):
        if self.labeller not in LABELLERS:
            raise ValueError(f"unknown labeller {self.labeller!r}")
        if self.labeller == "timings" and self.timings_csv is None:
            raise ValueError("labeller 'timings' requires a timings CSV")
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError("test_fraction must be in (0, 1)")
        if self.balance_mode not in ("random", "exact"):
            raise ValueError(f"unknown balance mode {self.balance_mode!r}")
        if not self.models:
            raise ValueError("at least one model kind is required")
        for kind in self.models:
            if kind not in MODEL_KINDS:
                raise ValueError(f"unknown model kind {kind!r}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


@dataclass
class ResultMatrix:
    """Every accuracy cell plus the bookkeeping the report needs."""

    models: tuple[str, ...]
    accuracy: dict[tuple[str, str, str], float]  # (model, trained_on, tested_on)
    dataset_summary: dict[str, dict[str, Any]]  # dataset name -> rows/class counts
    baseline: dict[str, float]  # tested_on -> uniform-random accuracy
    feature_counts: dict[str, int]  # raw and essentially-distinct widths
    improvements: dict[str, Optional[float]]
    seed: int
    labeller: str

    def cell(self, model: str, trained_on: str, tested_on: str) -> float:
        return self.accuracy[(model, trained_on, tested_on)]

    def to_json(self) -> dict:
        return {
            "format": "cadaug-matrix",
            "version": 1,
            "models": list(self.models),
            "accuracy": [
                {"model": m, "trained_on": tr, "tested_on": te, "accuracy": acc}
                for (m, tr, te), acc in self.accuracy.items()
            ],
            "dataset_summary": self.dataset_summary,
            "baseline": self.baseline,
            "feature_counts": self.feature_counts,
            "improvements": self.improvements,
            "seed": self.seed,
            "labeller": self.labeller,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ResultMatrix":
        if data.get("format") != "cadaug-matrix" or data.get("version") != 1:
            raise ValueError("not a version-1 cadaug matrix file")
        accuracy = {
            (c["model"], c["trained_on"], c["tested_on"]): c["accuracy"]
            for c in data["accuracy"]
        }
        return cls(
            models=tuple(data["models"]),
            accuracy=accuracy,
            dataset_summary=dict(data["dataset_summary"]),
            baseline=dict(data["baseline"]),
            feature_counts=dict(data["feature_counts"]),
            improvements=dict(data["improvements"]),
            seed=data["seed"],
            labeller=data["labeller"],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "ResultMatrix":
        return cls.from_json(json.loads(Path(path).read_text()))


def improvement_summary(matrix: ResultMatrix) -> dict[str, Optional[float]]:
    """Average relative accuracy change, in percent, on the balanced test set.

    Compares balanced-trained and augmented-trained models against the
    unbalanced-trained ones.  Models whose unbalanced-trained accuracy is
    zero cannot be compared relatively and are skipped; when every model
    is skipped the aggregate is None.
    """
    out: dict[str, Optional[float]] = {}
    for name, trained_on in (
        ("balanced_vs_unbalanced_pct", "balanced"),
        ("augmented_vs_unbalanced_pct", "augmented"),
    ):
        changes = []
        for model in matrix.models:
            base = matrix.cell(model, "unbalanced", "balanced")
            if base == 0.0:
                continue
            changes.append(100.0 * (matrix.cell(model, trained_on, "balanced") - base) / base)
        out[name] = sum(changes) / len(changes) if changes else None
    return out


def _label_instances(
    instances: list[ProblemInstance], config: ExperimentConfig
) -> list[tuple[ProblemInstance, int]]:
    labelled = []
    if config.labeller == "timings":
        records = read_timings_csv(config.timings_csv)
        for inst in instances:
            rec = records.get(inst.id)
            if rec is None:
                continue  # no measurements: treat like an all-timeout record
            ordering = label_from_timings(rec, config.timeout)
            if ordering is not None:
                labelled.append((inst, ordering.index))
    else:
        for inst in instances:
            ordering = label_by_sotd(inst)
            if ordering is not None:
                labelled.append((inst, ordering.index))
    return labelled


def run_pipeline(config: ExperimentConfig) -> ResultMatrix:
    """Execute the full experiment and return the accuracy matrix."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    # ingest
    try:
        instances = ingest_directory(config.input_dir)
    except OSError as err:
        raise PipelineError("ingest", str(err)) from err
    if not instances:
        raise PipelineError("ingest", f"no usable instances under {config.input_dir}")
    write_instances_jsonl(instances, out / "instances.jsonl")

    # label
    try:
        labelled = _label_instances(instances, config)
    except (OSError, ValueError) as err:
        raise PipelineError("label", str(err)) from err
    if not labelled:
        raise PipelineError("label", "empty labelled dataset")
    with open(out / "labels.csv", "w") as fh:
        fh.write("instance_id,label\n")
        for inst, label in labelled:
            fh.write(f"{inst.id},{label}\n")

    # featurize (raw schema) and split by instance id
    raw_schema = FeatureSchema.raw()
    by_id = {inst.id: (inst, label) for inst, label in labelled}
    raw_rows = tuple(
        Row(inst.id, featurize(inst, raw_schema).values, label)
        for inst, label in labelled
    )
    full = Dataset(raw_rows, raw_schema, "unbalanced", "all")
    try:
        train_raw, test_raw = split(full, config.test_fraction, derive_seed(config.seed, "split"))
    except ValueError as err:
        raise PipelineError("split", str(err)) from err

    # fit the essentially-distinct filter on the unbalanced training half only
    try:
        filter_inputs = [featurize_exact(by_id[i][0]) for i in train_raw.ids()]
        schema = fit_distinct_filter(filter_inputs)
    except ValueError as err:
        raise PipelineError("filter", str(err)) from err
    schema.save(out / "schema.json")

    def filtered(ds: Dataset, role: str) -> Dataset:
        rows = tuple(
            Row(r.instance_id, featurize(by_id[r.instance_id][0], schema).values, r.label)
            for r in ds.rows
        )
        return Dataset(rows, schema, "unbalanced", role)

    train_unb = filtered(train_raw, "train")
    test_unb = filtered(test_raw, "test")

    # derive the balanced and augmented variants of both halves
    try:
        datasets = {
            ("unbalanced", "train"): train_unb,
            ("unbalanced", "test"): test_unb,
            ("balanced", "train"): balance(
                train_unb, config.balance_mode, derive_seed(config.seed, "balance:train")
            ),
            ("balanced", "test"): balance(
                test_unb, config.balance_mode, derive_seed(config.seed, "balance:test")
            ),
            ("augmented", "train"): augment_full(train_unb),
            ("augmented", "test"): augment_full(test_unb),
        }
    except ValueError as err:
        raise PipelineError("augment", str(err)) from err

    data_dir = out / "datasets"
    data_dir.mkdir(exist_ok=True)
    summary: dict[str, dict[str, Any]] = {}
    for (provenance, role), ds in datasets.items():
        save_dataset(
            ds,
            data_dir / f"{role}_{provenance}.csv",
            seed=config.seed,
            mode=config.balance_mode if provenance == "balanced" else None,
        )
        summary[f"{role}_{provenance}"] = {
            "rows": len(ds),
            "class_counts": ds.class_counts(),
        }

    # train on each training provenance, evaluate on each testing provenance
    model_dir = out / "models"
    model_dir.mkdir(exist_ok=True)
    accuracy: dict[tuple[str, str, str], float] = {}
    for kind in config.models:
        for trained_on in PROVENANCES:
            plan = CVPlan(
                folds=config.cv_folds,
                grids=config.grids,
                seed=derive_seed(config.seed, f"train:{kind}:{trained_on}"),
            )
            try:
                model = train_model(kind, datasets[(trained_on, "train")], plan)
            except ValueError as err:
                raise PipelineError("train", f"{kind} on {trained_on}: {err}") from err
            model.save(model_dir / f"{kind}_{trained_on}.json")
            for tested_on in PROVENANCES:
                accuracy[(kind, trained_on, tested_on)] = model_accuracy(
                    model, datasets[(tested_on, "test")]
                )

    # uniform-random reference on every test set
    baseline_model = TrainedModel(
        "baseline",
        {},
        RandomBaseline(seed=derive_seed(config.seed, "baseline")).fit(
            train_unb.matrix(), train_unb.labels()
        ),
        [],
    )
    baseline = {
        tested_on: model_accuracy(baseline_model, datasets[(tested_on, "test")])
        for tested_on in PROVENANCES
    }

    matrix = ResultMatrix(
        models=tuple(config.models),
        accuracy=accuracy,
        dataset_summary=summary,
        baseline=baseline,
        feature_counts={"raw": len(raw_schema), "distinct": len(schema)},
        improvements={},
        seed=config.seed,
        labeller=config.labeller,
    )
    matrix.improvements = improvement_summary(matrix)
    matrix.save(out / "matrix.json")

    from .report import write_report

    write_report(matrix, out)
    return matrix
