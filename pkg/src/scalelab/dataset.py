"""Run records, experiment-log ingestion and training-compute accounting."""

import csv
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .errors import DataValueError, MissingField, ParseError, SchemaError

CSV_COLUMNS = (
    "model_label",
    "total_params",
    "trainable_params",
    "forward_gmacs",
    "per_sample_gmacs",
    "seen_samples",
    "initial_loss",
    "split",
    "test_loss",
)
REQUIRED_CSV_COLUMNS = (
    "model_label",
    "total_params",
    "seen_samples",
    "initial_loss",
    "split",
    "test_loss",
)
REFERENCE_SPLITS = ("SC", "ST", "UC")
REFERENCE_FILE = "reference_scaling_runs.csv"

_SUFFIXES = {"K": 1e3, "M": 1e6, "B": 1e9, "G": 1e9, "T": 1e12}


@dataclass(frozen=True)
class RunRecord:
    """One training configuration and its measured test losses.

    ``per_sample_gmacs`` is the training cost per sample in GMACs. When it is
    not given it is derived from ``forward_gmacs * (1 + trainable/total)``.
    """

    model_label: str
    total_params: float
    seen_samples: float
    initial_loss: float
    losses: dict = field(default_factory=dict)
    trainable_params: Optional[float] = None
    forward_gmacs: Optional[float] = None
    per_sample_gmacs: Optional[float] = None

    def __post_init__(self):
        if not self.model_label:
            raise DataValueError("model_label must be non-empty")
        _positive("total_params", self.total_params)
        _positive("initial_loss", self.initial_loss)
        if not (math.isfinite(self.seen_samples) and self.seen_samples >= 1):
            raise DataValueError(f"seen_samples must be >= 1, got {self.seen_samples}")
        if self.trainable_params is not None:
            pt = self.trainable_params
            if not (math.isfinite(pt) and 0 <= pt <= self.total_params):
                raise DataValueError(
                    f"trainable_params must lie in [0, total_params], got {pt}"
                )
        if self.forward_gmacs is not None:
            _positive("forward_gmacs", self.forward_gmacs)
        if self.per_sample_gmacs is None:
            if self.forward_gmacs is not None and self.trainable_params is not None:
                g = self.forward_gmacs * (1.0 + self.trainable_params / self.total_params)
                object.__setattr__(self, "per_sample_gmacs", g)
        else:
            _positive("per_sample_gmacs", self.per_sample_gmacs)
        if not self.losses:
            raise DataValueError(f"run {self.model_label!r} carries no split loss")
        for split, value in self.losses.items():
            if not split:
                raise DataValueError("split label must be non-empty")
            _positive(f"loss[{split}]", value)

    @property
    def splits(self):
        return tuple(self.losses)

    def loss(self, split):
        try:
            return self.losses[split]
        except KeyError:
            raise MissingField(f"run {self.model_label!r} has no {split!r} loss") from None


def _positive(name, value):
    if value is None or not math.isfinite(value) or value <= 0:
        raise DataValueError(f"{name} must be finite and > 0, got {value}")


@dataclass(frozen=True)
class RunDataset:
    """Ordered runs. Row order is kept exactly as read; Durbin-Watson depends on it."""

    records: tuple
    source: str = "<memory>"

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def splits(self):
        seen = []
        for r in self.records:
            for s in r.losses:
                if s not in seen:
                    seen.append(s)
        return tuple(seen)

    def with_split(self, split):
        """Runs that carry a loss for ``split``, original order preserved."""
        if split not in self.splits:
            raise MissingField(f"no run carries a {split!r} loss; splits: {', '.join(self.splits)}")
        return RunDataset(
            tuple(r for r in self.records if split in r.losses), f"{self.source}[{split}]"
        )

    def sorted(self):
        """Copy ordered by (total_params, seen_samples); stable for ties."""
        recs = sorted(self.records, key=lambda r: (r.total_params, r.seen_samples))
        return RunDataset(tuple(recs), f"{self.source} (sorted)")

    def column(self, name, split=None):
        if name == "loss":
            return [r.loss(split) for r in self.records]
        if name == "compute":
            return [total_compute(r) for r in self.records]
        return [getattr(r, name) for r in self.records]


def total_compute(record):
    """Training cost in MACs: per-sample GMACs x 1e9 x seen samples."""
    if record.per_sample_gmacs is None:
        raise MissingField(
            f"run {record.model_label!r} has no per-sample cost "
            "(give per_sample_gmacs, or forward_gmacs with trainable_params)"
        )
    if record.seen_samples is None:
        raise MissingField(f"run {record.model_label!r} has no seen_samples")
    return record.per_sample_gmacs * 1e9 * record.seen_samples


def parse_number(text):
    """Parse ``"512000"``, ``"0.4B"``, ``"62.1G"`` or ``"5.1M"`` to a float."""
    text = str(text).strip()
    if not text:
        raise ValueError("empty number")
    mult = 1.0
    if text[-1].upper() in _SUFFIXES:
        mult = _SUFFIXES[text[-1].upper()]
        text = text[:-1].strip()
    value = float(text) * mult
    if not math.isfinite(value):
        raise ValueError(f"non-finite number {text!r}")
    return value


def _optional_number(text):
    if text is None or str(text).strip() == "":
        return None
    return parse_number(text)


def _optional_gmacs(text):
    """GMAC columns are already in giga units; a trailing ``G`` is the unit."""
    if text is None or str(text).strip() == "":
        return None
    text = str(text).strip()
    if text[-1] in "gG":
        text = text[:-1]
    return parse_number(text)


def _load_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, header required")
        header = [h.strip() for h in reader.fieldnames]
        missing = [c for c in REQUIRED_CSV_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        unknown = [c for c in header if c not in CSV_COLUMNS]
        if unknown:
            raise SchemaError(f"{path}: unknown column(s) {', '.join(unknown)}")

        runs = {}
        for row in reader:
            line = reader.line_num
            row = {k.strip(): (v or "").strip() for k, v in row.items() if k is not None}
            try:
                run_fields = {
                    "model_label": row["model_label"],
                    "total_params": parse_number(row["total_params"]),
                    "trainable_params": _optional_number(row.get("trainable_params")),
                    "forward_gmacs": _optional_gmacs(row.get("forward_gmacs")),
                    "per_sample_gmacs": _optional_gmacs(row.get("per_sample_gmacs")),
                    "seen_samples": parse_number(row["seen_samples"]),
                    "initial_loss": parse_number(row["initial_loss"]),
                }
                split = row["split"]
                loss = parse_number(row["test_loss"])
            except ValueError as exc:
                raise ParseError(line, str(exc)) from None
            if not split:
                raise ParseError(line, "empty split label")
            if not run_fields["model_label"]:
                raise ParseError(line, "empty model_label")
            key = tuple(run_fields.values())
            entry = runs.setdefault(key, (run_fields, {}))
            if split in entry[1]:
                raise ParseError(line, f"duplicate {split!r} loss for run {run_fields['model_label']!r}")
            entry[1][split] = loss
    return [RunRecord(losses=losses, **run_fields) for run_fields, losses in runs.values()]


def _load_json(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg) from None
    if not isinstance(data, list):
        raise SchemaError(f"{path}: expected a JSON array of run objects")
    records = []
    for i, obj in enumerate(data):
        if not isinstance(obj, dict):
            raise SchemaError(f"{path}: element {i} is not an object")
        for col in ("model_label", "total_params", "seen_samples", "initial_loss", "losses"):
            if col not in obj:
                raise SchemaError(f"{path}: element {i} is missing {col!r}")
        if not isinstance(obj["losses"], dict):
            raise SchemaError(f"{path}: element {i} 'losses' must be an object")
        try:
            records.append(
                RunRecord(
                    model_label=str(obj["model_label"]),
                    total_params=parse_number(obj["total_params"]),
                    trainable_params=_optional_number(obj.get("trainable_params")),
                    forward_gmacs=_optional_gmacs(obj.get("forward_gmacs")),
                    per_sample_gmacs=_optional_gmacs(obj.get("per_sample_gmacs")),
                    seen_samples=parse_number(obj["seen_samples"]),
                    initial_loss=parse_number(obj["initial_loss"]),
                    losses={str(k): parse_number(v) for k, v in obj["losses"].items()},
                )
            )
        except DataValueError:
            raise
        except ValueError as exc:
            raise ParseError(i, str(exc)) from None
    return records


def _infer_format(path):
    suffix = Path(path).suffix.lower()
    if suffix == ".json":
        return "json"
    return "csv"


def load_runs(path, format=None):
    """Read runs from a CSV (one row per run and split) or JSON file."""
    format = format or _infer_format(path)
    if format == "csv":
        records = _load_csv(path)
    elif format == "json":
        records = _load_json(path)
    else:
        raise SchemaError(f"unsupported format {format!r}")
    return RunDataset(tuple(records), str(path))


def _fmt(value):
    if value is None:
        return ""
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def save_runs(dataset, path, format=None):
    format = format or _infer_format(path)
    if format == "json":
        payload = [
            {
                "model_label": r.model_label,
                "total_params": r.total_params,
                "trainable_params": r.trainable_params,
                "forward_gmacs": r.forward_gmacs,
                "per_sample_gmacs": r.per_sample_gmacs,
                "seen_samples": r.seen_samples,
                "initial_loss": r.initial_loss,
                "losses": dict(r.losses),
            }
            for r in dataset
        ]
        Path(path).write_text(json.dumps(payload, indent=2) + "\n")
        return
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in dataset:
            for split, loss in r.losses.items():
                writer.writerow(
                    [
                        r.model_label,
                        _fmt(r.total_params),
                        _fmt(r.trainable_params),
                        _fmt(r.forward_gmacs),
                        _fmt(r.per_sample_gmacs),
                        _fmt(r.seen_samples),
                        _fmt(r.initial_loss),
                        split,
                        _fmt(loss),
                    ]
                )


def reference_path():
    return resources.files("scalelab") / "data" / REFERENCE_FILE


def reference_dataset(order="printed"):
    """The bundled 16-run reference table.

    ``order="printed"`` keeps the published row order (the 1.0B block lists
    5.1M before 2.0M samples); ``order="sorted"`` sorts by model size and
    seen samples.
    """
    with resources.as_file(reference_path()) as p:
        ds = load_runs(p, "csv")
    ds = RunDataset(ds.records, "reference")
    if order == "printed":
        return ds
    if order == "sorted":
        return ds.sorted()
    raise ValueError(f"order must be 'printed' or 'sorted', got {order!r}")

