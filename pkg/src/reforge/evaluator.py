"""Prediction ingestion, confusion matrices with abstention accounting,
and classification metrics.

The positive class is `vulnerable`. Accuracy is computed over classified
contracts only (abstentions excluded), which matches how the evaluated
models were scored; a coverage-adjusted accuracy over all records is
reported alongside because abstentions change the picture materially.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

VALID_PREDICTIONS = ("vulnerable", "secure", "abstain")


class PredictionFileError(ValueError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class DuplicateId(PredictionFileError):
    pass


class UnknownId(PredictionFileError):
    pass


class SchemaError(PredictionFileError):
    pass


@dataclass(frozen=True)
class PredictionRecord:
    id: str
    prediction: str  # vulnerable / secure / abstain


@dataclass
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    abstained: int = 0

    @property
    def classified(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def total(self) -> int:
        return self.classified + self.abstained

    def to_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "abstained": self.abstained,
        }


@dataclass
class MetricsReport:
    accuracy: float
    per_class: dict[str, dict[str, float]]
    weighted: dict[str, float]
    matrix: ConfusionMatrix
    coverage_adjusted_accuracy: float
    flags: list[str] = field(default_factory=list)
    name: str = ""
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "accuracy": self.accuracy,
            "per_class": self.per_class,
            "weighted": self.weighted,
            "matrix": self.matrix.to_dict(),
            "coverage_adjusted_accuracy": self.coverage_adjusted_accuracy,
            "flags": self.flags,
        }
        if self.name:
            out["name"] = self.name
        if self.metadata:
            out["metadata"] = self.metadata
        return out

    def write(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8"
        )


def load_predictions(path, known_ids: Optional[set[str]] = None) -> list[PredictionRecord]:
    """Line-delimited {"id", "prediction"} records. Raises DuplicateId,
    UnknownId, or SchemaError with the offending line number."""
    records: list[PredictionRecord] = []
    seen: set[str] = set()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed JSON: {exc.msg}", lineno) from None
        if not isinstance(data, dict) or "id" not in data or "prediction" not in data:
            raise SchemaError("record must have 'id' and 'prediction'", lineno)
        cid = data["id"]
        prediction = data["prediction"]
        if prediction not in VALID_PREDICTIONS:
            raise SchemaError(f"unknown prediction token {prediction!r}", lineno)
        if cid in seen:
            raise DuplicateId(f"duplicate id {cid!r}", lineno)
        if known_ids is not None and cid not in known_ids:
            raise UnknownId(f"id {cid!r} not in the test manifest", lineno)
        seen.add(cid)
        records.append(PredictionRecord(id=cid, prediction=prediction))
    return records


def confusion(manifest, predictions: list[PredictionRecord]) -> ConfusionMatrix:
    """Counts by actual x predicted over the manifest's test split.
    Records without a prediction count as abstained."""
    actual = {
        r.id: str(r.label.value if hasattr(r.label, "value") else r.label)
        for r in manifest.records
        if r.split == "test"
    }
    by_id = {p.id: p.prediction for p in predictions}
    matrix = ConfusionMatrix()
    for cid, label in actual.items():
        prediction = by_id.get(cid, "abstain")
        if prediction == "abstain":
            matrix.abstained += 1
        elif label == "vulnerable":
            if prediction == "vulnerable":
                matrix.tp += 1
            else:
                matrix.fn += 1
        else:
            if prediction == "vulnerable":
                matrix.fp += 1
            else:
                matrix.tn += 1
    return matrix


def _safe_div(num: float, den: float, flags: list[str], name: str) -> float:
    if den == 0:
        flags.append(name)
        return 0.0
    return num / den


def metrics(matrix: ConfusionMatrix, name: str = "", metadata: Optional[dict] = None) -> MetricsReport:
    """Per-class and support-weighted precision/recall/F1 plus accuracy
    over classified records. Division by zero yields 0 and a flag."""
    flags: list[str] = []
    accuracy = _safe_div(matrix.tp + matrix.tn, matrix.classified, flags, "accuracy")
    coverage_adjusted = _safe_div(
        matrix.tp + matrix.tn, matrix.total, flags, "coverage_adjusted_accuracy"
    )

    precision_v = _safe_div(matrix.tp, matrix.tp + matrix.fp, flags, "precision/vulnerable")
    recall_v = _safe_div(matrix.tp, matrix.tp + matrix.fn, flags, "recall/vulnerable")
    f1_v = _safe_div(2 * precision_v * recall_v, precision_v + recall_v, flags, "f1/vulnerable")
    support_v = matrix.tp + matrix.fn

    precision_s = _safe_div(matrix.tn, matrix.tn + matrix.fn, flags, "precision/secure")
    recall_s = _safe_div(matrix.tn, matrix.tn + matrix.fp, flags, "recall/secure")
    f1_s = _safe_div(2 * precision_s * recall_s, precision_s + recall_s, flags, "f1/secure")
    support_s = matrix.tn + matrix.fp

    support = support_v + support_s
    weighted = {
        metric: _safe_div(v * support_v + s * support_s, support, flags, f"weighted/{metric}")
        for metric, v, s in (
            ("precision", precision_v, precision_s),
            ("recall", recall_v, recall_s),
            ("f1", f1_v, f1_s),
        )
    }
    per_class = {
        "vulnerable": {
            "precision": precision_v, "recall": recall_v, "f1": f1_v, "support": support_v,
        },
        "secure": {
            "precision": precision_s, "recall": recall_s, "f1": f1_s, "support": support_s,
        },
    }
    return MetricsReport(
        accuracy=accuracy,
        per_class=per_class,
        weighted=weighted,
        matrix=matrix,
        coverage_adjusted_accuracy=coverage_adjusted,
        flags=flags,
        name=name,
        metadata=metadata or {},
    )


# ---------------------------------------------------------------------------
# cross-report comparison


def load_report(path) -> dict:
    """A full MetricsReport JSON or a minimal externally supplied report
    ({"name", "accuracy", "skipped", "metadata"})."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    name = data.get("name") or Path(path).stem
    if "matrix" in data:
        skipped = data["matrix"].get("abstained", 0)
    else:
        skipped = data.get("skipped", 0)
    return {
        "name": name,
        "accuracy": float(data["accuracy"]),
        "skipped": int(skipped),
        "parameters_b": data.get("metadata", {}).get("parameters_b"),
    }


def compare(reports: list[dict]) -> list[dict]:
    """Rows sorted by accuracy descending; ties keep stable name order."""
    if not reports:
        raise ValueError("at least one report required")
    return sorted(reports, key=lambda r: (-r["accuracy"], r["name"]))


def format_comparison(rows: list[dict]) -> str:
    header = f"{'Model':<28} {'Accuracy (%)':>12} {'Skipped':>8} {'Parameters (B)':>15}"
    lines = [header, "-" * len(header)]
    for row in rows:
        params = row.get("parameters_b")
        params_text = f"{params:g}" if params is not None else "-"
        lines.append(
            f"{row['name']:<28} {row['accuracy'] * 100:>12.2f} "
            f"{row['skipped']:>8d} {params_text:>15}"
        )
    return "\n".join(lines)
