"""Run reports and their CSV/JSON writers.

Floats are written with ``repr``, the shortest decimal string that parses
back to the same double, so files compare bit-exactly across platforms.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

# Column order per kind; ``S_<g>`` columns expand to one per gamma.
COLUMNS = {
    "l2_counterexample": ("n", "step_norm_sq", "lower_bound", "step_norm", "S", "ratio"),
    "flat_r2": ("n", "u_n", "step_norm", "S", "ratio"),
    "conified_r3": ("n", "a_n", "b_n", "step_norm", "S", "ratio"),
    "positive_polyhedral": ("n", "set_index", "lambda", "step_norm", "S"),
    "custom": ("n", "set_index", "lambda", "step_norm", "S"),
}


def gamma_label(g: float) -> str:
    return f"S_{g:g}"


def columns_for(kind: str, gammas) -> list[str]:
    out = []
    for c in COLUMNS[kind]:
        if c == "S":
            out.extend(gamma_label(g) for g in gammas)
        else:
            out.append(c)
    return out


@dataclass
class RunReport:
    """Everything a run produced.

    ``rows`` follow ``columns``.  ``partial_sums[j][k]`` is the gamma-sum for
    ``gammas[j]`` at ``checkpoints[k]``; ``ratios`` align with
    ``checkpoints`` and are ``None`` where undefined.
    """

    kind: str
    config: dict
    version: str
    seed: int | None
    duration_s: float
    n_steps: int
    final_point: list[float]
    final_distances: list[float]
    gammas: list[float]
    checkpoints: list[int]
    partial_sums: list[list[float]]
    ratios: list[float | None]
    residuals: dict[str, float]
    meta: dict = field(default_factory=dict)
    columns: list[str] = field(default_factory=list)
    rows: list[list] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        names = {f.name for f in fields(cls)}
        missing = names - set(data)
        if missing:
            raise ValueError(f"report is missing fields {sorted(missing)}")
        return cls(**{k: data[k] for k in names})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_cell(v) for v in row) + "\n")
        return buf.getvalue()


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            return ""
        return repr(v)
    return str(v)


def finite_or_none(x) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def write_report(report: RunReport, path: Path, fmt: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = report.to_csv() if fmt == "csv" else report.to_json()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path
