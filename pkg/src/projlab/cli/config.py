"""YAML experiment configs, validated into experiment specs before any computation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from projlab import dynamics
from projlab.experiments import ConifiedRunSpec, FlatRunSpec, L2CounterexampleSpec
from projlab.geometry import OrthoBasis, orthonormalize
from projlab.projectors import Affine, Epigraph, FlatFamily, HalfspaceSystem, HomogenizedCone, Polyhedron, Subspace

KINDS = ("l2_counterexample", "flat_r2", "conified_r3", "positive_polyhedral", "custom")
FORMATS = ("csv", "json")
RANDOMIZED = {"positive_polyhedral"}

_PARAMS = {
    "l2_counterexample": {"tiers": 30, "n_steps": 1000, "simulate_pairs": 100},
    "flat_r2": {"beta": 1.0, "r": 2, "u0": 0.5, "n_steps": 1000},
    "conified_r3": {"beta": 1.0, "r": 2, "a0": 1.0, "b0": 0.3, "n_steps": 1000},
    "positive_polyhedral": {"dim": 4, "n_cones": 3, "rows_per_cone": 4, "lambda_min": 0.3, "n_steps": 10_000},
    "custom": {"sets": None, "policy": None, "x0": None, "n_steps": 100},
}
DEFAULT_GAMMAS = {
    "l2_counterexample": (0.5, 1.0, 2.0),
    "flat_r2": (0.5, 1.0, 2.0),
    "conified_r3": (0.5, 1.0, 2.0),
    "positive_polyhedral": (0.25, 0.5, 1.0, 2.0),
    "custom": (0.5, 1.0, 2.0),
}


class ConfigError(ValueError):
    """A config that cannot be run; maps to exit code 2."""


@dataclass
class ExperimentConfig:
    kind: str
    parameters: dict[str, Any]
    output_path: str | None = None
    format: str = "csv"
    checkpoints: list[int] | None = None
    gammas: list[float] = field(default_factory=list)
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "parameters": _plain(self.parameters),
            "output": {"path": self.output_path, "format": self.format},
            "checkpoints": self.checkpoints,
            "gammas": list(self.gammas),
            "seed": self.seed,
        }


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _int(name: str, v, lo: int | None = 0) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise ConfigError(f"{name} must be an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(f"{name} must be >= {lo}, got {v!r}")
    return int(v)


def _real(name: str, v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name} must be a number, got {v!r}")
    return float(v)


def load_yaml(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping at top level")
    return data


def parse_config(data: dict, seed_override: int | None = None) -> ExperimentConfig:
    unknown = set(data) - {"kind", "parameters", "output", "checkpoints", "gammas", "seed", "grid"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    kind = data.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {', '.join(KINDS)}; got {kind!r}")
    raw = data.get("parameters") or {}
    if not isinstance(raw, dict):
        raise ConfigError("parameters must be a mapping")
    extra = set(raw) - set(_PARAMS[kind])
    if extra:
        raise ConfigError(f"unknown parameters for {kind}: {sorted(extra)}")
    params = {**_PARAMS[kind], **raw}

    out = data.get("output") or {}
    if not isinstance(out, dict):
        raise ConfigError("output must be a mapping with path and format")
    fmt = out.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"output format must be csv or json, got {fmt!r}")

    seed = data.get("seed")
    if seed_override is not None:
        seed = seed_override
    if seed is not None:
        seed = _int("seed", seed)

    gammas = data.get("gammas", DEFAULT_GAMMAS[kind])
    if not isinstance(gammas, (list, tuple)) or not gammas:
        raise ConfigError("gammas must be a nonempty list")
    gammas = [_real("gamma", g) for g in gammas]
    if any(g <= 0 for g in gammas) or len(set(gammas)) != len(gammas):
        raise ConfigError("gammas must be distinct and positive")

    n = _int("n_steps", params["n_steps"])
    cps = data.get("checkpoints")
    if cps is not None:
        if not isinstance(cps, (list, tuple)):
            raise ConfigError("checkpoints must be a list of step indices")
        cps = [_int("checkpoint", c, 1) for c in cps]
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise ConfigError("checkpoints must be sorted strictly ascending")
        if cps and cps[-1] > n:
            raise ConfigError(f"checkpoint {cps[-1]} exceeds n_steps = {n}")

    cfg = ExperimentConfig(kind, params, out.get("path"), fmt, cps, gammas, seed)
    build_spec(cfg)
    return cfg


def build_spec(cfg: ExperimentConfig):
    """Experiment spec for ``cfg``; spec invariant violations become :class:`ConfigError`."""
    p = cfg.parameters
    try:
        if cfg.kind == "l2_counterexample":
            _int("simulate_pairs", p["simulate_pairs"])
            return L2CounterexampleSpec(_int("tiers", p["tiers"], 1))
        if cfg.kind == "flat_r2":
            fam = FlatFamily(_real("beta", p["beta"]), _int("r", p["r"], 2))
            return FlatRunSpec(fam, _real("u0", p["u0"]), _int("n_steps", p["n_steps"]))
        if cfg.kind == "conified_r3":
            fam = FlatFamily(_real("beta", p["beta"]), _int("r", p["r"], 2))
            return ConifiedRunSpec(fam, _real("a0", p["a0"]), _real("b0", p["b0"]), _int("n_steps", p["n_steps"]))
        if cfg.kind == "positive_polyhedral":
            if cfg.seed is None:
                raise ConfigError("positive_polyhedral is randomized: a seed is required (config or --seed)")
            lm = _real("lambda_min", p["lambda_min"])
            if not 0 < lm <= 1:
                raise ConfigError(f"lambda_min must lie in ]0, 1], got {lm!r}")
            for k in ("dim", "n_cones", "rows_per_cone"):
                _int(k, p[k], 1)
            if p["dim"] > 10 or p["rows_per_cone"] > 8:
                raise ConfigError("dim <= 10 and rows_per_cone <= 8")
            return None
        return build_custom(cfg)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid {cfg.kind} parameters: {exc}") from exc


def _matrix(name: str, v, cols: int | None = None) -> np.ndarray:
    try:
        a = np.array(v, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a numeric matrix") from exc
    if a.ndim == 1 and cols is not None and a.size == cols:
        a = a[None, :]
    if a.ndim != 2 or (cols is not None and a.shape[1] != cols):
        raise ConfigError(f"{name} must be a list of length-{cols} rows")
    return a


def _set(entry, d: int):
    if not isinstance(entry, dict) or "type" not in entry:
        raise ConfigError("each set needs a type")
    t = entry["type"]
    if t in ("subspace", "affine"):
        vecs = entry.get("vectors", [])
        basis = orthonormalize(list(_matrix("vectors", vecs, d)), ambient_dim=d) if len(vecs) else OrthoBasis.empty(d)
        if t == "subspace":
            return Subspace(basis)
        return Affine(basis, np.asarray(entry.get("offset", [0.0] * d), dtype=float))
    if t == "polyhedron":
        A = _matrix("A", entry.get("A"), d)
        return Polyhedron(HalfspaceSystem(A, np.asarray(entry.get("beta", [0.0] * len(A)), dtype=float)))
    if t in ("epigraph", "homogenized_cone"):
        fam = FlatFamily(_real("beta", entry.get("beta", 1.0)), _int("r", entry.get("r", 2), 2))
        return Epigraph(fam) if t == "epigraph" else HomogenizedCone(fam)
    raise ConfigError(f"unknown set type {t!r}")


def build_custom(cfg: ExperimentConfig):
    """``(sets, policy, x0)`` for a custom run."""
    p = cfg.parameters
    if p["x0"] is None or p["sets"] is None or p["policy"] is None:
        raise ConfigError("custom runs need x0, sets and policy")
    x0 = np.asarray(p["x0"], dtype=float)
    if x0.ndim != 1 or not np.all(np.isfinite(x0)):
        raise ConfigError("x0 must be a finite vector")
    sets = [_set(e, x0.size) for e in p["sets"]]
    for k, s in enumerate(sets):
        if s.dim != x0.size:
            raise ConfigError(f"set {k} lives in R^{s.dim} but x0 has dimension {x0.size}")
    pol = p["policy"]
    if not isinstance(pol, dict):
        raise ConfigError("policy must be a mapping with a type")
    t = pol.get("type")
    if t == "cyclic":
        order = tuple(_int("order entry", i) for i in pol.get("order", range(len(sets))))
        policy = dynamics.Cyclic(order, _real("lam", pol.get("lam", 1.0)))
        if not 0 < policy.lam <= 2:
            raise ConfigError("lam must lie in ]0, 2]")
    elif t == "random":
        if cfg.seed is None:
            raise ConfigError("random policy requires a seed (config or --seed)")
        policy = dynamics.Random(cfg.seed, _real("lambda_min", pol.get("lambda_min", 1.0)))
    elif t == "explicit":
        policy = dynamics.Explicit(tuple(dynamics.RelaxedStep(_int("set", i), _real("lam", l))
                                         for i, l in pol.get("schedule", [])))
    else:
        raise ConfigError(f"policy type must be cyclic, random or explicit; got {t!r}")
    idx = policy.order if t == "cyclic" else [s.set_index for s in getattr(policy, "schedule", ())]
    if any(i >= len(sets) for i in idx):
        raise ConfigError("policy refers to a set index outside the collection")
    return sets, policy, x0


def expand_grid(data: dict) -> tuple[list[dict], int]:
    """Cartesian product of ``grid`` over ``parameters``; returns (points, duplicates dropped)."""
    grid = data.get("grid")
    if not isinstance(grid, dict) or not grid:
        raise ConfigError("sweep config needs a nonempty grid mapping")
    keys = list(grid)
    values = []
    for k in keys:
        v = grid[k]
        v = v if isinstance(v, list) else [v]
        if not v:
            raise ConfigError(f"grid entry {k!r} is empty")
        values.append(v)
    base = data.get("parameters") or {}
    seen, points, dups = set(), [], 0
    for combo in itertools.product(*values):
        params = {**base, **dict(zip(keys, combo))}
        key = yaml.safe_dump(params, sort_keys=True)
        if key in seen:
            dups += 1
            continue
        seen.add(key)
        points.append(params)
    return points, dups
