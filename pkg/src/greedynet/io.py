"""JSON files for instances, profiles and reports.

Rationals are written as "p/q" strings (integers stay integers) and keys
are sorted, so the same object always serialises to the same bytes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .game import StrategyProfile
from .metric import MetricError, MetricSpace, StructureError, metric_from_json, to_exact


class InputError(ValueError):
    """Unreadable or malformed input file."""


class DimensionError(StructureError):
    """Profile and metric disagree on the number of agents."""


def _plain(x: Any):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return x
    if isinstance(x, float):
        if math.isfinite(x):
            return x
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return _plain(float(x))
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (frozenset, set)):
        return [_plain(v) for v in sorted(x)]
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if hasattr(x, "to_json"):
        return _plain(x.to_json())
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dumps(obj: Any, indent: int | None = None) -> str:
    """Canonical JSON text."""
    return json.dumps(_plain(obj), sort_keys=True, indent=indent,
                      separators=(",", ":") if indent is None else (",", ": "))


def _read(src) -> Any:
    if isinstance(src, (dict, list)):
        return src
    try:
        text = Path(src).read_text()
    except OSError as e:
        raise InputError(f"cannot read {src}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{src}: malformed JSON ({e})") from e


@dataclass(frozen=True)
class Instance:
    metric: MetricSpace
    alpha: Fraction | float | None

    def to_json(self) -> dict:
        d = {"metric": self.metric.to_json()}
        if self.metric.labels:
            d["metric"]["labels"] = list(self.metric.labels)
        if self.alpha is not None:
            d["alpha"] = self.alpha
        return d


def parse_alpha(x, exact: bool = True):
    a = to_exact(x)
    if a <= 0:
        raise StructureError("alpha must be positive")
    return a if exact else float(a)


def instance_from_json(obj: dict) -> Instance:
    if not isinstance(obj, dict) or "metric" not in obj:
        raise InputError("instance needs a 'metric' object")
    try:
        m = metric_from_json(obj["metric"])
    except (TypeError, ValueError) as e:
        if isinstance(e, (StructureError, MetricError)):
            raise
        raise InputError(f"bad metric payload: {e}") from e
    labels = obj["metric"].get("labels")
    if labels is not None:
        m = m.with_labels(labels)
    a = obj.get("alpha")
    return Instance(m, None if a is None else parse_alpha(a, m.exact))


def load_instance(src) -> Instance:
    return instance_from_json(_read(src))


def profile_from_json(obj: dict, n: int | None = None) -> StrategyProfile:
    if not isinstance(obj, dict) or not isinstance(obj.get("strategies"), list):
        raise InputError("profile needs a 'strategies' list")
    rows = obj["strategies"]
    if n is not None and len(rows) != n:
        raise DimensionError(f"profile has {len(rows)} strategies, metric has {n} nodes")
    try:
        return StrategyProfile.from_lists(rows)
    except (TypeError, ValueError) as e:
        if isinstance(e, StructureError):
            raise
        raise InputError(f"bad strategy list: {e}") from e


def load_profile(src, n: int | None = None) -> StrategyProfile:
    return profile_from_json(_read(src), n)


def write_json(obj: Any, path=None, indent: int | None = None) -> str:
    text = dumps(obj, indent)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load_sets(src) -> tuple[list, list]:
    """Set-cover input: {"universe": [...], "sets": [[...], ...]}; universe defaults to the union."""
    obj = _read(src)
    if not isinstance(obj, dict) or not isinstance(obj.get("sets"), list):
        raise InputError("set-cover file needs a 'sets' list")
    sets = [list(s) for s in obj["sets"]]
    uni = obj.get("universe")
    if uni is None:
        uni = sorted({x for s in sets for x in s}, key=str)
    return list(uni), sets
