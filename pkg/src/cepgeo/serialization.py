"""JSON interchange: filter documents, tensor documents, float formatting.

Complex numbers are always {"re": ..., "im": ...} pairs.  Tensor entries
carry their index tuple with anti-holomorphic (barred) positions encoded as
strings with a combining macron ("1̄"), holomorphic positions as plain
integers; indices are 0-based.  Floats are rounded to 12 significant digits
before emission so that identical inputs produce byte-identical reports.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .filters import FilterSpec

BAR = "̄"


def fmt_float(x: float) -> float:
    """Round to 12 significant digits (stable shortest-repr serialisation)."""
    return float(f"{float(x):.12g}")


def complex_to_json(z: complex) -> dict[str, float]:
    z = complex(z)
    return {"re": fmt_float(z.real), "im": fmt_float(z.imag)}


def complex_from_json(obj: Any, what: str) -> complex:
    if not isinstance(obj, dict) or set(obj) != {"re", "im"}:
        raise ValueError(f"{what}: complex values must be {{'re': .., 'im': ..}} objects")
    return complex(float(obj["re"]), float(obj["im"]))


_FILTER_KEYS = {"gain", "poles", "zeros", "blaschke", "z_power"}


def parse_filter_document(doc: Any) -> FilterSpec:
    """Read the shared filter schema into a FilterSpec.

    Schema: {"gain": number, "poles": [{re,im}..], "zeros": [..],
    "blaschke": [..], "z_power": int}; only "gain" is required and unknown
    keys are rejected.
    """
    if not isinstance(doc, dict):
        raise ValueError("filter document must be a JSON object")
    unknown = set(doc) - _FILTER_KEYS
    if unknown:
        raise ValueError(f"unknown filter document keys: {sorted(unknown)}")
    if "gain" not in doc:
        raise ValueError("filter document requires a 'gain' field")

    def complex_list(key: str) -> tuple[complex, ...]:
        items = doc.get(key, [])
        if not isinstance(items, list):
            raise ValueError(f"'{key}' must be a list")
        return tuple(complex_from_json(item, f"{key}[{i}]") for i, item in enumerate(items))

    return FilterSpec(
        gain=float(doc["gain"]),
        poles=complex_list("poles"),
        zeros=complex_list("zeros"),
        blaschke_points=complex_list("blaschke"),
        z_power=int(doc.get("z_power", 0)),
    )


def filter_to_document(spec) -> dict[str, Any]:
    """Emit a FilterSpec or ValidatedFilter in the shared filter schema."""
    return {
        "gain": fmt_float(spec.gain),
        "poles": [complex_to_json(p) for p in spec.poles],
        "zeros": [complex_to_json(z) for z in spec.zeros],
        "blaschke": [complex_to_json(b) for b in spec.blaschke_points],
        "z_power": int(spec.z_power),
    }


def load_filter(path: str) -> FilterSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_filter_document(json.load(fh))


def render_index(position: int, barred: bool) -> int | str:
    return f"{position}{BAR}" if barred else position


def parse_index(token: Any) -> tuple[int, bool]:
    if isinstance(token, int):
        return token, False
    if isinstance(token, str) and token.endswith(BAR):
        return int(token[: -len(BAR)]), True
    raise ValueError(f"malformed tensor index {token!r}")


def tensor_entries(array: np.ndarray, bar_pattern: tuple[bool, ...]) -> list[dict[str, Any]]:
    """Flatten a tensor into schema entries, C order, one bar flag per axis."""
    array = np.asarray(array)
    if array.ndim != len(bar_pattern):
        raise ValueError("bar pattern length must match tensor rank")
    entries = []
    for idx in np.ndindex(*array.shape):
        value = complex(array[idx])
        entries.append(
            {
                "idx": [render_index(i, barred) for i, barred in zip(idx, bar_pattern)],
                "re": fmt_float(value.real),
                "im": fmt_float(value.imag),
            }
        )
    return entries


def tensor_to_document(
    labels: tuple[str, ...],
    alpha: float | None,
    blocks: list[tuple[np.ndarray, tuple[bool, ...]]],
) -> dict[str, Any]:
    """Shared tensor schema: labels, alpha, and a flat entry list.

    ``blocks`` pairs each component array with the bar pattern of its
    indices; entries from consecutive blocks are concatenated in order, so
    the document layout is deterministic.
    """
    entries: list[dict[str, Any]] = []
    for array, pattern in blocks:
        entries.extend(tensor_entries(array, pattern))
    return {
        "labels": list(labels),
        "alpha": None if alpha is None else fmt_float(alpha),
        "entries": entries,
    }


def parse_tensor_document(doc: dict[str, Any]) -> dict[tuple[bool, ...], np.ndarray]:
    """Rebuild dense arrays from a tensor document, keyed by bar pattern."""
    n = len(doc["labels"])
    grouped: dict[tuple[bool, ...], np.ndarray] = {}
    for entry in doc["entries"]:
        positions, bars = zip(*(parse_index(tok) for tok in entry["idx"]))
        pattern = tuple(bars)
        if pattern not in grouped:
            grouped[pattern] = np.zeros((n,) * len(pattern), dtype=complex)
        grouped[pattern][positions] = complex(entry["re"], entry["im"])
    return grouped


def _round_floats(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return fmt_float(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    raise TypeError(f"unserialisable value of type {type(obj)!r}")


def dumps_report(report: dict[str, Any]) -> str:
    """Deterministic JSON text: fixed key order, 12-significant-digit floats."""
    return json.dumps(_round_floats(report), indent=2, allow_nan=False, ensure_ascii=True)


def render_table(report: dict[str, Any]) -> str:
    """Human-readable rendering; JSON remains the machine contract."""
    report = _round_floats(report)
    lines: list[str] = []

    def emit(prefix: str, value: Any) -> None:
        if isinstance(value, dict):
            if set(value) == {"re", "im"}:
                lines.append(f"{prefix} = {value['re']:.12g} + {value['im']:.12g}i")
                return
            if prefix:
                lines.append(prefix)
            for k, v in value.items():
                emit(f"{'  ' if prefix else ''}{k}", v)
        elif isinstance(value, list):
            if value and isinstance(value[0], dict) and "idx" in value[0]:
                lines.append(prefix)
                for entry in value:
                    idx = ",".join(str(t) for t in entry["idx"])
                    lines.append(f"  [{idx}] = {entry['re']:.12g} + {entry['im']:.12g}i")
            else:
                lines.append(f"{prefix} = {value}")
        else:
            lines.append(f"{prefix} = {value}")

    emit("", report)
    return "\n".join(lines) + "\n"
