"""Serialization helpers and matplotlib figures for command reports.

Figures are rendered with the Agg backend straight to PNG files; every figure
is accompanied by the JSON (and, for tabular data, CSV) it was drawn from.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def jsonable(obj):
    """Recursively convert numpy values, Fractions and tuple keys for json.dump."""
    if isinstance(obj, dict):
        return {_key(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    return obj


def _key(k):
    if isinstance(k, tuple):
        return ",".join(str(x) for x in k)
    return str(k)


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed indent, trailing newline)."""
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(obj, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def write_csv(rows, columns, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([jsonable(row.get(c, "")) for c in columns])
    return path


def format_table(rows, columns) -> str:
    """Left-aligned text table."""
    cells = [[str(c) for c in columns]] + [[_cell(r.get(c, "")) for c in columns] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    lines = ["  ".join(s.ljust(w) for s, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _cell(v):
    v = jsonable(v)
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def flatten(obj, prefix=""):
    """Nested dicts as (dotted key, value) rows, for the key/value table view."""
    rows = []
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            rows += flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    else:
        rows.append({"key": prefix, "value": obj})
    return rows


# ---------------------------------------------------------------- figures


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_components(components: dict, path, title="") -> Path:
    """Bar chart of isotypic component dimensions."""
    names = list(components)
    dims = [components[k]["dim"] for k in names]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.bar(range(len(names)), dims, color="#4c72b0")
    ax.set_xticks(range(len(names)), names, rotation=30, ha="right")
    ax.set_ylabel("dimension")
    ax.set_title(title)
    for i, v in enumerate(dims):
        ax.annotate(str(v), (i, v), ha="center", va="bottom", fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_spectrum(eigs, path, eps=None, title="") -> Path:
    """Histogram of Gram eigenvalues with the 1 +- eps band."""
    eigs = np.asarray(eigs, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.hist(eigs, bins=60, color="#55a868")
    if eps is not None:
        for x in (1 - eps, 1 + eps):
            ax.axvline(x, color="#c44e52", ls="--", lw=1)
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("count")
    ax.set_yscale("log")
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_matrix(M, path, title="", log=True) -> Path:
    """Heat map of a (Gram) matrix; log10(1 + |x|) when log is set."""
    A = np.abs(np.asarray(M, dtype=float))
    if log:
        A = np.log10(1 + A)
    fig, ax = plt.subplots(figsize=(5, 4.5))
    im = ax.imshow(A, cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, label="log10(1+|G|)" if log else "|G|")
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_counts(counts: dict, path, xlabel="", title="") -> Path:
    keys = list(counts)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar([str(k) for k in keys], [counts[k] for k in keys], color="#8172b2")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)
