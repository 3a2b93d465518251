"""Deterministic JSON/CSV reports and the matplotlib figures that sit beside them.

Report schema (version 1)
-------------------------
JSON summaries are objects with sorted keys and a ``meta`` block::

    {"meta": {"toolkit": "zaremba", "version": ..., "schema": 1,
              "command": ..., "config": {...}, "seed": ...},
     ...command specific fields...}

CSV sweeps start with ``# key=value`` comment lines carrying the same meta
block (config as compact JSON), then a header row, then data rows.  Nothing
time- or host-dependent is written, so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__

SCHEMA_VERSION = 1


def meta_block(command: str, config: dict, seed: int | None) -> dict:
    return {
        "toolkit": "zaremba",
        "version": __version__,
        "schema": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "seed": seed,
    }


def _plain(obj):
    """Recursively convert numpy scalars, dataclasses, tuples and non-finite floats."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _plain(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return _plain(obj.item())
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, complex):
        return {"re": _plain(obj.real), "im": _plain(obj.imag)}
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def dumps(payload: dict) -> str:
    return json.dumps(_plain(payload), sort_keys=True, indent=2) + "\n"


def write_json(path: str | Path, meta: dict, body: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps({"meta": meta, **body}))
    return path


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else str(value)
    return str(value)


def write_csv(path: str | Path, meta: dict, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        for key in ("toolkit", "version", "schema", "command", "seed"):
            fh.write(f"# {key}={meta[key]}\n")
        fh.write(f"# config={json.dumps(_plain(meta['config']), sort_keys=True, separators=(',', ':'))}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def read_csv(path: str | Path) -> tuple[dict, list[dict]]:
    """Inverse of :func:`write_csv`: (meta comments as strings, rows as dicts of strings)."""
    meta = {}
    lines = Path(path).read_text().splitlines()
    body = []
    for line in lines:
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = value
        else:
            body.append(line)
    return meta, list(csv.DictReader(body))


# --- figures -------------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update({"font.size": 9, "axes.grid": True, "grid.alpha": 0.3, "figure.dpi": 100})
    return plt


def save_figure(fig, path: str | Path) -> Path:
    """PNG without the software/time metadata so reruns produce identical bytes."""
    path = Path(path)
    fig.savefig(path, metadata={"Software": None}, bbox_inches="tight")
    _pyplot().close(fig)
    return path


def plot_census(path, ladder: Sequence[tuple[int, int, float]], label: str) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ns = [row[0] for row in ladder]
    ax.semilogx(ns, [row[2] for row in ladder], "o-", ms=3, label=label)
    ax.set_xlabel("N")
    ax.set_ylabel("#D_A(N) / N")
    ax.set_ylim(0, 1.05)
    ax.legend(loc="lower left")
    return save_figure(fig, path)


def plot_lambda(path, s_grid, lo, hi, bracket: tuple[float, float], label: str) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.fill_between(s_grid, lo, hi, alpha=0.35, label=f"lambda(s) bracket, {label}")
    ax.axhline(1.0, color="k", lw=0.8)
    for value in bracket:
        ax.axvline(2 * value, color="C3", lw=0.8, ls="--")
    ax.set_yscale("log")
    ax.set_xlabel("s")
    ax.set_ylabel("lambda")
    ax.legend(loc="upper right")
    return save_figure(fig, path)


def plot_ratio_scatter(path, xs, ys, xlabel: str, ylabel: str, limit: float | None = None) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(xs, ys, ".", ms=3)
    if limit is not None:
        ax.axhline(limit, color="C3", lw=0.8, ls="--")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    return save_figure(fig, path)


def plot_rays(path, rays: dict) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.2))
    for name, info in rays.items():
        ax.loglog(info["Y"], info["max_ratio"], "o-", ms=3, label=name)
    ax.set_xlabel("Y")
    ax.set_ylabel("count K^2 sqrt(q) / Y^2")
    if rays:
        ax.legend()
    return save_figure(fig, path)


def plot_spectrum(path, thetas, power, label: str) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.semilogy(thetas, np.maximum(power, 1e-12), lw=0.5, label=label)
    ax.set_xlabel("theta")
    ax.set_ylabel("|S(theta)|^2")
    ax.set_xlim(0, 1)
    ax.legend(loc="upper center")
    return save_figure(fig, path)
