"""Output writers: PPR/embedding TSV and JSON, metric rows, sweep CSV."""

from __future__ import annotations

import csv
import json
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from private_ppr.dp import SparseVector
from private_ppr.evaluation import top_k

SWEEP_COLUMNS = ("variant", "mode", "epsilon", "sigma", "alpha", "xi", "k", "metric", "value", "stderr", "n_sources", "seed")


def write_ppr_tsv(stream: IO[str], scores: np.ndarray, labels: Sequence[str]) -> None:
    """``label<TAB>score`` lines, score descending then node id ascending."""
    for v in top_k(scores, len(scores)):
        stream.write(f"{labels[v]}\t{float(scores[v])!r}\n")


def ppr_json(scores: np.ndarray, source: int, labels: Sequence[str], **fields) -> dict:
    doc = {"source": labels[source], **fields, "scores": [float(x) for x in scores]}
    return doc


def sparse_ppr_json(vec: SparseVector, source: int, labels: Sequence[str], **fields) -> dict:
    entries = [[labels[i], v] for i, v in vec.entries()]
    return {"source": labels[source], "n": vec.n, **fields, "entries": entries}


def write_embedding_tsv(stream: IO[str], rows: Iterable[tuple[str, np.ndarray]]) -> None:
    for label, vec in rows:
        stream.write(label + "\t" + "\t".join(repr(float(x)) for x in vec) + "\n")


def dump_json(stream: IO[str], doc) -> None:
    json.dump(doc, stream, indent=1, sort_keys=False)
    stream.write("\n")


def metric_row(metric: str, value: float, *, k=None, epsilon=None, sigma=None, mode=None, seed=None) -> dict:
    return {"metric": metric, "k": k, "epsilon": epsilon, "sigma": sigma, "mode": mode, "seed": seed, "value": value}


def write_sweep_csv(stream: IO[str], rows: Iterable[Mapping]) -> None:
    writer = csv.DictWriter(stream, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _fmt(row.get(c)) for c in SWEEP_COLUMNS})


def read_sweep_csv(stream: IO[str]) -> list[dict]:
    return list(csv.DictReader(stream))


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value
