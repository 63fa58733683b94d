"""Dataset ingestion and graph emission (DOT and JSON)."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .discovery import CausalGraph
from .errors import ValidationError

__all__ = ["Dataset", "ingest_csv", "write_dataset_csv", "emit_graph", "parse_graph_json"]


@dataclass
class Dataset:
    """Column-named sample matrix; rows are observations."""

    names: list
    values: np.ndarray
    centered: bool = False

    def validate(self) -> None:
        if self.values.ndim != 2:
            raise ValidationError(f"expected 2-d values, got shape {self.values.shape}")
        if len(self.names) != self.values.shape[1]:
            raise ValidationError("name count does not match column count")
        if len(set(self.names)) != len(self.names):
            raise ValidationError("duplicate variable names")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("non-finite values in dataset")

    def center(self) -> "Dataset":
        if self.centered:
            return self
        return Dataset(names=list(self.names),
                       values=self.values - self.values.mean(axis=0),
                       centered=True)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_vars(self) -> int:
        return self.values.shape[1]


def ingest_csv(path, delimiter: str = ",") -> Dataset:
    """Read a header-plus-numeric-rows CSV and return a centered Dataset.

    Rejects missing and non-finite cells outright (no imputation), naming
    the offending row and column.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file") from None
        names = [h.strip() for h in header]
        if any(not n for n in names):
            raise ValidationError(f"{path}: blank column name in header")
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValidationError(f"{path}: duplicate column names {dupes}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(names):
                raise ValidationError(
                    f"{path}: row {lineno} has {len(row)} cells, expected {len(names)}")
            parsed = []
            for name, cell in zip(names, row):
                text = cell.strip()
                if not text:
                    raise ValidationError(
                        f"{path}: missing value at row {lineno}, column '{name}'")
                try:
                    value = float(text)
                except ValueError:
                    raise ValidationError(
                        f"{path}: non-numeric value '{text}' at row {lineno}, "
                        f"column '{name}'") from None
                if not np.isfinite(value):
                    raise ValidationError(
                        f"{path}: non-finite value '{text}' at row {lineno}, "
                        f"column '{name}'")
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    values = np.asarray(rows, dtype=np.float64)
    ds = Dataset(names=names, values=values, centered=False)
    ds.validate()
    return ds.center()


def write_dataset_csv(dataset: Dataset, path) -> None:
    """Write samples with full round-trip precision."""
    dataset.validate()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(dataset.names)
        for row in dataset.values:
            writer.writerow([repr(float(v)) for v in row])


# ---------------------------------------------------------------------------
# graph emission


def _check_names(graph: CausalGraph, names) -> list:
    names = [str(n) for n in names]
    if len(names) != graph.n_vars:
        raise ValidationError(
            f"{len(names)} names for a {graph.n_vars}-variable graph")
    if len(set(names)) != len(names):
        raise ValidationError("duplicate variable names")
    return names


def emit_graph(graph: CausalGraph, names, fmt: str = "dot", config: dict | None = None) -> str:
    """Render a causal graph as DOT or JSON text.

    DOT output: ``"cause" -> "effect"`` per directed edge,
    ``[dir=both]`` per confounded pair, ``[style=dashed, dir=none]`` per
    unresolved pair; lines are sorted for byte-stable diffs.
    """
    graph.validate()
    names = _check_names(graph, names)
    if fmt == "dot":
        nodes = sorted(f'  "{n}";' for n in names)
        edges = []
        for j, i in graph.directed_pairs():
            edges.append(f'  "{names[j]}" -> "{names[i]}";')
        for i, j in graph.bidirected_pairs():
            edges.append(f'  "{names[i]}" -> "{names[j]}" [dir=both];')
        for i, j in sorted(graph.unresolved):
            edges.append(f'  "{names[i]}" -> "{names[j]}" [style=dashed, dir=none];')
        return "\n".join(["digraph causal {"] + nodes + sorted(edges) + ["}"]) + "\n"
    if fmt == "json":
        doc = {
            "variables": names,
            "directed": [[names[j], names[i]] for j, i in graph.directed_pairs()],
            "bidirected": [[names[i], names[j]] for i, j in graph.bidirected_pairs()],
            "unresolved": [[names[i], names[j]] for i, j in sorted(graph.unresolved)],
            "config": config,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    raise ValidationError(f"unknown graph format '{fmt}' (expected 'dot' or 'json')")


def parse_graph_json(text: str):
    """Inverse of ``emit_graph(..., fmt='json')``: returns (graph, names)."""
    doc = json.loads(text)
    names = [str(n) for n in doc["variables"]]
    index = {n: k for k, n in enumerate(names)}
    d = len(names)
    parents = np.zeros((d, d), dtype=bool)
    confounded = np.zeros((d, d), dtype=bool)
    unresolved = set()
    for cause, effect in doc.get("directed", []):
        parents[index[effect], index[cause]] = True
    for a, b in doc.get("bidirected", []):
        confounded[index[a], index[b]] = confounded[index[b], index[a]] = True
    for a, b in doc.get("unresolved", []):
        i, j = sorted((index[a], index[b]))
        unresolved.add((i, j))
    graph = CausalGraph(parents=parents, confounded=confounded, unresolved=unresolved)
    graph.validate()
    return graph, names
