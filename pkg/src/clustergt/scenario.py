"""Scenario files: the text format describing an input system.

Three mutually exclusive source kinds (see docs/format.md):

  graph     -- ``n <count>`` plus ``edge <i> <j> <p>`` lines
  ensemble  -- ``n <count>`` plus ``formation {..} {..} prob <p>`` lines
  expsplit  -- a single ``expsplit f <levels> delta <size>`` line

Probabilities written as decimals or a/b ratios are kept exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Optional

from ._format import parse_num
from .errors import ScenarioError
from .expsplit import ExpSplitParams, generate
from .model import (
    ClusterFormation,
    FormationEnsemble,
    RandomConnectionGraph,
    enumerate_formations,
)
from .tree import FormationTree, validate_tree


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario with exactly one source kind."""

    kind: str  # "graph" | "ensemble" | "expsplit"
    graph: Optional[RandomConnectionGraph] = None
    ensemble_items: Optional[tuple] = None  # ((clusters, prob), ...)
    expsplit: Optional[ExpSplitParams] = None
    n: Optional[int] = None

    def to_ensemble(self) -> FormationEnsemble:
        if self.kind == "graph":
            return enumerate_formations(self.graph)
        if self.kind == "ensemble":
            return FormationEnsemble.build(
                (ClusterFormation.from_sets(self.n, sets), p)
                for sets, p in self.ensemble_items
            )
        return generate(self.expsplit).ensemble

    def to_tree(self) -> FormationTree:
        if self.kind == "expsplit":
            return generate(self.expsplit)
        return validate_tree(self.to_ensemble())


def _parse_cluster_token(tok: str, path, lineno) -> tuple:
    if not (tok.startswith("{") and tok.endswith("}")):
        raise ScenarioError(f"malformed cluster {tok!r}", path, lineno)
    body = tok[1:-1]
    try:
        members = tuple(int(x) for x in body.split(",") if x != "")
    except ValueError:
        raise ScenarioError(f"malformed cluster {tok!r}", path, lineno) from None
    if not members:
        raise ScenarioError("empty cluster", path, lineno)
    return members


def parse_scenario_text(text: str, path="<string>") -> Scenario:
    n: Optional[int] = None
    edges: list = []
    formations: list = []
    expsplit: Optional[ExpSplitParams] = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        if key == "n":
            if n is not None:
                raise ScenarioError("duplicate n line", path, lineno)
            if len(parts) != 2:
                raise ScenarioError("usage: n <count>", path, lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise ScenarioError(f"bad count {parts[1]!r}", path, lineno) from None
        elif key == "edge":
            if len(parts) != 4:
                raise ScenarioError("usage: edge <i> <j> <p>", path, lineno)
            try:
                i, j = int(parts[1]), int(parts[2])
                p = parse_num(parts[3])
            except ValueError:
                raise ScenarioError(f"bad edge line {line!r}", path, lineno) from None
            edges.append((i, j, p, lineno))
        elif key == "formation":
            if len(parts) < 4 or parts[-2] != "prob":
                raise ScenarioError(
                    "usage: formation {..} {..} prob <p>", path, lineno
                )
            clusters = tuple(
                _parse_cluster_token(tok, path, lineno) for tok in parts[1:-2]
            )
            try:
                p = parse_num(parts[-1])
            except ValueError:
                raise ScenarioError(f"bad probability {parts[-1]!r}", path, lineno) from None
            formations.append((clusters, p, lineno))
        elif key == "expsplit":
            if len(parts) != 5 or parts[1] != "f" or parts[3] != "delta":
                raise ScenarioError(
                    "usage: expsplit f <levels> delta <size>", path, lineno
                )
            if expsplit is not None:
                raise ScenarioError("duplicate expsplit line", path, lineno)
            try:
                expsplit = ExpSplitParams(f=int(parts[2]), delta=int(parts[4]))
            except ValueError as exc:
                raise ScenarioError(str(exc), path, lineno) from None
        else:
            raise ScenarioError(f"unknown directive {key!r}", path, lineno)

    kinds = [
        name
        for name, present in (
            ("graph", bool(edges)),
            ("ensemble", bool(formations)),
            ("expsplit", expsplit is not None),
        )
        if present
    ]
    if len(kinds) > 1:
        raise ScenarioError(f"mixed source kinds {kinds}; use exactly one", path)
    if expsplit is not None:
        if n is not None:
            raise ScenarioError("n is implied by expsplit parameters", path)
        return Scenario(kind="expsplit", expsplit=expsplit)
    if n is None:
        raise ScenarioError("missing n line", path)
    if formations:
        try:
            items = tuple((clusters, p) for clusters, p, _ in formations)
            sc = Scenario(kind="ensemble", ensemble_items=items, n=n)
            sc.to_ensemble()  # validate eagerly for good line-less messages
            return sc
        except (ValueError, ScenarioError) as exc:
            raise ScenarioError(f"bad ensemble: {exc}", path) from None
    # graph kind; an edge-free graph is legal (single trivial formation)
    try:
        graph = RandomConnectionGraph.build(n, [(i, j, p) for i, j, p, _ in edges])
    except ValueError as exc:
        raise ScenarioError(str(exc), path) from None
    return Scenario(kind="graph", graph=graph, n=n)


def parse_scenario(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}", path) from None
    return parse_scenario_text(text, path=str(path))


def bundled_scenario_path(name: str):
    """Filesystem path of a scenario shipped with the package."""
    return resources.files("clustergt").joinpath("scenarios", name)


def parse_ensemble_csv(text: str) -> FormationEnsemble:
    """Re-parse the CSV emitted by the enumerate command (round-trip)."""
    import csv
    import io

    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:4] != ["index", "sigma", "prob", "clusters"]:
        raise ScenarioError("not an ensemble CSV (missing header)")
    items = []
    n = 0
    parsed = []
    for row in rows[1:]:
        if not row:
            continue
        _, _, prob_s, clusters_s = row[0], row[1], row[2], row[3]
        clusters = tuple(
            tuple(int(v) for v in tok.strip("{}").split(","))
            for tok in clusters_s.split("},{")
        )
        n = max(n, max(max(c) for c in clusters))
        parsed.append((clusters, parse_num(prob_s)))
    for clusters, p in parsed:
        items.append((ClusterFormation.from_sets(n, clusters), p))
    return FormationEnsemble.build(items)


def format_clusters(form: ClusterFormation) -> str:
    return ",".join("{" + ",".join(str(v) for v in c) + "}" for c in form.clusters)
