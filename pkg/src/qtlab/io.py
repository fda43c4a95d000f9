"""Reading and writing graphs and actions.

Two JSON formats:

qtlab-graph-v1
    {"format": "qtlab-graph-v1", "vertices": [...], "edges": [["a","b"], ...],
     "boundary": [...]}           (boundary optional)

qtlab-action-v1
    {"format": "qtlab-action-v1", "graph": <graph object or file path>,
     "mode": "automorphism" | "isometry",
     "generators": [{"name": "a", "map": [["v","w"], ...]}, ...]}

Generator maps list forward images only; inverses are derived.  Non-injective
maps and duplicate edges are rejected.
"""

from __future__ import annotations

import json
import os
from typing import Optional, Union

from .errors import FormatError
from .metric_graph import MetricGraph

GRAPH_FORMAT = "qtlab-graph-v1"
ACTION_FORMAT = "qtlab-action-v1"


def graph_to_dict(g: MetricGraph) -> dict:
    out = {
        "format": GRAPH_FORMAT,
        "vertices": list(g.vertex_ids),
        "edges": [[a, b] for a, b in g.edges()],
    }
    if g.boundary:
        out["boundary"] = list(g.boundary)
    return out


def graph_from_dict(d: dict, allow_disconnected: bool = False) -> MetricGraph:
    if not isinstance(d, dict) or d.get("format") != GRAPH_FORMAT:
        raise FormatError(f"expected format {GRAPH_FORMAT!r}, got {d.get('format') if isinstance(d, dict) else type(d)!r}")
    for key in ("vertices", "edges"):
        if key not in d:
            raise FormatError(f"graph object missing {key!r}")
    edges = []
    for e in d["edges"]:
        if not isinstance(e, (list, tuple)) or len(e) != 2:
            raise FormatError(f"edge entries must be pairs, got {e!r}")
        edges.append((e[0], e[1]))
    try:
        return MetricGraph(
            d["vertices"], edges,
            boundary=d.get("boundary", ()),
            allow_disconnected=allow_disconnected,
        )
    except FormatError:
        raise
    except Exception as exc:
        if isinstance(exc, (KeyboardInterrupt, SystemExit)):
            raise
        from .errors import QtlabError
        if isinstance(exc, QtlabError):
            raise
        raise FormatError(f"bad graph object: {exc}") from exc


def save_graph(g: MetricGraph, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_dict(g), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_graph(path: str, allow_disconnected: bool = False) -> MetricGraph:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    return graph_from_dict(d, allow_disconnected=allow_disconnected)


def action_to_dict(action, graph_ref: Optional[str] = None) -> dict:
    """Serialize a GroupAction; graph_ref, when given, replaces the inline
    graph object with a file path reference."""
    gens = []
    for gm in action.generators:
        pairs = sorted((action.space.vertex_ids[s], action.space.vertex_ids[t])
                       for s, t in gm.forward.items())
        gens.append({"name": gm.name, "map": [[a, b] for a, b in pairs]})
    return {
        "format": ACTION_FORMAT,
        "graph": graph_ref if graph_ref is not None else graph_to_dict(action.space),
        "mode": action.mode,
        "generators": gens,
    }


def action_from_dict(d: dict, base_dir: str = ".", allow_disconnected: bool = False):
    from .group_action import GroupAction

    if not isinstance(d, dict) or d.get("format") != ACTION_FORMAT:
        raise FormatError(f"expected format {ACTION_FORMAT!r}")
    for key in ("graph", "mode", "generators"):
        if key not in d:
            raise FormatError(f"action object missing {key!r}")
    graph = d["graph"]
    if isinstance(graph, str):
        g = load_graph(os.path.join(base_dir, graph), allow_disconnected=allow_disconnected)
    else:
        g = graph_from_dict(graph, allow_disconnected=allow_disconnected)
    if d["mode"] not in ("automorphism", "isometry"):
        raise FormatError(f"unknown mode {d['mode']!r}")
    gens = []
    for entry in d["generators"]:
        if "name" not in entry or "map" not in entry:
            raise FormatError("generator entries need 'name' and 'map'")
        pairs = {}
        for p in entry["map"]:
            if not isinstance(p, (list, tuple)) or len(p) != 2:
                raise FormatError(f"map entries must be pairs, got {p!r}")
            if p[0] in pairs:
                raise FormatError(f"generator {entry['name']!r}: duplicate source {p[0]!r}")
            pairs[p[0]] = p[1]
        gens.append((entry["name"], pairs))
    return GroupAction(g, gens, mode=d["mode"])


def save_action(action, path: str, graph_ref: Optional[str] = None) -> None:
    with open(path, "w") as fh:
        json.dump(action_to_dict(action, graph_ref=graph_ref), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_action(path: str, allow_disconnected: bool = False):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    return action_from_dict(d, base_dir=os.path.dirname(path) or ".", allow_disconnected=allow_disconnected)
