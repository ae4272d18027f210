"""The multi-target build model.

Graphs are immutable: every operation that changes one returns a new graph.
"""

from __future__ import annotations

import heapq
import posixpath
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import CycleDetected, DuplicateTarget, InvalidTarget, UnknownTarget, UnsupportedSource
from .makefile_import import ProjectManifest

TARGET_KINDS = ("opp_model_library", "executable", "test_executable", "imported")
CC_EXTENSIONS = (".cc", ".cpp", ".cxx")
MSG_EXTENSION = ".msg"


@dataclass(frozen=True)
class Target:
    name: str
    kind: str
    cc_sources: Tuple[str, ...] = ()
    msg_sources: Tuple[str, ...] = ()
    include_dirs: Tuple[str, ...] = ()
    defines: Tuple[str, ...] = ()
    own_ned_folders: Tuple[str, ...] = ()
    deps: Tuple[str, ...] = ()
    output_artifact: Optional[str] = None

    @property
    def is_library(self) -> bool:
        if self.kind == "opp_model_library":
            return True
        if self.kind == "imported" and self.output_artifact:
            return posixpath.splitext(self.output_artifact)[1] in (".so", ".dll", ".dylib")
        return False


class TargetGraph(Mapping[str, Target]):
    """Read-only, insertion-ordered mapping of target name to :class:`Target`."""

    __slots__ = ("_targets",)

    def __init__(self, targets: Iterable[Target] = ()) -> None:
        table: Dict[str, Target] = {}
        for t in targets:
            if t.name in table:
                raise DuplicateTarget(t.name)
            table[t.name] = t
        self._targets = MappingProxyType(table)

    def __getitem__(self, name: str) -> Target:
        return self._targets[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._targets)

    def __len__(self) -> int:
        return len(self._targets)

    def __repr__(self) -> str:
        return f"TargetGraph({list(self._targets)})"

    def with_target(self, target: Target) -> "TargetGraph":
        if target.name in self._targets:
            raise DuplicateTarget(target.name)
        return TargetGraph([*self._targets.values(), target])

    def require(self, name: str) -> Target:
        try:
            return self._targets[name]
        except KeyError:
            raise UnknownTarget(name) from None


def add_opp_target(
    graph: TargetGraph,
    name: str,
    kind: str,
    sources: Sequence[str] = (),
    include_dirs: Sequence[str] = (),
    defines: Sequence[str] = (),
    ned_folders: Sequence[str] = (),
    deps: Sequence[str] = (),
) -> TargetGraph:
    """Add a target built from sources; ``.msg`` files are kept apart for the message compiler."""
    if name in graph:
        raise DuplicateTarget(name)
    if not name or "/" in name:
        raise InvalidTarget(f"invalid target name {name!r}")
    if kind not in TARGET_KINDS or kind == "imported":
        raise InvalidTarget(f"{name}: kind must be one of opp_model_library, executable, test_executable")
    cc: List[str] = []
    msg: List[str] = []
    for src in sources:
        ext = posixpath.splitext(src)[1]
        if ext in CC_EXTENSIONS:
            cc.append(src)
        elif ext == MSG_EXTENSION:
            msg.append(src)
        else:
            raise UnsupportedSource(src, ext)
    if kind in ("executable", "test_executable") and not cc:
        raise InvalidTarget(f"{name}: {kind} needs at least one C++ source")
    return graph.with_target(
        Target(
            name=name,
            kind=kind,
            cc_sources=tuple(cc),
            msg_sources=tuple(msg),
            include_dirs=tuple(include_dirs),
            defines=tuple(defines),
            own_ned_folders=tuple(dict.fromkeys(ned_folders)),
            deps=tuple(deps),
        )
    )


def import_opp_target(graph: TargetGraph, manifest: ProjectManifest) -> TargetGraph:
    """Add a pre-built project; relative paths are anchored at its project root."""
    if manifest.name in graph:
        raise DuplicateTarget(manifest.name)
    root = manifest.project_root

    def anchor(path: str) -> str:
        return posixpath.normpath(posixpath.join(root, path))

    return graph.with_target(
        Target(
            name=manifest.name,
            kind="imported",
            include_dirs=tuple(anchor(d) for d in manifest.include_dirs),
            defines=tuple(manifest.defines),
            own_ned_folders=tuple(manifest.ned_folders) or (root,),
            output_artifact=anchor(manifest.output_artifact),
        )
    )


def resolve(graph: TargetGraph) -> List[str]:
    """Topological order, dependencies first; ties go to the earlier-inserted target.

    Raises:
        UnknownTarget: a dependency names a target that is not in the graph.
        CycleDetected: the dependency relation has a cycle.
    """
    index = {name: i for i, name in enumerate(graph)}
    dependents: Dict[str, List[str]] = {name: [] for name in graph}
    missing: Dict[str, int] = {}
    for name, target in graph.items():
        unique = list(dict.fromkeys(target.deps))
        for dep in unique:
            if dep not in graph:
                raise UnknownTarget(dep)
            dependents[dep].append(name)
        missing[name] = len(unique)

    ready = [index[n] for n, count in missing.items() if count == 0]
    heapq.heapify(ready)
    names = list(graph)
    order: List[str] = []
    while ready:
        name = names[heapq.heappop(ready)]
        order.append(name)
        for dependent in dependents[name]:
            missing[dependent] -= 1
            if missing[dependent] == 0:
                heapq.heappush(ready, index[dependent])
    if len(order) != len(graph):
        raise CycleDetected(_find_cycle(graph, set(graph) - set(order)))
    return order


def _find_cycle(graph: TargetGraph, remaining: set) -> List[str]:
    # every remaining node has a remaining dependency, so following the first
    # such edge from the earliest node must eventually revisit a node
    start = next(n for n in graph if n in remaining)
    path: List[str] = []
    seen: Dict[str, int] = {}
    node = start
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = next(d for d in graph[node].deps if d in remaining)
    cycle = path[seen[node]:]
    first = min(range(len(cycle)), key=lambda i: list(graph).index(cycle[i]))
    return cycle[first:] + cycle[:first]


def transitive_deps(graph: TargetGraph, name: str) -> List[str]:
    """Self-first depth-first preorder over *name* and everything it depends on."""
    graph.require(name)
    order: List[str] = []
    seen = set()
    stack = [name]
    while stack:
        current = stack.pop()
        if current in seen:
            continue
        seen.add(current)
        order.append(current)
        target = graph.require(current)
        stack.extend(reversed(target.deps))
    return order


def collect_ned_folders(graph: TargetGraph, name: str) -> List[str]:
    folders: Dict[str, None] = {}
    for target_name in transitive_deps(graph, name):
        for folder in graph[target_name].own_ned_folders:
            folders.setdefault(folder)
    return list(folders)
