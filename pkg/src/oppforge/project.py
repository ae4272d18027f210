"""Loading ``oppforge.json`` and turning it into graphs and run specs."""

from __future__ import annotations

import dataclasses
import glob
import os
import posixpath
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import jsonschema

from .errors import ProjectFileError
from .graph import TargetGraph, add_opp_target, collect_ned_folders, import_opp_target, transitive_deps
from .build_plan import artifact_path
from .jsonc import parse_jsonc
from .makefile_import import manifest_from_vars, parse_opp_makefile
from .run_config import RunSpec

DEFAULT_PROJECT_FILE = "oppforge.json"

_STR_LIST = {"type": "array", "items": {"type": "string"}}

PROJECT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "omnetpp_root": {"type": "string"},
        "mode": {"enum": ["release", "debug"]},
        "build_dir": {"type": "string", "minLength": 1},
        "flags": _STR_LIST,
        "targets": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name", "kind"],
                "properties": {
                    "name": {"type": "string", "pattern": r"^[^/\\]+$"},
                    "kind": {"enum": ["opp_model_library", "executable", "test_executable"]},
                    "sources": _STR_LIST,
                    "include_dirs": _STR_LIST,
                    "defines": _STR_LIST,
                    "ned_folders": _STR_LIST,
                    "deps": _STR_LIST,
                },
            },
        },
        "imports": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["makefile"],
                "properties": {
                    "makefile": {"type": "string"},
                    "project_root": {"type": "string"},
                    "name": {"type": "string"},
                },
            },
        },
        "runs": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name", "target", "ini_file"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "target": {"type": "string"},
                    "ini_file": {"type": "string", "minLength": 1},
                    "working_dir": {"type": "string"},
                    "extra_args": _STR_LIST,
                },
            },
        },
        "ide": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kit_name"],
            "properties": {
                "kit_name": {"type": "string"},
                "flavors": {"type": "array", "items": {"enum": ["gdb", "lldb"]}, "uniqueItems": True},
                "env_script_style": {"enum": ["windows_cmd", "posix_sh"]},
                "venv": {"type": "string"},
                "c_compiler": {"type": "string"},
                "cxx_compiler": {"type": "string"},
                "strict": {"type": "boolean"},
            },
        },
    },
}


@dataclass(frozen=True)
class ProjectFile:
    path: str
    root: str
    data: Dict[str, Any]

    @property
    def mode(self) -> str:
        return self.data.get("mode", "release")

    @property
    def build_dir(self) -> str:
        return self.data.get("build_dir", "build")

    @property
    def omnetpp_root(self) -> Optional[str]:
        value = self.data.get("omnetpp_root")
        return None if value is None else self.resolve(value)

    @property
    def ide(self) -> Optional[Dict[str, Any]]:
        return self.data.get("ide")

    def resolve(self, path: str) -> str:
        return posixpath.normpath(posixpath.join(self.root, os.path.expanduser(path)))


def load_project(path) -> ProjectFile:
    """Read and validate a project file.  Comments and trailing commas are allowed."""
    text = Path(path).read_text(encoding="utf-8")
    data = parse_jsonc(text)
    try:
        jsonschema.validate(data, PROJECT_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ProjectFileError(f"{path}: {where}: {exc.message}") from None
    root = str(Path(path).absolute().parent)
    return ProjectFile(str(path), root, data)


def expand_sources(project: ProjectFile, patterns: List[str]) -> List[str]:
    """Project-relative source paths; each pattern's matches are sorted."""
    found: List[str] = []
    for pattern in patterns:
        if glob.has_magic(pattern):
            matches = sorted(
                posixpath.relpath(Path(m).as_posix(), project.root)
                for m in glob.glob(os.path.join(project.root, pattern), recursive=True)
                if os.path.isfile(m)
            )
            if not matches:
                raise ProjectFileError(f"source pattern {pattern!r} matches nothing")
        else:
            if not os.path.isfile(project.resolve(pattern)):
                raise ProjectFileError(f"source file {pattern!r} does not exist")
            matches = [posixpath.normpath(pattern)]
        for m in matches:
            if m not in found:
                found.append(m)
    return found


def build_graph(project: ProjectFile, mode: Optional[str] = None) -> TargetGraph:
    mode = mode or project.mode
    graph = TargetGraph()
    for entry in project.data.get("imports", []):
        makefile = project.resolve(entry["makefile"])
        if not os.path.isfile(makefile):
            raise ProjectFileError(f"imported Makefile {entry['makefile']!r} does not exist")
        root = project.resolve(entry.get("project_root", posixpath.dirname(entry["makefile"]) or "."))
        vars = parse_opp_makefile(Path(makefile).read_text(encoding="utf-8", errors="replace"))
        manifest = manifest_from_vars(vars, root, mode)
        # register under the release name so deps read the same in both modes
        name = entry.get("name") or manifest_from_vars(vars, root, "release").name
        graph = import_opp_target(graph, dataclasses.replace(manifest, name=name))
    for entry in project.data.get("targets", []):
        ned = entry.get("ned_folders")
        graph = add_opp_target(
            graph,
            entry["name"],
            entry["kind"],
            sources=expand_sources(project, entry.get("sources", [])),
            include_dirs=entry.get("include_dirs", []),
            defines=entry.get("defines", []),
            ned_folders=[project.resolve(d) for d in ned] if ned else [project.root],
            deps=entry.get("deps", []),
        )
    return graph


def library_load_name(artifact: str) -> str:
    """Path form the runner's ``-l`` expects: no ``lib`` prefix, no extension."""
    directory, filename = posixpath.split(artifact)
    stem = filename
    for ext in (".so", ".dll", ".dylib"):
        if stem.endswith(ext):
            stem = stem[: -len(ext)]
            break
    if stem.startswith("lib") and len(stem) > 3:
        stem = stem[3:]
    return posixpath.join(directory, stem)


def run_specs(project: ProjectFile, graph: TargetGraph, mode: Optional[str] = None) -> Dict[str, RunSpec]:
    mode = mode or project.mode
    specs: Dict[str, RunSpec] = {}
    for entry in project.data.get("runs", []):
        if entry["name"] in specs:
            raise ProjectFileError(f"run {entry['name']!r} is declared twice")
        target = graph.require(entry["target"])
        working_dir = project.resolve(entry.get("working_dir", "."))
        ini = entry["ini_file"]
        if not os.path.isfile(posixpath.join(working_dir, ini)):
            raise ProjectFileError(f"run {entry['name']!r}: ini file {ini!r} not found in {working_dir}")
        libraries = []
        for member in transitive_deps(graph, target.name):
            t = graph[member]
            if t.is_library:
                libraries.append(library_load_name(project.resolve(artifact_path(t, mode, project.build_dir))))
        specs[entry["name"]] = RunSpec(
            name=entry["name"],
            target=target.name,
            ini_file=ini,
            working_dir=working_dir,
            ned_folders=tuple(collect_ned_folders(graph, target.name)),
            libraries=tuple(libraries),
            extra_args=tuple(entry.get("extra_args", [])),
            target_is_library=target.is_library,
        )
    return specs
