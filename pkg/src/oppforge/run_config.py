"""Run, debug and memcheck invocations for a simulation."""

from __future__ import annotations

import shutil
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import EmptyNedSet, InvalidRunSpec
from .toolchain import OmnetInstall

NED_SEPARATOR = ";"
MEMCHECK_PREFIX = ("valgrind", "--tool=memcheck")


@dataclass(frozen=True)
class RunSpec:
    name: str
    target: str
    ini_file: str
    working_dir: str
    ned_folders: Tuple[str, ...]
    libraries: Tuple[str, ...] = ()
    extra_args: Tuple[str, ...] = ()
    target_is_library: bool = False

    def __post_init__(self) -> None:
        if not self.ini_file:
            raise InvalidRunSpec(f"run {self.name!r}: ini_file must not be empty")
        if not self.ned_folders:
            raise InvalidRunSpec(f"run {self.name!r}: no NED folders")
        if self.target_is_library and not self.libraries:
            raise InvalidRunSpec(f"run {self.name!r}: library target without libraries to load")


@dataclass(frozen=True)
class RunTarget:
    argv: Tuple[str, ...]
    working_dir: str


def format_ned_arg(ned_folders: Sequence[str]) -> str:
    if not ned_folders:
        raise EmptyNedSet("EmptyNedSet: at least one NED folder is required")
    return NED_SEPARATOR.join(ned_folders)


def runner_args(spec: RunSpec) -> List[str]:
    """Everything after the runner: NED path, libraries, extra args, ini file."""
    args = ["-n", format_ned_arg(spec.ned_folders)]
    for lib in spec.libraries:
        args += ["-l", lib]
    args += list(spec.extra_args)
    args.append(spec.ini_file)
    return args


def valgrind_available(search_path: Optional[str] = None) -> bool:
    return shutil.which("valgrind", path=search_path) is not None


def make_run_targets(
    spec: RunSpec, install: OmnetInstall, mode: str, valgrind_present: bool
) -> Dict[str, RunTarget]:
    """``run_<name>`` always, ``debug_<name>`` for debug builds, ``memcheck_<name>`` with Valgrind."""
    args = runner_args(spec)
    run = (install.runner_release, *args)
    targets = {f"run_{spec.name}": RunTarget(run, spec.working_dir)}
    if mode == "debug":
        targets[f"debug_{spec.name}"] = RunTarget((install.runner_debug, *args), spec.working_dir)
    if valgrind_present:
        targets[f"memcheck_{spec.name}"] = RunTarget(MEMCHECK_PREFIX + run, spec.working_dir)
    return targets
