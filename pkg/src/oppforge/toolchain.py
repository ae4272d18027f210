"""Locating an OMNeT++ installation on disk."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Tuple

from .errors import Incomplete, NotFound
from .makevars import VarMap, parse_makefile_inc

RUNNER = "opp_run"
# The debug runner ships as opp_run_dbg; opp_run_debug is probed as a fallback.
DEBUG_RUNNERS = ("opp_run_dbg", "opp_run_debug")
# opp_msgtool replaced opp_msgc as the primary binary in 6.x; either will do.
MSG_COMPILERS = ("opp_msgc", "opp_msgtool")
EXE_SUFFIXES = ("", ".exe", ".cmd")

LLDB_FORMATTER_CANDIDATES = (
    "python/omnetpp/lldb/formatters/omnetpp.py",
    "python/omnetpp/lldb/omnetpp.py",
    "misc/lldb/formatters/omnetpp.py",
)

# Directories (relative to the root) whose presence adds them to PATH, in order.
TOOL_PATH_CANDIDATES = (
    "bin",
    "tools/win64/mingw64/bin",
    "tools/win64/usr/bin",
    "tools/win64/opt/mingw64/bin",
    "tools/win64/opt/bin",
    "tools/macosx/bin",
    "tools/linux/bin",
)

_VERSION_RE = re.compile(
    r"^\s*(?:omnetpp-|omnest-)?(\d+)\.(\d+)(?:\.\d+)*([A-Za-z]+[0-9]*)?\s*$", re.IGNORECASE
)


@dataclass(frozen=True)
class VersionId:
    major: int
    minor: int
    prerelease: Optional[str]
    raw: str

    def __str__(self) -> str:
        return self.raw

    @property
    def release_name(self) -> str:
        """``omnetpp-<version>``, whichever form ``raw`` was written in."""
        raw = self.raw.strip()
        return raw if raw.lower().startswith(("omnetpp-", "omnest-")) else f"omnetpp-{raw}"


def parse_version(text: str) -> VersionId:
    m = _VERSION_RE.match(text)
    if not m:
        raise ValueError(f"not a version identifier: {text!r}")
    pre = m.group(3).lower() if m.group(3) else None
    return VersionId(int(m.group(1)), int(m.group(2)), pre, text)


def format_version(v: VersionId) -> str:
    return v.raw


def version_gate(v: VersionId) -> bool:
    """Whether the LLDB pretty-printer ships with this version (6.0 and later)."""
    return (v.major, v.minor) >= (6, 0)


@dataclass(frozen=True)
class OmnetInstall:
    root: str
    version: VersionId
    bin_dir: str
    include_dir: str
    lib_dir: str
    msgc_path: str
    runner_release: str
    runner_debug: str
    lldb_formatter: Optional[str]
    tool_path_entries: Tuple[str, ...]
    makefile_vars: Mapping[str, str] = field(default_factory=dict, compare=False, hash=False)

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "version": self.version.raw,
            "bin_dir": self.bin_dir,
            "include_dir": self.include_dir,
            "lib_dir": self.lib_dir,
            "msgc_path": self.msgc_path,
            "runner_release": self.runner_release,
            "runner_debug": self.runner_debug,
            "lldb_formatter": self.lldb_formatter,
            "tool_path_entries": list(self.tool_path_entries),
        }


def _find_exe(directory: Path, names: Iterable[str]) -> Optional[Path]:
    for name in names:
        for suffix in EXE_SUFFIXES:
            candidate = directory / (name + suffix)
            if candidate.is_file():
                return candidate
    return None


def _install_root_from_bin(bin_dir: Path) -> Path:
    for candidate in (bin_dir, *bin_dir.parents):
        if (candidate / "Makefile.inc").is_file() or (candidate / "Version").is_file():
            return candidate
    return bin_dir.parent if bin_dir.name == "bin" else bin_dir


def _locate_root(env_root_override: Optional[os.PathLike], search_path: Sequence) -> Path:
    if env_root_override is not None:
        root = Path(env_root_override).absolute()
        if not root.is_dir() or _find_exe(root / "bin", [RUNNER]) is None:
            raise NotFound(f"NotFound: no OMNeT++ runner under {root}")
        return root
    for entry in search_path:
        if not entry:
            continue
        directory = Path(entry).absolute()
        if _find_exe(directory, [RUNNER]) is not None:
            return _install_root_from_bin(directory)
    raise NotFound("NotFound: no OMNeT++ installation on the search path")


def _checked_version(text: str, root: Path) -> VersionId:
    try:
        return parse_version(text)
    except ValueError:
        raise Incomplete(f"readable version marker (got {text!r})", str(root)) from None


def _read_version(root: Path, inc_vars: VarMap) -> VersionId:
    marker = root / "Version"
    if marker.is_file():
        text = marker.read_text(encoding="utf-8", errors="replace").strip()
        if text:
            return _checked_version(text.splitlines()[0], root)
    for name in ("OMNETPP_VERSION", "OMNETPP_RELEASE"):
        if inc_vars.get(name):
            return _checked_version(inc_vars[name], root)
    raise Incomplete("version marker (Version file or OMNETPP_VERSION)", str(root))


def discover(env_root_override: Optional[os.PathLike] = None, search_path: Sequence = ()) -> OmnetInstall:
    """Find an installation: explicit override first, then the first
    *search_path* entry that holds ``opp_run``.

    Raises:
        NotFound: nothing resembling an installation was located.
        Incomplete: an installation was found but lacks a required part.
    """
    if env_root_override is None and not search_path:
        raise NotFound("NotFound: neither a root override nor a search path was given")
    root = _locate_root(env_root_override, search_path)

    inc_file = root / "Makefile.inc"
    inc_vars: VarMap = {}
    if inc_file.is_file():
        inc_vars = parse_makefile_inc(inc_file.read_text(encoding="utf-8", errors="replace"))
    version = _read_version(root, inc_vars)

    bin_dir = root / "bin"
    include_dir = root / "include"
    lib_dir = root / "lib"
    for label, path in (("bin directory", bin_dir), ("include directory", include_dir), ("lib directory", lib_dir)):
        if not path.is_dir():
            raise Incomplete(label, str(root))

    runner = _find_exe(bin_dir, [RUNNER])
    if runner is None:
        raise Incomplete(RUNNER, str(root))
    runner_debug = _find_exe(bin_dir, DEBUG_RUNNERS)
    if runner_debug is None:
        raise Incomplete(DEBUG_RUNNERS[0], str(root))
    msgc = _find_exe(bin_dir, MSG_COMPILERS)
    if msgc is None:
        raise Incomplete(MSG_COMPILERS[0], str(root))

    formatter = None
    if version_gate(version):
        for rel in LLDB_FORMATTER_CANDIDATES:
            if (root / rel).is_file():
                formatter = str(root / rel)
                break
        else:
            raise Incomplete("LLDB formatter script", str(root))

    entries = []
    for rel in TOOL_PATH_CANDIDATES:
        path = str(root / rel)
        if (root / rel).is_dir() and path not in entries:
            entries.append(path)

    return OmnetInstall(
        root=str(root),
        version=version,
        bin_dir=str(bin_dir),
        include_dir=str(include_dir),
        lib_dir=str(lib_dir),
        msgc_path=str(msgc),
        runner_release=str(runner),
        runner_debug=str(runner_debug),
        lldb_formatter=formatter,
        tool_path_entries=tuple(entries),
        makefile_vars=inc_vars,
    )
