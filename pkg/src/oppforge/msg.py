"""Planning message-compiler invocations for ``.msg`` files.

The compiler is never run here; this only decides what it will be asked to
produce and with which arguments.
"""

from __future__ import annotations

import posixpath
import re
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .errors import NotAMsgFile
from .toolchain import OmnetInstall

GENERATED_SOURCE_SUFFIX = "_m.cc"
GENERATED_HEADER_SUFFIX = "_m.h"

_IMPORT_RE = re.compile(r"^\s*import\s+([A-Za-z_][\w]*(?:\s*\.\s*[A-Za-z_][\w]*)*)\s*;")


@dataclass(frozen=True)
class GenStep:
    input: str
    outputs: Tuple[str, str]
    command: Tuple[str, ...]
    import_dirs: Tuple[str, ...]
    workdir: str


def relative_subpath(path: str) -> str:
    """Project-relative location of *path*, with ``..`` folded into ``__``.

    Folding keeps generated files inside the build directory even for inputs
    that live outside the project tree.
    """
    path = posixpath.normpath(path.replace("\\", "/"))
    parts = [p for p in path.split("/") if p not in ("", ".")]
    return "/".join("__" if p == ".." else p for p in parts)


def generated_paths(msg: str, build_dir: str) -> Tuple[str, str]:
    if not msg.endswith(".msg"):
        raise NotAMsgFile(f"NotAMsgFile: {msg}")
    stem = relative_subpath(msg)[: -len(".msg")]
    base = posixpath.join(build_dir, stem) if build_dir not in ("", ".") else stem
    return base + GENERATED_SOURCE_SUFFIX, base + GENERATED_HEADER_SUFFIX


def plan_msg(install: OmnetInstall, msg: str, import_dirs: Sequence[str], build_dir: str) -> GenStep:
    """Plan one compiler invocation: ``<msgc> -I <dir>... <msg>``.

    Paths in ``command`` are as given (project-relative); ``workdir`` is the
    directory receiving the generated pair, which is where the compiler runs.
    :func:`oppforge.build_plan.rebased_command` rewrites the paths for it.
    """
    source, header = generated_paths(msg, build_dir)
    command = [install.msgc_path]
    for directory in import_dirs:
        command += ["-I", directory]
    command.append(msg)
    return GenStep(
        input=msg,
        outputs=(source, header),
        command=tuple(command),
        import_dirs=tuple(import_dirs),
        workdir=posixpath.dirname(source) or ".",
    )


def scan_msg_imports(text: str) -> List[str]:
    """Dotted names from ``import a.b.C;`` lines, first-seen order, comments ignored."""
    names: List[str] = []
    for line in _strip_comments(text).splitlines():
        m = _IMPORT_RE.match(line)
        if m:
            name = re.sub(r"\s+", "", m.group(1))
            if name not in names:
                names.append(name)
    return names


def _strip_comments(text: str) -> str:
    out = []
    i = 0
    n = len(text)
    while i < n:
        if text.startswith("//", i):
            end = text.find("\n", i)
            i = n if end < 0 else end
        elif text.startswith("/*", i):
            end = text.find("*/", i + 2)
            block = text[i : n if end < 0 else end + 2]
            out.append("\n" * block.count("\n"))
            i = n if end < 0 else end + 2
        elif text[i] == '"':
            end = i + 1
            while end < n and text[end] != '"' and text[end] != "\n":
                end += 2 if text[end] == "\\" else 1
            out.append(text[i : end + 1])
            i = end + 1
        else:
            out.append(text[i])
            i += 1
    return "".join(out)
