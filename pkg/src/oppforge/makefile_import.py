"""Turning an ``opp_makemake``-generated Makefile into a :class:`ProjectManifest`."""

from __future__ import annotations

import posixpath
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Tuple

from .errors import MissingVariable, UnknownKind
from .makevars import VarMap, collect_raw, expand_all, iter_assignments

#: The placeholder opp_makemake appends to target names; empty in release mode.
MODE_PLACEHOLDER = "D"
DEBUG_SUFFIX = "_dbg"

KINDS = ("shared_library", "static_library", "executable")

# Linux conventions; the placeholders themselves are defined in Makefile.inc.
_KIND_PLACEHOLDERS = {
    "SHARED_LIB_SUFFIX": ("shared_library", ".so"),
    "A_LIB_SUFFIX": ("static_library", ".a"),
    "EXE_SUFFIX": ("executable", ""),
}
_LITERAL_SUFFIXES = {
    ".so": "shared_library",
    ".dll": "shared_library",
    ".dylib": "shared_library",
    ".a": "static_library",
    ".lib": "static_library",
}
# Present (and non-empty) only in the recursive, one-Makefile-per-directory layout.
_RECURSIVE_MARKERS = ("SUBDIRS", "SUBMAKEDIRS")


@dataclass(frozen=True)
class ProjectManifest:
    name: str
    kind: str
    output_artifact: str
    include_dirs: Tuple[str, ...]
    ned_folders: Tuple[str, ...]
    link_libs: Tuple[str, ...]
    defines: Tuple[str, ...]
    project_root: str

    def to_json(self) -> dict:
        data = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in data.items()}


def parse_opp_makefile(text: str) -> VarMap:
    """Read the variables of a generated project Makefile.

    ``$(D)`` is never expanded and assignments to ``D`` are dropped, so the
    mode stays open until :func:`manifest_from_vars`.
    """
    symbolic = (MODE_PLACEHOLDER,)
    return expand_all(collect_raw(iter_assignments(text), symbolic), symbolic)


def read_nedfolders(project_root) -> List[str]:
    root = Path(project_root)
    manifest = root / ".nedfolders"
    if not manifest.is_file():
        return [str(root)]
    folders: List[str] = []
    for line in manifest.read_text(encoding="utf-8", errors="replace").splitlines():
        entry = line.strip()
        if not entry or entry.startswith("#"):
            continue
        path = posixpath.normpath(posixpath.join(str(root), entry.replace("\\", "/")))
        if path not in folders:
            folders.append(path)
    return folders or [str(root)]


_MODE_REFS = (f"$({MODE_PLACEHOLDER})", f"${{{MODE_PLACEHOLDER}}}", f"${MODE_PLACEHOLDER}")


def _resolve_mode(value: str, mode: str, debug_suffix: str) -> str:
    suffix = debug_suffix if mode == "debug" else ""
    for ref in _MODE_REFS:
        value = value.replace(ref, suffix)
    return value


def _detect_kind(target: str) -> Tuple[str, str]:
    """Return ``(kind, placeholder_or_literal_suffix)`` for the TARGET value."""
    found = [p for p in _KIND_PLACEHOLDERS if f"$({p})" in target]
    if len(found) > 1:
        raise UnknownKind(f"UnknownKind: contradictory target suffixes {found} in {target!r}")
    if found:
        return _KIND_PLACEHOLDERS[found[0]][0], found[0]
    ext = posixpath.splitext(target)[1].lower()
    if ext in _LITERAL_SUFFIXES:
        return _LITERAL_SUFFIXES[ext], ext
    raise UnknownKind(f"UnknownKind: cannot tell the target kind from {target!r}")


def _tokens(value: str) -> List[str]:
    """Whitespace split that keeps ``$(...)`` groups and quoted runs whole."""
    tokens: List[str] = []
    current: List[str] = []
    depth = 0
    quote = ""
    for c in value:
        if quote:
            if c == quote:
                quote = ""
            else:
                current.append(c)
            continue
        if c in "\"'" and depth == 0:
            quote = c
            continue
        if c == "(":
            depth += 1
        elif c == ")" and depth:
            depth -= 1
        if c.isspace() and depth == 0:
            if current:
                tokens.append("".join(current))
                current = []
            continue
        current.append(c)
    if current:
        tokens.append("".join(current))
    return tokens


def _flag_values(value: str, flag: str) -> List[str]:
    out: List[str] = []
    tokens = _tokens(value)
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok == flag and i + 1 < len(tokens):
            out.append(tokens[i + 1])
            i += 2
            continue
        if tok.startswith(flag) and len(tok) > len(flag):
            out.append(tok[len(flag):])
        i += 1
    return out


def _link_libs(value: str, project_root: str, mode: str, debug_suffix: str) -> List[str]:
    libs: List[str] = []
    search_dirs: List[str] = []
    tokens = _tokens(value)
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok in ("-l", "-L") and i + 1 < len(tokens):
            tok = tok + tokens[i + 1]
            i += 1
        i += 1
        if tok.startswith("-l") and len(tok) > 2:
            libs.append(_resolve_mode(tok[2:], mode, debug_suffix))
        elif tok.startswith("-L") and len(tok) > 2:
            path = tok[2:].replace("\\", "/")
            search_dirs.append(posixpath.normpath(posixpath.join(project_root, path)))
        elif not tok.startswith("-") and "$(" not in tok:
            libs.append(_resolve_mode(tok, mode, debug_suffix))
    return libs + [d for d in search_dirs if d not in libs]


def manifest_from_vars(
    vars: VarMap, project_root, mode: str = "release", debug_suffix: str = DEBUG_SUFFIX
) -> ProjectManifest:
    """Build the import manifest for one mode.

    Raises:
        MissingVariable: TARGET is not defined.
        UnknownKind: the kind cannot be decided, or the Makefile belongs to a
            recursive (per-directory) layout.
    """
    if mode not in ("release", "debug"):
        raise ValueError(f"mode must be 'release' or 'debug', not {mode!r}")
    if "TARGET" not in vars or not vars["TARGET"].strip():
        raise MissingVariable("TARGET")
    for marker in _RECURSIVE_MARKERS:
        if vars.get(marker, "").strip():
            raise UnknownKind(f"UnknownKind: recursive Makefile layout ({marker} is set)")

    root = str(Path(project_root).absolute())
    target = vars["TARGET"].strip()
    kind, marker = _detect_kind(target)

    if vars.get("TARGET_NAME", "").strip():
        base = vars["TARGET_NAME"].strip()
    elif vars.get("TARGETNAME", "").strip():
        base = vars["TARGETNAME"].strip()
        placeholder = f"$({MODE_PLACEHOLDER})"
        if placeholder in target and placeholder not in base:
            base += placeholder
    else:
        base = target.replace(f"$({marker})", "") if marker in _KIND_PLACEHOLDERS else target[: -len(marker)]
        if kind != "executable" and base.startswith("lib") and len(base) > 3:
            base = base[3:]
    name = _resolve_mode(base, mode, debug_suffix).strip()
    if not name or "/" in name or "\\" in name or "$(" in name:
        raise UnknownKind(f"UnknownKind: cannot derive a target name from {target!r}")

    artifact = _resolve_mode(target, mode, debug_suffix)
    if marker in _KIND_PLACEHOLDERS:
        artifact = artifact.replace(f"$({marker})", _KIND_PLACEHOLDERS[marker][1])
    target_dir = vars.get("TARGET_DIR", ".").strip() or "."
    output = posixpath.normpath(posixpath.join(target_dir.replace("\\", "/"), artifact))

    return ProjectManifest(
        name=name,
        kind=kind,
        output_artifact=output,
        include_dirs=tuple(dict.fromkeys(_flag_values(vars.get("INCLUDE_PATH", ""), "-I"))),
        ned_folders=tuple(read_nedfolders(root)),
        link_libs=tuple(_link_libs(vars.get("LIBS", ""), root, mode, debug_suffix)),
        defines=tuple(_flag_values(vars.get("DEFINES", ""), "-D")),
        project_root=root,
    )
