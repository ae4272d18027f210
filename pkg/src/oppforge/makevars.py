"""Make-style variable extraction.

Only the subset needed to read ``Makefile.inc`` and ``opp_makemake`` output is
supported: ``=``, ``:=``, ``?=`` and ``+=`` assignments, backslash
continuations, ``#`` comments and ``$(NAME)`` references.  Function calls such
as ``$(shell ...)`` are kept verbatim (their arguments are still expanded).
Conditional directives are not evaluated; assignments inside them are applied
in file order like any other.
"""

from __future__ import annotations

import re
from typing import Dict, Iterable, Iterator, Tuple

from .errors import CycleDetected

#: Ordered mapping of variable name to fully expanded value.
VarMap = Dict[str, str]

_ASSIGN_RE = re.compile(
    r"^(?:(?:export|override)\s+)*([A-Za-z_][A-Za-z0-9_.\-]*)\s*(\+=|:=|::=|\?=|=)\s*(.*)$"
)
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")


def logical_lines(text: str) -> Iterator[Tuple[bool, str]]:
    """Yield ``(starts_with_tab, line)`` with continuations joined and comments removed.

    A continuation joins the two pieces with exactly one space, as make does;
    a comment runs to the end of the joined line.
    """
    parts: list = []
    tab = False
    for raw in text.replace("\r\n", "\n").replace("\r", "\n").split("\n"):
        if not parts:
            tab = raw.startswith("\t")
        piece = raw if not parts else raw.lstrip()
        if _ends_with_continuation(piece):
            parts.append(piece[:-1].rstrip())
            continue
        parts.append(piece)
        yield tab, _strip_comment(" ".join(p for p in parts if p) if len(parts) > 1 else parts[0])
        parts = []
    if parts:
        yield tab, _strip_comment(" ".join(p for p in parts if p))


def _ends_with_continuation(line: str) -> bool:
    count = len(line) - len(line.rstrip("\\"))
    return count % 2 == 1


def _comment_index(line: str) -> int:
    i = 0
    while i < len(line):
        c = line[i]
        if c == "\\" and i + 1 < len(line):
            i += 2
            continue
        if c == "#":
            return i
        i += 1
    return -1


def _strip_comment(line: str) -> str:
    idx = _comment_index(line)
    if idx >= 0:
        line = line[:idx]
    return line.replace("\\#", "#")


_DIRECTIVES = ("ifeq", "ifneq", "ifdef", "ifndef", "else", "endif", "include",
               "-include", "sinclude", "define", "endef", "export", "unexport",
               "vpath", "override", "undefine")


def iter_assignments(text: str) -> Iterator[Tuple[str, str, str]]:
    """Yield ``(name, operator, raw_value)`` triples in file order.

    Tab-indented lines following a rule line are recipe lines and skipped.
    """
    in_recipe = False
    for tab, line in logical_lines(text):
        stripped = line.strip()
        if tab and in_recipe:
            continue
        if not stripped:
            continue
        m = _ASSIGN_RE.match(stripped)
        if m:
            in_recipe = False
            yield m.group(1), m.group(2), m.group(3).strip()
            continue
        first = stripped.split(None, 1)[0]
        if first in _DIRECTIVES or first.startswith("$("):
            # directives and bare function calls ($(error ...), $(eval ...))
            continue
        in_recipe = ":" in stripped


def collect_raw(
    assignments: Iterable[Tuple[str, str, str]], keep_symbolic: Iterable[str] = ()
) -> Dict[str, str]:
    """Apply assignment operators, returning unexpanded values."""
    symbolic = set(keep_symbolic)
    raw: Dict[str, str] = {}
    for name, op, value in assignments:
        if name in symbolic:
            continue
        if op == "+=":
            if name in raw and raw[name]:
                raw[name] = raw[name] + (" " + value if value else "")
            else:
                raw[name] = value
        elif op == "?=":
            raw.setdefault(name, value)
        elif op in (":=", "::="):
            raw[name] = _Expander(raw, frozenset(symbolic)).expand_text(value, ())
        else:
            raw[name] = value
    return raw


def expand_all(raw: Dict[str, str], keep_symbolic: Iterable[str] = ()) -> VarMap:
    """Expand every ``$(NAME)`` reference recursively.

    Undefined names and names in *keep_symbolic* are left untouched.

    Raises:
        CycleDetected: if a variable's expansion references itself.
    """
    expander = _Expander(raw, frozenset(keep_symbolic))
    return {name: expander.expand_var(name, ()) for name in raw}


class _Expander:
    def __init__(self, raw: Dict[str, str], symbolic: frozenset) -> None:
        self.raw = raw
        self.symbolic = symbolic
        self.done: Dict[str, str] = {}

    def expand_var(self, name: str, stack: Tuple[str, ...]) -> str:
        if name in self.done:
            return self.done[name]
        if name in stack:
            raise CycleDetected(stack[stack.index(name):] + (name,))
        value = self.expand_text(self.raw[name], stack + (name,))
        self.done[name] = value
        return value

    def expand_text(self, text: str, stack: Tuple[str, ...]) -> str:
        out = []
        i = 0
        n = len(text)
        while i < n:
            c = text[i]
            if c == "$" and i + 1 < n and text[i + 1] == "$":
                out.append("$$")
                i += 2
                continue
            if c == "$" and i + 1 < n and text[i + 1] in "({":
                end = _matching_close(text, i + 1)
                if end < 0:
                    out.append(text[i:])
                    break
                inner = text[i + 2 : end]
                if _NAME_RE.fullmatch(inner):
                    if inner in self.raw and inner not in self.symbolic:
                        out.append(self.expand_var(inner, stack))
                    else:
                        out.append(text[i : end + 1])
                else:
                    # function call: keep the wrapper, expand the arguments
                    out.append(text[i : i + 2])
                    out.append(self.expand_text(inner, stack))
                    out.append(text[end])
                i = end + 1
                continue
            if c == "$" and i + 1 < n and _NAME_RE.fullmatch(text[i + 1]):
                # single-character reference such as $O or $D
                name = text[i + 1]
                if name in self.raw and name not in self.symbolic:
                    out.append(self.expand_var(name, stack))
                else:
                    out.append(text[i : i + 2])
                i += 2
                continue
            out.append(c)
            i += 1
        return "".join(out)


def _matching_close(text: str, open_idx: int) -> int:
    opener = text[open_idx]
    closer = ")" if opener == "(" else "}"
    depth = 0
    for j in range(open_idx, len(text)):
        if text[j] == opener:
            depth += 1
        elif text[j] == closer:
            depth -= 1
            if depth == 0:
                return j
    return -1


def parse_makefile_inc(text: str) -> VarMap:
    """Read the variable assignments of an installation's ``Makefile.inc``."""
    return expand_all(collect_raw(iter_assignments(text)))


def dump_varmap(vars: VarMap) -> str:
    """Serialize as ``NAME = value`` lines (parseable by :func:`parse_makefile_inc`)."""
    lines = []
    for name, value in vars.items():
        escaped = value.replace("#", "\\#")
        lines.append(f"{name} = {escaped}" if escaped else f"{name} =")
    return "\n".join(lines) + ("\n" if lines else "")
