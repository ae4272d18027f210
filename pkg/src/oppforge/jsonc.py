"""A JSON reader that tolerates comments and trailing commas, and a strict writer.

Documents are plain Python values: ``dict`` (insertion ordered), ``list``,
``str``, ``int``, ``float``, ``bool`` and ``None``.
"""

from __future__ import annotations

import json
import re
from typing import Any, List

from .errors import JsoncSyntaxError

JsonDoc = Any

_NUMBER_RE = re.compile(r"-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][+-]?\d+)?")
_WS = " \t\n\r"


class _Reader:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: int = -1) -> JsoncSyntaxError:
        pos = self.pos if pos < 0 else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return JsoncSyntaxError(line, col, message)

    def skip(self) -> None:
        text = self.text
        n = len(text)
        while self.pos < n:
            c = text[self.pos]
            if c in _WS:
                self.pos += 1
            elif text.startswith("//", self.pos):
                end = text.find("\n", self.pos)
                self.pos = n if end < 0 else end + 1
            elif text.startswith("/*", self.pos):
                end = text.find("*/", self.pos + 2)
                if end < 0:
                    raise self.error("unterminated block comment")
                self.pos = end + 2
            else:
                break

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def value(self) -> JsonDoc:
        c = self.peek()
        if c == "{":
            return self.obj()
        if c == "[":
            return self.array()
        if c == '"':
            return self.string()
        if c == "-" or c.isdigit():
            return self.number()
        for word, result in (("true", True), ("false", False), ("null", None)):
            if self.text.startswith(word, self.pos):
                end = self.pos + len(word)
                if end < len(self.text) and (self.text[end].isalnum() or self.text[end] == "_"):
                    break
                self.pos = end
                return result
        if not c:
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected character {c!r}")

    def obj(self) -> dict:
        self.pos += 1
        result: dict = {}
        while True:
            c = self.peek()
            if c == "}":
                self.pos += 1
                return result
            if c != '"':
                raise self.error("expected a string key or '}'" if c else "unterminated object")
            key = self.string()
            if self.peek() != ":":
                raise self.error("expected ':' after object key")
            self.pos += 1
            result[key] = self.value()
            c = self.peek()
            if c == ",":
                self.pos += 1
            elif c != "}":
                raise self.error("expected ',' or '}'" if c else "unterminated object")

    def array(self) -> list:
        self.pos += 1
        result: list = []
        while True:
            c = self.peek()
            if c == "]":
                self.pos += 1
                return result
            if not c:
                raise self.error("unterminated array")
            result.append(self.value())
            c = self.peek()
            if c == ",":
                self.pos += 1
            elif c != "]":
                raise self.error("expected ',' or ']'" if c else "unterminated array")

    def string(self) -> str:
        start = self.pos
        i = start + 1
        text = self.text
        n = len(text)
        while i < n:
            c = text[i]
            if c == "\\":
                i += 2
                continue
            if c == '"':
                break
            if c == "\n":
                raise self.error("newline in string", i)
            i += 1
        else:
            raise self.error("unterminated string", start)
        try:
            value = json.loads(text[start : i + 1])
        except json.JSONDecodeError as exc:
            raise self.error(f"invalid string: {exc.msg}", start + exc.pos) from None
        self.pos = i + 1
        return value

    def number(self) -> Any:
        m = _NUMBER_RE.match(self.text, self.pos)
        if not m:
            raise self.error("invalid number")
        token = m.group(0)
        end = m.end()
        if end < len(self.text) and (self.text[end].isalnum() or self.text[end] in "._"):
            raise self.error("invalid number", end)
        self.pos = end
        if any(ch in token for ch in ".eE"):
            return float(token)
        return int(token)


def parse_jsonc(text: str) -> JsonDoc:
    """Parse JSON that may contain ``//``/``/* */`` comments and trailing commas.

    Raises:
        JsoncSyntaxError: with 1-based line and column of the problem.
    """
    if text.startswith("\ufeff"):
        text = text[1:]
    reader = _Reader(text)
    if not reader.peek():
        raise reader.error("empty document")
    try:
        result = reader.value()
    except RecursionError:
        raise reader.error("document nested too deeply") from None
    if reader.peek():
        raise reader.error("trailing content after the document")
    return result


def dump_json(doc: JsonDoc, indent: int = 4) -> str:
    """Strict JSON, keys in insertion order, LF line endings, trailing newline."""
    return json.dumps(doc, indent=indent, ensure_ascii=False, allow_nan=False) + "\n"


def merge_named(existing: List[JsonDoc], generated: List[dict]) -> List[JsonDoc]:
    """Replace entries whose ``name`` matches a generated entry, append the rest.

    Replacement keeps the position of the first matching entry; later
    duplicates of a generated name are dropped.  Everything else is kept as is.
    """
    by_name = {}
    for entry in generated:
        name = entry.get("name")
        if name in by_name:
            raise ValueError(f"duplicate generated name {name!r}")
        by_name[name] = entry
    result: List[JsonDoc] = []
    placed = set()
    for entry in existing:
        name = entry.get("name") if isinstance(entry, dict) else None
        if isinstance(name, str) and name in by_name:
            if name not in placed:
                result.append(by_name[name])
                placed.add(name)
            continue
        result.append(entry)
    result.extend(e for e in generated if e.get("name") not in placed)
    return result

