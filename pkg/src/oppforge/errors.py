"""Exception types shared by all oppforge modules.

Every domain error derives from :class:`OppForgeError`; the CLI maps those to
exit code 2 and plain :class:`OSError` to exit code 3.
"""

from __future__ import annotations

from typing import Sequence


class OppForgeError(Exception):
    """Base class of all domain errors."""


class NotFound(OppForgeError):
    pass


class Incomplete(OppForgeError):
    def __init__(self, component: str, root: str = "") -> None:
        self.component = component
        self.root = root
        where = f" in {root}" if root else ""
        super().__init__(f"Incomplete installation{where}: missing {component}")


class CycleDetected(OppForgeError):
    def __init__(self, names: Sequence[str]) -> None:
        self.names = list(names)
        super().__init__("CycleDetected: " + " -> ".join(self.names))


class MissingVariable(OppForgeError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"MissingVariable: {name}")


class UnknownKind(OppForgeError):
    pass


class DuplicateTarget(OppForgeError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"DuplicateTarget: {name}")


class UnsupportedSource(OppForgeError):
    def __init__(self, path: str, ext: str) -> None:
        self.path = path
        self.ext = ext
        super().__init__(f"UnsupportedSource: {path} (extension {ext or '<none>'!r})")


class UnknownTarget(OppForgeError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"UnknownTarget: {name}")


class InvalidTarget(OppForgeError):
    pass


class NotAMsgFile(OppForgeError):
    pass


class MissingInstallTool(OppForgeError):
    pass


class DuplicateOutput(OppForgeError):
    pass


class EmptyNedSet(OppForgeError):
    pass


class InvalidRunSpec(OppForgeError):
    pass


class JsoncSyntaxError(OppForgeError, ValueError):
    def __init__(self, line: int, col: int, message: str) -> None:
        self.line = line
        self.col = col
        self.message = message
        super().__init__(f"SyntaxError at line {line}, column {col}: {message}")


class MalformedLaunchFile(OppForgeError):
    pass


class FlavorUnavailable(OppForgeError):
    pass


class FlavorUnavailableWarning(UserWarning):
    """Emitted instead of :class:`FlavorUnavailable` unless strict mode is on."""


class UnknownRunName(OppForgeError):
    pass


class VariantUnavailable(OppForgeError):
    pass


class ProjectFileError(OppForgeError):
    pass
