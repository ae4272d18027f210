"""VS Code integration: launch.json, cmake-kits.json and environment scripts."""

from __future__ import annotations

import copy
import shlex
import warnings
from enum import Enum
from typing import List, Optional, Sequence

from .errors import FlavorUnavailable, FlavorUnavailableWarning, MalformedLaunchFile
from .jsonc import JsonDoc, merge_named
from .run_config import RunSpec, runner_args
from .toolchain import OmnetInstall

LAUNCH_VERSION = "0.2.0"
GENERATED_MARKER = "(OMNeT++)"


class DebugFlavor(str, Enum):
    GDB = "gdb"
    LLDB = "lldb"


class ScriptStyle(str, Enum):
    WINDOWS_CMD = "windows_cmd"
    POSIX_SH = "posix_sh"


def launch_config_name(name: str, flavor: DebugFlavor) -> str:
    label = "CodeLLDB" if DebugFlavor(flavor) is DebugFlavor.LLDB else "GDB"
    return f"Launch {name} - {label} {GENERATED_MARKER}"


def generate_launch_config(
    spec: RunSpec, flavor: DebugFlavor, install: OmnetInstall, strict: bool = False
) -> dict:
    """One debug configuration for *spec*, launching the debug runner.

    The LLDB flavor loads the OMNeT++ pretty-printer when the installation
    ships one.  Without it a :class:`FlavorUnavailableWarning` is issued, or
    :class:`FlavorUnavailable` raised when *strict*.
    """
    flavor = DebugFlavor(flavor)
    config = {
        "name": launch_config_name(spec.name, flavor),
        "type": "lldb" if flavor is DebugFlavor.LLDB else "cppdbg",
        "request": "launch",
        "program": install.runner_debug,
        "args": runner_args(spec),
        # cppdbg spells the key differently from CodeLLDB
        "stopOnEntry" if flavor is DebugFlavor.LLDB else "stopAtEntry": False,
        "cwd": spec.working_dir,
    }
    if flavor is DebugFlavor.LLDB:
        if install.lldb_formatter:
            config["initCommands"] = [f"command script import {install.lldb_formatter}"]
        else:
            message = (
                f"OMNeT++ {install.version} has no LLDB formatter; "
                f"{config['name']!r} is generated without pretty-printing"
            )
            if strict:
                raise FlavorUnavailable(f"FlavorUnavailable: {message}")
            warnings.warn(message, FlavorUnavailableWarning, stacklevel=2)
    else:
        config["MIMode"] = "gdb"
        config["setupCommands"] = [
            {
                "description": "Enable pretty-printing for gdb",
                "text": "-enable-pretty-printing",
                "ignoreFailures": True,
            }
        ]
    return config


def merge_launch(existing: Optional[JsonDoc], generated: Sequence[dict]) -> dict:
    """Fold generated configurations into an existing launch.json document.

    Same-named configurations are replaced where they stand; all other
    entries are left exactly as they were; new ones are appended.

    Raises:
        MalformedLaunchFile: *existing* is non-empty but has no
            ``configurations`` array.
    """
    names = [g.get("name") for g in generated]
    if len(set(names)) != len(names):
        raise ValueError("generated configuration names must be distinct")
    generated = copy.deepcopy(list(generated))
    if existing is None or existing == {}:
        return {"version": LAUNCH_VERSION, "configurations": generated}
    if not isinstance(existing, dict) or not isinstance(existing.get("configurations"), list):
        raise MalformedLaunchFile("MalformedLaunchFile: expected an object with a 'configurations' array")
    result = copy.deepcopy(existing)
    if "version" not in result:
        result = {"version": LAUNCH_VERSION, **result}
    result["version"] = LAUNCH_VERSION
    result["configurations"] = merge_named(result["configurations"], generated)
    return result


def generate_cmake_kits(
    kit_name: str, install: OmnetInstall, env_script: str, c_compiler: str, cxx_compiler: str
) -> List[dict]:
    if not c_compiler or not cxx_compiler:
        raise ValueError("both compiler paths are required")
    return [
        {
            "name": kit_name,
            "environmentSetupScript": env_script,
            "compilers": {"C": c_compiler, "CXX": cxx_compiler},
        }
    ]


def merge_kits(existing: Optional[JsonDoc], generated: Sequence[dict]) -> list:
    """Name-keyed replace/append into a cmake-kits.json array."""
    if existing is None:
        return copy.deepcopy(list(generated))
    if not isinstance(existing, list):
        raise MalformedLaunchFile("MalformedLaunchFile: cmake-kits.json must hold an array")
    return merge_named(copy.deepcopy(existing), copy.deepcopy(list(generated)))


def env_script_name(install: OmnetInstall, style: ScriptStyle) -> str:
    ext = ".cmd" if ScriptStyle(style) is ScriptStyle.WINDOWS_CMD else ".sh"
    return f"{install.version.release_name}env{ext}"


def generate_env_script(install: OmnetInstall, style: ScriptStyle, venv_activate: Optional[str] = None) -> str:
    """PATH setup for the installation's tools, optionally activating a Python venv."""
    style = ScriptStyle(style)
    if not install.tool_path_entries:
        raise ValueError("installation has no tool directories to put on PATH")
    if style is ScriptStyle.WINDOWS_CMD:
        lines = [f"set PATH={entry};%PATH%" for entry in install.tool_path_entries]
        if venv_activate:
            lines += [
                "",
                "rem Optional: Activate a python virtual environment",
                'set current_dir="%cd%"',
                f"call {venv_activate}",
            ]
        return "\r\n".join(lines) + "\r\n"
    lines = [f"export PATH={shlex.quote(entry)}:$PATH" for entry in install.tool_path_entries]
    if venv_activate:
        lines += ["", "# Optional: Activate a python virtual environment", f". {shlex.quote(venv_activate)}"]
    return "\n".join(lines) + "\n"
