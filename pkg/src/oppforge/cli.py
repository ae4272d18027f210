"""Command-line front end.

Exit codes: 0 success, 2 domain error, 3 I/O error; ``run`` passes the
child's exit code through.  Human-readable messages go to stderr, machine
output (JSON, argv listings, generated text) to stdout.
"""

from __future__ import annotations

import argparse
import difflib
import json
import os
import shutil
import subprocess
import sys
import tempfile
import warnings
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .build_plan import emit_ninja, lower, ninja_file
from .errors import (
    FlavorUnavailableWarning,
    JsoncSyntaxError,
    MalformedLaunchFile,
    OppForgeError,
    UnknownRunName,
    VariantUnavailable,
)
from .ide_config import (
    DebugFlavor,
    ScriptStyle,
    env_script_name,
    generate_cmake_kits,
    generate_env_script,
    generate_launch_config,
    merge_kits,
    merge_launch,
)
from .jsonc import dump_json, parse_jsonc
from .makefile_import import manifest_from_vars, parse_opp_makefile
from .project import DEFAULT_PROJECT_FILE, ProjectFile, build_graph, load_project, run_specs
from .run_config import make_run_targets, valgrind_available
from .toolchain import OmnetInstall, discover

#: Environment variable naming the installation root; checked before PATH.
ROOT_ENV_VAR = "OMNETPP_ROOT"

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_IO = 3


def atomic_write(path: Path, data: bytes) -> bool:
    """Replace *path* with *data* via a temporary file; skip identical content."""
    if path.is_file() and path.read_bytes() == data:
        return False
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return True


def _mode(args: argparse.Namespace, project: Optional[ProjectFile] = None) -> str:
    if getattr(args, "mode", None):
        return args.mode
    return project.mode if project else "release"


def _install(args: argparse.Namespace, project: Optional[ProjectFile] = None) -> OmnetInstall:
    override = getattr(args, "root", None)
    if override is None and project is not None:
        override = project.omnetpp_root
    if override is None:
        override = os.environ.get(ROOT_ENV_VAR) or None
    search_path = os.environ.get("PATH", "").split(os.pathsep)
    return discover(override, search_path)


def _project(args: argparse.Namespace) -> ProjectFile:
    return load_project(getattr(args, "project", None) or DEFAULT_PROJECT_FILE)


def cmd_discover(args: argparse.Namespace) -> int:
    project = None
    path = getattr(args, "project", None) or DEFAULT_PROJECT_FILE
    if os.path.isfile(path):
        project = load_project(path)
    install = _install(args, project)
    print(json.dumps(install.to_json(), indent=4))
    return EXIT_OK


def cmd_import(args: argparse.Namespace) -> int:
    makefile = Path(args.makefile)
    root = Path(args.project_root) if args.project_root else makefile.absolute().parent
    try:
        text = makefile.read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        # import reports every failure, I/O included, as a manifest error
        print(f"oppforge: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    manifest = manifest_from_vars(parse_opp_makefile(text), root, _mode(args))
    print(json.dumps(manifest.to_json(), indent=4))
    return EXIT_OK


def _plan(args: argparse.Namespace):
    project = _project(args)
    mode = _mode(args, project)
    graph = build_graph(project, mode)
    install = _install(args, project)
    plan = lower(graph, install, mode, project.build_dir, project.data.get("flags", []))
    return project, plan


def cmd_plan(args: argparse.Namespace) -> int:
    _, plan = _plan(args)
    print(json.dumps(plan.to_json(), indent=4))
    return EXIT_OK


def cmd_emit(args: argparse.Namespace) -> int:
    project, plan = _plan(args)
    text = emit_ninja(plan)
    rel = ninja_file(plan)
    if args.dry_run:
        sys.stdout.write(text)
        return EXIT_OK
    target = Path(project.root) / rel
    changed = atomic_write(target, text.encode("utf-8"))
    print(f"{'wrote' if changed else 'unchanged'}: {target}", file=sys.stderr)
    if args.check:
        ninja = shutil.which("ninja")
        if ninja is None:
            print("ninja not found; skipping --check", file=sys.stderr)
            return EXIT_OK
        proc = subprocess.run(
            [ninja, "-f", rel, "-n"], cwd=project.root, stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True
        )
        sys.stderr.write(proc.stdout)
        print(f"ninja -n: {'ok' if proc.returncode == 0 else 'FAILED'}", file=sys.stderr)
        return EXIT_OK if proc.returncode == 0 else EXIT_DOMAIN
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    project = _project(args)
    mode = _mode(args, project)
    graph = build_graph(project, mode)
    specs = run_specs(project, graph, mode)
    if args.run_name not in specs:
        raise UnknownRunName(f"UnknownRunName: {args.run_name!r} (known: {', '.join(specs) or 'none'})")
    install = _install(args, project)
    spec = specs[args.run_name]
    targets = make_run_targets(spec, install, mode, valgrind_available())
    key = f"{args.variant}_{spec.name}"
    if key not in targets:
        reason = "debug mode is off" if args.variant == "debug" else "valgrind is not installed"
        raise VariantUnavailable(f"VariantUnavailable: {key} ({reason})")
    run = targets[key]
    argv = list(run.argv) + list(args.extra)
    if args.dry_run:
        sys.stdout.write("".join(a + "\n" for a in argv))
        return EXIT_OK
    proc = subprocess.run(argv, cwd=run.working_dir)
    return proc.returncode if proc.returncode >= 0 else 128 - proc.returncode


def _default_compilers(install: OmnetInstall) -> Tuple[str, str]:
    for entry in install.tool_path_entries:
        for suffix in ("", ".exe"):
            c, cxx = Path(entry) / f"clang{suffix}", Path(entry) / f"clang++{suffix}"
            if c.is_file() and cxx.is_file():
                return str(c), str(cxx)
    inc = install.makefile_vars
    return inc.get("CC", "cc") or "cc", inc.get("CXX", "c++") or "c++"


def _read_json(path: Path):
    if not path.is_file():
        return None
    try:
        return parse_jsonc(path.read_text(encoding="utf-8"))
    except JsoncSyntaxError as exc:
        raise MalformedLaunchFile(f"MalformedLaunchFile: {path}: {exc}") from None


def cmd_gen_ide(args: argparse.Namespace) -> int:
    project = _project(args)
    ide = project.ide
    if ide is None:
        raise OppForgeError("project file has no 'ide' section")
    mode = _mode(args, project)
    graph = build_graph(project, mode)
    specs = run_specs(project, graph, mode)
    install = _install(args, project)
    strict = args.strict or ide.get("strict", False)
    flavors = [DebugFlavor(f) for f in ide.get("flavors", ["lldb"])]
    style = ScriptStyle(ide.get("env_script_style", "posix_sh"))
    vscode = Path(project.root) / ".vscode"

    configs = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", FlavorUnavailableWarning)
        for spec in specs.values():
            for flavor in flavors:
                configs.append(generate_launch_config(spec, flavor, install, strict=strict))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)

    launch_path = vscode / "launch.json"
    existing = _read_json(launch_path)
    try:
        launch = merge_launch(existing, configs)
    except OppForgeError as exc:
        raise MalformedLaunchFile(f"{launch_path}: {exc}") from None

    script_name = env_script_name(install, style)
    default_c, default_cxx = _default_compilers(install)
    kits_path = vscode / "cmake-kits.json"
    kits = merge_kits(
        _read_json(kits_path),
        generate_cmake_kits(
            ide["kit_name"],
            install,
            "${workspaceFolder}/.vscode/" + script_name,
            ide.get("c_compiler", default_c),
            ide.get("cxx_compiler", default_cxx),
        ),
    )
    venv = ide.get("venv")
    script = generate_env_script(install, style, venv)

    outputs: List[Tuple[Path, bytes]] = [
        (launch_path, dump_json(launch).encode("utf-8")),
        # cmake-kits.json keeps the two-space layout the CMake extension writes
        (kits_path, dump_json(kits, indent=2).encode("utf-8")),
        (vscode / script_name, script.encode("utf-8")),
    ]
    if args.diff:
        for path, data in outputs:
            # bytes, so CRLF scripts compare as written
            old = path.read_bytes().decode("utf-8") if path.is_file() else ""
            new = data.decode("utf-8")
            sys.stdout.writelines(
                difflib.unified_diff(
                    old.splitlines(keepends=True),
                    new.splitlines(keepends=True),
                    fromfile=f"a/{path.relative_to(project.root)}",
                    tofile=f"b/{path.relative_to(project.root)}",
                )
            )
        return EXIT_OK
    for path, data in outputs:
        changed = atomic_write(path, data)
        print(f"{'wrote' if changed else 'unchanged'}: {path}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--project", default=argparse.SUPPRESS, help=f"project file (default {DEFAULT_PROJECT_FILE})")
    common.add_argument("--mode", choices=("release", "debug"), default=argparse.SUPPRESS)
    common.add_argument("--root", default=argparse.SUPPRESS, help=f"OMNeT++ root (overrides ${ROOT_ENV_VAR})")

    parser = argparse.ArgumentParser(prog="oppforge", description="Build orchestration for OMNeT++ projects.", parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discover", parents=[common], help="show the OMNeT++ installation that would be used")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("import", parents=[common], help="print the manifest of an opp_makemake Makefile")
    p.add_argument("makefile")
    p.add_argument("--project-root", help="defaults to the Makefile's directory")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("plan", parents=[common], help="print the lowered build plan as JSON")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("emit", parents=[common], help="write build.ninja")
    p.add_argument("--check", action="store_true", help="dry-run the result with ninja -n")
    p.add_argument("--dry-run", action="store_true", help="print instead of writing")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser(
        "run", parents=[common], help="run, debug or memcheck a simulation; arguments after -- go to the runner"
    )
    p.add_argument("run_name")
    p.add_argument("variant", nargs="?", default="run", choices=("run", "debug", "memcheck"))
    p.add_argument("--dry-run", action="store_true", help="print the argv, one element per line")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gen-ide", parents=[common], help="update .vscode/launch.json, cmake-kits.json and env script")
    p.add_argument("--diff", action="store_true", help="print changes without writing")
    p.add_argument("--strict", action="store_true", help="fail when the LLDB formatter is unavailable")
    p.set_defaults(func=cmd_gen_ide)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    extra: List[str] = []
    if "--" in argv:
        cut = argv.index("--")
        argv, extra = argv[:cut], argv[cut + 1 :]
    args = build_parser().parse_args(argv)
    args.extra = extra
    try:
        return args.func(args)
    except OppForgeError as exc:
        print(f"oppforge: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"oppforge: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
