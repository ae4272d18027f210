"""Lowering a target graph into build steps and writing them as ``build.ninja``.

All paths in a plan are relative to the project root, which is also the
directory Ninja runs in (``ninja -f <build_dir>/build.ninja``).
"""

from __future__ import annotations

import posixpath
import shlex
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

from .errors import DuplicateOutput, MissingInstallTool
from .graph import Target, TargetGraph, resolve, transitive_deps
from .msg import GenStep, relative_subpath, generated_paths, plan_msg
from .toolchain import OmnetInstall

DEBUG_SUFFIX = "_dbg"
RULES = ("compile", "msgc", "archive", "link_shared", "link_exe")
STEP_RULES = RULES + ("phony",)

DEFAULT_FLAGS = {"release": "-O3 -DNDEBUG=1", "debug": "-O0 -Wall -g"}
LIBRARY_OPP_LIBS = ("oppsim", "oppenvir", "oppcommon")
EXECUTABLE_OPP_LIBS = ("oppmain", "oppcmdenv", "oppenvir", "oppsim", "oppnedxml", "oppcommon")


@dataclass(frozen=True)
class BuildStep:
    rule: str
    inputs: Tuple[str, ...]
    outputs: Tuple[str, ...]
    implicit_inputs: Tuple[str, ...] = ()
    variables: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if self.rule not in STEP_RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if not self.outputs:
            raise ValueError("a build step needs at least one output")

    @property
    def vars(self) -> Dict[str, str]:
        return dict(self.variables)


@dataclass(frozen=True)
class BuildPlan:
    steps: Tuple[BuildStep, ...]
    defaults: Tuple[str, ...]
    build_dir: str
    toolchain: Tuple[Tuple[str, str], ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "build_dir": self.build_dir,
            "toolchain": dict(self.toolchain),
            "steps": [
                {
                    "rule": s.rule,
                    "inputs": list(s.inputs),
                    "implicit_inputs": list(s.implicit_inputs),
                    "outputs": list(s.outputs),
                    "variables": dict(s.variables),
                }
                for s in self.steps
            ],
            "defaults": list(self.defaults),
        }


def artifact_path(target: Target, mode: str, build_dir: str) -> str:
    """Where a native target's binary lands; imported targets keep their own path."""
    if target.kind == "imported":
        return target.output_artifact or ""
    suffix = DEBUG_SUFFIX if mode == "debug" else ""
    if target.kind == "opp_model_library":
        filename = f"lib{target.name}{suffix}.so"
    else:
        filename = f"{target.name}{suffix}"
    return _join(build_dir, filename)


def _join(*parts: str) -> str:
    kept = [p for p in parts if p not in ("", ".")]
    return posixpath.join(*kept) if kept else "."


def _rebase(path: str, workdir: str) -> str:
    if posixpath.isabs(path):
        return path
    return posixpath.relpath(path, workdir)


def _quote_all(args: Iterable[str]) -> str:
    return " ".join(shlex.quote(a) for a in args)


def _baseline_flags(install: OmnetInstall, mode: str) -> List[str]:
    inc = install.makefile_vars
    mode_flags = inc.get("CFLAGS_DEBUG" if mode == "debug" else "CFLAGS_RELEASE", DEFAULT_FLAGS[mode])
    flags = shlex.split(mode_flags)
    flags += shlex.split(inc.get("CXXFLAGS", ""))
    return flags


def lower(
    graph: TargetGraph,
    install: OmnetInstall,
    mode: str = "release",
    build_dir: str = "build",
    extra_flags: Sequence[str] = (),
) -> BuildPlan:
    """Produce build steps for every native target in dependency order.

    Per target: message-compiler steps, then compiles of the generated
    sources, then compiles of the hand-written sources, then one link step.
    Imported targets add no steps; their artifact becomes an implicit input
    of whatever links against them.

    Raises:
        CycleDetected: propagated from :func:`resolve`.
        MissingInstallTool: a ``.msg`` file exists but no message compiler is known.
    """
    if mode not in ("release", "debug"):
        raise ValueError(f"mode must be 'release' or 'debug', not {mode!r}")
    build_dir = posixpath.normpath(build_dir.replace("\\", "/"))
    order = resolve(graph)
    if not install.msgc_path and any(graph[n].msg_sources for n in order):
        raise MissingInstallTool("MissingInstallTool: no message compiler in the installation")

    debug_suffix = DEBUG_SUFFIX if mode == "debug" else ""
    baseline = _baseline_flags(install, mode) + list(extra_flags)
    pic = shlex.split(install.makefile_vars.get("PIC_FLAGS", "-fPIC"))
    gen_headers: Dict[str, List[str]] = {
        n: [generated_paths(m, build_dir)[1] for m in graph[n].msg_sources] for n in order
    }

    steps: List[BuildStep] = []
    aliases: List[Tuple[str, str]] = []
    defaults: List[str] = []
    for name in order:
        target = graph[name]
        if target.kind == "imported":
            continue
        closure = transitive_deps(graph, name)

        include_dirs: Dict[str, None] = {}
        msg_dirs: Dict[str, None] = {}
        headers: List[str] = []
        for member in closure:
            t = graph[member]
            for d in t.include_dirs:
                include_dirs.setdefault(d)
            for header in gen_headers.get(member, ()):
                include_dirs.setdefault(posixpath.dirname(header) or ".")
                headers.append(header)
            for m in t.msg_sources:
                msg_dirs.setdefault(posixpath.dirname(m) or ".")
        include_dirs.setdefault(install.include_dir)

        for msg in target.msg_sources:
            gen = plan_msg(install, msg, list(msg_dirs) + [d for d in include_dirs if d not in msg_dirs], build_dir)
            steps.append(_msgc_step(gen))

        flags = baseline + (pic if target.kind == "opp_model_library" else [])
        compile_vars = (
            ("flags", _quote_all(flags)),
            ("defines", _quote_all("-D" + d for d in target.defines)),
            ("includes", _quote_all("-I" + d for d in include_dirs)),
        )
        objects: List[str] = []
        obj_dir = _join(build_dir, f"{name}.dir")
        generated_sources = [generated_paths(m, build_dir)[0] for m in target.msg_sources]
        for src in generated_sources + list(target.cc_sources):
            rel = posixpath.relpath(src, build_dir) if src in generated_sources else relative_subpath(src)
            obj = posixpath.join(obj_dir, rel + ".o")
            steps.append(BuildStep("compile", (src,), (obj,), tuple(headers), compile_vars))
            objects.append(obj)

        artifact = artifact_path(target, mode, build_dir)
        dep_artifacts: List[str] = []
        libs: List[str] = []
        rpaths: Dict[str, None] = {}
        for member in closure[1:]:
            dep = graph[member]
            if dep.kind in ("executable", "test_executable"):
                continue
            path = artifact_path(dep, mode, build_dir)
            if not path:
                continue
            dep_artifacts.append(path)
            if posixpath.isabs(path):
                libs.append(path)
                rpaths.setdefault(posixpath.dirname(path))
                continue
            # -l keeps the runtime dependency a bare soname; $ORIGIN finds it
            lib_dir, filename = posixpath.split(path)
            stem = posixpath.splitext(filename)[0]
            libs += ["-L" + (lib_dir or "."), "-l" + (stem[3:] if stem.startswith("lib") else stem)]
            rel = posixpath.relpath(lib_dir or ".", posixpath.dirname(artifact) or ".")
            rpaths.setdefault("$ORIGIN" if rel == "." else f"$ORIGIN/{rel}")
        rpaths.setdefault(install.lib_dir)
        opp_libs = LIBRARY_OPP_LIBS if target.kind == "opp_model_library" else EXECUTABLE_OPP_LIBS
        libs += ["-L" + install.lib_dir] + ["-Wl,-rpath," + d for d in rpaths]
        libs += ["-l" + lib + debug_suffix for lib in opp_libs]
        rule = "link_shared" if target.kind == "opp_model_library" else "link_exe"
        link_flags = shlex.split(install.makefile_vars.get("LDFLAGS", ""))
        steps.append(
            BuildStep(
                rule,
                tuple(objects),
                (artifact,),
                tuple(dep_artifacts),
                (("flags", _quote_all(link_flags)), ("libs", _quote_all(libs))),
            )
        )
        aliases.append((name, artifact))
        defaults.append(artifact)

    produced = set()
    for step in steps:
        for out in step.outputs:
            if out in produced:
                raise DuplicateOutput(f"DuplicateOutput: {out} is produced twice")
            produced.add(out)
    for name, artifact in aliases:
        if name not in produced:
            steps.append(BuildStep("phony", (artifact,), (name,)))
            produced.add(name)

    toolchain = (
        ("cxx", install.makefile_vars.get("CXX", "c++")),
        ("ar", "ar"),
        ("msgc", install.msgc_path),
    )
    return BuildPlan(tuple(steps), tuple(defaults), build_dir, toolchain)


def _msgc_step(gen: GenStep) -> BuildStep:
    argv = rebased_command(gen)
    return BuildStep(
        "msgc",
        (gen.input,),
        gen.outputs,
        (),
        (
            ("workdir", gen.workdir),
            ("includes", _quote_all(argv[1:-1])),
            ("msgfile", shlex.quote(argv[-1])),
        ),
    )


def rebased_command(gen: GenStep) -> List[str]:
    """The message-compiler argv with paths made relative to ``gen.workdir``."""
    args = [gen.command[0]]
    for d in gen.import_dirs:
        args += ["-I", _rebase(d, gen.workdir)]
    args.append(_rebase(gen.input, gen.workdir))
    return args


# -- emission ---------------------------------------------------------------

_RULE_TEXT = {
    "compile": (
        ("command", "$cxx -MMD -MF $out.d $flags $defines $includes -c $in -o $out"),
        ("depfile", "$out.d"),
        ("deps", "gcc"),
        ("description", "CXX $out"),
    ),
    # -h writes the generated pair into the current directory, not beside the input
    "msgc": (
        ("command", "cd $workdir && $msgc -h $includes $msgfile"),
        ("description", "MSGC $in"),
    ),
    "archive": (
        ("command", "rm -f $out && $ar rcs $out $in"),
        ("description", "AR $out"),
    ),
    "link_shared": (
        ("command", "$cxx -shared -o $out $in $flags $libs"),
        ("description", "LINK $out"),
    ),
    "link_exe": (
        ("command", "$cxx -o $out $in $flags $libs"),
        ("description", "LINK $out"),
    ),
}


def escape_path(path: str) -> str:
    return path.replace("$", "$$").replace(" ", "$ ").replace(":", "$:")


def escape_value(value: str) -> str:
    return value.replace("$", "$$")


def emit_ninja(plan: BuildPlan) -> str:
    """Serialize *plan*; equal plans give byte-identical text."""
    lines = ["# Generated by oppforge. Do not edit.", "ninja_required_version = 1.5"]
    if plan.build_dir not in ("", "."):
        lines.append(f"builddir = {escape_value(plan.build_dir)}")
    for key, value in plan.toolchain:
        lines.append(f"{key} = {escape_value(shlex.quote(value))}")
    lines.append("")
    for rule in RULES:
        lines.append(f"rule {rule}")
        for key, value in _RULE_TEXT[rule]:
            lines.append(f"  {key} = {value}")
        lines.append("")
    for step in plan.steps:
        head = f"build {' '.join(escape_path(o) for o in step.outputs)}: {step.rule}"
        if step.inputs:
            head += " " + " ".join(escape_path(i) for i in step.inputs)
        if step.implicit_inputs:
            head += " | " + " ".join(escape_path(i) for i in step.implicit_inputs)
        lines.append(head)
        for key, value in step.variables:
            lines.append(f"  {key} = {escape_value(value)}".rstrip())
        lines.append("")
    if plan.defaults:
        lines.append("default " + " ".join(escape_path(d) for d in plan.defaults))
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines) + "\n"


def ninja_file(plan: BuildPlan) -> str:
    return _join(plan.build_dir, "build.ninja")
