import stat
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

WINDOWS_TOOL_DIRS = (
    "tools/win64/mingw64/bin",
    "tools/win64/usr/bin",
    "tools/win64/opt/mingw64/bin",
    "tools/win64/opt/bin",
)
FORMATTER = "python/omnetpp/lldb/formatters/omnetpp.py"


def _script(path: Path, body: str) -> None:
    path.write_text("#!/bin/sh\n" + body + "\n")
    path.chmod(path.stat().st_mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)


def make_install(
    root,
    version="6.0pre10",
    formatter=True,
    windows_tools=False,
    runner_exit=0,
    debug_runner="opp_run_dbg",
    with_msgc=True,
):
    """Lay out a minimal OMNeT++ tree; the runners just echo their argv."""
    root = Path(root)
    for d in ("bin", "include", "lib"):
        (root / d).mkdir(parents=True, exist_ok=True)
    body = 'for a in "$@"; do echo "$a"; done\nexit %d' % runner_exit
    _script(root / "bin" / "opp_run", body)
    if debug_runner:
        _script(root / "bin" / debug_runner, body)
    if with_msgc:
        _script(root / "bin" / "opp_msgc", "exit 0")
    (root / "Version").write_text(f"omnetpp-{version}\n")
    inc = (FIXTURES / "makefile_inc" / "Makefile.inc").read_text()
    (root / "Makefile.inc").write_text(inc.replace("@ROOT@", str(root)))
    if formatter:
        f = root / FORMATTER
        f.parent.mkdir(parents=True, exist_ok=True)
        f.write_text("# lldb formatters\n")
    if windows_tools:
        for d in WINDOWS_TOOL_DIRS:
            (root / d).mkdir(parents=True, exist_ok=True)
        for exe in ("clang.exe", "clang++.exe"):
            (root / WINDOWS_TOOL_DIRS[0] / exe).write_text("")
    return root


@pytest.fixture
def install_factory(tmp_path):
    counter = iter(range(1000))

    def factory(**kw):
        version = kw.get("version", "6.0pre10")
        return make_install(tmp_path / f"omnetpp-{version}-{next(counter)}", **kw)

    return factory


@pytest.fixture
def install(install_factory):
    from oppforge.toolchain import discover

    return discover(install_factory())


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def no_valgrind(monkeypatch, tmp_path):
    """A PATH with nothing on it; the fake runners call /bin/sh directly."""
    empty = tmp_path / "emptybin"
    empty.mkdir()
    monkeypatch.setenv("PATH", str(empty))
    return empty


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one verdict line per criterion; printed again in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def report(number, passed, detail):
        verdict = "SKIP" if passed is None else "PASS" if passed else "FAIL"
        line = f"criterion {number}: {verdict} - {detail}"
        lines.append(line)
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
