import os

import pytest

from oppforge.errors import Incomplete, NotFound
from oppforge.toolchain import discover, parse_version, version_gate

from conftest import FORMATTER, WINDOWS_TOOL_DIRS


@pytest.mark.parametrize(
    "text,gate",
    [("6.0pre10", True), ("omnetpp-6.0pre10", True), ("5.6", False), ("5.6.2", False), ("7.1", True), ("6.0", True)],
)
def test_version_gate(text, gate):
    assert version_gate(parse_version(text)) is gate


def test_parse_version_fields():
    v = parse_version("omnetpp-6.0pre10")
    assert (v.major, v.minor, v.prerelease) == (6, 0, "pre10")
    assert v.release_name == "omnetpp-6.0pre10"
    assert parse_version("6.0pre10").release_name == "omnetpp-6.0pre10"
    assert parse_version("5.6.2").prerelease is None


@pytest.mark.parametrize("bad", ["", "six", "6", "6.x"])
def test_parse_version_rejects(bad):
    with pytest.raises(ValueError):
        parse_version(bad)


def test_override_with_formatter(install_factory):
    root = install_factory()
    inst = discover(root)
    assert inst.version.prerelease == "pre10"
    assert inst.lldb_formatter == str(root / FORMATTER)
    assert inst.runner_debug == str(root / "bin" / "opp_run_dbg")
    assert inst.msgc_path == str(root / "bin" / "opp_msgc")
    assert inst.tool_path_entries == (str(root / "bin"),)
    assert inst.makefile_vars["OMNETPP_INCL_DIR"] == f"{root}/include"


def test_empty_dir_is_not_found(tmp_path):
    with pytest.raises(NotFound):
        discover(tmp_path)


def test_nothing_given_is_not_found():
    with pytest.raises(NotFound):
        discover(None, ())


def test_search_path_finds_old_install(install_factory, tmp_path):
    root = install_factory(version="5.6.2", formatter=False)
    inst = discover(None, [str(tmp_path / "nowhere"), str(root / "bin")])
    assert inst.root == str(root)
    assert inst.lldb_formatter is None
    assert str(inst.version) == "omnetpp-5.6.2"


def test_search_path_without_runner(tmp_path):
    with pytest.raises(NotFound):
        discover(None, [str(tmp_path)])


def test_new_install_missing_formatter_is_incomplete(install_factory):
    with pytest.raises(Incomplete):
        discover(install_factory(formatter=False))


def test_missing_debug_runner_is_incomplete(install_factory):
    with pytest.raises(Incomplete):
        discover(install_factory(debug_runner=None))


def test_debug_runner_fallback_name(install_factory):
    inst = discover(install_factory(debug_runner="opp_run_debug"))
    assert inst.runner_debug.endswith("opp_run_debug")


def test_missing_msgc_is_incomplete(install_factory):
    with pytest.raises(Incomplete):
        discover(install_factory(with_msgc=False))


def test_missing_include_is_incomplete(install_factory):
    root = install_factory()
    os.rmdir(root / "include")
    with pytest.raises(Incomplete):
        discover(root)


def test_unreadable_version_is_incomplete(install_factory):
    root = install_factory()
    (root / "Version").write_text("garbage\n")
    with pytest.raises(Incomplete):
        discover(root)


def test_version_from_makefile_inc(install_factory):
    root = install_factory(version="5.6.2", formatter=False)
    (root / "Version").unlink()
    assert discover(root).version.raw == "5.6.2"


def test_windows_tool_path_entries(install_factory):
    root = install_factory(windows_tools=True)
    inst = discover(root)
    assert inst.tool_path_entries == (str(root / "bin"),) + tuple(str(root / d) for d in WINDOWS_TOOL_DIRS)


def test_to_json_round_trips(install):
    data = install.to_json()
    assert data["version"] == "omnetpp-6.0pre10"
    assert data["tool_path_entries"] == list(install.tool_path_entries)
