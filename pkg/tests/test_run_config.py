import pytest

from oppforge.errors import EmptyNedSet, InvalidRunSpec
from oppforge.run_config import RunSpec, format_ned_arg, make_run_targets, runner_args, valgrind_available


def spec(**kw):
    base = dict(
        name="example",
        target="model",
        ini_file="omnetpp.ini",
        working_dir="/work/sim",
        ned_folders=("/work/src", "/work/sim"),
        libraries=("/work/build/model",),
    )
    base.update(kw)
    return RunSpec(**base)


def test_ned_arg():
    assert format_ned_arg(["a"]) == "a"
    assert format_ned_arg(["a", "b"]) == "a;b"
    with pytest.raises(EmptyNedSet):
        format_ned_arg([])


def test_debug_without_valgrind(install):
    assert set(make_run_targets(spec(), install, "debug", False)) == {"run_example", "debug_example"}


def test_release_with_valgrind(install):
    targets = make_run_targets(spec(), install, "release", True)
    assert set(targets) == {"run_example", "memcheck_example"}
    assert targets["memcheck_example"].argv[:2] == ("valgrind", "--tool=memcheck")
    assert targets["memcheck_example"].argv[2:] == targets["run_example"].argv


def test_run_argv_shape(install):
    run = make_run_targets(spec(libraries=("l1", "l2")), install, "release", False)["run_example"]
    assert run.argv == (install.runner_release, "-n", "/work/src;/work/sim", "-l", "l1", "-l", "l2", "omnetpp.ini")
    assert run.working_dir == "/work/sim"


def test_debug_differs_only_in_runner(install):
    t = make_run_targets(spec(), install, "debug", True)
    run, debug = t["run_example"].argv, t["debug_example"].argv
    assert debug[0] == install.runner_debug
    assert debug[1:] == run[1:]


def test_extra_args_before_ini():
    assert runner_args(spec(extra_args=("-u", "Cmdenv"), libraries=())) == [
        "-n",
        "/work/src;/work/sim",
        "-u",
        "Cmdenv",
        "omnetpp.ini",
    ]


def test_invalid_specs():
    with pytest.raises(InvalidRunSpec):
        spec(ini_file="")
    with pytest.raises(InvalidRunSpec):
        spec(ned_folders=())
    with pytest.raises(InvalidRunSpec):
        spec(libraries=(), target_is_library=True)


def test_valgrind_probe(tmp_path):
    assert not valgrind_available(str(tmp_path))
    fake = tmp_path / "valgrind"
    fake.write_text("#!/bin/sh\n")
    fake.chmod(0o755)
    assert valgrind_available(str(tmp_path))
