import json

import pytest
from hypothesis import given, strategies as st

from oppforge.errors import JsoncSyntaxError
from oppforge.jsonc import dump_json, merge_named, parse_jsonc


def test_comment_and_trailing_comma():
    assert parse_jsonc('{ // hi\n "a": 1, }') == {"a": 1}
    assert parse_jsonc('{"a": [1,2,],}') == {"a": [1, 2]}


def test_block_comments_and_strings_untouched():
    text = '/* head */ {"url": "http://x//y", "c": "/* no */", /* mid */ "n": -1.5e3}'
    assert parse_jsonc(text) == {"url": "http://x//y", "c": "/* no */", "n": -1500.0}


@pytest.mark.parametrize(
    "bad",
    ["{\"a\": 'x'}", "{", "[1,,2]", "{,}", "[,]", '{"a" 1}', "/* open", "[1] 2", "", "nan", '{"a": 01}', "[1,]]"],
)
def test_rejects(bad):
    with pytest.raises(JsoncSyntaxError):
        parse_jsonc(bad)


def test_error_position():
    with pytest.raises(JsoncSyntaxError) as exc:
        parse_jsonc('{\n  "a": 1,\n  "b": @\n}')
    assert (exc.value.line, exc.value.col) == (3, 8)


def test_bom_and_escapes():
    assert parse_jsonc('\ufeff{"s": "a\\u00e9\\n"}') == {"s": "aé\n"}


def test_duplicate_keys_last_wins():
    assert parse_jsonc('{"a": 1, "a": 2}') == {"a": 2}


def test_deep_nesting_is_a_syntax_error():
    with pytest.raises(JsoncSyntaxError):
        parse_jsonc("[" * 100000)


def test_dump_is_strict_and_newline_terminated():
    text = dump_json({"a": [1, {"b": None}], "é": True})
    assert text.endswith("}\n")
    assert json.loads(text) == {"a": [1, {"b": None}], "é": True}
    assert "é" in text
    with pytest.raises(ValueError):
        dump_json({"x": float("nan")})


json_values = st.recursive(
    st.none() | st.booleans() | st.integers() | st.floats(allow_nan=False, allow_infinity=False) | st.text(),
    lambda children: st.lists(children, max_size=4) | st.dictionaries(st.text(max_size=5), children, max_size=4),
    max_leaves=20,
)


@given(json_values)
def test_agrees_with_stdlib_on_strict_json(value):
    text = json.dumps(value)
    assert parse_jsonc(text) == json.loads(text)
    assert parse_jsonc(dump_json(value)) == value


def test_merge_named():
    existing = [{"name": "u"}, {"name": "g", "v": 1}, "odd", {"name": "g", "v": 2}]
    merged = merge_named(existing, [{"name": "g", "v": 3}, {"name": "new"}])
    assert merged == [{"name": "u"}, {"name": "g", "v": 3}, "odd", {"name": "new"}]
    with pytest.raises(ValueError):
        merge_named([], [{"name": "a"}, {"name": "a"}])
