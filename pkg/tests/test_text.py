import json

import numpy as np
import pytest

from utils.text import (
    format_float,
    parse_float_list,
    parse_int_list,
    parse_time_range,
    render,
    render_csv,
    render_json,
    render_jsonl,
    to_plain,
)


def test_format_float_round_trips_exactly():
    x = 0.1 + 0.2
    assert float(format_float(x)) == x


def test_to_plain_converts_numpy():
    plain = to_plain({"a": np.arange(3), "b": np.float64(1.5), "c": (1, 2j)})
    assert plain == {"a": [0, 1, 2], "b": 1.5, "c": [1, [0.0, 2.0]]}


def test_render_json_is_sorted_and_terminated():
    text = render_json({"b": 1, "a": np.float64(2.0)})
    assert text.endswith("\n")
    assert list(json.loads(text)) == ["a", "b"]


def test_render_jsonl_one_object_per_line():
    text = render_jsonl([{"x": 1}, {"x": 2}])
    assert [json.loads(line)["x"] for line in text.splitlines()] == [1, 2]


def test_render_csv_columns_and_blanks():
    text = render_csv([{"t": 0.5, "p": None}], ["t", "p"])
    assert text.splitlines() == ["t,p", "0.5,"]


def test_render_unknown_format():
    with pytest.raises(ValueError):
        render("xml", {}, [])


def test_parse_lists():
    assert parse_float_list("1, 2.5,") == [1.0, 2.5]
    assert parse_int_list("0,1,2") == [0, 1, 2]
    with pytest.raises(ValueError):
        parse_int_list("1,x")


@pytest.mark.parametrize(
    "text, expected",
    [("3", [3.0]), ("0:1:0.5", [0.0, 0.5, 1.0]), ("0:1:0.3", [0.0, 0.3, 0.6, 0.8999999999999999])],
)
def test_parse_time_range(text, expected):
    assert parse_time_range(text) == pytest.approx(expected)


@pytest.mark.parametrize("text", ["0:1", "1:0:0.1", "0:1:0", "a:b:c"])
def test_parse_time_range_rejects(text):
    with pytest.raises(ValueError):
        parse_time_range(text)
