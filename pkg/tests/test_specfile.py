import math

import pytest
from hypothesis import given, strategies as st

from toruslab import InputError, Polynomial
from toruslab.specfile import (load_samples, load_spec, parse_inline_polynomial, parse_spec,
                               read_samples_csv)


def test_parse_valid():
    curve, echo = parse_spec('{"label": "t", "polynomials": [[[0, 0], [0, 0], [1, 0]], [[0, 0], [0, 1]]]}')
    assert curve.label == "t"
    assert curve.exponents == (Polynomial([0, 0, 1]), Polynomial([0, 1j]))
    assert echo == {"label": "t", "polynomials": [[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
                                                  [[0.0, 0.0], [0.0, 1.0]]]}


@pytest.mark.parametrize("text,where,fragment", [
    ('{"polynomials": [[[1, NaN]]]}', "1:23", "invalid JSON"),
    ('{"polynomials": [[[1, 1e999]]]}', "1:23", "not finite"),
    ('{"polynomials": []}', "1:17", "must not be empty"),
    ('{"polynomials": [[]]}', "1:18", "at least one coefficient"),
    ('{"polynomials": [[[1, 2, 3]]]}', "1:19", "pair"),
    ('{"polynomials": [[["a", 0]]]}', "1:20", "numbers"),
    ('{"polynomials": [[[true, 0]]]}', "1:20", "numbers"),
    ('{"polynomial": []}', "1:16", "unknown key"),
    ('{"label": 3, "polynomials": [[[1, 0]]]}', "1:11", "label"),
    ('[1, 2]', "1:1", "JSON object"),
    ('{}', "1:1", "missing key"),
    ('{"polynomials": [[[1, 0]]]} x', "1:29", "Extra data"),
    ('{"polynomials": [[[1, 0]]', "1:26", "invalid JSON"),
])
def test_parse_errors(text, where, fragment):
    with pytest.raises(InputError) as exc:
        parse_spec(text, "s.json")
    msg = str(exc.value)
    assert msg.startswith(f"s.json:{where}:"), msg
    assert fragment in msg


def test_error_on_later_line():
    text = '{\n  "polynomials": [\n    [[0, 0], [1, Infinity]]\n  ]\n}'
    with pytest.raises(InputError, match=r"^f:3:18: "):
        parse_spec(text, "f")


def test_huge_integer_is_not_finite():
    with pytest.raises(InputError, match="not finite"):
        parse_spec('{"polynomials": [[[1' + "0" * 400 + ', 0]]]}')


def test_load_spec_missing(tmp_path):
    with pytest.raises(InputError, match="cannot read"):
        load_spec(str(tmp_path / "nope.json"))


def test_inline_polynomial():
    assert parse_inline_polynomial("0,0,1") == Polynomial([0, 0, 1])
    assert parse_inline_polynomial(" 1+2j , 0, -3") == Polynomial([1 + 2j, 0, -3])
    with pytest.raises(InputError, match=r"--poly:1:5:"):
        parse_inline_polynomial("0,1,x")
    with pytest.raises(InputError, match="not finite"):
        parse_inline_polynomial("inf")


def _csv(values):
    return "theta_index,value\n" + "".join(f"{i},{v!r}\n" for i, v in enumerate(values))


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=64, max_size=64))
def test_samples_roundtrip(values):
    s = read_samples_csv(_csv(values), 2.0)
    assert s.r == 2.0 and list(s.values) == values


@pytest.mark.parametrize("text,fragment", [
    ("", "empty"),
    ("index,value\n", "header"),
    ("theta_index,value\n0,1,2\n", "2:1"),
    ("theta_index,value\n0,abc\n", "2:2"),
    ("theta_index,value\nx,1\n", "2:1"),
    ("theta_index,value\n0,nan\n", "not finite"),
    ("theta_index,value\n0,1\n0,2\n", "duplicate"),
    ("theta_index,value\n0,1\n2,2\n", "cover"),
    (_csv([0.0] * 32), "power of two"),
    (_csv([0.0] * 96), "power of two"),
], ids=["empty", "header", "columns", "value", "index", "nan", "duplicate", "gap", "n32", "n96"])
def test_samples_errors(text, fragment):
    with pytest.raises(InputError, match=fragment):
        read_samples_csv(text, 1.0, "x.csv")


def test_load_samples_file(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text(_csv([math.cos(i) for i in range(64)]))
    assert load_samples(str(path), 3.0).N == 64
