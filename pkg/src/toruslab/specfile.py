"""Curve spec files and circle-sample CSVs, with positioned diagnostics.

A curve spec is a JSON object::

    {"label": "optional", "polynomials": [[[re, im], ...], ...]}

with coefficients in ascending powers.  Every validation failure raises
:class:`~toruslab.errors.InputError` carrying ``line:column`` of the offending
token.
"""

from __future__ import annotations

import csv
import io
import json
import math

from .curve import ExpPolyCurve, Polynomial
from .errors import InputError
from .recovery import CircleSamples

_DECODER = json.JSONDecoder(parse_constant=lambda name: _reject_constant(name))
_WS = " \t\n\r"


def _reject_constant(name):
    raise ValueError(f"non-finite literal {name}")


def _line_col(text: str, pos: int):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Node:
    """A parsed JSON value and the offset where it starts."""

    __slots__ = ("value", "pos", "children")

    def __init__(self, value, pos, children=None):
        self.value = value
        self.pos = pos
        self.children = children


def _skip(text, i):
    while i < len(text) and text[i] in _WS:
        i += 1
    return i


def _parse(text, i):
    """Recursive descent over arrays/objects; scalars go to the json decoder."""
    i = _skip(text, i)
    if i >= len(text):
        raise json.JSONDecodeError("Expecting value", text, i)
    ch = text[i]
    if ch == "[":
        items = []
        j = _skip(text, i + 1)
        if j < len(text) and text[j] == "]":
            return _Node([], i, []), j + 1
        while True:
            node, j = _parse(text, j)
            items.append(node)
            j = _skip(text, j)
            if j < len(text) and text[j] == ",":
                j += 1
            elif j < len(text) and text[j] == "]":
                return _Node([n.value for n in items], i, items), j + 1
            else:
                raise json.JSONDecodeError("Expecting ',' delimiter", text, j)
    if ch == "{":
        members = {}
        j = _skip(text, i + 1)
        if j < len(text) and text[j] == "}":
            return _Node({}, i, {}), j + 1
        while True:
            j = _skip(text, j)
            if j >= len(text) or text[j] != '"':
                raise json.JSONDecodeError("Expecting property name enclosed in double quotes",
                                           text, j)
            key, j = _DECODER.raw_decode(text, j)
            j = _skip(text, j)
            if j >= len(text) or text[j] != ":":
                raise json.JSONDecodeError("Expecting ':' delimiter", text, j)
            node, j = _parse(text, j + 1)
            members[key] = node
            j = _skip(text, j)
            if j < len(text) and text[j] == ",":
                j += 1
            elif j < len(text) and text[j] == "}":
                return _Node({k: n.value for k, n in members.items()}, i, members), j + 1
            else:
                raise json.JSONDecodeError("Expecting ',' delimiter", text, j)
    try:
        value, end = _DECODER.raw_decode(text, i)
    except ValueError as exc:
        if isinstance(exc, json.JSONDecodeError):
            raise
        raise json.JSONDecodeError(str(exc), text, i) from None
    return _Node(value, i), end


def _fail(text, node_or_pos, message, source):
    pos = node_or_pos.pos if isinstance(node_or_pos, _Node) else node_or_pos
    line, col = _line_col(text, pos)
    raise InputError(f"{source}:{line}:{col}: {message}")


def parse_spec(text: str, source: str = "<spec>") -> tuple:
    """Validate a spec document; return ``(curve, echo)``.

    ``echo`` is the normalized spec (label and float pairs) for reports.
    """
    try:
        root, end = _parse(text, 0)
        end = _skip(text, end)
        if end != len(text):
            raise json.JSONDecodeError("Extra data", text, end)
    except json.JSONDecodeError as exc:
        _fail(text, exc.pos, f"invalid JSON: {exc.msg}", source)
    if not isinstance(root.children, dict):
        _fail(text, root, "spec must be a JSON object", source)
    for key, node in root.children.items():
        if key not in ("label", "polynomials"):
            _fail(text, node, f"unknown key {key!r}", source)
    label = None
    if "label" in root.children:
        node = root.children["label"]
        if not isinstance(node.value, str):
            _fail(text, node, "label must be a string", source)
        label = node.value
    if "polynomials" not in root.children:
        _fail(text, root, "missing key 'polynomials'", source)
    polys_node = root.children["polynomials"]
    if not isinstance(polys_node.children, list):
        _fail(text, polys_node, "'polynomials' must be a list", source)
    if not polys_node.children:
        _fail(text, polys_node, "'polynomials' must not be empty", source)
    polys, echo = [], []
    for p_node in polys_node.children:
        if not isinstance(p_node.children, list):
            _fail(text, p_node, "each polynomial must be a list of [re, im] pairs", source)
        if not p_node.children:
            _fail(text, p_node, "each polynomial needs at least one coefficient", source)
        pairs = []
        for c_node in p_node.children:
            kids = c_node.children
            if not isinstance(kids, list) or len(kids) != 2:
                _fail(text, c_node, "coefficient must be a pair [re, im]", source)
            pair = []
            for part in kids:
                v = part.value
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    _fail(text, part, "coefficient parts must be numbers", source)
                try:
                    v = float(v)
                except OverflowError:
                    v = math.inf
                if not math.isfinite(v):
                    _fail(text, part, "coefficient is not finite", source)
                pair.append(v)
            pairs.append(pair)
        polys.append(Polynomial(pairs))
        echo.append(pairs)
    spec_echo = {"polynomials": echo}
    if label is not None:
        spec_echo["label"] = label
    return ExpPolyCurve(polys, label=label), spec_echo


def load_spec(path: str) -> tuple:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read spec ({exc.strerror})") from None
    return parse_spec(text, path)


def parse_inline_polynomial(text: str) -> Polynomial:
    """``"0,0,1"`` -> ``z^2``; entries may be complex literals like ``1+2j``."""
    coeffs = []
    col = 1
    for part in text.split(","):
        token = part.strip().replace(" ", "")
        try:
            value = complex(token)
        except ValueError:
            raise InputError(f"--poly:1:{col}: cannot parse coefficient {part!r}") from None
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise InputError(f"--poly:1:{col}: coefficient is not finite")
        coeffs.append(value)
        col += len(part) + 1
    return Polynomial(coeffs)


def read_samples_csv(text: str, r: float, source: str = "<samples>") -> CircleSamples:
    """Samples from a CSV with header ``theta_index,value``."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise InputError(f"{source}:1:1: empty sample file") from None
    if [h.strip() for h in header] != ["theta_index", "value"]:
        raise InputError(f"{source}:1:1: header must be 'theta_index,value'")
    values = {}
    for row in reader:
        line = reader.line_num
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != 2:
            raise InputError(f"{source}:{line}:1: expected 2 columns, got {len(row)}")
        try:
            idx = int(row[0])
        except ValueError:
            raise InputError(f"{source}:{line}:1: theta_index must be an integer") from None
        try:
            val = float(row[1])
        except ValueError:
            raise InputError(f"{source}:{line}:2: value must be a number") from None
        if not math.isfinite(val):
            raise InputError(f"{source}:{line}:2: value is not finite")
        if idx in values:
            raise InputError(f"{source}:{line}:1: duplicate theta_index {idx}")
        values[idx] = val
    n = len(values)
    if sorted(values) != list(range(n)):
        raise InputError(f"{source}: theta_index must cover 0..N-1 exactly")
    if n < 64 or n & (n - 1):
        raise InputError(f"{source}: sample count must be a power of two >= 64, got {n}")
    return CircleSamples(r, [values[i] for i in range(n)])


def load_samples(path: str, r: float) -> CircleSamples:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read samples ({exc.strerror})") from None
    return read_samples_csv(text, r, path)
