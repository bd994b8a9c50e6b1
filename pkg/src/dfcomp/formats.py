"""Instance and function text formats, JSON reports and rate-region CSV.

Instance file::

    # comment
    informants 2
    widths 3 3
    encoding raw        # optional: raw | index
    vectors
    000 010
    ...
    end

Without ``encoding`` every token is a bit string of its informant's width.
With ``encoding raw`` tokens are integers written in natural binary at the
declared width.  With ``encoding index`` tokens are integers replaced by
their rank among that informant's distinct values, in ceil(log2 mu_Xi)
bits (at least 1); ``widths`` may then be omitted.  A vector line may end
with one extra numeric token, a probability weight, which is ignored.

Function file::

    function bitwise-or

or::

    function table
    000 010 -> 010
    ...
    end

Table keys use the encoded bit strings of the instance.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from typing import Any

from .ambiguity import SupportSet, bits_needed
from .errors import InvalidArgumentError, ParseError
from .functions import FunctionSpec

log = logging.getLogger(__name__)


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield n, raw, line


def _column(raw: str, token: str, nth: int = 0) -> int:
    at = -1
    for _ in range(nth + 1):
        at = raw.find(token, at + 1)
    return at + 1


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def parse_instance(text: str) -> SupportSet:
    n_inf: int | None = None
    widths: tuple[int, ...] | None = None
    encoding: str | None = None
    rows: list[tuple[int, str, list[str]]] = []
    section = "header"
    for n, raw, line in _lines(text):
        tokens = line.split()
        if section == "done":
            raise ParseError("content after 'end'", n, 1)
        if section == "vectors":
            if tokens == ["end"]:
                section = "done"
                continue
            rows.append((n, raw, tokens))
            continue
        key, args = tokens[0], tokens[1:]
        if key == "informants":
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise ParseError("'informants' takes one positive integer", n, 1)
            n_inf = int(args[0])
        elif key == "widths":
            if not args or not all(a.isdigit() and int(a) > 0 for a in args):
                raise ParseError("'widths' takes positive integers", n, 1)
            widths = tuple(int(a) for a in args)
        elif key == "encoding":
            if args not in (["index"], ["raw"]):
                raise ParseError("'encoding' must be 'index' or 'raw'", n, 1)
            encoding = args[0]
        elif key == "vectors" and not args:
            section = "vectors"
        else:
            raise ParseError(f"unknown header line {key!r}", n, 1)
    if n_inf is None:
        raise ParseError("missing 'informants' line")
    if section != "done":
        raise ParseError("missing 'vectors' section or its 'end' line")
    if widths is not None and len(widths) != n_inf:
        raise ParseError(f"'widths' lists {len(widths)} values for {n_inf} informants")
    if widths is None and encoding != "index":
        raise ParseError("missing 'widths' line")
    if not rows:
        raise ParseError("the 'vectors' section is empty")

    values: list[tuple[int, str, list[str]]] = []
    weighted = False
    for n, raw, tokens in rows:
        if len(tokens) == n_inf + 1 and _is_number(tokens[-1]):
            tokens, weighted = tokens[:-1], True
        if len(tokens) != n_inf:
            raise ParseError(f"expected {n_inf} tokens, got {len(tokens)}", n, 1)
        values.append((n, raw, tokens))
    if weighted:
        log.warning("probability weights are ignored; only the support matters")

    if encoding is None:
        vectors = []
        for n, raw, tokens in values:
            for i, (tok, w) in enumerate(zip(tokens, widths)):
                if len(tok) != w or any(c not in "01" for c in tok):
                    raise ParseError(f"token {tok!r} is not a {w}-bit string", n, _column(raw, tok))
            vectors.append((n, tuple(tokens)))
    else:
        ints = []
        for n, raw, tokens in values:
            row = []
            for tok in tokens:
                if not tok.isdigit():
                    raise ParseError(f"token {tok!r} is not a non-negative integer", n, _column(raw, tok))
                row.append(int(tok))
            ints.append((n, raw, row))
        if encoding == "raw":
            vectors = []
            for n, raw, row in ints:
                for x, w, tok in zip(row, widths, raw.split()):
                    if x >= 1 << w:
                        raise ParseError(f"value {x} does not fit in {w} bits", n, _column(raw, tok))
                vectors.append((n, tuple(format(x, f"0{w}b") for x, w in zip(row, widths))))
        else:
            marginals = [sorted({row[i] for _, _, row in ints}) for i in range(n_inf)]
            need = tuple(max(1, bits_needed(len(m))) for m in marginals)
            if widths is not None and widths != need:
                raise ParseError(f"index encoding needs widths {need}, file declares {widths}")
            widths = need
            ranks = [{x: r for r, x in enumerate(m)} for m in marginals]
            vectors = [
                (n, tuple(format(ranks[i][x], f"0{widths[i]}b") for i, x in enumerate(row)))
                for n, _, row in ints
            ]

    seen: dict[tuple[str, ...], int] = {}
    for n, v in vectors:
        if v in seen:
            raise ParseError(f"duplicate vector (first on line {seen[v]})", n, 1)
        seen[v] = n
    return SupportSet(widths, tuple(v for _, v in vectors))


def emit_instance(s: SupportSet) -> str:
    out = [f"informants {s.n_informants}", "widths " + " ".join(map(str, s.widths)), "vectors"]
    out += [" ".join(v) for v in s.vectors]
    out.append("end")
    return "\n".join(out) + "\n"


def parse_function(text: str, s: SupportSet) -> FunctionSpec:
    lines = list(_lines(text))
    if not lines:
        raise ParseError("empty function file")
    n, raw, line = lines[0]
    tokens = line.split()
    if len(tokens) != 2 or tokens[0] != "function":
        raise ParseError("expected 'function <builtin-name>' or 'function table'", n, 1)
    if tokens[1] != "table":
        if len(lines) > 1:
            raise ParseError("unexpected content after a builtin function line", lines[1][0], 1)
        try:
            return FunctionSpec.builtin(tokens[1])
        except InvalidArgumentError as e:
            raise ParseError(str(e), n, _column(raw, tokens[1])) from None
    table: dict[tuple[str, ...], str] = {}
    ended = False
    for n, raw, line in lines[1:]:
        if ended:
            raise ParseError("content after 'end'", n, 1)
        if line.split() == ["end"]:
            ended = True
            continue
        if "->" not in line:
            raise ParseError("table lines look like '<tokens> -> <value>'", n, 1)
        lhs, rhs = line.split("->", 1)
        key, value = tuple(lhs.split()), rhs.split()
        if len(value) != 1:
            raise ParseError("exactly one output value per line", n, _column(raw, "->") + 2)
        if key not in s.index:
            raise ParseError(f"{' '.join(key)} is not a support vector", n, 1)
        if key in table:
            raise ParseError(f"second output for {' '.join(key)}", n, 1)
        table[key] = value[0]
    if not ended:
        raise ParseError("function table is missing its 'end' line")
    missing = [v for v in s.vectors if v not in table]
    if missing:
        raise ParseError(f"function table has no output for {' '.join(missing[0])}")
    return FunctionSpec.from_table(table)


def emit_function(f: FunctionSpec) -> str:
    if f.table is None:
        return f"function {f.name}\n"
    out = ["function table"]
    out += [f"{' '.join(k)} -> {v}" for k, v in f.table]
    out.append("end")
    return "\n".join(out) + "\n"


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def region_csv(region) -> str:
    """Corner points and constraint lines of a rate region, one row each."""
    n = region.n_informants
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "label"] + [f"R{i + 1}" for i in range(n)] + ["rhs"])
    for k, c in enumerate(region.corners, start=1):
        w.writerow(["corner", f"corner{k}"] + list(c) + [""])
    for row in region.constraints:
        w.writerow(["constraint", row["label"]] + row["coefficients"] + [row["rhs"]])
    return buf.getvalue()
