"""JSON documents read and written by the command line front end.

Exponents travel as strings so that rationals such as "4/3" survive a round
trip untouched; coefficients are plain JSON numbers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DocumentError
from .geometry import Circuit, make_point, parse_rational
from .signomial import Signomial

MODES = ("exp", "poly")


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, exc.lineno, exc.colno) from None


def read_json(path) -> dict:
    data = _loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise DocumentError("top-level JSON value must be an object")
    return data


def _field(data: dict, key: str, kind, where: str = "document"):
    if key not in data:
        raise DocumentError(f"{where}: missing field {key!r}")
    val = data[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise DocumentError(f"{where}: field {key!r} must be an integer")
    if kind is list and not isinstance(val, list):
        raise DocumentError(f"{where}: field {key!r} must be a list")
    return val


def _exponent(raw, where: str) -> str:
    if not isinstance(raw, str):
        raise DocumentError(f"{where}: exponents must be strings, got {raw!r}")
    text = raw
    try:
        parse_rational(text)
    except ValueError as exc:
        raise DocumentError(f"{where}: {exc}") from None
    return text


def _point_strings(raw, n: int, where: str) -> tuple:
    if not isinstance(raw, list) or len(raw) != n:
        raise DocumentError(f"{where}: expected a list of {n} exponents")
    return tuple(_exponent(x, where) for x in raw)


@dataclass(frozen=True)
class SignomialDocument:
    n: int
    mode: str
    terms: tuple  # ((coefficient, (exponent strings...)), ...)
    extra: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_dict(cls, data: dict) -> "SignomialDocument":
        n = _field(data, "n", int)
        if n < 1:
            raise DocumentError("field 'n' must be positive")
        mode = data.get("mode", "exp")
        if mode not in MODES:
            raise DocumentError(f"field 'mode' must be one of {MODES}")
        terms = []
        for i, t in enumerate(_field(data, "terms", list)):
            where = f"terms[{i}]"
            if not isinstance(t, dict):
                raise DocumentError(f"{where}: term must be an object")
            c = _field(t, "c", None, where)
            if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
                raise DocumentError(f"{where}: coefficient must be a finite number")
            e = _point_strings(_field(t, "e", list, where), n, where)
            if mode == "poly":
                q = make_point(e)
                if any(x.denominator != 1 or x < 0 for x in q):
                    raise DocumentError(f"{where}: polynomial exponents must be nonnegative integers")
            terms.append((c, e))
        extra = {k: v for k, v in data.items() if k not in ("n", "mode", "terms")}
        return cls(n, mode, tuple(terms), extra)

    @classmethod
    def loads(cls, text: str) -> "SignomialDocument":
        data = _loads(text)
        if not isinstance(data, dict):
            raise DocumentError("top-level JSON value must be an object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "SignomialDocument":
        return cls.loads(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def from_signomial(cls, f: Signomial, mode: str = "exp") -> "SignomialDocument":
        from .geometry import format_rational

        return cls(f.dim, mode, tuple((c, tuple(format_rational(x) for x in p)) for c, p in f.terms()))

    def to_dict(self) -> dict:
        out = {"n": self.n, "mode": self.mode, "terms": [{"c": c, "e": list(e)} for c, e in self.terms]}
        out.update(self.extra)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8", newline="\n")

    def to_signomial(self) -> Signomial:
        return Signomial.from_terms([(c, make_point(e)) for c, e in self.terms], self.n)


def load_circuit(data: dict) -> Circuit:
    """``{"n": 2, "vertices": [["4","2"], ...], "inner": ["2","2"]}``"""
    n = _field(data, "n", int)
    verts = [make_point(_point_strings(v, n, f"vertices[{i}]")) for i, v in enumerate(_field(data, "vertices", list))]
    inner = make_point(_point_strings(_field(data, "inner", list), n, "inner"))
    return Circuit.from_points(verts, inner)


def load_points(data: dict, key: str) -> list:
    n = _field(data, "n", int)
    return [make_point(_point_strings(p, n, f"{key}[{i}]")) for i, p in enumerate(_field(data, key, list))]
