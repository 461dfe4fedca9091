"""JSON reading and writing for games and graphs.

Payoff entries may be integers, decimal literals or strings such as ``"3/4"``
or ``"-0.125"``; all are parsed to exact rationals. Numbers are read through
``Decimal`` so a literal like ``0.1`` means exactly one tenth.
"""
from __future__ import annotations

import json
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path

from .game import Game
from .graph import Graph, graph_from_json, graph_to_json
from .polyring import Coefficient


class FormatError(ValueError):
    """Malformed input; the message names the offending location."""


def parse_coefficient(value, where: str = "value") -> Coefficient:
    if isinstance(value, bool):
        raise FormatError(f"{where}: booleans are not payoffs")
    if isinstance(value, int):
        return value
    try:
        if isinstance(value, Decimal):
            f = Fraction(value)
        elif isinstance(value, str):
            text = value.strip()
            f = Fraction(Decimal(text)) if "/" not in text else Fraction(text)
        elif isinstance(value, float):
            f = Fraction(Decimal(repr(value)))
        else:
            raise FormatError(f"{where}: expected a number or a rational string, got {type(value).__name__}")
    except (InvalidOperation, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{where}: cannot parse {value!r} as a rational") from None
    return f.numerator if f.denominator == 1 else f


def format_coefficient(c: Coefficient):
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return int(c)


def loads(text: str, source: str = "<input>"):
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def game_from_json(obj) -> Game:
    if not isinstance(obj, dict):
        raise FormatError("game: expected a JSON object")
    for key in ("players", "payoffs"):
        if key not in obj:
            raise FormatError(f"game: missing field {key!r}")
    n = obj["players"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise FormatError("game.players: expected an integer >= 2")
    d = obj.get("choices", [2] * n)
    if not isinstance(d, list) or len(d) != n or not all(isinstance(x, int) and x >= 2 for x in d):
        raise FormatError(f"game.choices: expected {n} integers >= 2")
    payoffs = obj["payoffs"]
    if not isinstance(payoffs, list) or len(payoffs) != n:
        raise FormatError(f"game.payoffs: expected {n} tensors")
    size = 1
    for x in d:
        size *= x
    tables = []
    for i, t in enumerate(payoffs):
        if not isinstance(t, list) or len(t) != size:
            raise FormatError(f"game.payoffs[{i}]: expected a flat array of {size} entries")
        tables.append(tuple(parse_coefficient(v, f"game.payoffs[{i}][{k}]") for k, v in enumerate(t)))
    return Game(n, tuple(d), tuple(tables))


def game_to_json(g: Game) -> dict:
    return {
        "players": g.n,
        "choices": list(g.d),
        "payoffs": [[format_coefficient(c) for c in t] for t in g.payoffs],
    }


def graph_from_obj(obj) -> Graph:
    try:
        return graph_from_json(obj)
    except ValueError as exc:
        raise FormatError(f"graph: {exc}") from None


def read_json(path: str | Path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from None
    return loads(text, str(path))


def load_game(path: str | Path) -> Game:
    return game_from_json(read_json(path))


def load_graph(path: str | Path) -> Graph:
    return graph_from_obj(read_json(path))


def dumps(obj, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(obj, indent=2, sort_keys=False)
    return json.dumps(obj, separators=(",", ":"))


__all__ = [
    "FormatError",
    "dumps",
    "format_coefficient",
    "game_from_json",
    "game_to_json",
    "graph_from_obj",
    "graph_to_json",
    "load_game",
    "load_graph",
    "loads",
    "parse_coefficient",
]
