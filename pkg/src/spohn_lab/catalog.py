"""Built-in named games and graphs."""
from __future__ import annotations

from .game import Game
from .graph import Graph

# (player, 1-based profile, value); every other entry is zero
_PRINTED_4PLAYER = [
    (1, "1111", 1), (2, "1112", 1), (3, "1111", 1), (4, "1211", 1),
    (2, "1121", -10), (4, "2111", -10), (2, "2221", -16), (4, "2122", -16),
    (1, "2111", 3), (2, "1212", 3), (3, "1121", 3), (4, "1212", 3),
    (2, "1221", -14), (4, "2112", -14), (2, "2121", -12), (4, "2121", -12),
    (1, "1211", 2), (2, "2112", 2), (3, "1112", 2), (4, "1221", 2), (1, "2122", 2), (3, "2221", 2),
    (1, "2211", 4), (2, "2212", 4), (3, "1122", 4), (4, "1222", 4), (2, "1222", 4), (4, "2212", 4),
]


# Two entries of the printed list belong to the mirror player and two are
# missing; without these fixes the payoffs on the CI surface and the Nash
# point do not come out as 24(z0+z2), -24(z1+z3), ... and z = 1/36.
_MOVED = {(2, "1222"): 1, (4, "2212"): 3}
_ADDED = [(1, "1122", 6), (3, "2211", 6)]


def _entries_to_game(entries) -> Game:
    tables = [[0] * 16 for _ in range(4)]
    for player, prof, value in entries:
        idx = int("".join(str(int(c) - 1) for c in prof), 2)
        tables[player - 1][idx] = value
    return Game(4, (2, 2, 2, 2), tuple(tuple(t) for t in tables))


def example_4player() -> Game:
    entries = [(_MOVED.get((pl, prof), pl), prof, v) for pl, prof, v in _PRINTED_4PLAYER]
    return _entries_to_game(entries + _ADDED)


def example_4player_printed() -> Game:
    """The entry list exactly as printed, kept for comparison."""
    return _entries_to_game(_PRINTED_4PLAYER)


GAMES = {"example-4player": example_4player, "example-4player-printed": example_4player_printed}


def _figure2() -> Graph:
    return Graph.from_cliques(7, [(0, 1, 2), (1, 2, 3, 4), (1, 2, 4, 5), (4, 5, 6)])


GRAPHS = {
    "line4": lambda: Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]),
    "cycle4": lambda: Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
    "figure2": _figure2,
    "g4-example": lambda: Graph.from_edges(4, [(0, 1), (2, 3)]),
}


def named_game(name: str) -> Game:
    try:
        return GAMES[name]()
    except KeyError:
        raise KeyError(f"unknown game {name!r}; built-ins: {', '.join(sorted(GAMES))}") from None


def named_graph(name: str) -> Graph:
    """Built-in graphs plus ``empty<n>`` and ``complete<n>``."""
    if name in GRAPHS:
        return GRAPHS[name]()
    for prefix, make in (("empty", Graph.empty), ("complete", Graph.complete)):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            return make(int(name[len(prefix):]))
    raise KeyError(f"unknown graph {name!r}; built-ins: {', '.join(sorted(GRAPHS))}, empty<n>, complete<n>")
