"""Lifting binary games by clique-paired players.

The lifted game lives on the partition (1, ..., 1, 2, ..., 2): the base
players stay isolated and each appended pair forms a 2-clique. The appended
players' equations are fixed linear forms (times unit monomials), so every pair
contributes one free affine parameter to the Nash CI set, while the base
players' equations reproduce the base system.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .game import Game
from .graph import Partition
from .polyring import Polynomial, substitute
from .spohnci import (
    InternalInconsistency,
    SpohnCISystem,
    nash_ci_system,
    partition_param_map,
    solve_payoff_preimage,
)


@dataclass(frozen=True)
class LiftResult:
    game: Game
    partition: Partition
    base: Game
    targets: tuple[Polynomial, ...]
    report: dict = field(default_factory=dict)

    @property
    def pairs(self) -> int:
        return self.partition.k - sum(1 for s in self.partition.sizes if s == 1)

    def to_json(self) -> dict:
        return {
            "players": self.game.n,
            "partition": list(self.partition.sizes),
            "targets": [str(t) for t in self.targets],
            "verification": self.report,
        }


def _lift_partition(singles: int, pairs: int) -> Partition:
    return Partition.from_sizes([1] * singles + [2] * pairs)


def _unit(pm, col: int) -> Polynomial:
    e = [0] * len(pm.vt)
    e[col] = 1
    return Polynomial.monomial(pm.vt, e)


def _pair_targets(part: Partition) -> dict[int, Polynomial]:
    """Target polynomial for every appended player.

    Player (b, 1) gets (s11 + s12) and player (b, 2) gets (s11 + s21), each
    times s22 of its own block and the all-2 variable of every other block, so
    the multidegree is 2 on the own block and 1 elsewhere.
    """
    pm = partition_param_map(part)
    out = {}
    for b, block in enumerate(part.blocks):
        if len(block) != 2:
            continue
        s11, s12, s21, s22 = (_unit(pm, c) for c in pm.block_of_clique(b))
        rest = Polynomial.constant(pm.vt, 1)
        for other in range(part.k):
            if other != b:
                rest = rest * _unit(pm, pm.block_of_clique(other)[-1])
        out[block[0]] = (s11 + s12) * s22 * rest
        out[block[1]] = (s11 + s21) * s22 * rest
    return out


def _appended_tables(part: Partition) -> tuple[dict[int, tuple], dict[int, Polynomial]]:
    targets = _pair_targets(part)
    tables = {}
    for b, block in enumerate(part.blocks):
        for pos, player in enumerate(block):
            if player in targets:
                tables[player] = solve_payoff_preimage(part, b, pos, targets[player])
    return tables, targets


def _check_targets(system: SpohnCISystem, targets: dict[int, Polynomial]) -> bool:
    return all(system.polynomials[i] == t.primitive() for i, t in targets.items())


def lift_game(base: Game, l: int) -> LiftResult:
    """Extend ``base`` by ``l`` pairs of players.

    Base payoffs are kept where every appended player plays strategy 2 and are
    zero elsewhere; appended tables come from inverting the payoff-table map.
    """
    if not base.binary:
        raise ValueError("only binary base games can be lifted")
    if l < 0:
        raise ValueError("l must be non-negative")
    n = base.n
    part = _lift_partition(n, l)
    if l == 0:
        return LiftResult(base, part, base, (), {"base_equations_match": True, "targets_match": True})

    total = n + 2 * l
    shape = (2,) * total
    tables = []
    for i in range(n):
        src = np.array(base.payoffs[i], dtype=object).reshape((2,) * n)
        out = np.zeros(shape, dtype=object)
        out[(Ellipsis,) + (1,) * (2 * l)] = src
        tables.append(tuple(out.ravel().tolist()))
    appended, targets = _appended_tables(part)
    for player in range(n, total):
        tables.append(appended[player])
    lifted = Game(total, shape, tuple(tables))

    system = nash_ci_system(part, lifted)
    base_system = nash_ci_system(_lift_partition(n, 0), base)
    pm = system.pm
    all2 = Polynomial.constant(pm.vt, 1)
    for b in range(n, part.k):
        all2 = all2 * _unit(pm, pm.block_of_clique(b)[-1])
    base_match = all(
        system.polynomials[i] == (base_system.polynomials[i].to_vartable(pm.vt) * all2).primitive()
        for i in range(n)
    )
    report = {"base_equations_match": base_match, "targets_match": _check_targets(system, targets)}
    if not all(report.values()):
        raise InternalInconsistency(f"lift verification failed: {report}")
    return LiftResult(lifted, part, base, tuple(targets[p] for p in range(n, total)), report)


def embed_variety(base: Game, l: int, m: int) -> LiftResult:
    """Trade the last ``l`` (payoff-free) base players for ``l`` appended pairs.

    ``base`` has N players of which only the first ``m`` carry nonzero payoff
    tables (the trailing N - m must vanish). Each appended pair stands in for
    one replaced base player: the pair profile (1,1) plays the role of strategy
    1, (2,2) of strategy 2, and every mixed pair profile pays zero. The Nash CI
    set of the result is isomorphic to the base solution set.
    """
    if not base.binary:
        raise ValueError("only binary base games can be embedded")
    if l < 0 or m < 0:
        raise ValueError("l and m must be non-negative")
    N = base.n
    if N - m < l:
        raise ValueError(f"need at least l = {l} vanishing trailing tables, have N - m = {N - m}")
    if any(any(c != 0 for c in base.payoffs[i]) for i in range(m, N)):
        raise ValueError(f"payoff tables {m + 1}..{N} of the base game must vanish")
    keep = N - l
    part = _lift_partition(keep, l)
    if l == 0:
        return LiftResult(base, part, base, (), {"base_equations_match": True, "targets_match": True})

    total = keep + 2 * l
    shape = (2,) * total
    src_tables = [np.array(base.payoffs[i], dtype=object).reshape((2,) * N) for i in range(keep)]
    out_tables = [np.zeros(shape, dtype=object) for _ in range(keep)]
    for prof in itertools.product((0, 1), repeat=keep):
        for js in itertools.product((0, 1), repeat=l):
            idx = prof + tuple(x for j in js for x in (j, j))
            for i in range(keep):
                out_tables[i][idx] = src_tables[i][prof + js]
    tables = [tuple(t.ravel().tolist()) for t in out_tables]
    appended, targets = _appended_tables(part)
    for player in range(keep, total):
        tables.append(appended[player])
    lifted = Game(total, shape, tuple(tables))

    system = nash_ci_system(part, lifted)
    base_system = nash_ci_system(_lift_partition(N, 0), base)
    pm = system.pm
    base_vt = base_system.vt
    # base player keep+b's strategy a corresponds to pair b's (a, a) variable
    assignment = {}
    for j in range(keep):
        c1, c2 = pm.block_of_clique(j)
        assignment[base_vt.names[2 * j]] = _unit(pm, c1)
        assignment[base_vt.names[2 * j + 1]] = _unit(pm, c2)
    for b in range(l):
        cols = pm.block_of_clique(keep + b)
        assignment[base_vt.names[2 * (keep + b)]] = _unit(pm, cols[0])
        assignment[base_vt.names[2 * (keep + b) + 1]] = _unit(pm, cols[3])
    base_match = all(
        system.polynomials[i] == substitute(base_system.polynomials[i], assignment, pm.vt).primitive()
        for i in range(keep)
    )
    report = {"base_equations_match": base_match, "targets_match": _check_targets(system, targets)}
    if not all(report.values()):
        raise InternalInconsistency(f"embedding verification failed: {report}")
    return LiftResult(lifted, part, base, tuple(targets[p] for p in range(keep, total)), report)
