"""Bisimilarity and its approximants ``~_k`` by round-indexed partition refinement.

Round ``k`` of the refinement is exactly the kernel of ``~_k``: round 0 is a
single block, and two states share a block in round ``k+1`` iff their
successors hit the same *set* of round-``k`` blocks.  We deliberately do not
use Paige-Tarjan splitting since it does not expose the per-round partitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .system import FinSystem, PointedSystem, State, disjoint_union

INF = math.inf


@dataclass(frozen=True)
class Partition:
    blocks: tuple  # tuple of frozensets, numbered by first state in identifier order
    block_of: dict

    def same(self, x: State, y: State) -> bool:
        return self.block_of[x] == self.block_of[y]

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class Move:
    """One round of the distinguishing game.

    ``side`` is 0 when the attacker moves in the left system, 1 for the right.
    ``response`` is the defender's best answer, or None when it has none.
    """

    side: int
    attack: State
    response: State | None


@dataclass(frozen=True)
class SimVerdict:
    level: float  # int, or INF when bisimilar
    witness: tuple | None = None

    @property
    def bisimilar(self) -> bool:
        return self.level == INF


class _Refinement:
    """All refinement rounds of one finite system, computed lazily."""

    def __init__(self, sys: FinSystem):
        self.sys = sys
        self.states = sys.states
        self.pos = {s: i for i, s in enumerate(sys.states)}
        self.succ = [[self.pos[t] for t in sys.succ[s]] for s in sys.states]
        self.rounds = [[0] * len(self.states)]
        self.counts = [1 if self.states else 0]
        self.stable_at: int | None = None

    def _step(self) -> None:
        prev = self.rounds[-1]
        table: dict = {}
        nxt = []
        for out in self.succ:
            sig = frozenset(prev[t] for t in out)
            nxt.append(table.setdefault(sig, len(table)))
        if len(table) == self.counts[-1] and self.stable_at is None:
            self.stable_at = len(self.rounds) - 1
        self.rounds.append(nxt)
        self.counts.append(len(table))

    def round(self, k: int) -> list:
        if self.stable_at is not None and k > self.stable_at:
            return self.rounds[self.stable_at]
        while len(self.rounds) <= k:
            self._step()
            if self.stable_at is not None and k > self.stable_at:
                return self.rounds[self.stable_at]
        return self.rounds[k]

    def fixpoint(self) -> int:
        while self.stable_at is None:
            self._step()
        return self.stable_at

    def partition(self, k: int) -> Partition:
        ids = self.round(k)
        blocks: dict = {}
        for s, b in zip(self.states, ids):
            blocks.setdefault(b, []).append(s)
        # renumber by first state in identifier order
        order = sorted(blocks, key=lambda b: self.pos[blocks[b][0]])
        renum = {b: i for i, b in enumerate(order)}
        return Partition(
            tuple(frozenset(blocks[b]) for b in order),
            {s: renum[b] for s, b in zip(self.states, ids)},
        )

    def level(self, i: int, j: int) -> float:
        """Least ``k`` with states ``i`` and ``j`` (positions) split at round ``k``."""
        top = self.fixpoint()
        for k in range(top + 1):
            r = self.rounds[k]
            if r[i] != r[j]:
                return k
        return INF


def approximant(sys: FinSystem, k: int) -> Partition:
    """Kernel of ``~_k`` on ``sys``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return _Refinement(sys).partition(k)


def approximants(sys: FinSystem, kmax: int) -> list[Partition]:
    """Kernels of ``~_0 .. ~_kmax`` from one refinement run."""
    ref = _Refinement(sys)
    return [ref.partition(k) for k in range(kmax + 1)]


def fixpoint_round(sys: FinSystem) -> int:
    """First round ``r`` after which refinement no longer splits anything."""
    return _Refinement(sys).fixpoint()


def bisimulation(sys: FinSystem) -> Partition:
    ref = _Refinement(sys)
    return ref.partition(ref.fixpoint())


def bisimilar(x: PointedSystem, y: PointedSystem) -> bool:
    sys, (rx, ry) = disjoint_union(x, y)
    return bisimulation(sys).same(rx, ry)


def bisim_at(x: PointedSystem, y: PointedSystem, k: int) -> bool:
    sys, (rx, ry) = disjoint_union(x, y)
    return approximant(sys, k).same(rx, ry)


def sim_level(x: PointedSystem, y: PointedSystem) -> SimVerdict:
    """Least ``k`` with ``x`` and ``y`` not ``~_k``-related, with a witness trace."""
    sys, (rx, ry) = disjoint_union(x, y)
    ref = _Refinement(sys)
    level = ref.level(ref.pos[rx], ref.pos[ry])
    if level == INF:
        return SimVerdict(INF)
    trace = _witness(ref, ref.pos[rx], ref.pos[ry], level)
    untag = [Move(m.side, m.attack[1], None if m.response is None else m.response[1]) for m in trace]
    return SimVerdict(level, tuple(untag))


def _witness(ref: _Refinement, a: int, b: int, level: int) -> list[Move]:
    moves = []
    while level > 0:
        split = ref.round(level - 1)
        below = ref.round(level - 2) if level >= 2 else None
        candidates = []
        for side, here, there in ((0, a, b), (1, b, a)):
            answers = {split[t] for t in ref.succ[there]}
            candidates += [(t, side, there) for t in ref.succ[here] if split[t] not in answers]
        assert candidates, "refinement rounds are inconsistent"
        attack, side, there = min(candidates)
        if below is None:
            response = None
        else:
            response = min(t for t in ref.succ[there] if below[t] == below[attack])
        st = ref.states
        moves.append(Move(side, st[attack], None if response is None else st[response]))
        if response is None:
            break
        a, b = (attack, response) if side == 0 else (response, attack)
        level -= 1
    return moves


def verify_witness(x: PointedSystem, y: PointedSystem, verdict: SimVerdict) -> bool:
    """Replay a witness trace, checking levels with coalgebra projections.

    Each attack must be a real move, each response a real answer, the final
    attack must leave the defender stuck, and the pair reached after each
    round must be split exactly one level lower.
    """
    from .chain import project

    if verdict.bisimilar:
        return verdict.witness is None
    k = int(verdict.level)
    if project(x, k) == project(y, k) or (k > 0 and project(x, k - 1) != project(y, k - 1)):
        return False
    trace = verdict.witness or ()
    if len(trace) != k:
        return False
    a, b = x.root, y.root
    for step, m in enumerate(trace):
        here, there = (x, y) if m.side == 0 else (y, x)
        ha, hb = (a, b) if m.side == 0 else (b, a)
        if m.attack not in here.successors(ha):
            return False
        remaining = k - step - 1
        if m.response is None:
            return remaining == 0 and not there.successors(hb)
        if m.response not in there.successors(hb):
            return False
        pa, pb = here.at(m.attack), there.at(m.response)
        if project(pa, remaining) == project(pb, remaining):
            return False
        if remaining and project(pa, remaining - 1) != project(pb, remaining - 1):
            return False
        a, b = (m.attack, m.response) if m.side == 0 else (m.response, m.attack)
    return False


def kernel_classes(sys: FinSystem, k: int, states: Sequence[State] | None = None) -> dict:
    """Map each state to its ``~_k`` block index."""
    part = approximant(sys, k)
    return {s: part.block_of[s] for s in (states if states is not None else sys.states)}
