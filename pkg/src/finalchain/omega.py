"""Elements of level omega as lazy full branches, and the transition relation there.

A full branch ``(b_n)`` is evaluated on demand.  Questions about infinitely
many levels are answered exactly only when both sides are backed by finite
systems (where bisimilarity decides them); otherwise the answer is a verdict
that carries the depth it was verified to, e.g. ``EqualUpTo(12)``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Iterable

from . import chain as fc
from .bisim import bisimilar, sim_level
from .errors import EmptyChannel
from .system import DEFAULT_PROBE_BOUND, GenSystem, PointedSystem
from .trees import DEFAULT_DEPTH, Channel, final_chain

KONIG_MARGIN = 4


@dataclass(frozen=True)
class EqualUpTo:
    depth: int


@dataclass(frozen=True)
class DistinguishedAt:
    level: int


@dataclass(frozen=True)
class ConsistentUpTo:
    depth: int


@dataclass(frozen=True)
class FailsAt:
    index: int


Verdict = EqualUpTo | DistinguishedAt | ConsistentUpTo | FailsAt


def verdict_json(v: bool | Verdict) -> dict:
    if isinstance(v, bool):
        return {"verdict": "exact", "value": v}
    tag = type(v).__name__
    return {"verdict": tag, **v.__dict__}


def holds(v: bool | Verdict) -> bool:
    """Whether a verdict reports agreement (exactly, or up to its depth)."""
    return v if isinstance(v, bool) else isinstance(v, (EqualUpTo, ConsistentUpTo))


class OmegaBranch:
    """A coherent full branch through the finite levels.

    Backed either by a system (``b_n`` is its ``n``-th projection) or by a
    level function, as for branches produced by :func:`konig_extract`.
    """

    def __init__(self, backing: PointedSystem | GenSystem | None = None,
                 level_fn: Callable[[int], fc.LevelElem] | None = None, name: str | None = None):
        if (backing is None) == (level_fn is None):
            raise ValueError("give exactly one of backing or level_fn")
        self.backing = backing
        self._level_fn = level_fn
        self._levels: dict = {}
        self._lock = threading.Lock()
        self.name = name or repr(backing)

    @property
    def finite(self) -> bool:
        return isinstance(self.backing, PointedSystem)

    def level(self, n: int) -> fc.LevelElem:
        out = self._levels.get(n)
        if out is None:
            if self._level_fn is not None:
                out = self._level_fn(n)
            else:
                out = fc.project(self.backing, n)
            with self._lock:
                self._levels.setdefault(n, out)
        return out

    def levels(self, depth: int) -> list[fc.LevelElem]:
        return [self.level(n) for n in range(depth + 1)]

    def coherent(self, depth: int = DEFAULT_DEPTH) -> bool:
        return all(fc.connect(self.level(n + 1), n) == self.level(n) for n in range(depth))

    def display(self, depth: int) -> list[str]:
        return [fc.to_text(b) for b in self.levels(depth)]

    def __repr__(self) -> str:
        return f"OmegaBranch({self.name})"


def branch_of(x: PointedSystem | GenSystem, name: str | None = None) -> OmegaBranch:
    return OmegaBranch(x, name=name)


def branch_eq(b: OmegaBranch, c: OmegaBranch, depth: int = DEFAULT_DEPTH) -> bool | Verdict:
    """Equality of full branches.

    Exact when both are backed by finite systems: the branches agree iff the
    backings are bisimilar, and otherwise they first differ at the level where
    the backings separate.  Other branches are compared up to ``depth``.
    """
    if b is c:
        return True
    if b.finite and c.finite:
        v = sim_level(b.backing, c.backing)
        return True if v.bisimilar else DistinguishedAt(int(v.level))
    for k in range(depth + 1):
        if b.level(k) != c.level(k):
            return DistinguishedAt(k)
    return EqualUpTo(depth)


def succ_check(a: OmegaBranch, b: OmegaBranch, depth: int = DEFAULT_DEPTH) -> bool | Verdict:
    """Is ``b`` a successor of ``a``, i.e. ``b_j`` in ``a_(j+1)`` for every ``j``?

    The levels are checked for ``j < depth`` first; a failure is exact.  When
    both branches come from finite systems the answer is then decided exactly:
    the successors of ``a`` are the branches of the backing's successors.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    for j in range(depth):
        if b.level(j) not in a.level(j + 1):
            return FailsAt(j)
    if a.finite and b.finite:
        x = a.backing
        return any(bisimilar(x.at(y), b.backing) for y in x.successors())
    return ConsistentUpTo(depth)


def successors(a: OmegaBranch) -> list[OmegaBranch]:
    """The successors of a finitely backed branch, without repetition."""
    if not a.finite:
        raise ValueError("successors can only be listed for branches of finite systems")
    x = a.backing
    out: list = []
    for y in x.successors():
        cand = x.at(y)
        if not any(bisimilar(cand, o.backing) for o in out):
            out.append(branch_of(cand))
    return out


class BranchSet:
    """A finite set of full branches; an element of the level after omega.

    Duplicates are removed exactly (by bisimilarity) when both branches have
    finite backings, and by agreement up to ``depth`` otherwise.
    """

    def __init__(self, members: Iterable[OmegaBranch], depth: int = DEFAULT_DEPTH):
        self.depth = depth
        kept: list = []
        for b in members:
            if not any(holds(branch_eq(b, k, depth)) for k in kept):
                kept.append(b)
        self.members = tuple(kept)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def contains(self, b: OmegaBranch) -> bool:
        return any(holds(branch_eq(b, m, self.depth)) for m in self.members)

    def same_as(self, other: BranchSet) -> bool:
        return len(self) == len(other) and all(other.contains(b) for b in self.members)

    def __repr__(self) -> str:
        return f"BranchSet({', '.join(b.name for b in self.members)})"


def range_channel(U: BranchSet, depth: int | None = DEFAULT_DEPTH) -> Channel:
    """The range of ``U``: level ``i`` is ``{b_i : b in U}``.  ``depth=None`` gives the omega channel."""
    return Channel(final_chain(depth), lambda i: {b.level(i) for b in U}, top=depth, source=U)


def cover_channel(g: GenSystem | PointedSystem, depth: int | None = None) -> Channel:
    """Level ``n`` is the projections of ``cover(root, n)``: the successor channel of ``branch_of(g)``."""
    if isinstance(g, PointedSystem):
        def level(n):
            return {fc.project(g.at(y), n) for y in g.successors()}
    else:
        def level(n):
            return {fc.project(g.at(y), n) for y in g.cover(g.root, n)}
    return Channel(final_chain(depth), level, top=depth, cover=g)


def successor_channel(a: OmegaBranch, depth: int | None = None) -> Channel:
    """Level ``j`` is the members of ``a_(j+1)``; full branches through it are the successors of ``a``."""
    return Channel(final_chain(depth), lambda j: a.level(j + 1).children, top=depth)


class _KonigPath:
    """Greedy König path: at each level keep a development with the most
    developments ``margin`` levels further down, ties to the canonical least."""

    def __init__(self, C: Channel, margin: int):
        self.C = C
        self.margin = margin
        self.path: list = []
        self._lock = threading.Lock()

    def _probe_level(self, n: int) -> int:
        p = n + self.margin
        return p if self.C.top is None else min(p, self.C.top)

    def upto(self, n: int) -> list:
        with self._lock:
            while len(self.path) <= n:
                k = len(self.path)
                here = self.C.level(k)
                if not here:
                    raise EmptyChannel(f"level {k} of the channel is empty")
                if k == 0:
                    cands = sorted(here)
                else:
                    cands = sorted(x for x in here if fc.connect(x, k - 1) == self.path[-1])
                if not cands:
                    raise EmptyChannel(f"{fc.to_text(self.path[-1])} has no {k}-development")
                p = self._probe_level(k)
                deeper = [fc.connect(y, k) for y in self.C.level(p)]
                counts = {x: deeper.count(x) for x in cands}
                best = max(cands, key=lambda x: (counts[x] > 0, counts[x]))
                if counts[best] == 0:
                    raise EmptyChannel(f"no development of level {k} reaches level {p}")
                self.path.append(best)
            return self.path[: n + 1]


def konig_extract(C: Channel, depth: int = DEFAULT_DEPTH, margin: int = KONIG_MARGIN) -> OmegaBranch:
    """A full branch through a channel with finite levels.

    ``C`` must be backed: either the range of a :class:`BranchSet` (the result
    is then the member whose levels the extracted path follows, checked to the
    channel's depth) or the cover family of a generator system (the result is
    the lazily extended path itself; every node of such a channel extends to
    all deeper levels, so the greedy choice never gets stuck).
    """
    walker = _KonigPath(C, margin)
    if C.source is not None:
        top = C.top if C.top is not None else depth
        path = walker.upto(top)
        for b in C.source:
            if all(b.level(k) == path[k] for k in range(top + 1)):
                return b
        raise EmptyChannel("extracted path matches no member of the branch set")
    if C.cover is not None:
        return OmegaBranch(level_fn=lambda n: walker.upto(n)[n], name=f"konig({C.cover!r})")
    raise ValueError("konig_extract needs a range channel or a cover channel")


def branching_at_depth(x: PointedSystem | GenSystem, i: int, probe: int = DEFAULT_PROBE_BOUND) -> bool:
    """Whether every state reachable in fewer than ``i`` steps has finitely many successors.

    Always true for finite systems.  For a generator system a state counts as
    finitely branching when its enumerator is exhausted within ``probe`` items.
    """
    if isinstance(x, PointedSystem):
        return True
    frontier = [x.root]
    seen = {x.root}
    for m in range(i):
        nxt = []
        for s in frontier:
            succ = list(x.enumerate_successors(s, probe + 1))
            if len(succ) > probe:
                return False
            for t in succ:
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return True
