"""Finite and finitely presented pointed transition systems.

A :class:`FinSystem` is a finite set of states with a successor list per
state.  A :class:`PointedSystem` picks out a root.  Infinitely branching
systems such as the von Neumann ordinal at omega are given as a
:class:`GenSystem`: a successor enumerator plus, for every depth ``n``, a
finite *cover* of the successors that is complete up to ``~_n``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import InvalidSystem

State = Hashable

DEFAULT_PROBE_BOUND = 64


@dataclass(frozen=True, eq=False)
class FinSystem:
    states: tuple
    succ: Mapping[State, tuple]

    def __post_init__(self):
        states = tuple(self.states)
        if len(set(states)) != len(states):
            raise InvalidSystem("duplicate state identifiers")
        known = set(states)
        table = {}
        for s in states:
            out = tuple(self.succ.get(s, ()))
            if len(set(out)) != len(out):
                raise InvalidSystem(f"successors of {s!r} are listed with repetition")
            missing = [t for t in out if t not in known]
            if missing:
                raise InvalidSystem(f"successor {missing[0]!r} of {s!r} is not a state")
            table[s] = out
        extra = [s for s in self.succ if s not in known]
        if extra:
            raise InvalidSystem(f"successor list given for unknown state {extra[0]!r}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "succ", MappingProxyType(table))

    def __len__(self) -> int:
        return len(self.states)

    def successors(self, s: State) -> tuple:
        return self.succ[s]

    def index(self) -> dict:
        """Position of every state in ``states``; this is the identifier order."""
        return {s: i for i, s in enumerate(self.states)}


@dataclass(frozen=True, eq=False)
class PointedSystem:
    sys: FinSystem
    root: State

    def __post_init__(self):
        if self.root not in self.sys.succ:
            raise InvalidSystem(f"root {self.root!r} is not a state")

    def successors(self, s: State | None = None) -> tuple:
        return self.sys.succ[self.root if s is None else s]

    def at(self, s: State) -> PointedSystem:
        return PointedSystem(self.sys, s)

    def reachable(self) -> list:
        seen = {self.root}
        order = [self.root]
        for s in order:
            for t in self.sys.succ[s]:
                if t not in seen:
                    seen.add(t)
                    order.append(t)
        return order

    def __repr__(self) -> str:
        return f"PointedSystem(root={self.root!r}, states={len(self.sys)})"


@dataclass(frozen=True, eq=False)
class GenSystem:
    """A pointed system presented by generators.

    ``succ_enum(s)`` enumerates the successors of ``s`` (possibly without
    end) and ``cover(s, n)`` is a finite list of successors such that every
    successor of ``s`` is ``~_n``-equivalent to one of them.  ``max_depth``
    bounds the depths for which covers are available (None: unbounded).
    """

    root: State
    succ_enum: Callable[[State], Iterable[State]]
    cover: Callable[[State, int], Sequence[State]]
    name: str = "gen"
    max_depth: int | None = None

    def at(self, s: State) -> GenSystem:
        return GenSystem(s, self.succ_enum, self.cover, self.name, self.max_depth)

    def enumerate_successors(self, s: State | None = None, limit: int | None = None) -> Iterator[State]:
        it = iter(self.succ_enum(self.root if s is None else s))
        return it if limit is None else itertools.islice(it, limit)

    def __repr__(self) -> str:
        return f"GenSystem({self.name!r}, root={self.root!r})"


AnySystem = PointedSystem | GenSystem


def make_system(succ: Mapping[State, Iterable[State]], root: State) -> PointedSystem:
    """Build a pointed system from an adjacency mapping.

    States that only appear as successors are added with no successors.
    """
    states = list(succ)
    seen = set(states)
    for out in list(succ.values()):
        for t in out:
            if t not in seen:
                seen.add(t)
                states.append(t)
    if root not in seen:
        states.append(root)
    table = {s: tuple(succ.get(s, ())) for s in states}
    return PointedSystem(FinSystem(tuple(states), table), root)


def dead() -> PointedSystem:
    return parent([])


def parent(children: Sequence[AnySystem]) -> AnySystem:
    """A parent of ``children``: a fresh root whose successors are embedded copies
    of the children's roots, one per child, in order.

    The copies are tagged ``(index, state)`` so they stay pairwise disjoint even
    when the same system is passed twice.  The fresh root is ``()``.
    """
    if any(isinstance(c, GenSystem) for c in children):
        return _gen_parent(list(children))
    states: list = [()]
    succ: dict = {(): tuple((i, c.root) for i, c in enumerate(children))}
    for i, c in enumerate(children):
        for s in c.sys.states:
            states.append((i, s))
            succ[(i, s)] = tuple((i, t) for t in c.sys.succ[s])
    return PointedSystem(FinSystem(tuple(states), succ), ())


def _gen_parent(children: list) -> GenSystem:
    gens = [c if isinstance(c, GenSystem) else _as_gen(c) for c in children]
    roots = tuple((i, g.root) for i, g in enumerate(gens))

    def succ_enum(s):
        if s == ():
            return iter(roots)
        i, inner = s
        return ((i, t) for t in gens[i].succ_enum(inner))

    def cover(s, n):
        if s == ():
            return list(roots)
        i, inner = s
        return [(i, t) for t in gens[i].cover(inner, n)]

    depths = [g.max_depth for g in gens if g.max_depth is not None]
    max_depth = min(depths) + 1 if depths else None
    return GenSystem((), succ_enum, cover, "parent", max_depth)


def _as_gen(x: PointedSystem) -> GenSystem:
    succ = x.sys.succ
    return GenSystem(x.root, lambda s: iter(succ[s]), lambda s, n: list(succ[s]), "finite")


def as_gen(x: AnySystem) -> GenSystem:
    """View any system through the generator interface."""
    return x if isinstance(x, GenSystem) else _as_gen(x)


def von_neumann(i: int) -> PointedSystem:
    """The ordinal ``i`` as a transition system, with shared states ``0..i``."""
    if i < 0:
        raise ValueError("ordinal must be non-negative")
    succ = {k: tuple(range(k)) for k in range(i + 1)}
    return PointedSystem(FinSystem(tuple(range(i + 1)), succ), i)


def von_neumann_naive(i: int) -> PointedSystem:
    """``v_i`` built by iterated disjoint parents; has ``2**i`` states."""
    built: list = []
    for _ in range(i + 1):
        built.append(parent(built))
    return built[i]


def von_set(R: Iterable[int]) -> PointedSystem:
    """A parent of ``(v_j)`` for ``j`` in ``R``, sharing the von Neumann states."""
    members = sorted(set(R))
    if any(j < 0 for j in members):
        raise ValueError("ordinals must be non-negative")
    top = members[-1] if members else -1
    states: list = list(range(top + 1))
    succ: dict = {k: tuple(range(k)) for k in states}
    root = ("set", tuple(members))
    states.append(root)
    succ[root] = tuple(members)
    return PointedSystem(FinSystem(tuple(states), succ), root)


def zermelo(m: int) -> PointedSystem:
    """The chain ``m -> m-1 -> ... -> 0``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    succ = {k: ((k - 1,) if k else ()) for k in range(m + 1)}
    return PointedSystem(FinSystem(tuple(range(m + 1)), succ), m)


OMEGA_ROOT = "omega"


def von_omega() -> GenSystem:
    """The ordinal omega: a root whose successors are ``v_0, v_1, v_2, ...``.

    ``cover(root, n)`` is ``[v_0, ..., v_n]``; every ``v_k`` with ``k >= n`` is
    ``~_n``-equivalent to ``v_n``.
    """

    def succ_enum(s):
        if s == OMEGA_ROOT:
            return itertools.count()
        return iter(range(s))

    def cover(s, n):
        if s == OMEGA_ROOT:
            return list(range(n + 1))
        return list(range(s))

    return GenSystem(OMEGA_ROOT, succ_enum, cover, "vomega")


def disjoint_union(*systems: PointedSystem) -> tuple[FinSystem, list]:
    """Disjoint union of finite pointed systems; states are tagged ``(k, s)``.

    Returns the union and the list of tagged roots.
    """
    states: list = []
    succ: dict = {}
    for k, x in enumerate(systems):
        for s in x.sys.states:
            states.append((k, s))
            succ[(k, s)] = tuple((k, t) for t in x.sys.succ[s])
    return FinSystem(tuple(states), succ), [(k, x.root) for k, x in enumerate(systems)]


def cover_soundness_violations(g: GenSystem, s: State, n: int, probe: int = DEFAULT_PROBE_BOUND) -> list:
    """Probe the first ``probe`` successors of ``s`` for a ``~_n`` match in ``cover(s, n)``.

    ``~_n`` between generator states is decided by comparing level-``n``
    projections.  Returns the successors with no match.
    """
    from .chain import project

    cover_elems = {project(g.at(c), n) for c in g.cover(s, n)}
    covered = set(g.cover(s, n))
    bad = []
    for y in g.enumerate_successors(s, probe):
        if y in covered:
            continue
        if project(g.at(y), n) not in cover_elems:
            bad.append(y)
    return bad


# -- JSON wire format ------------------------------------------------------


def to_json(x: PointedSystem) -> dict:
    names = {s: _state_name(s) for s in x.sys.states}
    if len(set(names.values())) != len(names):
        names = {s: f"s{i}" for i, s in enumerate(x.sys.states)}
    return {
        "states": [names[s] for s in x.sys.states],
        "succ": {names[s]: [names[t] for t in x.sys.succ[s]] for s in x.sys.states},
        "root": names[x.root],
    }


def _state_name(s: State) -> str:
    return s if isinstance(s, str) else json.dumps(s) if isinstance(s, int) else repr(s)


def from_json(data: Mapping) -> PointedSystem:
    try:
        states = data["states"]
        succ = data.get("succ", {})
        root = data["root"]
    except (KeyError, TypeError) as exc:
        raise InvalidSystem(f"malformed system JSON: {exc}") from None
    if not isinstance(states, list) or not isinstance(succ, dict):
        raise InvalidSystem("'states' must be a list and 'succ' an object")
    table = {}
    for s, out in succ.items():
        if not isinstance(out, list):
            raise InvalidSystem(f"successors of {s!r} must be a list")
        table[s] = tuple(out)
    return PointedSystem(FinSystem(tuple(states), table), root)


def load(path: str) -> PointedSystem:
    with open(path) as f:
        return from_json(json.load(f))


def dump(x: PointedSystem, path: str) -> None:
    with open(path, "w") as f:
        json.dump(to_json(x), f, indent=2)
