"""Finite levels of the final chain of the finite powerset functor.

Level 0 holds the single root token ``()``; level ``n+1`` holds the finite
sets of level-``n`` elements.  Elements are hash-consed in an :class:`Arena`
so that structurally equal elements built in the same session are the same
object.  Equality and hashing are structural, so elements from different
sessions still compare correctly (just without the identity fast path).
"""

from __future__ import annotations

import contextlib
import contextvars
import threading
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import IndexOrder, LevelTooLarge, DepthUnsupported, NoPredecessorLevel, ParseError
from .system import FinSystem, GenSystem, PointedSystem

MAX_ENUM_LEVEL = 4


class LevelElem:
    """An element of level ``level``; ``children`` is empty for the root token."""

    __slots__ = ("level", "children", "id", "_hash", "_key")

    def __init__(self, level: int, children: tuple, ident: int):
        self.level = level
        self.children = children
        self.id = ident
        self._hash = hash((level, tuple(c._hash for c in children)))
        self._key = (level, tuple(c._key for c in children))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, LevelElem):
            return NotImplemented
        return self._hash == other._hash and self.level == other.level and self.children == other.children

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: LevelElem) -> bool:
        return self._key < other._key

    def __len__(self) -> int:
        return len(self.children)

    def __iter__(self) -> Iterator[LevelElem]:
        return iter(self.children)

    def __contains__(self, item) -> bool:
        return item in self.children

    @property
    def is_root_token(self) -> bool:
        return self.level == 0

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"LevelElem({to_text(self)})"


class Arena:
    """Interning table for one computation session."""

    def __init__(self):
        self._table: dict = {}
        self._connect: dict = {}
        self._levels: dict = {}
        self._lock = threading.Lock()
        self.root = self._intern(0, ())

    def _intern(self, level: int, children: tuple) -> LevelElem:
        key = (level, children)
        elem = self._table.get(key)
        if elem is None:
            with self._lock:
                elem = self._table.get(key)
                if elem is None:
                    elem = LevelElem(level, children, len(self._table))
                    self._table[key] = elem
        return elem

    def make(self, level: int, children: Iterable[LevelElem]) -> LevelElem:
        if level == 0:
            if tuple(children):
                raise ValueError("level 0 holds only the root token")
            return self.root
        kids = tuple(sorted(set(children)))
        for c in kids:
            if c.level != level - 1:
                raise ValueError(f"child at level {c.level} inside an element of level {level}")
        # re-intern foreign elements so identity comparisons stay valid
        kids = tuple(self.adopt(c) for c in kids)
        return self._intern(level, kids)

    def adopt(self, a: LevelElem) -> LevelElem:
        if self._table.get((a.level, a.children)) is a:
            return a
        if a.level == 0:
            return self.root
        return self._intern(a.level, tuple(self.adopt(c) for c in a.children))

    def __len__(self) -> int:
        return len(self._table)


_ARENA: contextvars.ContextVar[Arena | None] = contextvars.ContextVar("finalchain_arena", default=None)


def current_arena() -> Arena:
    arena = _ARENA.get()
    if arena is None:
        arena = Arena()
        _ARENA.set(arena)
    return arena


@contextlib.contextmanager
def session() -> Iterator[Arena]:
    """Run a block with a fresh interning arena."""
    arena = Arena()
    token = _ARENA.set(arena)
    try:
        yield arena
    finally:
        _ARENA.reset(token)


def root() -> LevelElem:
    return current_arena().root


def make(level: int, children: Iterable[LevelElem] = ()) -> LevelElem:
    return current_arena().make(level, children)


def level_size(n: int) -> int:
    """``t(0) = 1``, ``t(n+1) = 2**t(n)``."""
    t = 1
    for _ in range(n):
        t = 2**t
    return t


def _guard(n: int) -> None:
    if n < 0:
        raise ValueError("levels are non-negative")
    if n > MAX_ENUM_LEVEL:
        raise LevelTooLarge(f"level {n} has {_size_text(n)} elements; materialized levels stop at {MAX_ENUM_LEVEL}")


def _size_text(n: int) -> str:
    return "2^65536" if n == 5 else f"a tower of {n} twos"


def level_list(n: int) -> list[LevelElem]:
    """All of level ``n`` in canonical order (cached per arena)."""
    _guard(n)
    arena = current_arena()
    cached = arena._levels.get(n)
    if cached is None:
        cached = sorted(level_enumerate(n))
        arena._levels[n] = cached
    return cached


def level_enumerate(n: int) -> Iterator[LevelElem]:
    """Stream every element of level ``n`` exactly once."""
    _guard(n)
    arena = current_arena()
    if n == 0:
        yield arena.root
        return
    below = level_list(n - 1)
    for mask in range(1 << len(below)):
        kids = tuple(b for k, b in enumerate(below) if mask >> k & 1)
        yield arena._intern(n, kids)


def random_element(n: int, rng) -> LevelElem:
    """A uniformly random element of level ``n`` (a random subset of level ``n-1``)."""
    _guard(n)
    if n == 0:
        return root()
    below = level_list(n - 1)
    mask = rng.getrandbits(len(below))
    return current_arena()._intern(n, tuple(b for k, b in enumerate(below) if mask >> k & 1))


def connect(a: LevelElem, j: int) -> LevelElem:
    """The connecting map from level ``a.level`` down to level ``j``."""
    i = a.level
    if j > i:
        raise IndexOrder(f"cannot connect level {i} up to level {j}")
    if j < 0:
        raise ValueError("levels are non-negative")
    if j == i:
        return a
    arena = current_arena()
    if j == 0:
        return arena.root
    key = (a, j)
    out = arena._connect.get(key)
    if out is None:
        out = arena._intern(j, tuple(sorted({connect(b, j - 1) for b in a.children})))
        arena._connect[key] = out
    return out


def zero(n: int) -> LevelElem:
    """``0(0) = ()`` and ``0(n+1)`` is the empty set at level ``n+1``."""
    if n < 0:
        raise ValueError("levels are non-negative")
    return make(n, ())


def singleton_tower(a: LevelElem, m: int) -> LevelElem:
    if m < 0:
        raise ValueError("m must be non-negative")
    if a.level + m > MAX_ENUM_LEVEL:
        raise LevelTooLarge(f"tower would reach level {a.level + m}")
    for k in range(m):
        a = make(a.level + 1, (a,))
    return a


def transition_successors(a: LevelElem, *, allow_root_loop: bool = False) -> frozenset:
    """Successors of ``a`` in the final-chain transition system.

    At level ``n >= 1`` these are the members of ``a``.  Level 0 has no
    predecessor level; with ``allow_root_loop`` the self-transition of the
    root token is returned instead of raising.
    """
    if a.level == 0:
        if allow_root_loop:
            return frozenset((a,))
        raise NoPredecessorLevel("level 0 has no predecessor level; the root token only loops to itself")
    return frozenset(a.children)


# -- coalgebra projections ---------------------------------------------------


def project_all(sys: FinSystem, n: int, states=None) -> dict:
    """Level-``n`` projection of every state in ``states`` (default: all)."""
    if n < 0:
        raise ValueError("levels are non-negative")
    arena = current_arena()
    targets = list(sys.states) if states is None else _closure(sys, states)
    cur = {s: arena.root for s in targets}
    for k in range(1, n + 1):
        cur = {s: arena._intern(k, tuple(sorted({cur[t] for t in sys.succ[s]}))) for s in targets}
    return cur


def _closure(sys: FinSystem, states) -> list:
    seen = set(states)
    order = list(seen)
    for s in order:
        for t in sys.succ[s]:
            if t not in seen:
                seen.add(t)
                order.append(t)
    return order


def project(x: PointedSystem | GenSystem, n: int) -> LevelElem:
    """The ``n``-th coalgebra projection of ``x``."""
    if isinstance(x, GenSystem):
        return _project_gen(x, x.root, n, {})
    return project_all(x.sys, n, [x.root])[x.root]


def _project_gen(g: GenSystem, s, n: int, memo: dict) -> LevelElem:
    if n < 0:
        raise ValueError("levels are non-negative")
    if g.max_depth is not None and n > g.max_depth:
        raise DepthUnsupported(f"{g.name} supports projections up to level {g.max_depth}")
    if n == 0:
        return root()
    key = (s, n)
    out = memo.get(key)
    if out is None:
        kids = {_project_gen(g, t, n - 1, memo) for t in g.cover(s, n - 1)}
        out = current_arena()._intern(n, tuple(sorted(kids)))
        memo[key] = out
    return out


# -- elements as systems -----------------------------------------------------


def to_system_many(elems: Iterable[LevelElem]) -> FinSystem:
    """One finite system whose states are all sub-elements of ``elems``.

    Transitions are membership; the root token loops to itself.
    """
    seen: dict = {}
    stack = list(elems)
    while stack:
        a = stack.pop()
        if a in seen:
            continue
        seen[a] = (a,) if a.level == 0 else a.children
        stack.extend(a.children)
    return FinSystem(tuple(seen), seen)


def to_system(a: LevelElem) -> PointedSystem:
    return PointedSystem(to_system_many([a]), a)


# -- audits --------------------------------------------------------------------


@dataclass(frozen=True)
class AuditReport:
    j: int
    i: int
    surjective: bool
    injective: bool
    collision: tuple | None = None
    missed: LevelElem | None = None


def audit(j: int, i: int) -> AuditReport:
    """Decide injectivity and surjectivity of the connecting map from level ``i`` to ``j``."""
    if j > i:
        raise IndexOrder(f"cannot connect level {i} up to level {j}")
    _guard(i)
    preimage: dict = {}
    collision = None
    for a in level_enumerate(i):
        b = connect(a, j)
        if b in preimage:
            if collision is None:
                collision = (preimage[b], a)
        else:
            preimage[b] = a
    missed = next((b for b in level_list(j) if b not in preimage), None)
    return AuditReport(j, i, missed is None, collision is None, collision, missed)


def verify_audit(report: AuditReport) -> bool:
    """Re-check ``report``: its witnesses directly, and claims without a witness
    by counting the image against the level sizes."""
    if report.injective != (report.collision is None) or report.surjective != (report.missed is None):
        return False
    if report.collision is not None:
        a, b = report.collision
        if a == b or connect(a, report.j) != connect(b, report.j):
            return False
    if report.missed is not None and report.missed.level != report.j:
        return False
    image = {connect(a, report.j) for a in level_enumerate(report.i)}
    if report.missed is not None and report.missed in image:
        return False
    if report.injective and len(image) != level_size(report.i):
        return False
    return not report.surjective or len(image) == level_size(report.j)


# -- text form -----------------------------------------------------------------


def to_text(a: LevelElem, suffix: bool = True) -> str:
    body = _body(a)
    return body if a.level == 0 or not suffix else f"{body}@{a.level}"


def _body(a: LevelElem) -> str:
    if a.level == 0:
        return "()"
    return "{" + ",".join(_body(c) for c in a.children) + "}"


def to_json(a: LevelElem) -> dict:
    return {"level": a.level, "elem": to_text(a)}


def parse(text: str) -> LevelElem:
    """Parse ``()``, or ``{...}@n``; the suffix may be omitted when the root token occurs."""
    text = "".join(text.split())
    level = None
    if "@" in text:
        text, _, lev = text.rpartition("@")
        if not lev.isdigit():
            raise ParseError(f"bad level suffix {lev!r}")
        level = int(lev)
    tree, pos = _parse_node(text, 0)
    if pos != len(text):
        raise ParseError(f"trailing input at offset {pos}")
    depth = _token_depth(tree)
    if level is None:
        if depth is None:
            raise ParseError("an element without the root token needs an explicit @level suffix")
        level = depth
    return _build(tree, level)


def _parse_node(s: str, i: int):
    if s.startswith("()", i):
        return None, i + 2
    if i >= len(s) or s[i] != "{":
        raise ParseError(f"expected '()' or '{{' at offset {i}")
    i += 1
    kids = []
    if i < len(s) and s[i] == "}":
        return kids, i + 1
    while True:
        node, i = _parse_node(s, i)
        kids.append(node)
        if i < len(s) and s[i] == ",":
            i += 1
            continue
        if i < len(s) and s[i] == "}":
            return kids, i + 1
        raise ParseError(f"expected ',' or '}}' at offset {i}")


def _token_depth(tree, d: int = 0):
    if tree is None:
        return d
    for kid in tree:
        found = _token_depth(kid, d + 1)
        if found is not None:
            return found
    return None


def _build(tree, level: int) -> LevelElem:
    if tree is None:
        if level != 0:
            raise ParseError(f"root token at level {level}; it may only occur at level 0")
        return root()
    if level == 0:
        raise ParseError("a set cannot sit at level 0")
    return make(level, [_build(kid, level - 1) for kid in tree])
