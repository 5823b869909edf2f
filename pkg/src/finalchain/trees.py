"""Inverse chains over ``0..m`` or omega, channels, and cofinal embeddings.

Index sets are either a finite range ``0..top`` or omega (``top is None``),
whose levels are generated lazily and only ever inspected up to a probe depth.
Bit strings are plain ``str`` values over ``"01"``.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from . import chain as fc
from .bisim import approximants
from .errors import LevelTooLarge, NotAChannel, NotIncreasing
from .system import disjoint_union, von_set

DEFAULT_DEPTH = 12

Node = Hashable


@dataclass(frozen=True, eq=False)
class InverseChain:
    top: int | None
    level_fn: Callable[[int], Iterable[Node]]
    connect_fn: Callable[[int, int, Node], Node]
    name: str = "chain"

    def indices(self, depth: int | None = None) -> range:
        if self.top is None:
            return range((DEFAULT_DEPTH if depth is None else depth) + 1)
        return range((self.top if depth is None else min(depth, self.top)) + 1)

    def level(self, i: int) -> frozenset:
        self._check_index(i)
        return frozenset(self.level_fn(i))

    def connect(self, j: int, i: int, x: Node) -> Node:
        if j > i:
            raise ValueError(f"connecting map needs j <= i, got {j} > {i}")
        self._check_index(i)
        return x if j == i else self.connect_fn(j, i, x)

    def _check_index(self, i: int) -> None:
        if i < 0 or (self.top is not None and i > self.top):
            raise IndexError(f"index {i} outside {self.name}")

    def law_violations(self, depth: int | None = None) -> list[str]:
        """Check identity and the composition triangle on every enumerable level."""
        bad = []
        idx = self.indices(depth)
        for i in idx:
            for x in self.level(i):
                if self.connect(i, i, x) != x:
                    bad.append(f"identity fails at {i} on {x}")
                for j in range(i + 1):
                    xj = self.connect(j, i, x)
                    if xj not in self.level(j):
                        bad.append(f"connect({j},{i}) leaves level {j} on {x}")
                    for k in range(j + 1):
                        if self.connect(k, j, xj) != self.connect(k, i, x):
                            bad.append(f"triangle {k}<={j}<={i} fails on {x}")
        return bad


def final_chain(top: int | None) -> InverseChain:
    """Levels ``0..top`` of the final chain; levels above 4 are not enumerable."""
    return InverseChain(top, fc.level_list, lambda j, i, a: fc.connect(a, j), "final chain")


def complete_binary(i: int | None) -> InverseChain:
    """Bit strings of every length ``j < i`` with prefix restriction; ``i=None`` is omega."""
    top = None if i is None else i - 1
    return InverseChain(
        top,
        lambda j: ("".join(bits) for bits in itertools.product("01", repeat=j)),
        lambda j, k, x: x[:j],
        "complete binary" if i is None else f"complete binary {i}",
    )


@dataclass(frozen=True, eq=False)
class Channel:
    """A levelwise subset family of ``chain``, closed downward and extendable upward."""

    chain: InverseChain
    level_fn: Callable[[int], Iterable[Node]]
    top: int | None = field(default=None)
    source: object | None = None  # BranchSet this is the range of, if any
    cover: object | None = None  # GenSystem whose cover family this projects, if any
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.top is None and self.chain.top is not None:
            object.__setattr__(self, "top", self.chain.top)

    def indices(self, depth: int | None = None) -> range:
        if self.top is None:
            return range((DEFAULT_DEPTH if depth is None else depth) + 1)
        return range((self.top if depth is None else min(depth, self.top)) + 1)

    def level(self, i: int) -> frozenset:
        if i < 0 or (self.top is not None and i > self.top):
            raise IndexError(f"index {i} outside channel")
        out = self._cache.get(i)
        if out is None:
            out = self._cache[i] = frozenset(self.level_fn(i))
        return out

    def violations(self, depth: int | None = None) -> list[str]:
        """Downward closure and extendability, exhaustive over all ``j <= i`` checked."""
        bad = []
        idx = self.indices(depth)
        for i in idx:
            here = self.level(i)
            for j in range(i + 1):
                below = self.level(j)
                images = {self.chain.connect(j, i, x) for x in here}
                for y in images - below:
                    bad.append(f"not downward closed: {_label(y)} at {j} from level {i}")
                for y in below - images:
                    bad.append(f"not extendable: {_label(y)} at {j} has no {i}-development")
        return bad

    def is_channel(self, depth: int | None = None) -> bool:
        return not self.violations(depth)

    def full_branches(self) -> list[tuple]:
        """All full branches of a finite-index channel, one per top-level node."""
        if self.top is None:
            raise ValueError("full branches of an omega channel cannot be listed")
        top = self.top
        return sorted(
            (tuple(self.chain.connect(j, top, x) for j in range(top + 1)) for x in self.level(top)),
            key=lambda b: tuple(map(_sort_key, b)),
        )


def whole_channel(D: InverseChain) -> Channel:
    """``D`` as a channel through itself."""
    return Channel(D, D.level)


@dataclass(frozen=True)
class TidyReport:
    tidy: bool
    site: str | None = None
    limit_clause: str = "not applicable"


def is_tidy(D: InverseChain, depth: int | None = None) -> TidyReport:
    """Tidiness up to ``depth``: nonempty levels, a unique root, surjective connecting maps.

    Index sets here have no limit index above 0, so the limit-extension clause
    is reported as not applicable rather than as satisfied.
    """
    idx = D.indices(depth)
    if len(idx) == 0:
        return TidyReport(False, "no levels, hence no root")
    levels = [D.level(i) for i in idx]
    for i, lev in enumerate(levels):
        if not lev:
            return TidyReport(False, f"level {i} is empty")
    if len(levels[0]) != 1:
        return TidyReport(False, f"level 0 has {len(levels[0])} nodes, not a unique root")
    for i in range(1, len(levels)):
        hit = {D.connect(i - 1, i, x) for x in levels[i]}
        missed = sorted(levels[i - 1] - hit, key=_sort_key)
        if missed:
            return TidyReport(False, f"{_label(missed[0])} at level {i - 1} has no {i}-development")
    return TidyReport(True)


# -- cofinal embeddings -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CofinalEmbedding:
    source: InverseChain
    target: InverseChain
    index_map: Callable[[int], int]
    level_map: Callable[[int, Node], Node]
    name: str = "embedding"

    def __call__(self, i: int, x: Node) -> Node:
        return self.level_map(i, x)

    def violations(self, depth: int | None = None) -> list[str]:
        """Monotone and cofinal index map; injective, natural level maps."""
        bad = []
        idx = self.source.indices(depth)
        f = [self.index_map(i) for i in idx]
        if any(a > b for a, b in zip(f, f[1:])):
            bad.append(f"index map not monotone: {f}")
        tgt = self.target.indices(depth)
        if len(tgt) and (not f or f[-1] < tgt[-1]):
            bad.append(f"index map not cofinal: reaches {f[-1] if f else None}, target needs {tgt[-1]}")
        for i in idx:
            level = self.source.level(i)
            images = {}
            for y in level:
                img = self(i, y)
                if img in images:
                    bad.append(f"level map {i} not injective: {_label(images[img])}, {_label(y)}")
                images[img] = y
                for j in range(i + 1):
                    want = self(j, self.source.connect(j, i, y))
                    got = self.target.connect(f[j], f[i], img)
                    if got != want:
                        bad.append(f"naturality fails for {_label(y)} between {j} and {i}")
        return bad

    def then(self, after: CofinalEmbedding) -> CofinalEmbedding:
        """``after`` composed after this embedding."""
        return CofinalEmbedding(
            self.source,
            after.target,
            lambda i: after.index_map(self.index_map(i)),
            lambda i, x: after(self.index_map(i), self(i, x)),
            f"{after.name} . {self.name}",
        )

    def to_json(self, depth: int | None = None) -> dict:
        idx = self.source.indices(depth)
        return {
            "name": self.name,
            "index_map": {str(i): self.index_map(i) for i in idx},
            "level_maps": {
                str(i): {_label(x): _label(self(i, x)) for x in sorted(self.source.level(i), key=_sort_key)}
                for i in idx
            },
        }


def bits_encode(c: str) -> frozenset:
    """``{j < len(c) : c[j] == '1'} | {len(c)}``."""
    if set(c) - {"0", "1"}:
        raise ValueError(f"not a bit string: {c!r}")
    return frozenset(j for j, b in enumerate(c) if b == "1") | {len(c)}


@functools.lru_cache(maxsize=None)
def _beta(c: str):
    return von_set(bits_encode(c))


def beta_embedding(depth: int) -> CofinalEmbedding:
    """Bit strings of length ``j < depth`` into level ``j+1`` of the final chain,
    sending ``c`` to the projection of the von Neumann set coded by ``c``."""
    if depth < 1:
        raise ValueError("depth must be positive")
    return CofinalEmbedding(
        complete_binary(depth),
        final_chain(depth),
        lambda j: j + 1,
        lambda j, c: fc.project(_beta(c), j + 1),
        f"beta[{depth}]",
    )


def pad_embedding(subseq: Sequence[int]) -> CofinalEmbedding:
    """Spread the bits of ``c`` over positions ``subseq``, zeros elsewhere."""
    subseq = tuple(subseq)
    if not subseq:
        raise NotIncreasing("need at least one index")
    if subseq[0] < 0 or any(a >= b for a, b in zip(subseq, subseq[1:])):
        raise NotIncreasing(f"indices must be strictly increasing naturals: {subseq}")
    where = {p: m for m, p in enumerate(subseq)}

    def pad(n: int, c: str) -> str:
        return "".join(c[where[j]] if j in where and where[j] < n else "0" for j in range(subseq[n]))

    return CofinalEmbedding(
        complete_binary(len(subseq)),
        complete_binary(subseq[-1] + 1),
        lambda n: subseq[n],
        pad,
        f"pad{list(subseq)}",
    )


def channel_image(E: CofinalEmbedding, B: Channel, depth: int | None = None) -> Channel:
    """The unique channel through ``E.target`` whose level ``f(i)`` is the image of ``B_i``.

    Levels between mapped indices are the connect-image of the next mapped
    level above.
    """
    bad = B.violations(depth)
    if bad:
        raise NotAChannel(bad[0])
    src_top = B.top if B.top is not None else (DEFAULT_DEPTH if depth is None else depth)
    mapped = {E.index_map(i): i for i in range(src_top + 1)}

    def level(k: int):
        if k in mapped:
            i = mapped[k]
            return {E(i, x) for x in B.level(i)}
        above = min((m for m in mapped if m > k), default=None)
        if above is None:
            raise IndexError(f"index {k} lies above every mapped index")
        return {E.target.connect(k, above, y) for y in level(above)}

    top = E.target.top if E.target.top is not None else max(mapped)
    return Channel(E.target, level, min(top, max(mapped)))


# -- restriction lemma ----------------------------------------------------------


@dataclass(frozen=True)
class LemmaReport:
    checked: int
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def all_bits(n: int) -> list[str]:
    return ["".join(b) for b in itertools.product("01", repeat=n)]


def restrict_lemma_check(jmax: int, imax: int) -> LemmaReport:
    """For all ``j <= i``, ``c`` of length ``j`` and ``d`` of length ``i``: ``c`` is
    a prefix of ``d`` iff their von Neumann sets agree at ``~_(j+1)``.

    The approximants come from partition refinement over one disjoint union of
    all the coded systems, independent of the projection route used by beta.
    """
    if jmax > imax:
        raise ValueError("need jmax <= imax")
    words = [c for n in range(imax + 1) for c in all_bits(n)]
    sys, roots = disjoint_union(*(_beta(c) for c in words))
    root_of = dict(zip(words, roots))
    parts = approximants(sys, imax + 1)
    checked = 0
    violations = []
    for i in range(imax + 1):
        for j in range(min(i, jmax) + 1):
            part = parts[j + 1]
            for c in all_bits(j):
                for d in all_bits(i):
                    prefix = d[:j] == c
                    similar = part.same(root_of[c], root_of[d])
                    checked += 1
                    if prefix != similar:
                        violations.append((j, i, c, d, prefix, similar))
    return LemmaReport(checked, tuple(violations))


# -- DOT export ------------------------------------------------------------------


def _label(x: Node) -> str:
    if isinstance(x, str):
        return x or "ε"
    return str(x)


def _sort_key(x: Node):
    return x._key if isinstance(x, fc.LevelElem) else (len(x), x) if isinstance(x, str) else repr(x)


def to_dot(D: InverseChain, channel: Channel | None = None, depth: int | None = None, max_nodes: int = 64) -> str:
    """DOT text: nodes grouped by level, connect edges drawn downward, channel nodes filled.

    Levels that cannot be enumerated, or exceed ``max_nodes``, show only the
    channel's nodes.
    """
    idx = channel.indices(depth) if channel is not None else D.indices(depth)
    ids: dict = {}
    lines = ['digraph "chain" {', "\trankdir=TB;", '\tnode [shape=box, fontname="monospace"];']
    shown = []
    for i in idx:
        marked = channel.level(i) if channel is not None else frozenset()
        try:
            nodes = D.level(i)
            if len(nodes) > max_nodes:
                nodes = marked
        except LevelTooLarge:
            nodes = marked
        nodes = sorted(nodes, key=_sort_key)
        shown.append(nodes)
        lines.append(f"\tsubgraph level_{i} {{ rank=same;")
        for k, x in enumerate(nodes):
            ids[(i, x)] = f"n{i}_{k}"
            style = ', style=filled, fillcolor="lightblue"' if x in marked else ""
            lines.append(f"\t\t{ids[(i, x)]} [label={json.dumps(_label(x), ensure_ascii=False)}{style}];")
        lines.append("\t}")
    for pos, i in enumerate(idx):
        if pos == 0:
            continue
        for x in shown[pos]:
            y = D.connect(i - 1, i, x)
            if (i - 1, y) in ids:
                lines.append(f"\t{ids[(i, x)]} -> {ids[(i - 1, y)]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
