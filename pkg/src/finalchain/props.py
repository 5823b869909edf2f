"""Named proposition suites, run by ``finalchain props``.

Each suite takes a seeded RNG and a sample budget and returns a
:class:`SuiteResult`; a failing suite carries the first witness it found.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from typing import Callable

from . import chain as fc
from .bisim import approximants, fixpoint_round
from .omega import (BranchSet, DistinguishedAt, EqualUpTo, branch_eq, branch_of, branching_at_depth, cover_channel,
                    holds, konig_extract, range_channel, succ_check, successors)
from .system import FinSystem, PointedSystem, disjoint_union, parent, von_neumann, von_omega, zermelo
from .trees import (beta_embedding, complete_binary, channel_image, is_tidy, pad_embedding,
                    restrict_lemma_check, whole_channel)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    witness: object = None
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tail = "" if self.passed else f" witness={self.witness!r}"
        return f"{status} {self.name}: {self.checked} checks in {self.seconds:.2f}s{tail}"


SUITES: dict[str, Callable] = {}


def suite(name: str):
    def register(fn):
        SUITES[name] = fn
        return fn
    return register


def run_suite(name: str, seed: int = 0, samples: int = 100_000) -> SuiteResult:
    rng = random.Random(seed)
    start = time.perf_counter()
    with fc.session():
        result = SUITES[name](rng, samples)
    result.seconds = time.perf_counter() - start
    return result


def random_system(rng: random.Random, max_states: int, density: float | None = None) -> FinSystem:
    """A random finite system on ``1..max_states`` integer states."""
    n = rng.randint(1, max_states)
    p = rng.uniform(0.05, 0.4) if density is None else density
    succ = {s: tuple(t for t in range(n) if rng.random() < p) for s in range(n)}
    return FinSystem(tuple(range(n)), succ)


def _fail(name, checked, witness):
    return SuiteResult(name, False, checked, witness)


# -- chain ---------------------------------------------------------------------


@suite("levels")
def levels_suite(rng, samples):
    want = [1, 2, 4, 16, 65536]
    got = [sum(1 for _ in fc.level_enumerate(n)) for n in range(5)]
    if got != want or [fc.level_size(n) for n in range(5)] != want:
        return _fail("levels", 5, got)
    return SuiteResult("levels", True, 5)


def extensionality_violations(pairs, n: int) -> tuple[int, list]:
    """Pairs ``(a, b)`` of level-``n`` elements with ``a ~_n b`` but ``a != b``."""
    elems = {x for p in pairs for x in p}
    sys = fc.to_system_many(elems)
    part = approximants(sys, n)[n]
    bad = [(a, b) for a, b in pairs if a != b and part.same(a, b)]
    return len(pairs), bad


def neighbour(a: fc.LevelElem, rng) -> fc.LevelElem:
    """``a`` with one member of the level below toggled."""
    below = fc.level_list(a.level - 1)
    flip = rng.choice(below)
    kids = set(a.children) ^ {flip}
    return fc.make(a.level, kids)


@suite("extensionality")
def extensionality_suite(rng, samples):
    checked = 0
    for n in range(4):
        level = fc.level_list(n)
        c, bad = extensionality_violations(list(itertools.product(level, level)), n)
        checked += c
        if bad:
            return _fail("extensionality", checked, (n, *map(str, bad[0])))
    pairs = []
    for k in range(samples):
        a = fc.random_element(4, rng)
        b = fc.random_element(4, rng) if k % 2 else neighbour(a, rng)
        pairs.append((a, b))
    c, bad = extensionality_violations(pairs, 4)
    checked += c
    if bad:
        return _fail("extensionality", checked, (4, *map(str, bad[0])))
    return SuiteResult("extensionality", True, checked)


@suite("audit")
def audit_suite(rng, samples):
    checked = 0
    for i in range(4):
        for j in range(i + 1):
            r = fc.audit(j, i)
            checked += 1
            if not (r.surjective and r.injective == (j == i) and fc.verify_audit(r)):
                return _fail("audit", checked, r)
    return SuiteResult("audit", True, checked)


@suite("functoriality")
def functoriality_suite(rng, samples):
    checked = 0
    for _ in range(min(samples, 2000)):
        a = fc.random_element(4, rng)
        for j in range(5):
            for k in range(j + 1):
                checked += 1
                if fc.connect(fc.connect(a, j), k) != fc.connect(a, k):
                    return _fail("functoriality", checked, (str(a), j, k))
    return SuiteResult("functoriality", True, checked)


@suite("naturality")
def naturality_suite(rng, samples):
    checked = 0
    for _ in range(200):
        sys = random_system(rng, 20)
        proj = [fc.project_all(sys, i) for i in range(5)]
        for s in sys.states:
            for i in range(5):
                for j in range(i + 1):
                    checked += 1
                    if fc.connect(proj[i][s], j) != proj[j][s]:
                        return _fail("naturality", checked, (sys.succ, s, i, j))
    return SuiteResult("naturality", True, checked)


@suite("transition")
def transition_suite(rng, samples):
    checked = 0
    for i in range(1, 4):
        for a in fc.level_list(i):
            for b in fc.transition_successors(a):
                for j in range(1, i + 1):
                    checked += 1
                    if fc.connect(b, j - 1) not in fc.connect(a, j):
                        return _fail("transition", checked, (str(a), str(b), j))
    for _ in range(100):
        sys = random_system(rng, 15)
        proj = [fc.project_all(sys, i) for i in range(6)]
        for x in sys.states:
            for y in sys.succ[x]:
                for i in range(1, 6):
                    checked += 1
                    if proj[i - 1][y] not in proj[i][x]:
                        return _fail("transition", checked, (sys.succ, x, y, i))
    return SuiteResult("transition", True, checked)


@suite("noninjective")
def noninjective_suite(rng, samples):
    for n in range(4):
        same = fc.project(von_neumann(n), n) == fc.project(von_neumann(n + 1), n)
        differ = fc.project(von_neumann(n), n + 1) != fc.project(von_neumann(n + 1), n + 1)
        if not (same and differ):
            return _fail("noninjective", n + 1, n)
    return SuiteResult("noninjective", True, 4)


@suite("characterization")
def characterization_suite(rng, samples):
    """The level-n projection of x, read back as a system, is ~_n to x."""
    checked = 0
    for _ in range(100):
        sys = random_system(rng, 12)
        for n in range(5):
            proj = fc.project_all(sys, n)
            for s in sys.states:
                a = proj[s]
                union, (ra, rs) = disjoint_union(fc.to_system(a), PointedSystem(sys, s))
                checked += 1
                if not approximants(union, n)[n].same(ra, rs):
                    return _fail("characterization", checked, (sys.succ, s, n))
    return SuiteResult("characterization", True, checked)


# -- bisim -------------------------------------------------------------------


def von_table(kmax: int = 8) -> tuple[int, list]:
    """Compare ``v_i ~_k v_j`` against ``i == j or k <= min(i, j)`` for all ``i, j, k <= kmax``."""
    sys, roots = disjoint_union(*(von_neumann(i) for i in range(kmax + 1)))
    parts = approximants(sys, kmax)
    bad = []
    checked = 0
    for i, j, k in itertools.product(range(kmax + 1), repeat=3):
        checked += 1
        if parts[k].same(roots[i], roots[j]) != (i == j or k <= min(i, j)):
            bad.append((i, j, k))
    return checked, bad


@suite("von-table")
def von_table_suite(rng, samples):
    checked, bad = von_table(8)
    if bad:
        return _fail("von-table", checked, bad[0])
    return SuiteResult("von-table", True, checked)


def kernel_mismatch(sys: FinSystem, kmax: int):
    """First ``(k, s, t)`` where ``~_k`` and equality of level-``k`` projections disagree."""
    parts = approximants(sys, kmax)
    for k in range(kmax + 1):
        proj = fc.project_all(sys, k)
        block_to_proj: dict = {}
        proj_to_block: dict = {}
        for s in sys.states:
            b, p = parts[k].block_of[s], proj[s]
            if block_to_proj.setdefault(b, (p, s))[0] != p:
                return k, block_to_proj[b][1], s
            if proj_to_block.setdefault(p, (b, s))[0] != b:
                return k, proj_to_block[p][1], s
    return None


@suite("kernel")
def kernel_suite(rng, samples):
    checked = 0
    for _ in range(200):
        sys = random_system(rng, 30)
        checked += 1
        bad = kernel_mismatch(sys, 8)
        if bad:
            return _fail("kernel", checked, (dict(sys.succ), bad))
    return SuiteResult("kernel", True, checked)


@suite("successor-matching")
def successor_matching_suite(rng, samples):
    """x has a successor bisimilar to y iff for every k up to the fixpoint round it has one ~_k to y."""
    checked = 0
    for _ in range(100):
        sys = random_system(rng, 15)
        r = fixpoint_round(sys)
        parts = approximants(sys, r)
        full = parts[r]
        for x in sys.states:
            for y in sys.states:
                exact = any(full.same(z, y) for z in sys.succ[x])
                every = all(any(parts[k].same(z, y) for z in sys.succ[x]) for k in range(r + 1))
                checked += 1
                if exact != every:
                    return _fail("successor-matching", checked, (dict(sys.succ), x, y))
    return SuiteResult("successor-matching", True, checked)


# -- omega -------------------------------------------------------------------


def von_successor_mismatches(imax: int = 4) -> tuple[int, list]:
    """Successors of ``p_i(v_j)`` against the listed von Neumann projections, ``j <= i <= imax``."""
    checked = 0
    bad = []
    for i in range(imax + 1):
        pi = max(i - 1, 0)
        for j in range(i + 1):
            a = fc.project(von_neumann(j), i)
            got = fc.transition_successors(a, allow_root_loop=True)
            ks = range(j) if j < i else range(pi + 1)
            listed = [fc.project(von_neumann(k), pi) for k in ks]
            checked += 1
            if len(set(listed)) != len(listed) or set(listed) != got:
                bad.append((i, j))
    return checked, bad


@suite("von-successors")
def von_successors_suite(rng, samples):
    checked, bad = von_successor_mismatches(4)
    if bad:
        return _fail("von-successors", checked, bad[0])
    return SuiteResult("von-successors", True, checked)


@suite("omega-successors")
def omega_successors_suite(rng, samples):
    """branch_of(v_omega) has each branch_of(v_k) as a successor, all pairwise distinct."""
    vo = branch_of(von_omega(), "v_omega")
    branches = [branch_of(von_neumann(k), f"v_{k}") for k in range(11)] + [vo]
    checked = 0
    for b in branches:
        checked += 1
        if not holds(succ_check(vo, b, 12)):
            return _fail("omega-successors", checked, b.name)
    for b, c in itertools.combinations(branches, 2):
        checked += 1
        v = branch_eq(b, c, 12)
        if not (isinstance(v, DistinguishedAt) and v.level <= 12):
            return _fail("omega-successors", checked, (b.name, c.name, v))
    return SuiteResult("omega-successors", True, checked)


@suite("omega-finite")
def omega_finite_suite(rng, samples):
    """Successor sets of finitely backed branches, computed by projection and by succ_check."""
    checked = 0
    for _ in range(60):
        sys = random_system(rng, 15)
        branches = [branch_of(PointedSystem(sys, s)) for s in sys.states]
        for x, bx in zip(sys.states, branches):
            direct = successors(bx)
            via_check = BranchSet([c for c in branches if succ_check(bx, c, 12) is True])
            checked += 1
            if not BranchSet(direct).same_as(via_check):
                return _fail("omega-finite", checked, (dict(sys.succ), x))
            if len(sys.succ[x]) == 1:
                (y,) = sys.succ[x]
                checked += 1
                only = [c for c in branches if succ_check(bx, c, 12) is True]
                if not all(branch_eq(c, branches[sys.states.index(y)]) is True for c in only):
                    return _fail("omega-finite", checked, (dict(sys.succ), x, "unique successor"))
    return SuiteResult("omega-finite", True, checked)


@suite("branching")
def branching_suite(rng, samples):
    """Finitely backed branches are finitely branching; v_omega is not, and has many successors."""
    vo = von_omega()
    checks = [
        branching_at_depth(von_neumann(5), 10),
        not branching_at_depth(vo, 1),
        branching_at_depth(parent([vo]), 1),
        not branching_at_depth(parent([vo]), 2),
        branching_at_depth(vo, 0),
    ]
    if not all(checks):
        return _fail("branching", len(checks), checks)
    return SuiteResult("branching", True, len(checks))


def pool(kmax: int) -> list:
    return [branch_of(von_neumann(k), f"v_{k}") for k in range(kmax + 1)] + \
           [branch_of(zermelo(k), f"z_{k}") for k in range(kmax + 1)]


def range_collisions(members: list, max_size: int = 3, depth: int = 10) -> tuple[int, list]:
    """Distinct branch sets drawn from ``members`` that share a range up to ``depth``."""
    sets: list = []
    for size in range(max_size + 1):
        for combo in itertools.combinations(members, size):
            U = BranchSet(combo)
            if not any(U.same_as(V) for V in sets):
                sets.append(U)
    ranges = {}
    bad = []
    for U in sets:
        C = range_channel(U, depth)
        key = tuple(C.level(i) for i in range(depth + 1))
        if key in ranges:
            bad.append((ranges[key], U))
        else:
            ranges[key] = U
    return len(sets), bad


@suite("range-injective")
def range_injective_suite(rng, samples):
    checked, bad = range_collisions(pool(4), 3, 10)
    if bad:
        return _fail("range-injective", checked, bad[0])
    return SuiteResult("range-injective", True, checked)


def konig_check(rng, channels: int = 50, depth: int = 10):
    """Extract from random range channels and from the v_omega cover channel."""
    members = pool(4)
    checked = 0
    for _ in range(channels):
        U = BranchSet(rng.sample(members, rng.randint(1, 3)))
        C = range_channel(U, depth)
        b = konig_extract(C)
        checked += 1
        through = all(b.level(k) in C.level(k) for k in range(depth + 1)) and b.coherent(depth)
        if not (through and any(branch_eq(b, m) is True for m in U)):
            return checked, (U, b)
    b = konig_extract(cover_channel(von_omega()))
    checked += 1
    if branch_eq(b, branch_of(von_omega()), 12) != EqualUpTo(12):
        return checked, ("v_omega", b.display(4))
    return checked, None


@suite("konig")
def konig_suite(rng, samples):
    checked, bad = konig_check(rng)
    if bad:
        return _fail("konig", checked, bad)
    return SuiteResult("konig", True, checked)


# -- trees -------------------------------------------------------------------


@suite("lemma-restrict")
def restrict_suite(rng, samples):
    report = restrict_lemma_check(6, 6)
    if not report.ok:
        return _fail("lemma-restrict", report.checked, report.violations[0])
    return SuiteResult("lemma-restrict", True, report.checked)


@suite("embeddings")
def embeddings_suite(rng, samples):
    checked = 0
    for depth in range(1, 7):
        checked += 1
        bad = beta_embedding(depth).violations()
        if bad:
            return _fail("embeddings", checked, ("beta", depth, bad[0]))
    for subseq in [(0,), (0, 2), (0, 2, 4), (1, 2, 5), (0, 1, 2, 3)]:
        E = pad_embedding(subseq)
        checked += 1
        bad = E.violations() or E.then(beta_embedding(subseq[-1] + 1)).violations()
        if bad:
            return _fail("embeddings", checked, (subseq, bad[0]))
    for depth in range(1, 5):
        B = whole_channel(complete_binary(depth))
        C = channel_image(beta_embedding(depth), B)
        checked += 1
        ok = (C.is_channel() and len(C.full_branches()) == len(B.full_branches())
              and all(len(C.level(j + 1)) == 2**j for j in range(depth)) and len(C.level(0)) == 1)
        if not ok:
            return _fail("embeddings", checked, ("image", depth))
        checked += 1
        if not is_tidy(complete_binary(depth)).tidy:
            return _fail("embeddings", checked, ("tidy", depth))
    return SuiteResult("embeddings", True, checked)
