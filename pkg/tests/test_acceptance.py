"""The ten acceptance criteria, each with its time limit.

Every criterion prints one ``PASS``/``FAIL`` line (collected into the pytest
terminal summary).  Run directly with ``python3 tests/test_acceptance.py``
to print just those lines.
"""

import itertools
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES  # noqa: E402
from oracles import as_sets, naive_project, tower, von_succ  # noqa: E402

from finalchain import chain as fc  # noqa: E402
from finalchain.bisim import approximants  # noqa: E402
from finalchain.omega import (BranchSet, DistinguishedAt, EqualUpTo, branch_eq, branch_of, cover_channel,  # noqa: E402
                              holds, konig_extract, range_channel, succ_check)
from finalchain.system import FinSystem, disjoint_union, von_neumann, von_omega, von_set, zermelo  # noqa: E402
from finalchain.trees import all_bits, bits_encode, restrict_lemma_check  # noqa: E402

SEED = 20240611


def report(number, title, limit, body):
    """Run ``body() -> (checked, violations)`` and record one PASS/FAIL line."""
    start = time.perf_counter()
    checked, bad = body()
    secs = time.perf_counter() - start
    ok = not bad and secs < limit
    why = "" if ok else f" ({'first violation: ' + repr(bad[0]) if bad else f'over {limit}s'})"
    line = f"{'PASS' if ok else 'FAIL'} {number:>2}. {title}: {checked} checks, {secs:.2f}s (limit {limit}s){why}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not bad, bad[:3]
    assert secs < limit, f"{secs:.2f}s exceeds {limit}s"


def level_counts():
    got = [sum(1 for _ in fc.level_enumerate(n)) for n in range(5)]
    want = [tower(n) for n in range(5)]
    assert want == [1, 2, 4, 16, 65536]
    return 5, [(n, g, w) for n, (g, w) in enumerate(zip(got, want)) if g != w]


def _split_pairs(pairs, n):
    sys_ = fc.to_system_many({x for p in pairs for x in p})
    part = approximants(sys_, n)[n]
    return [(str(a), str(b)) for a, b in pairs if a != b and part.same(a, b)]


def strong_extensionality():
    bad = []
    checked = 0
    for n in range(4):
        level = fc.level_list(n)
        pairs = list(itertools.product(level, level))
        checked += len(pairs)
        bad += _split_pairs(pairs, n)
    rng = random.Random(SEED)
    below = fc.level_list(3)
    pairs = []
    for k in range(100_000):
        a = fc.random_element(4, rng)
        if k % 2:
            b = fc.random_element(4, rng)
        else:
            # one member toggled: the hardest pairs to tell apart
            b = fc.make(4, set(a.children) ^ {rng.choice(below)})
        pairs.append((a, b))
    checked += len(pairs)
    bad += _split_pairs(pairs, 4)
    return checked, bad


def von_neumann_table():
    sys_, roots = disjoint_union(*(von_neumann(i) for i in range(9)))
    parts = approximants(sys_, 8)
    bad = [(i, j, k) for i, j, k in itertools.product(range(9), repeat=3)
           if parts[k].same(roots[i], roots[j]) != (i == j or k <= min(i, j))]
    return 729, bad


def kernel_projection():
    rng = random.Random(SEED)
    bad = []
    checked = 0
    for _ in range(200):
        n = rng.randint(1, 30)
        p = rng.uniform(0.03, 0.3)
        succ = {s: tuple(t for t in range(n) if rng.random() < p) for s in range(n)}
        sys_ = FinSystem(tuple(range(n)), succ)
        parts = approximants(sys_, 8)
        for k in range(9):
            proj = fc.project_all(sys_, k)
            for s, t in itertools.combinations_with_replacement(range(n), 2):
                checked += 1
                if parts[k].same(s, t) != (proj[s] == proj[t]):
                    bad.append((succ, k, s, t))
    return checked, bad


def audit_matrix():
    bad = []
    checked = 0
    for i in range(4):
        for j in range(i + 1):
            r = fc.audit(j, i)
            checked += 1
            if not (r.surjective and r.injective == (j == i) and fc.verify_audit(r)):
                bad.append(r)
    return checked, bad


def projected_ordinal_successors():
    bad = []
    checked = 0
    for i in range(1, 5):
        for j in range(i + 1):
            got = fc.transition_successors(fc.project(von_neumann(j), i))
            # j < i: the v_k with k < j; j = i: the v_k with k <= i - 1
            listed = [naive_project(von_succ(k), k, i - 1) for k in range(j)]
            checked += 1
            if len(set(listed)) != len(listed) or {as_sets(b) for b in got} != set(listed):
                bad.append((i, j))
    return checked, bad


def omega_successors():
    vo = branch_of(von_omega(), "v_omega")
    vs = [branch_of(von_neumann(k), f"v_{k}") for k in range(11)]
    bad = []
    checked = 0
    for b in vs + [vo]:
        checked += 1
        if not holds(succ_check(vo, b, 12)):
            bad.append(("not a successor", b.name))
    for b, c in itertools.combinations(vs + [vo], 2):
        checked += 1
        v = branch_eq(b, c, 12)
        if not (isinstance(v, DistinguishedAt) and v.level <= 12):
            bad.append(("not distinguished", b.name, c.name, v))
    return checked, bad


def restriction_lemma():
    report_ = restrict_lemma_check(6, 6)
    bad = list(report_.violations)
    # second route: equality of projections instead of partition refinement
    checked = report_.checked
    proj = {}
    for n in range(7):
        for c in all_bits(n):
            proj[c] = von_set(bits_encode(c))
    for i in range(7):
        for j in range(i + 1):
            for c in all_bits(j):
                pc = fc.project(proj[c], j + 1)
                for d in all_bits(i):
                    checked += 1
                    if (d[:j] == c) != (pc == fc.project(proj[d], j + 1)):
                        bad.append((j, i, c, d))
    return checked, bad


def _pool():
    return [branch_of(von_neumann(k), f"v_{k}") for k in range(5)] + \
           [branch_of(zermelo(k), f"z_{k}") for k in range(5)]


def konig_extraction():
    rng = random.Random(SEED)
    members = _pool()
    bad = []
    checked = 0
    for _ in range(50):
        U = BranchSet(rng.sample(members, rng.randint(1, 3)))
        C = range_channel(U, 12)
        b = konig_extract(C)
        checked += 1
        inside = all(b.level(k) in C.level(k) for k in range(13))
        if not (inside and any(branch_eq(b, m) is True for m in U)):
            bad.append((U, b))
    b = konig_extract(cover_channel(von_omega()))
    checked += 1
    if branch_eq(b, branch_of(von_omega()), 12) != EqualUpTo(12):
        bad.append(("v_omega", b.display(4)))
    return checked, bad


def range_injectivity():
    sets = []
    for size in range(4):
        for combo in itertools.combinations(_pool(), size):
            U = BranchSet(combo)
            if not any(U.same_as(V) for V in sets):
                sets.append(U)
    seen = {}
    bad = []
    for U in sets:
        C = range_channel(U, 10)
        key = tuple(C.level(i) for i in range(11))
        if key in seen:
            bad.append((seen[key], U))
        seen.setdefault(key, U)
    return len(sets), bad


CRITERIA = [
    (1, "level counts 1, 2, 4, 16, 65536", 5, level_counts),
    (2, "strong extensionality (n <= 3 exhaustive, 1e5 pairs at n = 4)", 30, strong_extensionality),
    (3, "von Neumann approximant table, i, j, k <= 8", 5, von_neumann_table),
    (4, "kernel of ~_k equals projection kernel, 200 systems", 60, kernel_projection),
    (5, "audit matrix j <= i <= 3", 5, audit_matrix),
    (6, "successors of projected ordinals, i <= 4", 5, projected_ordinal_successors),
    (7, "v_omega has every v_k (k <= 10, and omega) as successor, all distinct", 10, omega_successors),
    (8, "restriction lemma j <= i <= 6", 60, restriction_lemma),
    (9, "Konig extraction on 50 ranges and the v_omega cover", 30, konig_extraction),
    (10, "ranges of branch sets (size <= 3, depth 10) are injective", 60, range_injectivity),
]


@pytest.mark.parametrize("number,title,limit,body", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, limit, body):
    report(number, title, limit, body)


if __name__ == "__main__":
    failed = 0
    for number, title, limit, body in CRITERIA:
        with fc.session():
            try:
                report(number, title, limit, body)
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
