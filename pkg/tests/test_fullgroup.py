"""Block-cycle combinatorics and full-group conjugator synthesis."""

import itertools
import random

import pytest

from cantorconj.bratteli import CapabilityError, cells, heights, tower_map
from cantorconj.fullgroup import (
    BlockBijection,
    BlockConditionViolation,
    ConjugacyReport,
    ConjugatorError,
    FullGroupElement,
    check_block_condition,
    conjugator_from_partition,
    cyclic_from_blocks,
    verify_conjugator,
)
from cantorconj.systems import dyadic, fibonacci

DYADIC = dyadic()
FIB = fibonacci()


# ---------------------------------------------------------------------------
# oracles


def is_single_cycle(sigma):
    n = len(sigma)
    seen = 1
    x = sigma[0]
    while x != 1:
        x = sigma[x - 1]
        seen += 1
        if seen > n:
            return False
    return seen == n


def respects(sigma, b):
    for U, V in zip(b.blocks, b.images):
        for i in U:
            if sigma[i - 1] not in V:
                return False
    return True


def brute_force_has_cycle(b):
    # enumerate every block-respecting permutation and look for an N-cycle
    choices = [
        [list(zip(sorted(U), perm)) for perm in itertools.permutations(sorted(V))]
        for U, V in zip(b.blocks, b.images)
    ]
    for combo in itertools.product(*choices):
        sigma = [0] * b.size
        for pairs in combo:
            for i, j in pairs:
                sigma[i - 1] = j
        if is_single_cycle(tuple(sigma)):
            return True
    return False


def random_block_bijection(rng, n):
    elems = list(range(1, n + 1))
    rng.shuffle(elems)
    nblocks = rng.randint(1, n)
    cuts = sorted(rng.sample(range(1, n), nblocks - 1)) if nblocks > 1 else []
    sizes = [b - a for a, b in zip([0] + cuts, cuts + [n])]
    blocks = []
    pos = 0
    for s in sizes:
        blocks.append(tuple(sorted(elems[pos:pos + s])))
        pos += s
    rng.shuffle(elems)
    images = []
    pos = 0
    for s in sizes:
        images.append(tuple(sorted(elems[pos:pos + s])))
        pos += s
    return BlockBijection(n, tuple(blocks), tuple(images))


def simulate_conjugation(elem, block_level, blocks, images, lookahead):
    # independent replay of the induced cell maps, written from scratch
    d = elem.diagram
    mf = elem.level + lookahead
    hf = heights(d, mf)
    fine = cells(d, mf)
    proj_s = tower_map(d, elem.level, mf).project
    proj_p = tower_map(d, block_level, mf).project
    where = {}
    for bi, U in enumerate(blocks):
        for c in U:
            where[c] = bi
    img_where = {}
    for bi, V in enumerate(images):
        for c in V:
            img_where[c] = bi
    sig = {}
    for (v, j) in fine:
        w, k = proj_s[(v, j)]
        t = j + elem.tables[w][k - 1]
        sig[(v, j)] = (v, t) if 1 <= t <= hf[v] else None
    inv = {}
    for c, t in sig.items():
        if t is not None:
            if t in inv:
                return "collision"
            inv[t] = c
    bad = 0
    unresolved = 0
    for c in fine:
        y = inv.get(c)
        z = None if y is None else ((y[0], y[1] + 1) if y[1] < hf[y[0]] else None)
        t = None if z is None else sig.get(z)
        if t is None:
            unresolved += 1
            continue
        if img_where[proj_p[t]] != where[proj_p[c]]:
            bad += 1
    if bad:
        return "violation"
    return "ok" if unresolved <= len(hf) else "inconclusive"


# ---------------------------------------------------------------------------
# block condition


def test_block_condition_swap_ok():
    b = BlockBijection(4, ((1, 2), (3, 4)), ((3, 4), (1, 2)))
    assert check_block_condition(b).ok


def test_block_condition_identity_violates():
    b = BlockBijection(4, ((1, 2), (3, 4)), ((1, 2), (3, 4)))
    res = check_block_condition(b)
    assert not res.ok
    assert res.violation == ((1, 2),)


def test_block_condition_single_block_vacuous():
    b = BlockBijection(3, ((1, 2, 3),), ((1, 2, 3),))
    assert check_block_condition(b).ok


def test_block_condition_rejects_wide_partitions():
    n = 21
    blocks = tuple((i,) for i in range(1, n + 1))
    images = tuple((i % n + 1,) for i in range(1, n + 1))
    with pytest.raises(CapabilityError):
        check_block_condition(BlockBijection(n, blocks, images))


def test_block_condition_least_violation():
    # two independent fixed unions; the one using the earliest block wins
    b = BlockBijection(4, ((1,), (2,), (3, 4)), ((2,), (1,), (3, 4)))
    res = check_block_condition(b)
    assert res.violation == ((1,), (2,))


def test_block_bijection_validation():
    with pytest.raises(ValueError):
        BlockBijection(3, ((1, 2),), ((1, 2),))  # does not cover 3
    with pytest.raises(ValueError):
        BlockBijection(3, ((1, 2), (2, 3)), ((1, 2), (2, 3)))  # overlap
    with pytest.raises(ValueError):
        BlockBijection(3, ((1, 2), (3,)), ((1,), (2, 3)))  # size mismatch


def test_block_condition_matches_brute_force():
    rng = random.Random(99)
    for _ in range(60):
        n = rng.randint(1, 6)
        b = random_block_bijection(rng, n)
        ok = check_block_condition(b).ok
        assert ok == brute_force_has_cycle(b)


# ---------------------------------------------------------------------------
# cyclic_from_blocks


def test_cyclic_swap_blocks():
    b = BlockBijection(4, ((1, 2), (3, 4)), ((3, 4), (1, 2)))
    sigma = cyclic_from_blocks(b)
    assert sigma == (4, 3, 1, 2)
    assert is_single_cycle(sigma) and respects(sigma, b)


def test_cyclic_two_singletons():
    b = BlockBijection(2, ((1,), (2,)), ((2,), (1,)))
    assert cyclic_from_blocks(b) == (2, 1)


def test_cyclic_trivial():
    b = BlockBijection(1, ((1,),), ((1,),))
    assert cyclic_from_blocks(b) == (1,)


def test_cyclic_raises_with_witness():
    b = BlockBijection(4, ((1, 2), (3, 4)), ((1, 2), (3, 4)))
    with pytest.raises(BlockConditionViolation) as e:
        cyclic_from_blocks(b)
    assert e.value.violation == ((1, 2),)


def test_cyclic_valid_on_random_instances():
    rng = random.Random(7)
    produced = 0
    while produced < 80:
        b = random_block_bijection(rng, rng.randint(1, 7))
        if not check_block_condition(b).ok:
            continue
        sigma = cyclic_from_blocks(b)
        assert is_single_cycle(sigma) and respects(sigma, b)
        produced += 1


# ---------------------------------------------------------------------------
# conjugator synthesis


def shifted_blocks():
    # level-2 dyadic floors {1,2} and {3,4}, with their forward-shifted images
    blocks = (((0, 1), (0, 2)), ((0, 3), (0, 4)))
    images = (((0, 2), (0, 3)), ((0, 4), (0, 1)))
    return blocks, images


def test_identity_table_verifies_on_shifted_blocks():
    blocks, images = shifted_blocks()
    elem = FullGroupElement(DYADIC, 2, ((0, 0, 0, 0),))
    rep = verify_conjugator(elem, blocks, images, lookahead=3)
    assert rep.verdict == "ok"
    assert rep.unresolved > 0  # the roof band is never resolvable


def test_synthesis_on_shifted_blocks():
    blocks, images = shifted_blocks()
    elem = conjugator_from_partition(DYADIC, 2, blocks, images)
    rep = verify_conjugator(elem, blocks, images, lookahead=3)
    assert rep.verdict == "ok"


def test_synthesis_on_swapped_singletons():
    blocks = (((0, 1),), ((0, 2),))
    images = (((0, 2),), ((0, 1),))
    elem = conjugator_from_partition(DYADIC, 1, blocks, images)
    assert elem.level == 2
    assert elem.tables == ((3, 1, -1, -3),)
    rep = verify_conjugator(elem, blocks, images, lookahead=2)
    assert rep.verdict == "ok"
    rep4 = verify_conjugator(elem, blocks, images, lookahead=4)
    assert rep4.verdict == "ok"


def test_synthesis_rejects_class_mismatch():
    blocks = (((0, 1),), ((0, 2), (0, 3), (0, 4)))
    images = (((0, 2), (0, 3), (0, 4)), ((0, 1),))
    with pytest.raises(ConjugatorError) as e:
        conjugator_from_partition(DYADIC, 2, blocks, images)
    assert e.value.kind == "class"
    assert e.value.detail["block"] == 0


def test_synthesis_reports_per_tower_violation():
    blocks, _ = shifted_blocks()
    with pytest.raises(ConjugatorError) as e:
        conjugator_from_partition(DYADIC, 2, blocks, blocks)
    assert e.value.kind == "blocks"
    assert "tower" in e.value.detail


def test_synthesis_needs_connecting_positivity():
    from cantorconj.systems import stationary_from_rows

    d = stationary_from_rows(((0,), (1, 1)))  # reducible: towers never mix
    blocks = (((0, 1),), ((1, 1),))
    with pytest.raises(ConjugatorError) as e:
        conjugator_from_partition(d, 1, blocks, blocks, lookahead_bound=6)
    assert e.value.kind in ("level", "blocks")


def test_verification_detects_corruption():
    blocks = (((0, 1),), ((0, 2),))
    images = (((0, 2),), ((0, 1),))
    elem = conjugator_from_partition(DYADIC, 1, blocks, images)
    r = list(elem.tables[0])
    r[1] += 1
    bad = FullGroupElement(DYADIC, elem.level, (tuple(r),))
    rep = verify_conjugator(bad, blocks, images, lookahead=2)
    assert rep.verdict != "ok"


def test_verification_inconclusive_when_walks_escape():
    # two-floor jumps keep hitting roof bands at every finite resolution
    elem = FullGroupElement(DYADIC, 1, ((2, -2),))
    blocks = (((0, 1),), ((0, 2),))
    images = (((0, 2),), ((0, 1),))
    rep = verify_conjugator(elem, blocks, images, lookahead=2)
    assert rep.verdict == "inconclusive"
    assert rep.unresolved > 1


def test_element_serialization_shape():
    elem = FullGroupElement(DYADIC, 2, ((1, 0, -1, 0),))
    blob = elem.to_json()
    assert blob == {"level": 2, "towers": [{"w": 0, "r": [1, 0, -1, 0]}]}


def random_matched_partition(rng, d, m, nblocks):
    # random block labels per tower, image labels drawn with equal counts
    h = heights(d, m)
    blocks = [[] for _ in range(nblocks)]
    images = [[] for _ in range(nblocks)]
    for v in range(len(h)):
        if h[v] < nblocks:
            return None
        labels = [i % nblocks for i in range(h[v])]
        rng.shuffle(labels)
        relabel = labels[:]
        rng.shuffle(relabel)
        for k in range(1, h[v] + 1):
            blocks[labels[k - 1]].append((v, k))
            images[relabel[k - 1]].append((v, k))
    return tuple(tuple(sorted(b)) for b in blocks), tuple(tuple(sorted(i)) for i in images)


def test_synthesized_conjugators_verify_on_random_partitions():
    rng = random.Random(12)
    attempts = 0
    verified = 0
    while verified < 25 and attempts < 400:
        attempts += 1
        d, m = rng.choice([(DYADIC, 1), (DYADIC, 2), (DYADIC, 3), (FIB, 2), (FIB, 3)])
        made = random_matched_partition(rng, d, m, rng.randint(2, 3))
        if made is None:
            continue
        blocks, images = made
        try:
            elem = conjugator_from_partition(d, m, blocks, images)
        except ConjugatorError:
            continue
        rep = verify_conjugator(elem, blocks, images, lookahead=2)
        assert rep.verdict == "ok"
        sim = simulate_conjugation(elem, m, blocks, images, lookahead=2)
        assert sim == "ok"
        verified += 1
    assert verified == 25
