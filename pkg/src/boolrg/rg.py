"""The decimation transform: replace f by its XOR-derivative in one input.

``decimate(t, i)`` returns the function of one fewer input that is 1 exactly
where flipping input i changes the output of ``t``.  Decimating a set of
inputs gives the same result in any order, and a polynomial of degree d is
wiped out by any d+1 decimations; those two facts drive everything else in
this package.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import numpy as np

from .truth_table import TruthTable, array_to_bits, bits_to_array

# Original-variable labels for a sequence of decimations.  Labels always
# refer to positions in the undecimated arity-n function, regardless of how
# many labels before them have already been removed.
DecimationOrder = tuple[int, ...]


def decimate(t: TruthTable, i: int) -> TruthTable:
    """XOR-derivative of ``t`` with respect to input ``i``.

    The result has arity n-1 over the remaining inputs in their original
    relative order (labels above ``i`` shift down by one).
    """
    if t.n < 1:
        raise ValueError("cannot decimate a 0-ary function")
    if not 1 <= i <= t.n:
        raise ValueError(f"variable {i} out of range 1..{t.n}")
    b = i - 1
    arr = bits_to_array(t.bits, t.n).reshape(-1, 2, 1 << b)
    out = arr[:, 0, :] ^ arr[:, 1, :]
    return TruthTable(t.n - 1, array_to_bits(out.reshape(-1)))


def check_order(n: int, order: Iterable[int]) -> DecimationOrder:
    """Validate distinct labels in 1..n and return them as a tuple."""
    order = tuple(order)
    if len(set(order)) != len(order):
        raise ValueError(f"duplicate labels in order {order}")
    for v in order:
        if not 1 <= v <= n:
            raise ValueError(f"label {v} out of range 1..{n}")
    return order


def decimate_seq(t: TruthTable, order: Iterable[int]) -> TruthTable:
    """Fold :func:`decimate` over original-variable labels.

    Equivalent to the mod-2 sum of ``t`` over all settings of the decimated
    inputs; the result depends only on the set of labels, not their order.
    """
    order = check_order(t.n, order)
    remaining = list(range(1, t.n + 1))
    g = t
    for v in order:
        g = decimate(g, remaining.index(v) + 1)
        remaining.remove(v)
    return g


def sample_orders(
    n: int, count: int, length: int | None = None, seed: int = 0
) -> list[DecimationOrder]:
    """Seeded uniform random decimation orders (permutation prefixes).

    Permutations come from argsorting Philox uniforms, which keeps the
    sample reproducible across platforms and numpy versions.
    """
    length = n if length is None else length
    if not 0 <= length <= n:
        raise ValueError(f"order length {length} out of range 0..{n}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    orders = []
    for _ in range(count):
        perm = np.argsort(rng.random(n))
        orders.append(tuple(int(v) + 1 for v in perm[:length]))
    return orders


def first_zero_step(t: TruthTable, order: Sequence[int], cap: int) -> int | None:
    """First m <= cap with the length-m prefix of ``order`` annihilating ``t``."""
    if t.is_zero():
        return 0
    remaining = list(range(1, t.n + 1))
    g = t
    for step, v in enumerate(order[:cap], start=1):
        g = decimate(g, remaining.index(v) + 1)
        remaining.remove(v)
        if g.is_zero():
            return step
    return None


def _depth_over_all_subsets(t: TruthTable, cap: int) -> int | None:
    # The derivative over a set of labels is order independent, so walking
    # the subset lattice level by level checks every order at once.
    if t.is_zero():
        return 0
    level = {(): t}
    for m in range(1, cap + 1):
        next_level: dict[tuple[int, ...], TruthTable] = {}
        all_zero = True
        for subset, g in level.items():
            start = subset[-1] + 1 if subset else 1
            for v in range(start, t.n + 1):
                remaining = [u for u in range(1, t.n + 1) if u not in subset]
                h = decimate(g, remaining.index(v) + 1)
                next_level[subset + (v,)] = h
                if not h.is_zero():
                    all_zero = False
        if all_zero:
            return m
        level = next_level
    return None


def annihilation_depth(
    t: TruthTable,
    orders: Sequence[Sequence[int]] | None = None,
    cap: int | None = None,
    seed: int = 0,
) -> int | None:
    """Smallest m such that every sampled length-m decimation yields zero.

    With ``orders=None`` the sample is every subset of inputs when the arity
    is at most 8, else 64 seeded random orders.  Returns ``None`` when no
    m <= cap annihilates all sampled orders.  For a polynomial of degree d
    this equals d+1 (0 for the zero function).
    """
    cap = t.n if cap is None else min(cap, t.n)
    if orders is None:
        if t.n <= 8:
            return _depth_over_all_subsets(t, cap)
        orders = sample_orders(t.n, 64, cap, seed)
    if not orders:
        raise ValueError("need at least one order")
    deepest = 0
    for order in orders:
        check_order(t.n, order)
        fz = first_zero_step(t, order, cap)
        if fz is None:
            return None
        deepest = max(deepest, fz)
    return deepest


def order_independence_check(
    t: TruthTable,
    labels: Iterable[int],
    max_orderings: int = 24,
    seed: int = 0,
) -> bool:
    """True iff decimating the given label set agrees across orderings.

    All |s|! orderings are tried when there are at most ``max_orderings`` of
    them, otherwise a seeded sample of that many.
    """
    labels = check_order(t.n, labels)
    k = len(labels)
    if k <= 1:
        return True
    n_perms = 1
    for j in range(2, k + 1):
        n_perms *= j
    if n_perms <= max_orderings:
        orderings: Iterable[tuple[int, ...]] = itertools.permutations(labels)
    else:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        orderings = [
            tuple(labels[int(j)] for j in np.argsort(rng.random(k)))
            for _ in range(max_orderings)
        ]
    reference = None
    for ordering in orderings:
        g = decimate_seq(t, ordering)
        if reference is None:
            reference = g
        elif g != reference:
            return False
    return True
