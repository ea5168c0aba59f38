"""Shared oracles and corpus builders for the test suite.

The oracles here are deliberately independent of the library internals:
congruences by filtering all set partitions, split witnesses by exhaustive
(delta, epsilon) search, clone parts by fixed-arity superposition closure.
"""

import itertools

from congrex.algebra import FiniteAlgebra, Partition
from congrex.clones import FiniteFunction
from congrex.lattice import FiniteLattice, chain, lattice_from_covers, lattice_product


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance criterion pass/fail lines after the run."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)


def all_partitions(n):
    """Every partition of {0..n-1}, as Partition objects."""

    def assign(i, labels, used):
        if i == n:
            yield Partition(tuple(labels))
            return
        for lab in range(used + 1):
            labels.append(lab)
            yield from assign(i + 1, labels, max(used, lab + 1))
            labels.pop()

    yield from assign(0, [], 0)


def partition_respects(alg: FiniteAlgebra, part: Partition) -> bool:
    """Compatibility by direct substitution on all argument tuples."""
    for op in alg.operations:
        if op.arity == 0:
            continue
        for xs in itertools.product(range(alg.size), repeat=op.arity):
            for ys in itertools.product(range(alg.size), repeat=op.arity):
                if all(part.block_id[x] == part.block_id[y] for x, y in zip(xs, ys)):
                    if part.block_id[alg.apply(op.name, xs)] != part.block_id[
                        alg.apply(op.name, ys)
                    ]:
                        return False
    return True


def brute_congruences(alg: FiniteAlgebra):
    return sorted(
        (p for p in all_partitions(alg.size) if partition_respects(alg, p)),
        key=lambda p: p.block_id,
    )


def brute_has_split(lat: FiniteLattice, strong: bool) -> bool:
    """Exhaustive search over all (delta, epsilon) pairs."""
    n = lat.size
    for delta in range(n):
        if delta == lat.top:
            continue
        for eps in range(n):
            if eps == lat.bottom:
                continue
            if strong and not lat.leq[eps][delta]:
                continue
            if all(lat.leq[a][delta] or lat.leq[eps][a] for a in range(n)):
                return True
    return False


def m3() -> FiniteLattice:
    """Diamond: three incomparable atoms between bottom and top."""
    return lattice_from_covers(5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)])


def n5() -> FiniteLattice:
    """Pentagon: chain 0 < 1 < 2 < 4 with 3 incomparable to 1 and 2."""
    return lattice_from_covers(5, [(0, 1), (1, 2), (0, 3), (2, 4), (3, 4)])


def small_lattice_corpus():
    """Named lattices with at most 8 elements (chains, Booleans, M3, N5, products)."""
    return {
        "chain2": chain(2),
        "chain3": chain(3),
        "chain4": chain(4),
        "chain5": chain(5),
        "chain6": chain(6),
        "chain7": chain(7),
        "chain8": chain(8),
        "bool2": lattice_product([chain(2), chain(2)]),
        "bool3": lattice_product([chain(2), chain(2), chain(2)]),
        "m3": m3(),
        "n5": n5(),
        "chain2xchain3": lattice_product([chain(2), chain(3)]),
        "chain2xchain4": lattice_product([chain(2), chain(4)]),
    }


def superposition_closure(gens, arity, universe_size):
    """Fixed-arity clone part oracle: close the arity-n projections and the
    n-ary liftings under g(h_1, ..., h_m) with every h_i n-ary."""
    current = {
        FiniteFunction.projection(universe_size, arity, i) for i in range(arity)
    }
    gens = list(gens)
    for g in gens:
        if g.arity == 0:
            current.add(FiniteFunction.constant(universe_size, g.table[0], arity))
        if g.arity == arity:
            current.add(g)
    changed = True
    while changed:
        changed = False
        for g in gens:
            if g.arity == 0:
                continue
            for hs in itertools.product(sorted(current, key=lambda f: f.table), repeat=g.arity):
                table = []
                for xs in itertools.product(range(universe_size), repeat=arity):
                    args = [h(*xs) for h in hs]
                    table.append(g(*args))
                cand = FiniteFunction(universe_size, arity, tuple(table))
                if cand not in current:
                    current.add(cand)
                    changed = True
    return current
