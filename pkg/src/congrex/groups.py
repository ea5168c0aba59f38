"""Finite groups as table algebras: construction, axioms, nilpotency, Sylow.

Abelian groups built here carry the signature (+ / 2, - / 1, 0 / 0); the
nonabelian named groups use (* / 2, inv / 1, e / 0).  Everything downstream
discovers the group structure from the tables, so the naming split is purely
cosmetic.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

from .algebra import FiniteAlgebra, Operation, Partition, direct_product
from .errors import InvalidInputError, NotAGroupError

ABELIAN_OPS = ("+", "-", "0")
GENERAL_OPS = ("*", "inv", "e")


# ---------------------------------------------------------------------------
# construction


def cyclic_group(n: int) -> FiniteAlgebra:
    if n < 1:
        raise InvalidInputError("cyclic group order must be positive")
    add = [(x + y) % n for x in range(n) for y in range(n)]
    neg = [(-x) % n for x in range(n)]
    return FiniteAlgebra(
        n,
        [Operation("+", 2, add), Operation("-", 1, neg), Operation("0", 0, [0])],
        name=f"Z{n}",
    )


def group_from_cayley(table, name: str = "", op_names=GENERAL_OPS) -> FiniteAlgebra:
    """Build a group algebra from an n x n Cayley table; checks the axioms."""
    n = len(table)
    flat = [v for row in table for v in row]
    if len(flat) != n * n or any(not (0 <= v < n) for v in flat):
        raise NotAGroupError("Cayley table is not square over 0..n-1")
    mul = lambda x, y: flat[x * n + y]
    for x, y, z in itertools.product(range(n), repeat=3):
        if mul(mul(x, y), z) != mul(x, mul(y, z)):
            raise NotAGroupError(f"associativity fails at ({x},{y},{z})")
    identity = None
    for e in range(n):
        if all(mul(e, x) == x and mul(x, e) == x for x in range(n)):
            identity = e
            break
    if identity is None:
        raise NotAGroupError("no identity element")
    inv = [None] * n
    for x in range(n):
        for y in range(n):
            if mul(x, y) == identity and mul(y, x) == identity:
                inv[x] = y
                break
        if inv[x] is None:
            raise NotAGroupError(f"element {x} has no inverse")
    op_mul, op_inv, op_id = op_names
    return FiniteAlgebra(
        n,
        [
            Operation(op_mul, 2, flat),
            Operation(op_inv, 1, inv),
            Operation(op_id, 0, [identity]),
        ],
        name=name,
    )


def quaternion_group() -> FiniteAlgebra:
    """Q8 with elements 0..7 = 1, -1, i, -i, j, -j, k, -k."""
    units = ["1", "i", "j", "k"]
    # unit multiplication: (sign, unit)
    rules = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"),
        ("1", "k"): (1, "k"), ("i", "1"): (1, "i"), ("j", "1"): (1, "j"),
        ("k", "1"): (1, "k"),
        ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
        ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
        ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j"),
    }

    def decode(x):
        return (-1 if x % 2 else 1, units[x // 2])

    def encode(sign, unit):
        return units.index(unit) * 2 + (0 if sign == 1 else 1)

    table = []
    for x in range(8):
        row = []
        sx, ux = decode(x)
        for y in range(8):
            sy, uy = decode(y)
            s, u = rules[(ux, uy)]
            row.append(encode(sx * sy * s, u))
        table.append(row)
    return group_from_cayley(table, name="Q8")


def symmetric_group(n: int) -> FiniteAlgebra:
    """S_n on lexicographically ordered permutation tuples; (p*q)(x)=p(q(x))."""
    perms = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = [
        [index[tuple(p[q[x]] for x in range(n))] for q in perms] for p in perms
    ]
    return group_from_cayley(table, name=f"S{n}")


_Z_TOKEN = re.compile(r"^Z(\d+)$")
_Z_POWER_TOKEN = re.compile(r"^Z\((\d+)\^(\d+)\)$")


def parse_group_spec(spec: str) -> FiniteAlgebra:
    """Parse shortcut strings like "Z4", "Z2xZ2", "Q8", "S3", "Z(2^3)xZ(2^1)"."""
    spec = spec.strip()
    factors = []
    for token in spec.split("x"):
        token = token.strip()
        if token == "Q8":
            factors.append(quaternion_group())
            continue
        if token.startswith("S") and token[1:].isdigit():
            n = int(token[1:])
            if not (1 <= n <= 5):
                raise InvalidInputError(f"symmetric group out of supported range: {token}")
            factors.append(symmetric_group(n))
            continue
        m = _Z_TOKEN.match(token)
        if m:
            factors.append(cyclic_group(int(m.group(1))))
            continue
        m = _Z_POWER_TOKEN.match(token)
        if m:
            factors.append(cyclic_group(int(m.group(1)) ** int(m.group(2))))
            continue
        raise InvalidInputError(f"cannot parse group token {token!r} in {spec!r}")
    prod = factors[0]
    for f in factors[1:]:
        prod = direct_product(prod, f)
    prod.name = spec
    return prod


def abelian_group(p: int, exponents) -> FiniteAlgebra:
    """The direct product of Z_{p^m} for m in exponents."""
    check_prime(p)
    exponents = list(exponents)
    if not exponents or any(m < 1 for m in exponents):
        raise InvalidInputError("exponents must be positive")
    if any(a < b for a, b in zip(exponents, exponents[1:])):
        raise InvalidInputError("exponents must be non-increasing")
    prod = cyclic_group(p ** exponents[0])
    for m in exponents[1:]:
        prod = direct_product(prod, cyclic_group(p**m))
    prod.name = "x".join(f"Z{p**m}" for m in exponents)
    return prod


@dataclass(frozen=True)
class GroupPresentation:
    """How a group was given: a named/cyclic-product shortcut or a raw table."""

    kind: str  # "named", "cyclic-product", "cayley-table"
    spec: str = ""
    prime: int = 0
    exponents: tuple = ()
    table: tuple = ()

    @staticmethod
    def named(spec: str) -> "GroupPresentation":
        return GroupPresentation(kind="named", spec=spec)

    @staticmethod
    def cyclic_product(prime: int, exponents) -> "GroupPresentation":
        return GroupPresentation(
            kind="cyclic-product", prime=prime, exponents=tuple(exponents)
        )

    @staticmethod
    def cayley(table, spec: str = "") -> "GroupPresentation":
        return GroupPresentation(
            kind="cayley-table", spec=spec, table=tuple(tuple(r) for r in table)
        )

    def algebra(self) -> FiniteAlgebra:
        if self.kind == "named":
            return parse_group_spec(self.spec)
        if self.kind == "cyclic-product":
            return abelian_group(self.prime, self.exponents)
        if self.kind == "cayley-table":
            return group_from_cayley(self.table, name=self.spec)
        raise InvalidInputError(f"unknown presentation kind {self.kind!r}")


# ---------------------------------------------------------------------------
# structure discovery


class GroupStructure:
    """Multiplication/inverse/identity extracted from a group algebra."""

    def __init__(self, alg: FiniteAlgebra):
        self.alg = alg
        self.size = alg.size
        binary = [op for op in alg.operations if op.arity == 2]
        if not binary:
            raise NotAGroupError("algebra has no binary operation")
        op = binary[0]
        self.op_name = op.name
        n = alg.size
        self.mul_table = np.array(op.table, dtype=np.int64).reshape(n, n)
        mul = lambda x, y: op.table[x * n + y]
        identity = None
        for e in range(n):
            if all(mul(e, x) == x and mul(x, e) == x for x in range(n)):
                identity = e
                break
        if identity is None:
            raise NotAGroupError("no identity for the binary operation")
        self.identity = identity
        inv = [None] * n
        for x in range(n):
            for y in range(n):
                if mul(x, y) == identity and mul(y, x) == identity:
                    inv[x] = y
                    break
            if inv[x] is None:
                raise NotAGroupError(f"element {x} has no inverse")
        self.inv = tuple(inv)
        for x, y, z in itertools.product(range(n), repeat=3):
            if mul(mul(x, y), z) != mul(x, mul(y, z)):
                raise NotAGroupError(f"associativity fails at ({x},{y},{z})")

    def mul(self, x: int, y: int) -> int:
        return int(self.mul_table[x, y])

    def conjugates(self, g: int):
        n = self.size
        return {self.mul(self.mul(x, g), self.inv[x]) for x in range(n)}

    def subgroup_closure(self, elements) -> frozenset:
        """Subgroup generated by the given elements (identity always included)."""
        cur = np.unique(
            np.array(sorted(set(elements) | {self.identity}), dtype=np.int64)
        )
        while True:
            nxt = np.unique(self.mul_table[np.ix_(cur, cur)])
            if len(nxt) == len(cur):
                return frozenset(int(x) for x in cur)
            cur = nxt

    def normal_closure(self, g: int) -> frozenset:
        return self.subgroup_closure(self.conjugates(g))

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.mul(x, g)
            k += 1
        return k

    def commutator(self, x: int, y: int) -> int:
        return self.mul(
            self.mul(self.inv[x], self.inv[y]), self.mul(x, y)
        )


def is_group_algebra(alg: FiniteAlgebra) -> bool:
    try:
        GroupStructure(alg)
        return True
    except NotAGroupError:
        return False


# ---------------------------------------------------------------------------
# nilpotency and Sylow decomposition


def lower_central_series(g: GroupStructure):
    """[G, G], [G, [G, G]], ... until the series stabilizes."""
    full = frozenset(range(g.size))
    series = [full]
    current = full
    while True:
        comms = {g.commutator(x, y) for x in range(g.size) for y in current}
        nxt = g.subgroup_closure(comms)
        series.append(nxt)
        if nxt == current:
            break
        current = nxt
    return series


def is_nilpotent_group(group) -> bool:
    """True iff the lower central series reaches the trivial subgroup."""
    g = _as_structure(group)
    return lower_central_series(g)[-1] == frozenset({g.identity})


def _as_structure(group) -> GroupStructure:
    if isinstance(group, GroupStructure):
        return group
    if isinstance(group, GroupPresentation):
        return GroupStructure(group.algebra())
    if isinstance(group, FiniteAlgebra):
        return GroupStructure(group)
    if isinstance(group, str):
        return GroupStructure(parse_group_spec(group))
    raise InvalidInputError(f"not a group input: {group!r}")


def prime_factors(n: int):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def check_prime(p: int) -> None:
    if p < 2 or prime_factors(p) != {p: 1}:
        raise InvalidInputError(f"{p} is not prime")


def subalgebra_on(alg: FiniteAlgebra, elements, name: str = "") -> FiniteAlgebra:
    """Restrict all operations of alg to a closed subset, re-indexed sorted."""
    elems = sorted(elements)
    index = {x: i for i, x in enumerate(elems)}
    k = len(elems)
    ops = []
    for op in alg.operations:
        table = []
        for args in itertools.product(elems, repeat=op.arity):
            v = alg.apply(op.name, args)
            if v not in index:
                raise InvalidInputError(
                    f"subset not closed under {op.name!r} at {args}"
                )
            table.append(index[v])
        ops.append(Operation(op.name, op.arity, table))
    return FiniteAlgebra(k, ops, name=name)


def sylow_decomposition(group):
    """For nilpotent G, the list of (p, Sylow p-subgroup as a group algebra)."""
    g = _as_structure(group)
    if not is_nilpotent_group(g):
        raise InvalidInputError("Sylow decomposition requires a nilpotent group")
    alg = g.alg
    out = []
    for p in sorted(prime_factors(g.size)):
        members = [x for x in range(g.size) if _is_p_power(g.element_order(x), p)]
        sub = subalgebra_on(alg, members, name=f"{alg.name or 'G'}_p{p}")
        out.append((p, sub))
    orders = [sub.size for _, sub in out]
    assert np.prod(orders, dtype=object) == g.size
    return out


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


# ---------------------------------------------------------------------------
# normal subgroup lattice (fast path for Con of a group)


def _mask_of(elements) -> int:
    m = 0
    for x in elements:
        m |= 1 << int(x)
    return m


def _mask_elements(mask: int):
    out = []
    x = 0
    while mask:
        if mask & 1:
            out.append(x)
        mask >>= 1
        x += 1
    return out


def normal_subgroups(group):
    """All normal subgroups, as frozensets sorted by (order, elements).

    Computed as the join closure of the normal closures of single elements;
    every normal subgroup is such a join.  Subgroups are deduplicated via
    bitmasks, which keeps this usable up to a few thousand subgroups.
    """
    g = _as_structure(group)
    closures = sorted(
        {_mask_of(g.normal_closure(x)) for x in range(g.size)},
        key=lambda m: (bin(m).count("1"), m),
    )
    trivial = 1 << g.identity
    subs = {trivial}
    worklist = [trivial]
    while worklist:
        h = worklist.pop()
        for c in closures:
            if c & ~h == 0:
                continue
            j = _mask_of(g.subgroup_closure(_mask_elements(h | c)))
            if j not in subs:
                subs.add(j)
                worklist.append(j)
    return sorted(
        (frozenset(_mask_elements(m)) for m in subs), key=lambda s: (len(s), sorted(s))
    )


def coset_partition(group, subgroup) -> Partition:
    """The congruence of the group given by the cosets of a normal subgroup."""
    g = _as_structure(group)
    labels = [None] * g.size
    for x in range(g.size):
        if labels[x] is None:
            for h in subgroup:
                labels[g.mul(x, h)] = x
    return Partition(labels)


def split_normal_subgroup_lattice(g: GroupStructure, subs, strong: bool = True):
    """Witness (delta, epsilon) for the splitting of the normal subgroup lattice.

    Uses the atom reduction: if any witness exists, one exists whose epsilon is
    a minimal nontrivial normal subgroup.  Returns a pair of frozensets, or
    None.  For the strong variant epsilon <= delta is enforced.
    """
    trivial = frozenset({g.identity})
    full = frozenset(range(g.size))
    # subs is sorted by size, so every non-minimal subgroup is preceded by an
    # atom it contains; one pass against the atoms found so far suffices.
    atoms = []
    for s in subs:
        if s == trivial:
            continue
        if not any(a < s for a in atoms):
            atoms.append(s)
    for eps in atoms:
        outside = set()
        for s in subs:
            if not eps <= s:
                outside |= s
        if strong:
            outside |= eps
        delta = g.subgroup_closure(outside)
        if delta != full:
            return (delta, eps)
    return None
