import itertools

import pytest

from congrex.algebra import Partition, direct_product
from congrex.clones import (
    CloneFragment,
    FiniteFunction,
    Relation4,
    add_dummy_arg,
    clone_closure,
    comp_fragment,
    compose_first,
    diagonal_minor,
    group_malcev_function,
    is_congruence_preserving,
    is_malcev_function,
    is_product_congruence,
    is_skew_free,
    malcev_term,
    pol_fragment,
    preserves_relation,
    rotate_args,
    skew_congruences,
    swap_args,
    tensor_fragments,
    tensor_function,
    tensor_generators,
)
from congrex.errors import BudgetExceededError, InvalidInputError
from congrex.groups import cyclic_group, parse_group_spec

from conftest import superposition_closure


def unary(size, values):
    return FiniteFunction(size, 1, tuple(values))


def binary(size, fn):
    return FiniteFunction(
        size, 2, tuple(fn(x, y) for x in range(size) for y in range(size))
    )


# ---------------------------------------------------------------------------
# FiniteFunction and the function-algebra operations


def test_function_validation_and_call():
    f = binary(2, lambda x, y: x ^ y)
    assert f(1, 1) == 0
    with pytest.raises(InvalidInputError):
        f(1)
    with pytest.raises(InvalidInputError):
        FiniteFunction(2, 1, (0, 1, 1))
    with pytest.raises(InvalidInputError):
        FiniteFunction(2, 1, (0, 2))


def test_projection_and_constant():
    p0 = FiniteFunction.projection(3, 2, 0)
    assert p0(1, 2) == 1
    assert p0.is_projection()
    c = FiniteFunction.constant(3, 2)
    assert c(0) == 2 and not c.is_projection()


def test_rotate_on_ternary():
    f = FiniteFunction(
        2, 3, tuple((x + 2 * y + 4 * z) % 2 for x in range(2) for y in range(2) for z in range(2))
    )
    g = rotate_args(f)
    for x, y, z in itertools.product(range(2), repeat=3):
        assert g(x, y, z) == f(y, z, x)


def test_rotate_turns_first_projection_into_last():
    p0 = FiniteFunction.projection(3, 2, 0)
    assert rotate_args(p0) == FiniteFunction.projection(3, 2, 1)


def test_swap_args():
    f = binary(3, lambda x, y: (x + 2 * y) % 3)
    g = swap_args(f)
    for x, y in itertools.product(range(3), repeat=2):
        assert g(x, y) == f(y, x)
    u = unary(3, [1, 2, 0])
    assert swap_args(u) == u and rotate_args(u) == u


def test_diagonal_minor():
    f = binary(3, lambda x, y: (x + 2 * y) % 3)
    g = diagonal_minor(f)
    assert g.arity == 1
    for x in range(3):
        assert g(x) == f(x, x)


def test_add_dummy_appends_last():
    u = unary(3, [1, 2, 0])
    g = add_dummy_arg(u)
    assert g.arity == 2
    for x, y in itertools.product(range(3), repeat=2):
        assert g(x, y) == u(x)


def test_compose_first_convention():
    f = binary(4, lambda x, y: (x + y) % 4)
    g = unary(4, [(3 * x) % 4 for x in range(4)])
    h = compose_first(f, g)
    assert h.arity == 2
    for x, y in itertools.product(range(4), repeat=2):
        assert h(x, y) == f(g(x), y)
    # binary into binary gives a ternary function
    k = compose_first(f, f)
    assert k.arity == 3
    for x, y, z in itertools.product(range(4), repeat=3):
        assert k(x, y, z) == f(f(x, y), z)


# ---------------------------------------------------------------------------
# clone closure


def test_closure_of_nothing_is_projections():
    frag = clone_closure([], 2, universe_size=2)
    assert frag.member_count() == 3
    assert all(f.is_projection() for f in frag.function_set())


def test_closure_of_negation():
    neg = unary(2, [1, 0])
    frag = clone_closure([neg], 1, universe_size=2)
    assert set(frag.arity_part(1)) == {unary(2, [0, 1]), neg}


@pytest.mark.parametrize("arity", [1, 2])
def test_closure_matches_superposition_oracle(arity):
    gens = [binary(2, lambda x, y: x ^ y), FiniteFunction(2, 0, (1,))]
    frag = clone_closure(gens, arity, universe_size=2, working_arity=arity + 2)
    oracle = superposition_closure(gens, arity, 2)
    assert set(frag.arity_part(arity)) == {f for f in oracle if f.arity == arity}


def test_closure_member_cap():
    z4 = cyclic_group(4)
    gens = [FiniteFunction.from_operation(4, op) for op in z4.operations if op.arity]
    with pytest.raises(BudgetExceededError):
        clone_closure(gens, 2, universe_size=4, member_cap=3)


def test_closure_input_validation():
    with pytest.raises(InvalidInputError):
        clone_closure([], 2)
    with pytest.raises(InvalidInputError):
        clone_closure([unary(2, [0, 1]), unary(3, [0, 1, 2])], 2)
    with pytest.raises(InvalidInputError):
        clone_closure([binary(2, lambda x, y: x)], 1)
    with pytest.raises(InvalidInputError):
        clone_closure([], 2, universe_size=2, working_arity=1)


def test_fragment_composition_soundness():
    # every defined composition of members of a closed fragment stays inside
    frag = pol_fragment(cyclic_group(3), 2)
    members = frag.function_set()
    assert frag.member_count() <= 500
    for f in members:
        for g in members:
            if f.arity + g.arity - 1 <= frag.max_arity:
                assert compose_first(f, g) in frag
        assert rotate_args(f) in frag
        assert swap_args(f) in frag
        if f.arity == 2:
            assert diagonal_minor(f) in frag
        if f.arity + 1 <= frag.max_arity:
            assert add_dummy_arg(f) in frag


# ---------------------------------------------------------------------------
# Pol and Comp


def test_pol_z4_unary_is_affine():
    frag = pol_fragment(cyclic_group(4), 1)
    expected = {
        unary(4, [(a * x + b) % 4 for x in range(4)])
        for a in range(4)
        for b in range(4)
    }
    assert set(frag.arity_part(1)) == expected
    assert frag.member_count() == 16


def test_pol_z2_binary_is_affine():
    frag = pol_fragment(cyclic_group(2), 2)
    expected = {
        binary(2, lambda x, y, a=a, b=b, c=c: (a * x + b * y + c) % 2)
        for a in range(2)
        for b in range(2)
        for c in range(2)
    }
    assert set(frag.arity_part(2)) == expected


def test_comp_z4_unary_count_and_structure():
    z4 = cyclic_group(4)
    congs = z4.all_congruences()
    frag = comp_fragment(z4, 1)
    assert frag.member_count() == 64
    beta = Partition.from_blocks(4, [[0, 2], [1, 3]])
    for f in frag.arity_part(1):
        assert beta.same(f(0), f(2)) and beta.same(f(1), f(3))
        assert is_congruence_preserving(f, congs)


def test_pol_subset_of_comp():
    z4 = cyclic_group(4)
    pol = pol_fragment(z4, 1)
    comp = comp_fragment(z4, 1)
    assert pol.function_set() <= comp.function_set()


def test_comp_budget():
    with pytest.raises(BudgetExceededError):
        comp_fragment(cyclic_group(4), 2, budget=100)


def test_comp_on_simple_algebra_is_everything():
    # Con(Z3) is trivial, so every unary function preserves it
    frag = comp_fragment(cyclic_group(3), 1)
    assert frag.member_count() == 27


def test_is_congruence_preserving_examples():
    congs = cyclic_group(4).all_congruences()
    f1 = unary(4, [0, 2, 0, 2])
    assert is_congruence_preserving(f1, congs)
    swap01 = unary(4, [1, 0, 2, 3])
    assert not is_congruence_preserving(swap01, congs)


# ---------------------------------------------------------------------------
# tensor construction


def test_tensor_function_acts_componentwise():
    c = unary(2, [1, 0])
    d = unary(3, [(y + 1) % 3 for y in range(3)])
    t = tensor_function(c, d)
    assert t.universe_size == 6
    for x, y in itertools.product(range(2), range(3)):
        assert t(x * 3 + y) == c(x) * 3 + d(y)


def test_tensor_of_projections():
    p1 = FiniteFunction.projection(2, 2, 0)
    p2 = FiniteFunction.projection(3, 2, 1)
    t = tensor_function(p1, p2)
    for a, b in itertools.product(range(6), repeat=2):
        assert t(a, b) == (a // 3) * 3 + b % 3


def test_tensor_arity_mismatch():
    with pytest.raises(InvalidInputError):
        tensor_function(unary(2, [0, 1]), FiniteFunction.projection(3, 2, 0))


def test_tensor_fragments_equals_pol_of_product():
    z2, z3 = cyclic_group(2), cyclic_group(3)
    prod = direct_product(z2, z3)
    tens = tensor_fragments(pol_fragment(z2, 2), pol_fragment(z3, 2))
    assert tens.members == pol_fragment(prod, 2).members


def test_tensor_generator_closure_equals_tensor_of_closures():
    z2, z3 = cyclic_group(2), cyclic_group(3)
    x_gens = [FiniteFunction.from_operation(2, op) for op in z2.operations]
    y_gens = [FiniteFunction.from_operation(3, op) for op in z3.operations]
    zset = tensor_generators(x_gens, y_gens, 2, 3)
    closed = clone_closure(zset, 2, universe_size=6, working_arity=3)
    lhs = clone_closure(x_gens, 2, universe_size=2, working_arity=3)
    rhs = clone_closure(y_gens, 2, universe_size=3, working_arity=3)
    assert closed.members == tensor_fragments(lhs, rhs).members


def test_tensor_clone_contains_projections_and_composes():
    z2, z3 = cyclic_group(2), cyclic_group(3)
    tens = tensor_fragments(pol_fragment(z2, 2), pol_fragment(z3, 2))
    for i in range(2):
        assert FiniteFunction.projection(6, 2, i) in tens
    members = tens.function_set()
    sample = sorted(members, key=lambda f: (f.arity, f.table))[::7]
    for f in sample:
        for g in sample:
            if f.arity + g.arity - 1 <= 2:
                assert compose_first(f, g) in tens


# ---------------------------------------------------------------------------
# product and skew congruences


def test_product_congruence_classification():
    prod = parse_group_spec("Z2xZ2")
    k1, k2 = prod.product_kernels
    diag = Partition.from_blocks(4, [[0, 3], [1, 2]])
    assert is_product_congruence(k1, k1, k2)
    assert is_product_congruence(Partition.identity(4), k1, k2)
    assert is_product_congruence(Partition.full(4), k1, k2)
    assert not is_product_congruence(diag, k1, k2)


def test_product_congruence_kernel_validation():
    k1 = Partition.from_blocks(4, [[0, 1], [2, 3]])
    with pytest.raises(InvalidInputError):
        is_product_congruence(Partition.identity(4), k1, k1)


def test_skew_congruence_counts():
    assert is_skew_free(parse_group_spec("Z2xZ3"))
    assert is_skew_free(parse_group_spec("Z4xZ3"))
    skew = skew_congruences(parse_group_spec("Z2xZ2"))
    assert len(skew) == 1
    assert skew[0] == Partition.from_blocks(4, [[0, 3], [1, 2]])


def test_skew_requires_recorded_product():
    with pytest.raises(InvalidInputError):
        skew_congruences(cyclic_group(4))


# ---------------------------------------------------------------------------
# relations and Mal'cev


def test_relation4_membership():
    r = Relation4.from_tuples(2, [(0, 0, 1, 1), (0, 0, 1, 1)])
    assert len(r) == 1
    assert (0, 0, 1, 1) in r and (1, 1, 1, 1) not in r
    with pytest.raises(InvalidInputError):
        Relation4.from_tuples(2, [(0, 0, 5, 1)])


def test_preserves_relation():
    z4 = cyclic_group(4)
    eps = Partition.from_blocks(4, [[0, 2], [1, 3]])
    d = group_malcev_function(z4)
    tuples = [
        (x1, x2, x3, d(x1, x2, x3))
        for x1 in range(4)
        for x2 in range(4)
        if eps.same(x1, x2)
        for x3 in range(4)
    ]
    rho = Relation4.from_tuples(4, tuples)
    assert len(rho) == 32
    plus = FiniteFunction.from_operation(4, z4.operation("+"))
    assert preserves_relation(plus, rho)
    assert preserves_relation(FiniteFunction.projection(4, 2, 1), rho)
    swap01 = unary(4, [1, 0, 2, 3])
    assert not preserves_relation(swap01, rho)


def test_malcev_function_identities():
    d = group_malcev_function(cyclic_group(4))
    assert is_malcev_function(d)
    assert d(1, 3, 2) == 0
    assert not is_malcev_function(FiniteFunction.projection(4, 3, 0))


def test_malcev_term_group_shortcut_and_none():
    assert malcev_term(cyclic_group(5)) is not None
    from congrex.algebra import FiniteAlgebra, Operation

    meet2 = FiniteAlgebra(2, [Operation("meet", 2, [0, 0, 0, 1])])
    assert group_malcev_function(meet2) is None
    assert malcev_term(meet2) is None
