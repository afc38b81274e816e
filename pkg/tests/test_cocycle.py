import itertools

import pytest

from qautcert.algebra import BlockSpec, recognize_blocks
from qautcert.arith import Cyclotomic, root_of_unity
from qautcert.cocycle import (
    CocycleError,
    FinAbGroup,
    GradedAlgebra,
    GradingMismatch,
    GroupCocycle,
    base_cocycle,
    fourier_function_algebra,
    gamma_group,
    group_algebra,
    inverse_cocycle,
    normalize_inverse_pairing,
    product_cocycle,
    spec_cocycle,
    trivial_cocycle,
    twist_left,
    verify_twist_theorem,
)


def test_pairing_nondegenerate():
    G = FinAbGroup((2, 3))
    assert G.pairing_nondegenerate()
    assert G.pairing((1, 2), (1, 1)) == root_of_unity(2, 1) * root_of_unity(3, 2)


def test_base_cocycle_values():
    w2 = base_cocycle(2)
    assert w2.value((1, 0), (0, 1)) == Cyclotomic.rational(-1)
    assert w2.value((0, 1), (1, 0)).is_one()
    assert base_cocycle(3).value((1, 0), (0, 1)) == root_of_unity(3, 1)


def test_cocycle_identity_verified_on_construction():
    # on Z_3 the normalized table with a single -1 fails the triple identity
    G = FinAbGroup((3,))
    bad = {(g, h): Cyclotomic.one() for g in G.elements() for h in G.elements()}
    bad[((1,), (1,))] = Cyclotomic.rational(-1)
    with pytest.raises(CocycleError):
        GroupCocycle(G, bad)


def test_unnormalized_table_rejected():
    G = FinAbGroup((2,))
    bad = {(g, h): Cyclotomic.one() for g in G.elements() for h in G.elements()}
    bad[((0,), (1,))] = Cyclotomic.rational(-1)
    with pytest.raises(CocycleError):
        GroupCocycle(G, bad)


def test_normalization_trivializes_inverse_pairing():
    for n in (2, 3, 4):
        om = normalize_inverse_pairing(base_cocycle(n))
        assert om.inverse_pairing_trivial()
        om.verify()  # still a cocycle, exhaustively


def test_normalization_of_trivial_cocycle_is_identity():
    triv = trivial_cocycle(FinAbGroup((2, 2)))
    out = normalize_inverse_pairing(triv)
    assert all(v.is_one() for v in out.table.values())
    assert all(v.is_one() for v in out.psi.values())


def test_normalized_cocycle_is_cohomologous_via_recorded_psi():
    for n in (2, 3):
        base = base_cocycle(n)
        om = normalize_inverse_pairing(base)
        G = om.group
        for g in G.elements():
            for h in G.elements():
                quotient = om.value(g, h) / base.value(g, h)
                coboundary = om.psi[g] * om.psi[h] / om.psi[G.add(g, h)]
                assert quotient == coboundary


def test_product_cocycle_2_1():
    parts = [normalize_inverse_pairing(base_cocycle(2)),
             normalize_inverse_pairing(base_cocycle(1))]
    prod = product_cocycle(parts)
    assert prod.group.order == 4
    assert prod.inverse_pairing_trivial()
    # all values are fourth roots of unity
    for v in prod.table.values():
        assert (v ** 4).is_one()


def test_product_cocycle_single_part_is_identity_operation():
    om = normalize_inverse_pairing(base_cocycle(2))
    prod = product_cocycle([om])
    assert prod.table == om.table


def test_product_cocycle_2_2_exhaustive():
    prod = spec_cocycle(BlockSpec((2, 2)))
    assert prod.group.order == 16
    prod.verify()  # 16^3 triples, exact


def test_twist_by_trivial_cocycle_is_identity():
    graded = fourier_function_algebra(BlockSpec((2,)))
    triv = trivial_cocycle(graded.group)
    twisted, record = twist_left(graded, triv)
    assert record["involution_scalars_all_one"]
    assert twisted.mul == graded.algebra.mul


def test_twist_group_algebra_of_z2z2_gives_m2():
    graded = group_algebra(FinAbGroup((2, 2)))
    om = normalize_inverse_pairing(base_cocycle(2))
    twisted, _ = twist_left(graded, om)
    from qautcert.algebra import center

    assert len(center(twisted)) == 1
    assert recognize_blocks(twisted).sizes == (2,)


def test_twist_function_algebra_spec2_gives_m2():
    graded = fourier_function_algebra(BlockSpec((2,)))
    twisted, _ = twist_left(graded, spec_cocycle(BlockSpec((2,))))
    assert recognize_blocks(twisted).sizes == (2,)


def test_twist_then_inverse_twist_restores_structure_constants():
    graded = fourier_function_algebra(BlockSpec((2, 1)))
    sigma = spec_cocycle(BlockSpec((2, 1)))
    twisted, _ = twist_left(graded, sigma)
    back, _ = twist_left(GradedAlgebra(twisted, graded.group, graded.degrees),
                         inverse_cocycle(sigma))
    assert back.mul.keys() == graded.algebra.mul.keys()
    for key, terms in graded.algebra.mul.items():
        assert dict(back.mul[key]) == dict(terms)


def test_grading_mismatch_rejected():
    graded = fourier_function_algebra(BlockSpec((2,)))
    wrong = normalize_inverse_pairing(base_cocycle(3))
    with pytest.raises(GradingMismatch):
        twist_left(graded, wrong)


def test_twist_theorem_examples():
    cert = verify_twist_theorem(BlockSpec((2,)))
    assert cert["passed"] and cert["recognized_blocks"] == [2]
    assert cert["explicit_isomorphism"]["verified"]
    cert = verify_twist_theorem(BlockSpec((1, 1, 1, 1)))
    assert cert["passed"] and cert["recognized_blocks"] == [1, 1, 1, 1]
    cert = verify_twist_theorem(BlockSpec((2, 2)))
    assert cert["passed"] and cert["recognized_blocks"] == [2, 2]


def test_twist_theorem_all_partitions_up_to_10():
    def partitions(limit):
        out = set()

        def rec(prefix, remaining, max_part):
            if prefix:
                out.add(tuple(sorted(prefix)))
            for n in range(max_part, 0, -1):
                if n * n <= remaining:
                    rec(prefix + [n], remaining - n * n, n)

        rec([], limit, 3)
        return out

    for sizes in sorted(partitions(10)):
        cert = verify_twist_theorem(BlockSpec(sizes))
        assert cert["passed"], (sizes, cert)
        assert cert["recognized_blocks"] == sorted(sizes)


def test_twist_theorem_float_backend():
    cert = verify_twist_theorem(BlockSpec((2, 2)), backend="float")
    assert cert["passed"]
    assert cert["worst_residual"] <= 1e-8


def test_gamma_group_factors():
    G = gamma_group(BlockSpec((2, 3)))
    assert G.factors == (2, 2, 3, 3)
    assert G.order == 36
