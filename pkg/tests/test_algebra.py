import os
from fractions import Fraction

import numpy as np
import pytest

from qautcert.algebra import (
    AxiomViolation,
    BlockSpec,
    NotDeltaForm,
    NotSemisimple,
    StructAlgebra,
    center,
    delta_form_check,
    function_algebra,
    multimatrix,
    recognize_blocks,
    tensor_algebra,
)
from qautcert.arith import Cyclotomic

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def test_multimatrix_abelian_uniform_trace():
    A = multimatrix(BlockSpec((1, 1, 1, 1)))
    for i in range(4):
        assert A.trace_of(A.basis_vector(i)) == Cyclotomic.rational(Fraction(1, 4))


def test_multimatrix_m2_trace_is_normalized_trace():
    # psi = (2/4) Tr on M_2, so diagonal units weigh 1/2
    A = multimatrix(BlockSpec((2,)))
    assert A.trace_of(A.basis_vector(0)) == Cyclotomic.rational(Fraction(1, 2))
    assert A.trace_of(A.basis_vector(1)).is_zero()


def test_multimatrix_2_1_plancherel_weights():
    A = multimatrix(BlockSpec((2, 1)))
    assert A.trace_of(A.basis_vector(0)) == Cyclotomic.rational(Fraction(2, 5))
    assert A.trace_of(A.basis_vector(4)) == Cyclotomic.rational(Fraction(1, 5))


def test_plancherel_gram_is_diagonal_with_weights():
    # psi(E_ij* E_kl) = delta_ik delta_jl n_r / N, exactly
    spec = BlockSpec((2, 1))
    A = multimatrix(spec)
    weights = [Fraction(2, 5)] * 4 + [Fraction(1, 5)]
    for i in range(A.dim):
        for j in range(A.dim):
            star = A.invol_vec(A.basis_vector(i))
            val = A.trace_of(A.mul_vec(star, A.basis_vector(j)))
            expect = Cyclotomic.rational(weights[i]) if i == j else Cyclotomic.zero()
            assert val == expect


def test_delta_form_m2():
    assert delta_form_check(multimatrix(BlockSpec((2,)))) == Cyclotomic.rational(4)


def test_delta_form_abelian():
    assert delta_form_check(multimatrix(BlockSpec((1, 1, 1)))) == Cyclotomic.rational(3)


def test_delta_form_equals_dimension():
    for sizes in [(2,), (2, 1), (2, 2), (3,)]:
        spec = BlockSpec(sizes)
        assert delta_form_check(multimatrix(spec)) == Cyclotomic.rational(spec.N)


def brute_force_mmstar(A, psi):
    # independent float oracle: m m* with explicit Gram matrices
    n = A.dim
    gram = np.zeros((n, n), dtype=complex)
    for i in range(n):
        star = A.invol_vec(np.eye(n)[i])
        for j in range(n):
            gram[i, j] = np.dot(psi, A.mul_vec(star, np.eye(n)[j]))
    M = A.sc.reshape(n * n, n).T
    return M @ np.kron(np.linalg.inv(gram), np.linalg.inv(gram)) @ M.conj().T @ gram


def test_single_block_perturbed_state_is_still_a_delta_form():
    # a faithful state Tr(Q .) on one full matrix block always satisfies
    # m m* = Tr(Q^-1) id; the perturbation changes the constant, not scalarity
    A = multimatrix(BlockSpec((2,))).to_float()
    psi = np.array([0.75, 0.0, 0.0, 0.25], dtype=complex)
    mm = brute_force_mmstar(A, psi)
    assert np.max(np.abs(mm - mm[0, 0] * np.eye(4))) < 1e-9
    c = delta_form_check(A, psi)
    assert abs(c - (4 / 3 + 4)) < 1e-9  # Tr(Q^-1), != dim B


def test_perturbed_state_across_blocks_is_not_delta_form():
    # unequal per-block constants break scalarity: C + C with weights 3/4, 1/4
    A = function_algebra(2, backend="float")
    psi = np.array([0.75, 0.25], dtype=complex)
    mm = brute_force_mmstar(A, psi)
    off = mm - mm[0, 0] * np.eye(2)
    assert np.max(np.abs(off)) > 1e-3  # oracle sees a non-scalar output
    with pytest.raises(NotDeltaForm):
        delta_form_check(A, psi)


def test_center_dimensions():
    assert len(center(multimatrix(BlockSpec((2,))))) == 1
    assert len(center(multimatrix(BlockSpec((2, 1))))) == 2
    assert len(center(function_algebra(5))) == 5


def test_recognize_literal_multimatrix():
    assert recognize_blocks(multimatrix(BlockSpec((2, 2)))).sizes == (2, 2)


def test_recognize_abelian_function_algebra():
    assert recognize_blocks(function_algebra(4)).sizes == (1, 1, 1, 1)


def test_recognize_untwisted_group_algebra_z2z2():
    # Fourier diagonalization done by the recognizer itself: the center basis
    # is the group basis, and the generic element has rational character values
    from qautcert.cocycle import FinAbGroup, group_algebra

    graded = group_algebra(FinAbGroup((2, 2)))
    res = recognize_blocks(graded.algebra)
    assert res.sizes == (1, 1, 1, 1)
    assert res.method == "exact"


def test_recognize_round_trip_all_partitions_up_to_16():
    def partitions_by_square_sum(limit):
        out = []

        def rec(prefix, remaining, max_part):
            if prefix:
                out.append(tuple(prefix))
            for n in range(min(max_part, int(remaining**0.5)), 0, -1):
                if n * n <= remaining:
                    rec(prefix + [n], remaining - n * n, n)

        rec([], limit, limit)
        return {tuple(sorted(p)) for p in out}

    for sizes in sorted(partitions_by_square_sum(16)):
        spec = BlockSpec(sizes)
        res = recognize_blocks(multimatrix(spec))
        assert res.sizes == tuple(sorted(sizes)), sizes
        if spec.N > 9:
            assert res.method == "float"


def test_recognize_tensor_amplification():
    T = tensor_algebra(multimatrix(BlockSpec((2,))), 2)
    assert recognize_blocks(T).sizes == (4,)


def test_not_semisimple_detected():
    # 2-dim algebra spanned by 1, x with x^2 = 0: radical is C x
    one = Cyclotomic.one()
    mul = {(0, 0): ((0, one),), (0, 1): ((1, one),), (1, 0): ((1, one),)}
    invol = [((0, one),), ((1, one),)]
    alg = StructAlgebra(2, ["1", "x"], "exact", mul=mul, invol=invol,
                        unit=[one, Cyclotomic.zero()],
                        trace=[one, Cyclotomic.zero()])
    with pytest.raises(NotSemisimple):
        recognize_blocks(alg)


def test_axiom_violation_caught_at_construction():
    one = Cyclotomic.one()
    # b1 * b1 = b1 but b1 declared as the unit with b0: unit axiom breaks
    mul = {(0, 0): ((1, one),), (0, 1): ((0, one),), (1, 0): ((0, one),),
           (1, 1): ((1, one),)}
    invol = [((0, one),), ((1, one),)]
    with pytest.raises(AxiomViolation):
        StructAlgebra(2, ["a", "b"], "exact", mul=mul, invol=invol,
                      unit=[one, Cyclotomic.zero()],
                      trace=[one, Cyclotomic.zero()])


def test_serialization_golden_roundtrip():
    alg = multimatrix(BlockSpec((2, 1)))
    text = alg.serialize()
    with open(os.path.join(GOLDEN, "multimatrix_2_1.txt")) as fh:
        assert text == fh.read()
    back = StructAlgebra.deserialize(text)
    assert back.serialize() == text
