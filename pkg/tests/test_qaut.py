from fractions import Fraction

import pytest

from qautcert.algebra import BlockSpec
from qautcert.arith import Cyclotomic, Mat
from qautcert.formal import qsym, usym
from qautcert.pauli import weyl_basis
from qautcert.qaut import (
    GeneratorAssignment,
    IncompleteAssignment,
    NotAutomorphismB,
    QautPresentation,
    SnPresentation,
    alpha,
    beta,
    block_preserving_permutations,
    check_relations,
    classical_assignment_aut,
    classical_theta_battery,
    counit_assignment,
    covariance_check,
    haar_compat_check,
    permutation_assignment,
    pi_map,
    rearranged_Q_check,
    rho_map,
    strict_word_check,
    substitution_preserves_relations,
    theta_ad_unitary,
    theta_block_swap,
    theta_identity,
    uet_pvm,
)


def substitute_all(formal_map, values):
    return {sym: ft.substitute(values) for sym, ft in formal_map.items()}


# -- relations and classical points -----------------------------------------

def test_counit_assignment_passes():
    rep = check_relations(counit_assignment(BlockSpec((2, 1))))
    assert rep.ok and rep.worst_residual == 0.0


def test_counit_agrees_with_identity_point():
    spec = BlockSpec((2,))
    a = counit_assignment(spec)
    b = classical_assignment_aut(spec, theta_identity(spec))
    assert all(a.values[s].equals(b.values[s]) for s in a.values)


def test_identity_permutation_passes_sn():
    spec = BlockSpec((2, 1))
    pts = SnPresentation(spec).points
    rep = check_relations(permutation_assignment(spec, {p: p for p in pts}))
    assert rep.ok


def test_all_ones_fails_first_family():
    pres = QautPresentation(BlockSpec((2,)))
    ones = GeneratorAssignment(pres, {g: Mat.scalar(1) for g in pres.generators})
    rep = check_relations(ones)
    assert not rep.ok
    assert rep.failing.startswith("r1")


def test_incomplete_assignment_rejected():
    pres = QautPresentation(BlockSpec((2,)))
    with pytest.raises(IncompleteAssignment):
        GeneratorAssignment(pres, {})


def test_ad_shift_classical_point():
    # Ad(Z_2): q_(i,j),(k,l) = delta_(i+1,k) delta_(j+1,l) mod 2
    spec = BlockSpec((2,))
    asg = classical_assignment_aut(spec, theta_ad_unitary(spec, 1, weyl_basis(2).z))
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    val = asg.values[qsym(1, 1, i, j, k, l)].entry(0, 0)
                    expect = 1 if (k == (i + 1) % 2 and l == (j + 1) % 2) else 0
                    assert val == Cyclotomic.rational(expect)
    assert check_relations(asg).ok


def test_block_swap_classical_point():
    spec = BlockSpec((1, 1))
    asg = classical_assignment_aut(spec, theta_block_swap(spec, 1, 2))
    assert asg.values[qsym(1, 2, 0, 0, 0, 0)].entry(0, 0).is_one()
    assert asg.values[qsym(1, 1, 0, 0, 0, 0)].entry(0, 0).is_zero()
    assert check_relations(asg).ok


def test_non_star_automorphism_rejected():
    spec = BlockSpec((2,))
    g = Mat.exact([[1, 1], [0, 1]])  # invertible, not unitary
    ginv = Mat.exact([[1, -1], [0, 1]])
    index = {(1, i, j): i * 2 + j for i in range(2) for j in range(2)}
    theta = [[Cyclotomic.zero() for _ in range(4)] for _ in range(4)]
    for (r, i, j), col in index.items():
        unit = Mat.exact([[1 if (a, b) == (i, j) else 0 for b in range(2)]
                          for a in range(2)])
        img = g @ unit @ ginv
        for k in range(2):
            for l in range(2):
                theta[index[(1, k, l)]][col] = img.entry(k, l)
    with pytest.raises(NotAutomorphismB):
        classical_assignment_aut(spec, theta)


# -- the PVM representation ---------------------------------------------------

def test_uet_pvm_single_point():
    cert = uet_pvm(BlockSpec((1,)))
    assert cert["passed"] and cert["outcomes"] == 1


def test_uet_pvm_m2():
    cert = uet_pvm(BlockSpec((2,)))
    assert cert["passed"] and cert["outcomes"] == 4
    # projection of a maximally entangled type: rank d/n_s = 1 each,
    # forced by the completeness relation sum P = I_4
    assert cert["ranks"] == [1, 1, 1, 1]


def test_uet_pvm_2_1():
    cert = uet_pvm(BlockSpec((2, 1)))
    assert cert["passed"] and cert["outcomes"] == 5
    assert cert["ranks"] == [1, 1, 1, 1, 2]


def test_uet_pvm_float_backend():
    cert = uet_pvm(BlockSpec((2, 1)), backend="float")
    assert cert["passed"] and cert["worst_residual"] < 1e-12


# -- pi and rho ---------------------------------------------------------------

def test_pi_collapses_on_abelian_partition():
    spec = BlockSpec((1, 1))
    pi = pi_map(spec)
    for s in (1, 2):
        for r in (1, 2):
            ft = pi[qsym(s, r, 0, 0, 0, 0)]
            assert list(ft.terms) == [(usym(s, 0, 0, r, 0, 0),)]
            assert ft.terms[(usym(s, 0, 0, r, 0, 0),)].scalar_multiple_of_identity().is_one()


def test_pi_identity_permutation_substitution():
    spec = BlockSpec((2,))
    pi = pi_map(spec)
    pts = SnPresentation(spec).points
    uasg = permutation_assignment(spec, {p: p for p in pts})
    qvals = substitute_all(pi, uasg.values)
    rep = check_relations(GeneratorAssignment(QautPresentation(spec), qvals))
    assert rep.ok and rep.worst_residual == 0.0


def test_pi_seeded_block_preserving_battery():
    spec = BlockSpec((2, 1))
    pi = pi_map(spec)
    pres = QautPresentation(spec)
    for perm in block_preserving_permutations(spec, 8, seed=11):
        uasg = permutation_assignment(spec, perm)
        rep = check_relations(GeneratorAssignment(pres, substitute_all(pi, uasg.values)))
        assert rep.ok


def test_pi_block_crossing_cycle_passes():
    # arbitrary permutations are admissible for bare relation checks; a
    # block-crossing cycle exercises the mixed (s, r) generators and pins
    # the 1/n_r prefactor
    spec = BlockSpec((2, 1))
    pts = SnPresentation(spec).points
    cyc = {pts[i]: pts[(i + 1) % len(pts)] for i in range(len(pts))}
    pi = pi_map(spec)
    uasg = permutation_assignment(spec, cyc)
    rep = check_relations(GeneratorAssignment(QautPresentation(spec),
                                              substitute_all(pi, uasg.values)))
    assert rep.ok


def test_rho_collapses_on_abelian_partition():
    rho, _ = rho_map(BlockSpec((1, 1)), crosscheck=False)
    ft = rho[usym(1, 0, 0, 2, 0, 0)]
    assert list(ft.terms) == [(qsym(1, 2, 0, 0, 0, 0),)]


def test_rho_both_forms_agree():
    for sizes in [(2,), (2, 1)]:
        _, report = rho_map(BlockSpec(sizes))
        assert report["both_forms_agree"]


def test_rho_classical_point_gives_magic_unitary():
    spec = BlockSpec((2,))
    qasg = classical_assignment_aut(spec, theta_ad_unitary(spec, 1, weyl_basis(2).x))
    rho, _ = rho_map(spec, crosscheck=False)
    uvals = substitute_all(rho, qasg.values)
    assert next(iter(uvals.values())).rows == 4  # M_2 x M_2
    rep = check_relations(GeneratorAssignment(SnPresentation(spec), uvals))
    assert rep.ok and rep.worst_residual == 0.0


def test_rho_battery_of_automorphisms():
    spec = BlockSpec((2,))
    rho, _ = rho_map(spec, crosscheck=False)
    pres = SnPresentation(spec)
    for entry in classical_theta_battery(spec, 10, seed=5):
        qasg = classical_assignment_aut(spec, entry[-1])
        rep = check_relations(GeneratorAssignment(pres, substitute_all(rho, qasg.values)))
        assert rep.ok, entry[0]


# -- the shuffle identity -----------------------------------------------------

def test_rearranged_q_trivial_partition():
    cert = rearranged_Q_check(BlockSpec((1,)))
    assert cert["passed"] and cert["words_checked"] == 1


def test_rearranged_q_m2():
    cert = rearranged_Q_check(BlockSpec((2,)))
    assert cert["passed"] and cert["words_checked"] == 16


def test_rearranged_q_mixed_blocks():
    cert = rearranged_Q_check(BlockSpec((2, 1)))
    assert cert["passed"] and cert["words_checked"] == 25


# -- automorphism families ----------------------------------------------------

def test_alpha1_has_order_nt():
    spec = BlockSpec((2, 1))
    sub = alpha(spec, 1, 1)
    for sym in QautPresentation(spec).generators:
        phase = Cyclotomic.one()
        cur = sym
        for _ in range(sub.order):
            p, cur = sub(cur)
            phase = phase * p
        assert cur == sym and phase.is_one()


def test_alpha2_shifts_row_indices():
    sub = alpha(BlockSpec((2,)), 2, 1)
    for k in range(2):
        for l in range(2):
            phase, img = sub(qsym(1, 1, 0, 0, k, l))
            assert phase.is_one() and img == qsym(1, 1, 1, 1, k, l)


def test_beta4_shifts_w_down():
    sub = beta(BlockSpec((2,)), 4, 1)
    phase, img = sub(usym(1, 0, 1, 1, 1, 1))
    assert phase.is_one() and img == usym(1, 0, 1, 1, 1, 0)


def test_alpha_commutations_on_generators():
    spec = BlockSpec((2, 2))
    for t in (1, 2):
        for tau in (1, 2):
            a1, a3 = alpha(spec, 1, t), alpha(spec, 3, tau)
            a2, a4 = alpha(spec, 2, t), alpha(spec, 4, tau)
            for sym in QautPresentation(spec).generators:
                p1, s1 = a1(sym)
                p2, s12 = a3(s1)
                q1, t1 = a3(sym)
                q2, t12 = a1(t1)
                assert s12 == t12 and p1 * p2 == q1 * q2
                p1, s1 = a2(sym)
                p2, s12 = a4(s1)
                q1, t1 = a4(sym)
                q2, t12 = a2(t1)
                assert s12 == t12 and p1 * p2 == q1 * q2


def test_substitutions_preserve_relations():
    # every relation instance maps to a phase multiple of another instance
    # of the same family, for all partitions with N <= 9 exercised here
    for sizes in [(2,), (2, 1), (2, 2), (3,)]:
        spec = BlockSpec(sizes)
        qpres, upres = QautPresentation(spec), SnPresentation(spec)
        for idx in (1, 2, 3, 4):
            for t in range(1, spec.m + 1):
                out = substitution_preserves_relations(spec, alpha(spec, idx, t), qpres)
                assert out["passed"], out
                out = substitution_preserves_relations(spec, beta(spec, idx, t), upres)
                assert out["passed"], out


# -- covariance and trace constants -------------------------------------------

def test_covariance_m2():
    cert = covariance_check(BlockSpec((2,)))
    assert cert["passed"]
    assert cert["e_span_rank"] == 16


def test_covariance_degenerate_abelian():
    cert = covariance_check(BlockSpec((1, 1)))
    assert cert["passed"] and cert["e_span_rank"] == 1


def test_covariance_float_mode():
    cert = covariance_check(BlockSpec((2,)), backend="float", tol=1e-9)
    assert cert["passed"] and cert["worst_residual"] < 1e-10


def test_haar_constants_m2():
    cert = haar_compat_check(BlockSpec((2,)))
    assert cert["passed"] and cert["agreement"]
    rec = cert["records"][0]
    assert rec["substitution_constant"] == "1/2"
    assert set(rec["matches"]) == {"n_s/N", "n_r/N"}


def test_haar_constants_2_1_records_both_candidates():
    cert = haar_compat_check(BlockSpec((2, 1)))
    assert cert["passed"]
    by_class = {tuple(r["class"]): r for r in cert["records"]}
    assert by_class[(1, 2)]["matches"] == ["n_s/N"]
    assert by_class[(2, 1)]["matches"] == ["n_s/N"]
    assert by_class[(1, 2)]["substitution_constant"] == "2/5"
    assert by_class[(2, 1)]["substitution_constant"] == "1/5"
    assert not any(r["discrepancy"] for r in cert["records"])


def test_strict_word_mode_reports_without_failing():
    out = strict_word_check(BlockSpec((2,)))
    assert set(out["families"].values()) <= {"verified", "inconclusive"}
    # for this partition the local rewrites settle both quadratic families
    assert out["families"] == {"r1": "verified", "r2": "verified"}
    out = strict_word_check(BlockSpec((2, 1)))
    assert out["families"] == {"r1": "verified", "r2": "verified"}
    out = strict_word_check(BlockSpec((2, 2)))
    assert set(out["families"].values()) == {"skipped_desk_scale"}


def test_homs_battery_2_2_small_sample():
    spec = BlockSpec((2, 2))
    pi = pi_map(spec)
    pres = QautPresentation(spec)
    for perm in block_preserving_permutations(spec, 3, seed=3):
        uasg = permutation_assignment(spec, perm)
        rep = check_relations(GeneratorAssignment(pres, substitute_all(pi, uasg.values)))
        assert rep.ok and rep.worst_residual == 0.0


def test_arbitrary_permutations_pass_bare_relation_checks():
    from qautcert.qaut import arbitrary_permutations

    spec = BlockSpec((2, 1))
    pi = pi_map(spec)
    pres = QautPresentation(spec)
    for perm in arbitrary_permutations(spec, 5, seed=9):
        uasg = permutation_assignment(spec, perm)
        rep = check_relations(GeneratorAssignment(pres, substitute_all(pi, uasg.values)))
        assert rep.ok


def test_direct_sum_is_matrix_valued_magic_unitary():
    from qautcert.qaut import arbitrary_permutations, direct_sum_assignment

    spec = BlockSpec((2, 1))
    perms = arbitrary_permutations(spec, 2, seed=1)
    dsum = direct_sum_assignment(spec, perms)
    assert dsum.size == 2  # entries live in M_2
    assert check_relations(dsum).ok
    pi = pi_map(spec)
    rep = check_relations(GeneratorAssignment(QautPresentation(spec),
                                              substitute_all(pi, dsum.values)))
    assert rep.ok and rep.worst_residual == 0.0
