from fractions import Fraction

from qautcert.arith import Cyclotomic, Mat, root_of_unity
from qautcert.formal import FormalTensor, qsym, symbol_adjoint, usym


def test_symbol_adjoints():
    assert symbol_adjoint(usym(1, 0, 1, 2, 1, 0)) == usym(1, 0, 1, 2, 1, 0)
    assert symbol_adjoint(qsym(1, 2, 0, 1, 2, 3)) == qsym(1, 2, 1, 0, 3, 2)


def test_add_and_cancel():
    c = Mat.exact([[1, 0], [0, 1]])
    ft = FormalTensor.from_coeff(c, (usym(1, 0, 0, 1, 0, 0),))
    total = ft + ft.scale(-1)
    assert not total.terms


def test_product_concatenates_words():
    a = FormalTensor.from_coeff(Mat.exact([[1, 0], [0, 0]]), (qsym(1, 1, 0, 0, 0, 0),))
    b = FormalTensor.from_coeff(Mat.exact([[0, 1], [0, 0]]), (qsym(1, 1, 0, 1, 0, 1),))
    prod = a @ b
    word = (qsym(1, 1, 0, 0, 0, 0), qsym(1, 1, 0, 1, 0, 1))
    assert list(prod.terms) == [word]
    assert prod.terms[word].equals(Mat.exact([[0, 1], [0, 0]]))


def test_adjoint_reverses_and_conjugates():
    w = root_of_unity(4, 1)
    c = Mat.exact([[w, 0], [0, 1]])
    ft = FormalTensor.from_coeff(c, (qsym(1, 1, 0, 1, 0, 0), usym(1, 0, 0, 1, 0, 0)))
    adj = ft.adjoint()
    word = (usym(1, 0, 0, 1, 0, 0), qsym(1, 1, 1, 0, 0, 0))
    assert list(adj.terms) == [word]
    assert adj.terms[word].equals(c.adjoint())
    assert adj.adjoint().equals(ft)


def test_substitute_scalar_assignment():
    c = Mat.exact([[2, 0], [0, 2]])
    sym = usym(1, 0, 0, 1, 0, 0)
    ft = FormalTensor.from_coeff(c, (sym,))
    out = ft.substitute({sym: Mat.scalar(Fraction(1, 2))})
    assert out.equals(Mat.identity(2))


def test_substitute_matrix_assignment_uses_kron():
    c = Mat.exact([[1, 0], [0, 0]])
    sym = usym(1, 0, 0, 1, 0, 0)
    ft = FormalTensor.from_coeff(c, (sym,))
    val = Mat.exact([[0, 1], [1, 0]])
    out = ft.substitute({sym: val})
    assert out.rows == 4
    assert out.equals(c.kron(val))


def test_map_symbols_applies_phases():
    sym = qsym(1, 1, 0, 0, 0, 0)
    ft = FormalTensor.from_coeff(Mat.identity(2), (sym,))
    phase = root_of_unity(3, 1)
    out = ft.map_symbols(lambda s: (phase, qsym(1, 1, 1, 1, 0, 0)))
    word = (qsym(1, 1, 1, 1, 0, 0),)
    assert list(out.terms) == [word]
    assert out.terms[word].equals(Mat.identity(2).scale(phase))
