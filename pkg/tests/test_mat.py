import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qautcert.arith import (
    BackendMismatch,
    Cyclotomic,
    DimensionMismatch,
    Mat,
    kernel_exact,
    rank_exact,
    root_of_unity,
    span_rank_sparse,
)


def test_identity_is_unitary():
    assert Mat.identity(3).is_unitary()


def test_kron_of_x2_with_identity_is_traceless():
    X2 = Mat.exact([[1, 0], [0, -1]])
    K = X2.kron(Mat.identity(2))
    assert K.trace().is_zero()


def test_diag_projection():
    assert Mat.exact([[1, 0], [0, 0]]).is_projection()
    assert not Mat.exact([[1, 1], [0, 0]]).is_projection()


def test_adjoint_antimultiplicative():
    A = Mat.exact([[root_of_unity(8, 1), 2], [0, root_of_unity(3, 2)]])
    B = Mat.exact([[1, root_of_unity(5, 1)], [root_of_unity(7, 3), 0]])
    assert (A @ B).adjoint().equals(B.adjoint() @ A.adjoint())
    assert A.adjoint().adjoint().equals(A)


def test_kron_mixed_product():
    A = Mat.exact([[1, 2], [3, 4]])
    B = Mat.exact([[0, 1], [1, 0]])
    C = Mat.exact([[root_of_unity(4, 1), 0], [0, 1]])
    D = Mat.exact([[2, 0], [1, 1]])
    assert (A.kron(B) @ C.kron(D)).equals((A @ C).kron(B @ D))


def test_normalized_trace_of_identity():
    assert Mat.identity(5).normalized_trace().is_one()


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Mat.identity(2) @ Mat.identity(3)
    with pytest.raises(DimensionMismatch):
        Mat.zeros(2, 3).trace()


def test_mixed_backend_rejected():
    with pytest.raises(BackendMismatch):
        Mat.identity(2) @ Mat.identity(2, "float")


def test_rank_both_backends():
    M = Mat.exact([[1, 2, 3], [2, 4, 6], [0, 0, 1]])
    assert M.rank() == 2
    assert M.to_float().rank() == 2


def test_scalar_multiple_detection():
    M = Mat.identity(3).scale(root_of_unity(3, 1))
    c = M.scalar_multiple_of_identity()
    assert c == root_of_unity(3, 1)
    assert Mat.exact([[1, 1], [0, 1]]).scalar_multiple_of_identity() is None


def test_residual_exact_zero_and_float():
    A = Mat.exact([[1, 0], [0, 1]])
    assert A.residual(Mat.identity(2)) == 0.0
    Af = A.to_float()
    assert Af.residual(Mat.identity(2, "float")) < 1e-15


def test_kernel_and_span_rank():
    one = Cyclotomic.rational
    ker = kernel_exact([[one(1), one(2), one(3)]], 3)
    assert len(ker) == 2
    assert rank_exact([[one(1), one(2)], [one(2), one(4)]]) == 1
    vecs = [{0: one(1)}, {0: one(2)}, {1: root_of_unity(3, 1)}]
    assert span_rank_sparse(vecs) == 2


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(min_value=-3, max_value=3), min_size=4, max_size=4),
       st.lists(st.integers(min_value=-3, max_value=3), min_size=4, max_size=4))
def test_exact_float_agree_on_products(xs, ys):
    A = Mat.exact([xs[:2], xs[2:]])
    B = Mat.exact([ys[:2], ys[2:]])
    exact = (A @ B).to_float()
    floated = A.to_float() @ B.to_float()
    assert exact.residual(floated) < 1e-9
