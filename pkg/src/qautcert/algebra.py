"""Finite-dimensional *-algebras given by structure constants.

Multimatrix algebras carry the Plancherel trace psi(A) = sum_r (n_r/N) Tr(A_r),
the unique tracial state whose multiplication map satisfies m m* = N id with
respect to the GNS inner products.  Block recognition certifies isomorphism
type by splitting the center into primitive idempotents.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import (
    Cyclotomic,
    DEFAULT_FLOAT_CONFIG,
    FloatConfig,
    kernel_exact,
    rank_exact,
    rref_exact,
)

__all__ = [
    "BlockSpec",
    "StructAlgebra",
    "multimatrix",
    "function_algebra",
    "tensor_algebra",
    "delta_form_check",
    "center",
    "recognize_blocks",
    "BlocksResult",
    "NotDeltaForm",
    "NotFaithful",
    "NotSemisimple",
    "NonSquareBlock",
    "RecognitionError",
    "AxiomViolation",
]


class NotDeltaForm(ValueError):
    pass


class NotFaithful(ValueError):
    pass


class NotSemisimple(ValueError):
    pass


class NonSquareBlock(ValueError):
    pass


class RecognitionError(RuntimeError):
    pass


class AxiomViolation(ValueError):
    pass


@dataclass(frozen=True)
class BlockSpec:
    """A partition (n_1, ..., n_m) of matrix block sizes."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        if not self.sizes or any(n < 1 for n in self.sizes):
            raise ValueError("all block sizes must be >= 1")
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))

    @property
    def m(self) -> int:
        return len(self.sizes)

    @property
    def N(self) -> int:
        return sum(n * n for n in self.sizes)

    @property
    def d(self) -> int:
        out = 1
        for n in self.sizes:
            out *= n
        return out

    @property
    def D(self) -> int:
        """Size of the block-diagonal embedding, sum of the n_r."""
        return sum(self.sizes)


_EXHAUSTIVE_AXIOM_DIM = 64
_AXIOM_SAMPLES = 512


class StructAlgebra:
    """A *-algebra with basis, structure constants, involution and trace.

    Exact backend: ``mul`` maps (i, j) to a tuple of (k, Cyclotomic) pairs,
    ``invol`` maps i to such a tuple, ``unit``/``trace`` are scalar lists.
    Float backend: ``sc`` is a complex (dim, dim, dim) tensor with
    sc[i, j, k] the coefficient of b_k in b_i b_j, ``invol_mat`` a matrix,
    ``unit``/``trace`` complex vectors.
    """

    def __init__(self, dim, labels, backend, *, mul=None, invol=None, sc=None,
                 invol_mat=None, unit=None, trace=None, tracial=True,
                 config: FloatConfig | None = None, verify=True, seed=0):
        self.dim = dim
        self.labels = tuple(labels)
        self.backend = backend
        self.config = config or DEFAULT_FLOAT_CONFIG
        self.tracial = tracial
        if backend == "exact":
            self.mul = {k: tuple((i, c) for i, c in v if not c.is_zero())
                        for k, v in mul.items()}
            self.mul = {k: v for k, v in self.mul.items() if v}
            self.invol = [tuple(t) for t in invol]
            self.unit = [Cyclotomic._coerce(c) for c in unit]
            self.trace = [Cyclotomic._coerce(c) for c in trace]
        else:
            self.sc = np.asarray(sc, dtype=np.complex128)
            self.invol_mat = np.asarray(invol_mat, dtype=np.complex128)
            self.unit = np.asarray(unit, dtype=np.complex128)
            self.trace = np.asarray(trace, dtype=np.complex128)
        if verify:
            self.verify_axioms(seed=seed)

    # -- basic operations ----------------------------------------------------
    def basis_mul(self, i: int, j: int):
        if self.backend == "exact":
            return self.mul.get((i, j), ())
        return self.sc[i, j]

    def mul_vec(self, u, v):
        if self.backend == "exact":
            acc: dict = {}
            for i, a in enumerate(u):
                if isinstance(a, Cyclotomic) and a.is_zero():
                    continue
                for j, b in enumerate(v):
                    if isinstance(b, Cyclotomic) and b.is_zero():
                        continue
                    ab = a * b
                    for k, c in self.mul.get((i, j), ()):
                        cur = acc.get(k)
                        acc[k] = ab * c if cur is None else cur + ab * c
            out = [Cyclotomic.zero()] * self.dim
            for k, val in acc.items():
                out[k] = val
            return out
        return np.einsum("i,j,ijk->k", u, v, self.sc)

    def invol_vec(self, v):
        if self.backend == "exact":
            acc: dict = {}
            for i, a in enumerate(v):
                a = Cyclotomic._coerce(a).conjugate()
                if a.is_zero():
                    continue
                for k, c in self.invol[i]:
                    cur = acc.get(k)
                    acc[k] = a * c if cur is None else cur + a * c
            out = [Cyclotomic.zero()] * self.dim
            for k, val in acc.items():
                out[k] = val
            return out
        return self.invol_mat.T @ np.conj(v)

    def trace_of(self, v):
        if self.backend == "exact":
            out = Cyclotomic.zero()
            for a, t in zip(v, self.trace):
                out = out + Cyclotomic._coerce(a) * t
            return out
        return complex(np.dot(self.trace, v))

    def left_mult_rows(self, v):
        """Matrix of left multiplication by the vector v, as rows over k."""
        if self.backend == "exact":
            rows = [[Cyclotomic.zero() for _ in range(self.dim)] for _ in range(self.dim)]
            for i, a in enumerate(v):
                a = Cyclotomic._coerce(a)
                if a.is_zero():
                    continue
                for j in range(self.dim):
                    for k, c in self.mul.get((i, j), ()):
                        rows[k][j] = rows[k][j] + a * c
            return rows
        return np.einsum("i,ijk->kj", v, self.sc)

    def basis_vector(self, i: int):
        if self.backend == "exact":
            v = [Cyclotomic.zero() for _ in range(self.dim)]
            v[i] = Cyclotomic.one()
            return v
        v = np.zeros(self.dim, dtype=np.complex128)
        v[i] = 1.0
        return v

    # -- verification ---------------------------------------------------------
    def verify_axioms(self, seed=0):
        if self.backend == "float":
            self._verify_float()
        else:
            self._verify_exact(seed=seed)

    def _verify_exact(self, seed=0):
        dim = self.dim
        triples = None
        if dim > _EXHAUSTIVE_AXIOM_DIM:
            rng = random.Random(seed)
            triples = [(rng.randrange(dim), rng.randrange(dim), rng.randrange(dim))
                       for _ in range(_AXIOM_SAMPLES)]
        else:
            triples = [(i, j, k) for i in range(dim) for j in range(dim) for k in range(dim)]
        for i, j, k in triples:
            lhs = self._mul_sparse(self.mul.get((i, j), ()), k, right=True)
            rhs = self._mul_sparse(self.mul.get((j, k), ()), i, right=False)
            if lhs != rhs:
                raise AxiomViolation(f"associativity fails at basis triple ({i},{j},{k})")
        pairs = {(i, j) for (i, j, _) in triples}
        for i, j in pairs:
            lhs = self._expand_invol(self.mul.get((i, j), ()))
            rhs = {}
            for k1, c1 in self.invol[j]:
                for k2, c2 in self.invol[i]:
                    for k, c in self.mul.get((k1, k2), ()):
                        rhs[k] = rhs.get(k, Cyclotomic.zero()) + c1 * c2 * c
            if _sparse_ne(lhs, rhs):
                raise AxiomViolation(f"involution is not antimultiplicative at ({i},{j})")
        for i in range(dim):
            acc = {}
            for k1, c1 in self.invol[i]:
                c1c = c1.conjugate()
                for k, c in self.invol[k1]:
                    acc[k] = acc.get(k, Cyclotomic.zero()) + c1c * c
            expect = {i: Cyclotomic.one()}
            if _sparse_ne(acc, expect):
                raise AxiomViolation(f"involution is not involutive at basis {i}")
        for i in range(dim):
            left = self.mul_vec(self.unit, self.basis_vector(i))
            right = self.mul_vec(self.basis_vector(i), self.unit)
            expect = self.basis_vector(i)
            if any((a - b) != Cyclotomic.zero() for a, b in zip(left, expect)):
                raise AxiomViolation(f"unit fails on the left at basis {i}")
            if any((a - b) != Cyclotomic.zero() for a, b in zip(right, expect)):
                raise AxiomViolation(f"unit fails on the right at basis {i}")
        if self.tracial:
            for i, j in pairs:
                tij = self._pair_trace(i, j)
                tji = self._pair_trace(j, i)
                if tij != tji:
                    raise AxiomViolation(f"trace is not tracial at ({i},{j})")

    def _pair_trace(self, i, j):
        out = Cyclotomic.zero()
        for k, c in self.mul.get((i, j), ()):
            out = out + c * self.trace[k]
        return out

    def _mul_sparse(self, terms, other, right: bool):
        out = {}
        for k1, c1 in terms:
            key = (k1, other) if right else (other, k1)
            for k, c in self.mul.get(key, ()):
                cur = out.get(k)
                out[k] = c1 * c if cur is None else cur + c1 * c
        return {k: v for k, v in out.items() if not v.is_zero()}

    def _expand_invol(self, terms):
        out = {}
        for k1, c1 in terms:
            c1c = c1.conjugate()
            for k, c in self.invol[k1]:
                cur = out.get(k)
                out[k] = c1c * c if cur is None else cur + c1c * c
        return {k: v for k, v in out.items() if not v.is_zero()}

    def _verify_float(self):
        eps = self.config.eps
        n = self.dim
        C = self.sc
        a1 = C.reshape(n * n, n) @ C.reshape(n, n * n)
        ct = np.ascontiguousarray(C.transpose(1, 0, 2))
        a2 = C.reshape(n * n, n) @ ct.reshape(n, n * n)
        a2 = a2.reshape(n, n, n, n).transpose(2, 0, 1, 3).reshape(n * n, n * n)
        scale = max(1.0, float(np.max(np.abs(C))) ** 2)
        if np.max(np.abs(a1 - a2)) > eps * scale * n:
            raise AxiomViolation("associativity fails (float backend)")
        S = self.invol_mat
        lhs = np.einsum("ijk,kl->ijl", C, S).conj()
        rhs = np.einsum("jp,iq,pqk->jik", S.conj(), S.conj(), C).conj()
        rhs = rhs.transpose(1, 0, 2)
        if np.max(np.abs(lhs - rhs)) > eps * scale * n:
            raise AxiomViolation("involution not antimultiplicative (float backend)")
        if np.max(np.abs(S.conj() @ S - np.eye(n))) > eps * n:
            raise AxiomViolation("involution not involutive (float backend)")
        for i in range(n):
            e = np.zeros(n, dtype=np.complex128)
            e[i] = 1
            if np.max(np.abs(self.mul_vec(self.unit, e) - e)) > eps * n:
                raise AxiomViolation("unit fails (float backend)")
            if np.max(np.abs(self.mul_vec(e, self.unit) - e)) > eps * n:
                raise AxiomViolation("unit fails (float backend)")
        if self.tracial:
            t1 = np.einsum("ijk,k->ij", C, self.trace)
            if np.max(np.abs(t1 - t1.T)) > eps * n:
                raise AxiomViolation("trace not tracial (float backend)")

    # -- conversions -----------------------------------------------------------
    def to_float(self, config: FloatConfig | None = None) -> "StructAlgebra":
        if self.backend == "float":
            return self
        n = self.dim
        sc = np.zeros((n, n, n), dtype=np.complex128)
        for (i, j), terms in self.mul.items():
            for k, c in terms:
                sc[i, j, k] = c.to_complex()
        invol_mat = np.zeros((n, n), dtype=np.complex128)
        for i, terms in enumerate(self.invol):
            for k, c in terms:
                invol_mat[i, k] = c.to_complex()
        unit = np.array([c.to_complex() for c in self.unit])
        trace = np.array([c.to_complex() for c in self.trace])
        return StructAlgebra(n, self.labels, "float", sc=sc, invol_mat=invol_mat,
                             unit=unit, trace=trace, tracial=self.tracial,
                             config=config or self.config, verify=False)

    # -- serialization -----------------------------------------------------------
    def serialize(self) -> str:
        """Stable text form (exact backend) for golden-file regression."""
        if self.backend != "exact":
            raise ValueError("only exact algebras serialize to text")
        lines = [f"dim {self.dim}", "labels " + " ".join(self.labels)]

        def scal(c: Cyclotomic) -> str:
            return f"{c.order}:" + ",".join(str(q) for q in c.coeffs)

        for (i, j) in sorted(self.mul):
            terms = " ".join(f"{k}={scal(c)}" for k, c in self.mul[(i, j)])
            lines.append(f"mul {i} {j} {terms}")
        for i, terms in enumerate(self.invol):
            body = " ".join(f"{k}={scal(c)}" for k, c in terms)
            lines.append(f"invol {i} {body}")
        lines.append("unit " + " ".join(scal(c) for c in self.unit))
        lines.append("trace " + " ".join(scal(c) for c in self.trace))
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text: str) -> "StructAlgebra":
        def parse_scal(s: str) -> Cyclotomic:
            order, body = s.split(":")
            return Cyclotomic(int(order), [Fraction(q) for q in body.split(",")])

        dim = 0
        labels: list[str] = []
        mul: dict = {}
        invol: list = []
        unit = trace = None
        for line in text.strip().splitlines():
            parts = line.split()
            if parts[0] == "dim":
                dim = int(parts[1])
            elif parts[0] == "labels":
                labels = parts[1:]
            elif parts[0] == "mul":
                i, j = int(parts[1]), int(parts[2])
                terms = tuple((int(t.split("=")[0]), parse_scal(t.split("=")[1])) for t in parts[3:])
                mul[(i, j)] = terms
            elif parts[0] == "invol":
                terms = tuple((int(t.split("=")[0]), parse_scal(t.split("=")[1])) for t in parts[2:])
                invol.append(terms)
            elif parts[0] == "unit":
                unit = [parse_scal(t) for t in parts[1:]]
            elif parts[0] == "trace":
                trace = [parse_scal(t) for t in parts[1:]]
        return cls(dim, labels, "exact", mul=mul, invol=invol, unit=unit, trace=trace)


def _sparse_ne(a: dict, b: dict) -> bool:
    keys = set(a) | set(b)
    for k in keys:
        if a.get(k, Cyclotomic.zero()) != b.get(k, Cyclotomic.zero()):
            return True
    return False


def multimatrix(spec: BlockSpec, backend: str = "exact",
                config: FloatConfig | None = None) -> StructAlgebra:
    """The multimatrix algebra of a partition, in its matrix-unit basis,
    with the Plancherel trace psi(E^(r)_ij) = delta_ij * n_r / N."""
    sizes = spec.sizes
    N = spec.N
    index = {}
    labels = []
    for r, n in enumerate(sizes):
        for i in range(n):
            for j in range(n):
                index[(r, i, j)] = len(labels)
                labels.append(f"E{r + 1}[{i},{j}]")
    mul = {}
    for r, n in enumerate(sizes):
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for l in range(n):
                        if j == k:
                            a = index[(r, i, j)]
                            b = index[(r, k, l)]
                            mul[(a, b)] = ((index[(r, i, l)], Cyclotomic.one()),)
    invol = [None] * len(labels)
    trace = [Cyclotomic.zero()] * len(labels)
    unit = [Cyclotomic.zero() for _ in labels]
    for (r, i, j), a in index.items():
        invol[a] = ((index[(r, j, i)], Cyclotomic.one()),)
        if i == j:
            trace[a] = Cyclotomic.rational(Fraction(sizes[r], N))
            unit[a] = Cyclotomic.one()
    alg = StructAlgebra(len(labels), labels, "exact", mul=mul, invol=invol,
                        unit=unit, trace=trace)
    if backend == "float":
        return alg.to_float(config)
    return alg


def function_algebra(npoints: int, backend: str = "exact",
                     config: FloatConfig | None = None,
                     labels=None) -> StructAlgebra:
    """C(X) for |X| = npoints in the point-indicator basis, uniform trace."""
    labels = labels or [f"d{x}" for x in range(npoints)]
    mul = {(i, i): ((i, Cyclotomic.one()),) for i in range(npoints)}
    invol = [((i, Cyclotomic.one()),) for i in range(npoints)]
    unit = [Cyclotomic.one() for _ in range(npoints)]
    trace = [Cyclotomic.rational(Fraction(1, npoints)) for _ in range(npoints)]
    alg = StructAlgebra(npoints, labels, "exact", mul=mul, invol=invol,
                        unit=unit, trace=trace)
    return alg.to_float(config) if backend == "float" else alg


def tensor_algebra(A: StructAlgebra, k: int) -> StructAlgebra:
    """A tensor M_k in the basis b_i x E_uv, with trace tau_A x (Tr/k)."""
    if A.backend != "exact":
        raise ValueError("tensor_algebra expects an exact base")
    dim = A.dim * k * k
    labels = []
    index = {}
    for i in range(A.dim):
        for u in range(k):
            for v in range(k):
                index[(i, u, v)] = len(labels)
                labels.append(f"{A.labels[i]}*E[{u},{v}]")
    mul = {}
    for (i, u, v), a in index.items():
        for (j, p, q), b in index.items():
            if v != p:
                continue
            terms = tuple((index[(kk, u, q)], c) for kk, c in A.mul.get((i, j), ()))
            if terms:
                mul[(a, b)] = terms
    invol = [None] * dim
    unit = [Cyclotomic.zero() for _ in range(dim)]
    trace = [Cyclotomic.zero() for _ in range(dim)]
    for (i, u, v), a in index.items():
        invol[a] = tuple((index[(kk, v, u)], c) for kk, c in A.invol[i])
        if u == v:
            unit[a] = A.unit[i]
            trace[a] = A.trace[i] / Cyclotomic.rational(k)
    return StructAlgebra(dim, labels, "exact", mul=mul, invol=invol, unit=unit,
                         trace=trace, tracial=A.tracial)


def delta_form_check(A: StructAlgebra, psi=None):
    """Scalar c with m m* = c id for the GNS inner products of psi.

    Returns c (the square of the delta-form constant).  Raises NotFaithful
    when the Gram matrix of psi is singular or not positive definite, and
    NotDeltaForm when m m* is not a scalar multiple of the identity.
    """
    if A.backend == "float":
        return _delta_form_float(A, psi)
    psi = psi if psi is not None else A.trace
    n = A.dim
    gram = [[Cyclotomic.zero() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        bi_star = A.invol_vec(A.basis_vector(i))
        for j in range(n):
            prod = A.mul_vec(bi_star, A.basis_vector(j))
            out = Cyclotomic.zero()
            for a, t in zip(prod, psi):
                out = out + a * t
            gram[i][j] = out
    _check_positive_definite_exact(gram)
    ginv = _invert_exact(gram)
    # m m* = M (G^-1 x G^-1) M^dagger G with M the multiplication matrix
    # M[l,(i,j)] = c^l_{ij}; the Kronecker inverse is folded directly through
    # the sparse structure constants.
    comp = [[Cyclotomic.zero() for _ in range(n)] for _ in range(n)]
    for (i, j), terms in A.mul.items():
        for (p, q), terms2 in A.mul.items():
            w = ginv[i][p] * ginv[j][q]
            if w.is_zero():
                continue
            for k2, c2 in terms2:
                c2c = c2.conjugate()
                for l, c1 in terms:
                    comp[l][k2] = comp[l][k2] + c1 * w * c2c
    mmstar = [[Cyclotomic.zero() for _ in range(n)] for _ in range(n)]
    for l in range(n):
        for k in range(n):
            acc = Cyclotomic.zero()
            for k2 in range(n):
                acc = acc + comp[l][k2] * gram[k2][k]
            mmstar[l][k] = acc
    c = mmstar[0][0]
    for l in range(n):
        for k in range(n):
            expect = c if l == k else Cyclotomic.zero()
            if mmstar[l][k] != expect:
                raise NotDeltaForm("m m* is not a scalar multiple of the identity")
    return c


def _delta_form_float(A: StructAlgebra, psi=None):
    psi = np.asarray(psi if psi is not None else A.trace, dtype=np.complex128)
    n = A.dim
    eps = A.config.eps
    gram = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        bi_star = A.invol_vec(np.eye(n)[i])
        for j in range(n):
            gram[i, j] = np.dot(psi, A.mul_vec(bi_star, np.eye(n)[j]))
    herm = np.max(np.abs(gram - gram.conj().T))
    eig = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
    if herm > eps * n or np.min(eig) <= eps:
        raise NotFaithful("Gram matrix singular or not positive definite")
    M = A.sc.reshape(n * n, n).T  # rows l, cols (i,j)
    g2inv = np.kron(np.linalg.inv(gram), np.linalg.inv(gram))
    mm = M @ g2inv @ M.conj().T @ gram
    c = mm[0, 0]
    if np.max(np.abs(mm - c * np.eye(n))) > 1e3 * eps * max(1.0, abs(c)):
        raise NotDeltaForm("m m* is not a scalar multiple of the identity")
    return complex(c)


def _check_positive_definite_exact(gram):
    # Positivity via leading principal minors; the exact path requires the
    # minors to come out rational (true for every Gram matrix in scope).
    n = len(gram)
    for i in range(n):
        for j in range(n):
            if gram[i][j].conjugate() != gram[j][i]:
                raise NotFaithful("Gram matrix is not Hermitian")
    for k in range(1, n + 1):
        sub = [[gram[i][j] for j in range(k)] for i in range(k)]
        det = _det_exact(sub)
        if not det.is_rational():
            raise NotFaithful("Gram minors are not totally real")
        if det.as_fraction() <= 0:
            raise NotFaithful("Gram matrix singular or not positive definite")


def _det_exact(rows):
    n = len(rows)
    mat = [list(r) for r in rows]
    det = Cyclotomic.one()
    for c in range(n):
        pivot = None
        for r in range(c, n):
            if not mat[r][c].is_zero():
                pivot = r
                break
        if pivot is None:
            return Cyclotomic.zero()
        if pivot != c:
            mat[c], mat[pivot] = mat[pivot], mat[c]
            det = -det
        det = det * mat[c][c]
        inv = mat[c][c].inverse()
        for r in range(c + 1, n):
            f = mat[r][c] * inv
            if not f.is_zero():
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[c])]
    return det


def _invert_exact(rows):
    n = len(rows)
    aug = [[rows[i][j] for j in range(n)] +
           [Cyclotomic.one() if j == i else Cyclotomic.zero() for j in range(n)]
           for i in range(n)]
    rref, pivots = rref_exact(aug)
    if pivots != list(range(n)):
        raise NotFaithful("matrix is singular")
    return [[rref[i][n + j] for j in range(n)] for i in range(n)]


def center(A: StructAlgebra):
    """Basis of the center, by solving [x, b_i] = 0 for all i."""
    n = A.dim
    if A.backend == "exact":
        rows = []
        for i in range(n):
            for k in range(n):
                row = [Cyclotomic.zero() for _ in range(n)]
                nz = False
                for j in range(n):
                    coeff = Cyclotomic.zero()
                    for kk, c in A.mul.get((j, i), ()):
                        if kk == k:
                            coeff = coeff + c
                    for kk, c in A.mul.get((i, j), ()):
                        if kk == k:
                            coeff = coeff - c
                    if not coeff.is_zero():
                        row[j] = coeff
                        nz = True
                if nz:
                    rows.append(row)
        return kernel_exact(rows, n)
    # float: nullspace of the stacked commutator system via SVD;
    # rows indexed by (i, k), columns by j: coeff = sc[j,i,k] - sc[i,j,k]
    C = A.sc
    rows = np.zeros((n * n, n), dtype=np.complex128)
    for i in range(n):
        rows[i * n:(i + 1) * n, :] = C[:, i, :].T - C[i, :, :].T
    u, s, vh = np.linalg.svd(rows, full_matrices=False)
    eps = A.config.eps
    tol = eps * max(rows.shape) * max(float(s[0]) if s.size else 1.0, 1.0)
    null_dim = int(np.sum(s <= tol))
    if s.size < n:
        null_dim += n - s.size
    basis = vh.conj()[n - null_dim:, :] if null_dim else np.zeros((0, n))
    return [basis[i] for i in range(null_dim)]


@dataclass
class BlocksResult:
    sizes: tuple[int, ...]
    idempotents: list
    method: str
    details: dict


def recognize_blocks(A: StructAlgebra, seed: int = 0) -> BlocksResult:
    """Artin-Wedderburn block sizes with explicit central idempotents.

    Semisimplicity is detected (trace-form nondegeneracy of the regular
    representation), never assumed.  Exact splitting is attempted for
    dim <= 9 and falls back to the float backend above that.
    """
    if A.backend == "exact" and A.dim > 9:
        return recognize_blocks(A.to_float(), seed=seed)
    if A.backend == "exact":
        return _recognize_exact(A, seed)
    return _recognize_float(A, seed)


def _regular_trace_form_exact(A: StructAlgebra):
    n = A.dim
    t = [Cyclotomic.zero() for _ in range(n)]
    for k in range(n):
        acc = Cyclotomic.zero()
        for l in range(n):
            for kk, c in A.mul.get((k, l), ()):
                if kk == l:
                    acc = acc + c
        t[k] = acc
    form = [[Cyclotomic.zero() for _ in range(n)] for _ in range(n)]
    for (i, j), terms in A.mul.items():
        acc = Cyclotomic.zero()
        for k, c in terms:
            acc = acc + c * t[k]
        form[i][j] = acc
    return form


def _recognize_exact(A: StructAlgebra, seed: int) -> BlocksResult:
    n = A.dim
    form = _regular_trace_form_exact(A)
    if rank_exact(form) < n:
        raise NotSemisimple("trace form of the regular representation is degenerate")
    cen = center(A)
    if len(cen) == 1:
        root = math.isqrt(n)
        if root * root != n:
            raise NonSquareBlock(f"simple algebra of non-square dimension {n}")
        e = A.unit
        return BlocksResult((root,), [e], "exact", {"center_dim": 1})
    idems = _split_center_exact(A, cen, seed)
    sizes = []
    for e in idems:
        rows = A.left_mult_rows(e)
        d = rank_exact(rows)
        root = math.isqrt(d)
        if root * root != d:
            raise NonSquareBlock(f"block of non-square dimension {d}")
        sizes.append(root)
    return BlocksResult(tuple(sorted(sizes)), idems, "exact",
                        {"center_dim": len(cen)})


def _split_center_exact(A: StructAlgebra, cen, seed: int):
    m = len(cen)
    attempts = [[Fraction(i + 1) for i in range(m)]]
    rng = random.Random(seed)
    for _ in range(4):
        attempts.append([Fraction(rng.randrange(1, 100)) for _ in range(m)])
    last = None
    for coeffs in attempts:
        z = [Cyclotomic.zero() for _ in range(A.dim)]
        for c, vec in zip(coeffs, cen):
            for i in range(A.dim):
                z[i] = z[i] + c * vec[i]
        try:
            return _idempotents_from_generic_exact(A, cen, z)
        except RecognitionError as exc:
            last = exc
    raise RecognitionError(
        f"exact center splitting failed after seeded retries: {last}")


def _idempotents_from_generic_exact(A: StructAlgebra, cen, z):
    m = len(cen)
    # Coordinates of center elements in the center basis: solve via rref.
    cen_rows = [[cen[j][i] for j in range(m)] for i in range(A.dim)]

    def to_center_coords(vec):
        aug = [row + [vec[i]] for i, row in enumerate(cen_rows)]
        rref, pivots = rref_exact(aug)
        coords = [Cyclotomic.zero() for _ in range(m)]
        for r, p in zip(rref, pivots):
            if p < m:
                coords[p] = r[m]
            elif not r[m].is_zero():
                raise RecognitionError("element does not lie in the center")
        return coords

    # Matrix of multiplication by z on the center.
    cols = []
    for j in range(m):
        prod = A.mul_vec(z, cen[j])
        cols.append(to_center_coords(prod))
    Mz = [[cols[j][i] for j in range(m)] for i in range(m)]
    minpoly = _min_poly_exact(Mz)
    roots = _rational_roots(minpoly)
    if len(roots) != len(minpoly) - 1 or len(set(roots)) != len(roots):
        raise RecognitionError("eigenvalue collision or non-rational spectrum")
    if len(roots) != m:
        raise RecognitionError("generic element does not separate the center")
    idems = []
    for lam in roots:
        e = A.unit
        scale = Fraction(1)
        for mu in roots:
            if mu == lam:
                continue
            e = A.mul_vec(e, _shift(A, z, mu))
            scale *= lam - mu
        inv = Cyclotomic.rational(Fraction(1) / scale)
        e = [inv * x for x in e]
        idems.append(e)
    _verify_idempotents_exact(A, idems)
    return idems


def _shift(A: StructAlgebra, z, mu: Fraction):
    return [zi - Cyclotomic.rational(mu) * ui for zi, ui in zip(z, A.unit)]


def _verify_idempotents_exact(A: StructAlgebra, idems):
    total = [Cyclotomic.zero() for _ in range(A.dim)]
    for e in idems:
        sq = A.mul_vec(e, e)
        if any(a != b for a, b in zip(sq, e)):
            raise RecognitionError("candidate idempotent fails e^2 = e")
        for i in range(A.dim):
            total[i] = total[i] + e[i]
    if any(a != b for a, b in zip(total, A.unit)):
        raise RecognitionError("idempotents do not sum to the unit")
    for a in range(len(idems)):
        for b in range(a + 1, len(idems)):
            prod = A.mul_vec(idems[a], idems[b])
            if any(not x.is_zero() for x in prod):
                raise RecognitionError("idempotents are not orthogonal")


def _min_poly_exact(Mz):
    m = len(Mz)
    # Grow powers of Mz until the flattened matrices become dependent.
    powers = [_mat_identity(m)]
    while True:
        powers.append(_mat_mul_exact(powers[-1], Mz))
        k = len(powers) - 1
        rows = [[powers[t][i][j] for t in range(k + 1)]
                for i in range(m) for j in range(m)]
        ker = kernel_exact(rows, k + 1)
        if ker:
            monic = [v for v in ker if not v[k].is_zero()]
            assert monic, "dependence must involve the newest power"
            v = monic[0]
            inv = v[k].inverse()
            return [x * inv for x in v]


def _mat_identity(m):
    return [[Cyclotomic.one() if i == j else Cyclotomic.zero() for j in range(m)]
            for i in range(m)]


def _mat_mul_exact(Am, Bm):
    m = len(Am)
    out = [[Cyclotomic.zero() for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for k in range(m):
            if Am[i][k].is_zero():
                continue
            for j in range(m):
                if not Bm[k][j].is_zero():
                    out[i][j] = out[i][j] + Am[i][k] * Bm[k][j]
    return out


def _rational_roots(poly):
    """All roots, with multiplicity, of a polynomial over the cyclotomic
    field that is required to have rational coefficients and to split over
    the rationals; raises RecognitionError otherwise."""
    coeffs = []
    for c in poly:
        if not c.is_rational():
            raise RecognitionError("minimal polynomial has non-rational coefficients")
        coeffs.append(c.as_fraction())
    den = 1
    for q in coeffs:
        den = den * q.denominator // math.gcd(den, q.denominator)
    work = [int(q * den) for q in coeffs]
    while work and work[-1] == 0:
        work.pop()
    roots: list[Fraction] = []
    while len(work) > 1 and work[0] == 0:
        roots.append(Fraction(0))
        work = work[1:]
    if len(work) > 1:
        cands = set()
        for p in _divisors_of(work[0]):
            for q in _divisors_of(work[-1]):
                cands.add(Fraction(p, q))
                cands.add(Fraction(-p, q))
        for cand in sorted(cands):
            while len(work) > 1 and _eval_int_poly(work, cand) == 0:
                roots.append(cand)
                work = [int(x) if x == int(x) else x for x in _deflate(work, cand)]
    if len(work) > 1:
        raise RecognitionError("polynomial does not split over the rationals")
    return roots


def _divisors_of(n: int):
    n = abs(n)
    if n == 0:
        return [1]
    return _all_divisors(n)


def _all_divisors(n: int):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _eval_int_poly(coeffs, x: Fraction):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _deflate(coeffs, root: Fraction):
    # Synthetic division by (x - root); exact.
    out = [Fraction(0)] * (len(coeffs) - 1)
    carry = Fraction(0)
    for i in range(len(coeffs) - 1, 0, -1):
        carry = coeffs[i] + carry * root
        out[i - 1] = carry
    return out


def _recognize_float(A: StructAlgebra, seed: int) -> BlocksResult:
    if A.backend == "exact":
        A = A.to_float()
    n = A.dim
    t = np.einsum("kll->k", A.sc)
    form = np.einsum("ijk,k->ij", A.sc, t)
    sv = np.linalg.svd(form, compute_uv=False)
    if sv.size and sv[-1] <= 1e-6 * max(sv[0], 1.0):
        raise NotSemisimple("trace form of the regular representation is degenerate")
    cen = center(A)
    m = len(cen)
    if m == 0:
        raise RecognitionError("empty center")
    rng = random.Random(seed)
    coeff_sets = [np.arange(1, m + 1, dtype=np.complex128)]
    for _ in range(4):
        coeff_sets.append(np.array([rng.uniform(0.5, 2.0) for _ in range(m)],
                                   dtype=np.complex128))
    last_err = None
    for coeffs in coeff_sets:
        z = sum(c * v for c, v in zip(coeffs, cen))
        try:
            idems = _idempotents_from_generic_float(A, cen, z)
            sizes = []
            for e in idems:
                rows = A.left_mult_rows(e)
                svr = np.linalg.svd(rows, compute_uv=False)
                d = int(np.sum(svr > 1e-6 * max(float(svr[0]), 1.0)))
                root = math.isqrt(d)
                if root * root != d:
                    raise NonSquareBlock(f"block of non-square dimension {d}")
                sizes.append(root)
            return BlocksResult(tuple(sorted(sizes)), idems, "float",
                                {"center_dim": m})
        except RecognitionError as exc:
            last_err = exc
    raise RecognitionError(f"float center splitting failed: {last_err}")


def _idempotents_from_generic_float(A: StructAlgebra, cen, z):
    m = len(cen)
    cen_mat = np.array(cen).T  # dim x m
    pinv = np.linalg.pinv(cen_mat)
    cols = []
    for j in range(m):
        prod = A.mul_vec(z, cen[j])
        cols.append(pinv @ prod)
    Mz = np.array(cols).T
    lam, _ = np.linalg.eig(Mz)
    lam = sorted(lam, key=lambda w: (round(w.real, 7), round(w.imag, 7)))
    distinct = []
    for w in lam:
        if all(abs(w - u) > 1e-6 for u in distinct):
            distinct.append(w)
    if len(distinct) != m:
        raise RecognitionError("eigenvalue collision for generic central element")
    idems = []
    unit = A.unit
    for w in distinct:
        e = unit
        for u in distinct:
            if u == w:
                continue
            shifted = z - u * unit
            e = A.mul_vec(e, shifted) / (w - u)
        resid = float(np.max(np.abs(A.mul_vec(e, e) - e)))
        if resid > 1e-6 * max(1.0, float(np.max(np.abs(e))) ** 2):
            raise RecognitionError(f"idempotent residual too large: {resid}")
        idems.append(e)
    total = sum(idems)
    if float(np.max(np.abs(total - unit))) > 1e-6:
        raise RecognitionError("idempotents do not sum to the unit")
    return idems
