"""Exact cyclotomic scalars, a float fallback, and dense matrices over both.

Scalars come in two flavours: :class:`Cyclotomic`, an exact element of the
field Q(zeta_M) stored as the canonical residue modulo the M-th cyclotomic
polynomial, and plain ``complex`` for the float backend.  :class:`Mat` wraps
a dense matrix over either scalar kind behind one API; mixing backends in a
single operation is rejected.

Canonical form reduces modulo Phi_M rather than x^M - 1, so exact equality
of coefficient vectors decides equality of the represented complex numbers.
Mixed-order arithmetic promotes both operands to order lcm(M1, M2) through
zeta_M = zeta_L^(L/M).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "Cyclotomic",
    "Scalar",
    "FloatConfig",
    "DEFAULT_FLOAT_CONFIG",
    "Mat",
    "DimensionMismatch",
    "BackendMismatch",
    "cyclotomic_polynomial",
    "euler_phi",
    "root_of_unity",
    "sqrt_int",
    "rref_exact",
    "kernel_exact",
    "rank_exact",
    "span_rank_sparse",
]


class DimensionMismatch(ValueError):
    pass


class BackendMismatch(TypeError):
    pass


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _int_poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _int_poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # den is monic; division is exact for cyclotomic factors of x^M - 1.
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, y in enumerate(den):
                num[i + j] -= c * y
    assert all(c == 0 for c in num[: len(den) - 1])
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(M: int) -> tuple[int, ...]:
    """Coefficients of Phi_M, ascending degree, computed by exact division
    of x^M - 1 by the product of Phi_d over proper divisors d of M."""
    if M < 1:
        raise ValueError("order must be >= 1")
    if M == 1:
        return (-1, 1)
    num = [0] * M + [1]
    num[0] = -1
    den = [1]
    for d in _divisors(M)[:-1]:
        den = _int_poly_mul(den, list(cyclotomic_polynomial(d)))
    return tuple(_int_poly_divexact(num, den))


@lru_cache(maxsize=None)
def _reduction_table(M: int) -> np.ndarray:
    """Integer matrix expressing x^t mod Phi_M for 0 <= t < 2*deg - 1."""
    phi = cyclotomic_polynomial(M)
    D = len(phi) - 1
    rows = np.zeros((max(2 * D - 1, D), D), dtype=object)
    for t in range(D):
        rows[t, t] = 1
    for t in range(D, 2 * D - 1):
        # x^t = x * x^(t-1); reduce the overflow of degree D via Phi (monic).
        prev = rows[t - 1]
        shifted = np.zeros(D + 1, dtype=object)
        shifted[1:] = prev
        if shifted[D]:
            c = shifted[D]
            for j in range(D):
                shifted[j] -= c * phi[j]
        rows[t] = shifted[:D]
    return rows


@lru_cache(maxsize=None)
def _promotion_table(M: int, L: int) -> np.ndarray:
    """Integer matrix sending the basis of Q(zeta_M) into Q(zeta_L), L = k*M."""
    assert L % M == 0
    DM = euler_phi(M)
    DL = euler_phi(L)
    step = L // M
    red = _reduction_table(L)
    out = np.zeros((DM, DL), dtype=object)
    for t in range(DM):
        e = (t * step) % L
        out[t] = _power_row(L, e)
    return out


@lru_cache(maxsize=None)
def _power_row(M: int, e: int) -> tuple:
    """Coefficient row of zeta_M^e in the canonical basis."""
    D = euler_phi(M)
    e %= M
    if e < D:
        row = [0] * D
        row[e] = 1
        return tuple(row)
    # Repeated multiplication by x with reduction; M is small here.
    phi = cyclotomic_polynomial(M)
    row = [0] * D
    row[0] = 1
    for _ in range(e):
        row = [0] + row
        if row[D]:
            c = row[D]
            row = [row[j] - c * phi[j] for j in range(D)]
        else:
            row = row[:D]
    return tuple(row)


@lru_cache(maxsize=None)
def _conjugation_table(M: int) -> np.ndarray:
    """Integer matrix of complex conjugation zeta^t -> zeta^(M-t)."""
    D = euler_phi(M)
    out = np.zeros((D, D), dtype=object)
    for t in range(D):
        out[t] = _power_row(M, (M - t) % M)
    return out


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


_ZERO = Fraction(0)


class Cyclotomic:
    """An exact element of Q(zeta_M) in canonical form modulo Phi_M."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        if order < 1:
            raise ValueError("order must be >= 1")
        D = euler_phi(order)
        vec = [c if type(c) is Fraction else Fraction(c) for c in coeffs]
        if len(vec) > D:
            vec = _reduce_mod_phi(vec, order)
        vec += [_ZERO] * (D - len(vec))
        self.order = order
        self.coeffs = tuple(vec)

    @classmethod
    def _make(cls, order: int, coeffs: tuple) -> "Cyclotomic":
        """Internal fast path: coeffs already canonical Fractions of the
        right length."""
        obj = object.__new__(cls)
        obj.order = order
        obj.coeffs = coeffs
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def rational(cls, q) -> "Cyclotomic":
        return cls(1, [Fraction(q)])

    @classmethod
    def zero(cls) -> "Cyclotomic":
        return cls(1, [0])

    @classmethod
    def one(cls) -> "Cyclotomic":
        return cls(1, [1])

    # -- representation helpers -------------------------------------------
    def promoted(self, L: int) -> "Cyclotomic":
        if L == self.order:
            return self
        if L % self.order != 0:
            raise ValueError("can only promote to a multiple order")
        table = _promotion_table(self.order, L)
        DL = euler_phi(L)
        out = [_ZERO] * DL
        for t, c in enumerate(self.coeffs):
            if c:
                row = table[t]
                for j in range(DL):
                    if row[j]:
                        out[j] += c * int(row[j])
        return Cyclotomic._make(L, tuple(out))

    @staticmethod
    def _common(a: "Cyclotomic", b: "Cyclotomic"):
        L = _lcm(a.order, b.order)
        return a.promoted(L), b.promoted(L)

    @staticmethod
    def _coerce(x) -> "Cyclotomic":
        if isinstance(x, Cyclotomic):
            return x
        if isinstance(x, (int, Fraction)):
            return Cyclotomic.rational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Cyclotomic")

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if type(other) is not Cyclotomic:
            other = self._coerce(other)
        if other.order == self.order:
            return Cyclotomic._make(
                self.order, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))
        a, b = self._common(self, other)
        return Cyclotomic._make(a.order, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic._make(self.order, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if type(other) is not Cyclotomic:
            if isinstance(other, (int, Fraction)):
                return Cyclotomic._make(self.order, tuple(c * other for c in self.coeffs))
            other = self._coerce(other)
        a, b = (self, other) if other.order == self.order else self._common(self, other)
        n = len(a.coeffs)
        if n == 1:
            return Cyclotomic._make(a.order, (a.coeffs[0] * b.coeffs[0],))
        prod = [_ZERO] * (2 * n - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        out = prod[:n]
        red = _reduction_table(a.order)
        for u in range(n, 2 * n - 1):
            c = prod[u]
            if c:
                row = red[u]
                for v in range(n):
                    if row[v]:
                        out[v] += c * int(row[v])
        return Cyclotomic._make(a.order, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic")
        phi = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        inv = _poly_modular_inverse(list(self.coeffs), phi)
        return Cyclotomic(self.order, inv)

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclotomic.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "Cyclotomic":
        table = _conjugation_table(self.order)
        D = len(self.coeffs)
        out = [Fraction(0)] * D
        for t, c in enumerate(self.coeffs):
            if c:
                row = table[t]
                for j in range(D):
                    if row[j]:
                        out[j] += c * row[j]
        return Cyclotomic(self.order, out)

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational element")
        return self.coeffs[0]

    def __eq__(self, other) -> bool:
        if type(other) is Cyclotomic and other.order == self.order:
            return self.coeffs == other.coeffs
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self._common(self, other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        # Hash through a reduced representation: trailing-zero-stripped
        # coefficients do not identify equal elements across orders, so hash
        # rationals by value and everything else by a float image.
        if self.is_rational():
            return hash(self.coeffs[0])
        z = self.to_complex()
        return hash((round(z.real, 9), round(z.imag, 9)))

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.order)
        total = 0j
        for t, c in enumerate(self.coeffs):
            if c:
                total += float(c) * z**t
        return total

    def __repr__(self):
        if self.is_rational():
            return f"Cyc({self.coeffs[0]})"
        terms = [
            f"{c}*z{self.order}^{t}" for t, c in enumerate(self.coeffs) if c != 0
        ]
        return "Cyc(" + " + ".join(terms) + ")"


def _reduce_mod_phi(coeffs: list, M: int) -> list:
    phi = cyclotomic_polynomial(M)
    D = len(phi) - 1
    vec = list(coeffs)
    for i in range(len(vec) - 1, D - 1, -1):
        c = vec[i]
        if c:
            for j in range(D + 1):
                vec[i - D + j] -= c * phi[j]
    return vec[:D]


def _poly_modular_inverse(a: list, mod: list) -> list:
    """Extended Euclid in Q[x]: inverse of a modulo the monic poly mod."""

    def degree(p):
        for i in range(len(p) - 1, -1, -1):
            if p[i] != 0:
                return i
        return -1

    def trim(p):
        d = degree(p)
        return p[: d + 1] if d >= 0 else []

    def poly_divmod(num, den):
        num = list(num)
        dd = degree(den)
        lead = den[dd]
        q = [Fraction(0)] * max(len(num) - dd, 1)
        for i in range(len(num) - 1 - dd, -1, -1):
            c = num[i + dd] / lead
            q[i] = c
            if c:
                for j in range(dd + 1):
                    num[i + j] -= c * den[j]
        return trim(q), trim(num)

    r0, r1 = [Fraction(c) for c in mod], trim([Fraction(c) for c in a])
    s0, s1 = [], [Fraction(1)]
    while degree(r1) > 0:
        q, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        qs = _frac_poly_mul(q, s1)
        s_new = _frac_poly_sub(s0, qs)
        s0, s1 = s1, s_new
    if degree(r1) != 0:
        raise ZeroDivisionError("element is not invertible")
    c = r1[0]
    return [x / c for x in s1]


def _frac_poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _frac_poly_sub(a, b):
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    return out


def root_of_unity(M: int, k: int) -> Cyclotomic:
    """zeta_M^k in canonical form."""
    if M < 1:
        raise ValueError("order must be >= 1")
    return Cyclotomic(M, _power_row(M, k % M))


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


@lru_cache(maxsize=None)
def sqrt_int(n: int) -> Cyclotomic:
    """Exact square root of a positive integer, via quadratic Gauss sums.

    sqrt(2) = zeta_8 + zeta_8^-1 and, for an odd prime p, the Gauss sum
    g = sum_a (a|p) zeta_p^a equals sqrt(p) or i*sqrt(p) according to
    p mod 4; composite n factors through its squarefree part.
    """
    if n < 1:
        raise ValueError("need a positive integer")
    result = Cyclotomic.one()
    m = n
    p = 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            result = result * p
        if m % p == 0:
            m //= p
            result = result * _sqrt_prime(p)
        p += 1
    if m > 1:
        result = result * _sqrt_prime(m)
    return result


def _sqrt_prime(p: int) -> Cyclotomic:
    if p == 2:
        return root_of_unity(8, 1) + root_of_unity(8, 7)
    g = Cyclotomic.zero()
    for a in range(1, p):
        g = g + _legendre(a, p) * root_of_unity(p, a)
    if p % 4 == 1:
        return g
    # g = i*sqrt(p); divide by i = zeta_4.
    return g * root_of_unity(4, 3)


#: A scalar is either exact (Cyclotomic) or a float-backend complex number;
#: float equality always means agreement within the ambient tolerance.
Scalar = Cyclotomic | complex


@dataclass(frozen=True)
class FloatConfig:
    """Ambient tolerance for all float-backend predicates."""

    eps: float = 1e-9


DEFAULT_FLOAT_CONFIG = FloatConfig()

# Escalate int64 payloads to Python ints before products can overflow.
_INT64_GUARD = 2**31


def _as_object(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def _maybe_compact(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        try:
            m = max((abs(int(x)) for x in a.flat), default=0)
        except (TypeError, OverflowError):
            return a
        if m < _INT64_GUARD:
            return a.astype(np.int64)
    return a


class Mat:
    """Dense matrix over exact cyclotomic or complex-float scalars.

    Exact payload: integer coefficient tensor ``coef`` of shape (D, r, c)
    with a single positive integer denominator, representing
    (1/den) * sum_t coef[t] * zeta_M^t entrywise.
    """

    __slots__ = ("rows", "cols", "backend", "order", "coef", "den", "data", "config")

    def __init__(self):
        raise TypeError("use the Mat.exact/Mat.flt/Mat.zeros/... constructors")

    @classmethod
    def _new_exact(cls, rows, cols, order, coef, den) -> "Mat":
        m = object.__new__(cls)
        m.rows, m.cols = rows, cols
        m.backend = "exact"
        g = den
        m.order, m.coef, m.den = order, coef, g
        m.data, m.config = None, None
        return m

    @classmethod
    def _new_float(cls, data, config) -> "Mat":
        m = object.__new__(cls)
        m.rows, m.cols = data.shape
        m.backend = "float"
        m.order, m.coef, m.den = None, None, None
        m.data = data
        m.config = config or DEFAULT_FLOAT_CONFIG
        return m

    # -- constructors -----------------------------------------------------
    @classmethod
    def exact(cls, entries) -> "Mat":
        """Build an exact matrix from scalars (Cyclotomic, int or Fraction)."""
        vals = [[Cyclotomic._coerce(x) for x in row] for row in entries]
        r = len(vals)
        c = len(vals[0]) if r else 0
        order = 1
        for row in vals:
            for x in row:
                order = _lcm(order, x.order)
        D = euler_phi(order)
        den = 1
        promoted = [[x.promoted(order) for x in row] for row in vals]
        for row in promoted:
            for x in row:
                for q in x.coeffs:
                    den = _lcm(den, q.denominator)
        coef = np.zeros((D, r, c), dtype=object)
        for i, row in enumerate(promoted):
            for j, x in enumerate(row):
                for t, q in enumerate(x.coeffs):
                    if q:
                        coef[t, i, j] = int(q * den)
        return cls._new_exact(r, c, order, _maybe_compact(coef), den)

    @classmethod
    def flt(cls, data, config: FloatConfig | None = None) -> "Mat":
        arr = np.asarray(data, dtype=np.complex128)
        if arr.ndim != 2:
            raise DimensionMismatch("need a 2-d array")
        return cls._new_float(arr.copy(), config)

    @classmethod
    def zeros(cls, rows, cols, backend="exact", config=None) -> "Mat":
        if backend == "exact":
            return cls._new_exact(rows, cols, 1, np.zeros((1, rows, cols), dtype=np.int64), 1)
        return cls._new_float(np.zeros((rows, cols), dtype=np.complex128), config)

    @classmethod
    def identity(cls, n, backend="exact", config=None) -> "Mat":
        if backend == "exact":
            coef = np.zeros((1, n, n), dtype=np.int64)
            coef[0] = np.eye(n, dtype=np.int64)
            return cls._new_exact(n, n, 1, coef, 1)
        return cls._new_float(np.eye(n, dtype=np.complex128), config)

    @classmethod
    def scalar(cls, value, backend="exact", config=None) -> "Mat":
        if backend == "exact":
            return cls.exact([[value]])
        return cls.flt([[complex(value)]], config)

    # -- shared helpers ----------------------------------------------------
    def _check_same_backend(self, other: "Mat"):
        if self.backend != other.backend:
            raise BackendMismatch("mixed exact/float operands are rejected")

    def _promote_pair(self, other: "Mat"):
        L = _lcm(self.order, other.order)
        return self._promote_order(L), other._promote_order(L)

    def _promote_order(self, L: int) -> "Mat":
        if L == self.order:
            return self
        table = _promotion_table(self.order, L)
        DL = euler_phi(L)
        out = np.zeros((DL, self.rows, self.cols), dtype=object)
        for t in range(self.coef.shape[0]):
            block = self.coef[t]
            if not block.any():
                continue
            row = table[t]
            for j in range(DL):
                if row[j]:
                    out[j] = out[j] + block * int(row[j])
        return Mat._new_exact(self.rows, self.cols, L, _maybe_compact(out), self.den)

    def _needs_object(self, other: "Mat", inner: int) -> bool:
        if self.coef.dtype == object or other.coef.dtype == object:
            return True
        a = int(np.abs(self.coef).max(initial=0))
        b = int(np.abs(other.coef).max(initial=0))
        D = self.coef.shape[0]
        return a * b * max(inner, 1) * D >= 2**62

    # -- arithmetic ---------------------------------------------------------
    def __matmul__(self, other: "Mat") -> "Mat":
        self._check_same_backend(other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        if self.backend == "float":
            return Mat._new_float(self.data @ other.data, self.config)
        a, b = self._promote_pair(other)
        D = euler_phi(a.order)
        red = _reduction_table(a.order)
        ca, cb = a.coef, b.coef
        if a._needs_object(b, a.cols):
            ca, cb = _as_object(ca), _as_object(cb)
        prod = [None] * (2 * D - 1)
        for t1 in range(D):
            if not ca[t1].any():
                continue
            for t2 in range(D):
                if not cb[t2].any():
                    continue
                term = np.dot(ca[t1], cb[t2])
                u = t1 + t2
                prod[u] = term if prod[u] is None else prod[u] + term
        out = np.zeros((D, self.rows, other.cols), dtype=object)
        for u, term in enumerate(prod):
            if term is None:
                continue
            if u < D:
                out[u] = out[u] + term
            else:
                row = red[u]
                for v in range(D):
                    if row[v]:
                        out[v] = out[v] + term * int(row[v])
        return Mat._new_exact(self.rows, other.cols, a.order, _maybe_compact(out), a.den * b.den)

    mul = __matmul__

    def __add__(self, other: "Mat") -> "Mat":
        self._check_same_backend(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shape mismatch in add")
        if self.backend == "float":
            return Mat._new_float(self.data + other.data, self.config)
        a, b = self._promote_pair(other)
        den = _lcm(a.den, b.den)
        ca = _as_object(a.coef) * (den // a.den)
        cb = _as_object(b.coef) * (den // b.den)
        return Mat._new_exact(a.rows, a.cols, a.order, _maybe_compact(ca + cb), den)

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def __neg__(self) -> "Mat":
        if self.backend == "float":
            return Mat._new_float(-self.data, self.config)
        return Mat._new_exact(self.rows, self.cols, self.order, -self.coef, self.den)

    def scale(self, s) -> "Mat":
        """Multiply by a scalar of the matching backend."""
        if self.backend == "float":
            return Mat._new_float(self.data * complex(s), self.config)
        s = Cyclotomic._coerce(s)
        L = _lcm(self.order, s.order)
        m = self._promote_order(L)
        sv = s.promoted(L)
        # Represent s with integer coefficients over a common denominator.
        sden = 1
        for q in sv.coeffs:
            sden = _lcm(sden, q.denominator)
        ints = [int(q * sden) for q in sv.coeffs]
        D = euler_phi(L)
        red = _reduction_table(L)
        src = _as_object(m.coef)
        out = np.zeros((D, m.rows, m.cols), dtype=object)
        for t1 in range(D):
            if not src[t1].any():
                continue
            for t2, c in enumerate(ints):
                if not c:
                    continue
                u = t1 + t2
                term = src[t1] * c
                if u < D:
                    out[u] = out[u] + term
                else:
                    row = red[u]
                    for v in range(D):
                        if row[v]:
                            out[v] = out[v] + term * int(row[v])
        return Mat._new_exact(m.rows, m.cols, L, _maybe_compact(out),
                              m.den * sden)

    def kron(self, other: "Mat") -> "Mat":
        self._check_same_backend(other)
        if self.backend == "float":
            return Mat._new_float(np.kron(self.data, other.data), self.config)
        a, b = self._promote_pair(other)
        D = euler_phi(a.order)
        red = _reduction_table(a.order)
        ca, cb = a.coef, b.coef
        if a._needs_object(b, 1):
            ca, cb = _as_object(ca), _as_object(cb)
        rows, cols = a.rows * b.rows, a.cols * b.cols
        out = np.zeros((D, rows, cols), dtype=object)
        for t1 in range(D):
            if not ca[t1].any():
                continue
            for t2 in range(D):
                if not cb[t2].any():
                    continue
                term = np.kron(ca[t1], cb[t2])
                u = t1 + t2
                if u < D:
                    out[u] = out[u] + term
                else:
                    row = red[u]
                    for v in range(D):
                        if row[v]:
                            out[v] = out[v] + term * int(row[v])
        return Mat._new_exact(rows, cols, a.order, _maybe_compact(out), a.den * b.den)

    def adjoint(self) -> "Mat":
        if self.backend == "float":
            return Mat._new_float(self.data.conj().T.copy(), self.config)
        return self.conj().transpose()

    def transpose(self) -> "Mat":
        if self.backend == "float":
            return Mat._new_float(self.data.T.copy(), self.config)
        out = np.ascontiguousarray(self.coef.transpose(0, 2, 1))
        return Mat._new_exact(self.cols, self.rows, self.order, out, self.den)

    def conj(self) -> "Mat":
        if self.backend == "float":
            return Mat._new_float(self.data.conj(), self.config)
        table = _conjugation_table(self.order)
        D = euler_phi(self.order)
        src = _as_object(self.coef)
        out = np.zeros_like(src)
        for t in range(D):
            if not src[t].any():
                continue
            row = table[t]
            for v in range(D):
                if row[v]:
                    out[v] = out[v] + src[t] * int(row[v])
        return Mat._new_exact(self.rows, self.cols, self.order, _maybe_compact(out), self.den)

    # -- scalar extraction ---------------------------------------------------
    def entry(self, i: int, j: int):
        if self.backend == "float":
            return complex(self.data[i, j])
        return Cyclotomic(
            self.order, [Fraction(int(self.coef[t, i, j]), self.den) for t in range(self.coef.shape[0])]
        )

    def trace(self):
        if self.rows != self.cols:
            raise DimensionMismatch("trace of a non-square matrix")
        if self.backend == "float":
            return complex(np.trace(self.data))
        return Cyclotomic(
            self.order,
            [Fraction(int(np.trace(self.coef[t])), self.den) for t in range(self.coef.shape[0])],
        )

    def normalized_trace(self):
        t = self.trace()
        if self.backend == "float":
            return t / self.rows
        return t / Cyclotomic.rational(self.rows)

    def to_float(self, config: FloatConfig | None = None) -> "Mat":
        if self.backend == "float":
            return Mat._new_float(self.data.copy(), config or self.config)
        z = cmath.exp(2j * cmath.pi / self.order)
        acc = np.zeros((self.rows, self.cols), dtype=np.complex128)
        for t in range(self.coef.shape[0]):
            block = self.coef[t]
            if block.any():
                acc += block.astype(np.complex128) * z**t
        return Mat._new_float(acc / self.den, config)

    # -- predicates ----------------------------------------------------------
    def is_zero(self) -> bool:
        if self.backend == "float":
            return bool(np.max(np.abs(self.data), initial=0.0) <= self.config.eps)
        return not self.coef.any()

    def equals(self, other: "Mat") -> bool:
        self._check_same_backend(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        if self.backend == "float":
            return bool(np.max(np.abs(self.data - other.data), initial=0.0) <= self.config.eps)
        a, b = self._promote_pair(other)
        ca = _as_object(a.coef) * b.den
        cb = _as_object(b.coef) * a.den
        return bool((ca == cb).all())

    def residual(self, other: "Mat") -> float:
        """Max entrywise deviation; exactly 0.0 for equal exact matrices."""
        if self.backend == "exact" and other.backend == "exact":
            return 0.0 if self.equals(other) else _float_residual(self, other)
        return _float_residual(self, other)

    def is_unitary(self) -> bool:
        if self.rows != self.cols:
            return False
        return (self @ self.adjoint()).equals(Mat.identity(self.rows, self.backend, self.config))

    def is_projection(self) -> bool:
        if self.rows != self.cols:
            return False
        return (self @ self).equals(self) and self.adjoint().equals(self)

    def scalar_multiple_of_identity(self):
        """Return the scalar c with self == c*I, or None."""
        if self.rows != self.cols or self.rows == 0:
            return None
        c = self.entry(0, 0)
        ident = Mat.identity(self.rows, self.backend, self.config)
        cand = ident.scale(c)
        return c if self.equals(cand) else None

    def rank(self) -> int:
        if self.backend == "float":
            sv = np.linalg.svd(self.data, compute_uv=False)
            if sv.size == 0:
                return 0
            return int(np.sum(sv > self.config.eps * max(self.rows, self.cols) * max(sv[0], 1.0)))
        rows = [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]
        return rank_exact(rows)

    def entries(self):
        return [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def sparse_entries(self) -> dict:
        """Nonzero entries as {(i, j): scalar}; exact backend only."""
        if self.backend != "exact":
            raise BackendMismatch("sparse_entries is an exact-backend helper")
        mask = None
        for t in range(self.coef.shape[0]):
            m = self.coef[t] != 0
            mask = m if mask is None else (mask | m)
        out = {}
        if mask is None:
            return out
        for i, j in zip(*np.nonzero(mask)):
            out[(int(i), int(j))] = self.entry(int(i), int(j))
        return out

    def __repr__(self):
        return f"Mat({self.rows}x{self.cols}, {self.backend})"


def _float_residual(a: Mat, b: Mat) -> float:
    fa = a.to_float() if a.backend == "exact" else a
    fb = b.to_float() if b.backend == "exact" else b
    return float(np.max(np.abs(fa.data - fb.data), initial=0.0))


# -- exact dense linear algebra over Cyclotomic scalars ----------------------

def rref_exact(rows: list[list[Cyclotomic]]):
    """Reduced row echelon form; returns (rref_rows, pivot_columns)."""
    mat = [list(r) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(mat)):
            if not mat[i][c].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = mat[r][c].inverse()
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and not mat[i][c].is_zero():
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank_exact(rows: list[list[Cyclotomic]]) -> int:
    return len(rref_exact(rows)[0])


def kernel_exact(rows: list[list[Cyclotomic]], ncols: int):
    """Basis of the right kernel of the given row list."""
    rref, pivots = rref_exact(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Cyclotomic.zero() for _ in range(ncols)]
        vec[f] = Cyclotomic.one()
        for i, p in enumerate(pivots):
            vec[p] = -rref[i][f]
        basis.append(vec)
    return basis


def span_rank_sparse(vectors: list[dict[int, Cyclotomic]]) -> int:
    """Dimension of the span of sparse vectors {index: scalar}."""
    pivots: dict[int, dict[int, Cyclotomic]] = {}
    rank = 0
    for vec in vectors:
        cur = {k: v for k, v in vec.items() if not v.is_zero()}
        while cur:
            lead = min(cur)
            if lead in pivots:
                factor = cur[lead]
                row = pivots[lead]
                for k, v in row.items():
                    new = cur.get(k, Cyclotomic.zero()) - factor * v
                    if new.is_zero():
                        cur.pop(k, None)
                    else:
                        cur[k] = new
            else:
                inv = cur[lead].inverse()
                pivots[lead] = {k: v * inv for k, v in cur.items()}
                rank += 1
                break
    return rank
