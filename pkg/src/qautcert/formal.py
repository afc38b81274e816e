"""Formal tensors: elements of M_a x M_b with coefficients attached to
noncommutative words in generator symbols.

A symbol is a hashable tuple; q-type symbols carry their own adjoint rule
(index transposition), u-type symbols are formally self-adjoint.  Products
concatenate words and multiply coefficient matrices; nothing is rewritten.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arith import Cyclotomic, Mat

__all__ = ["FormalTensor", "symbol_adjoint", "qsym", "usym"]


def qsym(s, r, i, j, k, l):
    return ("q", s, r, i, j, k, l)


def usym(s, x, y, r, v, w):
    return ("u", s, x, y, r, v, w)


def symbol_adjoint(sym):
    if sym[0] == "u":
        return sym
    if sym[0] == "q":
        _, s, r, i, j, k, l = sym
        return ("q", s, r, j, i, l, k)
    raise ValueError(f"unknown symbol kind {sym[0]!r}")


@dataclass
class FormalTensor:
    """Finitely supported map word -> Mat(a*b); the empty word is scalar."""

    a: int
    b: int
    terms: dict = field(default_factory=dict)

    @classmethod
    def from_coeff(cls, coeff: Mat, word=()) -> "FormalTensor":
        ft = cls(coeff.rows, 1)
        if not coeff.is_zero():
            ft.terms[tuple(word)] = coeff
        return ft

    @classmethod
    def zero(cls, a: int, b: int) -> "FormalTensor":
        return cls(a, b, {})

    def copy(self) -> "FormalTensor":
        return FormalTensor(self.a, self.b, dict(self.terms))

    def add_term(self, word, coeff: Mat):
        word = tuple(word)
        if word in self.terms:
            total = self.terms[word] + coeff
            if total.is_zero():
                del self.terms[word]
            else:
                self.terms[word] = total
        elif not coeff.is_zero():
            self.terms[word] = coeff

    def __add__(self, other: "FormalTensor") -> "FormalTensor":
        out = self.copy()
        for w, c in other.terms.items():
            out.add_term(w, c)
        return out

    def __sub__(self, other: "FormalTensor") -> "FormalTensor":
        return self + other.scale(-1)

    def scale(self, s) -> "FormalTensor":
        out = FormalTensor(self.a, self.b)
        for w, c in self.terms.items():
            sc = c.scale(s)
            if not sc.is_zero():
                out.terms[w] = sc
        return out

    def __matmul__(self, other: "FormalTensor") -> "FormalTensor":
        out = FormalTensor(self.a, self.b)
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out.add_term(w1 + w2, c1 @ c2)
        return out

    def adjoint(self) -> "FormalTensor":
        out = FormalTensor(self.a, self.b)
        for w, c in self.terms.items():
            out.add_term(tuple(symbol_adjoint(s) for s in reversed(w)), c.adjoint())
        return out

    def equals(self, other: "FormalTensor") -> bool:
        words = set(self.terms) | set(other.terms)
        for w in words:
            c1 = self.terms.get(w)
            c2 = other.terms.get(w)
            if c1 is None:
                if not c2.is_zero():
                    return False
            elif c2 is None:
                if not c1.is_zero():
                    return False
            elif not c1.equals(c2):
                return False
        return True

    def coefficient(self, word) -> Mat | None:
        return self.terms.get(tuple(word))

    def substitute(self, assignment: dict) -> Mat:
        """Evaluate under symbol -> Mat; words become products, each term
        coeff (x) value, summed.  Scalar (1x1) assignments collapse the
        Kronecker factor to a plain scaling."""
        k = next(iter(assignment.values())).rows if assignment else 1
        some = next(iter(self.terms.values()), None)
        backend = some.backend if some is not None else "exact"
        config = getattr(some, "config", None)
        base = some.rows if some is not None else self.a * self.b
        size = base * (1 if k == 1 else k)
        out = Mat.zeros(size, size, backend, config)
        for w, c in self.terms.items():
            val = None
            zero = False
            for sym in w:
                m = assignment[sym]
                if m.rows == 1 and m.is_zero():
                    zero = True
                    break
                val = m if val is None else val @ m
            if zero:
                continue
            if val is None:
                term = c if k == 1 else c.kron(
                    Mat.identity(k, c.backend, getattr(c, "config", None)))
            elif val.rows == 1:
                term = c.scale(val.entry(0, 0))
            else:
                term = c.kron(val)
            out = out + term
        return out

    def map_symbols(self, fn) -> "FormalTensor":
        """Apply a substitution symbol -> (scalar, symbol) to every word."""
        out = FormalTensor(self.a, self.b)
        for w, c in self.terms.items():
            scalar = Cyclotomic.one()
            new_word = []
            for sym in w:
                s, new_sym = fn(sym)
                scalar = scalar * s
                new_word.append(new_sym)
            out.add_term(tuple(new_word), c.scale(scalar))
        return out
