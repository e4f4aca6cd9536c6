"""Exact scalars, Koszul signs and normalized word bookkeeping.

Everything downstream works with linear combinations over hashable canonical
keys with ``fractions.Fraction`` coefficients.  This module provides the sign
conventions (Koszul rule on graded letters), the normal forms for symmetric
and cyclic words, the formal-weight monomials (gamma, hbar, u, the central
nu generators and a symbolic matrix size N) and the generic linear
combination container with its truncation window.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import conventions

ZERO = Fraction(0)
ONE = Fraction(1)


class MalformedPermutation(ValueError):
    pass


class WindowOverflow(RuntimeError):
    """An exact result does not fit into the requested truncation window."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {}


def koszul_sign(perm, degrees):
    """Sign of rearranging graded letters by ``perm``.

    ``perm[k]`` is the index of the input letter placed at position k, and
    ``degrees`` are the degrees of the letters in input order.  The sign is
    -1 to the number of crossed pairs of odd letters.
    """
    n = len(perm)
    if sorted(perm) != list(range(n)) or len(degrees) != n:
        raise MalformedPermutation("not a permutation of the letter indices")
    sign = 1
    for k in range(n):
        for l in range(k + 1, n):
            if perm[k] > perm[l] and degrees[perm[k]] % 2 and degrees[perm[l]] % 2:
                sign = -sign
    return Fraction(sign)


def sort_with_sign(items, key, degrees):
    """Stable-sort ``items`` by ``key`` and return (sorted, Koszul sign)."""
    order = sorted(range(len(items)), key=lambda i: key(items[i]))
    sign = koszul_sign(tuple(order), tuple(degrees))
    return [items[i] for i in order], sign


@dataclass(frozen=True, order=True)
class Letter:
    """Basis letter of a word complex.

    ``src``/``dst`` are the boundary tags (objects) of the hom space the
    underlying basis element lives in; for letters of a plain cyclic chain
    complex both tags coincide.  ``degree`` is the degree the letter carries
    inside words (for a dual letter of a basis element of degree g this is
    g + 1).
    """

    src: str
    dst: str
    name: str
    degree: int

    def __repr__(self):
        return "%s:%s->%s" % (self.name, self.src, self.dst)


def word_degree(word):
    return sum(a.degree for a in word)


def sym_normalize(word, degrees=None):
    """Normal form of a symmetric word.

    Returns ``(key, sign, is_zero)`` where ``key`` is the sorted tuple,
    ``sign`` the Koszul sign of sorting and ``is_zero`` flags a repeated odd
    letter.
    """
    word = tuple(word)
    if degrees is None:
        degrees = [a.degree for a in word]
    order = sorted(range(len(word)), key=lambda i: word[i])
    sign = koszul_sign(tuple(order), tuple(degrees))
    key = tuple(word[i] for i in order)
    for a, b in zip(key, key[1:]):
        if a == b and degrees[0] is not None and a.degree % 2:
            return key, ONE, True
    return key, sign, False


def _rotation_sign(word, r, degrees):
    """Koszul sign of rotating ``word`` left by ``r`` positions."""
    n = len(word)
    perm = tuple((i + r) % n for i in range(n))
    # perm[k] = index of input letter at position k after rotating left by r
    return koszul_sign(perm, degrees)


def cyc_normalize(word):
    """Normal form of a cyclic word: minimal rotation with Koszul sign.

    Returns ``(key, sign, is_zero)``; ``is_zero`` is set when some nontrivial
    rotation fixes the word with sign -1.
    """
    word = tuple(word)
    n = len(word)
    if n == 0:
        return word, ONE, False
    if conventions.CYCLIC_ROTATION_DEGREES == "shifted":
        degrees = tuple(a.degree for a in word)
    else:
        degrees = tuple(a.degree - 1 for a in word)
    best = None
    best_sign = ONE
    seen = {}
    zero = False
    for r in range(n):
        rot = word[r:] + word[:r]
        sign = _rotation_sign(word, r, degrees)
        if rot in seen and seen[rot] != sign:
            zero = True
        seen.setdefault(rot, sign)
        if best is None or rot < best:
            best, best_sign = rot, sign
    return best, best_sign, zero


def boundary_consistent(word):
    """Cyclic words must chain dst -> src around the loop."""
    n = len(word)
    return all(word[i].dst == word[(i + 1) % n].src for i in range(n))


@dataclass(frozen=True)
class FormalWeight:
    """Monomial in the formal variables gamma, hbar, u, nu_* and N."""

    gamma: int = 0
    hbar: int = 0
    u: int = 0
    nu: tuple = ()  # sorted tuple of (color, exponent), exponents > 0
    n: int = 0  # symbolic matrix-size exponent

    @staticmethod
    def make(gamma=0, hbar=0, u=0, nu=None, n=0):
        items = tuple(sorted((c, e) for c, e in (nu or {}).items() if e))
        if any(e < 0 for _, e in items) or gamma < 0 or hbar < 0 or u < 0:
            raise ValueError("formal-weight exponents must be non-negative")
        return FormalWeight(gamma, hbar, u, items, n)

    def nu_dict(self):
        return dict(self.nu)

    def nu_total(self):
        return sum(e for _, e in self.nu)

    def __mul__(self, other):
        nu = self.nu_dict()
        for c, e in other.nu:
            nu[c] = nu.get(c, 0) + e
        return FormalWeight.make(
            self.gamma + other.gamma,
            self.hbar + other.hbar,
            self.u + other.u,
            nu,
            self.n + other.n,
        )

    def degree(self, d):
        """Cohomological degree contributed by the monomial at odd dimension d."""
        deg = self.gamma * (6 - 2 * d) + self.hbar * (3 - d) + self.u * (-2)
        deg += self.nu_total() * conventions.NU_DEGREE
        return deg

    def times_nu(self, color, e=1):
        nu = self.nu_dict()
        nu[color] = nu.get(color, 0) + e
        return FormalWeight.make(self.gamma, self.hbar, self.u, nu, self.n)

    def substitute_n(self, value):
        """Evaluate the symbolic N-exponent at an integer, returning (weight, scalar)."""
        return (
            FormalWeight(self.gamma, self.hbar, self.u, self.nu, 0),
            Fraction(value) ** self.n,
        )


W1 = FormalWeight()


class LinComb:
    """Linear combination over hashable keys with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for k, c in terms.items() if isinstance(terms, dict) else terms:
                self.add(k, c)

    def add(self, key, coeff):
        coeff = Fraction(coeff)
        if not coeff:
            return self
        new = self.terms.get(key, ZERO) + coeff
        if new:
            self.terms[key] = new
        else:
            self.terms.pop(key, None)
        return self

    def add_all(self, other, scale=ONE):
        for k, c in other.terms.items():
            self.add(k, c * scale)
        return self

    def scale(self, factor):
        factor = Fraction(factor)
        out = LinComb()
        if factor:
            for k, c in self.terms.items():
                out.terms[k] = c * factor
        return out

    def __add__(self, other):
        return LinComb(self.terms).add_all(other)

    def __sub__(self, other):
        return LinComb(self.terms).add_all(other, -ONE)

    def __neg__(self):
        return self.scale(-ONE)

    def __eq__(self, other):
        return isinstance(other, LinComb) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items(), key=lambda kv: repr(kv[0])))

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join("(%s)*%r" % (c, k) for k, c in self)

    def map_terms(self, fn):
        """Apply ``fn(key, coeff) -> LinComb`` to every term and sum."""
        out = LinComb()
        for k, c in self.terms.items():
            out.add_all(fn(k, c))
        return out

    def coefficient(self, key):
        return self.terms.get(key, ZERO)


def degree_of(lincomb, degree_fn):
    """Common degree of all terms, 0 for the empty combination.

    Returns the integer degree or the string ``"inhomogeneous"``.
    """
    degs = {degree_fn(k) for k in lincomb.terms}
    if not degs:
        return 0
    if len(degs) > 1:
        return "inhomogeneous"
    return degs.pop()


@dataclass(frozen=True)
class Window:
    """Truncation window for word-type chains."""

    max_word_length: int = 12
    max_factors: int = 8
    max_gamma: int = 4
    max_hbar: int = 8
    max_nu: int = 8

    def admits(self, factors, weight):
        if len(factors) > self.max_factors:
            return False
        if any(len(w) > self.max_word_length for w in factors):
            return False
        return (
            weight.gamma <= self.max_gamma
            and weight.hbar <= self.max_hbar
            and weight.nu_total() <= self.max_nu
        )

    def check(self, factors, weight, context=""):
        if not self.admits(factors, weight):
            raise WindowOverflow(
                "exact result leaves the truncation window" + (": " + context if context else ""),
                {"factors": len(factors), "weight": repr(weight)},
            )


def all_permutations_sign(items, degrees):
    """Iterate over (permuted items, Koszul sign) for all permutations."""
    idx = list(range(len(items)))
    for perm in itertools.permutations(idx):
        yield [items[i] for i in perm], koszul_sign(perm, degrees)
