"""The explicit hyperelliptic families y^2 = h(X, t) and their rational fibres.

Families are stored as a tuple of X-coefficients, each coefficient an integer
polynomial in t (both low-first).  Supported kinds: the Legendre family, an
integral model of the elliptic family with j = 1728/(1 - t), and the odd and
even Dickson-polynomial families attached to an odd prime r.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import sympy
from sympy import factorint, isprime

from . import polys
from .cyclo import min_poly
from .triples import order_of_trace

KINDS = ('legendre', 'j1728', 'ttv-odd', 'ttv-even')


class Unsupported(ValueError):
    """An admissible triple outside the explicitly constructed families."""


class DegenerateFibre(ValueError):
    """The fibre at the requested parameter is singular or excluded."""


@lru_cache(maxsize=None)
def ttv_polys(r):
    """(g, f): g the monic char. poly of -theta_r, f(X) = X g(X^2 - 2)."""
    if r < 3 or not isprime(r):
        raise ValueError('r must be an odd prime')
    psi = min_poly(r).min_poly
    d = len(psi) - 1
    g = tuple((-1) ** (i + d) * c for i, c in enumerate(psi))
    f = polys.mul((0, 1), polys.compose(g, (-2, 0, 1)))
    return g, f


@dataclass(frozen=True)
class CurveFamily:
    kind: str
    r: Optional[int]
    hpoly: tuple
    n: int

    @property
    def label(self):
        return self.kind if self.r is None else f'{self.kind}:{self.r}'

    @property
    def ring_spec(self):
        return min_poly(self.n)

    @property
    def degree(self):
        return len(self.hpoly) - 1

    @property
    def genus(self):
        return (self.degree - 1) // 2

    @property
    def expected_traces(self):
        spec = self.ring_spec
        if self.kind == 'legendre':
            return spec.const(2), spec.const(2), spec.const(-2)
        if self.kind == 'j1728':
            return spec.const(0), spec.const(2), spec.const(-1)
        return spec.const(2), spec.const(2), spec.theta

    def at(self, t):
        """X-coefficients at the rational parameter t."""
        t = Fraction(t)
        return tuple(sum((Fraction(c) * t ** j for j, c in enumerate(ct)), Fraction(0))
                     for ct in self.hpoly)

    def to_sympy(self):
        X, t = sympy.symbols('X t')
        expr = sum(sum(c * t ** j for j, c in enumerate(ct)) * X ** i
                   for i, ct in enumerate(self.hpoly))
        return sympy.Poly(expr, X, t), X, t

    def describe(self):
        expr, X, _ = self.to_sympy()
        return str(expr.as_expr()).replace('**', '^')


def family_from_kind(kind, r=None):
    if kind == 'legendre':
        return CurveFamily('legendre', None, ((), (0, 1), (-1, -1), (1,)), 2)
    if kind == 'j1728':
        return CurveFamily('j1728', None, ((0, 0, 2), (0, -3), (), (1,)), 12)
    if kind in ('ttv-odd', 'ttv-even'):
        if r is None:
            raise ValueError(f'{kind} needs an odd prime r')
        _, f = ttv_polys(r)
        h = [(c,) if c else () for c in f]
        h[0] = (f[0] + 2, -4)
        if kind == 'ttv-even':
            return CurveFamily(kind, r, tuple(h), 2 * r)
        # (X + 2) * h
        out = [()] * (len(h) + 1)
        for i, ct in enumerate(h):
            out[i] = polys.add(out[i], polys.scale(ct, 2))
            out[i + 1] = polys.add(out[i + 1], ct)
        return CurveFamily(kind, r, tuple(out), r)
    raise ValueError(f'unsupported family kind {kind!r}')


def parse_family(text):
    """'legendre' | 'j1728' | 'ttv-odd:<r>' | 'ttv-even:<r>'."""
    text = text.strip().lower()
    if text in ('legendre', 'j1728'):
        return family_from_kind(text)
    kind, sep, r = text.partition(':')
    if sep and kind in ('ttv-odd', 'ttv-even') and r.isdigit():
        return family_from_kind(kind, int(r))
    raise ValueError(f'unknown family {text!r}; expected legendre, j1728, ttv-odd:<r> or ttv-even:<r>')


def _match(x, z):
    ox, oz = order_of_trace(x), order_of_trace(z)
    if ox == 1 and oz == 2:
        return family_from_kind('legendre')
    if ox == 4 and oz == 3:
        return family_from_kind('j1728')
    if ox == 1 and oz is not None and oz >= 3:
        if oz % 2 == 0 and isprime(oz // 2) and oz // 2 > 2:
            return family_from_kind('ttv-even', oz // 2)
        if oz % 2 == 1 and isprime(oz):
            return family_from_kind('ttv-odd', oz)
    return None


def family_from_triple(triple):
    """Family whose monodromy traces match the triple, up to the (-, +, -) twist.

    Accepts an AdmissibleTriple or a trace tuple (x, y, z).
    """
    x, y, z = getattr(triple, 'traces', triple)
    if y != 2:
        raise Unsupported('sigma1 is not unipotent')
    for s in (1, -1):
        fam = _match(s * x, s * z)
        if fam is not None:
            return fam
    raise Unsupported(f'traces ({x}, {y}, {z}) are admissible but match none of the '
                      'explicit families')


@lru_cache(maxsize=None)
def discriminant_in_t(family):
    """disc_X(h) as an integer polynomial in t (low-first)."""
    poly, X, t = family.to_sympy()
    disc = sympy.discriminant(poly.as_expr(), X)
    coeffs = sympy.Poly(disc, t).all_coeffs()
    return polys.trim(int(c) for c in reversed(coeffs))


def critical_value_form(disc):
    """(c, a, b) with disc = c t^a (t - 1)^b exactly, or None."""
    rest = polys.trim(disc)
    if not rest:
        return None
    a = b = 0
    while len(rest) > 1 and rest[0] == 0:
        rest = rest[1:]
        a += 1
    while len(rest) > 1:
        try:
            rest = polys.exact_div(rest, (-1, 1))
        except ValueError:
            break
        b += 1
    if len(rest) != 1:
        return None
    return rest[0], a, b


@dataclass(frozen=True)
class SpecializedCurve:
    family: str
    x0: Fraction
    poly: tuple
    genus: int
    bad_primes: tuple
    scale: int = 1

    @property
    def degree(self):
        return len(self.poly) - 1

    def describe(self):
        return 'y^2 = ' + polys.to_str(self.poly)


def integral_model(coeffs):
    """Monic integral model of y^2 = h(X) for monic rational h.

    Substitutes X = X'/s with the least s making every coefficient integral and
    rescales y; for odd degree s must be a square so that y stays rational.
    Returns (poly, s).
    """
    if coeffs[-1] != 1:
        raise ValueError('expected a monic polynomial')
    D = len(coeffs) - 1
    u = 1
    while True:
        s = u * u if D % 2 else u
        scaled = [c * s ** (D - i) for i, c in enumerate(coeffs)]
        if all(c.denominator == 1 for c in scaled):
            return tuple(int(c) for c in scaled), s
        u += 1


def specialize(family, x0):
    x0 = Fraction(x0)
    if x0 in (0, 1):
        raise DegenerateFibre('x0 must avoid 0 and 1')
    poly, s = integral_model(family.at(x0))
    X = sympy.symbols('X')
    disc = int(sympy.discriminant(sympy.Poly(list(reversed(poly)), X)))
    if disc == 0:
        raise DegenerateFibre(f'{family.label} at x0 = {x0}: h is not squarefree')
    bad = {2} | set(factorint(abs(disc)))
    genus = (len(poly) - 2) // 2
    return SpecializedCurve(family.label, x0, poly, genus, tuple(sorted(bad)), s)
