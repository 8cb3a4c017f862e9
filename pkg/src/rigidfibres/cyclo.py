"""Exact arithmetic in O_n = Z[theta_n], theta_n = zeta_n + 1/zeta_n.

Elements are stored in the power basis 1, theta, ..., theta^(d-1) and are
always reduced modulo psi_n, the minimal polynomial of theta_n.  By
convention theta_1 = 2 and theta_2 = -2, so O_1 and O_2 are copies of Z.
"""

import re
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import mpmath

from . import polys
from .finite_field import GF, factor_mod


class RingMismatchError(ValueError):
    """Operands live in different rings O_n."""


@dataclass(frozen=True)
class RingSpec:
    n: int
    degree: int
    min_poly: tuple

    def element(self, coeffs):
        return RingElement.make(self, coeffs)

    def const(self, c):
        return RingElement.make(self, (c,))

    @property
    def zero(self):
        return self.const(0)

    @property
    def one(self):
        return self.const(1)

    @property
    def theta(self):
        return RingElement.make(self, (0, 1))

    def galois_indices(self):
        """Indices j (coprime to n, j < n/2) labelling the real embeddings."""
        if self.n <= 2:
            return (1,)
        return tuple(j for j in range(1, (self.n + 1) // 2) if gcd(j, self.n) == 1)


@lru_cache(maxsize=None)
def min_poly(n):
    """RingSpec for O_n, with psi_n computed exactly from the cyclotomic polynomial."""
    if n < 1:
        raise ValueError('n must be positive')
    if n == 1:
        return RingSpec(1, 1, (-2, 1))
    if n == 2:
        return RingSpec(2, 1, (2, 1))
    phi = polys.cyclotomic(n)
    d = (len(phi) - 1) // 2
    # z^-d Phi_n(z) = a_d + sum_i a_{d+i} (z^i + z^-i)
    psi = (phi[d],)
    for i in range(1, d + 1):
        psi = polys.add(psi, polys.scale(polys.dickson(i), phi[d + i]))
    return RingSpec(n, d, psi)


@dataclass(frozen=True)
class RingElement:
    spec: RingSpec
    coeffs: tuple

    @classmethod
    def make(cls, spec, coeffs):
        _, r = polys.divmod_monic(tuple(int(c) for c in coeffs), spec.min_poly)
        r = tuple(r) + (0,) * (spec.degree - len(r))
        return cls(spec, r)

    def _check(self, other):
        if isinstance(other, int):
            return self.spec.const(other)
        if not isinstance(other, RingElement):
            return NotImplemented
        if other.spec.n != self.spec.n:
            raise RingMismatchError(f'O_{self.spec.n} vs O_{other.spec.n}')
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return RingElement(self.spec, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.spec, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return RingElement.make(self.spec, polys.mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValueError('negative powers are not supported')
        out, base = self.spec.one, self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.spec.const(other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.spec.n == other.spec.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.spec.n, self.coeffs))

    def __repr__(self):
        return format_element(self)

    def is_rational(self):
        return not any(self.coeffs[1:])

    def rational_value(self):
        if not self.is_rational():
            raise ValueError(f'{self} is not rational')
        return self.coeffs[0]

    def apply(self, poly):
        """poly(self) for an integer polynomial (low-first tuple)."""
        acc = self.spec.zero
        for c in reversed(poly):
            acc = acc * self + c
        return acc

    def __str__(self):
        return format_element(self)


def ring(n):
    return min_poly(n)


def ring_arith(op, a, b=None):
    if op == 'neg':
        return -a
    if b is None:
        raise ValueError(f'{op} needs two operands')
    if a.spec.n != b.spec.n:
        raise RingMismatchError(f'O_{a.spec.n} vs O_{b.spec.n}')
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'mul':
        return a * b
    if op == 'eq':
        return a == b
    raise ValueError(f'unknown operation {op!r}')


def conjugates(a):
    """The d Galois images of a, theta -> D_j(theta) for j in galois_indices()."""
    spec = a.spec
    if spec.degree == 1:
        return (a,)
    out = []
    for j in spec.galois_indices():
        image = spec.theta.apply(polys.dickson(j))
        out.append(image.apply(a.coeffs))
    return tuple(out)


def real_roots(n, precision=30):
    """Numeric roots 2cos(2 pi j/n) of psi_n, sorted ascending, with their j."""
    spec = min_poly(n)
    with mpmath.workdps(precision + 10):
        if n <= 2:
            vals = [(mpmath.mpf(2 if n == 1 else -2), 1)]
        else:
            vals = [(2 * mpmath.cos(2 * mpmath.pi * j / n), j) for j in spec.galois_indices()]
    return sorted(vals)


def numeric_embeddings(a, precision=30):
    """Real images of a, one per root of psi_n, ordered by the root."""
    with mpmath.workdps(precision + 10):
        out = []
        for root, _ in real_roots(a.spec.n, precision):
            acc = mpmath.mpf(0)
            for c in reversed(a.coeffs):
                acc = acc * root + c
            out.append(acc)
    return out


def embed(a, n):
    """Image of a in O_n, for a in O_m with m | n (theta_m = D_{n/m}(theta_n))."""
    m = a.spec.n
    if n % m:
        raise ValueError(f'O_{m} does not embed in O_{n} via theta')
    target = min_poly(n)
    if m == n:
        return a
    image = target.theta.apply(polys.dickson(n // m))
    return image.apply(a.coeffs)


def prime_to_part(n, ell):
    while n % ell == 0:
        n //= ell
    return n


def residue_degree(p, n):
    """Residue degree of the prime p in K_n = Q(zeta_n)^+."""
    m = prime_to_part(n, p)
    if m <= 2:
        return 1
    f, x = 1, p % m
    while x not in (1, m - 1):
        x = x * p % m
        f += 1
    return f


@dataclass(frozen=True)
class ResidueData:
    ell: int
    n: int
    modulus: tuple
    theta_image: tuple
    ramification_e: int
    inertia_k: int

    @property
    def field(self):
        return GF(self.ell, self.modulus)

    def reduce(self, a):
        """phi: O_n -> F for this prime."""
        if a.spec.n != self.n:
            raise RingMismatchError(f'element of O_{a.spec.n}, prime of O_{self.n}')
        return self.field.reduce_poly(a.coeffs)

    def as_dict(self):
        return {
            'ell': self.ell,
            'n': self.n,
            'modulus': list(self.modulus),
            'theta_image': list(self.theta_image),
            'e': self.ramification_e,
            'k': self.inertia_k,
        }


@lru_cache(maxsize=None)
def residue_reduction(n, ell):
    """Primes of O_n above the odd prime ell, in canonical order."""
    if ell == 2:
        raise ValueError('ell = 2 is excluded')
    spec = min_poly(n)
    out = []
    for g, e in factor_mod(spec.min_poly, ell):
        F = GF(ell, g)
        out.append(ResidueData(ell, n, g, F.gen, e, len(g) - 1))
    return tuple(out)


_ELEMENT_RE = re.compile(r'^\s*\[\s*(-?\d+(?:\s*,\s*-?\d+)*)?\s*\]\s*@\s*(\d+)\s*$')


def parse_element(text):
    """Parse '[c0,c1,...]@n'."""
    m = _ELEMENT_RE.match(text)
    if not m:
        raise ValueError(f'malformed ring element {text!r}; expected [c0,c1,...]@n')
    n = int(m.group(2))
    if n < 1:
        raise ValueError('conductor must be positive')
    coeffs = [int(c) for c in m.group(1).split(',')] if m.group(1) else []
    return RingElement.make(min_poly(n), coeffs)


def format_element(a):
    return '[' + ','.join(str(c) for c in a.coeffs) + f']@{a.spec.n}'
