"""Finite fields F_p[X]/(m) with scalar and numpy-vectorized arithmetic.

Scalar elements are tuples of k residues (lowest degree first).  The
vectorized routines operate on int64 arrays of shape (N, k), or on integer
codes (base-p digits) together with discrete-log tables; they exist for point
counting, where whole fields are swept at once.
"""

from functools import lru_cache
from math import isqrt

import numpy as np
from sympy import factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_irreducible_p


def factor_mod(f, p):
    """Monic irreducible factors of the integer polynomial f mod p.

    Returns (factor, multiplicity) pairs, factors as low-first tuples,
    sorted by coefficient sequence.
    """
    dense = [int(c) % p for c in reversed(f)]
    _, factors = gf_factor(dense, p, ZZ)
    out = [(tuple(int(c) for c in reversed(g)), e) for g, e in factors]
    return sorted(out)


def is_irreducible_mod(f, p):
    return bool(gf_irreducible_p([int(c) % p for c in reversed(f)], p, ZZ))


@lru_cache(maxsize=None)
def canonical_modulus(p, k):
    """Smallest monic irreducible of degree k over F_p, by coefficient encoding."""
    if k == 1:
        return (0, 1)
    for code in range(p ** k):
        low = [(code // p ** i) % p for i in range(k)]
        if low[0] == 0:
            continue
        cand = tuple(low) + (1,)
        if is_irreducible_mod(cand, p):
            return cand
    raise RuntimeError('no irreducible polynomial found')  # unreachable


class GF:
    """The field F_p[X]/(modulus); modulus is monic, low-first, irreducible."""

    def __init__(self, p, modulus):
        if not isprime(p):
            raise ValueError(f'{p} is not prime')
        modulus = tuple(int(c) % p for c in modulus)
        if modulus[-1] != 1:
            raise ValueError('modulus must be monic')
        self.p = p
        self.modulus = modulus
        self.k = len(modulus) - 1
        self.q = p ** self.k
        self._m = np.array(modulus[:-1], dtype=np.int64)

    def __repr__(self):
        return f'GF({self.p}^{self.k})'

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    # -- scalar arithmetic -------------------------------------------------

    @property
    def zero(self):
        return (0,) * self.k

    @property
    def one(self):
        return self.from_int(1)

    @property
    def gen(self):
        """Image of X."""
        if self.k == 1:
            return ((-self.modulus[0]) % self.p,)
        return (0, 1) + (0,) * (self.k - 2)

    def from_int(self, c):
        return (c % self.p,) + (0,) * (self.k - 1)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x % self.p for x in a)

    def mul(self, a, b):
        k, p, m = self.k, self.p, self.modulus
        c = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    c[i + j] += x * y
        for i in range(2 * k - 2, k - 1, -1):
            t = c[i] % p
            if t:
                for j in range(k):
                    c[i - k + j] -= t * m[j]
        return tuple(x % p for x in c[:k])

    def pow(self, a, e):
        result, base = self.one, a
        if e < 0:
            base, e = self.inv(a), -e
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a):
        if not any(a):
            raise ZeroDivisionError('inverse of zero')
        return self.pow(a, self.q - 2)

    def reduce_poly(self, f):
        """Image of X-polynomial f (integer coefficients) in the field."""
        acc = self.zero
        g = self.gen
        for c in reversed(f):
            acc = self.add(self.mul(acc, g), self.from_int(c))
        return acc

    def eval_poly(self, f, a):
        """Evaluate f (coefficients in F_p, or field elements) at a."""
        acc = self.zero
        for c in reversed(f):
            c = self.from_int(c) if isinstance(c, int) else c
            acc = self.add(self.mul(acc, a), c)
        return acc

    def is_square(self, a):
        if not any(a):
            return True
        return self.pow(a, (self.q - 1) // 2) == self.one

    def minpoly(self, a):
        """Minimal polynomial of a over F_p, low-first tuple of residues."""
        orbit = [a]
        b = self.pow(a, self.p)
        while b != a:
            orbit.append(b)
            b = self.pow(b, self.p)
        poly = [self.one]
        for r in orbit:
            nxt = [self.zero] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i + 1] = self.add(nxt[i + 1], c)
                nxt[i] = self.sub(nxt[i], self.mul(c, r))
            poly = nxt
        return tuple(c[0] for c in poly)

    def elements(self):
        for code in range(self.q):
            yield self.decode(code)

    def encode(self, a):
        return sum(c * self.p ** i for i, c in enumerate(a))

    def decode(self, code):
        return tuple((code // self.p ** i) % self.p for i in range(self.k))

    # -- vectorized arithmetic ---------------------------------------------

    def all_elements(self):
        codes = np.arange(self.q, dtype=np.int64)
        out = np.empty((self.q, self.k), dtype=np.int64)
        for i in range(self.k):
            out[:, i] = codes % self.p
            codes //= self.p
        return out

    def vencode(self, arr):
        codes = np.zeros(arr.shape[0], dtype=np.int64)
        for i in range(self.k - 1, -1, -1):
            codes = codes * self.p + arr[:, i]
        return codes

    def vconst(self, c, n):
        out = np.zeros((n, self.k), dtype=np.int64)
        out[:, 0] = c % self.p
        return out

    def vadd(self, a, b):
        return (a + b) % self.p

    def vmul(self, a, b):
        k, p = self.k, self.p
        if k == 1:
            return (a * b) % p
        c = np.zeros((a.shape[0], 2 * k - 1), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                c[:, i + j] += a[:, i] * b[:, j]
        c %= p
        for i in range(2 * k - 2, k - 1, -1):
            t = c[:, i]
            for j in range(k):
                c[:, i - k + j] -= t * self._m[j]
            c[:, i - k:i] %= p
        return c[:, :k] % p

    def vpoly(self, f, x):
        """Evaluate the integer polynomial f at every row of x."""
        n = x.shape[0]
        acc = self.vconst(0, n)
        for c in reversed(f):
            acc = self.vmul(acc, x)
            acc[:, 0] = (acc[:, 0] + c) % self.p
        return acc

    def vdecode(self, codes):
        out = np.empty((codes.shape[0], self.k), dtype=np.int64)
        codes = codes.copy()
        for i in range(self.k):
            out[:, i] = codes % self.p
            codes //= self.p
        return out

    def primitive_element(self):
        order = self.q - 1
        exps = [order // r for r in factorint(order)]
        for code in range(1, self.q):
            a = self.decode(code)
            if all(self.pow(a, e) != self.one for e in exps):
                return a
        raise ValueError(f'no primitive element found in {self!r}')

    @lru_cache(maxsize=None)
    def log_tables(self):
        """(exp, log) over element codes for a fixed primitive element g.

        exp has length 4(q-1) + 1 with exp[i] = g^(i mod q-1) for i < 2(q-1) and 0
        beyond; log[0] = 2(q-1).  Hence exp[log[a] + log[b]] = ab for every a, b
        including zero, with no branching.
        """
        order = self.q - 1
        g = self.primitive_element()
        step = isqrt(order) + 1
        small, x = [], self.one
        for _ in range(step):
            small.append(x)
            x = self.mul(x, g)
        big, y = [], self.one
        for _ in range(-(-order // step)):
            big.append(y)
            y = self.mul(y, x)
        prod = self.vmul(np.repeat(np.array(big, dtype=np.int64), step, axis=0),
                         np.tile(np.array(small, dtype=np.int64), (len(big), 1)))
        powers = self.vencode(prod)[:order]
        exp = np.zeros(4 * order + 1, dtype=np.int64)
        exp[:order] = powers
        exp[order:2 * order] = powers
        log = np.empty(self.q, dtype=np.int64)
        log[powers] = np.arange(order, dtype=np.int64)
        log[0] = 2 * order
        return exp, log

    @lru_cache(maxsize=None)
    def square_table(self):
        """Boolean array over codes: True at nonzero squares."""
        e = self.all_elements()
        table = np.zeros(self.q, dtype=bool)
        table[self.vencode(self.vmul(e, e))] = True
        table[0] = False
        return table


@lru_cache(maxsize=None)
def field(p, k=1):
    """The canonical model of F_{p^k} used throughout the package."""
    return GF(p, canonical_modulus(p, k))


# -- polynomials over a GF, as lists of field elements (low-first) -------------

def fpoly_trim(F, a):
    a = list(a)
    while a and not any(a[-1]):
        a.pop()
    return a


def fpoly_mul(F, a, b):
    if not a or not b:
        return []
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return fpoly_trim(F, out)


def fpoly_divmod(F, a, b):
    a, b = fpoly_trim(F, a), fpoly_trim(F, b)
    if not b:
        raise ZeroDivisionError('polynomial division by zero')
    inv_lead = F.inv(b[-1])
    r = list(a)
    q = [F.zero] * max(len(a) - len(b) + 1, 0)
    for i in range(len(a) - len(b), -1, -1):
        c = F.mul(r[i + len(b) - 1], inv_lead)
        q[i] = c
        for j, y in enumerate(b):
            r[i + j] = F.sub(r[i + j], F.mul(c, y))
    return fpoly_trim(F, q), fpoly_trim(F, r[:len(b) - 1])


def fpoly_pow(F, a, e):
    out = [F.one]
    for _ in range(e):
        out = fpoly_mul(F, out, a)
    return out
