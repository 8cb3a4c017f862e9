"""Independent reference computations used to freeze expected values.

Nothing here imports the package under test.
"""

import cmath
import itertools
import math

import mpmath
import numpy as np


def psi_numeric(n, dps=None):
    """Rounded coefficients (low first) of prod (X - 2cos(2 pi k/n)) and the max rounding gap.

    Double precision by default; pass dps for an mpmath product (needed past n ~ 60,
    where the coefficients outgrow float accuracy).
    """
    if n <= 2:
        return [2 if n == 2 else -2, 1], 0.0
    ks = [k for k in range(1, (n + 1) // 2) if math.gcd(k, n) == 1]
    if dps is None:
        c = np.poly([2 * math.cos(2 * math.pi * k / n) for k in ks])[::-1]
        rounded = np.rint(c)
        return [int(v) for v in rounded], float(np.max(np.abs(c - rounded)))
    with mpmath.workdps(dps):
        c = [mpmath.mpf(1)]
        for k in ks:
            root = 2 * mpmath.cos(2 * mpmath.pi * k / n)
            c = [mpmath.mpf(0)] + c
            for i in range(len(c) - 1):
                c[i] -= root * c[i + 1]
        rounded = [int(mpmath.nint(v)) for v in c]
        return rounded, float(max(abs(v - r) for v, r in zip(c, rounded)))


def legendre_symbol(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def brute_count_fp(coeffs, p):
    """Projective points on y^2 = h(x) over F_p by direct enumeration of (x, y)."""
    h = [c % p for c in coeffs]
    affine = 0
    for x in range(p):
        v = 0
        for c in reversed(h):
            v = (v * x + c) % p
        affine += sum(1 for y in range(p) if (y * y - v) % p == 0)
    deg = len(h) - 1
    if deg % 2:
        return affine + 1
    return affine + (1 + legendre_symbol(h[-1], p))


def _nonresidue(p):
    return next(a for a in range(2, p) if legendre_symbol(a, p) == -1)


def brute_count_fp2(coeffs, p):
    """Same count over F_{p^2} = F_p(sqrt(r)); elements are pairs (a, b) = a + b sqrt(r)."""
    r = _nonresidue(p)

    def mul(u, v):
        return ((u[0] * v[0] + r * u[1] * v[1]) % p, (u[0] * v[1] + u[1] * v[0]) % p)

    elems = [(a, b) for a in range(p) for b in range(p)]
    square_counts = {}
    for y in elems:
        s = mul(y, y)
        square_counts[s] = square_counts.get(s, 0) + 1
    h = [c % p for c in coeffs]
    affine = 0
    for x in elems:
        v = (0, 0)
        for c in reversed(h):
            v = mul(v, x)
            v = ((v[0] + c) % p, v[1])
        affine += square_counts.get(v, 0)
    deg = len(h) - 1
    if deg % 2:
        return affine + 1
    # every element of F_p is a square in F_{p^2}
    return affine + 2


def l_from_counts_genus1(p, n1):
    a = p + 1 - n1
    return (1, -a, p)


def numeric_discriminant(coeffs):
    """lead^(2d-2) prod_{i<j} (r_i - r_j)^2 via numpy roots (coeffs low first)."""
    lead = coeffs[-1]
    d = len(coeffs) - 1
    roots = np.roots(list(reversed(coeffs)))
    prod = 1 + 0j
    for i, j in itertools.combinations(range(d), 2):
        prod *= (roots[i] - roots[j]) ** 2
    return (lead ** (2 * d - 2) * prod).real


def chebyshev_value(r, phi):
    return 2 * math.cos(r * phi)


def cyclotomic_trace(n, j=1):
    return 2 * cmath.cos(2 * math.pi * j / n).real


class TableField:
    """F_{p^k} as codes 0..q-1 (base-p digits of a residue mod a primitive
    polynomial found by search), with full addition and multiplication tables."""

    def __init__(self, p, k):
        self.p, self.k = p, k
        self.q = p ** k
        digits = np.array([[(c // p ** i) % p for i in range(k)] for c in range(self.q)])
        self.weights = p ** np.arange(k)
        self.add = np.zeros((self.q, self.q), dtype=np.int64)
        for i in range(k):
            col = digits[:, i]
            self.add += ((col[:, None] + col[None, :]) % p) * p ** i
        self.neg = (((-digits) % p) * self.weights).sum(axis=1)
        self.modulus, powers = self._primitive()
        order = self.q - 1
        log = np.zeros(self.q, dtype=np.int64)
        log[powers] = np.arange(order)
        exp = np.array(powers, dtype=np.int64)
        idx = (log[:, None] + log[None, :]) % order
        self.mul = exp[idx]
        self.mul[0, :] = 0
        self.mul[:, 0] = 0

    def _primitive(self):
        p, k = self.p, self.k
        for tail in itertools.product(range(p), repeat=k):
            if tail[0] == 0:
                continue
            modulus = list(tail) + [1]
            powers, x = [], [1] + [0] * (k - 1)
            for _ in range(self.q - 1):
                code = sum(c * p ** i for i, c in enumerate(x))
                if code == 1 and powers:
                    break
                powers.append(code)
                # multiply by X and reduce
                top = x[-1]
                x = [0] + x[:-1]
                x = [(x[i] - top * modulus[i]) % p for i in range(k)]
            if len(set(powers)) == self.q - 1:
                return tuple(modulus), powers
        raise RuntimeError('no primitive polynomial')

    def power(self, a, e):
        r = 1
        for _ in range(e):
            r = self.mul[r, a]
        return r

    def subfield(self, size):
        """Codes of the subfield with `size` elements (fixed points of x -> x^size)."""
        return [a for a in range(self.q) if self.power(a, size) == a]


def has_common_eigenvector(F, mats):
    """Brute force over every line of F^2: is some line an eigenline of all mats?

    A line through (1, a) is an eigenline of [[m00, m01], [m10, m11]] iff
    m10 + (m11 - m00) a - m01 a^2 = 0; the line through (0, 1) iff m01 = 0.
    """
    a = np.arange(F.q)
    ok = np.ones(F.q, dtype=bool)
    vertical = True
    for (m00, m01), (m10, m11) in mats:
        c1 = F.add[m11, F.neg[m00]]
        val = F.add[F.add[m10, F.mul[c1, a]], F.neg[F.mul[m01, F.mul[a, a]]]]
        ok &= val == 0
        vertical &= m01 == 0
    return bool(ok.any() or vertical)
