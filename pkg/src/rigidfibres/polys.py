"""Dense integer polynomials as coefficient tuples, lowest degree first.

The zero polynomial is the empty tuple; otherwise the last entry is nonzero.
"""

from functools import lru_cache
from math import gcd

from sympy import divisors, factorint


def trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def degree(a):
    return len(trim(a)) - 1


def add(a, b):
    n = max(len(a), len(b))
    return trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def neg(a):
    return tuple(-c for c in a)


def sub(a, b):
    return add(a, neg(b))


def scale(a, c):
    return trim(c * x for x in a)


def mul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def divmod_monic(a, m):
    """Quotient and remainder of a by the monic polynomial m."""
    if not m or m[-1] != 1:
        raise ValueError('divisor must be monic')
    r = list(trim(a))
    dm = len(m) - 1
    if len(r) <= dm:
        return (), tuple(r)
    q = [0] * (len(r) - dm)
    for i in range(len(r) - 1, dm - 1, -1):
        c = r[i]
        if c:
            q[i - dm] = c
            for j in range(dm + 1):
                r[i - dm + j] -= c * m[j]
    return trim(q), trim(r[:dm])


def exact_div(a, b):
    """a / b over Z; raises if the division is not exact."""
    a, b = list(trim(a)), trim(b)
    if not b:
        raise ZeroDivisionError('polynomial division by zero')
    db, lb = len(b) - 1, b[-1]
    q = [0] * max(len(a) - db, 0)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c:
            if c % lb:
                raise ValueError('inexact polynomial division')
            c //= lb
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] -= c * b[j]
    if any(a):
        raise ValueError('inexact polynomial division')
    return trim(q)


def evaluate(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def compose(a, b):
    """a(b(X))."""
    acc = ()
    for c in reversed(a):
        acc = add(mul(acc, b), (c,))
    return acc


def content(a):
    g = 0
    for c in a:
        g = gcd(g, c)
    return g


@lru_cache(maxsize=None)
def dickson(k):
    """D_k with D_k(z + 1/z) = z^k + z^-k."""
    if k < 0:
        raise ValueError('k must be nonnegative')
    prev, cur = (2,), (0, 1)
    if k == 0:
        return prev
    for _ in range(k - 1):
        prev, cur = cur, sub(mul((0, 1), cur), prev)
    return cur


@lru_cache(maxsize=None)
def cyclotomic(n):
    """The n-th cyclotomic polynomial, by the Moebius product formula."""
    num, den = (1,), (1,)
    for d in divisors(n):
        mu = mobius(n // d)
        xd = (-1,) + (0,) * (d - 1) + (1,)
        if mu == 1:
            num = mul(num, xd)
        elif mu == -1:
            den = mul(den, xd)
    return exact_div(num, den)


def mobius(n):
    f = factorint(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def totient(n):
    out = n
    for p in factorint(n):
        out = out // p * (p - 1)
    return out


def to_str(a, var='X'):
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if not c:
            continue
        mono = '' if i == 0 else (var if i == 1 else f'{var}^{i}')
        if mono and abs(c) == 1:
            coef = ''
        else:
            coef = str(abs(c)) + ('*' if mono else '')
        sign = '-' if c < 0 else '+'
        terms.append((sign, coef + mono))
    if not terms:
        return '0'
    head = ('-' if terms[0][0] == '-' else '') + terms[0][1]
    return head + ''.join(f' {s} {t}' for s, t in terms[1:])
