"""SL2 monodromy triples over O_n: classification, normal forms, lifting mod ell,
and the induction plan over odd primes dividing n.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional

from sympy import factorint, isprime

from . import polys
from .cyclo import (RingElement, embed, format_element, min_poly, prime_to_part,
                    residue_reduction)


def field_degree(n):
    """[K_n : Q]."""
    return 1 if n <= 2 else polys.totient(n) // 2


@dataclass(frozen=True)
class Mat2:
    a: RingElement
    b: RingElement
    c: RingElement
    d: RingElement

    @classmethod
    def from_rows(cls, spec, rows):
        (a, b), (c, d) = rows
        conv = [x if isinstance(x, RingElement) else spec.const(x) for x in (a, b, c, d)]
        return cls(*conv)

    @classmethod
    def identity(cls, spec):
        return cls(spec.one, spec.zero, spec.zero, spec.one)

    @property
    def spec(self):
        return self.a.spec

    def __matmul__(self, o):
        return Mat2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                    self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def __neg__(self):
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def inverse(self):
        """Inverse of a matrix with determinant +1 or -1."""
        det = self.det()
        if det == 1:
            s = 1
        elif det == -1:
            s = -1
        else:
            raise ValueError('determinant is not a unit of the form +-1')
        return Mat2(s * self.d, -s * self.b, -s * self.c, s * self.a)

    def is_identity(self):
        return self == Mat2.identity(self.spec)

    def rows(self):
        return [[format_element(self.a), format_element(self.b)],
                [format_element(self.c), format_element(self.d)]]


@dataclass(frozen=True)
class TraceClass:
    kind: str  # identity | minus_identity | quasi_unipotent | finite_order | not_admissible
    order: Optional[int] = None


def order_of_trace(t):
    """Order of the semisimplification of an SL2 element with trace t, or None.

    Searches m >= 3 with phi(m)/2 <= [K_n : Q]; phi(m) >= sqrt(m/2) bounds the search.
    """
    if t == 2:
        return 1
    if t == -2:
        return 2
    d = t.spec.degree
    for m in range(3, 8 * d * d + 1):
        if field_degree(m) <= d and t.apply(min_poly(m).min_poly) == 0:
            return m
    return None


def trace_order(sigma):
    if sigma.det() != 1:
        raise ValueError('trace_order needs determinant 1')
    t = sigma.trace()
    if t == 2:
        return TraceClass('identity', 1) if sigma.is_identity() else TraceClass('quasi_unipotent', 1)
    if t == -2:
        if sigma == -Mat2.identity(sigma.spec):
            return TraceClass('minus_identity', 2)
        return TraceClass('quasi_unipotent', 2)
    m = order_of_trace(t)
    if m is None:
        return TraceClass('not_admissible')
    return TraceClass('finite_order', m)


def _product_is_identity(s0, s1, sinf):
    return (s0 @ s1 @ sinf).is_identity()


def is_reflection(sigma):
    return sigma.det() == -1 and sigma.trace() == 0


def reflection_classify(s0, s1, sinf):
    """('all_sl2', ()), ('dihedral', (i, j)) or ('invalid', ())."""
    if not _product_is_identity(s0, s1, sinf):
        raise ValueError('sigma0 sigma1 sigma_inf is not the identity')
    members = (s0, s1, sinf)
    dets = [m.det() for m in members]
    if all(d == 1 for d in dets):
        return 'all_sl2', ()
    refl = tuple(i for i, m in enumerate(members) if is_reflection(m))
    if len(refl) == 2 and dets[3 - sum(refl)] == 1:
        return 'dihedral', refl
    return 'invalid', ()


def irreducibility_kappa(x, y, z, F=None):
    """x^2 + y^2 + z^2 - xyz - 4; zero exactly for reducible product-one triples.

    With F (a GF) the traces are field elements and arithmetic happens in F.
    """
    if F is None:
        return x * x + y * y + z * z - x * y * z - 4
    sq = [F.mul(v, v) for v in (x, y, z)]
    out = F.add(F.add(sq[0], sq[1]), sq[2])
    out = F.sub(out, F.mul(F.mul(x, y), z))
    return F.sub(out, F.from_int(4))


@dataclass(frozen=True)
class AdmissibleTriple:
    sigma0: Mat2
    sigma1: Mat2
    sigma_inf: Mat2
    classes: tuple
    orders: Optional[tuple]
    n: Optional[int]
    kappa: RingElement
    traces: tuple

    @property
    def members(self):
        return (self.sigma0, self.sigma1, self.sigma_inf)

    @property
    def eight_divides_n(self):
        return self.n is not None and self.n % 8 == 0

    @property
    def spec(self):
        return self.sigma0.spec

    @classmethod
    def from_matrices(cls, s0, s1, sinf):
        """Classify three matrices without enforcing admissibility."""
        classes = []
        for m in (s0, s1, sinf):
            classes.append(trace_order(m) if m.det() == 1 else TraceClass('not_sl2'))
        if all(c.order is not None for c in classes):
            orders = tuple(c.order for c in classes)
            n = lcm(*orders)
        else:
            orders, n = None, None
        traces = (s0.trace(), s1.trace(), sinf.trace())
        return cls(s0, s1, sinf, tuple(classes), orders, n,
                   irreducibility_kappa(*traces), traces)


def from_traces(x, z):
    """Normal-form triple with traces (x, 2, z) and sigma1 unipotent."""
    if x.spec.n != z.spec.n:
        raise ValueError('x and z must lie in the same ring')
    if x == z:
        raise ValueError('x = z gives kappa = 0: the triple is reducible')
    spec = x.spec
    s0 = Mat2.from_rows(spec, [[x, -1], [1, 0]])
    s1 = Mat2.from_rows(spec, [[1, 0], [x - z, 1]])
    sinf = (s0 @ s1).inverse()
    triple = AdmissibleTriple.from_matrices(s0, s1, sinf)
    for j, c in enumerate(triple.classes):
        if c.kind == 'not_admissible':
            raise ValueError(f'member {j}: trace {format_element(triple.traces[j])} '
                             'is not 2cos of a rational angle in this ring')
    return triple


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    violations: tuple


def validate(triple):
    out = []
    s0, s1, sinf = triple.members
    if not _product_is_identity(s0, s1, sinf):
        out.append('(c) sigma0*sigma1*sigma_inf is not the identity')
    classes = []
    for j, m in enumerate(triple.members):
        if m.det() != 1:
            out.append(f'det of member {j} is not 1')
            classes.append(None)
            continue
        c = trace_order(m)
        classes.append(c)
        if c.kind == 'not_admissible':
            out.append(f'(a) member {j}: semisimplification is not of finite order')
    if irreducibility_kappa(*(m.trace() for m in triple.members)) == 0:
        out.append('(b) kappa = 0: the generated group is reducible')
    if all(c is not None and c.order is not None for c in classes):
        orders = tuple(c.order for c in classes)
        if triple.n != lcm(*orders):
            out.append(f'n = {triple.n} differs from lcm of orders {orders}')
        for j, (m, nj) in enumerate(zip(triple.members, orders)):
            t = m.trace()
            ok = t == 2 if nj == 1 else t == -2 if nj == 2 else t.apply(min_poly(nj).min_poly) == 0
            if not ok:
                out.append(f'trace of member {j} is not a root of psi_{nj}')
    return ValidationReport(not out, tuple(out))


# -- lifting modulo a prime above ell ----------------------------------------

@dataclass(frozen=True)
class LiftResult:
    ell: int
    orders: tuple
    orders_prime: tuple
    n: int
    n_prime: int
    traces: tuple          # lifted (x', 2, z') over O_{n'}
    twisted_traces: tuple  # the (-, +, -) alternative
    kappa: RingElement
    residue: object        # ResidueData of the ambient ring at the chosen lambda
    residue_prime: object  # ResidueData of O_{n'} below it
    residues: tuple        # common images in the residue field

    @property
    def eisenstein(self):
        return self.kappa == 0


def _candidates(nj, n_prime):
    spec = min_poly(n_prime)
    if nj == 1:
        return [spec.const(2)]
    if nj == 2:
        return [spec.const(-2)]
    base = min_poly(nj)
    return [embed(base.theta.apply(polys.dickson(c)), n_prime) for c in base.galois_indices()]


def lift_traces(orders, traces, ell):
    """Lift the mod-lambda reduction of (x, 2, z) to O_{n'}, n' the prime-to-ell part."""
    if ell == 2 or not isprime(ell):
        raise ValueError('ell must be an odd prime')
    x, y, z = traces
    if y != 2:
        raise ValueError('sigma1 must be unipotent (trace 2)')
    n = lcm(*orders)
    if n % ell:
        raise ValueError(f'ell = {ell} does not divide n = {n}')
    m = x.spec.n
    big = lcm(m, n)
    lam = residue_reduction(big, ell)[0]
    F = lam.field
    orders_prime = tuple(prime_to_part(nj, ell) for nj in orders)
    n_prime = prime_to_part(n, ell)
    images, lifted = [], []
    for nj_prime, t in zip(orders_prime, traces):
        image = lam.reduce(embed(t, big))
        images.append(image)
        hits = [c for c in _candidates(nj_prime, n_prime)
                if lam.reduce(embed(c, big)) == image]
        if not hits:
            raise ValueError(f'no conjugate of theta_{nj_prime} reduces to the trace '
                             f'{format_element(t)}')
        lifted.append(hits[0])
    theta_image = lam.reduce(embed(min_poly(n_prime).theta, big))
    lam_prime = next(r for r in residue_reduction(n_prime, ell)
                     if F.eval_poly(r.modulus, theta_image) == F.zero)
    x2, y2, z2 = lifted
    return LiftResult(ell, tuple(orders), orders_prime, n, n_prime, (x2, y2, z2),
                      (-x2, y2, -z2), irreducibility_kappa(x2, y2, z2), lam, lam_prime,
                      tuple(images))


# -- the induction over odd primes --------------------------------------------

@dataclass(frozen=True)
class PlanStep:
    ell: int
    n_before: int
    n_after: int
    d_before: int
    d_after: int


@dataclass(frozen=True)
class ReductionPlan:
    n: int
    steps: tuple = ()
    terminal: bool = False
    rejected_reason: Optional[str] = None


def reduction_plan(n):
    if n < 1:
        raise ValueError('n must be positive')
    if n % 8 == 0:
        return ReductionPlan(n, rejected_reason=f'hypothesis violated: 8 does not divide n (n = {n})')
    steps = []
    cur = n
    while field_degree(cur) > 1:
        ell = min(p for p in factorint(cur) if p != 2)
        nxt = prime_to_part(cur, ell)
        steps.append(PlanStep(ell, cur, nxt, field_degree(cur), field_degree(nxt)))
        cur = nxt
    return ReductionPlan(n, tuple(steps), True)


def ordinary_candidates(n, x0_list):
    """The x0 with n dividing the numerator of x0 - 1."""
    out = []
    for x0 in x0_list:
        x0 = Fraction(x0)
        if x0 in (0, 1):
            raise ValueError('x0 must avoid 0 and 1')
        if (x0 - 1).numerator % n == 0:
            out.append(x0)
    return out
