"""Point counts, L-polynomials, and the mod-lambda congruence test between fibres.

Frobenius data are compared at the primes of the multiplication field K_n:
for a rational prime p of residue degree f in K_n the relevant Frobenius is
the p^f-power one, whose L-polynomial is obtained from the F_p one by raising
roots to the f-th power.  Only K-linear Frobenius elements see the
real-multiplication collapse mod lambda.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Optional

import numpy as np
from sympy import Poly, isprime, legendre_symbol, primerange, sqf_list, symbols

from .curves import family_from_triple, specialize, Unsupported
from .cyclo import min_poly, residue_degree, residue_reduction
from .finite_field import GF, field as gf_field, fpoly_divmod, fpoly_mul, fpoly_pow
from .triples import from_traces, lift_traces

DEFAULT_BOUND = 10 ** 6


class CountingBoundError(ValueError):
    """The requested field is larger than the configured counting bound."""


class BadPrimeError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


def _values(F, poly):
    """Codes of poly(x) for every x in F, in code order."""
    exp, log = F.log_tables()
    # Horner over all codes at once; multiplying by x is adding logs and
    # adding an integer only touches the constant digit
    logx = log[np.arange(F.q, dtype=np.int64)]
    acc = np.zeros(F.q, dtype=np.int64)
    for c in reversed(poly):
        acc = exp[log[acc] + logx]
        low = acc % F.p
        acc += (low + c) % F.p - low
    return acc


def _chi(F, codes):
    """Quadratic character: +1 on nonzero squares (even log), -1 otherwise, 0 at 0."""
    _, log = F.log_tables()
    return np.where(codes == 0, 0, 1 - 2 * (log[codes] & 1))


@lru_cache(maxsize=4096)
def _count(poly, p, k):
    F = gf_field(p, k)
    affine = F.q + int(_chi(F, _values(F, poly)).sum())
    if len(poly) % 2 == 0:  # odd degree
        return affine + 1
    lead = F.encode(F.from_int(poly[-1]))
    return affine + 1 + int(_chi(F, np.array([lead]))[0])


def point_count(curve, p, k=1, bound=DEFAULT_BOUND):
    """Projective points of y^2 = h(X) over F_{p^k} (smooth model at infinity)."""
    if p == 2 or not isprime(p) or p in curve.bad_primes:
        raise BadPrimeError(f'p = {p} is not a good odd prime for {curve.describe()}')
    if p ** k > bound:
        raise CountingBoundError(f'{p}^{k} exceeds the counting bound {bound}')
    return _count(curve.poly, p, k)


def _power_sums(e, count):
    """Power sums s_1..s_count of roots with elementary symmetric functions e."""
    s = [len(e) - 1]
    for k in range(1, count + 1):
        v = (-1) ** (k - 1) * k * (e[k] if k < len(e) else 0)
        for i in range(1, k):
            if i < len(e):
                v += (-1) ** (i - 1) * e[i] * s[k - i]
        s.append(v)
    return s


def _elementary(s, count):
    """e_0..e_count from power sums s (s[0] unused); exact by Newton's identities."""
    e = [1]
    for k in range(1, count + 1):
        v = sum((-1) ** (i - 1) * e[k - i] * s[i] for i in range(1, k + 1))
        if v % k:
            raise ArithmeticError('power sums are not those of an integral polynomial')
        e.append(v // k)
    return e


@dataclass(frozen=True)
class LPolynomial:
    """L(T) = 1 + b_1 T + ... + b_2g T^2g for Frobenius of norm q = p^f."""
    p: int
    genus: int
    coeffs: tuple
    f: int = 1

    @property
    def q(self):
        return self.p ** self.f

    def functional_equation_ok(self):
        g, b, q = self.genus, self.coeffs, self.q
        if len(b) != 2 * g + 1 or b[0] != 1:
            return False
        return all(b[2 * g - i] == q ** (g - i) * b[i] for i in range(g + 1))

    def weil_ok(self, tol=1e-6):
        # repeated roots (e.g. supersingular cubes) ruin np.roots accuracy, so
        # split off multiplicities exactly first
        _, parts = sqf_list(Poly(list(reversed(self.coeffs)), symbols('T')))
        for part, _ in parts:
            roots = np.roots([float(c) for c in part.all_coeffs()])
            if not np.all(np.abs(np.abs(roots) * np.sqrt(self.q) - 1) < tol):
                return False
        return True

    def frobenius_power_sums(self, count):
        e = [(-1) ** i * c for i, c in enumerate(self.coeffs)]
        return _power_sums(e, count)

    def point_count(self, k=1):
        """#C(F_{q^k}) implied by L."""
        return self.q ** k + 1 - self.frobenius_power_sums(k)[k]

    def base_extend(self, f):
        """L-polynomial of the f-th power of Frobenius."""
        if f == 1:
            return self
        g = self.genus
        s = self.frobenius_power_sums(g * f)
        e = _elementary([None] + [s[k * f] for k in range(1, g + 1)], g)
        b = [(-1) ** i * c for i, c in enumerate(e)]
        q = self.q ** f
        b += [q ** (g - i) * b[i] for i in range(g - 1, -1, -1)]
        return LPolynomial(self.p, g, tuple(b), self.f * f)


def l_polynomial(curve, p, bound=DEFAULT_BOUND):
    g = curve.genus
    counts = [point_count(curve, p, k, bound) for k in range(1, g + 1)]
    s = [None] + [p ** k + 1 - n for k, n in enumerate(counts, start=1)]
    e = _elementary(s, g)
    b = [(-1) ** i * c for i, c in enumerate(e)]
    b += [p ** (g - i) * b[i] for i in range(g - 1, -1, -1)]
    return LPolynomial(p, g, tuple(b))


# -- collapse mod lambda ------------------------------------------------------

@dataclass(frozen=True)
class RMResult:
    status: str            # square_ok | fail
    traces: tuple = ()     # candidate a-bar in the residue field
    reason: str = ''

    @property
    def ok(self):
        return self.status == 'square_ok'


def rm_consistency(L, res):
    """Check L mod lambda is the e-th power collapse of one quadratic 1 - aT + qT^2.

    Returns the admissible a (residue-field elements).  For a single totally
    ramified prime this is a perfect g-th power test; for residue degree k > 1
    every a whose Frobenius orbit of quadratics, each to the e-th power,
    divides (or equals) L mod ell is accepted.
    """
    if not L.functional_equation_ok():
        return RMResult('fail', reason='functional equation violated')
    F = GF(res.ell, res.modulus) if L.genus > 1 else gf_field(res.ell, 1)
    Lbar = [F.from_int(c) for c in L.coeffs]
    qbar = F.from_int(L.q)
    if L.genus == 1:
        return RMResult('square_ok', (F.from_int(-L.coeffs[1]),))
    d = min_poly(res.n).degree
    if d != L.genus:
        return RMResult('fail', reason=f'genus {L.genus} differs from [K:Q] = {d}')
    full = res.ramification_e * res.inertia_k == L.genus
    found = []
    for a in F.elements():
        prod, b = [F.one], a
        for _ in range(res.inertia_k):
            prod = fpoly_mul(F, prod, fpoly_pow(F, [F.one, F.neg(b), qbar], res.ramification_e))
            b = F.pow(b, res.ell)
        if full:
            if prod == Lbar:
                found.append(a)
        elif not fpoly_divmod(F, Lbar, prod)[1]:
            found.append(a)
    if not found:
        return RMResult('fail', reason='L mod lambda is not a collapse of a single quadratic')
    return RMResult('square_ok', tuple(found))


# -- twist characters ---------------------------------------------------------

@dataclass(frozen=True)
class TwistCharacter:
    """p -> (d/p)^f * (p^f mod ell)^j on Frobenius of norm p^f; j in {0, 1}."""
    d: int
    cyclotomic: int = 0

    def value(self, p, f, ell):
        v = int(legendre_symbol(self.d % p, p)) ** f
        if self.cyclotomic:
            w = pow(p, f, ell)
            if w not in (1, ell - 1):
                return None
            v *= 1 if w == 1 else -1
        return v

    def modulus(self, ell):
        m = abs(self.d) if self.d % 4 == 1 else 4 * abs(self.d)
        return m * ell if self.cyclotomic else m

    def as_dict(self, ell):
        return {'d': self.d, 'cyclotomic_power': self.cyclotomic, 'modulus': self.modulus(ell)}


def twist_candidates(primes, with_cyclotomic):
    """Quadratic characters with d a signed squarefree product of the given primes."""
    primes = sorted(set(primes))
    ds = []
    for k in range(len(primes) + 1):
        for sub in combinations(primes, k):
            m = 1
            for q in sub:
                m *= q
            ds.extend((m, -m))
    ds.sort(key=lambda d: (abs(d), d < 0))
    out = [TwistCharacter(d) for d in ds]
    if with_cyclotomic:
        out += [TwistCharacter(d, 1) for d in ds]
    return out


# -- the congruence check -----------------------------------------------------

@dataclass(frozen=True)
class PrimeData:
    p: int
    f: int
    q: int
    lhs: tuple               # candidate a-bar for the source fibre
    rhs: Optional[tuple]     # candidate a-bar for the target fibre (curve mode)
    lhs_L: tuple
    rhs_L: Optional[tuple]


@dataclass(frozen=True)
class CongruenceReport:
    family: str
    target: str
    ell: int
    x0: object
    pmax: int
    mode: str
    residue: dict
    lifted_traces: tuple
    twist: Optional[dict]
    per_prime: tuple
    verdict: str
    skipped_primes: tuple = field(default=())

    def as_dict(self):
        return {
            'family': self.family,
            'target': self.target,
            'ell': self.ell,
            'x0': str(self.x0),
            'pmax': self.pmax,
            'mode': self.mode,
            'residue': self.residue,
            'lifted_traces': list(self.lifted_traces),
            'twist': self.twist,
            'per_prime': [dict(r) for r in self.per_prime],
            'skipped_primes': list(self.skipped_primes),
            'verdict': self.verdict,
        }


def _residue_for(family, ell, fallback=None):
    if family.genus == 1:
        return residue_reduction(1, ell)[0]
    if fallback is not None:
        return fallback
    return residue_reduction(family.n, ell)[0]


def _prime_data(p, curve_a, res_a, n_a, curve_b, res_b, bound):
    La = l_polynomial(curve_a, p, bound)
    f = residue_degree(p, n_a) if curve_a.genus > 1 else 1
    La_f = La.base_extend(f)
    rm_a = rm_consistency(La_f, res_a)
    rhs = rhs_L = None
    if curve_b is not None:
        Lb_f = l_polynomial(curve_b, p, bound).base_extend(f)
        rm_b = rm_consistency(Lb_f, res_b)
        rhs, rhs_L = rm_b.traces, Lb_f.coeffs
    return PrimeData(p, f, p ** f, rm_a.traces, rhs, La_f.coeffs, rhs_L)


def _curve_match(F, row, sign):
    for a in row.lhs:
        for b in row.rhs:
            b = b if sign == 1 else F.neg(b)
            if F.minpoly(a) == F.minpoly(b):
                return True
    return False


def _eis_match(F, row, s1, s2, ell):
    if s1 * s2 != 1:
        return False
    target = F.from_int(s1 + s2 * row.q)
    return any(a == target for a in row.lhs)


def congruence_check(family_a, target, x0, ell, pmax, workers=1, bound=DEFAULT_BOUND,
                     target_x0=None):
    """Compare Frobenius traces of the x0-fibre of family_a mod lambda with the
    lifted target (a curve family, or 'eisenstein'), up to a quadratic twist.

    target_x0 overrides the target fibre; it exists for negative controls.
    """
    if ell == 2 or not isprime(ell):
        raise PreconditionError('ell must be an odd prime')
    n = family_a.n
    if n % ell:
        raise PreconditionError(f'ell = {ell} does not divide n = {n}')
    x, _, z = family_a.expected_traces
    triple = from_traces(x, z)
    lift = lift_traces(triple.orders, triple.traces, ell)
    if target == 'eisenstein':
        if not lift.eisenstein:
            raise PreconditionError('lifted triple is irreducible; use a curve target')
        family_b, mode = None, 'eisenstein_target'
    else:
        if lift.eisenstein:
            raise PreconditionError('lifted triple is reducible; use the eisenstein target')
        try:
            expected = family_from_triple(lift.traces)
        except Unsupported as exc:
            raise PreconditionError(f'lifted triple has no explicit family: {exc}') from exc
        if expected.label != target.label:
            raise PreconditionError(f'lift at ell = {ell} gives {expected.label}, not {target.label}')
        family_b, mode = target, 'curve_target'

    curve_a = specialize(family_a, x0)
    curve_b = specialize(family_b, x0 if target_x0 is None else target_x0) if family_b is not None else None
    res_a = _residue_for(family_a, ell)
    res_b = _residue_for(family_b, ell, lift.residue_prime) if family_b is not None else None

    bad = set(curve_a.bad_primes) | (set(curve_b.bad_primes) if curve_b else set())
    candidates_p = [p for p in primerange(3, pmax + 1)]
    good = [p for p in candidates_p if p != ell and p not in bad]
    skipped = [p for p in candidates_p if p not in good]
    if not good:
        raise PreconditionError('no good primes below pmax')

    job = lambda p: _prime_data(p, curve_a, res_a, n, curve_b, res_b, bound)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, good))
    else:
        rows = [job(p) for p in good]

    F = GF(res_a.ell, res_a.modulus) if family_a.genus > 1 else gf_field(ell, 1)
    with_cyc = all(pow(r.p, r.f, ell) in (1, ell - 1) for r in rows)
    chars = twist_candidates(bad | {2, ell}, with_cyc)

    def values(ch):
        return [ch.value(r.p, r.f, ell) for r in rows]

    found = None
    if mode == 'curve_target':
        for ch in chars:
            vals = values(ch)
            if all(v is not None and _curve_match(F, r, v) for r, v in zip(rows, vals)):
                found = (ch,)
                break
        matchable = [any(_curve_match(F, r, s) for s in (1, -1)) for r in rows]
    else:
        for c1 in chars:
            v1 = values(c1)
            for c2 in chars:
                v2 = values(c2)
                if all(a is not None and b is not None and _eis_match(F, r, a, b, ell)
                       for r, a, b in zip(rows, v1, v2)):
                    found = (c1, c2)
                    break
            if found:
                break
        matchable = [any(_eis_match(F, r, s1, s2, ell) for s1 in (1, -1) for s2 in (1, -1))
                     for r in rows]

    if found:
        verdict = 'verified'
    elif not all(matchable):
        verdict = 'refuted'
    else:
        verdict = 'inconclusive'

    per_prime = []
    for i, r in enumerate(rows):
        row = {'p': r.p, 'f': r.f, 'q': r.q, 'L': list(r.lhs_L),
               'lhs': {'a': [list(a) for a in r.lhs], 'norm': r.q % ell}}
        if mode == 'curve_target':
            row['rhs'] = {'a': [list(b) for b in r.rhs], 'L': list(r.rhs_L)}
        else:
            row['rhs'] = {}
        if found:
            vals = [ch.value(r.p, r.f, ell) for ch in found]
            row['rhs']['twist_values'] = vals
            row['match'] = True
        else:
            row['match'] = matchable[i]
        per_prime.append(row)

    twist = None
    if found:
        twist = {'characters': [ch.as_dict(ell) for ch in found]}
    return CongruenceReport(
        family=family_a.label,
        target='eisenstein' if family_b is None else family_b.label,
        ell=ell, x0=curve_a.x0, pmax=pmax, mode=mode,
        residue=res_a.as_dict(),
        lifted_traces=tuple(str(t) for t in lift.traces),
        twist=twist, per_prime=tuple(per_prime), verdict=verdict,
        skipped_primes=tuple(skipped))
