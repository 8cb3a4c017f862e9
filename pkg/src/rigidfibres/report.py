"""Pipeline driver: runs the requested stages and assembles one JSON report."""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
from sympy import primerange

from . import __version__
from .counting import congruence_check, l_polynomial, point_count
from .curves import Unsupported, family_from_triple, parse_family, specialize, ttv_polys
from .cyclo import min_poly, numeric_embeddings, parse_element
from .polys import to_str
from .triples import (from_traces, lift_traces, ordinary_candidates, reduction_plan,
                      reflection_classify, validate)

COMMANDS = ('triple', 'plan', 'curve', 'count', 'congruence', 'analyze')

SCIENCE_OK, SCIENCE_INCONCLUSIVE, SCIENCE_REFUTED = 0, 2, 3


class ConfigError(ValueError):
    """Malformed or conflicting run configuration (exit status 1)."""


@dataclass
class RunConfig:
    command: str
    traces: Optional[tuple] = None   # (x text, z text)
    traces_n: Optional[int] = None
    family: Optional[str] = None
    target: Optional[str] = None
    n: Optional[int] = None
    x0: tuple = ()
    ell: Optional[int] = None
    p: Optional[int] = None
    pmax: int = 100
    precision: int = 30
    out: Optional[str] = None
    deep: bool = False
    workers: int = 1
    strict: bool = False

    def check(self):
        if self.command not in COMMANDS:
            raise ConfigError(f'unknown command {self.command!r}')
        for name in ('n', 'ell', 'p', 'pmax', 'precision', 'workers', 'traces_n'):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ConfigError(f'{name} must be positive')
        try:
            self.x0 = tuple(Fraction(x) for x in self.x0)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f'bad x0: {exc}') from exc
        if any(x in (0, 1) for x in self.x0):
            raise ConfigError('x0 values must avoid 0 and 1')
        need = {
            'triple': ('traces',),
            'plan': ('n',),
            'curve': ('family',),
            'count': ('family', 'x0'),
            'congruence': ('family', 'target', 'ell', 'x0'),
        }.get(self.command, ())
        for name in need:
            if not getattr(self, name):
                raise ConfigError(f'{self.command} needs --{name.replace("_", "-")}')
        if self.command == 'analyze' and (self.traces is None) == (self.family is None):
            raise ConfigError('analyze needs exactly one of --traces or --family')
        if self.command == 'triple' and self.family is not None:
            raise ConfigError('triple takes --traces only')
        return self

    def echo(self):
        # workers and out are left out: they change how a run executes, not what it computes
        return {
            'command': self.command,
            'traces': list(self.traces) if self.traces else None,
            'traces_n': self.traces_n,
            'family': self.family,
            'target': self.target,
            'n': self.n,
            'x0': [str(x) for x in self.x0],
            'ell': self.ell,
            'p': self.p,
            'pmax': self.pmax,
            'precision': self.precision,
            'deep': self.deep,
            'strict': self.strict,
        }


# -- blocks ---------------------------------------------------------------------

def _ring_block(n):
    spec = min_poly(n)
    return {'n': n, 'degree': spec.degree, 'min_poly': list(spec.min_poly),
            'min_poly_text': to_str(spec.min_poly)}


def _embeddings(a, precision):
    return [mpmath.nstr(v, precision, strip_zeros=False) for v in numeric_embeddings(a, precision)]


def triple_block(triple, precision):
    kind, refl = reflection_classify(*triple.members)
    val = validate(triple)
    block = {
        'traces': [str(t) for t in triple.traces],
        'matrices': {'sigma0': triple.sigma0.rows(), 'sigma1': triple.sigma1.rows(),
                     'sigma_inf': triple.sigma_inf.rows()},
        'classes': [{'kind': c.kind, 'order': c.order} for c in triple.classes],
        'orders': list(triple.orders) if triple.orders else None,
        'n': triple.n,
        'kappa': str(triple.kappa),
        'reflection': kind,
        'dihedral': kind == 'dihedral',
        'reflection_indices': list(refl),
        'eight_divides_n': triple.eight_divides_n,
        'validation': {'passed': val.passed, 'violations': list(val.violations)},
        'numeric_embeddings': {
            'precision': precision,
            'x': _embeddings(triple.traces[0], precision),
            'z': _embeddings(triple.traces[2], precision),
        },
    }
    if triple.n is not None:
        block['ring'] = _ring_block(triple.n)
    return block


def plan_block(plan):
    return {
        'n': plan.n,
        'steps': [{'ell': s.ell, 'n_before': s.n_before, 'n_after': s.n_after,
                   'd_before': s.d_before, 'd_after': s.d_after} for s in plan.steps],
        'terminal': plan.terminal,
        'rejected_reason': plan.rejected_reason,
    }


def family_block(fam, x0s):
    block = {
        'label': fam.label,
        'kind': fam.kind,
        'r': fam.r,
        'n': fam.n,
        'genus': fam.genus,
        'hpoly': fam.describe(),
        'hpoly_coeffs': [list(c) for c in fam.hpoly],
        'expected_traces': [str(t) for t in fam.expected_traces],
        'fibres': [],
    }
    if fam.r is not None:
        g, f = ttv_polys(fam.r)
        block['ttv'] = {'g': list(g), 'f': list(f)}
    for x0 in x0s:
        c = specialize(fam, x0)
        block['fibres'].append({'x0': str(c.x0), 'poly': list(c.poly), 'model': c.describe(),
                                'genus': c.genus, 'bad_primes': list(c.bad_primes),
                                'scale': c.scale})
    return block


def _count_row(curve, p):
    L = l_polynomial(curve, p)
    counts = [point_count(curve, p, k) for k in range(1, curve.genus + 1)]
    return {'x0': str(curve.x0), 'p': p, 'genus': curve.genus, 'counts': counts,
            'L': list(L.coeffs)}


def counting_block(fam, x0s, pmax, p=None, workers=1):
    jobs = []
    for x0 in x0s:
        curve = specialize(fam, x0)
        primes = [p] if p is not None else [q for q in primerange(3, pmax + 1)
                                             if q not in curve.bad_primes]
        jobs.extend((curve, q) for q in primes)
    if workers > 1:
        # map keeps submission order, so the rows come back sorted regardless of schedule
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: _count_row(*job), jobs))
    return [_count_row(*job) for job in jobs]


def _science_flag(verdicts):
    if 'refuted' in verdicts:
        return SCIENCE_REFUTED
    if 'inconclusive' in verdicts:
        return SCIENCE_INCONCLUSIVE
    return SCIENCE_OK


# -- the driver -----------------------------------------------------------------

def _family(text):
    try:
        return parse_family(text)
    except ValueError as exc:
        raise ConfigError(f'bad family {text!r}: {exc}') from exc


def _triple_from_config(config):
    x = parse_element(config.traces[0])
    z = parse_element(config.traces[1])
    triple = from_traces(x, z)
    if config.traces_n is not None and config.traces_n != triple.n:
        raise ConfigError(f'n = {config.traces_n} given, traces classify to n = {triple.n}')
    return triple


def _analyze(config, report, stages):
    if config.family is not None:
        fam = _family(config.family)
        x, _, z = fam.expected_traces
        triple = from_traces(x, z)
    else:
        fam = None
        triple = _triple_from_config(config)
    report['triple'] = triple_block(triple, config.precision)
    stages['triple'] = 'ok'

    try:
        matched = family_from_triple(triple)
        if fam is not None and matched.label != fam.label:
            raise Unsupported(f'traces match {matched.label}, not {fam.label}')
        fam = matched
        report['triple']['family'] = fam.label
        report['family'] = family_block(fam, config.x0)
        stages['family'] = 'ok'
    except Unsupported as exc:
        report['triple']['family'] = None
        stages['family'] = f'failed: {exc}'
        fam = None

    plan = reduction_plan(triple.n)
    report['plan'] = plan_block(plan)
    stages['plan'] = 'ok' if plan.rejected_reason is None else 'rejected'

    if fam is not None and config.x0:
        report['counting'] = counting_block(fam, config.x0, config.pmax,
                                             workers=config.workers)
        stages['counting'] = 'ok'

    blocks = []
    if plan.rejected_reason is not None:
        stages['congruence'] = 'skipped: plan rejected'
    elif not plan.steps:
        stages['congruence'] = 'skipped: base case, no odd prime step'
    elif fam is None:
        stages['congruence'] = 'skipped: no explicit family'
    elif not config.x0:
        stages['congruence'] = 'skipped: no x0'
    else:
        stages['congruence'] = 'ok'
        current, traces, orders = fam, triple.traces, triple.orders
        for depth, step in enumerate(plan.steps if config.deep else plan.steps[:1]):
            lift = lift_traces(orders, traces, step.ell)
            if lift.eisenstein:
                target = 'eisenstein'
            else:
                try:
                    target = family_from_triple(lift.traces)
                except Unsupported as exc:
                    stages['congruence'] = f'failed at step {depth}: {exc}'
                    break
            for x0 in config.x0:
                rep = congruence_check(current, target, x0, step.ell, config.pmax,
                                       workers=config.workers)
                block = rep.as_dict()
                block['step'] = depth
                blocks.append(block)
            if target == 'eisenstein':
                break
            current, traces, orders = target, lift.traces, lift.orders_prime
    if blocks:
        report['congruence'] = blocks

    if config.x0:
        sel = ordinary_candidates(triple.n, config.x0)
        report['ordinary_candidates'] = {'n': triple.n, 'x0': [str(x) for x in config.x0],
                                         'selected': [str(x) for x in sel]}


def run_pipeline(config):
    """Run the stages requested by config; returns (report dict, hard_failure flag)."""
    config.check()
    report = {'tool': {'name': 'rigidfibres', 'version': __version__},
              'config': config.echo()}
    stages = {}
    cmd = config.command
    if cmd == 'triple':
        triple = _triple_from_config(config)
        report['triple'] = triple_block(triple, config.precision)
        stages['triple'] = 'ok'
        try:
            report['triple']['family'] = family_from_triple(triple).label
        except Unsupported:
            report['triple']['family'] = None
    elif cmd == 'plan':
        plan = reduction_plan(config.n)
        report['plan'] = plan_block(plan)
        stages['plan'] = 'ok' if plan.rejected_reason is None else 'rejected'
    elif cmd == 'curve':
        report['family'] = family_block(_family(config.family), config.x0)
        stages['family'] = 'ok'
    elif cmd == 'count':
        fam = _family(config.family)
        report['family'] = family_block(fam, config.x0)
        report['counting'] = counting_block(fam, config.x0, config.pmax, config.p,
                                             config.workers)
        stages['counting'] = 'ok'
    elif cmd == 'congruence':
        fam = _family(config.family)
        target = 'eisenstein' if config.target == 'eisenstein' else _family(config.target)
        report['congruence'] = [
            congruence_check(fam, target, x0, config.ell, config.pmax,
                             workers=config.workers).as_dict()
            for x0 in config.x0]
        stages['congruence'] = 'ok'
    else:
        _analyze(config, report, stages)
    verdicts = [b['verdict'] for b in report.get('congruence', [])]
    report['stages'] = stages
    report['science_flag'] = _science_flag(verdicts)
    hard = any(v.startswith('failed') for v in stages.values())
    return report, hard


def emit(report, fmt='json'):
    """Canonical bytes: sorted keys, two-space indent, ASCII, trailing newline."""
    if fmt != 'json':
        raise ValueError(f'unsupported format {fmt!r}')
    return (json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True) + '\n').encode('ascii')


_STR = {'type': 'string'}
_INT = {'type': 'integer'}
_INTS = {'type': 'array', 'items': _INT}
_NULLABLE_INT = {'type': ['integer', 'null']}

REPORT_SCHEMA = {
    '$schema': 'https://json-schema.org/draft/2020-12/schema',
    'type': 'object',
    'required': ['tool', 'config', 'stages', 'science_flag'],
    'additionalProperties': False,
    'properties': {
        'tool': {'type': 'object', 'required': ['name', 'version'],
                 'properties': {'name': _STR, 'version': _STR}},
        'config': {'type': 'object', 'required': ['command'],
                   'properties': {'command': {'enum': list(COMMANDS)}}},
        'stages': {'type': 'object', 'additionalProperties': _STR},
        'science_flag': {'enum': [SCIENCE_OK, SCIENCE_INCONCLUSIVE, SCIENCE_REFUTED]},
        'triple': {
            'type': 'object',
            'required': ['traces', 'classes', 'orders', 'n', 'kappa', 'reflection',
                         'dihedral', 'eight_divides_n', 'validation'],
            'properties': {
                'traces': {'type': 'array', 'items': _STR, 'minItems': 3, 'maxItems': 3},
                'orders': {'type': ['array', 'null'], 'items': _INT},
                'n': _NULLABLE_INT,
                'kappa': _STR,
                'reflection': {'enum': ['all_sl2', 'dihedral', 'invalid']},
                'dihedral': {'type': 'boolean'},
                'eight_divides_n': {'type': 'boolean'},
                'family': {'type': ['string', 'null']},
                'ring': {'type': 'object', 'required': ['n', 'degree', 'min_poly'],
                         'properties': {'n': _INT, 'degree': _INT, 'min_poly': _INTS}},
                'numeric_embeddings': {
                    'type': 'object',
                    'properties': {'precision': _INT,
                                   'x': {'type': 'array', 'items': _STR},
                                   'z': {'type': 'array', 'items': _STR}}},
            },
        },
        'plan': {
            'type': 'object',
            'required': ['n', 'steps', 'terminal', 'rejected_reason'],
            'properties': {
                'n': _INT,
                'terminal': {'type': 'boolean'},
                'rejected_reason': {'type': ['string', 'null']},
                'steps': {'type': 'array', 'items': {
                    'type': 'object',
                    'required': ['ell', 'n_before', 'n_after', 'd_before', 'd_after'],
                    'properties': {k: _INT for k in ('ell', 'n_before', 'n_after',
                                                     'd_before', 'd_after')}}},
            },
        },
        'family': {
            'type': 'object',
            'required': ['label', 'kind', 'n', 'genus', 'hpoly', 'fibres'],
            'properties': {
                'kind': {'enum': ['legendre', 'j1728', 'ttv-odd', 'ttv-even']},
                'fibres': {'type': 'array', 'items': {
                    'type': 'object',
                    'required': ['x0', 'poly', 'genus', 'bad_primes'],
                    'properties': {'poly': _INTS, 'bad_primes': _INTS, 'genus': _INT}}},
            },
        },
        'counting': {'type': 'array', 'items': {
            'type': 'object',
            'required': ['x0', 'p', 'genus', 'counts', 'L'],
            'properties': {'p': _INT, 'genus': _INT, 'counts': _INTS, 'L': _INTS}}},
        'congruence': {'type': 'array', 'items': {
            'type': 'object',
            'required': ['family', 'target', 'ell', 'x0', 'mode', 'residue', 'per_prime',
                         'verdict'],
            'properties': {
                'mode': {'enum': ['curve_target', 'eisenstein_target']},
                'verdict': {'enum': ['verified', 'refuted', 'inconclusive']},
                'twist': {'type': ['object', 'null']},
                'per_prime': {'type': 'array', 'items': {
                    'type': 'object', 'required': ['p', 'f', 'q', 'lhs', 'rhs', 'match'],
                    'properties': {'p': _INT, 'match': {'type': 'boolean'}}}},
            }}},
        'ordinary_candidates': {
            'type': 'object', 'required': ['n', 'x0', 'selected'],
            'properties': {'n': _INT}},
    },
}


def validate_report(report):
    import jsonschema
    jsonschema.validate(report, REPORT_SCHEMA)
