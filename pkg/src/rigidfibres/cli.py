"""Command line entry point: ``rigidfibres <command> [options]``."""

import argparse
import sys

from .counting import CountingBoundError
from .report import COMMANDS, ConfigError, RunConfig, emit, run_pipeline

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_SCIENCE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f'{self.prog}: error: {message}\n')
        sys.exit(EXIT_USAGE)


def _traces(tokens):
    """x=<elt> z=<elt> [n=<n>] -> (x, z, n)."""
    items = {}
    for tok in ' '.join(tokens).split():
        key, sep, val = tok.partition('=')
        if not sep or key not in ('x', 'z', 'n'):
            raise ConfigError(f'bad traces token {tok!r}; expected x=<elt> z=<elt> [n=<n>]')
        items[key] = val
    if 'x' not in items or 'z' not in items:
        raise ConfigError('traces need both x= and z=')
    n = int(items['n']) if 'n' in items else None
    return items['x'], items['z'], n


def build_parser():
    parser = _Parser(prog='rigidfibres',
                     description='Admissible SL2 triples, their curve families, and '
                                 'mod-ell Frobenius congruences.')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument('--traces', nargs='+', metavar='KEY=VAL',
                       help='x=[c0,...]@n z=[c0,...]@n [n=<n>]')
        p.add_argument('--family', help='legendre | j1728 | ttv-odd:<r> | ttv-even:<r>')
        p.add_argument('--target', help='target family or "eisenstein"')
        p.add_argument('--n', type=int)
        p.add_argument('--x0', action='append', default=[], help='rational p/q; repeatable')
        p.add_argument('--ell', type=int)
        p.add_argument('--p', type=int)
        p.add_argument('--pmax', type=int, default=100)
        p.add_argument('--precision', type=int, default=30)
        p.add_argument('--workers', type=int, default=1)
        p.add_argument('--deep', action='store_true', help='run every reduction step')
        p.add_argument('--strict', action='store_true',
                       help='non-verified congruence verdicts give exit status 3')
        p.add_argument('--out', help='output path (default stdout)')
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        traces = traces_n = None
        if args.traces:
            x, z, traces_n = _traces(args.traces)
            traces = (x, z)
        config = RunConfig(command=args.command, traces=traces, traces_n=traces_n,
                           family=args.family, target=args.target, n=args.n,
                           x0=tuple(args.x0), ell=args.ell, p=args.p, pmax=args.pmax,
                           precision=args.precision, out=args.out, deep=args.deep,
                           workers=args.workers, strict=args.strict)
        report, hard = run_pipeline(config)
    except ConfigError as exc:
        sys.stderr.write(f'rigidfibres: config error: {exc}\n')
        return EXIT_USAGE
    except (ValueError, ArithmeticError, CountingBoundError) as exc:
        sys.stderr.write(f'rigidfibres: computation error: {exc}\n')
        return EXIT_COMPUTE
    data = emit(report)
    if args.out:
        with open(args.out, 'wb') as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
    if hard:
        return EXIT_COMPUTE
    if args.strict and report['science_flag']:
        return EXIT_SCIENCE
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
