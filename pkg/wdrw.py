#!/usr/bin/env python3
"""
wdrw command line

    wdrw eval --prime 2 --vars 1 --len 2 "(+ (teich X1) (teich X1))"
    wdrw zeta --eps 1/4 "(V (teich X1))"
    wdrw decompose --presentation data/artin_schreier_p2.txt "(d (teich s2))"
    wdrw check dga --prime 3 --vars 2 --len 3 --samples 50

Exit codes: 0 success, 1 failed check or engine failure, 2 usage/config error.
"""
import argparse
import sys
from pathlib import Path
from typing import List, Optional

from modules.commands import COMMANDS, CommandOptions
from modules.errors import USER_ERRORS, ConfigError, WdrwError
from modules.logger import get_logger, init_logger
from modules.settings import load_settings, parse_fraction, parse_fraction_list

SUITE_NAMES = ('witt', 'dga', 'oracle', 'structure', 'rewrite', 'kernel', 'pseudoval', 'lazard', 'perfect', 'main')


def _read_file(path: Optional[str], what: str) -> Optional[str]:
    if not path:
        return None
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {what} file {path}: {exc.strerror}", {'path': path})


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--prime', type=int, help='prime p (WDRW_PRIME)')
    common.add_argument('--vars', type=int, dest='n_vars', help='number of variables n (WDRW_VARS)')
    common.add_argument('--len', type=int, dest='length', help='truncation level m (WDRW_LEN)')
    common.add_argument('--json', action='store_true', help='print the JSON document')
    common.add_argument('--eps', help='exact rational epsilon, e.g. 1/4')
    common.add_argument('--radii', help='comma separated rationals b_1,..,b_n')
    common.add_argument('--lift', help='Frobenius lift file')
    common.add_argument('--presentation', help='etale presentation file')
    common.add_argument('--max-weight', type=int, dest='max_weight', help='generator weight bound (WDRW_MAX_WEIGHT)')
    common.add_argument('--threads', type=int, help='check-suite worker threads (WDRW_THREADS)')
    common.add_argument('--samples', type=int, help='samples per check (WDRW_SAMPLES)')
    common.add_argument('--seed', type=int, help='random seed (WDRW_SEED)')

    parser = argparse.ArgumentParser(prog='wdrw', description='Witt vectors and de Rham-Witt forms over F_p[X1..Xn]')
    sub = parser.add_subparsers(dest='command', required=True)
    for name, help_text in (('eval', 'normal form of a term'),
                            ('decompose', 'structure decomposition of a term'),
                            ('zeta', 'zeta_eps of a term'),
                            ('gamma', 'gamma_eps of a degree-0 term')):
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        cmd.add_argument('term')
    lazard = sub.add_parser('lazard', parents=[common], help='t_F and v_F of a polynomial')
    lazard.add_argument('poly')
    lazard.add_argument('--estimate', action='store_true', help='also estimate the overconvergence of v_F')
    witt = sub.add_parser('witt', parents=[common], help='Witt coordinates or relative perfectness report')
    witt.add_argument('term', nargs='?')
    check = sub.add_parser('check', parents=[common], help='run a property suite')
    check.add_argument('suite', choices=SUITE_NAMES)
    check.add_argument('--csv', help='also write a CSV report to this path')
    return parser


def _options(args) -> CommandOptions:
    settings = load_settings().with_overrides(
        prime=args.prime, n_vars=args.n_vars, length=args.length, max_weight=args.max_weight,
        threads=args.threads, samples=args.samples, seed=args.seed,
    )
    return CommandOptions(
        settings=settings,
        eps=parse_fraction(args.eps) if args.eps else None,
        radii=parse_fraction_list(args.radii) if args.radii else None,
        lift_text=_read_file(args.lift, 'lift'),
        presentation_text=_read_file(args.presentation, 'presentation'),
        estimate=getattr(args, 'estimate', False),
    )


def main(argv: Optional[List[str]] = None) -> int:
    init_logger(stream=sys.stderr, default_format='text')
    logger = get_logger('cli')
    args = build_parser().parse_args(argv)
    try:
        opts = _options(args)
        target = {'lazard': 'poly', 'check': 'suite'}.get(args.command, 'term')
        result = COMMANDS[args.command](getattr(args, target), opts)
    except USER_ERRORS as exc:
        print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
        return 2
    except WdrwError as exc:
        logger.error(f"{args.command} failed", extra={'step': exc.code})
        print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
        return 1
    print(result.render(args.json))
    if args.command == 'check' and args.csv:
        Path(args.csv).write_text(result.extra['csv'])
    return 0 if result.ok else 1


if __name__ == '__main__':
    sys.exit(main())
