"""Command line and YAML configuration for ell_calogero."""

import argparse
import logging
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

import yaml
from config import ConfigurationSet, config_from_dict, config_from_yaml

from algebra import QuantumNumbers
from exceptions import FailedInitialization, InvalidLabelError
from version import get_version


CONFIG_YAML = 'ell_calogero.yaml'
OUTPUT_DIR_ENV_VAR = 'ELL_CALOGERO_OUTPUT_DIR'

SUBCOMMANDS = ('coeffs', 'delta1', 'delta2', 'energy', 'weier', 'oracle', 'verify')
SUITES = ('all', 'coefficients', 'delta1', 'free', 'identities', 'norms', 'weier', 'oracle',
          'adjudication', 'spot', 'bracket')
FORMS = {
    'delta1': ('recurrence', 'closed', 'both'),
    'delta2': ('recurrence', 'closed', 'states', 'both'),
    'oracle': ('recurrence', 'closed'),
}
OUTPUT_FORMATS = ('json', 'csv')

_KAPPA_PATTERN = re.compile(r'^-?\d+(/\d+)?$')

_LOGGER = logging.getLogger('ell_calogero')

# flat option table: key -> accepted YAML types
_OPTIONS = {
    'rank': {'type': (int,)},
    'm': {'type': (str, list, int)},
    'kappa': {'type': (str, int)},
    'g': {'type': (float, int)},
    'g_list': {'type': (list,)},
    'z': {'type': (float, int)},
    'basis_size': {'type': (int,)},
    'p_max': {'type': (int,)},
    'order': {'type': (int,)},
    'form': {'type': (str,)},
    'output_format': {'type': (str,)},
    'output': {'type': (str, type(None))},
    'suite': {'type': (str,)},
    'dump': {'type': (bool,)},
    'with_oracle': {'type': (bool,)},
    'debug': {'type': (bool,)},
    'seed': {'type': (int,)},
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings for one run."""
    subcommand: str
    rank: int
    m: QuantumNumbers
    kappa: Fraction
    kappa_text: str
    g: float
    g_list: Tuple[float, ...]
    z: float
    basis_size: int
    p_max: int
    order: int
    form: str
    output_format: str
    output: Optional[str]
    suite: str
    dump: bool
    with_oracle: bool
    debug: bool
    seed: int

    def inputs(self) -> Dict:
        """Echo of the settings a subcommand actually consumed."""
        extra = {
            'coeffs': {'dump': self.dump},
            'delta1': {'form': self.form},
            'delta2': {'form': self.form},
            'energy': {'order': self.order, 'g': self.g},
            'weier': {'z': self.z, 'g': self.g, 'p_max': self.p_max, 'with_oracle': self.with_oracle},
            'oracle': {'g_list': list(self.g_list), 'basis_size': self.basis_size, 'p_max': self.p_max,
                       'form': self.form},
            'verify': {'suite': self.suite, 'seed': self.seed},
        }[self.subcommand]
        if self.subcommand in ('weier', 'verify'):
            return extra
        return {'rank': self.rank, 'm': list(self.m.m), 'kappa': self.kappa_text, **extra}


def buildYAMLExceptionString(exception, file='ell_calogero'):
    """Describe a YAML error with its file, line and column."""
    mark = getattr(exception, 'problem_mark', None) or getattr(exception, 'context_mark', None)
    problem = getattr(exception, 'problem', None) or str(exception)
    if mark is None:
        return f"YAML file error in {os.path.basename(file)}: {problem}"
    return f"YAML file error in {os.path.basename(mark.name or file)}:{mark.line + 1}, column {mark.column + 1}: {problem}"


def output_dir() -> str:
    return os.path.expanduser(os.environ.get(OUTPUT_DIR_ENV_VAR, '.'))


def log_dir() -> str:
    return os.path.join(output_dir(), 'log')


class _ArgumentParser(argparse.ArgumentParser):
    """argparse that reports usage errors as FailedInitialization instead of exiting."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise FailedInitialization(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog='ell_calogero',
                             description="Perturbative spectra of the elliptic Calogero-Sutherland model of type A_n")
    parser.add_argument('--version', action='version', version=f"%(prog)s {get_version()}")

    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument('--config', help="YAML file with option defaults")
    common.add_argument('--debug', action='store_true', help="log at DEBUG level")
    common.add_argument('--format', dest='output_format', choices=OUTPUT_FORMATS, help="output format")
    common.add_argument('--output', help=f"output file (relative paths resolve under ${OUTPUT_DIR_ENV_VAR})")

    label = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    label.add_argument('--rank', type=int, help="rank n of A_n (N = n + 1 particles)")
    label.add_argument('--m', help="quantum numbers, comma separated")
    label.add_argument('--kappa', help="coupling as an integer or 'p/q'")

    subparsers = parser.add_subparsers(dest='subcommand', required=True, parser_class=_ArgumentParser)

    coeffs = subparsers.add_parser('coeffs', parents=[common, label], argument_default=argparse.SUPPRESS,
                                   help="recurrence coefficients c, c~ and a_m")
    coeffs.add_argument('--dump', action='store_true', help="include the Jack polynomial expansion")

    delta1 = subparsers.add_parser('delta1', parents=[common, label], argument_default=argparse.SUPPRESS,
                                   help="first-order correction")
    delta1.add_argument('--form', choices=FORMS['delta1'])

    delta2 = subparsers.add_parser('delta2', parents=[common, label], argument_default=argparse.SUPPRESS,
                                   help="second-order correction (rank 1)")
    delta2.add_argument('--form', choices=FORMS['delta2'])

    energy = subparsers.add_parser('energy', parents=[common, label], argument_default=argparse.SUPPRESS,
                                   help="assembled energy expansion")
    energy.add_argument('--order', type=int, choices=(1, 2))
    energy.add_argument('--g', type=float, help="nome at which to evaluate")

    weier = subparsers.add_parser('weier', parents=[common], argument_default=argparse.SUPPRESS,
                                  help="Weierstrass P by its nome series")
    weier.add_argument('--z', type=float)
    weier.add_argument('--g', type=float)
    weier.add_argument('--p-max', dest='p_max', type=int)
    weier.add_argument('--with-oracle', dest='with_oracle', action='store_true', help="also evaluate the lattice sum")

    oracle = subparsers.add_parser('oracle', parents=[common, label], argument_default=argparse.SUPPRESS,
                                   help="rank-1 diagonalization and g^3 residual study")
    oracle.add_argument('--g-list', dest='g_list', help="comma separated nome values")
    oracle.add_argument('--basis-size', dest='basis_size', type=int)
    oracle.add_argument('--p-max', dest='p_max', type=int)
    oracle.add_argument('--form', choices=FORMS['oracle'])

    verify = subparsers.add_parser('verify', parents=[common], argument_default=argparse.SUPPRESS,
                                   help="run the cross-check suites")
    verify.add_argument('--suite', choices=SUITES)
    verify.add_argument('--seed', type=int)
    return parser


def check_unsupported(options: Dict, source: str) -> bool:
    """Every key must be a known option."""
    passed = True
    for key in options.keys():
        if key not in _OPTIONS:
            _LOGGER.error(f"'{key}' option in {source} is unsupported")
            passed = False
    return passed


def check_types(options: Dict, source: str) -> bool:
    passed = True
    for key, value in options.items():
        expected = _OPTIONS.get(key, {}).get('type')
        if expected is None:
            continue
        if isinstance(value, bool) and bool not in expected:
            _LOGGER.error(f"'{key}' in {source} should be type '{expected[0].__name__}'")
            passed = False
        elif not isinstance(value, expected):
            _LOGGER.error(f"'{key}' in {source} should be type '{expected[0].__name__}'")
            passed = False
    return passed


def _read_yaml(path: str, source: str):
    try:
        with open(path, encoding='utf-8') as yaml_file:
            content = yaml.safe_load(yaml_file) or {}
    except FileNotFoundError as e:
        raise FailedInitialization(f"configuration file '{path}' not found") from e
    except yaml.YAMLError as e:
        raise FailedInitialization(buildYAMLExceptionString(exception=e, file=path)) from e
    if not isinstance(content, dict):
        raise FailedInitialization(f"{source} must be a flat YAML mapping")
    if not (check_unsupported(content, source) and check_types(content, source)):
        raise FailedInitialization(f"one or more errors detected in {source}")
    return config_from_yaml(data=path, read_from_file=True)


def parse_kappa(value) -> Tuple[Fraction, str]:
    text = str(value).strip()
    if isinstance(value, bool) or not _KAPPA_PATTERN.match(text):
        raise FailedInitialization(f"kappa must be an integer or 'p/q', got '{value}'")
    kappa = Fraction(text)
    return kappa, str(kappa)


def parse_m(value, rank: int) -> QuantumNumbers:
    if value is None:
        return QuantumNumbers((0,) * rank)
    if isinstance(value, bool):
        raise FailedInitialization(f"quantum numbers must be integers, got {value!r}")
    if isinstance(value, int):
        entries = [value]
    elif isinstance(value, str):
        try:
            entries = [int(x) for x in value.replace(' ', '').split(',') if x != '']
        except ValueError as e:
            raise FailedInitialization(f"quantum numbers must be comma separated integers, got '{value}'") from e
    else:
        entries = list(value)
    try:
        label = QuantumNumbers(tuple(entries))
    except (InvalidLabelError, TypeError, ValueError) as e:
        raise FailedInitialization(f"invalid quantum numbers {value!r}: {e}") from e
    if label.rank != rank:
        raise FailedInitialization(f"--m {value} has {label.rank} entries but --rank is {rank}")
    return label


def _parse_g_list(value) -> Tuple[float, ...]:
    if isinstance(value, str):
        try:
            return tuple(float(x) for x in value.split(',') if x.strip())
        except ValueError as e:
            raise FailedInitialization(f"g_list must be comma separated numbers, got '{value}'") from e
    try:
        return tuple(float(x) for x in value)
    except (TypeError, ValueError) as e:
        raise FailedInitialization(f"g_list must be a list of numbers, got {value!r}") from e


def _check_nome(g: float, name: str) -> float:
    if not 0.0 <= g < 1.0:
        raise FailedInitialization(f"{name} must lie in [0, 1), got {g}")
    return g


def _resolve_output(path: Optional[str]) -> Optional[str]:
    if not path:
        return None
    path = os.path.expanduser(path)
    return path if os.path.isabs(path) else os.path.join(output_dir(), path)


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Flags override the user config file, which overrides the bundled defaults."""
    args = vars(build_parser().parse_args(argv))
    subcommand = args.pop('subcommand')
    user_file = args.pop('config', None)

    layers = [config_from_dict(args)]
    if user_file:
        layers.append(_read_yaml(os.path.expanduser(user_file), f"configuration file '{user_file}'"))
    bundled = os.path.join(os.path.dirname(os.path.abspath(__file__)), CONFIG_YAML)
    layers.append(_read_yaml(bundled, 'bundled defaults'))
    options = ConfigurationSet(*layers).as_dict()

    if not check_unsupported(options, 'configuration'):
        raise FailedInitialization("unsupported configuration options")

    rank = options.get('rank')
    if isinstance(rank, bool) or not isinstance(rank, int) or rank < 1:
        raise FailedInitialization(f"rank must be a positive integer, got {rank!r}")
    kappa, kappa_text = parse_kappa(options.get('kappa'))
    m = parse_m(options.get('m'), rank)

    g = _check_nome(float(options.get('g')), 'g')
    g_list = tuple(_check_nome(x, 'g_list entry') for x in _parse_g_list(options.get('g_list')))
    basis_size = int(options.get('basis_size'))
    if basis_size < 2:
        raise FailedInitialization(f"basis_size must be at least 2, got {basis_size}")
    p_max = int(options.get('p_max'))
    if p_max < 1:
        raise FailedInitialization(f"p_max must be at least 1, got {p_max}")

    order = int(options.get('order'))
    if order not in (1, 2):
        raise FailedInitialization(f"order must be 1 or 2, got {order}")
    form = str(options.get('form'))
    if subcommand in FORMS and form not in FORMS[subcommand]:
        raise FailedInitialization(f"form '{form}' is not valid for {subcommand}, choose from {FORMS[subcommand]}")
    output_format = str(options.get('output_format'))
    if output_format not in OUTPUT_FORMATS:
        raise FailedInitialization(f"output_format must be one of {OUTPUT_FORMATS}, got '{output_format}'")
    suite = str(options.get('suite'))
    if suite not in SUITES:
        raise FailedInitialization(f"suite must be one of {SUITES}, got '{suite}'")

    config = RunConfig(
        subcommand=subcommand,
        rank=rank,
        m=m,
        kappa=kappa,
        kappa_text=kappa_text,
        g=g,
        g_list=g_list,
        z=float(options.get('z')),
        basis_size=basis_size,
        p_max=p_max,
        order=order,
        form=form,
        output_format=output_format,
        output=_resolve_output(options.get('output')),
        suite=suite,
        dump=bool(options.get('dump', False)),
        with_oracle=bool(options.get('with_oracle', False)),
        debug=bool(options.get('debug', False)),
        seed=int(options.get('seed')),
    )
    _LOGGER.debug(f"run configuration: {config}")
    return config
