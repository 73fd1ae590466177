"""Canonical JSON and CSV rendering of results.

Exact values are "p/q" strings, floats are strings with 17 significant digits
under keys ending in '_float', so re-parsing and re-rendering is byte-identical.
"""

import csv
import io
import json
import logging
import os
import sys
from fractions import Fraction
from typing import Dict, Iterable, List, Optional

from exceptions import OutputFormatError
from version import get_version


_LOGGER = logging.getLogger('ell_calogero')

CSV_SCHEMA_VERSION = 2

CSV_HEADERS = {
    'coeffs': ('m', 'kappa', 'direction', 'j', 'target', 'coeff', 'coeff_float'),
    'delta1': ('m', 'kappa', 'provenance', 'd1', 'd1_float', 'pole'),
    'delta2': ('m', 'kappa', 'provenance', 'd2', 'd2_float', 'note', 'pole'),
    'energy': ('m', 'kappa', 'order', 'e_trig', 'const_shift', 'd1', 'd2', 'g', 'energy_float'),
    'weier': ('z', 'g', 'p_max', 'value_float', 'tail_bound_float', 'oracle_value_float'),
    'oracle': ('m', 'g', 'E_num', 'E_pert', 'residual', 'ratio'),
    'verify': ('suite', 'key', 'status', 'detail'),
}


def rational(value) -> str:
    return str(Fraction(value))


def real(value) -> Optional[str]:
    return None if value is None else format(float(value), '.17g')


def exact(name: str, value) -> Dict[str, Optional[str]]:
    """{name: "p/q", name_float: "..."}; None stays None."""
    if value is None:
        return {name: None, f"{name}_float": None}
    return {name: rational(value), f"{name}_float": real(value)}


def render_json(payload: Dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, separators=(',', ': ')) + '\n'


def render_csv(subcommand: str, rows: Iterable[Dict]) -> str:
    header = CSV_HEADERS.get(subcommand)
    if header is None:
        raise OutputFormatError(f"no CSV schema for '{subcommand}'")
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=header, extrasaction='ignore', lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow({key: '' if row.get(key) is None else row.get(key) for key in header})
    return buffer.getvalue()


class RecordWriter:
    """Renders one subcommand's result and delivers it to stdout or a file."""

    def __init__(self, subcommand: str, output_format: str, output: Optional[str] = None):
        if output_format not in ('json', 'csv'):
            raise OutputFormatError(f"unsupported output format '{output_format}'")
        self._subcommand = subcommand
        self._format = output_format
        self._output = output

    def envelope(self, inputs: Dict, result: Dict) -> Dict:
        return {
            'subcommand': self._subcommand,
            'version': get_version(),
            'inputs': inputs,
            'result': result,
        }

    def render(self, inputs: Dict, result: Dict, rows: List[Dict]) -> str:
        if self._format == 'json':
            return render_json(self.envelope(inputs, result))
        return render_csv(self._subcommand, rows)

    def write(self, text: str) -> None:
        if self._output is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        directory = os.path.dirname(os.path.abspath(self._output))
        os.makedirs(directory, exist_ok=True)
        with open(self._output, 'w', encoding='utf-8', newline='') as output_file:
            output_file.write(text)
        _LOGGER.info(f"wrote {self._format} output to {self._output}")
