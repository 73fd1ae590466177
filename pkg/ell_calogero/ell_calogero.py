"""Perturbative energy spectra of the elliptic Calogero-Sutherland model of type A_n."""

import logging
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import logfiles
from readconfig import RunConfig, parse_config, log_dir
from records import RecordWriter, exact, real
from jack import a_coefficient, jack_polynomial, mu_vector, quantum_to_partition, recurrence_table
from elliptic import WeierstrassParams, weier_p_lattice, weier_p_series
from perturbation import (A1_CLOSED, A1_CLOSED_AS_PRINTED, A1_RECURRENCE, A1_SUM_OVER_STATES, A2_CLOSED, A3_AXIS,
                          A3_CLOSED, GENERIC_RECURRENCE, delta1_a3_special, delta1_closed, delta1_generic,
                          delta2_a1_closed, delta2_a1_recurrence, energy_expansion)
from oracle import delta2_a1_states, g3_scaling_study
from verify import FAIL, VerifyManager, summarize

from exceptions import (FailedInitialization, InvalidLabelError, PoleError, SeriesTruncationError, TruncationError,
                        OutputFormatError, ConvergenceError, InternalError, VerificationFailure)


_LOGGER = logging.getLogger('ell_calogero')

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

AS_PRINTED_NOTE = "as-printed; inconsistent with the recurrence form, see verify --suite adjudication"

CLOSED_DELTA1 = {1: A1_CLOSED, 2: A2_CLOSED, 3: A3_CLOSED}

Output = Tuple[Dict, List[Dict]]


class EllCalogero():
    """Runs one subcommand and turns failures into exit codes."""

    def __init__(self, config: RunConfig):
        self._config = config
        self._writer = RecordWriter(config.subcommand, config.output_format, config.output)

    def run(self) -> int:
        """Dispatch, render and write; returns the process exit code."""
        config = self._config
        _LOGGER.info(f"ell_calogero {config.subcommand} starting")
        try:
            handler = getattr(self, f"_{config.subcommand}")
            result, rows = handler()
            self._writer.write(self._writer.render(config.inputs(), result, rows))
            if config.subcommand == 'verify' and result['summary'][FAIL]:
                raise VerificationFailure(f"{result['summary'][FAIL]} verify check(s) failed")
        except VerificationFailure as e:
            _LOGGER.error(f"{e}")
            return EXIT_VERIFY_FAILED
        except PoleError as e:
            _LOGGER.error(f"pole: {e} (factor {e.factor})")
            return EXIT_USAGE
        except (FailedInitialization, InvalidLabelError, SeriesTruncationError, TruncationError, OutputFormatError) as e:
            _LOGGER.error(f"{type(e).__name__}: {e}")
            return EXIT_USAGE
        except (ConvergenceError, InternalError) as e:
            _LOGGER.error(f"{type(e).__name__}: {e}")
            return EXIT_NUMERIC
        except Exception as e:
            _LOGGER.error(f"Unexpected exception caught: {e}")
            return EXIT_NUMERIC
        _LOGGER.info(f"ell_calogero {config.subcommand} finished")
        return EXIT_OK

    def _base(self) -> Dict:
        config = self._config
        return {'rank': config.rank, 'm': str(config.m), 'kappa': config.kappa_text}

    def _coeffs(self) -> Output:
        config = self._config
        table = recurrence_table(config.m, config.kappa, config.rank)
        entries = []
        for direction, pairs, sign in (('up', table.up, 1), ('down', table.down, -1)):
            for j, coeff in pairs:
                target = config.m.shifted(tuple(sign * x for x in mu_vector(j, config.rank)))
                entries.append({'direction': direction, 'j': j, 'target': None if target is None else str(target),
                                **exact('coeff', coeff)})

        result = {**self._base(), 'provenance': GENERIC_RECURRENCE, 'coefficients': entries,
                  **exact('a', a_coefficient(config.m, config.kappa, config.rank))}
        if config.dump:
            partition = quantum_to_partition(config.m, config.rank + 1)
            result['jack'] = {'partition': list(partition.parts),
                              'terms': jack_polynomial(partition, config.kappa).to_records()}
        rows = [{'m': str(config.m), 'kappa': config.kappa_text, **entry} for entry in entries]
        return result, rows

    def _closed_route(self, provenance: str, compute) -> Tuple[str, Optional[Fraction], Optional[str]]:
        """(provenance, value, pole); with --form both a pole is recorded instead of raised."""
        try:
            return provenance, compute(), None
        except PoleError as e:
            if self._config.form != 'both':
                raise
            _LOGGER.warning(f"{provenance}: {e}, keeping the recurrence value")
            return provenance, None, e.factor

    def _delta1(self) -> Output:
        config = self._config
        routes = []
        if config.form in ('recurrence', 'both'):
            routes.append((GENERIC_RECURRENCE, delta1_generic(config.m, config.kappa, config.rank), None))
        if config.form in ('closed', 'both'):
            if config.rank not in CLOSED_DELTA1:
                raise InvalidLabelError(f"no closed delta1 form for rank {config.rank}")
            routes.append(self._closed_route(CLOSED_DELTA1[config.rank],
                                             lambda: delta1_closed(config.m, config.kappa)[0]))
            if config.rank == 3 and sorted(config.m.m)[:2] == [0, 0] and any(config.m.m):
                axis = 'mln'[[i for i, v in enumerate(config.m.m) if v][0]]
                routes.append(self._closed_route(
                    A3_AXIS, lambda: delta1_a3_special(axis, max(config.m.m), config.kappa)))

        results = [{'provenance': provenance, 'pole': pole, **exact('d1', value)} for provenance, value, pole in routes]
        values = {value for _, value, _ in routes if value is not None}
        result = {**self._base(), 'results': results, 'agree': len(values) == 1}
        rows = [{'m': str(config.m), 'kappa': config.kappa_text, **entry} for entry in results]
        return result, rows

    def _delta2(self) -> Output:
        config = self._config
        if config.rank != 1:
            raise InvalidLabelError(f"second-order corrections are available for rank 1 only, got rank {config.rank}")
        (m,) = config.m.m
        routes = []
        if config.form in ('recurrence', 'both'):
            routes.append((A1_RECURRENCE, delta2_a1_recurrence(m, config.kappa), None, None))
        if config.form in ('closed', 'both'):
            routes.append((*self._closed_route(A1_CLOSED_AS_PRINTED, lambda: delta2_a1_closed(m, config.kappa)),
                           AS_PRINTED_NOTE))
        if config.form == 'states':
            routes.append((A1_SUM_OVER_STATES, delta2_a1_states(m, config.kappa), None, None))

        results = [{'provenance': provenance, 'note': note, 'pole': pole, **exact('d2', value)}
                   for provenance, value, pole, note in routes]
        result = {**self._base(), 'results': results}
        rows = [{'m': str(config.m), 'kappa': config.kappa_text, **entry} for entry in results]
        return result, rows

    def _energy(self) -> Output:
        config = self._config
        expansion = energy_expansion(config.m, config.kappa, config.rank, order=config.order)
        result = {
            **self._base(),
            'order': expansion.order,
            'provenance': dict(expansion.provenance),
            **exact('e_trig', expansion.e_trig),
            **exact('const_shift', expansion.const_shift),
            **exact('d1', expansion.d1),
            **exact('d2', expansion.d2),
            'g': real(config.g),
            'energy_float': real(expansion.evaluate(config.g)),
        }
        row = {'m': str(config.m), 'kappa': config.kappa_text, 'order': expansion.order,
               'e_trig': result['e_trig'], 'const_shift': result['const_shift'], 'd1': result['d1'],
               'd2': result['d2'], 'g': result['g'], 'energy_float': result['energy_float']}
        return result, [row]

    def _weier(self) -> Output:
        config = self._config
        params = WeierstrassParams(g=config.g, p_max=config.p_max)
        series = weier_p_series(config.z, params)
        result = {
            'z': real(config.z),
            'g': real(config.g),
            'p_max': config.p_max,
            'value_float': real(series.value),
            'tail_bound_float': real(series.tail_bound),
            'oracle_value_float': None,
        }
        if config.with_oracle:
            if config.g == 0.0:
                _LOGGER.info("lattice oracle skipped, g = 0 has no second period")
            else:
                lattice = weier_p_lattice(config.z, params.omega2_abs)
                result.update({'oracle_value_float': real(lattice.value), 'oracle_cutoff': lattice.cutoff,
                               'oracle_change_float': real(lattice.change)})
        return result, [result]

    def _oracle(self) -> Output:
        config = self._config
        if config.rank != 1:
            raise InvalidLabelError(f"the diagonalization oracle covers rank 1 only, got rank {config.rank}")
        (m,) = config.m.m
        report = g3_scaling_study(config.kappa, m, config.g_list, config.basis_size, config.p_max, d2_form=config.form)
        table = []
        for i, g in enumerate(report.g_list):
            table.append({
                'm': m,
                'g': real(g),
                'E_num': real(report.numerical[i]),
                'levels': [real(x) for x in report.levels[i]],
                'E_pert': real(report.perturbative[i]),
                'residual': real(report.residuals[i]),
                'ratio': real(report.ratios[i]),
            })
        result = {
            **self._base(),
            'basis_size': report.basis_size,
            'p_max': report.p_max,
            'd2_form': report.d2_form,
            'provenance': A1_CLOSED_AS_PRINTED if report.d2_form == 'closed' else A1_RECURRENCE,
            'tolerance_float': real(report.tolerance),
            'basis_changes': [real(x) for x in report.basis_changes],
            'potential_changes': [real(x) for x in report.potential_changes],
            'table': table,
        }
        return result, table

    def _verify(self) -> Output:
        config = self._config
        results = VerifyManager(suite=config.suite, seed=config.seed).run()
        checks = [r.as_dict() for r in results]
        return {'checks': checks, 'summary': summarize(results)}, checks


def main(argv=None) -> int:
    """Set up logging, read the configuration and run one subcommand."""
    logfiles.start(log_dir=log_dir())
    try:
        try:
            config = parse_config(argv)
        except FailedInitialization as e:
            _LOGGER.error(f"{e}")
            return EXIT_USAGE
        except SystemExit as e:
            return e.code if isinstance(e.code, int) else EXIT_OK
        except Exception as e:
            _LOGGER.error(f"Unexpected exception reading the configuration: {e}")
            return EXIT_USAGE

        if config.debug:
            logfiles.start(debug=True, log_dir=log_dir())
        return EllCalogero(config).run()
    finally:
        logfiles.stop()


if __name__ == "__main__":
    # make sure we can run ell_calogero
    if sys.version_info[0] >= 3 and sys.version_info[1] >= 8:
        sys.exit(main())
    else:
        print("python 3.8 or better required")
