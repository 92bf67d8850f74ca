"""
Command line front end.

    python -m ISP_functions.cli spectrum --builtin sin-q --nmin -5 --nmax 5 --out spec.json
    python -m ISP_functions.cli check --out checks

Exit codes: 0 ok, 1 failed checks, 2 malformed input, 3 numerical contract violation.
"""
import argparse
import sys
from dataclasses import asdict, dataclass

import numpy as np

from diracspec.objects import Logger, BoundaryAngles, Grid, PotentialMatrix, SpectralData, BUILTIN_POTENTIALS
from diracspec.objects.errors import ContractViolation, DomainError, ParseError
from diracspec.components import (SolverConfig, HalfAxisProblem, TwoSpectraInput, evf, evf_derivative,
                                  evf_halfaxis_derivative, halfaxis_two_spectra_norming, model_spectrum,
                                  norming_from_two_spectra, reconstruct, shift_finite_explicit,
                                  shift_finite_recurrent, surgery, weyl_m, weyl_m0)
from diracspec.components.cauchy import METHODS

from ISP_functions.batch_functions import asyncSpectrum_Linux, collector_to_spectrum
from ISP_functions.checks import run_checks
from ISP_functions.datacollector import DataCollector
from ISP_functions.spectral_io import (emit_csv, emit_spectral_json, parse_plan_json, parse_spectral_json,
                                       parse_tsequence_json, read_potential_csv, write_json)

SUBCOMMANDS = ('spectrum', 'two-spectra', 'isospectral', 'reconstruct', 'surgery', 'evf', 'weyl', 'check')
FORMATS = ('json', 'csv')
DEFAULT_FORMAT = {'spectrum': 'json', 'two-spectra': 'json', 'isospectral': 'csv', 'reconstruct': 'csv',
                  'surgery': 'csv', 'evf': 'csv', 'weyl': 'csv', 'check': 'csv'}

logger = Logger.get_instance()

@dataclass(frozen=True)
class RunConfig:
    """
    Everything one invocation depends on; echoed next to the outputs.

    Args:
        subcommand: One of SUBCOMMANDS
        inputs: Input files (spectral data, T-sequence or plan, depending on the subcommand)
        m: Grid intervals
        n_min: First index of the window
        n_max: Last index of the window
        tol: Eigenvalue tolerance
        trunc: Truncation N of the two-spectra products and of the Gelfand-Levitan series
        alpha: Left angle
        beta: Right angle
        epsilon: Second left angle of the Weyl function on [0, pi]
        out: Output path
        format: json or csv
        potential: Potential CSV
        builtin: Name of a built-in potential, used when no CSV is given
        x_max: Truncation point of built-in half-axis potentials
        halfaxis: Work on [0, inf) instead of [0, pi]
        similarity: Emit b_n and c_n with the spectrum
        flavor: Model flavor of the surgery subcommand
        method: Isospectral route (recurrent or explicit) or Gelfand-Levitan solver
        integrator: Cauchy solver, rk4 or magnus4
        sample_range: (first, last) of the sampled variable of evf and weyl
        samples: Number of samples of evf and weyl
        verbose: Activate logging
    """
    subcommand: str
    inputs: tuple[str, ...] = ()
    m: int = 2048
    n_min: int = -5
    n_max: int = 5
    tol: float = 1e-10
    trunc: int = 200
    alpha: float = 0.0
    beta: float = 0.0
    epsilon: float = 0.5
    out: str | None = None
    format: str | None = None
    potential: str | None = None
    builtin: str = 'zero'
    x_max: float = 12.0
    halfaxis: bool = False
    similarity: bool = False
    flavor: str = 'half_bc0'
    method: str | None = None
    integrator: str = 'rk4'
    sample_range: tuple[float, float] = (-3.0, 3.0)
    samples: int = 25
    verbose: bool = False

    def __post_init__(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise DomainError(f'unknown subcommand {self.subcommand!r}')
        if not self.tol > 0:
            raise DomainError(f'tol must be positive, got {self.tol!r}')
        if self.n_max < self.n_min:
            raise DomainError(f'empty index window [{self.n_min}, {self.n_max}]')
        if self.trunc < 1:
            raise DomainError(f'trunc must be positive, got {self.trunc!r}')
        if self.samples < 2:
            raise DomainError(f'need at least two samples, got {self.samples!r}')
        if self.format is None:
            object.__setattr__(self, 'format', DEFAULT_FORMAT[self.subcommand])
        if self.format not in FORMATS:
            raise DomainError(f'format must be one of {FORMATS}, got {self.format!r}')
        if self.out is None and self.subcommand != 'check':
            raise DomainError(f'{self.subcommand} needs --out')

    @property
    def cfg(self) -> SolverConfig:
        return SolverConfig(self.integrator, self.m)


def _potential(config: RunConfig) -> PotentialMatrix:
    if config.potential:
        pot = read_potential_csv(config.potential)
        return pot if pot.domain.m == config.m else pot.on_grid(Grid(pot.domain.a, pot.domain.b, config.m))
    b = config.x_max if config.halfaxis else np.pi
    return PotentialMatrix.builtin(config.builtin, Grid(0.0, b, config.m))


def _need_inputs(config: RunConfig, count: int) -> None:
    if len(config.inputs) < count:
        raise DomainError(f'{config.subcommand} needs {count} --input file(s), got {len(config.inputs)}')


def _table_path(out: str) -> str:
    return out[:-4] if out.endswith('.csv') else out


def _write_spectrum(spectrum: SpectralData, config: RunConfig) -> list[str]:
    if config.format == 'json':
        return [emit_spectral_json(spectrum, config.out)]
    rows = [{'n': d.n, 'lambda': d.lam, 'a': d.a, 'b': d.b, 'c': d.c} for d in spectrum]
    return [DataCollector.from_rows(rows).save(_table_path(config.out))]


def run_spectrum(config: RunConfig) -> list[str]:
    pot = _potential(config)
    if config.halfaxis:
        problem = HalfAxisProblem(pot, config.alpha, config.cfg)
        spectrum = problem.eigen_data(config.n_min, config.n_max, tol=config.tol)
    else:
        collector = asyncSpectrum_Linux(pot=pot, alpha=config.alpha, beta=config.beta, n_min=config.n_min,
                                        n_max=config.n_max, tol=config.tol, cfg=config.cfg,
                                        similarity=config.similarity)
        spectrum = collector_to_spectrum(collector, config.alpha, config.beta)
    return _write_spectrum(spectrum, config)


def run_two_spectra(config: RunConfig) -> list[str]:
    _need_inputs(config, 2)
    spec_a, spec_b = parse_spectral_json(config.inputs[0]), parse_spectral_json(config.inputs[1])
    N = config.trunc
    lo, hi = max(config.n_min, -N + 1), min(config.n_max, N - 1)
    if hi < lo:
        raise DomainError(f'no index of [{config.n_min}, {config.n_max}] satisfies |n| < N = {N}')
    if config.halfaxis:
        norming = {n: halfaxis_two_spectra_norming(spec_a, spec_b, n, N) for n in range(lo, hi + 1)}
    else:
        inp = TwoSpectraInput(spec_a, spec_b, N)
        norming = {n: norming_from_two_spectra(inp, n) for n in range(lo, hi + 1)}
    return _write_spectrum(spec_a.window(lo, hi).with_updates(a=norming), config)


def run_isospectral(config: RunConfig) -> list[str]:
    _need_inputs(config, 1)
    tseq = parse_tsequence_json(config.inputs[0])
    pot = _potential(config)
    method = config.method or 'explicit'
    routes = {'explicit': shift_finite_explicit, 'recurrent': shift_finite_recurrent}
    if method not in routes:
        raise DomainError(f'isospectral method must be one of {sorted(routes)}, got {method!r}')
    result = routes[method](pot, config.alpha, tseq, window=(config.n_min, config.n_max), tol=config.tol,
                            cfg=config.cfg)
    if config.format == 'json':
        data = SpectralData.from_lambdas(BoundaryAngles(config.alpha), result.lambdas, result.norming)
        return [emit_spectral_json(data, config.out)]
    return [emit_csv(result.omega_t, config.out)]


def run_reconstruct(config: RunConfig) -> list[str]:
    _need_inputs(config, 1)
    data = parse_spectral_json(config.inputs[0])
    rec = reconstruct(data, Grid(0.0, np.pi, config.m), config.trunc, method=config.method or 'degenerate')
    return [emit_csv(rec.potential, config.out)]


def run_surgery(config: RunConfig) -> list[str]:
    _need_inputs(config, 1)
    plan = parse_plan_json(config.inputs[0])
    base = model_spectrum(config.flavor, config.n_min, config.n_max)
    result = surgery(base, plan, base.grid(config.m), window=(config.n_min, config.n_max))
    if config.format == 'json':
        return [emit_spectral_json(result.spectrum, config.out)]
    return [emit_csv(result.potential, config.out)]


def run_evf(config: RunConfig) -> list[str]:
    pot = _potential(config)
    gammas = np.linspace(*config.sample_range, config.samples)
    rows = []
    if config.halfaxis:
        problem = HalfAxisProblem(pot, config.alpha, config.cfg)
        for gamma in gammas:
            sample = problem.evf(gamma, config.tol)
            rows.append({'gamma': sample.gamma, 'lambda': sample.value, 'alpha': sample.alpha, 'm': sample.m,
                         'derivative': evf_halfaxis_derivative(problem, gamma)})
    else:
        for gamma in gammas:
            sample = evf(pot, gamma, config.beta, config.tol, config.cfg)
            rows.append({'gamma': sample.gamma, 'lambda': sample.value, 'alpha': sample.alpha, 'm': sample.m,
                         'derivative': evf_derivative(pot, gamma, config.beta, config.cfg)})
    return _write_rows(rows, config)


def run_weyl(config: RunConfig) -> list[str]:
    """
    Samples of the Weyl function along the imaginary axis, lambda = i mu.
    """
    pot = _potential(config)
    mus = np.linspace(*config.sample_range, config.samples)
    if np.any(mus == 0):
        raise DomainError('the Weyl samples lambda = i mu need mu != 0')
    rows = []
    problem = HalfAxisProblem(pot, config.alpha, config.cfg) if config.halfaxis else None
    for mu in mus:
        lam = 1j * mu
        if problem is not None:
            value = weyl_m0(problem, lam).m_value
        else:
            value = weyl_m(pot, config.alpha, config.epsilon, config.beta, lam, config.cfg).m_value
        rows.append({'mu': float(mu), 're': float(value.real), 'im': float(value.imag)})
    return _write_rows(rows, config)


def _write_rows(rows: list[dict], config: RunConfig) -> list[str]:
    if config.format == 'json':
        return [write_json(rows, config.out)]
    return [DataCollector.from_rows(rows).save(_table_path(config.out))]


def run_check(config: RunConfig) -> tuple[list[str], bool]:
    collector = run_checks(config.m)
    passed = collector.count('passed', True)
    print(f'{passed}/{len(collector)} checks passed')
    for row in collector.df.itertuples(index=False):
        if not row.passed:
            print(f'FAILED {row.module}/{row.check}: {row.value:.3e} > {row.threshold:.1e} {row.detail}')
    written = []
    if config.out:
        if config.format == 'json':
            written.append(write_json(collector.df.to_dict(orient='records'), config.out))
        else:
            written.append(collector.save(_table_path(config.out)))
    return written, passed == len(collector)


RUNNERS = {
    'spectrum': run_spectrum,
    'two-spectra': run_two_spectra,
    'isospectral': run_isospectral,
    'reconstruct': run_reconstruct,
    'surgery': run_surgery,
    'evf': run_evf,
    'weyl': run_weyl,
}


def run(config: RunConfig) -> int:
    """
    Execute one subcommand and write its artifacts plus <out>.config.json.

    Returns:
        int: 0, or 1 when the check suite reports a failure
    """
    if config.verbose:
        Logger.activate()
    status = 0
    if config.subcommand == 'check':
        written, ok = run_check(config)
        status = 0 if ok else 1
    else:
        written = RUNNERS[config.subcommand](config)
    if config.out:
        echo = asdict(config)
        echo['written'] = written
        write_json(echo, f'{config.out}.config.json')
    for path in written:
        logger.log('wrote artifact', path=path)
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='diracspec', description='Spectral analysis of canonical Dirac systems.')
    parser.add_argument('subcommand', choices=SUBCOMMANDS)
    parser.add_argument('--input', dest='inputs', action='append', default=[],
                        help='input file; repeat for two spectra')
    parser.add_argument('--grid', type=int, default=2048, help='grid intervals m')
    parser.add_argument('--nmin', type=int, default=-5)
    parser.add_argument('--nmax', type=int, default=5)
    parser.add_argument('--tol', type=float, default=1e-10)
    parser.add_argument('--trunc', type=int, default=200, help='truncation N')
    parser.add_argument('--alpha', type=float, default=0.0)
    parser.add_argument('--beta', type=float, default=0.0)
    parser.add_argument('--epsilon', type=float, default=0.5, help='second left angle of the Weyl function')
    parser.add_argument('--out')
    parser.add_argument('--format', choices=FORMATS)
    source = parser.add_mutually_exclusive_group()
    source.add_argument('--potential', help='x,p,q CSV')
    source.add_argument('--builtin', choices=sorted(BUILTIN_POTENTIALS), default='zero')
    parser.add_argument('--xmax', type=float, default=12.0, help='half-axis truncation of built-in potentials')
    parser.add_argument('--halfaxis', action='store_true')
    parser.add_argument('--similarity', action='store_true', help='also emit b_n and c_n')
    parser.add_argument('--flavor', choices=('half_bc0', 'half_bc_pi2'), default='half_bc0')
    parser.add_argument('--method')
    parser.add_argument('--integrator', choices=METHODS, default='rk4', help='Cauchy solver')
    parser.add_argument('--range', type=float, nargs=2, default=(-3.0, 3.0), metavar=('FIRST', 'LAST'))
    parser.add_argument('--samples', type=int, default=25)
    parser.add_argument('--verbose', action='store_true')
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        subcommand=args.subcommand,
        inputs=tuple(args.inputs),
        m=args.grid,
        n_min=args.nmin,
        n_max=args.nmax,
        tol=args.tol,
        trunc=args.trunc,
        alpha=args.alpha,
        beta=args.beta,
        epsilon=args.epsilon,
        out=args.out,
        format=args.format,
        potential=args.potential,
        builtin=args.builtin,
        x_max=args.xmax,
        halfaxis=args.halfaxis,
        similarity=args.similarity,
        flavor=args.flavor,
        method=args.method,
        integrator=args.integrator,
        sample_range=tuple(args.range),
        samples=args.samples,
        verbose=args.verbose,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(config_from_args(args))
    except ParseError as error:
        print(f'error: {error}', file=sys.stderr)
        return error.code
    except ContractViolation as error:
        print(f'error: {type(error).__name__}: {error}', file=sys.stderr)
        return error.code


if __name__ == '__main__':
    sys.exit(main())
