import os
import pickle
from concurrent.futures import ProcessPoolExecutor

import pandas as pd

from diracspec.objects import Logger, BoundaryAngles, PotentialMatrix, SpectralData, SpectralDatum
from diracspec.objects.errors import DomainError
from diracspec.components import SolverConfig, find_eigenvalues, norming_constants, similarity_coefficients

from ISP_functions.datacollector import DataCollector

WORKERS_ENV = 'DIRACSPEC_WORKERS'
COLUMNS = ('n', 'lambda', 'a', 'b', 'c')

logger = Logger.get_instance()

def workers_from_env(default: int = 1) -> int:
    """
    Process count from DIRACSPEC_WORKERS.
    """
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or raw.strip() == '':
        return default
    try:
        workers = int(raw)
    except ValueError as error:
        raise DomainError(f'{WORKERS_ENV} must be a positive integer, got {raw!r}') from error
    if workers < 1:
        raise DomainError(f'{WORKERS_ENV} must be a positive integer, got {raw!r}')
    return workers


def runSpectrum_Linux(pot: PotentialMatrix,
                      alpha: float,
                      beta: float,
                      n_min: int,
                      n_max: int,
                      tol: float = 1e-10,
                      cfg: SolverConfig | None = None,
                      similarity: bool = False) -> pd.DataFrame:
    """
    Eigenvalues and norming constants of one index chunk.

    Args:
        pot: Potential on [0, pi]
        alpha: Left angle
        beta: Right angle
        n_min: First index of the chunk
        n_max: Last index of the chunk
        tol: Eigenvalue tolerance
        cfg: Solver settings
        similarity: Also compute b_n and c_n

    Returns:
        DataFrame: One row per index with columns n, lambda, a, b, c
    """
    spectrum = find_eigenvalues(pot, alpha, beta, n_min, n_max, tol, cfg)
    if similarity:
        spectrum = similarity_coefficients(pot, spectrum.alpha, spectrum.beta, spectrum, cfg)
    else:
        spectrum = norming_constants(pot, spectrum.alpha, spectrum, cfg)
    rows = [{'n': d.n, 'lambda': d.lam, 'a': d.a, 'b': d.b, 'c': d.c} for d in spectrum]
    return pd.DataFrame(rows, columns=list(COLUMNS))


def _chunks(n_min: int, n_max: int, cores: int) -> list[tuple[int, int]]:
    """
    Contiguous windows covering [n_min, n_max]; the first (size mod cores) get one extra index.
    """
    total = n_max - n_min + 1
    cores = min(cores, total)
    per_task, extra = divmod(total, cores)
    bounds, start = [], n_min
    for task in range(cores):
        size = per_task + (1 if task < extra else 0)
        bounds.append((start, start + size - 1))
        start += size
    return bounds


def _picklable(pot: PotentialMatrix) -> bool:
    try:
        pickle.dumps(pot)
    except (pickle.PicklingError, AttributeError, TypeError):
        return False
    return True


def asyncSpectrum_Linux(cores: int | None = None, **params) -> DataCollector:
    """
    Partition an index window over worker processes.

    Args:
        cores: Number of processes, defaults to DIRACSPEC_WORKERS (or 1)
        **params: pot, alpha, beta, n_min, n_max and optionally tol, cfg, similarity

    Returns:
        DataCollector: Rows sorted by n
    """
    cores = workers_from_env() if cores is None else cores
    if cores < 1:
        raise DomainError(f'need at least one worker, got {cores}')
    n_min, n_max = params['n_min'], params['n_max']
    if n_max < n_min:
        raise DomainError(f'empty index window [{n_min}, {n_max}]')
    pot = params['pot']
    args = [pot, params['alpha'], params['beta'], n_min, n_max,
            params.get('tol', 1e-10), params.get('cfg'), params.get('similarity', False)]

    bounds = _chunks(n_min, n_max, cores)
    if len(bounds) > 1 and not _picklable(pot):
        logger.warn('potential cannot be sent to worker processes, computing in this process')
        bounds = [(n_min, n_max)]

    if len(bounds) == 1:
        results = [runSpectrum_Linux(*args)]
    else:
        tasks = []
        with ProcessPoolExecutor(max_workers=len(bounds)) as executor:
            for lo, hi in bounds:
                temp_args = list(args)
                temp_args[3], temp_args[4] = lo, hi
                tasks.append(executor.submit(runSpectrum_Linux, *temp_args))
        results = [task.result() for task in tasks]
    logger.log(f'index window [{n_min}, {n_max}] split into {len(bounds)} chunk(s)')

    spectrum_df = pd.concat(results, ignore_index=True).sort_values('n', kind='stable')
    spectrum_df.reset_index(drop=True, inplace=True)
    return DataCollector(spectrum_df)


def collector_to_spectrum(collector: DataCollector, alpha: float, beta: float) -> SpectralData:
    """
    SpectralData from the rows of asyncSpectrum_Linux.
    """
    collector.is_DataFrame(collector.df)
    items = {}
    for row in collector.df.itertuples(index=False):
        extra = {name: float(getattr(row, name)) for name in ('a', 'b', 'c') if pd.notna(getattr(row, name))}
        items[int(row.n)] = SpectralDatum(int(row.n), float(row[1]), **extra)
    return SpectralData(BoundaryAngles(alpha, beta), items)
