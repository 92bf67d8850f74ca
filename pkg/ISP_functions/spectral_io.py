"""
File formats of the command line tools.

SpectralData JSON:
    {"alpha": a, "beta": b, "index_shift": 0,
     "items": [{"n": -1, "lambda": -1.0, "a": 3.14, "b": ..., "c": ...}, ...]}
  items sorted by strictly increasing n; a, b and c are optional per item.

Potential and grid-function CSV: header x,p,q (or x,value / x,y1,y2), one row per
grid node, floats written with 17 significant digits.

T-sequence JSON: {"entries": [{"n": 0, "t": 0.5}, ...]}
Surgery plan JSON: {"remove": [0], "add": [{"mu": 0.5, "c": 1.0}], "rescale": [{"n": 1, "b": 2.0}]}
"""
import json
import math

import numpy as np
import pandas as pd

from diracspec.objects import (BoundaryAngles, Grid, GridFunction, PotentialMatrix, SpectralData,
                               SpectralDatum, Trajectory2, TSequence, SurgeryPlan, Addition, Rescaling)
from diracspec.objects.errors import ContractViolation, ParseError

GRID_TOL = 1e-9
OPTIONAL_FIELDS = (('a', 'a'), ('b', 'b'), ('c', 'c'))

def _load_json(path: str):
    try:
        with open(path, encoding='utf-8') as handle:
            text = handle.read()
    except OSError as error:
        raise ParseError(f'cannot read file: {error.strerror}', path=path) from error
    try:
        return json.loads(text)
    except json.JSONDecodeError as error:
        raise ParseError(error.msg, path=path, line=error.lineno, column=error.colno) from error


def _number(value, path: str, field: str, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f'expected a number, got {type(value).__name__}', path=path, field=field)
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise ParseError(f'expected an integer, got {value!r}', path=path, field=field)
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise ParseError('value is not finite', path=path, field=field)
    return value


def _object(value, path: str, field: str) -> dict:
    if not isinstance(value, dict):
        raise ParseError(f'expected an object, got {type(value).__name__}', path=path, field=field)
    return value


def _list(value, path: str, field: str) -> list:
    if not isinstance(value, list):
        raise ParseError(f'expected an array, got {type(value).__name__}', path=path, field=field)
    return value


def _required(record: dict, key: str, path: str, field: str):
    if key not in record:
        raise ParseError(f'missing field {key!r}', path=path, field=field)
    return record[key]


def spectral_data_from_dict(raw, path: str = '<input>') -> SpectralData:
    """
    Validate a decoded SpectralData document.
    """
    raw = _object(raw, path, '$')
    alpha = _number(_required(raw, 'alpha', path, 'alpha'), path, 'alpha')
    beta = _number(raw.get('beta', 0.0), path, 'beta')
    shift = _number(raw.get('index_shift', 0), path, 'index_shift', integer=True)
    entries = _list(_required(raw, 'items', path, 'items'), path, 'items')
    if not entries:
        raise ParseError('no items', path=path, field='items')
    items = {}
    previous = None
    for k, entry in enumerate(entries):
        where = f'items[{k}]'
        entry = _object(entry, path, where)
        n = _number(_required(entry, 'n', path, f'{where}.n'), path, f'{where}.n', integer=True)
        if previous is not None and n <= previous:
            raise ParseError(f'indices must increase strictly, {n} follows {previous}', path=path,
                             field=f'{where}.n')
        previous = n
        lam = _number(_required(entry, 'lambda', path, f'{where}.lambda'), path, f'{where}.lambda')
        extra = {name: _number(entry[key], path, f'{where}.{key}')
                 for key, name in OPTIONAL_FIELDS if entry.get(key) is not None}
        try:
            items[n] = SpectralDatum(n, lam, **extra)
        except ContractViolation as error:
            raise ParseError(str(error), path=path, field=where) from error
    try:
        return SpectralData(BoundaryAngles(alpha, beta), items, shift)
    except ContractViolation as error:
        raise ParseError(str(error), path=path, field='items') from error


def spectral_data_to_dict(data: SpectralData) -> dict:
    items = []
    for d in data:
        record = {'n': d.n, 'lambda': d.lam}
        for key, name in OPTIONAL_FIELDS:
            value = getattr(d, name)
            if value is not None:
                record[key] = value
        items.append(record)
    return {'alpha': data.alpha, 'beta': data.beta, 'index_shift': data.index_shift, 'items': items}


def parse_spectral_json(path: str) -> SpectralData:
    """
    Read a SpectralData file.

    Args:
        path: JSON file in the SpectralData layout

    Returns:
        SpectralData: Parsed and validated data

    Raises:
        ParseError: Malformed JSON (with line and column) or a schema violation (with the field path)
    """
    return spectral_data_from_dict(_load_json(path), path)


def write_json(document, path: str) -> str:
    """
    Deterministic JSON: insertion-ordered keys, two-space indent, shortest round-trip floats.
    """
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(json.dumps(document, indent=2, allow_nan=False))
        handle.write('\n')
    return path


def emit_spectral_json(data: SpectralData, path: str) -> str:
    return write_json(spectral_data_to_dict(data), path)


def parse_tsequence_json(path: str) -> TSequence:
    raw = _object(_load_json(path), path, '$')
    entries = _list(_required(raw, 'entries', path, 'entries'), path, 'entries')
    values = {}
    for k, entry in enumerate(entries):
        where = f'entries[{k}]'
        entry = _object(entry, path, where)
        n = _number(_required(entry, 'n', path, f'{where}.n'), path, f'{where}.n', integer=True)
        if n in values:
            raise ParseError(f'index {n} repeated', path=path, field=f'{where}.n')
        values[n] = _number(_required(entry, 't', path, f'{where}.t'), path, f'{where}.t')
    return TSequence(values)


def parse_plan_json(path: str) -> SurgeryPlan:
    raw = _object(_load_json(path), path, '$')
    removals = [_number(n, path, f'remove[{k}]', integer=True)
                for k, n in enumerate(_list(raw.get('remove', []), path, 'remove'))]
    additions = []
    for k, entry in enumerate(_list(raw.get('add', []), path, 'add')):
        entry = _object(entry, path, f'add[{k}]')
        additions.append(Addition(_number(_required(entry, 'mu', path, f'add[{k}].mu'), path, f'add[{k}].mu'),
                                  _number(_required(entry, 'c', path, f'add[{k}].c'), path, f'add[{k}].c')))
    rescalings = []
    for k, entry in enumerate(_list(raw.get('rescale', []), path, 'rescale')):
        entry = _object(entry, path, f'rescale[{k}]')
        n = _number(_required(entry, 'n', path, f'rescale[{k}].n'), path, f'rescale[{k}].n', integer=True)
        rescalings.append(Rescaling(n, _number(_required(entry, 'b', path, f'rescale[{k}].b'), path,
                                               f'rescale[{k}].b')))
    return SurgeryPlan(tuple(removals), tuple(additions), tuple(rescalings))


def _columns(fn) -> dict[str, np.ndarray]:
    if isinstance(fn, PotentialMatrix):
        return {'x': fn.domain.nodes, 'p': fn.p_values, 'q': fn.q_values}
    if isinstance(fn, Trajectory2):
        if np.iscomplexobj(fn.values):
            raise ContractViolation('complex trajectories have no CSV layout')
        return {'x': fn.grid.nodes, 'y1': fn.y1, 'y2': fn.y2}
    if isinstance(fn, GridFunction):
        return {'x': fn.grid.nodes, 'value': fn.values}
    raise ContractViolation(f'cannot write {type(fn).__name__} as CSV')


def emit_csv(fn: GridFunction | PotentialMatrix | Trajectory2, path: str) -> str:
    """
    Write samples on the grid nodes, one row per node.
    """
    frame = pd.DataFrame(_columns(fn))
    frame.to_csv(path, index=False, float_format='%.17g', encoding='utf-8', lineterminator='\n')
    return path


def read_potential_csv(path: str, interpolation: str = 'linear') -> PotentialMatrix:
    """
    Read an x,p,q table sampled on a uniform grid.

    Raises:
        ParseError: Missing columns, non-numeric cells (with their line) or a nonuniform grid
    """
    try:
        frame = pd.read_csv(path, float_precision='round_trip', encoding='utf-8')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as error:
        raise ParseError(str(error), path=path) from error
    missing = [c for c in ('x', 'p', 'q') if c not in frame.columns]
    if missing:
        raise ParseError(f'missing column(s) {missing}', path=path, line=1)
    values = {}
    for column in ('x', 'p', 'q'):
        numeric = pd.to_numeric(frame[column], errors='coerce').to_numpy(dtype=float)
        bad = np.flatnonzero(~np.isfinite(numeric))
        if bad.size:
            raise ParseError(f'{frame[column].iloc[bad[0]]!r} is not a finite number', path=path,
                             line=int(bad[0]) + 2, column=list(frame.columns).index(column) + 1,
                             field=column)
        if not pd.api.types.is_float_dtype(frame[column]) and not pd.api.types.is_integer_dtype(frame[column]):
            raise ParseError('column is not numeric', path=path, field=column)
        values[column] = numeric
    x = values['x']
    if x.size < 2:
        raise ParseError('need at least two grid nodes', path=path)
    try:
        grid = Grid(float(x[0]), float(x[-1]), x.size - 1)
    except ContractViolation as error:
        raise ParseError(str(error), path=path, field='x') from error
    drift = np.abs(x - grid.nodes)
    if np.max(drift) > GRID_TOL * max(1.0, grid.b - grid.a):
        k = int(np.argmax(drift))
        raise ParseError('x is not a uniform grid', path=path, line=k + 2, column=1, field='x')
    try:
        return PotentialMatrix.from_samples(grid, values['p'], values['q'], interpolation=interpolation,
                                            name=path)
    except ContractViolation as error:
        raise ParseError(str(error), path=path) from error
