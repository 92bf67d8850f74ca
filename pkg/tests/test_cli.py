import json

import numpy as np
import pytest

from diracspec.objects import Grid
from diracspec.components import zero_family_potential
from ISP_functions import main, parse_spectral_json, read_potential_csv, run_checks
from ISP_functions.checks import CHECKS, Check, CheckOutcome


def test_spectrum_is_deterministic(tmp_path):
    outputs = []
    for name in ('first.json', 'second.json'):
        out = tmp_path / name
        assert main(['spectrum', '--builtin', 'zero', '--grid', '512', '--nmin', '-2', '--nmax', '2',
                     '--out', str(out)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    spectrum = parse_spectral_json(str(tmp_path / 'first.json'))
    np.testing.assert_allclose(spectrum.lambdas(), np.arange(-2, 3), atol=1e-8)
    np.testing.assert_allclose(spectrum.norming(), np.pi, atol=1e-6)
    echo = json.loads((tmp_path / 'first.json.config.json').read_text(encoding='utf-8'))
    assert echo['subcommand'] == 'spectrum'
    assert echo['m'] == 512


def test_exit_codes(tmp_path, capsys):
    broken = tmp_path / 'broken.json'
    broken.write_text('{"alpha": 0, "items": [', encoding='utf-8')
    assert main(['two-spectra', '--input', str(broken), '--input', str(broken), '--out',
                 str(tmp_path / 'a.json')]) == 2
    assert main(['spectrum', '--builtin', 'zero']) == 3
    assert main(['isospectral', '--out', str(tmp_path / 'iso.csv')]) == 3
    assert 'error' in capsys.readouterr().err


def test_isospectral_csv(tmp_path):
    tseq = tmp_path / 't.json'
    tseq.write_text('{"entries": [{"n": 0, "t": 0.5}]}', encoding='utf-8')
    out = tmp_path / 'iso.csv'
    assert main(['isospectral', '--input', str(tseq), '--builtin', 'zero', '--grid', '512',
                 '--nmin', '-3', '--nmax', '3', '--out', str(out)]) == 0
    pot = read_potential_csv(str(out))
    expected = zero_family_potential(Grid(0.0, np.pi, 512), 0, 0.5)
    np.testing.assert_allclose(pot.q_values, expected.q_values, atol=1e-4)
    np.testing.assert_allclose(pot.p_values, expected.p_values, atol=1e-4)


def test_check_exit_status(monkeypatch, tmp_path, capsys):
    passing = Check('core', 'passing', lambda m: CheckOutcome(0.0, 1.0))
    failing = Check('core', 'failing', lambda m: CheckOutcome(2.0, 1.0, 'too large'))
    monkeypatch.setattr('ISP_functions.checks.CHECKS', (passing,))
    assert main(['check', '--out', str(tmp_path / 'checks')]) == 0
    assert (tmp_path / 'checks.csv').exists()
    monkeypatch.setattr('ISP_functions.checks.CHECKS', (passing, failing))
    assert main(['check']) == 1
    assert 'FAILED core/failing' in capsys.readouterr().out


def test_core_checks_pass():
    collector = run_checks(modules=('core',))
    assert len(collector) == 5
    assert collector.count('passed', True) == 5


def test_every_module_has_checks():
    modules = {check.module for check in CHECKS}
    assert modules == {'core', 'cauchy', 'eigen', 'twospectra', 'isospectral', 'glreconstruct', 'halfaxis',
                       'surgery', 'io'}
    assert len({(check.module, check.name) for check in CHECKS}) == len(CHECKS)


def test_unknown_subcommand():
    with pytest.raises(SystemExit):
        main(['transmogrify'])
