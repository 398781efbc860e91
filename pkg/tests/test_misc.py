import sys

import pytest

import protochan as pc


def test_verbose_display_prints_strings(capsys):
    assert pc.verbose_display('hello') is None
    assert capsys.readouterr().out == 'hello\n'
    pc.verbose_display('quiet', verbose=False)
    assert capsys.readouterr().out == ''


def test_verbose_display_to_stream(capsys):
    pc.verbose_display('summary', file=sys.stderr)
    captured = capsys.readouterr()
    assert captured.err == 'summary\n'
    assert captured.out == ''


def test_verbose_display_wraps_loops():
    assert list(pc.verbose_display(range(5))) == [0, 1, 2, 3, 4]
    assert pc.verbose_display(range(5), verbose=False) == range(5)
    assert list(pc.verbose_display(['a', 'b'])) == ['a', 'b']


def test_write_creates_folder_and_appends(tmp_path):
    path = tmp_path / 'nested' / 'labels.txt'
    pc.write('ICMP', str(path))
    pc.write('ARP', str(path), perm='a')
    assert path.read_text() == 'ICMP\nARP\n'
    pc.write('TCP\n', str(path))
    assert path.read_text() == 'TCP\n'


def test_get_config(tmp_path):
    assert pc.get_config({'message': 'HI'}) == {'message': 'HI'}
    path = tmp_path / 'exp.json'
    path.write_text('{"message": "HI"}')
    assert pc.get_config(str(path)) == {'message': 'HI'}


@pytest.mark.parametrize('content, line', [('{\n"a": 1,\n}', 3), ('[1, 2]', 1)])
def test_get_config_errors(tmp_path, content, line):
    path = tmp_path / 'exp.json'
    path.write_text(content)
    with pytest.raises(pc.ConfigError) as err:
        pc.get_config(str(path))
    assert err.value.line == line
    assert f'line {line}' in str(err.value)


def test_get_config_missing_file(tmp_path):
    with pytest.raises(pc.ConfigError, match='Could not find'):
        pc.get_config(str(tmp_path / 'missing.json'))
