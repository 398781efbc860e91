import json

import pytest

import protochan as pc
from protochan.cli import main, ExperimentConfig


def write_config(path, **config):
    path.write_text(json.dumps(config))
    return str(path)


def test_encode_bits(capsys):
    assert main(['encode', '--bits', '0011', '--alphabet', 'ICMP,ARP']) == 0
    captured = capsys.readouterr()
    assert captured.out.splitlines() == ['ICMP', 'ICMP', 'ARP', 'ARP']
    assert '4 packets' in captured.err


def test_encode_message_quiet(capsys):
    assert main(['-q', 'encode', 'A']) == 0
    captured = capsys.readouterr()
    assert captured.out.splitlines() == ['ICMP'] * 6 + ['ARP'] * 6
    assert captured.err == ''


def test_encode_rejects_single_protocol(capsys):
    assert main(['encode', 'A', '--alphabet', 'ICMP']) == 1
    assert 'at least 2 protocols' in capsys.readouterr().err


def test_unknown_flag_is_a_usage_error():
    with pytest.raises(SystemExit) as err:
        main(['simulate', '--bogus'])
    assert err.value.code == 2


def test_simulate_identity(tmp_path, capsys):
    config = write_config(tmp_path / 'exp.json', message='HELLO', alphabet=['ICMP', 'ARP'])
    assert main(['-q', 'simulate', config]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report['text'] == 'HELLO'
    assert report['desync_suspected'] is False
    assert report['packets'] == 36
    assert report['seed'] == 0
    assert report['version'] == pc.__version__


def test_simulate_fragmentation_with_mitigation(tmp_path):
    config = write_config(tmp_path / 'exp.json', message='FRAGMENTS', alphabet='ICMP,ARP,UDP,TCP',
                          bit_order='LSB_FIRST', channel={'frag_prob': 1.0, 'seed': 17})
    report_path = tmp_path / 'report.json'
    assert main(['-q', 'simulate', config, '--report', str(report_path)]) == 0
    report = json.loads(report_path.read_text())
    assert report['text'] == 'FRAGMENTS'
    assert report['desync_suspected'] is False
    assert report['packets'] == 2 * report['consumed_packets'] == 60


def test_simulate_is_reproducible(tmp_path):
    config = write_config(tmp_path / 'exp.json', message='SAME BYTES', channel={'loss_prob': 0.05, 'seed': 99})
    outputs = []
    for run in ['a', 'b']:
        trace, report = tmp_path / f'{run}.jsonl', tmp_path / f'{run}.json'
        assert main(['-q', 'simulate', config, '--trace', str(trace), '--report', str(report)]) == 0
        outputs.append((trace.read_bytes(), report.read_bytes()))
    assert outputs[0] == outputs[1]


def test_seed_flag_overrides_config(tmp_path):
    config = write_config(tmp_path / 'exp.json', message='SEED', channel={'loss_prob': 0.5, 'seed': 1})
    report = tmp_path / 'report.json'
    assert main(['-q', 'simulate', config, '--seed', '8', '--report', str(report)]) == 0
    document = json.loads(report.read_text())
    assert document['seed'] == 8
    assert document['config']['channel']['seed'] == 8


@pytest.mark.parametrize('config, field', [({'message': 'HI', 'colour': 'red'}, 'colour'),
                                           ({'channel': {'loss_prob': 2.0}}, 'channel.loss_prob'),
                                           ({'channel': {'speed': 1}}, 'channel.speed'),
                                           ({'alphabet': ['ICMP']}, 'alphabet'),
                                           ({'bit_order': 'sideways'}, 'bit_order'),
                                           ({'receiver': {'drop_more_fragments': 'yes'}},
                                            'receiver.drop_more_fragments'),
                                           ({'receiver': {'dst_filter': 5}}, 'receiver.dst_filter'),
                                           ({'channel': {'benign_rate': 1e20, 'benign_distribution': {'TCP': 1}}},
                                            'channel.benign_rate')])
def test_invalid_config_writes_nothing(tmp_path, capsys, config, field):
    path = write_config(tmp_path / 'exp.json', **config)
    trace, report = tmp_path / 'trace.jsonl', tmp_path / 'report.json'
    assert main(['simulate', path, '--trace', str(trace), '--report', str(report)]) == 1
    assert f"field '{field}'" in capsys.readouterr().err
    assert not trace.exists()
    assert not report.exists()


def test_config_parse_error_reports_line(tmp_path, capsys):
    path = tmp_path / 'exp.json'
    path.write_text('{\n  "message": "HI",\n  "alphabet": [ICMP]\n}\n')
    assert main(['simulate', str(path)]) == 1
    assert 'line 3' in capsys.readouterr().err


def test_experiment_config_defaults():
    cfg = ExperimentConfig.from_dict({})
    assert cfg.alphabet.labels == ('ICMP', 'ARP')
    assert cfg.receiver.dst_filter == '10.0.0.2'
    assert cfg.channel == pc.ChannelConfig()
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_profile_and_detect(tmp_path, capsys):
    baseline = tmp_path / 'baseline.jsonl'
    pc.write_trace(pc.synthetic_trace({'TCP': 0.7, 'UDP': 0.2, 'ICMP': 0.1}, 5000, seed=2), str(baseline))
    profile = tmp_path / 'profile.json'
    assert main(['-q', 'profile', str(baseline), '--select', '2', '--output', str(profile)]) == 0
    document = json.loads(profile.read_text())
    assert document['total'] == 5000
    assert document['alphabet'] == ['TCP', 'UDP']

    config = write_config(tmp_path / 'exp.json', message='EXFILTRATE THE DATA', alphabet=['ICMP', 'GRE'],
                          output={'trace': str(tmp_path / 'covert.jsonl')})
    assert main(['-q', 'simulate', config]) == 0
    capsys.readouterr()

    assert main(['-q', 'detect', str(tmp_path / 'covert.jsonl'), '--profile', str(profile),
                 '--threshold', '50']) == 0
    report = json.loads(capsys.readouterr().out)
    assert report['verdict'] is True
    assert report['unusual_protocols'] == ['GRE']
    assert report['seed'] is None


def test_detect_with_calibrated_threshold(tmp_path, capsys):
    baseline = tmp_path / 'baseline.jsonl'
    pc.write_trace(pc.synthetic_trace({'TCP': 0.7, 'UDP': 0.3}, 5000, seed=3), str(baseline))
    suspect = tmp_path / 'suspect.jsonl'
    pc.write_trace(pc.synthetic_trace({'TCP': 0.7, 'UDP': 0.3}, 256, seed=4), str(suspect))
    assert main(['-q', 'detect', str(suspect), '--baseline', str(baseline), '--runs', '200', '--percentile', '100',
                 '--seed', '5']) == 0
    report = json.loads(capsys.readouterr().out)
    assert report['threshold'] > 0
    assert report['seed'] == 5
    assert report['vocabulary'] == ['TCP', 'UDP']
    assert report['unusual_protocols'] == []
    assert report['verdict'] is False


def test_profile_of_empty_trace_fails(tmp_path, capsys):
    empty = tmp_path / 'empty.jsonl'
    empty.write_text('')
    assert main(['profile', str(empty)]) == 1
    assert 'empty' in capsys.readouterr().err


def test_missing_trace_file_fails(tmp_path, capsys):
    assert main(['profile', str(tmp_path / 'nowhere.jsonl')]) == 1
    assert 'protochan profile' in capsys.readouterr().err
