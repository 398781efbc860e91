import io
import json

import pytest

import protochan as pc
from protochan import PacketRecord


def sample_packets():
    return [PacketRecord(0, 0.0, 'ICMP', False, '10.0.0.1', '10.0.0.2', True),
            PacketRecord(1, 0.5, 'TCP', False, '10.0.0.254', '10.0.0.2', False),
            PacketRecord(2, 1.0, 'ARP', True, '10.0.0.1', '10.0.0.2', True)]


def test_trace_roundtrip(tmp_path):
    path = tmp_path / 'trace.jsonl'
    pc.write_trace(sample_packets(), str(path))
    assert pc.read_trace(str(path)) == sample_packets()
    assert len(path.read_text().splitlines()) == 3


def test_trace_stream_roundtrip():
    buffer = io.StringIO()
    pc.write_trace(sample_packets(), buffer)
    buffer.seek(0)
    assert pc.read_trace(buffer) == sample_packets()


def test_empty_trace(tmp_path):
    path = tmp_path / 'empty.jsonl'
    pc.write_trace([], str(path))
    assert path.read_text() == ''
    assert pc.read_trace(str(path)) == []


def test_blank_lines_are_skipped():
    line = json.dumps(sample_packets()[0].to_dict())
    assert len(pc.read_trace(io.StringIO(f'\n{line}\n\n'))) == 1


def test_covert_defaults_to_false():
    line = '{"seq": 0, "time": 0, "protocol": "ICMP", "more_fragments": false, "src": "a", "dst": "b"}'
    packet = pc.read_trace(io.StringIO(line))[0]
    assert packet.covert is False
    assert packet.time == 0.0


def test_missing_protocol_names_the_line():
    good = json.dumps(sample_packets()[0].to_dict())
    bad = '{"seq": 1, "time": 1.0, "more_fragments": false, "src": "a", "dst": "b"}'
    with pytest.raises(pc.MalformedRecord) as err:
        pc.read_trace(io.StringIO(f'{good}\n{bad}\n'))
    assert err.value.line_number == 2
    assert 'protocol' in str(err.value)


@pytest.mark.parametrize('line', ['not json',
                                  '[1, 2]',
                                  '{"seq": "0", "time": 0, "protocol": "ICMP", "more_fragments": false, "src": "a", "dst": "b"}',
                                  '{"seq": 0, "time": 0, "protocol": "", "more_fragments": false, "src": "a", "dst": "b"}',
                                  '{"seq": 0, "time": 0, "protocol": "ICMP", "more_fragments": 1, "src": "a", "dst": "b"}'])
def test_malformed_records(line):
    with pytest.raises(pc.MalformedRecord):
        pc.read_trace(io.StringIO(line))


def test_unknown_fields():
    line = ('{"seq": 0, "time": 0, "protocol": "ICMP", "more_fragments": false, "src": "a", "dst": "b", '
            '"ttl": 64}')
    with pytest.warns(UserWarning, match='ttl'):
        assert len(pc.read_trace(io.StringIO(line))) == 1
    with pytest.raises(pc.MalformedRecord):
        pc.read_trace(io.StringIO(line), strict=True)


def test_sequence_must_increase():
    first, second, _ = [json.dumps(p.to_dict()) for p in sample_packets()]
    with pytest.raises(pc.MalformedRecord) as err:
        pc.read_trace(io.StringIO(f'{second}\n{first}\n'))
    assert err.value.line_number == 2


def test_trace_to_frame():
    df = pc.trace_to_frame(sample_packets())
    assert list(df.columns) == list(pc.TRACE_FIELDS)
    assert df.protocol.tolist() == ['ICMP', 'TCP', 'ARP']
    assert df.covert.sum() == 2


def test_report_is_deterministic(tmp_path):
    document = {'b': 1, 'a': {'z': [1, 2], 'y': 'x'}}
    text = pc.write_report(document)
    assert text == pc.write_report(dict(reversed(list(document.items()))))
    assert text.endswith('\n')

    path = tmp_path / 'out' / 'report.json'
    pc.write_report(document, str(path))
    assert path.read_text() == text
    assert pc.read_document(str(path)) == document


def test_read_document_rejects_bad_json(tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text('{\n  "a": 1,\n  oops\n}\n')
    with pytest.raises(pc.MalformedRecord) as err:
        pc.read_document(str(path))
    assert err.value.line_number == 3
