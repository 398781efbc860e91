import io
import json
import warnings
from dataclasses import dataclass, asdict

import pandas as pd

from .misc import MalformedRecord, write


__all__ = ['PacketRecord', 'TRACE_FIELDS', 'write_trace', 'read_trace', 'trace_to_frame',
           'write_report', 'read_document']


##############################################################################################################################
# Packet records

@dataclass(frozen=True)
class PacketRecord:
    """One observed packet.

    `covert` is ground truth for evaluation only. Receivers and detectors never read it.
    """
    seq: int
    time: float
    protocol: str
    more_fragments: bool = False
    src: str = ''
    dst: str = ''
    covert: bool = False

    def to_dict(self):
        return asdict(self)


TRACE_FIELDS = ('seq', 'time', 'protocol', 'more_fragments', 'src', 'dst', 'covert')
_REQUIRED = TRACE_FIELDS[:-1]


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _parse_record(line, line_number, strict):
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as err:
        raise MalformedRecord(line_number, line, f"invalid JSON ({err.msg})")
    if not isinstance(obj, dict):
        raise MalformedRecord(line_number, line, "a record must be a JSON object")

    missing = [f for f in _REQUIRED if f not in obj]
    if missing:
        raise MalformedRecord(line_number, line, f"missing field(s) {', '.join(missing)}")

    unknown = sorted(set(obj) - set(TRACE_FIELDS))
    if unknown and strict:
        raise MalformedRecord(line_number, line, f"unknown field(s) {', '.join(unknown)}")
    elif unknown:
        warnings.warn(f"Trace line {line_number}: ignoring unknown field(s) {', '.join(unknown)}.")

    if not isinstance(obj['seq'], int) or isinstance(obj['seq'], bool):
        raise MalformedRecord(line_number, line, "'seq' must be an integer")
    if not _is_number(obj['time']):
        raise MalformedRecord(line_number, line, "'time' must be a number")
    if not isinstance(obj['protocol'], str) or obj['protocol'] == '':
        raise MalformedRecord(line_number, line, "'protocol' must be a non-empty string")
    for field in ['more_fragments', 'covert']:
        if field in obj and not isinstance(obj[field], bool):
            raise MalformedRecord(line_number, line, f"'{field}' must be a boolean")
    for field in ['src', 'dst']:
        if not isinstance(obj[field], str):
            raise MalformedRecord(line_number, line, f"'{field}' must be a string")

    return PacketRecord(seq=obj['seq'], time=float(obj['time']), protocol=obj['protocol'],
                        more_fragments=obj['more_fragments'], src=obj['src'], dst=obj['dst'],
                        covert=obj.get('covert', False))


##############################################################################################################################

# Write a trace
def write_trace(packets, destination):
    """Write packets to the JSON Lines trace format, one record per line.

    :Parameters:
        * **packets** (:obj:`list`): List of :obj:`PacketRecord`.
        * **destination** (:obj:`str` or file object): Path of the trace file or an open text stream.

    :Example:
        >>> protochan.write_trace(packets, '/tmp/covert.jsonl')
    """
    text = ''.join(json.dumps(p.to_dict()) + '\n' for p in packets)

    if isinstance(destination, io.TextIOBase) or hasattr(destination, 'write'):
        destination.write(text)
    else:
        write(text, destination, perm='w', end_row='')


##############################################################################################################################

# Read a trace
def read_trace(source, strict=False):
    """Read a JSON Lines trace.
    Each line holds the fields seq, time, protocol, more_fragments, src, dst and optionally covert
    (absent means False). Blank lines are skipped.

    :Parameters:
        * **source** (:obj:`str` or file object): Path of the trace file or an open text stream.
        * **strict** (:obj:`bool`): Reject unknown fields instead of ignoring them with a warning (defaults False).

    :Example:
        >>> trace = protochan.read_trace('/tmp/covert.jsonl')

    :Returns:
        * :obj:`list`: List of :obj:`PacketRecord`.
    """
    if hasattr(source, 'read'):
        lines = source.read().splitlines()
    else:
        with open(source) as f:
            lines = f.read().splitlines()

    packets = []
    for line_number, line in enumerate(lines, start=1):
        if line.strip() == '':
            continue
        record = _parse_record(line, line_number, strict)
        if packets and record.seq <= packets[-1].seq:
            raise MalformedRecord(line_number, line, f"'seq' must be strictly increasing (previous {packets[-1].seq})")
        if packets and record.time < packets[-1].time:
            raise MalformedRecord(line_number, line, f"'time' must be non-decreasing (previous {packets[-1].time})")
        packets.append(record)
    return packets


##############################################################################################################################

# Trace as a data frame
def trace_to_frame(packets):
    """Convert packets to a :obj:`pandas.DataFrame` with one column per trace field.

    :Example:
        >>> protochan.trace_to_frame(trace).protocol.value_counts()
        ... ICMP    6
        ... ARP     6

    :Returns:
        * :obj:`pandas.DataFrame`: One row per packet.
    """
    return pd.DataFrame([p.to_dict() for p in packets], columns=list(TRACE_FIELDS))


##############################################################################################################################

# Reports and profiles
def write_report(document, destination=None):
    """Serialize a report as one JSON object (sorted keys, two-space indentation).

    :Parameters:
        * **document** (:obj:`dict`): Report to be written.
        * **destination** (:obj:`str` or file object): Path or open text stream. Only returns the text when None (defaults None).

    :Returns:
        * :obj:`str`: The serialized report.
    """
    text = json.dumps(document, indent=2, sort_keys=True) + '\n'
    if destination is None:
        return text
    elif hasattr(destination, 'write'):
        destination.write(text)
    else:
        write(text, destination, perm='w', end_row='')
    return text


def read_document(path):
    """Read a JSON object written by :py:meth:`write_report`."""
    try:
        with open(path) as f:
            document = json.load(f)
    except json.JSONDecodeError as err:
        lines = err.doc.splitlines()
        line = lines[err.lineno - 1] if err.lineno <= len(lines) else ''
        raise MalformedRecord(err.lineno, line, err.msg)
    if not isinstance(document, dict):
        raise MalformedRecord(1, str(document)[:80], "the document must be a JSON object")
    return document
