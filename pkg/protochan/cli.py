import sys
import argparse
from dataclasses import dataclass, field, asdict

from .misc import ProtochanError, ConfigError, InvalidConfig, _get_config, verbose_display
from .codec import ProtocolAlphabet, BitOrder, _as_alphabet, parse_bit_order, parse_bits, bits_per_symbol, encode_bits
from .textcodec import encode_text
from .data import read_trace, write_trace, write_report, read_document
from .simchannel import ChannelConfig, ReceiverConfig, run_simulation, DEFAULT_SRC, DEFAULT_DST
from .detector import (ProtocolProfile, baseline_profile, select_alphabet, detect, calibrate_threshold,
                       DEFAULT_WINDOW, DEFAULT_STRIDE, DEFAULT_ALPHA)


__all__ = ['ExperimentConfig', 'main']


#######################################################################################################################
# Experiment configuration

_TOP_KEYS = {'message', 'alphabet', 'bit_order', 'src', 'dst', 'channel', 'receiver', 'output'}
_CHANNEL_KEYS = {'loss_prob', 'frag_prob', 'benign_rate', 'benign_distribution', 'interval', 'seed',
                 'benign_src', 'benign_dst'}
_RECEIVER_KEYS = {'alphabet', 'bit_order', 'drop_more_fragments', 'dst_filter'}
_OUTPUT_KEYS = {'trace', 'report'}


def _section(config, name, allowed):
    value = config.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"Expected an object. Got {type(value).__name__}.", field=name)
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ConfigError(f"Unknown key. Allowed keys are {', '.join(sorted(allowed))}.", field=f'{name}.{unknown[0]}')
    return value


def _checked(fn, field_name):
    try:
        return fn()
    except ConfigError:
        raise
    except (ProtochanError, TypeError) as err:
        raise ConfigError(str(err), field=field_name)


@dataclass(frozen=True)
class ExperimentConfig:
    """One simulate run: message, sender alphabet, channel and receiver settings, output paths.

    :Configuration: The JSON document accepts the keys below; every channel parameter defaults to the identity channel.

        .. code-block:: python

            {
            "message": "HELLO",
            "alphabet": ["ICMP", "ARP"],
            "bit_order": "MSB_FIRST",
            "src": "10.0.0.1",
            "dst": "10.0.0.2",
            "channel": {"loss_prob": 0, "frag_prob": 0, "benign_rate": 0, "benign_distribution": {},
                        "interval": 1.0, "seed": 0, "benign_src": "10.0.0.254", "benign_dst": null},
            "receiver": {"drop_more_fragments": true, "dst_filter": "10.0.0.2"},
            "output": {"trace": "trace.jsonl", "report": "report.json"}
            }
    """
    message: str = ''
    alphabet: ProtocolAlphabet = ProtocolAlphabet(('ICMP', 'ARP'))
    bit_order: BitOrder = BitOrder.MSB_FIRST
    src: str = DEFAULT_SRC
    dst: str = DEFAULT_DST
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    receiver: ReceiverConfig = field(default_factory=ReceiverConfig)
    trace_path: str = None
    report_path: str = None

    @classmethod
    def from_dict(cls, config):
        """Validate a configuration dictionary. Errors name the offending field."""
        unknown = sorted(set(config) - _TOP_KEYS)
        if unknown:
            raise ConfigError(f"Unknown key. Allowed keys are {', '.join(sorted(_TOP_KEYS))}.", field=unknown[0])

        message = config.get('message', '')
        if not isinstance(message, str):
            raise ConfigError("The message must be a string.", field='message')
        alphabet = _checked(lambda: _as_alphabet(config.get('alphabet', ('ICMP', 'ARP'))), 'alphabet')
        order = _checked(lambda: parse_bit_order(config.get('bit_order', 'MSB_FIRST')), 'bit_order')
        src, dst = config.get('src', DEFAULT_SRC), config.get('dst', DEFAULT_DST)
        for name, value in [('src', src), ('dst', dst)]:
            if not isinstance(value, str):
                raise ConfigError("Endpoints must be strings.", field=name)

        channel = ChannelConfig(**_section(config, 'channel', _CHANNEL_KEYS))
        try:
            channel.validate()
        except InvalidConfig as err:
            raise ConfigError(str(err), field=f'channel.{err.field}' if err.field else 'channel')

        recv = _section(config, 'receiver', _RECEIVER_KEYS)
        receiver = _checked(lambda: ReceiverConfig(alphabet=_as_alphabet(recv.get('alphabet', alphabet)),
                                                   order=recv.get('bit_order', order),
                                                   drop_more_fragments=recv.get('drop_more_fragments', True),
                                                   dst_filter=recv.get('dst_filter', dst)), 'receiver')
        if not isinstance(receiver.drop_more_fragments, bool):
            raise ConfigError("Expected a boolean.", field='receiver.drop_more_fragments')
        if receiver.dst_filter is not None and not isinstance(receiver.dst_filter, str):
            raise ConfigError("Expected a string or null.", field='receiver.dst_filter')

        out = _section(config, 'output', _OUTPUT_KEYS)
        return cls(message=message, alphabet=alphabet, bit_order=order, src=src, dst=dst, channel=channel,
                   receiver=receiver, trace_path=out.get('trace'), report_path=out.get('report'))

    def to_dict(self):
        channel = asdict(self.channel)
        return {'message': self.message, 'alphabet': list(self.alphabet.labels), 'bit_order': self.bit_order.value,
                'src': self.src, 'dst': self.dst, 'channel': channel,
                'receiver': {'alphabet': list(self.receiver.alphabet.labels),
                             'bit_order': self.receiver.order.value,
                             'drop_more_fragments': self.receiver.drop_more_fragments,
                             'dst_filter': self.receiver.dst_filter},
                'output': {'trace': self.trace_path, 'report': self.report_path}}


def _version():
    from . import __version__
    return __version__


#######################################################################################################################
# Commands

def cmd_encode(args):
    alphabet = ProtocolAlphabet(tuple(lab.strip() for lab in args.alphabet.split(',') if lab.strip()))
    order = parse_bit_order(args.order)
    if args.bits is not None:
        bits = parse_bits(args.bits)
    else:
        bits = encode_text(args.message if args.message is not None else '', pad_to=alphabet.width)

    labels = encode_bits(bits, alphabet, order)
    for lab in labels:
        print(lab)
    verbose_display(f'{len(labels)} packets, {bits_per_symbol(alphabet)} bit(s) per symbol, order {order.value}',
                    not args.quiet, file=sys.stderr)
    return 0


def cmd_simulate(args):
    raw = _get_config(args.config)
    if args.seed is not None and isinstance(raw.get('channel', {}), dict):
        raw = dict(raw)
        raw['channel'] = dict(raw.get('channel', {}), seed=args.seed)
    cfg = ExperimentConfig.from_dict(raw)

    trace_path = args.trace if args.trace is not None else cfg.trace_path
    report_path = args.report if args.report is not None else cfg.report_path

    trace, report = run_simulation(cfg.message, cfg.alphabet, cfg.bit_order, cfg.channel, cfg.receiver,
                                   cfg.src, cfg.dst)
    document = dict(report.to_dict(), seed=cfg.channel.seed, version=_version(), config=cfg.to_dict(),
                    packets=len(trace))

    # Outputs are only written once the whole run succeeded.
    if trace_path is not None:
        write_trace(trace, trace_path)
    if report_path is not None:
        write_report(document, report_path)
    else:
        write_report(document, sys.stdout)

    verbose_display(f"seed {cfg.channel.seed}: {len(trace)} packets observed, decoded {report.text!r}, "
                    f"desync suspected: {report.desync_suspected}", not args.quiet, file=sys.stderr)
    return 0


def _load_profile(args):
    if args.profile is not None:
        return ProtocolProfile.from_dict(read_document(args.profile))
    return baseline_profile(read_trace(args.baseline, strict=args.strict), alpha=args.alpha)


def cmd_detect(args):
    trace = read_trace(args.trace, strict=args.strict)
    profile = _load_profile(args)

    seed = None
    threshold = args.threshold
    if threshold is None:
        seed = args.seed
        threshold = calibrate_threshold(profile, len(trace), args.window, args.stride, percentile=args.percentile,
                                        runs=args.runs, seed=args.seed)
    report = detect(trace, profile, args.window, args.stride, threshold)

    document = dict(report.to_dict(), seed=seed, version=_version(), packets=len(trace))
    write_report(document, args.output if args.output is not None else sys.stdout)
    verbose_display(f"{len(report.flagged_windows)}/{len(report.scores)} windows above {threshold:.3f}, "
                    f"unusual protocols: {report.unusual_protocols}, verdict: {report.verdict}",
                    not args.quiet, file=sys.stderr)
    return 0


def cmd_profile(args):
    profile = baseline_profile(read_trace(args.trace, strict=args.strict), alpha=args.alpha)
    document = dict(profile.to_dict(), seed=None, version=_version())
    if args.select is not None:
        document['alphabet'] = list(select_alphabet(profile, args.select).labels)

    write_report(document, args.output if args.output is not None else sys.stdout)
    verbose_display(f"{profile.total} packets, {len(profile.counts)} protocols", not args.quiet, file=sys.stderr)
    return 0


#######################################################################################################################
# Parser

def build_parser():
    parser = argparse.ArgumentParser(prog='protochan', description="Protocol channel toolkit: encode, simulate and detect covert channels that switch protocols.")
    parser.add_argument("-q", "--quiet", action="store_true", help="Do not print the summary on standard error")
    sub = parser.add_subparsers(dest='command', required=True)

    enc = sub.add_parser('encode', help="Print the protocol sequence carrying a message or a bit string")
    enc.add_argument("message", nargs='?', default=None, help="Text message to encode")
    enc.add_argument("-b", "--bits", default=None, help="Encode a raw bit string (e.g. 0011) instead of a message")
    enc.add_argument("-a", "--alphabet", default="ICMP,ARP", help="Comma separated protocol alphabet (default: ICMP,ARP)")
    enc.add_argument("-o", "--order", default="MSB_FIRST", help="Bit order inside a symbol: MSB_FIRST or LSB_FIRST (default: MSB_FIRST)")
    enc.set_defaults(func=cmd_encode)

    sim = sub.add_parser('simulate', help="Run send, channel and receive from a JSON experiment config")
    sim.add_argument("config", help="Path to the JSON experiment config")
    sim.add_argument("-t", "--trace", default=None, help="Trace output path (overrides output.trace)")
    sim.add_argument("-r", "--report", default=None, help="Report output path (overrides output.report, default: standard output)")
    sim.add_argument("-s", "--seed", type=int, default=None, help="Channel seed (overrides channel.seed)")
    sim.set_defaults(func=cmd_simulate)

    det = sub.add_parser('detect', help="Score a trace against a baseline and flag protocol channels")
    det.add_argument("trace", help="JSON Lines trace to analyse")
    base = det.add_mutually_exclusive_group(required=True)
    base.add_argument("--baseline", default=None, help="JSON Lines trace of benign traffic")
    base.add_argument("--profile", default=None, help="Profile document written by 'protochan profile'")
    det.add_argument("-w", "--window", type=int, default=DEFAULT_WINDOW, help=f"Window size in packets (default: {DEFAULT_WINDOW})")
    det.add_argument("--stride", type=int, default=DEFAULT_STRIDE, help=f"Packets between window starts (default: {DEFAULT_STRIDE})")
    det.add_argument("--threshold", type=float, default=None, help="Score threshold, calibrated on the baseline when omitted")
    det.add_argument("--percentile", type=float, default=99, help="Percentile used by the calibration (default: 99)")
    det.add_argument("--runs", type=int, default=200, help="Benign traces simulated by the calibration (default: 200)")
    det.add_argument("-s", "--seed", type=int, default=0, help="Seed of the calibration (default: 0)")
    det.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help=f"Smoothing pseudocount (default: {DEFAULT_ALPHA})")
    det.add_argument("--strict", action="store_true", help="Reject unknown fields in traces")
    det.add_argument("--output", default=None, help="Report output path (default: standard output)")
    det.set_defaults(func=cmd_detect)

    pro = sub.add_parser('profile', help="Protocol profile of a benign trace")
    pro.add_argument("trace", help="JSON Lines trace of benign traffic")
    pro.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help=f"Smoothing pseudocount (default: {DEFAULT_ALPHA})")
    pro.add_argument("-k", "--select", type=int, default=None, help="Also select the K most frequent protocols as alphabet")
    pro.add_argument("--strict", action="store_true", help="Reject unknown fields in traces")
    pro.add_argument("--output", default=None, help="Profile output path (default: standard output)")
    pro.set_defaults(func=cmd_profile)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ProtochanError, OSError) as err:
        print(f"protochan {args.command}: {err}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
