import math
from dataclasses import dataclass, field, replace

import numpy as np

from .misc import InvalidConfig, verbose_display
from .codec import BitOrder, _as_alphabet, parse_bit_order, parse_bits, encode_bits, decode_symbols
from .textcodec import encode_text, decode_text
from .data import PacketRecord


__all__ = ['ChannelConfig', 'ReceiverConfig', 'ReceiveReport', 'Receiver', 'send_bits', 'send_message',
           'channel_transmit', 'receive', 'run_simulation', 'DEFAULT_SRC', 'DEFAULT_DST']

DEFAULT_SRC = '10.0.0.1'
DEFAULT_DST = '10.0.0.2'
DEFAULT_BENIGN_SRC = '10.0.0.254'
MAX_BENIGN_RATE = 1000.0


#######################################################################################################################
# Configurations

@dataclass(frozen=True)
class ChannelConfig:
    """Fault model of the simulated channel. Defaults describe the identity channel.

    :Parameters:
        * **loss_prob** (:obj:`float`): Probability that a covert packet is lost (defaults 0).
        * **frag_prob** (:obj:`float`): Probability that a covert packet is fragmented, i.e. received twice with
          the first copy flagged More Fragments (defaults 0).
        * **benign_rate** (:obj:`float`): Mean number of benign packets injected after each covert packet, at most
          1000 (defaults 0).
        * **benign_distribution** (:obj:`dict`): Protocol label to weight for benign packets (defaults {}).
        * **interval** (:obj:`float`): Seconds between covert sends (defaults 1.0).
        * **seed** (:obj:`int`): Seed of the PCG64 generator (defaults 0).
        * **benign_src** (:obj:`str`): Source endpoint of benign packets (defaults '10.0.0.254').
        * **benign_dst** (:obj:`str`): Destination of benign packets, None to reuse the destination of the
          covert packet they follow (defaults None).
    """
    loss_prob: float = 0.0
    frag_prob: float = 0.0
    benign_rate: float = 0.0
    benign_distribution: dict = field(default_factory=dict)
    interval: float = 1.0
    seed: int = 0
    benign_src: str = DEFAULT_BENIGN_SRC
    benign_dst: str = None

    def validate(self):
        """Check every field. Raises :obj:`InvalidConfig` naming the offending field."""
        for name in ['loss_prob', 'frag_prob']:
            value = getattr(self, name)
            if not _is_real(value) or not 0.0 <= value <= 1.0:
                raise InvalidConfig(f"{name} must be a probability in [0, 1]. Got {value!r}.", field=name)
        if not _is_real(self.benign_rate) or not 0 <= self.benign_rate <= MAX_BENIGN_RATE:
            raise InvalidConfig(f"benign_rate must be a number in [0, {MAX_BENIGN_RATE:g}]. Got {self.benign_rate!r}.",
                                field='benign_rate')
        if not _is_real(self.interval) or not self.interval > 0 or math.isinf(self.interval):
            raise InvalidConfig(f"interval must be a finite number > 0. Got {self.interval!r}.", field='interval')
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise InvalidConfig(f"seed must be an integer in [0, 2^64). Got {self.seed!r}.", field='seed')
        for name in ['benign_src', 'benign_dst']:
            value = getattr(self, name)
            if not isinstance(value, str) and not (name == 'benign_dst' and value is None):
                raise InvalidConfig(f"{name} must be a string. Got {value!r}.", field=name)

        if not isinstance(self.benign_distribution, dict):
            raise InvalidConfig("benign_distribution must map protocol labels to weights.", field='benign_distribution')
        for label, weight in self.benign_distribution.items():
            if not isinstance(label, str) or label == '':
                raise InvalidConfig(f"benign_distribution labels must be non-empty strings. Got {label!r}.",
                                    field='benign_distribution')
            if not _is_real(weight) or weight < 0 or math.isinf(weight):
                raise InvalidConfig(f"benign_distribution weight for '{label}' must be a finite number >= 0. Got {weight!r}.",
                                    field=f'benign_distribution.{label}')
        if self.benign_rate > 0 and sum(self.benign_distribution.values()) <= 0:
            raise InvalidConfig("benign_distribution needs a positive total weight when benign_rate > 0.",
                                field='benign_distribution')
        return self


@dataclass(frozen=True)
class ReceiverConfig:
    """Receiver settings. `alphabet` and `order` must match the sender's."""
    alphabet: object = ('ICMP', 'ARP')
    order: BitOrder = BitOrder.MSB_FIRST
    drop_more_fragments: bool = True
    dst_filter: str = None

    def __post_init__(self):
        object.__setattr__(self, 'alphabet', _as_alphabet(self.alphabet))
        object.__setattr__(self, 'order', parse_bit_order(self.order))


@dataclass(frozen=True)
class ReceiveReport:
    text: str
    parity_failures: list
    missing_eot: bool
    trailing_data: bool
    consumed_packets: int

    @property
    def desync_suspected(self):
        return bool(self.parity_failures) or self.missing_eot or self.trailing_data

    def to_dict(self):
        return {'text': self.text, 'parity_failures': list(self.parity_failures), 'missing_eot': self.missing_eot,
                'trailing_data': self.trailing_data, 'consumed_packets': self.consumed_packets,
                'desync_suspected': self.desync_suspected}


def _is_real(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool) and not math.isnan(value)


#######################################################################################################################
# Sender

def send_bits(bits, alphabet, order=BitOrder.MSB_FIRST, interval=1.0, src=DEFAULT_SRC, dst=DEFAULT_DST):
    """Send raw bits over the protocol channel, one packet per symbol.

    :Example:
        >>> [p.protocol for p in protochan.send_bits('0011', ['ICMP', 'ARP'])]
        ... ['ICMP', 'ICMP', 'ARP', 'ARP']

    :Returns:
        * :obj:`list`: Covert :obj:`PacketRecord` sent at times 0, interval, 2*interval, ...
    """
    labels = encode_bits(parse_bits(bits), alphabet, order)
    return [PacketRecord(seq=i, time=i * float(interval), protocol=lab, more_fragments=False,
                         src=src, dst=dst, covert=True) for i, lab in enumerate(labels)]


def send_message(text, alphabet, order=BitOrder.MSB_FIRST, interval=1.0, src=DEFAULT_SRC, dst=DEFAULT_DST):
    """Send a text message over the protocol channel.
    The protocol label of each packet and the packet order are the only information carriers.

    :Parameters:
        * **text** (:obj:`str`): Message to be sent.
        * **alphabet** (:obj:`ProtocolAlphabet` or :obj:`list`): Protocol alphabet.
        * **order** (:obj:`BitOrder`): Bit order inside a symbol (defaults MSB_FIRST).
        * **interval** (:obj:`float`): Seconds between two packets (defaults 1.0).
        * **src** (:obj:`str`): Sender endpoint (defaults '10.0.0.1').
        * **dst** (:obj:`str`): Receiver endpoint (defaults '10.0.0.2').

    :Example:
        >>> packets = protochan.send_message('A', ['ICMP', 'ARP'])
        >>> len(packets)
        ... 12

    :Returns:
        * :obj:`list`: Covert :obj:`PacketRecord`.
    """
    alphabet = _as_alphabet(alphabet)
    return send_bits(encode_text(text, pad_to=alphabet.width), alphabet, order, interval, src, dst)


#######################################################################################################################
# Channel

def channel_transmit(packets, cfg=ChannelConfig(), verbose=False):
    """Apply the seeded fault model to a packet sequence.
    For every covert packet the generator draws, in this order: the loss draw, the fragmentation draw, the
    benign count (Poisson with mean `benign_rate`, only when it is > 0) and the benign protocols. All draws
    are consumed whatever the outcome, so the sequence only depends on the number of covert packets.
    A lost packet is removed. A fragmented packet is emitted twice, the first copy flagged More Fragments.
    Benign packets follow the covert packet's slot. Non-covert input packets pass through unchanged.
    Output packets are renumbered in observation order.

    :Parameters:
        * **packets** (:obj:`list`): Input :obj:`PacketRecord` in sending order.
        * **cfg** (:obj:`ChannelConfig`): Channel configuration (defaults to the identity channel).
        * **verbose** (:obj:`bool`): Display a summary of the injected faults (defaults False).

    :Example:
        >>> noisy = protochan.channel_transmit(packets, protochan.ChannelConfig(loss_prob=0.1, seed=7))

    :Returns:
        * :obj:`list`: Observed :obj:`PacketRecord`.
    """
    cfg.validate()
    rng = np.random.Generator(np.random.PCG64(cfg.seed))

    labels = list(cfg.benign_distribution)
    weights = np.array([cfg.benign_distribution[lab] for lab in labels], dtype=float)
    probs = weights / weights.sum() if weights.sum() > 0 else weights

    out = []
    lost, fragmented, injected = 0, 0, 0
    for i, packet in enumerate(packets):
        if not packet.covert:
            out.append(packet)
            continue

        u_loss = rng.random()
        u_frag = rng.random()
        n_benign = int(rng.poisson(cfg.benign_rate)) if cfg.benign_rate > 0 else 0
        benign_idx = rng.choice(len(labels), size=n_benign, p=probs) if n_benign > 0 else []

        if u_loss < cfg.loss_prob:
            lost += 1
        elif u_frag < cfg.frag_prob:
            fragmented += 1
            out.append(replace(packet, more_fragments=True))
            out.append(replace(packet, more_fragments=False))
        else:
            out.append(packet)

        if n_benign > 0:
            injected += n_benign
            t0 = packet.time
            t1 = packets[i + 1].time if i + 1 < len(packets) else t0 + cfg.interval
            dst = cfg.benign_dst if cfg.benign_dst is not None else packet.dst
            for j, idx in enumerate(benign_idx):
                out.append(PacketRecord(seq=0, time=t0 + (t1 - t0) * (j + 1) / (n_benign + 1), protocol=labels[idx],
                                        more_fragments=False, src=cfg.benign_src, dst=dst, covert=False))

    verbose_display(f'Channel: {lost} lost, {fragmented} fragmented, {injected} benign injected', verbose)
    return [replace(p, seq=k) for k, p in enumerate(out)]


#######################################################################################################################
# Receiver

class Receiver:
    """Receiver state machine. Packets are accepted one at a time; the ground-truth `covert` flag is never read.

    :Example:
        >>> rx = protochan.Receiver(protochan.ReceiverConfig(alphabet=['ICMP', 'ARP']))
        >>> for packet in trace:
        >>>     rx.accept(packet)
        >>> rx.report().text
        ... 'HELLO'
    """

    def __init__(self, rcfg=ReceiverConfig()):
        self.rcfg = rcfg
        self.labels = []

    def accept(self, packet):
        """Add one packet to the symbol stream if it passes the filters. Returns True when it was kept."""
        if self.rcfg.dst_filter is not None and packet.dst != self.rcfg.dst_filter:
            return False
        if self.rcfg.alphabet.index(packet.protocol) is None:
            return False
        if self.rcfg.drop_more_fragments and packet.more_fragments:
            return False
        self.labels.append(packet.protocol)
        return True

    def reset(self):
        self.labels = []

    def report(self):
        bits = decode_symbols(self.labels, self.rcfg.alphabet, self.rcfg.order)
        decoded = decode_text(bits, pad_to=self.rcfg.alphabet.width)
        return ReceiveReport(text=decoded.text, parity_failures=decoded.parity_failures,
                             missing_eot=decoded.missing_eot, trailing_data=decoded.trailing,
                             consumed_packets=len(self.labels))


def receive(trace, rcfg=ReceiverConfig()):
    """Decode a message from an observed trace.
    Keeps packets sent to `dst_filter` on a usable alphabet protocol, drops More Fragments packets when the
    mitigation is enabled, then decodes the symbols. Never fails: anomalies are reported.

    :Parameters:
        * **trace** (:obj:`list`): Observed :obj:`PacketRecord`.
        * **rcfg** (:obj:`ReceiverConfig`): Receiver configuration.

    :Example:
        >>> report = protochan.receive(protochan.send_message('HELLO', ['ICMP', 'ARP']))
        >>> report.text, report.desync_suspected
        ... ('HELLO', False)

    :Returns:
        * :obj:`ReceiveReport`: Decoded text and diagnostics.
    """
    rx = Receiver(rcfg)
    for packet in trace:
        rx.accept(packet)
    return rx.report()


#######################################################################################################################
# Full pipeline

def run_simulation(message, alphabet, order=BitOrder.MSB_FIRST, channel=ChannelConfig(), receiver=None,
                   src=DEFAULT_SRC, dst=DEFAULT_DST, verbose=False):
    """Send a message, pass it through the channel and decode it.

    :Parameters:
        * **message** (:obj:`str`): Message to be sent.
        * **alphabet** (:obj:`ProtocolAlphabet` or :obj:`list`): Protocol alphabet used by the sender.
        * **order** (:obj:`BitOrder`): Bit order used by the sender (defaults MSB_FIRST).
        * **channel** (:obj:`ChannelConfig`): Channel configuration (defaults to the identity channel).
        * **receiver** (:obj:`ReceiverConfig`): Receiver configuration, None to mirror the sender with the
          mitigation on and `dst` as filter (defaults None).
        * **src** (:obj:`str`): Sender endpoint (defaults '10.0.0.1').
        * **dst** (:obj:`str`): Receiver endpoint (defaults '10.0.0.2').
        * **verbose** (:obj:`bool`): Display intermediate steps (defaults False).

    :Returns:
        * :obj:`tuple`: Observed trace and :obj:`ReceiveReport`.
    """
    channel.validate()
    if receiver is None:
        receiver = ReceiverConfig(alphabet=alphabet, order=order, drop_more_fragments=True, dst_filter=dst)

    sent = send_message(message, alphabet, order, channel.interval, src, dst)
    verbose_display(f'Sent {len(sent)} covert packets', verbose)
    trace = channel_transmit(sent, channel, verbose=verbose)
    report = receive(trace, receiver)
    verbose_display(f'Received {report.consumed_packets} packets, text: {report.text!r}', verbose)
    return trace, report
