import enum
from dataclasses import dataclass

from .misc import AlphabetTooSmall, InvalidAlphabet, LengthNotMultiple, UnknownProtocol, InvalidParameter


__all__ = ['BitOrder', 'ProtocolAlphabet', 'parse_bits', 'format_bits', 'parse_bit_order',
           'bits_per_symbol', 'encode_bits', 'decode_symbols', 'channel_capacity']


########################################################################################################################
# Types

class BitOrder(enum.Enum):
    """How a symbol index is written as bits. Both endpoints must agree on it."""
    MSB_FIRST = 'MSB_FIRST'
    LSB_FIRST = 'LSB_FIRST'


@dataclass(frozen=True)
class ProtocolAlphabet:
    """Ordered set of protocol labels. The label at index i carries the bit pattern of i.

    Only the first 2^floor(log2(N)) labels are usable; the others are inert.

    :Example:
        >>> alphabet = protochan.ProtocolAlphabet(['ICMP', 'ARP', 'UDP'])
        >>> alphabet.width, alphabet.usable
        ... (1, ('ICMP', 'ARP'))
    """
    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(labels) < 2:
            raise AlphabetTooSmall(len(labels))
        for lab in labels:
            if not isinstance(lab, str) or lab == '':
                raise InvalidAlphabet(f"Protocol labels must be non-empty strings. Got {lab!r}.")
        if len(set(labels)) != len(labels):
            dups = sorted({lab for lab in labels if labels.count(lab) > 1})
            raise InvalidAlphabet(f"Protocol labels must be distinct. Duplicated: {', '.join(dups)}.")
        object.__setattr__(self, 'labels', labels)

    def __len__(self):
        return len(self.labels)

    @property
    def width(self):
        return (len(self.labels)).bit_length() - 1

    @property
    def usable(self):
        return self.labels[:2 ** self.width]

    def index(self, label):
        """Symbol index of a usable label, None if the label is not usable."""
        try:
            idx = self.labels.index(label)
        except ValueError:
            return None
        return idx if idx < 2 ** self.width else None


def _as_alphabet(alphabet):
    if isinstance(alphabet, ProtocolAlphabet):
        return alphabet
    if isinstance(alphabet, str):
        alphabet = [lab.strip() for lab in alphabet.split(',') if lab.strip() != '']
    return ProtocolAlphabet(tuple(alphabet))


########################################################################################################################
# Bit strings

def parse_bits(bits):
    """Convert a string of '0'/'1' characters or a sequence of ints into a bit tuple.

    :Parameters:
        * **bits** (:obj:`str` or :obj:`list`): Bits to convert, whitespace is ignored for strings.

    :Example:
        >>> protochan.parse_bits('0011')
        ... (0, 0, 1, 1)

    :Returns:
        * :obj:`tuple`: Bits as ints.
    """
    if isinstance(bits, str):
        cleaned = ''.join(bits.split())
        if any(c not in '01' for c in cleaned):
            raise InvalidParameter(f"A bit string can only contain '0' and '1'. Got '{bits}'.")
        return tuple(int(c) for c in cleaned)

    out = []
    for b in bits:
        if isinstance(b, bool) or b not in (0, 1):
            raise InvalidParameter(f"Every bit must be 0 or 1. Got {b!r}.")
        out.append(int(b))
    return tuple(out)


def format_bits(bits):
    return ''.join(str(b) for b in bits)


def parse_bit_order(value):
    """Read a bit order from its name. Accepts MSB_FIRST/msb/big and LSB_FIRST/lsb/little."""
    if isinstance(value, BitOrder):
        return value
    key = str(value).strip().lower().replace('-', '_')
    if key in ['msb_first', 'msb', 'big', 'big_endian']:
        return BitOrder.MSB_FIRST
    elif key in ['lsb_first', 'lsb', 'little', 'little_endian']:
        return BitOrder.LSB_FIRST
    else:
        raise InvalidParameter(f"Bit order value is not correct. Can be 'MSB_FIRST' or 'LSB_FIRST'. Got '{value}'.")


########################################################################################################################
# Symbol mapping

def bits_per_symbol(alphabet):
    """Number of bits carried by one packet, floor(log2(N)) for an N-protocol alphabet.

    :Parameters:
        * **alphabet** (:obj:`ProtocolAlphabet` or :obj:`list`): Protocol alphabet.

    :Example:
        >>> protochan.bits_per_symbol(['ICMP', 'ARP', 'UDP', 'TCP'])
        ... 2

    :Returns:
        * :obj:`int`: Symbol width.
    """
    return _as_alphabet(alphabet).width


def channel_capacity(alphabet, n_packets):
    """Bits carried by `n_packets` packets over the given alphabet."""
    if n_packets < 0:
        raise InvalidParameter(f"Number of packets must be non-negative. Got {n_packets}.")
    return n_packets * bits_per_symbol(alphabet)


def _group_value(group, order):
    if order == BitOrder.LSB_FIRST:
        group = reversed(group)
    value = 0
    for b in group:
        value = (value << 1) | b
    return value


def _value_group(value, width, order):
    group = [(value >> (width - 1 - i)) & 1 for i in range(width)]
    if order == BitOrder.LSB_FIRST:
        group.reverse()
    return group


def encode_bits(bits, alphabet, order=BitOrder.MSB_FIRST):
    """Map a bit string to the ordered protocol labels of the channel.
    Bit groups of the symbol width are consumed left to right; each group selects the label whose index
    equals the group's value read in `order`.

    :Parameters:
        * **bits** (:obj:`str` or :obj:`list`): Bits to transfer. Length must be a multiple of the symbol width.
        * **alphabet** (:obj:`ProtocolAlphabet` or :obj:`list`): Protocol alphabet.
        * **order** (:obj:`BitOrder`): Bit order inside a symbol (defaults MSB_FIRST).

    :Example:
        >>> protochan.encode_bits('0011', ['ICMP', 'ARP'])
        ... ['ICMP', 'ICMP', 'ARP', 'ARP']

    :Returns:
        * :obj:`list`: Protocol labels, one per packet.
    """
    alphabet = _as_alphabet(alphabet)
    order = parse_bit_order(order)
    bits = parse_bits(bits)
    width = alphabet.width

    if len(bits) % width != 0:
        raise LengthNotMultiple(len(bits), width)

    return [alphabet.labels[_group_value(bits[i:i + width], order)] for i in range(0, len(bits), width)]


def decode_symbols(labels, alphabet, order=BitOrder.MSB_FIRST):
    """Inverse of :py:meth:`protochan.codec.encode_bits`.
    Labels outside the usable alphabet prefix raise :obj:`UnknownProtocol`: they mean the two endpoints are
    configured differently. Filtering foreign traffic is done by the receiver.

    :Parameters:
        * **labels** (:obj:`list`): Protocol labels in reception order.
        * **alphabet** (:obj:`ProtocolAlphabet` or :obj:`list`): Protocol alphabet.
        * **order** (:obj:`BitOrder`): Bit order inside a symbol (defaults MSB_FIRST).

    :Example:
        >>> protochan.decode_symbols(['ICMP', 'ICMP', 'ARP', 'ARP'], ['ICMP', 'ARP'])
        ... (0, 0, 1, 1)

    :Returns:
        * :obj:`tuple`: Decoded bits.
    """
    alphabet = _as_alphabet(alphabet)
    order = parse_bit_order(order)
    width = alphabet.width

    bits = []
    for position, label in enumerate(labels):
        idx = alphabet.index(label)
        if idx is None:
            raise UnknownProtocol(label, position)
        bits.extend(_value_group(idx, width, order))
    return tuple(bits)
