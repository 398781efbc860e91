import string
from typing import NamedTuple

from .misc import CodeOutOfRange, InvalidParameter


__all__ = ['CHAR_TABLE', 'EOT_CODE', 'SUBSTITUTE_CODE', 'UNIT_BITS', 'Diagnostic', 'DecodedText',
           'char_to_code', 'code_to_char', 'canonical', 'parity_bit', 'encode_text', 'decode_text']


########################################################################################################################
# Wire format constants

# Code 31 is the end-of-message sentinel, never a character.
CHAR_TABLE = tuple(string.ascii_uppercase) + (' ', '.', ',', '?', '-')
EOT_CODE = 31
SUBSTITUTE_CODE = 29
CODE_BITS = 5
UNIT_BITS = 6

_CODES = {ch: code for code, ch in enumerate(CHAR_TABLE)}


class Diagnostic(NamedTuple):
    """Decoding anomaly. `kind` is 'parity', 'missing_eot' or 'trailing'; `unit` is the 6-bit unit index."""
    kind: str
    unit: int


class DecodedText(NamedTuple):
    text: str
    diagnostics: list

    @property
    def parity_failures(self):
        return [d.unit for d in self.diagnostics if d.kind == 'parity']

    @property
    def missing_eot(self):
        return any(d.kind == 'missing_eot' for d in self.diagnostics)

    @property
    def trailing(self):
        return any(d.kind == 'trailing' for d in self.diagnostics)


########################################################################################################################
# Characters

def char_to_code(ch):
    """5-bit code of a character. Letters are case-insensitive; unmapped characters become '?' (29).

    :Example:
        >>> protochan.char_to_code('a')
        ... 0
        >>> protochan.char_to_code('%')
        ... 29
    """
    return _CODES.get(ch.upper(), SUBSTITUTE_CODE) if len(ch) == 1 else SUBSTITUTE_CODE


def code_to_char(code):
    if not 0 <= code <= EOT_CODE:
        raise CodeOutOfRange(code)
    if code == EOT_CODE:
        raise InvalidParameter("Code 31 is the end-of-message sentinel and has no character.")
    return CHAR_TABLE[code]


def canonical(text):
    """Form a message takes after a lossless roundtrip: uppercased, unmapped characters replaced by '?'."""
    return ''.join(CHAR_TABLE[char_to_code(ch)] for ch in text)


def parity_bit(code):
    """Even parity bit of a 5-bit code (XOR of its bits).

    :Example:
        >>> protochan.parity_bit(27)
        ... 0
    """
    if isinstance(code, bool) or not isinstance(code, int) or not 0 <= code <= EOT_CODE:
        raise CodeOutOfRange(code)
    return bin(code).count('1') & 1


def _unit(code):
    return [(code >> (CODE_BITS - 1 - i)) & 1 for i in range(CODE_BITS)] + [parity_bit(code)]


########################################################################################################################
# Messages

def encode_text(text, pad_to=1):
    """Encode a message to the channel payload.
    Each character becomes 5 code bits (MSB first) followed by its parity bit. The message is closed by the
    end-of-message unit (111111) and zero-padded to a multiple of `pad_to` bits.

    :Parameters:
        * **text** (:obj:`str`): Message to be encoded.
        * **pad_to** (:obj:`int`): Channel symbol width, the output length is a multiple of it (defaults 1).

    :Example:
        >>> protochan.format_bits(protochan.encode_text('A'))
        ... '000000111111'

    :Returns:
        * :obj:`tuple`: Payload bits.
    """
    if isinstance(pad_to, bool) or not isinstance(pad_to, int) or pad_to < 1:
        raise InvalidParameter(f"pad_to must be an integer >= 1. Got {pad_to!r}.")

    bits = []
    for ch in text:
        bits.extend(_unit(char_to_code(ch)))
    bits.extend(_unit(EOT_CODE))
    bits.extend([0] * (-len(bits) % pad_to))
    return tuple(bits)


def decode_text(bits, pad_to=None):
    """Decode a channel payload back to text.
    Units are read 6 bits at a time until the first end-of-message unit with valid parity. Units failing the
    parity check decode to '?' and are reported. Decoding never fails: every anomaly becomes a diagnostic.

    :Parameters:
        * **bits** (:obj:`list`): Received payload bits.
        * **pad_to** (:obj:`int`): Symbol width used by the sender. When given, bits left after the
          end-of-message unit that cannot be zero padding are reported as 'trailing' (defaults None, trailing
          bits are ignored).

    :Example:
        >>> protochan.decode_text(protochan.parse_bits('000001111111'))
        ... DecodedText(text='?', diagnostics=[Diagnostic(kind='parity', unit=0)])

    :Returns:
        * :obj:`DecodedText`: Text and the list of diagnostics.
    """
    bits = tuple(bits)
    chars = []
    diagnostics = []
    n_units = len(bits) // UNIT_BITS

    for unit_idx in range(n_units):
        unit = bits[unit_idx * UNIT_BITS:(unit_idx + 1) * UNIT_BITS]
        code = 0
        for b in unit[:CODE_BITS]:
            code = (code << 1) | b
        valid = parity_bit(code) == unit[CODE_BITS]

        if valid and code == EOT_CODE:
            rest = bits[(unit_idx + 1) * UNIT_BITS:]
            if pad_to is not None and (len(rest) >= pad_to or any(rest)):
                diagnostics.append(Diagnostic('trailing', unit_idx + 1))
            return DecodedText(''.join(chars), diagnostics)

        if valid:
            chars.append(CHAR_TABLE[code])
        else:
            chars.append(CHAR_TABLE[SUBSTITUTE_CODE])
            diagnostics.append(Diagnostic('parity', unit_idx))

    diagnostics.append(Diagnostic('missing_eot', n_units))
    return DecodedText(''.join(chars), diagnostics)
