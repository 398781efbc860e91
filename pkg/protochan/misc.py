import os
import json

from tqdm import tqdm


########################################################################################################################
# Errors

class ProtochanError(ValueError):
    """Base class for all errors raised by protochan."""


class AlphabetTooSmall(ProtochanError):
    def __init__(self, size):
        self.size = size
        super().__init__(f"A protocol alphabet needs at least 2 protocols. Got {size}.")


class InvalidAlphabet(ProtochanError):
    pass


class LengthNotMultiple(ProtochanError):
    def __init__(self, length, width):
        self.length = length
        self.width = width
        super().__init__(f"Bit string length {length} is not a multiple of the symbol width {width}.")


class UnknownProtocol(ProtochanError):
    def __init__(self, label, position):
        self.label = label
        self.position = position
        super().__init__(f"Protocol '{label}' at position {position} is not part of the usable alphabet.")


class CodeOutOfRange(ProtochanError):
    def __init__(self, code):
        self.code = code
        super().__init__(f"Character code must be in 0..31. Got {code}.")


class InvalidParameter(ProtochanError):
    pass


class InvalidConfig(ProtochanError):
    def __init__(self, message, field=None):
        self.field = field
        super().__init__(message)


class ConfigError(ProtochanError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class MalformedRecord(ProtochanError):
    def __init__(self, line_number, line, reason=''):
        self.line_number = line_number
        self.line = line
        self.reason = reason
        super().__init__(f"Malformed trace record on line {line_number}: {reason}. Got: {line.rstrip()}")


class EmptyTrace(ProtochanError):
    def __init__(self, message='The trace does not contain any packet.'):
        super().__init__(message)


class NotEnoughProtocols(ProtochanError):
    def __init__(self, available, k):
        self.available = available
        self.k = k
        super().__init__(f"Cannot select {k} protocols from a profile with {available} protocols (k must be >= 2).")


class WindowLargerThanTrace(ProtochanError):
    def __init__(self, window_size, length):
        self.window_size = window_size
        self.length = length
        super().__init__(f"Window size {window_size} is larger than the trace ({length} packets).")


########################################################################################################################
# Get config file

def _get_config(config={}):
    """Load a configuration, either a :obj:`dict` used as-is or the path to a JSON file.

    :Parameters:
        * **config** (:obj:`dict` or :obj:`str`): Configuration or path to the JSON configuration file (defaults {}).

    :Example:
        >>> protochan.get_config('/path/to/experiment.json')
        ... {'message': 'HELLO', 'alphabet': ['ICMP', 'ARP']}

    :Returns:
        * :obj:`dict`: Parsed configuration.
    """
    if isinstance(config, dict):
        return dict(config)

    path = os.path.expanduser(str(config))
    try:
        with open(path) as config_file:
            loaded = json.load(config_file)
    except FileNotFoundError:
        raise ConfigError(f"Could not find the config file {path}.")
    except json.JSONDecodeError as err:
        raise ConfigError(f"Could not parse {path}: {err.msg} (column {err.colno}).", line=err.lineno)

    if not isinstance(loaded, dict):
        raise ConfigError(f"The config file {path} must contain a JSON object. Got {type(loaded).__name__}.", line=1)
    return loaded


########################################################################################################################
# Write to a txt file

def write(file, path, perm='w', end_row='\n'):
    """Write a block of text into a file, creating the parent folder when needed.

    :Parameters:
        * **file** (:obj:`str`): Text to be written.
        * **path** (:obj:`str`): File on which to write.
        * **perm** (:obj:`str`): Permission to use when opening file ('a' to append, 'w' to (re)write the file, defaults 'w').
        * **end_row** (:obj:`str`): Character to end the text (defaults '\\n').

    :Example:
        >>> protochan.write('ICMP', path='/tmp/labels.txt')
    """
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)

    text = file if file.endswith(end_row) else file + end_row
    with open(path, perm) as f:
        f.write(text)


########################################################################################################################
# Display tqdm only if argument for verbosity is 1 (works for lists, range and str)

def verbose_display(element, verbose=True, end='\n', file=None):
    """Extended print function with tqdm display for loops.
    Also has argument verbose for automated scripts with overall verbosity argument.

    :Parameters:
        * **element** (:obj:`str`): The element to be displayed. Can either be str, range, list.
        * **verbose** (:obj:`bool`): Display the element or not (defaults True).
        * **end** (:obj:`str`): How to end the display (defaults '\\n').
        * **file** (:obj:`file`): Stream to print to, standard output when None (defaults None).

    :Example:
        >>> for seed in protochan.verbose_display(range(200)):
        >>>     run(seed)
        ... 100%|#######################################| 200/200 [00:00<00:00, 2111.68it/s]

    :Returns:
        :obj:`str`: The element to be displayed.
    """
    if verbose and isinstance(element, (list, range)):
        return(tqdm(element))
    elif verbose and isinstance(element, str):
        return(print(element, end=end, file=file))
    elif not verbose and isinstance(element, (str, type(None))):
        return None
    else:
        return(element)
