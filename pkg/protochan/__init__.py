from .codec import *
from .textcodec import *
from .data import *
from .simchannel import *
from .detector import *
from .cli import ExperimentConfig
from .misc import _get_config as get_config
from .misc import (ProtochanError, AlphabetTooSmall, InvalidAlphabet, LengthNotMultiple, UnknownProtocol,
                   CodeOutOfRange, InvalidParameter, InvalidConfig, ConfigError, MalformedRecord, EmptyTrace,
                   NotEnoughProtocols, WindowLargerThanTrace, write, verbose_display)

__version__ = '1.0.0'
