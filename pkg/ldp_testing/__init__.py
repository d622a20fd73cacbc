__version__ = '1.0.0'
from .settings import *
from .enums import *
from .exceptions import *
from .distributions import *
from .hadamard import *
from .mechanisms import *
from .testers import *
from .theory import *
