from .instances import *
from .config import *
from .report import *
from .runner import *
from .calibrate import *
