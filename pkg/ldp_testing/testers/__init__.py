from .verdict import *
from .binary import *
from .closeness import *
from .uniformity import *
from .independence import *
