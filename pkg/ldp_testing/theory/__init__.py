from .reports import *
from .subsets import *
from .rappor_moments import *
from .lower_bound import *
from .structural import *
from .suite import *
