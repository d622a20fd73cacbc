from .base import *
from .randomized_response import *
from .rappor import *
from .hadamard_response import *
from .raptor import *
from .channels import *
