"""Core modules: records, arithmetic, configuration and errors"""

from .state import *
from .exceptions import *
from .arith import carmichael_lambda, euler_phi, factorize, is_probable_prime, pow_mod
from .config import load_settings
