# Licensed under an MIT open source license - see LICENSE

from .exact import *
from .belief_propagation import *
