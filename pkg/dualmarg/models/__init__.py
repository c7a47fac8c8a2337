# Licensed under an MIT open source license - see LICENSE

from .graph import *
from .factors import *
