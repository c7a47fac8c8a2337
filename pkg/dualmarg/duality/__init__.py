# Licensed under an MIT open source license - see LICENSE

from .mapping import *
from .fixed_points import *
from .onsager import *
