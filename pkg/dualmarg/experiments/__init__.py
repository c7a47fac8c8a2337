# Licensed under an MIT open source license - see LICENSE

from .experiment import *
from .curves import *
