# Licensed under an MIT open source license - see LICENSE

from .output import *
from .model_input import *
