# Licensed under an MIT open source license - see LICENSE
'''
Primal and dual normal-factor-graph inference for Ising and Potts models.
'''

from ._astropy_init import __version__, conf, get_num_threads

from .exceptions import *
from .models import *
from .inference import *
from .duality import *
from .sampling import *
from .io import load_model, write_csv
from .experiments import *
