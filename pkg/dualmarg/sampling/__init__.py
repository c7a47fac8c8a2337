# Licensed under an MIT open source license - see LICENSE

from .subgraphs_world import *
