# Licensed under an MIT open source license - see LICENSE
