# Licensed under an MIT open source license - see LICENSE

import json
import sys

import numpy as np
from astropy.table import Table


__all__ = ['write_csv', 'write_metadata', 'read_csv', 'float_format']


float_format = '%.17g'


def write_csv(table, output_name, metadata=None):
    '''
    Write a table as RFC-4180 style CSV with a header row. Floating-point
    columns are printed with 17 significant digits so values round-trip.

    Parameters
    ----------
    table : `~astropy.table.Table`
        Table to write.
    output_name : str or None
        Path of the CSV file. Existing files are overwritten. With None the
        table goes to standard output.
    metadata : dict, optional
        Run metadata written to ``<output_name>.meta.json``.
    '''

    if not isinstance(table, Table):
        raise TypeError("table must be an astropy.table.Table.")

    formats = {name: float_format for name in table.colnames
               if np.issubdtype(table[name].dtype, np.floating)}

    if output_name is None:
        table.write(sys.stdout, format='ascii.csv', formats=formats)
        return

    table.write(output_name, format='ascii.csv', formats=formats,
                overwrite=True)

    if metadata is not None:
        write_metadata(metadata, output_name + ".meta.json")


def write_metadata(metadata, output_name):
    '''
    Write a metadata dictionary as sorted JSON.
    '''
    with open(output_name, 'w') as output:
        json.dump(_to_builtin(metadata), output, sort_keys=True, indent=2)
        output.write("\n")


def read_csv(input_name):
    '''
    Read a CSV written by `write_csv`.
    '''
    return Table.read(input_name, format='ascii.csv')


def _to_builtin(value):
    if isinstance(value, dict):
        return {str(key): _to_builtin(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(val) for val in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value
