# Licensed under an MIT open source license - see LICENSE

import pickle
from copy import deepcopy

from .io.output import write_csv


class BaseResultMixIn(object):
    """
    Common behaviour of all result containers.
    """

    # Attributes dropped when saving without the heavy arrays.
    _bulky_attributes = ()

    def to_table(self):
        raise NotImplementedError("Result classes must define to_table.")

    def write_csv(self, output_name, metadata=None):
        '''
        Write `to_table` to a CSV file.

        Parameters
        ----------
        output_name : str
            Path of the CSV file.
        metadata : dict, optional
            Written to a ``<output_name>.meta.json`` sidecar when given.
        '''
        write_csv(self.to_table(), output_name, metadata=metadata)

    def save_results(self, output_name, keep_data=False):
        '''
        Save the result to avoid re-computing.
        The bulky arrays are not included by default.

        Parameters
        ----------
        output_name : str
            Name of the outputted pickle file.
        keep_data : bool, optional
            Keep the bulky attributes in the pickle file when enabled.
        '''

        if not output_name.endswith(".pkl"):
            output_name += ".pkl"

        self_copy = deepcopy(self)

        if not keep_data:
            for attr in self._bulky_attributes:
                if hasattr(self_copy, attr):
                    setattr(self_copy, attr, None)

        with open(output_name, 'wb') as output:
            pickle.dump(self_copy, output, -1)

    @staticmethod
    def load_results(pickle_file):
        '''
        Load in a saved pickle file.

        Parameters
        ----------
        pickle_file : str
            Name of filename to load in.

        Returns
        -------
        self : Saved result class
            Result instance with saved results.
        '''

        with open(pickle_file, 'rb') as input_file:
            self = pickle.load(input_file)

        return self
