# Licensed under an MIT open source license - see LICENSE

import os

from astropy import config as _config

from .exceptions import ValidationError

__all__ = ['__version__', 'conf', 'Conf']

try:
    from .version import version as __version__
except ImportError:
    __version__ = ''


class Conf(_config.ConfigNamespace):
    """
    Configuration parameters for `dualmarg`.
    """

    enumeration_budget = _config.ConfigItem(
        2**24,
        "Largest number of weighted terms the exact oracles may enumerate.",
        cfgtype='integer')
    chunk_size = _config.ConfigItem(
        2**16,
        "Number of configurations enumerated per vectorized block.",
        cfgtype='integer')
    real_tolerance = _config.ConfigItem(
        1e-12,
        "Imaginary parts below this value are dropped after a DFT.",
        cfgtype='float')
    bp_damping = _config.ConfigItem(
        0.5, "Default message damping for belief propagation.",
        cfgtype='float')
    bp_tol = _config.ConfigItem(
        1e-9, "Default L-infinity message tolerance for belief propagation.",
        cfgtype='float')
    bp_max_iter = _config.ConfigItem(
        10000, "Default iteration cap for belief propagation.",
        cfgtype='integer')
    swp_batches = _config.ConfigItem(
        50, "Number of batches used for batch-means standard errors.",
        cfgtype='integer')
    num_threads = _config.ConfigItem(
        1,
        "Worker threads for experiments. Overridden by the "
        "DUALMARG_NUM_THREADS environment variable.",
        cfgtype='integer')


conf = Conf()


def get_num_threads():
    '''
    Number of worker threads, with the environment variable taking
    precedence over the configuration item.
    '''
    env_value = os.environ.get("DUALMARG_NUM_THREADS")
    if env_value is None:
        return max(int(conf.num_threads), 1)

    try:
        value = int(env_value)
    except ValueError:
        raise ValidationError("DUALMARG_NUM_THREADS must be an integer. "
                              "Found {}".format(env_value))
    return max(value, 1)
