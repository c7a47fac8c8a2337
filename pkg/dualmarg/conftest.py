import os

try:
    from pytest_astropy_header.display import (PYTEST_HEADER_MODULES,
                                               TESTED_VERSIONS)
    ASTROPY_HEADER = True
except ImportError:
    ASTROPY_HEADER = False


def pytest_configure(config):

    if ASTROPY_HEADER:

        config.option.astropy_header = True

        # Packages whose versions are shown in the test header.
        for name in ('Pandas', 'Matplotlib', 'h5py'):
            PYTEST_HEADER_MODULES.pop(name, None)
        PYTEST_HEADER_MODULES['networkx'] = 'networkx'

        from . import __version__
        packagename = os.path.basename(os.path.dirname(__file__))
        TESTED_VERSIONS[packagename] = __version__
