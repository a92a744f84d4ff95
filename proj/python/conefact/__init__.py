try:
    from ._conefact import *  # noqa: F401,F403  (installed layout)
    from ._conefact import __version__  # noqa: F401
except ImportError:  # in-tree build: extension on PYTHONPATH next to the package
    from _conefact import *  # noqa: F401,F403
    from _conefact import __version__  # noqa: F401
