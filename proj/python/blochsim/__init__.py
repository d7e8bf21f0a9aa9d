try:
    from ._blochsim import *  # noqa: F401,F403
    from ._blochsim import __version__  # noqa: F401
except ImportError:  # in-tree builds put the extension directly on sys.path
    from _blochsim import *  # noqa: F401,F403
    from _blochsim import __version__  # noqa: F401
