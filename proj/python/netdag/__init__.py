"""Sparse Gaussian DAG learning from network-correlated observations."""

try:
    from netdag._netdag import *  # noqa: F401,F403  (installed layout)
    from netdag._netdag import __version__  # noqa: F401
except ImportError:  # build-tree layout: the extension sits on sys.path directly
    from _netdag import *  # noqa: F401,F403
    from _netdag import __version__  # noqa: F401
