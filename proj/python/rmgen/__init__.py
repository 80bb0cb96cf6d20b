"""Random Markov generators L = X - delta*D and their limiting spectral laws.

Laws are dicts in the run-config vocabulary, e.g.
``{"kind": "shifted_exponential", "rate": 1, "shift": -1}``; covariances K are
``(k11, k12, k22)`` tuples.
"""
from ._rmgen import *  # noqa: F401,F403
from ._rmgen import ConfigError, NumericalError  # noqa: F401

__version__ = "0.1.0"
