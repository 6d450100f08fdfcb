"""Upper bounds on Ramsey numbers: evaluators, certified verification of the
exponent iteration, parameter search, and executable clique descents."""

__version__ = "0.1.0"
