"""molbench: benchmark molecular representations with Bayesian pairwise ranking."""

__version__ = "0.1.0"
