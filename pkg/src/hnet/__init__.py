"""Association networks for mixed-type tabular data.

The package tests every category of every discrete feature against every
other feature (categorical via the hypergeometric upper tail, numeric via
rank comparison), corrects the resulting p-values for multiple testing and
keeps the significant pairs as a weighted graph.  A small simulation and
scoring harness samples reference networks and measures how well the
detected graph recovers them.
"""

__version__ = "0.1.0"

from .errors import HnetError

__all__ = ["HnetError", "__version__"]
