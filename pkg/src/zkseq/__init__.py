"""Sequencings and t-weak sequencings of subsets of Z_k.

Core layout:

- ``zk``            residue arithmetic, ground sets
- ``dissociation``  dissociated sets, dimension, subset sums
- ``rectification`` unit-dilation search (pigeonhole and exhaustive)
- ``structure``     decomposition of a set into P, N and dissociated blocks
- ``pn_ordering``   orderings of the positive/negative parts
- ``pipeline``      block splitting, sampling, resampling, assembly
- ``verify``        validators for orderings, sequencings, t-weak sequencings
- ``oracle``        exhaustive search and census for small instances
- ``mc``            Monte Carlo estimators and budget reports
- ``service``       FastAPI app exposing the above
- ``cli``           command-line client
"""

__version__ = "0.1.0"
