"""Design and analysis toolkit for periodic reconfigurable datacenter networks.

Public surface, by concern:

- ``core``: periodic evolving graphs, temporal paths/flows, the emulated
  static graph and the conversions between the two flow formulations.
- ``topology``: deBruijn / complete / random-regular emulated graphs and
  their decomposition into periodic switch matchings.
- ``analytics``: closed-form throughput, delay, and buffer bounds plus the
  degree solvers under delay or buffer budgets.
- ``oracle``: exact desk-scale max-concurrent-flow ground truth in both
  the static and the time-expanded formulation.
- ``sim``: slotted-time finite-buffer flow simulator with two-hop load
  balancing.
- ``cli``: the ``rdcn`` command-line entry point.
"""

from . import analytics, core, demand, oracle, sim, topology
from .core import (
    EmulatedGraph,
    PeriodicEvolvingGraph,
    TemporalFlow,
    TemporalPath,
    WeightedDigraph,
    build_periodic_graph,
    emulated_graph,
    simple_emulated_graph,
)
from .demand import DemandMatrix, permutation_demand, uniform_demand

__all__ = [
    "analytics",
    "core",
    "demand",
    "oracle",
    "sim",
    "topology",
    "EmulatedGraph",
    "PeriodicEvolvingGraph",
    "TemporalFlow",
    "TemporalPath",
    "WeightedDigraph",
    "build_periodic_graph",
    "emulated_graph",
    "simple_emulated_graph",
    "DemandMatrix",
    "permutation_demand",
    "uniform_demand",
]

__version__ = "0.1.0"
