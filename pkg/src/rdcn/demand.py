"""Demand matrices and the saturation predicate.

A demand matrix holds nonnegative rates in bits/second between every
ordered ToR pair. It is saturated when each row sums to the node's
outgoing capacity and each column to its incoming capacity; saturated
matrices probe the maximum routable demand.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import SpecValidationError

_SAT_TOL = 1e-9


@dataclass(frozen=True)
class DemandMatrix:
    rates: np.ndarray
    node_capacity: Optional[np.ndarray] = None

    def __post_init__(self):
        rates = np.asarray(self.rates, dtype=float)
        if rates.ndim != 2 or rates.shape[0] != rates.shape[1]:
            raise SpecValidationError("demand matrix must be square")
        if (rates < 0).any():
            raise SpecValidationError("demand rates must be nonnegative")
        rates = rates.copy()
        rates.flags.writeable = False
        object.__setattr__(self, "rates", rates)
        if self.node_capacity is not None:
            cap = np.asarray(self.node_capacity, dtype=float)
            if cap.shape != (rates.shape[0],):
                raise SpecValidationError("node capacity must have one entry per ToR")
            cap = cap.copy()
            cap.flags.writeable = False
            object.__setattr__(self, "node_capacity", cap)

    @property
    def num_tors(self) -> int:
        return self.rates.shape[0]

    def rate(self, s: int, d: int) -> float:
        return float(self.rates[s, d])

    def total(self) -> float:
        """Total demand M, self-pairs excluded."""
        return float(self.rates.sum() - np.trace(self.rates))

    def positive_pairs(self) -> Iterator[tuple[int, int, float]]:
        """(src, dst, rate) for every off-diagonal positive entry, sorted."""
        n = self.num_tors
        for s in range(n):
            for d in range(n):
                if s != d and self.rates[s, d] > 0:
                    yield s, d, float(self.rates[s, d])

    def is_saturated(self, tol: float = _SAT_TOL) -> bool:
        if self.node_capacity is None:
            raise SpecValidationError("saturation check needs node capacities")
        cap = self.node_capacity
        scale = np.maximum(1.0, cap)
        row = np.abs(self.rates.sum(axis=1) - cap) <= tol * scale
        col = np.abs(self.rates.sum(axis=0) - cap) <= tol * scale
        return bool(row.all() and col.all())


def _capacity_vector(num_tors: int, node_capacity) -> np.ndarray:
    cap = np.asarray(node_capacity, dtype=float)
    if cap.ndim == 0:
        cap = np.full(num_tors, float(cap))
    return cap


def permutation_demand(
    permutation: Sequence[int], node_capacity, num_tors: Optional[int] = None
) -> DemandMatrix:
    """Saturated demand sending each node's full capacity to its image."""
    perm = tuple(int(p) for p in permutation)
    n = num_tors if num_tors is not None else len(perm)
    if sorted(perm) != list(range(n)):
        raise SpecValidationError("demand permutation must be a bijection")
    cap = _capacity_vector(n, node_capacity)
    rates = np.zeros((n, n))
    for s, d in enumerate(perm):
        rates[s, d] = cap[s]
    return DemandMatrix(rates=rates, node_capacity=cap)


def uniform_demand(num_tors: int, node_capacity) -> DemandMatrix:
    """Saturated all-to-all demand, spread evenly over the other nodes."""
    if num_tors < 2:
        raise SpecValidationError("uniform demand needs at least two ToRs")
    cap = _capacity_vector(num_tors, node_capacity)
    if not np.allclose(cap, cap[0]):
        raise SpecValidationError("uniform demand requires equal node capacities")
    rates = np.full((num_tors, num_tors), cap[0] / (num_tors - 1))
    np.fill_diagonal(rates, 0.0)
    return DemandMatrix(rates=rates, node_capacity=cap)


def random_derangement(num_tors: int, seed: int) -> tuple[int, ...]:
    """Seeded fixed-point-free permutation (self-demand is free, so banned)."""
    if num_tors < 2:
        raise SpecValidationError("derangement needs at least two elements")
    rng = random.Random(seed)
    perm = list(range(num_tors))
    while True:
        rng.shuffle(perm)
        if all(perm[i] != i for i in range(num_tors)):
            return tuple(perm)


def random_permutation_demand(num_tors: int, node_capacity, seed: int) -> DemandMatrix:
    return permutation_demand(random_derangement(num_tors, seed), node_capacity)
