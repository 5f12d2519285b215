"""Transversal oriented paths and cycles in collections of tournaments.

Submodules:

* :mod:`transversal.core` - tournaments, collections, patterns, embeddings, validators;
* :mod:`transversal.rng` - the documented SplitMix64 generator and instance models;
* :mod:`transversal.order` - median orders and their interval properties;
* :mod:`transversal.hpartition` - balanced vertices and H-partitions;
* :mod:`transversal.pattern` - blocks, oscillation and DO-decompositions;
* :mod:`transversal.broom` - brooms and near-rainbow colorings;
* :mod:`transversal.solver` - exact search, the oracle, sweeps and absorption;
* :mod:`transversal.harness` and :mod:`transversal.cli` - suites and the command line.
"""
from __future__ import annotations

from .core import (
    Digraph,
    OrientationPattern,
    ParameterError,
    RainbowEmbedding,
    Report,
    SizeError,
    Tournament,
    TournamentCollection,
    validate_embedding,
)
from .soundness import SoundnessError

__version__ = "0.1.0"

__all__ = [
    "Digraph",
    "OrientationPattern",
    "ParameterError",
    "RainbowEmbedding",
    "Report",
    "SizeError",
    "SoundnessError",
    "Tournament",
    "TournamentCollection",
    "validate_embedding",
]
