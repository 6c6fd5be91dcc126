"""Ramsey-type numbers for regular induced subgraphs.

Exhaustive isomorph-free generation of graphs with no induced regular
subgraph of a given order, explicit extremal constructions, and numeric
checks of the random-graph lower bound.
"""

from .canon import canon_bytes, canonical, is_isomorphic
from .genpath import CountsTable, GenOptions, generate
from .graph import Graph, build, complement, g6_decode, g6_encode
from .regcheck import Mode, find_induced_regular, in_family, in_req, in_rge

__version__ = "0.1.0"

__all__ = [
    "CountsTable",
    "GenOptions",
    "Graph",
    "Mode",
    "build",
    "canon_bytes",
    "canonical",
    "complement",
    "find_induced_regular",
    "g6_decode",
    "g6_encode",
    "generate",
    "in_family",
    "in_req",
    "in_rge",
    "is_isomorphic",
]
