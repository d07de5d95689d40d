"""Legal systems on graphs.

Build, decide and verify legal systems (an initial vertex set plus one move
per vertex whose GF(2) span keeps both sides of every translate connected),
together with random-graph models, pseudorandomness checks and exact
binomial tools.
"""

__version__ = "0.1.0"

from .graph import Graph, GraphFormatError, Matching, complement, is_connected_subset
from .legal import LegalityCertificate, MoveSet, is_legal_state, validate_moves, verify
from .rng import RandomStream
from .search import exists_legal_system

__all__ = [
    "Graph",
    "GraphFormatError",
    "LegalityCertificate",
    "Matching",
    "MoveSet",
    "RandomStream",
    "complement",
    "exists_legal_system",
    "is_connected_subset",
    "is_legal_state",
    "validate_moves",
    "verify",
]
