"""Equivariant exceptional collections on moduli of weighted pointed rational curves.

Exact computations: enumeration of the collections, pairwise verification of
exceptionality via GIT windows and SL2-invariant cohomology, fullness
certificates, a K-theory rank oracle and symmetric-group decompositions.
"""

from .enumeration import Collection, CollectionObject, Space, Tag, Variant, check_equivariance, enumerate_collection
from .equivariant import decompose, orbits
from .fullness import certify, check_certificate, expand
from .ktheory import HassettWeights, rank_hassett, rank_mpq
from .labels import MarkingSplit, PairLE
from .verify import verify_collection

__all__ = [
    "Collection",
    "CollectionObject",
    "HassettWeights",
    "MarkingSplit",
    "PairLE",
    "Space",
    "Tag",
    "Variant",
    "certify",
    "check_certificate",
    "check_equivariance",
    "decompose",
    "enumerate_collection",
    "expand",
    "orbits",
    "rank_hassett",
    "rank_mpq",
    "verify_collection",
]

__version__ = "0.1.0"
