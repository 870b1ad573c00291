"""Molecular graphs: SMILES parsing, ring perception, scaffolds, distances."""

from .model import Atom, Bond, BondOrder, Molecule, induced_subgraph
from .parser import (
    EmptyFragmentError,
    SmilesParseError,
    UnclosedRingError,
    UnknownElementError,
    UnmatchedParenthesisError,
    parse_smiles,
)
from .perception import (
    UNREACHABLE,
    ValenceError,
    assign_implicit_hydrogens,
    bridge_bonds,
    perceive_rings,
    shortest_path_distances,
)
from .scaffold import (
    EMPTY_SCAFFOLD_KEY,
    Scaffold,
    largest_fragment,
    murcko_scaffold,
    scaffold_key,
)

__all__ = [
    "Atom",
    "Bond",
    "BondOrder",
    "Molecule",
    "Scaffold",
    "EMPTY_SCAFFOLD_KEY",
    "UNREACHABLE",
    "parse_smiles",
    "perceive_rings",
    "assign_implicit_hydrogens",
    "bridge_bonds",
    "shortest_path_distances",
    "murcko_scaffold",
    "scaffold_key",
    "largest_fragment",
    "induced_subgraph",
    "SmilesParseError",
    "UnclosedRingError",
    "UnmatchedParenthesisError",
    "UnknownElementError",
    "EmptyFragmentError",
    "ValenceError",
]
