"""Ring-system scaffolds and permutation-invariant 64-bit scaffold keys."""

from __future__ import annotations

from dataclasses import dataclass

from ..hashing import hash_ints
from .model import BondOrder, Molecule, induced_subgraph
from .perception import assign_implicit_hydrogens, perceive_rings

_TAG_ATOM = 1
_TAG_REFINE = 2
_TAG_KEY = 3

#: key reserved for the empty scaffold
EMPTY_SCAFFOLD_KEY = 0


@dataclass(frozen=True)
class Scaffold:
    """Ring systems plus connecting linkers; empty for acyclic molecules."""

    molecule: Molecule
    key: int

    @property
    def is_empty(self) -> bool:
        return self.molecule.n_atoms == 0


def murcko_scaffold(mol: Molecule) -> Scaffold:
    """Strip side chains down to rings and linkers.

    Non-ring atoms of degree <= 1 are deleted iteratively; atoms attached to
    the retained core by a double or triple bond are kept (e.g. exocyclic
    carbonyl oxygens). Requires ring flags, which parse_smiles assigns.
    """
    removed = [False] * mol.n_atoms
    degree = [mol.heavy_degree(i) for i in range(mol.n_atoms)]
    queue = [
        i
        for i in range(mol.n_atoms)
        if degree[i] <= 1 and not mol.atoms[i].in_ring
    ]
    while queue:
        atom = queue.pop()
        if removed[atom] or degree[atom] > 1 or mol.atoms[atom].in_ring:
            continue
        removed[atom] = True
        for nbr, _ in mol.neighbors[atom]:
            if removed[nbr]:
                continue
            degree[nbr] -= 1
            if degree[nbr] <= 1 and not mol.atoms[nbr].in_ring:
                queue.append(nbr)

    core = {i for i in range(mol.n_atoms) if not removed[i]}
    if not core:
        return Scaffold(Molecule([], []), EMPTY_SCAFFOLD_KEY)

    attached = {
        nbr
        for atom in core
        for nbr, bond_idx in mol.neighbors[atom]
        if nbr not in core
        and mol.bonds[bond_idx].order in (BondOrder.DOUBLE, BondOrder.TRIPLE)
    }
    scaffold_mol = induced_subgraph(mol, core | attached)
    scaffold_mol = assign_implicit_hydrogens(perceive_rings(scaffold_mol))
    return Scaffold(scaffold_mol, _wl_graph_key(scaffold_mol))


def scaffold_key(scaffold: Scaffold) -> int:
    """Recompute the scaffold's 64-bit key from its molecule."""
    if scaffold.is_empty:
        return EMPTY_SCAFFOLD_KEY
    return _wl_graph_key(scaffold.molecule)


def _partition(labels: list[int]) -> tuple:
    groups: dict[int, list[int]] = {}
    for i, label in enumerate(labels):
        groups.setdefault(label, []).append(i)
    return tuple(sorted(tuple(members) for members in groups.values()))


def _wl_graph_key(mol: Molecule) -> int:
    """Iterated neighborhood hashing to a stable partition, order-free combine.

    Isomorphic graphs always map to equal keys; distinct graphs may collide
    only through 64-bit hash collisions or WL-indistinguishability, both
    negligible for scaffold grouping.
    """
    n = mol.n_atoms
    if n == 0:
        return EMPTY_SCAFFOLD_KEY
    labels = [
        hash_ints(
            _TAG_ATOM,
            atom.atomic_number,
            atom.formal_charge,
            atom.isotope or 0,
            int(atom.aromatic),
        )
        for atom in mol.atoms
    ]
    for _ in range(n):
        previous = _partition(labels)
        refreshed = []
        for i in range(n):
            tokens = sorted(
                (int(mol.bonds[bond_idx].order), labels[nbr])
                for nbr, bond_idx in mol.neighbors[i]
            )
            flat = [_TAG_REFINE, labels[i]]
            for order, label in tokens:
                flat.extend((order, label))
            refreshed.append(hash_ints(*flat))
        labels = refreshed
        if _partition(labels) == previous:
            break
    key = hash_ints(_TAG_KEY, n, mol.n_bonds, *sorted(labels))
    return key if key != EMPTY_SCAFFOLD_KEY else 1


def largest_fragment(mol: Molecule) -> Molecule:
    """Keep only the biggest connected component (ties: lowest fragment id)."""
    if mol.fragment_count <= 1:
        return mol
    sizes = [0] * mol.fragment_count
    for frag_id in mol.fragment_ids:
        sizes[frag_id] += 1
    best = max(range(mol.fragment_count), key=lambda f: (sizes[f], -f))
    keep = [i for i in range(mol.n_atoms) if mol.fragment_ids[i] == best]
    return induced_subgraph(mol, keep)
