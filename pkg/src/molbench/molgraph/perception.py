"""Ring perception, simplified aromaticity, implicit hydrogens, distances."""

from __future__ import annotations

from collections import deque
from dataclasses import replace

import numpy as np

from .model import (
    AROMATIC_PI_DONORS,
    ORDER_VALENCE,
    ORGANIC_VALENCES,
    Atom,
    Bond,
    BondOrder,
    Molecule,
)

#: sentinel distance between atoms in different fragments
UNREACHABLE = -1

_KEKULE_RING_ELEMENTS = frozenset({6, 7, 8, 16})  # C, N, O, S


class ValenceError(ValueError):
    """Bond order sum exceeds every allowed valence of an organic-subset atom."""

    def __init__(self, message: str, offset: int = -1):
        super().__init__(message)
        self.offset = offset


def bridge_bonds(mol: Molecule) -> set[int]:
    """Indices of cut edges, found by iterative DFS low-link."""
    n = mol.n_atoms
    disc = [-1] * n
    low = [0] * n
    bridges: set[int] = set()
    timer = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        # stack entries: (atom, incoming bond index, neighbor iterator position)
        stack = [(root, -1, 0)]
        disc[root] = low[root] = timer
        timer += 1
        while stack:
            atom, in_bond, pos = stack[-1]
            if pos < len(mol.neighbors[atom]):
                stack[-1] = (atom, in_bond, pos + 1)
                nbr, bond_idx = mol.neighbors[atom][pos]
                if bond_idx == in_bond:
                    continue
                if disc[nbr] == -1:
                    disc[nbr] = low[nbr] = timer
                    timer += 1
                    stack.append((nbr, bond_idx, 0))
                else:
                    low[atom] = min(low[atom], disc[nbr])
            else:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[atom])
                    if low[atom] > disc[parent]:
                        bridges.add(in_bond)
    return bridges


def _simple_six_cycles(mol: Molecule) -> list[list[int]]:
    """All simple 6-cycles, each as an atom list; deduplicated by atom set."""
    cycles: list[list[int]] = []
    seen: set[frozenset[int]] = set()
    n = mol.n_atoms

    def extend(path: list[int], on_path: set[int]) -> None:
        last = path[-1]
        for nbr, _ in mol.neighbors[last]:
            if len(path) == 6:
                if nbr == path[0]:
                    key = frozenset(path)
                    if key not in seen:
                        seen.add(key)
                        cycles.append(list(path))
                continue
            # only grow toward indices >= root to avoid re-finding cycles
            if nbr in on_path or nbr < path[0]:
                continue
            path.append(nbr)
            on_path.add(nbr)
            extend(path, on_path)
            on_path.discard(nbr)
            path.pop()

    for start in range(n):
        extend([start], {start})
    return cycles


def _bond_index(mol: Molecule, a: int, b: int) -> int:
    for nbr, bond_idx in mol.neighbors[a]:
        if nbr == b:
            return bond_idx
    raise KeyError((a, b))


def perceive_rings(mol: Molecule) -> Molecule:
    """Assign in_ring flags and normalize aromaticity.

    A bond is in a ring iff it is not a bridge. Aromaticity is simplified
    and per-ring: atoms flagged aromatic on input stay aromatic only inside
    rings, and any 6-cycle of alternating single/double bonds among C/N/O/S
    (a 6 pi-electron Huckel ring) is rewritten to aromatic atoms and bonds.
    Fused-system aromaticity beyond single rings is not perceived.
    """
    bridges = bridge_bonds(mol)
    bond_in_ring = [i not in bridges for i in range(mol.n_bonds)]
    atom_aromatic = [a.aromatic for a in mol.atoms]
    bond_order = [b.order for b in mol.bonds]

    # input-flagged aromatic atoms survive only inside rings
    for i, atom in enumerate(mol.atoms):
        if atom.aromatic and not any(
            bond_in_ring[bond_idx] for _, bond_idx in mol.neighbors[i]
        ):
            atom_aromatic[i] = False

    # Kekule normalization: alternating 6-cycles become aromatic
    for cycle in _simple_six_cycles(mol):
        if not all(
            mol.atoms[i].atomic_number in _KEKULE_RING_ELEMENTS for i in cycle
        ):
            continue
        bond_indices = [
            _bond_index(mol, cycle[k], cycle[(k + 1) % 6]) for k in range(6)
        ]
        orders = [bond_order[b] for b in bond_indices]
        if set(orders) != {BondOrder.SINGLE, BondOrder.DOUBLE}:
            continue
        alternating = all(orders[k] != orders[(k + 1) % 6] for k in range(6))
        if not alternating:
            continue
        for i in cycle:
            atom_aromatic[i] = True
        for b in bond_indices:
            bond_order[b] = BondOrder.AROMATIC

    # demote aromatic bond orders that ended up outside rings or between
    # non-aromatic endpoints (e.g. the junction bond of a biphenyl)
    for bond_idx, bond in enumerate(mol.bonds):
        if bond_order[bond_idx] is BondOrder.AROMATIC and not (
            bond_in_ring[bond_idx]
            and atom_aromatic[bond.a1]
            and atom_aromatic[bond.a2]
        ):
            bond_order[bond_idx] = BondOrder.SINGLE

    atoms = [
        replace(
            atom,
            aromatic=atom_aromatic[i],
            in_ring=any(bond_in_ring[b] for _, b in mol.neighbors[i]),
        )
        for i, atom in enumerate(mol.atoms)
    ]
    bonds = [
        Bond(b.a1, b.a2, bond_order[i], bond_in_ring[i])
        for i, b in enumerate(mol.bonds)
    ]
    return Molecule(atoms, bonds)


def assign_implicit_hydrogens(
    mol: Molecule, offsets: dict[int, int] | None = None
) -> Molecule:
    """Fill implicit_h from the valence table; bracket atoms stay at zero.

    Aromatic pi donors (B/C/N/P) get one extra valence unit for their ring
    double bond unless they already carry an exocyclic double or triple bond.
    Raises ValenceError when an organic-subset atom exceeds its largest
    allowed valence.
    """
    offsets = offsets or {}
    atoms = []
    for i, atom in enumerate(mol.atoms):
        if atom.explicit_h is not None:
            atoms.append(replace(atom, implicit_h=0))
            continue
        order_sum = 0
        has_multiple_bond = False
        for _, bond_idx in mol.neighbors[i]:
            order = mol.bonds[bond_idx].order
            order_sum += ORDER_VALENCE[order]
            if order in (BondOrder.DOUBLE, BondOrder.TRIPLE):
                has_multiple_bond = True
        if (
            atom.aromatic
            and atom.symbol in AROMATIC_PI_DONORS
            and not has_multiple_bond
        ):
            order_sum += 1
        states = ORGANIC_VALENCES[atom.symbol]
        for state in states:
            if order_sum <= state:
                atoms.append(replace(atom, implicit_h=state - order_sum))
                break
        else:
            raise ValenceError(
                f"valence overflow on atom {i} ({atom.symbol}): bond order sum "
                f"{order_sum} exceeds allowed valences {states}",
                offset=offsets.get(i, -1),
            )
    return Molecule(atoms, mol.bonds)


def shortest_path_distances(mol: Molecule) -> np.ndarray:
    """All-pairs hop counts by BFS; UNREACHABLE across fragments."""
    n = mol.n_atoms
    dist = np.full((n, n), UNREACHABLE, dtype=np.int32)
    for source in range(n):
        row = dist[source]
        row[source] = 0
        queue = deque([source])
        while queue:
            current = queue.popleft()
            d = row[current] + 1
            for nbr, _ in mol.neighbors[current]:
                if row[nbr] == UNREACHABLE:
                    row[nbr] = d
                    queue.append(nbr)
    return dist
