"""Fingerprint identifiers, folding, and enumeration invariants."""

from collections import Counter

import numpy as np
import pytest

from molbench.fingerprints import (
    AtomPairFingerprint,
    EcfpFingerprint,
    FingerprintConfig,
    TopologicalTorsionFingerprint,
    atom_pair_identifiers,
    compute_fingerprint,
    ecfp_identifiers,
    fold_identifiers,
    initial_invariants,
    torsion_identifiers,
)
from molbench.hashing import hash_ints, mix64
from molbench.molgraph import UNREACHABLE, parse_smiles, shortest_path_distances

from molgen import random_molecule, random_smiles_pair, render_smiles


class TestHashing:
    def test_frozen_values(self):
        # folded vectors are an on-disk contract: these must never change
        assert mix64(0) == 0
        assert hash_ints(1, 2, 3) == 12696223638411188064
        assert hash_ints(-1) == 10922763448914652373

    def test_negative_values_distinct(self):
        assert hash_ints(1) != hash_ints(-1)

    def test_arity_matters(self):
        assert hash_ints(1, 0) != hash_ints(1)


class TestInitialInvariants:
    def test_symmetric_atoms_equal(self):
        inv = initial_invariants(parse_smiles("CC"))
        assert inv[0] == inv[1]

    def test_degree_distinguishes(self):
        inv = initial_invariants(parse_smiles("CCO"))
        assert inv[0] != inv[1]

    def test_element_distinguishes(self):
        assert initial_invariants(parse_smiles("C")) != initial_invariants(
            parse_smiles("N")
        )


class TestEcfp:
    def test_single_atom_radius0(self):
        vec = compute_fingerprint(parse_smiles("C"), FingerprintConfig("ecfp", radius=0))
        assert np.count_nonzero(vec) == 1
        assert vec.sum() == 1

    def test_isolated_atom_higher_radius_dedupes(self):
        assert len(ecfp_identifiers(parse_smiles("C"), 3)) == 1

    def test_ethane_radius1_two_identifiers(self):
        identifiers = ecfp_identifiers(parse_smiles("CC"), 1)
        assert len(set(identifiers)) == 2

    def test_isomorphic_inputs_equal_vectors(self):
        cfg = FingerprintConfig("ecfp")
        a = compute_fingerprint(parse_smiles("OCC"), cfg)
        b = compute_fingerprint(parse_smiles("CCO"), cfg)
        assert np.array_equal(a, b)

    def test_radius_monotonicity(self):
        for smiles in ("CC(C)c1ccccc1O", "O=C1CCCCC1N", "CCOC(=O)CC#N"):
            mol = parse_smiles(smiles)
            previous = set()
            for radius in range(4):
                current = set(ecfp_identifiers(mol, radius))
                assert previous <= current
                previous = current

    def test_count_binary_consistency(self):
        mol = parse_smiles("CC(C)c1ccc(O)cc1N")
        counted = compute_fingerprint(mol, FingerprintConfig("ecfp", counted=True))
        binary = compute_fingerprint(mol, FingerprintConfig("ecfp", counted=False))
        assert np.array_equal((counted > 0).astype(np.int64), binary)


class TestAtomPair:
    def test_propanol_three_pairs(self):
        identifiers = atom_pair_identifiers(parse_smiles("CCO"))
        assert len(identifiers) == 3
        assert len(set(identifiers)) == 3

    def test_single_atom_zero_vector(self):
        vec = compute_fingerprint(parse_smiles("C"), FingerprintConfig("atom_pair"))
        assert vec.sum() == 0

    def test_benzene_distance_classes(self):
        counts = sorted(Counter(atom_pair_identifiers(parse_smiles("c1ccccc1"))).values())
        assert counts == [3, 6, 6]

    def test_count_sum_matches_enumeration(self):
        rng = np.random.default_rng(17)
        for _ in range(60):
            elements, bonds = random_molecule(rng, max_atoms=12)
            mol = parse_smiles(render_smiles(elements, bonds))
            d = shortest_path_distances(mol)
            expected = sum(
                1
                for i in range(mol.n_atoms)
                for j in range(i + 1, mol.n_atoms)
                if d[i, j] != UNREACHABLE and 1 <= d[i, j] <= 30
            )
            vec = compute_fingerprint(mol, FingerprintConfig("atom_pair"))
            assert vec.sum() == expected


class TestTopologicalTorsion:
    def test_three_atoms_no_path(self):
        assert torsion_identifiers(parse_smiles("CCC")) == []

    def test_butane_single_path(self):
        vec = compute_fingerprint(parse_smiles("CCCC"), FingerprintConfig("topological_torsion"))
        assert np.count_nonzero(vec) == 1
        assert vec.sum() == 1

    def test_benzene_six_paths_one_identifier(self):
        identifiers = torsion_identifiers(parse_smiles("c1ccccc1"))
        assert len(identifiers) == 6
        assert len(set(identifiers)) == 1

    def test_count_sum_matches_enumeration(self):
        def count_simple_4paths(mol):
            adjacency = {i: [] for i in range(mol.n_atoms)}
            for b in mol.bonds:
                adjacency[b.a1].append(b.a2)
                adjacency[b.a2].append(b.a1)
            total = 0
            for a in range(mol.n_atoms):
                for b in adjacency[a]:
                    for c in adjacency[b]:
                        if c == a:
                            continue
                        for d in adjacency[c]:
                            if d not in (a, b):
                                total += 1
            return total // 2  # each undirected path seen from both ends

        rng = np.random.default_rng(23)
        for _ in range(60):
            elements, bonds = random_molecule(rng, max_atoms=12)
            mol = parse_smiles(render_smiles(elements, bonds))
            vec = compute_fingerprint(mol, FingerprintConfig("topological_torsion"))
            assert vec.sum() == count_simple_4paths(mol)


class TestFold:
    def test_small_identifier(self):
        vec = fold_identifiers([5], 2048, True)
        assert np.flatnonzero(vec).tolist() == [5]

    def test_modular_wraparound(self):
        vec = fold_identifiers([2**32 + 5], 2048, True)
        assert np.flatnonzero(vec).tolist() == [5]

    def test_binarization(self):
        vec = fold_identifiers([7, 7, 7], 2048, False)
        assert vec[7] == 1
        assert vec.sum() == 1

    def test_invalid_length(self):
        with pytest.raises(ValueError):
            fold_identifiers([1], 1, True)


class TestConfigValidation:
    def test_power_of_two_required(self):
        with pytest.raises(ValueError):
            FingerprintConfig("ecfp", length=1000)

    def test_radius_bound(self):
        with pytest.raises(ValueError):
            FingerprintConfig("ecfp", radius=11)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            FingerprintConfig("maccs")


class TestTransformers:
    def test_estimator_protocol(self):
        est = EcfpFingerprint(radius=1, length=256)
        assert est.get_params() == {"radius": 1, "length": 256, "counted": True}
        est.set_params(radius=2)
        assert est.get_params()["radius"] == 2
        with pytest.raises(ValueError):
            est.set_params(bogus=1)

    def test_transform_accepts_smiles_and_molecules(self):
        est = AtomPairFingerprint(length=128)
        out1 = est.fit_transform(["CCO", "CCC"])
        out2 = est.transform([parse_smiles("CCO"), parse_smiles("CCC")])
        assert np.array_equal(out1, out2)
        assert out1.shape == (2, 128)

    def test_atom_order_invariance_all_kinds(self):
        rng = np.random.default_rng(99)
        transformers = [
            EcfpFingerprint(length=512),
            AtomPairFingerprint(length=512),
            TopologicalTorsionFingerprint(length=512),
        ]
        for _ in range(100):
            first, second, _ = random_smiles_pair(rng)
            for est in transformers:
                pair = est.transform([first, second])
                assert np.array_equal(pair[0], pair[1]), (type(est).__name__, first, second)
