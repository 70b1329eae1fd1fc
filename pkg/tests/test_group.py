import numpy as np
import pytest

from catalog import CATALOG, catalog_group
from exceptions import CapExceededError, InvalidPermutationError, NotASubgroupError
from group import (
    GSet,
    compose,
    coset_action,
    enumerate_group,
    index2_normal_subgroups,
    make_subgroup,
    maximal_subgroups_of,
    regular_gset,
    subgroups,
    sylow,
    table_of_marks,
)


class TestEnumerate:
    def test_small_orders(self):
        assert enumerate_group(4, [[1, 2, 3, 0]]).order == 4
        assert enumerate_group(4, [[1, 0, 2, 3], [0, 1, 3, 2]]).order == 4
        assert enumerate_group(3, [[1, 0, 2], [1, 2, 0]]).order == 6

    def test_identity_first_and_stable(self):
        G = enumerate_group(3, [[1, 0, 2], [1, 2, 0]])
        again = enumerate_group(3, [list(g) for g in G.generators])
        assert G.elements[0] == (0, 1, 2)
        assert G.elements == again.elements

    def test_words_reproduce_elements(self, group):
        G = group("D8")
        for i, word in enumerate(G.words):
            x = tuple(range(G.degree))
            for letter in reversed(word):
                x = compose(G.generators[letter], x)
            assert x == G.elements[i]

    def test_closed(self, group):
        G = group("A4")
        assert set(G.mult.flatten().tolist()) == set(range(12))

    @pytest.mark.parametrize("bad", [[0, 0, 1], [0, 1], [0, 1, 3]])
    def test_malformed(self, bad):
        with pytest.raises(InvalidPermutationError):
            enumerate_group(3, [bad])

    def test_order_cap(self):
        with pytest.raises(CapExceededError):
            enumerate_group(6, [[1, 0, 2, 3, 4, 5], [1, 2, 3, 4, 5, 0]])

    @pytest.mark.parametrize("name,order", [
        ("1", 1), ("C2", 2), ("C9", 9), ("V4", 4), ("C2xC4", 8), ("C2^3", 8),
        ("D8", 8), ("Q8", 8), ("C3xC3", 9), ("S3", 6), ("A4", 12),
    ])
    def test_catalog_orders(self, name, order):
        assert catalog_group(name).order == order

    def test_q8_has_one_involution(self):
        G = catalog_group("Q8")
        assert sum(1 for i in range(8) if G.element_order(i) == 2) == 1


class TestSubgroups:
    def test_c2(self, group):
        assert len(subgroups(group("C2"))) == 2

    def test_v4(self, group):
        subs = subgroups(group("V4"))
        assert [H.order for H in subs] == [1, 2, 2, 2, 4]

    def test_s3_up_to_conjugacy(self, group):
        reps = subgroups(group("S3"), up_to_conjugacy=True)
        assert [H.order for H in reps] == [1, 2, 3, 6]

    def test_sorted(self, group):
        subs = subgroups(group("D8"))
        keys = [(H.order, H.members) for H in subs]
        assert keys == sorted(keys)
        assert len(subs) == 10

    def test_cap(self, group):
        with pytest.raises(CapExceededError):
            subgroups(group("A4"), cap=8)

    def test_make_subgroup_rejects_outsiders(self, group):
        with pytest.raises(NotASubgroupError):
            make_subgroup(group("C4"), [[1, 0, 2, 3]])

    def test_maximal_subgroups(self, group):
        G = group("V4")
        assert [H.order for H in maximal_subgroups_of(G.whole())] == [2, 2, 2]


class TestSylow:
    def test_s3(self, group):
        assert sylow(group("S3"), 3).order == 3
        assert sylow(group("S3"), 2).order == 2

    def test_coprime(self, group):
        assert sylow(group("C4"), 3).order == 1

    @pytest.mark.parametrize("name,p", [("A4", 2), ("A4", 3), ("D8", 2), ("C6", 3)])
    def test_index_prime_to_p(self, name, p):
        G = catalog_group(name)
        P = sylow(G, p)
        assert P.as_group.is_p_group(p)
        assert (G.order // P.order) % p != 0


class TestIndexTwo:
    def test_c4(self, group):
        found = index2_normal_subgroups(group("C4"))
        assert len(found) == 1
        G = group("C4")
        squares = sorted({int(G.mult[g, g]) for g in range(4)})
        assert list(found[0].members) == squares

    def test_v4(self, group):
        assert len(index2_normal_subgroups(group("V4"))) == 3

    def test_odd(self, group):
        assert index2_normal_subgroups(group("C3")) == []

    @pytest.mark.parametrize("name", ["C2", "C4", "C8", "V4", "C2xC4", "C2^3", "D8", "Q8"])
    def test_two_groups_have_one(self, name):
        found = index2_normal_subgroups(catalog_group(name))
        assert found
        assert all(H.is_normal() and H.index == 2 for H in found)

    @pytest.mark.parametrize("name,count", [
        ("C2", 1), ("C4", 1), ("C8", 1), ("V4", 3), ("C2xC4", 3), ("C2^3", 7),
        ("D8", 3), ("Q8", 3), ("S3", 1), ("C6", 1), ("A4", 0),
    ])
    def test_count_matches_square_quotient(self, name, count):
        G = catalog_group(name)
        found = index2_normal_subgroups(G)
        assert len(found) == count
        assert len({H.members for H in found}) == count


class TestCosets:
    def test_s3_mod_c3(self, group):
        G = group("S3")
        C3 = [H for H in subgroups(G) if H.order == 3][0]
        transversal, cosets = coset_action(G, C3)
        assert transversal.representatives[0] == 0
        assert cosets.size == 2
        assert cosets.action[0] == (1, 0)
        assert cosets.action[1] == (0, 1)

    def test_whole_group(self, group):
        G = group("C4")
        _, cosets = coset_action(G, G.whole())
        assert cosets.size == 1

    def test_transitive_with_conjugate_stabilizer(self, group):
        G = group("A4")
        for H in subgroups(G, up_to_conjugacy=True):
            _, cosets = coset_action(G, H)
            assert len(cosets.orbits()) == 1
            stab = cosets.stabilizer(0)
            assert stab == H

    def test_decompose(self, group):
        G = group("D8")
        H = index2_normal_subgroups(G)[0]
        transversal, _ = coset_action(G, H)
        for g in range(G.order):
            for j in range(transversal.size):
                k, h = transversal.decompose(g, j)
                assert h in H
                lhs = G.mult[g, transversal.representatives[j]]
                assert lhs == G.mult[transversal.representatives[k], h]

    def test_gset_rejects_non_action(self, group):
        G = group("C3")
        with pytest.raises(InvalidPermutationError):
            GSet(G, 2, ((1, 0),))

    def test_regular_is_free(self, group):
        assert regular_gset(group("S3"), 2).is_free()


class TestMarks:
    def test_c2(self, group):
        G = group("C2")
        marks = table_of_marks(G, subgroups(G))
        assert marks.tolist() == [[2, 0], [1, 1]]

    def test_s3_lower_triangular(self, group):
        G = group("S3")
        classes = subgroups(G, up_to_conjugacy=True)
        marks = table_of_marks(G, classes)
        assert np.all(np.triu(marks, 1) == 0)
        assert [int(marks[i, i]) for i in range(4)] == [6, 1, 2, 1]


def test_catalog_contents():
    assert {"1", "C2", "Q8", "S3", "A4", "C3xC3"} <= set(CATALOG)
