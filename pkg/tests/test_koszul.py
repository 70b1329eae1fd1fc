import pytest

import chain_complex
import koszul as koszul_module
from catalog import catalog_group
from chain_complex import homology, make_complex, tensor_ranks
from exceptions import CapExceededError, HypothesisError, NotNormalError
from gmodule import free_module, trivial_module
from group import index2_normal_subgroups, subgroups
from koszul import (
    augmented_resolution,
    embedded_summand_module,
    koszul,
    monomial_embedding,
    sort_sign,
    tensor_induce_complex2,
    tensor_induce_module,
    wedge_basis,
)
from ring import INTEGERS, gf


def test_sort_sign():
    assert sort_sign([0, 1, 2]) == ((0, 1, 2), 1)
    assert sort_sign([1, 0]) == ((0, 1), -1)
    assert sort_sign([2, 0, 1]) == ((0, 1, 2), 1)


def test_wedge_basis_sizes():
    wedges = wedge_basis(4)
    assert [wedges.size(s) for s in range(5)] == [1, 4, 6, 4, 1]
    assert list(wedges.tuples[2]) == sorted(wedges.tuples[2])


class TestKoszul:
    def test_c2_over_integers(self, group, zz):
        K = koszul(group("C2"), zz)
        assert K.ranks == (1, 2, 1)
        assert K.d(1).tolist() == [[1, 1]]
        assert K.term(2).action[0].tolist() == [[-1]]
        assert K.term(1).kind == "free"

    def test_c3_over_gf3(self, group, gf3):
        K = koszul(group("C3"), gf3)
        assert K.ranks == (1, 3, 3, 1)
        assert homology(K).is_acyclic()

    def test_trivial_group(self, group, zz):
        K = koszul(group("1"), zz)
        assert K.ranks == (1, 1)
        assert K.d(1).tolist() == [[1]]

    def test_signs_are_monomial(self, group, zz):
        K = koszul(group("C3"), zz)
        assert K.term(2).kind == "monomial"

    def test_gf2_terms_are_permutation(self, group, gf2):
        K = koszul(group("V4"), gf2)
        assert all(M.kind in ("permutation", "free") for M in K.terms)

    @pytest.mark.parametrize("name,ring", [
        ("C2", INTEGERS), ("C4", INTEGERS), ("V4", gf(2)), ("C3", gf(5)), ("S3", gf(3)),
    ])
    def test_exact(self, name, ring):
        assert homology(koszul(catalog_group(name), ring)).is_acyclic()

    def test_augmented_resolution(self, group, gf2):
        aug = augmented_resolution(koszul(group("C2"), gf2))
        assert aug.resolution.ranks == (2, 1)
        assert aug.target.rank == 1
        H = homology(aug.resolution)
        assert (H.rank(0), H.rank(1)) == (1, 0)


class TestEmbedding:
    def test_whole_group(self, group):
        G = group("S3")
        emb = monomial_embedding(G, G.whole())
        assert emb.n == 1
        assert all(s == (0,) for s in emb.sigma)
        assert [h[0] for h in emb.h_components] == list(range(G.order))

    def test_c4_over_c2(self, group):
        G = group("C4")
        emb = monomial_embedding(G, index2_normal_subgroups(G)[0])
        assert emb.sigma[G.generator_indices[0]] == (1, 0)

    def test_trivial_subgroup_is_regular(self, group):
        G = group("C3")
        emb = monomial_embedding(G, G.trivial_subgroup())
        for g in range(G.order):
            assert list(emb.sigma[g]) == [int(G.mult[g, x]) for x in range(G.order)]

    def test_not_normal(self, group):
        G = group("S3")
        H = [K for K in subgroups(G) if K.order == 2][0]
        with pytest.raises(NotNormalError):
            monomial_embedding(G, H)

    @pytest.mark.parametrize("name", ["C4", "D8", "S3", "A4"])
    def test_summand_set_is_free(self, name):
        G = catalog_group(name)
        normals = [H for H in subgroups(G) if H.is_normal() and 1 < H.order < G.order]
        for H in normals:
            M = embedded_summand_module(monomial_embedding(G, H), gf(2))
            assert M.kind == "free" and M.rank == G.order


class TestTensorInduction:
    def test_trivial_stays_trivial(self, group, gf3):
        G = group("C4")
        H = index2_normal_subgroups(G)[0]
        M = tensor_induce_module(trivial_module(H.as_group, gf3), monomial_embedding(G, H))
        assert M.rank == 1
        assert gf3.equal(M.action[0], gf3.eye(1))

    def test_rank(self, group, gf2):
        G = group("C6")
        H = [K for K in subgroups(G) if K.order == 2][0]
        M = tensor_induce_module(free_module(H.as_group, gf2), monomial_embedding(G, H))
        assert M.rank == 2 ** 3
        assert M.kind in ("permutation", "free")

    def test_complex_trivial_in_degree_zero(self, group, zz):
        G = group("C2")
        H = G.trivial_subgroup()
        C = make_complex({0: trivial_module(H.as_group, zz)}, {})
        out = tensor_induce_complex2(C, monomial_embedding(G, H))
        assert out.ranks == (1,)
        assert out.term(0).action[0].tolist() == [[1]]

    def test_recovers_koszul(self, group, zz):
        G = group("C2")
        H = G.trivial_subgroup()
        K1 = H.as_group
        C = make_complex({0: trivial_module(K1, zz), 1: trivial_module(K1, zz)}, {1: zz.matrix([[1]])})
        out = tensor_induce_complex2(C, monomial_embedding(G, H))
        K = koszul(G, zz)
        assert out.ranks == K.ranks
        for s in K.degrees:
            assert zz.equal(out.term(s).action[0], K.term(s).action[0])
            assert zz.equal(out.d(s), K.d(s))

    def test_degree_one_has_no_signs(self, group, zz):
        G = group("C4")
        H = index2_normal_subgroups(G)[0]
        C = koszul(H.as_group, zz)
        out = tensor_induce_complex2(C, monomial_embedding(G, H))
        assert all(int(x) >= 0 for a in out.term(1).action for x in a.flatten())
        assert out.term(1).kind == "free"
        assert homology(out).is_acyclic()

    def test_index_must_be_two(self, group, gf3):
        G = group("C3")
        H = G.trivial_subgroup()
        C = make_complex({0: trivial_module(H.as_group, gf3)}, {})
        with pytest.raises(HypothesisError):
            tensor_induce_complex2(C, monomial_embedding(G, H))

    def test_cap_checked_before_building(self, group, gf3, monkeypatch):
        G = group("C4")
        H = index2_normal_subgroups(G)[0]
        C = koszul(H.as_group, gf3)

        def never(*args):
            raise AssertionError("differentials built past the cap")

        monkeypatch.setattr(chain_complex, "TERM_RANK_CAP", 5)
        monkeypatch.setattr(koszul_module, "tensor_differentials", never)
        with pytest.raises(CapExceededError) as info:
            tensor_induce_complex2(C, monomial_embedding(G, H))
        assert info.value.degree == 2

    def test_square_ranks_are_convolution(self, group, gf3):
        G = group("C4")
        H = index2_normal_subgroups(G)[0]
        C = koszul(H.as_group, gf3)
        assert tensor_ranks(C, C) == {0: 1, 1: 4, 2: 6, 3: 4, 4: 1}
        assert tensor_induce_complex2(C, monomial_embedding(G, H)).ranks == (1, 4, 6, 4, 1)
