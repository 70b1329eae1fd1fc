import numpy as np
import pytest

from exceptions import UnsupportedRingError
from gmodule import change_basis, free_module, general_module, linearize, omega, sign_module, tensor, trivial_module, zero_module
from group import coset_action, index2_normal_subgroups, subgroups
from grothendieck import (
    cartan_quotient,
    composition_factors,
    decompose,
    find_split,
    g0_class,
    is_irreducible,
    iso_test,
    lattice_contains,
    pperm_span,
    simples,
    spin,
)
from resolve import resolve_module_search
from ring import gf


def permutation_module(G, H, ring):
    _, cosets = coset_action(G, H)
    return linearize(cosets, ring)


class TestMeataxe:
    def test_spin_of_norm_element(self, group, gf2):
        M = free_module(group("C2"), gf2)
        W = spin(M.action, gf2.matrix([[1], [1]]), gf2)
        assert W.shape[1] == 1

    def test_regular_c2(self, group, gf2):
        factors = composition_factors(free_module(group("C2"), gf2))
        assert [S.rank for S in factors] == [1, 1]
        assert all(gf2.equal(S.action[0], gf2.eye(1)) for S in factors)

    def test_regular_s3_gf2(self, group, gf2):
        factors = composition_factors(free_module(group("S3"), gf2))
        assert sorted(S.rank for S in factors) == [1, 1, 2, 2]
        assert all(is_irreducible(S) for S in factors)

    def test_irreducible_input(self, group, gf2):
        V = [S for S in composition_factors(free_module(group("S3"), gf2)) if S.rank == 2][0]
        split = find_split(V)
        assert split.irreducible
        assert composition_factors(V) == [V]

    def test_jordan_block_splits(self, group, gf3):
        M = general_module(group("C3"), gf3, [[[1, 1], [0, 1]]])
        split = find_split(M)
        assert not split.irreducible
        assert split.subspace.shape[1] == 1

    def test_ranks_add_up(self, group, gf3):
        M = free_module(group("S3"), gf3)
        assert sum(S.rank for S in composition_factors(M)) == M.rank

    def test_integers_unsupported(self, group, zz):
        with pytest.raises(UnsupportedRingError):
            composition_factors(free_module(group("C2"), zz))


class TestIsoTest:
    def test_same_module(self, group, gf2):
        G = group("C2")
        verdict = iso_test(permutation_module(G, G.trivial_subgroup(), gf2), free_module(G, gf2))
        assert verdict.is_iso

    def test_sign_is_not_trivial(self, group, gf3):
        G = group("C2")
        L = sign_module(G, index2_normal_subgroups(G)[0], gf3)
        verdict = iso_test(trivial_module(G, gf3), L)
        assert verdict.status == "not-iso"

    def test_random_conjugate(self, group, gf3):
        M = free_module(group("S3"), gf3)
        B = gf3.matrix(np.eye(6, dtype=np.int64) + np.triu(np.ones((6, 6), dtype=np.int64), 1))
        N, _ = change_basis(M, B)
        verdict = iso_test(M, N)
        assert verdict.is_iso
        assert all(gf3.equal(gf3.matmul(b, verdict.witness), gf3.matmul(verdict.witness, a))
                   for a, b in zip(M.action, N.action))

    def test_rank_mismatch(self, group, gf2):
        G = group("C2")
        assert iso_test(trivial_module(G, gf2), free_module(G, gf2)).status == "not-iso"


class TestSimples:
    def test_c2_gf2(self, group, gf2):
        assert simples(group("C2"), gf2).ranks == (1,)

    def test_s3_gf2(self, group, gf2):
        assert simples(group("S3"), gf2).ranks == (1, 2)

    def test_s3_gf3(self, group, gf3):
        basis = simples(group("S3"), gf3)
        assert basis.ranks == (1, 1)
        assert iso_test(basis.simples[0], basis.simples[1]).status == "not-iso"


class TestG0:
    def test_regular_c2(self, group, gf2):
        G = group("C2")
        basis = simples(G, gf2)
        assert g0_class(free_module(G, gf2), basis).to_list() == [2]

    def test_s3_on_three_points(self, group, gf2):
        G = group("S3")
        basis = simples(G, gf2)
        H = [K for K in subgroups(G) if K.order == 2][0]
        assert g0_class(permutation_module(G, H, gf2), basis).to_list() == [1, 1]

    def test_zero(self, group, gf2):
        G = group("S3")
        basis = simples(G, gf2)
        assert g0_class(zero_module(G, gf2), basis).to_list() == [0, 0]

    def test_additive_along_omega(self, group, gf3):
        G = group("C3")
        basis = simples(G, gf3)
        M = general_module(G, gf3, [[[1, 1], [0, 1]]])
        Om, _, cover = omega(M)
        assert g0_class(cover.source, basis) == g0_class(M, basis) + g0_class(Om, basis)
        assert g0_class(tensor(free_module(G, gf3), M), basis).dimension == 6


class TestSpan:
    def test_c2_gf2(self, group, gf2):
        report = pperm_span(group("C2"), gf2)
        assert report.spans
        assert report.invariant_factors == (1,)

    def test_s3_gf3_witness(self, group, gf3):
        report = pperm_span(group("S3"), gf3)
        assert report.spans
        for i, coeffs in report.witness.items():
            e = [0] * len(report.basis)
            e[i] = 1
            assert (report.matrix @ np.array(coeffs, dtype=object)).tolist() == e

    @pytest.mark.parametrize("name,p", [("C2", 2), ("C4", 2), ("S3", 2), ("S3", 3), ("D8", 2), ("A4", 2)])
    def test_spans(self, group, name, p):
        report = pperm_span(group(name), gf(p))
        assert report.spans
        assert all(f == 1 for f in report.invariant_factors)

    def test_order_of_subgroups_does_not_matter(self, group, gf3):
        G = group("S3")
        classes = subgroups(G, up_to_conjugacy=True)
        a = pperm_span(G, gf3, classes=classes)
        b = pperm_span(G, gf3, classes=list(reversed(classes)), basis=a.basis)
        assert a.invariant_factors == b.invariant_factors

    def test_resolved_module_is_in_the_lattice(self, group, gf3):
        G = group("C3")
        M = general_module(G, gf3, [[[1, 1], [0, 1]]])
        resolve_module_search(M)
        report = pperm_span(G, gf3)
        assert lattice_contains(report, g0_class(M, report.basis)) is not None


class TestCartan:
    def test_decompose_local(self, group, gf2):
        assert [P.rank for P in decompose(free_module(group("C2"), gf2))] == [2]

    def test_decompose_s3_gf2(self, group, gf2):
        assert sorted(P.rank for P in decompose(free_module(group("S3"), gf2))) == [2, 2, 2]

    def test_c2_gf2(self, group, gf2):
        report = cartan_quotient(group("C2"), gf2)
        assert report.cartan.tolist() == [[2]]
        assert report.quotient == (2,)

    def test_c3_gf3(self, group, gf3):
        assert cartan_quotient(group("C3"), gf3).quotient == (3,)

    def test_s3_gf2(self, group, gf2):
        assert cartan_quotient(group("S3"), gf2).quotient == (2,)

    @pytest.mark.slow
    def test_s3_gf3(self, group, gf3):
        assert cartan_quotient(group("S3"), gf3).quotient == (3,)
