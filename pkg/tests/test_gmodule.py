import numpy as np
import pytest

from catalog import catalog_group
from exceptions import HypothesisError, InvalidModuleError, InvalidPermutationError, RingMismatchError
from gmodule import (
    ModuleMap,
    PermutationCertificate,
    RGModule,
    SignedGSet,
    brauer_quotient_dimension,
    direct_sum,
    fixed_points,
    free_module,
    general_module,
    hom_space,
    induce,
    induction_norm_composite,
    induction_unit,
    inflate,
    linearize,
    module_from_signed,
    omega,
    restrict,
    sign_module,
    swap_map,
    tensor,
    trivial_module,
)
from group import coset_action, index2_normal_subgroups, regular_gset, subgroups, trivial_gset
from ring import INTEGERS, gf


def jordan_block(G, ring, size):
    """Unipotent Jordan block for the generator of a cyclic group."""
    J = ring.eye(size)
    for i in range(size - 1):
        J[i, i + 1] = 1
    return general_module(G, ring, [J])


class TestConstructors:
    def test_linearize_trivial_coset(self, group, gf2):
        G = group("C4")
        _, cosets = coset_action(G, G.whole())
        M = linearize(cosets, gf2)
        assert M.rank == 1 and M.kind == "permutation"

    def test_linearize_swap(self, group, zz):
        G = group("C4")
        H = index2_normal_subgroups(G)[0]
        _, cosets = coset_action(G, H)
        M = linearize(cosets, zz)
        assert M.action[0].tolist() == [[0, 1], [1, 0]]

    def test_regular_is_free(self, group, gf3):
        M = linearize(regular_gset(group("C3")), gf3)
        assert M.kind == "free" and M.certificate.free_rank == 1

    def test_free_module(self, group, gf2, zz):
        assert free_module(group("C2"), gf2).action[0].tolist() == [[0, 1], [1, 0]]
        assert free_module(group("C3"), zz, 2).rank == 6
        assert free_module(group("C3"), zz, 0).rank == 0

    def test_relations_checked(self, group, zz):
        with pytest.raises(InvalidModuleError):
            general_module(group("C2"), zz, [[[2]]])

    def test_wrong_permutation_certificate(self, group, gf2):
        G = group("C2")
        with pytest.raises(InvalidModuleError):
            RGModule(G, gf2, 2, (gf2.eye(2),), PermutationCertificate(regular_gset(G)))

    def test_monomial(self, group, zz, gf2):
        G = group("C3")
        S = SignedGSet(G, 3, ((1, 2, 0),), ((-1, -1, 1),))
        M = module_from_signed(S, zz)
        assert M.kind == "monomial"
        assert module_from_signed(S, gf2).kind == "permutation"

    def test_inconsistent_signs_rejected(self, group):
        with pytest.raises(InvalidPermutationError):
            SignedGSet(group("C3"), 1, ((0,),), ((-1,),))


class TestTensor:
    @pytest.mark.parametrize("name,p", [("C2", 2), ("C3", 3)])
    def test_regular_squared_is_free(self, name, p):
        G = catalog_group(name)
        kG = free_module(G, gf(p))
        T = tensor(kG, kG)
        assert T.kind == "free" and T.certificate.free_rank == p

    def test_trivial_unit(self, group, gf3):
        G = group("C3")
        J = jordan_block(G, gf3, 2)
        T = tensor(trivial_module(G, gf3), J)
        assert gf3.equal(T.action[0], J.action[0])

    def test_product_gset(self, group, gf2):
        G = group("S3")
        _, A = coset_action(G, subgroups(G)[1])
        _, B = coset_action(G, subgroups(G)[4])
        T = tensor(linearize(A, gf2), linearize(B, gf2))
        assert T.kind in ("permutation", "free")
        assert T.certificate.gset.size == A.size * B.size

    def test_free_tensor_general_is_free(self, group, gf3):
        G = group("C3")
        J = jordan_block(G, gf3, 2)
        left = tensor(free_module(G, gf3), J)
        right = tensor(J, free_module(G, gf3))
        assert left.kind == "free" and left.certificate.free_rank == 2
        assert right.kind == "free" and right.certificate.basis is not None

    def test_swap_is_equivariant(self, group, gf3):
        G = group("C3")
        J = jordan_block(G, gf3, 2)
        F = free_module(G, gf3)
        swap = swap_map(J, F)
        assert swap.is_equivariant()

    def test_ring_mismatch(self, group):
        G = group("C2")
        with pytest.raises(RingMismatchError):
            tensor(trivial_module(G, gf(2)), trivial_module(G, INTEGERS))


class TestFunctors:
    def test_restrict_free(self, group, gf2):
        G = group("C4")
        H = index2_normal_subgroups(G)[0]
        M = restrict(free_module(G, gf2), H)
        assert M.kind == "free" and M.certificate.free_rank == 2

    def test_restrict_to_whole(self, group, gf3):
        G = group("C3")
        J = jordan_block(G, gf3, 2)
        M = restrict(J, G.whole())
        assert gf3.equal(M.action[0], J.action[0])

    def test_restrict_cosets(self, group, zz):
        G = group("S3")
        C3 = [H for H in subgroups(G) if H.order == 3][0]
        _, cosets = coset_action(G, C3)
        M = restrict(linearize(cosets, zz), C3)
        assert all(zz.equal(a, zz.eye(2)) for a in M.action)

    def test_induce_trivial(self, group, gf2):
        G = group("S3")
        H = subgroups(G)[1]
        M = induce(trivial_module(H.as_group, gf2), G, H)
        assert M.rank == 3 and M.kind == "permutation"
        assert M.certificate.gset.size == 3

    def test_induce_free(self, group, gf2):
        G = group("D8")
        H = index2_normal_subgroups(G)[0]
        M = induce(free_module(H.as_group, gf2), G, H)
        assert M.kind == "free" and M.rank == 8

    def test_induce_general_rank(self, group, gf3):
        G = group("C3xC3")
        H = [K for K in subgroups(G) if K.order == 3][0]
        J = jordan_block(H.as_group, gf3, 3)
        assert induce(J, G, H).rank == 9

    def test_sign_module(self, group, zz, gf2):
        G = group("C4")
        H = index2_normal_subgroups(G)[0]
        L = sign_module(G, H, zz)
        assert L.action[0].tolist() == [[-1]]
        assert L.kind == "monomial"
        assert sign_module(G, H, gf2).kind == "permutation"

    def test_inflate_trivial(self, group, zz):
        G = group("C4")
        C2 = group("C2")
        M = inflate(trivial_module(C2, zz), G, [1])
        assert M.action[0].tolist() == [[1]]

    def test_inflate_rejects_non_homomorphism(self, group, zz):
        with pytest.raises(HypothesisError):
            inflate(trivial_module(group("C2"), zz), group("C3"), [1])


class TestOmegaAndFixedPoints:
    def test_omega_trivial_c2(self, group, gf2):
        Om, inc, cover = omega(trivial_module(group("C2"), gf2))
        assert Om.rank == 1
        assert gf2.equal(Om.action[0], gf2.eye(1))
        assert gf2.is_zero(gf2.matmul(cover.matrix, inc.matrix))

    def test_omega_rank(self, group, gf3):
        G = group("C3")
        Om, _, _ = omega(jordan_block(G, gf3, 2))
        assert Om.rank == 4

    def test_omega_needs_field(self, group, zz):
        with pytest.raises(RingMismatchError):
            omega(trivial_module(group("C2"), zz))

    def test_fixed_points(self, group, gf2):
        G = group("C2")
        assert fixed_points(free_module(G, gf2), G.whole())[0] == 1
        assert fixed_points(trivial_module(G, gf2, 3), G.whole())[0] == 3

    def test_fixed_points_count_orbits(self, group, gf3):
        G = group("S3")
        classes = subgroups(G, up_to_conjugacy=True)
        for H in classes:
            _, cosets = coset_action(G, H)
            M = linearize(cosets, gf3)
            for K in classes:
                orbits = {frozenset(int(cosets.table[k, x]) for k in K.members) for x in range(cosets.size)}
                assert fixed_points(M, K)[0] == len(orbits)

    def test_hom_space(self, group, gf2):
        G = group("C2")
        assert len(hom_space(free_module(G, gf2), free_module(G, gf2))) == 2
        assert len(hom_space(trivial_module(G, gf2), trivial_module(G, gf2))) == 1
        for X in hom_space(free_module(G, gf2), trivial_module(G, gf2)):
            ModuleMap(free_module(G, gf2), trivial_module(G, gf2), X)


class TestAdjunction:
    def test_unit_split(self, group, gf3):
        G = group("S3")
        H = [K for K in subgroups(G) if K.order == 2][0]
        N = linearize(trivial_gset(H.as_group, 2), gf3)
        unit = induction_unit(N, G, H)
        assert unit.composite_is_identity

    def test_norm_composite(self, group, zz):
        G = group("A4")
        H = [K for K in subgroups(G) if K.order == 4][0]
        _, cosets = coset_action(G, H)
        M = linearize(cosets, zz)
        out = induction_norm_composite(M, G, H)
        assert zz.equal(out.composite, zz.scale(H.index, zz.eye(M.rank)))


class TestBrauer:
    def test_trivial_module(self, group, gf2):
        G = group("C2")
        assert brauer_quotient_dimension(trivial_module(G, gf2), G.whole()) == 1

    def test_free_module_vanishes(self, group, gf2):
        G = group("C2")
        assert brauer_quotient_dimension(free_module(G, gf2), G.whole()) == 0

    def test_permutation_modules_count_fixed_points(self, group, gf2):
        G = group("D8")
        classes = subgroups(G, up_to_conjugacy=True)
        for H in classes:
            _, cosets = coset_action(G, H)
            M = linearize(cosets, gf2)
            for K in classes:
                assert brauer_quotient_dimension(M, K) == len(cosets.fixed_points(K))


def test_direct_sum_merges_certificates(group, gf2):
    G = group("C2")
    S = direct_sum(free_module(G, gf2), trivial_module(G, gf2))
    assert S.kind == "permutation" and S.rank == 3
    F = direct_sum(free_module(G, gf2), free_module(G, gf2))
    assert F.kind == "free"
    J = direct_sum(trivial_module(G, gf2), general_module(G, gf2, [np.array([[1, 1], [0, 1]])]))
    assert J.kind == "general"
