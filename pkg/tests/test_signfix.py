import pytest

from exceptions import HypothesisError, SignConsistencyError, UnsupportedRingError
from gmodule import SignedGSet, direct_sum, free_module, general_module, module_from_signed, sign_module, trivial_module
from group import index2_normal_subgroups
from ring import gf
from signfix import certify_p_permutation, rectify_odd, rectify_signs, split_even, try_rectify


def c3_twisted(G, ring):
    """e1 -> -e2, e2 -> -e3, e3 -> e1."""
    return module_from_signed(SignedGSet(G, 3, ((1, 2, 0),), ((-1, -1, 1),)), ring)


class TestRectify:
    def test_c3_example(self, group, zz):
        G = group("C3")
        out = rectify_odd(c3_twisted(G, zz), 3)
        assert out.signs == (1, -1, 1)
        assert out.module.kind == "free"
        assert all(int(x) in (0, 1) for x in out.module.action[0].flatten())
        assert out.change.is_equivariant()

    def test_already_permutation(self, group, zz):
        out = rectify_odd(free_module(group("C3"), zz), 3)
        assert out.signs == (1, 1, 1)

    def test_trivial_signs(self, group):
        G = group("C9")
        out = rectify_odd(trivial_module(G, gf(5), 2), 3)
        assert out.signs == (1, 1)

    def test_even_prime_rejected(self, group, zz):
        with pytest.raises(HypothesisError):
            rectify_odd(free_module(group("C2"), zz), 2)

    def test_not_a_p_group(self, group, zz):
        with pytest.raises(HypothesisError):
            rectify_odd(free_module(group("S3"), zz), 3)

    def test_inconsistent_signs(self, group, zz):
        M = module_from_signed(SignedGSet(group("C2"), 1, ((0,),), ((-1,),)), zz)
        with pytest.raises(SignConsistencyError):
            rectify_signs(M)
        assert try_rectify(M) is None

    def test_general_module_rejected(self, group, gf3):
        M = general_module(group("C3"), gf3, [[[1, 1], [0, 1]]])
        with pytest.raises(HypothesisError):
            rectify_signs(M)


class TestSplitEven:
    @pytest.fixture
    def c4(self, group):
        G = group("C4")
        return G, index2_normal_subgroups(G)[0]

    def test_sign_module(self, c4, zz):
        G, H = c4
        out = split_even(sign_module(G, H, zz), H)
        assert (out.plus.rank, out.minus.rank) == (0, 1)

    def test_no_signs(self, c4, zz):
        G, H = c4
        out = split_even(free_module(G, zz), H)
        assert (out.plus.rank, out.minus.rank) == (4, 0)

    def test_all_minus(self, c4, zz):
        G, H = c4
        M = module_from_signed(SignedGSet(G, 2, ((1, 0),), ((-1, -1),)), zz)
        out = split_even(M, H)
        assert out.plus_points == () and out.minus_points == (0, 1)
        assert out.iso.is_equivariant()
        assert zz.equal(out.iso.matrix, zz.eye(2))

    def test_mixed_split_is_block_ordered(self, c4, gf3):
        G, H = c4
        L = sign_module(G, H, gf3)
        M = direct_sum(trivial_module(G, gf3), L)
        out = split_even(M, H)
        assert out.plus_points == (0,) and out.minus_points == (1,)
        assert out.iso.is_equivariant()

    def test_h_with_signs_rejected(self, c4, zz):
        G, H = c4
        M = module_from_signed(SignedGSet(G, 2, ((1, 0),), ((1, -1),)), zz)
        with pytest.raises(HypothesisError):
            split_even(M, H)

    def test_index_must_be_two(self, c4, zz):
        G, _ = c4
        with pytest.raises(HypothesisError):
            split_even(free_module(G, zz), G.trivial_subgroup())


class TestCertify:
    def test_permutation_passes_through(self, group, gf2):
        verdict = certify_p_permutation(trivial_module(group("C2"), gf2))
        assert verdict.certified and verdict.module.kind == "permutation"

    def test_trivial_via_marks(self, group, gf2):
        G = group("C2")
        verdict = certify_p_permutation(general_module(G, gf2, [[[1]]]))
        assert verdict.certified
        assert verdict.module.kind == "summand"
        assert verdict.multiplicities == {1: 0, 2: 1}

    def test_coprime_order_is_projective(self, group, gf3):
        G = group("C2")
        verdict = certify_p_permutation(general_module(G, gf3, [[[2, 0], [0, 1]]]))
        assert verdict.certified
        assert verdict.module.certificate.projective

    def test_monomial_odd(self, group, gf3):
        verdict = certify_p_permutation(c3_twisted(group("C3"), gf3))
        assert verdict.certified and verdict.module.kind == "summand"

    def test_jordan_block_refused(self, group, gf3):
        verdict = certify_p_permutation(general_module(group("C3"), gf3, [[[1, 1], [0, 1]]]))
        assert not verdict.certified
        assert "table-of-marks" in verdict.reason

    def test_integers_unsupported(self, group, zz):
        with pytest.raises(UnsupportedRingError):
            certify_p_permutation(general_module(group("C2"), zz, [[[-1]]]))
