import copy
from dataclasses import replace

import numpy as np
import pytest

import resolve
from catalog import catalog_group
from chain_complex import (
    ChainComplex,
    ChainMap,
    HomologyReport,
    concentrated,
    identity_chain_map,
    make_complex,
    zero_chain_map,
)
from config import TERM_RANK_CAP, SearchCaps
from exceptions import CapExceededError, ExhaustedError, HypothesisError, UnsupportedRingError
from gmodule import PermutationCertificate, direct_sum, free_module, general_module, hom_space, trivial_module
from group import trivial_gset
from resolve import (
    CLAUSES,
    build_Qn,
    combine_resolutions,
    derived_hom_dimension,
    free_resolution_prefix,
    m_free_trivial,
    resolve_module_search,
    resolve_omega_pair,
    resolve_trivial,
    verify_certificate,
)


def jordan(G, ring):
    return general_module(G, ring, [[[1, 1], [0, 1]]])


class TestResolveTrivial:
    def test_c2_gf2_is_koszul(self, group, gf2):
        cert = resolve_trivial(group("C2"), gf2)
        assert cert.spliced_ranks == (1, 2, 1)
        assert cert.kind == "permutation"
        assert cert.m_free_index == 0

    def test_c3_integers(self, group, zz):
        cert = resolve_trivial(group("C3"), zz)
        assert cert.spliced_ranks == (1, 3, 3, 1)
        assert all(M.kind in ("permutation", "free") for M in cert.resolution.terms)
        assert cert.resolution.term(0).kind == "free"
        assert verify_certificate(cert).ok

    def test_c2_integers_repairs_signs(self, group, zz):
        cert = resolve_trivial(group("C2"), zz)
        assert cert.spliced_ranks[0] == 1
        assert sum(cert.spliced_ranks) <= sum((1, 4, 4, 1))
        assert cert.resolution.term(0).kind == "free"
        assert zz.equal(cert.target_module.action[0], zz.eye(1))
        report = verify_certificate(cert)
        assert report.ok, report.message

    def test_c2_gf3(self, group, gf3):
        cert = resolve_trivial(group("C2"), gf3)
        assert cert.target_module.rank == 1
        assert cert.resolution.term(0).kind == "free"
        assert verify_certificate(cert).ok

    def test_c4_gf2(self, group, gf2):
        assert verify_certificate(resolve_trivial(group("C4"), gf2)).ok

    def test_trivial_group(self, group, zz):
        cert = resolve_trivial(group("1"), zz)
        assert cert.spliced_ranks == (1, 1)

    def test_not_a_p_group(self, group, gf3):
        with pytest.raises(HypothesisError):
            resolve_trivial(group("S3"), gf3)

    def test_order_cap(self, group, gf2, monkeypatch):
        monkeypatch.setattr(resolve, "TRIVIAL_CAP_P2", 2)
        with pytest.raises(CapExceededError):
            resolve_trivial(group("C4"), gf2)

    @pytest.mark.slow
    @pytest.mark.parametrize("ring", ["zz", "gf3"])
    @pytest.mark.parametrize("name", ["C2", "C4", "V4", "C8", "C2xC4", "C2^3", "D8", "Q8"])
    def test_two_groups_with_signs(self, name, ring, request):
        R = request.getfixturevalue(ring)
        cert = resolve_trivial(catalog_group(name), R)
        report = verify_certificate(cert)
        assert report.ok, report.message
        target = cert.target_module
        assert target.rank == 1
        assert all(R.equal(a, R.eye(1)) for a in target.action)
        assert cert.resolution.term(0).kind == "free"
        assert all(M.kind in ("permutation", "free") for M in cert.resolution.terms)
        assert max(cert.spliced_ranks) <= TERM_RANK_CAP


class TestMFree:
    def test_square(self, group, gf2):
        cert = m_free_trivial(group("C2"), gf2, 2)
        assert cert.spliced_ranks == (1, 4, 4, 1)
        assert cert.m_free_index >= 1
        assert verify_certificate(cert).ok

    def test_cube_over_gf3(self, group, gf3):
        cert = m_free_trivial(group("C3"), gf3, 2)
        assert cert.m_free_index >= 1

    def test_m_must_be_positive(self, group, gf2):
        with pytest.raises(HypothesisError):
            m_free_trivial(group("C2"), gf2, 0)


class TestCombine:
    @pytest.fixture
    def setup(self, group, gf2):
        G = group("C2")
        k = concentrated(trivial_module(G, gf2))
        return k, m_free_trivial(G, gf2, 3), resolve_trivial(G, gf2)

    def test_identity(self, setup):
        k, P, Q = setup
        cert = combine_resolutions(identity_chain_map(k), P, Q)
        assert cert.resolution.ranks == (2, 9, 12, 6, 1)
        assert cert.kind == "permutation"
        assert cert.homology_witness.is_acyclic()

    def test_zero_map(self, setup):
        k, P, Q = setup
        cert = combine_resolutions(zero_chain_map(k, k), P, Q)
        assert cert.resolution.ranks == (2, 9, 12, 6, 1)
        assert cert.target.ranks == (1, 1)
        assert verify_certificate(cert).ok

    def test_source_not_projective_enough(self, group, gf2):
        G = group("C2")
        k = concentrated(trivial_module(G, gf2))
        Q = resolve_trivial(G, gf2)
        with pytest.raises(HypothesisError):
            combine_resolutions(identity_chain_map(k), Q, Q)

    def test_integers_unsupported(self, group, zz):
        G = group("C2")
        k = concentrated(trivial_module(G, zz))
        Q = resolve_trivial(G, zz)
        with pytest.raises(UnsupportedRingError):
            combine_resolutions(identity_chain_map(k), Q, Q)


class TestSearch:
    def test_trivial_is_its_own_resolution(self, group, gf2):
        cert = resolve_module_search(trivial_module(group("C2"), gf2))
        assert cert.spliced_ranks == (1, 1)
        assert cert.length == 0

    def test_jordan_block_gf3_c3(self, group, gf3):
        cert = resolve_module_search(jordan(group("C3"), gf3))
        assert cert.spliced_ranks == (2, 3, 1)
        assert cert.kind == "p-permutation"
        assert cert.resolution.term(0).kind == "free"
        report = verify_certificate(cert)
        assert report.ok, report.message

    def test_jordan_block_gf2_c4_is_permutation(self, group, gf2):
        cert = resolve_module_search(jordan(group("C4"), gf2))
        assert cert.length == 0
        assert cert.spliced_ranks == (2, 2)

    def test_depth_zero_exhausts(self, group, gf3):
        with pytest.raises(ExhaustedError) as info:
            resolve_module_search(jordan(group("C3"), gf3), SearchCaps(depth=0))
        assert info.value.caps["depth"] == 0
        assert info.value.exit_code == 3

    def test_integers_unsupported(self, group, zz):
        with pytest.raises(UnsupportedRingError):
            resolve_module_search(trivial_module(group("C2"), zz))


class TestOmegaPair:
    def test_trivial_gf2_c2(self, group, gf2):
        G = group("C2")
        cert = resolve_omega_pair(trivial_module(G, gf2))
        assert cert.target_module.rank == G.order
        assert verify_certificate(cert).ok

    def test_free_start(self, group, gf2):
        cert = resolve_omega_pair(trivial_module(group("C2"), gf2), free_start=True)
        assert cert.m_projective_index >= 0
        assert cert.spliced_ranks[:2] == (2, 4)
        assert verify_certificate(cert).ok

    def test_free_module(self, group, gf2):
        cert = resolve_omega_pair(free_module(group("C2"), gf2))
        assert cert.target_module.rank == 4


class TestTower:
    def test_free_prefix(self, group, gf2):
        res = free_resolution_prefix(trivial_module(group("C2"), gf2), 2)
        assert res.resolution.ranks == (2, 2, 2)
        assert all(M.kind == "free" for M in res.resolution.terms)

    def test_q0(self, group, gf2):
        stage = build_Qn(trivial_module(group("C2"), gf2), 0)
        assert stage.complex.ranks == (1,)
        assert stage.certificate is None

    def test_q1(self, group, gf2):
        stage = build_Qn(trivial_module(group("C2"), gf2), 1)
        assert stage.certificate.spliced_ranks == (1, 2, 1)
        assert stage.complex.term(0).kind == "free"
        assert stage.complex.term(0) is stage.free_prefix.resolution.term(0)

    def test_q2_agrees_below_two(self, group, gf2):
        stage = build_Qn(trivial_module(group("C2"), gf2), 2)
        P = stage.free_prefix.resolution
        assert stage.complex.ranks == (2, 2, 1)
        assert gf2.equal(stage.complex.d(1), P.d(1))
        assert verify_certificate(stage.certificate).ok

    def test_truncation_below_n_minus_one(self, group, gf2):
        with pytest.raises(HypothesisError):
            build_Qn(trivial_module(group("C2"), gf2), 3, m=0)


class TestVerify:
    def test_all_clauses_checked(self, group, zz):
        report = verify_certificate(resolve_trivial(group("C3"), zz))
        assert report.ok
        assert report.checked == list(CLAUSES)

    def test_broken_differential(self, group, gf2):
        cert = resolve_trivial(group("C2"), gf2)
        P = cert.resolution
        broken = ChainComplex(P.lo, P.terms, (gf2.zeros(2, 1),), check=False)
        report = verify_certificate(replace(cert, resolution=broken))
        assert not report.ok
        assert report.clause == "exactness"
        assert report.degree == 1

    def test_overclaimed_free_index(self, group, gf2):
        cert = resolve_trivial(group("C2"), gf2)
        report = verify_certificate(replace(cert, m_free_index=5))
        assert not report.ok
        assert report.clause == "m_free_index"

    def test_wrong_kind(self, group, gf3):
        cert = resolve_module_search(jordan(group("C3"), gf3))
        report = verify_certificate(replace(cert, kind="permutation"))
        assert report.clause == "kind"

    def test_forged_witness(self, group, gf2):
        cert = resolve_trivial(group("C2"), gf2)
        forged = HomologyReport(gf2, {0: (7, ()), 1: (3, ())})
        report = verify_certificate(replace(cert, homology_witness=forged))
        assert not report.ok
        assert report.clause == "homology_witness"
        assert "exactness" in report.checked

    def test_witness_wrong_in_one_degree(self, group, zz):
        cert = resolve_trivial(group("C3"), zz)
        degrees = dict(cert.homology_witness.degrees)
        degrees[1] = (0, (2,))
        report = verify_certificate(replace(cert, homology_witness=HomologyReport(zz, degrees)))
        assert report.clause == "homology_witness"
        assert report.degree == 1


def _with_resolution(cert, terms, differentials):
    P = cert.resolution
    return replace(cert, resolution=ChainComplex(P.lo, tuple(terms), tuple(differentials), check=False))


def widen_degree_zero(cert):
    P, R = cert.resolution, cert.resolution.ring
    d1 = np.vstack([P.d(1), R.zeros(P.rank_at(0), P.rank_at(1))])
    return _with_resolution(cert, (direct_sum(P.term(0), P.term(0)),) + P.terms[1:],
                            (d1,) + P.differentials[1:])


def repeat_top_term(cert):
    P, R = cert.resolution, cert.resolution.ring
    return _with_resolution(cert, P.terms + (P.term(P.hi),), P.differentials + (R.eye(P.rank_at(P.hi)),))


def skew_first_differential(cert):
    P, R = cert.resolution, cert.resolution.ring
    d1 = R.zeros(P.rank_at(0), P.rank_at(1))
    d1[0, 0] = 1
    return _with_resolution(cert, P.terms, (d1,) + P.differentials[1:])


def stray_target_degree(cert):
    P, R, f = cert.resolution, cert.resolution.ring, cert.augmentation
    T0, P1 = cert.target.term(0), P.term(1)
    target = make_complex({0: T0, 1: P1}, {1: hom_space(P1, T0)[0]})
    augmentation = ChainMap(P, target, {0: f.f(0), 1: R.eye(P1.rank)}, check=False)
    return replace(cert, target=target, augmentation=augmentation)


def mislabel_degree_zero(cert):
    P = cert.resolution
    M = copy.copy(P.term(0))
    object.__setattr__(M, "certificate", PermutationCertificate(trivial_gset(M.group, M.rank)))
    return _with_resolution(cert, (M,) + P.terms[1:], P.differentials)


def zero_first_differential(cert):
    P, R = cert.resolution, cert.resolution.ring
    return _with_resolution(cert, P.terms, (R.zeros(P.rank_at(0), P.rank_at(1)),) + P.differentials[1:])


CORRUPTIONS = [
    ("shape", widen_degree_zero),
    ("d_squared", repeat_top_term),
    ("equivariance", skew_first_differential),
    ("augmentation", stray_target_degree),
    ("term_certificate", mislabel_degree_zero),
    ("kind", lambda cert: replace(cert, kind="bogus")),
    ("exactness", zero_first_differential),
    ("homology_witness",
     lambda cert: replace(cert, homology_witness=HomologyReport(cert.resolution.ring, {0: (7, ()), 1: (3, ())}))),
    ("m_free_index", lambda cert: replace(cert, m_free_index=5)),
    ("m_projective_index", lambda cert: replace(cert, m_projective_index=5)),
]


@pytest.fixture(params=["permutation", "p-permutation"])
def certificate(request, group, gf2, gf3):
    if request.param == "permutation":
        return resolve_trivial(group("C2"), gf2)
    return resolve_module_search(jordan(group("C3"), gf3))


class TestCorruptedCertificates:
    def test_table_covers_every_clause(self):
        assert [clause for clause, _ in CORRUPTIONS] == list(CLAUSES)

    @pytest.mark.parametrize("clause,corrupt", CORRUPTIONS, ids=[clause for clause, _ in CORRUPTIONS])
    def test_rejected_at_clause(self, certificate, clause, corrupt):
        assert verify_certificate(certificate).ok
        report = verify_certificate(corrupt(certificate))
        assert not report.ok
        assert report.clause == clause
        assert report.checked == list(CLAUSES[:len(report.checked)])


class TestDerivedHom:
    @pytest.fixture
    def c2(self, group, gf2):
        G = group("C2")
        return G, trivial_module(G, gf2)

    def test_degree_zero(self, c2, gf2):
        _, k = c2
        Y = concentrated(k)
        assert derived_hom_dimension(m_free_trivial(k.group, gf2, 2), Y) == 1
        assert derived_hom_dimension(free_resolution_prefix(k, 1), Y) == 1

    def test_degree_one(self, c2, gf2):
        _, k = c2
        Y = concentrated(k, 1)
        assert derived_hom_dimension(m_free_trivial(k.group, gf2, 3), Y) == 1
        assert derived_hom_dimension(free_resolution_prefix(k, 2), Y) == 1

    def test_into_free(self, c2, gf2):
        G, k = c2
        Y = concentrated(free_module(G, gf2))
        assert derived_hom_dimension(m_free_trivial(G, gf2, 2), Y) == 1

    def test_needs_projective_terms(self, c2, gf2):
        G, k = c2
        with pytest.raises(HypothesisError):
            derived_hom_dimension(resolve_trivial(G, gf2), concentrated(k, 1))
