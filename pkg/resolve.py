"""Permutation and p-permutation resolutions.

Every constructor returns a ResolutionCertificate; ``verify_certificate``
re-checks one from the raw matrices and certificate data, using nothing but
the ring kernel.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from sympy import factorint

from chain_complex import (
    ChainComplex,
    ChainMap,
    HomologyReport,
    cancel_orbit_pairs,
    concentrated,
    cone,
    hom_mod_homotopy,
    homology,
    identity_chain_map,
    is_p_permutation_term,
    is_permutation_term,
    is_projective_term,
    lift_through_quasi_iso,
    m_free_index,
    m_projective_index,
    make_complex,
    shift,
    tensor_chain_maps,
    tensor_complexes,
    truncate,
)
from config import DEFAULT_SEED, TERM_RANK_CAP, TRIVIAL_CAP_ODD, TRIVIAL_CAP_P2, SearchCaps
from exceptions import (
    CapExceededError,
    CertificateError,
    ExhaustedError,
    HypothesisError,
    UnsupportedRingError,
)
from gmodule import (
    RGModule,
    direct_sum,
    fixed_points,
    free_module,
    linearize,
    omega,
    sign_module,
    submodule,
    tensor,
    trivial_module,
    zero_module,
)
from group import Group, Subgroup, coset_action, index2_normal_subgroups, subgroups
from koszul import augmented_resolution, koszul, monomial_embedding, tensor_induce_complex2
from ring import Ring, image_basis, inverse, invariant_factors, is_invertible, kernel, rank as matrix_rank
from signfix import certify_p_permutation, rectify_odd, split_even, try_rectify

LOGGER = logging.getLogger(__name__)

KINDS = ("permutation", "p-permutation")


# =====================================================
# RESOLUTIONS AND CERTIFICATES
# =====================================================

@dataclass(frozen=True, eq=False)
class ComplexResolution:
    """A chain map ``augmentation``: resolution -> target, meant to be a quasi-isomorphism."""

    resolution: ChainComplex
    target: ChainComplex
    augmentation: ChainMap

    @property
    def target_module(self) -> Optional[RGModule]:
        T = self.target
        if T.lo == 0 and T.hi == 0:
            return T.term(0)
        return None

    @property
    def spliced_ranks(self) -> Optional[Tuple[int, ...]]:
        """(rank M, rank P_0, rank P_1, ...) for a module target M, else None."""
        M = self.target_module
        if M is None or self.resolution.lo != 0:
            return None
        return (M.rank,) + self.resolution.ranks


@dataclass(frozen=True, eq=False)
class ResolutionCertificate(ComplexResolution):
    kind: str
    m_free_index: int
    m_projective_index: int
    homology_witness: HomologyReport

    @property
    def length(self) -> int:
        return self.resolution.hi

    def summary(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "m_free_index": self.m_free_index,
            "m_projective_index": self.m_projective_index,
            "resolution_lo": self.resolution.lo,
            "ranks": list(self.resolution.ranks),
            "spliced_ranks": None if self.spliced_ranks is None else list(self.spliced_ranks),
            "term_kinds": [self.resolution.term(s).kind for s in self.resolution.degrees],
            "homology_witness": self.homology_witness.to_dict(),
        }


def _resolution_kind(P: ChainComplex) -> Optional[str]:
    if all(is_permutation_term(M) for M in P.terms):
        return "permutation"
    if all(is_p_permutation_term(M) for M in P.terms):
        return "p-permutation"
    return None


def certify(res: ComplexResolution, kind: Optional[str] = None) -> ResolutionCertificate:
    """Wraps a resolution into a certificate after checking its kind and exactness.

    Args:
        res: the resolution and its augmentation
        kind: "permutation" or "p-permutation"; the strongest kind that holds by default

    Raises:
        CertificateError: a term has the wrong certificate or the augmentation is
            not a quasi-isomorphism
    """
    P = res.resolution
    actual = _resolution_kind(P)
    if actual is None:
        raise CertificateError("resolution has a term without a permutation-type certificate", clause="kind")
    if kind is None:
        kind = actual
    elif kind not in KINDS:
        raise CertificateError(f"unknown resolution kind {kind!r}", clause="kind")
    elif kind == "permutation" and actual != "permutation":
        raise CertificateError("resolution is only p-permutation", clause="kind")
    witness = homology(cone(res.augmentation))
    if not witness.is_acyclic():
        bad = next(s for s in sorted(witness.degrees) if not witness.vanishes_at(s))
        raise CertificateError("augmentation is not a quasi-isomorphism", clause="exactness", degree=bad)
    return ResolutionCertificate(
        res.resolution, res.target, res.augmentation,
        kind=kind,
        m_free_index=m_free_index(P),
        m_projective_index=m_projective_index(P),
        homology_witness=witness,
    )


# =====================================================
# INDEPENDENT VERIFIER
# =====================================================

CLAUSES = (
    "shape",
    "d_squared",
    "equivariance",
    "augmentation",
    "term_certificate",
    "kind",
    "exactness",
    "homology_witness",
    "m_free_index",
    "m_projective_index",
)


@dataclass
class VerificationReport:
    ok: bool
    clause: Optional[str] = None
    degree: Optional[int] = None
    message: str = ""
    checked: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "clause": self.clause,
            "degree": self.degree,
            "message": self.message,
            "checked": list(self.checked),
        }

    def raise_for_failure(self) -> None:
        if not self.ok:
            raise CertificateError(self.message, clause=self.clause, degree=self.degree)


def _fail(clause: str, message: str, degree: Optional[int] = None):
    raise CertificateError(message, clause=clause, degree=degree)


def _rank(A: np.ndarray, R: Ring) -> int:
    return 0 if A.size == 0 else matrix_rank(A, R)


def _permutation_matrix(R: Ring, perm, signs=None) -> np.ndarray:
    n = len(perm)
    P = R.zeros(n, n)
    for x, y in enumerate(perm):
        P[int(y), x] = 1 if signs is None else signs[x]
    return R.reduce(P)


def _certificate_problem(M: RGModule) -> Optional[str]:
    """What is wrong with M's certificate, or None."""
    R, G = M.ring, M.group
    cert = M.certificate
    if cert.kind in ("permutation", "free"):
        A = cert.gset
        if A.size != M.rank:
            return f"G-set has {A.size} points for a module of rank {M.rank}"
        B = R.eye(M.rank) if cert.basis is None else R.reduce(cert.basis)
        if M.rank and not is_invertible(B, R):
            return "permutation basis is not invertible"
        for s, (a, perm) in enumerate(zip(M.action, A.action)):
            if not R.equal(R.matmul(a, B), R.matmul(B, _permutation_matrix(R, perm))):
                return f"generator {s} does not permute the basis"
        if cert.kind == "free":
            for x in range(A.size):
                if len({int(A.table[g, x]) for g in range(G.order)}) != G.order:
                    return f"point {x} has a nontrivial stabilizer"
        return None
    if cert.kind == "monomial":
        S = cert.signed
        for s, (a, perm, signs) in enumerate(zip(M.action, S.perms, S.signs)):
            if not R.equal(a, _permutation_matrix(R, perm, signs)):
                return f"generator {s} is not the claimed signed permutation"
        return None
    if cert.kind == "summand":
        amb = cert.ambient
        if amb.kind not in ("permutation", "free"):
            return "ambient module is not a permutation module"
        inner = _certificate_problem(amb)
        if inner is not None:
            return f"ambient: {inner}"
        iota, pi = R.reduce(cert.embedding), R.reduce(cert.projection)
        if iota.shape != (amb.rank, M.rank) or pi.shape != (M.rank, amb.rank):
            return "embedding or projection has the wrong shape"
        if not R.equal(R.matmul(pi, iota), R.eye(M.rank)):
            return "projection after embedding is not the identity"
        if not R.equal(R.matmul(iota, pi), R.reduce(cert.idempotent)):
            return "idempotent differs from embedding after projection"
        for a, b in zip(M.action, amb.action):
            if not R.equal(R.matmul(b, iota), R.matmul(iota, a)) or not R.equal(R.matmul(pi, b), R.matmul(a, pi)):
                return "embedding or projection is not equivariant"
        return None
    return None


def _term_is_free(M: RGModule) -> bool:
    return M.rank == 0 or (M.kind == "free" and _certificate_problem(M) is None)


def _term_is_projective(M: RGModule) -> bool:
    if _term_is_free(M):
        return True
    return M.kind == "summand" and M.certificate.ambient.kind == "free" and _certificate_problem(M) is None


def _claimed_index_holds(P: ChainComplex, claimed: int, predicate) -> bool:
    return all(predicate(P.term(s)) for s in range(P.lo, claimed + 1))


def _check_complex(C: ChainComplex, name: str) -> None:
    R, G = C.ring, C.group
    for s in C.degrees:
        M = C.term(s)
        if M.ring != R or M.group != G:
            _fail("shape", f"{name} term {s} lives over another ring or group", s)
        if len(M.action) != len(G.generators) or any(a.shape != (M.rank, M.rank) for a in M.action):
            _fail("shape", f"{name} term {s} has malformed action matrices", s)
    for s in range(C.lo + 1, C.hi + 1):
        if C.d(s).shape != (C.rank_at(s - 1), C.rank_at(s)):
            _fail("shape", f"{name} differential {s} has the wrong shape", s)
    for s in range(C.lo + 2, C.hi + 1):
        if not R.is_zero(R.matmul(C.d(s - 1), C.d(s))):
            _fail("d_squared", f"{name}: d_{s - 1} d_{s} is not zero", s)
    for s in range(C.lo + 1, C.hi + 1):
        d = C.d(s)
        for a, b in zip(C.term(s).action, C.term(s - 1).action):
            if not R.equal(R.matmul(b, d), R.matmul(d, a)):
                _fail("equivariance", f"{name} differential {s} is not equivariant", s)


def _check_augmentation(cert: ComplexResolution) -> None:
    P, T, f = cert.resolution, cert.target, cert.augmentation
    R = P.ring
    lo, hi = min(P.lo, T.lo), max(P.hi, T.hi)
    for s in range(lo, hi + 1):
        fs = f.f(s)
        if fs.shape != (T.rank_at(s), P.rank_at(s)):
            _fail("shape", f"augmentation component {s} has the wrong shape", s)
        for a, b in zip(P.term(s).action, T.term(s).action):
            if not R.equal(R.matmul(b, fs), R.matmul(fs, a)):
                _fail("equivariance", f"augmentation component {s} is not equivariant", s)
    for s in range(lo + 1, hi + 1):
        if not R.equal(R.matmul(T.d(s), f.f(s)), R.matmul(f.f(s - 1), P.d(s))):
            _fail("augmentation", f"augmentation does not commute with the differentials in degree {s}", s)


def _spliced_differentials(cert: ComplexResolution) -> Tuple[int, int, Dict[int, np.ndarray]]:
    """Differentials of T_s ⊕ P_{s-1} with [[d_T, f], [0, -d_P]]."""
    P, T, f = cert.resolution, cert.target, cert.augmentation
    R = P.ring
    lo, hi = min(T.lo, P.lo + 1), max(T.hi, P.hi + 1)
    diffs = {}
    for s in range(lo + 1, hi + 1):
        ts, ps = T.rank_at(s), P.rank_at(s - 1)
        tt, pt = T.rank_at(s - 1), P.rank_at(s - 2)
        D = R.zeros(tt + pt, ts + ps)
        D[:tt, :ts] = T.d(s)
        D[:tt, ts:] = f.f(s - 1)
        D[tt:, ts:] = R.neg(P.d(s - 1))
        diffs[s] = D
    return lo, hi, diffs


def _boundary(d: np.ndarray, R: Ring) -> Tuple[int, Tuple[int, ...]]:
    """Rank of d and, over the integers, its invariant factors other than 1."""
    if d.size == 0:
        return 0, ()
    if R.is_field:
        return _rank(d, R), ()
    factors = [abs(int(x)) for x in invariant_factors(d)]
    return len(factors), tuple(f for f in factors if f != 1)


def _check_exactness(cert: ComplexResolution) -> Dict[int, Tuple[int, Tuple[int, ...]]]:
    """Homology of the spliced complex, failing on the first degree where it survives."""
    P, T = cert.resolution, cert.target
    R = P.ring
    lo, hi, diffs = _spliced_differentials(cert)
    boundaries = {s: _boundary(d, R) for s, d in diffs.items()}
    recomputed = {}
    for s in range(lo, hi + 1):
        dim = T.rank_at(s) + P.rank_at(s - 1)
        out_rank = boundaries.get(s, (0, ()))[0]
        in_rank, torsion = boundaries.get(s + 1, (0, ()))
        if dim - out_rank - in_rank != 0:
            _fail("exactness", f"spliced complex has homology in degree {s}", s)
        if torsion:
            _fail("exactness", f"spliced complex has torsion homology in degree {s}", s)
        recomputed[s] = (dim - out_rank - in_rank, torsion)
    return recomputed


def _check_witness(cert: ResolutionCertificate, recomputed: Dict[int, Tuple[int, Tuple[int, ...]]]) -> None:
    witness = cert.homology_witness
    if witness.ring != cert.resolution.ring:
        _fail("homology_witness", f"witness is over {witness.ring}, not {cert.resolution.ring}")
    claimed = {int(s): (int(r), tuple(int(t) for t in tor)) for s, (r, tor) in witness.degrees.items()}
    if set(claimed) != set(recomputed):
        _fail("homology_witness", f"witness covers degrees {sorted(claimed)}, "
                                  f"the spliced complex has {sorted(recomputed)}")
    for s in sorted(recomputed):
        if claimed[s] != recomputed[s]:
            _fail("homology_witness", f"witness claims {claimed[s]} in degree {s}, "
                                      f"recomputed {recomputed[s]}", s)


def verify_certificate(cert: ResolutionCertificate) -> VerificationReport:
    """Re-checks a certificate from scratch and names the first violated clause."""
    checked: List[str] = []
    try:
        P = cert.resolution
        _check_complex(P, "resolution")
        _check_complex(cert.target, "target")
        checked += ["shape", "d_squared", "equivariance"]
        _check_augmentation(cert)
        checked.append("augmentation")
        for s in P.degrees:
            problem = _certificate_problem(P.term(s))
            if problem is not None:
                _fail("term_certificate", f"term {s}: {problem}", s)
        checked.append("term_certificate")
        allowed = ("permutation", "free") if cert.kind == "permutation" else ("permutation", "free", "summand")
        if cert.kind not in KINDS:
            _fail("kind", f"unknown kind {cert.kind!r}")
        for s in P.degrees:
            M = P.term(s)
            if M.rank and M.kind not in allowed:
                _fail("kind", f"term {s} is {M.kind}, not allowed in a {cert.kind} resolution", s)
        checked.append("kind")
        recomputed = _check_exactness(cert)
        checked.append("exactness")
        _check_witness(cert, recomputed)
        checked.append("homology_witness")
        if not _claimed_index_holds(P, cert.m_free_index, _term_is_free):
            _fail("m_free_index", f"terms up to degree {cert.m_free_index} are not all free")
        checked.append("m_free_index")
        if not _claimed_index_holds(P, cert.m_projective_index, _term_is_projective):
            _fail("m_projective_index", f"terms up to degree {cert.m_projective_index} are not all projective")
        checked.append("m_projective_index")
    except CertificateError as e:
        LOGGER.info("certificate rejected at %s: %s", e.clause, e)
        return VerificationReport(False, e.clause, e.degree, str(e), checked)
    return VerificationReport(True, checked=checked)


# =====================================================
# COMPLEX SURGERY
# =====================================================

def _basis_inverse(B: np.ndarray, R: Ring) -> np.ndarray:
    T = R.reduce(B.T.copy())
    if R.equal(R.matmul(T, B), R.eye(B.shape[0])):
        return T
    return inverse(B, R)


def _replace_degree(C: ChainComplex, s: int, module: RGModule, change: np.ndarray,
                    change_inv: np.ndarray) -> ChainComplex:
    """C with ``module`` in degree s, where ``change`` maps module coordinates to the old ones."""
    R = C.ring
    terms = {t: C.term(t) for t in C.degrees}
    terms[s] = module
    diffs = {t: C.d(t) for t in range(C.lo + 1, C.hi + 1)}
    if s in diffs:
        diffs[s] = R.matmul(diffs[s], change)
    if s + 1 in diffs:
        diffs[s + 1] = R.matmul(change_inv, diffs[s + 1])
    return make_complex(terms, diffs)


def _straighten(C: ChainComplex) -> ChainComplex:
    """Moves permutation terms with an explicit basis onto that basis."""
    R = C.ring
    for s in C.degrees:
        M = C.term(s)
        if M.kind in ("permutation", "free") and M.certificate.basis is not None:
            B = R.reduce(M.certificate.basis)
            C = _replace_degree(C, s, linearize(M.certificate.gset, R), B, _basis_inverse(B, R))
    return C


def _trim_top(C: ChainComplex) -> ChainComplex:
    hi = C.hi
    while hi > C.lo and C.rank_at(hi) == 0:
        hi -= 1
    return C if hi == C.hi else truncate(C, C.lo, hi)


def _check_ranks(C: ChainComplex, stage: int) -> None:
    for s in C.degrees:
        if C.rank_at(s) > TERM_RANK_CAP:
            raise CapExceededError(f"term of rank {C.rank_at(s)} exceeds the cap {TERM_RANK_CAP}",
                                   degree=s, stage=stage)


# =====================================================
# THE TRIVIAL MODULE OVER A p-GROUP
# =====================================================

def group_prime(G: Group) -> Optional[int]:
    """p for a nontrivial p-group, None for the trivial group."""
    if G.order == 1:
        return None
    primes = factorint(G.order)
    if len(primes) != 1:
        raise HypothesisError(f"group {G.label} of order {G.order} is not a p-group")
    return int(next(iter(primes)))


def _rectify_odd_complex(C: ChainComplex, p: int) -> ChainComplex:
    for s in C.degrees:
        fixed = rectify_odd(C.term(s), p)
        D = fixed.change.matrix
        C = _replace_degree(C, s, fixed.module, D, D)
    return C


def _sign_resolution(G: Group, H: Subgroup, R: Ring) -> ChainMap:
    """s: (R -> R(G/H)) -> L, the inflated resolution of the sign module."""
    _, cosets = coset_action(G, H)
    C = make_complex({0: linearize(cosets, R), 1: trivial_module(G, R)}, {1: R.matrix([[1], [1]])})
    L = concentrated(sign_module(G, H, R))
    return ChainMap(C, L, {0: R.matrix([[1, -1]])})


def _delta_step(C: ChainComplex, H: Subgroup, m: int) -> ChainComplex:
    """One descending step: the exact complex becomes permutation from degree m up.

    C_m = C_m⁺ ⊕ (L⊗C_m⁻) cuts C into C'' (degrees >= m, with C_m⁺ on the
    bottom) and C''' (degrees <= m, with L⊗C_m⁻ on top) joined by a chain
    map t whose cone is C. The result is cone(s⊗t) for the sign resolution s.
    """
    G, R = C.group, C.ring
    split = split_even(C.term(m), H)
    Q = split.iso.matrix
    C = _replace_degree(C, m, split.iso.source, Q, R.reduce(Q.T.copy()))
    p = split.plus.rank
    twisted = tensor(split.sign, split.minus)
    up, down = C.d(m + 1), C.d(m)

    upper_terms = {m: split.plus}
    upper_diffs = {}
    for s in range(m + 1, C.hi + 1):
        upper_terms[s] = C.term(s)
        upper_diffs[s] = up[:p, :] if s == m + 1 else C.d(s)
    X = shift(make_complex(upper_terms, upper_diffs), -1, sign=True)

    lower_terms = {s: C.term(s) for s in range(C.lo, m)}
    lower_terms[m] = twisted
    lower_diffs = {s: C.d(s) for s in range(C.lo + 1, m)}
    if m > C.lo:
        lower_diffs[m] = down[:, p:]
    Y = make_complex(lower_terms, lower_diffs)

    comps = {}
    if m + 1 <= C.hi:
        comps[m] = up[p:, :]
    if m - 1 >= C.lo:
        comps[m - 1] = down[:, :p]
    t = ChainMap(X, Y, comps)
    s = _sign_resolution(G, H, R)
    return _trim_top(_straighten(cone(tensor_chain_maps(s, t))))


def _resolve_two_group(G: Group, ring: Ring) -> ChainComplex:
    """Exact complex R <- C_1 <- ... of permutation modules, C_1 free, for a 2-group."""
    if G.order == 1:
        return koszul(G, ring)
    H = index2_normal_subgroups(G)[0]
    D = _resolve_two_group(H.as_group, ring)
    C = _straighten(tensor_induce_complex2(D, monomial_embedding(G, H)))
    _check_ranks(C, stage=C.hi)
    C = _trim_top(cancel_orbit_pairs(C, keep=(0,)))
    LOGGER.info("order %d: tensor-induced ranks %s", G.order, C.ranks)
    for m in range(C.hi, -1, -1):
        M = C.term(m)
        if is_permutation_term(M):
            continue
        fixed = try_rectify(M)
        if fixed is not None:
            D_m = fixed.change.matrix
            C = _replace_degree(C, m, fixed.module, D_m, D_m)
            LOGGER.debug("order %d: degree %d rectified by signs", G.order, m)
            continue
        C = _trim_top(cancel_orbit_pairs(_delta_step(C, H, m), keep=(0,)))
        _check_ranks(C, stage=m)
        for s in range(m, C.hi + 1):
            if not is_permutation_term(C.term(s)):
                raise CertificateError(f"degree {s} is not permutation after stage {m}",
                                       clause="stage", degree=s, stage=m)
        LOGGER.info("order %d: stage %d ranks %s", G.order, m, C.ranks)
    C0 = C.term(0)
    if C0.rank != 1 or any(not ring.equal(a, ring.eye(1)) for a in C0.action):
        raise CertificateError("degree 0 did not come out trivial", clause="stage", degree=0, stage=0)
    if C.hi < 1 or C.term(1).kind != "free":
        raise CertificateError("degree 1 is not free", clause="stage", degree=1, stage=0)
    return C


def resolve_trivial(G: Group, ring: Ring) -> ResolutionCertificate:
    """Finite permutation resolution of the trivial module over a p-group, free in degree 0.

    Odd p rectifies the signs of the Koszul complex; p = 2 tensor-induces a
    resolution over an index-2 subgroup and repairs the sign terms degree by
    degree from the top, cancelling contractible orbit pairs after every
    stage. Over GF(2) the Koszul complex needs no repair.

    Raises:
        HypothesisError: G is not a p-group
        CapExceededError: |G| or a term rank is above its cap
    """
    p = group_prime(G)
    cap = TRIVIAL_CAP_P2 if p == 2 else TRIVIAL_CAP_ODD
    if p is not None and G.order > cap:
        raise CapExceededError(f"resolve_trivial is capped at order {cap} for p = {p}")
    if p is None or p == 2 and ring.characteristic == 2:
        C = koszul(G, ring)
    elif p == 2:
        C = _resolve_two_group(G, ring)
    else:
        C = _rectify_odd_complex(koszul(G, ring), p)
    C = _straighten(C)
    aug = augmented_resolution(C)
    cert = certify(ComplexResolution(aug.resolution, aug.augmentation.target, aug.augmentation), kind="permutation")
    LOGGER.info("resolve_trivial %s over %s: spliced ranks %s", G.label, ring, cert.spliced_ranks)
    return cert


def m_free_trivial(G: Group, ring: Ring, m: int) -> ResolutionCertificate:
    """The m-fold tensor power of resolve_trivial, free in degrees <= m - 1."""
    if m < 1:
        raise HypothesisError(f"tensor power needs m >= 1, got {m}")
    base = resolve_trivial(G, ring)
    if m == 1:
        return base
    P, aug = base.resolution, base.augmentation
    for k in range(2, m + 1):
        P = tensor_complexes(P, base.resolution)
        aug = tensor_chain_maps(aug, base.augmentation)
        _check_ranks(P, stage=k)
    cert = certify(ComplexResolution(P, aug.target, aug), kind="permutation")
    if cert.m_free_index < m - 1:
        raise CertificateError(f"tensor power is only {cert.m_free_index}-free", clause="m_free_index")
    LOGGER.info("m_free_trivial %s m=%d: ranks %s", G.label, m, P.ranks)
    return cert


# =====================================================
# CONES OF RESOLVED MAPS
# =====================================================

def combine_resolutions(f: ChainMap, P: ComplexResolution, Q: ComplexResolution) -> ResolutionCertificate:
    """Resolution of cone(f) from resolutions P of the source and Q of the target.

    Lifts f∘s to h: P -> Q with t∘h homotopic to f∘s and returns cone(h) with
    the map [[t, k], [0, s]] to cone(f), k the homotopy. P must be projective
    up to the top degree of Q and of the target of f.
    """
    R = f.ring
    if not R.is_field:
        raise UnsupportedRingError("combining resolutions needs field coefficients")
    X, Y = f.source, f.target
    if (P.target.lo, P.target.ranks) != (X.lo, X.ranks) or (Q.target.lo, Q.target.ranks) != (Y.lo, Y.ranks):
        raise HypothesisError("P and Q must resolve the source and the target of f")
    m = max(Q.resolution.hi, Y.hi)
    for i in range(P.resolution.lo, m + 1):
        if not is_projective_term(P.resolution.term(i)):
            raise HypothesisError(f"P is not projective in degree {i}; need degrees up to {m}", degree=i)
    s, t = P.augmentation, Q.augmentation
    lift = lift_through_quasi_iso(f.compose(s), t, m)
    h = lift.fhat
    cone_h, cone_f = cone(h), cone(f)
    comps = {}
    for d in range(min(cone_h.lo, cone_f.lo), max(cone_h.hi, cone_f.hi) + 1):
        ys, qs = Y.rank_at(d), Q.resolution.rank_at(d)
        block = R.zeros(cone_f.rank_at(d), cone_h.rank_at(d))
        block[:ys, :qs] = t.f(d)
        block[:ys, qs:] = lift.homotopy_at(d - 1, R, ys, P.resolution.rank_at(d - 1))
        block[ys:, qs:] = s.f(d - 1)
        comps[d] = block
    phi = ChainMap(cone_h, cone_f, comps)
    return certify(ComplexResolution(cone_h, cone_f, phi))


# =====================================================
# p-PERMUTATION SEARCH
# =====================================================

@dataclass(frozen=True, eq=False)
class _Cover:
    module: RGModule
    matrix: np.ndarray
    pieces: Tuple[int, ...]
    score: Tuple


@dataclass(frozen=True, eq=False)
class _Tail:
    """Covers (module, map onto the kernel, inclusion of its own kernel), then a certified top."""

    levels: Tuple[Tuple[RGModule, np.ndarray, np.ndarray], ...]
    top: Optional[RGModule]


class _Search:
    """Greedy-with-backtracking search for p-permutation resolutions of kernels."""

    def __init__(self, G: Group, ring: Ring, caps: SearchCaps, seed: int):
        self.group = G
        self.ring = ring
        self.caps = caps
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.spent = 0
        reps = subgroups(G, up_to_conjugacy=True)
        order = sorted(range(len(reps)), key=lambda i: (-reps[i].order, i))
        self.classes = [reps[i] for i in order]
        self.transversals = []
        self.modules = []
        for H in self.classes:
            transversal, cosets = coset_action(G, H)
            self.transversals.append(transversal)
            self.modules.append(linearize(cosets, ring))

    def exhausted(self, message: str, **kwargs) -> ExhaustedError:
        return ExhaustedError(message, caps=self.caps.model_dump(), **kwargs)

    def _block(self, K: RGModule, i: int, v: np.ndarray) -> np.ndarray:
        R = self.ring
        cols = [R.matmul(K.element_matrix(r), v) for r in self.transversals[i].representatives]
        return R.reduce(np.hstack(cols))

    def _generators(self, K: RGModule) -> Dict[int, List[np.ndarray]]:
        R = self.ring
        out = {}
        for i, H in enumerate(self.classes):
            _, basis = fixed_points(K, H)
            vectors = [basis[:, [j]] for j in range(basis.shape[1])]
            if basis.shape[1] >= 2:
                for _ in range(2):
                    coeffs = R.matrix(self.rng.integers(0, R.p, size=(basis.shape[1], 1)))
                    v = R.matmul(basis, coeffs)
                    if not R.is_zero(v):
                        vectors.append(v)
            out[i] = [self._block(K, i, v) for v in vectors]
        return out

    def _greedy(self, K: RGModule, blocks: Dict[int, List[np.ndarray]], order: List[int]) -> Optional[_Cover]:
        R = self.ring
        current = R.zeros(K.rank, 0)
        r = 0
        chosen: List[Tuple[int, np.ndarray]] = []
        counts: Counter = Counter()
        for i in order:
            while r < K.rank and counts[i] < self.caps.multiplicity:
                best = None
                for block in blocks[i]:
                    gain = _rank(np.hstack([current, block]), R) - r
                    if gain > 0 and (best is None or gain > best[0]):
                        best = (gain, block)
                if best is None:
                    break
                current = np.hstack([current, best[1]])
                r += best[0]
                chosen.append((i, best[1]))
                counts[i] += 1
            if r == K.rank:
                break
        if r < K.rank:
            return None
        pieces = tuple(i for i, _ in chosen)
        module = direct_sum(*[self.modules[i] for i in pieces])
        score = (module.rank - K.rank, len(pieces), tuple(sorted((-self.classes[i].order, i) for i in pieces)))
        return _Cover(module, R.reduce(current), pieces, score)

    def covers(self, K: RGModule) -> List[_Cover]:
        """Surjections onto K from sums of k(G/H), best score first."""
        blocks = self._generators(K)
        n = len(self.classes)
        desc = list(range(n))
        orders = [desc, desc[::-1]] + [[i] + [j for j in desc if j != i] for i in desc]
        seen, out = set(), []
        for order in orders:
            cover = self._greedy(K, blocks, order)
            if cover is None:
                continue
            key = (cover.pieces, cover.matrix.tobytes())
            if key in seen:
                continue
            seen.add(key)
            out.append(cover)
        out.sort(key=lambda c: c.score)
        return out

    def resolve(self, K: RGModule, depth: int) -> Optional[_Tail]:
        if K.rank == 0:
            return _Tail((), None)
        verdict = certify_p_permutation(K, seed=self.seed)
        if verdict.certified:
            return _Tail((), verdict.module)
        if depth == 0:
            return None
        R = self.ring
        for cover in self.covers(K):
            self.spent += 1
            if self.spent > self.caps.budget:
                raise self.exhausted(f"search budget of {self.caps.budget} covers spent")
            LOGGER.debug("search depth %d: trying cover %s (score %s)", depth, cover.pieces, cover.score)
            Kn, inc = submodule(cover.module, kernel(cover.matrix, R))
            tail = self.resolve(Kn, depth - 1)
            if tail is not None:
                return _Tail(((cover.module, cover.matrix, inc.matrix),) + tail.levels, tail.top)
        return None


def _splice(terms: Dict[int, RGModule], diffs: Dict[int, np.ndarray], s: int, inc: np.ndarray,
            tail: _Tail) -> int:
    """Appends the tail above degree s, whose first kernel sits in terms[s] via ``inc``."""
    R = terms[s].ring
    for module, matrix, kernel_inc in tail.levels:
        s += 1
        terms[s] = module
        diffs[s] = R.matmul(inc, matrix)
        inc = kernel_inc
    if tail.top is not None:
        s += 1
        terms[s] = tail.top
        diffs[s] = R.reduce(inc)
    return s


def _as_resolution(M: RGModule, terms: Dict[int, RGModule], diffs: Dict[int, np.ndarray], top: int) -> ComplexResolution:
    """terms[-1] is M and diffs[0] the augmentation."""
    R = M.ring
    if top < 0:
        Z = zero_module(M.group, R)
        P = concentrated(Z)
        return ComplexResolution(P, concentrated(M), ChainMap(P, concentrated(M), {0: R.zeros(M.rank, 0)}))
    P = make_complex({s: terms[s] for s in range(0, top + 1)}, {s: diffs[s] for s in range(1, top + 1)})
    target = concentrated(M)
    return ComplexResolution(P, target, ChainMap(P, target, {0: diffs[0]}))


def _require_field(M: RGModule, what: str) -> None:
    if not M.ring.is_field:
        raise UnsupportedRingError(f"{what} needs field coefficients")


def resolve_module_search(M: RGModule, caps: Optional[SearchCaps] = None,
                          seed: int = DEFAULT_SEED) -> ResolutionCertificate:
    """Bounded search for a finite p-permutation resolution of M.

    Each step covers the current kernel by a sum of k(G/H) (scored by kernel
    dimension, then summand count, then larger subgroups) and stops when the
    kernel is certified p-permutation or zero.

    Raises:
        ExhaustedError: nothing found within the caps; not a disproof
    """
    _require_field(M, "resolve_module_search")
    caps = caps or SearchCaps()
    search = _Search(M.group, M.ring, caps, seed)
    tail = search.resolve(M, caps.depth)
    if tail is None:
        raise search.exhausted(f"no p-permutation resolution within depth {caps.depth}")
    terms, diffs = {-1: M}, {}
    top = _splice(terms, diffs, -1, M.ring.eye(M.rank), tail)
    cert = certify(_as_resolution(M, terms, diffs, top), kind="p-permutation")
    LOGGER.info("resolve_module_search: spliced ranks %s after %d covers", cert.spliced_ranks, search.spent)
    return cert


def resolve_omega_pair(M: RGModule, caps: Optional[SearchCaps] = None, seed: int = DEFAULT_SEED,
                       free_start: bool = False) -> ResolutionCertificate:
    """Resolution of M ⊕ Ω(M).

    With ``free_start`` degree 0 is the Frobenius free cover kG⊗(M ⊕ Ω(M)) and
    the search continues on its kernel, so the result is at least 0-projective.
    """
    _require_field(M, "resolve_omega_pair")
    caps = caps or SearchCaps()
    Om, _, _ = omega(M)
    S = direct_sum(M, Om)
    if not free_start:
        cert = resolve_module_search(S, caps, seed)
    else:
        search = _Search(M.group, M.ring, caps, seed)
        if caps.depth < 1:
            raise search.exhausted("a free start needs depth at least 1")
        kern, inc, cover = omega(S)
        tail = search.resolve(kern, caps.depth - 1)
        if tail is None:
            raise search.exhausted(f"no p-permutation resolution within depth {caps.depth}")
        tail = _Tail(((cover.source, cover.matrix, inc.matrix),) + tail.levels, tail.top)
        terms, diffs = {-1: S}, {}
        top = _splice(terms, diffs, -1, M.ring.eye(S.rank), tail)
        cert = certify(_as_resolution(S, terms, diffs, top), kind="p-permutation")
    LOGGER.info("omega pair: rank %d, m-projective index %d", S.rank, cert.m_projective_index)
    return cert


# =====================================================
# FREE RESOLUTIONS AND THE Q(n) TOWER
# =====================================================

def _free_cover(K: RGModule) -> Tuple[RGModule, np.ndarray]:
    """kG^r -> K on greedily chosen generators, column c·|G| + x ↦ x·v_c."""
    R, G = K.ring, K.group
    current = R.zeros(K.rank, 0)
    r = 0
    for j in range(K.rank):
        v = R.eye(K.rank)[:, [j]]
        block = np.hstack([R.matmul(K.element_matrix(x), v) for x in range(G.order)])
        gain = _rank(np.hstack([current, block]), R) - r
        if gain > 0:
            current = np.hstack([current, block])
            r += gain
        if r == K.rank:
            break
    return free_module(G, R, current.shape[1] // G.order), R.reduce(current)


def free_resolution_prefix(M: RGModule, length: int) -> ComplexResolution:
    """Free modules P_0..P_length from iterated free covers of the kernels.

    Stops early when a kernel vanishes; otherwise the top degree still has
    homology, so this is a prefix rather than a resolution.
    """
    _require_field(M, "free_resolution_prefix")
    R = M.ring
    levels = []
    K = M
    for _ in range(length + 1):
        if K.rank == 0:
            break
        F, cover = _free_cover(K)
        Kn, inc = submodule(F, kernel(cover, R))
        levels.append((F, cover, inc.matrix))
        K = Kn
    terms, diffs = {-1: M}, {}
    top = _splice(terms, diffs, -1, R.eye(M.rank), _Tail(tuple(levels), None))
    return _as_resolution(M, terms, diffs, top)


@dataclass(frozen=True, eq=False)
class QStage:
    """Q(n): agrees with the free resolution below degree n, p-permutation above."""

    n: int
    m: int
    complex: ChainComplex
    augmentation: ChainMap
    free_prefix: Optional[ComplexResolution]
    certificate: Optional[ResolutionCertificate]


def build_Qn(M: RGModule, n: int, caps: Optional[SearchCaps] = None, m: Optional[int] = None,
             seed: int = DEFAULT_SEED) -> QStage:
    """Stage n of the tower: truncate the free resolution at m, resolve N = im(P_{m+1} -> P_m), splice.

    Args:
        M: module over a field
        n: stage; Q(0) is M itself
        caps: search caps for resolving N
        m: truncation degree, at least n - 1 (the default)
    """
    _require_field(M, "build_Qn")
    if n < 0:
        raise HypothesisError(f"stage must be nonnegative, got {n}")
    if n == 0:
        C = concentrated(M)
        return QStage(0, -1, C, identity_chain_map(C), None, None)
    m = n - 1 if m is None else m
    if m < n - 1:
        raise HypothesisError(f"truncation degree {m} is below n - 1 = {n - 1}")
    caps = caps or SearchCaps()
    R = M.ring
    prefix = free_resolution_prefix(M, m + 1)
    P = prefix.resolution
    top = min(m, P.hi)
    terms: Dict[int, RGModule] = {-1: M}
    diffs = {0: prefix.augmentation.f(0)}
    for d in range(0, top + 1):
        terms[d] = P.term(d)
        if d >= 1:
            diffs[d] = P.d(d)
    if P.hi >= top + 1 and P.rank_at(top + 1):
        N, inc = submodule(P.term(top), image_basis(P.d(top + 1), R))
    else:
        N, inc = zero_module(M.group, R), None
    search = _Search(M.group, R, caps, seed)
    tail = search.resolve(N, caps.depth)
    if tail is None:
        raise search.exhausted(f"image in degree {top} has no p-permutation resolution within the caps", stage=n)
    if inc is not None:
        top = _splice(terms, diffs, top, inc.matrix, tail)
    res = _as_resolution(M, terms, diffs, top)
    Q = res.resolution
    for d in range(0, min(n, P.hi + 1)):
        if Q.term(d) is not P.term(d) or (d >= 1 and not R.equal(Q.d(d), P.d(d))):
            raise CertificateError(f"Q({n}) differs from the free resolution in degree {d}",
                                   clause="agreement", degree=d, stage=n)
    cert = certify(res, kind="p-permutation")
    LOGGER.info("Q(%d) with m=%d: spliced ranks %s", n, m, cert.spliced_ranks)
    return QStage(n, m, Q, res.augmentation, prefix, cert)


# =====================================================
# HOM THROUGH A RESOLUTION
# =====================================================

def derived_hom_dimension(res: ComplexResolution, Y: ChainComplex) -> int:
    """dim Hom(P, Y) in the homotopy category, for P projective through degree top(Y) + 1."""
    P = res.resolution
    need = Y.hi + 1
    for i in range(P.lo, need + 1):
        if not is_projective_term(P.term(i)):
            raise HypothesisError(f"resolution is not projective in degree {i}; need degrees up to {need}",
                                  degree=i)
    return hom_mod_homotopy(P, Y).dim
