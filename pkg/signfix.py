"""Sign-permutation modules: rectification, the even split and p-permutation certificates."""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from sympy import Matrix, Rational

from config import DEFAULT_SEED, INTERTWINER_ATTEMPTS
from exceptions import HypothesisError, SignConsistencyError, UnsupportedRingError
from gmodule import (
    ModuleMap,
    RGModule,
    SignedGSet,
    SummandCertificate,
    brauer_quotient_dimension,
    direct_sum,
    hom_space,
    induce,
    induction_norm_composite,
    linearize,
    restrict,
    sign_module,
    signed_view,
    tensor,
)
from group import GSet, Subgroup, coset_action, subgroups, sylow, table_of_marks
from ring import is_invertible, inverse

LOGGER = logging.getLogger(__name__)


# =====================================================
# SIGN RECTIFICATION
# =====================================================

@dataclass(frozen=True, eq=False)
class Rectified:
    """``module`` has genuine permutation action; ``change`` maps it isomorphically onto the input."""

    module: RGModule
    change: ModuleMap
    signs: Tuple[int, ...]


def sign_fix(S: SignedGSet) -> Tuple[int, ...]:
    """Signs c with g·(c_x e_x) = c_{gx} e_{gx} for every generator.

    Propagates along a spanning tree of each orbit from its smallest point and
    checks every remaining edge.

    Raises:
        SignConsistencyError: some orbit admits no such choice
    """
    c: List[Optional[int]] = [None] * S.size
    for root in range(S.size):
        if c[root] is not None:
            continue
        c[root] = 1
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for perm, signs in zip(S.perms, S.signs):
                y = perm[x]
                want = c[x] * signs[x]
                if c[y] is None:
                    c[y] = want
                    queue.append(y)
                elif c[y] != want:
                    raise SignConsistencyError(f"sign propagation is inconsistent at point {y}")
    return tuple(int(v) for v in c)


def rectify_signs(M: RGModule) -> Rectified:
    """Diagonal ±1 change of basis turning a sign-permutation module into a permutation module."""
    S = signed_view(M)
    if S is None:
        raise HypothesisError(f"module has no sign-permutation basis (certificate {M.kind})")
    R = M.ring
    c = sign_fix(S)
    D = R.diag(c)
    A = S.underlying()
    action = tuple(R.chain(D, a, D) for a in M.action)
    P = RGModule(M.group, R, M.rank, action, linearize(A, R).certificate)
    LOGGER.debug("rectified %d lines, %d sign flips", M.rank, sum(1 for v in c if v < 0))
    return Rectified(P, ModuleMap(P, M, D), c)


def try_rectify(M: RGModule) -> Optional[Rectified]:
    try:
        return rectify_signs(M)
    except SignConsistencyError:
        return None


def rectify_odd(M: RGModule, p: int) -> Rectified:
    """Every sign-permutation module over an odd p-group is a permutation module.

    Raises:
        HypothesisError: p is even or the group is not a p-group
        SignConsistencyError: the signs do not rectify (invalid input)
    """
    if p % 2 == 0:
        raise HypothesisError("rectify_odd needs an odd prime")
    if not M.group.is_p_group(p):
        raise HypothesisError(f"group of order {M.group.order} is not a {p}-group")
    return rectify_signs(M)


# =====================================================
# THE EVEN SPLIT
# =====================================================

@dataclass(frozen=True, eq=False)
class EvenSplit:
    """M ≅ M⁺ ⊕ (L⊗M⁻) with ``iso`` from the right side onto M."""

    plus: RGModule
    minus: RGModule
    sign: RGModule
    iso: ModuleMap
    plus_points: Tuple[int, ...]
    minus_points: Tuple[int, ...]


def _sub_gset(A: GSet, points: List[int]) -> GSet:
    index = {x: i for i, x in enumerate(points)}
    action = tuple(tuple(index[a[x]] for x in points) for a in A.action)
    return GSet(A.group, len(points), action)


def split_even(M: RGModule, H: Subgroup, g: Optional[int] = None) -> EvenSplit:
    """Splits the basis by the sign of g: A⁺ = {a : g·a ∈ A}, A⁻ = {a : g·a ∈ -A}.

    Args:
        M: module with a sign-permutation basis on which H acts without signs
        H: normal subgroup of index 2
        g: an element outside H (the first one by default)
    """
    G, R = M.group, M.ring
    if H.index != 2:
        raise HypothesisError(f"split_even needs an index-2 subgroup, got index {H.index}")
    S = signed_view(M)
    if S is None:
        raise HypothesisError(f"module has no sign-permutation basis (certificate {M.kind})")
    if g is None:
        g = next(x for x in range(G.order) if x not in H)
    elif g in H:
        raise HypothesisError("the splitting element must lie outside H")
    _, sign_table = S.tables
    if R.characteristic != 2 and np.any(sign_table[list(H.members)] != 1):
        raise HypothesisError("H acts with signs")

    if R.characteristic == 2:
        plus_pts, minus_pts = list(range(M.rank)), []
    else:
        plus_pts = [x for x in range(M.rank) if sign_table[g, x] == 1]
        minus_pts = [x for x in range(M.rank) if sign_table[g, x] == -1]
    A = S.underlying()
    plus = linearize(_sub_gset(A, plus_pts), R)
    minus = linearize(_sub_gset(A, minus_pts), R)
    L = sign_module(G, H, R)
    twisted = tensor(L, minus)
    source = direct_sum(plus, twisted)
    Q = R.zeros(M.rank, M.rank)
    for i, x in enumerate(plus_pts + minus_pts):
        Q[x, i] = 1
    iso = ModuleMap(source, M, Q)
    LOGGER.debug("split_even: |A+| = %d, |A-| = %d", len(plus_pts), len(minus_pts))
    return EvenSplit(plus, minus, L, iso, tuple(plus_pts), tuple(minus_pts))


# =====================================================
# P-PERMUTATION CERTIFICATES
# =====================================================

@dataclass
class PPermutationVerdict:
    certified: bool
    module: Optional[RGModule] = None
    multiplicities: Dict[int, int] = field(default_factory=dict)
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "certified": self.certified,
            "kind": None if self.module is None else self.module.kind,
            "multiplicities": {str(k): v for k, v in self.multiplicities.items()},
            "reason": self.reason,
        }


def _sylow_multiplicities(N: RGModule, classes: List[Subgroup]) -> Optional[List[int]]:
    """Multiplicities m with |X^K| = dim N[K] for X = ⊔ m_i P/H_i, or None."""
    P = N.group
    marks = table_of_marks(P, classes)
    b = [brauer_quotient_dimension(N, K) for K in classes]
    system = Matrix([[int(x) for x in row] for row in marks]).T
    sol = system.LUsolve(Matrix([Rational(v) for v in b]))
    out = []
    for v in sol:
        if not v.is_integer or v < 0:
            return None
        out.append(int(v))
    return out


def _intertwiner_iso(X: RGModule, N: RGModule, rng: np.random.Generator) -> Optional[np.ndarray]:
    R = N.ring
    basis = hom_space(X, N)
    if not basis:
        return R.zeros(0, 0) if N.rank == 0 else None
    for _ in range(INTERTWINER_ATTEMPTS):
        coeffs = rng.integers(0, R.p, size=len(basis))
        phi = R.zeros(N.rank, X.rank)
        for c, B in zip(coeffs, basis):
            phi = R.add(phi, R.scale(int(c), B))
        if is_invertible(phi, R):
            return phi
    return None


def _summand_over_group(M: RGModule, P: Subgroup, X: RGModule, phi: np.ndarray) -> RGModule:
    """M as a summand of Ind_P^G X, given a P-isomorphism phi: X -> Res M."""
    R = M.ring
    G = M.group
    n = P.index
    ambient = induce(X, G, P)
    norm = induction_norm_composite(M, G, P)
    phi_inv = inverse(phi, R)
    iota = R.matmul(R.kron(R.eye(n), phi_inv), norm.unit.matrix)
    scale = pow(n, -1, R.p)
    pi = R.scale(scale, R.matmul(norm.counit.matrix, R.kron(R.eye(n), phi)))
    cert = SummandCertificate(ambient, R.matmul(iota, pi), iota, pi)
    return M.with_certificate(cert)


def certify_p_permutation(M: RGModule, seed: int = DEFAULT_SEED) -> PPermutationVerdict:
    """Tries to exhibit M as a direct summand of a permutation module.

    Restricts to a Sylow p-subgroup P, reads the would-be P-set from Brauer
    quotient dimensions and the table of marks, and searches the intertwiner
    space for an isomorphism. A refusal is inconclusive.
    """
    R = M.ring
    if not R.is_field:
        raise UnsupportedRingError("p-permutation certificates need field coefficients")
    if M.kind in ("permutation", "free", "summand"):
        return PPermutationVerdict(True, M, reason="already certified")
    G, p = M.group, R.p
    P = sylow(G, p)
    N = restrict(M, P)

    signed = signed_view(N)
    if signed is not None:
        fixed = try_rectify(N)
        if fixed is not None:
            LOGGER.info("p-permutation: Sylow restriction rectified by signs")
            module = _summand_over_group(M, P, fixed.module, fixed.change.matrix)
            return PPermutationVerdict(True, module, reason="sign rectification on the Sylow subgroup")

    K = P.as_group
    classes = subgroups(K, up_to_conjugacy=True)
    mult = _sylow_multiplicities(N, classes)
    if mult is None:
        return PPermutationVerdict(False, reason="Brauer quotient dimensions fail the table-of-marks test")
    pieces = []
    for H, m in zip(classes, mult):
        _, cosets = coset_action(K, H)
        pieces.extend([cosets] * m)
    if not pieces or sum(A.size for A in pieces) != M.rank:
        return PPermutationVerdict(False, reason="candidate permutation module has the wrong rank")
    A = pieces[0]
    for B in pieces[1:]:
        A = A.disjoint_union(B)
    X = linearize(A, R)
    rng = np.random.default_rng(seed)
    phi = _intertwiner_iso(X, N, rng)
    multiplicities = {H.order: 0 for H in classes}
    for H, m in zip(classes, mult):
        multiplicities[H.order] += m
    if phi is None:
        return PPermutationVerdict(False, multiplicities=multiplicities,
                                   reason=f"no isomorphism found in {INTERTWINER_ATTEMPTS} attempts")
    LOGGER.info("p-permutation: Sylow restriction matches multiplicities %s", mult)
    module = _summand_over_group(M, P, X, phi)
    return PPermutationVerdict(True, module, multiplicities, reason="intertwiner search")
