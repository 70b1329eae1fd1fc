"""Koszul complexes of the augmentation and tensor induction.

Kos(G;R) lives in degrees 0..|G| with Kos_s = Λ^s(RG), Kos_0 = R and d_1 the
augmentation. It is exact in every degree.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from chain_complex import (
    ChainComplex,
    ChainMap,
    concentrated,
    make_complex,
    require_tensor_ranks,
    shift,
    tensor_differentials,
    truncate,
)
from config import TERM_RANK_CAP
from exceptions import CapExceededError, HypothesisError, InvalidModuleError
from gmodule import (
    GENERAL,
    RGModule,
    SignedGSet,
    free_module,
    linearize,
    module_from_signed,
    signed_view,
    strongest_certificate,
    swap_matrix,
    trivial_module,
)
from group import GSet, Group, Subgroup, Transversal, coset_action, require_normal
from ring import Ring

LOGGER = logging.getLogger(__name__)


# =====================================================
# EXTERIOR POWERS
# =====================================================

@dataclass(frozen=True)
class WedgeBasis:
    """Increasing index tuples per degree, in lexicographic order."""

    n: int
    tuples: Tuple[Tuple[Tuple[int, ...], ...], ...]

    def size(self, s: int) -> int:
        return len(self.tuples[s])

    def position(self, s: int) -> Dict[Tuple[int, ...], int]:
        return {t: i for i, t in enumerate(self.tuples[s])}


def wedge_basis(n: int) -> WedgeBasis:
    return WedgeBasis(n, tuple(tuple(combinations(range(n), s)) for s in range(n + 1)))


def sort_sign(seq: Sequence[int]) -> Tuple[Tuple[int, ...], int]:
    """Sorted tuple and the parity of the sorting permutation (as ±1)."""
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return tuple(sorted(seq)), (-1 if inversions % 2 else 1)


def _wedge_signed_gset(G: Group, wedges: WedgeBasis, s: int) -> SignedGSet:
    pos = wedges.position(s)
    perms, signs = [], []
    for g in G.generator_indices:
        perm, sg = [], []
        for t in wedges.tuples[s]:
            image, sign = sort_sign([int(G.mult[g, x]) for x in t])
            perm.append(pos[image])
            sg.append(sign)
        perms.append(tuple(perm))
        signs.append(tuple(sg))
    return SignedGSet(G, wedges.size(s), tuple(perms), tuple(signs))


def koszul(G: Group, ring: Ring) -> ChainComplex:
    """Kos(G;R): Λ^s(RG) in degree s with d = Σ_j (-1)^j (drop the j-th factor).

    Degree 0 is the trivial module, degree 1 the free module RG, every other
    degree is certified by its signed wedge basis.
    """
    n = G.order
    largest = comb(n, n // 2)
    if largest > TERM_RANK_CAP:
        raise CapExceededError(f"Koszul complex of a group of order {n} needs a term of rank {largest}")
    wedges = wedge_basis(n)
    terms: Dict[int, RGModule] = {0: trivial_module(G, ring), 1: free_module(G, ring)}
    for s in range(2, n + 1):
        terms[s] = module_from_signed(_wedge_signed_gset(G, wedges, s), ring)
    diffs = {}
    for s in range(1, n + 1):
        below = wedges.position(s - 1)
        d = ring.zeros(wedges.size(s - 1), wedges.size(s))
        for col, t in enumerate(wedges.tuples[s]):
            for j in range(s):
                d[below[t[:j] + t[j + 1:]], col] = 1 if j % 2 == 0 else -1
        diffs[s] = ring.reduce(d)
    LOGGER.info("koszul %s over %s: ranks %s", G.label, ring, [wedges.size(s) for s in range(n + 1)])
    return make_complex(terms, diffs)


@dataclass(frozen=True, eq=False)
class Augmented:
    """P with P_s = C_{s+1}, the target C_0 and ε = d_1 as a chain map P -> C_0."""

    resolution: ChainComplex
    target: RGModule
    augmentation: ChainMap


def augmented_resolution(C: ChainComplex) -> Augmented:
    if C.lo != 0 or C.hi < 1:
        raise InvalidModuleError("augmented complex must start in degree 0 and reach degree 1")
    P = shift(truncate(C, 1, C.hi), -1)
    target = concentrated(C.term(0))
    return Augmented(P, C.term(0), ChainMap(P, target, {0: C.d(1)}))


# =====================================================
# TENSOR INDUCTION
# =====================================================

@dataclass(frozen=True, eq=False)
class MonomialEmbedding:
    """G -> S_n ⋉ H^n from g·r_j = r_{σ(g)(j)}·h_j for the transversal r."""

    group: Group
    subgroup: Subgroup
    transversal: Transversal
    sigma: Tuple[Tuple[int, ...], ...]
    h_components: Tuple[Tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return self.transversal.size


def monomial_embedding(G: Group, H: Subgroup, transversal: Optional[Transversal] = None) -> MonomialEmbedding:
    """Embedding data for every element of G, verified elementwise.

    Raises:
        NotNormalError: H is not normal in G
        HypothesisError: the coset identity or injectivity fails
    """
    require_normal(H)
    if transversal is None:
        transversal, _ = coset_action(G, H)
    n = transversal.size
    sigma, hs = [], []
    for g in range(G.order):
        row_s, row_h = [], []
        for j in range(n):
            k, h = transversal.decompose(g, j)
            left = int(G.mult[g, transversal.representatives[j]])
            right = int(G.mult[transversal.representatives[k], h])
            if left != right or h not in H:
                raise HypothesisError(f"coset identity fails for element {g}, coset {j}")
            row_s.append(k)
            row_h.append(h)
        sigma.append(tuple(row_s))
        hs.append(tuple(row_h))
    if len(set(zip(sigma, hs))) != G.order:
        raise HypothesisError("monomial embedding is not injective")
    LOGGER.debug("monomial embedding of %s over a subgroup of index %d", G.label, n)
    return MonomialEmbedding(G, H, transversal, tuple(sigma), tuple(hs))


def embedded_summand_set(emb: MonomialEmbedding) -> GSet:
    """The G-set i*(⊔_j H): point (j, x) at j·|H| + pos(x), g·(j, x) = (σ(g)j, h_j x)."""
    G, H = emb.group, emb.subgroup
    pos = {parent: i for i, parent in enumerate(H.embedding)}
    m = H.order
    action = []
    for g in G.generator_indices:
        perm = [0] * (emb.n * m)
        for j in range(emb.n):
            k, h = emb.sigma[g][j], emb.h_components[g][j]
            for x_pos, x in enumerate(H.embedding):
                perm[j * m + x_pos] = k * m + pos[int(G.mult[h, x])]
        action.append(tuple(perm))
    return GSet(G, emb.n * m, tuple(action))


def embedded_summand_module(emb: MonomialEmbedding, ring: Ring) -> RGModule:
    """i*(⊕_j RH), a free RG-module."""
    return linearize(embedded_summand_set(emb), ring)


def _factor_matrices(N: RGModule, emb: MonomialEmbedding, g: int) -> List[np.ndarray]:
    pos = {parent: i for i, parent in enumerate(emb.subgroup.embedding)}
    return [N.element_matrix(pos[h]) for h in emb.h_components[g]]


def _permute_factors(ring: Ring, r: int, sigma: Sequence[int]) -> np.ndarray:
    """e_{i_0}⊗…⊗e_{i_{n-1}} ↦ the tensor with i_j in slot σ(j)."""
    n = len(sigma)
    size = r ** n
    P = ring.zeros(size, size)
    shape = [r] * n
    for idx in np.ndindex(*shape):
        new = [0] * n
        for j, i in enumerate(idx):
            new[sigma[j]] = i
        src = int(np.ravel_multi_index(idx, shape))
        dst = int(np.ravel_multi_index(tuple(new), shape))
        P[dst, src] = 1
    return P


def _induced_signed(N: RGModule, emb: MonomialEmbedding) -> Optional[SignedGSet]:
    signed = signed_view(N)
    if signed is None:
        return None
    perm_table, sign_table = signed.tables
    pos = {parent: i for i, parent in enumerate(emb.subgroup.embedding)}
    r, n = N.rank, emb.n
    shape = [r] * n
    perms, signs = [], []
    for g in emb.group.generator_indices:
        perm = [0] * (r ** n)
        sg = [1] * (r ** n)
        for idx in np.ndindex(*shape):
            new = [0] * n
            sign = 1
            for j, x in enumerate(idx):
                h = pos[emb.h_components[g][j]]
                new[emb.sigma[g][j]] = int(perm_table[h, x])
                sign *= int(sign_table[h, x])
            src = int(np.ravel_multi_index(idx, shape))
            perm[src] = int(np.ravel_multi_index(tuple(new), shape))
            sg[src] = sign
        perms.append(tuple(perm))
        signs.append(tuple(sg))
    return SignedGSet(emb.group, r ** n, tuple(perms), tuple(signs))


def tensor_induce_module(N: RGModule, emb: MonomialEmbedding) -> RGModule:
    """N^{⊗G/H} = i*(N^{⊗n}): ρ(g) permutes the factors by σ(g) after applying h_j to factor j."""
    if N.group != emb.subgroup.as_group:
        raise InvalidModuleError("module to tensor-induce must live over the subgroup's own group")
    R = N.ring
    size = N.rank ** emb.n
    if size > TERM_RANK_CAP:
        raise CapExceededError(f"tensor induction would have rank {size}")
    action = []
    for g in emb.group.generator_indices:
        A = R.eye(1)
        for m in _factor_matrices(N, emb, g):
            A = R.kron(A, m)
        action.append(R.matmul(_permute_factors(R, N.rank, emb.sigma[g]), A))
    signed = _induced_signed(N, emb)
    cert = GENERAL if signed is None else strongest_certificate(signed, R)
    return RGModule(emb.group, R, size, tuple(action), cert)


def _pair_blocks(C: ChainComplex, s: int) -> List[Tuple[int, int]]:
    return [(a, s - a) for a in range(C.hi, C.lo - 1, -1) if C.lo <= s - a <= C.hi]


def tensor_induce_complex2(C: ChainComplex, emb: MonomialEmbedding) -> ChainComplex:
    """C^{⊗G/H} for an index-2 subgroup.

    Degree s is ⊕_{a+b=s} C_a⊗C_b; elements outside H swap the factors with
    the Koszul sign (-1)^{ab} after acting factorwise.
    """
    if emb.n != 2:
        raise HypothesisError(f"complex tensor induction needs index 2, got {emb.n}")
    H_group = emb.subgroup.as_group
    if C.group != H_group:
        raise InvalidModuleError("complex to tensor-induce must live over the subgroup's own group")
    R = C.ring
    G = emb.group
    pos = {parent: i for i, parent in enumerate(emb.subgroup.embedding)}
    ranks = require_tensor_ranks(C, C)
    terms = {}
    for s in ranks:
        blocks = _pair_blocks(C, s)
        offsets, total = {}, 0
        for a, b in blocks:
            offsets[(a, b)] = total
            total += C.rank_at(a) * C.rank_at(b)
        action = []
        for g in G.generator_indices:
            h1, h2 = (pos[h] for h in emb.h_components[g])
            swapped = emb.sigma[g][0] == 1
            mat = R.zeros(total, total)
            for a, b in blocks:
                width = C.rank_at(a) * C.rank_at(b)
                if width == 0:
                    continue
                Ma, Mb = C.term(a), C.term(b)
                act = R.kron(Ma.element_matrix(h1), Mb.element_matrix(h2))
                col = offsets[(a, b)]
                if swapped:
                    block = R.matmul(swap_matrix(R, Ma.rank, Mb.rank), act)
                    if (a * b) % 2:
                        block = R.neg(block)
                    row = offsets[(b, a)]
                else:
                    block, row = act, col
                mat[row:row + width, col:col + width] = block
            action.append(mat)
        signed = _pair_signed(C, emb, blocks, offsets, total, pos)
        cert = GENERAL if signed is None else strongest_certificate(signed, R)
        terms[s] = RGModule(G, R, total, tuple(action), cert)
    LOGGER.info("tensor-induced complex: ranks %s", list(ranks.values()))
    return make_complex(terms, tensor_differentials(C, C))


def _pair_signed(C, emb, blocks, offsets, total, pos) -> Optional[SignedGSet]:
    """Sign-permutation basis of a tensor-induced degree, when every factor has one."""
    views = {}
    for a, b in blocks:
        for x in (a, b):
            if x not in views:
                M = C.term(x)
                views[x] = signed_view(M) if M.rank else "zero"
                if views[x] is None:
                    return None
    G = emb.group
    perms, signs = [], []
    for g in G.generator_indices:
        h1, h2 = (pos[h] for h in emb.h_components[g])
        swapped = emb.sigma[g][0] == 1
        perm = [0] * total
        sg = [1] * total
        for a, b in blocks:
            ra, rb = C.rank_at(a), C.rank_at(b)
            if ra * rb == 0:
                continue
            pa, sa = views[a].tables
            pb, sb = views[b].tables
            col = offsets[(a, b)]
            for x in range(ra):
                for y in range(rb):
                    xi, yi = int(pa[h1, x]), int(pb[h2, y])
                    sign = int(sa[h1, x]) * int(sb[h2, y])
                    if swapped:
                        dst = offsets[(b, a)] + yi * ra + xi
                        if (a * b) % 2:
                            sign = -sign
                    else:
                        dst = col + xi * rb + yi
                    perm[col + x * rb + y] = dst
                    sg[col + x * rb + y] = sign
        perms.append(tuple(perm))
        signs.append(tuple(sg))
    return SignedGSet(G, total, tuple(perms), tuple(signs))
