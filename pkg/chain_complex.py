"""Bounded chain complexes of RG-modules.

Homological indexing: d_s maps term(s) to term(s-1). Differentials are stored
as plain matrices; terms carry the module structure and certificates.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import TERM_RANK_CAP
from exceptions import (
    CapExceededError,
    HypothesisError,
    InvalidModuleError,
    RingMismatchError,
    ShapeMismatchError,
    UnsupportedRingError,
)
from gmodule import (
    RGModule,
    SignedGSet,
    SummandCertificate,
    direct_sum,
    hom_space,
    module_from_signed,
    signed_view,
    submodule,
    swap_matrix,
    tensor,
    zero_module,
)
from ring import (
    Ring,
    image_basis,
    invariant_factors,
    inverse,
    is_invertible,
    kernel,
    rank as matrix_rank,
    rref_field,
    solve,
)

LOGGER = logging.getLogger(__name__)


def is_free_term(M: RGModule) -> bool:
    return M.rank == 0 or M.kind == "free"


def is_projective_term(M: RGModule) -> bool:
    if is_free_term(M):
        return True
    return M.kind == "summand" and M.certificate.projective


def is_permutation_term(M: RGModule) -> bool:
    return M.rank == 0 or M.kind in ("permutation", "free")


def is_p_permutation_term(M: RGModule) -> bool:
    return is_permutation_term(M) or M.kind == "summand"


# =====================================================
# COMPLEXES AND CHAIN MAPS
# =====================================================

@dataclass(frozen=True, eq=False)
class ChainComplex:
    """Terms in degrees lo..hi; ``differentials[s - lo - 1]`` is d_s."""

    lo: int
    terms: Tuple[RGModule, ...]
    differentials: Tuple[np.ndarray, ...]
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if not self.terms:
            raise InvalidModuleError("a complex needs at least one term")
        if len(self.differentials) != len(self.terms) - 1:
            raise ShapeMismatchError("a complex with k terms needs k-1 differentials")
        G, R = self.terms[0].group, self.terms[0].ring
        for M in self.terms:
            if M.ring != R:
                raise RingMismatchError(f"complex mixes {R} and {M.ring}")
            if M.group != G:
                raise InvalidModuleError("complex mixes modules over different groups")
        mats = []
        for k, d in enumerate(self.differentials):
            s = self.lo + k + 1
            src, tgt = self.terms[k + 1], self.terms[k]
            mat = R.zeros(tgt.rank, src.rank) if 0 in (tgt.rank, src.rank) else R.reduce(d)
            if mat.shape != (tgt.rank, src.rank):
                raise ShapeMismatchError(
                    f"d_{s} has shape {mat.shape}, expected {(tgt.rank, src.rank)}", degree=s)
            mats.append(mat)
        object.__setattr__(self, "differentials", tuple(mats))
        if self.check:
            failure = _first_failure(self)
            if failure is not None:
                clause, s = failure
                raise InvalidModuleError(f"{clause} fails at degree {s}", degree=s)

    @property
    def hi(self) -> int:
        return self.lo + len(self.terms) - 1

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    @property
    def group(self):
        return self.terms[0].group

    @property
    def ring(self) -> Ring:
        return self.terms[0].ring

    @property
    def ranks(self) -> Tuple[int, ...]:
        return tuple(M.rank for M in self.terms)

    def term(self, s: int) -> RGModule:
        if self.lo <= s <= self.hi:
            return self.terms[s - self.lo]
        return zero_module(self.group, self.ring)

    def rank_at(self, s: int) -> int:
        return self.terms[s - self.lo].rank if self.lo <= s <= self.hi else 0

    def d(self, s: int) -> np.ndarray:
        """d_s: term(s) -> term(s-1), zero outside the stored range."""
        if self.lo < s <= self.hi:
            return self.differentials[s - self.lo - 1]
        return self.ring.zeros(self.rank_at(s - 1), self.rank_at(s))

    def is_zero(self) -> bool:
        return all(M.rank == 0 for M in self.terms)


def make_complex(terms: Dict[int, RGModule], differentials: Dict[int, np.ndarray],
                 check: bool = True) -> ChainComplex:
    """Builds a complex from degree-indexed terms; missing differentials are zero."""
    lo, hi = min(terms), max(terms)
    any_term = terms[lo]
    G, R = any_term.group, any_term.ring
    mods = tuple(terms.get(s, zero_module(G, R)) for s in range(lo, hi + 1))
    diffs = []
    for s in range(lo + 1, hi + 1):
        d = differentials.get(s)
        diffs.append(R.zeros(mods[s - lo - 1].rank, mods[s - lo].rank) if d is None else d)
    return ChainComplex(lo, mods, tuple(diffs), check=check)


def concentrated(M: RGModule, degree: int = 0) -> ChainComplex:
    return ChainComplex(degree, (M,), ())


def _first_failure(C: ChainComplex) -> Optional[Tuple[str, int]]:
    R = C.ring
    for s in range(C.lo + 1, C.hi + 1):
        d = C.d(s)
        src, tgt = C.term(s), C.term(s - 1)
        if any(not R.equal(R.matmul(b, d), R.matmul(d, a)) for a, b in zip(src.action, tgt.action)):
            return "equivariance", s
        if s - 1 > C.lo and not R.is_zero(R.matmul(C.d(s - 1), d)):
            return "d_squared", s
    return None


@dataclass(frozen=True, eq=False)
class ChainMap:
    """Components f_s: source(s) -> target(s); missing degrees are zero."""

    source: ChainComplex
    target: ChainComplex
    components: Dict[int, np.ndarray]
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        R = self.source.ring
        if self.target.ring != R:
            raise RingMismatchError("chain map between complexes over different rings")
        comps = {}
        for s in self.degrees:
            f = self.components.get(s)
            shape = (self.target.rank_at(s), self.source.rank_at(s))
            mat = R.zeros(*shape) if f is None or 0 in shape else R.reduce(f)
            if mat.shape != shape:
                raise ShapeMismatchError(f"component {s} has shape {mat.shape}, expected {shape}", degree=s)
            comps[s] = mat
        object.__setattr__(self, "components", comps)
        if self.check:
            s = self.first_failure()
            if s is not None:
                raise InvalidModuleError(f"chain map condition fails at degree {s}", degree=s)

    @property
    def degrees(self) -> range:
        return range(min(self.source.lo, self.target.lo), max(self.source.hi, self.target.hi) + 1)

    @property
    def ring(self) -> Ring:
        return self.source.ring

    def f(self, s: int) -> np.ndarray:
        if s in self.components:
            return self.components[s]
        return self.ring.zeros(self.target.rank_at(s), self.source.rank_at(s))

    def first_failure(self) -> Optional[int]:
        R = self.ring
        for s in self.degrees:
            f = self.f(s)
            src, tgt = self.source.term(s), self.target.term(s)
            if any(not R.equal(R.matmul(b, f), R.matmul(f, a)) for a, b in zip(src.action, tgt.action)):
                return s
            if not R.equal(R.matmul(self.target.d(s), f), R.matmul(self.f(s - 1), self.source.d(s))):
                return s
        return None

    def compose(self, first: "ChainMap") -> "ChainMap":
        """self ∘ first."""
        R = self.ring
        comps = {s: R.matmul(self.f(s), first.f(s)) for s in first.degrees}
        return ChainMap(first.source, self.target, comps, check=False)

    def minus(self, other: "ChainMap") -> "ChainMap":
        R = self.ring
        return ChainMap(self.source, self.target,
                        {s: R.sub(self.f(s), other.f(s)) for s in self.degrees}, check=False)

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(self.f(s)) for s in self.degrees)


def identity_chain_map(C: ChainComplex) -> ChainMap:
    return ChainMap(C, C, {s: C.ring.eye(C.rank_at(s)) for s in C.degrees}, check=False)


def zero_chain_map(X: ChainComplex, Y: ChainComplex) -> ChainMap:
    return ChainMap(X, Y, {}, check=False)


# =====================================================
# VALIDATION AND HOMOLOGY
# =====================================================

@dataclass
class ValidationReport:
    ok: bool
    failing_degree: Optional[int]
    clause: Optional[str]
    kinds: Dict[int, str]
    m_free_index: int
    m_projective_index: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "failing_degree": self.failing_degree,
            "clause": self.clause,
            "kinds": {str(s): k for s, k in self.kinds.items()},
            "m_free_index": self.m_free_index,
            "m_projective_index": self.m_projective_index,
        }


def _index_of(C: ChainComplex, predicate) -> int:
    """Largest m with predicate on every term of degree <= m (hi when all pass)."""
    m = C.lo - 1
    for s in C.degrees:
        if not predicate(C.term(s)):
            return m
        m = s
    return m


def m_free_index(C: ChainComplex) -> int:
    return _index_of(C, is_free_term)


def m_projective_index(C: ChainComplex) -> int:
    return _index_of(C, is_projective_term)


def validate(C: ChainComplex) -> ValidationReport:
    failure = _first_failure(C)
    kinds = {s: ("zero" if C.term(s).rank == 0 else C.term(s).kind) for s in C.degrees}
    return ValidationReport(
        ok=failure is None,
        failing_degree=None if failure is None else failure[1],
        clause=None if failure is None else failure[0],
        kinds=kinds,
        m_free_index=m_free_index(C),
        m_projective_index=m_projective_index(C),
    )


@dataclass
class HomologyReport:
    """Per degree: rank (dimension over a field) and torsion invariant factors."""

    ring: Ring
    degrees: Dict[int, Tuple[int, Tuple[int, ...]]]

    def rank(self, s: int) -> int:
        return self.degrees.get(s, (0, ()))[0]

    def torsion(self, s: int) -> Tuple[int, ...]:
        return self.degrees.get(s, (0, ()))[1]

    def vanishes_at(self, s: int) -> bool:
        return self.rank(s) == 0 and not self.torsion(s)

    def is_acyclic(self, except_degree: Optional[int] = None) -> bool:
        return all(self.vanishes_at(s) for s in self.degrees if s != except_degree)

    def to_dict(self) -> Dict[str, Any]:
        return {str(s): {"rank": r, "torsion": list(t)} for s, (r, t) in sorted(self.degrees.items())}


def _boundary_data(C: ChainComplex) -> Dict[int, Tuple[int, Tuple[int, ...]]]:
    """Rank and nontrivial invariant factors of each d_s."""
    R = C.ring
    out = {}
    for s in range(C.lo, C.hi + 2):
        d = C.d(s)
        if 0 in d.shape:
            out[s] = (0, ())
        elif R.is_field:
            out[s] = (rref_field(d, R).rank, ())
        else:
            factors = invariant_factors(d)
            out[s] = (len(factors), tuple(f for f in factors if f > 1))
    return out


def homology(C: ChainComplex) -> HomologyReport:
    """dim ker d_s - rank d_{s+1}; over Z the torsion comes from d_{s+1}'s Smith form."""
    data = _boundary_data(C)
    degrees = {}
    for s in C.degrees:
        r = C.rank_at(s) - data[s][0] - data[s + 1][0]
        degrees[s] = (r, data[s + 1][1])
    return HomologyReport(C.ring, degrees)


def euler_characteristic(C: ChainComplex) -> int:
    return sum((-1) ** (s % 2) * C.rank_at(s) for s in C.degrees)


# =====================================================
# CONSTRUCTIONS
# =====================================================

def shift(C: ChainComplex, k: int, sign: bool = False) -> ChainComplex:
    """Reindex: result(s) = C(s - k). With ``sign`` differentials pick up (-1)^k."""
    R = C.ring
    diffs = C.differentials
    if sign and k % 2:
        diffs = tuple(R.neg(d) for d in diffs)
    return ChainComplex(C.lo + k, C.terms, diffs, check=False)


def suspension(C: ChainComplex) -> ChainComplex:
    return shift(C, 1, sign=True)


def truncate(C: ChainComplex, lo: int, hi: int) -> ChainComplex:
    """Brutal truncation to degrees lo..hi."""
    terms = {s: C.term(s) for s in range(lo, hi + 1)}
    return make_complex(terms, {s: C.d(s) for s in range(lo + 1, hi + 1)}, check=False)


def _sum_blocks(ring: Ring, modules: Sequence[RGModule]) -> Tuple[RGModule, List[int]]:
    offsets, total = [], 0
    for M in modules:
        offsets.append(total)
        total += M.rank
    nonzero = [M for M in modules if M.rank]
    S = direct_sum(*nonzero) if nonzero else modules[0]
    return S, offsets


def cone(f: ChainMap) -> ChainComplex:
    """cone(f: X -> Y)_s = Y_s ⊕ X_{s-1} with differential [[d_Y, f], [0, -d_X]]."""
    X, Y, R = f.source, f.target, f.ring
    lo, hi = min(Y.lo, X.lo + 1), max(Y.hi, X.hi + 1)
    terms, diffs = {}, {}
    for s in range(lo, hi + 1):
        terms[s], _ = _sum_blocks(R, [Y.term(s), X.term(s - 1)])
    for s in range(lo + 1, hi + 1):
        ys, xs = Y.rank_at(s), X.rank_at(s - 1)
        yt, xt = Y.rank_at(s - 1), X.rank_at(s - 2)
        d = R.zeros(yt + xt, ys + xs)
        d[:yt, :ys] = Y.d(s)
        d[:yt, ys:] = f.f(s - 1)
        d[yt:, ys:] = R.neg(X.d(s - 1))
        diffs[s] = d
    return make_complex(terms, diffs)


def cone_inclusion(f: ChainMap) -> ChainMap:
    Z = cone(f)
    R = f.ring
    comps = {}
    for s in f.target.degrees:
        m = R.zeros(Z.rank_at(s), f.target.rank_at(s))
        m[:f.target.rank_at(s), :] = R.eye(f.target.rank_at(s))
        comps[s] = m
    return ChainMap(f.target, Z, comps)


def cone_projection(f: ChainMap) -> ChainMap:
    """cone(f) -> X[1], where X[1] is the suspension of the source."""
    Z = cone(f)
    S = suspension(f.source)
    R = f.ring
    comps = {}
    for s in S.degrees:
        m = R.zeros(S.rank_at(s), Z.rank_at(s))
        ys = f.target.rank_at(s)
        m[:, ys:] = R.eye(S.rank_at(s))
        comps[s] = m
    return ChainMap(Z, S, comps)


def _tensor_blocks(C: ChainComplex, D: ChainComplex, s: int) -> List[Tuple[int, int]]:
    """(a, b) with a + b = s, by decreasing a."""
    return [(a, s - a) for a in range(C.hi, C.lo - 1, -1) if D.lo <= s - a <= D.hi]


def tensor_ranks(C: ChainComplex, D: ChainComplex) -> Dict[int, int]:
    """Rank of every degree of C⊗D, computed without building it."""
    return {s: sum(C.rank_at(a) * D.rank_at(b) for a, b in _tensor_blocks(C, D, s))
            for s in range(C.lo + D.lo, C.hi + D.hi + 1)}


def require_tensor_ranks(C: ChainComplex, D: ChainComplex) -> Dict[int, int]:
    """tensor_ranks, raising CapExceededError before anything is allocated."""
    ranks = tensor_ranks(C, D)
    for s, r in ranks.items():
        if r > TERM_RANK_CAP:
            raise CapExceededError(f"tensor product would have a term of rank {r} in degree {s}, "
                                   f"above the cap {TERM_RANK_CAP}", degree=s)
    return ranks


def tensor_differentials(C: ChainComplex, D: ChainComplex) -> Dict[int, np.ndarray]:
    """d = d_C⊗1 + (-1)^a 1⊗d_D on ⊕ C_a⊗D_b, blocks ordered as in tensor_complexes."""
    R = C.ring
    lo, hi = C.lo + D.lo, C.hi + D.hi
    offsets = {s: _block_offsets(C, D, s) for s in range(lo, hi + 1)}
    sizes = {s: sum(w for _, w in offsets[s].values()) for s in offsets}
    diffs = {}
    for s in range(lo + 1, hi + 1):
        d = R.zeros(sizes[s - 1], sizes[s])
        for (a, b), (col, width) in offsets[s].items():
            if width == 0:
                continue
            if (a - 1, b) in offsets[s - 1]:
                row, height = offsets[s - 1][(a - 1, b)]
                if height:
                    d[row:row + height, col:col + width] = R.kron(C.d(a), R.eye(D.rank_at(b)))
            if (a, b - 1) in offsets[s - 1]:
                row, height = offsets[s - 1][(a, b - 1)]
                if height:
                    block = R.kron(R.eye(C.rank_at(a)), D.d(b))
                    d[row:row + height, col:col + width] = R.neg(block) if a % 2 else block
        diffs[s] = d
    return diffs


def tensor_complexes(C: ChainComplex, D: ChainComplex) -> ChainComplex:
    """(C⊗D)_s = ⊕ C_a⊗D_b with d = d_C⊗1 + (-1)^a 1⊗d_D."""
    if C.ring != D.ring:
        raise RingMismatchError(f"cannot tensor complexes over {C.ring} and {D.ring}")
    require_tensor_ranks(C, D)
    terms = {}
    for s in range(C.lo + D.lo, C.hi + D.hi + 1):
        mods = [tensor(C.term(a), D.term(b)) for a, b in _tensor_blocks(C, D, s)]
        terms[s], _ = _sum_blocks(C.ring, mods)
    return make_complex(terms, tensor_differentials(C, D))


def _block_offsets(C: ChainComplex, D: ChainComplex, s: int) -> Dict[Tuple[int, int], Tuple[int, int]]:
    out, total = {}, 0
    for a, b in _tensor_blocks(C, D, s):
        width = C.rank_at(a) * D.rank_at(b)
        out[(a, b)] = (total, width)
        total += width
    return out


def tensor_chain_maps(f: ChainMap, g: ChainMap) -> ChainMap:
    """f⊗g between the tensor complexes, blockwise kron(f_a, g_b)."""
    R = f.ring
    source = tensor_complexes(f.source, g.source)
    target = tensor_complexes(f.target, g.target)
    comps = {}
    for s in source.degrees:
        src = _block_offsets(f.source, g.source, s)
        tgt = _block_offsets(f.target, g.target, s)
        m = R.zeros(target.rank_at(s), source.rank_at(s))
        for blk, (col, width) in src.items():
            if blk in tgt and width and tgt[blk][1]:
                row, height = tgt[blk]
                m[row:row + height, col:col + width] = R.kron(f.f(blk[0]), g.f(blk[1]))
        comps[s] = m
    return ChainMap(source, target, comps)


def swap_complexes(C: ChainComplex, D: ChainComplex) -> ChainMap:
    """C⊗D -> D⊗C, (a, b) block to (b, a) times (-1)^(ab)."""
    R = C.ring
    source, target = tensor_complexes(C, D), tensor_complexes(D, C)
    comps = {}
    for s in source.degrees:
        src = _block_offsets(C, D, s)
        tgt = _block_offsets(D, C, s)
        m = R.zeros(target.rank_at(s), source.rank_at(s))
        for (a, b), (col, width) in src.items():
            if not width:
                continue
            row, height = tgt[(b, a)]
            block = swap_matrix(R, C.rank_at(a), D.rank_at(b))
            m[row:row + height, col:col + width] = R.neg(block) if (a * b) % 2 else block
        comps[s] = m
    return ChainMap(source, target, comps)


def is_quasi_isomorphism(f: ChainMap) -> bool:
    return homology(cone(f)).is_acyclic()


# =====================================================
# CANCELLING CONTRACTIBLE ORBIT PAIRS
# =====================================================

def _restrict_signed(S: SignedGSet, points: Sequence[int]) -> SignedGSet:
    """S on a union of orbits, points renumbered in the given order."""
    where = {x: i for i, x in enumerate(points)}
    perms = tuple(tuple(where[p[x]] for x in points) for p in S.perms)
    signs = tuple(tuple(sg[x] for x in points) for sg in S.signs)
    return SignedGSet(S.group, len(points), perms, signs)


def _indicator(orbits: Sequence[Tuple[int, ...]], size: int) -> np.ndarray:
    ind = np.zeros((len(orbits), size), dtype=np.int64)
    for i, orbit in enumerate(orbits):
        ind[i, list(orbit)] = 1
    return ind


def _invertible_block(block: np.ndarray, R: Ring) -> bool:
    support = block != 0
    if not (support.any(axis=0).all() and support.any(axis=1).all()):
        return False
    if (support.sum(axis=0) == 1).all() and (support.sum(axis=1) == 1).all():
        return R.is_field or all(abs(int(x)) == 1 for x in block[support])
    return is_invertible(block, R)


def _unit_block(d: np.ndarray, sources: List[Tuple[int, ...]], targets: List[Tuple[int, ...]],
                R: Ring) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """First (source orbit, target orbit) of equal size whose block of d is invertible."""
    if not sources or not targets:
        return None
    # an invertible block has a nonzero entry in each of its columns
    support = (d != 0).astype(np.int64)
    counts = _indicator(targets, d.shape[0]) @ support @ _indicator(sources, d.shape[1]).T
    for j, A in enumerate(sources):
        for i in np.nonzero(counts[:, j] >= len(A))[0]:
            B = targets[int(i)]
            if len(B) == len(A) and _invertible_block(d[np.ix_(B, A)], R):
                return A, B
    return None


def cancel_orbit_pairs(C: ChainComplex, keep: Sequence[int] = ()) -> ChainComplex:
    """Drops pairs of orbits joined by an invertible block of a differential.

    With A an orbit of term(s), B an orbit of term(s-1) and φ = d_s[B, A]
    invertible, A ⊕ B spans a contractible subcomplex. Removing it leaves
    d_s = δ - γ φ⁻¹ β on the remaining points, which is homotopy equivalent
    to C. Only terms with a sign-permutation basis take part and the degrees
    in ``keep`` are never touched.
    """
    R = C.ring
    signed = {s: signed_view(C.term(s)) for s in C.degrees}
    diffs = {s: C.d(s) for s in range(C.lo + 1, C.hi + 1)}
    changed = set()
    for s in range(C.hi, C.lo, -1):
        if s in keep or s - 1 in keep or signed[s] is None or signed[s - 1] is None:
            continue
        while True:
            S, T = signed[s], signed[s - 1]
            pair = _unit_block(diffs[s], S.underlying().orbits(), T.underlying().orbits(), R)
            if pair is None:
                break
            A, B = pair
            gone_src, gone_tgt = set(A), set(B)
            rest_src = [x for x in range(S.size) if x not in gone_src]
            rest_tgt = [y for y in range(T.size) if y not in gone_tgt]
            d = diffs[s]
            correction = R.chain(d[np.ix_(rest_tgt, A)], inverse(d[np.ix_(B, A)], R), d[np.ix_(B, rest_src)])
            diffs[s] = R.sub(d[np.ix_(rest_tgt, rest_src)], correction)
            if s + 1 in diffs:
                diffs[s + 1] = diffs[s + 1][rest_src, :]
            if s - 1 in diffs:
                diffs[s - 1] = diffs[s - 1][:, rest_tgt]
            signed[s], signed[s - 1] = _restrict_signed(S, rest_src), _restrict_signed(T, rest_tgt)
            changed |= {s, s - 1}
    if not changed:
        return C
    terms = {s: module_from_signed(signed[s], R) if s in changed else C.term(s) for s in C.degrees}
    out = make_complex(terms, diffs)
    LOGGER.debug("cancelled orbit pairs: ranks %s -> %s", C.ranks, out.ranks)
    return out


# =====================================================
# EQUIVARIANT LIFTING
# =====================================================

def equivariant_lift(P: RGModule, target: RGModule, along: np.ndarray, psi: np.ndarray,
                     degree: Optional[int] = None) -> np.ndarray:
    """Equivariant k: P -> target with along·k = psi, for projective-certified P.

    ``along`` is an equivariant map target -> W and ``psi`` an equivariant map
    P -> W whose image lies in the image of ``along``. Solutions are chosen on
    orbit representatives of a free basis and spread by the group action.
    """
    R = P.ring
    if P.rank == 0:
        return R.zeros(target.rank, 0)
    cert = P.certificate
    if cert.kind == "summand" and cert.projective:
        F = cert.ambient
        k_amb = equivariant_lift(F, target, along, R.matmul(psi, cert.projection), degree)
        return R.matmul(k_amb, cert.embedding)
    if cert.kind != "free":
        raise HypothesisError(f"lifting needs a projective term, found {cert.kind}", degree=degree)
    A = cert.gset
    B = R.eye(P.rank) if cert.basis is None else cert.basis
    image = R.matmul(psi, B)
    cols = [None] * A.size
    for orbit in A.orbits():
        rep = orbit[0]
        z = solve(along, image[:, rep], R) if target.rank else R.zeros(0, 1)[:, 0]
        if z is None:
            raise HypothesisError("no lift exists: target map does not cover the image", degree=degree)
        z = R.reduce(z).reshape(-1, 1)
        for g in range(P.group.order):
            y = int(A.table[g, rep])
            if cols[y] is None:
                cols[y] = R.matmul(target.element_matrix(g), z)
    K = np.hstack(cols) if target.rank else R.zeros(0, P.rank)
    if cert.basis is not None:
        K = R.matmul(K, inverse(B, R))
    return R.reduce(K)


@dataclass
class LiftResult:
    fhat: ChainMap
    homotopy: Dict[int, np.ndarray]

    def homotopy_at(self, s: int, ring: Ring, rows: int, cols: int) -> np.ndarray:
        return self.homotopy.get(s, ring.zeros(rows, cols))


def lift_through_quasi_iso(f: ChainMap, s: ChainMap, m: int) -> LiftResult:
    """f̂: P -> Y with s∘f̂ - f = d h + h d, for f: P -> X and a quasi-isomorphism s: Y -> X.

    Builds a null-homotopy k of P -> X -> cone(s) degree by degree; f̂ is its
    Y-component and h is minus its X-component.

    Args:
        f: chain map from the projective complex P to X
        s: quasi-isomorphism Y -> X
        m: X and Y vanish above degree m; P must be projective up to m

    Returns:
        LiftResult with f̂ and the homotopy components h_i: P_i -> X_{i+1}
    """
    P, X, Y = f.source, f.target, s.source
    R = f.ring
    if not R.is_field:
        raise UnsupportedRingError("lifting through quasi-isomorphisms is implemented over fields only")
    if s.target is not X and (s.target.ranks != X.ranks or s.target.lo != X.lo):
        raise HypothesisError("f and s must share their target complex")
    if X.hi > m and any(X.rank_at(i) for i in range(m + 1, X.hi + 1)):
        raise HypothesisError(f"X has nonzero terms above degree {m}", degree=m)
    if Y.hi > m and any(Y.rank_at(i) for i in range(m + 1, Y.hi + 1)):
        raise HypothesisError(f"Y has nonzero terms above degree {m}", degree=m)
    Z = cone(s)
    fhat, hom = {}, {}
    k_prev = None
    for i in range(P.lo, P.hi + 1):
        Pi = P.term(i)
        xi = X.rank_at(i)
        phi = R.zeros(Z.rank_at(i), Pi.rank)
        phi[:xi, :] = f.f(i)
        psi = phi if k_prev is None else R.sub(phi, R.matmul(k_prev, P.d(i)))
        if Z.rank_at(i + 1) == 0:
            if not R.is_zero(psi):
                raise HypothesisError("cone of s is not acyclic here; s is not a quasi-isomorphism", degree=i)
            k = R.zeros(0, Pi.rank)
        else:
            k = equivariant_lift(Pi, Z.term(i + 1), Z.d(i + 1), psi, degree=i)
        x_next = X.rank_at(i + 1)
        hom[i] = R.neg(k[:x_next, :])
        fhat[i] = k[x_next:, :]
        k_prev = k
        LOGGER.debug("lift: degree %d done", i)
    return LiftResult(ChainMap(P, Y, fhat), hom)


def check_homotopy(f: ChainMap, g: ChainMap, h: Dict[int, np.ndarray]) -> bool:
    """f - g = d h + h d with h_i: source_i -> target_{i+1}."""
    R = f.ring
    X, Y = f.source, f.target

    def hh(i):
        return h.get(i, R.zeros(Y.rank_at(i + 1), X.rank_at(i)))

    for i in f.degrees:
        lhs = R.sub(f.f(i), g.f(i))
        rhs = R.add(R.matmul(Y.d(i + 1), hh(i)), R.matmul(hh(i - 1), X.d(i)))
        if not R.equal(lhs, rhs):
            return False
    return True


# =====================================================
# NORMALIZATION BELOW A DEGREE
# =====================================================

@dataclass
class Normalized:
    complex: ChainComplex
    to_original: ChainMap
    mode: str


def _contraction(P: ChainComplex, n: int) -> Dict[int, np.ndarray]:
    """s_i: P_i -> P_{i+1} for i < n with d s_i + s_{i-1} d = 1 on P_i."""
    R = P.ring
    s: Dict[int, np.ndarray] = {}
    for i in range(P.lo, n):
        Pi = P.term(i)
        if not is_projective_term(Pi):
            raise HypothesisError(f"term in degree {i} is not certified projective", degree=i)
        if not R.is_field and not is_free_term(Pi):
            raise HypothesisError(f"over the integers the term in degree {i} must be free", degree=i)
        psi = R.eye(Pi.rank)
        if i - 1 in s:
            psi = R.sub(psi, R.matmul(s[i - 1], P.d(i)))
        try:
            s[i] = equivariant_lift(Pi, P.term(i + 1), P.d(i + 1), psi, degree=i)
        except HypothesisError:
            raise HypothesisError(f"homology does not vanish in degree {i}", degree=i)
    return s


def normalize_zero_free(P: ChainComplex, n: int, mode: Optional[str] = None) -> Normalized:
    """Removes the acyclic part of P below degree n.

    ``mode="free"`` keeps every term free by adding 0 -> L -> L -> 0 in degrees
    n+1, n; ``mode="projective"`` (fields only) stops at the projective summand
    of P_n. The default is free when every term up to n is free.

    Returns:
        Normalized(complex starting in degree n, quasi-isomorphism to P, mode)
    """
    R = P.ring
    if P.lo >= n or all(P.rank_at(i) == 0 for i in range(P.lo, n)):
        Q = truncate(P, n, max(n, P.hi))
        ident = {i: R.eye(P.rank_at(i)) for i in range(n, P.hi + 1)}
        return Normalized(Q, ChainMap(Q, P, ident), mode or "free")
    if mode is None:
        mode = "free" if all(is_free_term(P.term(i)) for i in range(P.lo, n + 1)) else "projective"
    if mode == "projective" and not R.is_field:
        raise UnsupportedRingError("projective normalization needs field coefficients")
    if mode == "free" and not all(is_free_term(P.term(i)) for i in range(P.lo, n + 1)):
        raise HypothesisError("free normalization needs free terms up to degree n", degree=n)

    s = _contraction(P, n)
    Pn = P.term(n)
    pi = R.matmul(s[n - 1], P.d(n))
    e = R.sub(R.eye(Pn.rank), pi)
    hi = max(P.hi, n + 1)

    if mode == "projective":
        K = image_basis(e, R)
        Qn, inc = submodule(Pn, K)
        proj = solve(K, e, R)
        if Pn.kind == "summand":
            amb = Pn.certificate
            cert = SummandCertificate(amb.ambient, R.matmul(R.matmul(amb.embedding, K), R.matmul(proj, amb.projection)),
                                      R.matmul(amb.embedding, K), R.matmul(proj, amb.projection))
        else:
            cert = SummandCertificate(Pn, R.matmul(K, proj), K, proj)
        Qn = Qn.with_certificate(cert) if Qn.rank else Qn
        terms = {n: Qn}
        diffs = {}
        for i in range(n + 1, P.hi + 1):
            terms[i] = P.term(i)
            diffs[i] = P.d(i)
        if n + 1 <= P.hi:
            diffs[n + 1] = solve(K, P.d(n + 1), R) if K.shape[1] else R.zeros(0, P.rank_at(n + 1))
        Q = make_complex(terms, diffs)
        comps = {n: K}
        comps.update({i: R.eye(P.rank_at(i)) for i in range(n + 1, P.hi + 1)})
        LOGGER.info("normalized below %d (projective): rank %d -> %d", n, Pn.rank, Qn.rank)
        return Normalized(Q, ChainMap(Q, P, comps), mode)

    even = [i for i in range(P.lo, n) if (n - i) % 2 == 0]
    odd = [i for i in range(P.lo, n) if (n - i) % 2 == 1]
    L_off, total = {}, 0
    for i in odd:
        L_off[i] = total
        total += P.rank_at(i)
    L_rank = total
    E_off, total = {}, 0
    for i in even:
        E_off[i] = total
        total += P.rank_at(i)
    E_rank = total

    # Ψ: P_n ⊕ E -> P_n ⊕ L, injective onto (1 - π)P_n ⊕ L
    psi = R.zeros(Pn.rank + L_rank, Pn.rank + E_rank)
    psi[:Pn.rank, :Pn.rank] = e
    if n - 1 in L_off:
        r0 = Pn.rank + L_off[n - 1]
        psi[r0:r0 + P.rank_at(n - 1), :Pn.rank] = P.d(n)
    for i in even:
        c0 = Pn.rank + E_off[i]
        width = P.rank_at(i)
        if width == 0:
            continue
        inner = R.eye(width) if i - 1 not in s else R.sub(R.eye(width), R.matmul(s[i - 1], P.d(i)))
        up = R.matmul(s[i], inner)
        r_up = Pn.rank + L_off[i + 1]
        psi[r_up:r_up + P.rank_at(i + 1), c0:c0 + width] = up
        if i - 1 in L_off:
            r_dn = Pn.rank + L_off[i - 1]
            psi[r_dn:r_dn + P.rank_at(i - 1), c0:c0 + width] = P.d(i)

    Nn = direct_sum(Pn, *[P.term(i) for i in even])
    Nn1 = direct_sum(P.term(n + 1), *[P.term(i) for i in odd])
    p1 = P.rank_at(n + 1)
    rhs = R.zeros(Pn.rank + L_rank, p1 + L_rank)
    rhs[:Pn.rank, :p1] = P.d(n + 1)
    rhs[Pn.rank:, p1:] = R.eye(L_rank)
    d_new = solve(psi, rhs, R)
    if d_new is None:
        raise HypothesisError("stabilized differential could not be solved", degree=n + 1)

    terms = {n: Nn, n + 1: Nn1}
    diffs = {n + 1: d_new}
    for i in range(n + 2, hi + 1):
        terms[i] = P.term(i)
        diffs[i] = P.d(i)
    if n + 2 <= hi:
        d2 = R.zeros(Nn1.rank, P.rank_at(n + 2))
        d2[:p1, :] = P.d(n + 2)
        diffs[n + 2] = d2
    Q = make_complex(terms, diffs)
    to_p = {n: psi[:Pn.rank, :]}
    top = R.zeros(p1, Nn1.rank)
    top[:, :p1] = R.eye(p1)
    to_p[n + 1] = top
    to_p.update({i: R.eye(P.rank_at(i)) for i in range(n + 2, P.hi + 1)})
    LOGGER.info("normalized below %d (free): degree-%d rank %d -> %d", n, n, Pn.rank, Nn.rank)
    return Normalized(Q, ChainMap(Q, P, to_p), mode)


# =====================================================
# HOM IN THE HOMOTOPY CATEGORY
# =====================================================

@dataclass
class HomReport:
    dim: int
    basis: List[ChainMap]
    chain_map_dim: int
    null_homotopic_dim: int


def _raw_layout(X: ChainComplex, Y: ChainComplex) -> Dict[int, Tuple[int, int, int]]:
    """Offsets of vec(f_s) for maps X_s -> Y_s, row-major."""
    out, total = {}, 0
    for s in X.degrees:
        rows, cols = Y.rank_at(s), X.rank_at(s)
        out[s] = (total, rows, cols)
        total += rows * cols
    return out


def hom_mod_homotopy(X: ChainComplex, Y: ChainComplex) -> HomReport:
    """Chain maps X -> Y modulo null-homotopic ones (field coefficients)."""
    R = X.ring
    if not R.is_field:
        raise UnsupportedRingError("hom_mod_homotopy is implemented over fields only")
    layout = _raw_layout(X, Y)
    total = sum(r * c for _, r, c in layout.values())
    if total == 0:
        return HomReport(0, [], 0, 0)

    # candidate maps: equivariant in each degree
    cand_cols = []
    for s, (off, rows, cols) in layout.items():
        for B in hom_space(X.term(s), Y.term(s)):
            v = R.zeros(total, 1)
            v[off:off + rows * cols, 0] = B.reshape(-1)
            cand_cols.append(v)
    if not cand_cols:
        return HomReport(0, [], 0, 0)
    cand = np.hstack(cand_cols)

    # chain condition d_Y f_s - f_{s-1} d_X = 0, as a linear map on raw vectors
    cond_rows = []
    for s in X.degrees:
        out_rows, out_cols = Y.rank_at(s - 1), X.rank_at(s)
        if out_rows * out_cols == 0:
            continue
        block = R.zeros(out_rows * out_cols, total)
        off, rows, cols = layout[s]
        if rows * cols:
            block[:, off:off + rows * cols] = R.kron(Y.d(s), R.eye(cols))
        if s - 1 in layout:
            off2, rows2, cols2 = layout[s - 1]
            if rows2 * cols2:
                block[:, off2:off2 + rows2 * cols2] = R.sub(
                    block[:, off2:off2 + rows2 * cols2], R.kron(R.eye(rows2), X.d(s).T))
        cond_rows.append(block)
    if cond_rows:
        coeffs = kernel(R.matmul(np.vstack(cond_rows), cand), R)
        chain_maps = R.matmul(cand, coeffs)
    else:
        chain_maps = cand
    z_dim = matrix_rank(chain_maps, R) if chain_maps.shape[1] else 0

    # null-homotopic maps d h + h d for equivariant h_s: X_s -> Y_{s+1}
    null_cols = []
    for s in X.degrees:
        for Hm in hom_space(X.term(s), Y.term(s + 1)):
            v = R.zeros(total, 1)
            off, rows, cols = layout[s]
            if rows * cols:
                v[off:off + rows * cols, 0] = R.matmul(Y.d(s + 1), Hm).reshape(-1)
            if s + 1 in layout:
                off1, rows1, cols1 = layout[s + 1]
                if rows1 * cols1:
                    v[off1:off1 + rows1 * cols1, 0] = R.matmul(Hm, X.d(s + 1)).reshape(-1)
            null_cols.append(v)
    nulls = np.hstack(null_cols) if null_cols else R.zeros(total, 0)
    b_dim = matrix_rank(nulls, R) if nulls.shape[1] else 0

    basis = []
    if z_dim > b_dim:
        red = rref_field(np.hstack([nulls, chain_maps]), R)
        picks = [c - nulls.shape[1] for c in red.pivot_cols if c >= nulls.shape[1]]
        for c in picks:
            comps = {}
            for s, (off, rows, cols) in layout.items():
                comps[s] = chain_maps[off:off + rows * cols, c].reshape(rows, cols)
            basis.append(ChainMap(X, Y, comps))
    return HomReport(z_dim - b_dim, basis, z_dim, b_dim)
