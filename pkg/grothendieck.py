"""Composition factors, simple modules and G₀ lattices over prime fields."""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import (
    DECOMPOSE_ATTEMPTS,
    DEFAULT_SEED,
    INTERTWINER_ATTEMPTS,
    MEATAXE_ATTEMPTS,
    MEATAXE_EXHAUSTIVE_RANK,
    MEATAXE_RANK_CAP,
)
from exceptions import CapExceededError, HypothesisError, InconclusiveError, UnsupportedRingError
from gmodule import RGModule, fixed_points, free_module, hom_space, linearize, submodule
from group import Group, Subgroup, conjugacy_classes_of_subgroups, coset_action
from ring import INTEGERS, Ring, image_basis, inverse, is_invertible, kernel, rank, smith_normal_form, solve_int

LOGGER = logging.getLogger(__name__)

# enumerate a subspace exhaustively when it has at most this many vectors
EXHAUSTIVE_VECTORS = 4096


def _require_field(M: RGModule) -> Ring:
    if not M.ring.is_field:
        raise UnsupportedRingError("G₀ computations need field coefficients")
    return M.ring


# =====================================================
# SPINNING AND SUBSPACES
# =====================================================

def spin(actions: Sequence[np.ndarray], vectors: np.ndarray, R: Ring) -> np.ndarray:
    """Basis of the smallest subspace containing ``vectors`` and stable under ``actions``."""
    span = image_basis(vectors, R)
    while True:
        grown = image_basis(np.hstack([span] + [R.matmul(a, span) for a in actions]), R)
        if grown.shape[1] == span.shape[1]:
            return span
        span = grown


def _projective_points(basis: np.ndarray, R: Ring):
    """One nonzero vector per line of the column span of ``basis``."""
    k = basis.shape[1]
    for coeffs in itertools.product(range(R.p), repeat=k):
        nonzero = [c for c in coeffs if c]
        if not nonzero or nonzero[0] != 1:
            continue
        yield R.matmul(basis, R.matrix([[c] for c in coeffs]))


def _enumerable(dim: int, R: Ring) -> bool:
    return R.p ** dim <= EXHAUSTIVE_VECTORS


def _quotient(M: RGModule, W: np.ndarray) -> RGModule:
    """M / span(W) in the basis completing W by standard vectors."""
    R = M.ring
    cols = [W]
    r = W.shape[1]
    for j in range(M.rank):
        e = R.eye(M.rank)[:, [j]]
        if rank(np.hstack(cols + [e]), R) > r:
            cols.append(e)
            r += 1
    B = np.hstack(cols)
    B_inv = inverse(B, R)
    w = W.shape[1]
    action = tuple(R.chain(B_inv, a, B)[w:, w:] for a in M.action)
    return RGModule(M.group, R, M.rank - w, action)


# =====================================================
# MEATAXE-LITE
# =====================================================

@dataclass
class SplitResult:
    """A proper invariant subspace, or a proof of irreducibility."""

    subspace: Optional[np.ndarray]
    irreducible: bool
    method: str


def _random_algebra_element(M: RGModule, rng: np.random.Generator) -> np.ndarray:
    R = M.ring
    out = R.zeros(M.rank, M.rank)
    for g, c in enumerate(rng.integers(0, R.p, size=M.group.order)):
        if c:
            out = R.add(out, R.scale(int(c), M.element_matrix(g)))
    return out


def _exhaustive_split(M: RGModule) -> SplitResult:
    R = M.ring
    for v in _projective_points(R.eye(M.rank), R):
        W = spin(M.action, v, R)
        if W.shape[1] < M.rank:
            return SplitResult(W, False, "exhaustive")
    return SplitResult(None, True, "exhaustive")


def find_split(M: RGModule, seed: int = DEFAULT_SEED) -> SplitResult:
    """Looks for a proper submodule; Norton's criterion certifies irreducibility.

    For a random algebra element A with small nullspace N: a vector of N that
    spins to a proper subspace splits M; if every vector of N spins to M and a
    vector of ker Aᵀ spins to the whole dual, M is irreducible.

    Raises:
        CapExceededError: rank above the cap
        InconclusiveError: neither outcome within the attempt budget
    """
    R = _require_field(M)
    if M.rank > MEATAXE_RANK_CAP:
        raise CapExceededError(f"meataxe is capped at rank {MEATAXE_RANK_CAP}, got {M.rank}")
    if M.rank <= 1:
        return SplitResult(None, True, "dimension")
    rng = np.random.default_rng(seed)
    dual = [R.reduce(a.T.copy()) for a in M.action]
    for attempt in range(MEATAXE_ATTEMPTS):
        A = _random_algebra_element(M, rng)
        N = kernel(A, R)
        if N.shape[1] == 0 or not _enumerable(N.shape[1], R):
            continue
        for v in _projective_points(N, R):
            W = spin(M.action, v, R)
            if W.shape[1] < M.rank:
                LOGGER.debug("meataxe: split off rank %d after %d attempts", W.shape[1], attempt + 1)
                return SplitResult(W, False, "nullspace")
        Nt = kernel(R.reduce(A.T.copy()), R)
        Wd = spin(dual, Nt[:, [0]], R)
        if Wd.shape[1] == M.rank:
            return SplitResult(None, True, "norton")
        # the annihilator of a proper dual submodule is a proper submodule
        return SplitResult(kernel(R.reduce(Wd.T.copy()), R), False, "dual nullspace")
    if M.rank <= MEATAXE_EXHAUSTIVE_RANK and R.p <= 3:
        LOGGER.info("meataxe: falling back to exhaustive spinning at rank %d", M.rank)
        return _exhaustive_split(M)
    raise InconclusiveError(f"meataxe found neither a submodule nor a proof in {MEATAXE_ATTEMPTS} attempts")


def is_irreducible(M: RGModule, seed: int = DEFAULT_SEED) -> bool:
    return M.rank > 0 and find_split(M, seed).irreducible


def composition_factors(M: RGModule, seed: int = DEFAULT_SEED) -> List[RGModule]:
    """Irreducible subquotients of a composition series, bottom first."""
    _require_field(M)
    if M.rank == 0:
        return []
    split = find_split(M, seed)
    if split.irreducible:
        return [M]
    sub, _ = submodule(M, split.subspace)
    return composition_factors(sub, seed) + composition_factors(_quotient(M, split.subspace), seed)


# =====================================================
# ISOMORPHISM TESTING
# =====================================================

@dataclass
class IsoVerdict:
    status: str  # "iso", "not-iso" or "inconclusive"
    witness: Optional[np.ndarray] = None
    reason: str = ""

    @property
    def is_iso(self) -> bool:
        return self.status == "iso"

    def to_dict(self) -> Dict[str, Any]:
        return {"status": self.status, "reason": self.reason}


def fixed_point_profile(M: RGModule, classes: Optional[List[Subgroup]] = None) -> Tuple[int, ...]:
    if classes is None:
        classes = conjugacy_classes_of_subgroups(M.group)
    return tuple(fixed_points(M, H)[0] for H in classes)


def iso_test(M: RGModule, N: RGModule, seed: int = DEFAULT_SEED) -> IsoVerdict:
    """Isomorphism test by invariants, then a seeded search of the intertwiner space."""
    R = _require_field(M)
    if M.group != N.group or M.ring != N.ring:
        return IsoVerdict("not-iso", reason="different group or ring")
    if M.rank != N.rank:
        return IsoVerdict("not-iso", reason=f"ranks {M.rank} and {N.rank} differ")
    if M.rank == 0:
        return IsoVerdict("iso", R.zeros(0, 0), reason="zero modules")
    classes = conjugacy_classes_of_subgroups(M.group)
    if fixed_point_profile(M, classes) != fixed_point_profile(N, classes):
        return IsoVerdict("not-iso", reason="fixed-point dimensions differ")
    basis = hom_space(M, N)
    if not basis:
        return IsoVerdict("not-iso", reason="no nonzero intertwiner")
    rng = np.random.default_rng(seed)
    for _ in range(INTERTWINER_ATTEMPTS):
        phi = R.zeros(N.rank, M.rank)
        for c, B in zip(rng.integers(0, R.p, size=len(basis)), basis):
            phi = R.add(phi, R.scale(int(c), B))
        if is_invertible(phi, R):
            return IsoVerdict("iso", phi, reason="invertible intertwiner")
    return IsoVerdict("inconclusive", reason=f"no invertible intertwiner in {INTERTWINER_ATTEMPTS} attempts")


# =====================================================
# SIMPLE MODULES AND G₀
# =====================================================

@dataclass(frozen=True, eq=False)
class SimpleBasis:
    group: Group
    ring: Ring
    simples: Tuple[RGModule, ...]
    seed: int = DEFAULT_SEED

    @property
    def ranks(self) -> Tuple[int, ...]:
        return tuple(S.rank for S in self.simples)

    def __len__(self) -> int:
        return len(self.simples)

    def index_of(self, S: RGModule) -> int:
        """Position of the simple module isomorphic to S."""
        inconclusive = False
        for i, T in enumerate(self.simples):
            if T.rank != S.rank:
                continue
            verdict = iso_test(S, T, self.seed)
            if verdict.is_iso:
                return i
            inconclusive = inconclusive or verdict.status == "inconclusive"
        if inconclusive:
            raise InconclusiveError(f"could not match a simple factor of rank {S.rank}")
        raise HypothesisError(f"factor of rank {S.rank} matches no module of the simple basis")


def _dedupe(modules: List[RGModule], seed: int) -> List[RGModule]:
    out: List[RGModule] = []
    for M in modules:
        if not any(T.rank == M.rank and iso_test(M, T, seed).is_iso for T in out):
            out.append(M)
    return out


def simples(G: Group, ring: Ring, seed: int = DEFAULT_SEED) -> SimpleBasis:
    """Simple kG-modules, read off the composition factors of the regular module.

    Ordered by rank, then by fixed-point profile over subgroup classes, then by
    discovery order; stable for a fixed seed.
    """
    if not ring.is_field:
        raise UnsupportedRingError("simple modules need field coefficients")
    factors = composition_factors(free_module(G, ring), seed)
    found = _dedupe(factors, seed)
    classes = conjugacy_classes_of_subgroups(G)
    keyed = [(S.rank, fixed_point_profile(S, classes), i) for i, S in enumerate(found)]
    ordered = tuple(found[i] for _, _, i in sorted(keyed))
    LOGGER.info("simples of %s over %s: ranks %s", G.label, ring, [S.rank for S in ordered])
    return SimpleBasis(G, ring, ordered, seed)


@dataclass(frozen=True, eq=False)
class G0Vector:
    basis: SimpleBasis
    multiplicities: Tuple[int, ...]

    def __add__(self, other: "G0Vector") -> "G0Vector":
        if other.basis is not self.basis:
            raise HypothesisError("G₀ vectors over different simple bases")
        return G0Vector(self.basis, tuple(a + b for a, b in zip(self.multiplicities, other.multiplicities)))

    def __eq__(self, other):
        return isinstance(other, G0Vector) and self.multiplicities == other.multiplicities

    def __hash__(self):
        return hash(self.multiplicities)

    @property
    def dimension(self) -> int:
        return sum(m * r for m, r in zip(self.multiplicities, self.basis.ranks))

    def to_list(self) -> List[int]:
        return list(self.multiplicities)


def g0_class(M: RGModule, basis: SimpleBasis) -> G0Vector:
    """Composition multiplicities of M against the simple basis."""
    if M.group != basis.group or M.ring != basis.ring:
        raise HypothesisError("module and simple basis live over different group or ring")
    counts = [0] * len(basis)
    for S in composition_factors(M, basis.seed):
        counts[basis.index_of(S)] += 1
    return G0Vector(basis, tuple(counts))


# =====================================================
# PERMUTATION CLASSES
# =====================================================

@dataclass
class SpanReport:
    basis: SimpleBasis
    subgroup_orders: List[int]
    matrix: np.ndarray  # rows: simples, columns: k(G/H)
    invariant_factors: Tuple[int, ...]
    spans: bool
    witness: Dict[int, List[int]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "simple_ranks": list(self.basis.ranks),
            "subgroup_orders": list(self.subgroup_orders),
            "matrix": [[int(x) for x in row] for row in self.matrix],
            "invariant_factors": list(self.invariant_factors),
            "spans": self.spans,
            "witness": {str(i): w for i, w in self.witness.items()},
        }


def _class_matrix(vectors: List[G0Vector], rows: int) -> np.ndarray:
    if not vectors:
        return INTEGERS.zeros(rows, 0)
    return INTEGERS.reduce(INTEGERS.matrix([list(v.multiplicities) for v in vectors]).T.copy())


def pperm_span(G: Group, ring: Ring, seed: int = DEFAULT_SEED,
               classes: Optional[List[Subgroup]] = None,
               basis: Optional[SimpleBasis] = None) -> SpanReport:
    """Whether the classes [k(G/H)] span G₀(kG) as a lattice.

    Spanning means every Smith invariant factor is 1 and there are as many as
    simples; the witness writes each simple as an integer combination of the
    permutation classes.
    """
    basis = basis or simples(G, ring, seed)
    if classes is None:
        classes = conjugacy_classes_of_subgroups(G)
    vectors = []
    for H in classes:
        _, cosets = coset_action(G, H)
        vectors.append(g0_class(linearize(cosets, ring), basis))
    A = _class_matrix(vectors, len(basis))
    factors = smith_normal_form(A).invariant_factors
    spans = len(factors) == len(basis) and all(abs(d) == 1 for d in factors)
    witness = {}
    if spans:
        for i in range(len(basis)):
            e = INTEGERS.zeros(len(basis), 1)
            e[i, 0] = 1
            x = solve_int(A, e)
            witness[i] = [int(v) for v in x[:, 0]]
    LOGGER.info("pperm_span %s over %s: factors %s, spans=%s", G.label, ring, factors, spans)
    return SpanReport(basis, [H.order for H in classes], A, factors, spans, witness)


def lattice_contains(report: SpanReport, vector: G0Vector) -> Optional[List[int]]:
    """Integer coefficients writing ``vector`` in the permutation classes, or None."""
    b = INTEGERS.matrix([[m] for m in vector.multiplicities])
    x = solve_int(report.matrix, b)
    return None if x is None else [int(v) for v in x[:, 0]]


# =====================================================
# DECOMPOSITION AND THE CARTAN QUOTIENT
# =====================================================

def _fitting_split(M: RGModule, phi: np.ndarray) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """(ker φⁿ, im φⁿ) when both are nonzero."""
    R = M.ring
    power = R.eye(M.rank)
    for _ in range(M.rank):
        power = R.matmul(power, phi)
    K, I = kernel(power, R), image_basis(power, R)
    if K.shape[1] and I.shape[1]:
        return K, I
    return None


def _endomorphisms(M: RGModule, rng: np.random.Generator):
    R = M.ring
    basis = hom_space(M, M)
    if _enumerable(len(basis), R):
        for coeffs in itertools.product(range(R.p), repeat=len(basis)):
            yield coeffs, basis
        return
    for _ in range(DECOMPOSE_ATTEMPTS):
        yield tuple(int(c) for c in rng.integers(0, R.p, size=len(basis))), basis


def decompose(M: RGModule, seed: int = DEFAULT_SEED) -> List[RGModule]:
    """Splits M into indecomposable summands by Fitting's lemma.

    An endomorphism φ with ker φⁿ and im φⁿ both nonzero splits M. Small
    endomorphism algebras are enumerated, so "every endomorphism is nilpotent
    or invertible" is then exact; larger ones are sampled.
    """
    R = _require_field(M)
    if M.rank == 0:
        return []
    rng = np.random.default_rng(seed)
    for coeffs, basis in _endomorphisms(M, rng):
        phi = R.zeros(M.rank, M.rank)
        for c, B in zip(coeffs, basis):
            if c:
                phi = R.add(phi, R.scale(c, B))
        parts = _fitting_split(M, phi)
        if parts is None:
            continue
        out = []
        for W in parts:
            N, _ = submodule(M, W)
            out.extend(decompose(N, seed))
        return out
    return [M]


@dataclass
class CartanReport:
    basis: SimpleBasis
    cartan: np.ndarray  # column j: class of the projective cover of simple j
    invariant_factors: Tuple[int, ...]

    @property
    def quotient(self) -> Tuple[int, ...]:
        """Nontrivial invariant factors of G₀ / ℙ."""
        return tuple(abs(d) for d in self.invariant_factors if abs(d) != 1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cartan": [[int(x) for x in row] for row in self.cartan],
            "invariant_factors": list(self.invariant_factors),
            "quotient": list(self.quotient),
        }


def _head_index(P: RGModule, basis: SimpleBasis) -> int:
    """Simple quotient of an indecomposable projective: the top factor of a composition series."""
    return basis.index_of(composition_factors(P, basis.seed)[-1])


def cartan_quotient(G: Group, ring: Ring, seed: int = DEFAULT_SEED,
                    basis: Optional[SimpleBasis] = None) -> CartanReport:
    """Cartan matrix from the indecomposable summands of kG and the invariants of G₀ / ℙ."""
    basis = basis or simples(G, ring, seed)
    pims = _dedupe(decompose(free_module(G, ring), seed), seed)
    if len(pims) != len(basis):
        raise InconclusiveError(f"found {len(pims)} projective indecomposables for {len(basis)} simples")
    columns: Dict[int, G0Vector] = {}
    for P in pims:
        columns[_head_index(P, basis)] = g0_class(P, basis)
    if len(columns) != len(basis):
        raise InconclusiveError("projective indecomposables do not have distinct heads")
    C = _class_matrix([columns[j] for j in range(len(basis))], len(basis))
    factors = smith_normal_form(C).invariant_factors
    LOGGER.info("cartan %s over %s: invariant factors %s", G.label, ring, factors)
    return CartanReport(basis, C, factors)
