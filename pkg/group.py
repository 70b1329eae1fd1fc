"""Finite permutation groups with a stable element enumeration.

Elements are tuples of images of {0..degree-1}. Composition is right to left,
(a∘b)(i) = a[b[i]], so a left action on points composes the way matrices do.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint, multiplicity

from config import GROUP_ORDER_CAP, SUBGROUP_ORDER_CAP
from exceptions import (
    CapExceededError,
    HypothesisError,
    InvalidPermutationError,
    NotASubgroupError,
    NotNormalError,
)

LOGGER = logging.getLogger(__name__)

Perm = Tuple[int, ...]


def validate_perm(images: Sequence[int], degree: int) -> Perm:
    """Checks ``images`` is a permutation of {0..degree-1} and returns it as a tuple."""
    try:
        perm = tuple(int(x) for x in images)
    except (TypeError, ValueError):
        raise InvalidPermutationError(f"Permutation must be a list of integers, got {images!r}")
    if len(perm) != degree or sorted(perm) != list(range(degree)):
        raise InvalidPermutationError(f"{list(perm)} is not a permutation of 0..{degree - 1}")
    return perm


def compose(a: Perm, b: Perm) -> Perm:
    return tuple(a[x] for x in b)


def invert(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def identity_perm(degree: int) -> Perm:
    return tuple(range(degree))


# =====================================================
# GROUPS
# =====================================================

@dataclass(frozen=True, eq=False)
class Group:
    """A permutation group together with its breadth-first element list.

    ``steps[i] = (g, j)`` records elements[i] = generators[g] ∘ elements[j]
    with j < i; the identity sits at position 0 and has no step.
    """

    degree: int
    generators: Tuple[Perm, ...]
    elements: Tuple[Perm, ...]
    steps: Tuple[Optional[Tuple[int, int]], ...]
    name: str = field(default="", compare=False)

    def __eq__(self, other):
        return isinstance(other, Group) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @cached_property
    def _key(self):
        return (self.degree, self.generators)

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def index(self) -> Dict[Perm, int]:
        return {g: i for i, g in enumerate(self.elements)}

    @cached_property
    def generator_indices(self) -> Tuple[int, ...]:
        return tuple(self.index[g] for g in self.generators)

    @cached_property
    def words(self) -> Tuple[Tuple[int, ...], ...]:
        """Generator-index word of each element, leftmost letter applied last."""
        out: List[Tuple[int, ...]] = [()]
        for step in self.steps[1:]:
            g, j = step
            out.append((g,) + out[j])
        return tuple(out)

    @cached_property
    def mult(self) -> np.ndarray:
        """mult[i, j] = position of elements[i] ∘ elements[j]."""
        n = self.order
        table = np.zeros((n, n), dtype=np.int64)
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                table[i, j] = self.index[compose(a, b)]
        return table

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.array([self.index[invert(g)] for g in self.elements], dtype=np.int64)

    def conjugate(self, g: int, x: int) -> int:
        """Position of g x g^-1."""
        return int(self.mult[self.mult[g, x], self.inverse[g]])

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != 0:
            x = int(self.mult[i, x])
            k += 1
        return k

    def prime(self) -> Optional[int]:
        """The prime p when the group is a nontrivial p-group, else None."""
        factors = factorint(self.order)
        if len(factors) == 1:
            return next(iter(factors))
        return None

    def is_p_group(self, p: int) -> bool:
        return self.order == p ** multiplicity(p, self.order)

    @property
    def label(self) -> str:
        return self.name or f"perm{self.degree}[{self.order}]"

    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup(self, (0,))

    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self.order)))

    def evaluate(self, i: int, gen_values: Sequence, mul, one):
        """Evaluates element i in any structure given the values of the generators.

        ``mul(a, b)`` is the product in the target structure and ``one`` its unit.
        """
        values = [one]
        for step in self.steps[1:i + 1]:
            g, j = step
            values.append(mul(gen_values[g], values[j]))
        return values[i]

    def evaluate_all(self, gen_values: Sequence, mul, one) -> list:
        values = [one]
        for step in self.steps[1:]:
            g, j = step
            values.append(mul(gen_values[g], values[j]))
        return values


def enumerate_group(degree: int, generators: Iterable[Sequence[int]], name: str = "") -> Group:
    """Enumerates a permutation group breadth-first over generator words.

    Each new level is sorted lexicographically, so the element order depends
    only on the generator list.

    Args:
        degree: number of points acted on
        generators: list of permutations of {0..degree-1}
        name: optional display name

    Returns:
        Group with the identity at position 0
    """
    if int(degree) < 1:
        raise InvalidPermutationError(f"degree must be positive, got {degree}")
    gens = tuple(validate_perm(g, degree) for g in generators)
    e = identity_perm(degree)
    elements: List[Perm] = [e]
    steps: List[Optional[Tuple[int, int]]] = [None]
    seen = {e: 0}
    frontier = [0]
    while frontier:
        found: Dict[Perm, Tuple[int, int]] = {}
        for j in frontier:
            x = elements[j]
            for gi, g in enumerate(gens):
                y = compose(g, x)
                if y not in seen and y not in found:
                    found[y] = (gi, j)
        frontier = []
        for y in sorted(found):
            seen[y] = len(elements)
            frontier.append(len(elements))
            elements.append(y)
            steps.append(found[y])
            if len(elements) > GROUP_ORDER_CAP:
                raise CapExceededError(f"group order exceeds the cap of {GROUP_ORDER_CAP}")
    LOGGER.debug("Enumerated %s: order %d on %d points", name or "group", len(elements), degree)
    return Group(degree=int(degree), generators=gens, elements=tuple(elements), steps=tuple(steps), name=name)


# =====================================================
# SUBGROUPS
# =====================================================

def closure(G: Group, seeds: Iterable[int]) -> Tuple[int, ...]:
    """Sorted positions of the subgroup generated by ``seeds``."""
    members = {0}
    gens = sorted(set(int(s) for s in seeds) - {0})
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = int(G.mult[s, x])
            if y not in members:
                members.add(y)
                queue.append(y)
    return tuple(sorted(members))


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup of ``parent`` given by sorted element positions."""

    parent: Group
    members: Tuple[int, ...]

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.parent == other.parent and self.members == other.members

    def __hash__(self):
        return hash((self.parent, self.members))

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    @cached_property
    def member_set(self) -> FrozenSet[int]:
        return frozenset(self.members)

    def __contains__(self, i: int) -> bool:
        return int(i) in self.member_set

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return self.member_set <= other.member_set

    @cached_property
    def generators(self) -> Tuple[int, ...]:
        """Greedy generating set, scanning members in enumeration order."""
        gens: List[int] = []
        span = {0}
        for m in self.members:
            if m not in span:
                gens.append(m)
                span = set(closure(self.parent, gens))
        return tuple(gens)

    @property
    def words(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(self.parent.words[g] for g in self.generators)

    @cached_property
    def as_group(self) -> Group:
        """The subgroup as a Group in its own right, generated by ``generators``."""
        G = self.parent
        return enumerate_group(G.degree, [G.elements[g] for g in self.generators],
                               name=f"{G.label}>{self.order}")

    @cached_property
    def embedding(self) -> Tuple[int, ...]:
        """Parent position of each element of ``as_group``."""
        return tuple(self.parent.index[g] for g in self.as_group.elements)

    def conjugate_by(self, g: int) -> "Subgroup":
        return Subgroup(self.parent, tuple(sorted(self.parent.conjugate(g, x) for x in self.members)))

    def is_normal(self) -> bool:
        return all(self.conjugate_by(g) == self for g in self.parent.generator_indices)


def make_subgroup(G: Group, elements: Iterable[Sequence[int]]) -> Subgroup:
    """Subgroup generated by the given permutations, which must lie in G."""
    positions = []
    for perm in elements:
        p = validate_perm(perm, G.degree)
        if p not in G.index:
            raise NotASubgroupError(f"{list(p)} is not an element of {G.label}")
        positions.append(G.index[p])
    return Subgroup(G, closure(G, positions))


def check_subgroup(G: Group, H: Subgroup) -> None:
    if H.parent != G:
        raise NotASubgroupError(f"subgroup of {H.parent.label} used with {G.label}")
    if closure(G, H.members) != H.members:
        raise NotASubgroupError("member list is not closed under multiplication")


def require_normal(H: Subgroup) -> None:
    if not H.is_normal():
        raise NotNormalError(f"subgroup of order {H.order} is not normal in {H.parent.label}")


def subgroups(G: Group, up_to_conjugacy: bool = False, cap: int = SUBGROUP_ORDER_CAP) -> List[Subgroup]:
    """All subgroups by cyclic extension, sorted by (order, members).

    With ``up_to_conjugacy`` only the first member of each conjugacy class is kept.
    """
    if G.order > cap:
        raise CapExceededError(f"subgroup enumeration is capped at order {cap}, {G.label} has order {G.order}")
    cyclic = {closure(G, [g]) for g in range(G.order)}
    found = set(cyclic)
    layer = set(cyclic)
    while layer:
        nxt = set()
        for S in layer:
            s_set = set(S)
            for C in cyclic:
                if not set(C) <= s_set:
                    T = closure(G, S + C)
                    if T not in found:
                        nxt.add(T)
        found |= nxt
        layer = nxt
    ordered = [Subgroup(G, m) for m in sorted(found, key=lambda m: (len(m), m))]
    if not up_to_conjugacy:
        return ordered
    reps: List[Subgroup] = []
    covered = set()
    for H in ordered:
        if H.members in covered:
            continue
        reps.append(H)
        covered |= {H.conjugate_by(g).members for g in range(G.order)}
    return reps


def conjugacy_classes_of_subgroups(G: Group, cap: int = SUBGROUP_ORDER_CAP) -> List[Subgroup]:
    return subgroups(G, up_to_conjugacy=True, cap=cap)


def subgroups_of(K: Subgroup) -> List[Subgroup]:
    """Subgroups of K, as subgroups of K's parent, sorted by (order, members)."""
    inner = subgroups(K.as_group, cap=max(SUBGROUP_ORDER_CAP, K.order))
    out = {tuple(sorted(K.embedding[i] for i in S.members)) for S in inner}
    return [Subgroup(K.parent, m) for m in sorted(out, key=lambda m: (len(m), m))]


def maximal_subgroups_of(K: Subgroup) -> List[Subgroup]:
    proper = [S for S in subgroups_of(K) if S.order < K.order]
    return [S for S in proper
            if not any(S.order < T.order and S.is_subgroup_of(T) for T in proper)]


def sylow(G: Group, p: int) -> Subgroup:
    """A Sylow p-subgroup: G itself for p-groups, else the first of the right order."""
    k = multiplicity(p, G.order)
    if k == 0:
        return G.trivial_subgroup()
    if G.order == p ** k:
        return G.whole()
    for H in subgroups(G):
        if H.order == p ** k:
            return H
    raise CapExceededError(f"no Sylow {p}-subgroup found in {G.label}")


def index2_normal_subgroups(G: Group) -> List[Subgroup]:
    """Kernels of all surjections G -> C2, sorted by members.

    Candidate functionals are assignments of parities to the generators; a
    candidate survives when word parity is a homomorphism. They all vanish on
    the subgroup generated by squares and commutators.
    """
    if G.order % 2:
        return []
    squares = [int(G.mult[g, g]) for g in range(G.order)]
    N = closure(G, squares)
    expected = G.order // len(N)
    word_counts = np.array([[w.count(k) for k in range(len(G.generators))] for w in G.words],
                           dtype=np.int64).reshape(G.order, len(G.generators))
    kernels = set()
    for bits in product((0, 1), repeat=len(G.generators)):
        if not any(bits):
            continue
        phi = (word_counts @ np.array(bits, dtype=np.int64)) % 2
        if not np.array_equal(phi[G.mult], (phi[:, None] + phi[None, :]) % 2):
            continue
        kernel = tuple(int(i) for i in np.nonzero(phi == 0)[0])
        if len(kernel) * 2 == G.order:
            kernels.add(kernel)
    # G/N is elementary abelian, so it has exactly |G/N| - 1 surjections onto C2.
    if len(kernels) != expected - 1:
        raise HypothesisError(f"{G.label}: found {len(kernels)} index-2 subgroups, "
                              f"expected {expected - 1} from |G/G²| = {expected}")
    LOGGER.debug("%s: |G/G²| = %d, %d index-2 subgroups", G.label, expected, len(kernels))
    return [Subgroup(G, k) for k in sorted(kernels)]


# =====================================================
# G-SETS AND COSETS
# =====================================================

@dataclass(frozen=True, eq=False)
class GSet:
    """A finite left G-set: one permutation of the points per generator."""

    group: Group
    size: int
    action: Tuple[Perm, ...]
    point_labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if len(self.action) != len(self.group.generators):
            raise InvalidPermutationError(
                f"G-set needs {len(self.group.generators)} generator actions, got {len(self.action)}")
        object.__setattr__(self, "action", tuple(validate_perm(a, self.size) for a in self.action))
        if self.size == 0:
            return
        table = self.table
        for s, gi in enumerate(self.group.generator_indices):
            act = np.asarray(self.action[s], dtype=np.int64)
            if not np.array_equal(table[self.group.mult[gi]], act[table]):
                raise InvalidPermutationError("generator actions do not extend to a group action")

    def __eq__(self, other):
        return (isinstance(other, GSet) and self.group == other.group
                and self.size == other.size and self.action == other.action)

    def __hash__(self):
        return hash((self.group, self.size, self.action))

    @cached_property
    def table(self) -> np.ndarray:
        """table[i] is the permutation of the points induced by element i."""
        G = self.group
        table = np.zeros((G.order, self.size), dtype=np.int64)
        table[0] = np.arange(self.size)
        acts = [np.asarray(a, dtype=np.int64) for a in self.action]
        for i, step in enumerate(G.steps[1:], start=1):
            g, j = step
            table[i] = acts[g][table[j]] if self.size else table[j]
        return table

    def orbits(self) -> List[Tuple[int, ...]]:
        seen = set()
        out = []
        for x in range(self.size):
            if x in seen:
                continue
            orbit = tuple(sorted(set(int(y) for y in self.table[:, x])))
            seen |= set(orbit)
            out.append(orbit)
        return out

    def stabilizer(self, point: int) -> Subgroup:
        members = tuple(int(i) for i in np.nonzero(self.table[:, point] == point)[0])
        return Subgroup(self.group, members)

    def fixed_points(self, H: Subgroup) -> List[int]:
        rows = self.table[list(H.members)]
        return [x for x in range(self.size) if np.all(rows[:, x] == x)]

    def is_free(self) -> bool:
        return all(self.stabilizer(orbit[0]).order == 1 for orbit in self.orbits())

    def disjoint_union(self, other: "GSet") -> "GSet":
        shift = self.size
        action = tuple(a + tuple(x + shift for x in b) for a, b in zip(self.action, other.action))
        return GSet(self.group, self.size + other.size, action)

    def product(self, other: "GSet") -> "GSet":
        """Diagonal action on pairs, pair (x, y) at position x * |other| + y."""
        m = other.size
        action = tuple(tuple(a[x] * m + b[y] for x in range(self.size) for y in range(m))
                       for a, b in zip(self.action, other.action))
        return GSet(self.group, self.size * m, action)


def regular_gset(G: Group, copies: int = 1) -> GSet:
    """``copies`` disjoint copies of G acting on itself by left multiplication."""
    n = G.order
    action = tuple(tuple(int(G.mult[g, x]) + c * n for c in range(copies) for x in range(n))
                   for g in G.generator_indices)
    return GSet(G, n * copies, action)


def trivial_gset(G: Group, size: int = 1) -> GSet:
    return GSet(G, size, tuple(identity_perm(size) for _ in G.generators))


@dataclass(frozen=True, eq=False)
class Transversal:
    """Left coset representatives of H, identity coset first."""

    subgroup: Subgroup
    representatives: Tuple[int, ...]
    coset_of: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.representatives)

    def decompose(self, g: int, j: int) -> Tuple[int, int]:
        """Returns (k, h) with g·r_j = r_k·h and h in H."""
        G = self.subgroup.parent
        x = int(G.mult[g, self.representatives[j]])
        k = self.coset_of[x]
        h = int(G.mult[G.inverse[self.representatives[k]], x])
        return k, h


def coset_action(G: Group, H: Subgroup) -> Tuple[Transversal, GSet]:
    """Left action of G on G/H.

    Args:
        G: the group
        H: a subgroup of G

    Returns:
        (transversal with identity first, G-set of the cosets)
    """
    check_subgroup(G, H)
    coset_of = [-1] * G.order
    reps: List[int] = []
    for g in range(G.order):
        if coset_of[g] >= 0:
            continue
        k = len(reps)
        reps.append(g)
        for h in H.members:
            coset_of[int(G.mult[g, h])] = k
    action = tuple(tuple(coset_of[int(G.mult[s, r])] for r in reps) for s in G.generator_indices)
    transversal = Transversal(subgroup=H, representatives=tuple(reps), coset_of=tuple(coset_of))
    return transversal, GSet(G, len(reps), action)


def table_of_marks(G: Group, classes: Sequence[Subgroup]) -> np.ndarray:
    """marks[i, j] = number of points of G/classes[i] fixed by classes[j]."""
    marks = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for i, H in enumerate(classes):
        _, cosets = coset_action(G, H)
        for j, K in enumerate(classes):
            marks[i, j] = len(cosets.fixed_points(K))
    return marks
