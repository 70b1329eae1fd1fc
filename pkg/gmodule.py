"""RG-modules with structural certificates, and the functors between them.

Vectors are columns and ρ(gh) = ρ(g)·ρ(h). A certificate is a witness that
travels with the module (a G-set, a signed G-set, or a summand of a
permutation module) and is checked when the module is built.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from exceptions import (
    HypothesisError,
    InvalidModuleError,
    InvalidPermutationError,
    RingMismatchError,
    ShapeMismatchError,
)
from group import (
    Group,
    GSet,
    Perm,
    Subgroup,
    check_subgroup,
    coset_action,
    regular_gset,
    trivial_gset,
    validate_perm,
)
from ring import Ring, inverse, is_invertible, kernel, rank as matrix_rank, solve

LOGGER = logging.getLogger(__name__)


# =====================================================
# SIGNED G-SETS
# =====================================================

@dataclass(frozen=True, eq=False)
class SignedGSet:
    """Basis permuted up to sign: g·e_x = signs[g][x]·e_{perms[g][x]}."""

    group: Group
    size: int
    perms: Tuple[Perm, ...]
    signs: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        G = self.group
        if len(self.perms) != len(G.generators) or len(self.signs) != len(G.generators):
            raise InvalidPermutationError("signed G-set needs one permutation and sign vector per generator")
        object.__setattr__(self, "perms", tuple(validate_perm(p, self.size) for p in self.perms))
        signs = tuple(tuple(int(s) for s in row) for row in self.signs)
        if any(len(row) != self.size or any(s not in (1, -1) for s in row) for row in signs):
            raise InvalidPermutationError("signs must be +1 or -1, one per point")
        object.__setattr__(self, "signs", signs)
        if self.size == 0:
            return
        perm_table, sign_table = self.tables
        for s, gi in enumerate(G.generator_indices):
            p = np.asarray(self.perms[s], dtype=np.int64)
            sg = np.asarray(self.signs[s], dtype=np.int64)
            rows = G.mult[gi]
            if not np.array_equal(perm_table[rows], p[perm_table]):
                raise InvalidPermutationError("signed generator actions do not extend to a group action")
            if not np.array_equal(sign_table[rows], sign_table * sg[perm_table]):
                raise InvalidPermutationError("signs are inconsistent with the group relations")

    @cached_property
    def tables(self) -> Tuple[np.ndarray, np.ndarray]:
        """Point permutation and sign vector of every group element."""
        G = self.group
        perm_table = np.zeros((G.order, self.size), dtype=np.int64)
        sign_table = np.ones((G.order, self.size), dtype=np.int64)
        perm_table[0] = np.arange(self.size)
        perms = [np.asarray(p, dtype=np.int64) for p in self.perms]
        signs = [np.asarray(s, dtype=np.int64) for s in self.signs]
        for i, step in enumerate(G.steps[1:], start=1):
            g, j = step
            if self.size:
                perm_table[i] = perms[g][perm_table[j]]
                sign_table[i] = sign_table[j] * signs[g][perm_table[j]]
        return perm_table, sign_table

    def is_sign_free(self) -> bool:
        return all(s == 1 for row in self.signs for s in row)

    def underlying(self) -> GSet:
        return GSet(self.group, self.size, self.perms)

    @classmethod
    def from_gset(cls, A: GSet) -> "SignedGSet":
        return cls(A.group, A.size, A.action, tuple((1,) * A.size for _ in A.action))

    def product(self, other: "SignedGSet") -> "SignedGSet":
        m = other.size
        perms, signs = [], []
        for a, sa, b, sb in zip(self.perms, self.signs, other.perms, other.signs):
            perms.append(tuple(a[x] * m + b[y] for x in range(self.size) for y in range(m)))
            signs.append(tuple(sa[x] * sb[y] for x in range(self.size) for y in range(m)))
        return SignedGSet(self.group, self.size * m, tuple(perms), tuple(signs))

    def disjoint_union(self, other: "SignedGSet") -> "SignedGSet":
        shift = self.size
        perms = tuple(a + tuple(x + shift for x in b) for a, b in zip(self.perms, other.perms))
        signs = tuple(sa + sb for sa, sb in zip(self.signs, other.signs))
        return SignedGSet(self.group, self.size + other.size, perms, signs)


def signed_matrix(perm: Sequence[int], signs: Optional[Sequence[int]], ring: Ring) -> np.ndarray:
    """Matrix with column x equal to signs[x]·e_{perm[x]}."""
    n = len(perm)
    out = ring.zeros(n, n)
    for x, y in enumerate(perm):
        out[y, x] = ring.scalar(1 if signs is None else signs[x])
    return out


# =====================================================
# CERTIFICATES
# =====================================================

@dataclass(frozen=True, eq=False)
class PermutationCertificate:
    """ρ(g)·basis = basis·P(g) for the permutation matrices P of ``gset``.

    Without a basis the action matrices are the permutation matrices themselves.
    """

    gset: GSet
    basis: Optional[np.ndarray] = None
    kind = "permutation"


@dataclass(frozen=True, eq=False)
class FreeCertificate:
    gset: GSet
    basis: Optional[np.ndarray] = None
    kind = "free"

    @property
    def free_rank(self) -> int:
        return self.gset.size // self.gset.group.order


@dataclass(frozen=True, eq=False)
class MonomialCertificate:
    signed: SignedGSet
    kind = "monomial"


@dataclass(frozen=True, eq=False)
class SummandCertificate:
    """M is a direct summand of ``ambient`` through embedding/projection.

    ``idempotent`` = embedding·projection is an equivariant idempotent of the
    ambient module whose image is the copy of M.
    """

    ambient: "RGModule"
    idempotent: np.ndarray
    embedding: np.ndarray
    projection: np.ndarray
    kind = "summand"

    @property
    def projective(self) -> bool:
        return self.ambient.certificate.kind == "free"


@dataclass(frozen=True)
class GeneralCertificate:
    kind = "general"


GENERAL = GeneralCertificate()

Certificate = Union[PermutationCertificate, FreeCertificate, MonomialCertificate,
                    SummandCertificate, GeneralCertificate]


# =====================================================
# MODULES
# =====================================================

@dataclass(frozen=True, eq=False)
class RGModule:
    """A finite-rank representation of ``group`` over ``ring``."""

    group: Group
    ring: Ring
    rank: int
    action: Tuple[np.ndarray, ...]
    certificate: Certificate = GENERAL
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.action) != len(self.group.generators):
            raise InvalidModuleError(
                f"module needs {len(self.group.generators)} action matrices, got {len(self.action)}")
        mats = []
        for s, a in enumerate(self.action):
            m = self.ring.matrix(a, shape=(self.rank, self.rank)) if self.rank == 0 else self.ring.reduce(a)
            if m.shape != (self.rank, self.rank):
                raise InvalidModuleError(f"action matrix {s} has shape {m.shape}, expected {(self.rank, self.rank)}")
            mats.append(m)
        object.__setattr__(self, "action", tuple(mats))
        check_module(self)

    @property
    def kind(self) -> str:
        return self.certificate.kind

    @property
    def is_zero(self) -> bool:
        return self.rank == 0

    @cached_property
    def element_matrices(self) -> Tuple[np.ndarray, ...]:
        if self.kind in ("permutation", "free", "monomial") and _basis(self.certificate) is None:
            return tuple(self.element_matrix(i) for i in range(self.group.order))
        return tuple(self.group.evaluate_all(self.action, self.ring.matmul, self.ring.eye(self.rank)))

    def element_matrix(self, i: int) -> np.ndarray:
        """ρ(g) for the element at position i."""
        cert = self.certificate
        if cert.kind in ("permutation", "free") and cert.basis is None:
            return signed_matrix(cert.gset.table[i], None, self.ring)
        if cert.kind == "monomial":
            perm_table, sign_table = cert.signed.tables
            return signed_matrix(perm_table[i], sign_table[i], self.ring)
        if "element_matrices" in self.__dict__:
            return self.element_matrices[i]
        out = self.ring.eye(self.rank)
        for letter in reversed(self.group.words[i]):
            out = self.ring.matmul(self.action[letter], out)
        return out

    def with_certificate(self, certificate: Certificate, label: str = "") -> "RGModule":
        return RGModule(self.group, self.ring, self.rank, self.action, certificate, label or self.label)


def _basis(cert) -> Optional[np.ndarray]:
    return getattr(cert, "basis", None)


def check_module(M: RGModule) -> None:
    """Checks the action is a group action and the certificate witnesses it.

    Raises InvalidModuleError naming the failing clause.
    """
    G, R, cert = M.group, M.ring, M.certificate
    if cert.kind in ("permutation", "free"):
        A = cert.gset
        if A.group != G or A.size != M.rank:
            raise InvalidModuleError(f"{cert.kind} certificate G-set does not match the module")
        if cert.kind == "free" and not A.is_free():
            raise InvalidModuleError("free certificate carries a G-set with nontrivial stabilizers")
        B = cert.basis
        if B is None:
            for s, a in enumerate(A.action):
                if not R.equal(M.action[s], signed_matrix(a, None, R)):
                    raise InvalidModuleError(f"generator {s} does not act by the certified permutation matrix")
            return
        B = R.reduce(B)
        object.__setattr__(cert, "basis", B)
        if B.shape != (M.rank, M.rank) or not is_invertible(B, R):
            raise InvalidModuleError("certificate basis is not invertible")
        for s, a in enumerate(A.action):
            if not R.equal(R.matmul(M.action[s], B), R.matmul(B, signed_matrix(a, None, R))):
                raise InvalidModuleError(f"generator {s} does not permute the certified basis")
        return
    if cert.kind == "monomial":
        S = cert.signed
        if S.group != G or S.size != M.rank:
            raise InvalidModuleError("monomial certificate does not match the module")
        for s in range(len(G.generators)):
            if not R.equal(M.action[s], signed_matrix(S.perms[s], S.signs[s], R)):
                raise InvalidModuleError(f"generator {s} does not act by the certified signed permutation")
        return
    if cert.kind == "summand":
        amb = cert.ambient
        if amb.group != G or amb.ring != R:
            raise InvalidModuleError("summand ambient lives over a different group or ring")
        if amb.kind not in ("permutation", "free"):
            raise InvalidModuleError("summand ambient must be a permutation module")
        iota, pi, e = R.reduce(cert.embedding), R.reduce(cert.projection), R.reduce(cert.idempotent)
        if iota.shape != (amb.rank, M.rank) or pi.shape != (M.rank, amb.rank) or e.shape != (amb.rank, amb.rank):
            raise InvalidModuleError("summand certificate matrices have the wrong shapes")
        if not R.equal(R.matmul(pi, iota), R.eye(M.rank)):
            raise InvalidModuleError("projection after embedding is not the identity")
        if not R.equal(R.matmul(iota, pi), e) or not R.equal(R.matmul(e, e), e):
            raise InvalidModuleError("summand idempotent is not embedding·projection or not idempotent")
        for s in range(len(G.generators)):
            if not R.equal(R.matmul(amb.action[s], iota), R.matmul(iota, M.action[s])):
                raise InvalidModuleError(f"embedding is not equivariant at generator {s}")
            if not R.equal(R.matmul(pi, amb.action[s]), R.matmul(M.action[s], pi)):
                raise InvalidModuleError(f"projection is not equivariant at generator {s}")
        return
    # general: the generator matrices must satisfy every relation of the enumeration
    mats = G.evaluate_all(M.action, R.matmul, R.eye(M.rank))
    for s, gi in enumerate(G.generator_indices):
        for i in range(G.order):
            if not R.equal(mats[int(G.mult[gi, i])], R.matmul(M.action[s], mats[i])):
                raise InvalidModuleError(f"generator {s} violates a group relation at element {i}")


# =====================================================
# MODULE MAPS
# =====================================================

@dataclass(frozen=True, eq=False)
class ModuleMap:
    source: RGModule
    target: RGModule
    matrix: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        S, T = self.source, self.target
        if S.group != T.group:
            raise InvalidModuleError("map between modules over different groups")
        if S.ring != T.ring:
            raise RingMismatchError(f"map between modules over {S.ring} and {T.ring}")
        R = S.ring
        mat = R.zeros(T.rank, S.rank) if 0 in (T.rank, S.rank) else R.reduce(self.matrix)
        if mat.shape != (T.rank, S.rank):
            raise ShapeMismatchError(f"map matrix has shape {mat.shape}, expected {(T.rank, S.rank)}")
        object.__setattr__(self, "matrix", mat)
        if self.check and not self.is_equivariant():
            raise InvalidModuleError("map is not equivariant")

    @property
    def ring(self) -> Ring:
        return self.source.ring

    def is_equivariant(self) -> bool:
        R = self.ring
        return all(R.equal(R.matmul(b, self.matrix), R.matmul(self.matrix, a))
                   for a, b in zip(self.source.action, self.target.action))

    def compose(self, first: "ModuleMap") -> "ModuleMap":
        """self ∘ first."""
        return ModuleMap(first.source, self.target, self.ring.matmul(self.matrix, first.matrix), check=False)

    def is_zero(self) -> bool:
        return self.ring.is_zero(self.matrix)


def identity_map(M: RGModule) -> ModuleMap:
    return ModuleMap(M, M, M.ring.eye(M.rank), check=False)


def zero_map(M: RGModule, N: RGModule) -> ModuleMap:
    return ModuleMap(M, N, M.ring.zeros(N.rank, M.rank), check=False)


# =====================================================
# CONSTRUCTORS
# =====================================================

def linearize(A: GSet, ring: Ring) -> RGModule:
    """R(A): basis A, generators act by permutation matrices."""
    cert = FreeCertificate(A) if A.is_free() else PermutationCertificate(A)
    action = tuple(signed_matrix(a, None, ring) for a in A.action)
    return RGModule(A.group, ring, A.size, action, cert)


def module_from_signed(S: SignedGSet, ring: Ring) -> RGModule:
    action = tuple(signed_matrix(p, s, ring) for p, s in zip(S.perms, S.signs))
    return RGModule(S.group, ring, S.size, action, strongest_certificate(S, ring))


def strongest_certificate(S: SignedGSet, ring: Ring) -> Certificate:
    """Free, then Permutation, then Monomial. Signs are invisible over GF(2)."""
    if S.is_sign_free() or ring.characteristic == 2:
        A = S.underlying()
        return FreeCertificate(A) if A.is_free() else PermutationCertificate(A)
    return MonomialCertificate(S)


def free_module(G: Group, ring: Ring, r: int = 1) -> RGModule:
    if r < 0:
        raise InvalidModuleError(f"free rank must be nonnegative, got {r}")
    return linearize(regular_gset(G, r), ring)


def trivial_module(G: Group, ring: Ring, rank: int = 1) -> RGModule:
    return linearize(trivial_gset(G, rank), ring)


def zero_module(G: Group, ring: Ring) -> RGModule:
    return free_module(G, ring, 0)


def general_module(G: Group, ring: Ring, action: Sequence, rank: Optional[int] = None) -> RGModule:
    """A module from raw generator matrices, checked against every relation."""
    mats = tuple(ring.reduce(a) for a in action)
    if rank is None:
        if not mats:
            raise InvalidModuleError("rank is required for a group without generators")
        rank = mats[0].shape[0]
    return RGModule(G, ring, rank, mats, GENERAL)


def block_diag(ring: Ring, blocks: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = ring.zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = ring.reduce(b)
        r += b.shape[0]
        c += b.shape[1]
    return out


def _summand_view(M: RGModule):
    """(ambient, embedding, projection) for permutation-type certificates, else None."""
    cert = M.certificate
    if cert.kind in ("permutation", "free"):
        eye = M.ring.eye(M.rank)
        return M, eye, eye
    if cert.kind == "summand":
        return cert.ambient, cert.embedding, cert.projection
    return None


def signed_view(M: RGModule) -> Optional[SignedGSet]:
    cert = M.certificate
    if cert.kind in ("permutation", "free") and cert.basis is None:
        return SignedGSet.from_gset(cert.gset)
    if cert.kind == "monomial":
        return cert.signed
    return None


def _wrap_summand(ambient: RGModule, iota, pi) -> Certificate:
    R = ambient.ring
    return SummandCertificate(ambient=ambient, idempotent=R.matmul(iota, pi), embedding=iota, projection=pi)


def direct_sum(*modules: RGModule) -> RGModule:
    """Block-diagonal sum; certificates merge to the strongest common kind."""
    if not modules:
        raise InvalidModuleError("direct_sum needs at least one module")
    G, R = modules[0].group, modules[0].ring
    for M in modules:
        if M.ring != R:
            raise RingMismatchError(f"cannot sum modules over {R} and {M.ring}")
        if M.group != G:
            raise InvalidModuleError("cannot sum modules over different groups")
    modules = [M for M in modules if M.rank] or [modules[0]]
    if len(modules) == 1:
        return modules[0]
    rank = sum(M.rank for M in modules)
    action = tuple(block_diag(R, [M.action[s] for M in modules]) for s in range(len(G.generators)))
    kinds = {M.kind for M in modules}

    cert: Certificate = GENERAL
    if kinds <= {"permutation", "free"}:
        gset = modules[0].certificate.gset
        for M in modules[1:]:
            gset = gset.disjoint_union(M.certificate.gset)
        bases = [_basis(M.certificate) for M in modules]
        basis = None
        if any(b is not None for b in bases):
            basis = block_diag(R, [b if b is not None else R.eye(M.rank) for b, M in zip(bases, modules)])
        cert = FreeCertificate(gset, basis) if kinds == {"free"} else PermutationCertificate(gset, basis)
    elif all(signed_view(M) is not None for M in modules):
        signed = signed_view(modules[0])
        for M in modules[1:]:
            signed = signed.disjoint_union(signed_view(M))
        cert = strongest_certificate(signed, R)
    elif all(_summand_view(M) is not None for M in modules):
        views = [_summand_view(M) for M in modules]
        ambient = direct_sum(*[v[0] for v in views])
        iota = block_diag(R, [v[1] for v in views])
        pi = block_diag(R, [v[2] for v in views])
        cert = _wrap_summand(ambient, iota, pi)
    return RGModule(G, R, rank, action, cert)


def direct_sum_maps(maps: Sequence[ModuleMap]) -> ModuleMap:
    R = maps[0].ring
    return ModuleMap(direct_sum(*[f.source for f in maps]), direct_sum(*[f.target for f in maps]),
                     block_diag(R, [f.matrix for f in maps]), check=False)


def change_basis(M: RGModule, B: np.ndarray, certificate: Certificate = GENERAL) -> Tuple[RGModule, ModuleMap]:
    """Module with action B^-1·ρ(g)·B, and the isomorphism (matrix B) back to M."""
    R = M.ring
    B = R.reduce(B)
    B_inv = inverse(B, R)
    action = tuple(R.chain(B_inv, a, B) for a in M.action)
    N = RGModule(M.group, R, M.rank, action, certificate)
    return N, ModuleMap(N, M, B, check=False)


def submodule(M: RGModule, basis: np.ndarray) -> Tuple[RGModule, ModuleMap]:
    """Submodule spanned by the columns of ``basis`` and its inclusion.

    Raises InvalidModuleError when the span is not invariant.
    """
    R = M.ring
    K = R.reduce(basis)
    if K.shape[1] == 0:
        Z = zero_module(M.group, R)
        return Z, ModuleMap(Z, M, R.zeros(M.rank, 0), check=False)
    action = []
    for s, a in enumerate(M.action):
        x = solve(K, R.matmul(a, K), R)
        if x is None:
            raise InvalidModuleError(f"span is not invariant under generator {s}")
        action.append(x)
    N = RGModule(M.group, R, K.shape[1], tuple(action), GENERAL)
    return N, ModuleMap(N, M, K, check=False)


# =====================================================
# TENSOR PRODUCTS
# =====================================================

def _untwist_basis(F: RGModule, N: RGModule, free_left: bool) -> FreeCertificate:
    """Frobenius basis of F⊗N (or N⊗F) for F free: vectors f_x ⊗ ρ_N(g_x)e_j."""
    R = F.ring
    cert = F.certificate
    A = cert.gset
    B_F = R.eye(F.rank) if cert.basis is None else cert.basis
    n = N.rank
    g_of = [0] * A.size
    for orbit in A.orbits():
        rep = orbit[0]
        for g in range(F.group.order):
            g_of[int(A.table[g, rep])] = g
    cols = []
    if free_left:
        for x in range(A.size):
            cols.append(R.kron(B_F[:, [x]], N.element_matrix(g_of[x])))
        gset = A.product(trivial_gset(F.group, n))
    else:
        for j in range(n):
            for x in range(A.size):
                cols.append(R.kron(N.element_matrix(g_of[x])[:, [j]], B_F[:, [x]]))
        gset = trivial_gset(F.group, n).product(A)
    basis = np.hstack(cols) if cols else R.zeros(F.rank * n, 0)
    return FreeCertificate(gset, R.reduce(basis))


def tensor(M: RGModule, N: RGModule) -> RGModule:
    """M⊗N with the diagonal action, basis e_i⊗f_j at index i·rank(N) + j."""
    if M.ring != N.ring:
        raise RingMismatchError(f"cannot tensor modules over {M.ring} and {N.ring}")
    if M.group != N.group:
        raise InvalidModuleError("cannot tensor modules over different groups")
    R = M.ring
    action = tuple(R.kron(a, b) for a, b in zip(M.action, N.action))
    rank = M.rank * N.rank
    cert: Certificate = GENERAL
    perm_kinds = ("permutation", "free")
    if rank == 0:
        cert = FreeCertificate(GSet(M.group, 0, tuple(() for _ in M.group.generators)))
    elif M.kind in perm_kinds and N.kind in perm_kinds:
        gset = M.certificate.gset.product(N.certificate.gset)
        bm, bn = _basis(M.certificate), _basis(N.certificate)
        basis = None
        if bm is not None or bn is not None:
            basis = R.kron(R.eye(M.rank) if bm is None else bm, R.eye(N.rank) if bn is None else bn)
        cert = FreeCertificate(gset, basis) if gset.is_free() else PermutationCertificate(gset, basis)
    elif M.kind == "free":
        cert = _untwist_basis(M, N, free_left=True)
    elif N.kind == "free":
        cert = _untwist_basis(N, M, free_left=False)
    elif signed_view(M) is not None and signed_view(N) is not None:
        cert = strongest_certificate(signed_view(M).product(signed_view(N)), R)
    elif _summand_view(M) is not None and _summand_view(N) is not None:
        (am, im, pm), (an, in_, pn) = _summand_view(M), _summand_view(N)
        cert = _wrap_summand(tensor(am, an), R.kron(im, in_), R.kron(pm, pn))
    return RGModule(M.group, R, rank, action, cert)


def swap_matrix(ring: Ring, m: int, n: int) -> np.ndarray:
    """e_i⊗f_j ↦ f_j⊗e_i for factors of ranks m and n."""
    P = ring.zeros(m * n, m * n)
    if m * n:
        i, j = np.divmod(np.arange(m * n), n)
        P[j * m + i, i * n + j] = 1
    return P


def swap_map(M: RGModule, N: RGModule) -> ModuleMap:
    """The factor swap M⊗N -> N⊗M."""
    return ModuleMap(tensor(M, N), tensor(N, M), swap_matrix(M.ring, M.rank, N.rank))


# =====================================================
# RESTRICTION, INDUCTION, INFLATION
# =====================================================

def _sub_positions(H: Subgroup) -> dict:
    return {parent: i for i, parent in enumerate(H.embedding)}


def restrict(M: RGModule, H: Subgroup) -> RGModule:
    """Res to H, as a module over ``H.as_group``."""
    check_subgroup(M.group, H)
    K = H.as_group
    R = M.ring
    action = tuple(M.element_matrix(g) for g in H.generators)
    cert = _restrict_certificate(M.certificate, H, K)
    return RGModule(K, R, M.rank, action, cert)


def _restrict_certificate(cert: Certificate, H: Subgroup, K: Group) -> Certificate:
    if cert.kind in ("permutation", "free"):
        A = cert.gset
        gset = GSet(K, A.size, tuple(tuple(int(x) for x in A.table[g]) for g in H.generators))
        cls = FreeCertificate if cert.kind == "free" else PermutationCertificate
        return cls(gset, cert.basis)
    if cert.kind == "monomial":
        perm_table, sign_table = cert.signed.tables
        return MonomialCertificate(SignedGSet(
            K, cert.signed.size,
            tuple(tuple(int(x) for x in perm_table[g]) for g in H.generators),
            tuple(tuple(int(x) for x in sign_table[g]) for g in H.generators)))
    if cert.kind == "summand":
        return SummandCertificate(restrict(cert.ambient, H), cert.idempotent, cert.embedding, cert.projection)
    return GENERAL


def induce(N: RGModule, G: Group, H: Subgroup) -> RGModule:
    """Ind from H to G; block (k, j) of ρ(g) is ρ_N(h) where g·r_j = r_k·h."""
    check_subgroup(G, H)
    if N.group != H.as_group:
        raise InvalidModuleError("module to induce must live over the subgroup's own group")
    R = N.ring
    transversal, _ = coset_action(G, H)
    n, r = transversal.size, N.rank
    pos = _sub_positions(H)
    action = []
    for g in G.generator_indices:
        mat = R.zeros(n * r, n * r)
        for j in range(n):
            k, h = transversal.decompose(g, j)
            mat[k * r:(k + 1) * r, j * r:(j + 1) * r] = N.element_matrix(pos[h])
        action.append(mat)
    cert = _induce_certificate(N, G, H, transversal, pos)
    return RGModule(G, R, n * r, tuple(action), cert)


def _induce_certificate(N: RGModule, G: Group, H: Subgroup, transversal, pos) -> Certificate:
    cert = N.certificate
    n = transversal.size
    R = N.ring
    if cert.kind in ("permutation", "free", "monomial"):
        if cert.kind == "monomial":
            perm_table, sign_table = cert.signed.tables
        else:
            perm_table = cert.gset.table
            sign_table = np.ones_like(perm_table)
        size = N.rank
        perms, signs = [], []
        for g in G.generator_indices:
            p = [0] * (n * size)
            sg = [1] * (n * size)
            for j in range(n):
                k, h = transversal.decompose(g, j)
                for a in range(size):
                    p[j * size + a] = k * size + int(perm_table[pos[h], a])
                    sg[j * size + a] = int(sign_table[pos[h], a])
            perms.append(tuple(p))
            signs.append(tuple(sg))
        basis = _basis(cert)
        if cert.kind == "monomial":
            return strongest_certificate(SignedGSet(G, n * size, tuple(perms), tuple(signs)), R)
        gset = GSet(G, n * size, tuple(perms))
        big = None if basis is None else R.kron(R.eye(n), basis)
        return FreeCertificate(gset, big) if cert.kind == "free" else PermutationCertificate(gset, big)
    if cert.kind == "summand":
        ambient = induce(cert.ambient, G, H)
        return _wrap_summand(ambient, R.kron(R.eye(n), cert.embedding), R.kron(R.eye(n), cert.projection))
    return GENERAL


def inflate(M: RGModule, G: Group, images: Sequence[int]) -> RGModule:
    """Infl along G -> Q, given the Q-position of the image of each generator of G."""
    Q = M.group
    images = [int(x) for x in images]
    if len(images) != len(G.generators) or any(not 0 <= x < Q.order for x in images):
        raise HypothesisError("quotient map needs one image in Q per generator of G")
    phi = G.evaluate_all(images, lambda a, b: int(Q.mult[a, b]), 0)
    for s, gi in enumerate(G.generator_indices):
        for i in range(G.order):
            if phi[int(G.mult[gi, i])] != int(Q.mult[images[s], phi[i]]):
                raise HypothesisError("generator images do not define a homomorphism")
    action = tuple(M.element_matrix(x) for x in images)
    cert: Certificate = GENERAL
    signed = signed_view(M)
    if signed is not None:
        perm_table, sign_table = signed.tables
        S = SignedGSet(G, M.rank,
                       tuple(tuple(int(v) for v in perm_table[x]) for x in images),
                       tuple(tuple(int(v) for v in sign_table[x]) for x in images))
        cert = strongest_certificate(S, M.ring)
    return RGModule(G, M.ring, M.rank, action, cert)


def sign_module(G: Group, H: Subgroup, ring: Ring) -> RGModule:
    """L = Infl of the sign representation along G -> G/H for an index-2 subgroup H."""
    from catalog import catalog_group

    check_subgroup(G, H)
    if H.index != 2:
        raise HypothesisError(f"sign module needs an index-2 subgroup, got index {H.index}")
    C2 = catalog_group("C2")
    sgn = module_from_signed(SignedGSet(C2, 1, ((0,),), ((-1,),)), ring)
    images = [0 if g in H else 1 for g in G.generator_indices]
    return inflate(sgn, G, images)


# =====================================================
# FIXED POINTS, HOM SPACES, OMEGA
# =====================================================

def fixed_points(M: RGModule, H: Optional[Subgroup] = None) -> Tuple[int, np.ndarray]:
    """Basis (columns) of {v : ρ(h)v = v for h in H}; H defaults to the whole group."""
    R = M.ring
    gens = M.group.generator_indices if H is None else H.generators
    if not gens or M.rank == 0:
        return M.rank, R.eye(M.rank)
    stacked = np.vstack([R.sub(M.element_matrix(g), R.eye(M.rank)) for g in gens])
    basis = kernel(stacked, R)
    return basis.shape[1], basis


def hom_space(M: RGModule, N: RGModule) -> List[np.ndarray]:
    """Basis of the equivariant maps M -> N, as rank(N) x rank(M) matrices.

    Each generator contributes A⊗I - I⊗Bᵀ on the row-major vectorization.
    """
    if M.ring != N.ring:
        raise RingMismatchError(f"hom between modules over {M.ring} and {N.ring}")
    R = M.ring
    m, n = M.rank, N.rank
    if m == 0 or n == 0:
        return []
    rows = [R.sub(R.kron(b, R.eye(m)), R.kron(R.eye(n), a.T)) for a, b in zip(M.action, N.action)]
    if not rows:
        basis = R.eye(m * n)
    else:
        basis = kernel(np.vstack(rows), R)
    return [R.reduce(basis[:, k].reshape(n, m)) for k in range(basis.shape[1])]


def omega(M: RGModule) -> Tuple[RGModule, ModuleMap, ModuleMap]:
    """Ω(M) = Ker(kG⊗M -> M) with the diagonal action and cover ε⊗id.

    Returns:
        (Ω(M), inclusion into kG⊗M, cover kG⊗M -> M)
    """
    R = M.ring
    if not R.is_field:
        raise RingMismatchError("omega needs field coefficients")
    G = M.group
    P = tensor(free_module(G, R, 1), M)
    cover = ModuleMap(P, M, np.hstack([R.eye(M.rank)] * G.order))
    K = kernel(cover.matrix, R)
    Om, inc = submodule(P, K)
    LOGGER.debug("omega: rank %d -> %d", M.rank, Om.rank)
    return Om, inc, cover


# =====================================================
# ADJUNCTION MAPS
# =====================================================

@dataclass(frozen=True)
class InductionUnit:
    inclusion: ModuleMap
    projection: ModuleMap
    composite_is_identity: bool


def induction_unit(N: RGModule, G: Group, H: Subgroup) -> InductionUnit:
    """N -> Res Ind N -> N through the identity-coset block; the composite is the identity."""
    R = N.ring
    RI = restrict(induce(N, G, H), H)
    r = N.rank
    inc = R.zeros(RI.rank, r)
    inc[:r, :] = R.eye(r)
    proj = R.zeros(r, RI.rank)
    proj[:, :r] = R.eye(r)
    i_map = ModuleMap(N, RI, inc)
    p_map = ModuleMap(RI, N, proj)
    return InductionUnit(i_map, p_map, R.equal(R.matmul(proj, inc), R.eye(r)))


@dataclass(frozen=True)
class NormComposite:
    unit: ModuleMap
    counit: ModuleMap
    composite: np.ndarray


def induction_norm_composite(M: RGModule, G: Group, H: Subgroup) -> NormComposite:
    """M -> Ind Res M -> M, m ↦ Σ r_j⊗r_j⁻¹m ↦ Σ r_j r_j⁻¹ m = [G:H]·m."""
    R = M.ring
    transversal, _ = coset_action(G, H)
    IR = induce(restrict(M, H), G, H)
    unit = np.vstack([M.element_matrix(int(G.inverse[r])) for r in transversal.representatives])
    counit = np.hstack([M.element_matrix(r) for r in transversal.representatives])
    u = ModuleMap(M, IR, unit)
    c = ModuleMap(IR, M, counit)
    return NormComposite(u, c, R.matmul(c.matrix, u.matrix))


def brauer_quotient_dimension(M: RGModule, K: Subgroup) -> int:
    """dim M^K minus the span of relative traces from the maximal subgroups of K."""
    from group import maximal_subgroups_of

    R = M.ring
    if not R.is_field:
        raise RingMismatchError("Brauer quotients need field coefficients")
    dim_k, _ = fixed_points(M, K)
    if K.order == 1:
        return dim_k
    G = M.group
    images = []
    for L in maximal_subgroups_of(K):
        _, basis_l = fixed_points(M, L)
        if basis_l.shape[1] == 0:
            continue
        reps, covered = [], set()
        for t in K.members:
            if t in covered:
                continue
            reps.append(t)
            covered |= {int(G.mult[t, l]) for l in L.members}
        trace = R.zeros(M.rank, M.rank)
        for t in reps:
            trace = R.add(trace, M.element_matrix(t))
        images.append(R.matmul(trace, basis_l))
    if not images:
        return dim_k
    return dim_k - matrix_rank(np.hstack(images), R)

