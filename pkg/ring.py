"""Exact scalar and matrix arithmetic over GF(p) and the integers.

Matrices are numpy arrays. Over GF(p) they hold int64 residues in [0, p);
over the integers they are ``dtype=object`` arrays of Python ints, so nothing
overflows however far Smith reduction pushes the entries.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from sympy import isprime

from exceptions import (
    RingMismatchError,
    ShapeMismatchError,
    SpecFormatError,
    UnsupportedRingError,
)

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ring:
    """Coefficient ring: a prime field GF(p) or the integers."""

    kind: str
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind == "gf":
            if self.p is None or not isprime(int(self.p)):
                raise SpecFormatError(f"GF(p) needs a prime p, got {self.p!r}")
            object.__setattr__(self, "p", int(self.p))
        elif self.kind == "int":
            if self.p is not None:
                raise SpecFormatError("the integer ring takes no characteristic")
        else:
            raise SpecFormatError(f"Unknown ring kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "Ring":
        """Parses ``gf<p>`` or ``int``."""
        token = str(text).strip().lower()
        if token in ("int", "z", "zz", "integers"):
            return INTEGERS
        if token.startswith("gf"):
            try:
                return cls("gf", int(token[2:]))
            except ValueError:
                raise SpecFormatError(f"Bad ring {text!r}, expected gf<p> or int")
        raise SpecFormatError(f"Bad ring {text!r}, expected gf<p> or int")

    @classmethod
    def from_json(cls, data: dict) -> "Ring":
        if data.get("kind") == "int":
            return INTEGERS
        return cls("gf", data.get("p"))

    def to_json(self) -> dict:
        if self.is_field:
            return {"kind": "gf", "p": self.p}
        return {"kind": "int"}

    @property
    def is_field(self) -> bool:
        return self.kind == "gf"

    @property
    def characteristic(self) -> int:
        return self.p if self.is_field else 0

    @property
    def label(self) -> str:
        return f"gf{self.p}" if self.is_field else "int"

    def __str__(self) -> str:
        return f"GF({self.p})" if self.is_field else "Z"

    # -------------------------------------------------
    # Canonical forms
    # -------------------------------------------------

    def reduce(self, a) -> np.ndarray:
        """Returns a fresh canonical copy of ``a``."""
        if self.is_field:
            return np.mod(np.array(a, dtype=np.int64), self.p)
        if isinstance(a, np.ndarray) and a.dtype.kind in "iu":
            return a.astype(object)
        arr = np.array(a, dtype=object)
        if arr.size:
            arr = _to_python_ints(arr)
        return arr

    def matrix(self, rows, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
        """Builds a 2-D matrix; ``shape`` is needed for empty inputs."""
        if shape is not None and (shape[0] == 0 or shape[1] == 0):
            return self.zeros(*shape)
        arr = self.reduce(rows)
        if arr.ndim != 2:
            raise ShapeMismatchError(f"Expected a 2-D matrix, got shape {arr.shape}")
        if shape is not None and arr.shape != tuple(shape):
            raise ShapeMismatchError(f"Expected shape {tuple(shape)}, got {arr.shape}")
        return arr

    def scalar(self, x) -> int:
        return int(x) % self.p if self.is_field else int(x)

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        if self.is_field:
            return np.zeros((rows, cols), dtype=np.int64)
        return np.zeros((rows, cols), dtype=object)

    def eye(self, n: int) -> np.ndarray:
        if self.is_field:
            return np.eye(n, dtype=np.int64)
        return np.eye(n, dtype=np.int64).astype(object)

    def diag(self, entries) -> np.ndarray:
        out = self.zeros(len(entries), len(entries))
        for i, x in enumerate(entries):
            out[i, i] = self.scalar(x)
        return out

    # -------------------------------------------------
    # Arithmetic
    # -------------------------------------------------

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise ShapeMismatchError(f"Cannot multiply {a.shape} by {b.shape}")
        if a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        if self.is_field:
            return np.mod(np.mod(a, self.p) @ np.mod(b, self.p), self.p)
        a, b = self.reduce(a), self.reduce(b)
        if _fits_int64(a, b):
            return (a.astype(np.int64) @ b.astype(np.int64)).astype(object)
        return np.dot(a, b)

    def chain(self, *mats: np.ndarray) -> np.ndarray:
        """Product of several matrices, left to right."""
        out = mats[0]
        for m in mats[1:]:
            out = self.matmul(out, m)
        return out

    def add(self, a, b) -> np.ndarray:
        return self.reduce(self.reduce(a) + self.reduce(b))

    def sub(self, a, b) -> np.ndarray:
        return self.reduce(self.reduce(a) - self.reduce(b))

    def neg(self, a) -> np.ndarray:
        return self.reduce(-self.reduce(a))

    def scale(self, c, a) -> np.ndarray:
        return self.reduce(self.scalar(c) * self.reduce(a))

    def kron(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
        if rows == 0 or cols == 0:
            return self.zeros(rows, cols)
        return self.reduce(np.kron(self.reduce(a), self.reduce(b)))

    def is_zero(self, a) -> bool:
        return not np.any(self.reduce(a))

    def equal(self, a, b) -> bool:
        a, b = self.reduce(a), self.reduce(b)
        return a.shape == b.shape and bool(np.all(a == b))

    def to_list(self, a) -> list:
        return [[int(x) for x in row] for row in self.reduce(a)]


INTEGERS = Ring("int")


def gf(p: int) -> Ring:
    return Ring("gf", p)


def _to_python_ints(arr: np.ndarray) -> np.ndarray:
    out = np.empty(arr.size, dtype=object)
    out[:] = list(map(int, arr.reshape(-1)))
    return out.reshape(arr.shape)


# products below this bound are exact in int64
_INT64_PRODUCT_BOUND = 2 ** 62


def _fits_int64(a: np.ndarray, b: np.ndarray) -> bool:
    return int(np.abs(a).max()) * int(np.abs(b).max()) * a.shape[1] < _INT64_PRODUCT_BOUND


def _require_field(ring: Ring, op: str) -> None:
    if not ring.is_field:
        raise RingMismatchError(f"{op} needs a prime field, got {ring}")


def _require_integers(ring: Ring, op: str) -> None:
    if ring.is_field:
        raise RingMismatchError(f"{op} needs the integers, got {ring}")


# =====================================================
# ROW REDUCTION OVER GF(p)
# =====================================================

@dataclass(frozen=True)
class RowReduction:
    rank: int
    pivot_cols: Tuple[int, ...]
    kernel_basis: np.ndarray
    rref: np.ndarray


def rref_field(A: np.ndarray, ring: Ring) -> RowReduction:
    """Reduced row echelon form, rank and a kernel basis (as columns)."""
    _require_field(ring, "rref_field")
    p = ring.p
    M = ring.reduce(A)
    if M.ndim != 2:
        raise ShapeMismatchError(f"rref_field expects a matrix, got shape {M.shape}")
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            M[[r, k]] = M[[k, r]]
        inv = pow(int(M[r, c]), -1, p)
        M[r] = (M[r] * inv) % p
        col = M[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            M[hit] = (M[hit] - np.outer(col[hit], M[r])) % p
        pivots.append(c)
        r += 1

    free = [c for c in range(cols) if c not in set(pivots)]
    kernel = np.zeros((cols, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        kernel[f, j] = 1
        for i, pc in enumerate(pivots):
            kernel[pc, j] = (-M[i, f]) % p
    return RowReduction(rank=len(pivots), pivot_cols=tuple(pivots), kernel_basis=kernel, rref=M)


def solve_field(A: np.ndarray, b: np.ndarray, ring: Ring) -> Optional[np.ndarray]:
    """A particular solution of A·x = b, or None when the system is inconsistent.

    ``b`` may be a vector or a matrix of right-hand sides.
    """
    _require_field(ring, "solve_field")
    vector = np.ndim(b) == 1
    B = ring.reduce(b).reshape(-1, 1) if vector else ring.reduce(b)
    A = ring.reduce(A)
    if A.shape[0] != B.shape[0]:
        raise ShapeMismatchError(f"solve_field: A has {A.shape[0]} rows, b has {B.shape[0]}")
    cols = A.shape[1]
    red = rref_field(np.hstack([A, B]), ring)
    if any(pc >= cols for pc in red.pivot_cols):
        return None
    x = np.zeros((cols, B.shape[1]), dtype=np.int64)
    for i, pc in enumerate(red.pivot_cols):
        x[pc] = red.rref[i, cols:]
    return x[:, 0] if vector else x


# =====================================================
# SMITH NORMAL FORM OVER THE INTEGERS
# =====================================================

@dataclass(frozen=True)
class SmithForm:
    D: np.ndarray
    U: Optional[np.ndarray]
    V: Optional[np.ndarray]

    @property
    def invariant_factors(self) -> Tuple[int, ...]:
        n = min(self.D.shape)
        return tuple(int(self.D[i, i]) for i in range(n) if self.D[i, i] != 0)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def _swap_rows(M: Optional[np.ndarray], a: int, b: int) -> None:
    if M is not None and a != b:
        M[[a, b]] = M[[b, a]]


def _swap_cols(M: Optional[np.ndarray], a: int, b: int) -> None:
    if M is not None and a != b:
        M[:, [a, b]] = M[:, [b, a]]


def _smallest(D: np.ndarray, t: int):
    """Position of the smallest nonzero |entry| in D[t:, t:], ties by (row, col)."""
    sub = D[t:, t:]
    rows, cols = np.nonzero(sub)
    if rows.size == 0:
        return None
    k = int(np.argmin(np.abs(sub[rows, cols])))
    return t + int(rows[k]), t + int(cols[k])


# entries below this bound cannot overflow int64 in one elimination step
_INT64_SAFE = 2 ** 31


def _small(*mats: Optional[np.ndarray]) -> bool:
    return all(M is None or M.size == 0 or int(np.abs(M).max()) < _INT64_SAFE for M in mats)


def _smith(A, with_transforms: bool) -> SmithForm:
    D = INTEGERS.reduce(A)
    if D.ndim != 2:
        raise ShapeMismatchError(f"smith_normal_form expects a matrix, got shape {D.shape}")
    m, n = D.shape
    U = INTEGERS.eye(m) if with_transforms else None
    V = INTEGERS.eye(n) if with_transforms else None
    fast = _small(D)
    if fast:
        D, U, V = (None if M is None else M.astype(np.int64) for M in (D, U, V))

    for t in range(min(m, n)):
        pos = _smallest(D, t)
        if pos is None:
            break
        _swap_rows(D, t, pos[0])
        _swap_rows(U, t, pos[0])
        _swap_cols(D, t, pos[1])
        _swap_cols(V, t, pos[1])

        while True:
            if fast and not _small(D[t:, t:], U, V):
                D, U, V = (None if M is None else M.astype(object) for M in (D, U, V))
                fast = False
            piv = D[t, t]
            below = np.nonzero(D[t + 1:, t])[0] + t + 1
            if below.size:
                q = D[below, t] // piv
                D[below, t:] -= np.outer(q, D[t, t:])
                if U is not None:
                    U[below, :] -= np.outer(q, U[t, :])
            right = np.nonzero(D[t, t + 1:])[0] + t + 1
            if right.size:
                q = D[t, right] // piv
                D[t:, right] -= np.outer(D[t:, t], q)
                if V is not None:
                    V[:, right] -= np.outer(V[:, t], q)
            rest_rows = np.nonzero(D[t + 1:, t])[0] + t + 1
            rest_cols = np.nonzero(D[t, t + 1:])[0] + t + 1
            if rest_rows.size or rest_cols.size:
                cands = [(abs(D[i, t]), int(i), t) for i in rest_rows]
                cands += [(abs(D[t, j]), t, int(j)) for j in rest_cols]
                _, i, j = min(cands)
                if j == t:
                    _swap_rows(D, t, i)
                    _swap_rows(U, t, i)
                else:
                    _swap_cols(D, t, j)
                    _swap_cols(V, t, j)
                continue

            sub = D[t + 1:, t + 1:]
            if sub.size and abs(piv) != 1:
                bad = np.nonzero(sub % piv)[0]
                if bad.size:
                    i = int(bad[0]) + t + 1
                    D[t, t:] += D[i, t:]
                    if U is not None:
                        U[t, :] += U[i, :]
                    continue
            break

        if D[t, t] < 0:
            D[t, :] = -D[t, :]
            if U is not None:
                U[t, :] = -U[t, :]
    if fast:
        D, U, V = (None if M is None else M.astype(object) for M in (D, U, V))
    return SmithForm(D=D, U=U, V=V)


def smith_normal_form(A: np.ndarray, ring: Ring = INTEGERS) -> SmithForm:
    """Returns D, U, V with U·A·V = D diagonal, d1 | d2 | ..., U and V unimodular.

    Pivots are the smallest nonzero absolute value, ties broken by lowest
    (row, col).
    """
    _require_integers(ring, "smith_normal_form")
    return _smith(A, with_transforms=True)


def invariant_factors(A: np.ndarray) -> Tuple[int, ...]:
    """Nonzero Smith diagonal, without accumulating transforms."""
    return _smith(A, with_transforms=False).invariant_factors


def solve_int(A: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
    """Integer solution of A·x = b through the Smith form, or None."""
    vector = np.ndim(b) == 1
    B = INTEGERS.reduce(b).reshape(-1, 1) if vector else INTEGERS.reduce(b)
    A = INTEGERS.reduce(A)
    if A.shape[0] != B.shape[0]:
        raise ShapeMismatchError(f"solve_int: A has {A.shape[0]} rows, b has {B.shape[0]}")
    snf = smith_normal_form(A)
    c = INTEGERS.matmul(snf.U, B)
    factors = snf.invariant_factors
    y = INTEGERS.zeros(A.shape[1], B.shape[1])
    for i, d in enumerate(factors):
        if np.any(c[i] % d):
            return None
        y[i] = c[i] // d
    if np.any(c[len(factors):]):
        return None
    x = INTEGERS.matmul(snf.V, y)
    return x[:, 0] if vector else x


# =====================================================
# RING-GENERIC HELPERS
# =====================================================

def rank(A: np.ndarray, ring: Ring) -> int:
    if 0 in np.shape(A):
        return 0
    if ring.is_field:
        return rref_field(A, ring).rank
    return len(invariant_factors(A))


def kernel(A: np.ndarray, ring: Ring) -> np.ndarray:
    """Basis of {x : A·x = 0} as columns (a lattice basis over the integers)."""
    A = ring.reduce(A)
    if A.shape[0] == 0:
        return ring.eye(A.shape[1])
    if ring.is_field:
        return rref_field(A, ring).kernel_basis
    snf = smith_normal_form(A)
    return snf.V[:, snf.rank:].copy()


def solve(A: np.ndarray, b: np.ndarray, ring: Ring) -> Optional[np.ndarray]:
    if ring.is_field:
        return solve_field(A, b, ring)
    return solve_int(A, b)


def image_basis(A: np.ndarray, ring: Ring) -> np.ndarray:
    """Columns forming a basis of the column space of A (lattice basis over Z)."""
    A = ring.reduce(A)
    if 0 in A.shape:
        return ring.zeros(A.shape[0], 0)
    if ring.is_field:
        red = rref_field(A, ring)
        return A[:, list(red.pivot_cols)].copy()
    snf = smith_normal_form(A)
    u_inv = inverse(snf.U, INTEGERS)
    cols = [u_inv[:, i] * snf.D[i, i] for i in range(snf.rank)]
    if not cols:
        return INTEGERS.zeros(A.shape[0], 0)
    return INTEGERS.reduce(np.column_stack(cols))


def is_invertible(A: np.ndarray, ring: Ring) -> bool:
    A = ring.reduce(A)
    if A.shape[0] != A.shape[1]:
        return False
    if A.shape[0] == 0:
        return True
    if ring.is_field:
        return rref_field(A, ring).rank == A.shape[0]
    factors = invariant_factors(A)
    return len(factors) == A.shape[0] and all(d == 1 for d in factors)


def inverse(A: np.ndarray, ring: Ring) -> np.ndarray:
    A = ring.reduce(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ShapeMismatchError(f"inverse of a non-square {A.shape} matrix")
    if n == 0:
        return ring.zeros(0, 0)
    if ring.is_field:
        x = solve_field(A, ring.eye(n), ring)
        if x is None:
            raise UnsupportedRingError("matrix is singular over " + str(ring))
        return x
    snf = smith_normal_form(A)
    if snf.invariant_factors != (1,) * n:
        raise UnsupportedRingError("matrix is not unimodular")
    return INTEGERS.matmul(snf.V, snf.U)
