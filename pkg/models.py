"""JSON models for groups, modules, complexes and resolution certificates.

Matrices are row-major integer lists; field entries are canonical residues.
Every model rejects unknown fields, so a misspelled key is an input error
rather than a silently ignored one.
"""

import json
from typing import Any, Dict, List, Literal, Optional, Type, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from catalog import catalog_group
from chain_complex import ChainComplex, ChainMap, HomologyReport
from config import DEFAULT_SEED, SCHEMA_VERSION, SearchCaps
from exceptions import (
    CertificateError,
    InvalidModuleError,
    InvalidPermutationError,
    RingMismatchError,
    ShapeMismatchError,
    SpecFormatError,
)
from gmodule import (
    GENERAL,
    FreeCertificate,
    MonomialCertificate,
    PermutationCertificate,
    RGModule,
    SignedGSet,
    SummandCertificate,
)
from group import Group, GSet, enumerate_group
from resolve import KINDS, ResolutionCertificate
from ring import Ring

Matrix = List[List[int]]
ModelT = TypeVar("ModelT", bound=BaseModel)


class PermResModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# =====================================================
# GROUPS AND RINGS
# =====================================================

class GroupSpec(PermResModel):
    """A permutation group on {0..degree-1} given by generator images."""

    name: Optional[str] = None
    degree: int = Field(ge=1)
    generators: List[List[int]]


class RingSpec(PermResModel):
    kind: Literal["gf", "int"]
    p: Optional[int] = None


GroupRef = Union[str, GroupSpec]


def decode_group(ref: GroupRef) -> Group:
    """Catalog name or explicit generators."""
    if isinstance(ref, str):
        return catalog_group(ref)
    return enumerate_group(ref.degree, ref.generators, name=ref.name or "")


def encode_group(G: Group) -> GroupSpec:
    return GroupSpec(
        name=G.name or None,
        degree=G.degree,
        generators=[[int(x) for x in g] for g in G.generators],
    )


def decode_ring(ref: Union[str, RingSpec]) -> Ring:
    if isinstance(ref, str):
        return Ring.parse(ref)
    return Ring.from_json(ref.model_dump())


def encode_ring(R: Ring) -> RingSpec:
    return RingSpec(**R.to_json())


# =====================================================
# MODULES
# =====================================================

class GSetSpec(PermResModel):
    size: int = Field(ge=0)
    action: List[List[int]]


class SignedGSetSpec(PermResModel):
    size: int = Field(ge=0)
    perms: List[List[int]]
    signs: List[List[int]]


class CertificateSpec(PermResModel):
    """Structural witness of a module; which fields are needed depends on ``kind``."""

    kind: Literal["general", "permutation", "free", "monomial", "summand"]
    gset: Optional[GSetSpec] = None
    basis: Optional[Matrix] = None
    signed: Optional[SignedGSetSpec] = None
    ambient: Optional["ModuleSpec"] = None
    idempotent: Optional[Matrix] = None
    embedding: Optional[Matrix] = None
    projection: Optional[Matrix] = None


class ModuleSpec(PermResModel):
    ring: Optional[RingSpec] = None
    rank: int = Field(ge=0)
    action: List[Matrix]
    certificate: Optional[CertificateSpec] = None
    label: str = ""


CertificateSpec.model_rebuild()


def _matrix(R: Ring, rows: Optional[Matrix], shape, what: str):
    if rows is None:
        raise SpecFormatError(f"{what} is missing")
    try:
        return R.matrix(rows, shape=shape)
    except ShapeMismatchError:
        raise
    except (TypeError, ValueError) as e:
        raise ShapeMismatchError(f"{what} is not a rectangular integer matrix: {e}")


def _module_ring(spec: ModuleSpec, ring: Optional[Ring]) -> Ring:
    if spec.ring is None:
        if ring is None:
            raise SpecFormatError("module JSON names no ring and none was given")
        return ring
    R = decode_ring(spec.ring)
    if ring is not None and ring != R:
        raise RingMismatchError(f"module is over {R} but {ring} was requested")
    return R


def _decode_module_certificate(spec: CertificateSpec, M: RGModule):
    G, R, n = M.group, M.ring, M.rank
    if spec.kind == "general":
        return GENERAL
    if spec.kind in ("permutation", "free"):
        if spec.gset is None:
            raise SpecFormatError(f"{spec.kind} certificate needs a gset")
        A = GSet(G, spec.gset.size, tuple(tuple(a) for a in spec.gset.action))
        basis = None if spec.basis is None else _matrix(R, spec.basis, (n, n), "certificate basis")
        cls = FreeCertificate if spec.kind == "free" else PermutationCertificate
        return cls(A, basis)
    if spec.kind == "monomial":
        if spec.signed is None:
            raise SpecFormatError("monomial certificate needs a signed gset")
        S = spec.signed
        return MonomialCertificate(SignedGSet(G, S.size, tuple(tuple(p) for p in S.perms),
                                              tuple(tuple(s) for s in S.signs)))
    if spec.ambient is None:
        raise SpecFormatError("summand certificate needs an ambient module")
    amb = decode_module(spec.ambient, G, R)
    return SummandCertificate(
        amb,
        _matrix(R, spec.idempotent, (amb.rank, amb.rank), "summand idempotent"),
        _matrix(R, spec.embedding, (amb.rank, n), "summand embedding"),
        _matrix(R, spec.projection, (n, amb.rank), "summand projection"),
    )


def _bare_module(spec: ModuleSpec, G: Group, R: Ring) -> RGModule:
    n = spec.rank
    action = tuple(_matrix(R, a, (n, n), f"action matrix {s}") for s, a in enumerate(spec.action))
    return RGModule(G, R, n, action, GENERAL, spec.label)


def decode_module(spec: ModuleSpec, G: Group, ring: Optional[Ring] = None) -> RGModule:
    """Builds the module and checks its certificate.

    Args:
        spec: module JSON
        G: the acting group
        ring: coefficient ring when the JSON names none (must agree when it does)

    Raises:
        InvalidModuleError: the matrices are not a representation or the certificate is wrong
    """
    R = _module_ring(spec, ring)
    M = _bare_module(spec, G, R)
    if spec.certificate is None or spec.certificate.kind == "general":
        return M
    return M.with_certificate(_decode_module_certificate(spec.certificate, M))


def _encode_module_certificate(M: RGModule) -> Optional[CertificateSpec]:
    cert, R = M.certificate, M.ring
    if cert.kind in ("permutation", "free"):
        A = cert.gset
        return CertificateSpec(
            kind=cert.kind,
            gset=GSetSpec(size=A.size, action=[[int(x) for x in a] for a in A.action]),
            basis=None if cert.basis is None else R.to_list(cert.basis),
        )
    if cert.kind == "monomial":
        S = cert.signed
        return CertificateSpec(kind="monomial", signed=SignedGSetSpec(
            size=S.size,
            perms=[[int(x) for x in p] for p in S.perms],
            signs=[[int(x) for x in s] for s in S.signs],
        ))
    if cert.kind == "summand":
        return CertificateSpec(
            kind="summand",
            ambient=encode_module(cert.ambient, with_ring=False),
            idempotent=R.to_list(cert.idempotent),
            embedding=R.to_list(cert.embedding),
            projection=R.to_list(cert.projection),
        )
    return None


def encode_module(M: RGModule, with_ring: bool = True) -> ModuleSpec:
    return ModuleSpec(
        ring=encode_ring(M.ring) if with_ring else None,
        rank=M.rank,
        action=[M.ring.to_list(a) for a in M.action],
        certificate=_encode_module_certificate(M),
        label=M.label,
    )


# =====================================================
# COMPLEXES AND CHAIN MAPS
# =====================================================

class ComplexSpec(PermResModel):
    """Terms in degrees lo, lo+1, ...; ``differentials[k]`` is d_{lo+k+1}."""

    lo: int
    terms: List[ModuleSpec]
    differentials: List[Matrix]


class ChainMapSpec(PermResModel):
    components: Dict[str, Matrix]


class HomologyDegreeSpec(PermResModel):
    rank: int
    torsion: List[int] = []


def encode_complex(C: ChainComplex) -> ComplexSpec:
    R = C.ring
    return ComplexSpec(
        lo=C.lo,
        terms=[encode_module(T, with_ring=False) for T in C.terms],
        differentials=[R.to_list(d) for d in C.differentials],
    )


def decode_complex(spec: ComplexSpec, G: Group, R: Ring, check: bool = True) -> ChainComplex:
    terms = tuple(decode_module(t, G, R) for t in spec.terms)
    return _assemble_complex(spec, terms, R, check)


def _assemble_complex(spec: ComplexSpec, terms, R: Ring, check: bool) -> ChainComplex:
    if len(spec.differentials) != max(len(terms) - 1, 0):
        raise ShapeMismatchError(f"{len(terms)} terms need {len(terms) - 1} differentials, "
                                 f"got {len(spec.differentials)}")
    diffs = tuple(
        _matrix(R, d, (terms[k].rank, terms[k + 1].rank), f"d_{spec.lo + k + 1}")
        for k, d in enumerate(spec.differentials)
    )
    return ChainComplex(spec.lo, terms, diffs, check=check)


def encode_chain_map(f: ChainMap) -> ChainMapSpec:
    R = f.ring
    return ChainMapSpec(components={str(s): R.to_list(f.f(s)) for s in f.degrees})


def decode_chain_map(spec: ChainMapSpec, source: ChainComplex, target: ChainComplex,
                     check: bool = True) -> ChainMap:
    R = source.ring
    comps = {}
    for key, rows in spec.components.items():
        try:
            s = int(key)
        except ValueError:
            raise SpecFormatError(f"chain map degree {key!r} is not an integer")
        comps[s] = _matrix(R, rows, (target.rank_at(s), source.rank_at(s)), f"component {s}")
    return ChainMap(source, target, comps, check=check)


# =====================================================
# CERTIFICATES
# =====================================================

class CertificateDocument(PermResModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: str = Field(SCHEMA_VERSION, alias="schema")
    group: GroupSpec
    ring: RingSpec
    kind: str
    m_free_index: int
    m_projective_index: int
    resolution: ComplexSpec
    target: ComplexSpec
    augmentation: ChainMapSpec
    homology_witness: Dict[str, HomologyDegreeSpec]

    @field_validator("schema_version")
    @classmethod
    def _known_schema(cls, v: str) -> str:
        if v != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema {v!r}, expected {SCHEMA_VERSION!r}")
        return v


def encode_certificate(cert: ResolutionCertificate) -> CertificateDocument:
    P = cert.resolution
    return CertificateDocument(
        group=encode_group(P.group),
        ring=encode_ring(P.ring),
        kind=cert.kind,
        m_free_index=cert.m_free_index,
        m_projective_index=cert.m_projective_index,
        resolution=encode_complex(P),
        target=encode_complex(cert.target),
        augmentation=encode_chain_map(cert.augmentation),
        homology_witness={
            s: HomologyDegreeSpec(**v) for s, v in cert.homology_witness.to_dict().items()
        },
    )


_STRUCTURE_ERRORS = (InvalidModuleError, InvalidPermutationError, ShapeMismatchError)


def _certificate_complex(spec: ComplexSpec, G: Group, R: Ring, name: str) -> ChainComplex:
    terms = []
    for k, t in enumerate(spec.terms):
        s = spec.lo + k
        if t.ring is not None and decode_ring(t.ring) != R:
            raise CertificateError(f"{name} term {s} is over another ring", clause="shape", degree=s)
        try:
            M = _bare_module(t, G, R)
        except _STRUCTURE_ERRORS as e:
            raise CertificateError(f"{name} term {s}: {e}", clause="shape", degree=s)
        if t.certificate is not None and t.certificate.kind != "general":
            try:
                M = M.with_certificate(_decode_module_certificate(t.certificate, M))
            except _STRUCTURE_ERRORS + (SpecFormatError,) as e:
                raise CertificateError(f"{name} term {s}: {e}", clause="term_certificate", degree=s)
        terms.append(M)
    if not terms:
        raise CertificateError(f"{name} has no terms", clause="shape")
    try:
        return _assemble_complex(spec, tuple(terms), R, check=False)
    except _STRUCTURE_ERRORS as e:
        raise CertificateError(f"{name}: {e}", clause="shape", degree=getattr(e, "degree", None))


def decode_certificate(doc: CertificateDocument) -> ResolutionCertificate:
    """Rebuilds a certificate without trusting it; run verify_certificate on the result.

    Malformed modules and invalid term certificates surface as CertificateError
    naming the clause they break.
    """
    if doc.kind not in KINDS:
        raise CertificateError(f"unknown resolution kind {doc.kind!r}", clause="kind")
    G, R = decode_group(doc.group), decode_ring(doc.ring)
    P = _certificate_complex(doc.resolution, G, R, "resolution")
    T = _certificate_complex(doc.target, G, R, "target")
    try:
        f = decode_chain_map(doc.augmentation, P, T, check=False)
    except _STRUCTURE_ERRORS as e:
        raise CertificateError(f"augmentation: {e}", clause="shape", degree=getattr(e, "degree", None))
    witness = HomologyReport(R, {int(s): (h.rank, tuple(h.torsion)) for s, h in doc.homology_witness.items()})
    return ResolutionCertificate(
        resolution=P,
        target=T,
        augmentation=f,
        kind=doc.kind,
        m_free_index=doc.m_free_index,
        m_projective_index=doc.m_projective_index,
        homology_witness=witness,
    )


# =====================================================
# REQUESTS
# =====================================================

class GroupRingRequest(PermResModel):
    group: GroupRef
    ring: str = "gf2"


class MFreeRequest(GroupRingRequest):
    m: int = Field(2, ge=1)


class ModuleRequest(PermResModel):
    group: GroupRef
    module: ModuleSpec
    ring: Optional[str] = None
    caps: SearchCaps = SearchCaps()
    seed: int = Field(DEFAULT_SEED, ge=0)


class OmegaPairRequest(ModuleRequest):
    free_start: bool = False


class QnRequest(ModuleRequest):
    n: int = Field(1, ge=0)
    m: Optional[int] = None


class VerifyRequest(PermResModel):
    certificate: CertificateDocument


class G0Request(GroupRingRequest):
    seed: int = Field(DEFAULT_SEED, ge=0)
    cartan: bool = True


# =====================================================
# PARSING AND OUTPUT
# =====================================================

def parse_model(cls: Type[ModelT], data: Any) -> ModelT:
    """Validates ``data`` (a dict or a JSON string), mapping failures to SpecFormatError."""
    try:
        if isinstance(data, (str, bytes)):
            return cls.model_validate_json(data)
        return cls.model_validate(data)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(str(x) for x in err['loc'])}: {err['msg']}" for err in e.errors())
        raise SpecFormatError(f"invalid {cls.__name__}: {problems}")


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, BaseModel):
        return obj.model_dump(by_alias=True, exclude_none=True)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def dumps(obj: Any) -> str:
    """Deterministic JSON: sorted keys, models dumped by alias."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, default=to_jsonable)


def plain(obj: Any) -> Any:
    """``obj`` as plain JSON types (numpy scalars and models converted)."""
    return json.loads(json.dumps(obj, default=to_jsonable))
