import logging
from typing import Any, Dict, List, Optional

from catalog import ALIASES, catalog_group, catalog_names, group_spec
from chain_complex import homology, validate
from exceptions import CertificateError, SpecFormatError
from grothendieck import cartan_quotient, pperm_span, simples
from koszul import koszul
from models import (
    CertificateDocument,
    G0Request,
    GroupRingRequest,
    MFreeRequest,
    ModuleRequest,
    OmegaPairRequest,
    QnRequest,
    decode_certificate,
    decode_group,
    decode_module,
    decode_ring,
    encode_certificate,
    encode_complex,
    parse_model,
    plain,
    to_jsonable,
)
from resolve import (
    ResolutionCertificate,
    VerificationReport,
    build_Qn,
    m_free_trivial,
    resolve_module_search,
    resolve_omega_pair,
    resolve_trivial,
    verify_certificate,
)

LOGGER = logging.getLogger(__name__)


def _success(data: Dict[str, Any]) -> Dict[str, Any]:
    return {"status": "success", "data": plain(data)}


def _certificate_data(cert: ResolutionCertificate) -> Dict[str, Any]:
    """Encodes the certificate and re-verifies exactly what is emitted."""
    document = encode_certificate(cert)
    report = verify_certificate(decode_certificate(document))
    report.raise_for_failure()
    return {
        "summary": cert.summary(),
        "verification": report.to_dict(),
        "certificate": to_jsonable(document),
    }


def _module_input(request: ModuleRequest):
    G = decode_group(request.group)
    ring = decode_ring(request.ring) if request.ring is not None else None
    return G, decode_module(request.module, G, ring)


# ============================================
# KOSZUL COMPLEX
# ============================================

def koszul_report(request: GroupRingRequest) -> Dict[str, Any]:
    """
    Builds Kos(G;R) and reports its validation and homology.

    Response format:
    {
      "status": "success",
      "data": {
        "group": "C2",
        "ring": "gf2",
        "ranks": [1, 2, 1],
        "validation": {"ok": true, "kinds": {...}, "m_free_index": ..., ...},
        "homology": {"0": {"rank": 0, "torsion": []}, ...},
        "complex": {...}
      }
    }
    """
    G, R = decode_group(request.group), decode_ring(request.ring)
    C = koszul(G, R)
    return _success({
        "group": G.label,
        "ring": R.label,
        "order": G.order,
        "ranks": list(C.ranks),
        "validation": validate(C).to_dict(),
        "homology": homology(C).to_dict(),
        "complex": to_jsonable(encode_complex(C)),
    })


# ============================================
# RESOLUTIONS
# ============================================

def resolve_trivial_report(request: GroupRingRequest) -> Dict[str, Any]:
    """
    Permutation resolution of the trivial module over a p-group.

    Response format:
    {
      "status": "success",
      "data": {
        "group": "C2",
        "ring": "gf2",
        "summary": {"kind": "permutation", "spliced_ranks": [1, 2, 1], ...},
        "verification": {"ok": true, "checked": [...], ...},
        "certificate": {"schema": "permres/1", ...}
      }
    }
    """
    G, R = decode_group(request.group), decode_ring(request.ring)
    cert = resolve_trivial(G, R)
    return _success({"group": G.label, "ring": R.label, **_certificate_data(cert)})


def mfree_report(request: MFreeRequest) -> Dict[str, Any]:
    """m-th tensor power of the trivial-module resolution; free in degrees below m."""
    G, R = decode_group(request.group), decode_ring(request.ring)
    cert = m_free_trivial(G, R, request.m)
    return _success({"group": G.label, "ring": R.label, "m": request.m, **_certificate_data(cert)})


def resolve_module_report(request: ModuleRequest) -> Dict[str, Any]:
    """
    Bounded search for a p-permutation resolution of the given module.

    Raises ExhaustedError when nothing is found within ``request.caps``.
    """
    G, M = _module_input(request)
    cert = resolve_module_search(M, request.caps, request.seed)
    return _success({
        "group": G.label,
        "ring": M.ring.label,
        "seed": request.seed,
        "caps": request.caps.model_dump(),
        **_certificate_data(cert),
    })


def omega_pair_report(request: OmegaPairRequest) -> Dict[str, Any]:
    G, M = _module_input(request)
    cert = resolve_omega_pair(M, request.caps, request.seed, free_start=request.free_start)
    return _success({
        "group": G.label,
        "ring": M.ring.label,
        "module_rank": M.rank,
        "pair_rank": cert.target_module.rank,
        "free_start": request.free_start,
        "seed": request.seed,
        "caps": request.caps.model_dump(),
        **_certificate_data(cert),
    })


def qn_report(request: QnRequest) -> Dict[str, Any]:
    """
    Stage Q(n) of the tower: free below n, p-permutation above.

    Response format:
    {
      "status": "success",
      "data": {
        "n": 2,
        "m": 1,
        "ranks": [2, 2, 1],
        "free_prefix_ranks": [2, 2, 2],
        "certificate": {...} or null for n = 0
      }
    }
    """
    G, M = _module_input(request)
    stage = build_Qn(M, request.n, request.caps, request.m, request.seed)
    data: Dict[str, Any] = {
        "group": G.label,
        "ring": M.ring.label,
        "n": stage.n,
        "m": stage.m,
        "ranks": list(stage.complex.ranks),
        "free_prefix_ranks": None if stage.free_prefix is None else list(stage.free_prefix.resolution.ranks),
        "certificate": None,
    }
    if stage.certificate is not None:
        data.update(_certificate_data(stage.certificate))
    return _success(data)


# ============================================
# VERIFICATION
# ============================================

def find_certificate(payload: Any) -> Any:
    """The certificate inside a saved command output, or the payload itself.

    Accepts a bare certificate, ``{"certificate": ...}`` and the full
    ``{"status": ..., "data": {"certificate": ...}}`` envelope.
    """
    while isinstance(payload, dict) and "resolution" not in payload:
        if "certificate" in payload:
            payload = payload["certificate"]
        elif "data" in payload:
            payload = payload["data"]
        else:
            break
    return payload


def verify_report(payload: Any) -> Dict[str, Any]:
    """
    Independent verification of a certificate document.

    A rejected certificate is a successful call whose report has ``ok: false``
    and names the first violated clause.

    Response format:
    {
      "status": "success",
      "data": {"ok": false, "clause": "exactness", "degree": 1, "message": "...", "checked": [...]}
    }
    """
    if isinstance(payload, CertificateDocument):
        document = payload
    else:
        raw = find_certificate(payload)
        if raw is None:
            raise SpecFormatError("no certificate found")
        document = parse_model(CertificateDocument, raw)
    try:
        report = verify_certificate(decode_certificate(document))
    except CertificateError as e:
        LOGGER.info("certificate rejected while decoding at %s: %s", e.clause, e)
        report = VerificationReport(False, e.clause, e.degree, str(e), [])
    return _success(report.to_dict())


# ============================================
# GROTHENDIECK GROUP
# ============================================

def g0_report(request: G0Request) -> Dict[str, Any]:
    """
    Simple modules, permutation-class matrix with its Smith invariants, and
    (optionally) the Cartan quotient.

    Response format:
    {
      "status": "success",
      "data": {
        "simple_ranks": [1, 2],
        "span": {"matrix": [[...]], "invariant_factors": [1, 1], "spans": true, ...},
        "cartan": {"cartan": [[...]], "invariant_factors": [...], "quotient": [2]}
      }
    }
    """
    G, R = decode_group(request.group), decode_ring(request.ring)
    basis = simples(G, R, request.seed)
    span = pperm_span(G, R, request.seed, basis=basis)
    cartan = cartan_quotient(G, R, request.seed, basis=basis).to_dict() if request.cartan else None
    return _success({
        "group": G.label,
        "ring": R.label,
        "seed": request.seed,
        "simple_ranks": list(basis.ranks),
        "span": span.to_dict(),
        "cartan": cartan,
    })


# ============================================
# CATALOG
# ============================================

def catalog_report(names: Optional[List[str]] = None) -> Dict[str, Any]:
    """
    Built-in groups. Without names, lists every group with its order.

    Response format:
    {
      "status": "success",
      "data": {
        "groups": [{"name": "V4", "degree": 4, "generators": [[...], [...]], "order": 4}, ...],
        "aliases": {"D4": "D8", ...}
      }
    }
    """
    groups = []
    for name in names or catalog_names():
        spec = group_spec(name)
        spec["order"] = catalog_group(spec["name"]).order
        groups.append(spec)
    return _success({"groups": groups, "aliases": dict(ALIASES)})
