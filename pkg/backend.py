from typing import Any, Dict

from fastapi import Body, FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from config import load_server_settings
from exceptions import PermResError, UnknownGroupError
from models import G0Request, GroupRingRequest, MFreeRequest, ModuleRequest, OmegaPairRequest, QnRequest
from resolution_service import (
    catalog_report,
    g0_report,
    koszul_report,
    mfree_report,
    omega_pair_report,
    qn_report,
    resolve_module_report,
    resolve_trivial_report,
    verify_report,
)

settings = load_server_settings()

app = FastAPI(title="permres Resolution API")

app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins,
    allow_credentials=False,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(RequestValidationError)
async def request_validation_handler(request: Request, exc: RequestValidationError):
    """Malformed request bodies are input errors like any other."""
    return JSONResponse(
        status_code=400,
        content={"detail": {"error": "SpecFormatError", "message": str(exc.errors())}},
    )


def _http_error(e: PermResError) -> HTTPException:
    """400 for bad input, 422 when a bounded search gives up, 500 otherwise."""
    if e.exit_code == 4:
        return HTTPException(status_code=400, detail=e.to_dict())
    if e.exit_code == 3:
        return HTTPException(status_code=422, detail=e.to_dict())
    return HTTPException(status_code=500, detail=e.to_dict())


# ============================================
# CATALOG
# ============================================

@app.get("/api/catalog")
def get_catalog():
    """
    Lists the built-in groups.

    Response:
    {
        "status": "success",
        "data": {
            "groups": [{"name": "C2", "degree": 2, "generators": [[1, 0]], "order": 2}, ...],
            "aliases": {"D4": "D8", ...}
        }
    }
    """
    try:
        return catalog_report()
    except Exception as e:
        import traceback
        traceback.print_exc()
        raise HTTPException(
            status_code=500,
            detail=f"Failed to list catalog: {str(e)}"
        )


@app.get("/api/catalog/{name}")
def get_catalog_group(name: str):
    try:
        return catalog_report([name])
    except UnknownGroupError as e:
        raise HTTPException(status_code=404, detail=e.to_dict())
    except Exception as e:
        import traceback
        traceback.print_exc()
        raise HTTPException(
            status_code=500,
            detail=f"Failed to fetch group: {str(e)}"
        )


# ============================================
# KOSZUL COMPLEX AND TRIVIAL-MODULE RESOLUTIONS
# ============================================

@app.post("/api/koszul")
def post_koszul(request: GroupRingRequest):
    """
    Koszul complex of G over R with its validation and homology.

    Request: {"group": "V4" | {"degree": 4, "generators": [...]}, "ring": "gf2" | "int"}
    """
    try:
        return koszul_report(request)
    except HTTPException:
        raise
    except PermResError as e:
        raise _http_error(e)
    except Exception as e:
        import traceback
        traceback.print_exc()
        raise HTTPException(
            status_code=500,
            detail=f"Failed to build Koszul complex: {str(e)}"
        )


@app.post("/api/resolve-trivial")
def post_resolve_trivial(request: GroupRingRequest):
    """
    Permutation resolution of the trivial module over a p-group.

    Response:
    {
        "status": "success",
        "data": {
            "summary": {"spliced_ranks": [1, 2, 1], "kind": "permutation", ...},
            "verification": {"ok": true, ...},
            "certificate": {"schema": "permres/1", ...}
        }
    }
    """
    try:
        return resolve_trivial_report(request)
    except HTTPException:
        raise
    except PermResError as e:
        raise _http_error(e)
    except Exception as e:
        import traceback
        traceback.print_exc()
        raise HTTPException(
            status_code=500,
            detail=f"Failed to resolve trivial module: {str(e)}"
        )


@app.post("/api/mfree")
def post_mfree(request: MFreeRequest):
    try:
        return mfree_report(request)
    except HTTPException:
        raise
    except PermResError as e:
        raise _http_error(e)
    except Exception as e:
        import traceback
        traceback.print_exc()
        raise HTTPException(
            status_code=500,
            detail=f"Failed to build m-free resolution: {str(e)}"
        )


# ============================================
# MODULE RESOLUTIONS
# ============================================

@app.post("/api/resolve-module")
def post_resolve_module(request: ModuleRequest):
    """
    Bounded p-permutation resolution search.

    Request:
    {
        "group": "C3",
        "module": {"ring": {"kind": "gf", "p": 3}, "rank": 2, "action": [[[1, 1], [0, 1]]]},
        "caps": {"depth": 8, "multiplicity": 4, "budget": 256},
        "seed": 20240601
    }

    Returns 422 when the search exhausts its caps.
    """
    try:
        return resolve_module_report(request)
    except HTTPException:
        raise
    except PermResError as e:
        raise _http_error(e)
    except Exception as e:
        import traceback
        traceback.print_exc()
        raise HTTPException(
            status_code=500,
            detail=f"Failed to resolve module: {str(e)}"
        )


@app.post("/api/omega-pair")
def post_omega_pair(request: OmegaPairRequest):
    try:
        return omega_pair_report(request)
    except HTTPException:
        raise
    except PermResError as e:
        raise _http_error(e)
    except Exception as e:
        import traceback
        traceback.print_exc()
        raise HTTPException(
            status_code=500,
            detail=f"Failed to resolve omega pair: {str(e)}"
        )


@app.post("/api/qn")
def post_qn(request: QnRequest):
    try:
        return qn_report(request)
    except HTTPException:
        raise
    except PermResError as e:
        raise _http_error(e)
    except Exception as e:
        import traceback
        traceback.print_exc()
        raise HTTPException(
            status_code=500,
            detail=f"Failed to build Q(n): {str(e)}"
        )


# ============================================
# VERIFICATION AND GROTHENDIECK GROUP
# ============================================

@app.post("/api/verify")
def post_verify(payload: Dict[str, Any] = Body(...)):
    """
    Re-checks a certificate. Accepts the certificate itself or a saved response
    containing it. A rejected certificate is still a 200 with "ok": false.
    """
    try:
        return verify_report(payload)
    except HTTPException:
        raise
    except PermResError as e:
        raise _http_error(e)
    except Exception as e:
        import traceback
        traceback.print_exc()
        raise HTTPException(
            status_code=500,
            detail=f"Failed to verify certificate: {str(e)}"
        )


@app.post("/api/g0")
def post_g0(request: G0Request):
    try:
        return g0_report(request)
    except HTTPException:
        raise
    except PermResError as e:
        raise _http_error(e)
    except Exception as e:
        import traceback
        traceback.print_exc()
        raise HTTPException(
            status_code=500,
            detail=f"Failed to compute Grothendieck group report: {str(e)}"
        )


if __name__ == "__main__":
    import uvicorn
    uvicorn.run("backend:app", host=settings.host, port=settings.port, reload=True)
