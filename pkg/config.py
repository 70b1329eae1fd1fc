import os
from typing import List

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

# =====================================================
# GROUP AND MODULE CAPS
# =====================================================
GROUP_ORDER_CAP = 64          # no group larger than this anywhere
SUBGROUP_ORDER_CAP = 24       # exhaustive subgroup enumeration
TRIVIAL_CAP_P2 = 16           # resolve_trivial for 2-groups
TRIVIAL_CAP_ODD = 27          # resolve_trivial for odd p-groups
TERM_RANK_CAP = 4096          # rank of any single term built by the resolvers

# =====================================================
# RANDOMIZED ALGORITHMS
# =====================================================
DEFAULT_SEED = 20240601
MEATAXE_RANK_CAP = 64
MEATAXE_ATTEMPTS = 200
MEATAXE_EXHAUSTIVE_RANK = 8
INTERTWINER_ATTEMPTS = 64
DECOMPOSE_ATTEMPTS = 64

# =====================================================
# SEARCH DEFAULTS
# =====================================================
DEFAULT_DEPTH = 8
DEFAULT_MULTIPLICITY = 4
DEFAULT_BUDGET = 256

SCHEMA_VERSION = "permres/1"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class SearchCaps(BaseModel):
    """Caps for the p-permutation resolution search."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    depth: int = Field(DEFAULT_DEPTH, ge=0)
    multiplicity: int = Field(DEFAULT_MULTIPLICITY, ge=1)
    budget: int = Field(DEFAULT_BUDGET, ge=1)


class ServerSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    host: str = "0.0.0.0"
    port: int = 8080
    cors_origins: List[str] = ["*"]


def load_server_settings() -> ServerSettings:
    """Reads the HTTP server settings from the environment (.env supported)."""
    load_dotenv()
    origins = os.getenv("PERMRES_CORS_ORIGINS", "*")
    return ServerSettings(
        host=os.getenv("PERMRES_HOST", "0.0.0.0"),
        port=int(os.getenv("PERMRES_PORT", "8080")),
        cors_origins=[o.strip() for o in origins.split(",") if o.strip()],
    )
