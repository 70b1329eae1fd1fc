"""Command-line front end.

Standard output carries exactly one JSON document per run; logs go to stderr.
Exit codes: 0 success, 2 verification failure, 3 search exhausted or
inconclusive, 4 bad input.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Tuple

from config import DEFAULT_BUDGET, DEFAULT_DEPTH, DEFAULT_MULTIPLICITY, DEFAULT_SEED, LOG_FORMAT, SCHEMA_VERSION
from exceptions import PermResError, SpecFormatError
from models import (
    G0Request,
    GroupRingRequest,
    GroupSpec,
    MFreeRequest,
    ModuleRequest,
    ModuleSpec,
    OmegaPairRequest,
    QnRequest,
    dumps,
    parse_model,
)
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

LOGGER = logging.getLogger(__name__)

VERIFICATION_FAILED = 2


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 4), not argparse's exit 2."""

    def error(self, message):
        raise SpecFormatError(f"{self.prog}: {message}")


# =====================================================
# INPUT FILES
# =====================================================

def _load_json(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise SpecFormatError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise SpecFormatError(f"{path} is not valid JSON: {e}")


def _group_ref(value: str):
    """A catalog name, or a JSON file with degree and generators."""
    if os.path.isfile(value):
        return parse_model(GroupSpec, _load_json(value))
    return value


def _module_fields(args) -> Dict[str, Any]:
    return {
        "group": _group_ref(args.group),
        "module": parse_model(ModuleSpec, _load_json(args.module)),
        "ring": args.ring,
        "caps": {"depth": args.depth, "multiplicity": args.mult, "budget": args.budget},
        "seed": args.seed,
    }


# =====================================================
# COMMANDS
# =====================================================

def _cmd_koszul(args) -> Tuple[Dict[str, Any], int]:
    request = parse_model(GroupRingRequest, {"group": _group_ref(args.group), "ring": args.ring})
    return koszul_report(request), 0


def _cmd_resolve_trivial(args) -> Tuple[Dict[str, Any], int]:
    request = parse_model(GroupRingRequest, {"group": _group_ref(args.group), "ring": args.ring})
    return resolve_trivial_report(request), 0


def _cmd_mfree(args) -> Tuple[Dict[str, Any], int]:
    request = parse_model(MFreeRequest, {"group": _group_ref(args.group), "ring": args.ring, "m": args.m})
    return mfree_report(request), 0


def _cmd_resolve_module(args) -> Tuple[Dict[str, Any], int]:
    return resolve_module_report(parse_model(ModuleRequest, _module_fields(args))), 0


def _cmd_omega_pair(args) -> Tuple[Dict[str, Any], int]:
    fields = _module_fields(args)
    fields["free_start"] = args.free_start
    return omega_pair_report(parse_model(OmegaPairRequest, fields)), 0


def _cmd_qn(args) -> Tuple[Dict[str, Any], int]:
    fields = _module_fields(args)
    fields.update(n=args.n, m=args.m)
    return qn_report(parse_model(QnRequest, fields)), 0


def _cmd_verify(args) -> Tuple[Dict[str, Any], int]:
    result = verify_report(_load_json(args.certificate))
    return result, 0 if result["data"]["ok"] else VERIFICATION_FAILED


def _cmd_g0(args) -> Tuple[Dict[str, Any], int]:
    request = parse_model(G0Request, {
        "group": _group_ref(args.group),
        "ring": args.ring,
        "seed": args.seed,
        "cartan": not args.no_cartan,
    })
    return g0_report(request), 0


def _cmd_catalog(args) -> Tuple[Dict[str, Any], int]:
    return catalog_report(args.names or None), 0


# =====================================================
# PARSER
# =====================================================

def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"PRNG seed (default {DEFAULT_SEED})")
    common.add_argument("--out", help="Write the JSON result to this file instead of standard output")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")

    group_ring = _ArgumentParser(add_help=False)
    group_ring.add_argument("--group", required=True, help="Catalog name or JSON group file")
    group_ring.add_argument("--ring", required=True, help="gf<p> or int")

    module = _ArgumentParser(add_help=False)
    module.add_argument("--group", required=True, help="Catalog name or JSON group file")
    module.add_argument("--module", required=True, help="JSON module file ('-' for stdin)")
    module.add_argument("--ring", help="gf<p>; must agree with the module file when it names a ring")
    module.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="Search depth cap")
    module.add_argument("--mult", type=int, default=DEFAULT_MULTIPLICITY, help="Summand multiplicity cap")
    module.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="Total cover attempts")

    parser = _ArgumentParser(
        prog="permres",
        description="Finite permutation resolutions over group algebras",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Koszul complex of V4 over the integers
  python cli.py koszul --group V4 --ring int

  # Permutation resolution of the trivial module, then check it again
  python cli.py resolve-trivial --group C4 --ring int --out c4.json
  python cli.py verify c4.json

  # p-permutation resolution of a module given by generator matrices
  python cli.py resolve-module --group C3 --module jordan.json --depth 4

Exit codes: 0 ok, 2 verification failed, 3 exhausted/inconclusive, 4 bad input
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("koszul", parents=[common, group_ring], help="Koszul complex Kos(G;R)")
    p.set_defaults(handler=_cmd_koszul)

    p = sub.add_parser("resolve-trivial", parents=[common, group_ring],
                       help="Permutation resolution of the trivial module over a p-group")
    p.set_defaults(handler=_cmd_resolve_trivial)

    p = sub.add_parser("mfree", parents=[common, group_ring], help="m-free resolution of the trivial module")
    p.add_argument("--m", type=int, default=2, help="Tensor power (free in degrees below m)")
    p.set_defaults(handler=_cmd_mfree)

    p = sub.add_parser("resolve-module", parents=[common, module], help="p-permutation resolution search")
    p.set_defaults(handler=_cmd_resolve_module)

    p = sub.add_parser("omega-pair", parents=[common, module], help="Resolution of M plus its Heller loop")
    p.add_argument("--free-start", action="store_true", help="Start with the free cover in degree 0")
    p.set_defaults(handler=_cmd_omega_pair)

    p = sub.add_parser("qn", parents=[common, module], help="Stage Q(n) of the free/p-permutation tower")
    p.add_argument("--n", type=int, default=1, help="Stage")
    p.add_argument("--m", type=int, help="Truncation degree, at least n - 1 (default n - 1)")
    p.set_defaults(handler=_cmd_qn)

    p = sub.add_parser("verify", parents=[common], help="Independently re-check a certificate file")
    p.add_argument("certificate", help="Certificate JSON, or a saved command output ('-' for stdin)")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("g0", parents=[common, group_ring], help="Grothendieck group report")
    p.add_argument("--no-cartan", action="store_true", help="Skip the Cartan quotient")
    p.set_defaults(handler=_cmd_g0)

    p = sub.add_parser("catalog", parents=[common], help="Built-in groups")
    p.add_argument("names", nargs="*", help="Group names (all when omitted)")
    p.set_defaults(handler=_cmd_catalog)

    return parser


def _emit(payload: Dict[str, Any], out: Optional[str]) -> None:
    text = dumps({"schema": SCHEMA_VERSION, **payload})
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def run(argv: Optional[List[str]] = None) -> int:
    """Runs one command and returns its exit code."""
    parser = build_parser()
    out = None
    try:
        args = parser.parse_args(argv)
        out = args.out
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                            format=LOG_FORMAT, stream=sys.stderr)
        result, code = args.handler(args)
    except PermResError as e:
        LOGGER.error("%s: %s", type(e).__name__, e)
        _emit({"status": "error", "error": e.to_dict()}, out)
        return e.exit_code
    if code != 0:
        LOGGER.error("certificate rejected at clause %s", result["data"].get("clause"))
    _emit(result, out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
