import json

import pytest

from config import SCHEMA_VERSION
from exceptions import CertificateError, RingMismatchError, SpecFormatError
from gmodule import free_module, general_module, sign_module, trivial_module
from group import index2_normal_subgroups
from models import (
    CertificateDocument,
    GroupSpec,
    ModuleRequest,
    ModuleSpec,
    decode_certificate,
    decode_group,
    decode_module,
    dumps,
    encode_certificate,
    encode_group,
    encode_module,
    parse_model,
)
from resolve import resolve_module_search, resolve_trivial, verify_certificate


def reparse(cert):
    """Certificate -> JSON text -> parsed document."""
    return parse_model(CertificateDocument, dumps(encode_certificate(cert)))


class TestGroups:
    def test_catalog_name(self):
        assert decode_group("V4").order == 4

    def test_explicit_generators(self, group):
        G = decode_group(GroupSpec(degree=3, generators=[[1, 2, 0]]))
        assert G.order == 3
        assert decode_group(encode_group(group("S3"))) == group("S3")

    def test_unknown_field_rejected(self):
        with pytest.raises(SpecFormatError):
            parse_model(GroupSpec, {"degree": 2, "generators": [[1, 0]], "order": 2})


class TestModules:
    def test_free_module_keeps_its_certificate(self, group, gf2):
        M = free_module(group("C3"), gf2)
        N = decode_module(encode_module(M), M.group)
        assert N.kind == "free"
        assert all(gf2.equal(a, b) for a, b in zip(M.action, N.action))

    def test_monomial_over_integers(self, group, zz):
        G = group("C2")
        L = sign_module(G, index2_normal_subgroups(G)[0], zz)
        assert decode_module(encode_module(L), G).kind == "monomial"

    def test_ring_from_request(self, group, gf3):
        spec = parse_model(ModuleSpec, {"rank": 2, "action": [[[1, 1], [0, 1]]]})
        M = decode_module(spec, group("C3"), gf3)
        assert M.kind == "general"
        assert M.ring == gf3

    def test_ring_missing(self, group):
        spec = ModuleSpec(rank=1, action=[[[1]]])
        with pytest.raises(SpecFormatError):
            decode_module(spec, group("C2"))

    def test_ring_mismatch(self, group, gf2, gf3):
        spec = encode_module(trivial_module(group("C2"), gf2))
        with pytest.raises(RingMismatchError):
            decode_module(spec, group("C2"), gf3)

    def test_caps_inside_request(self):
        request = parse_model(ModuleRequest, {
            "group": "C3",
            "module": {"rank": 1, "action": [[[1]]]},
            "caps": {"depth": 0},
        })
        assert request.caps.depth == 0
        assert request.caps.multiplicity == 4

    def test_bad_caps(self):
        with pytest.raises(SpecFormatError):
            parse_model(ModuleRequest, {
                "group": "C3",
                "module": {"rank": 1, "action": [[[1]]]},
                "caps": {"depth": -1},
            })


class TestCertificates:
    def test_roundtrip_integers(self, group, zz):
        cert = resolve_trivial(group("C3"), zz)
        back = decode_certificate(reparse(cert))
        assert back.spliced_ranks == cert.spliced_ranks
        assert back.kind == "permutation"
        assert verify_certificate(back).ok

    def test_roundtrip_summands(self, group, gf3):
        M = general_module(group("C3"), gf3, [[[1, 1], [0, 1]]])
        cert = resolve_module_search(M)
        report = verify_certificate(decode_certificate(reparse(cert)))
        assert report.ok, report.message

    def test_schema_tag(self, group, gf2):
        data = json.loads(dumps(encode_certificate(resolve_trivial(group("C2"), gf2))))
        assert data["schema"] == SCHEMA_VERSION
        data["schema"] = "permres/0"
        with pytest.raises(SpecFormatError):
            parse_model(CertificateDocument, data)

    def test_dump_is_deterministic(self, group, zz):
        a = dumps(encode_certificate(resolve_trivial(group("C2"), zz)))
        b = dumps(encode_certificate(resolve_trivial(group("C2"), zz)))
        assert a == b

    def test_broken_term_certificate(self, group, gf2):
        data = json.loads(dumps(encode_certificate(resolve_trivial(group("C2"), gf2))))
        term = data["resolution"]["terms"][0]
        assert term["certificate"]["kind"] == "free"
        term["certificate"]["gset"]["action"] = [[0, 1]]
        with pytest.raises(CertificateError) as info:
            decode_certificate(parse_model(CertificateDocument, data))
        assert info.value.clause == "term_certificate"
        assert info.value.exit_code == 2

    def test_tampered_differential(self, group, gf2):
        data = json.loads(dumps(encode_certificate(resolve_trivial(group("C2"), gf2))))
        data["resolution"]["differentials"][0] = [[0], [0]]
        report = verify_certificate(decode_certificate(parse_model(CertificateDocument, data)))
        assert not report.ok
        assert report.clause == "exactness"
