import pytest
from fastapi.testclient import TestClient

from backend import app

JORDAN = {"ring": {"kind": "gf", "p": 3}, "rank": 2, "action": [[[1, 1], [0, 1]]]}


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


class TestCatalog:
    def test_list(self, client):
        response = client.get("/api/catalog")
        assert response.status_code == 200
        names = [g["name"] for g in response.json()["data"]["groups"]]
        assert "V4" in names and "Q8" in names

    def test_alias(self, client):
        response = client.get("/api/catalog/D4")
        assert response.status_code == 200
        assert response.json()["data"]["groups"][0]["name"] == "D8"

    def test_unknown(self, client):
        assert client.get("/api/catalog/C11").status_code == 404


class TestResolutions:
    def test_koszul(self, client):
        response = client.post("/api/koszul", json={"group": "C2", "ring": "int"})
        assert response.status_code == 200
        assert response.json()["data"]["ranks"] == [1, 2, 1]

    def test_resolve_trivial_and_verify(self, client):
        response = client.post("/api/resolve-trivial", json={"group": "C2", "ring": "gf2"})
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "success"
        assert body["data"]["summary"]["spliced_ranks"] == [1, 2, 1]

        verdict = client.post("/api/verify", json=body)
        assert verdict.status_code == 200
        assert verdict.json()["data"]["ok"]

        certificate = body["data"]["certificate"]
        certificate["kind"] = "bogus"
        verdict = client.post("/api/verify", json=certificate)
        assert verdict.status_code == 200
        assert verdict.json()["data"]["clause"] == "kind"

    def test_mfree(self, client):
        response = client.post("/api/mfree", json={"group": "C2", "ring": "gf2", "m": 2})
        assert response.status_code == 200
        assert response.json()["data"]["summary"]["spliced_ranks"] == [1, 4, 4, 1]

    def test_hypothesis_error_is_400(self, client):
        response = client.post("/api/resolve-trivial", json={"group": "S3", "ring": "gf3"})
        assert response.status_code == 400
        assert response.json()["detail"]["error"] == "HypothesisError"

    def test_unknown_field_is_400(self, client):
        response = client.post("/api/koszul", json={"group": "C2", "ring": "gf2", "colour": "red"})
        assert response.status_code == 400


class TestModuleEndpoints:
    def test_resolve_module(self, client):
        response = client.post("/api/resolve-module", json={"group": "C3", "module": JORDAN})
        assert response.status_code == 200
        assert response.json()["data"]["summary"]["kind"] == "p-permutation"

    def test_exhausted_is_422(self, client):
        response = client.post("/api/resolve-module", json={"group": "C3", "module": JORDAN, "caps": {"depth": 0}})
        assert response.status_code == 422
        assert response.json()["detail"]["error"] == "ExhaustedError"

    def test_omega_pair(self, client):
        k = {"ring": {"kind": "gf", "p": 2}, "rank": 1, "action": [[[1]]]}
        response = client.post("/api/omega-pair", json={"group": "C2", "module": k})
        assert response.status_code == 200
        assert response.json()["data"]["pair_rank"] == 2

    def test_qn(self, client):
        k = {"ring": {"kind": "gf", "p": 2}, "rank": 1, "action": [[[1]]]}
        response = client.post("/api/qn", json={"group": "C2", "module": k, "n": 2})
        assert response.status_code == 200
        assert response.json()["data"]["ranks"] == [2, 2, 1]


class TestG0:
    def test_c3(self, client):
        response = client.post("/api/g0", json={"group": "C3", "ring": "gf3"})
        assert response.status_code == 200
        data = response.json()["data"]
        assert data["span"]["spans"]
        assert data["cartan"]["quotient"] == [3]

    def test_integers_rejected(self, client):
        response = client.post("/api/g0", json={"group": "C2", "ring": "int", "cartan": False})
        assert response.status_code == 400
