"""
API Endpoint Testleri
"""

import pytest
from fastapi.testclient import TestClient

from matroidphase.main import app
from matroidphase.services.matrix_io import format_matrix
from matroidphase.services.spmat import SparseMatrix

PREFIX = "/api/v1"


@pytest.fixture(scope="module")
def client():
    # lifespan çalışsın diye bağlam yöneticisi
    with TestClient(app) as c:
        yield c


def upload(client, matrix, filename="a.mat"):
    files = {"file": (filename, format_matrix(matrix).encode("utf-8"), "text/plain")}
    return client.post(f"{PREFIX}/matrices", files=files)


class TestHealthEndpoint:
    """Health endpoint testleri"""

    def test_health_check(self, client):
        """Health check 200 ve doğru yapı dönmeli"""
        response = client.get(f"{PREFIX}/health")
        assert response.status_code == 200
        data = response.json()
        assert data["status"] == "healthy"
        assert isinstance(data["matrices"], int)

    def test_root(self, client):
        """Kök endpoint servis bilgisini dönmeli"""
        data = client.get("/").json()
        assert data["status"] == "running"
        assert data["docs"] == f"{PREFIX}/docs"


class TestThresholdsEndpoint:
    """Eşik endpoint testleri"""

    def test_k2(self, client):
        """k=2 için d_k = 1"""
        response = client.get(f"{PREFIX}/thresholds", params={"k": 2})
        assert response.status_code == 200
        assert abs(response.json()["d_k"] - 1.0) < 1e-9

    def test_with_density(self, client):
        data = client.get(f"{PREFIX}/thresholds", params={"k": 3, "d": 3.0}).json()
        assert data["rho"] > 0
        assert data["beta"] == pytest.approx(0.4254370997, abs=1e-8)

    def test_k_too_small(self, client):
        """k < 2 için 422"""
        assert client.get(f"{PREFIX}/thresholds", params={"k": 1}).status_code == 422

    def test_negative_density(self, client):
        assert client.get(f"{PREFIX}/thresholds", params={"k": 3, "d": -1}).status_code == 422


class TestMatrixEndpoints:
    """Yükleme ve soyma endpoint testleri"""

    def test_upload(self, client, u23_host):
        """Geçerli matris yüklenmeli"""
        response = upload(client, u23_host)
        assert response.status_code == 200
        data = response.json()
        assert (data["q"], data["rows"], data["cols"], data["nnz"]) == (2, 3, 4, 5)

    def test_upload_counts_in_health(self, client, identity3):
        before = client.get(f"{PREFIX}/health").json()["matrices"]
        upload(client, identity3)
        assert client.get(f"{PREFIX}/health").json()["matrices"] == before + 1

    def test_wrong_extension(self, client, u23_host):
        """Desteklenmeyen uzantı 400 dönmeli"""
        assert upload(client, u23_host, filename="a.pdf").status_code == 400

    def test_bad_format(self, client):
        files = {"file": ("a.mat", b"matrix q=2\n", "text/plain")}
        assert client.post(f"{PREFIX}/matrices", files=files).status_code == 422

    def test_empty_file(self, client):
        files = {"file": ("a.mat", b"  \n", "text/plain")}
        assert client.post(f"{PREFIX}/matrices", files=files).status_code == 422

    def test_not_utf8(self, client):
        files = {"file": ("a.mat", b"\xff\xfe\x00", "text/plain")}
        assert client.post(f"{PREFIX}/matrices", files=files).status_code == 400

    def test_peel(self, client, u23_host):
        """Soyma çekirdek boyutlarını ve rank'ı dönmeli"""
        mat_id = upload(client, u23_host).json()["mat_id"]
        data = client.get(f"{PREFIX}/matrices/{mat_id}/peel").json()
        assert data["core_rows"] == 2 and data["core_cols"] == 3
        assert data["peeled_cols"] == 1
        assert data["rank"] == 3

    def test_peel_unknown(self, client):
        assert client.get(f"{PREFIX}/matrices/yok/peel").status_code == 404


class TestFindMinorEndpoint:
    """Minör arama endpoint testleri"""

    def test_found(self, client, u23_host):
        """U(2,3) bulunmalı ve tanık doğrulanmış dönmeli"""
        mat_id = upload(client, u23_host).json()["mat_id"]
        response = client.post(f"{PREFIX}/find-minor", json={"mat_id": mat_id, "seed": 1})
        assert response.status_code == 200
        data = response.json()
        assert data["found"] is True
        assert data["witness"]["verified"] is True

    def test_absent_brute(self, client, identity3):
        mat_id = upload(client, identity3).json()["mat_id"]
        data = client.post(f"{PREFIX}/find-minor", json={"mat_id": mat_id, "mode": "brute"}).json()
        assert data["found"] is False
        assert data["failure_code"] == "absent"
        assert data["witness"] is None

    def test_unknown_matrix(self, client):
        response = client.post(f"{PREFIX}/find-minor", json={"mat_id": "yok"})
        assert response.status_code == 404

    def test_bad_target(self, client, u23_host):
        """Anlaşılamayan hedef 422 dönmeli"""
        mat_id = upload(client, u23_host).json()["mat_id"]
        response = client.post(f"{PREFIX}/find-minor", json={"mat_id": mat_id, "target": "k5"})
        assert response.status_code == 422

    def test_file_target_refused(self, client, u23_host):
        mat_id = upload(client, u23_host).json()["mat_id"]
        response = client.post(f"{PREFIX}/find-minor", json={"mat_id": mat_id, "target": "file:/etc/passwd"})
        assert response.status_code == 400

    def test_brute_too_large(self, client, gf2):
        wide = SparseMatrix.from_columns(gf2, 3, [[(i % 3, 1)] for i in range(13)])
        mat_id = upload(client, wide).json()["mat_id"]
        response = client.post(f"{PREFIX}/find-minor", json={"mat_id": mat_id, "mode": "brute"})
        assert response.status_code == 400

    def test_budget_limit(self, client, u23_host):
        mat_id = upload(client, u23_host).json()["mat_id"]
        response = client.post(f"{PREFIX}/find-minor", json={"mat_id": mat_id, "budget": 0})
        assert response.status_code == 422
