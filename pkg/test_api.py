from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from app.core.config import settings
from app.modules.arff.service import parse_arff, relabel, write_arff_file
from app.modules.dataset.schemas import IndexView, TARGET
from app.modules.experiment.registry import get_algorithm
from app.modules.experiment.serialization import save_model
from app.modules.preprocess.schemas import NormKind
from conftest import MINI_IRIS_ARFF, gaussian_set, make_set
from main import app


@pytest.fixture
def client():
    return TestClient(app)


def test_health(client):
    assert client.get("/health").json() == {"status": "healthy"}
    assert client.get("/").json()["message"] == settings.PROJECT_NAME


def test_relabel_upload_returns_arff(client):
    response = client.post(
        "/api/v1/arff/relabel",
        files={"file": ("iris.arff", MINI_IRIS_ARFF, "text/plain")},
        data={"target": "Iris-virginica"},
    )
    assert response.status_code == 200
    relabelled = parse_arff(response.text)
    assert relabelled.labels.count(TARGET) == 5
    assert '[Target Class = "Iris-virginica"]' in response.text


def test_relabel_with_unknown_class_is_a_bad_request(client):
    response = client.post(
        "/api/v1/arff/relabel",
        files={"file": ("iris.arff", MINI_IRIS_ARFF, "text/plain")},
        data={"target": "Iris-unknown"},
    )
    assert response.status_code == 400


def test_relabel_of_broken_arff_is_a_bad_request(client):
    response = client.post(
        "/api/v1/arff/relabel",
        files={"file": ("bad.arff", "@attribute a numeric\n@data\n", "text/plain")},
        data={"target": "x"},
    )
    assert response.status_code == 400
    assert "line 1" in response.json()["detail"]


def test_run_experiment(client, iris_path):
    payload = {
        "example_set_path": str(iris_path),
        "relabel": True,
        "target_label": "Iris-setosa",
        "algorithm": "NNPC",
        "runs": 2,
    }
    response = client.post("/api/v1/experiments/run", json=payload)
    assert response.status_code == 200
    body = response.json()
    assert [run["seed"] for run in body["runs"]] == [2, 3]
    assert Path(body["log_path"]).exists()


def test_run_experiment_with_missing_set(client, tmp_path):
    response = client.post("/api/v1/experiments/run", json={"example_set_path": str(tmp_path / "none.arff")})
    assert response.status_code == 404


def test_run_experiment_on_unrelabelled_set(client, iris_path):
    response = client.post("/api/v1/experiments/run", json={"example_set_path": str(iris_path)})
    assert response.status_code == 400


def test_evaluate_saved_classifier(client, iris_path, tmp_path):
    iris, _ = relabel(parse_arff(MINI_IRIS_ARFF), "Iris-setosa")
    model_path = save_model(get_algorithm("NNPC").train(IndexView.full(iris), {}, 2, NormKind.NONE), tmp_path)
    payload = {"model_path": str(model_path), "test_set_path": str(iris_path), "target_label": "Iris-setosa"}
    response = client.post("/api/v1/experiments/evaluate-saved", json=payload)
    assert response.status_code == 200
    assert response.json()["matrix"]["tp"] == 5

    payload["model_path"] = str(tmp_path / "absent.oscal")
    assert client.post("/api/v1/experiments/evaluate-saved", json=payload).status_code == 404


def test_trend_study(client, tmp_path):
    primary = gaussian_set(seed=3, n_target=20, n_other=20, shift=2.0)
    secondary = make_set(np.empty((0, 2)), [[-8.0, -8.0], [-9.0, -7.0], [-7.5, -9.0]], relation="outliers")
    write_arff_file(primary, str(tmp_path / "p.arff"))
    write_arff_file(secondary, str(tmp_path / "s.arff"))
    payload = {
        "primary_path": str(tmp_path / "p.arff"),
        "secondary_path": str(tmp_path / "s.arff"),
        "increments": [0, 1, 3],
        "runs": 3,
        "roster": [{"algorithm": "NNPC"}, {"algorithm": "BKNN"}],
    }
    response = client.post("/api/v1/trend-studies/run", json=payload)
    assert response.status_code == 200
    assert response.json()["algorithms"] == ["NNPC", "BKNN"]
    assert (Path(settings.DATA_DIR) / "trend_error.csv").exists()

    payload["increments"] = [0, 5]
    assert client.post("/api/v1/trend-studies/run", json=payload).status_code == 400
