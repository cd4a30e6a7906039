import math

import numpy as np
import pytest

import qtgnn

EDGES = "src,dst,amount,timestamp\na,b,10,0\nb,c,20,1\nc,a,30,2\nc,d,5,3\n"


def small(tmp_path, **extra):
    cfg = {
        "seed": 3,
        "run.output_dir": str(tmp_path),
        "synthetic.n_graphs": 24,
        "synthetic.n_accounts": 5,
        "synthetic.n_transactions": 6,
        "synthetic.fraud_ratio": 0.25,
        "train.t_max": 3,
        "train.snapshot_size": 8,
        "model.capacity": 5,
    }
    cfg.update(extra)
    return cfg


def test_config_defaults_and_errors():
    cfg = qtgnn.config()
    assert set(cfg) == set(qtgnn.config_keys())
    assert qtgnn.config(train__t_max=7)["train.t_max"] == 7
    with pytest.raises(qtgnn.ConfigError):
        qtgnn.config({"no.such.key": 1})


def test_pipeline_round_trip(tmp_path):
    cfg = small(tmp_path)
    dataset = qtgnn.generate(cfg)
    model = qtgnn.train(dataset, cfg)
    scores = qtgnn.score(model, dataset, cfg, split="all")
    m = qtgnn.evaluate(scores, cfg)
    assert 0.0 <= m["roc_auc"] <= 1.0
    assert (tmp_path / "training_log.csv").read_text().startswith("step,")
    qtgnn.embed(dataset, cfg, model)
    assert (tmp_path / "densities.qtdm").stat().st_size > 0


def test_missing_dataset_raises_data_error(tmp_path):
    with pytest.raises(qtgnn.QtgnnError):
        qtgnn.train(tmp_path / "absent.jsonl", small(tmp_path))


def test_lab_pl(tmp_path):
    r = qtgnn.lab("pl", small(tmp_path))
    assert r["passed"]
    assert r["csv"].startswith("step,gap,bound")
    assert "pl" in qtgnn.experiment_names()


def test_encoding_is_a_density_matrix():
    rho, ids = qtgnn.encode(EDGES, math.pi / 4)
    assert rho.shape[0] == rho.shape[1] == 2 ** len(ids)
    assert abs(np.trace(rho) - 1) < 1e-10
    assert np.allclose(rho, rho.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(rho).min() > -1e-10
    assert qtgnn.von_neumann_entropy(rho) >= -1e-12


def test_entropy_of_maximally_mixed_pair():
    assert qtgnn.von_neumann_entropy(np.eye(4) / 4) == pytest.approx(math.log(4), abs=1e-9)


def test_persistence_of_a_square():
    d = np.array([[0, 1, 1.5, 1], [1, 0, 1, 1.5], [1.5, 1, 0, 1], [1, 1.5, 1, 0]], dtype=float)
    dgm = qtgnn.persistence(d, 2.0, 2)
    loops = [(b, e) for k, b, e in dgm if k == 1]
    assert loops == [(1.0, 1.5)]
    assert sum(1 for k, b, e in dgm if k == 0 and math.isinf(e)) == 1


def test_diagram_distances():
    a = [(0, 0.0, 1.0)]
    b = [(0, 0.0, 1.2)]
    assert qtgnn.bottleneck_distance(a, b) == pytest.approx(0.2)
    assert qtgnn.wasserstein2(a, b) >= qtgnn.bottleneck_distance(a, b) - 1e-12


def test_metrics():
    assert qtgnn.roc_auc([0.1, 0.9], [0, 1]) == 1.0
    assert qtgnn.log_loss([0.5, 0.5], [0, 1]) == pytest.approx(math.log(2), abs=1e-12)
