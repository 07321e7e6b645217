import numpy as np
import pytest

import drkit


def two_clusters(n_per=60, seed=1):
    x, labels = drkit.make_clusters(n_per, [np.full(5, -4.0), np.full(5, 4.0)], 1.0, seed)
    return x, np.asarray(labels)


def nn_purity(y, labels):
    d = ((y[:, None, :] - y[None, :, :]) ** 2).sum(-1)
    np.fill_diagonal(d, np.inf)
    return float((labels[d.argmin(1)] == labels).mean())


def test_pca_matches_numpy_covariance():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(80, 5)) * [1, 2, 3, 4, 5]
    res = drkit.pca(x, n_components=2)
    z = (x - x.mean(0)) / x.std(0, ddof=1)
    ev = np.sort(np.linalg.eigvalsh(np.cov(z, rowvar=False)))[::-1]
    np.testing.assert_allclose(res["sdev"] ** 2, ev, rtol=1e-10)
    np.testing.assert_allclose(res["cpve"][-1], 1.0)
    assert res["scores"].shape == (80, 2)


def test_lle_unrolls_s_curve():
    x, t = drkit.make_s_curve(400, 0.0, 3)
    y = drkit.lle(x, k=12)
    ranks = lambda v: np.argsort(np.argsort(v))
    rho = np.corrcoef(ranks(y[:, 0]), ranks(t))[0, 1]
    assert abs(rho) > 0.9


def test_tsne_separates_and_is_reproducible():
    x, labels = two_clusters()
    # eta 200 overshoots at n = 120; n / 12 is the usual small-sample choice
    y1, kl = drkit.tsne(x, perplexity=15, max_iter=500, learning_rate=10, seed=2)
    y2, _ = drkit.tsne(x, perplexity=15, max_iter=500, learning_rate=10, seed=2)
    assert np.array_equal(y1, y2)
    assert len(kl) == 500 and np.all(np.isfinite(kl))
    assert nn_purity(y1, labels) >= 0.99


def test_umap_separates():
    x, labels = two_clusters()
    y = drkit.umap(x, k=10, epochs=100, seed=1)
    assert y.shape == (120, 2)
    assert nn_purity(y, labels) >= 0.99
    a, b = drkit.fit_ab(0.1, 1.0)
    assert a == pytest.approx(1.577, abs=0.01) and b == pytest.approx(0.895, abs=0.01)


def test_som_and_autoencoder_shapes():
    x, _ = two_clusters()
    res = drkit.som(x, rows=3, cols=3, rlen=20, seed=4)
    assert res["codes"].shape == (9, 5)
    assert len(res["bmu"]) == 120 and len(res["trace"]) == 20
    ae = drkit.autoencoder(x, hidden=[3], epochs=20, seed=5)
    assert ae["features"].shape == (120, 3)
    assert ae["train_loss"][-1] < ae["train_loss"][0]


def test_impute_keeps_observed_cells():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(40, 4))
    holes = x.copy()
    holes[3, 1] = np.nan
    holes[10, 2] = np.nan
    out = drkit.knn_impute(holes, k=3)
    mask = np.isnan(holes)
    assert not np.isnan(out).any()
    np.testing.assert_array_equal(out[~mask], x[~mask])


def test_metrics_identity_embedding():
    x, _ = two_clusters()
    assert drkit.trustworthiness(x, x, 5) == pytest.approx(1.0)
    rep = drkit.evaluate(x, x, k=5)
    assert rep["rho"] == pytest.approx(1.0)


def test_errors_raise_drkit_error():
    x, _ = two_clusters(10)
    with pytest.raises(drkit.DrkitError):
        drkit.lle(x, k=0)
    with pytest.raises(ValueError):
        drkit.knn_impute(x, distance="cosine")
