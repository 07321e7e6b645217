"""Dimension reduction for tabular data."""

from ._drkit import (
    DrkitError,
    autoencoder,
    calc_k,
    continuity,
    evaluate,
    fit_ab,
    knn_impute,
    lle,
    make_clusters,
    make_s_curve,
    pca,
    som,
    standardize,
    trustworthiness,
    tsne,
    umap,
)

__all__ = [
    "DrkitError",
    "autoencoder",
    "calc_k",
    "continuity",
    "evaluate",
    "fit_ab",
    "knn_impute",
    "lle",
    "make_clusters",
    "make_s_curve",
    "pca",
    "som",
    "standardize",
    "trustworthiness",
    "tsne",
    "umap",
]
