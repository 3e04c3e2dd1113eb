from pathlib import Path

import numpy as np
import pytest

from rlar.data import LabeledDataset, load_csv, normalize_min_max

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def blobs_dataset(seed=0, n_per_class=20, d=5, n_classes=3, spread=0.6):
    """Gaussian blobs, one cluster per class, normalized to [0, 1]."""
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0, 4, size=(n_classes, d))
    cols, labels = [], []
    for i, center in enumerate(centers):
        cols.append(center[:, None] + rng.normal(0, spread, size=(d, n_per_class)))
        labels += [i + 1] * n_per_class
    return normalize_min_max(LabeledDataset(np.hstack(cols), np.array(labels)))


def moons_dataset(seed=0, n_per_class=40, noise=0.08):
    """Two interleaved half-moons, one per class (non-Gaussian classes)."""
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0, np.pi, size=n_per_class)
    upper = np.vstack([np.cos(theta), np.sin(theta)])
    theta = rng.uniform(0, np.pi, size=n_per_class)
    lower = np.vstack([1.0 - np.cos(theta), 0.5 - np.sin(theta)])
    x = np.hstack([upper, lower]) + rng.normal(0, noise, size=(2, 2 * n_per_class))
    labels = np.array([1] * n_per_class + [2] * n_per_class)
    return normalize_min_max(LabeledDataset(x, labels))


def noise_dataset(seed=0, n_per_class=15, d=10, n_classes=3):
    """Uniform [0, 1] features with arbitrary round-robin labels."""
    rng = np.random.default_rng(seed)
    n = n_per_class * n_classes
    x = rng.uniform(size=(d, n))
    labels = (np.arange(n) % n_classes) + 1
    return normalize_min_max(LabeledDataset(x, labels))


@pytest.fixture(scope="session")
def iris_raw():
    return load_csv(DATA_DIR / "iris.csv")


@pytest.fixture(scope="session")
def wine_raw():
    return load_csv(DATA_DIR / "wine.csv")


@pytest.fixture(scope="session")
def iris_ds(iris_raw):
    return normalize_min_max(iris_raw)


@pytest.fixture(scope="session")
def wine_ds(wine_raw):
    return normalize_min_max(wine_raw)
