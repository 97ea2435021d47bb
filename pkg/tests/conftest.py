import numpy as np
import pytest

from batopt import ObjectiveSpec, SearchSpace
from batopt.bench.datasets import load_csv_dataset


def make_sphere(dim: int, half_width: float = 10.0) -> ObjectiveSpec:
    return ObjectiveSpec(
        space=SearchSpace.box(-half_width, half_width, dim),
        evaluate=lambda x: float(np.sum(x * x)),
        batch=lambda X: np.sum(X * X, axis=1),
        name=f"sphere{dim}",
    )


@pytest.fixture(scope="session")
def sphere2():
    return make_sphere(2)


@pytest.fixture(scope="session")
def sphere5():
    return make_sphere(5)


@pytest.fixture(scope="session")
def williamson_boundary():
    return load_csv_dataset("williamson-boundary", "grouped-binomial", quiet=True)


@pytest.fixture(scope="session")
def williamson_infinity():
    return load_csv_dataset("williamson-infinity", "grouped-binomial", quiet=True)


@pytest.fixture(scope="session")
def williamson_interior():
    return load_csv_dataset("williamson-interior", "grouped-binomial", quiet=True)
