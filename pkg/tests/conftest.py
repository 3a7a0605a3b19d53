import numpy as np
import pytest

from rulemix import Dataset, Rule


def linear_dataset(n=200, seed=0, noise=0.05, slope=2.0, intercept=1.0):
    """y = slope*x + intercept (+ gaussian noise) with x spanning [-1, 1]."""
    rng = np.random.default_rng(seed)
    x = np.linspace(-1.0, 1.0, n).reshape(-1, 1)
    y = slope * x[:, 0] + intercept
    if noise:
        y = y + rng.normal(0.0, noise, n)
    return Dataset(x, y)


def abs_dataset(n=400):
    """y = |x| with x spanning [-1, 1]; not globally linear."""
    x = np.linspace(-1.0, 1.0, n).reshape(-1, 1)
    return Dataset(x, np.abs(x[:, 0]))


def rules_equal(a: Rule, b: Rule) -> bool:
    return (
        np.array_equal(a.condition.lower, b.condition.lower)
        and np.array_equal(a.condition.upper, b.condition.upper)
        and np.array_equal(a.submodel.coefficients, b.submodel.coefficients)
        and a.submodel.intercept == b.submodel.intercept
        and a.experience == b.experience
        and a.in_sample_error == b.in_sample_error
        and a.fitness == b.fitness
    )


@pytest.fixture
def square_dataset():
    """2-D features on a grid with a smooth nonlinear target."""
    rng = np.random.default_rng(123)
    X = rng.uniform(-1.0, 1.0, size=(60, 2))
    y = X[:, 0] ** 2 + 0.5 * X[:, 1] + rng.normal(0.0, 0.02, 60)
    return Dataset(X, y)
