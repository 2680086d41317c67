import numpy as np
import pytest

from crossplat.errors import UsageError
from crossplat.protocol.jackknife import jackknife_stderr, leave_one_out_means


def test_identical_values_have_zero_error():
    assert jackknife_stderr(np.full(10, 0.9)) < 1e-12


def test_two_values():
    assert jackknife_stderr([0.8, 1.0]) == pytest.approx(0.1)


def test_mean_statistic_matches_standard_error(rng):
    x = rng.normal(size=50)
    assert jackknife_stderr(x) == pytest.approx(x.std(ddof=1) / np.sqrt(50))


def test_error_shrinks_like_inverse_square_root(rng):
    small = np.mean([jackknife_stderr(rng.normal(size=100)) for _ in range(200)])
    large = np.mean([jackknife_stderr(rng.normal(size=400)) for _ in range(200)])
    assert small == pytest.approx(0.1, rel=0.05)
    assert small / large == pytest.approx(2.0, rel=0.05)


def test_ratio_statistic():
    cols = np.array([[1.0, 2.0], [3.0, 2.0], [2.0, 2.0]])
    se = jackknife_stderr(cols, lambda m: m[0] / m[1])
    loo = leave_one_out_means(cols)
    theta = loo[:, 0] / loo[:, 1]
    assert se == pytest.approx(np.sqrt(2 / 3 * np.sum((theta - theta.mean()) ** 2)))


def test_needs_two_draws():
    with pytest.raises(UsageError):
        jackknife_stderr([1.0])
