"""Leave-one-out jackknife over unitary draws."""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..errors import UsageError


def leave_one_out_means(contributions: np.ndarray) -> np.ndarray:
    x = np.asarray(contributions, dtype=float)
    n = x.shape[0]
    return (x.sum(axis=0) - x) / (n - 1)


def jackknife_stderr(contributions, statistic: Callable | None = None) -> float:
    """Jackknife standard error of ``statistic(mean of contributions)``.

    :param contributions: per-draw values, shape ``(N,)`` or ``(N, k)``.
    :param statistic: maps a column-mean vector to a scalar; defaults to the
        identity (i.e. the error of the plain mean).
    :return: sqrt((N - 1)/N * sum_i (theta_(-i) - theta_bar)^2).
    """
    x = np.asarray(contributions, dtype=float)
    if x.ndim == 0 or x.shape[0] < 2:
        raise UsageError("the jackknife needs at least 2 draws")
    n = x.shape[0]
    loo = leave_one_out_means(x)
    if statistic is None:
        theta = loo if loo.ndim == 1 else loo[:, 0]
    else:
        theta = np.array([statistic(row) for row in loo])
    return float(np.sqrt((n - 1) / n * np.sum((theta - theta.mean()) ** 2)))
