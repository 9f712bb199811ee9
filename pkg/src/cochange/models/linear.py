"""Point-wise linear regression by ordinary least squares."""

import numpy as np


def fit_linear(X: np.ndarray, y: np.ndarray) -> tuple[list[float], float]:
    """(weights, intercept) minimizing squared error on (X, y)."""
    design = np.hstack([X, np.ones((len(X), 1))])
    solution, *_ = np.linalg.lstsq(design, y, rcond=None)
    return [float(w) for w in solution[:-1]], float(solution[-1])
