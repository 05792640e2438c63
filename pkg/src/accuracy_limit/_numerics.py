import numpy as np

from .errors import NumericError

# log of the smallest positive double; densities below exp(LOG_FLOOR) underflow
LOG_FLOOR = -745.0


def check_finite(x, what="input"):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise NumericError(f"{what} contains NaN or infinite values")
    return x


def normalize_log_likelihoods(loglik, floor=True):
    """Turn per-class log-likelihoods of shape (n, K) into posteriors.

    With ``floor=True`` every log-likelihood is first raised to LOG_FLOOR, so
    rows whose likelihoods all underflow come out uniform. With
    ``floor=False`` the exact softmax is used unless the whole row is below
    the floor, in which case the row is uniform as well.
    """
    ll = np.atleast_2d(np.asarray(loglik, dtype=float))
    if floor:
        ll = np.maximum(ll, LOG_FLOOR)
    top = ll.max(axis=1, keepdims=True)
    w = np.exp(ll - top)
    post = w / w.sum(axis=1, keepdims=True)
    if not floor:
        dead = top[:, 0] < LOG_FLOOR
        post[dead] = 1.0 / ll.shape[1]
    return post


def argmax_lowest(p):
    """Row-wise argmax; exact ties resolve to the lowest class index."""
    return np.argmax(p, axis=1)
