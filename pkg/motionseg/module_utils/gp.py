# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import re

import numpy as np
from scipy import linalg

from motionseg.module_utils.common import NumericError, display
from motionseg.module_utils.model import KernelParams

LOG_2PI = np.log(2.0 * np.pi)


def kernel_eval(p, q, k):
    """Evaluate the motion kernel on timesteps p and q (broadcasts)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return (k.theta0 * np.exp(-0.5 * k.theta1 * (p - q) ** 2)
            + k.theta2 + k.theta3 * p * q)


def cholesky_factor(cmat):
    """Cholesky-factor a covariance matrix.

    Raises:
        NumericError: naming the leading minor that is not positive definite
    """
    try:
        return linalg.cho_factor(cmat, lower=True, check_finite=False)
    except linalg.LinAlgError as e:
        found = re.search(r'(\d+)', str(e))
        minor = int(found.group(1)) if found else None
        raise NumericError("Covariance matrix is not positive definite: leading minor %s "
                           "fails, check kernel parameters" % minor, minor=minor)


def covariance_matrix(ts, k, check=True):
    """C(t_p, t_q) = k(t_p, t_q) + noise_var * delta_pq."""
    ts = np.asarray(ts, dtype=float)
    if ts.size == 0:
        raise ValueError("covariance_matrix needs at least one timestep")
    cmat = kernel_eval(ts[:, None], ts[None, :], k) + k.noise_var * np.eye(ts.size)
    if check:
        cholesky_factor(cmat)
    return cmat


class GpClassModel:
    """Gaussian process of one motion element class.

    Training points of every segment assigned to the class are pooled; the
    timestep of a point restarts at 0 at the beginning of its segment. All
    dimensions share the same inputs, so one factorization serves every
    dimension. When more than `cap` points are pooled a uniform subsample of
    `cap` points, drawn with the model RNG, is used for prediction.
    """

    def __init__(self, kernel=None, dim=1, cap=200, variance_floor=1e-8, rng=None):
        self.kernel = kernel or KernelParams()
        self.dim = dim
        self.cap = cap
        self.variance_floor = variance_floor
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self._segments = {}
        self._next_key = 0
        self._stale = True
        self._ts = np.zeros(0)
        self._xs = np.zeros((0, dim))
        self._factor = None
        self._weights = None
        self._tables = {}

    def __len__(self):
        return len(self._segments)

    @property
    def n_points(self):
        """Number of pooled points before subsampling."""
        return sum(len(x) for x in self._segments.values())

    @property
    def training_size(self):
        """Number of points actually used for prediction."""
        self._refresh()
        return self._ts.size

    @property
    def training_set(self):
        self._refresh()
        return self._ts, self._xs

    def add_segment(self, x, key=None):
        """Add a segment of shape (length, dim); returns the key to remove it with."""
        x = np.asarray(x, dtype=float).reshape(len(x), -1)
        if x.shape[1] != self.dim:
            raise ValueError("Segment has dimension %d, model expects %d" % (x.shape[1], self.dim))
        if key is None:
            key = 'seg-%d' % self._next_key
            self._next_key += 1
        if key in self._segments:
            raise KeyError("Segment %s is already in the model" % key)
        self._segments[key] = x
        self._stale = True
        return key

    def remove_segment(self, key):
        if key not in self._segments:
            raise KeyError("Segment %s was never added to the model" % key)
        del self._segments[key]
        self._stale = True

    def clear(self):
        self._segments = {}
        self._stale = True

    def load_training_set(self, ts, xs):
        """Replace the model by a fixed training set, as stored in a checkpoint."""
        self._segments = {}
        self._ts = np.asarray(ts, dtype=float)
        self._xs = np.asarray(xs, dtype=float).reshape(self._ts.size, self.dim)
        self._factorize()
        self._stale = False

    def _refresh(self):
        if not self._stale:
            return
        if self._segments:
            ts = np.concatenate([np.arange(len(x), dtype=float) for x in self._segments.values()])
            xs = np.concatenate(list(self._segments.values()), axis=0)
        else:
            ts, xs = np.zeros(0), np.zeros((0, self.dim))
        if ts.size > self.cap:
            display.vvvv("MOTIONSEG-GP-DEBUG: subsampling %d points to %d" % (ts.size, self.cap))
            keep = np.sort(self.rng.choice(ts.size, size=self.cap, replace=False))
            ts, xs = ts[keep], xs[keep]
        self._ts, self._xs = ts, xs
        self._factorize()
        self._stale = False

    def _factorize(self):
        self._tables = {}
        if self._ts.size == 0:
            self._factor, self._weights = None, None
            return
        cmat = covariance_matrix(self._ts, self.kernel, check=False)
        self._factor = cholesky_factor(cmat)
        self._weights = linalg.cho_solve(self._factor, self._xs, check_finite=False)

    def predict_many(self, t_hat):
        """Predictive means (n, dim) and variances (n,) at timesteps t_hat."""
        self._refresh()
        t_hat = np.atleast_1d(np.asarray(t_hat, dtype=float))
        prior_var = kernel_eval(t_hat, t_hat, self.kernel)
        if self._factor is None:
            return np.zeros((t_hat.size, self.dim)), np.maximum(prior_var, self.variance_floor)
        kvec = kernel_eval(self._ts[:, None], t_hat[None, :], self.kernel)
        mean = kvec.T.dot(self._weights)
        reduction = np.sum(kvec * linalg.cho_solve(self._factor, kvec, check_finite=False), axis=0)
        var = prior_var - reduction
        if np.any(var < self.variance_floor):
            display.vvvv("MOTIONSEG-GP-DEBUG: clamped %d predictive variances"
                         % np.sum(var < self.variance_floor))
            var = np.maximum(var, self.variance_floor)
        return mean, var

    def predictive_table(self, length):
        """Cached predictive means/variances for within-segment timesteps 0..length-1."""
        self._refresh()
        if length not in self._tables:
            self._tables[length] = self.predict_many(np.arange(length))
        return self._tables[length]

    def segment_loglik(self, x):
        x = np.asarray(x, dtype=float).reshape(len(x), -1)
        mean, var = self.predictive_table(len(x))
        return float(np.sum(-0.5 * (LOG_2PI + np.log(var)[:, None] + (x - mean) ** 2 / var[:, None])))

    def to_dict(self):
        ts, xs = self.training_set
        return {'ts': ts.tolist(), 'xs': xs.tolist()}


def predict(model, t_hat, dim):
    """Predictive (mean, var) of dimension dim at a single timestep."""
    mean, var = model.predict_many([t_hat])
    return float(mean[0, dim]), float(var[0])


def segment_loglik(model, x):
    return model.segment_loglik(x)


def add_segment(model, x, key=None):
    return model.add_segment(x, key=key)


def remove_segment(model, key):
    model.remove_segment(key)
    return model
