import numpy as np

from hkt import dual as dn
from hkt.chart import EndomorphismField, MetricField, ScalarField


def central_difference(fn, x, step=1e-5):
    """Central differences of ``fn`` along every coordinate, derivative axis after the batch axis."""
    x = np.asarray(x, dtype=float)
    out = []
    for i in range(x.shape[-1]):
        e = np.zeros(x.shape[-1])
        e[i] = step
        out.append((np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2 * step))
    return np.stack(out, axis=1)


def cubic_scalar(chart, seed=0):
    """A random cubic polynomial in the coordinates."""
    rng = np.random.default_rng(seed)
    n = chart.dim
    a = rng.normal(size=n)
    b = rng.normal(size=(n, n))
    c = rng.normal(size=(n, n, n)) * 0.3

    def fn(x):
        lin = dn.einsum("i,...i->...", a, x)
        quad = dn.einsum("ij,...i,...j->...", b, x, x)
        cub = dn.einsum("ijk,...i,...j,...k->...", c, x, x, x)
        return lin + quad + cub

    return ScalarField(chart, fn)


def euclid(chart):
    return MetricField.euclidean(chart)


def const_J(chart, m):
    return EndomorphismField.constant(chart, m)
