"""Gauss-Legendre helpers and geometrically graded meshes."""
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_rule(edges, order: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite Gauss-Legendre rule on sorted panel edges."""
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(order)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def geometric_edges(length: float, floor: float, ratio: float = 0.5) -> np.ndarray:
    """Increasing edges ``floor' <= ... <= length`` refined geometrically toward 0.

    The smallest edge is the first value below ``floor``; 0 itself is not included.
    """
    edges = [length]
    u = length
    while u > floor:
        u *= ratio
        edges.append(u)
    return np.array(edges[::-1])


def merge_edges(*groups, lo: float | None = None, hi: float | None = None) -> np.ndarray:
    e = np.unique(np.concatenate([np.atleast_1d(np.asarray(g, dtype=float)) for g in groups]))
    if lo is not None:
        e = e[e >= lo]
    if hi is not None:
        e = e[e <= hi]
    return e
