"""Quadrature rules on the reference triangle and the unit segment."""

import numpy as np

# Symmetric triangle rules (Dunavant), barycentric groups with weights
# normalized to sum 1 over the triangle.  Entries: (degree, groups), each
# group either ("S3",), ("S21", a) for (1-2a, a, a) orbits or
# ("S111", a, b) for the 6-point orbit of (1-a-b, a, b).
_DUNAVANT = {
    1: [(1.0, ("S3",))],
    2: [(1.0 / 3.0, ("S21", 1.0 / 6.0))],
    4: [
        (0.223381589678011, ("S21", 0.445948490915965)),
        (0.109951743655322, ("S21", 0.091576213509771)),
    ],
    6: [
        (0.116786275726379, ("S21", 0.249286745170910)),
        (0.050844906370207, ("S21", 0.063089014491502)),
        (0.082851075618374, ("S111", 0.310352451033785, 0.636502499121399)),
    ],
}


def _orbit(group):
    kind = group[0]
    if kind == "S3":
        return [(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)]
    if kind == "S21":
        a = group[1]
        b = 1.0 - 2.0 * a
        return [(b, a, a), (a, b, a), (a, a, b)]
    a, b = group[1], group[2]
    c = 1.0 - a - b
    return [(c, a, b), (a, c, b), (a, b, c), (c, b, a), (b, c, a), (b, a, c)]


def _dunavant_rule(degree):
    pts, wts = [], []
    for w, group in _DUNAVANT[degree]:
        for lam in _orbit(group):
            pts.append((lam[1], lam[2]))  # reference coords (x, y) = (lam1, lam2)
            wts.append(0.5 * w)
    return np.asarray(pts), np.asarray(wts)


def _collapsed_rule(degree):
    """Duffy-transformed tensor Gauss rule, exact for any polynomial degree."""
    m = (degree + 3) // 2 + 1
    g, w = np.polynomial.legendre.leggauss(m)
    g = 0.5 * (g + 1.0)
    w = 0.5 * w
    pts, wts = [], []
    for i in range(m):
        for j in range(m):
            u, v = g[i], g[j]
            pts.append((u, v * (1.0 - u)))
            wts.append(w[i] * w[j] * (1.0 - u))
    return np.asarray(pts), np.asarray(wts)


def triangle_rule(degree):
    """Points (n,2) and weights (sum 1/2) exact for polynomials of `degree`.

    Uses compact symmetric rules where tabulated, a collapsed tensor rule
    otherwise.
    """
    if degree < 1:
        degree = 1
    for d in sorted(_DUNAVANT):
        if d >= degree:
            return _dunavant_rule(d)
    return _collapsed_rule(degree)


def segment_rule(degree):
    """Gauss points/weights on [0,1] exact for polynomials of `degree`."""
    m = degree // 2 + 1
    g, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (g + 1.0), 0.5 * w
