"""Bernstein algebra and extraction operators.

Each element carries an extraction matrix C of shape (n, (p+1)^2) whose row
a holds the tensor-product Bernstein coefficients of basis function a on
that element.  Bernstein coefficients are flattened with the first
parametric index fastest: column k = (p+1)*j + i for coefficient (i, j),
0-based.  Bezier control points follow as B = C^T P.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DegenerateBasisError, DomainError

SUPPORTED_DEGREES = (3, 5)


def bernstein_1d(p: int, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All univariate Bernstein polynomials of degree p with derivatives.

    Parameters
    ----------
    p : int
        Polynomial degree.
    x : float or array
        Evaluation points in [0, 1].

    Returns
    -------
    vals, d1, d2 : ndarray, shape (p+1,) + shape(x)
    """
    x = np.asarray(x, dtype=float)

    def basis(q, t):
        out = np.empty((q + 1,) + t.shape)
        for k in range(q + 1):
            out[k] = comb(q, k) * t**k * (1.0 - t) ** (q - k)
        return out

    b = basis(p, x)
    lower = basis(p - 1, x) if p >= 1 else None
    lower2 = basis(p - 2, x) if p >= 2 else None

    d1 = np.zeros_like(b)
    d2 = np.zeros_like(b)
    for k in range(p + 1):
        if p >= 1:
            lo = lower[k - 1] if k - 1 >= 0 else 0.0
            hi = lower[k] if k <= p - 1 else 0.0
            d1[k] = p * (lo - hi)
        if p >= 2:
            t0 = lower2[k - 2] if k - 2 >= 0 else 0.0
            t1 = lower2[k - 1] if 0 <= k - 1 <= p - 2 else 0.0
            t2 = lower2[k] if k <= p - 2 else 0.0
            d2[k] = p * (p - 1) * (t0 - 2 * t1 + t2)
    return b, d1, d2


def bernstein_eval(p: int, xi: float, eta: float):
    """Tensor-product Bernstein basis with first and second derivatives.

    Returns ``(vals, d1, d2)`` where vals has length (p+1)^2, d1 columns are
    (d/dxi, d/deta) and d2 columns are (xixi, xieta, etaeta).  Raises
    DomainError off the parent element [0,1]^2.
    """
    if not (0.0 <= xi <= 1.0 and 0.0 <= eta <= 1.0):
        raise DomainError(f"({xi}, {eta}) outside the parent element [0,1]^2")
    bu, du, d2u = bernstein_1d(p, float(xi))
    bv, dv, d2v = bernstein_1d(p, float(eta))
    n = (p + 1) * (p + 1)
    vals = np.empty(n)
    d1 = np.empty((n, 2))
    d2 = np.empty((n, 3))
    for j in range(p + 1):
        for i in range(p + 1):
            k = (p + 1) * j + i
            vals[k] = bu[i] * bv[j]
            d1[k, 0] = du[i] * bv[j]
            d1[k, 1] = bu[i] * dv[j]
            d2[k, 0] = d2u[i] * bv[j]
            d2[k, 1] = du[i] * dv[j]
            d2[k, 2] = bu[i] * d2v[j]
    return vals, d1, d2


def bernstein_table(p: int, pts: np.ndarray):
    """Vectorized ``bernstein_eval`` over an (m, 2) array of points.

    Returns arrays of shapes (n, m), (n, m, 2) and (n, m, 3).
    """
    pts = np.asarray(pts, dtype=float)
    if pts.min() < 0.0 or pts.max() > 1.0:
        raise DomainError("evaluation points outside the parent element")
    bu, du, d2u = bernstein_1d(p, pts[:, 0])
    bv, dv, d2v = bernstein_1d(p, pts[:, 1])
    n = (p + 1) * (p + 1)
    m = pts.shape[0]
    vals = np.empty((n, m))
    d1 = np.empty((n, m, 2))
    d2 = np.empty((n, m, 3))
    for j in range(p + 1):
        for i in range(p + 1):
            k = (p + 1) * j + i
            vals[k] = bu[i] * bv[j]
            d1[k, :, 0] = du[i] * bv[j]
            d1[k, :, 1] = bu[i] * dv[j]
            d2[k, :, 0] = d2u[i] * bv[j]
            d2[k, :, 1] = du[i] * dv[j]
            d2[k, :, 2] = bu[i] * d2v[j]
    return vals, d1, d2


def elevation_matrix(p: int) -> np.ndarray:
    """Bezier degree-elevation matrix from degree p to p+1, shape (p+2, p+1)."""
    E = np.zeros((p + 2, p + 1))
    for k in range(p + 2):
        a = k / (p + 1)
        if k - 1 >= 0:
            E[k, k - 1] += a
        if k <= p:
            E[k, k] += 1.0 - a
    return E


_E35 = elevation_matrix(4) @ elevation_matrix(3)  # cubic -> quintic, (6, 4)


def degree_elevate_2(coeffs) -> np.ndarray:
    """Elevate bi-cubic Bernstein coefficients twice to bi-quintic.

    Accepts a 16-vector (first index fastest) or a (4, 4) grid and returns
    the matching 36-vector or (6, 6) grid representing the same polynomial.
    """
    c = np.asarray(coeffs, dtype=float)
    flat = c.ndim == 1
    if flat:
        c = c.reshape(4, 4, order="F")
    out = _E35 @ c @ _E35.T
    return out.reshape(36, order="F") if flat else out


@dataclass
class ElementExtraction:
    """Extraction operator of one element.

    ``basis`` lists the supported basis-function (vertex) ids; ``coeffs``
    holds one row of (degree+1)^2 Bernstein coefficients per basis
    function; ``rational`` marks elements evaluated through the rational
    form (restricted-support construction only).
    """

    element: int
    degree: int
    basis: np.ndarray
    coeffs: np.ndarray
    rational: bool = False

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=int)
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.degree not in SUPPORTED_DEGREES:
            raise DomainError(f"unsupported degree {self.degree}")
        n = (self.degree + 1) ** 2
        if self.coeffs.shape != (len(self.basis), n):
            raise DomainError("coefficient matrix shape does not match basis list")

    @property
    def n_basis(self) -> int:
        return len(self.basis)

    def weight_coeffs(self) -> np.ndarray:
        """Bernstein coefficients of the denominator (column sums)."""
        return self.coeffs.sum(axis=0)


def evaluate_basis(ext: ElementExtraction, xi: float, eta: float):
    """Values and first/second partials of all supported basis functions.

    Applies the rational form when the element is marked rational.
    Returns ``(vals, d1, d2)`` shaped (n,), (n, 2), (n, 3).
    """
    b, db, d2b = bernstein_eval(ext.degree, xi, eta)
    vals = ext.coeffs @ b
    d1 = ext.coeffs @ db
    d2 = ext.coeffs @ d2b
    if ext.rational:
        return rationalize(vals, d1, d2, element=ext.element)
    return vals, d1, d2


def rationalize(values, d1, d2, element=None):
    """Divide a polynomial basis bundle by its sum, quotient-rule derivatives.

    The denominator W is the sum of the input values; raises
    DegenerateBasisError when W <= 0 at the evaluation point.
    """
    values = np.asarray(values, dtype=float)
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    w = values.sum()
    if w <= 0.0:
        raise DegenerateBasisError(
            f"basis denominator {w} is not positive", element=element
        )
    dw = d1.sum(axis=0)
    d2w = d2.sum(axis=0)
    r = values / w
    r1 = (d1 - np.outer(r, dw)) / w
    r2 = np.empty_like(d2)
    # second derivatives: R_ab = (N_ab - R_a W_b - R_b W_a - R W_ab) / W
    r2[:, 0] = (d2[:, 0] - 2 * r1[:, 0] * dw[0] - r * d2w[0]) / w
    r2[:, 1] = (d2[:, 1] - r1[:, 0] * dw[1] - r1[:, 1] * dw[0] - r * d2w[1]) / w
    r2[:, 2] = (d2[:, 2] - 2 * r1[:, 1] * dw[1] - r * d2w[2]) / w
    return r, r1, r2


def bezier_points(ext: ElementExtraction, positions: np.ndarray) -> np.ndarray:
    """Bezier control points B = C^T P of the element, shape ((p+1)^2, 3)."""
    return ext.coeffs.T @ positions[ext.basis]


def bezier_points_record(ext: ElementExtraction, positions: np.ndarray) -> dict:
    """JSON-ready per-element Bezier control point record."""
    return {
        "element": int(ext.element),
        "degree": int(ext.degree),
        "points": bezier_points(ext, positions).tolist(),
    }
