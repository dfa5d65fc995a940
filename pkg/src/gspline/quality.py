"""Shell-validity analysis of a surface.

Off-midsurface points live at x + zeta * n with zeta in [-t/2, t/2].  With
the through-thickness metric linearized as g_ab = a_ab - 2 zeta b_ab, the
area element sqrt(det g) must stay real at every quadrature point for a
shell simulation to be possible; the smallest thickness at which det g
turns nonpositive is the surface-quality measure reported here.  Surface
quadrature uses (p+1)^2 Gauss-Legendre points per element and the
through-thickness rule is 5-point Gauss-Lobatto, whose endpoint nodes at
the outer fibers make it the most conservative choice.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .evaluate import GSplineSurface, SurfaceFrame, frame


@dataclass(frozen=True)
class QuadratureRule:
    kind: str  # "gauss_legendre" | "gauss_lobatto"
    points: np.ndarray
    weights: np.ndarray


def gauss_legendre(n: int, a: float = 0.0, b: float = 1.0) -> QuadratureRule:
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return QuadratureRule("gauss_legendre", a + half * (x + 1.0), half * w)


_LOBATTO5_X = np.array([-1.0, -math.sqrt(3.0 / 7.0), 0.0,
                        math.sqrt(3.0 / 7.0), 1.0])
_LOBATTO5_W = np.array([0.1, 49.0 / 90.0, 32.0 / 45.0, 49.0 / 90.0, 0.1])


def gauss_lobatto5(a: float, b: float) -> QuadratureRule:
    """5-point Gauss-Lobatto rule on [a, b]; includes both endpoints."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return QuadratureRule("gauss_lobatto", mid + half * _LOBATTO5_X,
                          half * _LOBATTO5_W)


def shell_metric_det(fr: SurfaceFrame, zeta: float) -> float:
    """det(a - 2 zeta b) of the linearized through-thickness metric."""
    g = fr.metric - 2.0 * zeta * fr.curvature
    return float(g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0])


@dataclass
class QualityReport:
    variant: str
    thickness: float  # smallest invalid thickness found (inf when valid)
    valid_up_to: float  # largest thickness confirmed valid
    location: dict | None  # element, xi, eta, zeta of the first invalidity
    element_min_det: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "variant": self.variant,
            "min_invalid_thickness": (
                None if math.isinf(self.thickness) else self.thickness),
            "valid_up_to": self.valid_up_to,
            "location": self.location,
            "element_min_det": {str(k): v for k, v in
                                sorted(self.element_min_det.items())},
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_csv_row(self) -> str:
        t = "inf" if math.isinf(self.thickness) else f"{self.thickness:.6g}"
        loc = -1 if self.location is None else self.location["element"]
        return f"{self.variant},{t},{self.valid_up_to:.6g},{loc}"


def _quadrature_frames(surface: GSplineSurface):
    """Frames at all surface quadrature points, computed once per surface."""
    out = []
    for e in range(surface.cnet.n_faces):
        p = surface.degree(e)
        rule = gauss_legendre(p + 1)
        for eta in rule.points:
            for xi in rule.points:
                out.append((e, float(xi), float(eta),
                            frame(surface, e, float(xi), float(eta))))
    return out


def is_valid_at_thickness(surface: GSplineSurface, t: float, frames=None):
    """Check det g > 0 at every surface point and Lobatto fiber.

    Returns ``(valid, failure)`` where failure describes the first
    nonpositive area element (element, xi, eta, zeta, det).
    """
    if t <= 0.0:
        raise DomainError("thickness must be positive")
    frames = frames if frames is not None else _quadrature_frames(surface)
    rule = gauss_lobatto5(-0.5 * t, 0.5 * t)
    for e, xi, eta, fr in frames:
        for zeta in rule.points:
            d = shell_metric_det(fr, float(zeta))
            if d <= 0.0:
                return False, {"element": e, "xi": xi, "eta": eta,
                               "zeta": float(zeta), "det": d}
    return True, None


def element_min_dets(surface: GSplineSurface, t: float, frames=None):
    """Per-element minimum of det g over quadrature points at thickness t."""
    frames = frames if frames is not None else _quadrature_frames(surface)
    rule = gauss_lobatto5(-0.5 * t, 0.5 * t)
    mins: dict[int, float] = {}
    for e, xi, eta, fr in frames:
        d = min(shell_metric_det(fr, float(z)) for z in rule.points)
        mins[e] = min(mins.get(e, np.inf), d)
    return mins


def min_invalid_thickness(surface: GSplineSurface, t_lo: float = 0.01,
                          t_hi: float = 100.0, tol: float = 0.005,
                          guard_span: float = 0.1) -> QualityReport:
    """Bisect for the smallest thickness with an invalid area element.

    Requires validity at ``t_lo``; returns thickness = inf when the
    surface stays valid through ``t_hi`` (e.g. flat plates).  Because
    monotonicity of invalidity in t is only expected, not guaranteed, a
    dense guard scan just below the bracket re-runs the bisection if it
    uncovers an earlier failure.
    """
    frames = _quadrature_frames(surface)
    ok_lo, fail = is_valid_at_thickness(surface, t_lo, frames)
    if not ok_lo:
        raise DomainError(
            f"surface already invalid at t = {t_lo} (element "
            f"{fail['element']})")
    ok_hi, fail_hi = is_valid_at_thickness(surface, t_hi, frames)
    if ok_hi:
        return QualityReport(
            variant=surface.variant, thickness=math.inf, valid_up_to=t_hi,
            location=None, element_min_det=element_min_dets(surface, t_hi, frames))

    lo, hi = t_lo, t_hi
    last_fail = fail_hi
    for _ in range(200):
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            ok, fail = is_valid_at_thickness(surface, mid, frames)
            if ok:
                lo = mid
            else:
                hi = mid
                last_fail = fail
        # guard: confirm validity on a dense sweep below the bracket
        retry = None
        for t_probe in np.linspace(max(t_lo, lo - guard_span), lo, 11):
            ok, fail = is_valid_at_thickness(surface, float(t_probe), frames)
            if not ok:
                retry = float(t_probe)
                last_fail = fail
                break
        if retry is None:
            break
        hi = retry
        lo = t_lo
    return QualityReport(
        variant=surface.variant, thickness=hi, valid_up_to=lo,
        location=last_fail,
        element_min_det=element_min_dets(surface, hi, frames))
