"""Isoparametric Bubnov-Galerkin solvers on spline surfaces.

The same basis functions parameterize the geometry and span the trial and
weighting spaces.  A Poisson model problem with homogeneous Dirichlet data
drives the convergence study; a membrane eigenvalue problem with
consistent or row-sum lumped mass matrices mirrors the modal tests.
Quadrature uses (p+1)^2 Gauss-Legendre points per element, so 4x4 on
bi-cubic and 6x6 on bi-quintic elements.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    EigensolverError,
    LumpingError,
    ResourceError,
    SingularParameterizationError,
    TopologyError,
)
from .evaluate import GSplineSurface, map_point
from .extraction import bernstein_table
from .quality import gauss_legendre
from .refine import refine


def default_source(x, y):
    """Forcing of the model problem -lap(u) = f with u = sin(pi x) sin(pi y)."""
    return 2.0 * np.pi**2 * np.sin(np.pi * x) * np.sin(np.pi * y)


def exact_solution(x, y):
    return np.sin(np.pi * x) * np.sin(np.pi * y)


def exact_gradient(x, y):
    return (np.pi * np.cos(np.pi * x) * np.sin(np.pi * y),
            np.pi * np.sin(np.pi * x) * np.cos(np.pi * y))


# ----------------------------------------------------------------------
# element tables


def element_tables(surface: GSplineSurface, e: int, pts: np.ndarray):
    """Basis ids, values and parametric gradients at sample points.

    Applies the rational quotient rule on rational elements.  Shapes:
    ids (n,), vals (n, m), grads (n, m, 2).
    """
    ext = surface.extraction(e)
    bt, dbt, _ = bernstein_table(ext.degree, pts)
    vals = ext.coeffs @ bt
    grads = np.stack([ext.coeffs @ dbt[:, :, 0], ext.coeffs @ dbt[:, :, 1]],
                     axis=2)
    if ext.rational:
        w = vals.sum(axis=0)
        dw = grads.sum(axis=0)
        vals = vals / w
        grads = (grads - vals[:, :, None] * dw[None, :, :]) / w[None, :, None]
    return ext.basis, vals, grads


def _element_geometry(surface, e, pts, ids, vals, grads):
    """Planar Jacobians and weights detail for assembly (z is ignored)."""
    P = surface.net.positions[ids][:, :2]
    x = np.einsum("nm,nd->md", vals, P)
    J = np.einsum("nma,nd->mda", grads, P)  # J[m, d, a] = dx_d / dxi_a
    det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    scale = np.abs(J).max()
    if np.abs(det).min() <= 1e-14 * max(scale * scale, 1e-30):
        raise SingularParameterizationError(
            f"singular Jacobian in element {e}", element=e)
    inv = np.empty_like(J)
    inv[:, 0, 0] = J[:, 1, 1] / det
    inv[:, 0, 1] = -J[:, 0, 1] / det
    inv[:, 1, 0] = -J[:, 1, 0] / det
    inv[:, 1, 1] = J[:, 0, 0] / det
    # physical gradients: dN/dx_d = dN/dxi_a * (J^-1)[a, d]
    gp = np.einsum("nma,mad->nmd", grads, inv)
    return x, np.abs(det), gp


def _quad_points(p: int):
    rule = gauss_legendre(p + 1)
    xs, ws = rule.points, rule.weights
    pts = np.array([(xi, eta) for eta in xs for xi in xs])
    wts = np.array([wx * wy for wy in ws for wx in ws])
    return pts, wts


def boundary_functions(surface: GSplineSurface) -> set[int]:
    """Basis functions with nonzero trace on the domain boundary.

    Detected from the extraction rows along boundary sides; for all
    constructions here these are exactly the boundary-vertex functions.
    """
    cnet = surface.cnet
    if not cnet.boundary_edge.any():
        raise TopologyError("net has no boundary")
    out: set[int] = set()
    for f in range(cnet.n_faces):
        ext = surface.extraction(f)
        p = ext.degree
        for s in range(4):
            if not cnet.boundary_edge[int(cnet.face_edges[f][s])]:
                continue
            if s == 0:
                cols = [i for i in range(p + 1)]
            elif s == 1:
                cols = [j * (p + 1) + p for j in range(p + 1)]
            elif s == 2:
                cols = [p * (p + 1) + i for i in range(p + 1)]
            else:
                cols = [j * (p + 1) for j in range(p + 1)]
            mask = np.abs(ext.coeffs[:, cols]).max(axis=1) > 1e-12
            out.update(int(a) for a in ext.basis[mask])
    return out


@dataclass
class GalerkinSystem:
    """Assembled matrices with Dirichlet bookkeeping (full numbering)."""

    surface: GSplineSurface
    K: sp.csr_matrix
    load: np.ndarray
    boundary: set[int]
    M: sp.csr_matrix | None = None
    mass_kind: str | None = None

    @property
    def n(self) -> int:
        return self.K.shape[0]

    @property
    def active(self) -> np.ndarray:
        return np.array(sorted(set(range(self.n)) - self.boundary), dtype=int)


def assemble_poisson(surface: GSplineSurface, source=default_source,
                     with_mass: bool = False) -> GalerkinSystem:
    """Stiffness matrix and load vector of the Poisson model problem."""
    n = surface.cnet.n_vertices
    rows, cols, vals = [], [], []
    mrows, mcols, mvals = [], [], []
    load = np.zeros(n)
    for e in range(surface.cnet.n_faces):
        p = surface.degree(e)
        pts, wts = _quad_points(p)
        ids, N, dN = element_tables(surface, e, pts)
        x, adet, gp = _element_geometry(surface, e, pts, ids, N, dN)
        w = wts * adet
        Ke = np.einsum("nmd,kmd,m->nk", gp, gp, w)
        fe = N @ (w * source(x[:, 0], x[:, 1]))
        idx = np.asarray(ids, dtype=int)
        rows.append(np.repeat(idx, len(idx)))
        cols.append(np.tile(idx, len(idx)))
        vals.append(Ke.reshape(-1))
        np.add.at(load, idx, fe)
        if with_mass:
            Me = np.einsum("nm,km,m->nk", N, N, w)
            mrows.append(np.repeat(idx, len(idx)))
            mcols.append(np.tile(idx, len(idx)))
            mvals.append(Me.reshape(-1))
    K = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n))
    M = None
    if with_mass:
        M = sp.csr_matrix(
            (np.concatenate(mvals), (np.concatenate(mrows), np.concatenate(mcols))),
            shape=(n, n))
    return GalerkinSystem(surface=surface, K=K, load=load,
                          boundary=boundary_functions(surface), M=M,
                          mass_kind="consistent" if with_mass else None)


def solve_poisson(system: GalerkinSystem, dirichlet: dict | None = None):
    """Solve with Dirichlet data (default homogeneous); returns all
    coefficients in the full basis numbering."""
    n = system.n
    u = np.zeros(n)
    if dirichlet:
        for a, val in dirichlet.items():
            u[a] = val
    act = system.active
    rhs = system.load[act] - system.K[act].dot(u)
    Kaa = system.K[act][:, act]
    u[act] = spla.spsolve(Kaa.tocsc(), rhs)
    return u


def galerkin_residual(system: GalerkinSystem, u: np.ndarray) -> float:
    """Max weak-form residual over active basis functions."""
    act = system.active
    r = system.K.dot(u) - system.load
    return float(np.abs(r[act]).max()) if act.size else 0.0


# ----------------------------------------------------------------------
# errors and convergence


def compute_errors(surface: GSplineSurface, coeffs: np.ndarray,
                   exact=exact_solution, exact_grad=exact_gradient,
                   linf_resolution: int = 10):
    """Relative L2, Linf and H1 errors against a closed-form solution."""
    num_l2 = den_l2 = 0.0
    num_h1g = den_h1g = 0.0
    num_inf = den_inf = 0.0
    grid = np.linspace(0.0, 1.0, linf_resolution)
    grid_pts = np.array([(xi, eta) for eta in grid for xi in grid])
    for e in range(surface.cnet.n_faces):
        p = surface.degree(e)
        pts, wts = _quad_points(p)
        ids, N, dN = element_tables(surface, e, pts)
        x, adet, gp = _element_geometry(surface, e, pts, ids, N, dN)
        w = wts * adet
        ue = exact(x[:, 0], x[:, 1])
        gx, gy = exact_grad(x[:, 0], x[:, 1])
        ca = coeffs[np.asarray(ids, dtype=int)]
        uh = ca @ N
        guh = np.einsum("n,nmd->md", ca, gp)
        num_l2 += float(np.sum(w * (uh - ue) ** 2))
        den_l2 += float(np.sum(w * ue**2))
        num_h1g += float(np.sum(w * ((guh[:, 0] - gx) ** 2 + (guh[:, 1] - gy) ** 2)))
        den_h1g += float(np.sum(w * (gx**2 + gy**2)))
        ids2, N2, dN2 = element_tables(surface, e, grid_pts)
        x2 = np.einsum("nm,nd->md", N2, surface.net.positions[ids2][:, :2])
        uh2 = coeffs[np.asarray(ids2, dtype=int)] @ N2
        ue2 = exact(x2[:, 0], x2[:, 1])
        num_inf = max(num_inf, float(np.abs(uh2 - ue2).max()))
        den_inf = max(den_inf, float(np.abs(ue2).max()))
    return {
        "l2": math.sqrt(num_l2 / den_l2) if den_l2 else math.sqrt(num_l2),
        "linf": num_inf / den_inf if den_inf else num_inf,
        "h1": math.sqrt((num_l2 + num_h1g) / (den_l2 + den_h1g))
        if (den_l2 + den_h1g) else math.sqrt(num_l2 + num_h1g),
    }


def mean_element_size(surface: GSplineSurface) -> float:
    """Mean mapped diagonal length of the Bezier-mesh faces."""
    total = 0.0
    for e in range(surface.cnet.n_faces):
        c00 = map_point(surface, e, 0.0, 0.0)
        c11 = map_point(surface, e, 1.0, 1.0)
        c10 = map_point(surface, e, 1.0, 0.0)
        c01 = map_point(surface, e, 0.0, 1.0)
        total += 0.5 * (np.linalg.norm(c11 - c00) + np.linalg.norm(c01 - c10))
    return total / surface.cnet.n_faces


@dataclass
class ConvergenceReport:
    variant: str
    levels: list = field(default_factory=list)
    orders: dict = field(default_factory=dict)

    def finalize(self):
        self.orders = {}
        for key in ("l2", "linf", "h1"):
            errs = [lv[key] for lv in self.levels]
            self.orders[key] = [
                math.log(errs[i] / errs[i + 1]) / math.log(2.0)
                for i in range(len(errs) - 1)
            ]
        return self

    def to_json(self) -> str:
        return json.dumps(
            {"variant": self.variant, "levels": self.levels,
             "orders": self.orders},
            indent=2, sort_keys=True)

    def to_csv(self) -> str:
        lines = ["level,n_el,h,n_dof,l2,linf,h1"]
        for lv in self.levels:
            lines.append(
                f"{lv['level']},{lv['n_el']},{lv['h']:.8g},{lv['n_dof']},"
                f"{lv['l2']:.8e},{lv['linf']:.8e},{lv['h1']:.8e}")
        return "\n".join(lines) + "\n"

    def to_dat(self) -> str:
        lines = ["# h  e_l2  e_linf  e_h1"]
        for lv in self.levels:
            lines.append(f"{lv['h']:.8e} {lv['l2']:.8e} {lv['linf']:.8e} "
                         f"{lv['h1']:.8e}")
        return "\n".join(lines) + "\n"


def build_variant(net, variant: str) -> GSplineSurface:
    from .construct_c0 import build_c0
    from .construct_g1 import build_g1

    c0 = build_c0(net)
    if variant == "c0":
        return c0
    return build_g1(c0, variant)


def convergence_study(net0, variant: str, levels: int,
                      source=default_source, exact=exact_solution,
                      exact_grad=exact_gradient) -> ConvergenceReport:
    """Refine, rebuild from scratch, solve and record errors per level."""
    if levels > 6:
        raise ResourceError("convergence study capped at 6 levels")
    report = ConvergenceReport(variant=variant)
    net = net0
    for level in range(levels):
        if level > 0:
            net = refine(net)
        surface = build_variant(net, variant)
        system = assemble_poisson(surface, source=source)
        u = solve_poisson(system)
        errs = compute_errors(surface, u, exact=exact, exact_grad=exact_grad)
        report.levels.append({
            "level": level,
            "n_el": surface.cnet.n_faces,
            "n_dof": int(len(system.active)),
            "h": mean_element_size(surface),
            **errs,
        })
    return report.finalize()


# ----------------------------------------------------------------------
# eigenvalue problem


def assemble_membrane_eigen(surface: GSplineSurface,
                            mass_kind: str = "consistent") -> GalerkinSystem:
    """Stiffness and mass matrices of the Dirichlet membrane problem."""
    if mass_kind not in ("consistent", "lumped"):
        raise ValueError(f"unknown mass kind {mass_kind!r}")
    system = assemble_poisson(surface, with_mass=True)
    if mass_kind == "lumped":
        diag = np.asarray(system.M.sum(axis=1)).ravel()
        act = system.active
        if diag[act].min() <= 0.0:
            raise LumpingError(
                "row-sum lumping produced a nonpositive mass entry")
        system.M = sp.diags(diag).tocsr()
    system.mass_kind = mass_kind
    return system


@dataclass
class EigenReport:
    mass_kind: str
    eigenvalues: list
    residuals: list

    def to_json(self) -> str:
        return json.dumps(
            {"mass": self.mass_kind, "eigenvalues": self.eigenvalues,
             "residuals": self.residuals}, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        lines = ["mode,eigenvalue,residual"]
        for k, (lam, r) in enumerate(zip(self.eigenvalues, self.residuals), 1):
            lines.append(f"{k},{lam:.10e},{r:.3e}")
        return "\n".join(lines) + "\n"


def solve_generalized_eigen(system: GalerkinSystem, k: int = 6,
                            residual_tol: float = 1e-8) -> EigenReport:
    """k smallest eigenpairs of K v = lambda M v on the active set."""
    if system.M is None:
        raise ValueError("system was assembled without a mass matrix")
    act = system.active
    K = system.K[act][:, act].tocsc()
    M = system.M[act][:, act].tocsc()
    v0 = np.ones(K.shape[0])
    try:
        lams, vecs = spla.eigsh(K, k=k, M=M, sigma=0.0, which="LM", v0=v0)
    except Exception as exc:
        raise EigensolverError(f"shift-invert iteration failed: {exc}") from exc
    order = np.argsort(lams)
    lams, vecs = lams[order], vecs[:, order]
    residuals = []
    for i in range(k):
        r = K.dot(vecs[:, i]) - lams[i] * M.dot(vecs[:, i])
        denom = float(np.linalg.norm(K.dot(vecs[:, i])))
        residuals.append(float(np.linalg.norm(r)) / max(denom, 1e-300))
    if max(residuals) > residual_tol:
        raise EigensolverError(
            f"eigen residual {max(residuals):.3e} above {residual_tol}")
    return EigenReport(mass_kind=system.mass_kind or "consistent",
                       eigenvalues=[float(x) for x in lams],
                       residuals=residuals)


def unit_square_laplace_eigenvalues(k: int = 6):
    """Smallest Dirichlet Laplacian eigenvalues on the unit square."""
    vals = sorted((i * i + j * j) * np.pi**2
                  for i in range(1, 8) for j in range(1, 8))
    return vals[:k]
