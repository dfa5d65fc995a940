"""Surface type, geometric map, differential geometry and edge gluing.

The geometric map of element e is x(xi, eta) = sum_a P_a N_a(xi, eta) with
the element's extraction providing the basis.  Two elements meeting at an
edge are glued through per-element frame rotations so that both sides see
a common edge parameter; that gluing underlies the watertightness and
continuity diagnostics as well as the tangent-plane constraint assembly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InternalError, SingularParameterizationError
from .extraction import ElementExtraction, evaluate_basis
from .mesh import CNet, ControlNet, classify_elements, classify_vertices


@dataclass
class GSplineSurface:
    """A control net with one extraction operator per element.

    ``variant`` is one of ``"c0"``, ``"g1p"``, ``"g1r"``.  Degree and the
    rational flag live on the per-element extractions.
    """

    net: ControlNet
    extractions: list[ElementExtraction]
    variant: str

    def __post_init__(self):
        if self.variant not in ("c0", "g1p", "g1r"):
            raise DomainError(f"unknown construction variant {self.variant!r}")
        if len(self.extractions) != self.net.cnet.n_faces:
            raise InternalError("one extraction required per element")

    @property
    def cnet(self) -> CNet:
        return self.net.cnet

    def extraction(self, element: int) -> ElementExtraction:
        return self.extractions[element]

    def degree(self, element: int) -> int:
        return self.extractions[element].degree


@dataclass(frozen=True)
class SurfaceFrame:
    """First and second fundamental data of the surface at one point."""

    point: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    normal: np.ndarray
    metric: np.ndarray  # (2, 2) a_{ab} = a_a . a_b
    curvature: np.ndarray  # (2, 2) b_{ab} = d a_a / d(xi, eta)_b . n


def map_point(surface: GSplineSurface, element: int, xi: float, eta: float,
              nderiv: int = 0):
    """Evaluate the geometric map (optionally with 1st/2nd derivatives).

    Returns ``x`` (3,), or ``(x, J)`` with J (3, 2), or ``(x, J, H)`` with H
    columns (xixi, xieta, etaeta) for ``nderiv`` 0, 1, 2.
    """
    ext = surface.extraction(element)
    vals, d1, d2 = evaluate_basis(ext, xi, eta)
    P = surface.net.positions[ext.basis]
    x = vals @ P
    if nderiv == 0:
        return x
    J = d1.T @ P  # (2, 3) -> transpose below
    if nderiv == 1:
        return x, J.T
    H = d2.T @ P  # (3, 3): rows xixi, xieta, etaeta
    return x, J.T, H


def frame(surface: GSplineSurface, element: int, xi: float, eta: float,
          degenerate_tol: float = 1e-12) -> SurfaceFrame:
    """Tangents, unit normal, metric and curvature coefficients at a point.

    Raises SingularParameterizationError when the tangents are linearly
    dependent relative to ``degenerate_tol`` (scaled by the tangent size).
    """
    x, J, H = map_point(surface, element, xi, eta, nderiv=2)
    a1, a2 = J[:, 0], J[:, 1]
    cross = np.cross(a1, a2)
    norm = np.linalg.norm(cross)
    scale = max(np.linalg.norm(a1) * np.linalg.norm(a2), degenerate_tol)
    if norm <= degenerate_tol * scale:
        raise SingularParameterizationError(
            f"degenerate tangents at element {element}, ({xi}, {eta})",
            element=element, uv=(xi, eta),
        )
    n = cross / norm
    metric = np.array([[a1 @ a1, a1 @ a2], [a2 @ a1, a2 @ a2]])
    b11 = H[0] @ n
    b12 = H[1] @ n
    b22 = H[2] @ n
    curvature = np.array([[b11, b12], [b12, b22]])
    return SurfaceFrame(point=x, a1=a1, a2=a2, normal=n, metric=metric,
                        curvature=curvature)


def principal_curvatures(fr: SurfaceFrame) -> tuple[float, float]:
    """Eigenvalues of the shape operator a^{-1} b (largest magnitude first)."""
    shape_op = np.linalg.solve(fr.metric, fr.curvature)
    k = np.linalg.eigvals(shape_op)
    k = np.real_if_close(k)
    order = np.argsort(-np.abs(k))
    return float(k[order[0]]), float(k[order[1]])


# ----------------------------------------------------------------------
# edge frames: rotations of the parent square


def rotation_offset_matrix(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Affine map frame -> stored parameters for a quarter-turn index k.

    stored = offset + A @ frame, with frame corner (0,0) at stored loop
    corner k and the frame axes following the counterclockwise loop.
    """
    if k == 0:
        return np.zeros(2), np.eye(2)
    if k == 1:
        return np.array([1.0, 0.0]), np.array([[0.0, -1.0], [1.0, 0.0]])
    if k == 2:
        return np.array([1.0, 1.0]), np.array([[-1.0, 0.0], [0.0, -1.0]])
    if k == 3:
        return np.array([0.0, 1.0]), np.array([[0.0, 1.0], [-1.0, 0.0]])
    raise DomainError(f"rotation index {k} out of range")


def rotated_params(k: int, x: float, y: float) -> tuple[float, float]:
    """Stored (xi, eta) of frame coordinates (x, y) under rotation k."""
    off, A = rotation_offset_matrix(k)
    uv = off + A @ np.array([x, y])
    return float(uv[0]), float(uv[1])


def rotate_grid_index(k: int, p: int, i: int, j: int) -> tuple[int, int]:
    """Stored (i, j) grid slot of frame slot (i, j) on a (p+1)^2 grid."""
    if k == 0:
        return i, j
    if k == 1:
        return p - j, i
    if k == 2:
        return p - i, p - j
    if k == 3:
        return j, p - i
    raise DomainError(f"rotation index {k} out of range")


@dataclass(frozen=True)
class EdgeFrames:
    """The two elements at an interior edge in their gluing frames.

    ``right`` traverses v1 -> v2 in its counterclockwise loop and sees the
    edge as its eta=0 side with xi the edge parameter; ``left`` sees it as
    its xi=0 side with eta the edge parameter.  ``rot_right``/``rot_left``
    are the quarter-turn indices from frame to stored parameters.
    """

    v1: int
    v2: int
    left: int
    right: int
    rot_left: int
    rot_right: int


def edge_frames(cnet: CNet, edge: int, v1: int | None = None) -> EdgeFrames:
    """Gluing frames of an interior edge.

    ``v1`` selects the edge endpoint placed at the shared frame origin;
    by default the lower vertex index.
    """
    u, v = (int(x) for x in cnet.edges[edge])
    if v1 is None:
        v1 = min(u, v)
    v2 = v if v1 == u else u
    if {v1, v2} != {u, v}:
        raise DomainError(f"vertex {v1} is not an endpoint of edge {edge}")
    f_right = cnet.directed_face(v1, v2)
    f_left = cnet.directed_face(v2, v1)
    if f_right is None or f_left is None:
        raise DomainError(f"edge {edge} is a boundary edge")
    loop_r = [int(x) for x in cnet.faces[f_right]]
    loop_l = [int(x) for x in cnet.faces[f_left]]
    return EdgeFrames(
        v1=v1, v2=v2, left=f_left, right=f_right,
        rot_left=loop_l.index(v1), rot_right=loop_r.index(v1),
    )


def edge_side_params(frames: EdgeFrames, t: float, side: str):
    """Stored (xi, eta) of edge parameter t on the given side ("left"/"right")."""
    if side == "right":
        return rotated_params(frames.rot_right, t, 0.0)
    if side == "left":
        return rotated_params(frames.rot_left, 0.0, t)
    raise DomainError(f"side must be 'left' or 'right', not {side!r}")


def _frame_derivatives(surface, element, rot, x, y):
    """Basis ids, values and frame-axis first/second derivatives."""
    xi, eta = rotated_params(rot, x, y)
    ext = surface.extraction(element)
    vals, d1, d2 = evaluate_basis(ext, xi, eta)
    _, A = rotation_offset_matrix(rot)
    fd1 = d1 @ A
    H = np.empty_like(d2)
    for r in range(d2.shape[0]):
        Hs = np.array([[d2[r, 0], d2[r, 1]], [d2[r, 1], d2[r, 2]]])
        Hf = A.T @ Hs @ A
        H[r] = (Hf[0, 0], Hf[0, 1], Hf[1, 1])
    return ext.basis, vals, fd1, H


def edge_jumps(surface: GSplineSurface, edge: int, order: int,
               samples: int = 20, v1: int | None = None) -> float:
    """Max per-basis-function derivative jump across an interior edge.

    Order 0 compares traces, order 1 the transversal derivative in the
    glued chart, order 2 the transversal and mixed second derivatives.
    Functions missing on one side count as zero there.
    """
    if order not in (0, 1, 2):
        raise DomainError("order must be 0, 1 or 2")
    fr = edge_frames(surface.cnet, edge, v1)
    worst = 0.0
    ts = np.linspace(0.0, 1.0, samples)
    for t in ts:
        ids_r, vals_r, d1_r, d2_r = _frame_derivatives(
            surface, fr.right, fr.rot_right, float(t), 0.0)
        ids_l, vals_l, d1_l, d2_l = _frame_derivatives(
            surface, fr.left, fr.rot_left, 0.0, float(t))
        right = {int(a): i for i, a in enumerate(ids_r)}
        left = {int(a): i for i, a in enumerate(ids_l)}
        for a in set(right) | set(left):
            ir, il = right.get(a), left.get(a)
            if order == 0:
                vr = vals_r[ir] if ir is not None else 0.0
                vl = vals_l[il] if il is not None else 0.0
                worst = max(worst, abs(vr - vl))
            elif order == 1:
                # glued transversal coordinate w: w = eta on the right,
                # w = -xi on the left
                vr = d1_r[ir, 1] if ir is not None else 0.0
                vl = -d1_l[il, 0] if il is not None else 0.0
                worst = max(worst, abs(vr - vl))
            else:
                vr2 = d2_r[ir, 2] if ir is not None else 0.0
                vl2 = d2_l[il, 0] if il is not None else 0.0
                vrm = d2_r[ir, 1] if ir is not None else 0.0
                vlm = -d2_l[il, 1] if il is not None else 0.0
                worst = max(worst, abs(vr2 - vl2), abs(vrm - vlm))
    return worst


def edge_watertightness(surface: GSplineSurface, edge: int,
                        samples: int = 11) -> float:
    """Max distance between the two-sided surface samples along an edge."""
    fr = edge_frames(surface.cnet, edge)
    worst = 0.0
    for t in np.linspace(0.0, 1.0, samples):
        xr = map_point(surface, fr.right, *edge_side_params(fr, float(t), "right"))
        xl = map_point(surface, fr.left, *edge_side_params(fr, float(t), "left"))
        worst = max(worst, float(np.linalg.norm(xr - xl)))
    return worst


def normal_jump(surface: GSplineSurface, edge: int, samples: int = 11) -> float:
    """Max angle (radians) between the two-sided unit normals along an edge."""
    fr = edge_frames(surface.cnet, edge)
    worst = 0.0
    for t in np.linspace(0.02, 0.98, samples):
        nr = frame(surface, fr.right, *edge_side_params(fr, float(t), "right")).normal
        nl = frame(surface, fr.left, *edge_side_params(fr, float(t), "left")).normal
        c = float(np.clip(nr @ nl, -1.0, 1.0))
        worst = max(worst, float(np.arccos(c)))
    return worst


# ----------------------------------------------------------------------
# sampling


def sample_bezier_mesh(surface: GSplineSurface, resolution: int = 8):
    """Deterministic tensor sampling of every element.

    Returns ``(points, quads, edges)``: stacked sample points, quad
    connectivity into them, and per-element boundary polyline index loops
    (the Bezier mesh, i.e. the images of the element boundaries).
    """
    if resolution < 1:
        raise DomainError("resolution must be >= 1")
    pts: list[np.ndarray] = []
    quads: list[list[int]] = []
    loops: list[list[int]] = []
    r = resolution
    for e in range(surface.cnet.n_faces):
        base = len(pts)
        for j in range(r + 1):
            for i in range(r + 1):
                pts.append(map_point(surface, e, i / r, j / r))
        for j in range(r):
            for i in range(r):
                k = base + j * (r + 1) + i
                quads.append([k, k + 1, k + r + 2, k + r + 1])
        loop = [base + i for i in range(r)]
        loop += [base + r + j * (r + 1) for j in range(r)]
        loop += [base + (r + 1) * (r + 1) - 1 - i for i in range(r)]
        loop += [base + (r - j) * (r + 1) for j in range(r)]
        loops.append(loop)
    return np.asarray(pts), quads, loops


def sampled_mesh_obj(points: np.ndarray, quads) -> str:
    """OBJ text for a sampled surface mesh."""
    lines = [f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}" for p in points]
    lines += ["f " + " ".join(str(i + 1) for i in q) for q in quads]
    return "\n".join(lines) + "\n"


def frames_csv(surface: GSplineSurface, resolution: int = 4) -> str:
    """CSV of sampled frames: position, unit normal, principal curvatures."""
    rows = ["element,xi,eta,x,y,z,nx,ny,nz,kappa1,kappa2"]
    r = resolution
    for e in range(surface.cnet.n_faces):
        for j in range(r + 1):
            for i in range(r + 1):
                xi, eta = i / r, j / r
                try:
                    fr = frame(surface, e, xi, eta)
                except SingularParameterizationError:
                    continue
                k1, k2 = principal_curvatures(fr)
                x, n = fr.point, fr.normal
                rows.append(
                    f"{e},{xi:.6f},{eta:.6f},{x[0]:.12g},{x[1]:.12g},{x[2]:.12g},"
                    f"{n[0]:.12g},{n[1]:.12g},{n[2]:.12g},{k1:.12g},{k2:.12g}"
                )
    return "\n".join(rows) + "\n"


def surface_classification(surface: GSplineSurface):
    """Vertex and element classifications of the surface's net."""
    cnet = surface.cnet
    return classify_vertices(cnet), classify_elements(cnet)


def bounding_box_diagonal(net: ControlNet) -> float:
    lo = net.positions.min(axis=0)
    hi = net.positions.max(axis=0)
    return float(np.linalg.norm(hi - lo))
