"""Calibrated multi-camera geometry.

Projection, fundamental matrices derived from projection matrices,
normalized epipolar lines, the symmetric epipolar consistency score, and
DLT + Gauss-Newton triangulation. All functions are pure and all types are
immutable after construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateBaseline,
    IllConditioned,
    InsufficientViews,
    NullLine,
    PointAtInfinity,
)

_W_EPS = 1e-12


@dataclass(frozen=True)
class Camera:
    """A finite projective camera: pixels <- world units via a 3x4 matrix."""

    P: np.ndarray
    id: str = "cam"

    def __post_init__(self):
        P = np.asarray(self.P, dtype=np.float64)
        if P.shape != (3, 4):
            raise ValueError(f"projection matrix must be 3x4, got {P.shape}")
        if np.linalg.matrix_rank(P) != 3:
            raise ValueError("projection matrix must have rank 3")
        object.__setattr__(self, "P", P)

    def center(self) -> np.ndarray:
        """Camera center in world units (null space of P, dehomogenized)."""
        _, _, vt = np.linalg.svd(self.P)
        c = vt[-1]
        if abs(c[3]) < _W_EPS:
            raise PointAtInfinity(f"camera {self.id!r} center at infinity")
        return c[:3] / c[3]


@dataclass(frozen=True)
class EpipolarLine:
    """Line a*x + b*y + c = 0 with a**2 + b**2 = 1 (pixel units)."""

    a: float
    b: float
    c: float


def project(cam: Camera, X) -> np.ndarray:
    """Project a 3D world point to pixel coordinates."""
    X = np.asarray(X, dtype=np.float64)
    h = cam.P @ np.append(X, 1.0)
    if abs(h[2]) < _W_EPS:
        raise PointAtInfinity("homogeneous depth component is zero")
    return h[:2] / h[2]


def _cross_matrix(v: np.ndarray) -> np.ndarray:
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def fundamental_from_cameras(cam_a: Camera, cam_b: Camera) -> np.ndarray:
    """Fundamental matrix F with x_b^T F x_a = 0 for correspondences.

    Built from the projection matrices as [e']_x P_b P_a^+ where e' is the
    epipole of camera a's center in view b. Normalized to unit Frobenius
    norm; rank 2 by construction.
    """
    ca = cam_a.center()
    cb = cam_b.center()
    if np.linalg.norm(ca - cb) <= 1e-9:
        raise DegenerateBaseline(
            f"cameras {cam_a.id!r} and {cam_b.id!r} share a center"
        )
    e_b = cam_b.P @ np.append(ca, 1.0)
    F = _cross_matrix(e_b) @ cam_b.P @ np.linalg.pinv(cam_a.P)
    return F / np.linalg.norm(F)


def epipolar_line(F: np.ndarray, p) -> EpipolarLine:
    """Epipolar line F @ [p; 1], normalized so a**2 + b**2 = 1."""
    p = np.asarray(p, dtype=np.float64)
    l = F @ np.array([p[0], p[1], 1.0])
    n = float(np.hypot(l[0], l[1]))
    if n < _W_EPS:
        raise NullLine("point maps to the epipole; line undefined")
    return EpipolarLine(l[0] / n, l[1] / n, l[2] / n)


def point_line_dist_sq(p, l: EpipolarLine) -> float:
    """Squared Euclidean distance from a point to a normalized line."""
    return float((l.a * p[0] + l.b * p[1] + l.c) ** 2)


def xi(p_a, p_b, F_ab: np.ndarray, F_ba: np.ndarray) -> float:
    """Symmetric epipolar consistency of a point pair; <= 0, 0 iff consistent.

    F_ab maps points of view A to lines in view B (x_b^T F_ab x_a = 0) and
    F_ba the reverse. Returns minus the sum of squared distances of each
    point to the epipolar line induced by the other.
    """
    line_in_a = epipolar_line(F_ba, p_b)
    line_in_b = epipolar_line(F_ab, p_a)
    return -point_line_dist_sq(p_a, line_in_a) - point_line_dist_sq(p_b, line_in_b)


@dataclass(frozen=True)
class CameraRig:
    """An ordered set of calibrated cameras plus derived fundamental matrices."""

    cameras: tuple[Camera, ...]
    fundamentals: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "cameras", tuple(self.cameras))
        fund = {}
        for ca in self.cameras:
            for cb in self.cameras:
                if ca.id != cb.id:
                    fund[(ca.id, cb.id)] = fundamental_from_cameras(ca, cb)
        object.__setattr__(self, "fundamentals", fund)

    @property
    def view_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.cameras)

    def camera(self, view_id: str) -> Camera:
        for c in self.cameras:
            if c.id == view_id:
                return c
        raise KeyError(f"no camera {view_id!r} in rig")

    def fundamental(self, view_a: str, view_b: str) -> np.ndarray:
        """F with x_b^T F x_a = 0, i.e. it maps view_a points to view_b lines."""
        return self.fundamentals[(view_a, view_b)]

    def xi(self, view_a: str, view_b: str, p_a, p_b) -> float:
        return xi(p_a, p_b, self.fundamental(view_a, view_b),
                  self.fundamental(view_b, view_a))


def _reprojection_residuals(X, cams, pts):
    r = np.empty(2 * len(cams))
    for i, (cam, p) in enumerate(zip(cams, pts)):
        h = cam.P @ np.append(X, 1.0)
        r[2 * i] = h[0] / h[2] - p[0]
        r[2 * i + 1] = h[1] / h[2] - p[1]
    return r


def _reprojection_jacobian(X, cams):
    J = np.empty((2 * len(cams), 3))
    for i, cam in enumerate(cams):
        P = cam.P
        h = P @ np.append(X, 1.0)
        M = P[:, :3]
        # d(u)/dX = (P0 - u P2) / w, likewise for v
        J[2 * i] = (M[0] - (h[0] / h[2]) * M[2]) / h[2]
        J[2 * i + 1] = (M[1] - (h[1] / h[2]) * M[2]) / h[2]
    return J


def triangulate(observations) -> tuple[np.ndarray, float]:
    """Triangulate a 3D point from >= 2 (Camera, pixel point) observations.

    DLT initialization followed by Gauss-Newton refinement of reprojection
    residuals (max 20 iterations, stop when the step norm drops below
    1e-10; steps are halved if they would increase the cost, so the result
    is never worse than the DLT solution). Returns the point and the RMS
    reprojection error in pixels.
    """
    obs = list(observations)
    if len(obs) < 2:
        raise InsufficientViews(f"need >= 2 observations, got {len(obs)}")
    cams = [c for c, _ in obs]
    pts = [np.asarray(p, dtype=np.float64) for _, p in obs]

    A = np.empty((2 * len(obs), 4))
    for i, (cam, p) in enumerate(zip(cams, pts)):
        A[2 * i] = p[0] * cam.P[2] - cam.P[0]
        A[2 * i + 1] = p[1] * cam.P[2] - cam.P[1]
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] == 0.0 or s[0] / s[-1] > 1e12:
        raise IllConditioned("DLT system condition exceeds 1e12")
    _, _, vt = np.linalg.svd(A)
    Xh = vt[-1]
    if abs(Xh[3]) < _W_EPS:
        raise IllConditioned("DLT solution at infinity")
    X = Xh[:3] / Xh[3]

    cost = float(np.sum(_reprojection_residuals(X, cams, pts) ** 2))
    for _ in range(20):
        r = _reprojection_residuals(X, cams, pts)
        J = _reprojection_jacobian(X, cams)
        try:
            step = np.linalg.solve(J.T @ J, -J.T @ r)
        except np.linalg.LinAlgError:
            break
        # backtrack so refinement never increases the cost
        accepted = False
        for _ in range(12):
            X_new = X + step
            c_new = float(np.sum(_reprojection_residuals(X_new, cams, pts) ** 2))
            if c_new <= cost:
                accepted = True
                break
            step = step / 2.0
        if not accepted:
            break
        moved = float(np.linalg.norm(X_new - X))
        X, cost = X_new, c_new
        if moved < 1e-10:
            break

    rms = float(np.sqrt(cost / len(obs)))
    return X, rms


def load_calibration(path) -> CameraRig:
    """Read a calibration file: {"cameras": [{"id", "P": 12 row-major reals}]}."""
    with open(path) as f:
        doc = json.load(f)
    cams = []
    for entry in doc["cameras"]:
        P = np.asarray(entry["P"], dtype=np.float64).reshape(3, 4)
        cams.append(Camera(P=P, id=str(entry["id"])))
    return CameraRig(cameras=tuple(cams))


def save_calibration(rig: CameraRig, path) -> None:
    doc = {"cameras": [{"id": c.id, "P": [float(v) for v in c.P.ravel()]}
                       for c in rig.cameras]}
    with open(path, "w") as f:
        json.dump(doc, f, indent=1, sort_keys=True)
