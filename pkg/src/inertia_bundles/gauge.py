"""Explicit gauge transformations between forms, with identity-component witnesses.

A :class:`Gau0Witness` is a discretised path ``t_0 = 0 < ... < t_last = 1`` of
gauge fields starting at the identity. Consecutive entries are close at every
vertex and every entry has positive determinant everywhere, so the endpoint is
certified to lie in the identity component of the gauge group.
"""
from dataclasses import dataclass

import numpy as np

from .bundle import (
    GaugeField,
    SplittingField,
    SubbundleField,
    _require_same_bundle,
    gauge_act,
    orthogonal_complement,
)
from .errors import (
    AdjacencyViolation,
    NotConnected,
    NotPositiveDefinite,
    StepTooCoarse,
    Unsupported,
)
from .invariants import _edge_steps, invariants_of, line_angles
from .linalg import DEFAULT_TOL, sqrt_from_pair_batch
from .splitting import check_time_adjacent, q_splitting, require_q_splitting

DEFAULT_STEPS = 16
MAX_STEP_GAP = 0.5
MIN_DET = 1e-10
IDENTITY_ATOL = 1e-14

FULL = "full"
RESTRICTED = "restricted"


def _step_hint(n_steps):
    return f"retry with {2 * (n_steps - 1) + 1} steps"


@dataclass(frozen=True, eq=False)
class Gau0Witness:
    endpoint: GaugeField
    path: tuple
    min_det: float

    def __post_init__(self):
        if not self.path or self.path[-1] is not self.endpoint:
            raise ValueError("path must end at the endpoint")
        mats = np.stack([g.maps for g in self.path])
        n = self.endpoint.bundle.rank
        if np.max(np.abs(mats[0] - np.eye(n))) >= IDENTITY_ATOL:
            raise ValueError("path does not start at the identity")
        dets = np.linalg.det(mats)
        j, i = np.unravel_index(np.argmin(dets), dets.shape)
        if dets[j, i] <= MIN_DET:
            raise StepTooCoarse(f"determinant {dets[j, i]:.3e} at path step {j} leaves GL+", vertex=int(i))
        if len(self.path) > 1:
            gaps = np.linalg.norm(np.diff(mats, axis=0), ord=2, axis=(-2, -1))
            j, i = np.unravel_index(np.argmax(gaps), gaps.shape)
            if gaps[j, i] >= MAX_STEP_GAP:
                raise StepTooCoarse(
                    f"path jumps by {gaps[j, i]:.3f} between steps {j} and {j + 1}; {_step_hint(len(self.path))}",
                    vertex=int(i),
                )

    @classmethod
    def from_maps(cls, bundle, mats):
        """Witness from a stack ``(steps, N, n, n)`` of per-vertex matrices."""
        path = tuple(GaugeField(bundle, m) for m in mats)
        return cls(path[-1], path, float(np.min(np.linalg.det(mats))))

    @classmethod
    def identity(cls, bundle):
        e = GaugeField.identity(bundle)
        return cls(e, (e,), 1.0)


def residual(q_target, q_source, phi):
    """Largest per-vertex ``||phi^T Q_source phi - Q_target||_F / ||Q_target||_F``."""
    diff = gauge_act(q_source, phi).forms - q_target.forms
    return float(np.max(np.linalg.norm(diff, axis=(-2, -1)) / np.linalg.norm(q_target.forms, axis=(-2, -1))))


def _times(steps):
    if steps < 2:
        raise ValueError("steps must be at least 2")
    return [j / (steps - 1) for j in range(steps)]


def _positive_path(q0, q1, ts, tol=DEFAULT_TOL):
    """``sqrt(Q_t^-1 Q0)`` along ``Q_t = (1 - t) Q0 + t Q1``, for stacks of SPD matrices.

    Each entry ``S`` satisfies ``S^T Q_t S = Q0``. The ``t = 0`` entry is the
    identity exactly since ``L_{q0 q0} = id``.
    """
    n_v, n, _ = q0.shape
    out = np.empty((len(ts), n_v, n, n))
    out[0] = np.eye(n)
    rest = np.array(ts[1:])
    if rest.size:
        qt = (1.0 - rest)[:, None, None, None] * q0 + rest[:, None, None, None] * q1
        src = np.broadcast_to(q0, qt.shape).reshape(-1, n, n)
        try:
            s = sqrt_from_pair_batch(src, qt.reshape(-1, n, n), tol)
        except NotPositiveDefinite as exc:
            raise NotPositiveDefinite(str(exc).split(" (at")[0], vertex=exc.vertex % n_v) from None
        out[1:] = s.reshape(len(rest), n_v, n, n)
    return out


def isometry_positive(q0, q1, steps=DEFAULT_STEPS):
    """Gauge transformation ``phi = sqrt(L_{q1 q0})`` with ``phi q1 = q0``, for positive definite fields.

    The path entries ``sqrt(L_{q_t q0})`` along the straight line
    ``q_t = (1 - t) q0 + t q1`` satisfy ``phi_t q_t = q0`` and start at the
    identity, witnessing that ``phi`` lies in the identity component.
    """
    _require_same_bundle(q0, q1)
    for name, q in (("q0", q0), ("q1", q1)):
        if not q.is_positive_definite():
            raise NotPositiveDefinite(f"{name} has inertia {tuple(q.inertia)}")
    mats = _positive_path(q0.forms, q1.forms, _times(steps), q0.tol)
    return Gau0Witness.from_maps(q0.bundle, mats)


def _unipotent(y, t):
    n_v, p, m = y.shape
    u = np.broadcast_to(np.eye(p + m), (n_v, p + m, p + m)).copy()
    u[:, :p, p:] = t * y
    return u


def isometry_general(q0, q1, s, steps=DEFAULT_STEPS):
    """Gauge transformation in the identity component carrying ``q1`` to ``q0``.

    ``s`` must be a q-splitting of both forms. In the frame ``A = [B+ | B-]``
    each form reads ``[[P, X], [X^T, M]]`` and factors as ``U^T diag(P, S) U``
    with ``U = [[I, P^-1 X], [0, I]]`` and Schur complement
    ``S = M - X^T P^-1 X`` (negative definite). The positive-definite isometry
    is applied to ``P1 -> P0`` and ``-S1 -> -S0``; the result is
    ``phi = A U1^-1 (phi+ (+) phi-) U0 A^-1``. When the splitting is orthogonal
    for both forms, ``U = I`` and ``phi = phi+ (+) phi-``. Shearing ``U`` to the
    identity along ``t`` keeps the whole path in the identity component.
    """
    _require_same_bundle(q0, q1, s)
    require_q_splitting(q0, s, "q0")
    require_q_splitting(q1, s, "q1")
    ts = _times(steps)
    n_v, n = q0.n_vertices, q0.bundle.rank
    p = s.plus.dim
    m = n - p
    a = s.frame_matrices()
    a_inv = np.linalg.inv(a)

    def blocks(q):
        qh = a.swapaxes(-1, -2) @ q.forms @ a
        qh = 0.5 * (qh + qh.swapaxes(-1, -2))
        pp, x, mm = qh[:, :p, :p], qh[:, :p, p:], qh[:, p:, p:]
        y = np.linalg.solve(pp, x) if p and m else np.zeros((n_v, p, m))
        return pp, y, mm - x.swapaxes(-1, -2) @ y

    p0, y0, s0 = blocks(q0)
    p1, y1, s1 = blocks(q1)
    plus = _positive_path(p0, p1, ts, q0.tol) if p else None
    minus = _positive_path(-s0, -s1, ts, q0.tol) if m else None

    mats = np.empty((len(ts), n_v, n, n))
    mats[0] = np.eye(n)
    for j, t in enumerate(ts[1:], start=1):
        d = np.zeros((n_v, n, n))
        if p:
            d[:, :p, :p] = plus[j]
        if m:
            d[:, p:, p:] = minus[j]
        frame = _unipotent(y1, -t) @ d @ _unipotent(y0, t)
        mats[j] = a @ frame @ a_inv
    return Gau0Witness.from_maps(q0.bundle, mats)


# -- orbit connection ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrbitConnection:
    """Gauge field ``gauge`` with ``gauge_act(q1, gauge) = q0``.

    ``alignment`` maps the q0-splitting onto the q1-splitting; ``witness`` is
    the identity-component path (restricted mode only).
    """

    mode: str
    gauge: GaugeField
    alignment: GaugeField
    witness: object
    invariants0: tuple
    invariants1: tuple
    residual: float


def _align_frames(s0, s1):
    """Per-vertex ``f = A1 A0^-1`` sending ``s0`` onto ``s1``, orientation-preserving."""
    a0 = s0.frame_matrices()
    a1 = s1.frame_matrices().copy()
    flip = np.linalg.det(a1) * np.linalg.det(a0) < 0
    a1[flip, :, -1] *= -1.0
    return GaugeField(s0.bundle, a1 @ np.linalg.inv(a0))


def _winding_homotopy(s0, s1, ts):
    """Line fields interpolating the lifted angles of two lines with equal winding."""
    lifts = []
    for s in (s0, s1):
        theta = line_angles(s)
        steps = _edge_steps(theta)
        lifts.append(theta[0] + np.concatenate([[0.0], np.cumsum(steps[:-1])]))
    th0, th1 = lifts
    # start the second lift within pi/2 of the first
    th1 = th1 - np.pi * np.round((th1[0] - th0[0]) / np.pi)
    out = []
    for t in ts:
        th = (1.0 - t) * th0 + t * th1
        out.append(np.stack([np.cos(th), np.sin(th)], axis=-1)[:, :, None])
    return out


def _geodesic_homotopy(s0, s1, ts):
    """Vertexwise Grassmann geodesics between two subbundles."""
    u0 = np.linalg.qr(s0.frames)[0]
    u1 = np.linalg.qr(s1.frames)[0]
    c = u0.swapaxes(-1, -2) @ u1
    sv = np.linalg.svd(c, compute_uv=False)
    bad = np.flatnonzero(sv[:, -1] <= 1e-8)
    if bad.size:
        raise Unsupported(
            "positive summands are orthogonal somewhere; no vertexwise geodesic homotopy",
            vertex=int(bad[0]),
        )
    mm = (u1 - u0 @ c) @ np.linalg.inv(c)
    uh, sig, vt = np.linalg.svd(mm, full_matrices=False)
    theta = np.arctan(sig)
    v = vt.swapaxes(-1, -2)
    return [u0 @ v * np.cos(t * theta)[:, None, :] + uh * np.sin(t * theta)[:, None, :] for t in ts]


def _transport_path(s0, s1, steps):
    """Gauge path ``f_t`` with ``f_0 = id`` carrying ``s0`` onto ``s1``.

    A homotopy of positive summands ``P_t`` is built (angle interpolation on
    the trivial plane bundle, Grassmann geodesics otherwise), completed by
    orthogonal complements, and the frames of ``s0`` are pushed along it by
    orthogonal projection onto each successive summand.
    """
    bundle = s0.bundle
    ts = _times(steps)
    p, n = s0.plus.dim, bundle.rank
    if p in (0, n):
        plus_frames = [s0.plus.frames] * len(ts)
    elif n == 2 and bundle.is_trivial():
        plus_frames = _winding_homotopy(s0.plus, s1.plus, ts)
    else:
        plus_frames = _geodesic_homotopy(s0.plus, s1.plus, ts)
    seq = []
    for j, f in enumerate(plus_frames):
        try:
            plus = SubbundleField(bundle, p, f)
        except AdjacencyViolation as exc:
            raise Unsupported(f"interpolated summand at step {j} is not admissible: {exc}") from None
        seq.append(SplittingField(plus, orthogonal_complement(plus)))
    check_time_adjacent(seq, "interpolated splitting")

    a0_inv = np.linalg.inv(s0.frame_matrices())
    fp, fm = s0.plus.frames, s0.minus.frames
    mats = np.empty((len(ts), bundle.n_vertices, n, n))
    mats[0] = np.eye(n)
    for j in range(1, len(ts)):
        if p:
            u = np.linalg.qr(seq[j].plus.frames)[0]
            fp = u @ (u.swapaxes(-1, -2) @ fp)
        if n - p:
            u = np.linalg.qr(seq[j].minus.frames)[0]
            fm = u @ (u.swapaxes(-1, -2) @ fm)
        mats[j] = np.concatenate([fp, fm], axis=-1) @ a0_inv
    return mats


def orbit_connect(q0, q1, mode=FULL, steps=DEFAULT_STEPS):
    """Find ``phi`` with ``gauge_act(q1, phi) = q0``, or certify there is none.

    ``mode="full"`` allows any gauge transformation and compares isomorphism
    classes; ``mode="restricted"`` asks for one in the identity component,
    compares homotopy classes as well, and returns a path witness. Raises
    :class:`NotConnected` when the invariants differ.
    """
    if mode not in (FULL, RESTRICTED):
        raise ValueError(f"mode must be {FULL!r} or {RESTRICTED!r}")
    _require_same_bundle(q0, q1)
    if q0.inertia != q1.inertia:
        raise NotConnected(f"inertia {tuple(q0.inertia)} vs {tuple(q1.inertia)}")
    s0 = q_splitting(q0).splitting
    s1 = q_splitting(q1).splitting
    inv0 = invariants_of(q0, splitting=s0)
    inv1 = invariants_of(q1, splitting=s1)
    if inv0[0] != inv1[0]:
        raise NotConnected("isomorphism classes differ", invariants=(inv0, inv1))
    if mode == RESTRICTED and inv0[1] != inv1[1]:
        raise NotConnected("homotopy classes differ", invariants=(inv0, inv1))

    bundle = q0.bundle
    if np.array_equal(q0.forms, q1.forms):
        w = Gau0Witness.identity(bundle)
        return OrbitConnection(mode, w.endpoint, w.endpoint, w if mode == RESTRICTED else None, inv0, inv1, 0.0)

    if mode == FULL:
        f = _align_frames(s0, s1)
        g = isometry_general(q0, gauge_act(q1, f), s0, steps)
        phi = f.compose(g.endpoint)
        return OrbitConnection(mode, phi, f, None, inv0, inv1, residual(q0, q1, phi))

    f_mats = _transport_path(s0, s1, steps)
    f = GaugeField(bundle, f_mats[-1])
    g = isometry_general(q0, gauge_act(q1, f), s0, steps)
    g_mats = np.stack([x.maps for x in g.path[1:]])
    witness = Gau0Witness.from_maps(bundle, np.concatenate([f_mats, f_mats[-1] @ g_mats]))
    return OrbitConnection(mode, witness.endpoint, f, witness, inv0, inv1, residual(q0, q1, witness.endpoint))

