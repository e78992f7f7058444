"""Canonical q-splittings of a form field relative to a positive reference field."""
from dataclasses import dataclass

import numpy as np

from .bundle import (
    ADJACENCY_MARGIN,
    FormField,
    SplittingField,
    SubbundleField,
    _require_same_bundle,
    constant_form_field,
    interpolate_positive,
)
from .errors import DegenerateForm, InconsistentInertia, NotPositiveDefinite, NotQSplitting, StepTooCoarse
from .linalg import eigh_batch, generalized_eigh_batch, max_principal_angle_batch


@dataclass(frozen=True, eq=False)
class QSplittingResult:
    splitting: SplittingField
    eigen_gaps: np.ndarray  # per vertex, smallest |eigenvalue| of R^-1 Q


@dataclass(frozen=True, eq=False)
class SplittingReport:
    """Outcome of :func:`verify_q_splitting`.

    ``plus_min[i]`` is the least eigenvalue of ``B+^T Q B+`` at vertex ``i``
    (``+inf`` for an empty summand), ``minus_max[i]`` the largest of
    ``B-^T Q B-`` (``-inf`` when empty).
    """

    plus_min: np.ndarray
    minus_max: np.ndarray

    @property
    def passed(self):
        return bool(np.all(self.plus_min > 0) and np.all(self.minus_max < 0))

    def first_failure(self):
        bad = np.flatnonzero(~((self.plus_min > 0) & (self.minus_max < 0)))
        return int(bad[0]) if bad.size else None


def identity_reference(bundle):
    return constant_form_field(bundle, np.eye(bundle.rank))


def q_splitting(q, r=None):
    """Split ``E`` into the positive and negative eigenbundles of ``L = R^-1 Q``.

    Frames come out ``r``-orthonormal. Raises :class:`DegenerateForm` when an
    eigenvalue of ``L`` is within ``q.tol`` (relative) of zero, and
    :class:`~inertia_bundles.errors.AdjacencyViolation` when either eigenbundle
    moves too fast between neighbouring vertices to be tracked.
    """
    if r is None:
        r = identity_reference(q.bundle)
    _require_same_bundle(q, r)
    if not r.is_positive_definite():
        raise NotPositiveDefinite(f"reference field has inertia {tuple(r.inertia)}")
    lam, b = generalized_eigh_batch(q.forms, r.forms)
    gaps = np.min(np.abs(lam), axis=-1)
    cut = q.tol * np.max(np.abs(lam), axis=-1)
    bad = np.flatnonzero(gaps <= cut)
    if bad.size:
        raise DegenerateForm("eigenvalue of R^-1 Q within tolerance of zero", vertex=int(bad[0]))
    p = q.inertia.n_plus
    counts = np.sum(lam > 0, axis=-1)
    bad = np.flatnonzero(counts != p)
    if bad.size:
        raise InconsistentInertia(f"{counts[bad[0]]} positive eigenvalues, expected {p}", vertex=int(bad[0]))
    plus = SubbundleField(q.bundle, p, b[:, :, :p])
    minus = SubbundleField(q.bundle, q.bundle.rank - p, b[:, :, p:])
    gaps.setflags(write=False)
    return QSplittingResult(SplittingField(plus, minus), gaps)


def _restricted_extremes(q, frames, largest):
    if frames.shape[-1] == 0:
        return np.full(q.n_vertices, -np.inf if largest else np.inf)
    w, _ = eigh_batch(frames.swapaxes(-1, -2) @ q.forms @ frames)
    return w[:, 0] if largest else w[:, -1]


def verify_q_splitting(q, s):
    """Check that ``q`` is positive definite on ``s.plus`` and negative definite on ``s.minus``."""
    _require_same_bundle(q, s)
    return SplittingReport(
        _restricted_extremes(q, s.plus.frames, largest=False),
        _restricted_extremes(q, s.minus.frames, largest=True),
    )


def require_q_splitting(q, s, label="q"):
    report = verify_q_splitting(q, s)
    if not report.passed:
        i = report.first_failure()
        raise NotQSplitting(
            f"splitting is not a {label}-splitting (plus min {report.plus_min[i]:.3e}, "
            f"minus max {report.minus_max[i]:.3e})",
            vertex=i,
        )
    return report


def canonical_r(q, s):
    """Positive definite ``r = q|plus (+) -q|minus`` built from a q-splitting.

    The summands are made ``r``-orthogonal. When ``s`` is also
    ``q``-orthogonal, ``q_splitting(q, canonical_r(q, s))`` returns ``s`` up to
    span equality; otherwise it returns a q-orthogonal splitting homotopic to
    ``s`` (eigenbundles of an ``r``-symmetric operator are always q-orthogonal).
    """
    require_q_splitting(q, s)
    a = s.frame_matrices()
    p = s.plus.dim
    qa = a.swapaxes(-1, -2) @ q.forms @ a
    blocks = np.zeros_like(qa)
    blocks[:, :p, :p] = qa[:, :p, :p]
    blocks[:, p:, p:] = -qa[:, p:, p:]
    a_inv = np.linalg.inv(a)
    return FormField(q.bundle, a_inv.swapaxes(-1, -2) @ blocks @ a_inv, q.tol)


def time_angles(s_a, s_b):
    """Per-vertex largest principal angle between two splittings, plus and minus summands."""
    return np.maximum(
        max_principal_angle_batch(s_a.plus.frames, s_b.plus.frames),
        max_principal_angle_batch(s_a.minus.frames, s_b.minus.frames),
    )


def check_time_adjacent(sequence, what="splitting"):
    """Raise :class:`StepTooCoarse` if consecutive splittings jump by ``pi/2`` somewhere."""
    for j in range(len(sequence) - 1):
        ang = time_angles(sequence[j], sequence[j + 1])
        bad = np.flatnonzero(ang >= np.pi / 2 - ADJACENCY_MARGIN)
        if bad.size:
            raise StepTooCoarse(
                f"{what} jumps by {ang[bad[0]]:.4f} rad between steps {j} and {j + 1}; "
                f"try {2 * (len(sequence) - 1) + 1} steps",
                vertex=int(bad[0]),
            )


def homotopy_witness_r_independence(q, r0, r1, steps=16):
    """q-splittings along the straight path of references from ``r0`` to ``r1``.

    The returned list, indexed by ``t_j = j / (steps - 1)``, is a discrete
    splitting of ``E x [0, 1]``: each entry satisfies the spatial adjacency
    condition and consecutive entries the temporal one.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    seq = [q_splitting(q, interpolate_positive(r0, r1, j / (steps - 1))).splitting for j in range(steps)]
    check_time_adjacent(seq)
    return seq
