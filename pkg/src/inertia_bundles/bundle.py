"""Discrete vector bundles over a cycle and fields living on them.

The circle is sampled at ``N`` vertices ``0..N-1`` with edges ``i -> i+1 (mod N)``.
Each vertex carries a chart ``R^n``; edge ``i`` carries the invertible
transition ``t_i`` from the chart at ``i`` to the chart at ``i+1``. Fields
store one matrix per vertex in that vertex's chart.

Continuity is replaced by a quantitative *adjacency condition*: a subbundle
field is admissible when, on every edge, all principal angles between
``span(t_i B_i)`` and ``span(B_{i+1})`` are below ``pi/2``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (
    AdjacencyViolation,
    BundleMismatch,
    InconsistentInertia,
    NotDefiniteOnSummand,
    NotPositiveDefinite,
    SamplingTooCoarse,
    SingularMatrix,
)
from .linalg import (
    DEFAULT_TOL,
    Inertia,
    SymForm,
    as_matrix,
    cholesky_batch,
    eigh_batch,
    frame_rank_ok_batch,
    inertia_batch,
    max_principal_angle_batch,
)

DET_TOL = 1e-12
# a principal angle this close to pi/2 counts as a violation
ADJACENCY_MARGIN = 1e-8


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def _check_stack(name, a, n_vertices, shape):
    if a.shape != (n_vertices,) + shape:
        raise ValueError(f"{name}: expected shape {(n_vertices,) + shape}, got {a.shape}")


def _check_dets(name, mats, error=SingularMatrix):
    dets = np.abs(np.linalg.det(mats))
    bad = np.flatnonzero(~(dets > DET_TOL))
    if bad.size:
        raise error(f"{name} has |det| = {dets[bad[0]]:.3e}", vertex=int(bad[0]))


@dataclass(frozen=True)
class CycleBase:
    n_vertices: int

    def __post_init__(self):
        if int(self.n_vertices) != self.n_vertices or self.n_vertices < 3:
            raise ValueError(f"a cycle needs at least 3 vertices, got {self.n_vertices}")

    @property
    def angles(self):
        """Sample points ``alpha_i = 2 pi i / N`` on the circle."""
        return 2.0 * np.pi * np.arange(self.n_vertices) / self.n_vertices


@dataclass(frozen=True, eq=False)
class DiscreteBundle:
    """Rank-``n`` bundle given by one transition matrix per edge."""

    base: CycleBase
    rank: int
    transitions: np.ndarray

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be at least 1")
        t = _frozen(self.transitions)
        _check_stack("transitions", t, self.n_vertices, (self.rank, self.rank))
        _check_dets("transition", t)
        object.__setattr__(self, "transitions", t)

    @property
    def n_vertices(self):
        return self.base.n_vertices

    def is_trivial(self, atol=1e-12):
        """True when every transition is the identity (the product chart)."""
        return bool(np.allclose(self.transitions, np.eye(self.rank), rtol=0.0, atol=atol))

    def monodromy(self):
        """Product ``t_{N-1} ... t_1 t_0`` of all transitions around the loop."""
        m = np.eye(self.rank)
        for t in self.transitions:
            m = t @ m
        return m

    def same_as(self, other):
        return self is other or (
            self.n_vertices == other.n_vertices
            and self.rank == other.rank
            and np.array_equal(self.transitions, other.transitions)
        )


def trivial_bundle(n_vertices, rank):
    """Product bundle ``S^1 x R^rank``."""
    base = CycleBase(n_vertices)
    return DiscreteBundle(base, rank, np.broadcast_to(np.eye(rank), (n_vertices, rank, rank)))


def _require_same_bundle(*objs):
    first = objs[0].bundle
    for o in objs[1:]:
        if not first.same_as(o.bundle):
            raise BundleMismatch("fields live on different bundles")


@dataclass(frozen=True, eq=False)
class FormField:
    """A non-degenerate quadratic form sampled at every vertex.

    Construction checks non-degeneracy and that all vertices share one inertia.
    """

    bundle: DiscreteBundle
    forms: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        f = np.array(self.forms, dtype=np.float64)
        _check_stack("forms", f, self.bundle.n_vertices, (self.bundle.rank,) * 2)
        f = _frozen(0.5 * (f + f.swapaxes(-1, -2)))
        object.__setattr__(self, "forms", f)
        n_plus, n_minus, gaps = inertia_batch(f, self.tol)
        _check_constant_inertia(n_plus, n_minus)
        object.__setattr__(self, "inertia", Inertia(int(n_plus[0]), int(n_minus[0])))
        gaps.setflags(write=False)
        object.__setattr__(self, "eigen_gaps", gaps)

    @property
    def n_vertices(self):
        return self.bundle.n_vertices

    def form(self, i):
        return SymForm(self.forms[i])

    def is_positive_definite(self):
        return self.inertia.n_minus == 0

    def replace(self, forms):
        return FormField(self.bundle, forms, self.tol)


def _check_constant_inertia(n_plus, n_minus):
    bad = np.flatnonzero((n_plus != n_plus[0]) | (n_minus != n_minus[0]))
    if bad.size:
        i = int(bad[0])
        raise InconsistentInertia(
            f"inertia ({n_plus[i]}, {n_minus[i]}) differs from ({n_plus[0]}, {n_minus[0]}) at vertex 0",
            vertex=i,
        )


def constant_form_field(bundle, mat, tol=DEFAULT_TOL):
    return FormField(bundle, np.broadcast_to(as_matrix(mat), (bundle.n_vertices, bundle.rank, bundle.rank)), tol)


@dataclass(frozen=True, eq=False)
class GaugeField:
    """A vertical automorphism: one invertible matrix per vertex."""

    bundle: DiscreteBundle
    maps: np.ndarray

    def __post_init__(self):
        m = _frozen(self.maps)
        _check_stack("maps", m, self.bundle.n_vertices, (self.bundle.rank,) * 2)
        _check_dets("gauge map", m)
        object.__setattr__(self, "maps", m)

    @classmethod
    def identity(cls, bundle):
        return cls(bundle, np.broadcast_to(np.eye(bundle.rank), (bundle.n_vertices, bundle.rank, bundle.rank)))

    def compose(self, other):
        """Vertexwise product ``phi_i psi_i``; acting by it equals acting by ``self`` then ``other``."""
        _require_same_bundle(self, other)
        return GaugeField(self.bundle, self.maps @ other.maps)

    def inverse(self):
        return GaugeField(self.bundle, np.linalg.inv(self.maps))


@dataclass(frozen=True, eq=False)
class SubbundleField:
    """A rank-``dim`` subbundle: full-rank ``n x dim`` frames satisfying adjacency."""

    bundle: DiscreteBundle
    dim: int
    frames: np.ndarray

    def __post_init__(self):
        n = self.bundle.rank
        if not 0 <= self.dim <= n:
            raise ValueError(f"subbundle dimension {self.dim} outside [0, {n}]")
        f = _frozen(np.reshape(self.frames, (self.bundle.n_vertices, n, self.dim)))
        object.__setattr__(self, "frames", f)
        bad = np.flatnonzero(~frame_rank_ok_batch(f))
        if bad.size:
            raise SingularMatrix("frame does not have full column rank", vertex=int(bad[0]))
        angles = self.edge_angles()
        bad = np.flatnonzero(angles >= np.pi / 2 - ADJACENCY_MARGIN)
        if bad.size:
            e = int(bad[0])
            raise AdjacencyViolation(
                f"principal angle {angles[e]:.6f} rad across an edge is not below pi/2", edge=e
            )

    @property
    def n_vertices(self):
        return self.bundle.n_vertices

    def transported(self):
        """Frames ``t_i B_i`` expressed in the chart of vertex ``i+1``."""
        return self.bundle.transitions @ self.frames

    def edge_angles(self):
        """Largest principal angle across each edge ``i -> i+1``."""
        nxt = np.roll(self.frames, -1, axis=0)
        return max_principal_angle_batch(self.transported(), nxt)


@dataclass(frozen=True, eq=False)
class SplittingField:
    """Ordered pair of complementary subbundles ``E = plus (+) minus``."""

    plus: SubbundleField
    minus: SubbundleField

    def __post_init__(self):
        _require_same_bundle(self.plus, self.minus)
        n = self.bundle.rank
        if self.plus.dim + self.minus.dim != n:
            raise ValueError(f"summand ranks {self.plus.dim} + {self.minus.dim} != {n}")
        bad = np.flatnonzero(~frame_rank_ok_batch(self.frame_matrices()))
        if bad.size:
            raise SingularMatrix("summands do not span the fiber", vertex=int(bad[0]))

    @property
    def bundle(self):
        return self.plus.bundle

    def frame_matrices(self):
        """Per-vertex ``A_i = [B_i^+ | B_i^-]``."""
        return np.concatenate([self.plus.frames, self.minus.frames], axis=-1)


def gauge_act(q, phi):
    """Pull back a form field by a gauge field: ``(phi q)(v) = q(phi v)``."""
    _require_same_bundle(q, phi)
    m = phi.maps
    return q.replace(m.swapaxes(-1, -2) @ q.forms @ m)


def gauge_act_subbundle(s, phi):
    """Push a subbundle forward: frames ``B_i -> phi_i B_i``.

    The form action is contravariant, so ``s`` is a ``q``-splitting summand
    exactly when ``phi^-1 (s)`` is one for ``phi q``.
    """
    _require_same_bundle(s, phi)
    return SubbundleField(s.bundle, s.dim, phi.maps @ s.frames)


def gauge_act_splitting(s, phi):
    return SplittingField(gauge_act_subbundle(s.plus, phi), gauge_act_subbundle(s.minus, phi))


def field_inertia(q):
    """Common inertia of a form field, recomputed at every vertex."""
    n_plus, n_minus, _ = inertia_batch(q.forms, q.tol)
    _check_constant_inertia(n_plus, n_minus)
    return Inertia(int(n_plus[0]), int(n_minus[0]))


def interpolate_positive(r0, r1, t):
    """Point ``(1 - t) r0 + t r1`` on the straight path between positive definite fields."""
    _require_same_bundle(r0, r1)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t = {t} outside [0, 1]")
    for name, r in (("r0", r0), ("r1", r1)):
        if not r.is_positive_definite():
            raise NotPositiveDefinite(f"{name} has inertia {tuple(r.inertia)}")
    if t == 0.0:
        return r0
    if t == 1.0:
        return r1
    return r0.replace((1.0 - t) * r0.forms + t * r1.forms)


def make_line_bundle_lk(n_vertices, k):
    """Line subbundle ``l_k`` of the trivial plane bundle.

    At ``alpha_i = 2 pi i / N`` the fiber is spanned by
    ``(cos(k alpha_i / 2), sin(k alpha_i / 2))``; the line makes ``k`` half turns
    around the loop. Needs ``N > 2|k|`` so that each edge turns by less than
    ``pi/2``.
    """
    if n_vertices <= 2 * abs(k):
        raise SamplingTooCoarse(f"need more than {2 * abs(k)} vertices for k = {k}, got {n_vertices}")
    bundle = trivial_bundle(n_vertices, 2)
    half = 0.5 * k * bundle.base.angles
    frames = np.stack([np.cos(half), np.sin(half)], axis=-1)[:, :, None]
    return SubbundleField(bundle, 1, frames)


def orthogonal_complement(s, r=None):
    """The ``r``-orthogonal complement of a subbundle (Euclidean when ``r`` is None).

    The complement of ``span B`` is the kernel of ``B^T R``; it is taken from an
    SVD, so the frames are orthonormal but carry no orientation convention.
    """
    n = s.bundle.rank
    if r is None:
        metric = np.broadcast_to(np.eye(n), (s.n_vertices, n, n))
    else:
        _require_same_bundle(s, r)
        metric = r.forms
        cholesky_batch(metric)
    if s.dim == 0:
        frames = np.broadcast_to(np.eye(n), (s.n_vertices, n, n))
    elif s.dim == n:
        frames = np.zeros((s.n_vertices, n, 0))
    else:
        w = s.frames.swapaxes(-1, -2) @ metric
        _, _, vt = np.linalg.svd(w)
        frames = vt[:, s.dim:, :].swapaxes(-1, -2)
    return SubbundleField(s.bundle, n - s.dim, frames)


def make_form_from_splitting(s, qplus, qminus, tol=DEFAULT_TOL):
    """Assemble ``q = qplus (+) qminus`` over a splitting.

    ``qplus`` (``(N, p, p)``) and ``qminus`` (``(N, n-p, n-p)``) are given in the
    frame coordinates of the two summands. In chart coordinates
    ``Q_i = A_i^-T diag(qplus_i, qminus_i) A_i^-1`` with ``A_i = [B_i^+ | B_i^-]``,
    so the summands are ``q``-orthogonal and ``s`` is a ``q``-splitting.
    """
    n_v = s.bundle.n_vertices
    p, m = s.plus.dim, s.minus.dim
    qp = np.asarray(qplus, dtype=np.float64).reshape(n_v, p, p)
    qm = np.asarray(qminus, dtype=np.float64).reshape(n_v, m, m)
    blocks = np.zeros((n_v, p + m, p + m))
    blocks[:, :p, :p] = 0.5 * (qp + qp.swapaxes(-1, -2))
    blocks[:, p:, p:] = 0.5 * (qm + qm.swapaxes(-1, -2))
    if p:
        _require_definite(blocks[:, :p, :p], "qplus", "positive")
    if m:
        _require_definite(-blocks[:, p:, p:], "qminus", "negative")
    a_inv = np.linalg.inv(s.frame_matrices())
    return FormField(s.bundle, a_inv.swapaxes(-1, -2) @ blocks @ a_inv, tol)


def _require_definite(mats, name, label):
    w, _ = eigh_batch(mats)
    bad = np.flatnonzero(w[:, -1] <= 0)
    if bad.size:
        raise NotDefiniteOnSummand(f"{name} is not {label} definite", vertex=int(bad[0]))
