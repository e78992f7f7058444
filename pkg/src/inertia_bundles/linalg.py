"""Fiberwise linear algebra of real quadratic forms.

Everything here acts on a single vector space ``R^n`` (one fiber). Forms are
symmetric matrices; the bilinear form of ``q`` is ``b_q(u, v) = u^T Q v``.
Most functions have a private ``*_batch`` counterpart working on stacks of
matrices, used by the field-level modules to process all vertices at once.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import (
    ConvergenceError,
    DegenerateForm,
    NonPositiveSpectrum,
    NotDefiniteOnSummand,
    NotPositiveDefinite,
    SingularMatrix,
)

DEFAULT_TOL = 1e-10
SINGULAR_REL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SymForm:
    """A quadratic form on ``R^n`` given by its (symmetrised) matrix."""

    mat: np.ndarray

    def __post_init__(self):
        m = np.array(self.mat, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self):
        return self.mat.shape[0]

    def __call__(self, v):
        v = np.asarray(v, dtype=np.float64)
        return float(v @ self.mat @ v)

    def __repr__(self):
        return f"SymForm({self.mat.tolist()!r})"


class Inertia(NamedTuple):
    n_plus: int
    n_minus: int


class CongruenceWitness(NamedTuple):
    g: np.ndarray
    d: np.ndarray


def as_matrix(form):
    """Matrix of a :class:`SymForm` or a symmetric array-like."""
    if isinstance(form, SymForm):
        return form.mat
    m = np.asarray(form, dtype=np.float64)
    return 0.5 * (m + m.swapaxes(-1, -2))


# -- eigen machinery -------------------------------------------------------

def _normalize_signs(v):
    # largest-magnitude entry of each eigenvector made positive
    idx = np.argmax(np.abs(v), axis=-2)
    piv = np.take_along_axis(v, idx[..., None, :], axis=-2)
    return v * np.where(piv < 0, -1.0, 1.0)


def eigh_batch(a):
    """Eigenvalues (descending) and sign-normalised eigenvectors of symmetric stacks."""
    a = np.asarray(a, dtype=np.float64)
    w, v, sweeps = kernels.jacobi_eigh_batch(a)
    bad = np.flatnonzero(sweeps < 0)
    if bad.size:
        raise ConvergenceError("Jacobi iteration did not converge", vertex=int(bad[0]))
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return w, _normalize_signs(v)


def eigh(a):
    """Descending eigendecomposition of one symmetric matrix by cyclic Jacobi."""
    w, v = eigh_batch(as_matrix(a)[None])
    return w[0], v[0]


def _signature_batch(w, tol):
    scale = np.max(np.abs(w), axis=-1)
    cut = tol * scale
    degenerate = np.any(np.abs(w) <= cut[:, None], axis=-1)
    n_plus = np.sum(w > cut[:, None], axis=-1)
    n_minus = np.sum(w < -cut[:, None], axis=-1)
    return n_plus, n_minus, degenerate


def inertia_batch(a, tol=DEFAULT_TOL):
    """Per-matrix ``(n_plus, n_minus, gaps)``; ``gaps`` is the smallest ``|eigenvalue|``.

    Raises :class:`DegenerateForm` naming the first offending index.
    """
    w, _ = eigh_batch(a)
    n_plus, n_minus, degenerate = _signature_batch(w, tol)
    bad = np.flatnonzero(degenerate)
    if bad.size:
        i = int(bad[0])
        raise DegenerateForm(
            f"eigenvalue {w[i][np.argmin(np.abs(w[i]))]:.3e} within tolerance of zero",
            vertex=i,
        )
    return n_plus, n_minus, np.min(np.abs(w), axis=-1)


def inertia(form, tol=DEFAULT_TOL):
    """Signature ``(n_plus, n_minus)`` of a non-degenerate form.

    Eigenvalues within ``tol * ||A||_2`` of zero make the form degenerate.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w, _ = eigh(form)
    n_plus, n_minus, degenerate = _signature_batch(w[None], tol)
    if degenerate[0]:
        raise DegenerateForm(f"form is degenerate at tolerance {tol:g}")
    return Inertia(int(n_plus[0]), int(n_minus[0]))


def congruence_diagonalize(form, tol=DEFAULT_TOL):
    """Find ``g`` with ``g^T A g = d``, ``d = diag(+1.., -1..)``.

    The columns of ``g`` are eigenvectors of ``A`` scaled by ``1/sqrt|lambda|``,
    eigenvalues taken in descending order so the ``+1`` block comes first.
    """
    a = as_matrix(form)
    inertia(a, tol)
    w, v = eigh(a)
    g = v / np.sqrt(np.abs(w))
    return CongruenceWitness(g, np.diag(np.sign(w)))


def gl0_congruence_witness(g):
    """Replace ``g`` by ``h g`` (``h = diag(-1, 1, ..., 1)``) when ``det g < 0``.

    ``h`` commutes with every diagonal ``delta`` and squares to one, so
    ``(hg)^T delta (hg) = g^T delta g``: the orbit through a diagonal form is
    already swept out by the identity component of GL(n).
    """
    g = np.array(g, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {g.shape}")
    sign, logdet = np.linalg.slogdet(g)
    col_norms = np.linalg.norm(g, axis=0)
    # Hadamard ratio |det g| / prod ||g_j|| lies in [0, 1]
    if sign == 0 or np.any(col_norms == 0) or logdet - np.sum(np.log(col_norms)) < np.log(SINGULAR_REL_TOL):
        raise SingularMatrix("matrix is numerically singular")
    if sign > 0:
        return g
    g[0, :] *= -1.0
    return g


# -- positive definite helpers ---------------------------------------------

def cholesky_batch(r, what="reference form"):
    """Lower Cholesky factors of a stack of SPD matrices."""
    c, info = kernels.cholesky_batch(as_matrix(r))
    bad = np.flatnonzero(info >= 0)
    if bad.size:
        i = int(bad[0])
        raise NotPositiveDefinite(f"{what} is not positive definite (pivot {int(info[i])})", vertex=i)
    return c


def spd_inverse_batch(r, what="reference form"):
    """Inverse of SPD matrices as ``C^-T C^-1`` from the Cholesky factor ``C``."""
    ci = kernels.tril_inv_batch(cholesky_batch(r, what))
    return ci.swapaxes(-1, -2) @ ci


def generalized_eigh_batch(q, r, what="reference form"):
    """Solve ``Q b = lambda R b`` for symmetric ``Q`` and SPD ``R``.

    Returns descending eigenvalues and a basis ``B`` with ``B^T R B = I`` and
    ``B^T Q B = diag(lambda)``.
    """
    ci = kernels.tril_inv_batch(cholesky_batch(r, what))
    m = ci @ as_matrix(q) @ ci.swapaxes(-1, -2)
    lam, w = eigh_batch(0.5 * (m + m.swapaxes(-1, -2)))
    return lam, ci.swapaxes(-1, -2) @ w


def operator_L_batch(r, q):
    return spd_inverse_batch(r) @ as_matrix(q)


def operator_L(r, q):
    """The endomorphism ``L = R^-1 Q`` characterised by ``b_q(u, v) = b_r(Lu, v)``."""
    return operator_L_batch(as_matrix(r)[None], as_matrix(q)[None])[0]


def sqrt_from_pair_batch(q, r, tol=DEFAULT_TOL):
    """Positive square root of ``L = R^-1 Q`` from the generalised eigenproblem ``(Q, R)``.

    With ``B^T R B = I`` and ``B^T Q B = Lambda`` one has ``L = B Lambda B^T R``;
    the root is ``S = B sqrt(Lambda) B^T R``, again ``R``-symmetric.
    """
    r = as_matrix(r)
    lam, b = generalized_eigh_batch(q, r)
    low = lam[:, -1]
    bad = np.flatnonzero(low <= tol)
    if bad.size:
        i = int(bad[0])
        raise NonPositiveSpectrum(f"eigenvalue {low[i]:.3e} is not positive", vertex=i)
    return (b * np.sqrt(lam)[:, None, :]) @ b.swapaxes(-1, -2) @ r


def spd_sqrt(m, tol=DEFAULT_TOL, metric=None):
    """Unique square root with positive spectrum of a positive ``metric``-symmetric operator.

    Parameters
    ----------
    m : array_like, (n, n)
        Operator with ``metric @ m`` symmetric and positive spectrum, typically
        ``operator_L(metric, q)``.
    tol : float
        Eigenvalues of ``m`` must exceed this.
    metric : array_like or SymForm, optional
        SPD inner product making ``m`` self-adjoint; identity by default.

    Returns
    -------
    ndarray
        ``S`` with ``S @ S = m`` and ``metric @ S`` symmetric.
    """
    m = np.asarray(m, dtype=np.float64)
    r = np.eye(m.shape[0]) if metric is None else as_matrix(metric)
    q = r @ m
    asym = np.linalg.norm(q - q.T)
    if asym > 1e-8 * max(np.linalg.norm(q), 1.0):
        raise ValueError(f"operator is not self-adjoint for the given metric (asymmetry {asym:.2e})")
    return sqrt_from_pair_batch(q[None], r[None], tol)[0]


def simultaneous_diagonalize(q, r):
    """Basis ``B`` with ``B^T R B = I`` and ``B^T Q B = diag(d)``, ``d`` descending.

    ``q`` may be degenerate; ``r`` must be positive definite.
    """
    lam, b = generalized_eigh_batch(as_matrix(q)[None], as_matrix(r)[None])
    return b[0], lam[0]


def openness_radius(q, v_plus, v_minus):
    """Radius of a ball around ``q`` on which the inertia cannot change.

    ``r_plus`` is the minimum of ``q`` on the Euclidean unit sphere of
    ``span(v_plus)`` and ``r_minus`` the minimum of ``-q`` on that of
    ``span(v_minus)``. Any ``q'`` with ``||q - q'||_2 < min(r_plus, r_minus) / 2``
    is positive on the first plane and negative on the second, hence has the
    same inertia. Empty summands contribute no constraint.
    """
    a = as_matrix(q)
    n = a.shape[0]
    radii = []
    for frame, sign, label in ((v_plus, 1.0, "positive"), (v_minus, -1.0, "negative")):
        p = np.asarray(frame, dtype=np.float64).reshape(n, -1)
        if p.shape[1] == 0:
            continue
        lam, _ = generalized_eigh_batch((sign * p.T @ a @ p)[None], (p.T @ p)[None], "frame Gram matrix")
        if lam[0, -1] <= 0:
            raise NotDefiniteOnSummand(f"form is not {label} definite on the given summand")
        radii.append(lam[0, -1])
    return 0.5 * min(radii)


# -- subspaces ----------------------------------------------------------------

def orthonormal_basis(frame):
    """Orthonormal basis (``Q`` of a thin QR) of the column span of ``frame``."""
    f = np.asarray(frame, dtype=np.float64)
    if f.shape[-1] == 0:
        return f
    return np.linalg.qr(f)[0]


def _angles_from_bases(qa, qb):
    # qb spans the smaller space; cosines from qa^T qb, sines from the part of
    # qb outside span(qa), paired up so that small angles keep full accuracy
    c = qa.swapaxes(-1, -2) @ qb
    cos = np.linalg.svd(c, compute_uv=False)
    sin = np.linalg.svd(qb - qa @ c, compute_uv=False)[..., ::-1]
    return np.arctan2(sin, cos)


def principal_angles(a, b):
    """Principal angles (ascending, radians) between the column spans of ``a`` and ``b``."""
    qa = orthonormal_basis(a)
    qb = orthonormal_basis(b)
    if qa.shape[-1] == 0 or qb.shape[-1] == 0:
        return np.zeros(0)
    if qb.shape[-1] > qa.shape[-1]:
        qa, qb = qb, qa
    return _angles_from_bases(qa, qb)


def max_principal_angle_batch(a, b):
    """Largest principal angle between paired column spans of two frame stacks."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape[-1] == 0:
        return np.zeros(a.shape[0])
    qa = np.linalg.qr(a)[0]
    qb = np.linalg.qr(b)[0]
    return _angles_from_bases(qa, qb)[..., -1]


def frame_rank_ok_batch(frames, rel_tol=1e-10):
    """Whether each frame has full column rank (``sigma_min > rel_tol * sigma_max``)."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.shape[-1] == 0:
        return np.ones(frames.shape[0], dtype=bool)
    s = np.linalg.svd(frames, compute_uv=False)
    return s[..., -1] > rel_tol * s[..., 0]


# -- text representation -----------------------------------------------------

def format_real(x):
    """Decimal text of a real with 17 significant digits (round-trips exactly)."""
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"cannot format non-finite value {x}")
    s = f"{x:.17g}"
    return "0" if s == "-0" else s


def row_major(m):
    """Row-major list of the entries of a matrix."""
    return [float(x) for x in np.asarray(m, dtype=np.float64).reshape(-1)]
