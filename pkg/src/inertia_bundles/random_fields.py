"""Reproducible random instances: matrices, smooth fields, splittings.

Fields are drawn as low-order Fourier series in the base angle, so that
neighbouring vertices carry nearby matrices and the adjacency condition holds
at moderate sampling.
"""
import numpy as np

from .bundle import FormField, SplittingField, SubbundleField, make_form_from_splitting


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_symmetric(rng, n, inertia=None, low=0.1, high=10.0):
    """Symmetric matrix with ``|eigenvalues|`` in ``[low, high]`` and the given (or random) signs."""
    mags = rng.uniform(low, high, size=n)
    if inertia is None:
        signs = rng.choice([-1.0, 1.0], size=n)
    else:
        signs = np.array([1.0] * inertia[0] + [-1.0] * inertia[1])
    q = random_orthogonal(rng, n)
    return (q * (signs * mags)) @ q.T


def random_spd(rng, n, low=0.2, high=5.0):
    return random_symmetric(rng, n, (n, 0), low, high)


def random_invertible(rng, n, det_sign=None):
    g = rng.standard_normal((n, n))
    while abs(np.linalg.det(g)) < 1e-3:
        g = rng.standard_normal((n, n))
    if det_sign is not None and np.sign(np.linalg.det(g)) != det_sign:
        g[0] *= -1.0
    return g


def _fourier(rng, bundle, shape, order=2):
    alpha = bundle.base.angles
    out = np.broadcast_to(rng.standard_normal(shape), (bundle.n_vertices,) + shape).copy()
    for k in range(1, order + 1):
        a = rng.standard_normal(shape) / k
        b = rng.standard_normal(shape) / k
        out += np.cos(k * alpha)[:, None, None] * a + np.sin(k * alpha)[:, None, None] * b
    return out


def smooth_spd_stack(rng, bundle, dim=None, amplitude=0.4, order=2):
    """``(N, d, d)`` SPD matrices ``G^T G`` with ``G = I + amplitude * F / ||F||``, ``F`` a Fourier field."""
    d = bundle.rank if dim is None else dim
    f = _fourier(rng, bundle, (d, d), order)
    f /= np.max(np.linalg.norm(f, ord=2, axis=(-2, -1)))
    g = np.eye(d) + amplitude * f
    return g.swapaxes(-1, -2) @ g


def random_spd_field(rng, bundle, amplitude=0.4, order=2):
    """Smooth positive definite form field; condition number at most ``((1+a)/(1-a))^2``."""
    return FormField(bundle, smooth_spd_stack(rng, bundle, amplitude=amplitude, order=order))


def _plane_rotation(angle, n, i=0, j=1):
    r = np.broadcast_to(np.eye(n), angle.shape + (n, n)).copy()
    c, s = np.cos(angle), np.sin(angle)
    r[..., i, i], r[..., i, j], r[..., j, i], r[..., j, j] = c, -s, s, c
    return r


def random_splitting(rng, bundle, p, halfturns=0, amplitude=0.4, order=2, plane=None):
    """Splitting of a trivial bundle from the columns of ``A(alpha) = R(k alpha/2) (I + a F(alpha))``.

    ``R`` rotates the coordinate plane ``plane`` by ``halfturns`` half turns
    around the loop. The default plane ``(p-1, p)`` mixes the last plus column
    with the first minus column, so both summands are non-orientable exactly
    when ``halfturns`` is odd. ``I + a F`` stays invertible because
    ``||a F||_2 <= a < 1``.
    """
    n = bundle.rank
    f = _fourier(rng, bundle, (n, n), order)
    f /= np.max(np.linalg.norm(f, ord=2, axis=(-2, -1)))
    a = np.eye(n) + amplitude * f
    if halfturns:
        if n < 2:
            raise ValueError("half turns need rank >= 2")
        i, j = plane if plane is not None else (max(p - 1, 0), max(p - 1, 0) + 1)
        a = _plane_rotation(0.5 * halfturns * bundle.base.angles, n, i, j) @ a
    plus = SubbundleField(bundle, p, a[:, :, :p])
    minus = SubbundleField(bundle, n - p, a[:, :, p:])
    return SplittingField(plus, minus)


def random_form_over_splitting(rng, s, cross=0.0, amplitude=0.4):
    """Form with ``s`` as a q-splitting; frame blocks ``[[P, X], [X^T, -M]]`` with ``P, M`` SPD.

    ``cross > 0`` adds off-diagonal coupling ``X`` so that the summands are not
    q-orthogonal; definiteness on the summands holds for any ``X``.
    """
    bundle = s.bundle
    p, m = s.plus.dim, s.minus.dim
    q = make_form_from_splitting(
        s,
        smooth_spd_stack(rng, bundle, p, amplitude) if p else np.zeros((bundle.n_vertices, 0, 0)),
        -smooth_spd_stack(rng, bundle, m, amplitude) if m else np.zeros((bundle.n_vertices, 0, 0)),
    )
    if cross and p and m:
        a = s.frame_matrices()
        a_inv = np.linalg.inv(a)
        blocks = a.swapaxes(-1, -2) @ q.forms @ a
        x = cross * _fourier(rng, bundle, (p, m))
        blocks[:, :p, p:] += x
        blocks[:, p:, :p] += x.swapaxes(-1, -2)
        q = FormField(bundle, a_inv.swapaxes(-1, -2) @ blocks @ a_inv)
    return q
