"""Orbit invariants of non-degenerate form fields over the circle.

Two forms are related by *some* gauge transformation iff their q-splittings
have isomorphic summands; over the circle a rank-``p`` bundle is determined by
``p`` and its orientation character ``w1``. They are related by a gauge
transformation in the identity component iff the positive summands are
homotopic as subbundles. On the trivial plane bundle that class is the number
of half turns the positive line makes; in higher rank ``pi_1`` of the
Grassmannian is ``Z/2`` and the class is again read off from ``w1``.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bundle import ADJACENCY_MARGIN, SplittingField, interpolate_positive, orthogonal_complement
from .errors import AdjacencyViolation, Unsupported
from .splitting import check_time_adjacent, q_splitting

WINDING = "winding"
ORIENTABILITY = "orientability"


class IsoClass(NamedTuple):
    rank_plus: int
    w1_plus: int
    rank_minus: int
    w1_minus: int


class HomotopyClass(NamedTuple):
    kind: str
    value: int


def line_angles(s):
    """Angle in ``[0, pi)`` of the line field ``s`` at every vertex (rank-2 charts)."""
    b = s.frames[:, :, 0]
    return np.mod(np.arctan2(b[:, 1], b[:, 0]), np.pi)


def _edge_steps(theta):
    d = np.roll(theta, -1) - theta
    d = np.mod(d + np.pi / 2, np.pi) - np.pi / 2
    return np.where(d == -np.pi / 2, np.pi / 2, d)


def winding_halfturns(s):
    """Signed number of half turns made by a line subbundle of the trivial plane bundle."""
    if s.bundle.rank != 2 or s.dim != 1:
        raise Unsupported(f"winding needs a line in a rank-2 bundle, got dim {s.dim} in rank {s.bundle.rank}")
    if not s.bundle.is_trivial():
        raise Unsupported("winding is only defined here for the trivial bundle")
    d = _edge_steps(line_angles(s))
    bad = np.flatnonzero(np.abs(d) >= np.pi / 2 - ADJACENCY_MARGIN)
    if bad.size:
        raise AdjacencyViolation("line turns by pi/2 or more", edge=int(bad[0]))
    total = np.sum(d) / np.pi
    k = int(round(total))
    assert abs(total - k) < 1e-6, total
    return k


def monodromy_w1(s):
    """Orientation character of a subbundle around the loop, as ``+1`` / ``-1``.

    A frame is carried across each edge by the transition and then projected
    orthogonally onto the next fiber; the sign of the determinant of the
    return map is ``w1`` evaluated on the loop. Per edge, the projection in
    frame coordinates is ``M_i = (B_{i+1}^T B_{i+1})^-1 B_{i+1}^T t_i B_i``, so
    the answer is the product of the signs of ``det M_i``, which does not depend
    on the frames chosen.
    """
    if s.dim == 0:
        return 1
    nxt = np.roll(s.frames, -1, axis=0)
    nxt_t = nxt.swapaxes(-1, -2)
    m = np.linalg.solve(nxt_t @ nxt, nxt_t @ s.transported())
    sign, _ = np.linalg.slogdet(m)
    bad = np.flatnonzero(sign == 0)
    if bad.size:
        raise AdjacencyViolation("projection onto the next fiber is singular", edge=int(bad[0]))
    return int(np.prod(sign))


def _winding_applies(q):
    return q.bundle.rank == 2 and q.inertia == (1, 1) and q.bundle.is_trivial()


def theta_iso(q, r=None):
    """Summand ranks and orientation characters of the q-splitting."""
    s = q_splitting(q, r).splitting
    return IsoClass(s.plus.dim, monodromy_w1(s.plus), s.minus.dim, monodromy_w1(s.minus))


def theta_homotopy(q, r=None):
    """Homotopy class of the positive summand of the q-splitting."""
    s = q_splitting(q, r).splitting
    if _winding_applies(q):
        return HomotopyClass(WINDING, winding_halfturns(s.plus))
    return HomotopyClass(ORIENTABILITY, monodromy_w1(s.plus))


def invariants_of(q, r=None, splitting=None):
    """Both invariants ``(IsoClass, HomotopyClass)`` from one q-splitting."""
    s = splitting if splitting is not None else q_splitting(q, r).splitting
    iso = IsoClass(s.plus.dim, monodromy_w1(s.plus), s.minus.dim, monodromy_w1(s.minus))
    if _winding_applies(q):
        hom = HomotopyClass(WINDING, winding_halfturns(s.plus))
    else:
        hom = HomotopyClass(ORIENTABILITY, iso.w1_plus)
    return iso, hom


def invariants_report(iso, hom):
    return {"iso": iso._asdict(), "homotopy": hom._asdict()}


def summand_invariants(s):
    """``w1`` of a subbundle, plus its winding when that is defined."""
    out = {"dim": s.dim, "w1": monodromy_w1(s)}
    if s.dim == 1 and s.bundle.rank == 2 and s.bundle.is_trivial():
        out["winding"] = winding_halfturns(s)
    return out


@dataclass(frozen=True, eq=False)
class ComplementReport:
    complement0: object
    complement1: object
    invariants0: dict
    invariants1: dict
    witness: list

    @property
    def equal(self):
        return self.invariants0 == self.invariants1


def complement_homotopy_determination(s0, r0, r1, steps=16):
    """Compare the ``r0``- and ``r1``-orthogonal complements of one subbundle.

    The complements taken along ``t -> (1 - t) r0 + t r1`` form a discrete
    homotopy between the splittings ``(s0, s0^r0)`` and ``(s0, s0^r1)``, which is
    returned as ``witness`` after checking temporal adjacency.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    witness = []
    for j in range(steps):
        r = interpolate_positive(r0, r1, j / (steps - 1))
        witness.append(SplittingField(s0, orthogonal_complement(s0, r)))
    check_time_adjacent(witness, "complement")
    c0, c1 = witness[0].minus, witness[-1].minus
    return ComplementReport(c0, c1, summand_invariants(c0), summand_invariants(c1), witness)
