"""Sylvester's law of inertia for quadratic forms on discrete vector bundles over a cycle."""
from .bundle import (
    CycleBase,
    DiscreteBundle,
    FormField,
    GaugeField,
    SplittingField,
    SubbundleField,
    constant_form_field,
    gauge_act,
    gauge_act_splitting,
    gauge_act_subbundle,
    make_form_from_splitting,
    make_line_bundle_lk,
    orthogonal_complement,
    trivial_bundle,
)
from .errors import DocumentError, InertiaError, NotConnected
from .gauge import Gau0Witness, isometry_general, isometry_positive, orbit_connect
from .invariants import HomotopyClass, IsoClass, monodromy_w1, theta_homotopy, theta_iso, winding_halfturns
from .kernels import BACKEND
from .linalg import (
    Inertia,
    SymForm,
    congruence_diagonalize,
    inertia,
    openness_radius,
    operator_L,
    simultaneous_diagonalize,
    spd_sqrt,
)
from .splitting import canonical_r, homotopy_witness_r_independence, q_splitting, verify_q_splitting

__version__ = "0.1.0"
