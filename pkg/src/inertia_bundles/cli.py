"""Command-line front end.

Reports are JSON on stdout, written with the same deterministic formatter as
documents. Exit status: 0 on success, 1 on a domain error (degenerate form,
forms in different orbits, ...), 2 on unreadable or schema-invalid input.
``INERTIA_BUNDLES_TOL`` overrides the degeneracy tolerance.
"""
import argparse
import os
import sys

import numpy as np

from . import io
from .bundle import FormField, SubbundleField, make_line_bundle_lk
from .errors import DocumentError, InertiaError, NotConnected, NotQSplitting
from .gauge import DEFAULT_STEPS, FULL, RESTRICTED, isometry_general, isometry_positive, orbit_connect, residual
from .invariants import invariants_of, invariants_report, summand_invariants
from .linalg import DEFAULT_TOL
from .splitting import q_splitting, require_q_splitting, verify_q_splitting

TOL_ENV = "INERTIA_BUNDLES_TOL"

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2


def tolerance_from_env(environ=None):
    environ = os.environ if environ is None else environ
    raw = environ.get(TOL_ENV)
    if raw is None or raw == "":
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise DocumentError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not 0.0 <= tol < 1.0:
        raise DocumentError(f"{TOL_ENV}={raw!r} must lie in [0, 1)")
    return tol


def _require_form(doc, path):
    if doc.form is None:
        raise DocumentError(f"{path}: document has no form")
    return doc.form


def _inertia(q):
    return {"n_plus": q.inertia.n_plus, "n_minus": q.inertia.n_minus}


def _emit(report):
    sys.stdout.write(io.dumps(report) + "\n")


def _write_out(args, doc):
    if getattr(args, "out", None):
        io.save(doc, args.out)


# -- subcommands --------------------------------------------------------------

def cmd_inspect(args, tol):
    doc = io.load(args.file, tol)
    b = doc.bundle
    report = {
        "schema": "valid",
        "n_vertices": b.n_vertices,
        "rank": b.rank,
        "trivial": b.is_trivial(),
        "monodromy_det_sign": int(np.sign(np.linalg.det(b.monodromy()))),
    }
    if doc.form is not None:
        report["inertia"] = _inertia(doc.form)
        report["eigen_gaps"] = doc.form.eigen_gaps.tolist()
    if doc.subbundles:
        report["subbundles"] = [
            {"dim": s.dim, "max_edge_angle": float(np.max(s.edge_angles())) if s.dim else 0.0}
            for s in doc.subbundles
        ]
    s = doc.splitting()
    if s is not None and doc.form is not None:
        rep = verify_q_splitting(doc.form, s)
        report["q_splitting"] = {"passed": rep.passed, "first_failure": rep.first_failure()}
    if doc.gauge is not None:
        report["gauge_min_abs_det"] = float(np.min(np.abs(np.linalg.det(doc.gauge.maps))))
    if doc.gauge_path is not None:
        report["gauge_path_steps"] = len(doc.gauge_path)
    return report


def cmd_split(args, tol):
    doc = io.load(args.file, tol)
    q = _require_form(doc, args.file)
    r = None
    if args.reference:
        rdoc = io.load(args.reference, tol)
        r = _require_form(rdoc, args.reference)
    res = q_splitting(q, r)
    s = res.splitting
    out = io.Document(doc.bundle, form=q, subbundles=[s.plus, s.minus])
    _write_out(args, out)
    return {
        "inertia": _inertia(q),
        "reference": "identity" if r is None else "document",
        "eigen_gaps": res.eigen_gaps.tolist(),
        "plus": summand_invariants(s.plus),
        "minus": summand_invariants(s.minus),
    }


def _common_splitting(d0, d1, q0, q1):
    """A splitting that is a q-splitting of both forms, or ``None``."""
    candidates = [d.splitting() for d in (d0, d1)]
    candidates += [q_splitting(q0).splitting, q_splitting(q1).splitting]
    for s in candidates:
        if s is None:
            continue
        try:
            require_q_splitting(q0, s, "q0")
            require_q_splitting(q1, s, "q1")
        except NotQSplitting:
            continue
        return s
    return None


def cmd_isometry(args, tol):
    d0, d1 = io.load(args.file0, tol), io.load(args.file1, tol)
    q0, q1 = _require_form(d0, args.file0), _require_form(d1, args.file1)
    if q0.inertia != q1.inertia:
        raise NotConnected(f"inertia {tuple(q0.inertia)} vs {tuple(q1.inertia)}")
    if q0.is_positive_definite():
        method = "positive"
        w = isometry_positive(q0, q1, args.steps)
    else:
        s = _common_splitting(d0, d1, q0, q1)
        if s is None:
            raise NotConnected("no common q-splitting found; use orbit instead")
        method = "splitting"
        w = isometry_general(q0, q1, s, args.steps)
    _write_out(args, io.Document(q0.bundle, gauge=w.endpoint, gauge_path=list(w.path)))
    return {
        "method": method,
        "steps": len(w.path),
        "min_det": w.min_det,
        "residual": residual(q0, q1, w.endpoint),
    }


def cmd_orbit(args, tol):
    d0, d1 = io.load(args.file0, tol), io.load(args.file1, tol)
    q0, q1 = _require_form(d0, args.file0), _require_form(d1, args.file1)
    try:
        c = orbit_connect(q0, q1, args.mode, args.steps)
    except NotConnected as exc:
        report = {"mode": args.mode, "connected": False, "reason": str(exc)}
        if exc.invariants is not None:
            report["invariants0"] = invariants_report(*exc.invariants[0])
            report["invariants1"] = invariants_report(*exc.invariants[1])
        else:
            report["inertia0"] = _inertia(q0)
            report["inertia1"] = _inertia(q1)
        _emit(report)
        print(f"error: NotConnected: {exc}", file=sys.stderr)
        return None
    path = list(c.witness.path) if c.witness is not None else None
    _write_out(args, io.Document(q0.bundle, gauge=c.gauge, gauge_path=path))
    report = {
        "mode": args.mode,
        "connected": True,
        "invariants0": invariants_report(*c.invariants0),
        "invariants1": invariants_report(*c.invariants1),
        "residual": c.residual,
    }
    if c.witness is not None:
        report["witness_steps"] = len(c.witness.path)
        report["witness_min_det"] = c.witness.min_det
    return report


def cmd_invariants(args, tol):
    doc = io.load(args.file, tol)
    q = _require_form(doc, args.file)
    r = None
    if args.reference:
        r = _require_form(io.load(args.reference, tol), args.reference)
    iso, hom = invariants_of(q, r)
    return invariants_report(iso, hom)


def lk_document(n_vertices, k, tol=DEFAULT_TOL):
    """Trivial plane bundle with ``q = +1`` on ``l_k`` and ``-1`` on its orthogonal complement."""
    line = make_line_bundle_lk(n_vertices, k)
    bundle = line.bundle
    b = line.frames
    p = np.stack([-b[:, 1], b[:, 0]], axis=1)
    perp = SubbundleField(bundle, 1, p)
    # frames are orthonormal, so q = b b^T - p p^T; elementwise products keep
    # the document identical across BLAS builds
    q = FormField(bundle, b * b.swapaxes(-1, -2) - p * p.swapaxes(-1, -2), tol)
    return io.Document(bundle, form=q, subbundles=[line, perp])


def cmd_demo_lk(args, tol):
    doc = lk_document(args.n_vertices, args.k, tol)
    text = io.dumps(io.to_dict(doc)) + "\n"
    if args.out:
        io.save(doc, args.out)
        return {"written": args.out, "n_vertices": args.n_vertices, "k": args.k}
    sys.stdout.write(text)
    return None


def _steps_arg(text):
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("must be at least 2")
    return v


def build_parser():
    p = argparse.ArgumentParser(
        prog="inertia-bundles",
        description="Inertia, splittings and gauge orbits of quadratic forms on vector bundles over a cycle.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("inspect", help="validate a document and report inertia and eigen gaps")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_inspect)

    sp = sub.add_parser("split", help="canonical q-splitting relative to a reference field")
    sp.add_argument("file")
    sp.add_argument("--reference", help="document whose positive definite form is the reference (default identity)")
    sp.add_argument("--out", help="write form and splitting to this document")
    sp.set_defaults(func=cmd_split)

    sp = sub.add_parser("isometry", help="identity-component gauge transformation carrying FILE1's form to FILE0's")
    sp.add_argument("file0")
    sp.add_argument("file1")
    sp.add_argument("--steps", type=_steps_arg, default=DEFAULT_STEPS)
    sp.add_argument("--out", help="write gauge field and path witness to this document")
    sp.set_defaults(func=cmd_isometry)

    sp = sub.add_parser("orbit", help="decide whether two forms lie in one gauge orbit")
    sp.add_argument("file0")
    sp.add_argument("file1")
    sp.add_argument("--mode", choices=[FULL, RESTRICTED], default=FULL)
    sp.add_argument("--steps", type=_steps_arg, default=DEFAULT_STEPS)
    sp.add_argument("--out", help="write the connecting gauge field to this document")
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("invariants", help="isomorphism and homotopy class of the q-splitting")
    sp.add_argument("file")
    sp.add_argument("--reference")
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("demo-lk", help="emit the form +1 on l_k, -1 on its complement")
    sp.add_argument("--n-vertices", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_demo_lk)
    return p


def run(argv=None):
    args = build_parser().parse_args(argv)
    try:
        tol = tolerance_from_env()
        report = args.func(args, tol)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InertiaError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if report is None:
        # orbit already printed its negative report; demo-lk printed the document
        return EXIT_DOMAIN if args.command == "orbit" else EXIT_OK
    _emit(report)
    return EXIT_OK


def main(argv=None):
    try:
        return run(argv)
    except SystemExit as exc:
        # argparse usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
