"""``ampsup`` command line: config loading, dispatch, CSV/JSON output and run manifests.

Exit codes: 0 ok, 2 bad config or arguments, 3 verification failure,
4 resource budget exhausted (or tail tolerance not met).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, amplifier, bergman, geometry, lattice
from .errors import ConfigurationError, InputError, ResourceError, VerificationError
from .order import load_config, verify_order

EXIT_CONFIG, EXIT_VERIFY, EXIT_BUDGET = 2, 3, 4


def _floats(text, n):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise InputError(f"expected {n} comma-separated numbers, got {text!r}") from exc
    if len(vals) != n:
        raise InputError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


class Run:
    """Loaded config plus the common flags; owns output and manifest writing."""

    def __init__(self, args):
        self.args = args
        self.config = load_config(args.config)
        self._order = None

    @property
    def order(self):
        # every lattice/kernel command goes through verification first
        if self._order is None:
            report = verify_order(self.config.order)
            if not report.passed:
                raise VerificationError(f"order failed verification: {', '.join(report.failures)}")
            self._order = self.config.order
        return self._order

    def manifest(self):
        import mpmath
        import scipy

        params = {k: v for k, v in sorted(vars(self.args).items()) if k not in ("func", "out")}
        return {
            "command": self.args.command,
            "config_hash": hashlib.sha256(self.config.canonical_json.encode()).hexdigest(),
            "parameters": params,
            "budgets": {"budget_elements": self.args.budget_elements, "threads": self.args.threads},
            "versions": {
                "ampsup": __version__,
                "python": sys.version.split()[0],
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "mpmath": mpmath.__version__,
            },
        }

    def emit(self, text, extra=None):
        manifest = self.manifest()
        if extra:
            manifest.update(extra)
        mtext = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
        if self.args.out:
            out = Path(self.args.out)
            out.write_text(text)
            out.with_name(out.name + ".manifest.json").write_text(mtext)
        else:
            sys.stdout.write(text)
            if self.args.manifest:
                Path(self.args.manifest).write_text(mtext)
            else:
                sys.stderr.write("manifest: " + json.dumps(manifest, sort_keys=True) + "\n")


def cmd_verify(run):
    report = verify_order(run.config.order)
    run.emit(report.to_json() + "\n")
    return 0 if report.passed else EXIT_VERIFY


def cmd_enum(run):
    a = run.args
    z = geometry.parse_point(a.z)
    ball = lattice.enumerate_ball(run.order, a.n, z, a.cosh_cap, budget=a.budget_elements, workers=a.threads)
    run.emit(ball.to_csv())
    return 0


def cmd_cosets(run):
    dec = lattice.coset_reps(run.order, run.args.n, budget=run.args.budget_elements)
    run.emit(dec.to_csv(run.order), {"degree": dec.degree})
    return 0


def cmd_count(run):
    a = run.args
    if a.rho_mode != "cube-inverse":
        raise InputError("only --rho-mode cube-inverse (rho = n^-3) is supported")
    rows = lattice.iw_sar_report(run.order, a.nmax, geometry.parse_point(a.z), a.k, cosh_cap=a.cosh_cap, budget=a.budget_elements)
    run.emit(lattice.iw_sar_csv(rows))
    return 0


KERNEL_HEADER = [
    "z_re", "z_im", "w_re", "w_im", "k", "value_re", "value_im", "log_scale",
    "magnitude_log10", "tail_bound", "terms_used", "cosh_cap", "tail_status",
]


def _kernel_row(ev):
    v = ev.signed_value
    return [ev.z.real, ev.z.imag, ev.w.real, ev.w.imag, ev.k, v.real, v.imag, ev.log_scale,
            ev.magnitude.log10, ev.tail_bound, ev.terms_used, ev.cosh_cap, ev.tail_status]


def cmd_kernel(run):
    a = run.args
    kw = dict(tol=a.tol, psl=a.psl, budget=a.budget_elements)
    if a.box:
        nx, ny = (int(t) for t in _floats(a.grid, 2))
        pts = geometry.sample_grid(_floats(a.box, 4), nx, ny)
        if a.cosh_cap is None:
            raise InputError("grid evaluation needs an explicit --cosh-cap")
        ball = bergman.covering_ball(run.order, pts, a.cosh_cap, budget=a.budget_elements)
        rows = [_kernel_row(bergman.kernel_petersson(run.order, p, p, a.k, a.cosh_cap, ball=ball, **kw)) for p in pts]
    else:
        z = geometry.parse_point(a.z)
        w = geometry.parse_point(a.w) if a.w else z
        rows = [_kernel_row(bergman.kernel_petersson(run.order, z, w, a.k, a.cosh_cap, **kw))]
    run.emit(_csv(KERNEL_HEADER, rows))
    return 0


def cmd_hecke_kernel(run):
    a = run.args
    hv = bergman.hecke_translate_kernel(
        run.order, geometry.parse_point(a.z), a.n, a.k, a.cosh_cap, tol=a.tol, budget=a.budget_elements
    )
    run.emit(bergman.hecke_csv([hv]), {"tail_status": bergman.TAIL_STATUS})
    return 0


def cmd_bound(run):
    a = run.args
    N = a.N if a.N is not None else amplifier.solve_balanced_N(a.k)
    b = amplifier.bound_rhs(a.k, N, a.eps, a.term2_exponent, a.precision)
    rows = [(b.k, b.N, b.term1, b.term2, b.rhs)]
    run.emit(_csv(["k", "N", "term1", "term2", "rhs"], rows))
    return 0


def cmd_curve(run):
    a = run.args
    curve = amplifier.exponent_fit(a.kmin, a.kmax, a.samples, eps=a.eps, drop_term2=a.drop_term2, term2_exponent=a.term2_exponent)
    run.emit(curve.to_csv(), {"fitted_slope": curve.slope})
    print(f"fitted slope: {curve.slope:.6f}", file=sys.stderr if not a.out else sys.stdout)
    return 0


def cmd_check_tail(run):
    a = run.args
    ks = [int(k) for k in a.k.split(",")] if "," in a.k else [int(a.k)]
    tc = amplifier.tail_estimate_check(range(2, a.nmax + 1), ks, a.eps, a.exponent)
    text = _csv(["n", "k", "lhs", "shape", "ratio"], tc.rows)
    run.emit(text, {"fitted_constant": tc.constant})
    return 0 if tc.finite else EXIT_VERIFY


def cmd_check_amplified(run):
    a = run.args
    rep = amplifier.amplified_inequality_check(
        run.order, geometry.parse_point(a.z), a.k, a.N, a.eps, budget=a.budget_elements
    )
    run.emit(json.dumps(rep.to_dict(), indent=2, sort_keys=True, default=str) + "\n")
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="algebra/order JSON (default: bundled (-1,3) order)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--precision", choices=["double", "extended"], default="double")
    common.add_argument("--budget-elements", type=int, default=lattice.DEFAULT_BUDGET)
    common.add_argument("--seed", type=int, default=0, help="only used by randomized property checks")
    common.add_argument("--out", help="output file; a .manifest.json is written next to it")
    common.add_argument("--manifest", help="manifest path when writing to stdout")

    p = argparse.ArgumentParser(prog="ampsup", description="Sup-norm amplification toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=func)
        return sp

    add("verify", cmd_verify, "verify the configured maximal order")
    sp = add("enum", cmd_enum, "norm-n elements in a hyperbolic ball (CSV)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--z", default="0,1")
    sp.add_argument("--cosh-cap", type=float, required=True)
    sp = add("cosets", cmd_cosets, "Hecke coset representatives (CSV)")
    sp.add_argument("--n", type=int, required=True)
    sp = add("count", cmd_count, "small-ball counts against the tail integral (CSV)")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--z", default="0.1,1.2")
    sp.add_argument("--rho-mode", default="cube-inverse")
    sp.add_argument("--cosh-cap", type=float)
    sp = add("kernel", cmd_kernel, "Bergman kernel Petersson values (CSV)")
    sp.add_argument("--z", default="0,1")
    sp.add_argument("--w")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--cosh-cap", type=float)
    sp.add_argument("--psl", action="store_true", help="count +-gamma once")
    sp.add_argument("--box", help="x0,x1,y0,y1 (diagonal values on a grid); write --box=-1,1,... for negative x0")
    sp.add_argument("--grid", default="10,10", help="nx,ny")
    sp = add("hecke-kernel", cmd_hecke_kernel, "Hecke translate of the kernel (CSV)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--z", default="0,1")
    sp.add_argument("--cosh-cap", type=float)
    sp.add_argument("--tol", type=float, default=1e-10)
    for name, func, help in (("bound", cmd_bound, "two-term bound at (k, N)"), ("curve", cmd_curve, "bound curve and fitted exponent")):
        sp = add(name, func, help)
        sp.add_argument("--eps", type=float, default=0.0)
        sp.add_argument("--term2-exponent", type=float, default=5.5, help="exponent of N in the second term")
        if name == "bound":
            sp.add_argument("--k", type=float, required=True)
            sp.add_argument("--N", type=float)
        else:
            sp.add_argument("--kmin", type=float, default=1e5)
            sp.add_argument("--kmax", type=float, default=1e9)
            sp.add_argument("--samples", type=int, default=40)
            sp.add_argument("--drop-term2", action="store_true")
    sp = add("check-tail", cmd_check_tail, "fit the constant in the tail estimate")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--k", default="20,40,60,80,100,120,140,160,180,200", help="one k or a comma list")
    sp.add_argument("--eps", type=float, default=0.0)
    sp.add_argument("--exponent", type=float, default=13 / 4)
    sp = add("check-amplified", cmd_check_amplified, "amplified inequality desk check (JSON)")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--z", default="0,1")
    sp.add_argument("--eps", type=float, default=0.0)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = Run(args)
        return args.func(run)
    except (ConfigurationError, InputError) as exc:
        print(f"ampsup: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VerificationError as exc:
        print(f"ampsup: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except ResourceError as exc:
        print(f"ampsup: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
