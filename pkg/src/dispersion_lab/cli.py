"""Command-line entry point ``dispersion-lab``.

Exit status: 0 on success, 2 when an assumption gate refuses the medium, 1 on
any other failure. Failures print one ``<module>.<Error>: message`` line on stderr.
CSV floats carry 17 significant digits; JSON floats use the shortest exact repr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from .errors import AssumptionViolated, DispersionLabError, RegressionUnstable

EXIT_OK, EXIT_FAILURE, EXIT_REFUSED = 0, 1, 2


class UsageError(DispersionLabError):
    module = "cli"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- output


def _num(x):
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _num(x.real), "im": _num(x.imag)}
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_num(v) for v in x]
    return x


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _emit(text: str, out: str):
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _json(obj, out: str):
    _emit(json.dumps(_num(obj), indent=2, sort_keys=True) + "\n", out)


def _csv(header, rows, out: str):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, (int, np.integer)) else _fmt(v) for v in r])
    _emit(buf.getvalue(), out)


def _threads(args) -> int:
    env = os.environ.get("DISPERSION_LAB_THREADS")
    n = int(env) if env else args.threads
    if n < 1:
        raise UsageError("threads must be >= 1")
    return n


def _spec(args):
    from .material import load_spec

    return load_spec(args.spec)


def _positive(name, value):
    if not value > 0:
        raise UsageError(f"--{name} must be > 0")


def _range(lo_name, lo, hi_name, hi):
    if not lo < hi:
        raise UsageError(f"--{lo_name} must be < --{hi_name}")


def _points(value, minimum=2):
    if value < minimum:
        raise UsageError(f"--points must be >= {minimum}")


# -------------------------------------------------------------- commands


def cmd_check(args):
    from .material import herglotz_sample, log_polar_grid, validate_assumptions

    spec = _spec(args)
    _points(args.points)
    rep = validate_assumptions(spec)
    h = herglotz_sample(spec, log_polar_grid(args.points))
    _json({"assumptions": rep.to_dict(), "violated": rep.violated(),
           "herglotz": {"min_im_omega_eps": h.min_im_omega_eps,
                        "min_im_omega_mu": h.min_im_omega_mu,
                        "max_symmetry_defect": h.max_symmetry_defect,
                        "n_points": h.n_points, "passive": h.passive},
           "spec": spec.to_dict()}, args.out)


def cmd_herglotz(args):
    from .material import herglotz_sample, log_polar_grid

    spec = _spec(args)
    _points(args.points)
    _range("rmin", args.rmin, "rmax", args.rmax)
    h = herglotz_sample(spec, log_polar_grid(args.points, args.rmin, args.rmax))
    _json({**h.__dict__, "passive": h.passive}, args.out)


def cmd_measure(args):
    from .measure import density_samples, measure_of

    spec = _spec(args)
    _points(args.points)
    _range("xmin", args.xmin, "xmax", args.xmax)
    m = measure_of(spec, args.channel)
    if args.describe:
        _json({"herglotz_slope": m.herglotz_slope,
               "point_masses": [{"xi": x, "mass": w} for x, w in m.point_masses],
               "densities": [d.__dict__ for d in m.densities]}, args.out)
        return
    rows = density_samples(m, np.linspace(args.xmin, args.xmax, args.points))
    _csv(["xi", "density"], rows, args.out)


def cmd_dispersion(args):
    from .dispersion import trace_branches

    spec = _spec(args)
    _positive("kmin", args.kmin)
    _range("kmin", args.kmin, "kmax", args.kmax)
    _points(args.points)
    grid = np.concatenate([[0.0], np.geomspace(args.kmin, args.kmax, args.points)])
    bs = trace_branches(spec, grid, strict=args.strict)
    rows = ((k, n, bs.omega[n, i].real, bs.omega[n, i].imag)
            for i, k in enumerate(bs.k) for n in range(bs.n_branches))
    _csv(["k", "n", "re_omega", "im_omega"], rows, args.out)


def cmd_bands(args):
    from .dispersion import band_structure

    spec = _spec(args)
    if spec.dissipative:
        raise AssumptionViolated("non_dissipative", "band structure needs all damping = 0")
    _json(band_structure(spec).to_dict(), args.out)


def cmd_asymptotics(args):
    from .dispersion import asymptotic_coefficients, verify_asymptotics

    spec = _spec(args)
    co = asymptotic_coefficients(spec)
    report = {"A_infinity": co.A_infinity,
              "entries": [{"anchor": e.anchor, "kind": e.kind, "value": e.value,
                           "reference_value": e.reference_value} for e in co.entries]}
    if args.verify:
        report["fits"] = [f.to_dict() for f in verify_asymptotics(spec, co, dps=args.dps)]
    _json(report, args.out)


def cmd_modal_spectrum(args):
    from .modal import build_modal, spectral_decomposition

    spec = _spec(args)
    if args.k < 0:
        raise UsageError("--k must be >= 0")
    dec = spectral_decomposition(build_modal(spec, args.k, args.sign))
    _json({"k": args.k, "polarization_sign": args.sign,
           "eigenvalues": [[w.real, w.imag] for w in dec.eigenvalues],
           "diagonalizable": dec.diagonalizable,
           "projector_norms": dec.condition}, args.out)


def cmd_modal_evolve(args):
    from .modal import build_modal, rk4_reference

    spec = _spec(args)
    if args.k < 0:
        raise UsageError("--k must be >= 0")
    _positive("t", args.t)
    _positive("dt", args.dt)
    sys_ = build_modal(spec, args.k, args.sign)
    u0 = np.ones(sys_.dim, dtype=complex)
    led = rk4_reference(sys_, u0, args.t, args.dt, record_every=args.every)
    defect = np.concatenate([[math.nan], led.balance_defect, [math.nan]])
    rows = zip(led.times, led.energy, led.dissipation, defect)
    _csv(["t", "energy", "dissipation", "balance_defect"], rows, args.out)


def cmd_decay(args):
    from .decay import InitialDataProfile, energy_trace, fit_decay_exponent, predicted_exponent

    spec = _spec(args)
    _positive("tmin", args.tmin)
    _range("tmin", args.tmin, "tmax", args.tmax)
    _points(args.points)
    _points(args.kpoints, 3)
    profile = InitialDataProfile(args.p, args.s, args.margin)
    times = np.geomspace(args.tmin, args.tmax, args.points)
    tr = energy_trace(spec, profile, times, points=args.kpoints, threads=_threads(args),
                      fit_window=False)
    _csv(["t", "energy", "energy_total", "lf", "mf", "hf"], tr.rows(), args.out)
    window = (max(args.tmin, args.tmax / 10), args.tmax)
    fit = {"fitted_exponent": None, "r2": None, "fit_window": window, "fit_status": "ok"}
    try:
        slope, r2 = fit_decay_exponent(tr, window)
        fit.update(fitted_exponent=-slope, r2=r2)
    except RegressionUnstable as exc:
        # the CSV stays useful, so an unstable fit is reported rather than fatal
        fit.update(r2=exc.r2, fit_status=f"unstable: {exc}")
    except ValueError as exc:
        fit["fit_status"] = f"skipped: {exc}"
    summary = {**fit, "predicted_exponent": predicted_exponent(spec, profile),
               "region_cuts": tr.cuts}
    target = args.summary or (str(Path(args.out).with_suffix(".json")) if args.out != "-" else None)
    if target:
        _json(summary, target)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dispersion-lab", description="Dispersive Lorentz media toolkit.")
    p.add_argument("--threads", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def spec_cmd(name, fn, help_):
        c = sub.add_parser(name, help=help_)
        c.add_argument("--spec", required=True)
        c.add_argument("--out", default="-")
        c.set_defaults(func=fn)
        return c

    c = spec_cmd("check", cmd_check, "assumption flags and passivity sampling")
    c.add_argument("--points", type=int, default=10_000)
    c = spec_cmd("herglotz", cmd_herglotz, "sample omega*eps, omega*mu in the upper half-plane")
    c.add_argument("--points", type=int, default=10_000)
    c.add_argument("--rmin", type=float, default=1e-2)
    c.add_argument("--rmax", type=float, default=1e2)
    c = spec_cmd("measure", cmd_measure, "measure description or density samples")
    c.add_argument("--channel", choices=("electric", "magnetic"), default="electric")
    c.add_argument("--xmin", type=float, default=-10.0)
    c.add_argument("--xmax", type=float, default=10.0)
    c.add_argument("--points", type=int, default=1001)
    c.add_argument("--describe", action="store_true")

    d = sub.add_parser("dispersion", help="dispersion branches")
    dsub = d.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = dsub.add_parser("trace")
    c.add_argument("--spec", required=True)
    c.add_argument("--out", default="-")
    c.add_argument("--kmin", type=float, default=1e-3)
    c.add_argument("--kmax", type=float, default=1e4)
    c.add_argument("--points", type=int, default=400)
    c.add_argument("--strict", action="store_true")
    c.set_defaults(func=cmd_dispersion)

    spec_cmd("bands", cmd_bands, "band structure of a lossless medium")
    c = spec_cmd("asymptotics", cmd_asymptotics, "asymptotic damping coefficients")
    c.add_argument("--verify", action="store_true")
    c.add_argument("--dps", type=int, default=50)

    m = sub.add_parser("modal", help="modal operator at fixed wavenumber")
    msub = m.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, fn in (("spectrum", cmd_modal_spectrum), ("evolve", cmd_modal_evolve)):
        c = msub.add_parser(name)
        c.add_argument("--spec", required=True)
        c.add_argument("--out", default="-")
        c.add_argument("--k", type=float, required=True)
        c.add_argument("--sign", type=int, choices=(1, -1), default=1)
        c.set_defaults(func=fn)
        if name == "evolve":
            c.add_argument("--t", type=float, required=True)
            c.add_argument("--dt", type=float, required=True)
            c.add_argument("--every", type=int, default=1)

    c = spec_cmd("decay", cmd_decay, "energy decay of profiled initial data")
    c.add_argument("--s", type=float, required=True)
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--margin", type=float, default=0.05)
    c.add_argument("--tmin", type=float, default=1.0)
    c.add_argument("--tmax", type=float, default=1e6)
    c.add_argument("--points", type=int, default=37)
    c.add_argument("--kpoints", type=int, default=2000)
    c.add_argument("--summary", default=None)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            args.func(args)
    except AssumptionViolated as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except DispersionLabError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"cli.{type(exc).__name__}: {exc}".replace("\n", " "), file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
