"""Command-line front end writing CSV/JSON data files.

Exit codes: 0 success, 2 argument error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import io as bio
from .core import Snr

EXIT_OK, EXIT_ARGS, EXIT_NUMERIC = 0, 2, 3


class ArgumentError(Exception):
    pass


def _snr(db):
    return Snr.from_db(float(db))


def _emit_csv(args, header, rows, params, seed=None):
    m = bio.manifest(args.command, params, seed)
    if args.out in (None, "-"):
        for line in bio.manifest_lines(m):
            print(line)
        print(",".join(header))
        for r in rows:
            print(",".join(str(bio._fmt(v)) for v in r))
    else:
        bio.write_csv(args.out, header, rows, m)


def _emit_json(args, obj, params, seed=None):
    m = bio.manifest(args.command, params, seed)
    if args.out in (None, "-"):
        print(json.dumps({"manifest": m, **obj}, indent=2, default=bio._json_default))
    else:
        bio.write_json(args.out, obj, m)


def cmd_capacity(args):
    from .capacity import capacity_general, capacity_reactive, capacity_resistive

    dbs = bio.parse_range(args.snr_db)
    solver = {"general": capacity_general, "reactive": capacity_reactive,
              "resistive": capacity_resistive}[args.load]
    rows = []
    for db in dbs:
        pt = solver(_snr(db))
        if args.load == "reactive":
            rows.append([f"{db:g}", pt.rate])
        else:
            law = pt.input_law
            coords = law.radii if args.load == "general" else law.points
            rows.append([f"{db:g}", pt.rate, pt.k,
                         ";".join(repr(float(v)) for v in coords),
                         ";".join(repr(float(v)) for v in law.probs)])
    header = ["snr_db", "rate_bpcu"]
    if args.load != "reactive":
        header += ["k", "radii" if args.load == "general" else "points", "probs"]
    _emit_csv(args, header, rows, {"load": args.load, "snr_db": args.snr_db})


def cmd_mi(args):
    from .mi import RealConstellation, mi_complex_discrete, mi_real_discrete, source_entropy

    c = bio.load_constellation(args.constellation)
    rho = _snr(args.snr_db)
    if args.real:
        if np.any(np.abs(c.points.imag) > 1e-12):
            raise ArgumentError("--real given but points have imaginary parts")
        order = np.argsort(c.points.real)
        mi = mi_real_discrete(RealConstellation(c.points.real[order], c.probs[order]), rho)
    else:
        mi = mi_complex_discrete(c, rho)
    rec = {"snr_db": float(args.snr_db), "mi_bpcu": float(mi),
           "source_entropy_bits": float(source_entropy(c.probs))}
    print(json.dumps(rec))


def cmd_design(args):
    from .constellations import design_apsk, design_psk, design_qam
    from .mi import mi_complex_discrete

    meta = {"kind": args.kind, "m": args.m}
    if args.kind == "apsk":
        if args.design_snr_db is None:
            raise ArgumentError("apsk needs --design-snr-db")
        d = design_apsk(args.m, _snr(args.design_snr_db))
        c = d.constellation
        meta.update(d.metadata())
    elif args.kind == "psk":
        c = design_psk(args.m)
    else:
        c = design_qam(args.m)
    if args.design_snr_db is not None:
        meta["design_snr_db"] = float(args.design_snr_db)
        meta["mi_bpcu"] = float(mi_complex_discrete(c, _snr(args.design_snr_db)))
    _emit_json(args, bio.constellation_to_dict(c, meta),
               {"kind": args.kind, "m": args.m, "design_snr_db": args.design_snr_db})


def cmd_circuit(args):
    from .circuit import SwitchedLoadTopology, optimize_circuit_multistart

    if args.n_caps + args.n_res < 1:
        raise ArgumentError("circuit needs at least one switched component")
    t = SwitchedLoadTopology(args.n_caps, args.n_res)
    d = optimize_circuit_multistart(t, _snr(args.design_snr_db), seeds=range(args.seeds))
    out = d.to_dict()
    out["points"] = bio.constellation_to_dict(d.constellation)["points"]
    _emit_json(args, out, {"n_caps": args.n_caps, "n_res": args.n_res,
                           "design_snr_db": args.design_snr_db, "seeds": args.seeds})


def cmd_region(args):
    from .region import (ReactanceBandConstraint, calibrate_q_factor, excluded_area_fraction,
                         high_snr_rate_loss, region_from_reactance_band)

    deltas = [float(v) for v in args.delta.split(",")]
    if args.calibrate:
        q = calibrate_q_factor()
    elif args.q_factor is not None:
        q = args.q_factor
    else:
        raise ArgumentError("give --q-factor or --calibrate")
    rows = []
    for d in deltas:
        r = region_from_reactance_band(ReactanceBandConstraint(d, q))
        rows.append([d, q, excluded_area_fraction(r), high_snr_rate_loss(r)])
    _emit_csv(args, ["delta", "q_factor", "excluded_area_fraction", "rate_loss_bpcu"], rows,
              {"delta": args.delta, "q_factor": args.q_factor, "calibrate": args.calibrate})


def cmd_ambient(args):
    from .ambient import ergodic_capacity, fading_model, outage_capacity

    f = fading_model(args.fading)
    eps = [float(v) for v in args.eps.split(",")] if args.eps else []
    rows = []
    for db in bio.parse_range(args.snr_db):
        er = ergodic_capacity(f, args.n_ambient, _snr(db), args.n_samples, args.seed)
        out = outage_capacity(f, args.n_ambient, _snr(db), eps, args.n_samples, args.seed) if eps else []
        if not eps:
            rows.append([f"{db:g}", er.rate, er.stderr, "", ""])
        for e, o in zip(eps, np.atleast_1d(out)):
            rows.append([f"{db:g}", er.rate, er.stderr, e, float(o)])
    _emit_csv(args, ["snr_db", "ergodic_bpcu", "stderr", "outage_eps", "outage_bpcu"], rows,
              {"fading": args.fading, "n_ambient": args.n_ambient, "snr_db": args.snr_db,
               "eps": args.eps, "n_samples": args.n_samples}, seed=args.seed)


def cmd_stats(args):
    from . import impedance_stats as st

    params = {"which": args.which, "a": args.a, "n": args.n}
    if args.which == "beta":
        beta, dens = st.beta_pdf_grid(args.a, args.n)
        _emit_csv(args, ["beta", "density"], zip(beta, dens), params)
    elif args.which == "reactance":
        x = np.linspace(-10, 10, args.n)
        _emit_csv(args, ["x", "density"], zip(x, st.reactance_pdf_unit_circle(x)), params)
    elif args.which == "resistance":
        r = np.linspace(0, 10, args.n)
        pdf, cdf = st.resistance_pdf_uniform_real(r)
        _emit_csv(args, ["r", "density", "cdf"], zip(r, pdf, cdf), params)
    else:
        rr, xx, dens = st.z_pdf_grid(n=args.n)
        _emit_csv(args, ["r", "x", "density"],
                  zip(rr.ravel(), xx.ravel(), dens.ravel()), params)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="backscatter-capacity",
                                description="Capacity and rate computations for load modulation.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("capacity", help="capacity versus SNR")
    s.add_argument("--load", choices=["general", "reactive", "resistive"], default="general")
    s.add_argument("--snr-db", required=True, help="start:end:step")
    s.add_argument("--out")
    s.set_defaults(func=cmd_capacity)

    s = sub.add_parser("mi", help="MI of a constellation file")
    s.add_argument("constellation")
    s.add_argument("--snr-db", type=float, required=True)
    s.add_argument("--real", action="store_true", help="real-valued channel")
    s.set_defaults(func=cmd_mi)

    s = sub.add_parser("design", help="APSK, PSK or QAM constellation")
    s.add_argument("kind", choices=["apsk", "psk", "qam"])
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--design-snr-db", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_design)

    s = sub.add_parser("circuit", help="optimize a switched-load circuit")
    s.add_argument("--n-caps", type=int, required=True)
    s.add_argument("--n-res", type=int, required=True)
    s.add_argument("--design-snr-db", type=float, default=20.0)
    s.add_argument("--seeds", type=int, default=16)
    s.add_argument("--out")
    s.set_defaults(func=cmd_circuit)

    s = sub.add_parser("region", help="reactance-band rate loss")
    s.add_argument("--delta", required=True, help="comma-separated fractions")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--q-factor", type=float)
    g.add_argument("--calibrate", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_region)

    s = sub.add_parser("ambient", help="ergodic and outage rates")
    s.add_argument("--fading", default="circular-gaussian")
    s.add_argument("--n-ambient", type=int, default=1)
    s.add_argument("--snr-db", required=True)
    s.add_argument("--eps", default="", help="comma-separated outage probabilities")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n-samples", type=int, default=10**5)
    s.add_argument("--out")
    s.set_defaults(func=cmd_ambient)

    s = sub.add_parser("stats", help="impedance-plane PDF grids")
    s.add_argument("which", choices=["beta", "reactance", "resistance", "z"])
    s.add_argument("--a", type=float, default=0.5)
    s.add_argument("--n", type=int, default=361)
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats)
    return p


def _join_negative_values(argv):
    # let "--snr-db -10:-5:1" through argparse, which would read it as a flag
    argv = list(argv)
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in ("--snr-db", "--design-snr-db") and i + 1 < len(argv) and argv[i + 1][:1] == "-":
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv=None) -> int:
    from .mi import IntegrationError

    parser = build_parser()
    args = parser.parse_args(_join_negative_values(sys.argv[1:] if argv is None else argv))
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        args.func(args)
    except (ArgumentError, bio.FormatError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (IntegrationError, ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
