"""Command line entry point: ``hmskit <command> [options]``.

Exit codes: 0 when every non-probe check passes, 1 when a check fails or a
computation breaks, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import acceptance
from .acceptance import Check, Report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def thread_cap() -> int:
    """Worker count from HMSKIT_THREADS (default 1)."""
    raw = os.environ.get("HMSKIT_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"HMSKIT_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"HMSKIT_THREADS must be a positive integer, got {raw!r}")
    return value


def _emit(report: Report, as_json: bool, timings: bool = False, extra: dict | None = None) -> int:
    if as_json:
        payload = report.as_dict(timings)
        if extra:
            payload.update(acceptance._plain(extra))
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for key, value in (extra or {}).items():
            print(f"{key}: {value}")
        for c in report.checks:
            line = f"{c.status.upper():5} {c.name}: computed {c.computed!r}, expected {c.expected!r}"
            if timings:
                line += f" ({c.runtime:.2f} s)"
            print(line)
        print("OK" if report.ok else "FAILED")
    return EXIT_OK if report.ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# commands


def cmd_hh(args) -> int:
    from .bar import bar_oracle
    from .hochschild import BidegreeCell, cyclic_invariant_hh2, hh_dim, truncated_hh

    if not 1 <= args.n <= 4:
        raise UsageError("--n must lie in 1..4")
    report = Report("hh", {"n": args.n, "truncated": args.truncated, "cyclic": args.cyclic, "oracle": args.oracle})
    extra: dict = {}
    if args.truncated or not (args.cyclic or args.oracle):
        res = truncated_hh(args.n)
        extra.update({"hh1": res.hh1_dim, "hh2": res.hh2_dim})
        report.checks += acceptance.truncated_dimensions(ns=(args.n,))[:1]
    if args.cyclic:
        res = cyclic_invariant_hh2(args.n)
        extra["cyclic"] = {"dim": res.dim, "basis": [repr(v) for v in res.basis]}
        report.checks += acceptance.cyclic_invariant_part(ns=(args.n,))
    if args.oracle:
        if args.n != 1:
            raise UsageError("--oracle is only available for --n 1")
        rows = []
        for t in (0, -1, -2, -3):
            for deg in (0, 1, 2):
                s = deg - t
                formula = hh_dim(BidegreeCell(1, s, t, group="cyclic", grading="tilde"))
                oracle = bar_oracle(1, deg, t, "cyclic")
                rows.append({"degree": deg, "t": t, "formula": formula, "oracle": oracle})
                report.checks.append(Check(f"bar complex, degree {deg}, t={t}", "independent bar complex computation",
                                           formula, oracle, "pass" if formula == oracle else "fail"))
        extra["oracle"] = rows
    return _emit(report, args.json, extra=extra)


def cmd_critical(args) -> int:
    from .lg import critical_values_w

    if not 1 <= args.n <= 6:
        raise UsageError("--n must lie in 1..6")
    report = Report("critical", {"n": args.n})
    checks = acceptance.critical_values(ns=(args.n,) if args.n <= 4 else (), f_ns=(args.n,))
    report.checks += checks
    extra = {"projection_critical_values": [complex(z) for z in critical_values_w(args.n)]}
    return _emit(report, args.json, extra=extra)


def cmd_zonotope(args) -> int:
    from fractions import Fraction

    from .zonotope import (
        pairwise_lift_overlaps,
        root_argument,
        self_intersection_check,
        thimble_point_disjoint,
        unlifted_self_intersection,
    )

    if not 1 <= args.n <= 4:
        raise UsageError("--n must lie in 1..4")
    n, m = args.n, args.n + 2
    report = Report("zonotope", {"n": n, "check_lifts": args.check_lifts, "thimbles": args.thimbles})
    extra: dict = {}
    if args.check_lifts or not args.thimbles:
        lifted = self_intersection_check(n)
        flat = unlifted_self_intersection(n)
        report.checks.append(Check(f"lifted zonotope embeds at n={n}", "lifted zonotopes have no self-intersections",
                                   True, lifted.embedded, "pass" if lifted.embedded else "fail"))
        report.checks.append(Check(f"unlifted zonotope self-intersects at n={n}", "vertex self-contact",
                                   False, flat.embedded, "pass" if not flat.embedded else "fail"))
        if args.check_lifts:
            extra["pairwise_lift_contacts"] = {f"{i},{j}": v for (i, j), v in pairwise_lift_overlaps(n).items()}
    if args.thimbles:
        excluded = {Fraction(n + 1, m), -Fraction(n + 1, m)}
        got = [thimble_point_disjoint(n, i) for i in range(m)]
        want = [root_argument(n, i) not in excluded for i in range(m)]
        extra["thimbles_disjoint"] = f"{sum(got)} of {m}"
        extra["root_arguments_pi"] = [str(root_argument(n, i)) for i in range(m)]
        report.checks.append(Check(f"thimble points against the angle criterion at n={n}", "angle criterion",
                                   want, got, "pass" if got == want else "fail"))
    return _emit(report, args.json, extra=extra)


def cmd_flow(args) -> int:
    import numpy as np

    from .monodromy import (
        FlowState,
        LocalModel,
        integrate_flow,
        phase_of_frame,
        torus_adapted_frame,
        verify_phase_term,
        write_trajectory_csv,
    )

    try:
        model = LocalModel(args.n, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.t < 0:
        raise UsageError("--t must be non-negative")
    if not 0 < args.dt <= 1e-3:
        raise UsageError("--dt must lie in (0, 1e-3]")
    y0 = [complex(1.0 + 0.5 * j, 0.2 * j) for j in range(model.k)] + [0.7] * (model.n + 1 - model.k)
    res = verify_phase_term(model, y0, args.t, args.dt)
    report = Report("flow", {"n": args.n, "k": args.k, "t": args.t, "dt": args.dt})
    report.checks.append(Check("phase term", "rotation phase term", res.predicted, res.measured,
                               "pass" if res.ok else "fail"))
    report.checks.append(Check("moduli conserved", "torus moment map is conserved", "< 1e-6", res.modulus_drift,
                               "pass" if res.modulus_drift < 1e-6 * max(1.0, args.t) else "fail"))
    report.checks.append(Check("energy conserved", "energy is conserved", "< 1e-8", res.energy_drift,
                               "pass" if res.energy_drift < 1e-8 * max(1.0, args.t) else "fail"))
    report.checks.append(Check("frame stays Lagrangian", "symplectic products", "< 1e-6", res.max_symplectic,
                               "pass" if res.max_symplectic < 1e-6 else "fail"))
    extra = {"y0": y0, "deviation": res.deviation}
    if args.csv:
        start = np.asarray(y0, dtype=complex)
        traj = integrate_flow(model, FlowState(start, torus_adapted_frame(model, start)), args.t, args.dt,
                              phase_fn=lambda fr, yy, t: phase_of_frame(model, fr, yy))
        extra["csv"] = write_trajectory_csv(traj, args.csv)
    return _emit(report, args.json, extra=extra)


def cmd_coamoeba(args) -> int:
    from .coamoeba import MAX_RESOLUTION, coamoeba_raster, interior_components

    if args.n not in (1, 2):
        raise UsageError("--n must be 1 or 2")
    if not 1 <= args.resolution <= MAX_RESOLUTION:
        raise UsageError(f"--resolution must lie in 1..{MAX_RESOLUTION}")
    out = args.out
    if out is not None:
        for suffix in (".ppm", ".svg"):
            if out.endswith(suffix):
                out = out[: -len(suffix)]
    raster = coamoeba_raster(args.n, args.resolution, out=out)
    report = Report("coamoeba", {"n": args.n, "resolution": args.resolution, "out": args.out})
    extra = {"area_fraction": raster.area_fraction, "files": raster.files}
    if args.n == 1:
        dark = interior_components(raster.dark)
        light = interior_components(~raster.dark)
        extra.update({"dark_components": dark, "light_components": light})
        report.checks.append(Check("dark components", "six triangles", 6, dark, "pass" if dark == 6 else "fail"))
        report.checks.append(Check("light components", "three hexagons", 3, light, "pass" if light == 3 else "fail"))
    return _emit(report, args.json, extra=extra)


def _run_one(number: int) -> list:
    return acceptance.run_criterion(number)


def cmd_verify_all(args) -> int:
    numbers = args.criteria or [c[0] for c in acceptance.CRITERIA]
    known = {c[0] for c in acceptance.CRITERIA}
    if any(x not in known for x in numbers):
        raise UsageError(f"criteria must be among {sorted(known)}")
    workers = thread_cap()
    report = Report("verify-all", {"criteria": numbers})
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, numbers))
    else:
        results = [_run_one(x) for x in numbers]
    for num, checks in zip(numbers, results):
        for c in checks:
            c.name = f"[{num}] {c.name}"
            report.checks.append(c)
    return _emit(report, args.json, timings=args.timings)


# ---------------------------------------------------------------------------
# parser


class UsageError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hmskit", description="Exact and numerical checks for Fukaya category and coamoeba computations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hh", help="Hochschild cohomology tables")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--truncated", action="store_true", help="truncated HH^1 and HH^2")
    p.add_argument("--cyclic", action="store_true", help="cyclic invariant part of HH^2")
    p.add_argument("--oracle", action="store_true", help="cross-check against the bar complex (n = 1)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_hh)

    p = sub.add_parser("critical", help="critical points and values")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("zonotope", help="zonotope embedding and thimble checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--check-lifts", action="store_true", help="also report contacts between distinct lifts")
    p.add_argument("--thimbles", action="store_true", help="thimble argument points against the last lift")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_zonotope)

    p = sub.add_parser("flow", help="integrate the local model flow and check its phase")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--csv", help="write the trajectory to this CSV file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("coamoeba", help="rasterise the coamoeba")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--out", help="output path; .ppm and .svg files are written")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_coamoeba)

    p = sub.add_parser("verify-all", help="run the acceptance suite")
    p.add_argument("--criteria", type=int, nargs="*", help="subset of criterion numbers")
    p.add_argument("--timings", action="store_true", help="include runtimes (breaks byte-identical output)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify_all)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
