"""The numbered acceptance checks, shared by the command line and the test suite.

Every criterion is a function returning a list of :class:`Check` records.
A record is "pass" or "fail" for exact or toleranced checks and "probe" for
numerical explorations that are reported but never decide the exit status.
"""

from __future__ import annotations

import contextlib
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import algebra, hochschild
from .algebra import (
    associativity_failures,
    enumerate_group,
    graded_dims,
    group_order,
    hom_piece,
    hom_table_graded,
)
from .bar import bar_oracle
from .coamoeba import coamoeba_raster, exact_light_area_fraction, interior_components, pixels_inside_lifts
from .hochschild import (
    BidegreeCell,
    PolyVector,
    cyclic_invariant_hh2,
    hh_dim,
    schouten_diff,
    torus_invariant_hh2,
    truncated_hh,
)
from .lg import (
    RESIDUAL_TOL,
    critical_points_potential,
    critical_values_w,
    level_set_probe,
    newton_critical_f,
    potential_gradient,
)
from .monodromy import (
    FlowState,
    LocalModel,
    integrate_flow,
    monodromy_phase_probe,
    phase_term_sweep,
    torus_adapted_frame,
)
from .zonotope import (
    root_argument,
    self_intersection_check,
    thimble_point_disjoint,
    unlifted_self_intersection,
)

__all__ = ["Check", "Report", "CRITERIA", "run_criterion", "run_all", "sign_mutation"]

SCHEMA_VERSION = "1"


def _plain(x: Any) -> Any:
    """JSON friendly copy: fractions and complex numbers become strings or pairs."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return round(x, 12)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex):
        return [round(x.real, 12), round(x.imag, 12)]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.generic):
        return _plain(x.item())
    return str(x)


@dataclass
class Check:
    name: str
    anchor: str
    expected: Any
    computed: Any
    status: str  # "pass", "fail" or "probe"
    runtime: float = 0.0

    def as_dict(self, timings: bool = False) -> dict:
        out = {
            "name": self.name,
            "anchor": self.anchor,
            "expected": _plain(self.expected),
            "computed": _plain(self.computed),
            "status": self.status,
        }
        if timings:
            out["runtime"] = round(self.runtime, 3)
        return out


@dataclass
class Report:
    command: str
    parameters: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def as_dict(self, timings: bool = False) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "parameters": _plain(self.parameters),
            "checks": [c.as_dict(timings) for c in self.checks],
            "ok": self.ok,
        }


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _timed(fn: Callable, *args, **kwargs):
    t0 = time.perf_counter()
    value = fn(*args, **kwargs)
    return value, time.perf_counter() - t0


# ---------------------------------------------------------------------------
# 1-4: Hochschild cohomology


def truncated_dimensions(ns=(1, 2, 3, 4), budget: float = 30.0) -> list:
    checks, total = [], 0.0
    for n in ns:
        res, dt = _timed(truncated_hh, n)
        total += dt
        expected = (n + 1, 2 * n + 3)
        computed = (res.hh1_dim, res.hh2_dim)
        checks.append(Check(f"truncated HH^1, HH^2 at n={n}", "truncated Hochschild dimensions",
                            expected, computed, _status(computed == expected), dt))
    checks.append(Check("truncated HH runtime", "runtime budget", f"< {budget} s", round(total, 2),
                        _status(total < budget), total))
    return checks


def _power_sum(n: int) -> PolyVector:
    m = n + 2
    out = PolyVector(n)
    for k in range(m):
        out = out + PolyVector.monomial(n, tuple(m if i == k else 0 for i in range(m)))
    return out


def _proportional(a: PolyVector, b: PolyVector) -> bool:
    if a.is_zero() or b.is_zero() or set(a.terms) != set(b.terms):
        return False
    key = next(iter(b.terms))
    ratio = Fraction(a.terms[key]) / Fraction(b.terms[key])
    return all(Fraction(a.terms[k]) == ratio * Fraction(b.terms[k]) for k in b.terms)


def cyclic_invariant_part(ns=(1, 2, 3, 4)) -> list:
    checks = []
    for n in ns:
        res, dt = _timed(cyclic_invariant_hh2, n)
        target = _power_sum(n)
        single = res.dim == 1 and _proportional(res.basis[0], target)
        checks.append(Check(
            f"cyclic invariant HH^2 at n={n}", "cyclic invariant part is spanned by the power sum",
            {"dim": 1, "generator": repr(target)},
            {"dim": res.dim, "basis": [repr(v) for v in res.basis]},
            _status(single), dt,
        ))
    return checks


def torus_invariant_table(ns=(1, 2, 3, 4)) -> list:
    checks = []
    for n in ns:
        t0 = time.perf_counter()
        table = {d: torus_invariant_hh2(n, d) for d in range(3, n + 3)}
        expected = {d: (1 if d == n + 2 else 0) for d in range(3, n + 3)}
        checks.append(Check(f"torus invariant HH^2 table at n={n}", "torus invariant HH^2 by degree",
                            expected, table, _status(table == expected), time.perf_counter() - t0))
    return checks


def _product_monomial(n: int, extra: dict, wedge=()) -> PolyVector:
    m = n + 2
    alpha = tuple(1 + extra.get(i, 0) for i in range(1, m + 1))
    return PolyVector.monomial(n, alpha, wedge)


def schouten_vectors(ns=(1, 2, 3, 4)) -> list:
    checks = []
    for n in ns:
        m = n + 2
        t0 = time.perf_counter()
        bad = []
        for k in range(1, m + 1):
            alpha = tuple(1 if i == k else 0 for i in range(1, m + 1))
            got = schouten_diff(PolyVector.monomial(n, alpha, (k,)))
            if got != _product_monomial(n, {}):
                bad.append(f"y{k}(x)v{k}")
        for j in range(1, m + 1):
            for k in range(j + 1, m + 1):
                alpha = tuple((i == j) + (i == k) for i in range(1, m + 1))
                got = schouten_diff(PolyVector.monomial(n, alpha, (j, k)))
                want = _product_monomial(n, {k: 1}, (k,)) - _product_monomial(n, {j: 1}, (j,))
                if got != want:
                    bad.append(f"y{j}y{k}(x)v{j}^v{k}")
        one = schouten_diff(PolyVector.monomial(n, (0,) * m))
        if not one.is_zero():
            bad.append("1(x)1")
        total = m + m * (m - 1) // 2 + 1
        checks.append(Check(f"contraction test vectors at n={n}", "explicit images of the differential",
                            {"mismatches": []}, {"mismatches": bad, "checked": total},
                            _status(not bad), time.perf_counter() - t0))
    return checks


# ---------------------------------------------------------------------------
# 5-6: the category and its groups


def hom_table_and_associativity(ns=(1, 2, 3, 4), trials: int = 200) -> list:
    checks = []
    for n in ns:
        m = n + 2
        t0 = time.perf_counter()
        wrong = []
        for j in range(1, m + 1):
            for k in range(1, m + 1):
                got, want = graded_dims(hom_piece(n, j, k)), hom_table_graded(n, j, k)
                if got != want:
                    wrong.append({"j": j, "k": k, "computed": got, "table": want})
        checks.append(Check(f"graded Hom dimensions at n={n}", "three-case Hom table",
                            {"pairs": m * m, "mismatches": 0}, {"pairs": m * m, "mismatches": wrong},
                            _status(not wrong), time.perf_counter() - t0))
        fails, dt = _timed(associativity_failures, n, trials)
        checks.append(Check(f"trivial extension associativity at n={n}", "trivial extension composition",
                            {"failures": 0, "trials": trials}, {"failures": fails, "trials": trials},
                            _status(fails == 0), dt))
    return checks


def group_counts(ns=(1, 2, 3, 4)) -> list:
    checks = []
    for n in ns:
        t0 = time.perf_counter()
        m = n + 2
        computed = {
            "projective": len(enumerate_group("projective", n)),
            "special": len(enumerate_group("special", n)),
        }
        expected = {"projective": m**n, "special": m ** (n + 1)}
        ok = computed == expected and all(group_order(k, n) == v for k, v in expected.items())
        checks.append(Check(f"group orders at n={n}", "orders of the diagonal groups",
                            expected, computed, _status(ok), time.perf_counter() - t0))
    return checks


# ---------------------------------------------------------------------------
# 7: bar complex


def bar_equivalence(degrees=(0, 1, 2), ts=(0, -1, -2, -3), groups=("cyclic", "special"), budget: float = 300.0) -> list:
    checks, total = [], 0.0
    for group in groups:
        for t in ts:
            for deg in degrees:
                s = deg - t
                t0 = time.perf_counter()
                oracle = bar_oracle(1, deg, t, group)
                formula = hh_dim(BidegreeCell(1, s, t, group=group, grading="tilde")) if s >= 0 else 0
                dt = time.perf_counter() - t0
                total += dt
                checks.append(Check(f"bar complex vs closed formula, {group}, degree {deg}, t={t}",
                                    "independent bar complex computation", formula, oracle,
                                    _status(oracle == formula), dt))
    checks.append(Check("bar oracle runtime", "runtime budget", f"< {budget} s", round(total, 1),
                        _status(total < budget), total))
    return checks


# ---------------------------------------------------------------------------
# 8-9: critical points and level sets


def critical_values(ns=(1, 2, 3, 4), f_ns=(1, 2, 3, 4, 5, 6)) -> list:
    checks = []
    for n in ns:
        t0 = time.perf_counter()
        m = n + 2
        pts = critical_points_potential(n)
        resid = max(float(np.max(np.abs(potential_gradient(p.head)))) for p, _ in pts)
        value_err = max(abs(v - m * np.exp(-2j * math.pi * i / m)) for i, (_, v) in enumerate(pts, 1))
        checks.append(Check(f"potential critical values at n={n}", "critical values (n+2) zeta^-i",
                            {"residual": f"< {RESIDUAL_TOL}", "count": m},
                            {"residual": resid, "count": len(pts), "value_error": value_err},
                            _status(resid < RESIDUAL_TOL and value_err < RESIDUAL_TOL and len(pts) == m),
                            time.perf_counter() - t0))
        t0 = time.perf_counter()
        roots = critical_values_w(n)
        target = (-1) ** (n + 1) * (n + 1) ** (n + 1)
        err = max(abs(z**m - target) / abs(target) for z in roots)
        checks.append(Check(f"projection critical values at n={n}", "u_1^(n+2) = (-1)^(n+1) (n+1)^(n+1)",
                            {"count": m, "relative_error": f"< {RESIDUAL_TOL}"},
                            {"count": len(roots), "relative_error": err, "roots": roots},
                            _status(len(roots) == m and err < RESIDUAL_TOL), time.perf_counter() - t0))
    for n in f_ns:
        res, dt = _timed(newton_critical_f, n)
        ok = (
            all(x == 1 for x in res.point)
            and res.value == (n + 1) ** (n + 1)
            and all(x > 0 for x in res.hessian_minors)
            and res.all_converged
        )
        checks.append(Check(f"critical point of f at n={n}", "unique nondegenerate critical point",
                            {"point": [1] * n, "value": (n + 1) ** (n + 1), "minors": "> 0", "converged": "20/20"},
                            {"point": list(res.point), "value": res.value,
                             "minors": [str(x) for x in res.hessian_minors],
                             "converged": f"{res.converged}/{res.starts}"},
                            _status(ok), dt))
    return checks


def level_sets() -> list:
    checks = []
    for t, kind, count in ((3, "empty", 0), (4, "point", 1), (9, "sphere", 2)):
        res, dt = _timed(level_set_probe, 1, t)
        ok = res.kind == kind and len(res.points) == count and all(p > 0 for p in res.points)
        checks.append(Check(f"level set f = {t} at n=1", "level sets below, at and above the critical value",
                            {"kind": kind, "points": count}, {"kind": res.kind, "points": [str(p) for p in res.points]},
                            _status(ok), dt))
    return checks


# ---------------------------------------------------------------------------
# 10-11: zonotopes and the coamoeba


def zonotope_geometry(ns=(1, 2, 3, 4)) -> list:
    checks = []
    lifted, dt = _timed(self_intersection_check, 1)
    checks.append(Check("lifted zonotope embeds at n=1", "lifted zonotopes have no self-intersections",
                        True, lifted.embedded, _status(lifted.embedded), dt))
    flat, dt = _timed(unlifted_self_intersection, 1)
    checks.append(Check("unlifted zonotope self-intersects at n=1", "the unlifted zonotope touches itself at vertices",
                        False, flat.embedded, _status(not flat.embedded), dt))
    for n in ns:
        t0 = time.perf_counter()
        m = n + 2
        excluded = {Fraction(n + 1, m), -Fraction(n + 1, m)}
        got = [thimble_point_disjoint(n, i) for i in range(m)]
        want = [root_argument(n, i) not in excluded for i in range(m)]
        checks.append(Check(f"thimble points miss the zonotope at n={n}", "angle criterion arg != +-(n+1)pi/(n+2)",
                            want, got, _status(got == want), time.perf_counter() - t0))
    return checks


def coamoeba_figure(resolution: int = 512, budget: float = 20.0) -> list:
    t0 = time.perf_counter()
    raster = coamoeba_raster(1, resolution)
    dark = interior_components(raster.dark)
    light = interior_components(~raster.dark)
    dt = time.perf_counter() - t0
    frac = raster.area_fraction
    exact_dark = 1 - exact_light_area_fraction(1)
    return [
        Check("dark components at n=1", "six triangles", 6, dark, _status(dark == 6), dt),
        Check("light components at n=1", "three hexagons", 3, light, _status(light == 3), 0.0),
        Check("coamoeba area fraction is 1/2 within 2%", "stated area fraction", 0.5, frac,
              _status(abs(frac - 0.5) <= 0.02 * 0.5), 0.0),
        Check("coamoeba area fraction against the exact hexagon area", "one minus the lifted zonotope area",
              str(exact_dark), frac, _status(abs(frac - float(exact_dark)) <= 0.02 * float(exact_dark)), 0.0),
        Check("no dark pixels deep inside lifted zonotopes", "lifted zonotopes lie in the complement",
              0, pixels_inside_lifts(raster), _status(pixels_inside_lifts(raster) == 0), 0.0),
        Check("coamoeba runtime", "runtime budget", f"< {budget} s", round(dt, 2), _status(dt < budget), dt),
    ]


# ---------------------------------------------------------------------------
# 12: flows


def flow_verification(budget: float = 120.0) -> list:
    checks = []
    t_start = time.perf_counter()
    sweep = phase_term_sweep()
    worst = max(r.deviation for r in sweep)
    checks.append(Check("phase term sweep", "rotation phase term (2t/2pi)(1 + sum |y1/yj|^2)^-1",
                        "< 1e-4", worst, _status(worst < 1e-4 and all(r.ok for r in sweep)),
                        time.perf_counter() - t_start))
    lag = max(r.max_symplectic for r in sweep)
    checks.append(Check("frames stay Lagrangian", "symplectic products of the frame", "< 1e-9", lag,
                        _status(lag < 1e-9), 0.0))

    t0 = time.perf_counter()
    model = LocalModel(2, 2)
    y0 = np.array([1.0 + 0.3j, 0.8 - 0.2j, 0.7])
    traj = integrate_flow(model, FlowState(y0, torus_adapted_frame(model, y0)), 1.0, 1e-4)
    drift = float(np.abs(np.abs(traj.ys[:, :2]) - np.abs(y0[:2])).max())
    checks.append(Check("moduli conserved, T=1, dt=1e-4", "torus moment map is conserved", "< 1e-6", drift,
                        _status(drift < 1e-6), time.perf_counter() - t0))
    t0 = time.perf_counter()
    y1 = np.array([1.0, 1.0, 0.7], dtype=complex)
    traj = integrate_flow(model, FlowState(y1, torus_adapted_frame(model, y1)), 1.0, 1e-4)
    e0 = model.energy(y1)
    edrift = max(abs(model.energy(y) - e0) for y in traj.ys)
    checks.append(Check("energy conserved, y=(1,1,0.7)", "energy is conserved", "< 1e-8", edrift,
                        _status(edrift < 1e-8), time.perf_counter() - t0))

    for n in (2, 3):
        for k in (2, 3):
            for d in (1, 2):
                probe, dt = _timed(monodromy_phase_probe, LocalModel(n, k), 0.1 * complex(math.cos(0.3), math.sin(0.3)), d)
                checks.append(Check(
                    f"monodromy phase below bound, n={n}, k={k}, d={d}", "negativity bound for the d-fold monodromy",
                    {"bound": probe.bound}, {"measured": probe.measured, "margin": probe.margin},
                    "probe" if probe.below_bound else "fail", dt,
                ))
    total = time.perf_counter() - t_start
    checks.append(Check("flow runtime", "runtime budget", f"< {budget} s", round(total, 1),
                        _status(total < budget), total))
    return checks


# ---------------------------------------------------------------------------
# 13: mutations


@contextlib.contextmanager
def sign_mutation(which: str):
    """Temporarily flip the trivial extension sign ("koszul") or the contraction sign ("contraction")."""
    if which == "koszul":
        mod, name = algebra, "forward_dual_sign"
    elif which == "contraction":
        mod, name = hochschild, "contraction_sign"
    else:
        raise ValueError(f"unknown mutation {which!r}")
    original = getattr(mod, name)
    setattr(mod, name, lambda *args: -original(*args))
    try:
        yield
    finally:
        setattr(mod, name, original)


def mutation_sensitivity() -> list:
    checks = []
    for which, runner in (
        ("koszul", lambda: hom_table_and_associativity(ns=(1, 2))),
        ("contraction", lambda: schouten_vectors(ns=(1, 2))),
    ):
        t0 = time.perf_counter()
        with sign_mutation(which):
            failing = [c.name for c in runner() if c.status == "fail"]
        checks.append(Check(f"flipped {which} sign is detected", "mutation sensitivity",
                            "at least one failing check", failing, _status(bool(failing)),
                            time.perf_counter() - t0))
    return checks


CRITERIA = [
    (1, "truncated Hochschild dimensions", truncated_dimensions),
    (2, "cyclic invariant part", cyclic_invariant_part),
    (3, "torus invariant table", torus_invariant_table),
    (4, "contraction test vectors", schouten_vectors),
    (5, "Hom table and associativity", hom_table_and_associativity),
    (6, "group counts", group_counts),
    (7, "bar complex equivalence", bar_equivalence),
    (8, "critical values", critical_values),
    (9, "level sets", level_sets),
    (10, "zonotope geometry", zonotope_geometry),
    (11, "coamoeba figure", coamoeba_figure),
    (12, "flow verification", flow_verification),
    (13, "mutation sensitivity", mutation_sensitivity),
]


def run_criterion(number: int) -> list:
    for num, _, fn in CRITERIA:
        if num == number:
            return fn()
    raise ValueError(f"no criterion {number}")


def run_all(numbers=None) -> Report:
    report = Report("verify-all", {"criteria": list(numbers) if numbers else [c[0] for c in CRITERIA]})
    for num, title, fn in CRITERIA:
        if numbers and num not in numbers:
            continue
        for c in fn():
            c.name = f"[{num}] {c.name}"
            report.checks.append(c)
    return report
