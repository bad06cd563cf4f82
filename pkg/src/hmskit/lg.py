"""Critical-point geometry of the torus potential and of the pair-of-pants fibration.

Two functions drive everything here:

* the potential u_1 + ... + u_{n+2} on the torus {u_1 ... u_{n+2} = 1};
* the projection u -> u_1 on the hypersurface
  (u_1 + ... + u_{n+1}) u_1 ... u_{n+1} + 1 = 0 in (C*)^{n+1},
  whose real positive slice is governed by
  f(z) = (1 + z_2 + ... + z_{n+1})^{n+1} / (z_2 ... z_{n+1}).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy

from .linalg import rank, solve

__all__ = [
    "TorusPoint",
    "PencilConfig",
    "VanishingPath",
    "ThimbleRay",
    "critical_points_potential",
    "potential_gradient",
    "critical_values_w",
    "fiber_equation",
    "lagrange_system_solution",
    "f_value",
    "f_gradient_exact",
    "log_f_hessian_exact",
    "NewtonResult",
    "newton_critical_f",
    "LevelSet",
    "level_set_probe",
    "thimble_ray",
]

RESIDUAL_TOL = 1e-10
DEGENERATE_BAND = 1e-9


@dataclass(frozen=True)
class TorusPoint:
    """Point of the torus; the last coordinate is derived from the product constraint."""

    head: tuple

    @property
    def u(self) -> tuple:
        prod = 1
        for x in self.head:
            prod *= x
        return tuple(self.head) + (1 / prod,)

    def product_residual(self) -> float:
        prod = 1
        for x in self.u:
            prod *= x
        return abs(prod - 1)


def potential_gradient(head: Sequence[complex]) -> np.ndarray:
    """Gradient of u_1 + ... + u_{n+2} in the free coordinates u_1..u_{n+1}."""
    head = np.asarray(head, dtype=complex)
    last = 1 / np.prod(head)
    return 1 - last / head


def critical_points_potential(n: int) -> list[tuple[TorusPoint, complex]]:
    """The n+2 critical points (c, ..., c), c = zeta^{-i}, with values (n+2) c."""
    if n < 1:
        raise ValueError("n must be at least 1")
    m = n + 2
    # the Lagrange condition u_i = lambda for every i forces all coordinates equal
    out = []
    for i in range(1, m + 1):
        c = cmath.exp(-2j * math.pi * i / m)
        point = TorusPoint((c,) * (m - 1))
        grad = potential_gradient(point.head)
        if np.max(np.abs(grad)) >= RESIDUAL_TOL:
            raise ArithmeticError(f"critical point {i} has residual {np.max(np.abs(grad))}")
        out.append((point, m * c))
    return out


@dataclass(frozen=True)
class PencilConfig:
    n: int

    @property
    def critical_values(self) -> list[complex]:
        return [v for _, v in critical_points_potential(self.n)]


@dataclass(frozen=True)
class VanishingPath:
    """Straight segment from the origin to the i-th critical value."""

    n: int
    index: int

    def __call__(self, t: float) -> complex:
        m = self.n + 2
        return m * cmath.exp(-2j * math.pi * self.index / m) * t

    @property
    def endpoint(self) -> complex:
        return self(1.0)


def fiber_equation(u: Sequence[complex]) -> complex:
    """Left side of (u_1 + ... + u_{n+1}) u_1 ... u_{n+1} + 1 = 0."""
    prod = 1
    for x in u:
        prod *= x
    return sum(u) * prod + 1


def lagrange_system_solution(n: int) -> list[Fraction]:
    """Exact solution of u_i + (u_2 + ... + u_{n+1}) = -u_1 (i = 2..n+1) with u_1 = 1.

    Raises if the system is singular, so the returned solution is the only one.
    """
    size = n
    mat = [[Fraction(1 if i == j else 0) + 1 for j in range(size)] for i in range(size)]
    if rank(mat, size) != size:
        raise ArithmeticError("Lagrange system is singular")
    return solve(mat, [Fraction(-1)] * size)


def _symbolic_root_equation(n: int) -> sympy.Expr:
    u1 = sympy.Symbol("u1")
    others = [-u1 / (n + 1)] * n
    expr = sympy.expand((u1 + sum(others)) * u1 * sympy.Mul(*others) + 1)
    return sympy.expand(expr * (-1) ** n * (n + 1) ** (n + 1))


def critical_values_w(n: int) -> list[complex]:
    """Roots of u_1^{n+2} = (-1)^{n+1} (n+1)^{n+1}, cross-checked symbolically."""
    if n < 1:
        raise ValueError("n must be at least 1")
    m = n + 2
    u1 = sympy.Symbol("u1")
    target = (-1) ** (n + 1) * (n + 1) ** (n + 1)
    if sympy.expand(_symbolic_root_equation(n) - (u1**m - target)) != 0:
        raise ArithmeticError("substitution does not reproduce the root equation")
    sol = lagrange_system_solution(n)
    if any(x != Fraction(-1, n + 1) for x in sol):
        raise ArithmeticError("Lagrange system does not give the all-equal solution")
    radius = (n + 1) ** ((n + 1) / m)
    offset = 0.0 if target > 0 else math.pi / m
    roots = [radius * cmath.exp(1j * (offset + 2 * math.pi * k / m)) for k in range(m)]
    for z in roots:
        point = [z] + [-z / (n + 1)] * n
        if abs(fiber_equation(point)) >= RESIDUAL_TOL * max(1.0, abs(z) ** m):
            raise ArithmeticError(f"root {z} fails the fiber equation")
    return roots


# ---------------------------------------------------------------------------
# f on the positive orthant


def f_value(z: Sequence) -> Fraction | float:
    """f(z_2, ..., z_{n+1}); exact for rational input."""
    n = len(z)
    s = 1 + sum(z)
    prod = 1
    for x in z:
        prod *= x
    if all(isinstance(x, (int, Fraction)) for x in z):
        return Fraction(s) ** (n + 1) / prod
    return s ** (n + 1) / prod


def f_gradient_exact(z: Sequence[Fraction]) -> list[Fraction]:
    """The closed partial-derivative formula evaluated in exact arithmetic."""
    n = len(z)
    s = 1 + sum(z)
    prod = Fraction(1)
    for x in z:
        prod *= x
    return [((n + 1) * zi - s) * Fraction(s) ** n / (zi * prod) for zi in z]


def log_f_hessian_exact(n: int, point: Sequence | None = None) -> sympy.Matrix:
    zs = sympy.symbols(f"z2:{n + 2}", positive=True)
    expr = (n + 1) * sympy.log(1 + sum(zs)) - sum(sympy.log(z) for z in zs)
    hess = sympy.hessian(expr, zs)
    point = point or [1] * n
    return sympy.simplify(hess.subs(dict(zip(zs, [sympy.Rational(p) for p in point]))))


def _log_f(x: np.ndarray, n: int) -> float:
    return (n + 1) * np.log1p(np.sum(np.exp(x))) - np.sum(x)


def _log_f_grad_hess(x: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    e = np.exp(x)
    p = e / (1 + np.sum(e))
    grad = (n + 1) * p - 1
    hess = (n + 1) * (np.diag(p) - np.outer(p, p))
    return grad, hess


@dataclass
class NewtonResult:
    n: int
    point: tuple
    value: Fraction
    hessian_minors: list
    converged: int
    starts: int
    max_distance: float
    iterations: list = field(default_factory=list)

    @property
    def all_converged(self) -> bool:
        return self.converged == self.starts


def _newton_log(x0: np.ndarray, n: int, tol: float = 1e-12, max_iter: int = 200):
    x = x0.copy()
    for it in range(max_iter):
        g, h = _log_f_grad_hess(x, n)
        if np.linalg.norm(g) < tol:
            return x, it, True
        step = np.linalg.solve(h, -g)
        # damped: backtrack until log f decreases
        lam, cur = 1.0, _log_f(x, n)
        while lam > 1e-12 and _log_f(x + lam * step, n) > cur + 1e-4 * lam * g @ step:
            lam *= 0.5
        x = x + lam * step
    g, _ = _log_f_grad_hess(x, n)
    return x, max_iter, bool(np.linalg.norm(g) < tol)


def newton_critical_f(n: int, starts: int = 20, seed: int = 0) -> NewtonResult:
    """Minimise log f from random positive starts and certify the critical point."""
    if not 1 <= n <= 6:
        raise ValueError("newton_critical_f supports 1 <= n <= 6")
    rng = np.random.default_rng(seed)
    converged, worst, iters = 0, 0.0, []
    for _ in range(starts):
        x0 = rng.uniform(-3.0, 3.0, size=n)
        x, it, ok = _newton_log(x0, n)
        dist = float(np.max(np.abs(np.exp(x) - 1)))
        worst = max(worst, dist)
        iters.append(it)
        if ok and dist < 1e-9:
            converged += 1
    point = tuple(Fraction(1) for _ in range(n))
    if any(g != 0 for g in f_gradient_exact(point)):
        raise ArithmeticError("exact gradient of f does not vanish at (1, ..., 1)")
    hess = log_f_hessian_exact(n)
    minors = [hess[:k, :k].det() for k in range(1, n + 1)]
    return NewtonResult(n, point, f_value(point), minors, converged, starts, worst, iters)


# ---------------------------------------------------------------------------
# level sets


@dataclass
class LevelSet:
    kind: str  # "empty", "point", "sphere", "degenerate"
    points: list = field(default_factory=list)
    closed: bool | None = None
    ray_crossings: list = field(default_factory=list)
    winding: float | None = None


def level_set_probe(n: int, t, rays: int = 64) -> LevelSet:
    """Classify f^{-1}(t) in the positive orthant for n = 1 (exact) or n = 2 (probe)."""
    if n not in (1, 2):
        raise ValueError("level_set_probe supports n in {1, 2}")
    crit = (n + 1) ** (n + 1)
    exact = isinstance(t, (int, Fraction))
    if not exact and t != crit and abs(t - crit) < DEGENERATE_BAND:
        return LevelSet("degenerate")
    if n == 1:
        return _level_set_n1(t, exact)
    return _level_set_n2(float(t), rays)


def _level_set_n1(t, exact: bool) -> LevelSet:
    # (1 + z)^2 = t z  <=>  z^2 + (2 - t) z + 1 = 0; roots have product 1
    b = 2 - t
    disc = t * (t - 4)
    if disc < 0:
        return LevelSet("empty")
    if disc == 0:
        z = Fraction(-b, 2) if exact else -b / 2
        return LevelSet("point", [z]) if z > 0 else LevelSet("empty")
    # product of roots is 1 > 0, so both share the sign of their sum -b
    if -b <= 0:
        return LevelSet("empty")
    if exact:
        r = sympy.sqrt(sympy.Rational(disc))
        roots = [(-sympy.Rational(b) - r) / 2, (-sympy.Rational(b) + r) / 2]
    else:
        r = math.sqrt(disc)
        roots = [(-b - r) / 2, (-b + r) / 2]
    return LevelSet("sphere", roots)


def _g(p: np.ndarray) -> float:
    return _log_f(p, 2)


def _g_grad(p: np.ndarray) -> np.ndarray:
    return _log_f_grad_hess(p, 2)[0]


def _ray_roots(level: float, angle: float, r_max: float = 60.0, samples: int = 600) -> list[float]:
    d = np.array([math.cos(angle), math.sin(angle)])
    rs = np.linspace(0.0, r_max, samples)
    vals = np.array([_g(r * d) - level for r in rs])
    roots = []
    for i in range(samples - 1):
        if vals[i] == 0 or vals[i] * vals[i + 1] < 0:
            lo, hi = rs[i], rs[i + 1]
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if (_g(lo * d) - level) * (_g(mid * d) - level) <= 0:
                    hi = mid
                else:
                    lo = mid
            roots.append(0.5 * (lo + hi))
    return roots


def _level_set_n2(t: float, rays: int) -> LevelSet:
    crit = 27.0
    if t < crit:
        return LevelSet("empty")
    if t == crit:
        return LevelSet("point", [(1.0, 1.0)])
    level = math.log(t)
    crossings = [len(_ray_roots(level, 2 * math.pi * k / rays)) for k in range(rays)]
    # continuation along the level curve in log coordinates
    r0 = _ray_roots(level, 0.0)[0]
    start = np.array([r0, 0.0])
    p = start.copy()
    step = min(0.05, 0.05 * r0)
    total_angle, prev_angle = 0.0, 0.0
    closed = False
    pts = [tuple(np.exp(p))]
    for k in range(200_000):
        g = _g_grad(p)
        tangent = np.array([-g[1], g[0]]) / np.linalg.norm(g)
        q = p + step * tangent
        for _ in range(20):
            gq = _g_grad(q)
            q = q - (_g(q) - level) * gq / (gq @ gq)
        ang = math.atan2(q[1], q[0])
        d = ang - prev_angle
        d = (d + math.pi) % (2 * math.pi) - math.pi
        total_angle += d
        prev_angle = ang
        p = q
        pts.append(tuple(np.exp(p)))
        if k > 10 and abs(total_angle) > math.pi and np.linalg.norm(p - start) < 1.5 * step:
            closed = True
            break
    winding = total_angle / (2 * math.pi)
    kind = "sphere" if closed and all(c == 1 for c in crossings) else "unknown"
    return LevelSet(kind, pts, closed, crossings, winding)


# ---------------------------------------------------------------------------
# thimbles


@dataclass(frozen=True)
class ThimbleRay:
    n: int
    index: int
    zeta: complex

    def __call__(self, t: float) -> complex:
        return t * self.zeta + self.zeta

    @property
    def critical_point(self) -> tuple:
        n = self.n
        return (self.zeta,) + (-self.zeta / (n + 1),) * n

    def residuals(self) -> dict:
        """Fiber equation and the Lagrange conditions at the critical point."""
        u = np.array(self.critical_point)
        s, prod = np.sum(u), np.prod(u)
        # derivative of the fiber equation along u_2..u_{n+1}
        partials = [prod + s * prod / u[i] for i in range(1, len(u))]
        scale = max(1.0, abs(prod))
        return {
            "fiber": abs(fiber_equation(u)),
            "lagrange": max((abs(x) / scale for x in partials), default=0.0),
            "base": abs(self(0.0) - u[0]),
        }


def thimble_ray(n: int, index: int) -> ThimbleRay:
    roots = critical_values_w(n)
    if not 0 <= index < len(roots):
        raise ValueError(f"root index must lie in 0..{len(roots) - 1}")
    ray = ThimbleRay(n, index, roots[index])
    res = ray.residuals()
    if max(res.values()) >= RESIDUAL_TOL * max(1.0, abs(ray.zeta) ** (n + 2)):
        raise ArithmeticError(f"thimble critical point check failed: {res}")
    return ray
