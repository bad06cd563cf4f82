"""Exact zonotope geometry on real tori, with all angles in units of pi.

A zonotope is {base + sum lambda_i g_i : 0 <= lambda_i <= 1}.  The torus
is R^d / 2Z^d (that is, 2*pi*Z^d once the pi is restored).  Membership and
overlap questions are decided by an exact simplex method over Fractions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import rank

__all__ = [
    "LPResult",
    "lp_maximize",
    "Zonotope",
    "unlifted_zonotope",
    "cover_matrix",
    "cover_inverse",
    "lift_zonotopes",
    "zonotope_contains",
    "SelfIntersection",
    "self_intersection_check",
    "unlifted_self_intersection",
    "pairwise_lift_overlaps",
    "root_argument",
    "thimble_point",
    "thimble_point_disjoint",
    "polygon_vertices",
]


# ---------------------------------------------------------------------------
# exact simplex


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible", "unbounded"
    value: Fraction | None = None
    x: list | None = None


def _pivot(tab: list[list], basis: list[int], row: int, col: int) -> None:
    piv = tab[row][col]
    tab[row] = [v / piv for v in tab[row]]
    for r in range(len(tab)):
        if r != row and tab[r][col] != 0:
            f = tab[r][col]
            pr = tab[row]
            tab[r] = [a - f * b for a, b in zip(tab[r], pr)]
    basis[row] = col


def _simplex(tab: list[list], basis: list[int], obj: list, allowed: int) -> str:
    """Maximise obj . x on a tableau in canonical form (Bland's rule).

    ``tab`` rows are [coefficients | rhs]; ``obj`` is the objective over the
    first ``allowed`` columns.
    """
    ncols = len(tab[0]) - 1
    while True:
        # reduced costs r_j = obj_j - sum_i obj_{basis_i} tab[i][j]
        entering = None
        for j in range(allowed):
            if j in basis:
                continue
            rj = obj[j] - sum(obj[basis[i]] * tab[i][j] for i in range(len(tab)) if basis[i] < len(obj))
            if rj > 0:
                entering = j
                break
        if entering is None:
            return "optimal"
        best, leave = None, None
        for i, row in enumerate(tab):
            a = row[entering]
            if a > 0:
                ratio = row[ncols] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return "unbounded"
        _pivot(tab, basis, leave, entering)


def lp_maximize(A: Sequence[Sequence], b: Sequence, c: Sequence) -> LPResult:
    """max c.x subject to A x = b, x >= 0, in exact arithmetic."""
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    c = [Fraction(v) for v in c]
    nrows, nvars = len(A), len(c)
    for i in range(nrows):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    # phase I with one artificial per row
    tab = []
    for i in range(nrows):
        art = [Fraction(1 if j == i else 0) for j in range(nrows)]
        tab.append(A[i] + art + [b[i]])
    basis = [nvars + i for i in range(nrows)]
    obj1 = [Fraction(0)] * nvars + [Fraction(-1)] * nrows
    _simplex(tab, basis, obj1, nvars + nrows)
    infeas = sum(tab[i][-1] for i in range(nrows) if basis[i] >= nvars)
    if infeas > 0:
        return LPResult("infeasible")
    # drive remaining artificials out of the basis
    keep = []
    for i in range(nrows):
        if basis[i] >= nvars:
            col = next((j for j in range(nvars) if tab[i][j] != 0), None)
            if col is None:
                continue  # redundant row
            _pivot(tab, basis, i, col)
        keep.append(i)
    tab = [tab[i][:nvars] + [tab[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    status = _simplex(tab, basis, c, nvars)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * nvars
    for i, bi in enumerate(basis):
        x[bi] = tab[i][-1]
    return LPResult("optimal", sum(ci * xi for ci, xi in zip(c, x)), x)


# ---------------------------------------------------------------------------
# zonotopes


@dataclass(frozen=True)
class Zonotope:
    generators: tuple
    base: tuple

    def __post_init__(self):
        gens = tuple(tuple(Fraction(v) for v in g) for g in self.generators)
        base = tuple(Fraction(v) for v in self.base)
        if any(len(g) != len(base) for g in gens):
            raise ValueError("generator and base dimensions differ")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "base", base)

    @property
    def dim(self) -> int:
        return len(self.base)

    @property
    def center(self) -> tuple:
        return tuple(
            b + sum(g[i] for g in self.generators) / 2 for i, b in enumerate(self.base)
        )

    def is_full_dimensional(self) -> bool:
        return rank([list(g) for g in self.generators], self.dim) == self.dim

    def translate(self, v: Sequence) -> "Zonotope":
        return Zonotope(self.generators, tuple(b + Fraction(x) for b, x in zip(self.base, v)))

    def widths(self) -> list[Fraction]:
        return [sum(abs(g[i]) for g in self.generators) for i in range(self.dim)]

    def area(self) -> Fraction:
        """Volume of a planar zonotope (sum of |det| over generator pairs)."""
        if self.dim != 2:
            raise ValueError("area is only implemented in the plane")
        return sum(
            abs(g[0] * h[1] - g[1] * h[0])
            for g, h in itertools.combinations(self.generators, 2)
        )


def unlifted_zonotope(n: int) -> Zonotope:
    """Generators e_1, ..., e_{n+1}, -(e_1 + ... + e_{n+1}), based at the origin."""
    d = n + 1
    gens = [tuple(1 if j == i else 0 for j in range(d)) for i in range(d)]
    gens.append(tuple(-1 for _ in range(d)))
    return Zonotope(tuple(gens), (0,) * d)


def cover_matrix(n: int) -> list[list[int]]:
    """Column i is the image of e_i, namely e_i + (e_1 + ... + e_{n+1})."""
    d = n + 1
    return [[(1 if i == j else 0) + 1 for j in range(d)] for i in range(d)]


def cover_inverse(n: int) -> list[list[Fraction]]:
    """Column i is f_i = e_i - (e_1 + ... + e_{n+1}) / (n + 2)."""
    d = n + 1
    return [[Fraction(1 if i == j else 0) - Fraction(1, n + 2) for j in range(d)] for i in range(d)]


def lift_zonotopes(n: int) -> list[Zonotope]:
    """The n+2 copies centred at (2/(n+2)) (i, ..., i), i = 1..n+2."""
    d = n + 1
    inv = cover_inverse(n)
    f = [tuple(inv[r][c] for r in range(d)) for c in range(d)]
    gens = f + [tuple(-sum(v[r] for v in f) for r in range(d))]
    half = [sum(g[r] for g in gens) / 2 for r in range(d)]
    out = []
    for i in range(1, n + 3):
        centre = [Fraction(2 * i, n + 2)] * d
        out.append(Zonotope(tuple(gens), tuple(c - h for c, h in zip(centre, half))))
    return out


def _box_lp(gen_blocks: list[tuple[Sequence, int]], rhs: Sequence, n_lambda: int):
    """Constraints  sum sign * G lambda = rhs,  s <= lambda_i <= 1 - s,  s >= 0.

    Variables: lambda (n_lambda), s, lower slacks, upper slacks.  Returns the LP
    maximising s.
    """
    d = len(rhs)
    nv = n_lambda + 1 + 2 * n_lambda
    A, b = [], []
    for r in range(d):
        row = [Fraction(0)] * nv
        col = 0
        for gens, sign in gen_blocks:
            for g in gens:
                row[col] = sign * g[r]
                col += 1
        A.append(row)
        b.append(rhs[r])
    s_col = n_lambda
    for i in range(n_lambda):
        lo = [Fraction(0)] * nv
        lo[i], lo[s_col], lo[s_col + 1 + i] = Fraction(1), Fraction(-1), Fraction(-1)
        A.append(lo)
        b.append(Fraction(0))
        hi = [Fraction(0)] * nv
        hi[i], hi[s_col], hi[s_col + 1 + n_lambda + i] = Fraction(1), Fraction(1), Fraction(1)
        A.append(hi)
        b.append(Fraction(1))
    c = [Fraction(0)] * nv
    c[s_col] = Fraction(1)
    return lp_maximize(A, b, c)


def zonotope_contains(Z: Zonotope, p: Sequence) -> str:
    """'interior', 'boundary' or 'outside' for a rational point."""
    p = [Fraction(v) for v in p]
    if len(p) != Z.dim:
        raise ValueError("point and zonotope dimensions differ")
    rhs = [pi - bi for pi, bi in zip(p, Z.base)]
    res = _box_lp([(Z.generators, 1)], rhs, len(Z.generators))
    if res.status == "infeasible":
        return "outside"
    if res.value > 0 and Z.is_full_dimensional():
        return "interior"
    return "boundary"


def _translations(widths: Sequence[Fraction], radius: int) -> list[tuple]:
    # Z meets Z + 2m only if |2 m_i| <= width_i; the box radius caps the search
    ranges = []
    for w in widths:
        k = min(radius, math.floor(w / 2))
        ranges.append(range(-k, k + 1))
    return [m for m in itertools.product(*ranges) if any(m)]


@dataclass
class SelfIntersection:
    embedded: bool
    translation: tuple | None = None
    point: tuple | None = None
    interior_overlap: bool = False
    checked: int = 0


def _overlap(Z1: Zonotope, Z2: Zonotope) -> tuple[str, tuple | None]:
    """'none', 'boundary' or 'interior' contact of two zonotopes in R^d."""
    rhs = [b2 - b1 for b1, b2 in zip(Z1.base, Z2.base)]
    k1, k2 = len(Z1.generators), len(Z2.generators)
    res = _box_lp([(Z1.generators, 1), (Z2.generators, -1)], rhs, k1 + k2)
    if res.status == "infeasible":
        return "none", None
    lam = res.x[:k1]
    point = tuple(
        b + sum(l * g[i] for l, g in zip(lam, Z1.generators)) for i, b in enumerate(Z1.base)
    )
    full = Z1.is_full_dimensional() and Z2.is_full_dimensional()
    return ("interior" if res.value > 0 and full else "boundary"), point


def _self_intersection(Z: Zonotope) -> SelfIntersection:
    radius = math.ceil(sum(abs(v) for g in Z.generators for v in g)) + 1
    trans = _translations(Z.widths(), radius)
    first = None
    for m in trans:
        kind, point = _overlap(Z, Z.translate([2 * x for x in m]))
        if kind == "interior":
            return SelfIntersection(False, m, point, True, len(trans))
        if kind == "boundary" and first is None:
            first = (m, point)
    if first is not None:
        return SelfIntersection(False, first[0], first[1], False, len(trans))
    return SelfIntersection(True, checked=len(trans))


def self_intersection_check(n: int) -> SelfIntersection:
    """Whether a lifted zonotope embeds in the covering torus.

    Any contact of the closed zonotope with a nonzero 2Z^d translate of
    itself, even at a single vertex, counts as a self-intersection.
    """
    if not 1 <= n <= 4:
        raise ValueError("self_intersection_check supports 1 <= n <= 4")
    return _self_intersection(lift_zonotopes(n)[-1])


def unlifted_self_intersection(n: int) -> SelfIntersection:
    return _self_intersection(unlifted_zonotope(n))


def pairwise_lift_overlaps(n: int) -> dict:
    """(i, j) -> 'none' / 'boundary' / 'interior' over all torus translations."""
    lifts = lift_zonotopes(n)
    out = {}
    for i, j in itertools.combinations(range(len(lifts)), 2):
        Zi, Zj = lifts[i], lifts[j]
        # the centres must be within the sum of half-widths in every coordinate
        reach = [(a + b) / 2 for a, b in zip(Zi.widths(), Zj.widths())]
        offset = [bj - bi for bi, bj in zip(Zi.center, Zj.center)]
        worst = "none"
        ranges = [
            range(math.ceil((-w - o) / 2), math.floor((w - o) / 2) + 1)
            for w, o in zip(reach, offset)
        ]
        for m in itertools.product(*ranges):
            kind, _ = _overlap(Zi, Zj.translate([2 * x for x in m]))
            if kind == "interior":
                worst = "interior"
                break
            if kind == "boundary":
                worst = "boundary"
        out[(i + 1, j + 1)] = worst
    return out


# ---------------------------------------------------------------------------
# thimble points


def root_argument(n: int, index: int) -> Fraction:
    """arg of the index-th root of u^{n+2} = (-1)^{n+1}(n+1)^{n+1}, in units of pi, in (-1, 1]."""
    m = n + 2
    a = Fraction(2 * index, m) if n % 2 else Fraction(2 * index + 1, m)
    a = a % 2
    return a - 2 if a > 1 else a


def thimble_point(n: int, index: int) -> tuple:
    a = root_argument(n, index)
    return (a,) + (a + 1,) * n


def _on_torus(Z: Zonotope, p: Sequence) -> str:
    """Best membership of any 2Z^d translate of p in Z."""
    lo = [c - w / 2 for c, w in zip(Z.center, Z.widths())]
    hi = [c + w / 2 for c, w in zip(Z.center, Z.widths())]
    ranges = [
        range(math.ceil((l - x) / 2), math.floor((h - x) / 2) + 1) for l, h, x in zip(lo, hi, p)
    ]
    best = "outside"
    for m in itertools.product(*ranges):
        kind = zonotope_contains(Z, [x + 2 * k for x, k in zip(p, m)])
        if kind == "interior":
            return kind
        if kind == "boundary":
            best = kind
    return best


def thimble_point_disjoint(n: int, index: int) -> bool:
    """True iff the argument image of the thimble misses the last lifted zonotope.

    Boundary contact counts as meeting it.
    """
    Z = lift_zonotopes(n)[-1]
    return _on_torus(Z, thimble_point(n, index)) == "outside"


def polygon_vertices(Z: Zonotope) -> list[tuple]:
    """Vertices of a planar zonotope in counter-clockwise order."""
    if Z.dim != 2:
        raise ValueError("polygon_vertices needs a planar zonotope")

    def upward(g):
        return g[1] > 0 or (g[1] == 0 and g[0] > 0)

    up = [g if upward(g) else tuple(-v for v in g) for g in Z.generators if any(g)]
    up.sort(key=lambda g: math.atan2(g[1], g[0]))
    # lowest (then leftmost) vertex: switch on exactly the downward generators
    cur = list(Z.base)
    for g in Z.generators:
        if any(g) and not upward(g):
            cur = [a + v for a, v in zip(cur, g)]
    verts = []
    for g in up + [tuple(-v for v in g) for g in up]:
        verts.append(tuple(cur))
        cur = [a + v for a, v in zip(cur, g)]
    return verts
