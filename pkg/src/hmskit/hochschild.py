"""Hochschild cohomology of exterior algebras smashed with diagonal groups.

A polyvector term in the sector of a group element g is a label

    (sector exponents, alpha, wedge subset J of V^g, moved subset M)

standing for y^alpha (x) v_J (x) top(V/V^g).  Its weight under the diagonal
torus is e_J + e_M - alpha; all invariance questions reduce to that weight.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, NamedTuple

from .algebra import DiagGroupElement, enumerate_group, koszul_sign
from .exact import CycScalar
from .linalg import GradedMap, GradedSpace, invariant_subspace, kernel_basis, rank

__all__ = [
    "PolyLabel",
    "PolyVector",
    "BidegreeCell",
    "fixed_space",
    "monomials",
    "lambda_exponent",
    "cell_labels",
    "hh_dim",
    "contraction_sign",
    "schouten_diff",
    "schouten_map",
    "e2_cells",
    "TruncatedHH",
    "truncated_hh",
    "CyclicInvariants",
    "cyclic_invariant_hh2",
    "cyclic_shift",
    "torus_invariant_hh2",
]


class PolyLabel(NamedTuple):
    sector: tuple
    alpha: tuple
    wedge: tuple
    moved: tuple

    @property
    def s(self) -> int:
        return sum(self.alpha)

    def weight(self) -> tuple:
        m = len(self.alpha)
        w = [-a for a in self.alpha]
        for i in self.wedge + self.moved:
            w[i - 1] += 1
        return tuple(w)

    def is_untwisted(self) -> bool:
        return not any(self.sector)

    def __str__(self) -> str:
        mono = "*".join(
            f"y{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(self.alpha) if a
        ) or "1"
        wedge = "^".join(f"v{i}" for i in self.wedge) or "1"
        if self.is_untwisted():
            return f"{mono} (x) {wedge}"
        return f"[{','.join(map(str, self.sector))}] {mono} (x) {wedge} (x) top{self.moved}"


def untwisted(alpha: Iterable[int], wedge: Iterable[int] = ()) -> PolyLabel:
    alpha = tuple(alpha)
    return PolyLabel((0,) * len(alpha), alpha, tuple(wedge), ())


class PolyVector:
    """Finite linear combination of PolyLabels with exact coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[PolyLabel, object] | None = None):
        self.n = n
        clean: dict = {}
        for lab, c in (terms or {}).items():
            if c == 0:
                continue
            lab = PolyLabel(*lab)
            if len(lab.alpha) != n + 2:
                raise ValueError(f"label {lab} has the wrong number of variables")
            clean[lab] = clean.get(lab, 0) + c
        self.terms = {k: v for k, v in clean.items() if v != 0}

    @classmethod
    def monomial(cls, n: int, alpha, wedge=(), coeff=1) -> "PolyVector":
        wedge = tuple(wedge)
        srt = tuple(sorted(wedge))
        sign = 1
        for a, b in itertools.combinations(range(len(wedge)), 2):
            if wedge[a] > wedge[b]:
                sign = -sign
            elif wedge[a] == wedge[b]:
                return cls(n)
        return cls(n, {untwisted(alpha, srt): sign * coeff})

    def __add__(self, other: "PolyVector") -> "PolyVector":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return PolyVector(self.n, out)

    def __sub__(self, other: "PolyVector") -> "PolyVector":
        return self + other.scale(-1)

    def scale(self, c) -> "PolyVector":
        return PolyVector(self.n, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyVector):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*[{lab}]" for lab, c in sorted(self.terms.items()))


@dataclass(frozen=True)
class BidegreeCell:
    """One (s, t) cell.

    ``group`` is "cyclic" (the scalar subgroup) or "special" (the SL preimage);
    ``torus`` additionally imposes invariance under the maximal torus of SL;
    ``grading`` is "tilde" (wedge grading) or "regraded" (fractional grading).
    """

    n: int
    s: int
    t: Fraction
    group: str = "special"
    torus: bool = False
    grading: str = "regraded"

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))
        if self.group not in ("cyclic", "special"):
            raise ValueError(f"unsupported group {self.group!r}")
        if self.grading not in ("tilde", "regraded"):
            raise ValueError(f"unsupported grading {self.grading!r}")


def fixed_space(g: DiagGroupElement) -> tuple:
    """Indices i with a_i = 1 (the coordinates of V^g)."""
    return g.fixed_indices()


def lambda_exponent(cell: BidegreeCell, codim: int) -> Fraction:
    if cell.grading == "tilde":
        return cell.s + cell.t - codim
    return cell.s + Fraction(cell.n + 2, cell.n) * cell.t - codim


def monomials(variables: tuple, degree: int, nvars: int) -> Iterator[tuple]:
    """Exponent vectors of total degree ``degree`` supported on ``variables`` (1-based)."""
    if degree < 0:
        return
    for combo in itertools.combinations_with_replacement(variables, degree):
        alpha = [0] * nvars
        for i in combo:
            alpha[i - 1] += 1
        yield tuple(alpha)


def _group_generators(group: str, m: int) -> list[tuple]:
    if group == "cyclic":
        return [(1,) * m]
    return [tuple(1 if j == i else (-1 if j == i + 1 else 0) for j in range(m)) for i in range(m - 1)]


def _is_invariant(weight: tuple, cell: BidegreeCell) -> bool:
    m = cell.n + 2
    if cell.torus:
        # the SL torus fixes exactly the multiples of (1, ..., 1)
        if len(set(weight)) != 1:
            return False
    space = GradedSpace(("w",), {}, m)
    action = [{"w": sum(k * w for k, w in zip(gen, weight))} for gen in _group_generators(cell.group, m)]
    return bool(invariant_subspace(space, action, m))


def _sector_representatives(group: str, n: int) -> dict:
    """Moved set -> list of sector elements with that moved set."""
    out: dict = {}
    for g in enumerate_group(group, n):
        out.setdefault(g.moved_indices(), []).append(g)
    return out


_SECTORS: dict = {}


def _sectors(group: str, n: int) -> dict:
    key = (group, n)
    if key not in _SECTORS:
        _SECTORS[key] = _sector_representatives(group, n)
    return _SECTORS[key]


def _sector_monomials(cell: BidegreeCell, moved: tuple) -> list[tuple]:
    """(alpha, wedge) pairs for one moved set whose weight is invariant."""
    m = cell.n + 2
    codim = len(moved)
    a = lambda_exponent(cell, codim)
    fixed = tuple(i for i in range(1, m + 1) if i not in moved)
    if a.denominator != 1 or a < 0 or a > len(fixed) or cell.s < 0:
        return []
    out = []
    for alpha in monomials(fixed, cell.s, m):
        for wedge in itertools.combinations(fixed, int(a)):
            lab = PolyLabel((0,) * m, alpha, wedge, moved)
            if _is_invariant(lab.weight(), cell):
                out.append((alpha, wedge))
    return out


def cell_labels(cell: BidegreeCell, untwisted_only: bool = False) -> list[PolyLabel]:
    """Invariant monomial basis of the cell, sorted lexicographically."""
    labels = []
    for moved, elems in _sectors(cell.group, cell.n).items():
        if untwisted_only and moved:
            continue
        terms = _sector_monomials(cell, moved)
        if not terms:
            continue
        for g in elems:
            for alpha, wedge in terms:
                labels.append(PolyLabel(g.exps, alpha, wedge, moved))
    return sorted(labels)


def hh_dim(cell: BidegreeCell) -> int:
    """Dimension of the closed-form cell by character counting over all sectors."""
    total = 0
    for moved, elems in _sectors(cell.group, cell.n).items():
        total += len(elems) * len(_sector_monomials(cell, moved))
    return total


# ---------------------------------------------------------------------------
# the differential


def contraction_sign(position: int) -> int:
    """Sign for removing the ``position``-th (0-based) factor of a wedge."""
    return -1 if position % 2 else 1


def schouten_diff(w: PolyVector) -> PolyVector:
    """Contract d(y_1 ... y_m) into the multivector part."""
    out: dict = {}
    for lab, c in w.terms.items():
        if not lab.is_untwisted():
            raise ValueError("the differential is only defined on the untwisted sector")
        for pos, i in enumerate(lab.wedge):
            alpha = tuple(a + (0 if j == i - 1 else 1) for j, a in enumerate(lab.alpha))
            rest = lab.wedge[:pos] + lab.wedge[pos + 1 :]
            key = untwisted(alpha, rest)
            out[key] = out.get(key, 0) + contraction_sign(pos) * c
    return PolyVector(w.n, out)


def _space(labels: list[PolyLabel], m: int) -> GradedSpace:
    return GradedSpace(tuple(labels), {lab: lab.s for lab in labels}, m)


def schouten_map(source: list[PolyLabel], target: list[PolyLabel], n: int) -> GradedMap:
    """Matrix of the differential between two label lists.

    Twisted labels map to zero: the restriction of y_1...y_m to a proper
    fixed subspace vanishes, so nothing is contracted there.
    """
    m = n + 2

    def image(lab):
        if not lab.is_untwisted():
            return {}
        return schouten_diff(PolyVector(n, {lab: 1})).terms

    return GradedMap.from_function(_space(source, m), _space(target, m), image, shift=n + 1)


def e2_cells(n: int, max_total: int = 2) -> list[tuple[int, int]]:
    """(s, t) with t <= 0, s + t <= max_total, s >= 0, s + (n+2)t/n >= 0."""
    cells = []
    for t in range(-n * max_total, 1):
        for s in range(0, max_total - t + 1):
            if s + Fraction(n + 2, n) * t < 0:
                continue
            cells.append((s, t))
    return cells


@dataclass
class TruncatedHH:
    n: int
    hh1_dim: int
    hh2_dim: int
    hh1_basis: list
    hh2_basis: list
    cell_dims: dict = field(default_factory=dict)
    differential_ranks: dict = field(default_factory=dict)
    twisted_dims: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "hh1_dim": self.hh1_dim,
            "hh2_dim": self.hh2_dim,
            "hh1_basis": [repr(v) for v in self.hh1_basis],
            "hh2_basis": [repr(v) for v in self.hh2_basis],
            "cell_dims": {f"{s},{t}": d for (s, t), d in sorted(self.cell_dims.items())},
            "differential_ranks": {f"{s},{t}": r for (s, t), r in sorted(self.differential_ranks.items())},
            "twisted_dims": {f"{s},{t}": d for (s, t), d in sorted(self.twisted_dims.items())},
        }


def _to_vector(labels: list[PolyLabel], coords, n: int) -> PolyVector:
    return PolyVector(n, {lab: c for lab, c in zip(labels, coords) if c != 0})


def _complement_units(vectors: list[list], dim: int) -> list[int]:
    """Indices of unit vectors completing ``vectors`` to a spanning set."""
    chosen: list[int] = []
    current = [list(v) for v in vectors]
    r = rank(current, dim) if current else 0
    for i in range(dim):
        unit = [1 if j == i else 0 for j in range(dim)]
        if rank(current + [unit], dim) > r:
            current.append(unit)
            chosen.append(i)
            r += 1
    return chosen


@lru_cache(maxsize=None)
def _cell(n: int, s: int, t: int) -> tuple:
    return tuple(cell_labels(BidegreeCell(n, s, t)))


def truncated_hh(n: int) -> TruncatedHH:
    """HH^1 and HH^2 of the non-positive part via E_2 and the single differential."""
    if not 1 <= n <= 4:
        raise ValueError("truncated_hh supports 1 <= n <= 4")
    step = (n + 1, -n)
    cell_dims, ranks, twisted = {}, {}, {}
    bases = {1: [], 2: []}
    dims = {1: 0, 2: 0}
    maps = {}

    def outgoing(s, t):
        key = (s, t)
        if key not in maps:
            src = list(_cell(n, s, t))
            tgt = list(_cell(n, s + step[0], t + step[1]))
            maps[key] = (src, tgt, schouten_map(src, tgt, n) if src and tgt else None)
        return maps[key]

    for s, t in e2_cells(n):
        labels = list(_cell(n, s, t))
        cell_dims[(s, t)] = len(labels)
        twisted[(s, t)] = sum(1 for lab in labels if not lab.is_untwisted())
        total = s + t
        if total not in (1, 2) or not labels:
            continue
        src, tgt, f = outgoing(s, t)
        if f is None:
            kernel = [[1 if i == j else 0 for i in range(len(src))] for j in range(len(src))]
        else:
            kernel = f.kernel()
            ranks[(s, t)] = f.rank()
        # incoming image
        ps, pt = s - step[0], t - step[1]
        image = []
        if ps >= 0 and pt <= 0 and _cell(n, ps, pt):
            _, _, g = outgoing(ps, pt)
            if g is not None:
                image = g.image()
                ranks[(ps, pt)] = g.rank()
        if image:
            # kernel contains the image; pick kernel vectors independent modulo it
            keep = []
            current = [list(v) for v in image]
            r = rank(current, len(labels))
            for v in kernel:
                if rank(current + [list(v)], len(labels)) > r:
                    current.append(list(v))
                    keep.append(v)
                    r += 1
            kernel = keep
        dims[total] += len(kernel)
        bases[total].extend(_to_vector(labels, v, n) for v in kernel)
    return TruncatedHH(n, dims[1], dims[2], bases[1], bases[2], cell_dims, ranks, twisted)


# ---------------------------------------------------------------------------
# cyclic symmetry


def _rotate(i: int, m: int) -> int:
    return i % m + 1


def _sorted_sign(seq: tuple) -> tuple[int, tuple]:
    sign = 1
    for a, b in itertools.combinations(range(len(seq)), 2):
        if seq[a] > seq[b]:
            sign = -sign
    return sign, tuple(sorted(seq))


def cyclic_shift(lab: PolyLabel) -> tuple[int, PolyLabel]:
    """Image of a label under v_k -> v_(k+1), y_k -> y_(k+1)."""
    m = len(lab.alpha)
    alpha = (lab.alpha[-1],) + lab.alpha[:-1]
    sector = (lab.sector[-1],) + lab.sector[:-1]
    s1, wedge = _sorted_sign(tuple(_rotate(i, m) for i in lab.wedge))
    s2, moved = _sorted_sign(tuple(_rotate(i, m) for i in lab.moved))
    return s1 * s2, PolyLabel(sector, alpha, wedge, moved)


def _shift_matrix(labels: list[PolyLabel]) -> list[list]:
    idx = {lab: i for i, lab in enumerate(labels)}
    d = len(labels)
    mat = [[0] * d for _ in range(d)]
    for j, lab in enumerate(labels):
        sign, img = cyclic_shift(lab)
        if img not in idx:
            raise ArithmeticError(f"cyclic shift leaves the cell: {img}")
        mat[idx[img]][j] = sign
    return mat


def _minus_identity(mat: list[list]) -> list[list]:
    return [[v - (1 if i == j else 0) for j, v in enumerate(row)] for i, row in enumerate(mat)]


@dataclass
class CyclicInvariants:
    n: int
    dim: int
    basis: list
    parts: dict

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "dim": self.dim,
            "basis": [repr(v) for v in self.basis],
            "parts": {f"{s},{t}": d for (s, t), d in sorted(self.parts.items())},
        }


def cyclic_invariant_hh2(n: int) -> CyclicInvariants:
    """Invariants of the cyclic permutation on truncated HH^2."""
    if not 1 <= n <= 4:
        raise ValueError("cyclic_invariant_hh2 supports 1 <= n <= 4")
    step = (n + 1, -n)
    parts = {}
    basis = []
    for s, t in e2_cells(n):
        if s + t != 2:
            continue
        labels = list(_cell(n, s, t))
        if not labels:
            continue
        d = len(labels)
        u_minus = _minus_identity(_shift_matrix(labels))
        tgt = list(_cell(n, s + step[0], t + step[1]))
        rows = [list(r) for r in u_minus]
        if tgt:
            rows += [list(r) for r in schouten_map(labels, tgt, n).matrix]
        closed_invariant = kernel_basis(rows, d)
        # invariant boundaries: images of invariant cochains one step back
        ps, pt = s - step[0], t - step[1]
        boundary = []
        if ps >= 0 and pt <= 0:
            prev = list(_cell(n, ps, pt))
            if prev:
                inv_prev = kernel_basis(_minus_identity(_shift_matrix(prev)), len(prev))
                g = schouten_map(prev, labels, n)
                boundary = [g.apply(v) for v in inv_prev]
                boundary = [v for v in boundary if any(x != 0 for x in v)]
        r = rank(boundary, d) if boundary else 0
        current = [list(v) for v in boundary]
        keep = []
        for v in closed_invariant:
            if rank(current + [list(v)], d) > r:
                current.append(list(v))
                keep.append(v)
                r += 1
        parts[(s, t)] = len(keep)
        basis.extend(_to_vector(labels, v, n) for v in keep)
    return CyclicInvariants(n, sum(parts.values()), basis, parts)


def torus_invariant_hh2(n: int, d: int) -> int:
    """Torus-invariant part of HH^2 of the regraded algebra in internal degree 2 - d."""
    return hh_dim(BidegreeCell(n, d, 2 - d, group="cyclic", torus=True, grading="regraded"))
