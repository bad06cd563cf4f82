"""Exact linear algebra over Q(zeta_m) on graded spaces.

Matrices are dense lists of rows.  Entries may be :class:`CycScalar` or any
exact field element (``Fraction``, ``int``); elimination is fraction-free
(Bareiss) with the first nonzero entry of each column taken as pivot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Mapping, Sequence

from .exact import CycScalar

__all__ = [
    "GradedSpace",
    "GradedMap",
    "echelon",
    "rank",
    "kernel_basis",
    "image_basis",
    "solve",
    "invariant_subspace",
    "mat_vec",
    "sparse_rank",
]

Label = Hashable


@dataclass(frozen=True)
class GradedSpace:
    """Finite-dimensional space with a basis of opaque labels and rational degrees."""

    labels: tuple
    degrees: Mapping[Label, Fraction] = field(default_factory=dict)
    order: int = 1

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError("basis labels must be distinct")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(
            self,
            "degrees",
            {lab: Fraction(self.degrees.get(lab, 0)) for lab in labels},
        )

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def degree(self, label: Label) -> Fraction:
        return self.degrees[label]

    def zero(self) -> CycScalar:
        return CycScalar.zero(self.order)


@dataclass(frozen=True)
class GradedMap:
    domain: GradedSpace
    codomain: GradedSpace
    matrix: tuple
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.matrix)
        if len(rows) != self.codomain.dim or any(
            len(r) != self.domain.dim for r in rows
        ):
            raise ValueError(
                f"matrix shape must be {self.codomain.dim}x{self.domain.dim}"
            )
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "shift", Fraction(self.shift))

    @classmethod
    def from_function(
        cls,
        domain: GradedSpace,
        codomain: GradedSpace,
        func: Callable[[Label], Mapping[Label, object]],
        shift=0,
        check_homogeneous: bool = True,
    ) -> "GradedMap":
        """Build the matrix column by column from images of basis labels."""
        idx = codomain.index()
        zero = CycScalar.zero(codomain.order)
        cols = []
        for lab in domain.labels:
            col = [zero] * codomain.dim
            for tgt, c in func(lab).items():
                if c == 0:
                    continue
                if tgt not in idx:
                    raise KeyError(f"image term {tgt!r} not in codomain basis")
                if check_homogeneous and codomain.degree(tgt) != domain.degree(lab) + Fraction(shift):
                    raise ValueError(
                        f"{lab!r} -> {tgt!r} breaks the degree shift {shift}"
                    )
                col[idx[tgt]] = col[idx[tgt]] + c
            cols.append(col)
        rows = [[cols[j][i] for j in range(domain.dim)] for i in range(codomain.dim)]
        return cls(domain, codomain, rows, Fraction(shift))

    def rank(self) -> int:
        return rank(self.matrix, self.domain.dim)

    def kernel(self) -> list[list]:
        return kernel_basis(self.matrix, self.domain.dim)

    def image(self) -> list[list]:
        return image_basis(self.matrix, self.domain.dim)

    def apply(self, vec: Sequence) -> list:
        return mat_vec(self.matrix, vec)


def _is_zero(x) -> bool:
    return x == 0


def _exact(x):
    # plain ints would turn into floats under true division
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floating point entries are not allowed in exact elimination")
    return x


def echelon(matrix: Sequence[Sequence], ncols: int | None = None):
    """Fraction-free row echelon form.

    Returns ``(rows, pivots)`` where ``rows`` are the nonzero echelon rows and
    ``pivots`` their pivot columns.  The input is not modified.
    """
    m = [[_exact(x) for x in r] for r in matrix]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    nrows = len(m)
    pivots: list[int] = []
    prev = 1
    k = 0
    for c in range(ncols):
        if k == nrows:
            break
        p = next((r for r in range(k, nrows) if not _is_zero(m[r][c])), None)
        if p is None:
            continue
        if p != k:
            m[k], m[p] = m[p], m[k]
        piv = m[k][c]
        row_k = m[k]
        for i in range(k + 1, nrows):
            row_i = m[i]
            a = row_i[c]
            if _is_zero(a):
                # Bareiss still rescales the row by piv/prev
                if prev == 1:
                    m[i] = [x * piv for x in row_i] if piv != 1 else row_i
                else:
                    m[i] = [(x * piv) / prev for x in row_i]
                continue
            new = row_i[:c] + [0 * a]
            for j in range(c + 1, ncols):
                v = piv * row_i[j] - a * row_k[j]
                new.append(v if prev == 1 else v / prev)
            m[i] = new
        prev = piv
        pivots.append(c)
        k += 1
    return m[:k], pivots


def rank(matrix: Sequence[Sequence], ncols: int | None = None) -> int:
    if not matrix:
        return 0
    return len(echelon(matrix, ncols)[1])


def kernel_basis(matrix: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    """Basis of the null space; one vector per free column, free entry = 1."""
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    if not matrix:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    rows, pivots = echelon(matrix, ncols)
    pivot_set = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        x = [0] * ncols
        x[f] = 1
        for r in range(len(rows) - 1, -1, -1):
            p = pivots[r]
            s = 0
            row = rows[r]
            for j in range(p + 1, ncols):
                if not _is_zero(x[j]) and not _is_zero(row[j]):
                    s = s + row[j] * x[j]
            x[p] = (-s) / row[p] if not _is_zero(s) else 0 * row[p]
        basis.append(x)
    return basis


def image_basis(matrix: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    """Columns of the matrix at pivot positions, as codomain coordinate vectors."""
    if not matrix:
        return []
    _, pivots = echelon(matrix, ncols)
    return [[row[c] for row in matrix] for c in pivots]


def mat_vec(matrix: Sequence[Sequence], vec: Sequence) -> list:
    out = []
    for row in matrix:
        s = 0
        for a, b in zip(row, vec):
            if not _is_zero(a) and not _is_zero(b):
                s = s + a * b
        out.append(s)
    return out


def solve(matrix: Sequence[Sequence], rhs: Sequence):
    """One exact solution of ``matrix @ x = rhs`` or ``None`` if inconsistent."""
    ncols = len(matrix[0])
    aug = [list(r) + [b] for r, b in zip(matrix, rhs)]
    rows, pivots = echelon(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [0] * ncols
    for r in range(len(rows) - 1, -1, -1):
        p = pivots[r]
        s = rows[r][ncols]
        for j in range(p + 1, ncols):
            if not _is_zero(x[j]):
                s = s - rows[r][j] * x[j]
        x[p] = s / rows[r][p]
    return x


def invariant_subspace(
    space: GradedSpace,
    action: Sequence[Mapping[Label, int] | Sequence[Sequence]],
    modulus: int,
) -> list:
    """Labels fixed by a diagonal abelian action.

    Each generator is a mapping ``label -> k`` meaning the basis vector is
    scaled by ``zeta_modulus ** k``.  A generator given as a square matrix is
    accepted only if it is diagonal with entries ``zeta_modulus ** k``.
    """
    gens = [_as_exponents(space, g, modulus) for g in action]
    fixed = [
        lab for lab in space.labels if all(g[lab] % modulus == 0 for g in gens)
    ]
    return fixed


def _as_exponents(space: GradedSpace, gen, modulus: int) -> Mapping[Label, int]:
    if isinstance(gen, Mapping):
        return gen
    from .exact import zeta

    n = space.dim
    if len(gen) != n or any(len(r) != n for r in gen):
        raise ValueError("generator matrix has the wrong shape")
    exps = {}
    powers = [zeta(modulus, k) for k in range(modulus)]
    for i, lab in enumerate(space.labels):
        for j in range(n):
            if i != j and gen[i][j] != 0:
                raise ValueError("non-diagonal group actions are not supported")
        entry = gen[i][i]
        k = next((k for k, z in enumerate(powers) if z == entry), None)
        if k is None:
            raise ValueError(f"diagonal entry {entry!r} is not a {modulus}-th root of unity")
        exps[lab] = k
    return exps


def sparse_rank(vectors) -> int:
    """Rank of sparse vectors given as ``{coordinate: value}`` dicts.

    Plain Gaussian elimination with the smallest coordinate as pivot; meant
    for large, very sparse systems where dense Bareiss would be wasteful.
    """
    pivots: dict = {}
    for vec in vectors:
        v = {k: _exact(x) for k, x in vec.items() if not _is_zero(x)}
        while v:
            lead = min(v)
            row = pivots.get(lead)
            if row is None:
                inv = 1 / v[lead]
                pivots[lead] = {k: x * inv for k, x in v.items()}
                break
            c = v[lead]
            for k, x in row.items():
                y = v.get(k, 0) - c * x
                if _is_zero(y):
                    v.pop(k, None)
                else:
                    v[k] = y
    return len(pivots)
