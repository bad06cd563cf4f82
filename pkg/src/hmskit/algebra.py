"""Exterior algebra, diagonal groups, smash products and the trivial extension.

Throughout, ``n`` is the dimension parameter and ``m = n + 2`` is both the
dimension of V and the order of the roots of unity involved.  Basis vectors
of V are indexed 1..m; a wedge monomial is a sorted tuple of indices.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .exact import CycScalar, zeta
from .linalg import GradedSpace, rank

__all__ = [
    "koszul_sign",
    "ExtElement",
    "wedge",
    "DiagGroupElement",
    "GROUP_KINDS",
    "enumerate_group",
    "group_order",
    "SmashElement",
    "idempotents",
    "hom_piece",
    "hom_table_dim",
    "hom_table_graded",
    "graded_dims",
    "associativity_failures",
    "TrivExtMorphism",
    "triv_ext_compose",
    "forward_dual_sign",
    "random_morphism",
    "smash_to_trivext",
    "check_smash_trivext_iso",
    "smash_dim",
    "check_closure",
]


def koszul_sign(left: tuple, right: tuple) -> int:
    """Sign of sorting the concatenation ``left + right``; 0 if they overlap.

    This is the single source of truth for wedge reordering signs.
    """
    inversions = 0
    rs = set(right)
    for i in left:
        if i in rs:
            return 0
        for j in right:
            if j < i:
                inversions += 1
    return -1 if inversions & 1 else 1


def _merge(left: tuple, right: tuple) -> tuple:
    return tuple(sorted(left + right))


class ExtElement:
    """Element of the exterior algebra on v_1..v_dim with CycScalar coefficients."""

    __slots__ = ("dim", "order", "terms")

    def __init__(self, dim: int, order: int, terms: Mapping[tuple, object] | None = None):
        self.dim = dim
        self.order = order
        clean = {}
        for key, c in (terms or {}).items():
            key = tuple(key)
            if list(key) != sorted(set(key)):
                raise ValueError(f"wedge index {key} must be strictly increasing")
            if key and (key[0] < 1 or key[-1] > dim):
                raise ValueError(f"wedge index {key} out of range 1..{dim}")
            c = _scalar(order, c)
            if not c.is_zero():
                clean[key] = clean.get(key, CycScalar.zero(order)) + c
        self.terms = {k: v for k, v in clean.items() if not v.is_zero()}

    @classmethod
    def basis(cls, dim: int, order: int, subset: Iterable[int], coeff=1) -> "ExtElement":
        s = tuple(subset)
        sign = 1
        srt = tuple(sorted(s))
        if len(set(s)) != len(s):
            return cls(dim, order)
        # sign of the permutation sorting s
        for a, b in itertools.combinations(range(len(s)), 2):
            if s[a] > s[b]:
                sign = -sign
        return cls(dim, order, {srt: sign * _scalar(order, coeff)})

    def __add__(self, other: "ExtElement") -> "ExtElement":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, CycScalar.zero(self.order)) + v
        return ExtElement(self.dim, self.order, out)

    def __sub__(self, other: "ExtElement") -> "ExtElement":
        return self + other.scale(-1)

    def scale(self, c) -> "ExtElement":
        return ExtElement(self.dim, self.order, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExtElement):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, v in sorted(self.terms.items()):
            name = "v" + "".join(str(i) for i in k) if k else "1"
            parts.append(f"({v})*{name}")
        return " + ".join(parts)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {len(k) for k in self.terms}


def _scalar(order: int, c) -> CycScalar:
    if isinstance(c, CycScalar):
        if c.order != order:
            raise ValueError(f"mixed cyclotomic orders {c.order} and {order}")
        return c
    return CycScalar.from_rational(order, c)


def wedge(a: ExtElement, b: ExtElement) -> ExtElement:
    if a.dim != b.dim:
        raise ValueError("wedge of elements over different V")
    out: dict = {}
    for ka, va in a.terms.items():
        for kb, vb in b.terms.items():
            s = koszul_sign(ka, kb)
            if s == 0:
                continue
            key = _merge(ka, kb)
            term = va * vb if s > 0 else -(va * vb)
            out[key] = out.get(key, CycScalar.zero(a.order)) + term
    return ExtElement(a.dim, a.order, out)


# ---------------------------------------------------------------------------
# groups

GROUP_KINDS = ("cyclic", "projective", "special")
# cyclic:     Gamma_{n+2} = <zeta * id>
# projective: Gamma in PSL(V), normalised with first exponent 0
# special:    the preimage of Gamma in SL(V)


@dataclass(frozen=True)
class DiagGroupElement:
    """diag(zeta^k_1, ..., zeta^k_m) with exponents stored mod m."""

    exps: tuple
    projective: bool = False

    def __post_init__(self):
        m = len(self.exps)
        ks = tuple(int(k) % m for k in self.exps)
        if self.projective:
            ks = tuple((k - ks[0]) % m for k in ks)
        object.__setattr__(self, "exps", ks)

    @property
    def order(self) -> int:
        return len(self.exps)

    def __mul__(self, other: "DiagGroupElement") -> "DiagGroupElement":
        if self.order != other.order:
            raise ValueError("group elements of different rank")
        return DiagGroupElement(
            tuple(a + b for a, b in zip(self.exps, other.exps)),
            self.projective and other.projective,
        )

    def inverse(self) -> "DiagGroupElement":
        return DiagGroupElement(tuple(-a for a in self.exps), self.projective)

    def is_identity(self) -> bool:
        return not any(self.exps)

    def in_sl(self) -> bool:
        return sum(self.exps) % self.order == 0

    def fixed_indices(self) -> tuple:
        return tuple(i + 1 for i, k in enumerate(self.exps) if k == 0)

    def moved_indices(self) -> tuple:
        return tuple(i + 1 for i, k in enumerate(self.exps) if k != 0)

    def character(self, weight: Iterable[int]) -> int:
        """Exponent of zeta by which the element scales a vector of the given weight."""
        return sum(k * w for k, w in zip(self.exps, weight)) % self.order

    def act_wedge(self, subset: tuple) -> CycScalar:
        return zeta(self.order, sum(self.exps[i - 1] for i in subset))


def enumerate_group(kind: str, n: int) -> list[DiagGroupElement]:
    if n < 1:
        raise ValueError("n must be at least 1")
    m = n + 2
    if kind == "cyclic":
        return [DiagGroupElement((l,) * m) for l in range(m)]
    if kind == "special":
        out = []
        for head in itertools.product(range(m), repeat=m - 1):
            out.append(DiagGroupElement(head + ((-sum(head)) % m,)))
        return out
    if kind == "projective":
        out = []
        for mid in itertools.product(range(m), repeat=m - 2):
            out.append(
                DiagGroupElement((0,) + mid + ((-sum(mid)) % m,), projective=True)
            )
        return out
    raise ValueError(f"unknown group kind {kind!r}; expected one of {GROUP_KINDS}")


def group_order(kind: str, n: int) -> int:
    m = n + 2
    return {"cyclic": m, "projective": m**n, "special": m ** (n + 1)}[kind]


def check_closure(elements: list[DiagGroupElement]) -> bool:
    s = set(elements)
    return all((a * b) in s for a in elements for b in elements) and all(
        g.inverse() in s for g in elements
    )


# ---------------------------------------------------------------------------
# smash product  Lambda V x| G


class SmashElement:
    """Formal sum of v_I (x) g with the rule (a g)(b h) = (a ^ g.b) gh."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[tuple, object] | None = None):
        self.n = n
        m = n + 2
        out: dict = {}
        for (subset, g), c in (terms or {}).items():
            if isinstance(g, DiagGroupElement):
                g = g.exps
            c = _scalar(m, c)
            if c.is_zero():
                continue
            key = (tuple(subset), tuple(g))
            out[key] = out.get(key, CycScalar.zero(m)) + c
        self.terms = {k: v for k, v in out.items() if not v.is_zero()}

    @property
    def order(self) -> int:
        return self.n + 2

    @classmethod
    def monomial(cls, n: int, subset=(), g=None, coeff=1) -> "SmashElement":
        m = n + 2
        g = tuple(g.exps if isinstance(g, DiagGroupElement) else (g or (0,) * m))
        e = ExtElement.basis(m, m, subset, coeff)
        return cls(n, {(k, g): v for k, v in e.terms.items()})

    @classmethod
    def one(cls, n: int) -> "SmashElement":
        return cls.monomial(n)

    def __add__(self, other: "SmashElement") -> "SmashElement":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, CycScalar.zero(self.order)) + v
        return SmashElement(self.n, out)

    def __sub__(self, other: "SmashElement") -> "SmashElement":
        return self + other.scale(-1)

    def scale(self, c) -> "SmashElement":
        return SmashElement(self.n, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "SmashElement") -> "SmashElement":
        m = self.order
        out: dict = {}
        for (a, g), ca in self.terms.items():
            for (b, h), cb in other.terms.items():
                s = koszul_sign(a, b)
                if s == 0:
                    continue
                # g acts on v_b by zeta^(sum of g-exponents over b)
                c = ca * cb * zeta(m, sum(g[i - 1] for i in b))
                if s < 0:
                    c = -c
                key = (_merge(a, b), tuple((x + y) % m for x, y in zip(g, h)))
                out[key] = out.get(key, CycScalar.zero(m)) + c
        return SmashElement(self.n, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SmashElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        return f"SmashElement(n={self.n}, {len(self.terms)} terms)"


def smash_dim(n: int, kind: str) -> int:
    return 2 ** (n + 2) * group_order(kind, n)


def idempotents(m: int) -> list[SmashElement]:
    """Primitive idempotents e_0..e_{m-1} of the group algebra of <zeta_m * id>."""
    n = m - 2
    if n < 1:
        raise ValueError("order must be at least 3")
    out = []
    for j in range(m):
        terms = {
            ((), (l,) * m): zeta(m, -j * l) * Fraction(1, m) for l in range(m)
        }
        out.append(SmashElement(n, terms))
    return out


def _obj(j: int, m: int) -> int:
    if not 1 <= j <= m:
        raise ValueError(f"object index {j} outside 1..{m}")
    return j % m


def hom_table_dim(n: int, j: int, k: int) -> int:
    """Dimension prescribed by the three-case Hom table."""
    from math import comb

    m = n + 2
    if j < k:
        return comb(m, k - j)
    if j == k:
        return 2
    return comb(m, k - j + m)


def hom_table_graded(n: int, j: int, k: int) -> dict:
    """Degree -> dimension from the three-case table, reading Lambda^a V[2] in degree a - 2."""
    from math import comb

    m = n + 2
    if j < k:
        return {Fraction(k - j): comb(m, k - j)}
    if j == k:
        return {Fraction(0): 1, Fraction(n): 1}
    return {Fraction(k - j + n): comb(m, k - j + m)}


def graded_dims(space: GradedSpace) -> dict:
    out: dict = {}
    for lab in space.labels:
        d = Fraction(space.degree(lab))
        out[d] = out.get(d, 0) + 1
    return out


def hom_piece(n: int, j: int, k: int) -> GradedSpace:
    """The piece e_k Q e_j with the regraded degrees, computed in the smash product."""
    m = n + 2
    es = idempotents(m)
    ek, ej = es[_obj(k, m)], es[_obj(j, m)]
    labels, degrees, vectors = [], {}, []
    for size in range(m + 1):
        for subset in itertools.combinations(range(1, m + 1), size):
            prod = ek * SmashElement.monomial(n, subset) * ej
            if prod.is_zero():
                continue
            labels.append(subset)
            degrees[subset] = Fraction(n, m) * size + Fraction(2, m) * (k - j)
            vectors.append(prod)
    # independence of the surviving products, measured in the smash basis
    keys = sorted({key for v in vectors for key in v.terms})
    idx = {key: i for i, key in enumerate(keys)}
    zero = CycScalar.zero(m)
    mat = [[zero] * len(vectors) for _ in keys]
    for c, v in enumerate(vectors):
        for key, val in v.terms.items():
            mat[idx[key]][c] = val
    if vectors and rank(mat, len(vectors)) != len(vectors):
        raise ArithmeticError("e_k v_I e_j products are linearly dependent")
    return GradedSpace(tuple(labels), degrees, m)


# ---------------------------------------------------------------------------
# trivial extension category


@dataclass(frozen=True)
class TrivExtMorphism:
    """Morphism X_source -> X_target.

    ``forward`` maps wedge subsets of size target-source to coefficients.
    ``dual`` is a functional on Lambda^(source-target) V given by its values
    on basis subsets; it sits in degree n - (source - target).
    """

    n: int
    source: int
    target: int
    forward: Mapping[tuple, CycScalar]
    dual: Mapping[tuple, CycScalar]

    def __post_init__(self):
        m = self.n + 2
        _obj(self.source, m)
        _obj(self.target, m)
        fw = {tuple(k): _scalar(m, v) for k, v in self.forward.items()}
        du = {tuple(k): _scalar(m, v) for k, v in self.dual.items()}
        fw = {k: v for k, v in fw.items() if not v.is_zero()}
        du = {k: v for k, v in du.items() if not v.is_zero()}
        if fw and self.source > self.target:
            raise ValueError("forward part needs source <= target")
        if du and self.source < self.target:
            raise ValueError("dual part needs source >= target")
        for k in fw:
            if len(k) != self.target - self.source:
                raise ValueError(f"forward term {k} has the wrong wedge degree")
        for k in du:
            if len(k) != self.source - self.target:
                raise ValueError(f"dual term {k} has the wrong wedge degree")
        object.__setattr__(self, "forward", fw)
        object.__setattr__(self, "dual", du)

    @classmethod
    def identity(cls, n: int, j: int) -> "TrivExtMorphism":
        return cls(n, j, j, {(): 1}, {})

    def forward_degree(self) -> int:
        return self.target - self.source

    def dual_degree(self) -> int:
        return self.n - (self.source - self.target)

    def is_zero(self) -> bool:
        return not self.forward and not self.dual

    def __add__(self, other: "TrivExtMorphism") -> "TrivExtMorphism":
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("adding morphisms between different objects")
        return TrivExtMorphism(
            self.n, self.source, self.target,
            _add_dicts(self.forward, other.forward, self.n + 2),
            _add_dicts(self.dual, other.dual, self.n + 2),
        )

    def scale(self, c) -> "TrivExtMorphism":
        return TrivExtMorphism(
            self.n, self.source, self.target,
            {k: v * c for k, v in self.forward.items()},
            {k: v * c for k, v in self.dual.items()},
        )


def _add_dicts(a: Mapping, b: Mapping, m: int) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, CycScalar.zero(m)) + v
    return out


def forward_dual_sign(deg_a: int, deg_dual: int, deg_arg: int) -> int:
    """Koszul sign for moving the forward element a past b^dual and its argument."""
    return -1 if (deg_a * (deg_dual + deg_arg)) % 2 else 1


def triv_ext_compose(f: TrivExtMorphism, g: TrivExtMorphism) -> TrivExtMorphism:
    """The composite f . g : X_{g.source} -> X_{f.target}."""
    if f.n != g.n:
        raise ValueError("morphisms over different n")
    if g.target != f.source:
        raise ValueError(
            f"cannot compose: g ends at X_{g.target}, f starts at X_{f.source}"
        )
    n, m = f.n, f.n + 2
    i, k = g.source, f.target
    zero = CycScalar.zero(m)
    forward: dict = {}
    dual: dict = {}

    # (a, 0)(b, 0) = (a ^ b, 0)
    for ka, va in f.forward.items():
        for kb, vb in g.forward.items():
            s = koszul_sign(ka, kb)
            if s:
                key = _merge(ka, kb)
                forward[key] = forward.get(key, zero) + s * (va * vb)

    p = i - k  # argument degree of a resulting functional
    if p >= 0:
        args = list(itertools.combinations(range(1, m + 1), p))
        # (0, a^)(b, 0) = x -> a^(b ^ x)
        for kb, vb in g.forward.items():
            for x in args:
                s = koszul_sign(kb, x)
                if not s:
                    continue
                val = f.dual.get(_merge(kb, x))
                if val is not None:
                    dual[x] = dual.get(x, zero) + s * (vb * val)
        # (a, 0)(0, b^) = sign * (x -> b^(x ^ a))
        for ka, va in f.forward.items():
            sign = forward_dual_sign(len(ka), g.dual_degree(), p)
            for x in args:
                s = koszul_sign(x, ka)
                if not s:
                    continue
                val = g.dual.get(_merge(x, ka))
                if val is not None:
                    dual[x] = dual.get(x, zero) + (sign * s) * (va * val)
    return TrivExtMorphism(n, i, k, forward if i <= k else {}, dual)


def random_morphism(n: int, j: int, k: int, rng: random.Random, span: int = 3) -> TrivExtMorphism:
    """Morphism X_j -> X_k with random small integer coefficients in every slot."""
    m = n + 2
    fw, du = {}, {}
    if j <= k:
        for s in itertools.combinations(range(1, m + 1), k - j):
            fw[s] = rng.randint(-span, span)
    if j >= k:
        for s in itertools.combinations(range(1, m + 1), j - k):
            du[s] = rng.randint(-span, span)
    return TrivExtMorphism(n, j, k, fw, du)


def associativity_failures(n: int, trials: int = 200, seed: int = 0) -> int:
    """Random composable triples (f, g, h) with (f g) h != f (g h)."""
    rng = random.Random(seed)
    m = n + 2
    bad = 0
    for _ in range(trials):
        a, b, c, d = (rng.randint(1, m) for _ in range(4))
        h = random_morphism(n, a, b, rng)
        g = random_morphism(n, b, c, rng)
        f = random_morphism(n, c, d, rng)
        left = triv_ext_compose(triv_ext_compose(f, g), h)
        right = triv_ext_compose(f, triv_ext_compose(g, h))
        if not (left + right.scale(-1)).is_zero():
            bad += 1
    return bad


def smash_to_trivext(n: int, subset: tuple, j: int) -> TrivExtMorphism:
    """Image of v_I e_j (object X_j) under the graded-piece identification.

    A forward element when |I| = k - j; otherwise the functional
    x -> coefficient of the top form in v_I ^ x.
    """
    m = n + 2
    size = len(subset)
    k = (j - 1 + size) % m + 1
    if size == k - j:
        return TrivExtMorphism(n, j, k, {tuple(subset): 1}, {})
    top = tuple(range(1, m + 1))
    du = {}
    for x in itertools.combinations(range(1, m + 1), j - k):
        s = koszul_sign(tuple(subset), x)
        if s and _merge(tuple(subset), x) == top:
            du[x] = s
    return TrivExtMorphism(n, j, k, {}, du)


def _as_trivext_sum(n: int, elem: SmashElement, j: int, k: int) -> TrivExtMorphism:
    """Rewrite an element of e_k Q e_j (expanded in the smash basis) as a morphism."""
    m = n + 2
    es = idempotents(m)
    total = TrivExtMorphism(n, j, k, {}, {})
    remaining = elem
    for size in range(m + 1):
        if (size - (k - j)) % m:
            continue
        for subset in itertools.combinations(range(1, m + 1), size):
            # coefficient of v_I e_j: read off the v_I (x) identity term times m
            c = remaining.terms.get((subset, (0,) * m))
            if c is None or c.is_zero():
                continue
            c = c * m
            basis = SmashElement.monomial(n, subset) * es[j % m]
            remaining = remaining - basis.scale(c)
            total = total + smash_to_trivext(n, subset, j).scale(c)
    if not remaining.is_zero():
        raise ArithmeticError("element does not lie in e_k Q e_j")
    return total


def check_smash_trivext_iso(n: int) -> bool:
    """Compare structure constants of e-pieces of the smash product and of C."""
    m = n + 2
    es = idempotents(m)
    subsets = [
        s for size in range(m + 1) for s in itertools.combinations(range(1, m + 1), size)
    ]
    for i in range(1, m + 1):
        for b in subsets:
            j = (i - 1 + len(b)) % m + 1
            gb = SmashElement.monomial(n, b) * es[i % m]
            g_mor = smash_to_trivext(n, b, i)
            for a in subsets:
                k = (j - 1 + len(a)) % m + 1
                fa = SmashElement.monomial(n, a) * es[j % m]
                prod = fa * gb
                lhs = _as_trivext_sum(n, prod, i, k)
                rhs = triv_ext_compose(smash_to_trivext(n, a, j), g_mor)
                if (lhs.forward, lhs.dual) != (rhs.forward, rhs.dual):
                    return False
    return True
