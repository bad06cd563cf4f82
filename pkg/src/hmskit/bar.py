"""Hochschild cohomology of exterior smash products from the normalized bar complex.

This is an independent route to the closed formula in :mod:`hochschild`.  For
a diagonal abelian group G acting on Lambda V,

    HH(Lambda V x| G) = ( sum over h in G of HH(Lambda V, Lambda V h) )^G,

and each summand is computed from normalized cochains
Hom((Lambda^{>0} V)^{(x) s}, Lambda V) with the graded Hochschild
differential.  Everything is split by torus weight, so only small blocks are
ever assembled.  Internal degrees use the wedge grading.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from functools import lru_cache

from .algebra import DiagGroupElement, enumerate_group, koszul_sign
from .exact import CycScalar, zeta
from .linalg import sparse_rank

__all__ = ["bar_oracle", "CochainBudgetError", "cochain_basis", "differential", "square_is_zero"]

MAX_COCHAINS = 100_000


class CochainBudgetError(RuntimeError):
    """A restricted cochain space is too large to assemble."""


@lru_cache(maxsize=None)
def _subsets(m: int) -> tuple:
    return tuple(
        s for k in range(m + 1) for s in itertools.combinations(range(1, m + 1), k)
    )


def _weight(inputs: tuple, output: tuple, m: int) -> tuple:
    w = [0] * m
    for i in output:
        w[i - 1] += 1
    for s in inputs:
        for i in s:
            w[i - 1] -= 1
    return tuple(w)


@lru_cache(maxsize=None)
def cochain_basis(m: int, s: int, t: int) -> dict:
    """Weight -> list of (input tuple, output subset) with s inputs and internal degree t."""
    positive = [x for x in _subsets(m) if x]
    by_degree = defaultdict(list)
    for x in _subsets(m):
        by_degree[len(x)].append(x)
    blocks: dict = defaultdict(list)
    count = 0
    for inputs in itertools.product(positive, repeat=s):
        out_deg = sum(len(x) for x in inputs) + t
        for out in by_degree.get(out_deg, ()):
            blocks[_weight(inputs, out, m)].append((inputs, out))
            count += 1
            if count > MAX_COCHAINS:
                raise CochainBudgetError(
                    f"cochain space with {s} inputs exceeds {MAX_COCHAINS} elements"
                )
    return dict(blocks)


def differential(basis_elem: tuple, t: int, h: DiagGroupElement) -> dict:
    """Image of the cochain phi(inputs) = v_out (zero on other basis inputs).

    Result maps (input tuple, output subset) of the next cochain space to
    exact coefficients in Q(zeta_m).
    """
    inputs, out = basis_elem
    m = h.order
    s = len(inputs)
    positive = [x for x in _subsets(m) if x]
    res: dict = defaultdict(lambda: CycScalar.zero(m))
    # graded degree of phi is its internal degree t
    for a in positive:
        # a * phi(rest)
        k = koszul_sign(a, out)
        if k:
            sign = -1 if (len(a) * t) % 2 else 1
            key = ((a,) + inputs, tuple(sorted(a + out)))
            res[key] = res[key] + sign * k
        # phi(rest) * (h . a) twisted right action
        k = koszul_sign(out, a)
        if k:
            sign = -1 if (s + 1) % 2 else 1
            key = (inputs + (a,), tuple(sorted(out + a)))
            res[key] = res[key] + h.act_wedge(a) * (sign * k)
    # phi(..., a_i a_{i+1}, ...) for every splitting of an input
    for pos, block in enumerate(inputs):
        if len(block) < 2:
            continue
        sign = -1 if (pos + 1) % 2 else 1
        for r in range(1, len(block)):
            for left in itertools.combinations(block, r):
                right = tuple(i for i in block if i not in left)
                k = koszul_sign(left, right)
                key = (inputs[:pos] + (left, right) + inputs[pos + 1 :], out)
                res[key] = res[key] + sign * k
    return {k: v for k, v in res.items() if not v.is_zero()}


def _block_rank(m: int, s: int, t: int, weight: tuple, h: DiagGroupElement) -> int:
    if s < 0:
        return 0
    source = cochain_basis(m, s, t).get(weight, [])
    if not source:
        return 0
    return sparse_rank(differential(b, t, h) for b in source)


def square_is_zero(m: int, s: int, t: int, h: DiagGroupElement) -> bool:
    """Check delta o delta = 0 on every basis cochain with s inputs."""
    for blocks in cochain_basis(m, s, t).values():
        for b in blocks:
            first = differential(b, t, h)
            total: dict = defaultdict(lambda: CycScalar.zero(m))
            for key, c in first.items():
                for k2, c2 in differential(key, t, h).items():
                    total[k2] = total[k2] + c * c2
            if any(not v.is_zero() for v in total.values()):
                return False
    return True


def bar_oracle(n: int, degree: int, t: int, group: str = "cyclic") -> int:
    """dim HH^degree(Lambda V x| G)^t with G the scalar group ("cyclic") or its SL preimage."""
    if n != 1:
        raise ValueError("the bar complex oracle is only run for n = 1")
    if abs(t) > 3:
        raise ValueError("internal degree must satisfy |t| <= 3")
    m = n + 2
    s = degree - t
    if s < 0:
        return 0
    elements = enumerate_group(group, n)
    gens = [(1,) * m] if group == "cyclic" else [
        tuple(1 if j == i else (-1 if j == i + 1 else 0) for j in range(m)) for i in range(m - 1)
    ]
    total = 0
    for weight, cochains in cochain_basis(m, s, t).items():
        # G acts on a weight block through the character of the weight
        if any(sum(g * w for g, w in zip(gen, weight)) % m for gen in gens):
            continue
        for h in elements:
            out_rank = _block_rank(m, s, t, weight, h)
            in_rank = _block_rank(m, s - 1, t, weight, h)
            total += len(cochains) - out_rank - in_rank
    return total
