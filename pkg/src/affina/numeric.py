"""The natural numbers and free commutative monoids ``N^p``.

On ``<N, +>`` the function ``x -> floor(e * x!)`` (1 at 0) preserves every
congruence yet is not affine, so it is not a polynomial.  For ``p >= 2``
every CP function on ``N^p`` is affine, and :func:`synthesize_affine`
recovers it from the componentwise length law.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from .algebra_core import AffinaError

NatVec = tuple[int, ...]

DEFAULT_CAP = 30


class CapExceeded(AffinaError, ValueError):
    pass


class NotAffineComplete(AffinaError, ValueError):
    """``N`` (p = 1) has CP functions that are not polynomial."""


class AffineSynthesisFailure(AffinaError):
    def __init__(self, msg: str, witness: tuple | None = None):
        super().__init__(msg)
        self.witness = witness


def euler_factorial(x: int, cap: int = DEFAULT_CAP) -> int:
    """``floor(e * x!)`` for ``x >= 1`` and 1 at 0, as ``sum_k x!/k!``."""
    if x < 0:
        raise ValueError("x must be a natural number")
    if x > cap:
        raise CapExceeded(f"x = {x} exceeds cap {cap}")
    total, term = 1, 1
    # term runs through x!/x!, x!/(x-1)!, ..., x!/0!
    for k in range(x, 0, -1):
        term *= k
        total += term
    return total


def check_divisibility_cp(n: int, f: Callable[[int], int] = euler_factorial,
                          cap: int = DEFAULT_CAP) -> tuple[int, int] | None:
    """First pair ``(a, b)``, ``b < a <= n``, with ``a - b`` not dividing ``f(a) - f(b)``."""
    if n > cap:
        raise CapExceeded(f"N = {n} exceeds cap {cap}")
    values = [f(x) for x in range(n + 1)]
    for a in range(n + 1):
        for b in range(a):
            if (values[a] - values[b]) % (a - b):
                return a, b
    return None


def differences(values: Sequence[int]) -> list[int]:
    return [y - x for x, y in zip(values, values[1:])]


def check_not_affine(n: int, f: Callable[[int], int] = euler_factorial) -> bool:
    """True iff some second difference of ``f`` on ``0..n`` is nonzero."""
    if n < 3:
        raise ValueError("need N >= 3")
    values = [f(x) for x in range(n + 1)]
    return any(differences(differences(values)))


def nat_table(n: int, f: Callable[[int], int] = euler_factorial) -> list[tuple]:
    """Rows ``(x, f(x), first difference, second difference)``; missing ones are None."""
    values = [f(x) for x in range(n + 1)]
    d1 = differences(values)
    d2 = differences(d1)
    return [(x, values[x], d1[x] if x < len(d1) else None, d2[x] if x < len(d2) else None)
            for x in range(n + 1)]


def vec_add(u: NatVec, v: NatVec) -> NatVec:
    return tuple(a + b for a, b in zip(u, v))


def vec_scale(k: int, u: NatVec) -> NatVec:
    return tuple(k * a for a in u)


@dataclass(frozen=True)
class AffineMap:
    """``x_1..x_n -> constant + sum k_i x_i`` on ``N^p``."""

    constant: NatVec
    coefficients: tuple[int, ...]

    def __call__(self, *xs: NatVec) -> NatVec:
        if len(xs) != len(self.coefficients):
            raise TypeError(f"expected {len(self.coefficients)} arguments, got {len(xs)}")
        out = self.constant
        for k, x in zip(self.coefficients, xs):
            out = vec_add(out, vec_scale(k, x))
        return out


def synthesize_affine(f: Callable[..., NatVec], p: int, n: int, verify_bound: int = 2) -> AffineMap:
    """Recover ``f`` as an :class:`AffineMap` and check it componentwise.

    Every tuple of vectors with entries ``<= verify_bound`` is checked against
    ``|f(u)|_j = |f(0)|_j + sum k_i |u_i|_j`` for each coordinate ``j``.
    """
    if p < 2:
        raise NotAffineComplete("N is not affine complete; p must be at least 2")
    zero = (0,) * p
    c = tuple(f(*[zero] * n))
    if len(c) != p or any(x < 0 for x in c):
        raise AffineSynthesisFailure(f"f(0,...,0) = {c} is not in N^{p}")
    e1 = (1,) + (0,) * (p - 1)
    ks = []
    for i in range(n):
        args = [zero] * n
        args[i] = e1
        k = sum(f(*args)) - sum(c)
        if k < 0:
            raise AffineSynthesisFailure(f"negative degree in argument {i + 1}", tuple(args))
        ks.append(k)
    g = AffineMap(c, tuple(ks))
    vectors = list(itertools.product(range(verify_bound + 1), repeat=p))
    for xs in itertools.product(vectors, repeat=n):
        got = tuple(f(*xs))
        want = g(*xs)
        if got != want:
            raise AffineSynthesisFailure(f"f{xs} = {got}, affine law gives {want}", xs)
        # total length law is the sum of the componentwise ones
        if sum(got) != sum(c) + sum(k * sum(x) for k, x in zip(ks, xs)):
            raise AssertionError("componentwise law holds but total law fails")
    return g
