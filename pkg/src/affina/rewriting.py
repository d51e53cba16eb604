"""Leftmost rewriting ``Red``/``Red*``, curated sets CT, congruence deciders.

``reduce_star(t, spec)`` replaces the leftmost occurrence of ``spec.tau`` by
``spec.v`` until none is left.  When ``tau`` is in CT and ``|v| < |tau|`` the
result is the canonical representative of ``t`` for the congruence generated
by ``(tau, v)``; :func:`closure_oracle` computes the same congruence on a
bounded universe by union-find, independently of ``Red``.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .algebra_core import (
    EMPTY,
    AffinaError,
    Alphabet,
    ContextPolynomial,
    Mode,
    Obj,
    Polynomial,
    Tree,
    _node,
    empty,
    format_object,
    is_var,
    leaf,
    length,
    leaf_side_count,
    letter_count,
    mode_of,
    objects_up_to,
    occurrences,
    same_mode,
    size,
    sort_key,
    star,
    subobjects,
    symbols,
    var,
)

log = logging.getLogger(__name__)

DEFAULT_ALPHABET = Alphabet("ab")


class NotReducible(AffinaError, ValueError):
    pass


class NonTerminating(AffinaError, ValueError):
    """``reduce_star`` needs ``|v| < |tau|``."""


class NotInCT(AffinaError, ValueError):
    """Red* equality only decides the congruence for ``tau`` in CT."""


class VariableCollision(AffinaError, ValueError):
    pass


class UniverseTooLarge(AffinaError, ValueError):
    pass


@dataclass(frozen=True)
class ReductionSpec:
    tau: Obj
    v: Obj

    def __post_init__(self):
        same_mode(self.tau, self.v)

    @property
    def mode(self) -> Mode:
        return mode_of(self.tau)


# -- reduction ---------------------------------------------------------------


def is_reducible(t: Obj, tau: Obj) -> bool:
    if same_mode(t, tau) is Mode.WORD:
        return tau in t
    return _contains(t, tau)


def _contains(t: Tree, tau: Tree) -> bool:
    stack = [t]
    while stack:
        s = stack.pop()
        if s == tau:
            return True
        if s.is_node and s.size > tau.size:
            stack.append(s.right)
            stack.append(s.left)
    return False


def _red_tree(t: Tree, tau: Tree, v: Tree):
    # None when t holds no occurrence of tau
    if t == tau:
        return v
    if not t.is_node or t.size <= tau.size:
        return None
    r = _red_tree(t.left, tau, v)
    if r is not None:
        return _node(r, t.right)
    r = _red_tree(t.right, tau, v)
    if r is not None:
        return _node(t.left, r)
    return None


def _red(t: Obj, tau: Obj, v: Obj):
    if isinstance(t, str):
        i = t.find(tau)
        return None if i < 0 else t[:i] + v + t[i + len(tau):]
    return _red_tree(t, tau, v)


def reduce_once(t: Obj, spec: ReductionSpec) -> Obj:
    """Replace the leftmost occurrence of ``spec.tau`` in ``t`` by ``spec.v``."""
    same_mode(t, spec.tau)
    r = _red(t, spec.tau, spec.v)
    if r is None:
        raise NotReducible(f"{format_object(t)} does not contain {format_object(spec.tau)}")
    return r


def reduce_star(t: Obj, spec: ReductionSpec) -> Obj:
    same_mode(t, spec.tau)
    if length(spec.v) >= length(spec.tau):
        raise NonTerminating(
            f"|v| = {length(spec.v)} must be smaller than |tau| = {length(spec.tau)}")
    while True:
        r = _red(t, spec.tau, spec.v)
        if r is None:
            return t
        t = r


def reduction_trace(t: Obj, spec: ReductionSpec) -> list[Obj]:
    """``[t, Red(t), Red(Red(t)), ...]`` down to the irreducible form."""
    reduce_star(empty(spec.mode), spec)  # precondition check
    out = [t]
    while (r := _red(out[-1], spec.tau, spec.v)) is not None:
        out.append(r)
    return out


# -- curated sets ------------------------------------------------------------


def in_ct(tau: Obj, alphabet: Alphabet | None = None) -> bool:
    """Trees of length >= 2; words ``a^n b a b^n`` with ``n > 1``."""
    if isinstance(tau, Tree):
        return tau.length >= 2
    alphabet = alphabet or DEFAULT_ALPHABET
    a, b = re.escape(alphabet.a), re.escape(alphabet.b)
    m = re.fullmatch(f"({a}+){b}{a}({b}+)", tau)
    return bool(m) and len(m.group(1)) == len(m.group(2)) > 1


def ct_word(n: int, alphabet: Alphabet | None = None) -> str:
    if n < 2:
        raise ValueError("CT words need n > 1")
    alphabet = alphabet or DEFAULT_ALPHABET
    a, b = alphabet.a, alphabet.b
    return a * n + b + a + b * n


def ct_tree(n: int, letter: str = "a") -> Tree:
    """A balanced tree with ``n >= 2`` leaves all labelled ``letter``."""
    if n < 2:
        raise ValueError("CT trees need length >= 2")

    def build(k):
        if k == 1:
            return leaf(letter)
        return _node(build(k // 2), build(k - k // 2))

    return build(n)


def smallest_ct(min_len: int, mode: Mode, alphabet: Alphabet) -> Obj:
    """Shortest CT member of length at least ``min_len``."""
    if mode is Mode.TREE:
        return ct_tree(max(2, min_len), alphabet.a)
    n = max(2, -(-(min_len - 2) // 2))
    return ct_word(n, alphabet)


def equivalent(t: Obj, t2: Obj, spec: ReductionSpec, alphabet: Alphabet | None = None) -> bool:
    """Decide ``t ~ t2`` for the congruence generated by ``(spec.tau, spec.v)``."""
    if not in_ct(spec.tau, alphabet):
        raise NotInCT(
            f"{format_object(spec.tau)} is not in CT; Red* equality is unsound here, "
            "use closure_oracle")
    return reduce_star(t, spec) == reduce_star(t2, spec)


# -- strong irreducibility ---------------------------------------------------


def strong_irreducibility_failure(w: Obj, tau: Obj) -> tuple[str, Obj] | None:
    """Why ``w`` is not strongly ``tau``-irreducible, or None if it is.

    Reasons: ``("reducible", tau)``, ``("suffix-overlap", t)`` where ``t`` is
    a suffix of ``w`` and a proper prefix of ``tau``, ``("prefix-overlap",
    t)`` where ``t`` is a prefix of ``w`` and a proper suffix of ``tau``.
    """
    if is_reducible(w, tau):
        return ("reducible", tau)
    if isinstance(w, Tree):
        return None
    for k in range(1, min(len(w), len(tau) - 1) + 1):
        if w[-k:] == tau[:k]:
            return ("suffix-overlap", tau[:k])
    for k in range(1, min(len(w), len(tau) - 1) + 1):
        if w[:k] == tau[-k:]:
            return ("prefix-overlap", tau[-k:])
    return None


def is_strongly_irreducible(w: Obj, tau: Obj) -> bool:
    return strong_irreducibility_failure(w, tau) is None


def check_assumption1(tau: Obj, v: Obj, context: ContextPolynomial) -> bool:
    left, right = assumption1_sides(tau, v, context)
    return left == right


def assumption1_sides(tau: Obj, v: Obj, context: ContextPolynomial) -> tuple[Obj, Obj]:
    """``(Red*(C(tau)), Red*(C(v)))``."""
    spec = ReductionSpec(tau, v)
    return reduce_star(context(tau), spec), reduce_star(context(v), spec)


def polynomial_reduce(q: Polynomial, tau: Obj, fresh_var_index: int) -> Polynomial:
    """Replace occurrences of ``tau`` in ``q`` by the variable ``x_fresh``."""
    x = var(fresh_var_index)
    if any(s == x for s in symbols(q.body)):
        raise VariableCollision(f"x{fresh_var_index} already occurs in {q}")
    if any(is_var(s) for s in symbols(tau)):
        raise ValueError("tau must be a variable-free object")
    body = reduce_star(q.body, ReductionSpec(tau, x if isinstance(tau, str) else leaf(x)))
    return Polynomial(body, max(q.arity, fresh_var_index))


def find_strong_witness(p: Polynomial, tau: Obj, thetas: Iterable[Obj]) -> tuple[Obj, Obj] | None:
    """Search ``(theta, w)``: ``w`` a strongly irreducible sub-object of ``P(theta)``
    with ``|w| >= |tau|``."""
    for theta in thetas:
        image = p(theta)
        for w in sorted(subobjects(image), key=sort_key):
            if length(w) >= length(tau) and is_strongly_irreducible(w, tau):
                return theta, w
    return None


# -- congruences -------------------------------------------------------------


class Congruence:
    """A decidable congruence given by a class-key function.

    ``key`` returns None when the class cannot be decided (bounded oracles
    outside their universe).
    """

    name = "congruence"
    certified = True

    def key(self, t: Obj) -> Hashable | None:
        raise NotImplementedError

    def seeds(self) -> tuple[Obj, ...]:
        """Objects a refutation search should always try, whatever its bound."""
        return ()

    def related(self, s: Obj, t: Obj) -> bool | None:
        ks, kt = self.key(s), self.key(t)
        if ks is None or kt is None:
            return None
        return ks == kt

    def __str__(self):
        return self.name


class TotalLength(Congruence):
    name = "length"

    def key(self, t):
        return length(t)


@dataclass(frozen=True, eq=False)
class LetterCount(Congruence):
    letter: str

    @property
    def name(self):
        return f"letter:{self.letter}"

    def key(self, t):
        return letter_count(t, self.letter)


class FirstLetter(Congruence):
    """Words with the same first letter; the empty word is alone."""

    name = "first-letter"

    def key(self, t):
        if not isinstance(t, str):
            raise TypeError("first-letter congruence is for words")
        return t[:1]


@dataclass(frozen=True, eq=False)
class LeafSideCount(Congruence):
    """Atoms are alone; other trees are compared by left or right leaf count."""

    side: str

    @property
    def name(self):
        return f"side:{self.side}"

    def key(self, t):
        if not isinstance(t, Tree):
            raise TypeError("leaf-side congruence is for trees")
        if t.is_leaf:
            return ("atom", t.label)
        return ("count", leaf_side_count(t, self.side))


@dataclass(frozen=True, eq=False)
class LengthMod(Congruence):
    modulus: int

    @property
    def name(self):
        return f"length-mod:{self.modulus}"

    def key(self, t):
        return length(t) % self.modulus


class Principal(Congruence):
    """Congruence generated by the pair ``(u, v)``.

    Decided exactly by Red* when one side is in CT and strictly longer than
    the other; otherwise by a bounded closure, which is sound for merging
    but cannot certify that two objects are apart.
    """

    def __init__(self, u: Obj, v: Obj, alphabet: Alphabet | None = None, bound: int = 4):
        same_mode(u, v)
        self.u, self.v = u, v
        self.alphabet = alphabet or DEFAULT_ALPHABET
        self.bound = bound
        self.spec = None
        if in_ct(u, self.alphabet) and length(v) < length(u):
            self.spec = ReductionSpec(u, v)
        elif in_ct(v, self.alphabet) and length(u) < length(v):
            self.spec = ReductionSpec(v, u)
        self.certified = self.spec is not None
        self._partition = None

    def seeds(self):
        return (self.u, self.v)

    @property
    def name(self):
        return f"principal:{format_object(self.u)},{format_object(self.v)}"

    def key(self, t):
        if self.spec is not None:
            return reduce_star(t, self.spec)
        if self._partition is None:
            self._partition = closure_oracle(self.u, self.v, self.bound, self.alphabet)
        return self._partition.class_id(t)


def compatibility_failure(cong: Congruence, universe: Sequence[Obj]):
    """Return ``(s1, s1', s2, s2')`` breaking compatibility with star, or None."""
    classes: dict = {}
    for t in universe:
        classes.setdefault(cong.key(t), []).append(t)
    groups = [g for k, g in classes.items() if k is not None]
    for g1 in groups:
        for g2 in groups:
            seen: dict = {}
            for s1 in g1:
                for s2 in g2:
                    k = cong.key(star(s1, s2))
                    if k is None:
                        continue
                    if seen and k not in seen:
                        a1, a2 = next(iter(seen.values()))
                        return a1, s1, a2, s2
                    seen.setdefault(k, (s1, s2))
    return None


# -- bounded closure ---------------------------------------------------------


class UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        parent = self.parent
        root = x
        while parent.setdefault(root, root) != root:
            root = parent[root]
        while x != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[ry] = rx
        return True


class Partition:
    """Classes of a bounded universe, members sorted length-then-text."""

    def __init__(self, classes: Iterable[Iterable[Obj]]):
        cls = [tuple(sorted(c, key=sort_key)) for c in classes]
        cls.sort(key=lambda c: sort_key(c[0]))
        self.classes = cls
        self._index = {t: i for i, c in enumerate(cls) for t in c}

    def class_id(self, t: Obj) -> int | None:
        return self._index.get(t)

    def class_of(self, t: Obj) -> tuple[Obj, ...]:
        return self.classes[self._index[t]]

    def same(self, s: Obj, t: Obj) -> bool:
        return self._index[s] == self._index[t]

    def blocks(self) -> set[frozenset]:
        return {frozenset(c) for c in self.classes}

    def __eq__(self, other):
        return isinstance(other, Partition) and self.blocks() == other.blocks()

    def __len__(self):
        return len(self.classes)

    def lines(self) -> list[str]:
        return [f"class {i}: " + " ".join(format_object(t) for t in c)
                for i, c in enumerate(self.classes)]


def partition_by(universe: Iterable[Obj], key) -> Partition:
    groups: dict = {}
    for t in universe:
        groups.setdefault(key(t), []).append(t)
    return Partition(groups.values())


def _measure(t: Obj) -> int:
    return length(t) if isinstance(t, str) else size(t)


def closure_oracle(u: Obj, v: Obj, max_len: int, alphabet: Alphabet | None = None,
                   *, pad: int | None = None, cap: int = 400_000) -> Partition:
    """The congruence generated by ``(u, v)`` restricted to a bounded universe.

    Words are bounded by length, trees by symbol count.  Generator pairs
    ``(C(u), C(v))`` are taken inside a universe padded by ``max(|u|, |v|)``,
    then the relation is closed under compatibility with star inside the
    padded universe and finally cut back to ``max_len``.
    """
    mode = same_mode(u, v)
    alphabet = alphabet or DEFAULT_ALPHABET
    if pad is None:
        pad = max(_measure(u), _measure(v))
    big = max_len + pad
    universe = []
    for t in objects_up_to(mode, alphabet, big):
        universe.append(t)
        if len(universe) > cap:
            raise UniverseTooLarge(f"more than {cap} objects up to bound {big}")
    members = set(universe)
    uf = UnionFind()
    for t in universe:
        uf.find(t)
        for src, dst in ((u, v), (v, u)):
            if _measure(t) < _measure(src):
                continue
            for ctx in occurrences(t, src):
                other = ctx(dst)
                if other in members:
                    uf.union(t, other)
    _close_compatible(uf, universe, big, mode)
    groups: dict = {}
    for t in universe:
        if _measure(t) <= max_len:
            groups.setdefault(uf.find(t), []).append(t)
    return Partition(groups.values())


def _close_compatible(uf: UnionFind, universe, big, mode):
    by_measure: dict[int, list] = {}
    for t in universe:
        by_measure.setdefault(_measure(t), []).append(t)
    extra = 0 if mode is Mode.WORD else 1
    products = []
    for m1, xs in by_measure.items():
        for m2, ys in by_measure.items():
            if m1 + m2 + extra > big:
                continue
            for x in xs:
                for y in ys:
                    products.append((x, y, star(x, y)))
    changed = True
    while changed:
        changed = False
        seen = {}
        for x, y, p in products:
            q = seen.setdefault((uf.find(x), uf.find(y)), p)
            if q is not p and uf.union(q, p):
                changed = True
