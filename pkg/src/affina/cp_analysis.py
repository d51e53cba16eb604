"""Black-box functions: multidegree, CP refutation, polynomial synthesis.

:func:`synthesize` recovers the polynomial of a congruence preserving
function by recursion on arity.  For an ``(n+1)``-ary ``f`` it picks ``tau``
in CT long enough, synthesizes the ``n``-ary section ``f(., ..., ., tau)``,
and turns every occurrence of ``tau`` in that polynomial into ``x_{n+1}``.
Anything that does not fit (negative degree, broken length law, wrong
degree after reduction, disagreement on the verification grid) is reported
as :class:`NotCongruencePreserving` with a witness tuple where one exists.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .algebra_core import (
    AffinaError,
    Alphabet,
    Mode,
    Obj,
    Polynomial,
    Tree,
    _node,
    atom,
    empty,
    format_object,
    length,
    length_one_objects,
    letter_count,
    objects_up_to,
)
from .rewriting import Congruence, in_ct, polynomial_reduce, smallest_ct

log = logging.getLogger(__name__)


class NotCongruencePreserving(AffinaError):
    """Evidence that a function is not congruence preserving.

    ``witness`` is an argument tuple of the top-level function (or None when
    the failure has no single tuple to show).
    """

    def __init__(self, msg: str, witness: tuple | None = None):
        super().__init__(msg)
        self.witness = witness


class AffineLawViolation(NotCongruencePreserving):
    pass


class NegativeDegree(NotCongruencePreserving):
    pass


class SynthesisFailure(NotCongruencePreserving):
    def __init__(self, msg, witness=None, candidate: Polynomial | None = None):
        super().__init__(msg, witness)
        self.candidate = candidate


class MultidegreeMismatch(AffinaError, ValueError):
    pass


@dataclass
class FunctionOracle:
    """A total, deterministic n-ary function on objects with a query counter.

    The counter is not locked; wrap the oracle yourself before sharing it
    between threads.
    """

    arity: int
    mode: Mode
    alphabet: Alphabet
    fn: Callable[..., Obj]
    name: str = "f"
    queries: int = 0

    def __call__(self, *args: Obj) -> Obj:
        if len(args) != self.arity:
            raise TypeError(f"{self.name} takes {self.arity} arguments, got {len(args)}")
        self.queries += 1
        return self.fn(*args)

    def section(self, t: Obj) -> FunctionOracle:
        """The ``(n-1)``-ary function ``f(., ..., ., t)``."""
        if self.arity == 0:
            raise ValueError("a constant has no sections")
        return FunctionOracle(self.arity - 1, self.mode, self.alphabet,
                              lambda *args: self(*args, t),
                              name=f"{self.name}(..,{format_object(t)})")

    @classmethod
    def from_polynomial(cls, p: Polynomial, alphabet: Alphabet, name: str | None = None):
        return cls(p.arity, p.mode, alphabet, p, name=name or str(p))


@dataclass
class LengthProfile:
    base: int
    multidegree: tuple[int, ...]
    samples: dict[tuple[int, ...], int] = field(default_factory=dict)
    letter_samples: dict[tuple[int, ...], int] = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return sum(self.multidegree)

    def predicted_length(self, lengths: Sequence[int]) -> int:
        return self.base + sum(k * m for k, m in zip(self.multidegree, lengths))


def _require_alphabet(f: FunctionOracle):
    if f.mode is Mode.WORD and len(f.alphabet) < 2:
        raise ValueError("word mode needs at least two letters (a* is not affine complete)")


def extract_multidegree(f: FunctionOracle, grid_len: int = 2) -> LengthProfile:
    """Read ``k_i`` off single-letter arguments and check the length law.

    The law ``|f(u)| = |f(empty)| + sum k_i |u_i|`` is checked on every tuple
    of objects up to ``grid_len`` (length for words, size for trees), along
    with the fact that output length and output count of the first letter
    depend only on the corresponding argument measures.
    """
    _require_alphabet(f)
    n = f.arity
    e = empty(f.mode)
    sigma = atom(f.alphabet.a, f.mode)
    base = length(f(*[e] * n))
    degs = []
    for i in range(n):
        args = [e] * n
        args[i] = sigma
        k = length(f(*args)) - base
        if k < 0:
            raise NegativeDegree(f"output shrinks when argument {i + 1} grows", tuple(args))
        degs.append(k)
    prof = LengthProfile(base, tuple(degs))
    a = f.alphabet.a
    universe = list(objects_up_to(f.mode, f.alphabet, grid_len))
    for tup in itertools.product(universe, repeat=n):
        out = f(*tup)
        lens = tuple(length(u) for u in tup)
        counts = tuple(letter_count(u, a) for u in tup)
        got = length(out)
        if prof.samples.setdefault(lens, got) != got:
            raise AffineLawViolation(
                f"two argument tuples with lengths {lens} give different output lengths", tup)
        got_a = letter_count(out, a)
        if prof.letter_samples.setdefault(counts, got_a) != got_a:
            raise AffineLawViolation(
                f"output count of {a!r} is not a function of argument counts {counts}", tup)
        if got != prof.predicted_length(lens):
            raise AffineLawViolation(
                f"|f| = {got}, length law predicts {prof.predicted_length(lens)}", tup)
    return prof


# -- refutation --------------------------------------------------------------


@dataclass
class Witness:
    """Componentwise congruent arguments whose images are not congruent."""

    congruence: Congruence
    args: tuple
    other_args: tuple
    images: tuple
    certified: bool

    def describe(self) -> str:
        fmt = lambda tup: "(" + ", ".join(format_object(u) for u in tup) + ")"
        return (f"{self.congruence}: {fmt(self.args)} ~ {fmt(self.other_args)} but "
                f"f gives {format_object(self.images[0])} vs {format_object(self.images[1])}")


def refute_cp(f: FunctionOracle, families: Sequence[Congruence], budget: int = 10_000,
              bound: int = 3) -> Witness | None:
    """Search for a CP violation on argument tuples up to ``bound``.

    The generators of principal families are added to the search universe.

    None means the budget ran out without a witness; that is not a proof.
    Candidate witnesses are re-checked with ``related`` before reporting.
    """
    usable = []
    probe = empty(f.mode)
    for fam in families:
        try:
            fam.key(probe)
        except TypeError as exc:
            log.warning("skipping %s: %s", fam, exc)
            continue
        usable.append(fam)
    universe = list(objects_up_to(f.mode, f.alphabet, bound))
    known = set(universe)
    for fam in usable:
        for t in fam.seeds():
            if t not in known:
                known.add(t)
                universe.append(t)
    seen: list[dict] = [{} for _ in usable]
    start = f.queries
    for tup in itertools.product(universe, repeat=f.arity):
        if f.queries - start >= budget:
            return None
        image = f(*tup)
        for fam, groups in zip(usable, seen):
            keys = tuple(fam.key(u) for u in tup)
            if any(k is None for k in keys):
                continue
            img_key = fam.key(image)
            if img_key is None:
                continue
            prev = groups.setdefault(keys, (tup, image, img_key))
            if prev[2] == img_key:
                continue
            other, other_image, _ = prev
            args_ok = all(fam.related(x, y) for x, y in zip(other, tup))
            if args_ok and fam.related(other_image, image) is False:
                return Witness(fam, other, tup, (other_image, image), fam.certified)
    return None


# -- synthesis ---------------------------------------------------------------


def choose_tau(f: FunctionOracle, degree: int, min_len: int = 0) -> Obj:
    """Shortest CT member with ``|tau| > |f(a,..,a)|`` and ``|tau| >= 2k + 4``."""
    a = atom(f.alphabet.a, f.mode)
    fa = length(f(*[a] * f.arity))
    tau = smallest_ct(max(fa + 1, 2 * degree + 4, min_len), f.mode, f.alphabet)
    if not (length(tau) > fa and length(tau) >= 2 * degree + 4 and in_ct(tau, f.alphabet)):
        raise AssertionError(f"bad tau {format_object(tau)} for |f(a..a)|={fa}, k={degree}")
    return tau


def _grid(f: FunctionOracle, bound: int):
    universe = list(objects_up_to(f.mode, f.alphabet, bound))
    return itertools.product(universe, repeat=f.arity)


def _first_disagreement(f: FunctionOracle, p: Polynomial, bound: int):
    for tup in _grid(f, bound):
        if p(*tup) != f(*tup):
            return tup
    return None


def _synth(f: FunctionOracle, verify_len: int, min_tau: int = 0) -> tuple[Polynomial, Obj | None]:
    if f.arity == 0:
        return Polynomial(f(), 0), None
    prof = extract_multidegree(f)
    tau = choose_tau(f, prof.degree, min_tau)
    n = f.arity
    try:
        q, _ = _synth(f.section(tau), verify_len)
    except NotCongruencePreserving as exc:
        if exc.witness is not None:
            exc.witness = tuple(exc.witness) + (tau,)
        raise
    p = polynomial_reduce(q, tau, n)
    if p.multidegree != prof.multidegree:
        raise SynthesisFailure(
            f"reduced polynomial {p} has multidegree {p.multidegree}, "
            f"f has {prof.multidegree}",
            _first_disagreement(f, p, verify_len), p)
    return p, tau


def synthesize(f: FunctionOracle, verify_len: int | None = None) -> Polynomial:
    """The polynomial computing ``f``, checked on all tuples up to ``verify_len``.

    ``verify_len`` bounds word length, or tree size in tree mode (defaults
    4 and 3).  Raises :class:`NotCongruencePreserving` subclasses on failure.
    """
    _require_alphabet(f)
    if verify_len is None:
        verify_len = 4 if f.mode is Mode.WORD else 3
    p, tau = _synth(f, verify_len)
    if tau is None:
        return p
    grid = [(tup, f(*tup)) for tup in _grid(f, verify_len)]
    need = max(verify_len, max(length(img) for _, img in grid))
    if need >= length(tau):
        p2, _ = _synth(f, verify_len, min_tau=need + 1)
        if p2 != p:
            raise SynthesisFailure(
                f"longer tau gives {p2}, shorter gives {p}",
                _first_disagreement(f, p, verify_len), p)
    for tup, img in grid:
        if p(*tup) != img:
            raise SynthesisFailure(f"candidate {p} disagrees with f", tup, p)
    return p


def polynomials_equal_on_letters(p: Polynomial, q: Polynomial, alphabet: Alphabet) -> bool:
    """Compare ``p`` and ``q`` on every tuple of length-1 objects.

    Agreement there forces ``p == q``; a counterexample to that raises
    AssertionError.
    """
    if p.arity != q.arity or p.multidegree != q.multidegree:
        raise MultidegreeMismatch(f"{p.multidegree} vs {q.multidegree}")
    ones = length_one_objects(p.mode, alphabet)
    agree = all(p(*t) == q(*t) for t in itertools.product(ones, repeat=p.arity))
    if agree and p != q:
        raise AssertionError(f"{p} and {q} agree on length-1 inputs but differ")
    return agree


# -- builtin oracles ---------------------------------------------------------


def mirror_tree(t: Tree) -> Tree:
    if not t.is_node:
        return t
    return _node(mirror_tree(t.right), mirror_tree(t.left))


def sort_letters(w: str, alphabet: Alphabet) -> str:
    return "".join(s * w.count(s) for s in alphabet)


def builtin_oracle(name: str, mode: Mode, alphabet: Alphabet, constant: Obj | None = None) -> FunctionOracle:
    """``reverse`` and ``sort-letters`` (words), ``mirror`` (trees), ``constant``."""
    if name == "reverse":
        if mode is not Mode.WORD:
            raise ValueError("reverse is a word function")
        return FunctionOracle(1, mode, alphabet, lambda w: w[::-1], name="reverse")
    if name == "sort-letters":
        if mode is not Mode.WORD:
            raise ValueError("sort-letters is a word function")
        return FunctionOracle(1, mode, alphabet, lambda w: sort_letters(w, alphabet),
                              name="sort-letters")
    if name == "mirror":
        if mode is not Mode.TREE:
            raise ValueError("mirror is a tree function")
        return FunctionOracle(1, mode, alphabet, mirror_tree, name="mirror")
    if name == "constant":
        value = empty(mode) if constant is None else constant
        return FunctionOracle(0, mode, alphabet, lambda: value,
                              name=f"constant {format_object(value)}")
    raise ValueError(f"unknown builtin {name!r}")


BUILTINS = ("reverse", "sort-letters", "mirror", "constant")
