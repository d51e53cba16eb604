"""Objects of the word and tree algebras, the star operation, polynomials.

Words are plain ``str`` values (``""`` is the neutral element).  Trees are
:class:`Tree` values; ``EMPTY`` is the empty tree.  Polynomials are objects
over an extended alphabet: every variable ``x_i`` is a reserved private-use
character, so rewriting code runs on polynomials without modification.

Text format::

    word  ::= '_' | (letter | 'x' digits)+
    T     ::= '_' | letter | 'x' digits | 'y' | '(' T '.' T ')'
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

_VAR_BASE = 0xE000
_MAX_VARS = 0x1000

RESERVED = set("_().xy0123456789 \t\n")


class AffinaError(Exception):
    """Base class for library errors."""


class ModeError(AffinaError, TypeError):
    """Raised when word and tree objects are mixed."""


class UnknownLetter(AffinaError, ValueError):
    pass


class ArityError(AffinaError, ValueError):
    pass


class ParseError(AffinaError, ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        super().__init__(f"{msg} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


class Mode(enum.Enum):
    WORD = "word"
    TREE = "tree"


def var(i: int) -> str:
    """Reserved symbol of variable ``x_i`` (``var(0)`` is the context hole)."""
    if not 0 <= i < _MAX_VARS:
        raise ValueError(f"variable index out of range: {i}")
    return chr(_VAR_BASE + i)


HOLE = var(0)


def var_index(sym: str) -> int | None:
    o = ord(sym)
    if _VAR_BASE <= o < _VAR_BASE + _MAX_VARS:
        return o - _VAR_BASE
    return None


def is_var(sym: str) -> bool:
    return var_index(sym) is not None


@dataclass(frozen=True)
class Alphabet:
    """Ordered letters; the first two are the designated ``a`` and ``b``."""

    letters: str

    def __post_init__(self):
        if not self.letters:
            raise ValueError("alphabet must be nonempty")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError(f"duplicate letters in {self.letters!r}")
        if len(self.letters) > 26:
            raise ValueError("at most 26 letters are supported")
        for ch in self.letters:
            if ch in RESERVED or is_var(ch) or not ch.isprintable():
                raise ValueError(f"letter {ch!r} is reserved")

    @property
    def a(self) -> str:
        return self.letters[0]

    @property
    def b(self) -> str:
        if len(self.letters) < 2:
            raise ValueError("alphabet has a single letter")
        return self.letters[1]

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, ch):
        return ch in self.letters


class Tree:
    """Immutable leaf-labelled binary tree with cached length, size and hash.

    Build trees with :func:`leaf` and :func:`star`; ``Tree`` is never
    instantiated directly outside this module.
    """

    __slots__ = ("left", "right", "label", "length", "size", "_hash")

    def __init__(self, left, right, label, length, size, h):
        self.left = left
        self.right = right
        self.label = label
        self.length = length
        self.size = size
        self._hash = h

    @property
    def is_empty(self) -> bool:
        return self.size == 0

    @property
    def is_leaf(self) -> bool:
        return self.label is not None

    @property
    def is_node(self) -> bool:
        return self.left is not None

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Tree):
            return NotImplemented
        if self._hash != other._hash or self.size != other.size or self.length != other.length:
            return False
        if self.label is not None or other.label is not None:
            return self.label == other.label
        if self.left is None or other.left is None:
            return self.left is other.left
        return self.left == other.left and self.right == other.right

    def __repr__(self):
        return f"Tree({format_object(self)!r})"


EMPTY = Tree(None, None, None, 0, 0, hash(("tree", "empty")))

Obj = Union[str, Tree]


def leaf(sym: str) -> Tree:
    if len(sym) != 1:
        raise ValueError(f"leaf label must be one symbol, got {sym!r}")
    return Tree(None, None, sym, 1, 1, hash(("tree", sym)))


def _node(left: Tree, right: Tree) -> Tree:
    if left.size == 0 and right.size == 0:
        return EMPTY
    return Tree(left, right, None, left.length + right.length,
                1 + left.size + right.size, hash((left._hash, right._hash)))


def mode_of(u: Obj) -> Mode:
    if isinstance(u, str):
        return Mode.WORD
    if isinstance(u, Tree):
        return Mode.TREE
    raise ModeError(f"not an object: {u!r}")


def same_mode(*objs: Obj) -> Mode:
    modes = {mode_of(u) for u in objs}
    if len(modes) != 1:
        raise ModeError("cannot mix words and trees")
    return modes.pop()


def empty(mode: Mode) -> Obj:
    return "" if mode is Mode.WORD else EMPTY


def atom(sym: str, mode: Mode) -> Obj:
    return sym if mode is Mode.WORD else leaf(sym)


def star(u: Obj, v: Obj) -> Obj:
    """Concatenation of words, or the tree with children ``u`` and ``v``.

    ``star(EMPTY, EMPTY)`` is ``EMPTY``: the pair of empty trees is never a
    decomposition, so the empty tree is its own product.
    """
    if same_mode(u, v) is Mode.WORD:
        return u + v
    return _node(u, v)


def decompose(t: Tree) -> tuple[Tree, Tree]:
    """The unique pair ``(t1, t2)`` with ``star(t1, t2) == t``."""
    if not isinstance(t, Tree) or not t.is_node:
        raise ValueError("only non-atomic nonempty trees decompose")
    return t.left, t.right


def symbols(u: Obj) -> Iterator[str]:
    """Leaf labels (letters and variables) from left to right."""
    if isinstance(u, str):
        yield from u
        return
    stack = [u]
    while stack:
        t = stack.pop()
        if t.label is not None:
            yield t.label
        elif t.left is not None:
            stack.append(t.right)
            stack.append(t.left)


def length(u: Obj) -> int:
    if isinstance(u, str):
        return len(u)
    if isinstance(u, Tree):
        return u.length
    raise ModeError(f"not an object: {u!r}")


def letter_count(u: Obj, sym: str, alphabet: Alphabet | None = None) -> int:
    if alphabet is not None and sym not in alphabet and not is_var(sym):
        raise UnknownLetter(sym)
    if isinstance(u, str):
        return u.count(sym)
    return sum(1 for s in symbols(u) if s == sym)


def size(u: Obj) -> int:
    """Symbol count: tree mode counts letters, variables and nodes."""
    if isinstance(u, str):
        return len(u)
    return u.size


def leaf_side_count(u: Tree, side: str) -> int:
    """Number of left (``side="left"``) or right leaves of ``u``.

    A leaf contributes to the side it hangs on in its parent, so an atom on
    its own counts 0 on both sides.
    """
    if not isinstance(u, Tree):
        raise ModeError("leaf_side_count is defined for trees only")
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return _side_counts(u)[0 if side == "left" else 1]


def _side_counts(u: Tree) -> tuple[int, int]:
    if not u.is_node:
        return 0, 0
    lt, rt = u.left, u.right
    l1, l2 = _side_counts(lt)
    r1, r2 = _side_counts(rt)
    left = r1 + (1 if lt.is_leaf else l1)
    right = l2 + (1 if rt.is_leaf else r2)
    return left, right


# -- polynomials -------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """An object over letters plus variables ``x_1..x_arity``."""

    body: Obj
    arity: int
    multidegree: tuple[int, ...] = field(init=False, compare=False)

    def __post_init__(self):
        degs = [0] * self.arity
        for s in symbols(self.body):
            i = var_index(s)
            if i is None:
                continue
            if not 1 <= i <= self.arity:
                raise ArityError(f"variable x{i} outside arity {self.arity}")
            degs[i - 1] += 1
        object.__setattr__(self, "multidegree", tuple(degs))

    @property
    def mode(self) -> Mode:
        return mode_of(self.body)

    @property
    def degree(self) -> int:
        return sum(self.multidegree)

    @property
    def size(self) -> int:
        return size(self.body)

    def __call__(self, *args: Obj) -> Obj:
        return evaluate(self, args)

    def __str__(self):
        return format_object(self.body)


@dataclass(frozen=True)
class ContextPolynomial:
    """A one-hole context: ``body`` holds exactly one ``HOLE``."""

    body: Obj

    def __post_init__(self):
        n = sum(1 for s in symbols(self.body) if s == HOLE)
        if n != 1:
            raise ValueError(f"context must contain exactly one hole, found {n}")

    def __call__(self, u: Obj) -> Obj:
        return substitute(self.body, {HOLE: u})

    def __str__(self):
        return format_object(self.body)


def substitute(body: Obj, mapping: dict[str, Obj]) -> Obj:
    """Simultaneously replace symbols by objects of the same mode."""
    if isinstance(body, str):
        for val in mapping.values():
            if not isinstance(val, str):
                raise ModeError("cannot substitute trees into a word")
        return body.translate({ord(k): v for k, v in mapping.items()})
    for val in mapping.values():
        if not isinstance(val, Tree):
            raise ModeError("cannot substitute words into a tree")
    return _subst_tree(body, mapping)


def _subst_tree(t: Tree, mapping):
    if t.label is not None:
        return mapping.get(t.label, t)
    if t.left is None:
        return t
    return _node(_subst_tree(t.left, mapping), _subst_tree(t.right, mapping))


def evaluate(p: Polynomial, args: Sequence[Obj]) -> Obj:
    if len(args) < p.arity:
        raise ArityError(f"polynomial of arity {p.arity} given {len(args)} arguments")
    body = p.body
    if isinstance(body, str):
        try:
            return body.translate(dict(zip(range(_VAR_BASE + 1, _VAR_BASE + 1 + p.arity), args)))
        except TypeError:
            raise ModeError("cannot substitute trees into a word") from None
    return substitute(body, {var(i + 1): a for i, a in enumerate(args[:p.arity])})


def length_law_check(p: Polynomial, args: Sequence[Obj]) -> bool:
    """``|P(u)| == |P(empty,...)| + sum k_i |u_i|`` for the given arguments."""
    e = empty(p.mode)
    base = length(evaluate(p, [e] * p.arity))
    expected = base + sum(k * length(u) for k, u in zip(p.multidegree, args))
    return length(evaluate(p, args)) == expected


def find_occurrence(t: Obj, u: Obj) -> ContextPolynomial | None:
    """Leftmost context ``C`` with ``C(u) == t``, or None."""
    if same_mode(t, u) is Mode.WORD:
        i = t.find(u)
        if i < 0:
            return None
        return ContextPolynomial(t[:i] + HOLE + t[i + len(u):])
    body = _hole_tree(t, u)
    return None if body is None else ContextPolynomial(body)


def _hole_tree(t: Tree, u: Tree):
    if t == u:
        return leaf(HOLE)
    if not t.is_node or t.size < u.size:
        return None
    sub = _hole_tree(t.left, u)
    if sub is not None:
        return _node(sub, t.right)
    sub = _hole_tree(t.right, u)
    if sub is not None:
        return _node(t.left, sub)
    return None


def occurrences(t: Obj, u: Obj) -> list[ContextPolynomial]:
    """Every context ``C`` with ``C(u) == t``, leftmost first."""
    if same_mode(t, u) is Mode.WORD:
        out = []
        i = t.find(u)
        while i >= 0:
            out.append(ContextPolynomial(t[:i] + HOLE + t[i + len(u):]))
            i = t.find(u, i + 1)
        return out
    return [ContextPolynomial(b) for b in _all_holes(t, u)]


def _all_holes(t: Tree, u: Tree):
    if t == u:
        yield leaf(HOLE)
    if t.is_node and t.size > u.size:
        for sub in _all_holes(t.left, u):
            yield _node(sub, t.right)
        for sub in _all_holes(t.right, u):
            yield _node(t.left, sub)


def subobjects(t: Obj) -> set[Obj]:
    """All factors of a word, or all subtrees of a tree (including ``t``)."""
    if isinstance(t, str):
        return {t[i:j] for i in range(len(t) + 1) for j in range(i, len(t) + 1)}
    out = set()
    stack = [t]
    while stack:
        s = stack.pop()
        out.add(s)
        if s.is_node:
            stack.extend((s.left, s.right))
    return out


# -- enumeration -------------------------------------------------------------


def words_up_to(alphabet: Iterable[str], max_len: int) -> Iterator[str]:
    """Words in length-then-lexicographic order."""
    letters = list(alphabet)
    for n in range(max_len + 1):
        for tup in itertools.product(letters, repeat=n):
            yield "".join(tup)


def trees_of_size(alphabet: Iterable[str], n: int, _cache=None) -> list[Tree]:
    """All trees ``t`` with ``size(t) == n``, in a fixed order."""
    letters = tuple(alphabet)
    cache = {} if _cache is None else _cache
    return _trees_sized(letters, n, cache)


def _trees_sized(letters, n, cache):
    key = (letters, n)
    if key in cache:
        return cache[key]
    if n == 0:
        out = [EMPTY]
    elif n == 1:
        out = [leaf(s) for s in letters]
    else:
        out = []
        for ls in range(n):
            rs = n - 1 - ls
            for lt in _trees_sized(letters, ls, cache):
                for rt in _trees_sized(letters, rs, cache):
                    out.append(_node(lt, rt))
    cache[key] = out
    return out


def trees_up_to(alphabet: Iterable[str], max_size: int) -> Iterator[Tree]:
    cache: dict = {}
    for n in range(max_size + 1):
        yield from trees_of_size(alphabet, n, cache)


def objects_up_to(mode: Mode, alphabet: Iterable[str], bound: int) -> Iterator[Obj]:
    """Bounded universe: words by length, trees by size.

    Trees cannot be bounded by length alone (``a``, ``(a._)``, ``((a._)._)``
    all have length 1), so the tree universe is cut by symbol count.
    """
    if mode is Mode.WORD:
        return words_up_to(alphabet, bound)
    return trees_up_to(alphabet, bound)


def length_one_objects(mode: Mode, alphabet: Alphabet) -> list[Obj]:
    """Letters, plus ``(a._)`` and ``(_.a)`` in tree mode."""
    if mode is Mode.WORD:
        return list(alphabet)
    a = leaf(alphabet.a)
    return [leaf(s) for s in alphabet] + [_node(a, EMPTY), _node(EMPTY, a)]


# -- text format -------------------------------------------------------------


def _format_sym(s: str) -> str:
    i = var_index(s)
    if i is None:
        return s
    return "y" if i == 0 else f"x{i}"


def format_object(u: Obj) -> str:
    if isinstance(u, str):
        return "".join(map(_format_sym, u)) if u else "_"
    parts: list[str] = []
    stack: list = [u]
    while stack:
        t = stack.pop()
        if isinstance(t, str):
            parts.append(t)
        elif t.label is not None:
            parts.append(_format_sym(t.label))
        elif t.left is None:
            parts.append("_")
        else:
            stack.extend((")", t.right, ".", t.left))
            parts.append("(")
    return "".join(parts)


def sort_key(u: Obj) -> tuple[int, str]:
    return (length(u), format_object(u))


class _Reader:
    def __init__(self, text: str, alphabet: Alphabet | None, allow_vars: bool, allow_hole: bool):
        self.text = text
        self.pos = 0
        self.alphabet = alphabet
        self.allow_vars = allow_vars
        self.allow_hole = allow_hole

    def error(self, msg):
        raise ParseError(self.text, self.pos, msg)

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def symbol(self) -> str:
        ch = self.peek()
        if ch == "x":
            start = self.pos
            self.pos += 1
            while self.peek().isdigit():
                self.pos += 1
            digits = self.text[start + 1:self.pos]
            if not digits or int(digits) == 0:
                self.pos = start
                self.error("variable needs a positive index")
            if not self.allow_vars:
                self.pos = start
                self.error("variables are not allowed here")
            return var(int(digits))
        if ch == "y":
            if not self.allow_hole:
                self.error("hole 'y' is not allowed here")
            self.pos += 1
            return HOLE
        if not ch:
            self.error("unexpected end of input")
        if ch in RESERVED:
            self.error(f"unexpected {ch!r}")
        if self.alphabet is not None and ch not in self.alphabet:
            self.error(f"letter {ch!r} not in alphabet {self.alphabet.letters!r}")
        self.pos += 1
        return ch

    def tree(self) -> Tree:
        ch = self.peek()
        if ch == "_":
            self.pos += 1
            return EMPTY
        if ch == "(":
            self.pos += 1
            lt = self.tree()
            if self.peek() != ".":
                self.error("expected '.'")
            self.pos += 1
            rt = self.tree()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return _node(lt, rt)
        return leaf(self.symbol())


def parse_word(text: str, alphabet: Alphabet | None = None, *,
               allow_vars: bool = True, allow_hole: bool = False) -> str:
    if text == "_":
        return ""
    r = _Reader(text, alphabet, allow_vars, allow_hole)
    out = []
    while r.pos < len(text):
        out.append(r.symbol())
    if not out:
        r.error("empty word must be written '_'")
    return "".join(out)


def parse_tree(text: str, alphabet: Alphabet | None = None, *,
               allow_vars: bool = True, allow_hole: bool = False) -> Tree:
    r = _Reader(text, alphabet, allow_vars, allow_hole)
    t = r.tree()
    if r.pos != len(text):
        r.error("trailing input")
    return t


def parse_object(text: str, mode: Mode, alphabet: Alphabet | None = None, **kw) -> Obj:
    if mode is Mode.WORD:
        return parse_word(text, alphabet, **kw)
    return parse_tree(text, alphabet, **kw)


def parse_polynomial(text: str, mode: Mode, alphabet: Alphabet | None = None,
                     arity: int | None = None) -> Polynomial:
    body = parse_object(text, mode, alphabet)
    used = max((var_index(s) for s in symbols(body) if is_var(s)), default=0)
    return Polynomial(body, used if arity is None else arity)


def parse_context(text: str, mode: Mode, alphabet: Alphabet | None = None) -> ContextPolynomial:
    return ContextPolynomial(parse_object(text, mode, alphabet, allow_vars=False, allow_hole=True))


def obj(text: str, mode: Mode = Mode.WORD) -> Obj:
    """Shorthand parser used throughout tests and demos."""
    return parse_object(text, mode)


def tree(text: str) -> Tree:
    return parse_tree(text)
