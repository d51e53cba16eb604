"""Command line interface.

Every command prints its main result on the first line, then ``key: value``
detail lines.  ``--json`` prints the same fields as one JSON object.
Exit status: 0 success/true, 1 false/refuted/failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import numeric
from .algebra_core import (
    AffinaError,
    Alphabet,
    Mode,
    Polynomial,
    find_occurrence,
    format_object,
    leaf,
    length,
    parse_object,
    parse_polynomial,
    subobjects,
    sort_key,
    tree,
    var,
)
from .cp_analysis import (
    FunctionOracle,
    NotCongruencePreserving,
    builtin_oracle,
    extract_multidegree,
    refute_cp,
    synthesize,
)
from .rewriting import (
    FirstLetter,
    LeafSideCount,
    LengthMod,
    LetterCount,
    NonTerminating,
    NotInCT,
    NotReducible,
    Principal,
    ReductionSpec,
    TotalLength,
    closure_oracle,
    equivalent,
    in_ct,
    is_strongly_irreducible,
    polynomial_reduce,
    reduce_once,
    reduction_trace,
    strong_irreducibility_failure,
)


class UsageError(Exception):
    pass


class Report:
    def __init__(self, command: str, result, code: int = 0):
        self.command = command
        self.result = result
        self.code = code
        self.fields: dict = {}
        self.lines: list[str] = []

    def add(self, key, value):
        self.fields[key] = value
        return self

    def render(self, as_json: bool) -> str:
        if as_json:
            payload = {"command": self.command, "result": self.result, "exit": self.code}
            payload.update(self.fields)
            if self.lines:
                payload["lines"] = self.lines
            return json.dumps(payload, sort_keys=True)
        out = [str(self.result)]
        out += self.lines
        for k, v in self.fields.items():
            if isinstance(v, list):
                v = " ".join(map(str, v))
            out.append(f"{k}: {v}")
        return "\n".join(out)


def _fmt(u) -> str:
    return format_object(u)


def _fmt_tuple(tup) -> str:
    return "(" + ", ".join(_fmt(u) for u in tup) + ")"


class Context:
    def __init__(self, args):
        self.mode = Mode.TREE if args.tree else Mode.WORD
        letters = args.sigma or ("abcd" if self.mode is Mode.TREE else "ab")
        try:
            self.alphabet = Alphabet(letters)
        except ValueError as exc:
            raise UsageError(str(exc))

    def obj(self, text: str, **kw):
        return parse_object(text, self.mode, self.alphabet, allow_vars=False, **kw)

    def poly(self, text: str) -> Polynomial:
        return parse_polynomial(text, self.mode, self.alphabet)

    def spec(self, args) -> ReductionSpec:
        if args.tau is None or args.v is None:
            raise UsageError("--tau and --v are required")
        return ReductionSpec(self.obj(args.tau), self.obj(args.v))

    def oracle(self, args) -> FunctionOracle:
        if args.poly is not None:
            return FunctionOracle.from_polynomial(self.poly(args.poly), self.alphabet)
        if args.builtin is None:
            raise UsageError("give --poly or --builtin")
        const = self.obj(args.const) if getattr(args, "const", None) else None
        try:
            return builtin_oracle(args.builtin, self.mode, self.alphabet, const)
        except ValueError as exc:
            raise UsageError(str(exc))

    def family(self, text: str):
        name, _, rest = text.partition(":")
        if name == "length":
            return TotalLength()
        if name == "first-letter":
            return FirstLetter()
        if name == "letter":
            return LetterCount(rest)
        if name == "side":
            return LeafSideCount(rest)
        if name == "length-mod":
            return LengthMod(int(rest))
        if name == "principal":
            u, _, v = rest.partition(",")
            return Principal(self.obj(u), self.obj(v), self.alphabet)
        raise UsageError(f"unknown congruence family {text!r}")


# -- commands ----------------------------------------------------------------


def cmd_reduce(ctx, args):
    spec = ctx.spec(args)
    t = ctx.obj(args.term)
    try:
        r = reduce_once(t, spec)
    except NotReducible:
        return Report("reduce", "irreducible", 1).add("operation", "leftmost reduction")
    return (Report("reduce", _fmt(r)).add("operation", "leftmost reduction")
            .add("tau", _fmt(spec.tau)).add("v", _fmt(spec.v)))


def cmd_canon(ctx, args):
    spec = ctx.spec(args)
    trace = reduction_trace(ctx.obj(args.term), spec)
    rep = Report("canon", _fmt(trace[-1]))
    rep.add("operation", "iterated leftmost reduction (canonical representative)")
    rep.add("tau", _fmt(spec.tau)).add("v", _fmt(spec.v))
    rep.add("in_ct", in_ct(spec.tau, ctx.alphabet))
    rep.add("steps", [_fmt(t) for t in trace])
    return rep


def cmd_equiv(ctx, args):
    spec = ctx.spec(args)
    t1, t2 = ctx.obj(args.left), ctx.obj(args.right)
    if args.oracle:
        part = closure_oracle(spec.tau, spec.v, args.bound, ctx.alphabet)
        if part.class_id(t1) is None or part.class_id(t2) is None:
            raise UsageError(f"terms exceed the closure bound {args.bound}")
        same = part.same(t1, t2)
        method = f"bounded congruence closure (bound {args.bound})"
    else:
        same = equivalent(t1, t2, spec, ctx.alphabet)
        method = "canonical representative equality"
    rep = Report("equiv", "equivalent" if same else "not equivalent", 0 if same else 1)
    return rep.add("operation", method).add("tau", _fmt(spec.tau)).add("v", _fmt(spec.v))


def cmd_ct(ctx, args):
    tau = ctx.obj(args.term)
    ok = in_ct(tau, ctx.alphabet)
    rule = "length >= 2" if ctx.mode is Mode.TREE else "a^n b a b^n with n > 1"
    return Report("ct", "in CT" if ok else "not in CT", 0 if ok else 1).add("rule", rule)


def cmd_strong(ctx, args):
    tau, w = ctx.obj(args.tau), ctx.obj(args.term)
    why = strong_irreducibility_failure(w, tau)
    if why is None:
        return Report("strong", "strongly irreducible").add("tau", _fmt(tau))
    rep = Report("strong", "not strongly irreducible", 1).add("tau", _fmt(tau))
    return rep.add("reason", why[0]).add("overlap", _fmt(why[1]))


def cmd_occurs(ctx, args):
    t, u = ctx.obj(args.term), ctx.obj(args.sub)
    c = find_occurrence(t, u)
    if c is None:
        return Report("occurs", "absent", 1)
    return Report("occurs", str(c)).add("operation", "leftmost occurrence context")


def cmd_eval(ctx, args):
    p = ctx.poly(args.poly)
    vals = [ctx.obj(a) for a in args.args]
    if len(vals) < p.arity:
        raise UsageError(f"polynomial needs {p.arity} arguments")
    out = p(*vals)
    return (Report("eval", _fmt(out)).add("multidegree", list(p.multidegree))
            .add("length", length(out)))


def cmd_mdeg(ctx, args):
    f = ctx.oracle(args)
    try:
        prof = extract_multidegree(f, args.grid)
    except NotCongruencePreserving as exc:
        rep = Report("mdeg", "not congruence preserving", 1).add("reason", str(exc))
        return rep.add("witness", _fmt_tuple(exc.witness) if exc.witness else "none")
    rep = Report("mdeg", " ".join(map(str, prof.multidegree)) or "()")
    return (rep.add("base", prof.base).add("multidegree", list(prof.multidegree))
            .add("checked_tuples", len(prof.samples)))


def cmd_synth(ctx, args):
    f = ctx.oracle(args)
    try:
        p = synthesize(f, args.verify_len)
    except NotCongruencePreserving as exc:
        rep = Report("synth", "failure", 1).add("reason", str(exc))
        return rep.add("witness", _fmt_tuple(exc.witness) if exc.witness is not None else "none")
    return (Report("synth", str(p)).add("arity", p.arity)
            .add("multidegree", list(p.multidegree)).add("queries", f.queries))


def cmd_refute(ctx, args):
    f = ctx.oracle(args)
    fams = [ctx.family(x) for x in (args.family or ["length"])]
    w = refute_cp(f, fams, args.budget, args.bound)
    if w is None:
        return Report("refute", "no witness (inconclusive)").add("queries", f.queries)
    rep = Report("refute", "refuted", 1).add("congruence", str(w.congruence))
    rep.add("args", _fmt_tuple(w.args)).add("other_args", _fmt_tuple(w.other_args))
    rep.add("images", [_fmt(i) for i in w.images]).add("certified", w.certified)
    return rep


def cmd_closure(ctx, args):
    u, v = ctx.obj(args.left), ctx.obj(args.right)
    part = closure_oracle(u, v, args.bound, ctx.alphabet)
    rep = Report("closure", f"{len(part)} classes")
    rep.lines = part.lines()
    return rep.add("bound", args.bound)


# -- demos -------------------------------------------------------------------


def demo_polynomial_reduction():
    tau = tree("(c.d)")
    q = Polynomial(tree("((b.x1).(c.d))"), 1)
    p = polynomial_reduce(q, tau, 2)
    rep = Report("demo", str(p))
    rep.add("tau", _fmt(tau)).add("q_tau", str(q)).add("p_tau", str(p))
    return rep.add("p_tau(_,(c.d))", _fmt(p(tree("_"), tau)))


def demo_leftmost_reduction():
    spec = ReductionSpec(tree("(c.d)"), tree("a"))
    steps = reduction_trace(tree("(((c.d)._).(c.d))"), spec)
    rep = Report("demo", _fmt(steps[-1]))
    return rep.add("tau", "(c.d)").add("v", "a").add("steps", [_fmt(t) for t in steps])


def demo_remark_nonunique():
    part = closure_oracle("aa", "b", 3)
    cls = part.class_of("aaa")
    shortest = [t for t in cls if length(t) == length(cls[0])]
    rep = Report("demo", " ".join(shortest))
    return rep.add("pair", "aa,b").add("class_of_aaa", list(cls)).add("minimal", shortest)


def demo_overlap_failure():
    spec = ReductionSpec("aba", "")
    part = closure_oracle("aba", "", 2)
    rep = Report("demo", "Red*(ababa) = " + _fmt(reduction_trace("ababa", spec)[-1])
                 + ", Red*(ab) = " + _fmt(reduction_trace("ab", spec)[-1]))
    rep.add("tau", "aba").add("in_ct", in_ct("aba"))
    return rep.add("closure_class_of_ab", [_fmt(t) for t in part.class_of("ab")])


def demo_strong_irreducibility():
    tau = "aabb"
    p = Polynomial("aa" + var(1) + "bb", 1)
    rep = Report("demo", "none strongly irreducible")
    rep.add("tau", tau).add("polynomial", str(p))
    for theta in "ab":
        img = p(theta)
        for w in sorted((w for w in subobjects(img) if len(w) >= 4), key=sort_key):
            why = strong_irreducibility_failure(w, tau)
            rep.lines.append(f"P({theta}) factor {w}: "
                             + ("strongly irreducible" if why is None else f"{why[0]} {_fmt(why[1])}"))
    return rep


def demo_sort_letters():
    from .algebra_core import Alphabet as _A
    f = builtin_oracle("sort-letters", Mode.WORD, _A("ab"))
    w = refute_cp(f, [FirstLetter()])
    rep = Report("demo", "refuted" if w else "no witness")
    if w:
        rep.add("args", _fmt_tuple(w.args)).add("other_args", _fmt_tuple(w.other_args))
        rep.add("images", [_fmt(i) for i in w.images])
    return rep


def demo_euler_factorial():
    n = 10
    rep = Report("demo", "congruence preserving proxy holds, not affine")
    rep.lines.append("x f(x) d1 d2")
    for row in numeric.nat_table(n):
        rep.lines.append(" ".join("-" if c is None else str(c) for c in row))
    viol = numeric.check_divisibility_cp(n)
    rep.add("divisibility", "no violation" if viol is None else f"violated at {viol}")
    return rep.add("not_affine", numeric.check_not_affine(n))


def demo_free_commutative():
    target = numeric.AffineMap((1, 0), (2, 1))
    g = numeric.synthesize_affine(target, 2, 2)
    rep = Report("demo", f"c={g.constant} k={g.coefficients}")
    try:
        numeric.synthesize_affine(lambda x: tuple(sorted(x)), 2, 1)
        rep.add("sort", "unexpectedly affine")
    except numeric.AffineSynthesisFailure as exc:
        rep.add("sort", f"failure at {exc.witness}")
    return rep


DEMOS = {
    "polynomial-reduction": demo_polynomial_reduction,
    "leftmost-reduction": demo_leftmost_reduction,
    "remark-nonunique": demo_remark_nonunique,
    "overlap-failure": demo_overlap_failure,
    "strong-irreducibility": demo_strong_irreducibility,
    "sort-letters": demo_sort_letters,
    "euler-factorial": demo_euler_factorial,
    "free-commutative": demo_free_commutative,
}


def cmd_demo(ctx, args):
    return DEMOS[args.name]()


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_mutually_exclusive_group()
    g.add_argument("--word", action="store_true", help="word algebra (default)")
    g.add_argument("--tree", action="store_true", help="binary tree algebra")
    common.add_argument("--sigma", help="alphabet letters, first two are a and b")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--file", help="read extra positional terms from this file")

    parser = argparse.ArgumentParser(prog="affina", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        return p

    def rewrite_flags(p):
        p.add_argument("--tau", help="pattern to rewrite")
        p.add_argument("--v", help="replacement")

    def oracle_flags(p):
        p.add_argument("--poly", help="polynomial to wrap as a black box")
        p.add_argument("--builtin", choices=["reverse", "sort-letters", "mirror", "constant"])
        p.add_argument("--const", help="value for --builtin constant")

    p = add("reduce", cmd_reduce, "one leftmost reduction step")
    rewrite_flags(p)
    p.add_argument("term", nargs="?")
    p = add("canon", cmd_canon, "reduce to irreducible form")
    rewrite_flags(p)
    p.add_argument("term", nargs="?")
    p = add("equiv", cmd_equiv, "decide congruence of two terms")
    rewrite_flags(p)
    p.add_argument("--oracle", action="store_true", help="use bounded closure instead")
    p.add_argument("--bound", type=int, default=6)
    p.add_argument("left", nargs="?")
    p.add_argument("right", nargs="?")
    p = add("ct", cmd_ct, "membership in the curated set CT")
    p.add_argument("term", nargs="?")
    p = add("strong", cmd_strong, "strong irreducibility")
    p.add_argument("--tau", required=True)
    p.add_argument("term", nargs="?")
    p = add("occurs", cmd_occurs, "leftmost occurrence context")
    p.add_argument("term", nargs="?")
    p.add_argument("sub", nargs="?")
    p = add("eval", cmd_eval, "evaluate a polynomial")
    p.add_argument("poly", nargs="?")
    p.add_argument("args", nargs="*")
    p = add("mdeg", cmd_mdeg, "multidegree of a black box")
    oracle_flags(p)
    p.add_argument("--grid", type=int, default=2)
    p = add("synth", cmd_synth, "synthesize the polynomial of a black box")
    oracle_flags(p)
    p.add_argument("--verify-len", type=int, default=None)
    p = add("refute", cmd_refute, "search for a CP violation")
    oracle_flags(p)
    p.add_argument("--family", action="append",
                   help="length | letter:X | first-letter | side:left|right | "
                        "length-mod:M | principal:U,V (repeatable)")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--bound", type=int, default=3)
    p = add("closure", cmd_closure, "bounded congruence closure of a pair")
    p.add_argument("--bound", type=int, default=4)
    p.add_argument("left", nargs="?")
    p.add_argument("right", nargs="?")
    p = add("demo", cmd_demo, "reproduce a worked example")
    p.add_argument("name", choices=sorted(DEMOS))
    return parser


_POSITIONALS = {
    "reduce": ["term"], "canon": ["term"], "equiv": ["left", "right"], "ct": ["term"],
    "strong": ["term"], "occurs": ["term", "sub"], "eval": ["poly"],
    "closure": ["left", "right"],
}


def _fill_from_file(args):
    with open(args.file) as fh:
        terms = fh.read().split()
    for name in _POSITIONALS.get(args.command, []):
        if getattr(args, name) is None and terms:
            setattr(args, name, terms.pop(0))
    if args.command == "eval":
        args.args = list(args.args) + terms


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.file:
            _fill_from_file(args)
        for name in _POSITIONALS.get(args.command, []):
            if getattr(args, name) is None:
                raise UsageError(f"missing argument {name}")
        ctx = Context(args)
        rep = args.func(ctx, args)
    except NotInCT as exc:
        print(f"error: canonical representative criterion needs tau in CT: {exc}", file=sys.stderr)
        return 2
    except NonTerminating as exc:
        print(f"error: rewriting needs |v| < |tau|: {exc}", file=sys.stderr)
        return 2
    except (UsageError, AffinaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(rep.render(args.json))
    return rep.code


if __name__ == "__main__":
    sys.exit(main())
