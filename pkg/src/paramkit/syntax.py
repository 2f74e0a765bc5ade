"""Four-sorted term grammar of the CwF calculus and its s-expression format.

Terms are interned: two structurally identical trees are the same Python
object, so ``==`` and ``hash`` are O(1) and identity-based.  Construction
checks arities and slot sorts, so every ``Term`` that exists is
structurally well-formed.
"""

from __future__ import annotations

import enum
import re
from typing import Iterator, Sequence, Union


class Sort(enum.Enum):
    CTX = "Ctx"
    TY = "Ty"
    SUB = "Sub"
    TM = "Tm"

    def __repr__(self) -> str:
        return f"Sort.{self.name}"


NAME = "name"
C, T, S, M = Sort.CTX, Sort.TY, Sort.SUB, Sort.TM

# tag -> (sort of the node, slot kinds)
SIGNATURES: dict[str, tuple[Sort, tuple]] = {
    # contexts
    "empty": (C, ()),
    "ext": (C, (C, T)),
    "genctx": (C, (NAME,)),
    # types
    "subT": (T, (T, S)),
    "top": (T, (C,)),
    "sigma": (T, (T, T)),
    "pi": (T, (T, T)),
    "univ": (T, (C,)),
    "el": (T, (M,)),
    "genty": (T, (NAME, C)),
    "starctx": (T, (C,)),
    "starty": (T, (T,)),
    # substitutions
    "comp": (S, (S, S)),
    "id": (S, (C,)),
    "eps": (S, (C,)),
    "pairsub": (S, (S, M, T)),
    "p1": (S, (S,)),
    "gensub": (S, (NAME, C, C)),
    # terms
    "subt": (M, (M, S)),
    "p2": (M, (S,)),
    "tt": (M, (C,)),
    "fst": (M, (M,)),
    "snd": (M, (M,)),
    "pairtm": (M, (M, M, T)),
    "app": (M, (M,)),
    "lam": (M, (M,)),
    "topu": (M, (C,)),
    "sigmau": (M, (M, M)),
    "piu": (M, (M, M)),
    "gentm": (M, (NAME, C, T)),
    "starsub": (M, (S,)),
    "startm": (M, (M,)),
}

GENERATOR_TAGS = frozenset({"genctx", "genty", "gensub", "gentm"})
STAR_TAGS = frozenset({"starctx", "starty", "starsub", "startm"})
ATOMIC_TAGS = GENERATOR_TAGS | STAR_TAGS

_NAME_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")


class TermError(Exception):
    """Base class for malformed terms and unparsable text."""


class SexpSyntaxError(TermError):
    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        self.line, self.col, self.expected, self.found = line, col, expected, found
        msg = f"{line}:{col}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


class UnknownTag(TermError):
    def __init__(self, tag: str, line: int | None = None, col: int | None = None):
        self.tag, self.line, self.col = tag, line, col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{where}unknown tag {tag!r}")


class ArityMismatch(TermError):
    def __init__(self, tag: str, expected: int, got: int, line=None, col=None):
        self.tag, self.expected, self.got, self.line, self.col = tag, expected, got, line, col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{where}{tag} takes {expected} argument(s), got {got}")


class SortMismatch(TermError):
    def __init__(self, tag: str, slot: int, expected, got, line=None, col=None):
        self.tag, self.slot, self.expected, self.got = tag, slot, expected, got
        self.line, self.col = line, col
        exp = expected.value if isinstance(expected, Sort) else expected
        gv = got.value if isinstance(got, Sort) else got
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{where}slot {slot} of {tag} expects {exp}, got {gv}")


Arg = Union["Term", str]


class Term:
    """An immutable, interned node ``(tag, args)``."""

    __slots__ = ("tag", "args", "sort", "size", "depth", "__weakref__")
    _table: dict = {}

    def __new__(cls, tag: str, *args: Arg) -> "Term":
        key = (tag, args)
        hit = cls._table.get(key)
        if hit is not None:
            return hit
        sig = SIGNATURES.get(tag)
        if sig is None:
            raise UnknownTag(tag)
        sort, slots = sig
        if len(args) != len(slots):
            raise ArityMismatch(tag, len(slots), len(args))
        size, depth = 1, 0
        for i, (slot, a) in enumerate(zip(slots, args)):
            if slot is NAME:
                if not isinstance(a, str) or not _NAME_RE.match(a):
                    raise SortMismatch(tag, i, NAME, type(a).__name__ if not isinstance(a, str) else repr(a))
            else:
                if not isinstance(a, Term):
                    raise SortMismatch(tag, i, slot, type(a).__name__)
                if a.sort is not slot:
                    raise SortMismatch(tag, i, slot, a.sort)
                size += a.size
                depth = max(depth, a.depth)
        self = object.__new__(cls)
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "sort", sort)
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "depth", depth + 1)
        cls._table[key] = self
        return self

    def __setattr__(self, name, value):
        raise AttributeError("Term is immutable")

    def __getitem__(self, i: int) -> Arg:
        return self.args[i]

    def __reduce__(self):
        return (Term, (self.tag, *self.args))

    def __repr__(self) -> str:
        text = print_term(self)
        return text if len(text) < 200 else text[:197] + "..."

    @property
    def children(self) -> tuple["Term", ...]:
        return tuple(a for a in self.args if isinstance(a, Term))

    @property
    def name(self) -> str:
        if self.tag in GENERATOR_TAGS:
            return self.args[0]
        raise AttributeError(f"{self.tag} has no name")


# -- constructors -----------------------------------------------------------

def Empty() -> Term: return Term("empty")
def Ext(g: Term, a: Term) -> Term: return Term("ext", g, a)
def GenCtx(name: str) -> Term: return Term("genctx", name)

def SubT(a: Term, s: Term) -> Term: return Term("subT", a, s)
def Top(g: Term) -> Term: return Term("top", g)
def Sigma(a: Term, b: Term) -> Term: return Term("sigma", a, b)
def Pi(a: Term, b: Term) -> Term: return Term("pi", a, b)
def Univ(g: Term) -> Term: return Term("univ", g)
def El(t: Term) -> Term: return Term("el", t)
def GenTy(name: str, g: Term) -> Term: return Term("genty", name, g)
def StarCtx(g: Term) -> Term: return Term("starctx", g)
def StarTy(a: Term) -> Term: return Term("starty", a)

def Comp(s: Term, n: Term) -> Term: return Term("comp", s, n)
def Id(g: Term) -> Term: return Term("id", g)
def Eps(g: Term) -> Term: return Term("eps", g)
def PairSub(s: Term, t: Term, a: Term) -> Term: return Term("pairsub", s, t, a)
def P1(s: Term) -> Term: return Term("p1", s)
def GenSub(name: str, g: Term, d: Term) -> Term: return Term("gensub", name, g, d)

def SubTm(t: Term, s: Term) -> Term: return Term("subt", t, s)
def P2(s: Term) -> Term: return Term("p2", s)
def Tt(g: Term) -> Term: return Term("tt", g)
def Fst(t: Term) -> Term: return Term("fst", t)
def Snd(t: Term) -> Term: return Term("snd", t)
def PairTm(s: Term, t: Term, b: Term) -> Term: return Term("pairtm", s, t, b)
def App(t: Term) -> Term: return Term("app", t)
def Lam(t: Term) -> Term: return Term("lam", t)
def TopU(g: Term) -> Term: return Term("topu", g)
def SigmaU(s: Term, t: Term) -> Term: return Term("sigmau", s, t)
def PiU(s: Term, t: Term) -> Term: return Term("piu", s, t)
def GenTm(name: str, g: Term, a: Term) -> Term: return Term("gentm", name, g, a)
def StarSub(s: Term) -> Term: return Term("starsub", s)
def StarTm(t: Term) -> Term: return Term("startm", t)


# -- derived notations ------------------------------------------------------

def wk(ctx: Term) -> Term:
    """``w = π₁ id : Sub (Γ,A) Γ`` for ``ctx = (Γ,A)``."""
    if ctx.tag != "ext":
        raise TermError(f"wk needs an extended context, got {ctx.tag}")
    return P1(Id(ctx))


def vr(ctx: Term) -> Term:
    """``v = π₂ id : Tm (Γ,A) A[w]`` for ``ctx = (Γ,A)``."""
    if ctx.tag != "ext":
        raise TermError(f"vr needs an extended context, got {ctx.tag}")
    return P2(Id(ctx))


def ctx_prefix(ctx: Term, n: int) -> Term:
    """Drop the last ``n`` entries of a telescope."""
    for _ in range(n):
        if ctx.tag != "ext":
            raise TermError("context is shorter than requested prefix")
        ctx = ctx.args[0]
    return ctx


def wks(ctx: Term, n: int) -> Term:
    """``w ∘ … ∘ w`` (n factors) from ``ctx`` to its n-th prefix, right-associated."""
    if n == 0:
        return Id(ctx)
    steps = []
    c = ctx
    for _ in range(n):
        steps.append(wk(c))
        c = c.args[0]
    acc = steps[0]
    for w in steps[1:]:
        acc = Comp(w, acc)
    return acc


def telescope(ctx: Term) -> tuple[Term, list[Term]]:
    """Split a context into its base (``empty`` or ``genctx``) and entries."""
    entries = []
    while ctx.tag == "ext":
        entries.append(ctx.args[1])
        ctx = ctx.args[0]
    entries.reverse()
    return ctx, entries


def extend(base: Term, entries: Sequence[Term]) -> Term:
    for a in entries:
        base = Ext(base, a)
    return base


def tuple_sub(target: Term, base: Term, *terms: Term) -> Term:
    """Left-nested substitution ``(base, t1, …, tk)`` into ``target``.

    The last ``k`` entries of ``target`` provide the PairSub annotations.
    """
    annots = []
    c = target
    for _ in terms:
        if c.tag != "ext":
            raise TermError("target context has too few entries for tuple")
        annots.append(c.args[1])
        c = c.args[0]
    annots.reverse()
    acc = base
    for t, a in zip(terms, annots):
        acc = PairSub(acc, t, a)
    return acc


# -- printing ---------------------------------------------------------------

def _wk_chain(s: Term) -> tuple[Term, list[Term]] | None:
    """Recognise ``w_1 ∘ (w_2 ∘ (… ∘ w_n))`` with n ≥ 2 as ``wkN``."""
    ws = []
    cur = s
    while cur.tag == "comp":
        ws.append(cur.args[0])
        cur = cur.args[1]
    ws.append(cur)
    if len(ws) < 2:
        return None
    ctxs = []
    for w in ws:
        if not (w.tag == "p1" and w.args[0].tag == "id" and w.args[0].args[0].tag == "ext"):
            return None
        ctxs.append(w.args[0].args[0])
    # each factor's context must extend the previous one by exactly one entry
    for prev, nxt in zip(ctxs, ctxs[1:]):
        if nxt.args[0] is not prev:
            return None
    base = ctxs[0].args[0]
    return base, [c.args[1] for c in ctxs]


def _emit(t: Term, out: list[str], memo: dict) -> None:
    cached = memo.get(t)
    if cached is not None:
        out.append(cached)
        return
    start = len(out)
    tag = t.tag
    if tag in ("p1", "p2") and t.args[0].tag == "id" and t.args[0].args[0].tag == "ext":
        ctx = t.args[0].args[0]
        out.append("(wk " if tag == "p1" else "(vr ")
        _emit(ctx.args[0], out, memo)
        out.append(" ")
        _emit(ctx.args[1], out, memo)
        out.append(")")
    elif tag == "comp" and (chain := _wk_chain(t)) is not None:
        base, entries = chain
        out.append("(wkN ")
        _emit(base, out, memo)
        for a in entries:
            out.append(" ")
            _emit(a, out, memo)
        out.append(")")
    else:
        out.append("(" + tag)
        for a in t.args:
            out.append(" ")
            if isinstance(a, str):
                out.append(a)
            else:
                _emit(a, out, memo)
        out.append(")")
    if t.size > 4:
        memo[t] = "".join(out[start:])
        del out[start:]
        out.append(memo[t])


def print_term(t: Term) -> str:
    out: list[str] = []
    _emit(t, out, {})
    return "".join(out)


# -- parsing ----------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


def _tokens(text: str) -> list[tuple[str, int, int]]:
    toks = []
    line, col0 = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        tok = m.group(0)
        col = pos - col0 + 1
        if not (tok[0].isspace() or tok[0] == ";"):
            toks.append((tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            col0 = pos + tok.rfind("\n") + 1
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.i = 0
        self.end = self._end_position(text)

    @staticmethod
    def _end_position(text: str) -> tuple[int, int]:
        lines = text.split("\n")
        return len(lines), len(lines[-1]) + 1

    def peek(self):
        if self.i < len(self.toks):
            return self.toks[self.i]
        return ("", *self.end)

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, what: str, pred) -> tuple[str, int, int]:
        tok, line, col = self.next()
        if not pred(tok):
            raise SexpSyntaxError(line, col, what, tok or "end of input")
        return tok, line, col

    def term(self) -> Term:
        _, line, col = self.expect("'('", lambda s: s == "(")
        tag, tline, tcol = self.expect("a tag", lambda s: s not in ("", "(", ")"))
        args: list = []
        if tag in ("wk", "vr", "wkN"):
            while self.peek()[0] == "(":
                args.append(self.term())
            self.expect("')'", lambda s: s == ")")
            return self._derived(tag, args, tline, tcol)
        sig = SIGNATURES.get(tag)
        if sig is None:
            raise UnknownTag(tag, tline, tcol)
        slots = sig[1]
        while self.peek()[0] not in (")", ""):
            tok, l2, c2 = self.peek()
            slot = slots[len(args)] if len(args) < len(slots) else None
            if slot is NAME:
                if tok == "(" or not _NAME_RE.match(tok):
                    raise SexpSyntaxError(l2, c2, "a generator name", tok)
                self.next()
                args.append(tok)
            elif tok == "(":
                args.append((self.term(), l2, c2))
            else:
                raise SexpSyntaxError(l2, c2, "'(' or ')'", tok)
        self.expect("')'", lambda s: s == ")")
        if len(args) != len(slots):
            raise ArityMismatch(tag, len(slots), len(args), tline, tcol)
        plain = []
        for k, (slot, a) in enumerate(zip(slots, args)):
            if slot is NAME:
                plain.append(a)
            else:
                sub, l2, c2 = a
                if sub.sort is not slot:
                    raise SortMismatch(tag, k, slot, sub.sort, l2, c2)
                plain.append(sub)
        return Term(tag, *plain)

    def _derived(self, tag: str, args: list[Term], line: int, col: int) -> Term:
        if tag in ("wk", "vr"):
            if len(args) != 2:
                raise ArityMismatch(tag, 2, len(args), line, col)
            g, a = args
            if g.sort is not Sort.CTX:
                raise SortMismatch(tag, 0, Sort.CTX, g.sort, line, col)
            if a.sort is not Sort.TY:
                raise SortMismatch(tag, 1, Sort.TY, a.sort, line, col)
            ctx = Ext(g, a)
            return wk(ctx) if tag == "wk" else vr(ctx)
        if len(args) < 2:
            raise ArityMismatch(tag, 2, len(args), line, col)
        g, entries = args[0], args[1:]
        if g.sort is not Sort.CTX:
            raise SortMismatch(tag, 0, Sort.CTX, g.sort, line, col)
        for k, a in enumerate(entries, 1):
            if a.sort is not Sort.TY:
                raise SortMismatch(tag, k, Sort.TY, a.sort, line, col)
        return wks(extend(g, entries), len(entries))


def parse(text: str) -> Term:
    """Parse one s-expression; derived notations are expanded."""
    p = _Parser(text)
    t = p.term()
    tok, line, col = p.peek()
    if tok:
        raise SexpSyntaxError(line, col, "end of input", tok)
    return t


# -- structural checks ------------------------------------------------------

def star_head_ok(t: Term) -> bool:
    """True if a Star node wraps an atomic head (a generator or another Star)."""
    inner = t.args[0]
    if t.tag == "starctx":
        return inner.tag == "genctx"
    if t.tag == "starsub":
        return inner.tag == "gensub"
    if t.tag == "starty":
        return inner.tag in ("genty", "starctx", "starty")
    if t.tag == "startm":
        return inner.tag in ("gentm", "starsub", "startm")
    return True


def validate(t: Term) -> None:
    """Check slot sorts and Star well-formedness over the whole tree."""
    seen: set = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        sort, slots = SIGNATURES[u.tag]
        assert u.sort is sort
        for k, (slot, a) in enumerate(zip(slots, u.args)):
            if slot is NAME:
                if not isinstance(a, str):
                    raise SortMismatch(u.tag, k, NAME, type(a).__name__)
            else:
                if a.sort is not slot:
                    raise SortMismatch(u.tag, k, slot, a.sort)
                stack.append(a)
        if u.tag in STAR_TAGS and not star_head_ok(u):
            raise TermError(f"{u.tag} wraps a composite head {u.args[0].tag}")


def subterms(t: Term) -> Iterator[tuple[tuple[int, ...], Term]]:
    """All (path, subterm) pairs in pre-order; paths index ``args``."""
    stack = [((), t)]
    while stack:
        path, u = stack.pop()
        yield path, u
        for k in range(len(u.args) - 1, -1, -1):
            a = u.args[k]
            if isinstance(a, Term):
                stack.append((path + (k,), a))


def at_path(t: Term, path: Sequence[int]) -> Term:
    for k in path:
        t = t.args[k]
    return t


def replace_at(t: Term, path: Sequence[int], new: Term) -> Term:
    if not path:
        return new
    k = path[0]
    args = list(t.args)
    args[k] = replace_at(args[k], path[1:], new)
    return Term(t.tag, *args)


def nodes(t: Term) -> list[Term]:
    """Distinct subterms, children before parents."""
    order: list[Term] = []
    seen: set = set()
    stack = [(t, False)]
    while stack:
        u, done = stack.pop()
        if done:
            order.append(u)
            continue
        if u in seen:
            continue
        seen.add(u)
        stack.append((u, True))
        for c in reversed(u.children):
            if c not in seen:
                stack.append((c, False))
    return order


def generators(t: Term) -> set[Term]:
    return {u for u in nodes(t) if u.tag in GENERATOR_TAGS}


# -- shared-node format -----------------------------------------------------
#
#   #0 = (genctx X)
#   #1 = (starctx #0)
#   #2 = (ext #0 #1)
#   root #2
#
# Every line names one distinct node; arguments are names or earlier labels.

TREE_PRINT_LIMIT = 50_000  # tree size above which printing switches to the shared-node form


def print_dag(t: Term) -> str:
    label: dict = {}
    lines = []
    for u in nodes(t):
        label[u] = f"#{len(label)}"
        parts = [a if isinstance(a, str) else label[a] for a in u.args]
        lines.append(f"{label[u]} = ({' '.join([u.tag, *parts])})")
    lines.append(f"root {label[t]}")
    return "\n".join(lines)


def parse_dag(text: str) -> Term:
    defs: dict[str, Term] = {}
    root = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if root is not None:
            raise SexpSyntaxError(lineno, 1, "end of input", line)
        if line.startswith("root "):
            ref = line[5:].strip()
            if ref not in defs:
                raise SexpSyntaxError(lineno, 6, "a defined label", ref)
            root = defs[ref]
            continue
        m = re.match(r"(#\d+)\s*=\s*\(([^()]*)\)\Z", line)
        if m is None:
            raise SexpSyntaxError(lineno, 1, "'#k = (tag args…)'", line)
        tag, *toks = m.group(2).split()
        sig = SIGNATURES.get(tag)
        if sig is None:
            raise UnknownTag(tag, lineno, 1)
        if len(toks) != len(sig[1]):
            raise ArityMismatch(tag, len(sig[1]), len(toks), lineno, 1)
        args: list = []
        for k, (slot, tok) in enumerate(zip(sig[1], toks)):
            if slot is NAME:
                args.append(tok)
            elif tok in defs:
                if defs[tok].sort is not slot:
                    raise SortMismatch(tag, k, slot, defs[tok].sort, lineno, 1)
                args.append(defs[tok])
            else:
                raise SexpSyntaxError(lineno, 1, "an earlier label", tok)
        defs[m.group(1)] = Term(tag, *args)
    if root is None:
        raise SexpSyntaxError(len(text.splitlines()) + 1, 1, "'root #k'", "end of input")
    return root


def render(t: Term, limit: int = TREE_PRINT_LIMIT) -> str:
    """The s-expression if the tree is small enough, the shared-node form otherwise."""
    return print_term(t) if t.size <= limit else print_dag(t)


def read(text: str) -> Term:
    """Parse either textual format."""
    body = text.lstrip()
    while body.startswith(";"):
        body = body.split("\n", 1)[1].lstrip() if "\n" in body else ""
    return parse_dag(text) if body.startswith("#") else parse(text)
