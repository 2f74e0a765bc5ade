"""Build terms, typecheck them, normalize and compare."""

from paramkit import Kernel, ResourceExhausted, TypeCheckError, equal, normalize, render, typecheck
from paramkit.syntax import Comp, Ext, Fst, GenCtx, GenSub, GenTm, GenTy, Id, P1, PairSub, SubT, Top, Tt
from paramkit.typecheck import judgment_text

G, D = GenCtx("G"), GenCtx("D")
A = GenTy("A", D)
s = GenSub("s", G, D)
t = GenTm("t", G, SubT(A, s))

# p1 of a pairing is the substitution we started with
lhs = P1(PairSub(s, t, A))
print(render(lhs))
print("  :", judgment_text(typecheck(lhs)))
print("  nf:", render(normalize(lhs).term))

# identity laws hold on both sides
v = equal(Comp(Comp(Id(D), s), Id(G)), s)
print(f"id;s;id = s: {v.equal} via {v.method}")

# every term of the unit type is tt
x = GenTm("x", G, Top(G))
print("x : Top normalizes to", render(normalize(x).term), "==", render(Tt(G)))

# errors carry a kind and a path into the term
try:
    typecheck(Fst(Tt(G)))
except TypeCheckError as e:
    print("error:", e.kind, "at", e.path)

# running out of fuel is its own outcome, not a type error
try:
    normalize(lhs, kernel=Kernel(fuel=2))
except ResourceExhausted as e:
    print("exhausted:", e)
print("extension:", judgment_text(typecheck(Ext(G, SubT(A, s)))))
