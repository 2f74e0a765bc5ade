"""The star translation on a few terms and over the axiom catalogue."""

from paramkit import Kernel, render, run_appendix, star
from paramkit.param import star_in
from paramkit.syntax import Empty, GenCtx, GenSub, Id, Univ
from paramkit.typecheck import judgment_text

G, D = GenCtx("G"), GenCtx("D")

for t in (Empty(), G, Univ(G), Id(G), GenSub("s", G, D)):
    k = Kernel()
    j = k.typecheck(t)
    s = star_in(k, t)
    js = k.typecheck(s)
    ok = k.judgment_eq(js, k.judgment_of_star(t, j))
    print(f"{render(t)}\n  star: {render(s)}\n  :    {judgment_text(js)}  [{'ok' if ok else 'BAD'}]")

print("star(G) stays formal:", render(star(G)))

# each catalogued equation, translated, still holds
results = run_appendix()
print(f"{sum(r.passed for r in results)}/{len(results)} equations respected")

# a broken equation is caught, and only that one
bad = [r.id for r in run_appendix(mutate="pi.beta") if not r.passed]
print("with pi.beta mutated, failing:", bad)
