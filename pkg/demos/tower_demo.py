"""Iterating star on a context generator gives a growing telescope."""

from paramkit import render, tower

rep = tower(4, flatten=True)
for lv in rep.levels:
    print(f"dim {lv.dim}: telescope {lv.telescope_len}, flattened {lv.flattened_len}, "
          f"ambient tree size {lv.ambient.size}")
print("level 2 ambient:", render(rep.levels[1].ambient))
print("level 2 body:   ", render(rep.levels[1].body))
