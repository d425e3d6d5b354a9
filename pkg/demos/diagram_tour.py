"""Tour of the diagram layer: build, validate, serialize, walk orbits.

Run:  python3 demos/diagram_tour.py
"""

from cantorconj import systems
from cantorconj.bratteli import (
    MAX_PATH,
    heights,
    max_path,
    min_path,
    parse_diagram,
    serialize_diagram,
    validate,
    vershik_successor,
)


def banner(title):
    print()
    print("=" * 64)
    print(title)
    print("=" * 64)


banner("Named systems and their height growth")
for name, make in sorted(systems.NAMED.items()):
    d = make()
    hs = [heights(d, m) for m in range(1, 5)]
    print(f"{name:12s} vertices={d.num_vertices(1)}  heights 1..4: {hs}")

banner("Validation reports")
for name in ("dyadic", "fibonacci"):
    rep = validate(systems.NAMED[name]())
    print(
        f"{name}: primitive={rep.primitive} (level {rep.primitivity_level}), "
        f"properly ordered={rep.properly_ordered}"
    )
    print(f"  min chain witness: {rep.min_chain_witness}")
    print(f"  max chain witness: {rep.max_chain_witness}")

banner("Serialization round trip is canonical")
d = systems.fibonacci()
text = serialize_diagram(d)
print(text)
assert serialize_diagram(parse_diagram(text)) == text
print("round trip reproduces the exact bytes")

banner("The dyadic successor is a binary counter (level 3, one tower)")
d = systems.dyadic()
path = min_path(d, 0, 3)
top = max_path(d, 0, 3)
floor = 0
while True:
    bits = "".join(str(t) for _, t in reversed(path))
    print(f"floor {floor}: edges={bits} (value {int(bits, 2)})")
    if path == top:
        break
    path = vershik_successor(d, path)
    assert path is not MAX_PATH
    floor += 1

banner("Fibonacci towers spell the substitution word")
d = systems.fibonacci()
for v in range(2):
    path = min_path(d, v, 4)
    word = []
    while True:
        word.append(path[0][0])  # level-1 vertex under this floor
        nxt = vershik_successor(d, path)
        if nxt is MAX_PATH:
            break
        path = nxt
    print(
        f"tower {v}: height {heights(d, 4)[v]}, "
        f"bottom vertices floor by floor: {''.join(map(str, word))}"
    )
print("the successor stays inside a tower and signals MAX at its top")
