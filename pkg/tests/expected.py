"""Closure sets for the three-ontology running example, written the way
they are usually tabulated, plus helpers that turn them into objects."""

from noo.io import as_axiom, parse_correspondence

OMEGA_O1 = """
b1 <= a1; c1 <= a1; d1 <= c1; e1 <= c1; d1 <= a1; e1 <= a1
"""

OMEGA_O2 = """
b2 <= a2; c2 <= a2; g2 <= b2; f2 <= b2; d2 <= c2; e2 <= c2;
d2 <= a2; e2 <= a2; f2 <= a2; g2 <= a2
"""

OMEGA_O3_PRIME = """
b3 <= a3; c3 <= a3; g3 <= b3; d3 <= c3; e3 <= c3; f3 <= b3; b3 disjoint c3;
f3 <= a3; g3 <= a3; d3 <= a3; e3 <= a3; d3 disjoint b3; e3 disjoint b3;
d3 disjoint f3; d3 disjoint g3; e3 disjoint f3; e3 disjoint g3;
f3 disjoint c3; g3 disjoint c3;
b3 >= e3
"""

ALPHA_O1_O2 = "b1 <= d2; b1 <= a2; b1 <= c2"

ALPHA_O2_O3 = """
c2 <= b3;
c2 <= a3; d2 <= a3; e2 <= a3; d2 <= b3; e2 <= b3;
c2 disjoint c3; c2 disjoint d3; c2 disjoint e3;
d2 disjoint c3; d2 disjoint d3; d2 disjoint e3;
e2 disjoint c3; e2 disjoint d3; e2 disjoint e3;
d2 >= e3; c2 >= e3; a2 >= e3
"""

ALPHA_O1_O3 = """
e1 >= f3; b1 >= e3; c1 >= f3; a1 >= f3; a1 >= e3;
b1 <= b3; b1 <= a3; b1 disjoint c3; b1 disjoint d3; b1 disjoint e3
"""

ALPHA_O1_O3_ALONE = "e1 >= f3; b1 >= e3; c1 >= f3; a1 >= f3; a1 >= e3"


def _items(text: str) -> list[str]:
    return [t.strip() for t in text.replace("\n", " ").split(";") if t.strip()]


def axioms(net, onto: str, text: str) -> set:
    out = set()
    for item in _items(text):
        left, rel, right = item.split()
        out.add(as_axiom(parse_correspondence(f"{onto}:{left} {rel} {onto}:{right}", net)))
    return out


def correspondences(net, a: str, b: str, text: str) -> set:
    out = set()
    for item in _items(text):
        left, rel, right = item.split()
        out.add(parse_correspondence(f"{a}:{left} {rel} {b}:{right}", net))
    return out
