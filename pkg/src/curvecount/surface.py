"""Closed surfaces of genus g with a fixed pants decomposition.

Layout (``build_surface``): the ``2g - 2`` pants are arranged on a necklace.
Pants ``p`` has

* slot 0 -- the chord shared with its partner pants ``p ^ 1``,
* slot 1 -- the necklace edge towards pants ``p + 1``,
* slot 2 -- the necklace edge coming from pants ``p - 1``.

For genus 2 this is the theta decomposition: both pants share all three
cuffs.  Cuffs are numbered in order of their first appearance when scanning
``(pants, slot)`` lexicographically.  Every gluing is orientation reversing on
the boundary circles, so all pants carry the same orientation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

Side = Tuple[int, int]  # (pants, slot)


@dataclass(frozen=True)
class Surface:
    genus: int

    @property
    def h(self) -> int:
        return 6 * self.genus - 6

    @property
    def num_cuffs(self) -> int:
        return 3 * self.genus - 3

    @property
    def num_pants(self) -> int:
        return 2 * self.genus - 2

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus


@dataclass(frozen=True)
class PantsDecomposition:
    """Pants with three ordered slots and a fixed-point free gluing.

    ``cuffs[i]`` is the pair of sides glued into cuff ``i``; ``slot_cuff[p][j]``
    is the cuff index seen from slot ``j`` of pants ``p`` and ``slot_side`` is 0
    or 1 according to which end of the cuff that slot is.
    """

    genus: int
    cuffs: Tuple[Tuple[Side, Side], ...]
    slot_cuff: Tuple[Tuple[int, int, int], ...] = field(repr=False)
    slot_side: Tuple[Tuple[int, int, int], ...] = field(repr=False)

    @property
    def num_pants(self) -> int:
        return len(self.slot_cuff)

    @property
    def num_cuffs(self) -> int:
        return len(self.cuffs)

    def gluing(self) -> Dict[Side, Side]:
        """The involution on ``(pants, slot)`` pairs."""
        inv = {}
        for a, b in self.cuffs:
            inv[a] = b
            inv[b] = a
        return inv

    def other_side(self, pants: int, slot: int) -> Side:
        a, b = self.cuffs[self.slot_cuff[pants][slot]]
        return b if a == (pants, slot) else a

    def parity_matrix(self) -> List[List[int]]:
        """Rows: pants; columns: cuffs; entry = number of slots of the pants on that cuff."""
        rows = []
        for p in range(self.num_pants):
            row = [0] * self.num_cuffs
            for j in range(3):
                row[self.slot_cuff[p][j]] += 1
            rows.append(row)
        return rows

    def separating_cuffs(self) -> Tuple[bool, ...]:
        """Whether each cuff separates the surface (i.e. is a bridge of the dual graph)."""
        out = []
        for i in range(self.num_cuffs):
            parent = list(range(self.num_pants))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for k, ((p, _), (q, _)) in enumerate(self.cuffs):
                if k != i:
                    parent[find(p)] = find(q)
            out.append(len({find(p) for p in range(self.num_pants)}) > 1)
        return tuple(out)

    def cell_euler_characteristic(self) -> int:
        """V - E + F of the hexagon cell structure with untwisted gluings.

        Each pants is two right-angled hexagons (front/back) glued along three
        seams.  Boundary slot ``j`` is split by the seam feet at ``s = 0`` and
        ``s = 1/2`` (fraction of the circle); the gluing ``s -> -s`` identifies
        foot with foot and front half with back half.
        """
        parent: Dict[tuple, tuple] = {}

        def find(x):
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            parent[find(a)] = find(b)

        for p in range(self.num_pants):
            for j in range(3):
                for foot in (0, 1):
                    find(("v", p, j, foot))
                for half in (0, 1):
                    find(("b", p, j, half))
        for (p, a), (q, b) in self.cuffs:
            for foot in (0, 1):
                union(("v", p, a, foot), ("v", q, b, foot))
            for half in (0, 1):
                union(("b", p, a, half), ("b", q, b, 1 - half))
        verts = {find(x) for x in list(parent) if x[0] == "v"}
        bedges = {find(x) for x in list(parent) if x[0] == "b"}
        seams = 3 * self.num_pants
        faces = 2 * self.num_pants
        return len(verts) - (len(bedges) + seams) + faces

    def to_dict(self) -> dict:
        return {
            "genus": self.genus,
            "num_pants": self.num_pants,
            "num_cuffs": self.num_cuffs,
            "pants": [
                {"index": p, "slots": [{"slot": j, "cuff": self.slot_cuff[p][j] + 1}
                                       for j in range(3)]}
                for p in range(self.num_pants)
            ],
            "gluing": [
                {"cuff": i + 1, "sides": [list(a), list(b)]}
                for i, (a, b) in enumerate(self.cuffs)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def build_surface(genus: int) -> Tuple[Surface, PantsDecomposition]:
    """Return the surface and its canonical pants decomposition."""
    if not isinstance(genus, int) or genus < 2:
        raise ValueError(f"genus must be an integer >= 2, got {genus!r}")
    n = 2 * genus - 2
    pairs: List[Tuple[Side, Side]] = []
    for p in range(n):
        if p % 2 == 0:
            pairs.append(((p, 0), (p + 1, 0)))
        pairs.append(((p, 1), ((p + 1) % n, 2)))
    pairs.sort()
    slot_cuff = [[-1] * 3 for _ in range(n)]
    slot_side = [[-1] * 3 for _ in range(n)]
    for i, (a, b) in enumerate(pairs):
        for k, (p, j) in enumerate((a, b)):
            slot_cuff[p][j] = i
            slot_side[p][j] = k
    dec = PantsDecomposition(
        genus=genus,
        cuffs=tuple(pairs),
        slot_cuff=tuple(tuple(r) for r in slot_cuff),
        slot_side=tuple(tuple(r) for r in slot_side),
    )
    return Surface(genus), dec


@dataclass(frozen=True)
class Torus:
    """Degenerate one-cuff model used as a known-answer check.

    Points are ``(p, q)`` in Z^2 with norm ``|p| + |q|``; a point is a simple
    closed curve exactly when it is primitive.
    """

    genus: int = 1

    @property
    def h(self) -> int:
        return 2

    @property
    def num_cuffs(self) -> int:
        return 1


TORUS = Torus()
