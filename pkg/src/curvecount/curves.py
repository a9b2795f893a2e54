"""Decoding Dehn--Thurston coordinates into multicurves and typing them.

Each pants is drawn as two right-angled hexagons (front and back) glued along
three seams.  Boundary slot ``j`` is parametrised by ``s`` in ``[0, 1)``
(fractions of its length) with the pants on the left; the foot of the seam to
slot ``j - 1`` sits at ``s = 0`` and the foot of the seam to slot ``j + 1`` at
``s = 1/2``.  Arcs joining two different slots run through the front hexagon
parallel to their seam.  When one slot ``a`` is heavy (``m_a > m_b + m_c``)
the extra arcs leave ``a`` on the front, wrap around slot ``a + 1`` through
the seam opposite to ``a`` and come back to ``a`` on the back half.

The endpoints on a slot are ranked by ``s``.  Across cuff ``i`` strand ``k``
on one side is glued to strand ``(m - 1 - k + t) mod m`` on the other side;
the rule is symmetric in the two sides.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .dtcoords import DTCoordinates, CoordinateError, validate
from .surface import PantsDecomposition


class DecodeError(RuntimeError):
    """Raised when a decoded curve system violates a structural invariant."""


# --------------------------------------------------------------------------
# arcs inside one pair of pants
# --------------------------------------------------------------------------

def arc_counts(ma: int, mb: int, mc: int) -> Dict[Tuple[int, int], int]:
    """Numbers of disjoint arcs between the slots of a pants with crossings ``(ma, mb, mc)``.

    Keys are slot pairs ``(0,1), (1,2), (0,2)`` and ``(j,j)`` for arcs returning to slot ``j``.
    """
    m = (ma, mb, mc)
    if (ma + mb + mc) % 2:
        raise CoordinateError(f"odd number of arc endpoints {m}")
    out = {(0, 1): 0, (1, 2): 0, (0, 2): 0, (0, 0): 0, (1, 1): 0, (2, 2): 0}
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        if m[a] > m[b] + m[c]:
            out[(a, a)] = (m[a] - m[b] - m[c]) // 2
            out[tuple(sorted((a, b)))] = m[b]
            out[tuple(sorted((a, c)))] = m[c]
            return out
    out[(0, 1)] = (ma + mb - mc) // 2
    out[(1, 2)] = (mb + mc - ma) // 2
    out[(0, 2)] = (ma + mc - mb) // 2
    return out


@dataclass(frozen=True)
class PantsArcs:
    """Arc system of one pants.

    ``arcs[k] = (slot_u, rank_u, slot_v, rank_v)``; for arcs returning to the
    same slot ``u`` is the front endpoint and ``v`` the back one.
    ``at[(slot, rank)] = (arc, end)`` with ``end`` 0 for ``u`` and 1 for ``v``.
    """

    m: Tuple[int, int, int]
    heavy: Optional[int]
    arcs: Tuple[Tuple[int, int, int, int], ...]
    at: Dict[Tuple[int, int], Tuple[int, int]] = field(repr=False)
    nfront: Tuple[int, int, int]

    def partner(self, slot: int, rank: int) -> Tuple[int, int]:
        k, end = self.at[(slot, rank)]
        su, ru, sv, rv = self.arcs[k]
        return (sv, rv) if end == 0 else (su, ru)

    def circle_gap(self, slot: int) -> Optional[Tuple[int, int]]:
        """Gap ``(slot', k)`` lying in the same region as the untouched slot ``slot``."""
        if not self.arcs:
            return None
        x = self.heavy if self.heavy is not None else next(j for j in range(3) if self.m[j])
        if slot == (x - 1) % 3:
            return (x, self.m[x] - 1)
        return (x, self.nfront[x] - 1)


@lru_cache(maxsize=65536)
def pants_arcs(ma: int, mb: int, mc: int) -> PantsArcs:
    m = (ma, mb, mc)
    x = arc_counts(ma, mb, mc)
    heavy = next((j for j in range(3) if x[(j, j)]), None)
    arcs: List[list] = []
    # per slot: list of (arc index, end) in increasing s
    blocks: Dict[int, List[Tuple[int, int]]] = {}
    adj_ids: Dict[Tuple[int, int], List[int]] = {}
    for j in range(3):
        k = (j + 1) % 3
        ids = []
        for q in range(x[tuple(sorted((j, k)))]):
            ids.append(len(arcs))
            arcs.append([j, -1, k, -1])  # u on slot j, v on slot j + 1
        adj_ids[(j, k)] = ids  # index q = closeness to the seam (j, j+1)
    aa_ids = []
    if heavy is not None:
        for q in range(x[(heavy, heavy)]):
            aa_ids.append(len(arcs))
            arcs.append([heavy, -1, heavy, -1])
    for j in range(3):
        prev, nxt = (j - 1) % 3, (j + 1) % 3
        order: List[Tuple[int, int]] = []
        order += [(a, 1) for a in adj_ids[(prev, j)]]  # near seam (j-1, j) first
        if heavy == j:
            order += [(a, 0) for a in reversed(aa_ids)]
        order += [(a, 0) for a in reversed(adj_ids[(j, nxt)])]
        nfront = len(order)
        if heavy == j:
            order += [(a, 1) for a in aa_ids]
        blocks[j] = (order, nfront)
    at = {}
    nfronts = []
    for j in range(3):
        order, nf = blocks[j]
        nfronts.append(nf)
        if len(order) != m[j]:
            raise DecodeError("arc layout does not match crossing numbers")
        for r, (a, end) in enumerate(order):
            arcs[a][1 + 2 * end] = r
            at[(j, r)] = (a, end)
    return PantsArcs(m=m, heavy=heavy, arcs=tuple(tuple(a) for a in arcs), at=at,
                     nfront=tuple(nfronts))


# --------------------------------------------------------------------------
# decoded objects
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    """One arc of a traced curve and the cuff crossing that follows it.

    ``aa`` is +1 for a same-slot arc run front-to-back, -1 for back-to-front, 0 otherwise.
    ``winding`` is the number of full turns added by the twist at the crossing.
    """

    pants: int
    entry: int
    entry_rank: int
    exit: int
    aa: int
    cuff: int
    exit_rank: int
    winding: int


@dataclass(frozen=True)
class Component:
    """A simple closed curve: either cuff ``cuff`` itself or a cyclic list of steps."""

    steps: Tuple[Step, ...] = ()
    cuff: Optional[int] = None

    @property
    def is_cuff(self) -> bool:
        return self.cuff is not None

    def crossings(self, num_cuffs: int) -> Tuple[int, ...]:
        out = [0] * num_cuffs
        for st in self.steps:
            out[st.cuff] += 1
        return tuple(out)


@dataclass(frozen=True)
class TypeInvariant:
    """Canonical labelled complement graph of a multicurve.

    ``vertices[k] = (genus, boundary count)``; ``edges`` are ``(u, v, weight)`` with ``u <= v``.
    """

    vertices: Tuple[Tuple[int, int], ...]
    edges: Tuple[Tuple[int, int, int], ...]

    @property
    def key(self) -> str:
        vs = ",".join(f"g{g}b{b}" for g, b in self.vertices)
        es = ",".join(f"{u}-{v}:{w}" for u, v, w in self.edges)
        return f"{vs}|{es}"

    def __str__(self):
        return self.key

    @classmethod
    def from_key(cls, key: str) -> "TypeInvariant":
        vs, es = key.split("|")
        verts = []
        for tok in vs.split(","):
            g, b = tok[1:].split("b")
            verts.append((int(g), int(b)))
        edges = []
        if es:
            for tok in es.split(","):
                uv, w = tok.split(":")
                u, v = uv.split("-")
                edges.append((int(u), int(v), int(w)))
        return cls(tuple(verts), tuple(edges))

    @property
    def num_components(self) -> int:
        return len(self.edges)


def canonical_type(vertices: Sequence[Tuple[int, int]],
                   edges: Sequence[Tuple[int, int, int]]) -> TypeInvariant:
    """Minimal encoding over all label-preserving vertex orders."""
    n = len(vertices)
    labels = sorted(set(vertices))
    groups = [[v for v in range(n) if vertices[v] == lab] for lab in labels]
    best = None
    for perms in itertools.product(*(itertools.permutations(g) for g in groups)):
        order = [v for p in perms for v in p]
        pos = {v: k for k, v in enumerate(order)}
        enc = tuple(sorted((min(pos[u], pos[v]), max(pos[u], pos[v]), w) for u, v, w in edges))
        if best is None or enc < best:
            best = enc
    verts = tuple(vertices[v] for g in groups for v in g)
    return TypeInvariant(verts, best if best is not None else ())


@dataclass(frozen=True)
class MultiCurve:
    coords: DTCoordinates
    components: Tuple[Tuple[Component, int], ...]
    type_invariant: TypeInvariant = field(repr=False)

    @property
    def is_empty(self) -> bool:
        return not self.components

    def remeasure(self, num_cuffs: int) -> Tuple[int, ...]:
        out = [0] * num_cuffs
        for comp, w in self.components:
            for i, x in enumerate(comp.crossings(num_cuffs)):
                out[i] += w * x
        return tuple(out)


# --------------------------------------------------------------------------
# decoding
# --------------------------------------------------------------------------

class _UF:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent
        p.setdefault(x, x)
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _cross(dec: PantsDecomposition, c: DTCoordinates, p: int, slot: int, rank: int):
    i = dec.slot_cuff[p][slot]
    q, slot2 = dec.other_side(p, slot)
    m, t = c.m[i], c.t[i]
    j = (m - 1 - rank + t) % m
    w = (m - 1 - rank + t) // m
    return i, q, slot2, j, w


def decode(dec: PantsDecomposition, c: DTCoordinates) -> MultiCurve:
    """Trace the strands of ``c`` into a weighted multicurve."""
    ok, reason = validate(dec, c)
    if not ok:
        raise CoordinateError(f"invalid coordinates {c}: {reason}")
    n = dec.num_pants
    layouts = []
    for p in range(n):
        ms = tuple(c.m[i] for i in dec.slot_cuff[p])
        layouts.append(pants_arcs(*ms))

    # trace strands into closed curves
    visited = set()
    traced: List[Tuple[Step, ...]] = []
    for p in range(n):
        for k in range(len(layouts[p].arcs)):
            if (p, k) in visited:
                continue
            steps = []
            cp, ck, fwd = p, k, True
            while True:
                if (cp, ck) in visited:
                    if (cp, ck) == (p, k) and fwd:
                        break
                    raise DecodeError("strand tracing revisited an arc out of order")
                visited.add((cp, ck))
                su, ru, sv, rv = layouts[cp].arcs[ck]
                a, ra, b, rb = (su, ru, sv, rv) if fwd else (sv, rv, su, ru)
                aa = 0 if su != sv else (1 if fwd else -1)
                i, q, slot2, j, w = _cross(dec, c, cp, b, rb)
                steps.append(Step(cp, a, ra, b, aa, i, rb, w))
                nk, end = layouts[q].at[(slot2, j)]
                cp, ck, fwd = q, nk, end == 0
            traced.append(tuple(steps))

    vertices, edges, members = _complement(dec, c, layouts, traced)

    comps: List[Tuple[Component, int]] = []
    for cls_members, weight in members:
        cuff = next((x for kind, x in cls_members if kind == "cuff"), None)
        if cuff is not None:
            comp = Component(cuff=cuff)
        else:
            comp = Component(steps=traced[cls_members[0][1]])
        comps.append((comp, weight))
    inv = canonical_type(vertices, edges)
    return MultiCurve(c, tuple(comps), inv)


def _complement(dec, c, layouts, traced):
    """Cut along every traced strand and cuff curve; return the type graph data."""
    uf = _UF()
    region_of_gap: Dict[Tuple[int, int, int], Tuple[int, int]] = {}
    region_chi: Dict[Tuple[int, int], int] = {}
    circle_region: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for p, lay in enumerate(layouts):
        rid = 0
        for j in range(3):
            for k in range(lay.m[j]):
                if (p, j, k) in region_of_gap:
                    continue
                # follow the boundary cycle of this region
                sj, sk = j, k
                while (p, sj, sk) not in region_of_gap:
                    region_of_gap[(p, sj, sk)] = (p, rid)
                    sj, sk = lay.partner(sj, (sk + 1) % lay.m[sj])
                region_chi[(p, rid)] = 1
                rid += 1
        if not lay.arcs:
            region_chi[(p, rid)] = 2
            for j in range(3):
                circle_region[(p, j)] = (p, rid)
        for j in range(3):
            if lay.m[j] == 0:
                if lay.arcs:
                    gj, gk = lay.circle_gap(j)
                    circle_region[(p, j)] = region_of_gap[(p, gj, gk)]
                region_chi[circle_region[(p, j)]] -= 1
    for r in region_chi:
        uf.find(r)

    interval_glues = []
    cuff_sides = []  # (cuff, region side 0, region side 1)
    for i, ((p, a), (q, b)) in enumerate(dec.cuffs):
        m, t = c.m[i], c.t[i]
        if m > 0:
            for k in range(m):
                j = (m - 1 - k + t) % m
                r1 = region_of_gap[(p, a, k)]
                r2 = region_of_gap[(q, b, (j - 1) % m)]
                uf.union(r1, r2)
                interval_glues.append(r1)
        elif t == 0:
            uf.union(circle_region[(p, a)], circle_region[(q, b)])
        else:
            cuff_sides.append((i, circle_region[(p, a)], circle_region[(q, b)]))

    chi: Dict = {}
    for r, x in region_chi.items():
        root = uf.find(r)
        chi[root] = chi.get(root, 0) + x
    for r in interval_glues:
        root = uf.find(r)
        chi[root] -= 1

    # sides of every curve: (member, left piece, right piece)
    sides = []
    for idx, steps in enumerate(traced):
        st = steps[0]
        left = uf.find(region_of_gap[(st.pants, st.exit, st.exit_rank)])
        right = uf.find(region_of_gap[(st.pants, st.entry, st.entry_rank)])
        sides.append((("arc", idx), left, right))
    for i, r1, r2 in cuff_sides:
        sides.append((("cuff", i), uf.find(r1), uf.find(r2)))

    bcount: Dict = {r: 0 for r in chi}
    for _, l, r in sides:
        bcount[l] += 1
        bcount[r] += 1
    if sum(chi.values()) != 2 - 2 * dec.genus:
        raise DecodeError("Euler characteristic of the complement is wrong")
    genus = {}
    for r in chi:
        g2 = 2 - chi[r] - bcount[r]
        if g2 < 0 or g2 % 2:
            raise DecodeError("complementary piece with impossible topology")
        genus[r] = g2 // 2
        if genus[r] == 0 and bcount[r] == 1:
            raise DecodeError("decoded curve bounds a disk")

    # merge parallel copies across annuli
    annulus = {r for r in chi if genus[r] == 0 and bcount[r] == 2}
    cuf = _UF()
    for mem, _, _ in sides:
        cuf.find(mem)
    by_piece: Dict = {}
    for mem, l, r in sides:
        by_piece.setdefault(l, []).append(mem)
        by_piece.setdefault(r, []).append(mem)
    for r in annulus:
        x, y = by_piece[r]
        if x == y:
            raise DecodeError("annulus bounded by a single curve")
        cuf.union(x, y)

    pieces = sorted(r for r in chi if r not in annulus)
    index = {r: k for k, r in enumerate(pieces)}
    classes: Dict = {}
    for mem, l, r in sides:
        root = cuf.find(mem)
        entry = classes.setdefault(root, [[], []])
        entry[0].append(mem)
        for piece in (l, r):
            if piece not in annulus:
                entry[1].append(index[piece])
    weights = {"cuff": lambda i: c.t[i], "arc": lambda i: 1}
    vertices = [(genus[r], bcount[r]) for r in pieces]
    edges = []
    members = []
    for root in sorted(classes, key=lambda x: min(classes[x][0])):
        mems, ends = classes[root]
        if len(ends) != 2:
            raise DecodeError("parallel class does not have two outer sides")
        mems = sorted(mems)
        w = sum(weights[kind](i) for kind, i in mems)
        edges.append((ends[0], ends[1], w))
        members.append((mems, w))
    return vertices, edges, members


def topological_type(dec: PantsDecomposition, mc: MultiCurve | DTCoordinates) -> TypeInvariant:
    if isinstance(mc, DTCoordinates):
        mc = decode(dec, mc)
    return mc.type_invariant


def type_of(dec: PantsDecomposition, c: DTCoordinates) -> TypeInvariant:
    return decode(dec, c).type_invariant
