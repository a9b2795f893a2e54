"""Hyperbolic metrics from Fenchel--Nielsen data and lengths of multicurves.

Geometry is done with orthonormal frames in the upper half plane, stored as
elements of SL(2, R).  ``T(x)`` moves a frame forward by ``x`` along its
geodesic and ``R(phi)`` turns it counter-clockwise by ``phi``.  Each pants is
two right-angled hexagons; walking once around a hexagon with the interior
on the left is ``prod_j T(l_j / 2) R T(d_{j,j+1}) R`` and equals ``+-I``.

A decoded curve is a cyclic list of steps.  The frame at a cuff point points
in the direction of increasing ``s`` (pants on the left).  One step is

* a seam move ``R T(d) R`` between the seam feet of its entry and exit slots
  (same-slot arcs run out along the seam, once around the neighbouring slot
  and back),
* a half turn at the cuff, followed by
* a slide ``T(f_exit + f_entry' - theta_i + (w - 1) l_i)`` along the cuff,
  where ``f`` are the positions of the seam feet (``0`` or ``l / 2``) and
  ``w`` is the winding recorded by the decoder.

The twist ``theta_i`` is a length: increasing it by ``l_i`` has the same
effect on every curve as one negative Dehn twist about cuff ``i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .curves import Component, MultiCurve, Step, decode
from .dtcoords import DTCoordinates, as_coords
from .surface import PantsDecomposition


class GeometryError(RuntimeError):
    """A curve produced a non-hyperbolic holonomy; indicates a construction bug."""


# --------------------------------------------------------------------------
# SL(2, R) frame moves
# --------------------------------------------------------------------------

def translate(x: float) -> np.ndarray:
    e = math.exp(x / 2)
    return np.array([[e, 0.0], [0.0, 1.0 / e]])


def rotate(phi: float) -> np.ndarray:
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    return np.array([[c, s], [-s, c]])


QUARTER = rotate(math.pi / 2)
HALF = rotate(math.pi)


def length_from_trace(tr: float) -> float:
    """Translation length ``2 arccosh(|tr| / 2)``; requires ``|tr| > 2``."""
    a = abs(tr) / 2
    if not a > 1:
        raise GeometryError(f"holonomy with |trace| = {abs(tr)!r} is not hyperbolic")
    # arccosh(a) = log1p((a - 1) + sqrt((a - 1)(a + 1)))
    return 2 * math.log1p((a - 1) + math.sqrt((a - 1) * (a + 1)))


def seam_length(l_k: float, l_k1: float, l_opp: float) -> float:
    """Common perpendicular between boundaries ``k`` and ``k+1`` of a pants."""
    a, b, c = l_k / 2, l_k1 / 2, l_opp / 2
    return math.acosh((math.cosh(c) + math.cosh(a) * math.cosh(b)) / (math.sinh(a) * math.sinh(b)))


# --------------------------------------------------------------------------
# metrics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FenchelNielsen:
    lengths: Tuple[float, ...]
    twists: Tuple[float, ...]

    def __post_init__(self):
        ls = tuple(float(x) for x in self.lengths)
        ts = tuple(float(x) for x in self.twists)
        if len(ls) != len(ts):
            raise ValueError("lengths and twists must have the same size")
        for x in ls:
            if not (math.isfinite(x) and x > 0):
                raise ValueError(f"cuff lengths must be finite and positive, got {x!r}")
        for x in ts:
            if not math.isfinite(x):
                raise ValueError(f"twists must be finite, got {x!r}")
        object.__setattr__(self, "lengths", ls)
        object.__setattr__(self, "twists", ts)

    @classmethod
    def parse(cls, text: str) -> "FenchelNielsen":
        try:
            ls, ts = text.strip().split(";")
            return cls(tuple(float(x) for x in ls.split(",")), tuple(float(x) for x in ts.split(",")))
        except ValueError as exc:
            raise ValueError(f"cannot parse Fenchel-Nielsen data {text!r}: {exc}") from exc

    def format(self) -> str:
        return ",".join(repr(x) for x in self.lengths) + ";" + ",".join(repr(x) for x in self.twists)

    def with_twist(self, i: int, theta: float) -> "FenchelNielsen":
        ts = list(self.twists)
        ts[i] = theta
        return FenchelNielsen(self.lengths, tuple(ts))


@dataclass(frozen=True)
class SurfaceGroupRep:
    """Holonomy of the frame-path alphabet of a pants decomposition.

    Generators:

    ``("A", p, a, b)``  seam move from slot ``a`` to the adjacent slot ``b`` of pants ``p``;
    ``("X", i)``        half turn onto the other side of cuff ``i`` combined with the twist;
    ``("S", i)``        slide by half the length of cuff ``i``.

    ``("S", i)`` squared is the loop around cuff ``i``.
    """

    dec: PantsDecomposition
    fn: FenchelNielsen
    matrices: Dict[tuple, np.ndarray]

    def matrix(self, gen: tuple, power: int = 1) -> np.ndarray:
        g = self.matrices[gen]
        if power < 0:
            g = np.linalg.inv(g)
            power = -power
        return np.linalg.matrix_power(g, power)

    def evaluate(self, word: Sequence[Tuple[tuple, int]]) -> np.ndarray:
        out = np.eye(2)
        for gen, power in word:
            out = out @ self.matrix(gen, power)
        return out

    def cuff_word(self, i: int) -> List[Tuple[tuple, int]]:
        return [(("S", i), 2)]

    def check(self, tol: float = 1e-9) -> None:
        """Raise if a generator is not in SL(2, R) or a cuff trace is off."""
        for gen, g in self.matrices.items():
            if abs(np.linalg.det(g) - 1) > 1e-12:
                raise GeometryError(f"generator {gen} has determinant {np.linalg.det(g)}")
        for i, li in enumerate(self.fn.lengths):
            tr = abs(np.trace(self.evaluate(self.cuff_word(i))))
            if abs(tr - 2 * math.cosh(li / 2)) > tol * max(1.0, tr):
                raise GeometryError(f"cuff {i + 1} trace {tr} does not match its length")


def _slot_lengths(dec: PantsDecomposition, fn: FenchelNielsen, p: int) -> Tuple[float, float, float]:
    return tuple(fn.lengths[i] for i in dec.slot_cuff[p])


def build_rep(dec: PantsDecomposition, fn: FenchelNielsen) -> SurfaceGroupRep:
    if len(fn.lengths) != dec.num_cuffs:
        raise ValueError(f"expected {dec.num_cuffs} cuff lengths, got {len(fn.lengths)}")
    mats: Dict[tuple, np.ndarray] = {}
    for p in range(dec.num_pants):
        ls = _slot_lengths(dec, fn, p)
        for a in range(3):
            b = (a + 1) % 3
            d = seam_length(ls[a], ls[b], ls[(a + 2) % 3])
            g = QUARTER @ translate(d) @ QUARTER
            mats[("A", p, a, b)] = g
            mats[("A", p, b, a)] = g
    for i, (li, th) in enumerate(zip(fn.lengths, fn.twists)):
        mats[("X", i)] = HALF @ translate(-th)
        mats[("S", i)] = translate(li / 2)
    rep = SurfaceGroupRep(dec, fn, mats)
    rep.check()
    return rep


# --------------------------------------------------------------------------
# curves to words
# --------------------------------------------------------------------------

def _entry_foot(st: Step) -> int:
    """Seam-foot position at the start of a step, in half-lengths of the entry slot."""
    if st.aa or st.exit == (st.entry + 1) % 3:
        return 1
    return 0


def _exit_foot(st: Step) -> int:
    if st.aa or st.exit == (st.entry - 1) % 3:
        return 1
    return 0


def _arc_word(st: Step) -> List[Tuple[tuple, int]]:
    p, a = st.pants, st.entry
    if not st.aa:
        return [(("A", p, a, st.exit), 1)]
    b = (a + 1) % 3
    return [(("A", p, a, b), 1), (("S", st.slot_cuffs[b]), 2 * st.aa), (("A", p, b, a), 1)]


def _reduce(word: List[Tuple[tuple, int]]) -> List[Tuple[tuple, int]]:
    """Merge adjacent powers of the same generator, cyclically, and drop zero powers."""
    out: List[Tuple[tuple, int]] = []
    for gen, k in word:
        if out and out[-1][0] == gen:
            k += out.pop()[1]
        if k:
            out.append((gen, k))
    while len(out) > 1 and out[0][0] == out[-1][0]:
        gen, k = out.pop()
        k += out[0][1]
        out.pop(0)
        if k:
            out.insert(0, (gen, k))
    return out


@dataclass(frozen=True)
class _SlotStep:
    pants: int
    entry: int
    exit: int
    aa: int
    cuff: int
    winding: int
    slot_cuffs: Tuple[int, int, int]


def curve_to_word(dec: PantsDecomposition, comp: Component) -> List[Tuple[tuple, int]]:
    """Cyclically reduced word in the path alphabet of :class:`SurfaceGroupRep`."""
    if comp.is_cuff:
        return [(("S", comp.cuff), 2)]
    steps = [_SlotStep(s.pants, s.entry, s.exit, s.aa, s.cuff, s.winding, dec.slot_cuff[s.pants])
             for s in comp.steps]
    word: List[Tuple[tuple, int]] = []
    n = len(steps)
    for k, st in enumerate(steps):
        nxt = steps[(k + 1) % n]
        word += _arc_word(st)
        word.append((("X", st.cuff), 1))
        word.append((("S", st.cuff), _exit_foot(st) + _entry_foot(nxt) + 2 * (st.winding - 1)))
    return _reduce(word)


def component_length(rep: SurfaceGroupRep, comp: Component) -> float:
    if comp.is_cuff:
        return rep.fn.lengths[comp.cuff]
    return length_from_trace(np.trace(rep.evaluate(curve_to_word(rep.dec, comp))))


def length(dec: PantsDecomposition, fn: FenchelNielsen | SurfaceGroupRep,
           mc: MultiCurve | DTCoordinates | str) -> float:
    """Hyperbolic length of a weighted multicurve."""
    rep = fn if isinstance(fn, SurfaceGroupRep) else build_rep(dec, fn)
    if not isinstance(mc, MultiCurve):
        mc = decode(dec, as_coords(mc))
    if mc.is_empty:
        raise ValueError("the empty multicurve has no length")
    return sum(w * component_length(rep, comp) for comp, w in mc.components)


# --------------------------------------------------------------------------
# compiled evaluation
# --------------------------------------------------------------------------

def geometry_arrays(dec: PantsDecomposition, fn: FenchelNielsen) -> Dict[str, np.ndarray]:
    """Flat arrays consumed by the compiled length kernels."""
    rep = build_rep(dec, fn)
    n = dec.num_pants
    seam = np.zeros((n, 3, 4))
    lslot = np.zeros((n, 3))
    for p in range(n):
        for a in range(3):
            seam[p, a] = rep.matrices[("A", p, a, (a + 1) % 3)].ravel()
            lslot[p, a] = fn.lengths[dec.slot_cuff[p][a]]
    return {"seam": seam, "lslot": lslot, "theta": np.array(fn.twists, dtype=np.float64),
            "lcuff": np.array(fn.lengths, dtype=np.float64), "collar": collar_widths(fn)}


def fast_length(dec: PantsDecomposition, fn: FenchelNielsen, c: DTCoordinates | str,
                geom: Optional[Dict[str, np.ndarray]] = None) -> float:
    """Compiled counterpart of :func:`length` (no type bookkeeping)."""
    from . import _kernels
    from .enumeration import surface_arrays
    c = as_coords(c)
    arrs = surface_arrays(dec)
    g = geom if geom is not None else geometry_arrays(dec, fn)
    x = _kernels.multicurve_length(np.array(c.m, dtype=np.int64), np.array(c.t, dtype=np.int64),
                                   arrs["slot_cuff"], arrs["other_pants"], arrs["other_slot"],
                                   g["seam"], g["lslot"], g["theta"], g["lcuff"])
    if x < 0:
        raise GeometryError(f"non-hyperbolic component in {c}")
    return x


@dataclass(frozen=True)
class PruningConstant:
    """``c_hat`` is half the smallest length-to-norm ratio seen up to ``norm_max``."""

    c_hat: float
    min_ratio: float
    argmin: DTCoordinates
    max_ratio: float
    argmax: DTCoordinates
    norm_max: int

    def to_dict(self) -> dict:
        return {"c_hat": self.c_hat, "min_ratio": self.min_ratio, "argmin": self.argmin and self.argmin.format(),
                "max_ratio": self.max_ratio, "argmax": self.argmax and self.argmax.format(),
                "norm_max": self.norm_max}


def collar_widths(fn: FenchelNielsen) -> np.ndarray:
    """Lower bound on the length a geodesic spends crossing each cuff once (twice the collar width)."""
    return np.array([2 * math.asinh(1 / math.sinh(x / 2)) for x in fn.lengths])


def _length_job(m0s, N, arrs, genus, target, geom, grid, cutoffs):
    from . import _kernels
    return _kernels.length_scan(N, np.array(m0s, dtype=np.int64), arrs["slot_cuff"],
                                arrs["other_pants"], arrs["other_slot"], arrs["parity"],
                                arrs["cuff_code"], genus, target, geom["seam"], geom["lslot"],
                                geom["theta"], geom["lcuff"], grid, cutoffs, geom["collar"])


def _scan(dec, fn, N, target, grid, cutoffs, workers=1):
    from .enumeration import run_partitioned, surface_arrays
    args = (N, surface_arrays(dec), dec.genus, target, geometry_arrays(dec, fn),
            np.asarray(grid, dtype=np.float64), np.asarray(cutoffs, dtype=np.float64))
    parts = run_partitioned(_length_job, args, N, workers)
    stats = np.array([min(p[0][0] for p in parts), max(p[0][1] for p in parts),
                      sum(p[0][2] for p in parts)])
    lo = min(parts, key=lambda p: p[0][0])[1][0]
    hi = max(parts, key=lambda p: p[0][1])[1][1]
    counts = sum(p[2] for p in parts)
    flags = sum(p[3] for p in parts)
    return stats, (lo, hi), counts, flags


def pruning_constant(dec: PantsDecomposition, fn: FenchelNielsen, norm_max: int = 12,
                     workers: int = 1) -> PruningConstant:
    """Half the minimum of ``length / norm`` over every multicurve with norm <= ``norm_max``."""
    stats, (lo, hi), _, _ = _scan(dec, fn, norm_max, -1, [0.0], [0.0], workers)
    if stats[2]:
        raise GeometryError(f"{int(stats[2])} multicurves produced non-hyperbolic holonomy")
    d = dec.num_cuffs

    def pt(row):
        return DTCoordinates(tuple(int(x) for x in row[:d]), tuple(int(x) for x in row[d:]))

    return PruningConstant(c_hat=0.5 * float(stats[0]), min_ratio=float(stats[0]), argmin=pt(lo),
                           max_ratio=float(stats[1]), argmax=pt(hi), norm_max=norm_max)


INCOMPLETE = "INCOMPLETE"
CLEAN = "clean"


def count_by_length(dec: PantsDecomposition, fn: FenchelNielsen, type_key, L_grid: Sequence[float],
                    workers: int = 1, c_hat: Optional[PruningConstant] = None):
    """``#{gamma of the given type : length(gamma) <= L}`` for each ``L``.

    Candidates are all points with norm ``<= L / c_hat``.  ``metadata["audit"]``
    records, per ``L``, how many counted points sit within 5% of both the norm
    cutoff and ``L``; any such point marks the run ``INCOMPLETE``.
    """
    from .curves import TypeInvariant
    from .enumeration import CountTable, _check_grid, code_of_key, enumerate_points

    grid = [float(x) for x in _check_grid(L_grid)]
    key = type_key.key if isinstance(type_key, TypeInvariant) else str(type_key)
    pc = c_hat if c_hat is not None else pruning_constant(dec, fn, workers=workers)
    cutoffs = [math.floor(L / pc.c_hat) for L in grid]
    N = max(1, cutoffs[-1])
    code = code_of_key(dec.genus, key)
    if code >= 0:
        stats, _, counts, flags = _scan(dec, fn, N, code, grid, cutoffs, workers)
        if stats[2]:
            raise GeometryError(f"{int(stats[2])} curves produced non-hyperbolic holonomy")
        counts, flags, path = [int(x) for x in counts], [int(x) for x in flags], "compiled"
    else:
        rep = build_rep(dec, fn)
        counts, flags = [0] * len(grid), [0] * len(grid)
        for c in enumerate_points(dec, N):
            mc = decode(dec, c)
            if mc.type_invariant.key != key:
                continue
            x = length(dec, rep, mc)
            nrm = sum(c.m) + sum(abs(v) for v in c.t)
            for k, (L, cut) in enumerate(zip(grid, cutoffs)):
                if nrm <= cut and x <= L:
                    counts[k] += 1
                    if nrm >= 0.95 * cut and x >= 0.95 * L:
                        flags[k] += 1
        path = "reference"
    status = INCOMPLETE if any(flags) else CLEAN
    rows = [(L, key, n) for L, n in zip(grid, counts)]
    meta = {"genus": dec.genus, "fn": fn.format(), "type": key, "path": path,
            "pruning": pc.to_dict(), "norm_cutoffs": cutoffs,
            "audit": {"status": status, "flags": flags}}
    return CountTable(rows, meta)
