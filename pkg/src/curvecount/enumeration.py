"""Enumeration of integral multicurves in norm balls and sectors, and orbit counting."""
from __future__ import annotations

import csv
import functools
import io
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .curves import TypeInvariant, canonical_type, decode
from .dtcoords import DTCoordinates, validate
from .surface import PantsDecomposition, Torus, TORUS

Model = Union[PantsDecomposition, Torus]


# ---------------------------------------------------------------------------
# sectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sector:
    """Cone over a box in the unit norm sphere.

    ``signs[i]`` is +1 (``t_i >= 0``), -1 (``t_i < 0``) or 0 (either).  ``box``
    holds one ``(lo, hi)`` interval for each normalised coordinate, first the
    ``m_i / |c|`` then the ``|t_i| / |c|``.  Intervals are half open, except
    that ``hi = 1`` is inclusive, so adjacent boxes do not overlap.
    """

    signs: Tuple[int, ...]
    box: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        if len(self.box) != 2 * len(self.signs):
            raise ValueError("box needs one interval per normalised coordinate")
        for lo, hi in self.box:
            if not (0.0 <= lo < hi <= 1.0):
                raise ValueError(f"bad interval ({lo}, {hi})")
        if any(s not in (-1, 0, 1) for s in self.signs):
            raise ValueError("signs must be -1, 0 or +1")

    @classmethod
    def full(cls, dim: int) -> "Sector":
        return cls((0,) * dim, ((0.0, 1.0),) * (2 * dim))

    @classmethod
    def slab(cls, dim: int, coord: int, lo: float, hi: float) -> "Sector":
        """Everything with normalised coordinate ``coord`` in ``[lo, hi)``."""
        box = [(0.0, 1.0)] * (2 * dim)
        box[coord] = (lo, hi)
        return cls((0,) * dim, tuple(box))

    @property
    def dim(self) -> int:
        return len(self.signs)

    def contains(self, m: Sequence[int], t: Sequence[int]) -> bool:
        nrm = sum(m) + sum(abs(x) for x in t)
        if nrm == 0:
            return False
        d = self.dim
        for i in range(d):
            s = self.signs[i]
            if (s > 0 and t[i] < 0) or (s < 0 and t[i] >= 0):
                return False
        vals = [x / nrm for x in m] + [abs(x) / nrm for x in t]
        for v, (lo, hi) in zip(vals, self.box):
            if v < lo - 1e-12:
                return False
            if hi < 1.0 and v >= hi - 1e-12:
                return False
        return True

    def arrays(self):
        lo = np.array([b[0] for b in self.box], dtype=np.float64)
        hi = np.array([b[1] for b in self.box], dtype=np.float64)
        return np.array(self.signs, dtype=np.int64), lo, hi

    def volume_fraction(self, samples: int = 200000, seed: int = 0) -> float:
        """Monte Carlo fraction of the unit ball's Lebesgue volume inside the cone (m >= 0 half)."""
        rng = np.random.default_rng(seed)
        d = self.dim
        x = rng.exponential(size=(samples, 2 * d))
        x /= x.sum(axis=1, keepdims=True)
        sg = rng.choice([-1, 1], size=(samples, d))
        inside = np.ones(samples, dtype=bool)
        for i in range(d):
            if self.signs[i] > 0:
                inside &= sg[:, i] > 0
            elif self.signs[i] < 0:
                inside &= sg[:, i] < 0
        for k, (lo, hi) in enumerate(self.box):
            inside &= x[:, k] >= lo
            if hi < 1.0:
                inside &= x[:, k] < hi
        return float(inside.mean())


# ---------------------------------------------------------------------------
# plain enumeration
# ---------------------------------------------------------------------------

def _m_vectors(d: int, budget: int) -> Iterator[Tuple[int, ...]]:
    if d == 0:
        yield ()
        return
    for x in range(budget + 1):
        for rest in _m_vectors(d - 1, budget - x):
            yield (x,) + rest


def _t_vectors(m: Sequence[int], budget: int) -> Iterator[Tuple[int, ...]]:
    if not m:
        yield ()
        return
    lo = -budget if m[0] > 0 else 0
    for x in range(lo, budget + 1):
        for rest in _t_vectors(m[1:], budget - abs(x)):
            yield (x,) + rest


def enumerate_points(model: Model, L: int, sector: Optional[Sector] = None) -> Iterator:
    """Every valid nonzero point with norm <= L (and in ``sector``), each exactly once.

    Yields :class:`DTCoordinates` on a closed surface, ``(p, q)`` tuples on the torus.
    Order: crossings cuff by cuff, then twists cuff by cuff, increasing.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if isinstance(model, Torus):
        for p in range(-L, L + 1):
            r = L - abs(p)
            for q in range(-r, r + 1):
                if (p or q) and (sector is None or sector.contains((abs(p),), (q,))):
                    yield (p, q)
        return
    d = model.num_cuffs
    pants_cuffs = model.slot_cuff
    for m in _m_vectors(d, L):
        if any(sum(m[i] for i in cs) % 2 for cs in pants_cuffs):
            continue
        for t in _t_vectors(m, L - sum(m)):
            if not any(m) and not any(t):
                continue
            if sector is not None and not sector.contains(m, t):
                continue
            yield DTCoordinates(m, t)


enumerate_multicurves = enumerate_points


# ---------------------------------------------------------------------------
# type keys
# ---------------------------------------------------------------------------

def torus_type(p: int, q: int) -> str:
    return f"torus|{math.gcd(abs(p), abs(q))}"


TORUS_SCC = "torus|1"


def scc_key(genus: int, split: int = 0) -> str:
    """Key of a weight-one simple closed curve: nonseparating (``split = 0``) or
    separating off genus ``split``."""
    if split == 0:
        return canonical_type([(genus - 1, 2)], [(0, 0, 1)]).key
    return canonical_type([(split, 1), (genus - split, 1)], [(0, 1, 1)]).key


def nonseparating_key(genus: int) -> str:
    return scc_key(genus, 0)


def separating_key(genus: int, split: int = 1) -> str:
    return scc_key(genus, split)


class TypeCache:
    """Memoised type keys; the signature is ``(m, t mod m, twists on uncrossed cuffs)``."""

    def __init__(self, dec: PantsDecomposition):
        self.dec = dec
        self.memo: Dict[tuple, str] = {}
        self.hits = 0

    def key(self, c: DTCoordinates) -> str:
        sig = (c.m, tuple(t % m if m else t for m, t in zip(c.m, c.t)))
        hit = self.memo.get(sig)
        if hit is not None:
            self.hits += 1
            return hit
        canon = DTCoordinates(c.m, sig[1])
        k = decode(self.dec, canon).type_invariant.key
        self.memo[sig] = k
        return k


# ---------------------------------------------------------------------------
# count tables
# ---------------------------------------------------------------------------

@dataclass
class CountTable:
    rows: List[Tuple[float, str, int]]
    metadata: Dict = field(default_factory=dict)

    def keys(self) -> List[str]:
        return sorted({k for _, k, _ in self.rows})

    def grid(self) -> List[float]:
        return sorted({L for L, _, _ in self.rows})

    def series(self, key: str) -> Tuple[np.ndarray, np.ndarray]:
        pts = sorted((L, c) for L, k, c in self.rows if k == key)
        return np.array([p[0] for p in pts], dtype=float), np.array([p[1] for p in pts], dtype=np.int64)

    def count(self, L, key: str) -> int:
        for LL, k, c in self.rows:
            if LL == L and k == key:
                return c
        return 0

    def total(self, L) -> int:
        return sum(c for LL, k, c in self.rows if LL == L and k != ALL_KEY)

    def to_csv(self, path: Optional[str] = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["L", "type_key", "count"])
        for L, k, c in sorted(self.rows, key=lambda r: (r[0], r[1])):
            w.writerow([_fmt_L(L), k, c])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, text: str) -> "CountTable":
        rd = csv.DictReader(io.StringIO(text))
        rows = [(float(r["L"]), r["type_key"], int(r["count"])) for r in rd]
        return cls(rows)


ALL_KEY = "*"


def _fmt_L(L) -> str:
    if float(L).is_integer():
        return str(int(L))
    return repr(float(L))


def _check_grid(grid: Sequence) -> List:
    grid = list(grid)
    if not grid:
        raise ValueError("empty L grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("L grid must be strictly increasing")
    return grid


def count_by_type(model: Model, L_grid: Sequence[int], sector: Optional[Sector] = None) -> CountTable:
    """Counts of enumerated multicurves per type key at each ``L`` (reference path)."""
    grid = _check_grid(L_grid)
    Lmax = int(grid[-1])
    per_norm: Dict[str, np.ndarray] = {}
    if isinstance(model, Torus):
        keyf = lambda pt: torus_type(*pt)
        nrmf = lambda pt: abs(pt[0]) + abs(pt[1])
    else:
        cache = TypeCache(model)
        keyf = cache.key
        nrmf = lambda c: sum(c.m) + sum(abs(x) for x in c.t)
    for pt in enumerate_points(model, Lmax, sector):
        k = keyf(pt)
        arr = per_norm.get(k)
        if arr is None:
            arr = per_norm[k] = np.zeros(Lmax + 1, dtype=np.int64)
        arr[nrmf(pt)] += 1
    rows = []
    for k in sorted(per_norm):
        cum = np.cumsum(per_norm[k])
        for L in grid:
            rows.append((L, k, int(cum[int(L)])))
    meta = {"genus": model.genus, "norm": "sum(m)+sum(|t|)", "sector": _sector_meta(sector),
            "path": "reference"}
    return CountTable(rows, meta)


def _sector_meta(sector):
    if sector is None:
        return None
    return {"signs": list(sector.signs), "box": [list(b) for b in sector.box]}


# ---------------------------------------------------------------------------
# compiled counting
# ---------------------------------------------------------------------------

def surface_arrays(dec: PantsDecomposition) -> Dict[str, np.ndarray]:
    n = dec.num_pants
    slot_cuff = np.array(dec.slot_cuff, dtype=np.int64)
    other_pants = np.zeros((n, 3), dtype=np.int64)
    other_slot = np.zeros((n, 3), dtype=np.int64)
    for p in range(n):
        for j in range(3):
            q, jj = dec.other_side(p, j)
            other_pants[p, j] = q
            other_slot[p, j] = jj
    parity = np.array(dec.parity_matrix(), dtype=np.int64)
    cuff_code = np.array([_cuff_code(dec, i) for i in range(dec.num_cuffs)], dtype=np.int64)
    return dict(slot_cuff=slot_cuff, other_pants=other_pants, other_slot=other_slot,
                parity=parity, cuff_code=cuff_code)


def _cuff_code(dec: PantsDecomposition, i: int) -> int:
    c = DTCoordinates((0,) * dec.num_cuffs, tuple(1 if k == i else 0 for k in range(dec.num_cuffs)))
    return code_of_key(dec.genus, decode(dec, c).type_invariant.key)


def code_keys(genus: int) -> List[str]:
    """Type keys of the compiled classifier's codes ``0 .. genus // 2``."""
    return [scc_key(genus, k) for k in range(genus // 2 + 1)]


def code_of_key(genus: int, key: str) -> int:
    keys = code_keys(genus)
    return keys.index(key) if key in keys else -1


def _count_job(m0s, L, arrs, genus, sector_arrays):
    from . import _kernels
    use_sector, signs, lo, hi = sector_arrays
    return _kernels.count_points(L, np.array(m0s, dtype=np.int64), arrs["slot_cuff"],
                                 arrs["other_pants"], arrs["other_slot"], arrs["parity"],
                                 arrs["cuff_code"], genus, use_sector, signs, lo, hi)


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)


def partition(n_max: int, workers: int) -> List[List[int]]:
    """Round-robin split of the first crossing number ``0..n_max`` into work items."""
    workers = max(1, int(workers))
    parts = [[m0 for m0 in range(n_max + 1) if m0 % workers == w] for w in range(workers)]
    return [p for p in parts if p]


def run_partitioned(func, args: tuple, n_max: int, workers: int = 1) -> list:
    """Apply ``func(m0s, *args)`` to every part; results come back in part order.

    ``func`` must be a module-level function so it can be sent to worker processes.
    """
    parts = partition(n_max, workers)
    if len(parts) == 1:
        return [func(parts[0], *args)]
    with ProcessPoolExecutor(max_workers=len(parts)) as ex:
        return list(ex.map(functools.partial(_star, func, args), parts))


def _star(func, args, part):
    return func(part, *args)


def count_histogram(dec: PantsDecomposition, L: int, sector: Optional[Sector] = None,
                    workers: int = 1) -> np.ndarray:
    """``hist[slot, n]``: slot 0 all points of norm ``n``, slot ``1 + k`` single curves with code ``k``.

    Work is split by the crossing number of cuff 1; the merge is a plain sum,
    so the result does not depend on ``workers``.
    """
    arrs = surface_arrays(dec)
    d = dec.num_cuffs
    if sector is None:
        sa = (False, np.zeros(d, np.int64), np.zeros(2 * d), np.ones(2 * d))
    else:
        signs, lo, hi = sector.arrays()
        sa = (True, signs, lo, hi)
    results = run_partitioned(_count_job, (L, arrs, dec.genus, sa), L, workers)
    total = results[0].copy()
    for r in results[1:]:
        total += r
    return total


def count_in_sector(model: Model, type_key: Union[str, TypeInvariant], sector: Optional[Sector],
                    L_grid: Sequence[int], workers: int = 1) -> CountTable:
    """Counts of one type inside a sector; single curves use the compiled path."""
    grid = _check_grid(L_grid)
    key = type_key.key if isinstance(type_key, TypeInvariant) else type_key
    if isinstance(model, Torus) or code_of_key(model.genus, key) < 0:
        full = count_by_type(model, grid, sector)
        rows = [(L, key, full.count(L, key)) for L in grid]
        return CountTable(rows, dict(full.metadata, type=key))
    hist = count_histogram(model, int(grid[-1]), sector, workers)
    code = code_of_key(model.genus, key)
    cum = np.cumsum(hist[1 + code])
    allcum = np.cumsum(hist[0])
    rows = []
    for L in grid:
        rows.append((L, key, int(cum[int(L)])))
        rows.append((L, ALL_KEY, int(allcum[int(L)])))
    meta = {"genus": model.genus, "norm": "sum(m)+sum(|t|)", "sector": _sector_meta(sector),
            "path": "compiled", "type": key, "workers": workers}
    return CountTable(rows, meta)


def count_scc_table(dec: PantsDecomposition, L_grid: Sequence[int], sector: Optional[Sector] = None,
                    workers: int = 1) -> CountTable:
    """All points plus every weight-one simple closed curve type, via the compiled path."""
    grid = _check_grid(L_grid)
    hist = count_histogram(dec, int(grid[-1]), sector, workers)
    keys = code_keys(dec.genus)
    rows = []
    cums = [np.cumsum(h) for h in hist]
    for L in grid:
        rows.append((L, ALL_KEY, int(cums[0][int(L)])))
        for k, key in enumerate(keys):
            rows.append((L, key, int(cums[1 + k][int(L)])))
    meta = {"genus": dec.genus, "norm": "sum(m)+sum(|t|)", "sector": _sector_meta(sector),
            "path": "compiled", "workers": workers}
    return CountTable(rows, meta)


# ---------------------------------------------------------------------------
# exact lattice counts and the leading coefficient
# ---------------------------------------------------------------------------

def parity_rank(dec: PantsDecomposition) -> int:
    """Rank over GF(2) of the per-pants parity conditions."""
    rows = [sum((x % 2) << i for i, x in enumerate(r)) for r in dec.parity_matrix()]
    rank = 0
    ncols = dec.num_cuffs
    for col in range(ncols):
        pivot = next((r for r in rows if (r >> col) & 1), None)
        if pivot is None:
            continue
        rows.remove(pivot)
        rows = [r ^ pivot if (r >> col) & 1 else r for r in rows]
        rank += 1
    return rank


def leading_coefficient(model: Model) -> Fraction:
    """Limit of ``#points(norm <= L) / L^h`` as an exact rational.

    Lebesgue volume of ``{m >= 0, sum m + sum |t| <= 1}`` in dimension
    ``2d`` is ``2^d / (2d)!``; the parity conditions keep a ``2^-r`` share of
    the lattice.
    """
    if isinstance(model, Torus):
        return Fraction(2)
    d = model.num_cuffs
    return Fraction(2 ** d, math.factorial(2 * d)) / 2 ** parity_rank(model)


def exact_lattice_count(model: Model, L: int) -> int:
    """Number of valid nonzero points with norm <= L, by convolution of per-coordinate counts."""
    if isinstance(model, Torus):
        return 2 * L * (L + 1)
    d = model.num_cuffs
    signed = [1] + [2] * L
    unsigned = [1] * (L + 1)

    def conv(a, b):
        out = [0] * (L + 1)
        for i, x in enumerate(a):
            if x:
                for j in range(L + 1 - i):
                    out[i + j] += x * b[j]
        return out

    # cumulative counts A_z(B) of twist vectors with z uncrossed cuffs
    A = {}
    for z in range(d + 1):
        series = [1] + [0] * L
        for _ in range(z):
            series = conv(series, unsigned)
        for _ in range(d - z):
            series = conv(series, signed)
        A[z] = list(itertools.accumulate(series))
    total = 0
    pants_cuffs = model.slot_cuff
    for m in _m_vectors(d, L):
        if any(sum(m[i] for i in cs) % 2 for cs in pants_cuffs):
            continue
        z = sum(1 for x in m if x == 0)
        total += A[z][L - sum(m)]
    return total - 1
