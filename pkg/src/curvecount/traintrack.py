"""Abstract train tracks and the Thurston form on their weight spaces.

A track is stored combinatorially: branches are indices, and each switch
lists its incoming branch ends (right one first) and its outgoing ends.  No
embedding is kept; the right/left order at each switch is the only
orientation data the symplectic pairing needs.

Standard tracks realise one twist-sign orthant of Dehn--Thurston coordinates.
Each cuff contributes a gadget of four trivalent switches and six branches
carrying the weights ``(m, m+s, 2m+s, s, m, m+s)`` where ``s = |t|``.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from .dtcoords import DTCoordinates, as_coords
from .surface import PantsDecomposition

End = Tuple[int, int]  # (branch, 0 or 1)


class TrackError(ValueError):
    pass


class NonFillingTrackWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Switch:
    incoming: Tuple[End, ...]
    outgoing: Tuple[End, ...]

    @property
    def trivalent(self) -> bool:
        return len(self.incoming) == 2 and len(self.outgoing) == 1

    @property
    def e1(self) -> End:
        """Incoming end on the right of the common tangent."""
        return self.incoming[0]

    @property
    def e2(self) -> End:
        return self.incoming[1]


@dataclass(frozen=True)
class TrainTrack:
    """``loops`` are branches closed up without a switch.

    ``type_vector`` lists the numbers of sides of the complementary polygons.
    A ``partial`` track is a fragment whose branches may have free ends.
    """

    num_branches: int
    switches: Tuple[Switch, ...]
    loops: Tuple[int, ...] = ()
    type_vector: Tuple[int, ...] = ()
    orientable: bool = False
    filling: bool = True
    genus: Optional[int] = None
    partial: bool = False

    def __post_init__(self):
        seen: Dict[End, int] = {}
        for s in self.switches:
            for b, e in s.incoming + s.outgoing:
                if not (0 <= b < self.num_branches) or e not in (0, 1):
                    raise TrackError(f"bad branch end {(b, e)}")
                if (b, e) in seen:
                    raise TrackError(f"branch end {(b, e)} attached twice")
                seen[(b, e)] = 1
        for b in range(self.num_branches):
            attached = ((b, 0) in seen) + ((b, 1) in seen)
            if b in self.loops:
                if attached:
                    raise TrackError(f"loop branch {b} is attached to a switch")
            elif attached != 2 and not (self.partial and attached == 1):
                raise TrackError(f"branch {b} has {attached} attached ends")
        if self.genus is not None and self.type_vector:
            k = len(self.type_vector)
            if sum(self.type_vector) != 4 * self.genus - 4 + 2 * k:
                raise TrackError("type vector violates sum a_i = 4g - 4 + 2k")

    @property
    def maximal(self) -> bool:
        return bool(self.switches) and all(s.trivalent for s in self.switches)

    def switch_matrix(self) -> List[List[int]]:
        """One row per switch: +1 on incoming branches, -1 on outgoing ones."""
        rows = []
        for s in self.switches:
            row = [0] * self.num_branches
            for b, _ in s.incoming:
                row[b] += 1
            for b, _ in s.outgoing:
                row[b] -= 1
            rows.append(row)
        return rows

    def to_dict(self) -> dict:
        return {
            "num_branches": self.num_branches,
            "switches": [{"incoming": [list(e) for e in s.incoming],
                          "outgoing": [list(e) for e in s.outgoing]} for s in self.switches],
            "loops": list(self.loops),
            "type_vector": list(self.type_vector),
            "orientable": self.orientable,
            "filling": self.filling,
            "genus": self.genus,
            "partial": self.partial,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainTrack":
        sw = tuple(Switch(tuple(tuple(e) for e in s["incoming"]), tuple(tuple(e) for e in s["outgoing"]))
                   for s in d["switches"])
        return cls(d["num_branches"], sw, tuple(d.get("loops", ())), tuple(d.get("type_vector", ())),
                   d.get("orientable", False), d.get("filling", True), d.get("genus"),
                   d.get("partial", False))

    @classmethod
    def single_switch(cls) -> "TrainTrack":
        """Branches 0 and 1 enter (right, left) and branch 2 leaves one switch."""
        return cls(3, (Switch(((0, 0), (1, 0)), ((2, 0),)),), partial=True, filling=False)

    @classmethod
    def from_json(cls, text: str) -> "TrainTrack":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class WeightVector:
    w: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(Fraction(x) for x in self.w))

    def __len__(self):
        return len(self.w)

    def __getitem__(self, k):
        return self.w[k]

    def __add__(self, other: "WeightVector") -> "WeightVector":
        return WeightVector(tuple(a + b for a, b in zip(self.w, other.w)))

    def scale(self, c) -> "WeightVector":
        return WeightVector(tuple(Fraction(c) * a for a in self.w))

    def nonnegative(self) -> bool:
        return all(x >= 0 for x in self.w)

    def to_list(self) -> List[str]:
        return [str(x) for x in self.w]


def _weights(tau: TrainTrack, w) -> WeightVector:
    w = w if isinstance(w, WeightVector) else WeightVector(tuple(w))
    if len(w) != tau.num_branches:
        raise TrackError(f"weight vector has {len(w)} entries, track has {tau.num_branches} branches")
    return w


def validate_switch_conditions(tau: TrainTrack, w) -> bool:
    """Exact check of incoming sum == outgoing sum at every switch."""
    w = _weights(tau, w)
    for s in tau.switches:
        if sum(w[b] for b, _ in s.incoming) != sum(w[b] for b, _ in s.outgoing):
            return False
    return True


def in_weight_cone(tau: TrainTrack, w) -> bool:
    """Membership in V(tau): switch conditions and nonnegativity."""
    w = _weights(tau, w)
    return w.nonnegative() and validate_switch_conditions(tau, w)


def weight_space_dim(tau: TrainTrack) -> int:
    """Dimension of the solution space of the switch conditions (exact rank)."""
    if not tau.filling:
        warnings.warn("track is not filling; dimension formula does not apply",
                      NonFillingTrackWarning, stacklevel=2)
    if not tau.switches:
        return tau.num_branches
    rank = sympy.Matrix(tau.switch_matrix()).rank()
    return tau.num_branches - rank


def expected_dim(tau: TrainTrack) -> Optional[int]:
    """``2g + k - 1`` (orientable) or ``2g + k - 2``; ``None`` without genus and type data."""
    if tau.genus is None or not tau.type_vector:
        return None
    k = len(tau.type_vector)
    return 2 * tau.genus + k - (1 if tau.orientable else 2)


def weight_space_basis(tau: TrainTrack) -> List[WeightVector]:
    if not tau.switches:
        return [WeightVector(tuple(1 if j == b else 0 for j in range(tau.num_branches)))
                for b in range(tau.num_branches)]
    basis = sympy.Matrix(tau.switch_matrix()).nullspace()
    return [WeightVector(tuple(Fraction(int(x.p), int(x.q)) for x in v)) for v in basis]


def thurston_form(tau: TrainTrack, u, v) -> Fraction:
    """``1/2 * sum over switches of u(e1) v(e2) - u(e2) v(e1)``."""
    if not tau.maximal:
        raise TrackError("the Thurston form needs a maximal (trivalent) track")
    u, v = _weights(tau, u), _weights(tau, v)
    for x in (u, v):
        if not validate_switch_conditions(tau, x):
            raise TrackError("weights violate the switch conditions")
    total = Fraction(0)
    for s in tau.switches:
        (a, _), (b, _) = s.e1, s.e2
        total += u[a] * v[b] - u[b] * v[a]
    return total / 2


def gram_matrix(tau: TrainTrack, basis: Optional[Sequence[WeightVector]] = None) -> sympy.Matrix:
    basis = list(basis) if basis is not None else weight_space_basis(tau)
    n = len(basis)
    return sympy.Matrix(n, n, lambda i, j: sympy.Rational(thurston_form(tau, basis[i], basis[j])))


def recurrence_certificate(tau: TrainTrack) -> Optional[WeightVector]:
    """A strictly positive exact solution of the switch conditions, or ``None``.

    The candidate comes from a linear program and is accepted only after an
    exact check.
    """
    from scipy.optimize import linprog

    n = tau.num_branches
    A = tau.switch_matrix() or [[0] * n]
    res = linprog(c=[1] * n, A_eq=A, b_eq=[0] * len(A), bounds=[(1, None)] * n, method="highs")
    if not res.success:
        return None
    w = WeightVector(tuple(Fraction(x).limit_denominator(10 ** 6) for x in res.x))
    if all(x > 0 for x in w.w) and validate_switch_conditions(tau, w):
        return w
    # the vertex found by the solver is integral for these constraint matrices;
    # fall back to rounding before giving up
    w = WeightVector(tuple(Fraction(round(x)) for x in res.x))
    if all(x > 0 for x in w.w) and validate_switch_conditions(tau, w):
        return w
    return None


# --------------------------------------------------------------------------
# standard tracks
# --------------------------------------------------------------------------

# gadget branches; switch slots per switch (e1, e2, out)
_GADGET = (
    ((0, "e1"), (1, "e1")),
    ((0, "e2"), (1, "out")),
    ((0, "out"), (2, "out")),
    ((1, "e2"), (3, "e2")),
    ((2, "e1"), (3, "e1")),
    ((2, "e2"), (3, "out")),
)
_GADGET_WEIGHTS = ((1, 0), (1, 1), (2, 1), (0, 1), (1, 0), (1, 1))  # coefficients of (m, |t|)
_NORM_BRANCHES = (0, 3)
_LOOP_BRANCHES = (1, 2, 3, 5)


def _gadget_switches(base: int, mirrored: bool) -> List[Switch]:
    slots: Dict[Tuple[int, str], End] = {}
    for b, ends in enumerate(_GADGET):
        for e, (sw, slot) in enumerate(ends):
            slots[(sw, slot)] = (base + b, e)
    out = []
    for sw in range(4):
        e1, e2 = slots[(sw, "e1")], slots[(sw, "e2")]
        if mirrored:
            e1, e2 = e2, e1
        out.append(Switch((e1, e2), (slots[(sw, "out")],)))
    return out


@dataclass(frozen=True)
class ChartMap:
    """Linear map from one orthant of DT coordinates into the weights of a standard track.

    ``matrix[b]`` holds the coefficients of ``(m_1..m_n, |t_1|..|t_n|)`` in branch ``b``.
    """

    orthant: Tuple[int, ...]
    matrix: Tuple[Tuple[int, ...], ...]
    norm_branches: Tuple[int, ...]
    loop_branches: Tuple[Tuple[int, ...], ...] = field(repr=False)

    def contains(self, c: DTCoordinates) -> bool:
        return all((t >= 0) if s > 0 else (t <= 0) for s, t in zip(self.orthant, c.t))

    def __call__(self, c) -> WeightVector:
        c = as_coords(c)
        if not self.contains(c):
            raise TrackError(f"{c} is not in orthant {self.orthant}")
        x = list(c.m) + [abs(t) for t in c.t]
        return WeightVector(tuple(sum(a * b for a, b in zip(row, x)) for row in self.matrix))

    def norm(self, w: WeightVector) -> Fraction:
        return sum((w[b] for b in self.norm_branches), Fraction(0))


def standard_track(dec: PantsDecomposition, orthant: Sequence[int]) -> Tuple[TrainTrack, ChartMap]:
    """Maximal track whose weight cone receives the given twist-sign orthant."""
    n = dec.num_cuffs
    orthant = tuple(1 if s >= 0 else -1 for s in orthant)
    if len(orthant) != n:
        raise TrackError(f"orthant needs {n} signs")
    switches: List[Switch] = []
    matrix: List[Tuple[int, ...]] = []
    for i in range(n):
        base = 6 * i
        switches += _gadget_switches(base, orthant[i] < 0)
        for cm, ct in _GADGET_WEIGHTS:
            row = [0] * (2 * n)
            row[i], row[n + i] = cm, ct
            matrix.append(tuple(row))
    g = dec.genus
    tau = TrainTrack(num_branches=6 * n, switches=tuple(switches), type_vector=(3,) * (4 * g - 4),
                     orientable=False, filling=True, genus=g)
    chart = ChartMap(orthant, tuple(matrix),
                     tuple(6 * i + b for i in range(n) for b in _NORM_BRANCHES),
                     tuple(tuple(6 * i + b for b in _LOOP_BRANCHES) for i in range(n)))
    return tau, chart
