"""Dehn--Thurston coordinates of integral multicurves.

``m[i]`` is the number of times the multicurve crosses cuff ``i`` and ``t[i]``
the twist about cuff ``i`` measured in strands: shifting the gluing of the
strands by ``m[i]`` positions is one full Dehn twist.  When ``m[i] == 0`` the
twist records ``t[i]`` parallel copies of cuff ``i`` and must be ``>= 0``.

Text format: ``"m1,...,mn;t1,...,tn"``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

from .surface import PantsDecomposition


class CoordinateError(ValueError):
    pass


@dataclass(frozen=True)
class DTCoordinates:
    m: Tuple[int, ...]
    t: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        object.__setattr__(self, "t", tuple(int(x) for x in self.t))
        if len(self.m) != len(self.t):
            raise CoordinateError("m and t must have the same length")

    @property
    def dim(self) -> int:
        return len(self.m)

    @classmethod
    def zero(cls, n: int) -> "DTCoordinates":
        return cls((0,) * n, (0,) * n)

    @classmethod
    def parse(cls, text: str) -> "DTCoordinates":
        try:
            ms, ts = text.strip().split(";")
            m = tuple(int(x) for x in ms.split(","))
            t = tuple(int(x) for x in ts.split(","))
        except ValueError as exc:
            raise CoordinateError(f"cannot parse coordinates {text!r}: expected 'm1,..,mn;t1,..,tn'") from exc
        return cls(m, t)

    def format(self) -> str:
        return ",".join(map(str, self.m)) + ";" + ",".join(map(str, self.t))

    __str__ = format

    def is_zero(self) -> bool:
        return not any(self.m) and not any(self.t)

    def scale(self, k: int) -> "DTCoordinates":
        if k < 0:
            raise CoordinateError("scale factor must be nonnegative")
        return DTCoordinates(tuple(k * x for x in self.m), tuple(k * x for x in self.t))


def check_dimensions(dec: PantsDecomposition, c: DTCoordinates) -> None:
    if c.dim != dec.num_cuffs:
        raise CoordinateError(
            f"expected {dec.num_cuffs} coordinates per vector for genus {dec.genus}, got {c.dim}")


def validate(dec: PantsDecomposition, c: DTCoordinates) -> Tuple[bool, str]:
    """Return ``(ok, reason)``; reason is ``"ok"``, ``"negative"``, ``"parity"`` or ``"twist-sign"``."""
    check_dimensions(dec, c)
    if any(x < 0 for x in c.m):
        return False, "negative"
    for p, cuffs in enumerate(dec.slot_cuff):
        if sum(c.m[i] for i in cuffs) % 2:
            return False, "parity"
    for mi, ti in zip(c.m, c.t):
        if mi == 0 and ti < 0:
            return False, "twist-sign"
    return True, "ok"


def norm(c: DTCoordinates) -> int:
    """Sum of crossings plus absolute twists."""
    return sum(c.m) + sum(abs(x) for x in c.t)


def twist_about_cuff(c: DTCoordinates, i: int, n: int) -> DTCoordinates:
    """Apply the ``n``-th power of the Dehn twist about cuff ``i`` (0-based)."""
    t = list(c.t)
    t[i] += n * c.m[i]
    return DTCoordinates(c.m, tuple(t))


def same_orthant(x: DTCoordinates, y: DTCoordinates) -> bool:
    return all(a * b >= 0 for a, b in zip(x.t, y.t))


def coordinate_add(x: DTCoordinates, y: DTCoordinates) -> DTCoordinates:
    """Chartwise sum; only defined inside one twist-sign orthant."""
    if x.dim != y.dim:
        raise CoordinateError("dimension mismatch")
    if not same_orthant(x, y):
        raise CoordinateError("coordinates lie in different twist-sign orthants")
    return DTCoordinates(tuple(a + b for a, b in zip(x.m, y.m)),
                         tuple(a + b for a, b in zip(x.t, y.t)))


def orthant_of(c: DTCoordinates) -> Tuple[int, ...]:
    """Sign vector with the convention ``t_i >= 0 -> +1``."""
    return tuple(1 if x >= 0 else -1 for x in c.t)


def as_coords(values: Sequence[int] | DTCoordinates | str) -> DTCoordinates:
    if isinstance(values, DTCoordinates):
        return values
    if isinstance(values, str):
        return DTCoordinates.parse(values)
    n = len(values) // 2
    return DTCoordinates(tuple(values[:n]), tuple(values[n:]))
