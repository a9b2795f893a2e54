"""Power-law fitting and config-driven experiment runs, including the torus oracle."""
from __future__ import annotations

import configparser
import hashlib
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from .enumeration import (ALL_KEY, CountTable, Sector, count_scc_table, leading_coefficient,
                          nonseparating_key, separating_key)
from .surface import build_surface


class ConfigError(ValueError):
    pass


class OracleMismatch(RuntimeError):
    pass


# --------------------------------------------------------------------------
# fitting
# --------------------------------------------------------------------------

MIN_POINTS = 4
MIN_SPAN = 8.0


@dataclass
class FitResult:
    """Log-log least squares plus a two-term refinement.

    ``exponent`` and ``coefficient`` come from the straight-line fit of
    ``log N`` on ``log L``.  ``lead_exponent`` and ``lead_coefficient`` come from
    ``N ~ c L^h + d L^(h - kappa)``; ``kappa_hat`` is ``h`` minus the slope of
    ``log |N - c L^h|`` and ``kappa_se`` that slope's standard error.
    """

    exponent: float
    coefficient: float
    residuals: List[float]
    lead_exponent: float
    lead_coefficient: float
    kappa_hat: float
    kappa_se: float
    kappa_note: str
    grid: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {k: (None if isinstance(v, float) and not math.isfinite(v) else v)
                for k, v in asdict(self).items()}


def _two_term(L: np.ndarray, N: np.ndarray, h0: float, fixed: bool) -> Tuple[float, float]:
    """Variable projection for ``N ~ c L^h + d L^(h - kappa)`` in relative residuals.

    With ``fixed`` the exponent stays at ``h0`` and only ``kappa`` is searched.
    """

    def coeffs(h, kappa):
        A = np.stack([L ** h, L ** (h - kappa)], axis=1) / N[:, None]
        sol, *_ = np.linalg.lstsq(A, np.ones_like(N), rcond=None)
        return sol, A @ sol - 1.0

    if fixed:
        def resid(x):
            return coeffs(h0, x[0])[1]
        x0s, lo, hi = [[0.5], [1.0], [2.0]], [0.05], [10.0]
    else:
        def resid(x):
            return coeffs(x[0], x[1])[1]
        x0s, lo, hi = [[h0, 0.5], [h0, 1.0], [h0, 2.0]], [h0 - 2, 0.05], [h0 + 2, 10.0]
    best = None
    for x0 in x0s:
        r = least_squares(resid, x0=x0, bounds=(lo, hi), xtol=1e-14, ftol=1e-14, gtol=1e-14)
        if best is None or r.cost < best.cost:
            best = r
    h = h0 if fixed else float(best.x[0])
    (c, _), _ = coeffs(h, best.x[-1])
    return h, float(c)


def powerlaw_fit(L: Sequence[float], N: Sequence[float], exponent: Optional[float] = None) -> FitResult:
    """Fit ``N(L) ~ c L^h`` and estimate the decay exponent of the correction.

    ``exponent`` pins ``h`` in the two-term refinement when it is known in
    advance; the straight-line fit is unaffected.
    """
    L = np.asarray(L, dtype=float)
    N = np.asarray(N, dtype=float)
    if L.shape != N.shape or L.ndim != 1:
        raise ValueError("L and N must be 1-d arrays of the same length")
    if len(L) < MIN_POINTS:
        raise ValueError(f"need at least {MIN_POINTS} grid points, got {len(L)}")
    if np.any(N <= 0) or np.any(L <= 0):
        raise ValueError("counts and grid values must be positive")
    if np.all(N == N[0]):
        raise ValueError("constant counts carry no exponent")
    if np.any(np.diff(L) <= 0):
        raise ValueError("grid must be strictly increasing")
    x, y = np.log(L), np.log(N)
    slope, icpt = np.polyfit(x, y, 1)
    res = y - (slope * x + icpt)

    fixed = exponent is not None
    h, c = _two_term(L, N, float(exponent) if fixed else float(slope), fixed)
    kappa, se, note = math.nan, math.nan, "ok"
    err = N - c * L ** h
    if L[-1] / L[0] < MIN_SPAN:
        note = f"grid span below {MIN_SPAN:g}"
    elif np.max(np.abs(err) / N) < 1e-9:
        note = "exact power law"
    elif np.any(err == 0):
        note = "correction vanishes at a grid point"
    else:
        ly = np.log(np.abs(err))
        A = np.stack([x, np.ones_like(x)], axis=1)
        coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
        r = ly - A @ coef
        dof = len(x) - 2
        s2 = float(r @ r) / dof if dof > 0 else math.nan
        se = math.sqrt(s2 / float(((x - x.mean()) ** 2).sum()))
        kappa = h - float(coef[0])
    return FitResult(exponent=float(slope), coefficient=float(math.exp(icpt)),
                     residuals=[float(v) for v in res], lead_exponent=h, lead_coefficient=c,
                     kappa_hat=kappa, kappa_se=se, kappa_note=note, grid=[float(v) for v in L])


def fit_table(table: CountTable, key: str) -> FitResult:
    L, N = table.series(key)
    return powerlaw_fit(L, N)


# --------------------------------------------------------------------------
# torus oracle
# --------------------------------------------------------------------------

def mobius_table(n: int) -> np.ndarray:
    """``mu[k]`` for ``0 <= k <= n`` (``mu[0]`` unused)."""
    mu = np.ones(n + 1, dtype=np.int64)
    is_comp = np.zeros(n + 1, dtype=bool)
    for p in range(2, n + 1):
        if is_comp[p]:
            continue
        is_comp[2 * p::p] = True
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
    mu[0] = 0
    return mu


def torus_lattice_count(n: int) -> int:
    """Nonzero ``(p, q)`` with ``|p| + |q| <= n``."""
    return 2 * n * (n + 1)


def torus_primitive_sieve(L: int) -> int:
    p = np.arange(-L, L + 1)
    P, Q = np.meshgrid(p, p, indexing="ij")
    mask = (np.abs(P) + np.abs(Q) <= L) & (np.gcd(P, Q) == 1)
    return int(mask.sum())


def torus_primitive_mobius(L: int) -> int:
    mu = mobius_table(L)
    return int(sum(int(mu[d]) * torus_lattice_count(L // d) for d in range(1, L + 1)))


def torus_primitive_count(L: int) -> int:
    """Primitive vectors with ``|p| + |q| <= L``; two methods, which must agree."""
    if L < 1:
        raise ValueError("L must be >= 1")
    a, b = torus_primitive_sieve(L), torus_primitive_mobius(L)
    if a != b:
        raise OracleMismatch(f"sieve gives {a}, Moebius inversion gives {b} at L={L}")
    return a


TORUS_DENSITY = 6 / math.pi ** 2
TORUS_COEFFICIENT = 2 * TORUS_DENSITY


def error_envelope(L: Sequence[float], N: Sequence[float], c: float, h: float, power: float):
    """Fit ``C`` on the lower half of the grid and test ``|N - c L^h| <= C L^power`` on all of it.

    Returns ``(C, max ratio over the whole grid / C, holds)``.
    """
    L = np.asarray(L, dtype=float)
    N = np.asarray(N, dtype=float)
    ratio = np.abs(N - c * L ** h) / L ** power
    half = max(1, len(L) // 2)
    C = float(ratio[:half].max())
    worst = float(ratio.max())
    return C, worst / C if C > 0 else math.inf, bool(worst <= C)


# --------------------------------------------------------------------------
# grids and configs
# --------------------------------------------------------------------------

def parse_grid(text: str, integer: bool = True) -> List[float]:
    """``geometric:A..B[:n]`` (default 8 points), ``linear:A..B[:step]`` or a comma list."""
    text = text.strip()
    if not text:
        raise ConfigError("empty L grid")
    try:
        if text.startswith("geometric:") or text.startswith("linear:"):
            kind, body = text.split(":", 1)
            parts = body.split(":")
            lo, hi = (float(v) for v in parts[0].split(".."))
            if kind == "geometric":
                n = int(parts[1]) if len(parts) > 1 else 8
                vals = list(np.geomspace(lo, hi, n))
            else:
                step = float(parts[1]) if len(parts) > 1 else 1.0
                vals = list(np.arange(lo, hi + step / 2, step))
        else:
            vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {text!r}") from exc
    if integer:
        vals = [float(int(round(v))) for v in vals]
    out = sorted(set(vals))
    if not out:
        raise ConfigError("empty L grid")
    if out[0] <= 0:
        raise ConfigError("grid values must be positive")
    return [int(v) for v in out] if integer else out


def _parse_slab(dim: int, text: str) -> Sector:
    # "m1:0:0.13" or "t3:0.2:1"
    try:
        name, lo, hi = text.split(":")
        kind, idx = name[0], int(name[1:]) - 1
        if kind not in "mt" or not (0 <= idx < dim):
            raise ValueError
        coord = idx if kind == "m" else dim + idx
        return Sector.slab(dim, coord, float(lo), float(hi))
    except ValueError as exc:
        raise ConfigError(f"bad sector slab {text!r}; expected like 'm1:0:0.13'") from exc


@dataclass
class ExperimentConfig:
    genus: Optional[int]  # None -> torus
    mode: str
    grid: List[float]
    workers: int = 1
    output: str = "results"
    fn: Optional[str] = None
    type_key: str = "nonseparating"
    sectors: Dict[str, Sector] = field(default_factory=dict)
    source: str = ""

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.source.encode()).hexdigest()[:12]


def load_config(path_or_text: str) -> ExperimentConfig:
    """Read an INI-style experiment description (see README)."""
    text = path_or_text
    if os.path.exists(path_or_text):
        with open(path_or_text) as fh:
            text = fh.read()
    elif "\n" not in text and "[" not in text:
        raise ConfigError(f"config file not found: {path_or_text}")
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    if "experiment" not in cp:
        raise ConfigError("missing [experiment] section")
    ex = cp["experiment"]
    g = ex.get("genus", "2").strip()
    try:
        genus = None if g == "torus" else int(g)
        workers = ex.getint("workers", 1)
    except ValueError as exc:
        raise ConfigError(f"bad integer in [experiment]: {exc}") from exc
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    if genus is not None and genus < 2:
        raise ConfigError("genus must be >= 2 or 'torus'")
    mode = ex.get("mode", "norm").strip()
    if mode not in ("norm", "length"):
        raise ConfigError(f"unknown mode {mode!r}")
    if mode == "length" and genus is None:
        raise ConfigError("length mode needs a closed surface")
    grid = parse_grid(ex.get("grid", ""), integer=(mode == "norm"))
    cfg = ExperimentConfig(genus=genus, mode=mode, grid=grid,
                           workers=workers, output=ex.get("output", "results"),
                           fn=ex.get("fn"), type_key=ex.get("type", "nonseparating").strip(),
                           source=text)
    if mode == "length" and not cfg.fn:
        raise ConfigError("length mode needs fn = lengths;twists")
    dim = 3 * genus - 3 if genus else 1
    for name in cp.sections():
        if name.startswith("sector:"):
            cfg.sectors[name.split(":", 1)[1]] = _parse_slab(dim, cp[name].get("slab", ""))
    return cfg


def _resolve_key(genus: int, key: str) -> str:
    if key == "nonseparating":
        return nonseparating_key(genus)
    if key.startswith("separating"):
        split = int(key.split(":")[1]) if ":" in key else 1
        return separating_key(genus, split)
    return key


# --------------------------------------------------------------------------
# runs
# --------------------------------------------------------------------------

@dataclass
class ExperimentReport:
    counts: CountTable
    fits: Dict[str, dict]
    audit: Dict
    extra_tables: Dict[str, CountTable] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.audit.get("status") != "INCOMPLETE"

    def write(self, outdir: str) -> List[str]:
        os.makedirs(outdir, exist_ok=True)
        paths = [os.path.join(outdir, "counts.csv")]
        self.counts.to_csv(paths[0])
        for name, tab in sorted(self.extra_tables.items()):
            p = os.path.join(outdir, f"counts_{name}.csv")
            tab.to_csv(p)
            paths.append(p)
        for name, obj in (("fits.json", self.fits), ("audit.json", self.audit)):
            p = os.path.join(outdir, name)
            with open(p, "w") as fh:
                json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)
                fh.write("\n")
            paths.append(p)
        return paths


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    raise TypeError(type(x))


def _fits_for(table: CountTable, exponent: Optional[float] = None) -> Dict[str, dict]:
    out = {}
    for key in table.keys():
        L, N = table.series(key)
        keep = N > 0
        try:
            out[key] = powerlaw_fit(L[keep], N[keep], exponent).to_dict()
        except ValueError as exc:
            out[key] = {"error": str(exc)}
    return out


def _torus_run(cfg: ExperimentConfig) -> ExperimentReport:
    rows = [(L, "torus|1", torus_primitive_count(int(L))) for L in cfg.grid]
    table = CountTable(rows, {"genus": 1, "norm": "|p|+|q|"})
    fits = _fits_for(table, 2.0)
    audit: Dict = {"status": "ok", "oracle": "sieve and Moebius counts agree"}
    f = fits.get("torus|1", {})
    if "lead_coefficient" in f:
        L, N = table.series("torus|1")
        C, ratio, holds = error_envelope(L, N, f["lead_coefficient"], 2.0, 1.8)
        audit["error_envelope"] = {"power": 1.8, "C": C, "max_ratio_over_C": ratio, "holds": holds}
        audit["coefficient_over_12_pi2"] = f["lead_coefficient"] / TORUS_COEFFICIENT
    return ExperimentReport(table, fits, audit)


def _norm_run(cfg: ExperimentConfig) -> ExperimentReport:
    _, dec = build_surface(cfg.genus)
    table = count_scc_table(dec, cfg.grid, None, cfg.workers)
    table.metadata["config"] = cfg.digest
    fits = _fits_for(table, 6 * cfg.genus - 6)
    lc = float(leading_coefficient(dec))
    h = 6 * cfg.genus - 6
    Lmax = cfg.grid[-1]
    audit: Dict = {"status": "ok", "leading_coefficient": lc,
                   "normalised_total_at_max": table.count(Lmax, ALL_KEY) / Lmax ** h / lc}
    extra = {}
    ns, sp = nonseparating_key(cfg.genus), separating_key(cfg.genus)
    ratios = {}
    for name, sec in sorted(cfg.sectors.items()):
        tab = count_scc_table(dec, cfg.grid, sec, cfg.workers)
        extra[name] = tab
        a, b = tab.count(Lmax, ns), tab.count(Lmax, sp)
        ratios[name] = a / b if b else None
    if ratios:
        audit["sector_ratio_nonsep_over_sep"] = ratios
        vals = [v for v in ratios.values() if v is not None]
        if len(vals) >= 2:
            audit["sector_ratio_spread"] = (max(vals) - min(vals)) / float(np.mean(vals))
    return ExperimentReport(table, fits, audit, extra)


def _length_run(cfg: ExperimentConfig) -> ExperimentReport:
    from .hyperbolic import FenchelNielsen, count_by_length
    _, dec = build_surface(cfg.genus)
    fn = FenchelNielsen.parse(cfg.fn)
    key = _resolve_key(cfg.genus, cfg.type_key)
    table = count_by_length(dec, fn, key, cfg.grid, cfg.workers)
    fits = _fits_for(table, 6 * cfg.genus - 6)
    audit = dict(table.metadata["audit"])
    audit["pruning"] = table.metadata["pruning"]
    audit["norm_cutoffs"] = table.metadata["norm_cutoffs"]
    return ExperimentReport(table, fits, audit)


def run_experiment(config) -> ExperimentReport:
    """Run a config (path, INI text or :class:`ExperimentConfig`) and write its reports."""
    cfg = config if isinstance(config, ExperimentConfig) else load_config(config)
    t0 = time.perf_counter()
    if cfg.genus is None:
        rep = _torus_run(cfg)
    elif cfg.mode == "norm":
        rep = _norm_run(cfg)
    else:
        rep = _length_run(cfg)
    rep.audit["config"] = cfg.digest
    rep.audit["timing"] = {"wall_seconds": round(time.perf_counter() - t0, 3),
                           "workers": cfg.workers}
    rep.write(cfg.output)
    return rep
