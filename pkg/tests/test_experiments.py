import json
import math

import numpy as np
import pytest

from curvecount.enumeration import CountTable
from curvecount.experiments import (TORUS_COEFFICIENT, ConfigError, OracleMismatch, error_envelope,
                                    load_config, mobius_table, parse_grid, powerlaw_fit,
                                    run_experiment, torus_lattice_count, torus_primitive_count,
                                    torus_primitive_mobius, torus_primitive_sieve)
import curvecount.experiments as ex

GRID = np.geomspace(16, 2048, 12)


def test_exact_power_law():
    f = powerlaw_fit(GRID, 2.5 * GRID ** 6)
    assert f.exponent == pytest.approx(6, abs=1e-12)
    assert f.coefficient == pytest.approx(2.5, rel=1e-10)
    assert f.kappa_note == "exact power law" and math.isnan(f.kappa_hat)
    assert f.to_dict()["kappa_hat"] is None


def test_cubic_plus_linear():
    N = GRID ** 3 + GRID
    f = powerlaw_fit(GRID, N)
    x, y = np.log(GRID), np.log(N)
    assert f.exponent == pytest.approx(np.polyfit(x, y, 1)[0], abs=1e-12)
    assert 2.99 < f.exponent < 3.0
    assert f.lead_exponent == pytest.approx(3, abs=1e-6)
    assert f.lead_coefficient == pytest.approx(1, abs=1e-6)
    assert f.kappa_hat == pytest.approx(2, abs=1e-3)


@pytest.mark.parametrize("h", [2, 6])
@pytest.mark.parametrize("kappa", [0.5, 1.0, 1.5])
@pytest.mark.parametrize("eps", [0.5, 2.0, -0.3])
def test_synthetic_recovery(h, kappa, eps):
    N = np.round(3.0 * GRID ** h * (1 + eps * GRID ** -kappa))
    f = powerlaw_fit(GRID, N)
    assert abs(f.lead_exponent - h) < 0.05
    assert abs(f.kappa_hat - kappa) < 0.3
    assert f.kappa_se >= 0


def test_pinned_exponent_is_used():
    N = 2 * GRID ** 2 + 5 * GRID
    f = powerlaw_fit(GRID, N, exponent=2)
    assert f.lead_exponent == 2
    assert f.lead_coefficient == pytest.approx(2, rel=1e-6)


@pytest.mark.parametrize("L,N,msg", [
    ([1, 2, 3], [1, 2, 3], "at least"),
    ([1, 2, 3, 4], [1, 0, 3, 4], "positive"),
    ([1, 2, 3, 4], [5, 5, 5, 5], "constant"),
    ([1, 3, 2, 4], [1, 2, 3, 4], "increasing"),
    ([1, 2, 3, 4], [1, 2, 3], "same length"),
])
def test_fit_input_errors(L, N, msg):
    with pytest.raises(ValueError, match=msg):
        powerlaw_fit(L, N)


def test_short_span_note():
    L = np.array([10, 12, 14, 16, 18.0])
    f = powerlaw_fit(L, L ** 2 + L)
    assert "span" in f.kappa_note


def test_mobius_values():
    mu = mobius_table(12)
    assert list(mu[1:13]) == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]


def test_torus_counts():
    assert torus_lattice_count(2) == 12
    assert torus_primitive_count(1) == 4
    assert torus_primitive_count(2) == 8
    for L in (1, 5, 17, 64, 300):
        assert torus_primitive_sieve(L) == torus_primitive_mobius(L)
    brute = sum(1 for p in range(-40, 41) for q in range(-40, 41)
                if (p or q) and abs(p) + abs(q) <= 40 and math.gcd(p, q) == 1)
    assert torus_primitive_count(40) == brute


def test_torus_density():
    assert torus_primitive_count(2048) / (2 * 2048 ** 2) == pytest.approx(6 / math.pi ** 2, rel=0.01)


def test_oracle_mismatch_is_raised(monkeypatch):
    monkeypatch.setattr(ex, "torus_primitive_sieve", lambda L: 0)
    with pytest.raises(OracleMismatch):
        ex.torus_primitive_count(10)


def test_error_envelope():
    L = np.geomspace(64, 2048, 8)
    N = TORUS_COEFFICIENT * L ** 2 + 0.3 * L * np.log(L)
    C, worst, holds = error_envelope(L, N, TORUS_COEFFICIENT, 2, 1.8)
    assert holds and worst == pytest.approx(1.0) and C > 0
    C, worst, holds = error_envelope(L, TORUS_COEFFICIENT * L ** 2 + L ** 1.95, TORUS_COEFFICIENT, 2, 1.8)
    assert not holds and worst > 1


@pytest.mark.parametrize("text,out", [
    ("geometric:8..64:4", [8, 16, 32, 64]),
    ("linear:10..20:5", [10, 15, 20]),
    ("12, 18,27", [12, 18, 27]),
    ("linear:3..5", [3, 4, 5]),
])
def test_parse_grid(text, out):
    assert parse_grid(text) == out


def test_parse_grid_float():
    assert parse_grid("geometric:6..24:3", integer=False) == pytest.approx([6, 12, 24])


@pytest.mark.parametrize("text", ["", "geometric:8", "1,x", "0,1,2", "linear:a..b"])
def test_parse_grid_errors(text):
    with pytest.raises(ConfigError):
        parse_grid(text)


GOOD = """
[experiment]
genus = 2
mode = norm
grid = geometric:8..20:5
workers = 1
output = {out}

[sector:lo]
slab = m1:0:0.13

[sector:hi]
slab = m1:0.13:1
"""


def test_load_config(tmp_path):
    cfg = load_config(GOOD.format(out=tmp_path))
    assert cfg.genus == 2 and cfg.mode == "norm"
    assert cfg.grid == [8, 10, 13, 16, 20]
    assert set(cfg.sectors) == {"lo", "hi"}
    assert cfg.digest == load_config(GOOD.format(out=tmp_path)).digest
    p = tmp_path / "c.ini"
    p.write_text(GOOD.format(out=tmp_path))
    assert load_config(str(p)).digest == cfg.digest


@pytest.mark.parametrize("text,msg", [
    ("genus = 2\n", "section"),
    ("missing.ini", "not found"),
    ("[experiment]\ngenus = 1\ngrid = 1,2\n", "genus"),
    ("[experiment]\ngenus = two\ngrid = 1,2\n", "integer"),
    ("[experiment]\ngenus = 2\nmode = area\ngrid = 1,2\n", "mode"),
    ("[experiment]\ngenus = 2\nmode = length\ngrid = 1,2\n", "fn"),
    ("[experiment]\ngenus = torus\nmode = length\nfn = 1;0\ngrid = 1,2\n", "closed"),
    ("[experiment]\ngenus = 2\ngrid = 1,2\nworkers = 0\n", "workers"),
    ("[experiment]\ngenus = 2\ngrid = 1,2\n[sector:x]\nslab = q1:0:1\n", "slab"),
    ("[experiment]\ngenus = 2\ngrid = 1,2\n[sector:x]\nslab = m4:0:1\n", "slab"),
    ("[experiment\n", "section"),
])
def test_config_errors(text, msg):
    with pytest.raises(ConfigError, match=msg):
        load_config(text)


def test_norm_run_writes_reports(tmp_path):
    rep = run_experiment(load_config(GOOD.format(out=tmp_path / "run")))
    assert rep.ok
    out = tmp_path / "run"
    for name in ("counts.csv", "counts_lo.csv", "counts_hi.csv", "fits.json", "audit.json"):
        assert (out / name).exists()
    audit = json.loads((out / "audit.json").read_text())
    assert audit["status"] == "ok" and set(audit["sector_ratio_nonsep_over_sep"]) == {"lo", "hi"}
    table = CountTable.from_csv((out / "counts.csv").read_text())
    lo = CountTable.from_csv((out / "counts_lo.csv").read_text())
    hi = CountTable.from_csv((out / "counts_hi.csv").read_text())
    key = "g1b2|0-0:1"
    assert lo.count(20, key) + hi.count(20, key) == table.count(20, key)
    fits = json.loads((out / "fits.json").read_text())
    assert fits[key]["lead_exponent"] == 6


def test_runs_are_byte_identical(tmp_path):
    for name in ("a", "b"):
        run_experiment(load_config(GOOD.format(out=tmp_path / name)))
    for f in ("counts.csv", "counts_lo.csv", "counts_hi.csv", "fits.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_torus_run(tmp_path):
    cfg = load_config(f"[experiment]\ngenus = torus\ngrid = geometric:64..512:4\noutput = {tmp_path}\n")
    rep = run_experiment(cfg)
    assert rep.ok
    audit = json.loads((tmp_path / "audit.json").read_text())
    assert audit["error_envelope"]["holds"]
    assert audit["coefficient_over_12_pi2"] == pytest.approx(1, abs=0.03)


def test_length_run(tmp_path):
    cfg = load_config(f"[experiment]\ngenus = 2\nmode = length\nfn = 1,1,1;0,0,0\n"
                      f"grid = geometric:4..9:4\noutput = {tmp_path}\n")
    rep = run_experiment(cfg)
    assert rep.ok
    audit = json.loads((tmp_path / "audit.json").read_text())
    assert audit["status"] == "clean"
    table = CountTable.from_csv((tmp_path / "counts.csv").read_text())
    assert table.keys() == ["g1b2|0-0:1"]
