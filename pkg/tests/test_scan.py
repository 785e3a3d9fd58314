import math
import warnings

import numpy as np
import pytest

from qent import scan
from qent.errors import NonMonotoneWarning, NoSignChange, ParamOutOfRange


def test_grid_is_exact_decimal():
    g = scan.grid(0, 1, 0.1)
    assert len(g) == 11 and g[3] == 0.3 and g[-1] == 1.0
    assert len(scan.grid("0", "1", "0.01")) == 101
    with pytest.raises(ValueError):
        scan.grid(0, 1, 0)


def test_sweep_mems_columns():
    rows = scan.sweep("mems", 0, 1, 0.1)
    assert [r.parameter for r in rows] == sorted(r.parameter for r in rows)
    for row in rows:
        p = row.parameter
        rep = row.report
        assert rep.s_linear == pytest.approx(8 * p * (1 - p) / 3, abs=1e-12)
        m_closed = 2 * p * p if p > 1 / 3 else 5 * p * p - 4 * p + 1
        assert rep.m_value == pytest.approx(m_closed, abs=1e-12)
    first = rows[0].report
    assert not (first.bell_chsh_violating or first.q_detected or first.teleportation_useful
                or first.oracle_entangled or first.paper_linear_entropy_flag)


def test_sweep_werner_columns():
    for row in scan.sweep("werner", 0, 1, 0.05):
        r = row.parameter
        assert row.report.n_value == pytest.approx(3 * r, abs=1e-12)
        assert row.report.s_linear == pytest.approx(1 - r * r, abs=1e-12)


def test_sweep_range_errors():
    with pytest.raises(ParamOutOfRange):
        scan.sweep("werner", 0, 1.5, 0.1)
    with pytest.raises(ValueError):
        scan.sweep("ghz", 0, 1, 0.1)


def test_csv_schema():
    text = scan.rows_to_csv(scan.sweep("mems", 0, 1, 0.01))
    lines = text.strip().split("\n")
    assert lines[0] == ("param,s_linear,q,m,n,concurrence,min_ppt_eig,"
                        "bell_violating,q_detected,tele_useful,oracle_entangled")
    assert len(lines) == 102
    row = dict(zip(lines[0].split(","), lines[51].split(",")))
    assert row["param"] == "0.5" and row["s_linear"] == "0.666666666667"
    assert row["oracle_entangled"] in ("0", "1")


def test_plot_data_two_columns():
    text = scan.plot_data(scan.sweep("werner", 0, 1, 0.25), "N")
    assert text.split("\n")[-2] == "1 3"
    assert all(len(line.split()) == 2 for line in text.strip().split("\n"))


@pytest.mark.parametrize("family,functional,target,bracket,expected", [
    ("werner", "M", 1.0, (0.5, 0.9), 1 / math.sqrt(2)),
    ("werner", "S_L", 2 / 3, (0.4, 0.8), 1 / math.sqrt(3)),
    ("werner", "N", 1.0, (0.1, 0.9), 1 / 3),
    ("werner", "S_L", 8 / 9, (0.1, 0.5), 1 / 3),
    ("werner", "concurrence", 0.0, (0.1, 0.9), 1 / 3),
    ("mems", "M", 1.0, (0.5, 0.9), 1 / math.sqrt(2)),
    ("mems", "Q", 1.0, (0.5, 0.9), 2 / 3),
])
def test_find_threshold(family, functional, target, bracket, expected):
    res = scan.find_threshold(family, functional, target, bracket)
    assert res.parameter_star == pytest.approx(expected, abs=1e-6)
    assert res.achieved_residual <= 1e-9
    assert res.iterations <= scan.MAX_ITER
    assert res.bracket == bracket


def test_threshold_bracket_independence():
    a = scan.find_threshold("werner", "M", 1.0, (0.5, 0.9)).parameter_star
    b = scan.find_threshold("werner", "M", 1.0, (0.6, 1.0)).parameter_star
    c = scan.find_threshold("werner", "M", 1.0, (0.0, 0.75)).parameter_star
    assert abs(a - b) <= 1e-8 and abs(a - c) <= 1e-8


def test_threshold_errors():
    with pytest.raises(NoSignChange):
        scan.find_threshold("werner", "M", 1.0, (0.1, 0.5))
    with pytest.raises(ParamOutOfRange):
        scan.find_threshold("werner", "M", 1.0, (0.5, 1.5))


def test_two_crossings_have_no_sign_change():
    # M for MEMS dips to 2/9 at p = 1/3: two crossings of 0.5 inside (0.1, 0.9)
    with pytest.raises(NoSignChange), pytest.warns(NonMonotoneWarning):
        scan.find_threshold("mems", "M", 0.5, (0.1, 0.9))


def test_non_monotone_flag(monkeypatch):
    def fake_values(family, params):
        x = np.asarray(params, dtype=float)
        return {"m_value": np.sin(4 * np.pi * x)}

    monkeypatch.setattr(scan, "_values", fake_values)
    with pytest.warns(NonMonotoneWarning):
        res = scan.find_threshold("werner", "M", 0.0, (0.1, 0.9))
    assert res.non_monotone
    assert min(abs(res.parameter_star - z) for z in (0.25, 0.5, 0.75)) <= 1e-9


def test_monotone_no_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not scan.find_threshold("mems", "M", 1.0, (0.5, 0.9)).non_monotone


def _start(table, flag):
    return scan.region_containing(table, flag)


def test_werner_region_table():
    t = scan.region_table("werner")
    assert _start(t, "oracle_entangled") == pytest.approx(1 / 3, abs=1e-6)
    assert _start(t, "teleportation_useful") == pytest.approx(1 / 3, abs=1e-6)
    assert _start(t, "q_detected") == pytest.approx(1 / math.sqrt(3), abs=1e-6)
    assert _start(t, "bell_chsh_violating") == pytest.approx(1 / math.sqrt(2), abs=1e-6)
    gap = [r for r in t.regions if r["flags"]["q_detected"] and not r["flags"]["bell_chsh_violating"]]
    assert len(gap) == 1
    assert gap[0]["lo"] == pytest.approx(1 / math.sqrt(3), abs=1e-6)
    assert gap[0]["hi"] == pytest.approx(1 / math.sqrt(2), abs=1e-6)
    sl89 = [b for b in t.boundaries if b.functional == "S_L" and b.target == pytest.approx(8 / 9)]
    assert len(sl89) == 1 and sl89[0].parameter_star == pytest.approx(1 / 3, abs=1e-6)


def test_mems_region_table():
    t = scan.region_table("mems")
    chsh = [r for r in t.regions if r["flags"]["bell_chsh_violating"]]
    assert chsh[0]["lo"] == pytest.approx(1 / math.sqrt(2), abs=1e-6)
    assert chsh[-1]["hi"] == 1.0 and chsh[-1]["hi_closed"]
    assert _start(t, "oracle_entangled") == pytest.approx(0.0, abs=1e-6)
    assert not t.regions[0]["flags"]["oracle_entangled"] and t.regions[0]["hi"] == 0.0


def test_region_boundary_ordering():
    for fam in ("mems", "werner"):
        t = scan.region_table(fam)
        assert _start(t, "bell_chsh_violating") >= _start(t, "q_detected") >= _start(t, "teleportation_useful")


def test_family_thresholds_table():
    got = {(r.functional, r.target): r.parameter_star for _, r in scan.family_thresholds("werner")}
    assert got[("M", 1.0)] == pytest.approx(0.7071068, abs=1e-6)
    assert got[("S_L", 2 / 3)] == pytest.approx(0.5773503, abs=1e-6)
    assert got[("N", 1.0)] == pytest.approx(1 / 3, abs=1e-6)
    assert got[("S_L", 8 / 9)] == pytest.approx(1 / 3, abs=1e-6)
    mems = {(r.functional, r.target): r.parameter_star for _, r in scan.family_thresholds("mems")}
    assert mems[("M", 1.0)] == pytest.approx(0.7071068, abs=1e-6)
    assert mems[("concurrence", 0.0)] == pytest.approx(0.0, abs=1e-6)
