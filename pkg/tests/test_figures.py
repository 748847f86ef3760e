import math

import numpy as np
import pytest

from ocolab.figures import (
    h_model_p01,
    read_csv,
    sweep_figure,
    table_report,
    write_csv,
    zero_locations,
)
from ocolab.fock import prepare_coherent, prepare_thermal
from ocolab.jumps import A, E, H, predict_pn


def row_at(table, x, section=0):
    rows = table.sections[section][1]
    i = int(np.argmin(np.abs(rows[:, 0] - x)))
    assert abs(rows[i, 0] - x) < 1e-12
    return dict(zip(table.columns, rows[i]))


def test_default_grids():
    for fig in ("fig1", "fig2", "fig4"):
        t = sweep_figure(fig)
        assert t.sections[0][1].shape[0] == 200
    x = sweep_figure("fig2").column("x")
    assert x[0] == pytest.approx(1e-3) and x[-1] == pytest.approx(1 - 1e-3)
    y = sweep_figure("fig4").column("y")
    assert (y[0], y[-1]) == (1.0, 10.0)


def test_fig2_row():
    row = row_at(sweep_figure("fig2", grid=[0.3, 0.6]), 0.6)
    assert row["P0_A"] == pytest.approx(0.36, abs=1e-12)
    assert row["P0_E"] == pytest.approx(0.6, abs=1e-12)
    assert row["P1_A"] == pytest.approx(2 * 0.36 * 0.4, abs=1e-12)
    assert row["P1_E"] == pytest.approx(0.24, abs=1e-12)


def test_fig1_row():
    c0 = math.exp(-1)
    row = row_at(sweep_figure("fig1", grid=[c0]), c0)
    assert row["P1_A"] == pytest.approx(c0, abs=1e-12)
    assert row["P1_E"] == pytest.approx(0.291, abs=1e-3)
    assert row["P1_E"] == pytest.approx(c0 / (2 * (1 - c0)), abs=1e-12)


@pytest.mark.parametrize("chi0", [0.2, 0.55, 0.9])
def test_fig1_fig2_agree_with_truncated_states(chi0):
    # closed-form sweep against predict_pn on prepared states
    coh = prepare_coherent(math.sqrt(-math.log(chi0))).chi
    th = prepare_thermal((1 - chi0) / chi0).chi
    r1 = row_at(sweep_figure("fig1", grid=[chi0]), chi0)
    r2 = row_at(sweep_figure("fig2", grid=[chi0]), chi0)
    for row, chi in ((r1, coh), (r2, th)):
        for name, model, n in (("P0_A", A, 0), ("P1_A", A, 1), ("P0_E", E, 0), ("P1_E", E, 1)):
            assert row[name] == pytest.approx(predict_pn(model, chi, n), abs=1e-11)


def test_fig3_branches():
    t = sweep_figure("fig3", grid=[0.09, 0.2, 0.24, 0.25])
    assert [lab for lab, _ in t.sections] == ["upper", "lower"]
    up = row_at(t, 0.24, 0)
    assert up["P0_A"] == pytest.approx(0.36, abs=1e-12)
    assert up["P0_E"] == pytest.approx(0.6, abs=1e-12)
    low = row_at(t, 0.24, 1)
    assert low["P0_A"] == pytest.approx(0.16, abs=1e-12)
    # chi1 = 0.09 on the lower branch means nbar = 9, beyond the plotted nbar < 5
    assert 0.09 not in t.section("lower")[:, 0]
    assert 0.09 in t.section("upper")[:, 0]


def test_fig4_zero():
    t = sweep_figure("fig4", grid=[math.pi, 2.0])
    assert row_at(t, math.pi)["P0_H"] == pytest.approx(0.0, abs=1e-30)


def test_fig4_against_predict():
    chi = prepare_thermal(2 / 3).chi
    y = np.array([1.3, 4.4, 9.9])
    p0, p1 = h_model_p01(y, 0.6)
    for yi, a, b in zip(y, p0, p1):
        assert a == pytest.approx(predict_pn(H(yi), chi, 0), abs=1e-12)
        assert b == pytest.approx(predict_pn(H(yi), chi, 1), abs=1e-12)


def test_errors():
    with pytest.raises(ValueError):
        sweep_figure("fig5")
    with pytest.raises(ValueError):
        sweep_figure("fig2", grid=[])
    with pytest.raises(ValueError):
        sweep_figure("fig2", grid=[1.0])
    with pytest.raises(ValueError):
        sweep_figure("fig3", grid=[0.3])
    with pytest.raises(ValueError):
        sweep_figure("fig1", points=0)


@pytest.mark.parametrize("fig", ["fig1", "fig2", "fig3", "fig4"])
def test_csv_roundtrip(tmp_path, fig):
    t = sweep_figure(fig)
    path = tmp_path / f"{fig}.csv"
    write_csv(t, path)
    back = read_csv(path, fig)
    assert back.equals(t)
    header = path.read_text().splitlines()[0]
    assert header == ("y,P0_H,P1_H" if fig == "fig4" else "x,P0_A,P1_A,P0_E,P1_E")


def test_report_zeros():
    rep = table_report(sweep_figure("fig4", points=1000))
    zeros = rep["sections"][0]["zeros"]
    step = 9 / 999
    for k in (1, 2, 3):
        assert min(abs(z - k * math.pi) for z in zeros["P0_H"]) <= step
    assert len(zeros["P0_H"]) == 3
    assert len(zeros["P1_H"]) == 4


def test_zero_locations_simple():
    x = np.linspace(0, 2 * math.pi, 101)
    z = zero_locations(x, np.sin(x) ** 2)
    assert np.allclose(z, [math.pi])
