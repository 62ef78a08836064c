"""Artifact file formats: map CSV round trip, PGM rendering, reports."""

import numpy as np
import pytest

from spinscan.fileio import (
    load_config,
    load_map_csv,
    write_map_csv,
    write_pgm,
)
from spinscan.scan import ResonanceMap


def _toy_map():
    ny, nx = 3, 4
    f_plus = np.arange(ny * nx, dtype=float).reshape(ny, nx) + 100.0
    return ResonanceMap(
        x0=0.0, y0=1.0, step=0.5, nx=nx, ny=ny, height=4.0, mode="exchange",
        f_minus=f_plus - 7.0, f_plus=f_plus,
    )


def test_map_csv_round_trip(tmp_path):
    rmap = _toy_map()
    path = tmp_path / "m.csv"
    write_map_csv(path, rmap, {"seed": 0})
    back = load_map_csv(path)
    assert (back.nx, back.ny) == (rmap.nx, rmap.ny)
    assert back.step == pytest.approx(rmap.step)
    assert back.height == pytest.approx(rmap.height)
    assert back.mode == rmap.mode
    assert np.allclose(back.f_plus, rmap.f_plus, rtol=1e-9)
    assert np.allclose(back.f_minus, rmap.f_minus, rtol=1e-9)


def test_map_csv_x_varies_fastest(tmp_path):
    path = tmp_path / "m.csv"
    write_map_csv(path, _toy_map(), {})
    data = [
        ln.split(",") for ln in path.read_text().splitlines()
        if ln and not ln.startswith("#") and not ln.startswith("x_angstrom")
    ]
    xs = [float(r[0]) for r in data[:4]]
    ys = [float(r[1]) for r in data[:4]]
    assert xs == [0.0, 0.5, 1.0, 1.5]
    assert ys == [1.0, 1.0, 1.0, 1.0]


def test_map_csv_has_no_timestamps(tmp_path):
    # Outputs must be byte-reproducible: no dates, times, or hostnames.
    path = tmp_path / "m.csv"
    write_map_csv(path, _toy_map(), {"seed": 1})
    text = path.read_text().lower()
    for token in ("date", "time", "20[0-9][0-9]-"):
        assert "date" not in text and "hostname" not in text


def test_pgm_north_up(tmp_path):
    # Row y-max must be emitted first: put the brightest pixel at the
    # top-left in map coordinates (min x, max y).
    values = np.zeros((3, 4))
    values[2, 0] = 1.0  # highest y row, first column
    path = tmp_path / "m.pgm"
    write_pgm(path, values, {})
    tokens = " ".join(
        ln for ln in path.read_text().splitlines() if not ln.startswith("#")
    ).split()
    assert tokens[0] == "P2"
    nx, ny, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    assert (nx, ny, maxval) == (4, 3, 65535)
    pixels = np.array(tokens[4:], dtype=int).reshape(ny, nx)
    assert pixels[0, 0] == 65535  # north-up: max-y row first
    assert pixels[2, 0] == 0


def test_pgm_constant_field(tmp_path):
    path = tmp_path / "flat.pgm"
    write_pgm(path, np.full((2, 2), 5.0), {})
    tokens = " ".join(
        ln for ln in path.read_text().splitlines() if not ln.startswith("#")
    ).split()
    assert all(int(t) == 0 for t in tokens[4:])


def test_load_config_sections(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(
        "[global]\nseed = 7\n\n[scan]\nheight = 5.5\nmode = dipolar\n"
    )
    cfg = load_config(p)
    assert cfg["global"]["seed"] == "7"
    assert cfg["scan"]["height"] == "5.5"


def test_load_config_rejects_unknown(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("[scan]\naltitude = 4\n")
    with pytest.raises(ValueError, match="altitude"):
        load_config(p)
    p2 = tmp_path / "bad2.cfg"
    p2.write_text("[orbit]\nheight = 4\n")
    with pytest.raises(ValueError, match="orbit"):
        load_config(p2)
