"""Scan engine: effective fields, raster maps, pair mode, sweeps.

Frozen anchors (center exchange field, pair-mode discrepancy bounds,
crossover radius) come from independent oracle evaluations of the
closed-form field sums and a 9-level exact pair diagonalization.
"""

import numpy as np
import pytest

from spinscan import (
    CONSTANTS,
    ProbeSpec,
    ScanConfig,
    SpinTexture,
    apply_pattern,
    build_lattice,
    distance_sweep,
    effective_fields_at,
    exchange_constant,
    pair_mode_resonance,
    probe_hamiltonian_at,
    probe_resonances,
    scan_constant_height,
    scan_iso_frequency,
    stray_field,
)

H_GHZ = CONSTANTS.h_planck
D_UEV = 14.4


def _single_texture(position, direction=(0.0, 0.0, 1.0)):
    return SpinTexture(
        positions=np.atleast_2d(position),
        spin_dirs=np.atleast_2d(direction).astype(float),
        spin_mag=0.5,
        g=2.0,
    )


# ----------------------------------------------------------- field assembly


def test_fields_superpose_over_sites(fm_5x5):
    # Both field channels are site sums, so the texture total equals the
    # sum of single-site contributions.
    tip = (5.1, 4.3, 4.0)
    b_stray, b_ex = effective_fields_at(tip, fm_5x5)
    acc_stray = np.zeros(3)
    acc_ex = np.zeros(3)
    for pos, svec in zip(fm_5x5.positions, fm_5x5.spin_vectors):
        one = _single_texture(pos)
        bs, be = effective_fields_at(tip, one)
        acc_stray += bs
        acc_ex += be
    assert np.allclose(b_stray, acc_stray, atol=1e-12)
    assert np.allclose(b_ex, acc_ex, atol=1e-12)


def test_fields_match_scalar_constructions(single_site):
    # One site at the origin: the engine's sums reduce to the spin-core
    # primitives evaluated at the displacement.
    tip = np.array([1.0, -2.0, 4.0])
    b_stray, b_ex = effective_fields_at(tip, single_site)
    expect_stray = stray_field(tip, single_site.spin_vectors[0], g=single_site.g)
    assert np.allclose(b_stray, expect_stray, rtol=1e-12)
    j = exchange_constant(np.linalg.norm(tip))
    assert np.allclose(b_ex, j * single_site.spin_vectors[0], rtol=1e-12)


def test_center_exchange_field_frozen(fm_5x5):
    # Tip 4 A above the central site of the 5x5 FM lattice.
    _, b_ex = effective_fields_at((6.0, 6.0, 4.0), fm_5x5)
    assert b_ex[0] == 0.0 and b_ex[1] == 0.0
    assert b_ex[2] == pytest.approx(557.80803857, rel=1e-8)


def test_tip_too_close_rejected(single_site):
    with pytest.raises(ValueError, match="0"):
        effective_fields_at((0.0, 0.0, 0.05), single_site)


def test_translation_invariance(fm_5x5):
    # Shifting texture and tip together leaves the spectrum unchanged.
    shift = np.array([13.7, -4.1, 0.0])
    shifted = SpinTexture(
        positions=fm_5x5.positions + shift,
        spin_dirs=fm_5x5.spin_dirs,
        spin_mag=fm_5x5.spin_mag,
        g=fm_5x5.g,
    )
    cfg = ScanConfig(mode="both")
    tip = np.array([5.0, 7.0, 4.0])
    pair_a = probe_resonances(probe_hamiltonian_at(tip, fm_5x5, cfg))
    pair_b = probe_resonances(probe_hamiltonian_at(tip + shift, shifted, cfg))
    assert pair_a.f_minus == pytest.approx(pair_b.f_minus, abs=1e-10)
    assert pair_a.f_plus == pytest.approx(pair_b.f_plus, abs=1e-10)


def test_mode_gating(single_site):
    # exchange mode must ignore the stray field and dipolar mode the
    # exchange field; "both" includes the two.
    tip = (0.0, 0.0, 4.0)
    pairs = {}
    for mode in ("exchange", "dipolar", "both"):
        cfg = ScanConfig(mode=mode)
        pairs[mode] = probe_resonances(probe_hamiltonian_at(tip, single_site, cfg))
    j = exchange_constant(4.0)
    # Exchange mode at zero external field: axial closed form with
    # e_z = J * s_z = J / 2.
    expect_plus = (D_UEV + 0.5 * j) / H_GHZ
    assert pairs["exchange"].f_plus == pytest.approx(expect_plus, rel=1e-10)
    # Dipolar mode: Zeeman on the anti-parallel stray field.
    bz = stray_field(tip, single_site.spin_vectors[0], g=2.0)[2]
    assert bz < 0.0
    e_z = abs(ScanConfig().probe.g * CONSTANTS.mu_b * bz)
    assert pairs["dipolar"].f_plus == pytest.approx((D_UEV + e_z) / H_GHZ, rel=1e-10)
    # Both: the anti-parallel stray Zeeman partially cancels the exchange
    # field, so the combined branch sits below exchange-only.
    both_expect = (D_UEV + abs(0.5 * j - e_z)) / H_GHZ
    assert pairs["both"].f_plus == pytest.approx(both_expect, rel=1e-10)
    assert pairs["exchange"].f_plus > pairs["both"].f_plus > pairs["dipolar"].f_plus


# ------------------------------------------------------------------ rasters


def test_grid_geometry(fm_5x5):
    cfg = ScanConfig(height=4.0, x_range=(0.0, 12.0), y_range=(0.0, 12.0), step=0.25)
    rmap = scan_constant_height(cfg, fm_5x5)
    assert (rmap.nx, rmap.ny) == (49, 49)
    assert rmap.xs[0] == 0.0 and rmap.xs[-1] == pytest.approx(12.0)
    assert rmap.f_plus.shape == (49, 49)
    assert np.all(np.isfinite(rmap.f_plus))


def test_map_indexing_matches_pointwise(fm_5x5):
    # rmap[iy, ix] must equal the single-point evaluation at (x, y).
    cfg = ScanConfig(height=4.0, x_range=(0.0, 12.0), y_range=(0.0, 12.0), step=3.0)
    rmap = scan_constant_height(cfg, fm_5x5)
    for iy in (0, 2, 4):
        for ix in (1, 3):
            tip = (rmap.xs[ix], rmap.ys[iy], cfg.height)
            pair = probe_resonances(probe_hamiltonian_at(tip, fm_5x5, cfg))
            assert rmap.f_plus[iy, ix] == pytest.approx(pair.f_plus, abs=1e-12)
            assert rmap.f_minus[iy, ix] == pytest.approx(pair.f_minus, abs=1e-12)


def test_worker_count_determinism(fm_5x5):
    cfg = ScanConfig(height=4.0, step=0.75)
    maps = [scan_constant_height(cfg, fm_5x5, workers=w) for w in (1, 2, 4)]
    for other in maps[1:]:
        assert np.array_equal(maps[0].f_plus, other.f_plus)
        assert np.array_equal(maps[0].f_minus, other.f_minus)


def test_symmetric_texture_symmetric_map(fm_5x5):
    # The 5x5 FM texture is symmetric under x <-> y about its diagonal,
    # so the map on the matching window is transpose-symmetric.
    cfg = ScanConfig(height=4.0, x_range=(0.0, 12.0), y_range=(0.0, 12.0), step=0.75)
    rmap = scan_constant_height(cfg, fm_5x5)
    assert np.allclose(rmap.f_plus, rmap.f_plus.T, atol=1e-9)
    # And under x -> 12 - x (mirror through the lattice center).
    assert np.allclose(rmap.f_plus, rmap.f_plus[:, ::-1], atol=1e-9)


def test_signal_conventions(fm_5x5):
    cfg = ScanConfig(height=4.0, step=3.0)
    rmap = scan_constant_height(cfg, fm_5x5)
    assert np.array_equal(rmap.signal("transition"), rmap.f_plus)
    assert np.allclose(rmap.signal("splitting"), rmap.f_plus - rmap.f_minus)
    with pytest.raises(ValueError):
        rmap.signal("bogus")


def test_scan_config_validation():
    with pytest.raises(ValueError):
        ScanConfig(height=0.5)  # below the 1 A tip-height floor
    with pytest.raises(ValueError):
        ScanConfig(step=0.0)
    with pytest.raises(ValueError):
        ScanConfig(mode="telepathic")
    with pytest.raises(ValueError):
        ScanConfig(resonance_convention="bogus")
    with pytest.raises(ValueError):
        ScanConfig(x_range=(5.0, 1.0))
    with pytest.raises(ValueError):
        ScanConfig(exchange_prefactor="bogus")


# ---------------------------------------------------------------- iso scans


def test_iso_frequency_self_consistency(single_site):
    # Feed back f_plus measured at 4 A: the recovered height is 4 A.
    cfg = ScanConfig(height=4.0, x_range=(0.0, 0.0), y_range=(0.0, 0.0), step=1.0)
    pair = probe_resonances(probe_hamiltonian_at((0.0, 0.0, 4.0), single_site, cfg))
    iso = scan_iso_frequency(cfg, single_site, pair.f_plus, 2.0, 10.0)
    assert iso.heights[0, 0] == pytest.approx(4.0, abs=1e-3)


def test_iso_frequency_monotone_height_with_frequency(single_site):
    # FM exchange: f_plus decreases with height, so a larger f_source
    # pulls the recovered height down.
    cfg = ScanConfig(x_range=(0.0, 0.0), y_range=(0.0, 0.0), step=1.0)
    f4 = probe_resonances(probe_hamiltonian_at((0.0, 0.0, 4.0), single_site, cfg)).f_plus
    f5 = probe_resonances(probe_hamiltonian_at((0.0, 0.0, 5.0), single_site, cfg)).f_plus
    assert f4 > f5
    z4 = scan_iso_frequency(cfg, single_site, f4, 2.0, 10.0).heights[0, 0]
    z5 = scan_iso_frequency(cfg, single_site, f5, 2.0, 10.0).heights[0, 0]
    assert z4 < z5
    assert z5 == pytest.approx(5.0, abs=1e-3)


def test_iso_frequency_out_of_range_is_nan(single_site):
    cfg = ScanConfig(x_range=(0.0, 0.0), y_range=(0.0, 0.0), step=1.0)
    iso = scan_iso_frequency(cfg, single_site, 1e9, 2.0, 10.0)
    assert np.isnan(iso.heights[0, 0])


def test_iso_frequency_rejects_bad_bracket(single_site):
    cfg = ScanConfig(x_range=(0.0, 0.0), y_range=(0.0, 0.0), step=1.0)
    with pytest.raises(ValueError):
        scan_iso_frequency(cfg, single_site, 100.0, 8.0, 3.0)


# ---------------------------------------------------------------- pair mode


def _pair_vs_meanfield(z):
    """Max |exact - mean-field| over both transitions, and the J^2 bound."""
    site_tex = _single_texture((0.0, 0.0, 0.0))
    site = site_tex.sites[0]
    cfg = ScanConfig(height=z, mode="exchange", probe=ProbeSpec(d_zfs=D_UEV, g=2.0))
    tip = (0.0, 0.0, z)
    mf = probe_resonances(probe_hamiltonian_at(tip, site_tex, cfg))
    exact = pair_mode_resonance(tip, site, cfg)
    j = exact.j_uev
    # The site is polarized +z: mean field corresponds to the m = +1/2
    # sector of the exact model.
    sector = exact.sectors[0.5]
    d_minus = abs(sector.f_minus - mf.f_minus)
    d_plus = abs(sector.f_plus - mf.f_plus)
    bound = 2.0 * j**2 / (D_UEV * H_GHZ)
    return max(d_minus, d_plus), bound


@pytest.mark.parametrize("z", [6.0, 7.0, 8.0])
def test_pair_mode_within_second_order_bound(z):
    discrepancy, bound = _pair_vs_meanfield(z)
    assert discrepancy <= bound


def test_pair_mode_sector_antisymmetry():
    # At first order the two site sectors shift each transition by
    # opposite amounts; their sorted pairs coincide by up-down symmetry.
    site_tex = _single_texture((0.0, 0.0, 0.0))
    site = site_tex.sites[0]
    cfg = ScanConfig(height=6.0, mode="exchange", probe=ProbeSpec(d_zfs=D_UEV, g=2.0))
    res = pair_mode_resonance((0.0, 0.0, 6.0), site, cfg)
    up = res.sectors[0.5]
    down = res.sectors[-0.5]
    assert up.f_minus == pytest.approx(down.f_minus, rel=1e-12)
    assert up.f_plus == pytest.approx(down.f_plus, rel=1e-12)
    # Signed first-order shifts from the labeled level energies: the
    # (0, m_site) -> (1, m_site) gap is D + J m_site + O(J^2/D), so the
    # signed shift flips with the sector to second order.
    e = res.labeled_energies
    shift_up = (e[(1.0, 0.5)] - e[(0.0, 0.5)]) - D_UEV
    shift_down = (e[(1.0, -0.5)] - e[(0.0, -0.5)]) - D_UEV
    second_order = 2.0 * res.j_uev**2 / D_UEV
    assert shift_up == pytest.approx(-shift_down, abs=second_order)
    assert shift_up == pytest.approx(0.5 * res.j_uev, abs=second_order)
    assert shift_up > 0.0 > shift_down


def test_pair_mode_rejects_non_half_integer_spin():
    tex = SpinTexture(
        positions=np.array([[0.0, 0.0, 0.0]]),
        spin_dirs=np.array([[0.0, 0.0, 1.0]]),
        spin_mag=0.3,
        g=2.0,
    )
    cfg = ScanConfig()
    with pytest.raises(ValueError):
        pair_mode_resonance((0.0, 0.0, 6.0), tex.sites[0], cfg)


# ------------------------------------------------------------------- sweeps


def test_sweep_columns_and_values():
    curve = distance_sweep(2.0, 100.0, 200, log_spacing=True)
    assert curve.r.shape == (200,)
    assert np.all(np.diff(curve.r) > 0)
    assert curve.r[0] == pytest.approx(2.0) and curve.r[-1] == pytest.approx(100.0)
    # Row nearest r = 3 A sits in the multi-THz regime near J(3)/h.
    i = np.argmin(np.abs(curve.r - 3.0))
    assert curve.f_res[i] == pytest.approx(curve.j_ex[i] / H_GHZ, rel=1e-12)
    assert 4000.0 < curve.f_res[i] < 5200.0  # grid point is 3.02 A, not 3 A
    # Dipolar column follows g^2 * prefactor / r^3 exactly.
    expect_dd = 4.0 * CONSTANTS.dipole_energy_prefactor / curve.r**3
    assert np.allclose(curve.e_dd, expect_dd, rtol=1e-12)
    # Stray field column: 2 * spin_mag * g * prefactor / r^3.
    expect_b = 2.0 * 0.5 * CONSTANTS.stray_prefactor_per_mu_b * 2.0 / curve.r**3
    assert np.allclose(curve.b_stray, expect_b, rtol=1e-12)


def test_sweep_crossover_frozen():
    curve = distance_sweep(2.0, 20.0, 400)
    assert curve.crossover_r == pytest.approx(6.112, abs=5e-3)


def test_sweep_crossover_none_outside_range():
    curve = distance_sweep(10.0, 20.0, 50)
    assert curve.crossover_r is None


def test_sweep_rejects_bad_args():
    with pytest.raises(ValueError):
        distance_sweep(2.0, 20.0, 1)
    with pytest.raises(ValueError):
        distance_sweep(20.0, 2.0, 10)
    with pytest.raises(ValueError):
        distance_sweep(-1.0, 2.0, 10)


def test_exchange_decays_faster_than_any_power():
    # d log J / d log r = 2.5 - 2 r / a_B: unbounded below, so the decay
    # eventually beats any fixed power law.
    r = np.linspace(3.0, 20.0, 200)
    slope = np.gradient(np.log(exchange_constant(r)), np.log(r))
    analytic = 2.5 - 2.0 * r / CONSTANTS.bohr_radius
    assert np.allclose(slope[1:-1], analytic[1:-1], rtol=0.01)
    assert slope[-1] < -70.0
    assert np.all(np.diff(slope) < 0)
