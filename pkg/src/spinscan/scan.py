"""Scan engine: tip-summed effective fields, raster maps, sweeps, pair mode.

The probe couples to the sample through two channels evaluated at the tip
position: the summed dipolar stray field of all sample spins (tesla) and
the summed exchange field (an energy vector in ueV contracting J(r_i)
with each classical spin vector).  Constant-height scans diagonalize the
resulting 3x3 probe Hamiltonian per pixel; iso-frequency scans invert
the upper resonance branch for height by bisection; pair mode treats one
sample site quantum-mechanically as an exactness oracle for the
mean-field sum.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constants import CONSTANTS
from .spincore import (
    ProbeSpec,
    ResonancePair,
    eigensolve,
    exchange_constant,
    spin_operators,
    zeeman_hamiltonian,
    zfs_hamiltonian,
)
from .texture import SampleSite, SpinTexture

__all__ = [
    "ScanConfig",
    "ResonanceMap",
    "IsoScanMap",
    "SweepCurve",
    "PairModeResult",
    "effective_fields_at",
    "probe_hamiltonian_at",
    "scan_constant_height",
    "scan_iso_frequency",
    "pair_mode_resonance",
    "distance_sweep",
]

_MODES = ("dipolar", "exchange", "both")
_CONVENTIONS = ("transition", "splitting")
_PREFACTORS = ("rydberg", "hartree")

# Tip positions closer than this (angstrom) to a site are invalid input.
_MIN_TIP_SITE_DISTANCE = 0.1

# Minimum scan height (angstrom); below this the point-spin formulas and
# the asymptotic exchange constant are both out of their validity range.
_MIN_HEIGHT = 1.0

_ISO_FREQ_TOL_GHZ = 1e-3   # 1 MHz bisection stop
_ISO_MAX_ITER = 100

_SPIN1 = spin_operators(1.0)


@dataclass(frozen=True)
class ScanConfig:
    """Raster-scan parameters; immutable, shared read-only by workers."""

    height: float = 4.0
    x_range: tuple = (0.0, 12.0)
    y_range: tuple = (0.0, 12.0)
    step: float = 0.25
    mode: str = "exchange"
    b_ext: tuple = (0.0, 0.0, 0.0)
    probe: ProbeSpec = field(default_factory=ProbeSpec)
    exchange_prefactor: str = "rydberg"
    resonance_convention: str = "transition"

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError(f"scan step must be positive, got {self.step}")
        if self.height < _MIN_HEIGHT:
            raise ValueError(
                f"scan height must be >= {_MIN_HEIGHT} A, got {self.height}"
            )
        if self.x_range[1] < self.x_range[0] or self.y_range[1] < self.y_range[0]:
            raise ValueError("scan ranges must satisfy min <= max")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.exchange_prefactor not in _PREFACTORS:
            raise ValueError(
                f"exchange_prefactor must be one of {_PREFACTORS}, "
                f"got {self.exchange_prefactor!r}"
            )
        if self.resonance_convention not in _CONVENTIONS:
            raise ValueError(
                f"resonance_convention must be one of {_CONVENTIONS}, "
                f"got {self.resonance_convention!r}"
            )

    @property
    def include_dipolar(self) -> bool:
        return self.mode in ("dipolar", "both")

    @property
    def include_exchange(self) -> bool:
        return self.mode in ("exchange", "both")


def _grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    """Points lo, lo+step, ... up to hi (inclusive when commensurate)."""
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


@dataclass
class ResonanceMap:
    """Raster grid of probe resonances; row-major with x varying fastest.

    f_minus/f_plus are (ny, nx) GHz arrays; b_stray (tesla) and b_ex
    (ueV) are optional (ny, nx, 3) diagnostic channels, absent on maps
    loaded from CSV.
    """

    x0: float
    y0: float
    step: float
    nx: int
    ny: int
    height: float
    mode: str
    f_minus: np.ndarray
    f_plus: np.ndarray
    b_stray: Optional[np.ndarray] = None
    b_ex: Optional[np.ndarray] = None

    @property
    def xs(self) -> np.ndarray:
        return self.x0 + self.step * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        return self.y0 + self.step * np.arange(self.ny)

    def signal(self, convention: str = "transition") -> np.ndarray:
        """Scalar per-pixel signal: upper branch, or branch splitting."""
        if convention == "transition":
            return self.f_plus
        if convention == "splitting":
            return self.f_plus - self.f_minus
        raise ValueError(
            f"convention must be one of {_CONVENTIONS}, got {convention!r}"
        )


@dataclass
class IsoScanMap:
    """Per-pixel heights (angstrom) where f_plus equals the source frequency.

    Pixels with no bracketed root in [z_min, z_max] hold NaN.
    """

    x0: float
    y0: float
    step: float
    nx: int
    ny: int
    f_source: float
    z_min: float
    z_max: float
    heights: np.ndarray

    @property
    def xs(self) -> np.ndarray:
        return self.x0 + self.step * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        return self.y0 + self.step * np.arange(self.ny)


@dataclass(frozen=True)
class SweepCurve:
    """Interaction scales versus probe-to-sample distance (single site).

    r: angstrom, strictly increasing.  j_ex: exchange constant, ueV.
    e_dd: dipolar pair energy scale mu0 (g mu_B)^2 / 4 pi r^3, ueV.
    b_stray: on-axis stray field magnitude, tesla.  f_res: j_ex / h, GHz.
    crossover_r: radius where j_ex = e_dd, None if outside the range.
    """

    r: np.ndarray
    j_ex: np.ndarray
    e_dd: np.ndarray
    b_stray: np.ndarray
    f_res: np.ndarray
    crossover_r: Optional[float]


@dataclass(frozen=True)
class PairModeResult:
    """Exact probe+site resonances grouped by sample-spin sector.

    sectors maps the sample magnetic quantum number m_s to the probe
    ResonancePair extracted from eigenstates whose dominant product-basis
    component carries that m_s.  labeled_energies maps (m_probe, m_site)
    to the eigenvalue (ueV) of the eigenstate assigned that label, which
    keeps the sign of each transition's shift accessible.
    """

    j_uev: float
    sectors: dict
    eigenvalues: np.ndarray
    labeled_energies: dict


def _batch_effective_fields(
    tips: np.ndarray, tex: SpinTexture, exchange_prefactor: str
):
    """Stray and exchange field sums for a batch of tip positions.

    tips: (p, 3) angstrom.  Returns (b_stray (p, 3) tesla,
    b_ex (p, 3) ueV).  Rejects tips within the minimum distance of any
    site, reporting the offending tip coordinates.
    """
    disp = tips[:, None, :] - tex.positions[None, :, :]
    dist = np.linalg.norm(disp, axis=2)
    if np.min(dist) < _MIN_TIP_SITE_DISTANCE:
        p, i = np.unravel_index(np.argmin(dist), dist.shape)
        x, y, z = tips[p]
        raise ValueError(
            f"tip at ({x:.4g}, {y:.4g}, {z:.4g}) A is {dist[p, i]:.4g} A from "
            f"sample site {i} (minimum {_MIN_TIP_SITE_DISTANCE} A)"
        )
    rhat = disp / dist[..., None]
    spins = tex.spin_vectors
    s_dot_r = np.einsum("pnk,nk->pn", rhat, spins)
    pref = -tex.g * CONSTANTS.stray_prefactor_per_mu_b / dist**3
    b_stray = np.sum(
        pref[..., None] * (3.0 * rhat * s_dot_r[..., None] - spins[None, :, :]),
        axis=1,
    )
    j = exchange_constant(dist, prefactor=exchange_prefactor)
    b_ex = np.sum(j[..., None] * spins[None, :, :], axis=1)
    return b_stray, b_ex


def _batch_hamiltonians(
    b_stray: np.ndarray, b_ex: np.ndarray, cfg: ScanConfig
) -> np.ndarray:
    """(p, 3, 3) probe Hamiltonians from per-tip field sums."""
    b_eff = np.asarray(cfg.b_ext, dtype=float)[None, :] + (
        b_stray if cfg.include_dipolar else 0.0
    )
    # The Zeeman and exchange terms are both vector contractions with S,
    # so collapse them into one energy vector (ueV) before building H.
    e_vec = cfg.probe.g * CONSTANTS.mu_b * b_eff
    if cfg.include_exchange:
        e_vec = e_vec + b_ex
    h_zfs = zfs_hamiltonian(cfg.probe)
    h = (
        h_zfs[None, :, :]
        + e_vec[:, 0, None, None] * _SPIN1.sx[None, :, :]
        + e_vec[:, 1, None, None] * _SPIN1.sy[None, :, :]
        + e_vec[:, 2, None, None] * _SPIN1.sz[None, :, :]
    )
    return h


def _batch_resonances(h: np.ndarray):
    """Vectorized probe_resonances over stacked 3x3 Hamiltonians."""
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    overlap = np.abs(eigenvectors[:, 1, :]) ** 2
    ref = np.argmax(overlap, axis=1)
    e_ref = eigenvalues[np.arange(h.shape[0]), ref]
    diffs = np.sort(np.abs(eigenvalues - e_ref[:, None]), axis=1)
    # Column 0 is the reference state's zero self-difference.
    return diffs[:, 1] / CONSTANTS.h_planck, diffs[:, 2] / CONSTANTS.h_planck


def effective_fields_at(tip_pos, tex: SpinTexture, exchange_prefactor: str = "rydberg"):
    """Summed stray field (tesla) and exchange field (ueV) at one tip position.

    B_stray = sum_i stray_field(tip - r_i, spin_i), b_ex = sum_i
    J(|tip - r_i|) spin_i, with spin_i the classical vectors
    spin_mag * spin_dir of the texture.
    """
    tips = np.asarray(tip_pos, dtype=float)[None, :]
    b_stray, b_ex = _batch_effective_fields(tips, tex, exchange_prefactor)
    return b_stray[0], b_ex[0]


def probe_hamiltonian_at(tip_pos, tex: SpinTexture, cfg: ScanConfig) -> np.ndarray:
    """3x3 probe Hamiltonian (ueV) at one tip position under cfg.mode."""
    tips = np.asarray(tip_pos, dtype=float)[None, :]
    b_stray, b_ex = _batch_effective_fields(tips, tex, cfg.exchange_prefactor)
    return _batch_hamiltonians(b_stray, b_ex, cfg)[0]


def _scan_rows(cfg: ScanConfig, tex: SpinTexture, xs: np.ndarray, ys: np.ndarray):
    """Resonances and field channels for a block of scan rows."""
    grid_x, grid_y = np.meshgrid(xs, ys)
    tips = np.column_stack(
        [grid_x.ravel(), grid_y.ravel(), np.full(grid_x.size, cfg.height)]
    )
    b_stray, b_ex = _batch_effective_fields(tips, tex, cfg.exchange_prefactor)
    h = _batch_hamiltonians(b_stray, b_ex, cfg)
    f_minus, f_plus = _batch_resonances(h)
    shape = (len(ys), len(xs))
    return (
        f_minus.reshape(shape),
        f_plus.reshape(shape),
        b_stray.reshape(shape + (3,)),
        b_ex.reshape(shape + (3,)),
    )


def scan_constant_height(
    cfg: ScanConfig, tex: SpinTexture, workers: int = 1
) -> ResonanceMap:
    """Raster the tip at fixed height and record both resonance branches.

    Rows are distributed over a thread pool and reassembled by row
    index, so the output is bit-identical for any worker count.
    """
    xs = _grid_axis(cfg.x_range[0], cfg.x_range[1], cfg.step)
    ys = _grid_axis(cfg.y_range[0], cfg.y_range[1], cfg.step)
    nx, ny = len(xs), len(ys)
    f_minus = np.empty((ny, nx))
    f_plus = np.empty((ny, nx))
    b_stray = np.empty((ny, nx, 3))
    b_ex = np.empty((ny, nx, 3))

    workers = max(1, int(workers))
    n_chunks = min(workers * 4, ny) or 1
    row_chunks = np.array_split(np.arange(ny), n_chunks)

    def run_chunk(rows):
        return rows, _scan_rows(cfg, tex, xs, ys[rows])

    if workers == 1:
        results = [run_chunk(rows) for rows in row_chunks if rows.size]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(run_chunk, [rows for rows in row_chunks if rows.size])
            )
    for rows, (fm, fp, bs, bx) in results:
        f_minus[rows] = fm
        f_plus[rows] = fp
        b_stray[rows] = bs
        b_ex[rows] = bx

    if not (np.all(np.isfinite(f_minus)) and np.all(np.isfinite(f_plus))):
        raise ArithmeticError("scan produced non-finite resonance values")
    return ResonanceMap(
        x0=float(xs[0]),
        y0=float(ys[0]),
        step=cfg.step,
        nx=nx,
        ny=ny,
        height=cfg.height,
        mode=cfg.mode,
        f_minus=f_minus,
        f_plus=f_plus,
        b_stray=b_stray,
        b_ex=b_ex,
    )


def _f_plus_at_heights(
    cfg: ScanConfig, tex: SpinTexture, x: np.ndarray, y: np.ndarray, z: np.ndarray
) -> np.ndarray:
    """Upper-branch resonance for per-pixel tip heights."""
    tips = np.column_stack([x, y, z])
    b_stray, b_ex = _batch_effective_fields(tips, tex, cfg.exchange_prefactor)
    h = _batch_hamiltonians(b_stray, b_ex, cfg)
    _, f_plus = _batch_resonances(h)
    return f_plus


def scan_iso_frequency(
    cfg: ScanConfig,
    tex: SpinTexture,
    f_source: float,
    z_min: float,
    z_max: float,
) -> IsoScanMap:
    """Per-pixel height where the upper branch crosses f_source (GHz).

    Bisection between z_min and z_max to |delta f| < 1 MHz.  Pixels whose
    endpoint values do not bracket f_source are marked NaN rather than
    extrapolated.
    """
    if z_min < _MIN_HEIGHT:
        raise ValueError(f"z_min must be >= {_MIN_HEIGHT} A, got {z_min}")
    if z_max <= z_min:
        raise ValueError("z_max must exceed z_min")
    xs = _grid_axis(cfg.x_range[0], cfg.x_range[1], cfg.step)
    ys = _grid_axis(cfg.y_range[0], cfg.y_range[1], cfg.step)
    grid_x, grid_y = np.meshgrid(xs, ys)
    px = grid_x.ravel()
    py = grid_y.ravel()
    n = px.size

    lo = np.full(n, z_min)
    hi = np.full(n, z_max)
    f_lo = _f_plus_at_heights(cfg, tex, px, py, lo) - f_source
    f_hi = _f_plus_at_heights(cfg, tex, px, py, hi) - f_source
    bracketed = f_lo * f_hi <= 0.0

    heights = np.full(n, np.nan)
    active = bracketed.copy()
    for _ in range(_ISO_MAX_ITER):
        if not np.any(active):
            break
        mid = 0.5 * (lo + hi)
        idx = np.where(active)[0]
        f_mid = np.empty(n)
        f_mid[idx] = (
            _f_plus_at_heights(cfg, tex, px[idx], py[idx], mid[idx]) - f_source
        )
        converged = np.zeros(n, dtype=bool)
        converged[idx] = np.abs(f_mid[idx]) < _ISO_FREQ_TOL_GHZ
        newly = active & converged
        heights[newly] = mid[newly]
        active &= ~converged
        # Keep the sign change between lo and hi: the root stays on the
        # side where f changes sign relative to f_lo.
        same_side = np.zeros(n, dtype=bool)
        same_side[idx] = f_lo[idx] * f_mid[idx] > 0.0
        move_lo = active & same_side
        move_hi = active & ~same_side
        lo[move_lo] = mid[move_lo]
        f_lo[move_lo] = f_mid[move_lo]
        hi[move_hi] = mid[move_hi]
    # Any still-active pixels hit the iteration cap; report the midpoint.
    heights[active] = 0.5 * (lo[active] + hi[active])

    return IsoScanMap(
        x0=float(xs[0]),
        y0=float(ys[0]),
        step=cfg.step,
        nx=len(xs),
        ny=len(ys),
        f_source=float(f_source),
        z_min=float(z_min),
        z_max=float(z_max),
        heights=heights.reshape(len(ys), len(xs)),
    )


def pair_mode_resonance(
    tip_pos, site: SampleSite, cfg: ScanConfig
) -> PairModeResult:
    """Exact probe+single-site treatment: the mean-field oracle.

    The site spin is quantized with s equal to its spin magnitude (a
    half-integer).  H = zfs x 1 + J(r) S_probe . S_site plus Zeeman
    terms on both spins when an external field is set.  Eigenstates are
    assigned to product-basis labels (m_probe, m_site) by greedy maximal
    overlap; each m_site sector yields one ResonancePair.
    """
    s_sample = site.spin_mag
    if s_sample <= 0 or abs(2.0 * s_sample - round(2.0 * s_sample)) > 1e-9:
        raise ValueError(
            "pair mode quantizes the site spin: spin magnitude must be a "
            f"positive half-integer, got {s_sample}"
        )
    ops_s = spin_operators(s_sample)
    dist = float(np.linalg.norm(np.asarray(tip_pos, dtype=float) - site.position))
    if dist < _MIN_TIP_SITE_DISTANCE:
        raise ValueError(f"tip-site distance {dist:.4g} A below validity minimum")
    j_uev = float(exchange_constant(dist, prefactor=cfg.exchange_prefactor))

    dim_t, dim_s = 3, ops_s.dim
    eye_t = np.eye(dim_t)
    eye_s = np.eye(dim_s)
    h = np.kron(zfs_hamiltonian(cfg.probe), eye_s).astype(complex)
    h += j_uev * (
        np.kron(_SPIN1.sx, ops_s.sx)
        + np.kron(_SPIN1.sy, ops_s.sy)
        + np.kron(_SPIN1.sz, ops_s.sz)
    )
    b_ext = np.asarray(cfg.b_ext, dtype=float)
    if np.any(b_ext != 0.0):
        h += np.kron(zeeman_hamiltonian(cfg.probe.g, b_ext, _SPIN1), eye_s)
        h += np.kron(eye_t, zeeman_hamiltonian(site.g, b_ext, ops_s))

    decomp = eigensolve(h)
    dim = dim_t * dim_s
    overlap = np.abs(decomp.eigenvectors) ** 2   # [basis, eigenstate]

    # Greedy bijection: repeatedly take the largest remaining overlap.
    label_of_state = {}
    taken_basis = set()
    order = np.argsort(overlap, axis=None)[::-1]
    for flat in order:
        basis, state = np.unravel_index(flat, (dim, dim))
        if state in label_of_state or basis in taken_basis:
            continue
        label_of_state[state] = basis
        taken_basis.add(basis)
        if len(label_of_state) == dim:
            break

    m_probe = 1.0 - np.arange(dim_t)
    m_site = s_sample - np.arange(dim_s)
    # energies[(m_t, m_s)] from the assignment
    energy_of = {}
    for state, basis in label_of_state.items():
        t_idx, s_idx = divmod(basis, dim_s)
        energy_of[(m_probe[t_idx], m_site[s_idx])] = decomp.eigenvalues[state]

    sectors = {}
    for ms in m_site:
        e_ref = energy_of[(0.0, ms)]
        freqs = sorted(
            abs(energy_of[(mt, ms)] - e_ref) / CONSTANTS.h_planck
            for mt in (1.0, -1.0)
        )
        sectors[float(ms)] = ResonancePair(
            f_minus=float(freqs[0]), f_plus=float(freqs[1])
        )
    return PairModeResult(
        j_uev=j_uev,
        sectors=sectors,
        eigenvalues=decomp.eigenvalues,
        labeled_energies={k: float(v) for k, v in energy_of.items()},
    )


def distance_sweep(
    r_min: float,
    r_max: float,
    n_points: int,
    log_spacing: bool = False,
    exchange_prefactor: str = "rydberg",
    spin_mag: float = 0.5,
    g_probe: float = 2.0,
    g_sample: float = 2.0,
) -> SweepCurve:
    """Interaction energy scales versus single-site tip distance.

    Tabulates the exchange constant J(r), the dipolar pair scale
    mu0 (g_probe mu_B)(g_sample mu_B) / 4 pi r^3, the on-axis stray
    field of a spin_mag moment, and f_res = J/h.  Also locates the
    exchange-dipolar crossover radius by bisection on J(r) - E_dd(r).
    """
    if not 0.0 < r_min < r_max:
        raise ValueError(f"need 0 < r_min < r_max, got {r_min}, {r_max}")
    if n_points < 2:
        raise ValueError(f"need at least 2 sweep points, got {n_points}")
    if log_spacing:
        r = np.geomspace(r_min, r_max, n_points)
    else:
        r = np.linspace(r_min, r_max, n_points)

    j_ex = exchange_constant(r, prefactor=exchange_prefactor)
    dd_scale = g_probe * g_sample * CONSTANTS.dipole_energy_prefactor
    e_dd = dd_scale / r**3
    # On-axis stray field of a spin aligned with the axis: |3 rhat (S.rhat) - S|
    # = 2 spin_mag, so |B| = (mu0 g mu_B / 4 pi r^3) * 2 spin_mag.
    b_stray = CONSTANTS.stray_prefactor_per_mu_b * g_sample * 2.0 * spin_mag / r**3
    f_res = j_ex / CONSTANTS.h_planck

    def gap(radius: float) -> float:
        return float(
            exchange_constant(radius, prefactor=exchange_prefactor)
            - dd_scale / radius**3
        )

    crossover = None
    signs = np.sign(j_ex - e_dd)
    flips = np.where(signs[:-1] * signs[1:] < 0)[0]
    if flips.size:
        lo, hi = float(r[flips[0]]), float(r[flips[0] + 1])
        g_lo = gap(lo)
        while hi - lo > 1e-3:
            mid = 0.5 * (lo + hi)
            g_mid = gap(mid)
            if g_lo * g_mid <= 0.0:
                hi = mid
            else:
                lo, g_lo = mid, g_mid
        crossover = 0.5 * (lo + hi)
    elif np.any(signs == 0):
        crossover = float(r[np.argmax(signs == 0)])

    return SweepCurve(
        r=r, j_ex=j_ex, e_dd=e_dd, b_stray=b_stray, f_res=f_res, crossover_r=crossover
    )
