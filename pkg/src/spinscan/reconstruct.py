"""Linear inversion of resonance-shift maps back to per-site spin moments.

For collinear spins along z the axial resonance shift is linear in the
per-site moments m_z: exchange rows of the forward kernel are J(r)/h,
dipolar rows are the probe Zeeman shift of the per-moment stray-field
z-component.  Tikhonov-regularized least squares is solved by conjugate
gradient on the normal equations; the conditioning report quantifies how
ill-posed each mode is (the dipolar kernel at large height has a
near-null space, so its inversion is effectively non-unique).
"""

from __future__ import annotations

from dataclasses import dataclass
import warnings

import numpy as np

from .constants import CONSTANTS
from .scan import _MIN_HEIGHT, _grid_axis
from .spincore import exchange_constant
from .texture import SpinTexture

__all__ = [
    "ForwardOperator",
    "ConditioningReport",
    "ReconstructionResult",
    "build_forward",
    "solve_tikhonov",
    "conditioning_report",
    "lcurve",
]

_CG_REL_TOL = 1e-10
_RANK_DEFICIENT_RATIO = 1e-12


@dataclass(frozen=True)
class ForwardOperator:
    """Kernel A (pixels x sites, GHz per unit z-moment) plus geometry."""

    a: np.ndarray
    site_positions: np.ndarray
    x0: float
    y0: float
    step: float
    nx: int
    ny: int
    height: float
    mode: str
    g_probe: float
    g_sample: float

    @property
    def n_pixels(self) -> int:
        return self.a.shape[0]

    @property
    def n_sites(self) -> int:
        return self.a.shape[1]


@dataclass(frozen=True)
class ConditioningReport:
    """Singular-value summary of a kernel; near_null_vector witnesses
    the least-observable unit moment pattern."""

    sigma_max: float
    sigma_min: float
    cond: float
    near_null_vector: np.ndarray

    @property
    def rank_deficient(self) -> bool:
        return self.sigma_min <= _RANK_DEFICIENT_RATIO * self.sigma_max


@dataclass(frozen=True)
class ReconstructionResult:
    """Recovered per-site moments plus solver and conditioning details."""

    m_z: np.ndarray
    residual_norm: float
    lam: float
    iterations: int
    report: ConditioningReport


def _check_collinear(tex: SpinTexture) -> None:
    transverse = np.abs(tex.spin_dirs[:, :2]).max() if tex.spin_mag > 0 else 0.0
    if transverse > 1e-9:
        raise ValueError(
            "reconstruction assumes a collinear texture along z; this texture "
            f"has transverse spin components up to {transverse:.3g}. Project "
            "or rotate the texture so every spin points along +/- z."
        )


def build_forward(
    tex: SpinTexture,
    x_range,
    y_range,
    step: float,
    height: float,
    mode: str,
    exchange_prefactor: str = "rydberg",
    g_probe: float = CONSTANTS.g_e_default,
) -> ForwardOperator:
    """Assemble the linear map from per-site m_z to resonance shift (GHz).

    Exchange mode: A[p, i] = J(|tip_p - r_i|) / h.  Dipolar mode:
    A[p, i] = g_probe mu_B Bz_i(tip_p) / h with Bz_i the stray-field
    z-component of a unit z-moment at site i.  Mode "both" sums the two.
    The texture provides geometry and the sample g; it must be collinear
    along z for the shift to be linear in m_z.
    """
    _check_collinear(tex)
    if height < _MIN_HEIGHT:
        raise ValueError(f"height must be >= {_MIN_HEIGHT} A, got {height}")
    if mode not in ("dipolar", "exchange", "both"):
        raise ValueError(f"unknown forward mode {mode!r}")

    xs = _grid_axis(x_range[0], x_range[1], step)
    ys = _grid_axis(y_range[0], y_range[1], step)
    grid_x, grid_y = np.meshgrid(xs, ys)
    tips = np.column_stack(
        [grid_x.ravel(), grid_y.ravel(), np.full(grid_x.size, float(height))]
    )
    disp = tips[:, None, :] - tex.positions[None, :, :]
    dist = np.linalg.norm(disp, axis=2)

    a = np.zeros((tips.shape[0], tex.n_sites))
    if mode in ("exchange", "both"):
        a += exchange_constant(dist, prefactor=exchange_prefactor) / CONSTANTS.h_planck
    if mode in ("dipolar", "both"):
        # Stray-field z-component of a unit moment along z:
        # Bz = -(mu0 g mu_B / 4 pi r^3)(3 rhat_z^2 - 1).
        rhat_z = disp[:, :, 2] / dist
        bz = (
            -tex.g
            * CONSTANTS.stray_prefactor_per_mu_b
            / dist**3
            * (3.0 * rhat_z**2 - 1.0)
        )
        a += g_probe * CONSTANTS.mu_b * bz / CONSTANTS.h_planck

    if not np.all(np.isfinite(a)):
        raise ArithmeticError("forward kernel contains non-finite entries")
    return ForwardOperator(
        a=a,
        site_positions=tex.positions.copy(),
        x0=float(xs[0]),
        y0=float(ys[0]),
        step=float(step),
        nx=len(xs),
        ny=len(ys),
        height=float(height),
        mode=mode,
        g_probe=float(g_probe),
        g_sample=float(tex.g),
    )


def conditioning_report(a) -> ConditioningReport:
    """Extremal singular values of the kernel via eigenanalysis of A^T A."""
    mat = a.a if isinstance(a, ForwardOperator) else np.asarray(a, dtype=float)
    if mat.shape[1] > 200:
        raise ValueError(
            f"dense conditioning analysis supports up to 200 sites, "
            f"got {mat.shape[1]}"
        )
    gram = mat.T @ mat
    eigenvalues, eigenvectors = np.linalg.eigh(gram)
    sigmas = np.sqrt(np.clip(eigenvalues, 0.0, None))
    sigma_max = float(sigmas[-1])
    sigma_min = float(sigmas[0])
    cond = sigma_max / sigma_min if sigma_min > 0 else float("inf")
    return ConditioningReport(
        sigma_max=sigma_max,
        sigma_min=sigma_min,
        cond=cond,
        near_null_vector=eigenvectors[:, 0],
    )


def _conjugate_gradient(mat_vec, b: np.ndarray, max_iter: int, rel_tol: float):
    """Textbook CG for a symmetric positive (semi)definite system."""
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = float(r @ r)
    b_norm = np.sqrt(float(b @ b))
    if b_norm == 0.0:
        return x, 0
    iterations = 0
    for iterations in range(1, max_iter + 1):
        ap = mat_vec(p)
        denom = float(p @ ap)
        if denom <= 0.0:
            break
        alpha = rs / denom
        x += alpha * p
        r -= alpha * ap
        rs_new = float(r @ r)
        if np.sqrt(rs_new) <= rel_tol * b_norm:
            break
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x, iterations


def solve_tikhonov(fwd: ForwardOperator, y, lam: float) -> ReconstructionResult:
    """Minimize ||A m - y||^2 + lam ||m||^2 over per-site moments m.

    Conjugate gradient on (A^T A + lam I) m = A^T y from m = 0, stopping
    at relative residual 1e-10 or 10 x site count iterations.  With
    lam = 0 and a rank-deficient kernel the iterate CG returns is the
    minimum-norm-seeking one; the conditioning report flags the
    deficiency.
    """
    if lam < 0:
        raise ValueError(f"regularization strength must be >= 0, got {lam}")
    a = fwd.a
    y = np.asarray(y, dtype=float).ravel()
    if y.size != a.shape[0]:
        raise ValueError(
            f"observation vector has {y.size} entries, kernel has "
            f"{a.shape[0]} pixels"
        )
    report = conditioning_report(fwd)
    if lam == 0.0 and report.rank_deficient:
        warnings.warn(
            "lam = 0 with a rank-deficient kernel "
            f"(cond = {report.cond:.3e}); solution is not unique",
            stacklevel=2,
        )

    b = a.T @ y

    def normal_op(v: np.ndarray) -> np.ndarray:
        return a.T @ (a @ v) + lam * v

    m, iterations = _conjugate_gradient(
        normal_op, b, max_iter=10 * a.shape[1], rel_tol=_CG_REL_TOL
    )
    residual = float(np.linalg.norm(a @ m - y))
    return ReconstructionResult(
        m_z=m,
        residual_norm=residual,
        lam=float(lam),
        iterations=iterations,
        report=report,
    )


def lcurve(fwd: ForwardOperator, y, lambdas) -> list:
    """Tabulate (lam, residual norm, solution norm) over a lam grid.

    A plain sampling helper for manual regularization choice; no corner
    detection or automatic selection.
    """
    rows = []
    for lam in lambdas:
        result = solve_tikhonov(fwd, y, float(lam))
        rows.append(
            (float(lam), result.residual_norm, float(np.linalg.norm(result.m_z)))
        )
    return rows
