"""Spin operator algebra, interaction Hamiltonians, and resonance extraction.

Everything here is a pure function of its inputs.  Matrices are dense
complex numpy arrays in the |s, m> basis ordered m = s, s-1, ..., -s, so
Sz is diagonal with entries (s, ..., -s) and the m = 0 state of a spin-1
sits at basis index 1.  Energies are in ueV, fields in tesla, lengths in
angstrom, frequencies in GHz.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import CONSTANTS, energy_to_frequency

__all__ = [
    "SpinOperatorSet",
    "ProbeSpec",
    "EigenDecomposition",
    "ResonancePair",
    "spin_operators",
    "zfs_hamiltonian",
    "zeeman_hamiltonian",
    "dipole_pair_hamiltonian",
    "exchange_pair_hamiltonian",
    "exchange_constant",
    "stray_field",
    "eigensolve",
    "probe_resonances",
]

_HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class SpinOperatorSet:
    """Sx, Sy, Sz for spin quantum number s; dimension 2s + 1."""

    s: float
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray

    @property
    def dim(self) -> int:
        return self.sx.shape[0]


@dataclass(frozen=True)
class ProbeSpec:
    """Probe defect parameters: spin-1 with zero-field splitting D (ueV)."""

    d_zfs: float = 14.4
    g: float = CONSTANTS.g_e_default
    s: float = field(default=1.0, init=False)

    def __post_init__(self):
        if self.d_zfs <= 0:
            raise ValueError(f"zero-field splitting must be positive, got {self.d_zfs}")


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending real eigenvalues (ueV) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class ResonancePair:
    """Probe transition frequencies in GHz, sorted ascending."""

    f_minus: float
    f_plus: float


def spin_operators(s: float) -> SpinOperatorSet:
    """Build Sx, Sy, Sz for spin s via the standard ladder construction.

    s must be a positive half-integer.  Basis ordering m = s, ..., -s.
    """
    two_s = 2.0 * s
    if s <= 0 or abs(two_s - round(two_s)) > 1e-12:
        raise ValueError(f"spin quantum number must be a positive half-integer, got {s}")
    dim = int(round(two_s)) + 1
    m = s - np.arange(dim)
    # <m+1| S+ |m> = sqrt(s(s+1) - m(m+1)); entry (k, k+1) raises m[k+1] to m[k].
    raise_coeff = np.sqrt(s * (s + 1.0) - m[1:] * (m[1:] + 1.0))
    s_plus = np.diag(raise_coeff, k=1).astype(complex)
    s_minus = s_plus.conj().T
    sx = 0.5 * (s_plus + s_minus)
    sy = -0.5j * (s_plus - s_minus)
    sz = np.diag(m).astype(complex)
    return SpinOperatorSet(s=s, sx=sx, sy=sy, sz=sz)


def zfs_hamiltonian(probe: ProbeSpec) -> np.ndarray:
    """Zero-field splitting term D (Sz^2 - S(S+1)/3) for the spin-1 probe, ueV."""
    ops = spin_operators(probe.s)
    casimir = probe.s * (probe.s + 1.0)
    return probe.d_zfs * (ops.sz @ ops.sz - (casimir / 3.0) * np.eye(ops.dim))


def zeeman_hamiltonian(g: float, b_field, ops: SpinOperatorSet) -> np.ndarray:
    """Zeeman term g mu_B B . S with B in tesla; result in ueV."""
    b = np.asarray(b_field, dtype=float)
    return g * CONSTANTS.mu_b * (b[0] * ops.sx + b[1] * ops.sy + b[2] * ops.sz)


def dipole_pair_hamiltonian(
    g1: float,
    g2: float,
    r_vec,
    ops1: SpinOperatorSet,
    ops2: SpinOperatorSet,
) -> np.ndarray:
    """Magnetic dipole-dipole coupling of two spins separated by r_vec (angstrom).

    H = -(mu0 g1 g2 mu_B^2 / 4 pi r^3) (3 (S1.rhat)(S2.rhat) - S1.S2)
    on the tensor-product space, in ueV.
    """
    r = np.asarray(r_vec, dtype=float)
    dist = float(np.linalg.norm(r))
    if dist <= 0.0:
        raise ValueError("dipole coupling requires a nonzero separation")
    rhat = r / dist
    prefactor = -g1 * g2 * CONSTANTS.dipole_energy_prefactor / dist**3
    s1r = rhat[0] * ops1.sx + rhat[1] * ops1.sy + rhat[2] * ops1.sz
    s2r = rhat[0] * ops2.sx + rhat[1] * ops2.sy + rhat[2] * ops2.sz
    dot = (
        np.kron(ops1.sx, ops2.sx)
        + np.kron(ops1.sy, ops2.sy)
        + np.kron(ops1.sz, ops2.sz)
    )
    return prefactor * (3.0 * np.kron(s1r, s2r) - dot)


def exchange_pair_hamiltonian(
    j_uev: float, ops1: SpinOperatorSet, ops2: SpinOperatorSet
) -> np.ndarray:
    """Isotropic Heisenberg coupling J S1 . S2 on the tensor-product space, ueV."""
    return j_uev * (
        np.kron(ops1.sx, ops2.sx)
        + np.kron(ops1.sy, ops2.sy)
        + np.kron(ops1.sz, ops2.sz)
    )


def exchange_constant(r, prefactor: str = "rydberg"):
    """Distance-dependent exchange constant J(r) in ueV, r in angstrom.

    J(r) = 1.641 E0 (r/a_B)^{5/2} exp(-2 r/a_B), the asymptotic
    hydrogenic surface-integral form.  E0 is e^2/2a_B (Rydberg) by
    default; prefactor="hartree" selects e^2/a_B instead.  The formula is
    an r >> a_B asymptote, so r below 2 angstrom draws a warning.

    Accepts a scalar or an ndarray of distances.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0.0):
        raise ValueError(f"exchange constant requires r > 0, got {np.min(r_arr)}")
    if np.any(r_arr < 2.0):
        warnings.warn(
            f"exchange constant evaluated at r = {np.min(r_arr):g} A, below "
            "the 2 A validity range of the asymptotic form",
            stacklevel=2,
        )
    if prefactor == "rydberg":
        e0_uev = CONSTANTS.rydberg * 1e6
    elif prefactor == "hartree":
        e0_uev = CONSTANTS.hartree * 1e6
    else:
        raise ValueError(f"prefactor must be 'rydberg' or 'hartree', got {prefactor!r}")
    x = r_arr / CONSTANTS.bohr_radius
    j = 1.641 * e0_uev * x**2.5 * np.exp(-2.0 * x)
    return float(j) if np.isscalar(r) else j


def stray_field(r_vec, spin_vec, g: float) -> np.ndarray:
    """Dipolar stray field (tesla) of a classical spin at displacement r_vec.

    r_vec points from the source spin to the field point (angstrom);
    spin_vec is the dimensionless classical spin vector <S>.

    B = -(mu0 g mu_B / 4 pi r^3) (3 rhat (S.rhat) - S)
    """
    r = np.asarray(r_vec, dtype=float)
    spin = np.asarray(spin_vec, dtype=float)
    dist = float(np.linalg.norm(r))
    if dist <= 0.0:
        raise ValueError("stray field requires a nonzero separation")
    rhat = r / dist
    prefactor = -g * CONSTANTS.stray_prefactor_per_mu_b / dist**3
    return prefactor * (3.0 * rhat * np.dot(spin, rhat) - spin)


def eigensolve(h: np.ndarray) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    h = np.asarray(h)
    deviation = np.max(np.abs(h - h.conj().T))
    scale = max(np.max(np.abs(h)), 1.0)
    if deviation > _HERMITICITY_TOL * scale:
        raise ValueError(
            f"matrix is not Hermitian (max deviation {deviation:.3e})"
        )
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    return EigenDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def probe_resonances(h_probe: np.ndarray) -> ResonancePair:
    """Transition frequencies (GHz) of a 3x3 probe Hamiltonian in ueV.

    The reference state is the eigenstate with maximal |<m=0|psi>|^2
    (basis index 1); ties go to the lower-energy candidate.  The two
    resonances are |E_k - E_ref|/h for the remaining eigenstates, sorted
    ascending.  Overlap-based labeling keeps the branches continuous as
    transverse fields mix the m states.
    """
    decomp = eigensolve(h_probe)
    overlap = np.abs(decomp.eigenvectors[1, :]) ** 2
    # argmax returns the first maximum; eigenvalues ascend, so ties in
    # overlap already resolve toward the lower-energy state.
    ref = int(np.argmax(overlap))
    others = [k for k in range(3) if k != ref]
    freqs = sorted(
        energy_to_frequency(abs(decomp.eigenvalues[k] - decomp.eigenvalues[ref]))
        for k in others
    )
    return ResonancePair(f_minus=float(freqs[0]), f_plus=float(freqs[1]))
