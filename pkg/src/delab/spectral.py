"""Periodic-grid fields and spectral operators.

Everything lives on a uniform n x n grid over the square [0, L)^2 with
periodic boundary conditions.  Scalar fields carry their representation
(physical samples or Fourier coefficients); all operators are pure
functions returning new fields.

Sign conventions used throughout the package:

    rot u  = d2 u1 - d1 u2
    u      = (-d2 psi, d1 psi)   with  -Lap psi = omega
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

PHYSICAL = "physical"
SPECTRAL = "spectral"

TWO_THIRDS = 2.0 / 3.0


class GridMismatchError(ValueError):
    """Fields defined on different grids were combined."""


class SolvabilityError(ValueError):
    """Periodic Poisson problem with nonzero-mean source."""


class NonSolenoidalWarning(UserWarning):
    """Input velocity field has divergence beyond tolerance."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [0, box_length)^2 with n points per side."""

    n: int
    box_length: float = 2.0 * np.pi
    dealias_fraction: float = TWO_THIRDS

    def __post_init__(self):
        if self.n < 16:
            raise ValueError(f"grid n must be >= 16, got {self.n}")
        if self.n & (self.n - 1) != 0:
            raise ValueError(f"grid n must be a power of two, got {self.n}")
        if not self.box_length > 0:
            raise ValueError(f"box_length must be positive, got {self.box_length}")
        if not 0.0 < self.dealias_fraction <= 1.0:
            raise ValueError(
                f"dealias_fraction must lie in (0, 1], got {self.dealias_fraction}"
            )

    @property
    def h(self) -> float:
        return self.box_length / self.n

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell coordinates X1[i, j] = i*h, X2[i, j] = j*h."""
        return _coords(self.n, self.box_length)


@lru_cache(maxsize=32)
def _coords(n: int, box_length: float):
    x = np.arange(n) * (box_length / n)
    x1, x2 = np.meshgrid(x, x, indexing="ij")
    x1.setflags(write=False)
    x2.setflags(write=False)
    return x1, x2


@lru_cache(maxsize=32)
def _basis(n: int, box_length: float):
    """Wavenumbers k1, k2 (axis 0 and 1), |k|^2 and its safe inverse."""
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=box_length / n)
    k1 = k[:, None] * np.ones((1, n))
    k2 = np.ones((n, 1)) * k[None, :]
    ksq = k1**2 + k2**2
    inv_ksq = np.zeros_like(ksq)
    inv_ksq[ksq > 0] = 1.0 / ksq[ksq > 0]
    for a in (k1, k2, ksq, inv_ksq):
        a.setflags(write=False)
    return k1, k2, ksq, inv_ksq


@lru_cache(maxsize=32)
def _dealias_mask(n: int, fraction: float):
    m = np.fft.fftfreq(n) * n
    cut = fraction * (n / 2.0)
    mask = (np.abs(m)[:, None] < cut) & (np.abs(m)[None, :] < cut)
    mask.setflags(write=False)
    return mask


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real scalar field on a periodic grid, stored physical or spectral."""

    grid: GridSpec
    values: np.ndarray
    representation: str = PHYSICAL

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"values shape {v.shape} does not match grid n={self.grid.n}")
        if self.representation == PHYSICAL:
            v = np.asarray(v, dtype=float)
        elif self.representation == SPECTRAL:
            v = np.asarray(v, dtype=complex)
        else:
            raise ValueError(f"unknown representation {self.representation!r}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def to_physical(self) -> "ScalarField":
        if self.representation == PHYSICAL:
            return self
        vals = np.real(np.fft.ifft2(self.values))
        return ScalarField(self.grid, vals, PHYSICAL)

    def to_spectral(self) -> "ScalarField":
        if self.representation == SPECTRAL:
            return self
        return ScalarField(self.grid, np.fft.fft2(self.values), SPECTRAL)

    @property
    def phys(self) -> np.ndarray:
        """Physical-space samples (converts if needed)."""
        return self.to_physical().values

    @property
    def hat(self) -> np.ndarray:
        """Fourier coefficients (converts if needed)."""
        return self.to_spectral().values


@dataclass(frozen=True, eq=False)
class VectorField:
    """Pair of scalar components sharing one grid and representation."""

    u1: ScalarField
    u2: ScalarField

    def __post_init__(self):
        if self.u1.grid != self.u2.grid:
            raise GridMismatchError("vector components on different grids")
        if self.u1.representation != self.u2.representation:
            raise ValueError("vector components in different representations")

    @property
    def grid(self) -> GridSpec:
        return self.u1.grid

    def to_physical(self) -> "VectorField":
        return VectorField(self.u1.to_physical(), self.u2.to_physical())


def scalar(grid: GridSpec, values: np.ndarray) -> ScalarField:
    return ScalarField(grid, values, PHYSICAL)


def vector(grid: GridSpec, v1: np.ndarray, v2: np.ndarray) -> VectorField:
    return VectorField(scalar(grid, v1), scalar(grid, v2))


def zeros(grid: GridSpec) -> ScalarField:
    return ScalarField(grid, np.zeros((grid.n, grid.n)), PHYSICAL)


def _check_same_grid(*fields):
    g0 = fields[0].grid
    for f in fields[1:]:
        if f.grid != g0:
            raise GridMismatchError("operation mixes fields on different grids")


# ---------------------------------------------------------------------------
# array-level kernels (hot paths used by the time stepper)

def deriv_hat(f_hat: np.ndarray, axis: int, grid: GridSpec) -> np.ndarray:
    k1, k2, _, _ = _basis(grid.n, grid.box_length)
    k = k1 if axis == 1 else k2
    return 1j * k * f_hat


def velocity_hat_from_omega_hat(omega_hat: np.ndarray, grid: GridSpec):
    """u = (-d2 psi, d1 psi) with -Lap psi = omega (zero-mean gauge)."""
    k1, k2, _, inv_ksq = _basis(grid.n, grid.box_length)
    psi_hat = omega_hat * inv_ksq
    return -1j * k2 * psi_hat, 1j * k1 * psi_hat


def advection_hat(omega_hat: np.ndarray, grid: GridSpec,
                  mean_u: tuple[float, float] = (0.0, 0.0)) -> np.ndarray:
    """Dealiased transform of u.grad(omega) with u = BS(omega) + mean_u."""
    mask = _dealias_mask(grid.n, grid.dealias_fraction)
    u1h, u2h = velocity_hat_from_omega_hat(omega_hat, grid)
    k1, k2, _, _ = _basis(grid.n, grid.box_length)
    dx = np.real(np.fft.ifft2(1j * k1 * omega_hat * mask))
    dy = np.real(np.fft.ifft2(1j * k2 * omega_hat * mask))
    u1 = np.real(np.fft.ifft2(u1h * mask)) + mean_u[0]
    u2 = np.real(np.fft.ifft2(u2h * mask)) + mean_u[1]
    return np.fft.fft2(u1 * dx + u2 * dy) * mask


# ---------------------------------------------------------------------------
# field-level operators

def derivative(f: ScalarField, axis: int) -> ScalarField:
    """Spectral partial derivative along axis 1 or 2."""
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    out = np.real(np.fft.ifft2(deriv_hat(f.hat, axis, f.grid)))
    return ScalarField(f.grid, out, PHYSICAL)


def gradient(f: ScalarField) -> VectorField:
    return VectorField(derivative(f, 1), derivative(f, 2))


def rot(u: VectorField) -> ScalarField:
    """Scalar curl with the convention rot u = d2 u1 - d1 u2."""
    _check_same_grid(u.u1, u.u2)
    out = derivative(u.u1, 2).values - derivative(u.u2, 1).values
    return ScalarField(u.grid, out, PHYSICAL)


def divergence(u: VectorField) -> ScalarField:
    _check_same_grid(u.u1, u.u2)
    out = derivative(u.u1, 1).values + derivative(u.u2, 2).values
    return ScalarField(u.grid, out, PHYSICAL)


def laplacian(f: ScalarField) -> ScalarField:
    _, _, ksq, _ = _basis(f.grid.n, f.grid.box_length)
    return ScalarField(f.grid, np.real(np.fft.ifft2(-ksq * f.hat)), PHYSICAL)


def dealias(f: ScalarField) -> ScalarField:
    mask = _dealias_mask(f.grid.n, f.grid.dealias_fraction)
    return ScalarField(f.grid, np.real(np.fft.ifft2(f.hat * mask)), PHYSICAL)


def box_mean(f: ScalarField) -> float:
    return float(np.mean(f.phys))


def box_integral(f: ScalarField) -> float:
    return float(np.sum(f.phys)) * f.grid.cell_area


def sup_norm(f: ScalarField) -> float:
    return float(np.max(np.abs(f.phys)))


def sup_norm_vec(u: VectorField) -> float:
    """Sup of the pointwise Euclidean magnitude."""
    p1 = u.u1.phys
    p2 = u.u2.phys
    return float(np.sqrt(np.max(p1 * p1 + p2 * p2)))


def l2_box(f) -> float:
    """L2 norm over the box (scalar or vector field)."""
    if isinstance(f, VectorField):
        p1 = f.u1.phys
        p2 = f.u2.phys
        s = np.sum(p1 * p1 + p2 * p2)
        return float(np.sqrt(s * f.grid.cell_area))
    p = f.phys
    return float(np.sqrt(np.sum(p * p) * f.grid.cell_area))


MEAN_TOL = 1e-10


def biot_savart(omega: ScalarField) -> VectorField:
    """Divergence-free velocity with rot u = omega, zero box mean.

    Rejects sources with nonzero box mean: the periodic Poisson problem
    for the streamfunction is only solvable for mean-free vorticity.
    """
    mean = abs(box_mean(omega))
    scale = max(1.0, sup_norm(omega))
    if mean > MEAN_TOL * scale:
        raise SolvabilityError(
            f"vorticity has box mean {mean:.3e}; periodic Biot-Savart needs a "
            f"mean-free source (tolerance {MEAN_TOL:.0e} relative)"
        )
    u1h, u2h = velocity_hat_from_omega_hat(omega.hat, omega.grid)
    g = omega.grid
    return VectorField(
        ScalarField(g, np.real(np.fft.ifft2(u1h)), PHYSICAL),
        ScalarField(g, np.real(np.fft.ifft2(u2h)), PHYSICAL),
    )


DIV_TOL = 1e-8


def pressure_gradient_spectral(u: VectorField, check_divergence: bool = True) -> VectorField:
    """grad p for the periodic pressure problem -Lap p = sum d_i d_j (u_i u_j).

    The pressure is gauged to zero box mean.  Quadratic products are
    dealiased with the grid's retained-mode fraction.  A warning is issued
    when the input fails the divergence-free tolerance.
    """
    g = u.grid
    if check_divergence:
        div = divergence(u)
        dmax = sup_norm(div)
        scale = max(1.0, sup_norm_vec(u)) / g.box_length
        if dmax > DIV_TOL * max(1.0, scale):
            warnings.warn(
                f"pressure input has max |div u| = {dmax:.3e}; result solves the "
                "projected problem only",
                NonSolenoidalWarning,
                stacklevel=2,
            )
    k1, k2, _, inv_ksq = _basis(g.n, g.box_length)
    mask = _dealias_mask(g.n, g.dealias_fraction)
    p1 = u.u1.phys
    p2 = u.u2.phys
    w11 = np.fft.fft2(p1 * p1) * mask
    w12 = np.fft.fft2(p1 * p2) * mask
    w22 = np.fft.fft2(p2 * p2) * mask
    p_hat = -(k1 * k1 * w11 + 2.0 * k1 * k2 * w12 + k2 * k2 * w22) * inv_ksq
    return VectorField(
        ScalarField(g, np.real(np.fft.ifft2(1j * k1 * p_hat)), PHYSICAL),
        ScalarField(g, np.real(np.fft.ifft2(1j * k2 * p_hat)), PHYSICAL),
    )


def pressure_spectral(u: VectorField) -> ScalarField:
    """Zero-mean periodic pressure field for the same problem."""
    g = u.grid
    k1, k2, _, inv_ksq = _basis(g.n, g.box_length)
    mask = _dealias_mask(g.n, g.dealias_fraction)
    p1 = u.u1.phys
    p2 = u.u2.phys
    w11 = np.fft.fft2(p1 * p1) * mask
    w12 = np.fft.fft2(p1 * p2) * mask
    w22 = np.fft.fft2(p2 * p2) * mask
    p_hat = -(k1 * k1 * w11 + 2.0 * k1 * k2 * w12 + k2 * k2 * w22) * inv_ksq
    return ScalarField(g, np.real(np.fft.ifft2(p_hat)), PHYSICAL)


def nonlinear_term(u: VectorField, omega: ScalarField) -> ScalarField:
    """Pseudo-spectral u.grad(omega) with dealiased product."""
    _check_same_grid(u.u1, u.u2, omega)
    g = omega.grid
    mask = _dealias_mask(g.n, g.dealias_fraction)
    oh = omega.hat
    k1, k2, _, _ = _basis(g.n, g.box_length)
    dx = np.real(np.fft.ifft2(1j * k1 * oh * mask))
    dy = np.real(np.fft.ifft2(1j * k2 * oh * mask))
    u1 = np.real(np.fft.ifft2(u.u1.hat * mask))
    u2 = np.real(np.fft.ifft2(u.u2.hat * mask))
    prod = np.fft.fft2(u1 * dx + u2 * dy) * mask
    return ScalarField(g, np.real(np.fft.ifft2(prod)), PHYSICAL)


def add_mean(u: VectorField, mean: tuple[float, float]) -> VectorField:
    """Shift a velocity field by a constant vector."""
    g = u.grid
    return VectorField(
        ScalarField(g, u.u1.phys + mean[0], PHYSICAL),
        ScalarField(g, u.u2.phys + mean[1], PHYSICAL),
    )
