"""Deterministic field generators: analytic test flows and seeded ensembles."""

from __future__ import annotations

import numpy as np

from .spectral import (
    GridSpec,
    ScalarField,
    VectorField,
    PHYSICAL,
    biot_savart,
    _basis,
)


def taylor_green_vorticity(grid: GridSpec, amplitude: float = 2.0) -> ScalarField:
    """omega = amplitude * sin(2 pi x1 / L) sin(2 pi x2 / L); steady ideal flow."""
    x1, x2 = grid.coords()
    k = 2.0 * np.pi / grid.box_length
    return ScalarField(grid, amplitude * np.sin(k * x1) * np.sin(k * x2), PHYSICAL)


def taylor_green_velocity(grid: GridSpec, amplitude: float = 2.0) -> VectorField:
    """Velocity matching taylor_green_vorticity under the package conventions."""
    x1, x2 = grid.coords()
    k = 2.0 * np.pi / grid.box_length
    amp = amplitude / (2.0 * k)
    u1 = -amp * np.sin(k * x1) * np.cos(k * x2)
    u2 = amp * np.cos(k * x1) * np.sin(k * x2)
    return VectorField(ScalarField(grid, u1, PHYSICAL), ScalarField(grid, u2, PHYSICAL))


def single_mode_vorticity(grid: GridSpec, m1: int, m2: int, amplitude: float = 1.0,
                          phase: float = 0.0) -> ScalarField:
    """omega = amplitude * cos(k . x + phase) for one Fourier mode (zero mean)."""
    if m1 == 0 and m2 == 0:
        raise ValueError("mode (0, 0) has nonzero mean")
    x1, x2 = grid.coords()
    k = 2.0 * np.pi / grid.box_length
    vals = amplitude * np.cos(k * (m1 * x1 + m2 * x2) + phase)
    return ScalarField(grid, vals, PHYSICAL)


def random_vorticity(grid: GridSpec, seed: int, kmin: int = 1, kmax: int = 6,
                     omega_inf: float = 1.0) -> ScalarField:
    """Band-limited random vorticity rescaled to a prescribed sup norm.

    Built from a random streamfunction with Gaussian coefficients on the
    annulus kmin <= |m| <= kmax, so the matching velocity is divergence
    free by construction.
    """
    rng = np.random.default_rng(seed)
    n = grid.n
    m = np.fft.fftfreq(n) * n
    m1 = m[:, None]
    m2 = m[None, :]
    mag = np.sqrt(m1**2 + m2**2)
    band = (mag >= kmin - 0.5) & (mag <= kmax + 0.5)
    coeff = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    psi_hat = np.where(band, coeff, 0.0)
    psi = np.real(np.fft.ifft2(psi_hat))
    psi_hat = np.fft.fft2(psi)
    _, _, ksq, _ = _basis(n, grid.box_length)
    omega = np.real(np.fft.ifft2(ksq * psi_hat))
    peak = np.abs(omega).max()
    if peak == 0.0:
        raise ValueError("degenerate random draw")
    return ScalarField(grid, omega * (omega_inf / peak), PHYSICAL)


def random_hb_velocity(grid: GridSpec, seed: int, kmin: int = 1, kmax: int = 6,
                       omega_inf: float = 1.0) -> VectorField:
    """Random divergence-free velocity with bounded (normalized) vorticity."""
    return biot_savart(random_vorticity(grid, seed, kmin, kmax, omega_inf))


def steep_bump_vorticity(grid: GridSpec, center=None, width: float = 0.35,
                         amplitude: float = 1.0) -> ScalarField:
    """Mean-free steep Gaussian dipole; stress test for gradient-heavy checks."""
    x1, x2 = grid.coords()
    L = grid.box_length
    if center is None:
        center = (L / 2.0, L / 2.0)
    d1 = (x1 - center[0] + L / 2.0) % L - L / 2.0
    d2 = (x2 - center[1] + L / 2.0) % L - L / 2.0
    blob = np.exp(-(d1**2 + d2**2) / (2.0 * width**2))
    shift = L / 6.0
    d1b = (d1 - shift + L / 2.0) % L - L / 2.0
    blob2 = np.exp(-(d1b**2 + d2**2) / (2.0 * width**2))
    vals = amplitude * (blob - blob2)
    vals -= vals.mean()
    return ScalarField(grid, vals, PHYSICAL)


def gaussian_stream_velocity(grid: GridSpec, seed: int, n_bumps: int = 3,
                             sigma_lo_frac: float = 1.0 / 22.0,
                             sigma_hi_frac: float = 1.0 / 16.0,
                             center_jitter_frac: float = 1.0 / 30.0) -> VectorField:
    """Compactly supported (to machine precision) smooth divergence-free field.

    The streamfunction is a superposition of Gaussian bumps near the box
    center; the velocity support stays well within box_length / 3, as the
    direct pressure quadrature requires.
    """
    rng = np.random.default_rng(seed)
    L = grid.box_length
    x1, x2 = grid.coords()
    psi = np.zeros((grid.n, grid.n))
    for _ in range(n_bumps):
        cx, cy = L / 2.0 + rng.uniform(-center_jitter_frac * L, center_jitter_frac * L, size=2)
        amp = rng.uniform(0.5, 1.0) * (1.0 if rng.uniform() < 0.5 else -1.0)
        sig = rng.uniform(sigma_lo_frac * L, sigma_hi_frac * L)
        psi += amp * np.exp(-((x1 - cx) ** 2 + (x2 - cy) ** 2) / (2.0 * sig * sig))
    k1, k2, _, _ = _basis(grid.n, L)
    psi_hat = np.fft.fft2(psi)
    u1 = np.real(np.fft.ifft2(-1j * k2 * psi_hat))
    u2 = np.real(np.fft.ifft2(1j * k1 * psi_hat))
    return VectorField(ScalarField(grid, u1, PHYSICAL), ScalarField(grid, u2, PHYSICAL))


def constant_velocity(grid: GridSpec, c1: float, c2: float) -> VectorField:
    ones = np.ones((grid.n, grid.n))
    return VectorField(ScalarField(grid, c1 * ones, PHYSICAL),
                       ScalarField(grid, c2 * ones, PHYSICAL))
