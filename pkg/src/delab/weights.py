"""Weight families for weighted norms: polynomial, scaled, exponential, cutoff.

Point evaluation uses the whole-plane formulas.  Grid sampling offers two
modes: min-image (torus metric) and periodized (sum over lattice images),
the latter making box quadrature represent the whole-plane integral of the
periodic extension.  See README for the surrogate-error discussion.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spectral import GridSpec

KINDS = ("theta", "theta_scaled", "exp", "cutoff")

# lattice images summed when periodizing integrable weights
PERIODIZE_IMAGES = 4


@dataclass(frozen=True)
class WeightSpec:
    """One weight family member: kind, center and scale.

    kind "theta":        1 / (1 + |x - x0|^3)             (scale ignored)
    kind "theta_scaled": 1 / (scale^3 + |x - x0|^3)
    kind "exp":          exp(-scale * |x - x0|)
    kind "cutoff":       C^2 bump, 1 on B_scale(x0), 0 outside B_{2 scale}(x0)
    """

    kind: str
    center: tuple[float, float] = (0.0, 0.0)
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}; choose from {KINDS}")
        if not self.scale > 0:
            raise ValueError(f"weight scale must be positive, got {self.scale}")


def _smoothstep(t: np.ndarray) -> np.ndarray:
    """Quintic C^2 smoothstep on [0, 1]."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def _smoothstep_deriv(t: np.ndarray) -> np.ndarray:
    tc = np.clip(t, 0.0, 1.0)
    d = 30.0 * tc * tc * (1.0 - tc) ** 2
    return np.where((t > 0.0) & (t < 1.0), d, 0.0)


def cutoff_profile(s) -> np.ndarray:
    """Radial profile q(s): 1 for s <= 1, 0 for s >= 2, C^2 in between."""
    s = np.asarray(s, dtype=float)
    return 1.0 - _smoothstep(s - 1.0)


def cutoff_profile_deriv(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return -_smoothstep_deriv(s - 1.0)


def cutoff_gradient_constant(samples: int = 200001) -> float:
    """Measured sup of |q'(s)| / sqrt(q(s)), the constant in the gradient bound."""
    s = np.linspace(1.0, 2.0, samples)[1:-1]
    q = cutoff_profile(s)
    dq = np.abs(cutoff_profile_deriv(s))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(q > 0, dq / np.sqrt(q), 0.0)
    return float(ratio.max())


def weight_eval(spec: WeightSpec, x) -> np.ndarray:
    """Whole-plane weight value at point(s) x (shape (..., 2))."""
    x = np.asarray(x, dtype=float)
    d = np.sqrt((x[..., 0] - spec.center[0]) ** 2 + (x[..., 1] - spec.center[1]) ** 2)
    return _eval_radial(spec, d)


def _eval_radial(spec: WeightSpec, r: np.ndarray) -> np.ndarray:
    if spec.kind == "theta":
        return 1.0 / (1.0 + r**3)
    if spec.kind == "theta_scaled":
        return 1.0 / (spec.scale**3 + r**3)
    if spec.kind == "exp":
        return np.exp(-spec.scale * r)
    return cutoff_profile(r / spec.scale)


def _eval_radial_deriv(spec: WeightSpec, r: np.ndarray) -> np.ndarray:
    """d/dr of the radial profile."""
    if spec.kind == "theta":
        return -3.0 * r**2 / (1.0 + r**3) ** 2
    if spec.kind == "theta_scaled":
        return -3.0 * r**2 / (spec.scale**3 + r**3) ** 2
    if spec.kind == "exp":
        return -spec.scale * np.exp(-spec.scale * r)
    return cutoff_profile_deriv(r / spec.scale) / spec.scale


def _min_image_offsets(grid: GridSpec, center):
    x1, x2 = grid.coords()
    L = grid.box_length
    d1 = (x1 - center[0] + L / 2.0) % L - L / 2.0
    d2 = (x2 - center[1] + L / 2.0) % L - L / 2.0
    return d1, d2


def weight_field(spec: WeightSpec, grid: GridSpec, periodize: bool | None = None) -> np.ndarray:
    """Weight sampled at grid cells.

    Integrable weights (theta, theta_scaled, exp) are periodized by default
    so that box quadrature equals whole-plane quadrature of the periodic
    extension; the truncated image tail is O(1/(M L)) relative.  The cutoff
    weight is compactly supported and uses the torus metric directly.
    """
    if periodize is None:
        periodize = spec.kind != "cutoff"
    d1, d2 = _min_image_offsets(grid, spec.center)
    if not periodize or spec.kind == "cutoff":
        return _eval_radial(spec, np.sqrt(d1 * d1 + d2 * d2))
    L = grid.box_length
    out = np.zeros((grid.n, grid.n))
    for m1 in range(-PERIODIZE_IMAGES, PERIODIZE_IMAGES + 1):
        for m2 in range(-PERIODIZE_IMAGES, PERIODIZE_IMAGES + 1):
            r = np.sqrt((d1 + m1 * L) ** 2 + (d2 + m2 * L) ** 2)
            out += _eval_radial(spec, r)
    return out


def weight_gradient_field(spec: WeightSpec, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of the (min-image) weight at grid cells.

    The gradient is evaluated from the radial formula, not spectrally, so
    cusped weights (exp) do not ring.  At the center cell the gradient is
    set to zero (the cusp point has measure zero under quadrature).
    """
    d1, d2 = _min_image_offsets(grid, spec.center)
    r = np.sqrt(d1 * d1 + d2 * d2)
    dr = _eval_radial_deriv(spec, r)
    with np.errstate(invalid="ignore", divide="ignore"):
        g1 = np.where(r > 0, dr * d1 / r, 0.0)
        g2 = np.where(r > 0, dr * d2 / r, 0.0)
    return g1, g2


@lru_cache(maxsize=64)
def _cutoff_template(n: int, box_length: float, scale: float) -> np.ndarray:
    grid = GridSpec(n, box_length)
    t = weight_field(WeightSpec("cutoff", (0.0, 0.0), scale), grid, periodize=False)
    t.setflags(write=False)
    return t


def cutoff_template(grid: GridSpec, scale: float) -> np.ndarray:
    """Cutoff weight centered at the grid origin (template for correlations)."""
    return _cutoff_template(grid.n, grid.box_length, scale)
