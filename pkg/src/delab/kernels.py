"""Direct (grid-quadrature) pressure kernel, mollification and commutators.

The pressure kernel here is the whole-plane singular kernel

    K_ij(x) = (|x|^2 delta_ij - 2 x_i x_j) / (2 pi |x|^4),

which coincides pointwise with the Hessian of the 2D Newtonian potential
G = ln|x| / 2pi.  As a distribution that Hessian carries an extra atom,
d_i d_j G = PV K_ij + (delta_ij / 2) delta_0, and the pressure solving
-Lap p = sum_ij d_i d_j w_ij is

    p = -(PV K * w) - tr(w) / 2.

The quadrature realizes exactly this: kernel mass is integrated in closed
form over every grid cell (corner antiderivatives of ln r), so the
singular cell contributes its principal value (zero, by the trace-free
symmetry) plus the delta atom exactly.  This module is the non-spectral
oracle for the periodic pressure path in :mod:`delab.spectral`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import ndimage

from .spectral import (
    GridSpec,
    ScalarField,
    VectorField,
    PHYSICAL,
    GridMismatchError,
    nonlinear_term,
)


# ---------------------------------------------------------------------------
# pointwise kernel

def kernel_eval(i: int, j: int, x) -> float:
    """K_ij at a nonzero point: (|x|^2 d_ij - 2 x_i x_j) / (2 pi |x|^4)."""
    if i not in (1, 2) or j not in (1, 2):
        raise ValueError(f"kernel indices must be 1 or 2, got ({i}, {j})")
    x = np.asarray(x, dtype=float)
    r2 = float(x[0] ** 2 + x[1] ** 2)
    if r2 == 0.0:
        raise ValueError("pressure kernel is singular at x = 0")
    xi = float(x[i - 1])
    xj = float(x[j - 1])
    delta = 1.0 if i == j else 0.0
    return (r2 * delta - 2.0 * xi * xj) / (2.0 * np.pi * r2 * r2)


# ---------------------------------------------------------------------------
# exact cell integrals of the kernel (corner antiderivatives)

def _cell_tables(n_cells: int, h: float):
    """Exact integrals of d1d1, d2d2, d1d2 of ln r over every offset cell.

    Offsets z = (i - n_cells, j - n_cells) * h for i, j in [0, 2 n_cells).
    The cell containing the origin picks up the full distributional mass:
    its principal value vanishes by symmetry and the trace atom contributes
    pi to each diagonal table.
    """
    m = 2 * n_cells
    off = (np.arange(m) - n_cells) * h
    zx = off[:, None]
    zy = off[None, :]
    a = zx - h / 2.0
    b = zx + h / 2.0
    c = zy - h / 2.0
    d = zy + h / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        t11 = (np.arctan(d / b) - np.arctan(c / b)) - (np.arctan(d / a) - np.arctan(c / a))
        t22 = (np.arctan(b / d) - np.arctan(a / d)) - (np.arctan(b / c) - np.arctan(a / c))
        lr = lambda z1, z2: 0.5 * np.log(z1 * z1 + z2 * z2)
        t12 = lr(b, d) - lr(a, d) - lr(b, c) + lr(a, c)
    return t11, t22, t12


@lru_cache(maxsize=8)
def _cached_cell_tables(n_cells: int, h: float):
    t11, t22, t12 = _cell_tables(n_cells, h)
    for t in (t11, t22, t12):
        t.setflags(write=False)
    return t11, t22, t12


def _upsample2(f: np.ndarray) -> np.ndarray:
    """Trigonometric interpolation onto the doubled grid."""
    n = f.shape[0]
    fh = np.fft.fft2(f)
    big = np.zeros((2 * n, 2 * n), dtype=complex)
    hn = n // 2
    big[:hn, :hn] = fh[:hn, :hn]
    big[:hn, 2 * n - hn:] = fh[:hn, hn:]
    big[2 * n - hn:, :hn] = fh[hn:, :hn]
    big[2 * n - hn:, 2 * n - hn:] = fh[hn:, hn:]
    return np.real(np.fft.ifft2(big)) * 4.0


def _support_box(arrs, tol: float) -> tuple[int, int, int, int]:
    """Bounding index box of the union support of the arrays."""
    mask = np.zeros(arrs[0].shape, dtype=bool)
    for a in arrs:
        mask |= np.abs(a) > tol
    if not mask.any():
        return 0, 1, 0, 1
    rows = np.where(mask.any(axis=1))[0]
    cols = np.where(mask.any(axis=0))[0]
    return int(rows[0]), int(rows[-1]) + 1, int(cols[0]), int(cols[-1]) + 1


def _table_sum(w11, w12, w22, pts, n_cells, h):
    """-(1/2pi) sum over cells of (exact kernel integrals) x w at grid points pts."""
    t11, t22, t12 = _cached_cell_tables(n_cells, h)
    tol = 1e-13 * max(np.abs(w11).max(), np.abs(w12).max(), np.abs(w22).max(), 1e-300)
    r0, r1, c0, c1 = _support_box((w11, w12, w22), tol)
    s11 = w11[r0:r1, c0:c1]
    s12 = w12[r0:r1, c0:c1]
    s22 = w22[r0:r1, c0:c1]
    out = np.empty(len(pts))
    for m, (i, j) in enumerate(pts):
        a0 = n_cells - i + r0
        a1 = n_cells - i + r1
        b0 = n_cells - j + c0
        b1 = n_cells - j + c1
        out[m] = -(np.sum(t11[a0:a1, b0:b1] * s11)
                   + np.sum(t22[a0:a1, b0:b1] * s22)
                   + 2.0 * np.sum(t12[a0:a1, b0:b1] * s12)) / (2.0 * np.pi)
    return out


def convolve_pressure_direct(
    w11: ScalarField,
    w12: ScalarField,
    w22: ScalarField,
    eval_indices,
    oversample: int = 2,
    richardson: bool = True,
) -> np.ndarray:
    """Free-space pressure samples p(y) from the singular-kernel quadrature.

    Parameters
    ----------
    w11, w12, w22:
        Components of the symmetric tensor w (w21 = w12) on one grid, with
        compact support (it must decay to ~0 well inside the box; support
        diameter at most box_length / 3).
    eval_indices:
        Iterable of grid index pairs (i, j) where p is evaluated.
    oversample:
        1 evaluates on the native lattice; 2 (default) interpolates w onto
        the doubled lattice first, which removes most of the O(h^2) cell
        representation error.
    richardson:
        With oversample=2, additionally combine the two lattice levels as
        (4 p_fine - p_coarse) / 3 to cancel the leading error term.

    Returns the free-space-gauged pressure values; compare gradients (not
    values) against the periodic spectral path, which uses a zero-mean
    gauge.
    """
    if not (w11.grid == w12.grid == w22.grid):
        raise GridMismatchError("tensor components on different grids")
    grid = w11.grid
    n = grid.n
    h = grid.h
    a11 = w11.phys
    a12 = w12.phys
    a22 = w22.phys
    _check_support(a11, a12, a22, grid)
    pts = [(int(i), int(j)) for (i, j) in eval_indices]
    if oversample not in (1, 2):
        raise ValueError("oversample must be 1 or 2")
    if oversample == 1:
        return _table_sum(a11, a12, a22, pts, n, h)
    fine_pts = [(2 * i, 2 * j) for (i, j) in pts]
    p_fine = _table_sum(_upsample2(a11), _upsample2(a12), _upsample2(a22),
                        fine_pts, 2 * n, h / 2.0)
    if not richardson:
        return p_fine
    p_coarse = _table_sum(a11, a12, a22, pts, n, h)
    return (4.0 * p_fine - p_coarse) / 3.0


def _check_support(a11, a12, a22, grid: GridSpec):
    scale = max(np.abs(a11).max(), np.abs(a12).max(), np.abs(a22).max())
    if scale == 0.0:
        return
    tol = 1e-8 * scale
    r0, r1, c0, c1 = _support_box((a11, a12, a22), tol)
    extent = max(r1 - r0, c1 - c0) * grid.h
    if extent > grid.box_length / 3.0 + grid.h:
        raise ValueError(
            f"tensor support extent {extent:.3f} exceeds box_length/3 = "
            f"{grid.box_length / 3.0:.3f}; periodic images would contaminate "
            "the whole-plane kernel"
        )


def pressure_tensor(u: VectorField) -> tuple[ScalarField, ScalarField, ScalarField]:
    """w = u (x) u, the tensor fed to the pressure kernel."""
    g = u.grid
    p1 = u.u1.phys
    p2 = u.u2.phys
    return (
        ScalarField(g, p1 * p1, PHYSICAL),
        ScalarField(g, p1 * p2, PHYSICAL),
        ScalarField(g, p2 * p2, PHYSICAL),
    )


# ---------------------------------------------------------------------------
# mollification

@dataclass(frozen=True)
class MollifierSpec:
    """Length scale of the polynomial bump mollifier (1 - r^2)^4, support mu."""

    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mollifier scale must be positive, got {self.mu}")


@lru_cache(maxsize=64)
def _mollifier_stencil(mu: float, h: float) -> np.ndarray:
    """Discrete bump weights, normalized to unit mass exactly."""
    half = int(np.ceil(mu / h))
    z = np.arange(-half, half + 1) * h
    r2 = (z[:, None] ** 2 + z[None, :] ** 2) / (mu * mu)
    w = np.where(r2 < 1.0, (1.0 - np.minimum(r2, 1.0)) ** 4, 0.0)
    w /= w.sum()
    w.setflags(write=False)
    return w


def mollify(f: ScalarField, spec: MollifierSpec) -> ScalarField:
    """Smoothing convolution with the unit-mass bump; sup-norm contraction.

    The discrete weights are normalized so constants (and the box mean) are
    preserved exactly.  Scales below two grid spacings are rejected: the
    bump would be unresolved.
    """
    h = f.grid.h
    if spec.mu < 2.0 * h - 1e-12:
        raise ValueError(
            f"mollifier scale {spec.mu} is below two grid spacings (h = {h}); "
            "the bump would be unresolved"
        )
    w = _mollifier_stencil(spec.mu, h)
    out = ndimage.convolve(f.phys, w, mode="wrap")
    return ScalarField(f.grid, out, PHYSICAL)


def mollify_vec(u: VectorField, spec: MollifierSpec) -> VectorField:
    return VectorField(mollify(u.u1, spec), mollify(u.u2, spec))


def commutator_remainder(u: VectorField, omega: ScalarField, spec: MollifierSpec) -> ScalarField:
    """R_mu = S_mu(u . grad omega) - u . grad(S_mu omega).

    For smooth fields the remainder is O(mu^2); its decay as the scale is
    halved is the renormalization diagnostic exercised by the audits.
    """
    if u.grid != omega.grid:
        raise GridMismatchError("commutator inputs on different grids")
    transported = nonlinear_term(u, omega)
    smoothed_first = mollify(transported, spec)
    transported_smooth = nonlinear_term(u, mollify(omega, spec))
    return ScalarField(u.grid, smoothed_first.values - transported_smooth.values, PHYSICAL)
