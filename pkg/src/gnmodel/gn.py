"""Analytic NLI PSD of the GN model on an output frequency grid.

For the X polarization the normalized NLI PSD (in units of Phi_NL^2) is

    Ghat_xp(f)/Phi^2 = 2 * II |eta(f1 f2)|^2 Ghat_x(f+f1) Ghat_x(f+f2)
                            Ghat_x(f+f1+f2) df1 df2                (SPM)
                     +     II |eta(f1 f2)|^2 Ghat_x(f+f1) Ghat_y(f+f2)
                            Ghat_y(f+f1+f2) df1 df2                (XPolM)
                     +     Ghat_x(f) * (2 Phat_x + Phat_y)^2       (phase term)

and the Y result follows by exchanging the polarization roles everywhere,
including the phase coefficient (2 Phat_y + Phat_x)^2.  The phase term is
present in RP1 mode and absent after the DP-ERP1 change of variables.

The double integrals are evaluated by a uniform midpoint rule whose cells are
aligned to the compact supports: f1 spans support(main) - f, f2 spans
support(partner) - f, so the first two PSD factors are never sampled on a
discontinuity and the domain truncation is exact.  |eta|^2 is taken at the
cell-midpoint product f1*f2 through the closed-form kernel.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .kernel import KernelModel, normalized_kernel_grid
from .spectra import DualPolPsd, PsdShape

__all__ = [
    "GnRequest",
    "NliPsdResult",
    "nli_psd_x",
    "nli_psd_y",
    "phase_term_coefficient",
]


def phase_term_coefficient(px_hat: float, py_hat: float) -> float:
    """(2*Px_hat + Py_hat)^2, the deterministic phase-rotation weight.

    Algebraically identical to 4*Px^2 + 4*Px*Py + Py^2.
    """
    if px_hat < 0 or py_hat < 0:
        raise ValueError(f"power integrals must be >= 0, got {px_hat}, {py_hat}")
    return (2.0 * px_hat + py_hat) ** 2


@dataclass
class GnRequest:
    """One engine evaluation: input PSDs, kernel, grid and quadrature step.

    ``inner_grid_step_hz`` is the target (f1, f2) cell size; each support is
    divided into a whole number of cells of at most this size, and the step
    must not exceed 1/16 of any nonzero support width.
    """

    psd: DualPolPsd
    kernel: KernelModel
    output_grid_hz: np.ndarray
    inner_grid_step_hz: float
    include_phase_term: bool = True

    def __post_init__(self):
        grid = np.atleast_1d(np.asarray(self.output_grid_hz, dtype=float))
        if grid.size == 0 or not np.all(np.isfinite(grid)):
            raise ValueError("output grid must be non-empty and finite")
        self.output_grid_hz = grid
        if not self.inner_grid_step_hz > 0:
            raise ValueError(f"inner grid step must be > 0, got {self.inner_grid_step_hz}")
        for name, shape in (("gx", self.psd.gx), ("gy", self.psd.gy)):
            if shape.power_integral() <= 0:
                continue
            lo, hi = shape.support
            if self.inner_grid_step_hz > (hi - lo) / 16.0:
                raise ValueError(
                    f"inner grid step {self.inner_grid_step_hz:g} Hz exceeds "
                    f"1/16 of the {name} support width {hi - lo:g} Hz"
                )


@dataclass
class NliPsdResult:
    """Per-frequency NLI PSD terms, normalized to Phi_NL^2.

    ``phase`` always holds the phase-term values; it enters ``total`` only
    when the request asked for it.  ``total_absolute_w_per_hz`` restores
    absolute units via G_xp = P0 * phi_nl^2 * (normalized total).
    """

    frequencies_hz: np.ndarray
    spm: np.ndarray
    xpolm: np.ndarray
    phase: np.ndarray
    include_phase_term: bool
    p0_w: float
    phi_nl: float

    @property
    def total(self) -> np.ndarray:
        if self.include_phase_term:
            return self.spm + self.xpolm + self.phase
        return self.spm + self.xpolm

    @property
    def total_absolute_w_per_hz(self) -> np.ndarray:
        return self.p0_w * self.phi_nl**2 * self.total


def _midpoints(shape: PsdShape, f: float, step: float):
    """Support-aligned midpoint grid for one integration axis, shifted by -f."""
    lo, hi = shape.support
    cells = max(1, int(np.ceil((hi - lo) / step)))
    h = (hi - lo) / cells
    return (lo - f) + (np.arange(cells) + 0.5) * h, h


def _double_integral(kernel, main: PsdShape, partner: PsdShape, third: PsdShape,
                     f: float, step: float) -> float:
    """II |eta(f1 f2)|^2 main(f+f1) partner(f+f2) third(f+f1+f2) df1 df2."""
    if main.power_integral() <= 0 or partner.power_integral() <= 0 \
            or third.power_integral() <= 0:
        return 0.0
    f1, h1 = _midpoints(main, f, step)
    f2, h2 = _midpoints(partner, f, step)
    a = main.evaluate(f + f1)
    b = partner.evaluate(f + f2)
    c = third.evaluate(f + f1[:, None] + f2[None, :])
    eta = normalized_kernel_grid(kernel, f1[:, None] * f2[None, :])
    weight = eta.real**2 + eta.imag**2
    return float(h1 * h2 * np.sum(a[:, None] * b[None, :] * c * weight))


def _evaluate(req: GnRequest, main_pol: str, threads: int = 1) -> NliPsdResult:
    psd = req.psd
    if main_pol == "x":
        g_main, g_other = psd.gx, psd.gy
        coeff = phase_term_coefficient(psd.px_hat, psd.py_hat)
    else:
        g_main, g_other = psd.gy, psd.gx
        coeff = phase_term_coefficient(psd.py_hat, psd.px_hat)

    grid = req.output_grid_hz
    step = req.inner_grid_step_hz
    spm = np.zeros(grid.size)
    xpolm = np.zeros(grid.size)

    def compute(i):
        f = float(grid[i])
        spm[i] = 2.0 * _double_integral(req.kernel, g_main, g_main, g_main, f, step)
        xpolm[i] = _double_integral(req.kernel, g_main, g_other, g_other, f, step)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(compute, range(grid.size)))
    else:
        for i in range(grid.size):
            compute(i)

    phase = coeff * np.asarray(g_main.evaluate(grid), dtype=float)
    return NliPsdResult(
        frequencies_hz=grid,
        spm=spm,
        xpolm=xpolm,
        phase=phase,
        include_phase_term=req.include_phase_term,
        p0_w=psd.p0_w,
        phi_nl=psd.p0_w * req.kernel.k0.real,
    )


def nli_psd_x(req: GnRequest, threads: int = 1) -> NliPsdResult:
    """NLI PSD received by the X polarization."""
    return _evaluate(req, "x", threads)


def nli_psd_y(req: GnRequest, threads: int = 1) -> NliPsdResult:
    """NLI PSD received by the Y polarization (x and y roles exchanged)."""
    return _evaluate(req, "y", threads)
