"""Monte Carlo verification of the GN model over circular-Gaussian lines.

A trial draws one dual-polarization spectral-line field on the uniform grid
k*f0, k in [-M/2, M/2], with independent standard circular complex Gaussian
coefficients scaled by the input PSD:

    line_k = (n1 + j n2)/sqrt(2) * sqrt(Ghat(k f0) / f0)

The discrete RP1 perturbation map applied to a field is

    U_xp(k f0) = -j Phi_NL * f0^2 * sum_{m,n} eta(m n f0^2) *
        [ X_{k+m} conj(X_{k+m+n}) X_{k+n} + X_{k+m} conj(Y_{k+m+n}) Y_{k+n} ]

(out-of-grid indices are zero), and the DP-ERP1 map subtracts the
deterministic phase-rotation part P_T * X_k from the bracketed sum before the
-j Phi_NL scaling.  The PSD estimator averages f0 * |sum|^2 per grid
frequency over trials, which converges to the GN total Ghat_xp(f)/Phi_NL^2.

Normalization convention (the only self-consistent one): line amplitudes
carry 1/sqrt(f0), the double sum carries f0^2 (one (f1, f2) grid cell), and
the estimator carries f0.  With these weights the estimator applied to the
input lines themselves recovers Ghat(k f0), and applied to the perturbation
recovers the GN integrals in Phi_NL^2 units.

The P_T coefficient of the ERP1 subtraction uses the *discrete* grid powers
f0 * sum_k Ghat(k f0): on the grid, E[sum * conj(X_k)] equals exactly
P_T_discrete * E|X_k|^2, so this choice cancels the phase term exactly at
finite f0 instead of only asymptotically.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .kernel import KernelModel, normalized_kernel_grid
from .rng import POL_X, POL_Y, field_stream
from .spectra import DualPolPsd, PsdShape

__all__ = [
    "MODE_RP1",
    "MODE_DP_ERP1",
    "TrialConfig",
    "SpectralField",
    "PsdEstimate",
    "PairedEstimates",
    "draw_field",
    "rp1_perturbation",
    "erp1_perturbation",
    "estimate_nli_psd",
    "run_paired_trials",
    "discrete_powers",
    "in_band_mask",
]

MODE_RP1 = "rp1"
MODE_DP_ERP1 = "erp1"

# trials per work unit; fixed (never derived from the worker count) so that
# chunking cannot influence any result
_CHUNK_TRIALS = 256


@dataclass
class TrialConfig:
    """Monte Carlo run parameters.

    ``num_lines`` is M; the grid holds M+1 lines at k*f0 for k in
    [-M/2, M/2], so M must be even (and at least 8).
    """

    spacing_hz: float
    num_lines: int
    num_trials: int
    seed: int
    mode: str = MODE_RP1
    edge_margin: float = 0.1

    def __post_init__(self):
        if not self.spacing_hz > 0:
            raise ConfigError(f"line spacing must be > 0 Hz, got {self.spacing_hz}")
        if self.num_lines < 8 or self.num_lines % 2:
            raise ConfigError(f"num_lines must be even and >= 8, got {self.num_lines}")
        if self.num_trials < 1:
            raise ConfigError(f"num_trials must be >= 1, got {self.num_trials}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.mode not in (MODE_RP1, MODE_DP_ERP1):
            raise ConfigError(f"mode must be '{MODE_RP1}' or '{MODE_DP_ERP1}', "
                              f"got {self.mode!r}")
        if not 0.0 <= self.edge_margin < 0.5:
            raise ConfigError(f"edge margin must be in [0, 0.5), got {self.edge_margin}")

    @property
    def half_lines(self) -> int:
        return self.num_lines // 2

    @property
    def grid_indices(self) -> np.ndarray:
        return np.arange(-self.half_lines, self.half_lines + 1)

    @property
    def frequencies_hz(self) -> np.ndarray:
        return self.grid_indices * self.spacing_hz


@dataclass
class SpectralField:
    """One realization: complex line amplitudes per polarization.

    Index i of the arrays corresponds to grid position k = i - M/2.
    """

    spacing_hz: float
    lines_x: np.ndarray
    lines_y: np.ndarray

    @property
    def frequencies_hz(self) -> np.ndarray:
        half = (self.lines_x.size - 1) // 2
        return (np.arange(self.lines_x.size) - half) * self.spacing_hz


@dataclass
class PsdEstimate:
    """Per-grid-frequency estimator output (normalized to Phi_NL^2)."""

    frequencies_hz: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    num_trials: int


@dataclass
class PairedEstimates:
    """RP1 and DP-ERP1 estimates from the same draws, plus their per-trial
    pointwise difference (whose expectation is exactly the phase term)."""

    rp1: PsdEstimate
    erp1: PsdEstimate
    difference: PsdEstimate


def validate_grid_coverage(cfg: TrialConfig, psd: DualPolPsd) -> None:
    """Reject grids that do not cover the PSD supports with a guard band.

    The grid must contain every support and extend to at least 1.5x the
    largest support extent, so every four-wave-mixing parent of an in-band
    product is representable on the grid.
    """
    half_extent = cfg.half_lines * cfg.spacing_hz
    for name, shape in (("x", psd.gx), ("y", psd.gy)):
        if shape.power_integral() <= 0:
            continue
        lo, hi = shape.support
        extent = max(abs(lo), abs(hi))
        if 1.5 * extent > half_extent * (1.0 + 1e-12):
            raise ConfigError(
                f"grid half-extent {half_extent:g} Hz is below 1.5x the "
                f"{name}-PSD support extent {extent:g} Hz; enlarge the grid "
                f"or shrink the spacing"
            )


def _line_amplitudes(cfg: TrialConfig, shape: PsdShape) -> np.ndarray:
    """Per-line scale sqrt(Ghat(k f0)/f0)/sqrt(2) applied to (n1 + j n2)."""
    ghat = np.asarray(shape.evaluate(cfg.frequencies_hz), dtype=float)
    return np.sqrt(ghat / cfg.spacing_hz) / math.sqrt(2.0)


def _draw_rows(cfg: TrialConfig, amps: np.ndarray, pol_tag: int,
               trial_lo: int, trial_hi: int) -> np.ndarray:
    """Line matrix (trials, lines) for one polarization, one trial range."""
    count = cfg.grid_indices.size
    out = np.empty((trial_hi - trial_lo, count), dtype=complex)
    for t in range(trial_lo, trial_hi):
        normals = field_stream(cfg.seed, t, pol_tag).standard_normal(2 * count)
        out[t - trial_lo] = (normals[0::2] + 1j * normals[1::2]) * amps
    return out


def draw_field(cfg: TrialConfig, psd: DualPolPsd, trial_index: int) -> SpectralField:
    """The spectral-line field of one trial (bit-reproducible per index)."""
    amps_x = _line_amplitudes(cfg, psd.gx)
    amps_y = _line_amplitudes(cfg, psd.gy)
    return SpectralField(
        spacing_hz=cfg.spacing_hz,
        lines_x=_draw_rows(cfg, amps_x, POL_X, trial_index, trial_index + 1)[0],
        lines_y=_draw_rows(cfg, amps_y, POL_Y, trial_index, trial_index + 1)[0],
    )


def _support_bounds(cfg: TrialConfig, shape: PsdShape):
    """First/last grid array index where the shape is nonzero, or None."""
    mask = np.asarray(shape.evaluate(cfg.frequencies_hz)) > 0
    if not mask.any():
        return None
    nz = np.nonzero(mask)[0]
    return int(nz[0]), int(nz[-1])


def _pair_plans(cfg, kernel, count, main_bounds, other_bounds):
    """Slice plans for the double sum of one output polarization.

    Each plan entry (j0, j1, m, n, w) contributes, for every output array
    index j in [j0, j1):  w * main[j+m] * conj(other_or_main[j+m+n]) *
    other_or_main[j+n], with w = f0^2 * eta(m n f0^2).  The k ranges are cut
    so that every parent index lies inside its PSD support (indices outside
    carry zero lines and are skipped, not truncated).
    """
    f0 = cfg.spacing_hz

    def enumerate_plans(b1, b2, b3):
        # parent1 = j+m in b1 (main), parent2 = j+m+n in b2 (conjugated),
        # parent3 = j+n in b3
        plans = []
        for m in range(b2[0] - b3[1], b2[1] - b3[0] + 1):
            for n in range(b2[0] - b1[1], b2[1] - b1[0] + 1):
                j0 = max(0, b1[0] - m, b2[0] - m - n, b3[0] - n)
                j1 = min(count - 1, b1[1] - m, b2[1] - m - n, b3[1] - n)
                if j0 <= j1:
                    plans.append((j0, j1 + 1, m, n))
        return plans

    spm = enumerate_plans(main_bounds, main_bounds, main_bounds) \
        if main_bounds else []
    xpol = enumerate_plans(main_bounds, other_bounds, other_bounds) \
        if (main_bounds and other_bounds) else []

    def weighted(plans):
        if not plans:
            return []
        mn = np.array([[p[2], p[3]] for p in plans], dtype=float)
        eta = normalized_kernel_grid(kernel, mn[:, 0] * mn[:, 1] * f0 * f0)
        w = f0 * f0 * eta
        return [(j0, j1, m, n, w[i]) for i, (j0, j1, m, n) in enumerate(plans)]

    return weighted(spm), weighted(xpol)


def _perturbation_rows(main, other, plans):
    """Batched double sum over (m, n) for a block of trials.

    ``main``/``other`` are (trials, lines) matrices of the output and partner
    polarization; rows are independent, and the accumulation order is the
    fixed plan order, so results do not depend on chunking or thread count.
    """
    spm_plans, xpol_plans = plans
    out = np.zeros_like(main)
    for j0, j1, m, n, w in spm_plans:
        out[:, j0:j1] += w * (main[:, j0 + m:j1 + m]
                              * np.conj(main[:, j0 + m + n:j1 + m + n])
                              * main[:, j0 + n:j1 + n])
    for j0, j1, m, n, w in xpol_plans:
        out[:, j0:j1] += w * (main[:, j0 + m:j1 + m]
                              * np.conj(other[:, j0 + m + n:j1 + m + n])
                              * other[:, j0 + n:j1 + n])
    return out


def _plans_for(cfg, psd, kernel, polarization):
    count = cfg.grid_indices.size
    bx = _support_bounds(cfg, psd.gx)
    by = _support_bounds(cfg, psd.gy)
    if polarization == "x":
        return _pair_plans(cfg, kernel, count, bx, by)
    return _pair_plans(cfg, kernel, count, by, bx)


def discrete_powers(cfg: TrialConfig, psd: DualPolPsd) -> tuple[float, float]:
    """Grid powers f0 * sum_k Ghat(k f0) for each polarization."""
    px = float(cfg.spacing_hz * np.sum(psd.gx.evaluate(cfg.frequencies_hz)))
    py = float(cfg.spacing_hz * np.sum(psd.gy.evaluate(cfg.frequencies_hz)))
    return px, py


def _phi_nl(psd: DualPolPsd, kernel: KernelModel) -> float:
    return psd.p0_w * kernel.k0.real


def rp1_perturbation(field: SpectralField, kernel: KernelModel,
                     cfg: TrialConfig, psd: DualPolPsd) -> SpectralField:
    """First-order perturbation field -j Phi_NL * (double sum), both pols."""
    phi = _phi_nl(psd, kernel)
    bx = _perturbation_rows(field.lines_x[None, :], field.lines_y[None, :],
                            _plans_for(cfg, psd, kernel, "x"))[0]
    by = _perturbation_rows(field.lines_y[None, :], field.lines_x[None, :],
                            _plans_for(cfg, psd, kernel, "y"))[0]
    return SpectralField(cfg.spacing_hz, -1j * phi * bx, -1j * phi * by)


def erp1_perturbation(field: SpectralField, kernel: KernelModel,
                      cfg: TrialConfig, psd: DualPolPsd) -> SpectralField:
    """DP-ERP1 perturbation -j Phi_NL * (-A + B).

    B is the RP1 double sum; A = P_T * (input line) subtracts the average
    phase rotation, with P_T the discrete-grid power weight (2Px+Py for X,
    2Py+Px for Y).
    """
    phi = _phi_nl(psd, kernel)
    px_d, py_d = discrete_powers(cfg, psd)
    bx = _perturbation_rows(field.lines_x[None, :], field.lines_y[None, :],
                            _plans_for(cfg, psd, kernel, "x"))[0]
    by = _perturbation_rows(field.lines_y[None, :], field.lines_x[None, :],
                            _plans_for(cfg, psd, kernel, "y"))[0]
    return SpectralField(
        cfg.spacing_hz,
        -1j * phi * (bx - (2.0 * px_d + py_d) * field.lines_x),
        -1j * phi * (by - (2.0 * py_d + px_d) * field.lines_y),
    )


def _per_trial_values(cfg, psd, kernel, polarization, threads):
    """Per-trial estimator samples f0*|B|^2 and f0*|B - P_T a|^2, (T, K).

    Streams are keyed by *role* (main polarization = tag 0, partner = tag 1),
    not by physical polarization, so swapping the input PSDs together with
    the requested polarization reproduces the other estimate bit-exactly.
    For polarization "x" the role tags coincide with the physical POL_X /
    POL_Y tags of ``draw_field``.
    """
    validate_grid_coverage(cfg, psd)
    f0 = cfg.spacing_hz
    if polarization == "x":
        main_amps = _line_amplitudes(cfg, psd.gx)
        other_amps = _line_amplitudes(cfg, psd.gy)
        pt_weights = (2.0, 1.0)
    else:
        main_amps = _line_amplitudes(cfg, psd.gy)
        other_amps = _line_amplitudes(cfg, psd.gx)
        pt_weights = (1.0, 2.0)
    plans = _plans_for(cfg, psd, kernel, polarization)
    px_d, py_d = discrete_powers(cfg, psd)
    pt_d = pt_weights[0] * px_d + pt_weights[1] * py_d

    trials = cfg.num_trials
    count = cfg.grid_indices.size
    v_rp1 = np.empty((trials, count))
    v_erp1 = np.empty((trials, count))

    def work(t0):
        t1 = min(t0 + _CHUNK_TRIALS, trials)
        main = _draw_rows(cfg, main_amps, POL_X, t0, t1)
        other = _draw_rows(cfg, other_amps, POL_Y, t0, t1)
        b = _perturbation_rows(main, other, plans)
        v_rp1[t0:t1] = f0 * (b.real**2 + b.imag**2)
        e = b - pt_d * main
        v_erp1[t0:t1] = f0 * (e.real**2 + e.imag**2)

    starts = range(0, trials, _CHUNK_TRIALS)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    else:
        for t0 in starts:
            work(t0)
    return v_rp1, v_erp1


def _reduce(cfg: TrialConfig, values: np.ndarray) -> PsdEstimate:
    """Mean and standard error over trials, in one fixed-order pass."""
    trials = values.shape[0]
    mean = values.mean(axis=0)
    if trials > 1:
        stderr = values.std(axis=0, ddof=1) / math.sqrt(trials)
    else:
        stderr = np.zeros_like(mean)
    return PsdEstimate(cfg.frequencies_hz, mean, stderr, trials)


def estimate_nli_psd(cfg: TrialConfig, psd: DualPolPsd, kernel: KernelModel,
                     polarization: str = "x", threads: int = 1) -> PsdEstimate:
    """Monte Carlo estimate of the normalized NLI PSD in the configured mode.

    Deterministic for a given (seed, cfg): trial chunking is fixed and the
    reduction runs once over the assembled per-trial matrix, so the worker
    count cannot change any output bit.
    """
    v_rp1, v_erp1 = _per_trial_values(cfg, psd, kernel, polarization, threads)
    values = v_rp1 if cfg.mode == MODE_RP1 else v_erp1
    return _reduce(cfg, values)


def run_paired_trials(cfg: TrialConfig, psd: DualPolPsd, kernel: KernelModel,
                      polarization: str = "x", threads: int = 1) -> PairedEstimates:
    """Both estimators from the same draws, plus their paired difference."""
    v_rp1, v_erp1 = _per_trial_values(cfg, psd, kernel, polarization, threads)
    return PairedEstimates(
        rp1=_reduce(cfg, v_rp1),
        erp1=_reduce(cfg, v_erp1),
        difference=_reduce(cfg, v_rp1 - v_erp1),
    )


def in_band_mask(frequencies_hz: np.ndarray, shape: PsdShape,
                 edge_margin: float = 0.1) -> np.ndarray:
    """Grid points within the support, excluding the outer ``edge_margin``
    fraction of the support half-width at each edge."""
    lo, hi = shape.support
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return np.abs(np.asarray(frequencies_hz) - center) <= (1.0 - edge_margin) * half
