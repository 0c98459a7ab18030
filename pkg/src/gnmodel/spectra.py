"""Normalized dual-polarization input power spectral densities.

Shapes represent the normalized per-polarization PSD Ghat(f) (units 1/Hz);
the absolute PSD is recovered as G(f) = P0 * Ghat(f).  All shapes are
nonnegative with compact support, which lets the GN double integrals truncate
exactly instead of to a tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

__all__ = [
    "PsdShape",
    "RectangularPsd",
    "RaisedCosinePsd",
    "TabulatedPsd",
    "DualPolPsd",
]


class PsdShape:
    """Nonnegative spectral density with compact support."""

    def evaluate(self, f):
        """PSD value at frequency f (Hz); exactly 0 outside the support."""
        raise NotImplementedError

    def power_integral(self) -> float:
        """Integral of the shape over all frequency (dimensionless Phat)."""
        raise NotImplementedError

    @property
    def support(self) -> tuple[float, float]:
        """(f_min, f_max) outside which the shape vanishes."""
        raise NotImplementedError


def _scalar_like(template, values):
    return float(values) if np.ndim(template) == 0 else values


@dataclass(frozen=True)
class RectangularPsd(PsdShape):
    """Flat-top PSD: ``height`` for |f - center| < bandwidth/2, else 0."""

    center_hz: float
    bandwidth_hz: float
    height: float

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth_hz}")
        if self.height < 0:
            raise ValueError(f"height must be >= 0, got {self.height}")

    def evaluate(self, f):
        f = np.asarray(f, dtype=float)
        inside = np.abs(f - self.center_hz) < 0.5 * self.bandwidth_hz
        return _scalar_like(f, np.where(inside, self.height, 0.0))

    def power_integral(self) -> float:
        return self.height * self.bandwidth_hz

    @property
    def support(self) -> tuple[float, float]:
        half = 0.5 * self.bandwidth_hz
        return (self.center_hz - half, self.center_hz + half)


@dataclass(frozen=True)
class RaisedCosinePsd(PsdShape):
    """Raised-cosine PSD with half-amplitude full width ``bandwidth_hz``.

    Flat at ``height`` out to (1-rolloff)*bandwidth/2 from center, cosine
    rolloff to zero at (1+rolloff)*bandwidth/2.  The rolloff is
    area-preserving, so the integral is exactly height*bandwidth.
    """

    center_hz: float
    bandwidth_hz: float
    rolloff: float
    height: float

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth_hz}")
        if not 0.0 <= self.rolloff <= 1.0:
            raise ValueError(f"rolloff must be in [0, 1], got {self.rolloff}")
        if self.height < 0:
            raise ValueError(f"height must be >= 0, got {self.height}")

    def evaluate(self, f):
        f = np.asarray(f, dtype=float)
        x = np.abs(f - self.center_hz)
        flat_edge = 0.5 * (1.0 - self.rolloff) * self.bandwidth_hz
        outer_edge = 0.5 * (1.0 + self.rolloff) * self.bandwidth_hz
        if self.rolloff == 0.0:
            vals = np.where(x < outer_edge, self.height, 0.0)
        else:
            ramp = np.clip(x - flat_edge, 0.0, None)
            cos_arg = np.pi * ramp / (self.rolloff * self.bandwidth_hz)
            roll = 0.5 * self.height * (1.0 + np.cos(cos_arg))
            vals = np.where(x <= flat_edge, self.height,
                            np.where(x < outer_edge, roll, 0.0))
        return _scalar_like(f, vals)

    def power_integral(self) -> float:
        return self.height * self.bandwidth_hz

    @property
    def support(self) -> tuple[float, float]:
        half = 0.5 * (1.0 + self.rolloff) * self.bandwidth_hz
        return (self.center_hz - half, self.center_hz + half)


@dataclass(frozen=True)
class TabulatedPsd(PsdShape):
    """PSD sampled on a strictly increasing grid, linearly interpolated.

    Zero outside the tabulated range; no extrapolation.
    """

    frequencies_hz: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        fs = np.asarray(self.frequencies_hz, dtype=float)
        vs = np.asarray(self.values, dtype=float)
        if fs.ndim != 1 or fs.size < 2 or vs.shape != fs.shape:
            raise ValueError("tabulated PSD needs two equal-length 1-D columns "
                             "with at least 2 points")
        if not np.all(np.isfinite(fs)) or not np.all(np.isfinite(vs)):
            raise ValueError("tabulated PSD values must be finite")
        if not np.all(np.diff(fs) > 0):
            raise ValueError("tabulated frequency grid must be strictly increasing")
        if np.any(vs < 0):
            raise ValueError("tabulated PSD values must be >= 0")
        object.__setattr__(self, "frequencies_hz", fs)
        object.__setattr__(self, "values", vs)

    @classmethod
    def from_csv(cls, path) -> "TabulatedPsd":
        """Load a two-column CSV (f_Hz, value_per_Hz); '#' lines are comments."""
        try:
            table = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        except OSError as exc:
            raise ConfigError(f"cannot read tabulated PSD file {path}: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"malformed tabulated PSD CSV {path}: {exc}") from exc
        if table.shape[1] != 2:
            raise ConfigError(f"tabulated PSD CSV {path} must have exactly "
                              f"2 columns, got {table.shape[1]}")
        return cls(frequencies_hz=table[:, 0], values=table[:, 1])

    def evaluate(self, f):
        f = np.asarray(f, dtype=float)
        vals = np.interp(f, self.frequencies_hz, self.values, left=0.0, right=0.0)
        return _scalar_like(f, vals)

    def power_integral(self) -> float:
        return float(np.trapezoid(self.values, self.frequencies_hz))

    @property
    def support(self) -> tuple[float, float]:
        return (float(self.frequencies_hz[0]), float(self.frequencies_hz[-1]))


@dataclass(frozen=True)
class DualPolPsd:
    """Input spectral description: Ghat_x, Ghat_y and the reference power P0.

    ``px_hat``/``py_hat`` are the dimensionless power integrals, so the
    absolute per-polarization powers are P0*px_hat and P0*py_hat.
    """

    gx: PsdShape
    gy: PsdShape
    p0_w: float

    def __post_init__(self):
        if not self.p0_w > 0:
            raise ValueError(f"p0 must be > 0 W, got {self.p0_w}")

    @property
    def px_hat(self) -> float:
        return self.gx.power_integral()

    @property
    def py_hat(self) -> float:
        return self.gy.power_integral()

    @property
    def pt_hat_x(self) -> float:
        """Phase-rotation power weight 2*Px_hat + Py_hat seen by X."""
        return 2.0 * self.px_hat + self.py_hat

    @property
    def pt_hat_y(self) -> float:
        """Phase-rotation power weight 2*Py_hat + Px_hat seen by Y."""
        return 2.0 * self.py_hat + self.px_hat

    def swapped(self) -> "DualPolPsd":
        """The same input with the polarization roles exchanged."""
        return DualPolPsd(gx=self.gy, gy=self.gx, p0_w=self.p0_w)
