"""Frequency-kernel evaluation: K(F), eta(F) = K(F)/K(0), Phi_NL = P0*K(0).

The kernel weighs each frequency pair (f1, f2) of the four-wave-mixing sum
through the product F = f1*f2 only:

    K(F) = integral_0^L gamma'(s) G(s) exp(-j C(s) (2 pi)^2 F) ds     [1/W]

with G(z) the power gain and C(z) the cumulated dispersion of the link.  Two
independent evaluators are provided:

* ``kernel_closed_form`` — per-span analytic integration.  Within span i the
  exponent is affine in s, so the segment integral is
  gamma'_i G_i exp(-j C_i theta) * (exp(w_i L_i) - 1)/w_i with
  w_i = -alpha_i + j beta2_i theta and theta = (2 pi)^2 F.
* ``kernel_quadrature`` — adaptive composite Simpson rule over z on the
  span-local restriction of the ``power_gain`` / ``cumulated_dispersion``
  profiles, with an initial resolution of at most pi/8 phase change per cell
  and cell-count doubling until the relative change meets the tolerance.

Each serves as the other's oracle; the engines use the closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .link import LinkProfile

__all__ = [
    "PHASE_RATE",
    "KernelModel",
    "KernelConvergenceError",
    "NonlinearPhase",
    "kernel_closed_form",
    "kernel_quadrature",
    "normalized_kernel",
    "normalized_kernel_grid",
    "nonlinear_phase",
]

# theta = PHASE_RATE * F converts the frequency product to a phase rate per
# unit cumulated dispersion
PHASE_RATE = (2.0 * np.pi) ** 2


class KernelConvergenceError(RuntimeError):
    """The z-quadrature could not reach the requested relative tolerance.

    Attributes
    ----------
    estimate : complex
        Best value achieved before the cell budget ran out.
    achieved_rel : float
        Relative change of the last refinement step (the error estimate).
    """

    def __init__(self, message, estimate, achieved_rel):
        super().__init__(message)
        self.estimate = estimate
        self.achieved_rel = achieved_rel


def _exp_ratio(z):
    """(exp(z) - 1)/z, elementwise, with a series branch near z = 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-2
    zs = np.where(small, 0.0, z)
    direct = (np.exp(zs) - 1.0) / np.where(small, 1.0, zs)
    # Horner series 1 + z/2 + z^2/6 + ... + z^7/8!; next term < 3e-22 at |z|=1e-2
    series = 1.0 / 40320.0
    for fac in (5040.0, 720.0, 120.0, 24.0, 6.0, 2.0, 1.0):
        series = 1.0 / fac + z * series
    return np.where(small, series, direct)


@dataclass
class KernelModel:
    """Kernel evaluator for one link, with a memoized K(0) and eta cache.

    ``k0`` is K(0) in 1/W, real and positive for any physical link; it is the
    normalizer of eta and, scaled by P0, the cumulated nonlinear phase.
    ``quadrature_tolerance`` is the relative tolerance of the adaptive check
    evaluator; ``max_cells_per_span`` bounds its refinement budget.
    """

    link: LinkProfile
    quadrature_tolerance: float = 1e-10
    max_cells_per_span: int = 1 << 21
    k0: complex = field(init=False)

    def __post_init__(self):
        spans = self.link.spans
        scale = self.link.gamma_scale
        self._gamma_eff = np.array([scale * s.gamma_per_w_m for s in spans])
        self._alpha = np.array([s.alpha_per_m for s in spans])
        self._beta2 = np.array([s.beta2_s2_per_m for s in spans])
        self._length = np.array([s.length_m for s in spans])
        self._g0 = self.link.start_gain
        self._c0 = self.link.start_dispersion_s2
        self._eta_cache: dict[float, complex] = {}
        self.k0 = complex(kernel_closed_form(self, 0.0))


def kernel_closed_form(model: KernelModel, F):
    """K(F) by exact per-span integration; scalar or array F in Hz^2.

    Sums gamma'_i G_i exp(-j C_i theta) L_i * (exp(w_i L_i) - 1)/(w_i L_i)
    over spans, where C_i and G_i are the profile values at the span start.
    """
    F = np.asarray(F, dtype=float)
    theta = PHASE_RATE * F
    out = np.zeros(theta.shape, dtype=complex)
    for i in range(len(model._length)):
        w = -model._alpha[i] + 1j * model._beta2[i] * theta
        amp = model._gamma_eff[i] * model._g0[i] * model._length[i]
        out += amp * np.exp(-1j * model._c0[i] * theta) \
            * _exp_ratio(w * model._length[i])
    return complex(out) if np.ndim(F) == 0 else out


def _simpson_span(model, span_index, theta, cells):
    """Composite Simpson over one span of the profile-defined integrand.

    Integrates the one-sided restriction of the profiles to the span,
    G(s) = G_i exp(-alpha_i s) and C(s) = C_i - beta2_i s in span-local s:
    the profile functions agree with it at every interior point (a tested
    invariant), but at the right endpoint the restriction takes the
    within-span limit instead of the next span's post-lumped-gain value,
    which a pointwise profile lookup would return.
    """
    length = model._length[span_index]
    h = length / cells
    edges = np.linspace(0.0, length, cells + 1)
    nodes = np.concatenate((edges, edges[:-1] + 0.5 * h))
    g = model._g0[span_index] * np.exp(-model._alpha[span_index] * nodes)
    c = model._c0[span_index] - model._beta2[span_index] * nodes
    f = model._gamma_eff[span_index] * g * np.exp(-1j * theta * c)
    fe, fm = f[: cells + 1], f[cells + 1:]
    return h / 6.0 * (fe[0] + fe[-1] + 2.0 * np.sum(fe[1:-1]) + 4.0 * np.sum(fm))


def kernel_quadrature(model: KernelModel, F: float) -> complex:
    """K(F) by adaptive per-span composite Simpson quadrature (scalar F).

    The initial cell count per span enforces at most pi/8 phase change of
    C(s)*(2 pi)^2*F per cell; all spans then double their cell counts until
    the total changes by less than ``quadrature_tolerance`` relative.  Raises
    ``KernelConvergenceError`` (carrying the best estimate) if a span would
    exceed ``max_cells_per_span``.
    """
    theta = PHASE_RATE * float(F)
    max_phase = np.pi / 8.0
    cells = np.maximum(
        8,
        np.ceil(np.abs(model._beta2 * theta) * model._length / max_phase).astype(int),
    )
    if np.any(cells > model.max_cells_per_span):
        raise KernelConvergenceError(
            f"phase criterion needs {int(cells.max())} cells/span, "
            f"budget is {model.max_cells_per_span}",
            estimate=None,
            achieved_rel=math.inf,
        )
    value = sum(_simpson_span(model, i, theta, int(n)) for i, n in enumerate(cells))
    rel = math.inf
    while True:
        cells = cells * 2
        if np.any(cells > model.max_cells_per_span):
            raise KernelConvergenceError(
                f"tolerance {model.quadrature_tolerance:g} not reached within "
                f"{model.max_cells_per_span} cells/span (achieved {rel:g})",
                estimate=value,
                achieved_rel=rel,
            )
        refined = sum(_simpson_span(model, i, theta, int(n)) for i, n in enumerate(cells))
        rel = abs(refined - value) / max(abs(refined), 1e-300)
        value = refined
        if rel <= model.quadrature_tolerance:
            return value


def normalized_kernel(model: KernelModel, F: float) -> complex:
    """eta(F) = K(F)/K(0) via the closed form, memoized per model.

    eta(0) == 1 exactly: numerator and denominator are the same evaluation.
    """
    key = float(F)
    hit = model._eta_cache.get(key)
    if hit is None:
        # idempotent insert: concurrent writers store the identical pure value
        hit = kernel_closed_form(model, key) / model.k0
        model._eta_cache[key] = hit
    return hit


def normalized_kernel_grid(model: KernelModel, F):
    """Vectorized eta over an array of F values.

    Deduplicates F through ``np.unique`` so repeated products (ubiquitous on
    quadrature grids, where F = f1*f2) are evaluated once.
    """
    F = np.asarray(F, dtype=float)
    uniq, inverse = np.unique(F.ravel(), return_inverse=True)
    vals = kernel_closed_form(model, uniq) / model.k0
    return vals[inverse].reshape(F.shape)


@dataclass(frozen=True)
class NonlinearPhase:
    """Cumulated nonlinear phases at the link end, in radians.

    phi_nl = P0*K(0) is the reference nonlinear phase; phi_x and phi_y are
    the average ERP rotation phases K(0)*(2Px+Py) and K(0)*(2Py+Px).
    """

    p0_w: float
    phi_nl: float
    phi_x: float
    phi_y: float


def nonlinear_phase(model: KernelModel, p0: float, px: float, py: float) -> NonlinearPhase:
    """Nonlinear phases for reference power p0 and absolute powers px, py (W)."""
    if not p0 > 0:
        raise ValueError(f"p0 must be > 0 W, got {p0}")
    if px < 0 or py < 0:
        raise ValueError(f"px, py must be >= 0 W, got {px}, {py}")
    k0 = model.k0.real
    return NonlinearPhase(
        p0_w=p0,
        phi_nl=p0 * k0,
        phi_x=k0 * (2.0 * px + py),
        phi_y=k0 * (2.0 * py + px),
    )
