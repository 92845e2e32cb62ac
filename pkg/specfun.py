"""
Special functions for the Bessel kernel
Gamma, the modified Bessel function K, pointwise G_s and its radial integrals
"""
import math
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import integrate, optimize, special

from utils import DomainError

BESSEL_ORDER_LIMIT = 60.0
UNDERFLOW_ARGUMENT = 700.0
FAR_FIELD_RADIUS = 2.0
FAR_FIELD_CUTOFF = 80.0
CALIBRATION_WINDOW = (2.0, 50.0)

logger = logging.getLogger(__name__)


def gamma(x):
    """
    Gamma function on the positive axis

    Args:
        x (float): Argument, must be positive

    Returns:
        float: Γ(x)
    """
    if not x > 0:
        raise DomainError(f"gamma requires x > 0, got {x}")
    return float(special.gamma(x))


def bessel_k(alpha, z):
    """
    Modified Bessel function of the second kind K_alpha(z)

    Args:
        alpha (float): Real order, |alpha| <= 60
        z (float): Positive argument

    Returns:
        float: K_alpha(z), 0.0 beyond the underflow threshold
    """
    if not z > 0:
        raise DomainError(f"bessel_k requires z > 0, got {z}")
    if abs(alpha) > BESSEL_ORDER_LIMIT:
        raise DomainError(f"bessel_k supports |alpha| <= {BESSEL_ORDER_LIMIT:g}, got {alpha}")
    if z > UNDERFLOW_ARGUMENT:
        return 0.0
    # K is even in its order
    return float(special.kv(abs(alpha), z))


class NearFieldKind(str, Enum):
    POWER_LAW = "power-law"
    LOGARITHMIC = "logarithmic"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class NearFieldClass:
    """Behaviour of G_s as r -> 0: |x|^(s-d), 1 + |log|x||, or bounded"""

    kind: NearFieldKind
    exponent: Optional[float] = None

    def __str__(self):
        if self.kind is NearFieldKind.POWER_LAW:
            return f"PowerLaw({self.exponent:g})"
        if self.kind is NearFieldKind.LOGARITHMIC:
            return "Logarithmic"
        return "Bounded"

    @property
    def is_singular(self):
        return self.kind is not NearFieldKind.BOUNDED


@dataclass(frozen=True)
class RadialKernelSpec:
    """Order s and dimension d of the Bessel kernel G_s on R^d"""

    s: float
    d: int

    def __post_init__(self):
        s = float(self.s)
        if not (math.isfinite(s) and s > 0):
            raise DomainError(f"kernel order must be positive and finite, got {self.s}")
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.d}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "d", int(self.d))

    @property
    def alpha(self):
        """Bessel order (d - s)/2"""
        return (self.d - self.s) / 2.0

    @property
    def log_normalization(self):
        """log of 1 / (2^((s-2)/2) (2π)^(d/2) Γ(s/2))"""
        return (-(self.s - 2.0) / 2.0 * math.log(2.0)
                - self.d / 2.0 * math.log(2.0 * math.pi)
                - special.gammaln(self.s / 2.0))


def near_field_class(spec):
    """
    Classify the singularity of G_s at the origin by the sign of s - d

    Args:
        spec (RadialKernelSpec): Kernel order and dimension

    Returns:
        NearFieldClass: PowerLaw(s - d), Logarithmic or Bounded
    """
    if spec.s < spec.d:
        return NearFieldClass(NearFieldKind.POWER_LAW, spec.s - spec.d)
    if spec.s == spec.d:
        return NearFieldClass(NearFieldKind.LOGARITHMIC)
    return NearFieldClass(NearFieldKind.BOUNDED)


def origin_value(spec):
    """G_s(0) = Γ((s-d)/2) / ((4π)^(d/2) Γ(s/2)) when s > d, +inf otherwise"""
    if spec.s <= spec.d:
        return math.inf
    log_value = (special.gammaln((spec.s - spec.d) / 2.0)
                 - spec.d / 2.0 * math.log(4.0 * math.pi)
                 - special.gammaln(spec.s / 2.0))
    return math.exp(log_value)


def bessel_kernel(spec, r):
    """
    Evaluate the Bessel kernel G_s at radius r

    The value is assembled in log space from the exponentially scaled K so
    that large radii underflow cleanly to zero.

    Args:
        spec (RadialKernelSpec): Kernel order and dimension
        r (float or np.ndarray): Radii, all >= 0

    Returns:
        float or np.ndarray: G_s(r); +inf at r = 0 unless the class is Bounded
    """
    radii = np.asarray(r, dtype=float)
    if np.any(np.isnan(radii)) or np.any(radii < 0):
        raise DomainError("bessel_kernel requires radii r >= 0")

    values = np.empty(radii.shape, dtype=float)
    positive = radii > 0
    rp = radii[positive]
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        scaled = special.kve(spec.alpha, rp)
        log_values = (spec.log_normalization + np.log(scaled) - rp
                      + (spec.s - spec.d) / 2.0 * np.log(rp))
        values[positive] = np.exp(log_values)
    values[~positive] = origin_value(spec)

    if values.ndim == 0:
        return float(values)
    return values


@lru_cache(maxsize=256)
def _far_field_constant(spec):
    """Max of G_s(r) e^(r/2) over the calibration window"""
    lo, hi = CALIBRATION_WINDOW
    radii = np.linspace(lo, hi, 4801)
    scaled = bessel_kernel(spec, radii) * np.exp(radii / 2.0)
    best = int(np.argmax(scaled))
    peak = float(scaled[best])

    if 0 < best < len(radii) - 1:
        refined = optimize.minimize_scalar(
            lambda x: -bessel_kernel(spec, x) * math.exp(x / 2.0),
            bounds=(radii[best - 1], radii[best + 1]),
            method="bounded",
            options={"xatol": 1e-10},
        )
        peak = max(peak, -float(refined.fun))

    logger.debug(f"Far-field constant for {spec}: {peak!r}")
    return peak * (1.0 + 1e-9)


def far_field_bound(spec, r):
    """
    Exponential envelope C e^(-r/2) dominating G_s for r >= 2

    Args:
        spec (RadialKernelSpec): Kernel order and dimension
        r (float): Radius, at least 2

    Returns:
        float: C e^(-r/2) with C calibrated once per spec
    """
    if not r >= FAR_FIELD_RADIUS:
        raise DomainError(f"far_field_bound requires r >= {FAR_FIELD_RADIUS:g}, got {r}")
    return _far_field_constant(spec) * math.exp(-r / 2.0)


def sphere_area(d):
    """Surface area ω_{d-1} of the unit sphere in R^d"""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def ball_volume(d):
    """Volume of the unit ball in R^d"""
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def _kernel_power(spec, radius, power):
    """G_s(r)^power, overflowing to +inf for large powers near a singular origin"""
    with np.errstate(over="ignore"):
        return float(np.power(np.float64(bessel_kernel(spec, radius)), power))


def radial_integral(spec, power=1.0, r_min=0.0, r_max=FAR_FIELD_CUTOFF):
    """
    Integrate G_s(r)^power r^(d-1) over [r_min, r_max]

    With r_min > 0 the substitution r = e^t flattens the near-field power
    law; from the origin the adaptive rule absorbs the integrable endpoint
    singularity.

    Args:
        spec (RadialKernelSpec): Kernel order and dimension
        power (float): Exponent applied to G_s
        r_min (float): Inner radius
        r_max (float): Outer radius

    Returns:
        tuple: (value, absolute error estimate)
    """
    d = spec.d
    if r_min > 0:
        def integrand(t):
            radius = math.exp(t)
            return _kernel_power(spec, radius, power) * radius ** d

        value, abserr = integrate.quad(integrand, math.log(r_min), math.log(r_max),
                                       epsabs=0.0, epsrel=1e-11, limit=200)
    else:
        def integrand(radius):
            return _kernel_power(spec, radius, power) * radius ** (d - 1)

        value, abserr = integrate.quad(integrand, 0.0, r_max,
                                       epsabs=1e-14, epsrel=1e-10, limit=400)
    return value, abserr


def kernel_lp_norm(spec, exponent):
    """
    ‖G_s‖ in L^exponent, integrating near and far field separately at r = 2

    Args:
        spec (RadialKernelSpec): Kernel order and dimension
        exponent (float): Lebesgue exponent in [1, inf]

    Returns:
        tuple: (norm, absolute error estimate of the norm)
    """
    if exponent < 1:
        raise DomainError(f"Lebesgue exponent must be >= 1, got {exponent}")
    if math.isinf(exponent):
        return origin_value(spec), 0.0

    near, near_err = radial_integral(spec, exponent, 0.0, FAR_FIELD_RADIUS)
    far, far_err = radial_integral(spec, exponent, FAR_FIELD_RADIUS, FAR_FIELD_CUTOFF)
    omega = sphere_area(spec.d)
    total = omega * (near + far)
    total_err = omega * (near_err + far_err)

    norm = total ** (1.0 / exponent)
    # first-order propagation of the quadrature error through the root
    norm_err = norm * total_err / (exponent * total) if total > 0 else total_err
    return norm, norm_err


def kernel_mass(spec):
    """∫ G_s over R^d, equal to 1 under the project's Fourier convention"""
    return kernel_lp_norm(spec, 1.0)
