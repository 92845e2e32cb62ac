"""
Periodic-grid Fourier calculus for Bessel potential spaces
Bessel potentials as multipliers, L^p and H^{s,p} norms, the pairing and kernel sections
"""
import math
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import fft, integrate

from specfun import (RadialKernelSpec, ball_volume, bessel_kernel, far_field_bound,
                     near_field_class, radial_integral, sphere_area)
from utils import ConfigurationError, DomainError

DEFAULT_GRID_BUDGET = 2 ** 24
# e^(-r^2) drops below 1e-12 at this radius
TAIL_RADIUS = math.sqrt(12.0 * math.log(10.0))

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [-L/2, L/2)^d with n points per axis"""

    d: int
    n: int
    L: float
    budget: int = DEFAULT_GRID_BUDGET

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ConfigurationError(f"grid dimension must be 1, 2 or 3, got {self.d}")
        n = int(self.n)
        if n != self.n or n < 16 or n & (n - 1):
            raise ConfigurationError(f"points per axis must be a power of two >= 16, got {self.n}")
        length = float(self.L)
        if not (math.isfinite(length) and length > 0):
            raise ConfigurationError(f"period must be positive, got {self.L}")
        if n ** self.d > self.budget:
            raise ConfigurationError(
                f"grid of {n}^{self.d} points exceeds the budget of {self.budget}"
            )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "L", length)

    @property
    def spacing(self):
        return self.L / self.n

    @property
    def cell_volume(self):
        return self.spacing ** self.d

    @property
    def frequency_weight(self):
        """Frequency-cell volume (2π/L)^d"""
        return (2.0 * math.pi / self.L) ** self.d

    @property
    def shape(self):
        return (self.n,) * self.d

    @property
    def origin_index(self):
        return (self.n // 2,) * self.d

    def same_lattice(self, other):
        return (self.d, self.n, self.L) == (other.d, other.n, other.L)

    def axis(self):
        """Sample positions along one axis"""
        return -self.L / 2.0 + self.spacing * np.arange(self.n)

    def mesh(self):
        """Coordinate arrays of every sample, one per axis"""
        return np.meshgrid(*([self.axis()] * self.d), indexing="ij")

    def frequency_mesh(self):
        """Angular frequency arrays in FFT order, one per axis"""
        return _frequency_mesh(self.d, self.n, self.L)

    def frequency_squared(self):
        """|ξ|^2 in FFT order"""
        return _frequency_squared(self.d, self.n, self.L)

    def distance_from(self, point):
        """Euclidean distance of every sample from point (no periodic wrap)"""
        centre = _as_point(point, self.d)
        return np.sqrt(sum((c - x) ** 2 for c, x in zip(self.mesh(), centre)))

    def index_of(self, point):
        """Index tuple of the sample at point; point must lie on the lattice"""
        centre = _as_point(point, self.d)
        index = []
        for coordinate in centre:
            position = (coordinate + self.L / 2.0) / self.spacing
            nearest = int(round(position))
            if abs(position - nearest) > 1e-9 or not 0 <= nearest < self.n:
                raise ConfigurationError(f"{tuple(centre)} is not a sample point of {self}")
            index.append(nearest)
        return tuple(index)


@lru_cache(maxsize=32)
def _frequency_mesh(d, n, L):
    frequencies = 2.0 * math.pi * fft.fftfreq(n, d=L / n)
    mesh = np.meshgrid(*([frequencies] * d), indexing="ij")
    for array in mesh:
        array.setflags(write=False)
    return tuple(mesh)


@lru_cache(maxsize=32)
def _frequency_squared(d, n, L):
    squared = sum(xi ** 2 for xi in _frequency_mesh(d, n, L))
    squared.setflags(write=False)
    return squared


def _as_point(point, d):
    coordinates = np.array([float(c) for c in np.atleast_1d(np.asarray(point, dtype=object))])
    if coordinates.shape != (d,):
        raise ConfigurationError(f"expected a point in R^{d}, got {point!r}")
    return coordinates


@dataclass(frozen=True, eq=False)
class Field:
    """Real samples on a grid, stored row-major with shape (n,)*d"""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.size == self.grid.n ** self.grid.d:
            values = values.reshape(self.grid.shape)
        else:
            raise ConfigurationError(
                f"field has {values.size} samples, grid needs {self.grid.n ** self.grid.d}"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("field samples must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid, func):
        """Sample func(*coordinate_arrays) on every grid point"""
        return cls(grid, func(*grid.mesh()))

    @property
    def flat(self):
        return self.values.ravel()

    def value_at(self, point):
        return float(self.values[self.grid.index_of(point)])

    def scaled(self, factor):
        return Field(self.grid, factor * self.values)

    def shifted(self, cells, axis=0):
        """Cyclic shift by a whole number of cells"""
        return Field(self.grid, np.roll(self.values, cells, axis=axis))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Continuous-transform samples f̂(ξ_k) in FFT order"""

    grid: GridSpec
    coefficients: np.ndarray


@dataclass(frozen=True)
class MultiplierOrder:
    """Order σ of the Bessel potential with symbol (1 + |ξ|^2)^(-σ/2)"""

    sigma: float

    def __post_init__(self):
        sigma = float(self.sigma)
        if not math.isfinite(sigma):
            raise DomainError(f"multiplier order must be finite, got {self.sigma}")
        object.__setattr__(self, "sigma", sigma)

    def symbol(self, grid):
        return (1.0 + grid.frequency_squared()) ** (-self.sigma / 2.0)


def _as_order(order):
    return order if isinstance(order, MultiplierOrder) else MultiplierOrder(order)


def dft(field, workers=None):
    """
    Forward transform approximating f̂(ξ) = ∫ f(x) e^{-i<x,ξ>} dx

    Args:
        field (Field): Samples with the origin at index n/2 on every axis
        workers (int): Optional FFT worker count

    Returns:
        Spectrum: Δx^d-weighted coefficients in FFT order
    """
    grid = field.grid
    coefficients = grid.cell_volume * fft.fftn(fft.ifftshift(field.values), workers=workers)
    return Spectrum(grid, coefficients)


def idft(spectrum, workers=None):
    """
    Inverse of dft: (2π)^{-d} Σ f̂(ξ) e^{i<x,ξ>} times the frequency weight

    Args:
        spectrum (Spectrum): Coefficients in FFT order
        workers (int): Optional FFT worker count

    Returns:
        Field: Real part of the reconstructed samples
    """
    grid = spectrum.grid
    values = fft.fftshift(fft.ifftn(spectrum.coefficients, workers=workers)) / grid.cell_volume
    return Field(grid, values.real)


def bessel_potential(field, order):
    """Apply J_σ, the multiplier (1 + |ξ|^2)^(-σ/2)"""
    order = _as_order(order)
    if order.sigma == 0:
        return field
    spectrum = dft(field)
    return idft(Spectrum(field.grid, spectrum.coefficients * order.symbol(field.grid)))


def lp_norm(field, p):
    """
    Riemann-sum L^p norm; for p = inf the sample maximum (a lower bound of the sup)

    Args:
        field (Field): Samples
        p (float or Exponent): Lebesgue exponent >= 1

    Returns:
        float: The norm
    """
    p = float(p)
    if not p >= 1:
        raise DomainError(f"Lebesgue exponent must be >= 1, got {p}")
    magnitudes = np.abs(field.values)
    if math.isinf(p):
        return float(magnitudes.max())
    if p == 1:
        return float(field.grid.cell_volume * magnitudes.sum())
    return float((field.grid.cell_volume * np.sum(magnitudes ** p)) ** (1.0 / p))


def bessel_norm(field, s, p):
    """‖J_{-s} f‖_{L^p}"""
    return lp_norm(bessel_potential(field, MultiplierOrder(-float(s))), p)


def _check_same_grid(f, g):
    if not f.grid.same_lattice(g.grid):
        raise ConfigurationError(f"grid mismatch: {f.grid} vs {g.grid}")


def pairing(f, g, s):
    """
    The pairing ∫ f · J_{-2s} g evaluated on the spectrum

    Args:
        f (Field): First argument
        g (Field): Second argument, same grid
        s (float): Kernel order

    Returns:
        float: (2π)^{-d} Σ f̂ conj(ĝ) (1 + |ξ|^2)^s (2π/L)^d
    """
    _check_same_grid(f, g)
    grid = f.grid
    f_hat = dft(f).coefficients
    g_hat = dft(g).coefficients
    weight = (1.0 + grid.frequency_squared()) ** float(s)
    cross = f_hat.real * g_hat.real + f_hat.imag * g_hat.imag
    return float(grid.frequency_weight / (2.0 * math.pi) ** grid.d * np.sum(cross * weight))


def kernel_section(s, x, grid, method="spectral"):
    """
    Samples of K_s(x, ·) = G_{2s}(· - x)

    Args:
        s (float): Kernel order, 2s > d
        x: Centre point (scalar for d = 1)
        grid (GridSpec): Sampling grid
        method (str): "spectral" for the periodized kernel, "radial" for the true kernel

    Returns:
        Field: The section
    """
    s = float(s)
    if not 2.0 * s > grid.d:
        raise DomainError(f"kernel section needs 2s > d, got s={s}, d={grid.d}")
    centre = _as_point(x, grid.d)

    if method == "spectral":
        phase = sum(c * xi for c, xi in zip(centre, grid.frequency_mesh()))
        coefficients = np.exp(-1j * phase) * (1.0 + grid.frequency_squared()) ** (-s)
        return idft(Spectrum(grid, coefficients))
    if method == "radial":
        spec = RadialKernelSpec(2.0 * s, grid.d)
        return Field(grid, bessel_kernel(spec, grid.distance_from(centre)))
    raise ValueError(f"unknown kernel section method {method!r}")


def section_discrepancy_budget(s, grid):
    """
    Bound on the spectral-vs-radial section discrepancy

    Sums the frequency truncation tail beyond the Nyquist ball and the
    periodization tail from the far-field envelope.

    Args:
        s (float): Kernel order, 2s > d
        grid (GridSpec): Sampling grid

    Returns:
        float: Absolute discrepancy budget
    """
    s = float(s)
    d = grid.d
    nyquist = math.pi / grid.spacing
    tail, _ = integrate.quad(lambda rho: (1.0 + rho * rho) ** (-s) * rho ** (d - 1),
                             nyquist, np.inf, limit=200)
    # the factor 2 covers lattice-sum excess over the integral
    truncation = 2.0 * sphere_area(d) * tail / (2.0 * math.pi) ** d

    spec = RadialKernelSpec(2.0 * s, d)
    half = max(grid.L / 2.0, 2.0)
    images = 3 ** d - 1
    periodization = images * far_field_bound(spec, half) / (1.0 - math.exp(-grid.L / 4.0)) ** d
    logger.debug(f"Section budget s={s:g} on {grid}: truncation {truncation:.3e}, "
                 f"periodization {periodization:.3e}")
    return truncation + periodization


def fasshauer_norm(field, s, p):
    """
    (Σ |f̂|^{p'} (1 + |ξ|^2)^s)^{1/p'} with the (2π)^{-d} frequency weight

    Args:
        field (Field): Samples
        s (float): Order, 2s > d
        p (float or Exponent): Exponent in (1, inf)

    Returns:
        float: The norm; equals bessel_norm(field, s, 2) at p = 2
    """
    p = float(p)
    if not 1.0 < p < math.inf:
        raise DomainError(f"fasshauer_norm needs p in (1, inf), got {p}")
    grid = field.grid
    if not 2.0 * float(s) > grid.d:
        raise DomainError(f"fasshauer_norm needs 2s > d, got s={s}, d={grid.d}")
    conjugate = p / (p - 1.0)
    magnitudes = np.abs(dft(field).coefficients)
    weight = (1.0 + grid.frequency_squared()) ** float(s)
    total = grid.frequency_weight / (2.0 * math.pi) ** grid.d * np.sum(magnitudes ** conjugate * weight)
    return float(total ** (1.0 / conjugate))


def radial_convolution(field, sigma):
    """
    Grid convolution of field with the radially sampled G_σ

    A singular origin sample is replaced by the mean of G_σ over the ball
    with the volume of one cell.

    Args:
        field (Field): Samples
        sigma (float): Kernel order σ > 0

    Returns:
        Field: Samples of G_σ * f
    """
    grid = field.grid
    spec = RadialKernelSpec(float(sigma), grid.d)
    radii = grid.distance_from(np.zeros(grid.d))
    samples = np.empty(grid.shape)
    away = radii > 0
    samples[away] = bessel_kernel(spec, radii[away])
    if near_field_class(spec).is_singular:
        radius = grid.spacing * ball_volume(grid.d) ** (-1.0 / grid.d)
        mass, _ = radial_integral(spec, 1.0, 0.0, radius)
        samples[~away] = sphere_area(grid.d) * mass / grid.cell_volume
    else:
        samples[~away] = bessel_kernel(spec, 0.0)

    kernel_hat = dft(Field(grid, samples)).coefficients
    return idft(Spectrum(grid, kernel_hat * dft(field).coefficients))


# Test-function families built on the centred Gaussian e^{-a|x|^2}

@dataclass(frozen=True)
class Gaussian:
    a: float = 1.0

    def evaluate(self, *coords):
        return np.exp(-self.a * sum(c ** 2 for c in coords))

    @property
    def width(self):
        return 1.0 / math.sqrt(self.a)

    def minimal_period(self, d):
        return 8.0 * self.width

    def fourier_at_zero(self, d):
        return (math.pi / self.a) ** (d / 2.0)


@dataclass(frozen=True)
class Dilated:
    """h_R(x) = φ(x/R)"""

    base: Gaussian
    R: float

    def evaluate(self, *coords):
        return self.base.evaluate(*(c / self.R for c in coords))

    def minimal_period(self, d):
        return 8.0 * self.R * self.base.width


@dataclass(frozen=True)
class Mollifier:
    """h_ε(x) = ε^{-d} φ(x/ε) with φ normalized to unit mass"""

    base: Gaussian
    eps: float

    def evaluate(self, *coords):
        d = len(coords)
        normalization = (self.base.a / math.pi) ** (d / 2.0) / self.eps ** d
        return normalization * self.base.evaluate(*(c / self.eps for c in coords))

    def minimal_period(self, d):
        return 8.0 * self.eps * self.base.width


@dataclass(frozen=True)
class Rescaled:
    """h_n(x) = n^{-d/p} ψ(x/n)"""

    base: Gaussian
    n: float
    p: float

    def evaluate(self, *coords):
        d = len(coords)
        return self.n ** (-d / self.p) * self.base.evaluate(*(c / self.n for c in coords))

    def minimal_period(self, d):
        return 8.0 * self.n * self.base.width


@dataclass(frozen=True)
class Wave:
    """cos(2π <k, x> / period), exactly band-limited when period = L"""

    wavenumbers: Tuple[int, ...]
    period: float

    def evaluate(self, *coords):
        phase = sum(k * c for k, c in zip(self.wavenumbers, coords))
        return np.cos(2.0 * math.pi * phase / self.period)

    def minimal_period(self, d):
        return self.period


@dataclass(frozen=True)
class GaussianMixture:
    """Σ w_i exp(-|x - c_i|^2 / width_i^2)"""

    centers: Tuple[Tuple[float, ...], ...]
    widths: Tuple[float, ...]
    weights: Tuple[float, ...]

    def evaluate(self, *coords):
        total = 0.0
        for centre, width, weight in zip(self.centers, self.widths, self.weights):
            squared = sum((c - x) ** 2 for c, x in zip(coords, centre))
            total = total + weight * np.exp(-squared / width ** 2)
        return total

    def minimal_period(self, d):
        reach = max(max(abs(x) for x in centre) + TAIL_RADIUS * width
                    for centre, width in zip(self.centers, self.widths))
        return 2.0 * reach


def test_function(kind, grid):
    """
    Sample a test-function family member on the grid

    Args:
        kind: Gaussian, Dilated, Mollifier, Rescaled, Wave or GaussianMixture
        grid (GridSpec): Sampling grid

    Returns:
        Field: The samples

    Raises:
        ConfigurationError: The support does not fit; minimal_period holds the smallest usable L
    """
    minimal = kind.minimal_period(grid.d)
    if isinstance(kind, Wave):
        if not math.isclose(minimal, grid.L, rel_tol=1e-12):
            raise ConfigurationError(
                f"wave period {minimal} must equal the grid period {grid.L}",
                minimal_period=minimal,
            )
    elif grid.L < minimal * (1.0 - 1e-12):
        raise ConfigurationError(
            f"{kind} needs a period of at least {minimal:g}, grid has {grid.L:g}",
            minimal_period=minimal,
        )
    return Field.from_function(grid, kind.evaluate)


def random_mixture(grid, rng, components=(3, 6), nonnegative=False):
    """
    Seeded Gaussian mixture whose tails fall below 1e-12 at the boundary

    Args:
        grid (GridSpec): Target grid
        rng (np.random.Generator): Source of randomness
        components (tuple): Inclusive range for the number of bumps
        nonnegative (bool): Use nonnegative weights only

    Returns:
        GaussianMixture: The mixture description
    """
    narrowest = 4.0 * grid.spacing
    widest = grid.L / 24.0
    if narrowest > widest:
        raise ConfigurationError(f"grid {grid} is too coarse for random mixtures")
    count = int(rng.integers(components[0], components[1] + 1))
    centers = tuple(tuple(float(c) for c in rng.uniform(-grid.L / 8.0, grid.L / 8.0, grid.d))
                    for _ in range(count))
    widths = tuple(float(w) for w in rng.uniform(narrowest, widest, count))
    weights = rng.standard_normal(count)
    if nonnegative:
        weights = np.abs(weights)
    return GaussianMixture(centers, widths, tuple(float(w) for w in weights))
