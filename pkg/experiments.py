"""
Verification harness for Bessel potential RKBS pairs
Reproducing identity, integrability boundary, blow-up families, Young's bound and the norming identity
"""
import math
import time
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import stats

from admissibility import (Exponent, format_rational, integrability_check, parse_rational,
                           rkbs_pair_check)
from specfun import (FAR_FIELD_CUTOFF, FAR_FIELD_RADIUS, RadialKernelSpec, bessel_kernel,
                     kernel_lp_norm, near_field_class, radial_integral, sphere_area)
from spectral import (DEFAULT_GRID_BUDGET, Dilated, Field, Gaussian, GridSpec, Mollifier,
                      MultiplierOrder, Rescaled, Spectrum, Wave, bessel_norm, bessel_potential,
                      dft, idft, kernel_section, lp_norm, pairing, radial_convolution,
                      random_mixture, section_discrepancy_budget, test_function)
from utils import ConfigurationError, DomainError

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_NOT_APPLICABLE = "not-applicable"

CONVERGENT = "convergent"
DIVERGENT = "divergent"
INCONCLUSIVE = "inconclusive"

INNER_CUTOFFS = (1e-2, 1e-4, 1e-6, 1e-8)
MOLLIFIER_SCALES = (1 / 2, 1 / 4, 1 / 8, 1 / 16, 1 / 32, 1 / 64)
GROWTH_SCALES = (2.0, 4.0, 8.0, 16.0)

# (points per axis, period) by dimension
GROWTH_GRIDS = {1: (4096, 256.0), 2: (256, 128.0), 3: (128, 128.0)}
REPRODUCING_GRIDS = {1: (4096, 84.0), 2: (256, 16.0), 3: (64, 16.0)}
MOLLIFIER_GRIDS = {1: (16384, 64.0), 2: (1024, 16.0), 3: (256, 16.0)}
FIELD_GRIDS = {1: (2048, 64.0), 2: (128, 64.0), 3: (128, 64.0)}

# every default list keeps its smallest scale at 4 spacings or more of MOLLIFIER_GRIDS
MOLLIFIER_DEFAULT_SCALES = {
    1: MOLLIFIER_SCALES,
    2: MOLLIFIER_SCALES[:4],
    3: (2.0, 1.0, 1 / 2, 1 / 4),
}


class NotApplicable(Exception):
    """The requested parameters lie outside the regime an experiment covers"""


def _exact(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    return Fraction(value).limit_denominator(10 ** 9)


def fit_loglog_slope(observations):
    """Ordinary least-squares slope of log(norm) against log(scale)"""
    scales = np.log([scale for scale, _ in observations])
    norms = np.log([norm for _, norm in observations])
    return float(stats.linregress(scales, norms).slope)


def _map_points(func, items, max_workers=1):
    """Evaluate func over items, in order, optionally on a thread pool"""
    if max_workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(func, items))


def _default_grid(table, d, budget=DEFAULT_GRID_BUDGET):
    """GridSpec from a per-dimension (points, period) table"""
    d = int(d)
    if d not in table:
        raise DomainError(f"dimension must be one of {sorted(table)}, got {d}")
    n, period = table[d]
    return GridSpec(d, n, period, budget=budget)


@dataclass
class GrowthReport:
    """Scale-versus-norm observations of a blow-up family"""

    parameter: str
    observations: List[Tuple[float, float]]
    fitted_slope: float
    predicted_slope: Optional[float]
    residual: Optional[float]
    tolerance: Optional[float]
    passed: bool
    checks: Dict[str, float] = field(default_factory=dict)
    settings: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.observations = [(float(a), float(b)) for a, b in self.observations]
        if len(self.observations) < 4:
            raise ValueError("a growth report needs at least 4 observations")
        scales = np.array([scale for scale, _ in self.observations])
        steps = np.diff(scales)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("growth report scales must be strictly monotone")

    def to_dict(self):
        data = asdict(self)
        data["observations"] = [[scale, norm] for scale, norm in self.observations]
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(**{**data, "observations": [tuple(pair) for pair in data["observations"]]})

    def csv_rows(self):
        return [[scale, norm] for scale, norm in self.observations]


@dataclass
class IntegrabilityReport:
    """Quadrature evidence for G_s in L^{p'}"""

    d: int
    s: str
    p: str
    analytic_verdict: bool
    near_field_class: str
    near_field_exponent: Optional[float]
    quadrature_estimates: List[Tuple[float, float]]
    empirical_verdict: str
    far_field_estimate: Optional[float]
    norm_estimate: Optional[float]
    norm_error: Optional[float]
    passed: bool

    def __post_init__(self):
        self.quadrature_estimates = [(float(a), float(b)) for a, b in self.quadrature_estimates]
        values = [value for _, value in self.quadrature_estimates]
        if any(later < earlier for earlier, later in zip(values, values[1:])):
            raise ValueError("quadrature estimates must be nondecreasing as r0 decreases")

    def to_dict(self):
        data = asdict(self)
        data["quadrature_estimates"] = [[r0, value] for r0, value in self.quadrature_estimates]
        return data

    @classmethod
    def from_dict(cls, data):
        estimates = [tuple(pair) for pair in data["quadrature_estimates"]]
        return cls(**{**data, "quadrature_estimates": estimates})


def classify_estimates(values, cauchy_tolerance=1e-6, growth=0.10, contraction=0.5):
    """
    Read convergence or divergence off a cutoff-refinement sequence

    Args:
        values (list): Estimates for decreasing inner cutoffs
        cauchy_tolerance (float): Relative last-step change counted as converged
        growth (float): Minimum relative increase per step for divergence evidence
        contraction (float): Maximum ratio of successive increments for geometric convergence

    Returns:
        str: "convergent", "divergent" or "inconclusive"
    """
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        return DIVERGENT
    increments = np.diff(values)
    if increments[-1] <= cauchy_tolerance * abs(values[-1]):
        return CONVERGENT
    if np.all(increments >= growth * values[:-1]):
        return DIVERGENT
    ratios = increments[1:] / increments[:-1]
    if np.all(ratios <= contraction):
        return CONVERGENT
    return INCONCLUSIVE


def verify_integrability(d, s, p, cutoffs=INNER_CUTOFFS, cauchy_tolerance=1e-6, logger=None):
    """
    Numerical evidence for G_s in L^{p'}(R^d), split at r = 2

    Args:
        d (int): Dimension
        s (Fraction): Kernel order, positive
        p (Exponent): The exponent whose conjugate is tested
        cutoffs (tuple): Decreasing inner cutoffs r0
        cauchy_tolerance (float): Relative tolerance for convergence

    Returns:
        IntegrabilityReport: Estimates, verdicts and, when convergent, ‖G_s‖_{L^{p'}}
    """
    log = logger or logging.getLogger(__name__)
    s = _exact(s)
    p = Exponent.of(p)
    if s <= 0:
        raise DomainError(f"kernel order must be positive, got {format_rational(s)}")
    if any(later >= earlier for earlier, later in zip(cutoffs, cutoffs[1:])):
        raise ConfigurationError("inner cutoffs must decrease")

    d = int(d)
    analytic = integrability_check(d, s, p)
    spec = RadialKernelSpec(float(s), d)
    conjugate = p.conjugate()
    omega = sphere_area(d)

    if conjugate.is_infinite:
        # sup-evaluation: G_s is radially decreasing
        estimates = [(r0, bessel_kernel(spec, r0)) for r0 in cutoffs]
        exponent = None
        far = None
    else:
        power = float(conjugate)
        edges = (FAR_FIELD_RADIUS,) + tuple(cutoffs)
        total = 0.0
        estimates = []
        for outer, inner in zip(edges, edges[1:]):
            piece, abserr = radial_integral(spec, power, inner, outer)
            total += piece
            estimates.append((inner, omega * total))
            if hasattr(log, "quadrature"):
                log.quadrature(f"G_{spec.s:g} d={d} [{inner:g}, {outer:g}]", piece, abserr)
        exponent = float((s - d) * conjugate.value + d - 1)
        far_value, _ = radial_integral(spec, power, FAR_FIELD_RADIUS, FAR_FIELD_CUTOFF)
        far = omega * far_value

    verdict = classify_estimates([value for _, value in estimates], cauchy_tolerance)
    norm = norm_error = None
    if verdict == CONVERGENT:
        norm, norm_error = kernel_lp_norm(spec, float(conjugate))

    agrees = verdict != INCONCLUSIVE and (verdict == CONVERGENT) == analytic
    return IntegrabilityReport(
        d=d,
        s=format_rational(s),
        p=str(p),
        analytic_verdict=analytic,
        near_field_class=str(near_field_class(spec)),
        near_field_exponent=exponent,
        quadrature_estimates=estimates,
        empirical_verdict=verdict,
        far_field_estimate=far,
        norm_estimate=norm,
        norm_error=norm_error,
        passed=agrees,
    )


def integrability_sweep():
    """
    Fixed (d, s, p) triples around the boundary s = d/p

    Returns:
        list: 50 triples covering s < d/p, s = d/p and s > d/p in every near-field class
    """
    triples = []
    for d in (1, 2, 3):
        for p in (Exponent(1), Exponent(Fraction(3, 2)), Exponent(2), Exponent(4)):
            threshold = d * p.reciprocal
            for s in (threshold / 2, threshold, threshold + Fraction(1, 2)):
                triples.append((d, s, p))
        for s in (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(5, 2)):
            triples.append((d, s, Exponent.infinity()))
    triples.append((1, Fraction(2), Exponent(2)))
    triples.append((2, Fraction(3), Exponent(Fraction(3, 2))))
    return triples


@dataclass
class ReproducingReport:
    """Pairing-versus-evaluation errors of the kernel reproducing identity"""

    d: int
    s: float
    grid: Dict[str, object]
    errors: List[Dict[str, object]]
    max_error: float
    rkhs_route_difference: Optional[float]
    discrepancy_budget: float
    tolerance: float
    passed: bool

    def to_dict(self):
        return asdict(self)


def _grid_dict(grid):
    return {"d": grid.d, "n": grid.n, "L": grid.L}


def verify_reproducing(d=1, s=1, grid=None, functions=None, points=None, tolerance=1e-8,
                       rkhs_route=True):
    """
    Check pairing(ψ, K_s(x, ·), s) = ψ(x) on test functions

    Args:
        d (int): Dimension
        s (float): Kernel order, 2s > d
        grid (GridSpec): Sampling grid, default from REPRODUCING_GRIDS
        functions (list): Test-function kinds; default a Gaussian and a band-limited wave
        points (list): Evaluation points; need not lie on the grid
        tolerance (float): Pass threshold for the maximal error
        rkhs_route (bool): Also compare with the H^{s,2} inner product ∫ J_{-s}K_x J_{-s}ψ

    Returns:
        ReproducingReport: Per-point errors and the maximum
    """
    s = float(s)
    grid = grid or _default_grid(REPRODUCING_GRIDS, d)
    if functions is None:
        functions = [Gaussian(1.0), Wave((3,) * grid.d, grid.L)]
    if points is None:
        points = [(0.0,) * grid.d, (1.0,) * grid.d, (-3.0,) * grid.d]

    errors = []
    rkhs_difference = 0.0 if rkhs_route else None
    for kind in functions:
        psi = test_function(kind, grid)
        potential_psi = bessel_potential(psi, MultiplierOrder(-s)) if rkhs_route else None
        for point in points:
            section = kernel_section(s, point, grid, method="spectral")
            paired = pairing(psi, section, s)
            exact = float(kind.evaluate(*[np.float64(c) for c in point]))
            errors.append({"function": repr(kind), "point": [float(c) for c in point],
                           "error": abs(paired - exact)})
            if rkhs_route:
                potential_section = bessel_potential(section, MultiplierOrder(-s))
                inner = grid.cell_volume * float(np.sum(potential_section.values * potential_psi.values))
                rkhs_difference = max(rkhs_difference, abs(inner - paired))

    max_error = max(entry["error"] for entry in errors)
    return ReproducingReport(
        d=grid.d,
        s=s,
        grid=_grid_dict(grid),
        errors=errors,
        max_error=max_error,
        rkhs_route_difference=rkhs_difference,
        discrepancy_budget=section_discrepancy_budget(s, grid),
        tolerance=tolerance,
        passed=max_error <= tolerance and (rkhs_difference is None or rkhs_difference <= 1e-10),
    )


def verify_reproducing_periodization(s=1, spacing=1 / 8, periods=(16.0, 32.0, 64.0), a=1 / 16,
                                     budget=DEFAULT_GRID_BUDGET):
    """
    Reproducing error at an off-grid point as the period grows at fixed spacing

    The Gaussian is sampled without the support check so that the short
    periods see its truncated tails.

    Returns:
        list: (L, error) pairs in the order of periods
    """
    results = []
    base = Gaussian(a)
    point = (spacing / 2.0,)
    exact = float(base.evaluate(np.float64(point[0])))
    for period in periods:
        grid = GridSpec(1, int(round(period / spacing)), period, budget=budget)
        psi = Field.from_function(grid, base.evaluate)
        section = kernel_section(s, point, grid, method="spectral")
        results.append((period, abs(pairing(psi, section, s) - exact)))
    return results


def _check_scales(scales, minimum_span=8.0):
    if len(scales) < 4:
        raise ConfigurationError("at least 4 scales are needed for a slope fit")
    if max(scales) / min(scales) < minimum_span:
        raise ConfigurationError(f"scales must span a factor of at least {minimum_span:g}")


def blowup_dilation(d=1, v=1, s=1, base=None, scales=GROWTH_SCALES, grid=None, tolerance=None,
                    max_workers=1):
    """
    Growth of ‖J_{v-2s} h_R‖_{L^1} for the dilations h_R(x) = φ(x/R)

    Returns:
        GrowthReport: Predicted slope d
    """
    base = base or Gaussian(1.0)
    _check_scales(scales)
    grid = grid or _default_grid(GROWTH_GRIDS, d)
    sigma = float(_exact(v) - 2 * _exact(s))
    tolerance = tolerance if tolerance is not None else (0.1 if grid.d == 1 else 0.15)

    def measure(R):
        h = test_function(Dilated(base, R), grid)
        return lp_norm(h, math.inf), lp_norm(bessel_potential(h, sigma), 1)

    measured = _map_points(measure, scales, max_workers)
    observations = [(R, norm) for R, (_, norm) in zip(scales, measured)]
    sup_error = max(abs(sup - 1.0) for sup, _ in measured)
    slope = fit_loglog_slope(observations)
    residual = abs(slope - grid.d)
    return GrowthReport(
        parameter="R",
        observations=observations,
        fitted_slope=slope,
        predicted_slope=float(grid.d),
        residual=residual,
        tolerance=tolerance,
        passed=residual <= tolerance and sup_error <= 1e-12,
        checks={"sup_deviation": sup_error},
        settings={"d": grid.d, "v": format_rational(_exact(v)), "s": format_rational(_exact(s)),
                  "grid": _grid_dict(grid)},
    )


def blowup_rescaled(d=1, u=1, v=1, s=1, p=2, base=None, scales=GROWTH_SCALES, grid=None,
                    tolerance=0.1, max_workers=1):
    """
    Growth of ‖J_{u+v-2s} h_n‖_{L^1} for h_n(x) = n^{-d/p} ψ(x/n), constant in L^p

    Returns:
        GrowthReport: Predicted slope d(1 - 1/p)
    """
    p = Exponent.of(p)
    if not p.is_interior():
        raise NotApplicable(f"the rescaled family needs p in (1, inf), got {p}")
    base = base or Gaussian(1.0)
    _check_scales(scales)
    grid = grid or _default_grid(GROWTH_GRIDS, d)
    sigma = float(_exact(u) + _exact(v) - 2 * _exact(s))
    exponent = float(p)

    def measure(n):
        h = test_function(Rescaled(base, n, exponent), grid)
        return lp_norm(h, exponent), lp_norm(bessel_potential(h, sigma), 1)

    measured = _map_points(measure, scales, max_workers)
    lp_norms = [norm for norm, _ in measured]
    constancy = max(lp_norms) / min(lp_norms) - 1.0
    observations = [(n, norm) for n, (_, norm) in zip(scales, measured)]
    slope = fit_loglog_slope(observations)
    predicted = grid.d * (1.0 - 1.0 / exponent)
    residual = abs(slope - predicted)
    return GrowthReport(
        parameter="n",
        observations=observations,
        fitted_slope=slope,
        predicted_slope=predicted,
        residual=residual,
        tolerance=tolerance,
        passed=residual <= tolerance and constancy <= 1e-6,
        checks={"lp_constancy": constancy},
        settings={"d": grid.d, "u": format_rational(_exact(u)), "v": format_rational(_exact(v)),
                  "s": format_rational(_exact(s)), "p": str(p), "grid": _grid_dict(grid)},
    )


def blowup_mollifier(d=1, u=Fraction(3, 2), v=1, s=1, q=2, base=None, scales=None,
                     grid=None, spot_radius=1.0, spot_tolerance=1e-4, max_workers=1):
    """
    Growth of ‖G_σ * h_ε‖_{L^{q'}} as ε decreases, σ = u + v - 2s in (0, d/q']

    The spot check compares (G_σ * h_ε)(r) with G_σ(r) at the finest ε and
    after eliminating the ε² term with the two finest scales; the better of
    the two must meet spot_tolerance.

    Returns:
        GrowthReport: Norms must increase strictly; no slope is predicted
    """
    q = Exponent.of(q)
    sigma = _exact(u) + _exact(v) - 2 * _exact(s)
    conjugate = q.conjugate()
    if not (0 < sigma <= int(d) * conjugate.reciprocal):
        raise NotApplicable(
            f"u + v - 2s = {format_rational(sigma)} is outside (0, d/q'] for q = {q}"
        )
    base = base or Gaussian(1.0)
    grid = grid or _default_grid(MOLLIFIER_GRIDS, d)
    if scales is None:
        scales = MOLLIFIER_DEFAULT_SCALES[grid.d]
    if len(scales) < 4:
        raise ConfigurationError("at least 4 scales are needed")
    if any(later >= earlier for earlier, later in zip(scales, scales[1:])):
        raise ConfigurationError("mollifier scales must decrease")
    if min(scales) < 4.0 * grid.spacing * (1.0 - 1e-12):
        raise ConfigurationError(
            f"smallest scale {min(scales):g} is below 4 spacings ({4.0 * grid.spacing:g})"
        )

    spot = (spot_radius,) + (0.0,) * (grid.d - 1)

    def measure(eps):
        h = test_function(Mollifier(base, eps), grid)
        smoothed = radial_convolution(h, float(sigma))
        return lp_norm(h, 1), lp_norm(smoothed, float(conjugate)), smoothed.value_at(spot)

    measured = _map_points(measure, scales, max_workers)
    observations = [(eps, norm) for eps, (_, norm, _) in zip(scales, measured)]
    mass_error = max(abs(mass - 1.0) for mass, _, _ in measured)
    norms = [norm for _, norm in observations]
    increasing = all(later > earlier for earlier, later in zip(norms, norms[1:]))

    exact = bessel_kernel(RadialKernelSpec(float(sigma), grid.d), spot_radius)
    coarse, fine = measured[-2][2], measured[-1][2]
    ratio = (scales[-2] / scales[-1]) ** 2
    spot_error = abs(fine - exact)
    extrapolated_error = abs((ratio * fine - coarse) / (ratio - 1.0) - exact)

    return GrowthReport(
        parameter="eps",
        observations=observations,
        fitted_slope=fit_loglog_slope(observations),
        predicted_slope=None,
        residual=None,
        tolerance=None,
        passed=(increasing and mass_error <= 1e-6
                and min(spot_error, extrapolated_error) <= spot_tolerance),
        checks={"mass_deviation": mass_error, "spot_error": spot_error,
                "extrapolated_spot_error": extrapolated_error,
                "strictly_increasing": float(increasing)},
        settings={"d": grid.d, "sigma": format_rational(sigma), "q": str(q),
                  "grid": _grid_dict(grid)},
    )


@dataclass
class YoungReport:
    """‖G_σ * f‖_{L^{q'}} against ‖G_σ‖_{L^{q'}} ‖f‖_{L^1} over random fields"""

    d: int
    sigma: str
    q: str
    kernel_norm: float
    kernel_norm_error: float
    fields: int
    violations: int
    max_ratio: float
    equality_gap: Optional[float]
    seed: int
    passed: bool

    def to_dict(self):
        return asdict(self)


def verify_young_bound(d=1, sigma=1, q=2, count=100, seed=7, grid=None, slack=1e-10,
                       nonnegative=False):
    """
    Young's inequality for the Bessel kernel on seeded Gaussian mixtures

    Args:
        d (int): Dimension
        sigma (Fraction): Kernel order, must exceed d/q
        q (Exponent): Exponent; the bound is in L^{q'}
        count (int): Number of random fields
        seed (int): Seed for the mixtures
        grid (GridSpec): Sampling grid
        slack (float): Absolute slack on top of the quadrature error
        nonnegative (bool): Draw nonnegative mixtures (equality case for q' = 1)

    Returns:
        YoungReport: Violation count and the largest lhs/rhs ratio
    """
    q = Exponent.of(q)
    sigma = _exact(sigma)
    if not sigma > int(d) * q.reciprocal:
        raise NotApplicable(f"sigma = {format_rational(sigma)} must exceed d/q for q = {q}")
    grid = grid or _default_grid(FIELD_GRIDS, d)
    kernel_report = verify_integrability(grid.d, sigma, q)
    if kernel_report.norm_estimate is None:
        raise NotApplicable("kernel norm quadrature did not converge")
    kernel_norm = kernel_report.norm_estimate
    kernel_error = kernel_report.norm_error or 0.0
    conjugate = float(q.conjugate())

    rng = np.random.default_rng(seed)
    violations = 0
    max_ratio = 0.0
    equality_gap = 0.0 if (nonnegative and math.isinf(float(q))) else None
    for _ in range(count):
        mixture = random_mixture(grid, rng, nonnegative=nonnegative)
        f = test_function(mixture, grid)
        mass = lp_norm(f, 1)
        lhs = lp_norm(bessel_potential(f, float(sigma)), conjugate)
        rhs = kernel_norm * mass
        if lhs > rhs + slack + kernel_error * mass:
            violations += 1
        ratio = lhs / rhs
        max_ratio = max(max_ratio, ratio)
        if equality_gap is not None:
            equality_gap = max(equality_gap, abs(ratio - 1.0))

    return YoungReport(
        d=grid.d,
        sigma=format_rational(sigma),
        q=str(q),
        kernel_norm=kernel_norm,
        kernel_norm_error=kernel_error,
        fields=count,
        violations=violations,
        max_ratio=max_ratio,
        equality_gap=equality_gap,
        seed=seed,
        passed=violations == 0 and (equality_gap is None or equality_gap <= 1e-8),
    )


@dataclass
class NormingReport:
    """Two code paths for ‖f‖_{H^{u,p}} = ‖f‖_{H^{2s-v,q'}} and a dual-bank lower bound"""

    d: int
    u: str
    v: str
    s: str
    p: str
    q: str
    fields: int
    max_relative_difference: float
    min_bank_ratio: float
    certificate_holds: bool
    perturbed_gap: float
    seed: int
    passed: bool

    def to_dict(self):
        return asdict(self)


def _composed_norm(field, orders, p):
    """‖J_{σ_1} ... J_{σ_k} f‖_{L^p} with the symbols multiplied before one inverse transform"""
    coefficients = dft(field).coefficients
    for order in orders:
        coefficients = coefficients * MultiplierOrder(order).symbol(field.grid)
    return lp_norm(idft(Spectrum(field.grid, coefficients)), p)


def _dual_bank(f, u, v, p, grid, rng, size):
    """Unit vectors of H^{v,p'}: the Hölder maximizer and random perturbations of it"""
    potential = bessel_potential(f, -u).values
    norm = lp_norm(Field(grid, potential), p)
    extremal = np.sign(potential) * np.abs(potential) ** (p - 1.0) / norm ** (p - 1.0)
    conjugate = p / (p - 1.0)

    bank = []
    for index in range(size):
        if index == 0:
            direction = extremal
        else:
            noise = test_function(random_mixture(grid, rng), grid).values
            scale = lp_norm(Field(grid, extremal), conjugate) / lp_norm(Field(grid, noise), conjugate)
            direction = extremal + rng.uniform(0.0, 1.0) * scale * noise
        unit = direction / lp_norm(Field(grid, direction), conjugate)
        bank.append(bessel_potential(Field(grid, unit), v))
    return bank


def verify_norming(d=1, u=3, p=2, s=2, count=100, seed=7, grid=None, bank_size=64,
                   gap_offset=Fraction(1, 10)):
    """
    Norming identity for v = 2s - u, q = p'

    Args:
        d (int): Dimension
        u (Fraction): Smoothness of the primal space
        p (Exponent): Exponent in (1, inf)
        s (Fraction): Kernel order
        count (int): Number of random fields
        seed (int): Seed for fields and the dual bank
        grid (GridSpec): Sampling grid
        bank_size (int): Dual fields per primal field
        gap_offset (Fraction): Perturbation u + v = 2s + offset for the gap check

    Returns:
        NormingReport: Path agreement, bank lower bound and the perturbed gap
    """
    p = Exponent.of(p)
    if not p.is_interior():
        raise NotApplicable(f"norming needs p in (1, inf), got {p}")
    u, s = _exact(u), _exact(s)
    v = 2 * s - u
    q = p.conjugate()
    if v <= 0 or not rkbs_pair_check(d, u, p, v, q, s).admissible:
        raise NotApplicable("(u, p, v = 2s - u, q = p') is not an admissible pair")

    grid = grid or _default_grid(FIELD_GRIDS, d)
    rng = np.random.default_rng(seed)
    exponent = float(p)
    max_difference = 0.0
    min_ratio = math.inf
    certificate = True
    for _ in range(count):
        f = test_function(random_mixture(grid, rng), grid)
        direct = bessel_norm(f, float(u), exponent)
        composed = _composed_norm(f, (float(v), -float(2 * s)), float(q.conjugate()))
        max_difference = max(max_difference, abs(direct - composed) / direct)

        bank = _dual_bank(f, float(u), float(v), exponent, grid, rng, bank_size)
        lower = max(abs(pairing(f, g, float(s))) for g in bank)
        certificate = certificate and lower <= direct * (1.0 + 1e-9)
        min_ratio = min(min_ratio, lower / direct)

    rough = test_function(Gaussian(1.0 / (8.0 * grid.spacing) ** 2), grid)
    perturbed_v = v + _exact(gap_offset)
    reference = bessel_norm(rough, float(u), exponent)
    gap = abs(reference - bessel_norm(rough, float(2 * s - perturbed_v), exponent)) / reference

    return NormingReport(
        d=grid.d,
        u=format_rational(u),
        v=format_rational(v),
        s=format_rational(s),
        p=str(p),
        q=str(q),
        fields=count,
        max_relative_difference=max_difference,
        min_bank_ratio=min_ratio,
        certificate_holds=certificate,
        perturbed_gap=gap,
        seed=seed,
        passed=(max_difference <= 1e-12 and certificate and gap > 1e-3
                and (exponent != 2.0 or min_ratio >= 0.9)),
    )


@dataclass
class SuiteResult:
    """Outcome of one named verification suite"""

    suite: str
    status: str
    seed: int
    reports: List[dict] = field(default_factory=list)
    observations: List[list] = field(default_factory=list)
    message: str = ""

    @property
    def passed(self):
        return self.status == STATUS_PASS

    def to_dict(self):
        return {
            "suite": self.suite,
            "status": self.status,
            "seed": self.seed,
            "message": self.message,
            "reports": self.reports,
        }


@dataclass(frozen=True)
class SuiteContext:
    """Run-wide settings every suite receives: seed, fan-out and grid limits"""

    seed: int = 7
    max_workers: int = 1
    budget: int = DEFAULT_GRID_BUDGET
    reference: Optional[GridSpec] = None


def _suite_grid(params, default, context):
    """Grid from n and L overrides on top of a default (points, period), under the budget"""
    d = _suite_dimension(params)
    n, period = default
    return GridSpec(d, int(params.get("n", n)), float(params.get("L", period)),
                    budget=context.budget)


def _suite_dimension(params):
    d = int(params.get("d", 1))
    if d not in (1, 2, 3):
        raise DomainError(f"dimension must be 1, 2 or 3, got {d}")
    return d


def _suite_reproducing(params, context):
    d = _suite_dimension(params)
    s = _exact(params.get("s", Fraction(d + 1, 2)))
    reference = context.reference
    if reference is not None and reference.d == d:
        grid = _suite_grid(params, (reference.n, reference.L), context)
    else:
        grid = _suite_grid(params, REPRODUCING_GRIDS[d], context)
    report = verify_reproducing(d, float(s), grid)
    reports = [report.to_dict()]
    passed = report.passed
    observations = [[entry["point"][0], entry["error"]] for entry in report.errors]
    if d == 1:
        periodization = verify_reproducing_periodization(float(s), budget=context.budget)
        errors = [error for _, error in periodization]
        decreasing = all(later < earlier or later <= 1e-14
                         for earlier, later in zip(errors, errors[1:]))
        reports.append({"periodization": [[L, error] for L, error in periodization],
                        "decreasing": decreasing})
        passed = passed and decreasing
    return passed, reports, observations


def _suite_integrability(params, context):
    if all(key in params for key in ("d", "s", "p")):
        triples = [(int(params["d"]), params["s"], params["p"])]
    else:
        triples = integrability_sweep()
    reports = _map_points(lambda triple: verify_integrability(*triple), triples,
                          context.max_workers)
    observations = [[report.d, report.s, report.p, int(report.analytic_verdict),
                     report.empirical_verdict] for report in reports]
    return all(report.passed for report in reports), [r.to_dict() for r in reports], observations


def _suite_blowup_dilation(params, context):
    d = _suite_dimension(params)
    report = blowup_dilation(d, params.get("v", 1), params.get("s", 1),
                             grid=_suite_grid(params, GROWTH_GRIDS[d], context),
                             max_workers=context.max_workers)
    return report.passed, [report.to_dict()], report.csv_rows()


def _suite_blowup_rescaled(params, context):
    d = _suite_dimension(params)
    grid = _suite_grid(params, GROWTH_GRIDS[d], context)
    exponents = [params["p"]] if "p" in params else [Exponent(2), Exponent(4)]
    reports = [blowup_rescaled(d, params.get("u", 1), params.get("v", 1), params.get("s", 1), p,
                               grid=grid, max_workers=context.max_workers)
               for p in exponents]
    observations = [row for report in reports for row in report.csv_rows()]
    return all(r.passed for r in reports), [r.to_dict() for r in reports], observations


def _suite_blowup_mollifier(params, context):
    d = _suite_dimension(params)
    report = blowup_mollifier(d, params.get("u", Fraction(3, 2)), params.get("v", 1),
                              params.get("s", 1), params.get("q", 2),
                              grid=_suite_grid(params, MOLLIFIER_GRIDS[d], context),
                              max_workers=context.max_workers)
    return report.passed, [report.to_dict()], report.csv_rows()


def _suite_young(params, context):
    d = _suite_dimension(params)
    grid = _suite_grid(params, FIELD_GRIDS[d], context)
    sigma = params.get("s", 1)
    count = int(params.get("fields", 100))
    if "q" in params:
        cases = [(params["q"], False)]
    else:
        cases = [(Exponent.infinity(), False), (Exponent.infinity(), True), (Exponent(2), False)]
    reports = [verify_young_bound(d, sigma, q, count=count, seed=context.seed + index, grid=grid,
                                  nonnegative=nonnegative)
               for index, (q, nonnegative) in enumerate(cases)]
    observations = [[r.q, r.fields, r.violations, r.max_ratio] for r in reports]
    return all(r.passed for r in reports), [r.to_dict() for r in reports], observations


def _suite_norming(params, context):
    d = _suite_dimension(params)
    report = verify_norming(d, params.get("u", 3), params.get("p", 2), params.get("s", 2),
                            count=int(params.get("fields", 100)), seed=context.seed,
                            grid=_suite_grid(params, FIELD_GRIDS[d], context))
    observations = [[report.max_relative_difference, report.min_bank_ratio, report.perturbed_gap]]
    return report.passed, [report.to_dict()], observations


SUITES = {
    "reproducing": _suite_reproducing,
    "integrability": _suite_integrability,
    "blowup-dilation": _suite_blowup_dilation,
    "blowup-rescaled": _suite_blowup_rescaled,
    "blowup-mollifier": _suite_blowup_mollifier,
    "young": _suite_young,
    "norming": _suite_norming,
}


def run_suite(name, params=None, seed=7, logger=None, max_workers=1, budget=DEFAULT_GRID_BUDGET,
              reference=None):
    """
    Run one verification suite

    Args:
        name (str): A key of SUITES
        params (dict): Parsed overrides (d, u, v, s as Fractions, p, q as Exponents, L, n, fields)
        seed (int): Seed for every random draw in the suite
        logger (Logger): Optional run logger
        max_workers (int): Threads for independent parameter points
        budget (int): Largest n^d of any grid the suite builds
        reference (GridSpec): Default grid of the reproducing suite in its dimension

    Returns:
        SuiteResult: Status "pass", "fail" or "not-applicable" with the reports
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(sorted(SUITES))}")
    params = dict(params or {})
    context = SuiteContext(seed, max_workers, budget, reference)
    if logger:
        logger.experiment_start(name, {**params, "seed": seed})

    start = time.perf_counter()
    try:
        passed, reports, observations = SUITES[name](params, context)
        result = SuiteResult(name, STATUS_PASS if passed else STATUS_FAIL, seed,
                             reports, observations)
    except NotApplicable as e:
        result = SuiteResult(name, STATUS_NOT_APPLICABLE, seed, message=str(e))
    elapsed = time.perf_counter() - start

    if logger:
        logger.experiment_result(name, result.passed, elapsed)
    else:
        logging.getLogger(__name__).info(f"Suite {name}: {result.status} ({elapsed:.2f}s)")
    return result


def run_all(seed=7, logger=None, max_workers=4, budget=DEFAULT_GRID_BUDGET, reference=None):
    """
    Run every suite with its defaults, fanned out over a thread pool

    Returns:
        list: SuiteResult per suite, sorted by suite name
    """
    names = sorted(SUITES)
    results = _map_points(lambda name: run_suite(name, seed=seed, logger=logger, budget=budget,
                                                 reference=reference),
                          names, max_workers)
    return sorted(results, key=lambda result: result.suite)
