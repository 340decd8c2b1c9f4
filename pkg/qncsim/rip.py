#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
"""
    Tail probabilities of ||Psi_tot x||^2 and restricted isometry bounds.

    For a fixed unit direction x, ||Psi_tot x||^2 is distributed as a weighted sum of
    independent one degree of freedom chi-square variables, the weights being the
    eigenvalues of Gamma(x) = sigma_alpha^2 D_x Omega^T Omega D_x. Its tail
    P(| ||Psi_tot x||^2 - 1 | >= eps) is evaluated by inverting the characteristic function.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from qncsim.exception import ConfigException, ConvergenceException, DimensionException, SpectrumException
from scipy import integrate, linalg, special, stats
import logging
import math
import numpy as np

__all__ = [
    "GammaMatrix", "TailSpectrum", "TailQuery", "RipBound", "SearchBudget",
    "build_gamma", "eigen_spectrum", "spectrum_for_direction",
    "tail_probability_weighted_chisq", "tail_probability_gaussian", "tail_probability_chisq",
    "tail_probability_monte_carlo", "tail_probability_alpha_draws",
    "worst_case_tail", "rip_lower_bound", "rip_bound"
]
logger = logging.getLogger('qncsim.rip')

# Covering constant of the RIP bound: (COVERING/delta)^k
COVERING        = 42.0

# Quadrature parameters
PANEL_TOLERANCE = 1e-10
TRUNCATION      = 1e-9
MAX_BISECTIONS  = 40
START_CUTOFF    = 8 * math.pi
MAX_CUTOFF      = 256 * math.pi
MC_CHUNK        = 100000

_GL20 = np.polynomial.legendre.leggauss(20)
_GL10 = np.polynomial.legendre.leggauss(10)

@dataclass(frozen=True)
class GammaMatrix:
    entries: np.ndarray

@dataclass(frozen=True)
class TailSpectrum:
    """ Eigenvalues of Gamma(x), descending, sigma_alpha^2 included """
    lambdas: np.ndarray

    def __post_init__(self):
        lambdas = np.asarray(self.lambdas, dtype=float)
        if lambdas.ndim != 1:
            msg = 'Spectrum must be a vector, got shape %s' % (lambdas.shape,)
            logger.error ( msg )
            raise DimensionException(msg)
        if np.any(lambdas < 0):
            msg = 'Spectrum has negative values: %r' % lambdas[lambdas < 0]
            logger.error ( msg )
            raise SpectrumException(msg)
        object.__setattr__(self, 'lambdas', lambdas)

@dataclass(frozen=True)
class TailQuery:
    epsilon: float
    tolerance: float = 1e-8

    def __post_init__(self):
        if not self.epsilon > 0:
            msg = 'Deviation threshold must be positive, got %r' % self.epsilon
            logger.error ( msg )
            raise ConfigException(msg)
        if not self.tolerance > 0:
            msg = 'Quadrature tolerance must be positive, got %r' % self.tolerance
            logger.error ( msg )
            raise ConfigException(msg)

@dataclass(frozen=True)
class RipBound:
    n: int
    k: int
    delta_k: float
    p_tail: float
    p_rip: float

    @property
    def vacuous(self):
        return self.p_rip == 0.0

@dataclass(frozen=True)
class SearchBudget:
    """
        Worst-case direction search: the n canonical directions plus random_starts random
        unit vectors are evaluated, then the refine best ones are improved by coordinate
        ascent on the sphere, halving the step from initial_step down to min_step.
    """
    random_starts: int = 512
    refine: int = 4
    max_sweeps: int = 50
    initial_step: float = 0.5
    min_step: float = 1.0 / 64
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.random_starts < 0 or self.refine < 0 or self.max_sweeps < 1 or self.workers < 1:
            msg = 'Invalid search budget %r' % (self,)
            logger.error ( msg )
            raise ConfigException(msg)
        if not 0 < self.min_step <= self.initial_step:
            msg = 'Search steps must satisfy 0 < min_step <= initial_step, got %r' % (self,)
            logger.error ( msg )
            raise ConfigException(msg)

def _checkDirection(g, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n,):
        msg = 'Direction has shape %s, expected (%d,)' % (x.shape, g.n)
        logger.error ( msg )
        raise DimensionException(msg)
    if abs(np.linalg.norm(x) - 1.0) > 1e-12:
        msg = 'Direction must have unit norm, got %r' % np.linalg.norm(x)
        logger.error ( msg )
        raise ConfigException(msg)
    return x

def build_gamma(omega, x, g, sigma_alpha_sq):
    """ Gamma(x) = sigma_alpha^2 D_x Omega^T Omega D_x with D_x = diag(x_tail(e)) """
    x = _checkDirection(g, x)
    if omega.shape[1] != g.edge_count:
        msg = 'Omega has %d columns for %d edges' % (omega.shape[1], g.edge_count)
        logger.error ( msg )
        raise DimensionException(msg)
    scaled = omega * x[g.tails-1][None, :]
    gamma = sigma_alpha_sq * (scaled.T @ scaled)
    return GammaMatrix(0.5 * (gamma + gamma.T))

def eigen_spectrum(gamma):
    entries = gamma.entries if isinstance(gamma, GammaMatrix) else np.asarray(gamma, dtype=float)
    scale = max(1.0, float(np.max(np.abs(entries)))) if entries.size else 1.0
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or not np.allclose(entries, entries.T, rtol=0, atol=1e-12*scale):
        msg = 'Gamma must be a symmetric square matrix'
        logger.error ( msg )
        raise SpectrumException(msg)
    lambdas = linalg.eigh(entries, eigvals_only=True)
    if lambdas.size and lambdas[0] < -1e-10:
        msg = 'Gamma has a negative eigenvalue %r' % lambdas[0]
        logger.error ( msg )
        raise SpectrumException(msg)
    return TailSpectrum(np.clip(lambdas, 0.0, None)[::-1])

def spectrum_for_direction(omega, g, x, sigma_alpha_sq):
    """ Same spectrum as eigen_spectrum(build_gamma(...)), from the singular values of Omega D_x """
    x = _checkDirection(g, x)
    singular = linalg.svdvals(omega * x[g.tails-1][None, :])
    lambdas = np.zeros(g.edge_count)
    lambdas[:singular.size] = sigma_alpha_sq * np.square(singular)
    return TailSpectrum(lambdas)

# Characteristic function of sum w_i lambda_i chi2_1: r(w) exp(j theta(w)).
def _modulusPhase(omega, lambdas, weights):
    scaled = 2.0 * np.multiply.outer(omega, lambdas)
    r = np.exp(-0.25 * (np.log1p(np.square(scaled)) @ weights))
    theta = 0.5 * (np.arctan(scaled) @ weights)
    return r, theta

def _integrand(omega, lambdas, weights, eps):
    r, theta = _modulusPhase(omega, lambdas, weights)
    return r * np.cos(theta - omega) * eps * np.sinc(eps * omega / math.pi)

def _truncation(cutoff, lambdas, weights):
    """ Bound of (2/pi) |integral beyond cutoff| from the power decay of r """
    r, _ = _modulusPhase(np.array([cutoff]), lambdas, weights)
    scaled = np.square(2.0 * cutoff * lambdas)
    decay = 0.5 * float(np.sum(weights * scaled / (1.0 + scaled)))
    return 2.0 / math.pi * float(r[0]) / decay

def _panels(lambdas, weights, eps, cutoff, tolerance):
    """ Adaptive Gauss-Legendre on [0, cutoff], all panels of one level evaluated at once """
    frequency = 1.0 + eps + float(np.sum(weights * lambdas))
    count = max(1, int(math.ceil(cutoff * frequency / math.pi)))
    edges = np.linspace(0.0, cutoff, count + 1)
    left, right = edges[:-1], edges[1:]
    total = error = 0.0
    for level in range(MAX_BISECTIONS):
        half, mid = 0.5 * (right - left), 0.5 * (right + left)
        fine = _integrand(mid[:, None] + half[:, None] * _GL20[0][None, :], lambdas, weights, eps) @ _GL20[1] * half
        coarse = _integrand(mid[:, None] + half[:, None] * _GL10[0][None, :], lambdas, weights, eps) @ _GL10[1] * half
        diff = np.abs(fine - coarse)
        done = diff <= tolerance * (right - left) / cutoff
        total += float(np.sum(fine[done]))
        error += float(np.sum(diff[done]))
        if done.all():
            return total, error
        left, right = left[~done], right[~done]
        middle = 0.5 * (left + right)
        left, right = np.concatenate([left, middle]), np.concatenate([middle, right])
    msg = 'Panel quadrature did not converge after %d bisections' % MAX_BISECTIONS
    logger.error ( msg )
    raise ConvergenceException(msg)

def _oscillatoryTail(lambdas, weights, eps, cutoff, tolerance):
    """
        Integral of the integrand over [cutoff, inf) as Fourier integrals of smooth
        envelopes, g_c = r cos(theta)/(2w) and g_s = r sin(theta)/(2w):
        f = g_c sin((1+eps)w) - g_s cos((1+eps)w) + g_s cos((1-eps)w) - g_c sin((1-eps)w)
    """
    def envelope(w, part):
        r, theta = _modulusPhase(np.array([w]), lambdas, weights)
        return float(r[0] * (np.cos(theta[0]) if part == 'c' else np.sin(theta[0]))) / (2.0 * w)
    gc = lambda w: envelope(w, 'c')
    gs = lambda w: envelope(w, 's')

    terms = [ integrate.quad(gc, cutoff, np.inf, weight='sin', wvar=1.0 + eps, epsabs=tolerance),
              integrate.quad(gs, cutoff, np.inf, weight='cos', wvar=1.0 + eps, epsabs=tolerance) ]
    signs = [ 1.0, -1.0 ]
    low = 1.0 - eps
    if low == 0.0:
        terms.append(integrate.quad(gs, cutoff, np.inf, epsabs=tolerance, limit=200))
        signs.append(1.0)
    else:
        terms.append(integrate.quad(gs, cutoff, np.inf, weight='cos', wvar=abs(low), epsabs=tolerance))
        terms.append(integrate.quad(gc, cutoff, np.inf, weight='sin', wvar=abs(low), epsabs=tolerance))
        signs.extend([ 1.0, -1.0 if low > 0 else 1.0 ])
    value = sum(s * t[0] for s, t in zip(signs, terms))
    error = sum(t[1] for t in terms)
    return value, error

def _tail(lambdas, weights, q):
    lambdas = np.asarray(lambdas, dtype=float)
    weights = np.asarray(weights, dtype=float)
    keep = lambdas > 0
    lambdas, weights = lambdas[keep], weights[keep]
    eps = float(q.epsilon)
    if lambdas.size == 0:
        return 1.0 if eps <= 1.0 else 0.0

    cutoff = START_CUTOFF
    while _truncation(cutoff, lambdas, weights) > TRUNCATION and cutoff < MAX_CUTOFF:
        cutoff *= 2.0
    body, error = _panels(lambdas, weights, eps, cutoff, PANEL_TOLERANCE)
    truncation = _truncation(cutoff, lambdas, weights)
    if truncation > TRUNCATION:
        tail, tail_error = _oscillatoryTail(lambdas, weights, eps, cutoff, TRUNCATION * math.pi / 2)
        body += tail
        error += tail_error
    else:
        error += truncation * math.pi / 2
    error *= 2.0 / math.pi
    if error > q.tolerance:
        msg = 'Tail probability quadrature error %.3g above %.3g (eps=%g, %d weights)' % (error, q.tolerance, eps, lambdas.size)
        logger.error ( msg )
        raise ConvergenceException(msg)
    return min(1.0, max(0.0, 1.0 - 2.0 / math.pi * body))

def tail_probability_weighted_chisq(spectrum, q):
    """ P(|sum lambda_e chi2_e - 1| >= eps) """
    lambdas = spectrum.lambdas if isinstance(spectrum, TailSpectrum) else TailSpectrum(spectrum).lambdas
    if lambdas.size == 0:
        msg = 'Empty spectrum'
        logger.error ( msg )
        raise DimensionException(msg)
    return _tail(lambdas, np.ones_like(lambdas), q)

def tail_probability_gaussian(m, q):
    """ Tail of ||Phi x||^2 for an m-row i.i.d. N(0, 1/m) matrix, the same for every unit x """
    if int(m) != m or m < 1:
        msg = 'Measurement count must be a positive integer, got %r' % m
        logger.error ( msg )
        raise ConfigException(msg)
    return _tail([ 1.0 / m ], [ float(m) ], q)

def tail_probability_chisq(m, epsilon):
    """ Closed form of tail_probability_gaussian: chi2_m / m outside [1-eps, 1+eps] """
    upper = stats.chi2.sf(m * (1.0 + epsilon), m)
    lower = stats.chi2.cdf(m * (1.0 - epsilon), m) if epsilon < 1.0 else 0.0
    return float(upper + lower)

def _monteCarlo(draw, sample_count, epsilon, seed):
    if sample_count < 10000:
        msg = 'Monte Carlo needs at least 10^4 samples, got %r' % sample_count
        logger.error ( msg )
        raise ConfigException(msg)
    rng = np.random.default_rng(seed)
    hits = done = 0
    while done < sample_count:
        size = min(MC_CHUNK, sample_count - done)
        hits += int(np.count_nonzero(np.abs(draw(rng, size) - 1.0) >= epsilon))
        done += size
    estimate = hits / sample_count
    return estimate, math.sqrt(estimate * (1.0 - estimate) / sample_count)

def tail_probability_monte_carlo(spectrum, q, sample_count, seed):
    """ Returns (estimate, binomial standard error) of the weighted chi-square tail """
    lambdas = spectrum.lambdas[spectrum.lambdas > 0]
    return _monteCarlo(lambda rng, size: np.square(rng.standard_normal((size, lambdas.size))) @ lambdas,
                       sample_count, q.epsilon, seed)

def tail_probability_alpha_draws(omega, g, sigma_alpha_sq, x, q, sample_count, seed):
    """ Returns (estimate, standard error) of P(| ||Psi_tot x||^2 - 1 | >= eps) over draws of A(2) """
    x = _checkDirection(g, x)
    scaled = omega * x[g.tails-1][None, :]
    sigma = math.sqrt(sigma_alpha_sq)
    return _monteCarlo(lambda rng, size: np.sum(np.square((sigma * rng.standard_normal((size, g.edge_count))) @ scaled.T), axis=1),
                       sample_count, q.epsilon, seed)

def _start(index, n, seed):
    if index < n:
        x = np.zeros(n)
        x[index] = 1.0
        return x
    x = np.random.default_rng([seed, index]).standard_normal(n)
    return x / np.linalg.norm(x)

def _refine(evaluate, x, value, budget):
    """ Coordinate ascent on the sphere, first improving move taken """
    step = budget.initial_step
    for sweep in range(budget.max_sweeps):
        improved = False
        for v in range(x.size):
            for sign in (1.0, -1.0):
                candidate = x.copy()
                candidate[v] += sign * step
                norm = np.linalg.norm(candidate)
                if norm == 0.0:
                    continue
                candidate /= norm
                p = evaluate(candidate)
                if p > value:
                    x, value, improved = candidate, p, True
                    break
        if not improved:
            step /= 2.0
            if step < budget.min_step:
                break
    return x, value

def worst_case_tail(omega, g, sigma_alpha_sq, q, budget=None):
    """
        Largest tail probability over unit directions found by multi-start search.
        Returns (p_tail, x); p_tail is a lower bound of the true maximum.
    """
    budget = budget or SearchBudget()
    def evaluate(x):
        return tail_probability_weighted_chisq(spectrum_for_direction(omega, g, x, sigma_alpha_sq), q)

    starts = [ _start(i, g.n, budget.seed) for i in range(g.n + budget.random_starts) ]
    if budget.workers > 1:
        with ThreadPoolExecutor(max_workers=budget.workers) as pool:
            values = list(pool.map(evaluate, starts))
            order = sorted(range(len(starts)), key=lambda i: (-values[i], i))[:budget.refine]
            refined = list(pool.map(lambda i: _refine(evaluate, starts[i], values[i], budget), order))
    else:
        values = [ evaluate(x) for x in starts ]
        order = sorted(range(len(starts)), key=lambda i: (-values[i], i))[:budget.refine]
        refined = [ _refine(evaluate, starts[i], values[i], budget) for i in order ]
    results = dict( (i, (values[i], starts[i])) for i in range(len(starts)) )
    for i, (x, value) in zip(order, refined):
        results[i] = (value, x)
    best = min(results, key=lambda i: (-results[i][0], i))
    p_tail, x = results[best]
    logger.debug ( 'Worst-case tail %.6g at candidate %d of %d (eps=%g)', p_tail, best, len(starts), q.epsilon );
    return p_tail, x

def rip_lower_bound(p_tail, n, k, delta_k):
    """
        Lower bound of the probability that the matrix satisfies RIP of order k with
        constant delta_k: 1 - C(n,k) (42/delta_k)^k p_tail, p_tail taken at eps = delta_k/sqrt(2).
        Zero when the bound is vacuous.
    """
    if not 0.0 < delta_k < 1.0:
        msg = 'RIP constant must lie in (0,1), got %r' % delta_k
        logger.error ( msg )
        raise ConfigException(msg)
    if not 1 <= k <= n:
        msg = 'Sparsity %r outside 1..%d' % (k, n)
        logger.error ( msg )
        raise ConfigException(msg)
    if not 0.0 <= p_tail <= 1.0:
        msg = 'Tail probability %r outside [0,1]' % p_tail
        logger.error ( msg )
        raise ConfigException(msg)
    if p_tail == 0.0:
        return 1.0
    log_union = special.gammaln(n + 1) - special.gammaln(k + 1) - special.gammaln(n - k + 1) \
              + k * math.log(COVERING / delta_k) + math.log(p_tail)
    if log_union >= 0.0:
        return 0.0
    return float(-math.expm1(log_union))

def rip_bound(p_tail, n, k, delta_k):
    return RipBound(n, k, delta_k, p_tail, rip_lower_bound(p_tail, n, k, delta_k))
