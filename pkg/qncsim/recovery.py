#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
"""
    Sparse messages and l1-min decoding:

        minimize ||s||_1  subject to  ||theta s - z||_2 <= eps_n

    solved by a primal-dual proximal iteration. Each check point repairs the iterate
    into a feasible point, polishes it on its support, and stops once the duality gap
    with the best dual point found certifies the objective.
"""
from dataclasses import dataclass
from qncsim.exception import ConfigException, ConvergenceException, DimensionException, InfeasibleProblem, NumericalException
from qncsim.grammar.matrix import MatrixGrammar
from scipy import linalg, optimize
from typing import Optional
import logging
import math
import numpy as np

__all__ = [
    "SparseSignal", "SparsifyingBasis", "RecoveryProblem", "DecodeInfo", "RecoveryMetrics",
    "generate_sparse_message", "random_orthonormal_basis", "gaussian_sensing_matrix",
    "l1_min_decode", "l1_min_decode_with_info", "l1_min_oracle", "recovery_report",
    "save_problem", "load_problem"
]
logger = logging.getLogger('qncsim.recovery')

LAWS           = ( 'rademacher', 'gaussian' )
MAX_ITERATIONS = 100000
CHECK_EVERY    = 25

@dataclass(frozen=True)
class SparseSignal:
    s: np.ndarray
    k: int
    support: np.ndarray
    law: str

@dataclass(frozen=True)
class SparsifyingBasis:
    phi: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
            msg = 'Basis must be square, got shape %s' % (phi.shape,)
            logger.error ( msg )
            raise DimensionException(msg)
        if np.max(np.abs(phi.T @ phi - np.eye(phi.shape[0]))) > 1e-10:
            msg = 'Basis is not orthonormal'
            logger.error ( msg )
            raise ConfigException(msg)
        object.__setattr__(self, 'phi', phi)

@dataclass(frozen=True)
class RecoveryProblem:
    z: np.ndarray
    theta: np.ndarray
    noise_radius: float = 0.0
    s_true: Optional[np.ndarray] = None

    def __post_init__(self):
        z, theta = np.asarray(self.z, dtype=float), np.asarray(self.theta, dtype=float)
        if theta.ndim != 2 or z.shape != (theta.shape[0],):
            msg = 'Measurements of shape %s do not match a %s sensing matrix' % (z.shape, theta.shape)
            logger.error ( msg )
            raise DimensionException(msg)
        if not self.noise_radius >= 0:
            msg = 'Noise radius must be nonnegative, got %r' % self.noise_radius
            logger.error ( msg )
            raise ConfigException(msg)
        object.__setattr__(self, 'z', z)
        object.__setattr__(self, 'theta', theta)

@dataclass(frozen=True)
class DecodeInfo:
    iterations: int
    gap: float
    residual: float
    polished: bool

@dataclass(frozen=True)
class RecoveryMetrics:
    error: float
    message_error: float
    precision: float
    recall: float
    sdr_db: float

    def record(self):
        return dict(error=self.error, message_error=self.message_error, precision=self.precision,
                    recall=self.recall, sdr_db=self.sdr_db)

def generate_sparse_message(n, k, law='rademacher', seed=None):
    """ k-sparse vector: support uniform over the k-subsets of 0..n-1, nonzeros i.i.d. by law """
    if not 0 <= k <= n:
        msg = 'Sparsity %r outside 0..%d' % (k, n)
        logger.error ( msg )
        raise ConfigException(msg)
    if law not in LAWS:
        msg = 'Unknown nonzero law "%s"' % law
        logger.error ( msg )
        raise ConfigException(msg)
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(n, size=k, replace=False))
    s = np.zeros(n)
    s[support] = rng.choice([-1.0, 1.0], size=k) if law == 'rademacher' else rng.standard_normal(k)
    return SparseSignal(s, k, support, law)

def random_orthonormal_basis(n, seed=None, kind='random'):
    if n < 1:
        msg = 'Basis dimension must be positive, got %r' % n
        logger.error ( msg )
        raise ConfigException(msg)
    if kind == 'identity':
        return SparsifyingBasis(np.eye(n))
    if kind != 'random':
        msg = 'Unknown basis kind "%s"' % kind
        logger.error ( msg )
        raise ConfigException(msg)
    q, r = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, n)))
    return SparsifyingBasis(q * np.sign(np.diag(r)))

def gaussian_sensing_matrix(m, n, seed=None):
    """ i.i.d. N(0, 1/m) entries """
    return np.random.default_rng(seed).standard_normal((m, n)) / math.sqrt(m)

def _project(u, z, radius):
    offset = u - z
    norm = np.linalg.norm(offset)
    return u if norm <= radius else z + offset * (radius / norm)

class _Certificate:
    """ Best feasible primal point and best dual value seen so far """

    def __init__(self, theta, z, radius, slack):
        self.theta, self.z, self.radius, self.slack = theta, z, radius, slack
        self.s = None
        self.objective = math.inf
        self.dual = -math.inf
        self.polished = False

    def residual(self, s):
        return float(np.linalg.norm(self.theta @ s - self.z))

    def offer_primal(self, s, polished=False):
        if s is None or self.residual(s) > self.radius + self.slack:
            return
        objective = float(np.sum(np.abs(s)))
        if objective < self.objective:
            self.s, self.objective, self.polished = s, objective, polished

    def offer_dual(self, y):
        if y is None or not np.all(np.isfinite(y)):
            return
        scale = max(1.0, float(np.max(np.abs(self.theta.T @ y))))
        y = y / scale
        self.dual = max(self.dual, float(-(self.z @ y) - self.radius * np.linalg.norm(y)))

    @property
    def gap(self):
        return self.objective - self.dual

def _repair(cert, s, s_ls):
    """ Closest point to s on the segment towards the least squares point inside the radius """
    target = cert.radius + 0.5 * cert.slack
    if cert.residual(s) <= target:
        return s
    low, high = 0.0, 1.0
    for i in range(60):
        middle = 0.5 * (low + high)
        if cert.residual(s + middle * (s_ls - s)) <= target:
            high = middle
        else:
            low = middle
    return s + high * (s_ls - s)

def _polish(cert, s):
    """
        Solves the problem restricted to the support and signs of s. Returns
        (primal, dual) candidates, None when the support does not fit.
    """
    scale = float(np.max(np.abs(s))) if s.size else 0.0
    support = np.flatnonzero(np.abs(s) > 1e-10 * scale) if scale > 0 else np.array([], dtype=int)
    if support.size == 0 or support.size > cert.theta.shape[0]:
        return None, None
    a = cert.theta[:, support]
    signs = np.sign(s[support])
    gram = a.T @ a
    try:
        factor = linalg.cho_factor(gram)
    except linalg.LinAlgError:
        return None, None
    base = linalg.cho_solve(factor, a.T @ cert.z)
    drift = linalg.cho_solve(factor, signs)
    def residual(mu):
        return float(np.linalg.norm(a @ (base - mu * drift) - cert.z))

    if residual(0.0) > cert.radius + cert.slack:
        return None, None
    if residual(0.0) >= cert.radius:
        mu = 0.0
        dual = -a @ drift
    else:
        high = 1.0
        while residual(high) < cert.radius:
            high *= 2.0
            if high > 1e12:
                return None, None
        mu = optimize.brentq(lambda value: residual(value) - cert.radius, 0.0, high, xtol=1e-14)
        dual = (a @ (base - mu * drift) - cert.z) / mu
    polished = base - mu * drift
    if np.any(np.sign(polished) != signs):
        return None, dual
    primal = np.zeros_like(s)
    primal[support] = polished
    return primal, dual

def _projectDual(cert, y, s):
    """ Moves y onto {theta_S^T y = -sign(s_S)} for the support S of s """
    scale = float(np.max(np.abs(s))) if s.size else 0.0
    if scale == 0:
        return None
    support = np.flatnonzero(np.abs(s) > 1e-10 * scale)
    a = cert.theta[:, support]
    try:
        correction = linalg.lstsq(a.T, a.T @ y + np.sign(s[support]))[0]
    except (linalg.LinAlgError, ValueError):
        return None
    return y - correction

def l1_min_decode_with_info(p, tol=1e-8, max_iterations=MAX_ITERATIONS):
    """ Returns (estimate, DecodeInfo) """
    theta, z, radius = p.theta, p.z, float(p.noise_radius)
    m, n = theta.shape
    if not np.any(theta):
        msg = 'Sensing matrix is zero'
        logger.error ( msg )
        raise ConfigException(msg)
    if np.linalg.norm(z) <= radius:
        logger.debug ( 'Measurements inside the noise ball, zero estimate' );
        return np.zeros(n), DecodeInfo(0, 0.0, float(np.linalg.norm(z)), False)

    s_ls = linalg.lstsq(theta, z)[0]
    cert = _Certificate(theta, z, radius, tol)
    if cert.residual(s_ls) > radius + tol:
        msg = 'Noise radius %.6g is below the smallest achievable residual %.6g' % (radius, cert.residual(s_ls))
        logger.error ( msg )
        raise InfeasibleProblem(msg)
    cert.offer_primal(s_ls)

    step = 0.99 / linalg.norm(theta, 2)
    s = np.zeros(n)
    s_bar = s
    y = np.zeros(m)
    for iteration in range(1, max_iterations+1):
        v = y + step * (theta @ s_bar)
        y = v - step * _project(v / step, z, radius)
        u = s - step * (theta.T @ y)
        s_new = np.sign(u) * np.maximum(np.abs(u) - step, 0.0)
        s_bar = 2.0 * s_new - s
        s = s_new
        if iteration % CHECK_EVERY:
            continue
        cert.offer_primal(_repair(cert, s, s_ls))
        cert.offer_dual(y)
        for candidate in (s, cert.s):
            primal, dual = _polish(cert, candidate)
            cert.offer_primal(primal, polished=True)
            cert.offer_dual(dual)
            cert.offer_dual(_projectDual(cert, y, candidate))
        if cert.gap <= tol * (1.0 + cert.objective):
            logger.debug ( 'l1-min decode converged in %d iterations, gap %.3g', iteration, cert.gap );
            return cert.s, DecodeInfo(iteration, cert.gap, cert.residual(cert.s), cert.polished)

    msg = 'l1-min decoder did not converge in %d iterations, gap %.3g' % (max_iterations, cert.gap)
    logger.error ( msg )
    raise ConvergenceException(msg)

def l1_min_decode(p, tol=1e-8):
    return l1_min_decode_with_info(p, tol)[0]

def l1_min_oracle(p):
    """ Exact basis pursuit for a zero noise radius, by linear programming """
    if p.noise_radius != 0:
        msg = 'Linear programming oracle only handles a zero noise radius'
        logger.error ( msg )
        raise ConfigException(msg)
    m, n = p.theta.shape
    result = optimize.linprog(np.ones(2*n), A_eq=np.hstack([p.theta, -p.theta]), b_eq=p.z,
                              bounds=(0, None), method='highs')
    if result.status == 2:
        msg = 'Linear program is infeasible: %s' % result.message
        logger.error ( msg )
        raise InfeasibleProblem(msg)
    if result.status != 0:
        msg = 'Linear program failed: %s' % result.message
        logger.error ( msg )
        raise NumericalException(msg)
    return result.x[:n] - result.x[n:]

def recovery_report(s_hat, s_true, phi=None, support_tol=1e-6):
    s_hat, s_true = np.asarray(s_hat, dtype=float), np.asarray(s_true, dtype=float)
    if s_hat.shape != s_true.shape:
        msg = 'Estimate of shape %s for a signal of shape %s' % (s_hat.shape, s_true.shape)
        logger.error ( msg )
        raise DimensionException(msg)
    phi = np.eye(s_true.size) if phi is None else (phi.phi if isinstance(phi, SparsifyingBasis) else phi)
    error = float(np.linalg.norm(s_hat - s_true))
    found = set(np.flatnonzero(np.abs(s_hat) > support_tol * max(1.0, float(np.max(np.abs(s_true), initial=0.0)))))
    actual = set(np.flatnonzero(s_true))
    hits = len(found & actual)
    signal = float(np.linalg.norm(s_true))
    if error == 0.0:
        sdr = math.inf
    elif signal == 0.0:
        sdr = -math.inf
    else:
        sdr = 20.0 * math.log10(signal / error)
    return RecoveryMetrics(
        error, float(np.linalg.norm(phi @ (s_hat - s_true))),
        hits / len(found) if found else 1.0,
        hits / len(actual) if actual else 1.0,
        sdr
    )

def save_problem(p, path):
    blocks = [ ('noise_radius', [[ p.noise_radius ]]), ('z', p.z), ('theta', p.theta) ]
    if p.s_true is not None:
        blocks.append(('s_true', p.s_true))
    with open(path, 'w') as f:
        f.write('\n'.join(MatrixGrammar().build('qncsim recovery problem', blocks)) + '\n')

def load_problem(path):
    with open(path, 'r') as f:
        blocks = MatrixGrammar().parse(f)
    try:
        return RecoveryProblem(blocks['z'][:, 0], blocks['theta'], float(blocks['noise_radius'][0, 0]),
                               blocks['s_true'][:, 0] if 's_true' in blocks else None)
    except KeyError as exc:
        msg = 'Incomplete recovery problem file %s: missing %s' % (path, exc)
        logger.error ( msg )
        raise ConfigException(msg)
