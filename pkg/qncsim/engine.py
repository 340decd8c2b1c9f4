#
# Copyright (c) 2014-2024, qncsim developers
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# under the terms of the BSD license found in LICENSE.md at the root of this distribution.
#
"""
    Quantized network coding: coefficients, the quantized edge recursion and the
    measurement system it induces at the gateway.

    At every network use t each edge e sends y_e(t) = Q_e[ sum of beta_{e,e'}(t) y_{e'}(t-1) over
    e' in In(tail(e)), plus alpha_{e,tail(e)}(t) x_{tail(e)} ]. Messages are only injected at t=2,
    so the stacked gateway measurements are linear in x through Psi_tot = Omega(T) A(2).
"""
from dataclasses import dataclass, replace
from qncsim.exception import ConfigException, DimensionException
from qncsim.grammar.matrix import MatrixGrammar
from typing import Dict, Optional, Tuple
import logging
import numpy as np

__all__ = [
    "QuantizerSpec", "CoefficientSchedule", "NetworkState", "MeasurementSystem",
    "draw_coefficients", "calibrate_alpha_variance", "build_omega", "omega_prefix",
    "step", "simulate", "run_qnc", "resolve_quantizer", "unrolled_noise_effect",
    "sample_psi_tot", "save_system", "load_system"
]
logger = logging.getLogger('qncsim.engine')

BETA_MODES    = ( 'per_time', 'constant' )
GATEWAY_MODES = ( 'identity', 'orthogonal' )

# Dry run rule of resolve_quantizer: q_max = RANGE_FACTOR * std of the edge contents
RANGE_FACTOR  = 4.0

@dataclass(frozen=True)
class QuantizerSpec:
    """
        Uniform mid-rise quantizer with 2^ceil(L*C_e) levels on [-q_max, q_max] for every edge e.
        q_max=None is filled by resolve_quantizer from a dry run.
    """
    mode: str = 'uniform'
    block_length: float = 1.0
    q_max: Optional[float] = None

    def __post_init__(self):
        if self.mode not in ('uniform', 'disabled'):
            msg = 'Unknown quantizer mode "%s"' % self.mode
            logger.error ( msg )
            raise ConfigException(msg)
        if self.q_max is not None and not self.q_max > 0:
            msg = 'Quantizer range must be positive, got %r' % self.q_max
            logger.error ( msg )
            raise ConfigException(msg)

    @property
    def enabled(self):
        return self.mode == 'uniform'

    def levels(self, g):
        """ Level count of every edge quantizer """
        bits = np.ceil(self.block_length * g.capacities - 1e-12).astype(int)
        if np.any(bits < 1):
            msg = 'Quantizer needs at least one bit per edge, got L*C_e=%r' % float(np.min(self.block_length * g.capacities))
            logger.error ( msg )
            raise ConfigException(msg)
        return 2.0 ** bits

    def step_size(self, g):
        return 2.0 * self.q_max / self.levels(g)

def quantize(u, levels, q_max):
    """ Returns (quantized vector, number of inputs outside the range) """
    delta = 2.0 * q_max / levels
    index = np.clip(np.floor((u + q_max) / delta), 0, levels - 1)
    saturated = int(np.count_nonzero(np.abs(u) > q_max))
    return -q_max + (index + 0.5) * delta, saturated

@dataclass(frozen=True)
class CoefficientSchedule:
    """
        alpha2 is A(2), betas[t] is F(t) for t=3..T and b is the gateway extraction B,
        the same for every t. tails keeps the sparsity pattern of A(2).
    """
    alpha2: np.ndarray
    sigma_alpha_sq: float
    betas: Dict[int, np.ndarray]
    b: np.ndarray
    tails: np.ndarray
    T: int
    seed: int
    beta_mode: str = 'per_time'
    gateway_mode: str = 'identity'

    @property
    def edge_count(self):
        return self.alpha2.shape[0]

    def F(self, t):
        if t < 3:
            return np.zeros((self.edge_count, self.edge_count))
        if t not in self.betas:
            msg = 'No F(%d) in a schedule drawn up to T=%d' % (t, self.T)
            logger.error ( msg )
            raise DimensionException(msg)
        return self.betas[t]

    def A(self, t):
        return self.alpha2 if t == 2 else np.zeros_like(self.alpha2)

    def with_alpha(self, seed):
        """ Same F(t) and B, fresh draw of A(2) """
        return replace(self, alpha2=_drawAlpha(self.tails, self.alpha2.shape[1], self.sigma_alpha_sq, seed))

@dataclass
class NetworkState:
    t: int
    y: np.ndarray
    noise_log: Tuple[np.ndarray, ...] = ()
    saturations: int = 0

@dataclass
class MeasurementSystem:
    omega: np.ndarray
    alpha2: np.ndarray
    psi_tot: np.ndarray
    sigma_alpha_sq: float
    T: int
    gateway_in: int
    noise_effect: Optional[np.ndarray] = None
    saturations: int = 0

    @property
    def m(self):
        return self.omega.shape[0]

def _drawAlpha(tails, n, sigma_alpha_sq, seed):
    rng = np.random.default_rng([seed, 2])
    alpha2 = np.zeros((len(tails), n))
    alpha2[np.arange(len(tails)), tails-1] = rng.standard_normal(len(tails)) * np.sqrt(sigma_alpha_sq)
    return alpha2

def _drawBeta(g, rng):
    """ F(t): per node, orthonormal rows over In(v) for the first |In(v)| edges of Out(v), zero rows after """
    F = np.zeros((g.edge_count, g.edge_count))
    for v in range(1, g.n+1):
        ins, outs = g.incoming[v], g.outgoing[v]
        if not ins or not outs:
            continue
        q, r = np.linalg.qr(rng.standard_normal((len(ins), len(outs))))
        rank = min(len(ins), len(outs))
        F[np.ix_(outs[:rank], ins)] = q[:, :rank].T
    return F

def _drawGateway(g, mode, seed):
    ins = g.incoming[g.gateway]
    extraction = np.zeros((len(ins), g.edge_count))
    extraction[np.arange(len(ins)), ins] = 1.0
    if mode == 'identity':
        return extraction
    q, r = np.linalg.qr(np.random.default_rng([seed, 1]).standard_normal((len(ins), len(ins))))
    return (q * np.sign(np.diag(r))) @ extraction

def build_omega(sched, g, T):
    """ Omega(T) = [B; B F(3); ...; B F(T)...F(3)], (T-1)|In(v0)| x |E| """
    if T < 2:
        msg = 'Final time must be at least 2, got %r' % T
        logger.error ( msg )
        raise ConfigException(msg)
    blocks = [ sched.b ]
    product = np.eye(g.edge_count)
    for t in range(3, T+1):
        product = sched.F(t) @ product
        blocks.append(sched.b @ product)
    return np.vstack(blocks)

def omega_prefix(omega, gateway_in, T):
    """ Omega(T) from Omega(T_max) of the same schedule, T <= T_max """
    rows = (T - 1) * gateway_in
    if T < 2 or rows > omega.shape[0]:
        msg = 'Cannot cut Omega(%d) out of a %d rows matrix' % (T, omega.shape[0])
        logger.error ( msg )
        raise DimensionException(msg)
    return omega[:rows]

def calibrate_alpha_variance(omega, n):
    """
        sigma_alpha^2 = n / ||Omega||_F^2, so that the average of E||Psi_tot x||^2 over
        the unit sphere is one.
    """
    energy = float(np.sum(np.square(omega)))
    if energy == 0.0:
        msg = 'Cannot calibrate alpha variance on an all-zero Omega'
        logger.error ( msg )
        raise ConfigException(msg)
    return n / energy

def draw_coefficients(g, T, seed, beta_mode='per_time', gateway_mode='identity'):
    """
        Coefficients up to final time T. F(t) only depends on (seed, t), so schedules
        drawn with the same seed agree on their common times.
    """
    if T < 2:
        msg = 'Final time must be at least 2, got %r' % T
        logger.error ( msg )
        raise ConfigException(msg)
    if beta_mode not in BETA_MODES:
        msg = 'Unknown beta mode "%s"' % beta_mode
        logger.error ( msg )
        raise ConfigException(msg)
    if gateway_mode not in GATEWAY_MODES:
        msg = 'Unknown gateway mode "%s"' % gateway_mode
        logger.error ( msg )
        raise ConfigException(msg)

    betas = {}
    for t in range(3, T+1):
        if beta_mode == 'constant' and t > 3:
            betas[t] = betas[3]
        else:
            betas[t] = _drawBeta(g, np.random.default_rng([seed, t]))
    b = _drawGateway(g, gateway_mode, seed)
    sched = CoefficientSchedule(np.zeros((g.edge_count, g.n)), 0.0, betas, b, g.tails, T, seed, beta_mode, gateway_mode)
    sigma_alpha_sq = calibrate_alpha_variance(build_omega(sched, g, T), g.n)
    logger.debug ( 'Coefficients drawn for %s, T=%d, sigma_alpha^2=%g', g, T, sigma_alpha_sq );
    return replace(sched, sigma_alpha_sq=sigma_alpha_sq, alpha2=_drawAlpha(g.tails, g.n, sigma_alpha_sq, seed))

def _checkMessage(g, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n,):
        msg = 'Message has shape %s, expected (%d,)' % (x.shape, g.n)
        logger.error ( msg )
        raise DimensionException(msg)
    return x

def step(state, sched, g, quant, x):
    """ One network use: state at t to state at t+1 """
    x = _checkMessage(g, x)
    if state.y.shape != (g.edge_count,):
        msg = 'Edge contents have shape %s, expected (%d,)' % (state.y.shape, g.edge_count)
        logger.error ( msg )
        raise DimensionException(msg)
    t = state.t + 1
    u = sched.F(t) @ state.y + sched.A(t) @ x
    saturated = 0
    if quant.enabled:
        if quant.q_max is None:
            msg = 'Quantizer range is not resolved'
            logger.error ( msg )
            raise ConfigException(msg)
        y, saturated = quantize(u, quant.levels(g), quant.q_max)
        noise = y - u
    else:
        y, noise = u, np.zeros_like(u)
    if saturated:
        logger.debug ( 't=%d: %d edge(s) saturated', t, saturated );
    return NetworkState(t, y, state.noise_log + (noise,), state.saturations + saturated)

def simulate(g, sched, quant, x, T):
    """ States at t=1..T, starting from rest """
    if not 2 <= T <= sched.T:
        msg = 'Final time %r outside 2..%d' % (T, sched.T)
        logger.error ( msg )
        raise ConfigException(msg)
    states = [ NetworkState(1, np.zeros(g.edge_count)) ]
    for t in range(2, T+1):
        states.append(step(states[-1], sched, g, quant, x))
    return states

def resolve_quantizer(g, sched, quant, x, T):
    """ Sets q_max from a dry run without quantization when it is not given """
    if not quant.enabled or quant.q_max is not None:
        return quant
    contents = np.concatenate([ s.y for s in simulate(g, sched, QuantizerSpec('disabled'), x, T)[1:] ])
    spread = float(np.std(contents))
    q_max = RANGE_FACTOR * spread if spread > 0 else 1.0
    logger.debug ( 'Quantizer range set to %g from a dry run', q_max );
    return replace(quant, q_max=q_max)

def run_qnc(g, sched, quant, x, T=None):
    """
        Runs the network up to T and returns (z_tot, noise_effect, system), where
        z_tot stacks B y(2), ..., B y(T) and noise_effect = z_tot - Psi_tot x.
    """
    T = sched.T if T is None else T
    x = _checkMessage(g, x)
    quant = resolve_quantizer(g, sched, quant, x, T)
    states = simulate(g, sched, quant, x, T)
    z_tot = np.concatenate([ sched.b @ s.y for s in states[1:] ])
    omega = build_omega(sched, g, T)
    psi_tot = omega @ sched.alpha2
    noise_effect = z_tot - psi_tot @ x
    saturations = states[-1].saturations
    if saturations:
        logger.warning ( '%d quantizer saturation(s) during the run', saturations );
    system = MeasurementSystem(omega, sched.alpha2, psi_tot, sched.sigma_alpha_sq, T, sched.b.shape[0], noise_effect, saturations)
    return z_tot, noise_effect, system

def unrolled_noise_effect(sched, g, noise_log, T):
    """
        Quantization noise seen at the gateway, propagated edge vector by edge vector:
        block t is the sum over t'=2..t of B F(t)...F(t'+1) n(t'). noise_log holds n(2)..n(T).
    """
    if len(noise_log) != T - 1:
        msg = 'Noise log has %d entries, expected %d' % (len(noise_log), T - 1)
        logger.error ( msg )
        raise DimensionException(msg)
    blocks = []
    for t in range(2, T+1):
        total = np.zeros(sched.b.shape[0])
        for source in range(2, t+1):
            v = noise_log[source - 2]
            for s in range(source + 1, t + 1):
                v = sched.F(s) @ v
            total += sched.b @ v
        blocks.append(total)
    return np.concatenate(blocks)

def sample_psi_tot(system, g, count, seed):
    """ count independent draws of Psi_tot over A(2) with Omega fixed, shape (count, m, n) """
    rng = np.random.default_rng(seed)
    alphas = rng.standard_normal((count, g.edge_count)) * np.sqrt(system.sigma_alpha_sq)
    return system.omega @ (alphas[:, :, None] * g.incidence[None, :, :])

def save_system(system, path):
    blocks = [
        ('dimensions',     [ system.m, system.omega.shape[1], system.alpha2.shape[1], system.T, system.gateway_in, system.saturations ]),
        ('sigma_alpha_sq', [[ system.sigma_alpha_sq ]]),
        ('omega',          system.omega),
        ('alpha2',         system.alpha2),
        ('psi_tot',        system.psi_tot),
    ]
    if system.noise_effect is not None:
        blocks.append(('noise_effect', system.noise_effect))
    with open(path, 'w') as f:
        f.write('\n'.join(MatrixGrammar().build('qncsim measurement system', blocks)) + '\n')
    logger.debug ( 'Measurement system saved to %s', path );

def load_system(path):
    with open(path, 'r') as f:
        blocks = MatrixGrammar().parse(f)
    try:
        m, edges, n, T, gateway_in, saturations = [ int(v) for v in blocks['dimensions'][:, 0] ]
        system = MeasurementSystem(
            blocks['omega'], blocks['alpha2'], blocks['psi_tot'], float(blocks['sigma_alpha_sq'][0, 0]),
            T, gateway_in, blocks['noise_effect'][:, 0] if 'noise_effect' in blocks else None, saturations
        )
    except (KeyError, ValueError) as exc:
        msg = 'Incomplete measurement system file %s: %s' % (path, exc)
        logger.error ( msg )
        raise ConfigException(msg)
    if system.omega.shape != (m, edges) or system.psi_tot.shape != (m, n):
        msg = 'Measurement system file %s does not match its dimensions header' % path
        logger.error ( msg )
        raise DimensionException(msg)
    return system
