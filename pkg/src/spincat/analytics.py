"""Closed-form results and statistical post-processing.

Contents: the exact outcome-count distribution p(k) of a measurement
sequence started from the all-up product state, the fixed-point
(convergence target) predictor for a trajectory with k plus-outcomes out
of m, the magnitude of the dominant Kraus-product eigenvalue, the two
zero-temperature reference curves for the single-projection protocol,
log-log scaling fits, and the Ramsey sensitivity estimate.

All combinatorics go through log-gamma and probabilities are assembled in
log space: C(400, 200) and 2**-400 both overflow/underflow naive
arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np
from scipy.special import gammaln, xlogy

from .blocks import BlockBasis, EnsembleState, build_block_basis, dicke_state
from .errors import ConfigurationError, DegenerateProbabilityError, DomainError
from .metric import ProjectorSpec, catness, q_prime

#: default particle-count cap for the trace-norm reference curve
REFERENCE_IDEAL_DEFAULT_LIMIT = 31


@dataclass(frozen=True)
class PkDistribution:
    """Analytic distribution of k = number of +1 outcomes in m measurements."""

    N: int
    m: int
    gt: float
    probabilities: np.ndarray

    def argmax_set(self, rtol: float = 1e-12) -> np.ndarray:
        p = self.probabilities
        return np.flatnonzero(p >= p.max() * (1.0 - rtol))


@dataclass(frozen=True)
class ConvergencePrediction:
    """Predicted Sx eigenstate a long trajectory with ratio k/m settles into.

    ``L`` is None when two admissible eigenvalues are exactly equidistant
    from the continuum optimum (``degenerate`` set, both listed in
    ``L_candidates``).
    """

    N: int
    wide_coupling: bool
    theta_candidates: tuple[float, ...]
    L: int | None
    L_candidates: tuple[int, ...]
    degenerate: bool


@dataclass(frozen=True)
class ScalingFit:
    """Unweighted least-squares line through (ln N, ln value)."""

    points: tuple[tuple[float, ...], ...]
    q: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class SensitivityEstimate:
    probability: float
    dp_domega: float
    t_int: float
    total_time: float
    delta_omega: float


def _sorted_logsumexp_rows(terms: np.ndarray) -> np.ndarray:
    """logsumexp along axis 1 with sorted accumulation.

    Sorting before summation makes the result invariant under permutations
    of the terms, so exact symmetries of the inputs survive in the output
    bit for bit.
    """
    mx = terms.max(axis=1)
    out = np.full(terms.shape[0], -np.inf)
    finite = np.isfinite(mx)
    if np.any(finite):
        shifted = terms[finite] - mx[finite, None]
        expd = np.exp(shifted)
        expd.sort(axis=1)
        out[finite] = mx[finite] + np.log(expd.sum(axis=1))
    return out


def pk_distribution(n: int, m: int, gt: float) -> PkDistribution:
    """p(k) = C(m,k) 2^-N sum_r C(N,r) q_r^k (1-q_r)^(m-k),
    q_r = (1 + sin(gt*(2r-N)))/2, for the all-up pure initial state.
    """
    if n < 1 or m < 0:
        raise DomainError(f"need N >= 1 and m >= 0, got N={n}, m={m}")
    svals = 2 * np.arange(n + 1) - n
    # odd-symmetric sine so that p(k) = p(m-k) holds exactly
    sins = np.sign(svals) * np.sin(gt * np.abs(svals))
    q_plus = (1.0 + sins) / 2.0
    q_minus = (1.0 - sins) / 2.0
    r = np.arange(n + 1)
    log_w = gammaln(n + 1) - (gammaln(r + 1) + gammaln(n - r + 1)) - n * math.log(2.0)
    k = np.arange(m + 1)
    log_binom = gammaln(m + 1) - (gammaln(k + 1) + gammaln(m - k + 1))
    terms = log_w[None, :] + (
        xlogy(k[:, None], q_plus[None, :]) + xlogy((m - k)[:, None], q_minus[None, :])
    )
    probabilities = np.exp(log_binom + _sorted_logsumexp_rows(terms))
    probabilities.setflags(write=False)
    return PkDistribution(N=int(n), m=int(m), gt=float(gt), probabilities=probabilities)


def _snap_to_admissible(theta: float, n: int, tie_rtol: float = 1e-12) -> tuple[tuple[int, ...], float]:
    """Nearest admissible Sx eigenvalue(s) in {-N, -N+2, ..., N} and the distance."""
    admissible = np.arange(-n, n + 1, 2)
    dist = np.abs(admissible - theta)
    h = float(dist.min())
    tol = tie_rtol * max(1.0, abs(theta))
    winners = tuple(int(v) for v in admissible[dist <= h + tol])
    return winners, h


def predict_convergence(n: int, m: int, k: int, gt: float) -> ConvergencePrediction:
    """Target eigenstate |Sx = L> for a trajectory with k of m plus outcomes.

    For gt*N <= pi/2 the single continuum optimum is
    arcsin(2k/m - 1)/gt and L is the nearest admissible eigenvalue.  For
    wider coupling every stationary point of the Kraus product magnitude
    inside the spectrum is a candidate (they all attain the same
    magnitude, with identical curvature), and the candidate with the
    smallest distance to an admissible eigenvalue wins.  Exact ties set
    the degenerate flag.
    """
    if m < 1:
        raise DomainError(f"need m >= 1, got {m}")
    if not 0 <= k <= m:
        raise DomainError(f"need 0 <= k <= m, got k={k}, m={m}")
    if not (math.isfinite(gt) and gt > 0):
        raise DomainError(f"need gt > 0, got {gt}")
    alpha = 2.0 * k / m - 1.0
    a = math.asin(alpha)
    x_max = gt * n
    wide = x_max > math.pi / 2
    if not wide:
        thetas = [a / gt]
    else:
        thetas = []
        for base in (a, math.pi - a):
            n_lo = math.ceil((-x_max - base) / (2.0 * math.pi))
            n_hi = math.floor((x_max - base) / (2.0 * math.pi))
            for nn in range(n_lo, n_hi + 1):
                thetas.append((base + 2.0 * math.pi * nn) / gt)
        thetas = sorted(set(thetas))
    best_h = math.inf
    best_l: set[int] = set()
    for theta in thetas:
        winners, h = _snap_to_admissible(theta, n)
        tol = 1e-12 * max(1.0, abs(theta))
        if h < best_h - tol:
            best_h = h
            best_l = set(winners)
        elif h <= best_h + tol:
            best_l.update(winners)
            best_h = min(best_h, h)
    candidates = tuple(sorted(best_l))
    degenerate = len(candidates) != 1
    return ConvergencePrediction(
        N=int(n),
        wide_coupling=wide,
        theta_candidates=tuple(thetas),
        L=None if degenerate else candidates[0],
        L_candidates=candidates,
        degenerate=degenerate,
    )


def fixed_point_magnitude(m: int, k: int) -> float:
    """sqrt((m-k)^(m-k) * k^k / m^m), the Kraus-product magnitude at any
    stationary point (0^0 = 1); computed in log space."""
    if m < 0 or not 0 <= k <= m:
        raise DomainError(f"need 0 <= k <= m, got k={k}, m={m}")
    log_val = 0.5 * (xlogy(k, k) + xlogy(m - k, m - k) - xlogy(m, m))
    return float(np.exp(log_val))


def reference_ideal(
    n: int,
    n_max: int = REFERENCE_IDEAL_DEFAULT_LIMIT,
    basis: BlockBasis | None = None,
) -> float:
    """Expected trace norm of the double commutator after one ideal
    transverse projection of the all-up state:

        sum_M 2^-N C(N, (N+M)/2) * ||[Sz, [Sz, |Sx=M><Sx=M|]]||_1

    Kept in the literal normalization without the 1/2 of the catness
    metric; divide by two to compare against catness values.
    """
    if n > n_max:
        raise ConfigurationError(f"N={n} exceeds the configured trace-norm limit {n_max}")
    if basis is None:
        basis = build_block_basis(n)
    total = 0.0
    for r in range(n + 1):
        m_value = 2 * r - n
        weight = comb(n, r) / 2**n
        total += weight * 2.0 * catness(dicke_state(basis, m_value)).value
    return total


def reference_closed_form(n: int) -> float:
    """sum_M 2^-N C(N, (N+M)/2) * (N^2 - M^2 + 2N); equals N^2 + N exactly
    (the binomial second moment of M is N)."""
    total = sum(comb(n, r) * (n**2 - (2 * r - n) ** 2 + 2 * n) for r in range(n + 1))
    return total / 2**n


def fit_scaling(points: Sequence[Sequence[float]]) -> ScalingFit:
    """Ordinary least squares on (ln N, ln value).

    ``points`` holds (N, value) or (N, value, stderr) rows; a stderr
    column is carried along but not used as a weight.
    """
    rows = [tuple(float(x) for x in p) for p in points]
    if len(rows) < 2:
        raise DomainError(f"need at least 2 points, got {len(rows)}")
    ns = np.array([p[0] for p in rows])
    vals = np.array([p[1] for p in rows])
    if np.any(ns <= 0) or np.any(vals <= 0):
        raise DomainError("scaling fit needs positive N and positive values")
    x = np.log(ns)
    y = np.log(vals)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(points=tuple(rows), q=float(slope), intercept=float(intercept), r_squared=r_squared)


def ramsey_uncertainty(
    probability: float, dp_domega: float, t_int: float, total_time: float
) -> SensitivityEstimate:
    """delta_omega = sqrt(P(1-P)) / |dP/domega| / sqrt(T / t_int)."""
    if probability <= 0.0 or probability >= 1.0:
        raise DegenerateProbabilityError(
            f"outcome probability must lie strictly inside (0, 1), got {probability}"
        )
    if dp_domega == 0.0:
        raise DomainError("dP/domega must be nonzero")
    if not 0 < t_int <= total_time:
        raise DomainError(f"need 0 < t_int <= T, got t_int={t_int}, T={total_time}")
    delta = math.sqrt(probability * (1.0 - probability)) / abs(dp_domega)
    delta /= math.sqrt(total_time / t_int)
    return SensitivityEstimate(
        probability=float(probability),
        dp_domega=float(dp_domega),
        t_int=float(t_int),
        total_time=float(total_time),
        delta_omega=float(delta),
    )


def derivative_small_omega(state: EnsembleState, projector: ProjectorSpec, t_int: float) -> float:
    """Small-frequency limit of |dP/domega| for the Ramsey protocol:
    t_int * |Tr(eta [Sz, rho])|."""
    if not (math.isfinite(t_int) and t_int > 0):
        raise DomainError(f"need t_int > 0, got {t_int}")
    return t_int * q_prime(state, projector)
