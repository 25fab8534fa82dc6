"""The chain conditioned on staying unabsorbed: harmonic function, kernel,
and limit laws.

Central object: a function Q with Q(q) = 0 satisfying Q(f(s)) = gamma * Q(s)
with gamma = f'(q). Per case:

    a > 1, A = 1 (q = 1):   Q(s) = ((1-s)^(-theta) + d)^(-1/theta)
    a = 1 (critical):       Q identically 0 (no useful conditioning)
    theta = 0:              Q(s) = log((A-s)/(A-q))
    otherwise:              Q(s) = (A-s)^(-theta) - (A-q)^(-theta)

The closed forms are stored raw together with the normalizer 1/Q'(q), since
the stationary law needs Q'(q) = 1 while the other limit laws are invariant
to scaling.

Derived distributions, all extracted as power series:
  - transition generating function of the conditioned chain,
    s * f_n'(sq)/f_n'(q) * (f_n(sq)/q)^(i-1) for i starting particles;
  - its stationary law, gf s * Q'(sq) after normalization;
  - the limit of the law at generation n conditioned on absorption after n,
    gf 1 - Q(sq)/Q(0);
  - the critical-case analogue from the a = 1 family, gf
    ((1 - s(1 - (1+c)^(-1/theta)))^(-theta) - 1)/c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, NumericError, TrivialLawError
from .params import ThetaParams, case_of, scalar_summary
from .pgf import eval_fn, eval_fn_prime, fn_series
from .series import Series

__all__ = [
    "QFunction",
    "q_function",
    "q_transition_gf",
    "q_transition_matrix",
    "LawKind",
    "LimitLaw",
    "stationary_law",
    "conditional_limit_b",
    "critical_limit_w",
]

_COEFF_CLAMP = 1e-12


class LawKind(Enum):
    STATIONARY_Q = "StationaryQ"
    CONDITIONAL_B = "ConditionalB"
    CRITICAL_W = "CriticalW"


@dataclass(frozen=True)
class LimitLaw:
    """Probabilities on j = 1, 2, ...; probs[j-1] is the mass at j."""

    kind: LawKind
    probs: np.ndarray

    @property
    def partial_sum(self) -> float:
        return float(np.sum(self.probs))

    def prob(self, j: int) -> float:
        if j < 1 or j > len(self.probs):
            raise DomainError(f"j={j} outside the truncated support 1..{len(self.probs)}")
        return float(self.probs[j - 1])


def _law(kind: LawKind, coeffs_from_1: np.ndarray) -> LimitLaw:
    probs = np.asarray(coeffs_from_1, dtype=float).copy()
    if np.any(probs < -_COEFF_CLAMP):
        j = int(np.argmax(probs < -_COEFF_CLAMP)) + 1
        raise NumericError(f"{kind.value} mass at j={j} is {probs[j-1]}, negative")
    probs[np.abs(probs) < _COEFF_CLAMP] = 0.0
    return LimitLaw(kind=kind, probs=probs)


class QFunction:
    """Raw closed form plus the constant turning it into the Q'(q)=1 version."""

    def __init__(self, p: ThetaParams):
        self.params = p
        self.tag = case_of(p)
        self.gamma = scalar_summary(p).gamma
        self.trivial = self.tag.case_id == "case2"
        cid = self.tag.case_id
        theta, q, big_a = p.theta, p.q, p.big_a
        if self.trivial:
            self.normalizer = math.nan
        elif cid == "case1":
            self.normalizer = -1.0
        elif theta == 0.0:
            self.normalizer = -(big_a - q)
        else:
            self.normalizer = (big_a - q) ** (theta + 1.0) / theta

    def raw(self, s):
        p = self.params
        theta, q, big_a = p.theta, p.q, p.big_a
        ss = np.asarray(s, dtype=float)
        if np.any(ss < 0.0) or np.any(ss > big_a):
            raise DomainError(f"Q argument outside [0, {big_a}]")
        with np.errstate(divide="ignore"):
            if self.trivial:
                val = np.zeros_like(ss)
            elif self.tag.case_id == "case1":
                val = ((1.0 - ss) ** (-theta) + p.d) ** (-1.0 / theta)
            elif theta == 0.0:
                val = np.log((big_a - ss) / (big_a - q))
            else:
                val = (big_a - ss) ** (-theta) - (big_a - q) ** (-theta)
        return float(val) if np.ndim(s) == 0 else val

    def normalized(self, s):
        if self.trivial:
            raise TrivialLawError("critical family: Q vanishes identically")
        return self.normalizer * self.raw(s)

    def raw_at_zero(self) -> float:
        return self.raw(0.0)

    def __call__(self, s):
        return self.raw(s)


def q_function(p: ThetaParams) -> QFunction:
    return QFunction(p)


def q_transition_gf(p: ThetaParams, i: int, n: int, s) -> float:
    """E(s^(state at n) | start i, conditioned to survive forever).

    Vanishing q leaves nothing to condition the state transitions on.
    """
    if p.q <= 0.0:
        raise DomainError("q = 0: the conditioned transition law degenerates")
    if i < 1 or n < 1:
        raise DomainError("need i >= 1 starting particles and n >= 1 steps")
    ss = np.asarray(s, dtype=float)
    if np.any(ss < 0.0) or np.any(ss > 1.0):
        raise DomainError("s must lie in [0, 1]")
    q = p.q
    num = eval_fn_prime(p, n, ss * q)
    den = eval_fn_prime(p, n, q)
    core = ss * num / den
    if i > 1:
        core = core * (eval_fn(p, n, ss * q) / q) ** (i - 1)
    return float(core) if np.ndim(s) == 0 else core


def q_transition_matrix(p: ThetaParams, n: int, i_max: int, j_max: int) -> np.ndarray:
    """Kernel entries for i in 1..i_max, j in 1..j_max by series extraction.

    Returns shape (i_max, j_max); entry [i-1, j-1] is the i -> j probability
    in n steps of the conditioned chain.
    """
    if p.q <= 0.0:
        raise DomainError("q = 0: the conditioned transition law degenerates")
    order = j_max + 1
    fn = fn_series(p, float(n), order + 1)
    fn_at_sq = fn.scale_arg(p.q)
    deriv_at_sq = Series(fn.deriv().coeffs[: order + 1]).scale_arg(p.q)
    den = eval_fn_prime(p, n, p.q)
    base = Series(fn_at_sq.coeffs[: order + 1]) * (1.0 / p.q)
    rows = np.empty((i_max, j_max))
    power = Series.constant(1.0, order)
    core0 = (deriv_at_sq * (1.0 / den)).mul_s()
    for i in range(1, i_max + 1):
        gf = core0 * power
        rows[i - 1] = gf.coeffs[1 : j_max + 1]
        if i < i_max:
            power = power * base
    return rows


def stationary_law(p: ThetaParams, order: int) -> LimitLaw:
    """Coefficients of s*Q'(sq) with the Q'(q)=1 normalization, j = 1..order."""
    qf = q_function(p)
    if qf.trivial:
        raise TrivialLawError("critical family has no stationary conditioned law")
    if p.q <= 0.0:
        raise DomainError("q = 0: no mass to condition on")
    theta, q, big_a = p.theta, p.q, p.big_a
    if qf.tag.case_id == "case1":
        # s * (1 + d*(1-s)^theta)^(-(1+theta)/theta), q = 1
        inner = Series.affine(1.0, -1.0, order).pow(theta) * p.d + 1.0
        gf = inner.pow(-(1.0 + theta) / theta).mul_s()
    elif theta == 0.0:
        # s * (A-q)/(A-sq)
        gf = (Series.affine(big_a, -q, order).pow(-1.0) * (big_a - q)).mul_s()
    else:
        gf = (
            Series.affine(big_a, -q, order).pow(-theta - 1.0) * (big_a - q) ** (theta + 1.0)
        ).mul_s()
    return _law(LawKind.STATIONARY_Q, gf.coeffs[1 : order + 1])


def conditional_limit_b(p: ThetaParams, order: int) -> LimitLaw:
    """Limit law of the population at n given absorption later than n.

    gf 1 - Q(sq)/Q(0); independent of how Q is normalized.
    """
    qf = q_function(p)
    if qf.trivial:
        raise TrivialLawError("critical family: use critical_limit_w instead")
    if p.q <= 0.0:
        raise DomainError("q = 0: conditioning event has probability 0")
    theta, q, big_a = p.theta, p.q, p.big_a
    q0 = qf.raw_at_zero()
    if qf.tag.case_id == "case1":
        qsq = Series.affine(1.0, -1.0, order).pow(-theta) + p.d
        qsq = qsq.pow(-1.0 / theta)
    elif theta == 0.0:
        qsq = Series.affine(big_a, -q, order).log() - math.log(big_a - q)
    else:
        qsq = Series.affine(big_a, -q, order).pow(-theta) - (big_a - q) ** (-theta)
    gf = 1.0 - qsq * (1.0 / q0)
    return _law(LawKind.CONDITIONAL_B, gf.coeffs[1 : order + 1])


def critical_limit_w(p: ThetaParams, order: int) -> LimitLaw:
    """The a = 1 family's analogue of the conditional limit law."""
    tag = case_of(p)
    if tag.case_id != "case2":
        raise DomainError(f"{tag.case_id} is not critical; this law needs a = 1")
    theta, c = p.theta, p.c
    beta = 1.0 - (1.0 + c) ** (-1.0 / theta)
    gf = (Series.affine(1.0, -beta, order).pow(-theta) - 1.0) * (1.0 / c)
    return _law(LawKind.CRITICAL_W, gf.coeffs[1 : order + 1])
