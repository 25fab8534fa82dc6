"""Absorption-time distributions: extinction, explosion, and their minimum.

T_0 is the first generation with no particles, T_1 the first with infinitely
many, T = min(T_0, T_1). All three tails P(n < . < infinity) have closed
forms obtained by evaluating the n-th pgf iterate at 0 and 1; this module
carries the per-case expressions in expm1/log1p form so that tails of size
1e-300 keep full relative precision, and exposes the n-fold composition as an
independent oracle.

Expected absorption times are tail sums E = sum_{n>=0} P(. > n). The sums are
accumulated in blocks with two divergence detectors (a sustained-ratio guard
for flat tails and a fitted decay exponent at the switch point for power
tails) and finished with an Euler-Maclaurin integral completion, so slowly
converging cases still come out to absolute accuracy well under 1e-8.

The late-explosion limit law: when the one-step escape mass is small the
conditional law of T_1, shifted by log_a(eps), approaches the curve
exp(-w a^y). gumbel_limit packages eps, the regime parameter r, the weight w,
and exact-vs-limit evaluation on the integer lattice.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ConditioningWarning, DomainError, NumericError, RegimeError
from .params import CaseTag, ThetaParams, case_of, validate_classify
from .pgf import compose_iterate

__all__ = [
    "AbsorptionTails",
    "absorption_tails",
    "ExpectedAbsorption",
    "expected_absorption",
    "conditional_t1_cdf",
    "GumbelLimit",
    "GumbelEval",
    "gumbel_limit",
    "EULER_GAMMA",
]

EULER_GAMMA = 0.5772156649015329


def _as_n(n, allow_real: bool = True):
    arr = np.asarray(n, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("generation index must be >= 0")
    if not allow_real and np.any(arr != np.floor(arr)):
        raise DomainError("generation index must be an integer")
    return arr


def _ret(n, value):
    return float(value) if np.ndim(n) == 0 else value


class AbsorptionTails:
    """Per-case closed-form tails, plus the composition oracle.

    t0_tail(n) = q - f_n(0) = P(n < T_0 < infinity)
    t1_tail(n) = f_n(1) - q, the mass still above the extinction limit. For
    explosive laws this is P(n < T_1 < infinity); for proper supercritical
    laws it is the constant surviving mass 1 - q (explosion never happens,
    so nothing to condition on there).
    t_tail(n)  = f_n(1) - f_n(0) = P(process still alive at n)

    Each method takes a scalar or array n; real-valued n is accepted because
    the closed forms interpolate smoothly, which is what the integral
    completion of the expectation sums relies on.
    """

    def __init__(self, p: ThetaParams):
        self.params = p
        self.tag: CaseTag = case_of(p)
        self.extinction_mass = p.q
        self.explosion_mass = 0.0 if self.tag.regular else 1.0 - p.q

    # -- closed forms ----------------------------------------------------

    def t0_tail(self, n):
        nn = _as_n(n)
        p = self.params
        theta, a, q, big_a = p.theta, p.a, p.q, p.big_a
        cid = self.tag.case_id
        with np.errstate(divide="ignore", over="ignore"):
            if cid == "case1":
                d = p.d
                val = a ** (-nn / theta) * (1.0 + d - d * a ** (-nn)) ** (-1.0 / theta)
            elif cid == "case2":
                val = (1.0 + p.c * nn) ** (-1.0 / theta)
            elif cid == "case6":
                val = q * a**nn
            elif theta == 0.0:
                # growth rate of the 0-iterate toward q, exact in expm1 form
                val = (big_a - q) * np.expm1(a**nn * math.log(big_a / (big_a - q)))
            else:
                g0 = 1.0 - ((big_a - q) / big_a) ** theta
                val = (big_a - q) * np.expm1((-1.0 / theta) * np.log1p(-(a**nn) * g0))
        return _ret(n, val)

    def t1_tail(self, n):
        nn = _as_n(n)
        p = self.params
        theta, a, q, big_a = p.theta, p.a, p.q, p.big_a
        cid = self.tag.case_id
        if self.tag.regular:
            val = np.full_like(nn, 1.0 - q)
        elif cid == "case6":
            val = (1.0 - q) * a**nn
        elif theta == 0.0:
            val = -(big_a - q) * np.expm1(
                a**nn * math.log((big_a - 1.0) / (big_a - q))
            )
        else:
            # A = 1 makes the reference ratio infinite; its theta-power is 0
            g1 = 1.0 if big_a == 1.0 else 1.0 - ((big_a - q) / (big_a - 1.0)) ** theta
            with np.errstate(divide="ignore"):
                val = -(big_a - q) * np.expm1(
                    (-1.0 / theta) * np.log1p(-(a**nn) * g1)
                )
        return _ret(n, val)

    def t_tail(self, n):
        nn = _as_n(n)
        p = self.params
        theta, a, q, big_a = p.theta, p.a, p.q, p.big_a
        cid = self.tag.case_id
        if self.tag.regular:
            val = (1.0 - q) + np.asarray(self.t0_tail(n), dtype=float)
            return _ret(n, val)
        if cid == "case6":
            val = a**nn
        elif theta == 0.0:
            an = a**nn
            val = (big_a - q) ** (1.0 - an) * (big_a**an - (big_a - 1.0) ** an)
        else:
            g0 = 1.0 - ((big_a - q) / big_a) ** theta
            g1 = 1.0 if big_a == 1.0 else 1.0 - ((big_a - q) / (big_a - 1.0)) ** theta
            an = a**nn
            with np.errstate(divide="ignore"):
                val = (big_a - q) * (
                    (1.0 - an * g0) ** (-1.0 / theta) - (1.0 - an * g1) ** (-1.0 / theta)
                )
        return _ret(n, val)

    # -- oracle ----------------------------------------------------------

    def via_iteration(self, n: int) -> tuple[float, float]:
        """(q - f_n(0), f_n(1) - q) by n actual compositions of f."""
        _as_n(n, allow_real=False)
        p = self.params
        f0 = compose_iterate(p, int(n), 0.0)
        f1 = compose_iterate(p, int(n), 1.0)
        return p.q - f0, f1 - p.q


def absorption_tails(p: ThetaParams) -> AbsorptionTails:
    return AbsorptionTails(p)


# -- expected absorption times ------------------------------------------


@dataclass(frozen=True)
class ExpectedAbsorption:
    """E(T_0 | extinct), E(T_1 | explodes), E(T); nan marks conditioning on a
    null event, inf with the matching flag marks a detected divergence."""

    e_t0_given_finite: float
    e_t1_given_finite: float
    e_t: float
    t0_divergent: bool
    t1_divergent: bool
    t_divergent: bool

    def __iter__(self):
        yield from (self.e_t0_given_finite, self.e_t1_given_finite, self.e_t)


_BLOCK = 1 << 10
_N_SWITCH = 1 << 14
_TINY = 1e-13
_FLAT_RATIO = 1.0 - 1e-6
_FLAT_RUN = 100


def _tail_sum(tail_fn) -> tuple[float, bool]:
    """sum_{n>=0} tail_fn(n), or (inf, True) when the sum diverges.

    Geometric tails exit as soon as terms drop below 1e-13 and close with the
    last observed ratio. Flat tails (ratio > 1 - 1e-6 for 100 consecutive
    terms while still above the exit threshold) are flagged divergent. Tails
    that are still alive at n = 2^14 get a decay exponent fitted from a
    doubling; exponent <= 1 means a divergent power tail, anything steeper is
    finished with integral-plus-correction completion.
    """
    total = 0.0
    flat_run = 0
    prev_last = None
    for n0 in range(0, _N_SWITCH, _BLOCK):
        nn = np.arange(n0, n0 + _BLOCK, dtype=float)
        vals = np.asarray(tail_fn(nn), dtype=float)
        if np.any(vals < -1e-12):
            raise NumericError("negative tail value in expectation sum")
        total += math.fsum(vals)
        seq = vals if prev_last is None else np.concatenate(([prev_last], vals))
        with np.errstate(invalid="ignore", divide="ignore"):
            flat = (seq[1:] > _TINY) & (seq[1:] > _FLAT_RATIO * seq[:-1])
        if flat.all():
            flat_run += len(flat)
        else:
            flat_run = len(flat) - 1 - int(np.flatnonzero(~flat)[-1])
        if flat_run >= _FLAT_RUN:
            return math.inf, True
        prev_last = vals[-1]
        if vals[-1] < _TINY:
            ratio = vals[-1] / vals[-2] if vals[-2] > 0.0 else 0.0
            if 0.0 < ratio < 1.0:
                total += vals[-1] * ratio / (1.0 - ratio)
            return total, False
    n_sw = float(_N_SWITCH)
    t_half = float(tail_fn(n_sw / 2.0))
    t_full = float(tail_fn(n_sw))
    if t_full <= 0.0:
        return total, False
    beta = math.log2(t_half / t_full)
    if beta <= 1.0 + 1e-6:
        return math.inf, True
    integral, _ = quad(
        lambda u: float(tail_fn(1.0 / u)) / u**2,
        0.0,
        1.0 / n_sw,
        epsabs=1e-12,
        epsrel=1e-12,
        limit=200,
    )
    h = max(1e-3 * n_sw, 1.0)
    deriv = (float(tail_fn(n_sw + h)) - float(tail_fn(n_sw - h))) / (2.0 * h)
    total += integral + t_full / 2.0 - deriv / 12.0
    return total, False


def expected_absorption(p: ThetaParams) -> ExpectedAbsorption:
    tag = case_of(p)
    tails = absorption_tails(p)
    q = p.q

    if tag.case_id == "case6":
        exact = 1.0 / (1.0 - p.a)
        e0 = exact if q > 0.0 else _null_conditioning("extinction")
        e1 = exact if tails.explosion_mass > 0.0 else _null_conditioning("explosion")
        return ExpectedAbsorption(e0, e1, exact, False, False, False)

    if q > 0.0:
        s0, d0 = _tail_sum(tails.t0_tail)
        e0 = s0 / q if not d0 else math.inf
    else:
        e0, d0 = _null_conditioning("extinction"), False

    if tails.explosion_mass > 0.0:
        s1, d1 = _tail_sum(tails.t1_tail)
        e1 = s1 / tails.explosion_mass if not d1 else math.inf
    else:
        e1, d1 = _null_conditioning("explosion"), False

    if tag.regular and q == 1.0:
        et, dt = e0, d0
    else:
        st, dt = _tail_sum(tails.t_tail)
        et = st if not dt else math.inf
    return ExpectedAbsorption(e0, e1, et, d0, d1, dt)


def _null_conditioning(event: str) -> float:
    warnings.warn(
        f"conditioning on {event}, which has probability 0; reporting nan",
        ConditioningWarning,
        stacklevel=3,
    )
    return math.nan


# -- explosion-time conditional law and its limit -----------------------


def conditional_t1_cdf(p: ThetaParams, n) -> float:
    """P(T_1 <= n | T_1 < infinity) for laws with positive escape mass."""
    tag = case_of(p)
    tails = absorption_tails(p)
    if tails.explosion_mass <= 0.0:
        raise RegimeError(
            f"{tag.case_id} has explosion probability 0; the conditional law is undefined"
        )
    nn = np.asarray(n, dtype=float)
    val = np.where(nn < 0.0, 0.0, 1.0 - tails.t1_tail(np.maximum(nn, 0.0)) / (1.0 - p.q))
    return _ret(n, val)


@dataclass(frozen=True)
class GumbelLimit:
    """Limit-law record for late explosions along a (theta, A) -> (0, 1) path.

    r = lim |theta| * ln(1/(A-1)) classifies the path; eps is |theta| when
    r > 0 and 1/ln(1/(A-1)) when r = 0; the limit cdf of T_1 - log_a(eps)
    given explosion is exp(-w a^y).
    """

    a: float
    q: float
    theta: float | None
    big_a: float
    eps: float
    r: float
    w: float
    mean: float
    shift: float  # log_a(eps), the centering applied to T_1


@dataclass(frozen=True)
class GumbelEval:
    record: GumbelLimit
    y: float
    limit_cdf: float
    n_floor: int
    n_ceil: int
    exact_floor: float
    exact_ceil: float


def gumbel_limit(
    a: float,
    q: float,
    y: float,
    theta: float | None = None,
    big_a: float = 1.0,
    r: float | None = None,
) -> GumbelEval:
    """Exact vs limit law of the shifted explosion time.

    The caller fixes a in (0,1) and q in [0,1) and declares the path either
    through a concrete (theta, big_a) pair or a direct regime value r. With
    both given they are cross-checked. The exact conditional cdf is reported
    at the two integers bracketing shift + y, since the time is lattice
    valued while the limit curve is continuous.
    """
    if not 0.0 < a < 1.0:
        raise DomainError(f"a must lie in (0,1), got {a}")
    if not 0.0 <= q < 1.0:
        raise DomainError(f"q must lie in [0,1), got {q}")

    if theta is None and r is None:
        raise RegimeError("declare the regime: give theta (with big_a) or r directly")
    if theta is not None:
        if theta > 0.0 or theta <= -1.0:
            raise RegimeError(f"the limit regime needs theta in (-1, 0], got {theta}")
        if theta == 0.0:
            if big_a <= 1.0:
                raise RegimeError("theta = 0 with A = 1 has no explosions")
            r_path = 0.0
        elif big_a == 1.0:
            r_path = math.inf
        else:
            r_path = abs(theta) * math.log(1.0 / (big_a - 1.0))
            if r_path <= 0.0:
                raise RegimeError(f"A = {big_a} >= 2 puts the path outside the regime")
        if r is not None and not _r_compatible(r, r_path):
            raise RegimeError(f"declared r={r} is inconsistent with (theta, A) giving {r_path}")
        r_eff = r_path if r is None else float(r)
    else:
        r_eff = float(r)
        if r_eff < 0.0:
            raise RegimeError(f"r must lie in [0, inf], got {r}")

    if r_eff == 0.0:
        if big_a <= 1.0 or big_a >= 2.0:
            raise DomainError("the r = 0 branch needs A in (1, 2) so that eps > 0")
        eps = 1.0 / math.log(1.0 / (big_a - 1.0))
        w = 1.0
    elif math.isinf(r_eff):
        eps = abs(theta) if theta is not None else math.nan
        w = 1.0
    else:
        eps = abs(theta) if theta is not None else math.nan
        w = 1.0 - math.exp(-r_eff)
    mean = (math.log(w) - EULER_GAMMA) / math.log(a)
    shift = math.log(eps) / math.log(a) if eps > 0.0 and not math.isnan(eps) else math.nan
    record = GumbelLimit(
        a=a, q=q, theta=theta, big_a=big_a, eps=eps, r=r_eff, w=w, mean=mean, shift=shift
    )

    limit_cdf = math.exp(-w * a**y)
    if theta is None or math.isnan(shift):
        # only the limit curve is defined without a concrete (theta, A) pair
        return GumbelEval(
            record=record,
            y=float(y),
            limit_cdf=limit_cdf,
            n_floor=-1,
            n_ceil=-1,
            exact_floor=math.nan,
            exact_ceil=math.nan,
        )
    raw = {"theta": theta, "a": a, "A": big_a, "q": q}
    if theta == 0.0 and big_a == 1.0:
        raise RegimeError("no explosions at theta = 0, A = 1")
    params, _ = validate_classify(raw)
    n_floor = math.floor(shift + y)
    n_ceil = math.ceil(shift + y)
    exact_floor = conditional_t1_cdf(params, n_floor) if n_floor >= 0 else 0.0
    exact_ceil = conditional_t1_cdf(params, n_ceil) if n_ceil >= 0 else 0.0
    return GumbelEval(
        record=record,
        y=float(y),
        limit_cdf=limit_cdf,
        n_floor=n_floor,
        n_ceil=n_ceil,
        exact_floor=float(exact_floor),
        exact_ceil=float(exact_ceil),
    )


def _r_compatible(declared: float, from_path: float) -> bool:
    if math.isinf(declared):
        return math.isinf(from_path)
    if declared == 0.0:
        return from_path == 0.0 or from_path < 0.05
    if math.isinf(from_path):
        return False
    return abs(declared - from_path) <= 0.25 * max(1.0, abs(declared))
