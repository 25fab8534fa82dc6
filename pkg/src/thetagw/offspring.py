"""Offspring distribution: exact masses, the coefficient triangle, sampling.

Four disjoint pmf routes, dispatched on theta:

- theta in (-1, 0) or (0, 1] generally: p_0 and p_1 in closed form, then
  p_n = a * A^(1-n) * (a + c*A^theta)^(-(1+theta)/theta) / n! *
        sum_i (c*A^theta / (a + c*A^theta))^i * B_{i,n}
  where B is the triangle B_{i,n} = (n-2-i*theta) B_{i,n-1}
  + (1+i*theta) B_{i-1,n-1}, seeded with B_{1,2} = 1+theta. The recursion is
  run on row-scaled values B_{i,n} x^i A^{1-n} / n! so nothing overflows even
  for tables of length 10^4.
- theta = -1/m for integer m >= 2: the pgf is A minus the m-th power of
  a*(A-s)^(1/m) + c, a finite binomial sum of fractional-power series; each
  series has a two-term coefficient ratio, so the whole pmf costs O(m*K) and
  tables can reach 10^6 entries (needed: these laws have k^(-2+1/m) tails).
- theta = 0: closed p_0, p_1, then the two-term ratio
  p_n = p_{n-1} * (n-a-1) / (n*A), giving the A^(-n) * n^(-1-a) tail.
- theta = -1: the exact two-point law p_0 = (1-a)q, p_1 = a.

The independent oracle for all of them is series extraction of the pgf
(pmf_oracle). Sampling is inverse-CDF on a cumulative table whose first cell
is the escape mass 1 - f(1); tables extend by doubling on demand and abort
with TruncationError when a draw is still uncovered at the hard cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError, TruncationError
from .params import ThetaParams, case_of, scalar_summary
from .pgf import series_coeffs

__all__ = [
    "BTriangle",
    "b_triangle",
    "pmf",
    "pmf_oracle",
    "theta0_scaled_tail",
    "OffspringTable",
    "sample_offspring",
    "INFINITE",
]

#: value returned for an explosive offspring draw
INFINITE = math.inf

#: default hard caps for on-demand table extension
K_MAX_RATIO = 10**6  # theta = 0 (two-term ratio recursion, O(K))
K_MAX_TRIANGLE = 10**4  # triangle cases (O(K^2) rebuild)

#: pmf values within this of zero are clamped to exactly zero
_PMF_CLAMP = 1e-12


@dataclass(frozen=True)
class BTriangle:
    """Raw triangle values B_{i,n} for 1 <= i <= n-1, 2 <= n <= n_max.

    Entries grow factorially and are allowed to overflow to +/-inf for large
    n; the sign, which is what the nonnegativity property inspects, survives
    overflow. The pmf route never uses this raw table.
    """

    theta: float
    n_max: int
    table: np.ndarray  # table[n, i]

    def value(self, i: int, n: int) -> float:
        if not (2 <= n <= self.n_max and 1 <= i <= n - 1):
            raise DomainError(f"B_{{{i},{n}}} outside the triangle (n_max={self.n_max})")
        return float(self.table[n, i])

    def row(self, n: int) -> np.ndarray:
        if not 2 <= n <= self.n_max:
            raise DomainError(f"row {n} outside 2..{self.n_max}")
        return self.table[n, 1:n].copy()


def b_triangle(theta: float, n_max: int) -> BTriangle:
    """Full triangle on explicit request; pmf uses a scaled streaming row."""
    if not -1.0 < theta <= 1.0 or theta == 0.0:
        raise DomainError(f"triangle is defined for theta in (-1,0) or (0,1], got {theta}")
    if n_max < 2:
        raise DomainError(f"n_max must be >= 2, got {n_max}")
    t = np.zeros((n_max + 1, n_max + 1))
    t[2, 1] = 1.0 + theta
    idx = np.arange(n_max + 1, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(3, n_max + 1):
            t[n, 1:n] = (n - 2.0 - idx[1:n] * theta) * t[n - 1, 1:n] + (
                1.0 + idx[1:n] * theta
            ) * t[n - 1, 0 : n - 1]
    return BTriangle(theta=theta, n_max=n_max, table=t)


def _pmf_triangle(p: ThetaParams, order: int) -> np.ndarray:
    theta, a, c, big_a = p.theta, p.a, p.c, p.big_a
    probs = np.zeros(order + 1)
    probs[0] = big_a - (a * big_a ** (-theta) + c) ** (-1.0 / theta)
    if order >= 1:
        denom = a + c * big_a**theta
        probs[1] = a * denom ** (-1.0 - 1.0 / theta)
    if order >= 2:
        x = c * big_a**theta / denom
        pref = a * denom ** (-(1.0 + theta) / theta)
        # w[i] = B_{i,n} * x^i * A^(1-n) / n!, advanced one n at a time
        w = np.zeros(order + 1)
        w[1] = (1.0 + theta) * x / (2.0 * big_a)
        probs[2] = pref * w[1]
        idx = np.arange(order + 1, dtype=float)
        grow = 1.0 + idx * theta
        for n in range(3, order + 1):
            w[1:n] = ((n - 2.0 - idx[1:n] * theta) * w[1:n] + grow[1:n] * x * w[0 : n - 1]) / (
                n * big_a
            )
            probs[n] = pref * math.fsum(w[1:n])
    return probs


def _pmf_theta0(p: ThetaParams, order: int) -> np.ndarray:
    a, big_a, q = p.a, p.big_a, p.q
    probs = np.zeros(order + 1)
    probs[0] = big_a - (big_a - q) ** (1.0 - a) * big_a**a
    if order >= 1:
        probs[1] = (big_a - q) ** (1.0 - a) * a * big_a ** (a - 1.0)
    if order >= 2:
        n = np.arange(2, order + 1, dtype=float)
        probs[2:] = probs[1] * np.cumprod((n - a - 1.0) / (n * big_a))
    return probs


def _neg_recip_m(theta: float) -> int | None:
    """m >= 2 when theta = -1/m exactly (within float noise), else None."""
    if not -1.0 < theta < 0.0:
        return None
    m = round(-1.0 / theta)
    if m >= 2 and abs(theta + 1.0 / m) < 1e-12:
        return int(m)
    return None


def _pmf_neg_recip(p: ThetaParams, order: int, m: int) -> np.ndarray:
    a, c, big_a = p.a, p.c, p.big_a
    probs = np.zeros(order + 1)
    probs[0] = big_a - (a * big_a ** (1.0 / m) + c) ** m
    if order == 0:
        return probs
    k = np.arange(1.0, order + 1.0)
    acc = np.zeros(order)
    for j in range(1, m + 1):
        beta = j / m
        pref = math.comb(m, j) * a**j * c ** (m - j)
        if pref == 0.0:
            continue
        # [s^k](A-s)^beta via the ratio (beta-k)/(k+1) * (-1/A)
        w = np.empty(order)
        w[0] = -beta * big_a ** (beta - 1.0)
        if order > 1:
            w[1:] = w[0] * np.cumprod(((beta - k[:-1]) / (k[:-1] + 1.0)) * (-1.0 / big_a))
        acc += pref * w
    probs[1:] = -acc
    return probs


def pmf(p: ThetaParams, order: int) -> np.ndarray:
    """Offspring masses p_0..p_order; clamped at 1e-12, else raises on negatives."""
    if order < 0:
        raise DomainError("order must be >= 0")
    case_of(p)
    m = _neg_recip_m(p.theta)
    if p.theta == -1.0:
        probs = np.zeros(order + 1)
        probs[0] = (1.0 - p.a) * p.q
        if order >= 1:
            probs[1] = p.a
    elif p.theta == 0.0:
        probs = _pmf_theta0(p, order)
    elif m is not None:
        probs = _pmf_neg_recip(p, order, m)
    else:
        probs = _pmf_triangle(p, order)
    if np.any(probs < -_PMF_CLAMP):
        k = int(np.argmax(probs < -_PMF_CLAMP))
        raise NumericError(f"p_{k} = {probs[k]} is negative beyond the clamp tolerance")
    probs[np.abs(probs) < _PMF_CLAMP] = 0.0
    return probs


def pmf_oracle(p: ThetaParams, order: int) -> np.ndarray:
    """Independent pmf route: series extraction of the pgf coefficients."""
    return series_coeffs(p, order).coeffs


def theta0_scaled_tail(p: ThetaParams, n_lo: int, n_hi: int) -> np.ndarray:
    """p_n * A^n for n in [n_lo, n_hi], theta = 0 only.

    The raw masses underflow for A > 1 at large n; the A-free product
    p_n A^n = p_1 A * prod_{k=2..n} (k-1-a)/k stays representable and is what
    the n^(-1-a) tail statement is about.
    """
    if p.theta != 0.0:
        raise DomainError("scaled tail is a theta = 0 diagnostic")
    if not 1 <= n_lo <= n_hi:
        raise DomainError("need 1 <= n_lo <= n_hi")
    a = p.a
    p1_scaled = (p.big_a - p.q) ** (1.0 - a) * a * p.big_a**a
    k = np.arange(2, n_hi + 1, dtype=float)
    scaled = p1_scaled * np.cumprod((k - 1.0 - a) / k)
    out = np.empty(n_hi - n_lo + 1)
    if n_lo == 1:
        out[0] = p1_scaled
        out[1:] = scaled[: n_hi - 1]
    else:
        out[:] = scaled[n_lo - 2 : n_hi - 1]
    return out


class OffspringTable:
    """Sampling table: cumulative masses with the escape mass in front.

    boundaries[0] = p_inf and boundaries[k+1] = p_inf + p_0 + ... + p_k, so a
    uniform draw u maps to Infinite when u < boundaries[0] and to the count k
    whose cell contains it otherwise. Extension doubles the table length and
    reproduces the existing prefix bit for bit (the recursions are
    deterministic), so draws are stable under extension.
    """

    def __init__(self, p: ThetaParams, order: int = 256, k_max: int | None = None):
        self.params = p
        summary = scalar_summary(p)
        self.p_inf = summary.p_inf
        self.f_at_1 = summary.f_at_1
        if k_max is None:
            cheap = p.theta in (0.0, -1.0) or _neg_recip_m(p.theta) is not None
            k_max = K_MAX_RATIO if cheap else K_MAX_TRIANGLE
        self.k_max = int(k_max)
        self._rebuild(min(max(order, 1), self.k_max))

    def _rebuild(self, order: int) -> None:
        probs = pmf(self.params, order)
        self.order = order
        self.probs = probs
        self.tail_mass = max(self.f_at_1 - float(np.sum(probs)), 0.0)
        self.boundaries = np.concatenate(([self.p_inf], self.p_inf + np.cumsum(probs)))

    @property
    def coverage(self) -> float:
        """Total mass the table resolves exactly (everything but tail_mass)."""
        return float(self.boundaries[-1])

    def ensure_coverage(self, u: float) -> bool:
        """Extend by doubling until u falls inside the table; False if capped."""
        while u >= self.boundaries[-1]:
            if self.order >= self.k_max:
                return False
            self._rebuild(min(2 * self.order, self.k_max))
        return True

    def lookup(self, u: float) -> float:
        """Map one uniform draw to a count, Infinite, or raise TruncationError."""
        if u < self.boundaries[0]:
            return INFINITE
        if not self.ensure_coverage(u):
            raise TruncationError(
                f"draw lands beyond k_max={self.k_max} "
                f"(covered mass {self.coverage:.17g})"
            )
        k = int(np.searchsorted(self.boundaries, u, side="right")) - 1
        return k


def sample_offspring(table: OffspringTable, rng: np.random.Generator) -> float:
    """One offspring draw: a nonnegative integer count, or INFINITE.

    Consumes exactly one uniform. Draws beyond the covered mass extend the
    table (doubling up to k_max) and abort loudly with TruncationError rather
    than silently truncating.
    """
    return table.lookup(float(rng.random()))
