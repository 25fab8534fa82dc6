"""Continuous-time construction behind the discrete family.

Every law in the family is the time-1 skeleton of a continuous-time Markov
branching process: particles live Exp(lambda) lifetimes and branch by an
offspring pgf h, and the discrete pgf iterates interpolate to the semigroup
F_t = eval at real t. This module builds (h, lambda, mu = h'(1)) per case,
expands h into coefficients, and checks the defining identity

    integral_{s}^{F_t(s)} dx / (h(x) - x) = lambda * t

by adaptive quadrature. The integrand has a simple pole at the extinction
limit q (and at 1 for proper h), so callers must keep the path on one side.

Four shapes of h arise:

  - a-geq-1 and critical/supercritical A = 1, theta > 0 ("mu form"):
        h(s) = 1 - mu*(1-s) + mu/(1+theta)*(1-s)^(1+theta)
  - theta != 0 with general (A, q) pinned at both ends ("Aq form"):
        h(s) = s + ((A-s)^(1+theta) - (A-q)^theta*(A-s)) / D,
        D = (1+theta)*A^theta - (A-q)^theta
  - theta = 0 ("log form"): h(s) = s + (A-s)*(ln(A-s) - ln(A-q)) / E,
        E = 1 + ln A - ln(A-q); for A = 1 the coefficients are the explicit
        h_k = (1-h_0)/(k(k-1)), and A > 1 is its dual rescaling
  - the two-point branch: h identically q (defective: escape mass 1-q)

mu may be infinite (A = 1 with theta <= 0 shapes); lambda is always a
positive rate after fixing the sign of ln a per branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NumericError, SingularPathError
from .params import CaseTag, ThetaParams, case_of
from .pgf import SeriesTruncation, eval_fn
from .series import Series

__all__ = [
    "Embedding",
    "build_embedding",
    "h_eval",
    "h_coeffs",
    "semigroup_F",
    "integral_residual",
]

_H1_CLAMP = 1e-12


@dataclass(frozen=True)
class Embedding:
    params: ThetaParams
    tag: CaseTag
    form: str  # "mu" | "aq" | "log" | "const"
    lam: float
    mu: float  # h'(1), may be inf
    h_at_1: float  # 1 for proper h, q for the two-point branch
    mu_param: float | None = None  # the mu of the mu form


def build_embedding(p: ThetaParams) -> Embedding:
    tag = case_of(p)
    theta, a, q, big_a = p.theta, p.a, p.q, p.big_a
    cid = tag.case_id
    if cid == "case6":
        form, lam, mu, h1, mu_param = "const", math.log(1.0 / a), 0.0, q, None
    elif cid == "case1":
        d = p.d
        mu_param = (1.0 + theta) * d / ((1.0 + theta) * d + 1.0)
        lam = ((1.0 + 1.0 / theta) * d + 1.0 / theta) * math.log(a)
        form, mu, h1 = "mu", mu_param, 1.0
    elif cid == "case2":
        mu_param = 1.0
        lam = (1.0 + 1.0 / theta) * p.c
        form, mu, h1 = "mu", 1.0, 1.0
    elif cid == "case3":
        mu_param = (1.0 + theta) / ((1.0 + theta) - (1.0 - q) ** theta)
        lam = ((1.0 + 1.0 / theta) * (1.0 - q) ** (-theta) - 1.0 / theta) * math.log(
            1.0 / a
        )
        form, mu, h1 = "mu", mu_param, 1.0
    elif theta == 0.0:
        ee = 1.0 + math.log(big_a) - math.log(big_a - q)
        lam = ee * math.log(1.0 / a)
        if big_a == 1.0:
            mu = math.inf
        else:
            mu = 1.0 + (math.log((big_a - q) / (big_a - 1.0)) - 1.0) / ee
        form, h1, mu_param = "log", 1.0, None
    else:
        lam = (
            (1.0 + 1.0 / theta) * big_a**theta * (big_a - q) ** (-theta) - 1.0 / theta
        ) * math.log(1.0 / a)
        if big_a == 1.0:
            mu = math.inf
        else:
            dd = (1.0 + theta) * big_a**theta - (big_a - q) ** theta
            mu = 1.0 + ((big_a - q) ** theta - (1.0 + theta) * (big_a - 1.0) ** theta) / dd
        form, h1, mu_param = "aq", 1.0, None
    if not lam > 0.0:
        raise NumericError(f"rate came out nonpositive ({lam}) for {cid}")
    if form == "mu" and not 0.0 < mu_param <= 1.0 + 1.0 / theta:
        raise DomainError(
            f"offspring mean parameter {mu_param} outside (0, 1+1/theta] for {cid}"
        )
    e = Embedding(
        params=p, tag=tag, form=form, lam=lam, mu=mu, h_at_1=h1, mu_param=mu_param
    )
    # the A > 1 laws with q < 1 keep an instantaneous escape mass: h(1) < 1
    h1 = float(h_eval(e, 1.0))
    e = Embedding(
        params=p, tag=tag, form=form, lam=lam, mu=mu, h_at_1=h1, mu_param=mu_param
    )
    hq = h_eval(e, q)
    if abs(hq - q) > 1e-12:
        raise NumericError(f"h({q}) = {hq} != q for {cid}")
    return e


def h_eval(e: Embedding, s):
    p = e.params
    theta, q, big_a = p.theta, p.q, p.big_a
    ss = np.asarray(s, dtype=float)
    if np.any(ss < 0.0) or np.any(ss > 1.0):
        raise DomainError("h is evaluated on [0, 1]")
    if e.form == "const":
        val = np.full_like(ss, q)
    elif e.form == "mu":
        mu = e.mu_param
        one_m = 1.0 - ss
        val = 1.0 - mu * one_m + mu / (1.0 + theta) * one_m ** (1.0 + theta)
    elif e.form == "aq":
        dd = (1.0 + theta) * big_a**theta - (big_a - q) ** theta
        val = ss + ((big_a - ss) ** (1.0 + theta) - (big_a - q) ** theta * (big_a - ss)) / dd
    else:  # log
        ee = 1.0 + math.log(big_a) - math.log(big_a - q)
        with np.errstate(divide="ignore", invalid="ignore"):
            raw = ss + (big_a - ss) * (np.log(big_a - ss) - math.log(big_a - q)) / ee
        # (A-s)ln(A-s) -> 0 as s -> A; only reachable when A = 1
        val = np.where(ss == big_a, ss + 0.0, raw)
        if big_a == 1.0:
            val = np.where(ss == 1.0, 1.0, val)
    return float(val) if np.ndim(s) == 0 else val


def h_coeffs(e: Embedding, order: int) -> SeriesTruncation:
    """Offspring coefficients h_0..h_order with the unresolved mass bound."""
    if order < 0:
        raise DomainError("order must be >= 0")
    p = e.params
    theta, q, big_a = p.theta, p.q, p.big_a
    if e.form == "const":
        coeffs = np.zeros(order + 1)
        coeffs[0] = q
    elif e.form == "mu":
        mu = e.mu_param
        base = Series.affine(1.0, -1.0, order)
        ser = 1.0 - mu * base + (mu / (1.0 + theta)) * base.pow(1.0 + theta)
        coeffs = ser.coeffs.copy()
    elif e.form == "aq":
        dd = (1.0 + theta) * big_a**theta - (big_a - q) ** theta
        base = Series.affine(big_a, -1.0, order)
        ser = Series.identity(order) + (
            base.pow(1.0 + theta) - (big_a - q) ** theta * base
        ) * (1.0 / dd)
        coeffs = ser.coeffs.copy()
    else:
        # A = 1: h_0 = -L/(1-L) with L = ln(1-q), h_k = (1-h_0)/(k(k-1));
        # A > 1 is the dual rescale h_k -> h_k * A^(1-k) at q -> q/A.
        q_hat = q / big_a
        ll = math.log(1.0 - q_hat)
        h0 = -ll / (1.0 - ll)
        coeffs = np.zeros(order + 1)
        coeffs[0] = h0
        k = np.arange(2, order + 1, dtype=float)
        if order >= 2:
            coeffs[2:] = (1.0 - h0) / (k * (k - 1.0))
        coeffs *= big_a ** (1.0 - np.arange(order + 1, dtype=float))
    if order >= 1:
        if abs(coeffs[1]) > _H1_CLAMP:
            raise NumericError(f"linear coefficient {coeffs[1]} did not cancel")
        coeffs[1] = 0.0
    if np.any(coeffs < -_H1_CLAMP):
        k = int(np.argmax(coeffs < -_H1_CLAMP))
        raise NumericError(f"h_{k} = {coeffs[k]} negative")
    coeffs[np.abs(coeffs) < _H1_CLAMP] = 0.0
    tail = max(e.h_at_1 - float(np.sum(coeffs)), 0.0)
    return SeriesTruncation(coeffs=coeffs, tail_mass_bound=tail)


def semigroup_F(e: Embedding, t: float, s):
    """F_t(s) for real t >= 0; F_0 = id and F_1 is the one-step pgf."""
    if t < 0.0:
        raise DomainError("the semigroup runs forward only")
    return eval_fn(e.params, t, s)


def integral_residual(e: Embedding, t: float, s: float) -> float:
    """integral_s^{F_t(s)} dx/(h(x)-x) minus lambda*t; magnitude ~ 0 when the
    flow, the rate, and h are mutually consistent."""
    if not 0.0 <= s <= 1.0:
        raise DomainError("s must lie in [0, 1]")
    if t == 0.0:
        return 0.0
    q = e.params.q
    if abs(s - q) <= 1e-12:
        raise SingularPathError(f"s = {s} sits at the zero of h(x)-x at {q}")
    target = e.lam * float(t)
    upper = float(semigroup_F(e, float(t), s))
    lo, hi = min(s, upper), max(s, upper)
    if lo - 1e-12 <= q <= hi + 1e-12:
        raise SingularPathError(
            f"integration path [{lo}, {hi}] meets the zero of h(x)-x at {q}"
        )
    if lo == hi:
        # F_t(s) = s with t > 0 only at a fixed point, where h(x) = x
        raise SingularPathError(f"s = {s} is a fixed point of the flow")

    def integrand(x: float) -> float:
        return 1.0 / (h_eval(e, x) - x)

    value, _err = quad(integrand, s, upper, epsabs=1e-10, epsrel=1e-10, limit=200)
    return value - target
