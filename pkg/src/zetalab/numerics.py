"""Precision-aware numerics substrate: contexts, error-budgeted values,
adaptive quadrature, compensated summation, bracketed root finding and
log-log envelope fits.

Everything here is pure given immutable inputs; contexts are value-like.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, replace

import mpmath
from mpmath import mp, mpf, mpc


# --------------------------------------------------------------------------
# errors

class NumericsError(Exception):
    pass


class NonFiniteIntegrandError(NumericsError):
    pass


class QuadratureDepthError(NumericsError):
    """Depth/budget exhausted; .best carries the best estimate reached."""

    def __init__(self, msg, best):
        super().__init__(msg)
        self.best = best


class DecayHintViolation(NumericsError):
    pass


class NoSignChangeError(NumericsError):
    pass


class RootBudgetError(NumericsError):
    pass


class EnvelopeError(NumericsError):
    pass


class PrecisionInfeasibleError(NumericsError):
    """Requested evaluation needs more mantissa bits than the ceiling allows."""

    def __init__(self, msg, required_bits):
        super().__init__(msg)
        self.required_bits = required_bits


class PoleError(NumericsError):
    def __init__(self, msg, kind=None, location=None):
        super().__init__(msg)
        self.kind = kind
        self.location = location


# --------------------------------------------------------------------------
# contexts and bounded values

@dataclass(frozen=True)
class PrecisionContext:
    mantissa_bits: int = 128
    abs_tol: float = 1e-30
    max_series_terms: int = 40000
    quad_max_depth: int = 12

    def __post_init__(self):
        if self.mantissa_bits < 64:
            raise ValueError("mantissa_bits must be >= 64")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_series_terms <= 0 or self.quad_max_depth <= 0:
            raise ValueError("series/depth limits must be positive")

    @contextmanager
    def workprec(self, extra=0):
        with mp.workprec(self.mantissa_bits + extra):
            yield

    def with_bits(self, bits):
        return replace(self, mantissa_bits=bits)

    def with_tol(self, tol):
        return replace(self, abs_tol=tol)


DEFAULT_CTX = PrecisionContext()


@dataclass(frozen=True)
class ValueWithBound:
    value: object                 # mpf or mpc
    tail_bound: float = 0.0       # truncation + discretization error
    rounding_bound: float = 0.0   # arithmetic rounding error

    def __post_init__(self):
        if self.tail_bound < 0 or self.rounding_bound < 0:
            raise ValueError("error bounds must be nonnegative")

    @property
    def total_bound(self):
        return self.tail_bound + self.rounding_bound

    def _width(self):
        v = self.value
        parts = (v.real, v.imag) if isinstance(v, mpc) else (v,)
        return max((p._mpf_[3] for p in parts if p), default=53)

    def plus(self, other):
        # widen so combining never silently rounds to the ambient precision
        with mp.workprec(max(mp.prec, self._width(), other._width()) + 8):
            val = self.value + other.value
        return ValueWithBound(val,
                              self.tail_bound + other.tail_bound,
                              self.rounding_bound + other.rounding_bound)

    def scaled(self, factor):
        a = abs(factor)
        with mp.workprec(max(mp.prec, self._width()) + 16):
            val = self.value if factor == 1 else self.value * factor
        return ValueWithBound(val,
                              float(self.tail_bound * a),
                              float(self.rounding_bound * a))


@dataclass(frozen=True)
class Strip:
    """Open/closed vertical strip x0 < Re(s) < x1 (edges per flags)."""
    x0: float = float("-inf")
    x1: float = float("inf")
    closed_left: bool = False
    closed_right: bool = False

    def __post_init__(self):
        if not self.x0 < self.x1:
            raise ValueError("need x0 < x1")

    def contains(self, s):
        x = float(mp.re(s)) if isinstance(s, (mpf, mpc)) else float(
            s.real if isinstance(s, complex) else s)
        lo = x >= self.x0 if self.closed_left else x > self.x0
        hi = x <= self.x1 if self.closed_right else x < self.x1
        return lo and hi


def _isfinite(v):
    if isinstance(v, mpc):
        return mp.isfinite(v.real) and mp.isfinite(v.imag)
    return mp.isfinite(v)


# --------------------------------------------------------------------------
# quadrature

def _checked(f):
    def g(y):
        v = f(y)
        if not _isfinite(mpmath.mpmathify(v)):
            raise NonFiniteIntegrandError("integrand not finite at y=%s" % mp.nstr(mpf(y), 8))
        return v
    return g


def quad_finite(f, a, b, ctx=DEFAULT_CTX, points=None):
    """Adaptive integration of f over [a, b] to ctx.abs_tol.

    Per-interval Gauss-Legendre with reported error; intervals whose estimate
    exceeds their share of the budget are bisected, worst-first, until the
    summed local estimates fall below abs_tol or the depth budget runs out.
    `points` seeds the initial subdivision (known kinks / oscillation scale).
    """
    if not a < b:
        raise ValueError("need a < b")
    g = _checked(f)
    with ctx.workprec(20):
        knots = [mpf(a)] + sorted(mpf(p) for p in (points or []) if a < p < b) + [mpf(b)]
        segs = []
        for lo, hi in zip(knots[:-1], knots[1:]):
            val, err = mp.quad(g, [lo, hi], error=True)
            segs.append((float(err), lo, hi, val))
        max_segs = 2 ** ctx.quad_max_depth
        while sum(e for e, *_ in segs) > ctx.abs_tol:
            if len(segs) >= max_segs:
                total = mp.fsum(s[3] for s in segs)
                errsum = sum(e for e, *_ in segs)
                best = ValueWithBound(total, tail_bound=errsum,
                                      rounding_bound=_round_bound(segs, ctx))
                raise QuadratureDepthError(
                    "subdivision budget exhausted (%d intervals, err=%.3g)"
                    % (len(segs), errsum), best)
            segs.sort(key=lambda s: s[0])
            err, lo, hi, _ = segs.pop()
            mid = (lo + hi) / 2
            for u, v in ((lo, mid), (mid, hi)):
                val, e = mp.quad(g, [u, v], error=True)
                segs.append((float(e), u, v, val))
        total = mp.fsum(s[3] for s in segs)
        errsum = sum(e for e, *_ in segs)
    return ValueWithBound(+total, tail_bound=errsum, rounding_bound=_round_bound(segs, ctx))


def _round_bound(segs, ctx):
    scale = sum(abs(s[3]) for s in segs)
    return float(scale) * 2.0 ** (2 - ctx.mantissa_bits)


def quad_semiinfinite(f, a, decay_rate, decay_const, ctx=DEFAULT_CTX,
                      hint_from=None, points=None):
    """Integrate f over [a, infinity) given |f(y)| <= M e^{-lam y} for y >= Y0.

    Truncates at Y with the analytic tail M e^{-lam Y}/lam folded into the
    tail bound; the decay hint is enforced on every sample at or beyond Y0
    and spot-checked past the truncation point.
    """
    lam = float(decay_rate)
    M = float(decay_const)
    if lam <= 0 or M < 0:
        raise ValueError("need decay rate > 0 and constant >= 0")
    y0 = float(a) if hint_from is None else float(hint_from)
    target = 0.5 * ctx.abs_tol
    Y = max(y0, float(a)) + max(0.0, math.log(max(M, 1e-300) / (lam * target)) / lam)
    tail = M * math.exp(-lam * Y) / lam

    slack = 1.0 + 1e-6

    def checked(y):
        v = f(y)
        fy = float(y)
        if fy >= y0:
            bound = M * math.exp(-lam * fy) * slack + 1e-300
            if abs(v) > bound:
                raise DecayHintViolation(
                    "sampled |f(%.6g)| = %.6g exceeds hint %.6g" % (fy, float(abs(v)), bound))
        return v

    for probe in (Y + 1.0, Y + 2.0, Y + 5.0):
        checked(probe)
    inner_ctx = replace(ctx, abs_tol=max(ctx.abs_tol - tail, ctx.abs_tol * 0.25))
    core = quad_finite(checked, a, Y, inner_ctx, points=points)
    return ValueWithBound(core.value, tail_bound=core.tail_bound + tail,
                          rounding_bound=core.rounding_bound)


# --------------------------------------------------------------------------
# summation

def sum_compensated(terms, ctx=DEFAULT_CTX):
    """Accumulate at widened precision; rounding bound reflects worst-case
    cancellation of the final rounding at the context width."""
    terms = list(terms)
    n = len(terms)
    if n == 0:
        return ValueWithBound(mpf(0))
    guard = max(8, int(math.log2(n + 1)) + 4)
    with ctx.workprec(guard):
        total = mp.fsum(terms, absolute=False)
        abssum = mp.fsum(abs(t) for t in terms)
    rb = float(abssum) * 2.0 ** (1 - ctx.mantissa_bits)
    with ctx.workprec():
        return ValueWithBound(+total, rounding_bound=rb)


# --------------------------------------------------------------------------
# root finding

def find_root(f, lo, hi, ctx=DEFAULT_CTX, max_iter=None):
    """Bracketed bisection/secant hybrid to |f(root)| <= ctx.abs_tol."""
    with ctx.workprec(10):
        a, b = mpf(lo), mpf(hi)
        fa, fb = mpf(f(a)), mpf(f(b))
        if fa == 0:
            return a
        if fb == 0:
            return b
        if mp.sign(fa) * mp.sign(fb) > 0:
            raise NoSignChangeError("f(%s) and f(%s) have the same sign"
                                    % (mp.nstr(a, 8), mp.nstr(b, 8)))
        budget = max_iter if max_iter is not None else 60 + ctx.mantissa_bits
        side = 0
        for _ in range(budget):
            # Illinois-weighted secant step, clipped into the bracket interior
            denom = fb - fa
            if denom != 0:
                m = b - fb * (b - a) / denom
            else:
                m = (a + b) / 2
            if not (a < m < b):
                m = (a + b) / 2
            fm = mpf(f(m))
            if abs(fm) <= ctx.abs_tol:
                return m
            if mp.sign(fm) * mp.sign(fb) < 0:
                a, fa = b, fb
                side = 0
            else:
                if side == 1:
                    fa = fa / 2
                side = 1
            b, fb = m, fm
            if abs(b - a) < mp.eps * (1 + abs(b)):
                if abs(fm) <= ctx.abs_tol * 4:
                    return m
                break
        raise RootBudgetError("no root to |f| <= %.3g within budget" % ctx.abs_tol)


# --------------------------------------------------------------------------
# envelope fitting

def fit_log_envelope(points):
    """Least-squares line through (log g, log q) restricted to running-minimum
    points; the slope estimates the envelope decay exponent (-eps)."""
    pts = list(points)
    if len(pts) < 8:
        raise ValueError("need at least 8 points")
    gs = [float(g) for g, _ in pts]
    if any(g2 <= g1 for g1, g2 in zip(gs[:-1], gs[1:])):
        raise ValueError("abscissae must be strictly increasing")
    env = []
    best = float("inf")
    for g, q in pts:
        q = float(q)
        if q <= 0:
            raise ValueError("ordinates must be positive")
        if q < best:
            best = q
            env.append((math.log(float(g)), math.log(q)))
    if len(env) < 2:
        raise EnvelopeError("fewer than 2 lower-envelope points")
    n = len(env)
    sx = sum(x for x, _ in env)
    sy = sum(y for _, y in env)
    sxx = sum(x * x for x, _ in env)
    sxy = sum(x * y for x, y in env)
    denom = n * sxx - sx * sx
    if denom == 0:
        raise EnvelopeError("degenerate abscissae")
    slope = (n * sxy - sx * sy) / denom
    intercept = (sy - slope * sx) / n
    return slope, intercept
