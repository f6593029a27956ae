"""The core cast built from zeta: l, a, xi, n, f, b, the derivative n',
residue coefficients c(z) = 1/n'(z), and the Stirling asymptotic model for
|b| on vertical strips.

Conventions (all entire unless stated):
    l(s) = pi^{-s/2} 2 Gamma(1 + s/2)      (poles at s = -2, -4, ...)
    a(s) = l(s)(s - 1)
    xi(s) = (1/2) a(s) zeta(s)             (entire; xi(0) = xi(1) = 1/2)
    n(s) = sin(pi s/4) 2 xi(1/2 + s)       (odd, entire)
    f(s) = 1/n(s)
    b(s) = sin(pi s/4) a(1/2 + s)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf, mpc

from . import specfun as sf
from .numerics import DEFAULT_CTX, PoleError, NumericsError


def _near_int(x, tol=1e-12):
    return abs(x - mp.nint(x)) < tol


def eval_l(s, ctx=DEFAULT_CTX):
    with ctx.workprec(20):
        s = mpmath.mpmathify(s)
        val = mp.power(mp.pi, -s / 2) * 2 * sf.gamma(1 + s / 2, ctx)
    with ctx.workprec():
        return +val


def eval_a(s, ctx=DEFAULT_CTX):
    with ctx.workprec(20):
        s = mpmath.mpmathify(s)
        val = eval_l(s, ctx) * (s - 1)
    with ctx.workprec():
        return +val


def eval_xi(s, ctx=DEFAULT_CTX, reflect="auto"):
    """Entire xi; removable points handled by exact limits.

    reflect='auto' reroutes Re(s) deep in the left half-plane through the
    functional equation (dodging the Gamma poles / zeta trivial-zero dance);
    'never' forces the direct product, for independent two-sided checks.
    """
    with ctx.workprec(30):
        s = mpmath.mpmathify(s)
        if s == 1 or s == 0:
            return mpf(1) / 2
        if reflect == "auto" and mp.re(s) < -1:
            return eval_xi(1 - s, ctx, reflect="never")
        if mp.im(s) == 0 and mp.re(s) < 0 and _near_int(mp.re(s)) \
                and int(mp.nint(mp.re(s))) % 2 == 0:
            # exact trivial-zero/Gamma-pole collision: use the reflection
            return eval_xi(1 - s, ctx, reflect="never")
        extra = 30
        if abs(s - 1) < mpf(1) / 4:
            extra += int(-2 * math.log2(float(abs(s - 1)))) + 10
        with ctx.workprec(extra):
            z = sf.zeta(s, ctx.with_bits(ctx.mantissa_bits + extra))
            val = mp.power(mp.pi, -s / 2) * sf.gamma(1 + s / 2, ctx) * (s - 1) * z
    with ctx.workprec():
        return +val


def eval_xi_prime(s, ctx=DEFAULT_CTX):
    """xi'(s) by the product rule (no division by zeta: safe at zeros).

    xi = u G (s-1) z with u = pi^{-s/2}, G = Gamma(1+s/2);
    xi' = u [ -ln(pi)/2 G (s-1) z + G'(1+s/2)/2 (s-1) z + G z + G (s-1) z' ].
    """
    with ctx.workprec(40):
        s = mpmath.mpmathify(s)
        if abs(s - 1) < mpf(1) / 100:
            # cancellation guard near the zeta pole
            extra = int(-2 * math.log2(float(abs(s - 1) + mp.eps))) + 20
        else:
            extra = 0
        wctx = ctx.with_bits(ctx.mantissa_bits + 40 + extra)
        with mp.workprec(wctx.mantissa_bits):
            u = mp.power(mp.pi, -s / 2)
            G = sf.gamma(1 + s / 2, wctx)
            psi = sf.digamma(1 + s / 2, wctx)
            z = sf.zeta(s, wctx)
            zp = sf.zeta_prime(s, wctx, cross_check=False)
            val = u * (-mp.log(mp.pi) / 2 * G * (s - 1) * z
                       + G * psi / 2 * (s - 1) * z
                       + G * z
                       + G * (s - 1) * zp)
    with ctx.workprec():
        return +val


def eval_n(s, ctx=DEFAULT_CTX):
    with ctx.workprec(20):
        s = mpmath.mpmathify(s)
        val = mp.sin(mp.pi * s / 4) * 2 * eval_xi(mpf(1) / 2 + s, ctx)
    with ctx.workprec():
        return +val


def eval_b(s, ctx=DEFAULT_CTX):
    with ctx.workprec(20):
        s = mpmath.mpmathify(s)
        val = mp.sin(mp.pi * s / 4) * eval_a(mpf(1) / 2 + s, ctx)
    with ctx.workprec():
        return +val


def eval_f(s, ctx=DEFAULT_CTX):
    """f = 1/n; at a zero of n raises PoleError classified as the real
    multiple-of-four family or the translated-critical family."""
    with ctx.workprec(20):
        s = mpmath.mpmathify(s)
        nv = eval_n(s, ctx)
        if abs(nv) < mpf(2) ** (-ctx.mantissa_bits // 2):
            x = mp.re(s)
            kind = "real-multiple-of-4" if abs(x - 4 * mp.nint(x / 4)) < mpf(1) / 4 \
                else "critical"
            raise PoleError("f pole near s=%s" % mp.nstr(s, 10), kind=kind, location=s)
        val = 1 / nv
    with ctx.workprec():
        return +val


def eval_n_prime(s, ctx=DEFAULT_CTX, cross_check=False):
    """n'(s) = (pi/4) cos(pi s/4) 2 xi(1/2+s) + sin(pi s/4) 2 xi'(1/2+s)."""
    with ctx.workprec(30):
        s = mpmath.mpmathify(s)
        half = mpf(1) / 2
        val = (mp.pi / 4) * mp.cos(mp.pi * s / 4) * 2 * eval_xi(half + s, ctx) \
            + mp.sin(mp.pi * s / 4) * 2 * eval_xi_prime(half + s, ctx)
        if cross_check:
            h = mpf(2) ** (-(ctx.mantissa_bits // 3))
            fd = (eval_n(s + h, ctx) - eval_n(s - h, ctx)) / (2 * h)
            tol = (abs(val) + 1) * mpf(2) ** (-(ctx.mantissa_bits // 3) + 8)
            if abs(fd - val) > tol:
                raise NumericsError("n' cross-check failed: |diff|=%s > %s"
                                    % (mp.nstr(abs(fd - val), 6), mp.nstr(tol, 6)))
    with ctx.workprec():
        return +val


def coeff_c(z, ctx=DEFAULT_CTX):
    """c(z) = 1/n'(z); undefined when |n'| is below the precision budget."""
    with ctx.workprec(20):
        z = mpmath.mpmathify(z)
        npv = eval_n_prime(z, ctx)
        if abs(npv) < mpf(2) ** (-ctx.mantissa_bits // 2):
            raise PoleError("c(z) undefined: |n'(z)| below budget at z=%s"
                            % mp.nstr(z, 10), kind="nprime-zero", location=z)
        val = 1 / npv
    with ctx.workprec():
        return +val


# --------------------------------------------------------------------------
# Stirling model for |b| on vertical strips

@dataclass(frozen=True)
class StirlingModelB:
    """|b(x+it)| ~ K1(x) |t|^{7/4 + x/2}, K1(x) = (pi/2)^{1/4} (2 pi)^{-x/2}."""
    x0: float
    x1: float

    def k1(self, x):
        if not self.x0 <= x <= self.x1:
            raise ValueError("x outside model range")
        return (math.pi / 2) ** 0.25 * (2 * math.pi) ** (-x / 2)

    def magnitude(self, x, t):
        return self.k1(x) * abs(t) ** (1.75 + x / 2)


def stirling_b_model(x, t):
    """Model magnitude K1(x) |t|^{7/4 + x/2} (plain floats)."""
    return (math.pi / 2) ** 0.25 * (2 * math.pi) ** (-x / 2) \
        * abs(t) ** (1.75 + x / 2)


def stirling_b_deviation(x, t, ctx=DEFAULT_CTX):
    """Relative deviation |b(x+it)| / model - 1."""
    bv = eval_b(mpc(x, t), ctx)
    return float(abs(bv) / stirling_b_model(x, t) - 1)
