"""The integral-identity verification engine: two-route checks of every
Laplace / Poisson representation at desk scale, the density-transition rule,
limit recovery of the ordinates and derivative values, and integrability
probes.

UNCONDITIONAL identities are hard-pass (residual <= safety * declared
budget); CONDITIONAL identities produce the same reports but are evidence,
not build gates — the conditional budget items (lambda tails, modeled
truncations) are labeled as such in the budget dict.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mp, mpf, mpc

from . import density as dn
from . import fastmath as fm
from . import specfun as sf
from . import zeros as zr
from . import zeta_core as zc
from .numerics import (DEFAULT_CTX, PrecisionContext, ValueWithBound,
                       quad_finite, quad_semiinfinite)
from .reporting import (CONDITIONAL, UNCONDITIONAL, VerificationReport)


# --------------------------------------------------------------------------
# shared machinery

_P0_MEMO = {}


def _p0_of_y(y, ctx, sign=-1):
    """Memoized P0(pi e^{2*sign*y}) (sign=-1: the y>0-decaying direction)."""
    key = (y._mpf_ if isinstance(y, mpf) else float(y), sign, ctx.mantissa_bits)
    hit = _P0_MEMO.get(key)
    if hit is not None:
        return hit
    with mp.workprec(ctx.mantissa_bits + 60):
        arg = mp.pi * mp.exp(2 * sign * mpf(y))
    val = dn.p0(arg, ctx)
    _P0_MEMO[key] = val
    return val


_GL_CACHE = {}


def _gl_nodes(n):
    """Gauss-Legendre nodes/weights on [-1, 1] lifted to mpf (double-accurate
    nodes; the induced quadrature error ~1e-16 is folded into budgets)."""
    hit = _GL_CACHE.get(n)
    if hit is None:
        x, w = np.polynomial.legendre.leggauss(n)
        hit = ([mpf(v) for v in x], [mpf(v) for v in w])
        _GL_CACHE[n] = hit
    return hit


def panel_quad(f, a, b, ctx, panel=0.125, n_hi=16, n_lo=8):
    """Fixed composite Gauss-Legendre with an embedded lower-order error
    estimate. Panel layout depends only on (a, b, panel), so repeated
    integrals against different analytic weights share every node (and any
    memoized heavy factors)."""
    a = mpf(a)
    b = mpf(b)
    npan = max(1, int(math.ceil(float(b - a) / panel)))
    xs_hi, ws_hi = _gl_nodes(n_hi)
    xs_lo, ws_lo = _gl_nodes(n_lo)
    with mp.workprec(ctx.mantissa_bits + 20):
        h = (b - a) / npan
        total = mpf(0)
        err = 0.0
        scale = 0.0
        for i in range(npan):
            lo = a + i * h
            mid = lo + h / 2
            rad = h / 2
            hi_acc = mpf(0)
            for x, w in zip(xs_hi, ws_hi):
                hi_acc += w * f(mid + rad * x)
            lo_acc = mpf(0)
            for x, w in zip(xs_lo, ws_lo):
                lo_acc += w * f(mid + rad * x)
            hi_acc *= rad
            lo_acc *= rad
            total += hi_acc
            err += float(abs(hi_acc - lo_acc))
            scale += float(abs(hi_acc))
        rounding = scale * (2.0 ** (4 - ctx.mantissa_bits) + 2e-14)
        return ValueWithBound(+total, tail_bound=err, rounding_bound=rounding)


def _p0_abs_pi(ctx):
    """sum ctilde(4k) pi^{2k}: |P0(z)| <= this for |z| <= pi (all-plus)."""
    table = dn.bucket_for(4.0, min(ctx.abs_tol, 1e-30))
    with mp.workprec(96):
        acc = mpf(0)
        k = 1
        while True:
            t = table.ctilde(k) * mp.pi ** (2 * k)
            acc += t
            if t < mpf(1e-40):
                break
            k += 1
        return float(acc)


def modeled_deep_tail(x, y_min, ctx, scan_max=1.35, eps=0.05):
    """Modeled bound for |int_{-inf}^{y_min} e^{sy} P0(pi e^{-2y}) dy|:
    scanned max of |P0| on the feasible range plus the v^{1/4+eps} shape
    extrapolation (eps shrunk near the strip edge to keep the rate positive).
    Declared as modeled, not rigorous."""
    x = float(x)
    t1 = scan_max * math.exp(x * y_min) / x
    eps = min(eps, (x - 0.5) / 3)
    rate = x - 0.5 - 2 * eps
    khat = scan_max / (2800.0 ** (0.25 + eps))
    t2 = khat * math.pi ** (0.25 + eps) * math.exp(rate * y_min) / rate
    return t1 + t2


@dataclass
class DensityShiftSpec:
    r: float                 # simple real zero crossed
    n_prime_at_r: object     # N'(r)


def _mk_report(name, klass, params, safety=5.0):
    return VerificationReport(name=name, klass=klass, params=params,
                              safety_factor=safety)


def _default_samples_v0p():
    return [mpf(2), mpf("0.8"), mpf("1.5"), mpf("2.5"), mpf("3.5"),
            mpc(1, 1), mpc(2, 3), mpc(1, 10), mpc("0.7", 2), mpc(3, 5),
            mpf("0.6"), mpf("3.9"), mpc("3.5", "0.5"), mpc("1.2", 7),
            mpc("2.8", "1.5"), mpf("1.05"), mpc("0.9", 4), mpc(2, 8),
            mpc("3.2", 2), mpf(3)]


# --------------------------------------------------------------------------
# MUT(1): f(s) = int e^{sy} P0(pi e^{-2y}) dy on V(1/2, 4)

def verify_mut1(samples=None, ctx=None, y_min=-4.0, name="mut1"):
    ctx = ctx or PrecisionContext(mantissa_bits=160, abs_tol=1e-8)
    samples = samples or _default_samples_v0p()
    rep = _mk_report(name, UNCONDITIONAL,
                     {"y_min": y_min, "abs_tol": ctx.abs_tol,
                      "strip": "V(1/2, 4)"})
    m_pos = _p0_abs_pi(ctx)
    for s in samples:
        s = mpmath.mpmathify(s)
        x = float(mp.re(s))
        if not 0.5 + 0.05 <= x <= 4 - 0.05:
            raise ValueError("sample %s outside V(0.55, 3.95)" % mp.nstr(s, 6))
        lhs = zc.eval_f(s, ctx)

        def integrand(y, s=s):
            pv = _p0_of_y(y, ctx, sign=-1)
            return mp.exp(s * y) * pv.value

        neg = panel_quad(integrand, y_min, 0, ctx)
        pos = quad_semiinfinite(integrand, 0, 4 - x, m_pos, ctx)
        deep = modeled_deep_tail(x, y_min, ctx)
        with ctx.workprec(20):
            rhs = neg.value + pos.value
            resid = float(abs(lhs - rhs))
        rep.add_sample(s, lhs, rhs, resid, {
            "quadrature": neg.tail_bound + pos.tail_bound,
            "rounding": neg.rounding_bound + pos.rounding_bound,
            "deep_tail_modeled": deep,
        })
    return rep


# --------------------------------------------------------------------------
# MUT(3): F(s) = int_{y>0} e^{sy} P0(pi e^{-2y}) dy for Re(s) < 4

def verify_mut3(samples=None, ctx=None, name="mut3"):
    ctx = ctx or PrecisionContext(mantissa_bits=160, abs_tol=1e-10)
    samples = samples or [mpf(-2), mpf(0), mpf("3.9"), mpc(1, 5), mpf(2),
                          mpc(-3, 2), mpf("0.5"), mpc("3.5", 1), mpf(-8),
                          mpc(0, 3)]
    rep = _mk_report(name, UNCONDITIONAL, {"abs_tol": ctx.abs_tol,
                                           "region": "Re(s) < 4"})
    m_pos = _p0_abs_pi(ctx)
    for s in samples:
        s = mpmath.mpmathify(s)
        x = float(mp.re(s))
        if x >= 4 - 0.05:
            raise ValueError("sample outside Re(s) < 3.95")
        lhs = zr.f_big_series(s, ctx)

        def integrand(y, s=s):
            pv = _p0_of_y(y, ctx, sign=-1)
            return mp.exp(s * y) * pv.value

        rhs = quad_semiinfinite(integrand, 0, 4 - x, m_pos, ctx)
        with ctx.workprec(20):
            resid = float(abs(lhs.value - rhs.value))
        rep.add_sample(s, lhs.value, rhs.value, resid, {
            "series_tail": lhs.tail_bound,
            "quadrature": rhs.tail_bound,
            "rounding": lhs.rounding_bound + rhs.rounding_bound,
        })
    return rep


# --------------------------------------------------------------------------
# MUT(4): (-1)^w f(s) = int e^{sy} P_{4w}(pi e^{-2y}) dy on V_{4w}

def verify_mut4(w=1, samples=None, ctx=None, y_min=-4.0, name="mut4"):
    ctx = ctx or PrecisionContext(mantissa_bits=160, abs_tol=1e-9)
    if samples is None:
        samples = [mpf(6), mpc(5, 5), mpf("4.3"), mpf("7.6"), mpc("6.5", 2),
                   mpc("4.8", 8), mpf(5), mpc("7.2", 1), mpc(6, 12),
                   mpf("5.5")] if w == 1 else None
    if samples is None:
        lo = 4 * w
        samples = [mpf(lo + 2), mpc(lo + 1, 3), mpf(lo + 3.5)]
    rep = _mk_report(name, UNCONDITIONAL,
                     {"w": w, "y_min": y_min, "abs_tol": ctx.abs_tol,
                      "strip": "V(%d, %d)" % (4 * w, 4 * (w + 1))})
    table = dn.bucket_for(4.0, min(ctx.abs_tol, 1e-30))
    with mp.workprec(ctx.mantissa_bits):
        ct4pi2 = table.ctilde(1) * mp.pi ** 2
    m4 = _p0_abs_pi(ctx)  # loose bound for |P4| on args <= pi as well
    density_positive = True
    min_density = float("inf")
    for s in samples:
        s = mpmath.mpmathify(s)
        x = float(mp.re(s))
        if not 4 * w + 0.05 <= x <= 4 * (w + 1) - 0.05:
            raise ValueError("sample outside V_%d margins" % (4 * w))
        with ctx.workprec(20):
            lhs = (-1) ** w * zc.eval_f(s, ctx)
        nodes = []

        def integrand_pos(y, s=s, nodes=nodes):
            pv = dn.p4w(w, mp.pi * mp.exp(-2 * mpf(y)), ctx)
            nodes.append((float(y), float(pv.value)))
            return mp.exp(s * y) * pv.value

        def integrand_neg(y, s=s, nodes=nodes):
            pv = _p0_of_y(y, ctx, sign=-1)
            with mp.workprec(ctx.mantissa_bits + 40):
                p4v = ct4pi2 * mp.exp(-4 * mpf(y)) - pv.value
            nodes.append((float(y), float(p4v)))
            return mp.exp(s * y) * pv.value

        pos = quad_semiinfinite(integrand_pos, 0, 4 * (w + 1) - x, m4, ctx)
        neg_p0 = panel_quad(integrand_neg, y_min, 0, ctx)
        deep = modeled_deep_tail(x, y_min, ctx)
        with ctx.workprec(20):
            rhs = ct4pi2 / (s - 4) - neg_p0.value + pos.value
            resid = float(abs(lhs - rhs))
        for yv, dvv in nodes:
            min_density = min(min_density, dvv)
            if dvv <= 0:
                density_positive = False
        rep.add_sample(s, lhs, rhs, resid, {
            "quadrature": pos.tail_bound + neg_p0.tail_bound,
            "rounding": pos.rounding_bound + neg_p0.rounding_bound,
            "deep_tail_modeled": deep,
        })
    rep.params["density_positive_on_nodes"] = density_positive
    rep.params["min_density_sampled"] = min_density
    if not density_positive:
        rep.passed = False
    return rep


# --------------------------------------------------------------------------
# Corollary 3.2

def verify_cor32(samples=None, ctx=None, name="cor32"):
    ctx = ctx or PrecisionContext(mantissa_bits=160, abs_tol=1e-10)
    samples = samples or [mpf(1), mpc(2, 3), mpf("0.3"), mpf("3.8"),
                          mpc("0.5", 5), mpc("1.7", "0.4"), mpf(2),
                          mpc("3.2", 2), mpf("0.12"), mpc(1, 12)]
    rep = _mk_report(name, UNCONDITIONAL, {"abs_tol": ctx.abs_tol,
                                           "strip": "V(0, 4)"})
    m_pos = _p0_abs_pi(ctx)
    c0 = dn.c0_value(ctx)
    for s in samples:
        s = mpmath.mpmathify(s)
        x = float(mp.re(s))
        if not 0.05 <= x <= 3.95:
            raise ValueError("sample outside V(0.05, 3.95)")
        lhs = zr.p_r(s, ctx)

        # y < 0 piece via u = -y: int_0^inf e^{-su} (c0 - P0(pi e^{-2u})) du
        def integrand_lo(u, s=s):
            pv = _p0_of_y(u, ctx, sign=-1)
            return mp.exp(-s * u) * (c0 - pv.value)

        def integrand_hi(y, s=s):
            pv = _p0_of_y(y, ctx, sign=-1)
            return mp.exp(s * y) * pv.value

        lo = quad_semiinfinite(integrand_lo, 0, x, float(c0) * 1.01, ctx)
        hi = quad_semiinfinite(integrand_hi, 0, 4 - x, m_pos, ctx)
        with ctx.workprec(20):
            rhs = lo.value + hi.value
            resid = float(abs(lhs.value - rhs))
        rep.add_sample(s, lhs.value, rhs, resid, {
            "series_tail": lhs.tail_bound,
            "quadrature": lo.tail_bound + hi.tail_bound,
            "rounding": lhs.rounding_bound + lo.rounding_bound + hi.rounding_bound,
        })
    return rep


# --------------------------------------------------------------------------
# Conditional theorem 5.2: f(s) = int e^{sy} g0(y) dy on V_0

def verify_ct52(derived, samples=None, N=None, ctx=None, name="ct52"):
    ctx = ctx or PrecisionContext(mantissa_bits=160, abs_tol=1e-8)
    samples = samples or [mpf("0.25"), mpf(2), mpf(1), mpc("0.5", 2),
                          mpc("0.25", 5)]
    N = N or derived.table.count
    rep = _mk_report(name, CONDITIONAL, {"N": N, "abs_tol": ctx.abs_tol})
    cst = zr.constants(derived, N)
    c0 = dn.c0_value(ctx)
    m_pos = _p0_abs_pi(ctx)
    bound_density = cst.A_partial + float(c0) + m_pos
    for s in samples:
        s = mpmath.mpmathify(s)
        x = float(mp.re(s))
        if not 0.05 <= x <= 3.95:
            raise ValueError("sample outside V_0 margins")
        lhs = zc.eval_f(s, ctx)
        y_lo = -min(80.0, math.log(bound_density / (x * ctx.abs_tol)) / x)

        def integrand_neg(y, s=s):
            lam = zr.lambda_series(float(y), derived, N)
            pv = _p0_of_y(y, ctx, sign=+1)   # P0(pi e^{2y}), args <= pi
            return mp.exp(s * y) * (lam.value + c0 - pv.value)

        def integrand_pos(y, s=s):
            pv = _p0_of_y(y, ctx, sign=-1)
            return mp.exp(s * y) * pv.value

        neg = quad_finite(integrand_neg, y_lo, 0, ctx,
                          points=list(np.arange(y_lo + 0.25, 0, 0.25)))
        pos = quad_semiinfinite(integrand_pos, 0, 4 - x, m_pos, ctx)
        trunc = bound_density * math.exp(x * y_lo) / x
        lam_budget = (cst.A_tail if math.isfinite(cst.A_tail) else 0.0) / x
        with ctx.workprec(20):
            rhs = neg.value + pos.value
            resid = float(abs(lhs - rhs))
        rep.add_sample(s, lhs, rhs, resid, {
            "quadrature": neg.tail_bound + pos.tail_bound,
            "rounding": neg.rounding_bound + pos.rounding_bound,
            "truncation": trunc,
            "lambda_tail_conditional": lam_budget,
        })
    return rep


# --------------------------------------------------------------------------
# Eq. (*): lambda(y) + c0 - P0(pi e^{2y}) = P0(pi e^{-2y})

def verify_eq_star(derived, ys=(0.0, 0.25, 0.5, 1.0), N=None, ctx=None,
                   name="eqstar"):
    ctx = ctx or PrecisionContext(mantissa_bits=192, abs_tol=1e-20)
    N = N or derived.table.count
    rep = _mk_report(name, CONDITIONAL, {"N": N})
    c0 = dn.c0_value(ctx)
    for y in ys:
        lam = zr.lambda_series(y, derived, N)
        with mp.workprec(ctx.mantissa_bits + 40):
            a1 = mp.pi * mp.exp(2 * mpf(y))
            a2 = mp.pi * mp.exp(-2 * mpf(y))
        p1 = dn.p0(a1, ctx)
        p2 = dn.p0(a2, ctx)
        with ctx.workprec(20):
            resid = float(abs(lam.value + c0 - p1.value - p2.value))
        rep.add_sample(mpf(y), lam.value + c0 - p1.value, p2.value, resid, {
            "lambda_tail_conditional": lam.tail_bound,
            "lambda_rounding": lam.rounding_bound,
            "p0_bounds": p1.total_bound + p2.total_bound,
        })
    return rep


# --------------------------------------------------------------------------
# Conditional theorem 5.3(2): p_i(s) = int_{y>0} sin(sy) 2 e(-y) dy

def verify_ct53_2(derived, samples=None, N=None, ctx=None, name="ct53-2"):
    ctx = ctx or PrecisionContext(mantissa_bits=128, abs_tol=1e-10)
    samples = samples or [mpf(1), mpf(0), mpc(1, 5), mpf(10), mpc(1, 13)]
    N = N or derived.table.count
    rep = _mk_report(name, CONDITIONAL, {"N": N})
    cst = zr.constants(derived, N)
    g1 = float(derived.gammas[0])
    for s in samples:
        s = mpmath.mpmathify(s)
        t_im = abs(float(mp.im(s)))
        if t_im > g1 - 0.5:
            raise ValueError("|Im s| too close to gamma_1")
        if s == 0:
            rep.add_sample(s, mpf(0), mpf(0), 0.0, {"trivial": 1e-300})
            continue
        lhs = zr.p_i(s, derived, N, ctx)

        def integrand(y, s=s):
            ev = zr.e_series(-mpf(y), derived, N, ctx)
            return mp.sin(s * y) * 2 * ev.value

        rate = g1 - t_im
        M = cst.A_partial * 1.05 + 0.01
        rhs = quad_semiinfinite(integrand, 0, rate, M, ctx)
        with ctx.workprec(20):
            resid = float(abs(lhs.value - rhs.value))
        rep.add_sample(s, lhs.value, rhs.value, resid, {
            "pfe_tail": lhs.tail_bound,
            "quadrature": rhs.tail_bound,
            "rounding": lhs.rounding_bound + rhs.rounding_bound,
            "lambda_tail_conditional": cst.A_tail if math.isfinite(cst.A_tail) else 0.0,
        })
    return rep


# --------------------------------------------------------------------------
# Eq. (degree): e(-z) = (z/pi) int_{y>0} lambda(y)/(z^2+y^2) dy

def subclaim_kernel_bound(z):
    """(1/cos|phi|)(1/2 + |phi|/pi) bound for (|z|/pi) int dy/|z^2+y^2|."""
    phi = abs(math.atan2(float(mp.im(mpmath.mpmathify(z))),
                         float(mp.re(mpmath.mpmathify(z)))))
    return (0.5 + phi / math.pi) / math.cos(phi)


def verify_eq_circle(derived, zs=(1.0,), N=None, ctx=None, tol_kernel=1e-4,
                     name="eqcircle"):
    ctx = ctx or PrecisionContext(mantissa_bits=128, abs_tol=1e-7)
    N = N or derived.table.count
    rep = _mk_report(name, CONDITIONAL, {"N": N})
    cst = zr.constants(derived, N)
    for z in zs:
        z = mpmath.mpmathify(z)
        if mp.re(z) <= 0:
            raise ValueError("need Re(z) > 0")
        lhs = zr.e_series(-z, derived, N, ctx)
        Y = max(20.0, cst.A_partial * abs(complex(z)) / (math.pi * tol_kernel))

        def integrand(y, z=z):
            lam = zr.lambda_series(float(y), derived, N)
            return lam.value / (z * z + y * y)

        core = quad_finite(integrand, mpf(0), mpf(Y), ctx,
                           points=list(np.arange(0.25, Y, 0.25)))
        with ctx.workprec(20):
            rhs = (z / mp.pi) * core.value
            resid = float(abs(lhs.value - rhs))
        tail_kernel = cst.A_partial * abs(complex(z)) / (math.pi * Y)
        lam_tail = (cst.A_tail if math.isfinite(cst.A_tail) else 0.0) \
            * subclaim_kernel_bound(z)
        rep.add_sample(z, lhs.value, rhs, resid, {
            "kernel_truncation": tail_kernel,
            "lambda_tail_conditional": lam_tail,
            "quadrature": core.tail_bound * float(abs(z)),
            "rounding": core.rounding_bound + lhs.rounding_bound + lhs.tail_bound,
        })
    return rep


def poisson_v(z, ctx=None, y_cap=None, sup_j=1.35):
    """v(z) = (z/pi) int_{y>0} j(y)/(z^2+y^2) dy, truncated at the precision
    wall with a CONDITIONAL tail bound via sup|j|."""
    ctx = ctx or PrecisionContext(mantissa_bits=128, abs_tol=1e-6)
    z = mpmath.mpmathify(z)
    if mp.re(z) <= 0:
        raise ValueError("need Re(z) > 0")
    cap = y_cap or (dn.y_max(1e-25) - 0.05)

    c0 = dn.c0_value(ctx)

    def integrand(y):
        p_up = _p0_of_y(y, ctx, sign=+1)    # P0(pi e^{2y}) - the deep side
        p_dn = _p0_of_y(y, ctx, sign=-1)
        with mp.workprec(ctx.mantissa_bits + 40):
            jv = -c0 + p_up.value + p_dn.value
        return jv / (z * z + y * y)

    core = panel_quad(integrand, mpf(0), mpf(cap), ctx)
    with ctx.workprec(20):
        val = (z / mp.pi) * core.value
    tail = sup_j * abs(complex(z)) / math.pi / float(cap)
    return ValueWithBound(val, tail_bound=tail + core.tail_bound * float(abs(z)),
                          rounding_bound=core.rounding_bound * float(abs(z)))


def verify_v_vs_e(derived, zs=(0.1,), N=None, ctx=None, name="v-vs-e"):
    """Cross-route v(z) against e(-z) (CONDITIONAL; the key observation is
    that v uses only the coefficient table, no zeros)."""
    ctx = ctx or PrecisionContext(mantissa_bits=128, abs_tol=1e-6)
    N = N or derived.table.count
    rep = _mk_report(name, CONDITIONAL, {"N": N})
    for z in zs:
        z = mpmath.mpmathify(z)
        vv = poisson_v(z, ctx)
        ev = zr.e_series(-z, derived, N, ctx)
        with ctx.workprec(20):
            resid = float(abs(vv.value - ev.value))
            rel = resid / float(abs(ev.value))
        rep.add_sample(z, ev.value, vv.value, resid, {
            "v_truncation_conditional": vv.tail_bound,
            "e_tail": ev.tail_bound,
            "rounding": vv.rounding_bound + ev.rounding_bound,
        })
        rep.params.setdefault("relative", []).append(rel)
    return rep


# --------------------------------------------------------------------------
# Conditional corollary 6.4: i p_{i,+}(i s) = int_{y>0} e^{sy} e(-y) dy

def verify_cc64(derived, samples=None, N=None, ctx=None, name="cc64"):
    ctx = ctx or PrecisionContext(mantissa_bits=128, abs_tol=1e-10)
    samples = samples or [mpf(0), mpf(5), mpf(-10), mpf(10), mpf(-2)]
    N = N or derived.table.count
    rep = _mk_report(name, UNCONDITIONAL, {"N": N, "note": "given A < inf numerically"})
    cst = zr.constants(derived, N)
    g1 = float(derived.gammas[0])
    for s in samples:
        s = mpmath.mpmathify(s)
        x = float(mp.re(s))
        if x > g1 - 0.5:
            raise ValueError("Re(s) too close to gamma_1")
        with ctx.workprec(20):
            lhs_v = zr.p_i_plus(mpc(0, 1) * s, derived, N, ctx)
            lhs = mpc(0, 1) * lhs_v.value

        def integrand(y, s=s):
            ev = zr.e_series(-mpf(y), derived, N, ctx)
            return mp.exp(s * y) * ev.value

        rate = g1 - x
        M = cst.A_partial / 2 * 1.05 + 0.01
        rhs = quad_semiinfinite(integrand, 0, rate, M, ctx)
        with ctx.workprec(20):
            resid = float(abs(lhs - rhs.value))
        rep.add_sample(s, lhs, rhs.value, resid, {
            "pfe_tail": lhs_v.tail_bound,
            "quadrature": rhs.tail_bound,
            "rounding": lhs_v.rounding_bound + rhs.rounding_bound,
        })
    return rep


# --------------------------------------------------------------------------
# Theta kernel and Conditional corollary 6.5

def theta_kernel(theta, z, ctx=DEFAULT_CTX):
    """Theta(theta, z) = (1/2i) sum_{sigma=+-1} e^{-sigma theta z}
    E1(-sigma theta z); needs Im(z) < 0, theta > 0."""
    with ctx.workprec(20):
        z = mpmath.mpmathify(z)
        th = mpf(theta)
        if not th > 0:
            raise ValueError("theta must be positive")
        acc = mpc(0)
        for sig in (1, -1):
            w = -sig * th * z
            acc += mp.exp(w) * sf.exp_integral_e1(w, ctx)
        return +(acc / mpc(0, 2))


def verify_cc65(derived, zs=None, N=None, ctx=None, theta_max=None,
                name="cc65"):
    ctx = ctx or PrecisionContext(mantissa_bits=128, abs_tol=1e-7)
    zs = zs or [mpc(0, -5), mpc(1, -2)]
    N = N or derived.table.count
    rep = _mk_report(name, CONDITIONAL, {"N": N})
    cap = theta_max or (dn.y_max(1e-25) - 0.1)
    sup_j = 1.35
    for z in zs:
        z = mpmath.mpmathify(z)
        if not mp.im(z) < 0:
            raise ValueError("need Im(z) < 0")
        lhs = zr.p_i_plus(z, derived, N, ctx)
        c0 = dn.c0_value(ctx)

        def integrand(th, z=z):
            p_up = _p0_of_y(th, ctx, sign=+1)
            p_dn = _p0_of_y(th, ctx, sign=-1)
            with mp.workprec(ctx.mantissa_bits + 40):
                jv = -c0 + p_up.value + p_dn.value
            return jv * theta_kernel(th, z, ctx)

        core = panel_quad(integrand, mpf("1e-9"), mpf(cap), ctx)
        zc_abs = abs(complex(z))
        tail = sup_j / (float(cap) * zc_abs * abs(float(mp.im(z)))) \
            + sup_j * 2e-9  # theta->0 end: |Theta| ~ |log theta|, j ~ O(theta^2)
        with ctx.workprec(20):
            resid = float(abs(lhs.value - core.value))
        rep.add_sample(z, lhs.value, core.value, resid, {
            "theta_truncation_conditional": tail,
            "pfe_tail": lhs.tail_bound,
            "quadrature": core.tail_bound,
            "rounding": lhs.rounding_bound + core.rounding_bound,
        })
    return rep


# --------------------------------------------------------------------------
# density transition principle

def verify_density_shift(ys=None, ctx=None, name="shift"):
    """m1(y) = P0(pi e^{-2y}) + c(4) e^{-4y} equals -P4(pi e^{-2y}) exactly
    (same coefficient table), plus a closed-form toy-crossing oracle."""
    ctx = ctx or PrecisionContext(mantissa_bits=128, abs_tol=1e-25)
    ys = ys if ys is not None else list(np.linspace(-1.2, 1.2, 100))
    rep = _mk_report(name, UNCONDITIONAL, {"n_y": len(ys)})
    table = dn.bucket_for(40.0, 1e-30)
    with mp.workprec(ctx.mantissa_bits + 60):
        c4 = table.c4(1)
    for y in ys:
        with mp.workprec(ctx.mantissa_bits + 60):
            arg = mp.pi * mp.exp(-2 * mpf(y))
        p0v = dn.p0(arg, ctx)
        p4v = dn.p4w(1, arg, ctx)
        with mp.workprec(ctx.mantissa_bits + 60):
            m1 = p0v.value + c4 * mp.exp(-4 * mpf(y))
            resid = float(abs(m1 + p4v.value))
        rep.add_sample(mpf(y), m1, -p4v.value, resid, {
            "rounding": p0v.rounding_bound + p4v.rounding_bound
            + abs(float(m1)) * 2.0 ** (8 - ctx.mantissa_bits),
            "series_tail": p0v.tail_bound + p4v.tail_bound,
        })
    # toy: N(s) = s(s-1)(s+1), crossing r = 1; closed-form Laplace pairs
    toy = _toy_shift_check(ctx)
    rep.params["toy_max_residual"] = toy
    if toy > 1e-8:
        rep.passed = False
    return rep


def _toy_shift_check(ctx):
    """1/N(s), N = s(s-1)(s+1) on V(0,1) and V(1,inf): densities from the
    partial fractions; crossing r=1 adds e^{-y}/N'(1)."""
    worst = 0.0
    for s in (mpf("0.5"), mpc("0.6", "0.8"), mpf("1.5"), mpc(2, 1)):
        x = float(mp.re(s))
        with mp.workprec(80):
            lhs = 1 / (s * (s - 1) * (s + 1))

            def m0(y):
                # V(0,1): poles {-1,0} on y<0 side, {1} on y>0 side
                return (-mpf(1) + mp.exp(y) / 2) if y < 0 else -mp.exp(-y) / 2

            def m1(y):
                return (-mpf(1) + mp.exp(y) / 2 + mp.exp(-y) / 2) if y < 0 else mpf(0)

            m = m0 if x < 1 else m1
            lo_rate = x if x < 1 else x - 1
            lo = quad_semiinfinite(lambda u: mp.exp(-s * u) * m(-u), 0, lo_rate,
                                   2.0, ctx.with_tol(1e-12))
            if x < 1:
                hi = quad_semiinfinite(lambda y: mp.exp(s * y) * m(y), 0, 1 - x,
                                       1.0, ctx.with_tol(1e-12))
                rhs = lo.value + hi.value
            else:
                rhs = lo.value
            worst = max(worst, float(abs(lhs - rhs)))
    return worst


# --------------------------------------------------------------------------
# integrability probe

def integrability_probe(x, t_max=200.0, ctx=None):
    """Partial int_0^{t_max} |f(x+it)|^p dt for p in {1, 2} plus a
    Stirling-model tail extrapolation; report-only for 0 < x < 1/2."""
    if abs(x - 4 * round(x / 4)) < 1e-9:
        raise ValueError("x on a pole line (multiple of 4)")
    ts = np.linspace(0.05, t_max, 4000)
    log_n = fm.log_n_of_s(x + 1j * ts)
    absf = np.exp(-log_n.real)
    out = {"x": float(x), "t_max": float(t_max),
           "conditional_region": bool(0 < x < 0.5)}
    k1 = (math.pi / 2) ** 0.25 * (2 * math.pi) ** (-x / 2)
    expo = 1.75 + x / 2
    zline = np.abs(fm.zeta_line(0.5 + x, ts[ts > t_max / 2]))
    inv_med = float(np.median(1.0 / zline))
    for p in (1, 2):
        partial = float(np.trapezoid(absf ** p, ts))
        tail = inv_med ** p * (k1 ** -p) * t_max ** (1 - p * expo) / (p * expo - 1)
        out["p%d_partial" % p] = partial
        out["p%d_tail_model" % p] = tail
    return out


# --------------------------------------------------------------------------
# limit recovery of gamma_n and zeta'(1/2 + i gamma_n)

def recover_gamma_n(n, derived, x_grid=None, N=None, ctx=None, route="a"):
    """Route (a): slope of -log((-1)^n ehat(-x, n)) over the grid estimates
    gamma_n; e^{gamma_n x} ehat(-x, n) estimates c(i gamma_n), from which
    zeta'(1/2 + i gamma_n) = 1/(b(i gamma_n) c).

    Route (b): same with v(x) - e(-x, n-1) (CONDITIONAL, wide budget)."""
    if n > 5:
        raise ValueError("recovery limited to n <= 5")
    ctx = ctx or PrecisionContext(mantissa_bits=128, abs_tol=1e-20)
    x_grid = list(x_grid or np.linspace(1.0, 3.0, 9))
    N = N or derived.table.count
    logs = []
    for x in x_grid:
        if route == "a":
            val = zr.e_hat(mpf(-x), n, derived, N, ctx).value
        else:
            vv = poisson_v(mpf(x), ctx)
            with ctx.workprec(20):
                val = vv.value - zr.e_partial(mpf(-x), n - 1, derived, ctx)
        with ctx.workprec(20):
            signed = (-1) ** n * val
            if mp.re(signed) <= 0:
                return {"n": n, "route": route, "sign_pattern_ok": False}
            logs.append(float(mp.log(mp.re(signed))))
    xs = np.asarray(x_grid)
    ls = np.asarray(logs)
    A_mat = np.vstack([xs, np.ones_like(xs)]).T
    slope, icept = np.linalg.lstsq(A_mat, ls, rcond=None)[0]
    gamma_hat = -slope
    out = {"n": n, "route": route, "sign_pattern_ok": True,
           "gamma_hat": float(gamma_hat),
           "gamma_table": float(derived.gammas[n - 1]),
           "gamma_err": float(abs(gamma_hat - derived.gammas[n - 1]))}
    if route == "a":
        x_ref = x_grid[-1]
        gam = derived.refined[n - 1] if n <= len(derived.refined) \
            else mpf(float(derived.gammas[n - 1]))
        with ctx.workprec(30):
            ehat_v = zr.e_hat(mpf(-x_ref), n, derived, N, ctx).value
            c_hat = mp.exp(gam * x_ref) * ehat_v
            zp_hat = 1 / (zc.eval_b(mpc(0, gam), ctx) * c_hat)
            zp_ref = sf.zeta_prime(mpf(1) / 2 + mpc(0, gam), ctx, cross_check=False)
            out["zeta_prime_hat"] = complex(zp_hat)
            out["zeta_prime_ref"] = complex(zp_ref)
            out["zeta_prime_rel_err"] = float(abs(zp_hat - zp_ref) / abs(zp_ref))
    return out
