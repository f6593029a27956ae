"""Complex special functions: gamma (Spouge rational approximation with
reflection), digamma, Euler-Maclaurin zeta / Hurwitz zeta and their first
s-derivatives, and the exponential integral E1 (power series / continued
fraction crossover at |z| = 4).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
from mpmath import mp, mpf, mpc

from .numerics import DEFAULT_CTX, NumericsError, PoleError


@dataclass(frozen=True)
class EulerMaclaurinParams:
    cutoff: int          # N: terms summed directly
    bernoulli_terms: int  # M: correction terms

    def __post_init__(self):
        if self.cutoff < 1 or self.bernoulli_terms < 1:
            raise ValueError("cutoff and bernoulli_terms must be positive")


class CrossCheckError(NumericsError):
    pass


def _is_int(z, tol=0.0):
    zr = mp.re(z)
    zi = mp.im(z)
    return abs(zi) <= tol and zr == mp.floor(zr)


# --------------------------------------------------------------------------
# gamma via Spouge's approximation

@lru_cache(maxsize=32)
def _spouge_coeffs(a, prec):
    with mp.workprec(prec):
        c = [mp.sqrt(2 * mp.pi)]
        fact = mpf(1)
        for k in range(1, a):
            ak = mpf(a - k)
            c.append(((-1) ** (k - 1)) * ak ** (k - mpf(1) / 2) * mp.exp(ak) / fact)
            fact *= k
        return tuple(c)


def gamma(z, ctx=DEFAULT_CTX):
    """Gamma at context precision; reflection for Re(z) < 1/2."""
    z = mpmath.mpmathify(z)
    if _is_int(z) and mp.re(z) <= 0:
        raise PoleError("gamma pole at z=%s" % mp.nstr(z, 8), kind="gamma",
                        location=z)
    bits = ctx.mantissa_bits
    a = int((bits + 12) / math.log2(2 * math.pi)) + 3
    guard = int(1.5 * a) + 40
    with mp.workprec(bits + guard):
        z = mpmath.mpmathify(z)
        if mp.re(z) < 0.5:
            # gamma(z) = pi / (sin(pi z) gamma(1-z))
            s = mp.sin(mp.pi * z)
            return +(mp.pi / (s * gamma(1 - z, ctx.with_bits(bits + guard))))
        w = z - 1
        coeffs = _spouge_coeffs(a, bits + guard)
        ssum = coeffs[0]
        for k in range(1, a):
            ssum += coeffs[k] / (w + k)
        val = (w + a) ** (w + mpf(1) / 2) * mp.exp(-(w + a)) * ssum
    with mp.workprec(bits):
        return +val


def log_gamma_abs(x, t, ctx=DEFAULT_CTX):
    """log|gamma(x+it)| for bulk asymptotics (Stirling), float accuracy."""
    import scipy.special as ss
    return float(ss.loggamma(complex(x, t)).real)


# --------------------------------------------------------------------------
# digamma via asymptotic series + recurrence

def digamma(z, ctx=DEFAULT_CTX):
    z = mpmath.mpmathify(z)
    if _is_int(z) and mp.re(z) <= 0:
        raise PoleError("digamma pole at z=%s" % mp.nstr(z, 8), kind="digamma",
                        location=z)
    bits = ctx.mantissa_bits
    with mp.workprec(bits + 20):
        z = mpmath.mpmathify(z)
        if mp.re(z) < 0:
            # reflection: psi(1-z) - psi(z) = pi cot(pi z)
            return +(digamma(1 - z, ctx) - mp.pi / mp.tan(mp.pi * z))
        R = max(10.0, 0.12 * bits + 5)
        acc = mpf(0)
        while abs(z) < R or mp.re(z) < R / 2:
            acc -= 1 / z
            z += 1
        # psi(z) ~ ln z - 1/(2z) - sum B_{2j} / (2j z^{2j})
        val = mp.log(z) - 1 / (2 * z) + acc
        z2 = z * z
        zp = z2
        j = 1
        prev = mp.inf
        while True:
            term = mp.bernoulli(2 * j) / (2 * j * zp)
            if abs(term) < mp.eps * (1 + abs(val)) or abs(term) > prev:
                break
            val -= term
            prev = abs(term)
            zp *= z2
            j += 1
            if j > 4 * bits:
                break
    with mp.workprec(bits):
        return +val


# --------------------------------------------------------------------------
# Euler-Maclaurin zeta / Hurwitz zeta with first derivative

def auto_em_params(s, bits):
    """N, M choice: correction-term ratio ~ ((|s|+2M)/(2 pi N))^2 = 1/4."""
    t = abs(float(mp.im(mpmath.mpmathify(s))))
    M = max(10, int((bits + 14) / 2))
    N = int(2 * (t + 2 * M) / (2 * math.pi)) + 10
    return EulerMaclaurinParams(cutoff=N, bernoulli_terms=M)


@lru_cache(maxsize=8)
def _log_cache(prec):
    return {}


@lru_cache(maxsize=64)
def _spf_table(n):
    """Smallest prime factor for 2..n."""
    import numpy as np
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


def _em_hurwitz_core(s, a, params, want_deriv):
    """Euler-Maclaurin for zeta(s, a) at current precision.

    Returns (value, deriv_or_None, error_estimate). The estimate is the
    magnitude of the first omitted Bernoulli term times the standard
    |(s+2M+1)/(sigma+2M+1)| factor.

    For a == 1 the direct sum computes n^{-s} multiplicatively (exp only at
    primes), which dominates the cost at large |Im s|.
    """
    N, M = params.cutoff, params.bernoulli_terms
    logs = _log_cache(mp.prec)
    val = mpc(0)
    dval = mpc(0) if want_deriv else None
    a = mpf(a)
    if a == 1:
        spf = _spf_table(N)
        pw = [None] * (N + 1)
        lnv = [None] * (N + 1)
        val = mpc(1) + val  # n = 1 term
        if want_deriv:
            lnv[1] = mpf(0)
        pw[1] = mpc(1)
        for m in range(2, N + 1):
            p = int(spf[m])
            if p == m:
                ln = logs.get(m)
                if ln is None:
                    ln = mp.log(m)
                    logs[m] = ln
                lnv[m] = ln
                pw[m] = mp.exp(-s * ln)
            else:
                q = m // p
                pw[m] = pw[p] * pw[q]
                lnv[m] = lnv[p] + lnv[q]
            val += pw[m]
            if want_deriv:
                dval -= lnv[m] * pw[m]
    else:
        for n in range(N):
            base = n + a
            key = (float(base))
            ln = logs.get(key)
            if ln is None:
                ln = mp.log(base)
                logs[key] = ln
            p = mp.exp(-s * ln)
            val += p
            if want_deriv:
                dval -= ln * p
    Na = N + a
    lnNa = mp.log(Na)
    pNa = mp.exp(-s * lnNa)             # (N+a)^{-s}
    sm1 = s - 1
    val += pNa * Na / sm1 + pNa / 2
    if want_deriv:
        dval += pNa * Na * (-lnNa / sm1 - 1 / (sm1 * sm1)) - lnNa * pNa / 2
    # Bernoulli corrections: B_{2j}/(2j)! * (s)_{2j-1} * (N+a)^{-(s+2j-1)}
    P = s                                # rising factorial (s)_{2j-1}
    dP = mpc(1) if want_deriv else None
    pw = pNa / Na                        # (N+a)^{-(s+1)}
    inv_Na2 = 1 / (Na * Na)
    for j in range(1, M + 1):
        coef = mp.bernoulli(2 * j) / mp.factorial(2 * j)
        val += coef * P * pw
        if want_deriv:
            dval += coef * (dP - lnNa * P) * pw
        # raise pochhammer order by two: multiply by (s+2j-1), then (s+2j)
        if want_deriv:
            dP = dP * (s + 2 * j - 1) + P
        P = P * (s + 2 * j - 1)
        if want_deriv:
            dP = dP * (s + 2 * j) + P
        P = P * (s + 2 * j)
        pw *= inv_Na2
    # first omitted term, with the standard |.| correction factor
    nxt = abs(mp.bernoulli(2 * M + 2) / mp.factorial(2 * M + 2) * P * pw)
    sigma = mp.re(s)
    corr = abs((s + 2 * M + 1) / (sigma + 2 * M + 1)) if sigma + 2 * M + 1 > 0 else mpf(4)
    est = float(nxt * corr)
    return val, dval, est


def _em_eval(s, a, ctx, params, want_deriv):
    s = mpmath.mpmathify(s)
    if s == 1:
        raise PoleError("zeta pole at s=1", kind="zeta", location=s)
    bits = ctx.mantissa_bits
    if params is None:
        params = auto_em_params(s, bits)
    guard = 20 + int(math.log2(params.cutoff + 2) * 4)
    with mp.workprec(bits + guard):
        s = mpmath.mpmathify(s)
        val, dval, est = _em_hurwitz_core(s, a, params, want_deriv)
    with mp.workprec(bits):
        val = +val
        dval = +dval if want_deriv else None
    return val, dval, est


def zeta(s, ctx=DEFAULT_CTX, params=None):
    """Riemann zeta via Euler-Maclaurin, valid for all s != 1."""
    val, _, est = _em_eval(s, 1, ctx, params, False)
    if params is not None and est > ctx.abs_tol:
        raise NumericsError("EM error estimate %.3g above budget %.3g"
                            % (est, ctx.abs_tol))
    return _realify(val, s)


def zeta_with_error(s, ctx=DEFAULT_CTX, params=None):
    val, _, est = _em_eval(s, 1, ctx, params, False)
    return _realify(val, s), est


def zeta_prime(s, ctx=DEFAULT_CTX, params=None, cross_check=True):
    """d/ds zeta(s): term-by-term analytic derivative of the EM formula,
    optionally cross-checked against a central difference."""
    val, dval, est = _em_eval(s, 1, ctx, params, True)
    if cross_check:
        h_bits = ctx.mantissa_bits // 3
        h = mpf(2) ** (-h_bits)
        cheap = ctx.with_bits(max(64, ctx.mantissa_bits))
        zp = zeta(mpmath.mpmathify(s) + h, cheap, params)
        zm = zeta(mpmath.mpmathify(s) - h, cheap, params)
        fd = (zp - zm) / (2 * h)
        tol = (abs(dval) + 1) * mpf(2) ** (-h_bits + 6)
        if abs(fd - dval) > tol:
            raise CrossCheckError(
                "zeta' cross-check: |analytic - central diff| = %s > %s"
                % (mp.nstr(abs(fd - dval), 6), mp.nstr(tol, 6)))
    return _realify(dval, s)


def hurwitz_zeta(s, a, ctx=DEFAULT_CTX, params=None):
    """zeta(s, a) for 0 < a <= 1; zeta(s, 1) == zeta(s)."""
    a = mpf(a)
    if not 0 < a <= 1:
        raise ValueError("need 0 < a <= 1")
    val, _, _ = _em_eval(s, a, ctx, params, False)
    return _realify(val, s)


def _realify(v, s):
    s = mpmath.mpmathify(s)
    if isinstance(v, mpc) and mp.im(s) == 0 and mp.im(v) == 0:
        return v.real
    return v


# --------------------------------------------------------------------------
# exponential integral E1

def exp_integral_e1(z, ctx=DEFAULT_CTX, method="auto"):
    """Principal-branch E1(z), |arg z| < pi; series for |z| <= 4, continued
    fraction beyond. Conjugate symmetry is exact by construction."""
    z = mpmath.mpmathify(z)
    if z == 0:
        raise PoleError("E1 singular at z=0", kind="e1", location=z)
    if mp.im(z) == 0 and mp.re(z) < 0:
        raise PoleError("E1 branch cut on the negative real axis", kind="e1-branch",
                        location=z)
    if method == "auto":
        method = "series" if abs(z) <= 4 else "cf"
    if method == "series":
        return _e1_series(z, ctx)
    if method == "cf":
        return _e1_cf(z, ctx)
    raise ValueError("unknown method %r" % method)


def _e1_series(z, ctx):
    bits = ctx.mantissa_bits
    guard = 24 + max(0, int(1.5 * float(abs(z))))
    with mp.workprec(bits + guard):
        z = mpmath.mpmathify(z)
        acc = mpc(0)
        term = mpf(1)
        k = 1
        while True:
            term = term * z / k       # z^k / k!
            piece = term / k
            acc += piece if k % 2 == 1 else -piece
            if abs(piece) < mp.eps * (1 + abs(acc)) and k > float(abs(z)):
                break
            k += 1
            if k > 40 * (bits + 40):
                raise NumericsError("E1 series did not converge")
        val = -mp.euler - mp.log(z) + acc
    with mp.workprec(bits):
        return +_realify(val, z)


def _e1_cf(z, ctx):
    bits = ctx.mantissa_bits
    with mp.workprec(bits + 20):
        z = mpmath.mpmathify(z)
        tiny = mpf(2) ** (-2 * mp.prec)
        b = z + 1
        C = b
        D = mpc(0)
        f = b
        for j in range(1, 80 * bits):
            aj = -mpf(j) ** 2
            b = z + 2 * j + 1
            D = b + aj * D
            if D == 0:
                D = tiny
            C = b + aj / C
            if C == 0:
                C = tiny
            D = 1 / D
            delta = C * D
            f *= delta
            if abs(delta - 1) < mp.eps:
                break
        else:
            raise NumericsError("E1 continued fraction did not converge")
        val = mp.exp(-z) / f
    with mp.workprec(bits):
        return +_realify(val, z)
