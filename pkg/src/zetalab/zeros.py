"""Zero-table ingestion and everything built from the ordinates gamma_k:
gap statistics, residue coefficients c(i gamma_k), the series constants
A, B°, C°, the cosine/exponential series lambda and e, bounded partial
fraction evaluation, the F / p_r / p_i / p_{i,+} builders, Hadamard-product
checks, the bulge path with j_k(alpha), empirical conjecture exponents and
the lambda running-minimum scan.

Bulk per-k data (k > n_high) comes from the vectorized double-precision
Riemann-Siegel pipeline (relative accuracy ~1e-5, folded into bounds);
k <= n_high uses the full mpmath route, and the first n_refine zeros are
Newton-refined with a two-route cross-check on c(i gamma_k).
"""
from __future__ import annotations

import hashlib
import math
import pickle
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np
from mpmath import mp, mpf, mpc

from . import fastmath as fm
from . import specfun as sf
from . import zeta_core as zc
from .numerics import (DEFAULT_CTX, NumericsError, PoleError, PrecisionContext,
                       ValueWithBound, fit_log_envelope)


class ZeroTableError(NumericsError):
    pass


class RefineError(NumericsError):
    pass


# --------------------------------------------------------------------------
# ingestion

@dataclass(frozen=True)
class ZeroTable:
    gammas: np.ndarray            # ascending positive ordinates, float64
    count: int
    source_digits: int
    path: str = ""
    checksum: str = ""

    def __post_init__(self):
        g = self.gammas
        if g.size == 0:
            raise ZeroTableError("empty zero table")
        if not (14.0 < g[0] < 15.0):
            raise ZeroTableError("first ordinate %.6f outside (14, 15)" % g[0])
        if g.min() <= 13.0:
            raise ZeroTableError("ordinates must exceed 13")
        if np.any(np.diff(g) <= 0):
            k = int(np.nonzero(np.diff(g) <= 0)[0][0])
            raise ZeroTableError("ordinates not strictly ascending at line %d" % (k + 2))


CACHE_VERSION = 2


def ingest_zero_table(path, expected_count=None):
    """Parse a plain-text table (one ascending decimal ordinate per line);
    results are cached in a checksummed binary sidecar."""
    p = Path(path)
    if not p.exists():
        raise ZeroTableError("no zero table at %s" % path)
    raw = p.read_bytes()
    checksum = hashlib.sha256(raw).hexdigest()
    sidecar = p.with_suffix(p.suffix + ".npz")
    if sidecar.exists():
        try:
            z = np.load(sidecar, allow_pickle=False)
            if (int(z["version"]) == CACHE_VERSION
                    and str(z["checksum"]) == checksum):
                table = ZeroTable(gammas=z["gammas"], count=int(z["count"]),
                                  source_digits=int(z["digits"]),
                                  path=str(p), checksum=checksum)
                _check_count(table, expected_count)
                return table
        except Exception:
            pass
    lines = raw.decode("ascii").split()
    if not lines:
        raise ZeroTableError("empty zero table file %s" % path)
    try:
        gammas = np.array([float(tok) for tok in lines], dtype=float)
    except ValueError as e:
        raise ZeroTableError("parse failure: %s" % e) from None
    digits = 0
    if "." in lines[0]:
        digits = len(lines[0].split(".", 1)[1])
    table = ZeroTable(gammas=gammas, count=gammas.size, source_digits=digits,
                      path=str(p), checksum=checksum)
    _check_count(table, expected_count)
    try:
        np.savez_compressed(sidecar, version=CACHE_VERSION, checksum=checksum,
                            gammas=gammas, count=gammas.size, digits=digits)
    except Exception:
        pass
    return table


def _check_count(table, expected_count):
    if expected_count is not None and table.count != expected_count:
        raise ZeroTableError("expected %d ordinates, found %d"
                             % (expected_count, table.count))


# --------------------------------------------------------------------------
# refinement

def refine_zero(gamma_seed, ctx=None, basin_radius=0.3, max_steps=50):
    """Newton on the real-valued critical-line function xi(1/2 + i t),
    from a tabulated seed to context precision."""
    ctx = ctx or PrecisionContext(mantissa_bits=256, abs_tol=1e-60)
    digits = int(ctx.mantissa_bits * 0.301) - 4
    with ctx.workprec(20):
        t = mpf(gamma_seed)
        for _ in range(max_steps):
            x = zc.eval_xi(mpf(1) / 2 + mpc(0, t), ctx)
            xp = zc.eval_xi_prime(mpf(1) / 2 + mpc(0, t), ctx)
            g = x.real          # xi(1/2+it) is real
            gp = (mpc(0, 1) * xp).real
            if gp == 0:
                raise RefineError("flat derivative at t=%s" % mp.nstr(t, 12))
            step = g / gp
            if abs(step) > basin_radius:
                raise RefineError("Newton step %.3g leaves the basin"
                                  % float(abs(step)))
            t = t - step
            if abs(t - mpf(gamma_seed)) > basin_radius:
                raise RefineError("iterate left the seed basin")
            if abs(step) <= mpf(10) ** (-digits):
                return +t
        raise RefineError("no convergence in %d steps" % max_steps)


# --------------------------------------------------------------------------
# derived data

@dataclass
class ZeroDerived:
    table: ZeroTable
    delta: np.ndarray              # min adjacent gap per k (available sides)
    delta_prime: np.ndarray        # min(1/log gamma, gaps)
    c: np.ndarray                  # c(i gamma_k), float64 (theoretically real)
    im_c_rel: np.ndarray           # |Im c| / |c| diagnostic per k (mp route)
    zeta_prime_abs: np.ndarray     # |zeta'(1/2 + i gamma_k)|
    n_high: int
    n_refine: int
    c_hp: list = field(default_factory=list)        # mpf, k <= n_high (index 0 = k=1)
    refined: list = field(default_factory=list)     # mpf gamma_k, k <= n_refine
    two_route_rel: np.ndarray = None                # k <= n_refine
    flagged: list = field(default_factory=list)     # suspicious |zeta'| entries

    @property
    def gammas(self):
        return self.table.gammas

    def c_of(self, k):
        """c(i gamma_k) (1-based k): mpf for k <= n_high, float beyond."""
        if k <= len(self.c_hp):
            return self.c_hp[k - 1]
        return mpf(self.c[k - 1])


def _derive_cache_path(table):
    return Path(table.path + ".derived.pkl") if table.path else None


def derive(table, ctx=DEFAULT_CTX, n_high=1000, n_refine=100, use_cache=True):
    """Populate per-k derived data. |zeta'| below budget at some k is flagged
    (a numerical double-zero signal), not fatal."""
    n_high = min(n_high, table.count)
    n_refine = min(n_refine, n_high)
    cachep = _derive_cache_path(table)
    if use_cache and cachep and cachep.exists():
        try:
            with open(cachep, "rb") as fh:
                payload = pickle.load(fh)
            if (payload["version"] == CACHE_VERSION
                    and payload["checksum"] == table.checksum
                    and payload["n_high"] >= n_high
                    and payload["n_refine"] >= n_refine
                    and payload["bits"] >= ctx.mantissa_bits):
                return _derived_from_payload(table, payload)
        except Exception:
            pass
    g = table.gammas
    fwd = np.diff(g)
    prev_gap = np.concatenate(([np.inf], fwd))   # k = 1: predecessor omitted
    next_gap = np.concatenate((fwd, [np.inf]))   # k = N: successor omitted
    delta = np.minimum(prev_gap, next_gap)
    delta_prime = np.minimum(1.0 / np.log(g), delta)

    c_bulk, _im_bulk = fm.c_at_zeros(g)
    zp_bulk = np.abs(fm.zeta_prime_at_zero(g))

    c = c_bulk.copy()
    zeta_prime_abs = zp_bulk.copy()
    im_c_rel = np.zeros_like(c)
    c_hp = []
    flagged = []
    zp_floor = 10.0 ** (-ctx.mantissa_bits * 0.15)
    with ctx.workprec(20):
        for k in range(1, n_high + 1):
            gam = mpf(float(g[k - 1]))
            s = mpf(1) / 2 + mpc(0, gam)
            zp = sf.zeta_prime(s, ctx, cross_check=False)
            bv = zc.eval_b(mpc(0, gam), ctx)
            ck = 1 / (bv * zp)
            c_hp.append(ck.real)
            c[k - 1] = float(ck.real)
            zeta_prime_abs[k - 1] = float(abs(zp))
            im_c_rel[k - 1] = float(abs(ck.imag) / abs(ck))
            if abs(zp) < zp_floor:
                flagged.append(k)

    refined = []
    two_route = np.zeros(n_refine)
    rctx = PrecisionContext(mantissa_bits=max(256, ctx.mantissa_bits),
                            abs_tol=min(ctx.abs_tol, 1e-45))
    with rctx.workprec(20):
        for k in range(1, n_refine + 1):
            gam = refine_zero(float(g[k - 1]), rctx)
            refined.append(gam)
            z = mpc(0, gam)
            route_a = zc.coeff_c(z, rctx)
            zp = sf.zeta_prime(mpf(1) / 2 + z, rctx, cross_check=False)
            route_b = 1 / (zc.eval_b(z, rctx) * zp)
            two_route[k - 1] = float(abs(route_a - route_b) / abs(route_b))
            c_hp[k - 1] = route_b.real
            c[k - 1] = float(route_b.real)
            im_c_rel[k - 1] = float(abs(route_b.imag) / abs(route_b))

    d = ZeroDerived(table=table, delta=delta, delta_prime=delta_prime, c=c,
                    im_c_rel=im_c_rel, zeta_prime_abs=zeta_prime_abs,
                    n_high=n_high, n_refine=n_refine, c_hp=c_hp,
                    refined=refined, two_route_rel=two_route, flagged=flagged)
    if use_cache and cachep:
        try:
            payload = {
                "version": CACHE_VERSION, "checksum": table.checksum,
                "n_high": n_high, "n_refine": n_refine,
                "bits": ctx.mantissa_bits,
                "delta": delta, "delta_prime": delta_prime, "c": c,
                "im_c_rel": im_c_rel, "zeta_prime_abs": zeta_prime_abs,
                "c_hp": [x._mpf_ for x in c_hp],
                "refined": [x._mpf_ for x in refined],
                "two_route": two_route, "flagged": flagged,
            }
            with open(cachep, "wb") as fh:
                pickle.dump(payload, fh)
        except Exception:
            pass
    return d


def _derived_from_payload(table, payload):
    return ZeroDerived(
        table=table, delta=payload["delta"], delta_prime=payload["delta_prime"],
        c=payload["c"], im_c_rel=payload["im_c_rel"],
        zeta_prime_abs=payload["zeta_prime_abs"], n_high=payload["n_high"],
        n_refine=payload["n_refine"],
        c_hp=[mp.make_mpf(t) for t in payload["c_hp"]],
        refined=[mp.make_mpf(t) for t in payload["refined"]],
        two_route_rel=payload["two_route"], flagged=payload["flagged"])


# --------------------------------------------------------------------------
# series constants

@dataclass(frozen=True)
class SeriesConstants:
    N: int
    A_partial: float
    B0_partial: float
    C0_partial: float
    A_tail: float
    B0_tail: float
    C0_tail: float


def _powerlaw_tail(values, N):
    """Fit |v_k| ~ K k^{-j} on the last decade and integrate beyond N."""
    k0 = max(1, N // 10 * 5)
    ks = np.arange(k0, N + 1)
    vs = np.abs(values[k0 - 1:N])
    mask = vs > 0
    if mask.sum() < 8:
        return float("nan")
    coeff = np.polyfit(np.log(ks[mask]), np.log(vs[mask]), 1)
    j = -coeff[0]
    K = math.exp(coeff[1])
    if j <= 1.01:
        return float("inf")
    return K * N ** (1 - j) / (j - 1)


def constants(derived, N=None):
    N = N or derived.table.count
    N = min(N, derived.table.count)
    c = np.abs(derived.c[:N])
    g = derived.gammas[:N]
    dp = derived.delta_prime[:N]
    A = 2 * float(c.sum())
    B0 = float((c / dp).sum())
    C0 = float((c / g ** 2).sum())
    return SeriesConstants(
        N=N,
        A_partial=A, B0_partial=B0, C0_partial=C0,
        A_tail=2 * _powerlaw_tail(c, N),
        B0_tail=_powerlaw_tail(c / dp, N),
        C0_tail=_powerlaw_tail(c / g ** 2, N))


# --------------------------------------------------------------------------
# lambda and e series

def lambda_series(y, derived, N=None, tail=None):
    """lambda(y) = 2 sum c(i gamma_k) cos(gamma_k y); even in y exactly."""
    N = min(N or derived.table.count, derived.table.count)
    yy = abs(float(y))
    g = derived.gammas[:N]
    c = derived.c[:N]
    val = 2.0 * float(np.dot(c, np.cos(g * yy)))
    if tail is None:
        tail = 2 * abs(_powerlaw_tail(np.abs(c), N))
    rounding = 2 * float(np.abs(c).sum()) * N * 2.2e-16
    return ValueWithBound(mpf(val), tail_bound=float(tail), rounding_bound=rounding)


def lambda_c_series(y, derived, N=None, tail=None):
    lam = lambda_series(y, derived, N, tail)
    return lam.scaled(0.5)


def lambda_s_series(y, derived, N=None, tail=None):
    """lambda_s(y) = sum c(i gamma_k) sin(gamma_k y); odd in y exactly."""
    N = min(N or derived.table.count, derived.table.count)
    yy = float(y)
    g = derived.gammas[:N]
    c = derived.c[:N]
    val = float(np.dot(c, np.sin(g * yy)))
    if tail is None:
        tail = abs(_powerlaw_tail(np.abs(c), N))
    rounding = float(np.abs(c).sum()) * N * 2.2e-16
    return ValueWithBound(mpf(val), tail_bound=float(tail), rounding_bound=rounding)


def e_series(z, derived, N=None, ctx=DEFAULT_CTX):
    """e(z) = sum c(i gamma_k) exp(gamma_k z) for Re(z) <= 0."""
    N = min(N or derived.table.count, derived.table.count)
    with mp.workprec(64):
        zz = mpmath.mpmathify(z)
        x = float(mp.re(zz))
    if x > 0:
        raise ValueError("e(z) needs Re(z) <= 0")
    g = derived.gammas
    cN = derived.c
    tail_all = abs(_powerlaw_tail(np.abs(cN[:N]), N))
    if x < -0.05:
        # mpf route over the high-precision prefix; the rest decays away
        kmax = min(N, len(derived.c_hp))
        with ctx.workprec(30):
            acc = mpc(0)
            for k in range(kmax):
                gam = mpf(float(g[k]))
                acc += derived.c_hp[k] * mp.exp(gam * zz)
                if k > 4 and abs(derived.c_hp[k]) * mp.exp(gam * x) < ctx.abs_tol / 8:
                    break
            val = +acc
        rest = 0.0
        if kmax < N:
            rest = float(np.abs(cN[kmax:N]).sum() * math.exp(g[kmax] * x))
        tail = tail_all * math.exp(g[min(N, g.size) - 1] * x) + rest + float(ctx.abs_tol)
        return ValueWithBound(val, tail_bound=tail, rounding_bound=0.0)
    ww = complex(zz)
    vals = cN[:N] * np.exp(g[:N] * ww)
    val = complex(vals.sum())
    tail = tail_all * math.exp(g[N - 1] * x)
    rounding = float(np.abs(vals).sum()) * N * 2.2e-16
    return ValueWithBound(mpc(val), tail_bound=float(tail), rounding_bound=rounding)


def e_partial(z, n, derived, ctx=DEFAULT_CTX):
    """e(z, n) = sum_{1<=k<=n} c(i gamma_k) exp(gamma_k z) (exact order)."""
    with ctx.workprec(30):
        zz = mpmath.mpmathify(z)
        acc = mpc(0)
        for k in range(1, n + 1):
            acc += derived.c_of(k) * mp.exp(mpf(float(derived.gammas[k - 1])) * zz)
        return +acc


def e_hat(z, n, derived, N=None, ctx=DEFAULT_CTX):
    """ehat(z, n) = e(z) - e(z, n-1), same summation order (exact identity)."""
    full = e_series(z, derived, N, ctx)
    part = e_partial(z, n - 1, derived, ctx)
    with ctx.workprec(30):
        val = full.value - part
    return ValueWithBound(val, tail_bound=full.tail_bound,
                          rounding_bound=full.rounding_bound)


# --------------------------------------------------------------------------
# bounded partial fractions

class PoleProximityError(NumericsError):
    pass


def claim_tail_factor(r, d, p):
    """1/j with j = 1 - (r/(r+d))^p (outer-term bound factor)."""
    j = 1.0 - (r / (r + d)) ** p
    return 1.0 / j


def pfe_bounded_eval(terms, s, p=1, exclusion=0.05, tail_abs=0.0,
                     ctx=DEFAULT_CTX):
    """sum c_j / (s^p - z_j^p) with pole-distance enforcement (distance >=
    exclusion to every z_j and its p-th-root rotations) and a caller-supplied
    absolute tail bound for terms beyond the working prefix."""
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    with ctx.workprec(20):
        s = mpmath.mpmathify(s)
        acc = mpc(0)
        for zj, cj in terms:
            zj = mpmath.mpmathify(zj)
            rots = (zj,) if p == 1 else (zj, -zj)
            for r in rots:
                if abs(s - r) < exclusion:
                    raise PoleProximityError(
                        "s within %.3g of pole %s" % (exclusion, mp.nstr(r, 8)))
            acc += cj / (s ** p - zj ** p)
        val = +acc
    return ValueWithBound(val, tail_bound=float(tail_abs),
                          rounding_bound=float(abs(val)) * 2.0 ** (4 - ctx.mantissa_bits))


def f_big_series(s, ctx=DEFAULT_CTX, nterms=40):
    """F(s) = sum_{w>=1} c(4w)/(s - 4w); ultrarapid coefficient decay."""
    from . import density as dn
    table = dn.bucket_for(1.0, min(ctx.abs_tol, 1e-30))
    with ctx.workprec(20):
        s = mpmath.mpmathify(s)
        terms = []
        for w in range(1, nterms + 1):
            if abs(s - 4 * w) < 1e-9:
                raise PoleProximityError("F(s) pole at s=%d" % (4 * w))
            terms.append(table.c4(w) / (s - 4 * w))
        val = mp.fsum(terms)
        tail = 2 * abs(table.c4(nterms + 1))
        return ValueWithBound(+val, tail_bound=float(tail),
                              rounding_bound=float(abs(val)) * 2.0 ** (4 - ctx.mantissa_bits))


def p_r(s, ctx=DEFAULT_CTX, nterms=40):
    """p_r(s) = c(0)/s + F(s) - F(-s)."""
    from . import density as dn
    with ctx.workprec(20):
        s = mpmath.mpmathify(s)
        if abs(s) < 1e-9:
            raise PoleProximityError("p_r pole at s=0")
        c0 = dn.c0_value(ctx)
        a = f_big_series(s, ctx, nterms)
        b = f_big_series(-s, ctx, nterms)
        val = c0 / s + a.value - b.value
        return ValueWithBound(+val, tail_bound=a.tail_bound + b.tail_bound,
                              rounding_bound=a.rounding_bound + b.rounding_bound)


def _pi_hybrid(s, derived, N, ctx, plus_only):
    """Shared core for p_i (grouped, p=2) and p_{i,+} (p=1)."""
    N = min(N or derived.table.count, derived.table.count)
    g = derived.gammas[:N]
    with ctx.workprec(20):
        s_mp = mpmath.mpmathify(s)
        dist = np.abs(np.asarray(complex(s_mp)) - 1j * g)
        if plus_only:
            mind = dist.min()
        else:
            mind = min(dist.min(), np.abs(np.asarray(complex(s_mp)) + 1j * g).min())
        if mind < 1e-6:
            raise PoleProximityError("s within 1e-6 of a pole i gamma_k")
        khi = min(len(derived.c_hp), N)
        acc = mpc(0)
        for k in range(1, khi + 1):
            gam = mpf(float(g[k - 1]))
            ck = derived.c_of(k)
            if plus_only:
                acc += ck / (s_mp - mpc(0, gam))
            else:
                acc += ck * 2 * s_mp / (s_mp * s_mp + gam * gam)
        if khi < N:
            sc = complex(s_mp)
            gg = g[khi:N]
            cc = derived.c[khi:N]
            if plus_only:
                bulk = (cc / (sc - 1j * gg)).sum()
            else:
                bulk = (cc * 2 * sc / (sc * sc + gg * gg)).sum()
            acc += mpc(bulk)
        # beyond-N tail: |c| tail over distance to the remaining poles
        tail_c = abs(_powerlaw_tail(np.abs(derived.c[:N]), N))
        gap = max(float(g[N - 1]) - abs(float(mp.im(s_mp))), float(g[N - 1]) * 0.1)
        if plus_only:
            tail = tail_c / gap
        else:
            tail = tail_c * 2 * abs(complex(s_mp)) / gap ** 2
        val = +acc
    return ValueWithBound(val, tail_bound=float(tail),
                          rounding_bound=float(abs(val)) * 2.0 ** (4 - ctx.mantissa_bits)
                          + float(np.abs(derived.c[:N]).sum()) * N * 1e-16)


def p_i(s, derived, N=None, ctx=DEFAULT_CTX):
    """p_i(s) = 2s sum_k c(i gamma_k)/(s^2 + gamma_k^2)."""
    return _pi_hybrid(s, derived, N, ctx, plus_only=False)


def p_i_plus(s, derived, N=None, ctx=DEFAULT_CTX):
    """p_{i,+}(s) = sum_k c(i gamma_k)/(s - i gamma_k)."""
    return _pi_hybrid(s, derived, N, ctx, plus_only=True)


def p_full(s, derived, N=None, ctx=DEFAULT_CTX):
    """p(s) = p_i(s) + p_r(s) (the formal Mittag-Leffler expansion of f)."""
    a = p_i(s, derived, N, ctx)
    b = p_r(s, ctx)
    return a.plus(b)


# --------------------------------------------------------------------------
# Hadamard factorization and xi-fission

def hadamard_check(s, derived, N=None, ctx=DEFAULT_CTX, fission_n=200):
    """Residuals of xi(1/2+s) = xi(1/2) prod(1 + (s/gamma_k)^2) (partial,
    with a tail prediction from the sum of gamma^{-2} beyond N) and of the
    fission xi(1/2+s) = Xi(s) Xi(-s)."""
    N = min(N or derived.table.count, derived.table.count)
    g = derived.gammas[:N]
    with ctx.workprec(20):
        s_mp = mpmath.mpmathify(s)
        sc = complex(s_mp)
        fac = 1.0 + (sc / g) ** 2
        prod_bulk = complex(np.prod(fac))
        xi_half = zc.eval_xi(mpf(1) / 2, ctx)
        xi_val = zc.eval_xi(mpf(1) / 2 + s_mp, ctx)
        ratio = xi_val / (xi_half * mpc(prod_bulk))
        resid = abs(ratio - 1)
        # tail prediction: exp(|s|^2 sum_{k>N} gamma^{-2}) - 1
        inv2 = 1.0 / derived.gammas[:N] ** 2
        t2 = _powerlaw_tail(inv2, N)
        pred = math.expm1(abs(sc) ** 2 * t2) if math.isfinite(t2) else float("nan")
        # fission with explicit convergence factors on a short prefix
        nf = min(fission_n, N)
        Xi_s = mp.sqrt(xi_half)
        Xi_ms = mp.sqrt(xi_half)
        for k in range(nf):
            ig = mpc(0, mpf(float(g[k])))
            Xi_s *= (1 - s_mp / ig) * mp.exp(s_mp / ig)
            Xi_ms *= (1 + s_mp / ig) * mp.exp(-s_mp / ig)
        prefix = mpf(1)
        for k in range(nf):
            gam = mpf(float(g[k]))
            prefix *= (1 + (s_mp / gam) ** 2)
        fission_resid = abs(Xi_s * Xi_ms - xi_half * prefix)
    return {
        "partial_product_residual": float(resid),
        "tail_prediction": float(pred),
        "fission_residual": float(fission_resid),
        "N": N,
    }


# --------------------------------------------------------------------------
# the bulge path and conjecture exponents

@dataclass(frozen=True)
class C1Path:
    alpha: float
    derived: ZeroDerived

    def __post_init__(self):
        if not 0 < self.alpha < 0.5:
            raise ValueError("need 0 < alpha < 1/2")

    @property
    def t_start(self):
        return float(self.derived.gammas[0]
                     - self.alpha * self.derived.delta_prime[0])

    def x_of_t(self, t):
        """Unique x >= 0 with x + it on the path (0 off bulges)."""
        g = self.derived.gammas
        k = int(np.searchsorted(g, t))
        for kk in (k - 1, k):
            if 0 <= kk < g.size:
                r = self.alpha * self.derived.delta_prime[kk]
                d = t - g[kk]
                if abs(d) <= r:
                    return math.sqrt(max(r * r - d * d, 0.0))
        return 0.0


def c1_path(alpha, derived):
    return C1Path(alpha=alpha, derived=derived)


def path_scan(path, t_max, n_bulge=33):
    """Scan along the path: j_k(alpha) per bulge (dense sampling + golden
    refinement), the partial C1' integral, and the per-gap min |zeta|."""
    d = path.derived
    g = d.gammas
    alpha = path.alpha
    kmax = int(np.searchsorted(g, t_max))
    if kmax < 2:
        raise ValueError("t_max below the second zero")
    # j_k: min over |t - gamma_k| <= alpha delta'_k of |zeta(1/2+it)/(t-gamma_k)|
    j_vals = np.zeros(kmax)
    for k in range(kmax):
        r = alpha * d.delta_prime[k]
        ts = g[k] + np.linspace(-r, r, n_bulge)
        zs = np.abs(fm.zeta_line(0.5, ts))
        with np.errstate(divide="ignore", invalid="ignore"):
            q = zs / np.abs(ts - g[k])
        q[n_bulge // 2] = d.zeta_prime_abs[k]
        i = int(np.argmin(q))
        lo = ts[max(i - 1, 0)]
        hi = ts[min(i + 1, n_bulge - 1)]
        j_vals[k] = _golden_min(
            lambda t: float(np.abs(fm.zeta_line(0.5, np.array([t]))[0])
                            / abs(t - g[k])) if t != g[k] else d.zeta_prime_abs[k],
            lo, hi)
    # per-gap min |zeta(1/2+it)| for the eps0 envelope
    gap_min = np.zeros(kmax - 1)
    for k in range(kmax - 1):
        a = g[k] + alpha * d.delta_prime[k]
        b = g[k + 1] - alpha * d.delta_prime[k + 1]
        if b <= a:
            gap_min[k] = min(j_vals[k], j_vals[k + 1])
            continue
        ts = np.linspace(a, b, 17)
        gap_min[k] = float(np.abs(fm.zeta_line(0.5, ts)).min())
    # partial C1' integral along the path
    integrand_samples = []
    t_nodes = np.linspace(path.t_start + 1e-9, t_max, 4001)
    xs = np.array([path.x_of_t(t) for t in t_nodes])
    ss = xs + 0.5 + 1j * t_nodes
    zv = np.abs(fm.zeta_line_general(ss))
    vals = 1.0 / (t_nodes ** 1.75 * zv)
    c1_partial = float(np.trapezoid(vals, t_nodes))
    eps0_slope, eps0_icept = fit_log_envelope(
        list(zip(g[1:kmax], np.maximum(gap_min, 1e-300))))
    return {
        "alpha": alpha,
        "kmax": kmax,
        "j_k": j_vals,
        "gap_min_zeta": gap_min,
        "c1_integral_partial": c1_partial,
        "eps0_hat": -eps0_slope,
        "t_max": float(t_max),
    }


def _golden_min(f, a, b, iters=40):
    phi = (math.sqrt(5) - 1) / 2
    c = b - phi * (b - a)
    d_ = a + phi * (b - a)
    fc, fd = f(c), f(d_)
    for _ in range(iters):
        if fc < fd:
            b, d_, fd = d_, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d_, fd
            d_ = a + phi * (b - a)
            fd = f(d_)
    return min(fc, fd)


def estimate_exponents(derived, alpha=0.25, jk_data=None, kmax=None):
    """Envelope-fit point estimates of the conjecture exponents, plus the
    informational C2/C3/C4 part-(ii) checks and the gamma_k growth trend."""
    kmax = min(kmax or derived.n_high, derived.table.count)
    g = derived.gammas[:kmax]
    zp = derived.zeta_prime_abs[:kmax]
    dl = derived.delta[:kmax]
    s1, _ = fit_log_envelope(list(zip(g, np.maximum(zp, 1e-300))))
    eps1 = -s1
    s2, _ = fit_log_envelope(list(zip(g, np.maximum(dl, 1e-300))))
    eps2 = -s2
    out = {
        "eps1_hat": eps1,
        "eps2_hat": eps2,
        "kmax": kmax,
        "c2_ii_estimate": eps1 < 0.75,
        "c3_ii_estimate": eps1 + eps2 < 0.75,
    }
    if jk_data is not None:
        jk = np.asarray(jk_data)
        s3, _ = fit_log_envelope(list(zip(g[:jk.size], np.maximum(jk, 1e-300))))
        out["eps1_tilde_hat"] = -s3
        out["c4_ii_estimate"] = (-s3) + eps2 <= 1.0
    ks = np.arange(1, kmax + 1)
    trend = g * np.log(np.maximum(ks, 2)) / (2 * math.pi * ks)
    out["gamma_growth_trend"] = [float(trend[min(9, kmax - 1)]),
                                 float(trend[kmax // 2]), float(trend[-1])]
    return out


def lambda_inf_scan(derived, T_grid=(10.0, 100.0, 1000.0), N=20000,
                    samples_per_unit=24):
    """Running minimum of lambda over y in [-T, 0] for expanding windows,
    against the -A bound (report trend)."""
    N = min(N, derived.table.count)
    g = derived.gammas[:N]
    c = derived.c[:N]
    A = 2 * float(np.abs(derived.c).sum())
    out = []
    run_min = float("inf")
    t_prev = 0.0
    for T in sorted(T_grid):
        ys = np.linspace(t_prev, T, max(int((T - t_prev) * samples_per_unit), 2))
        for y0 in np.array_split(ys, max(1, ys.size // 200)):
            vals = 2.0 * (np.cos(np.outer(y0, g)) @ c)
            run_min = min(run_min, float(vals.min()))
        out.append({"T": float(T), "min_lambda": run_min,
                    "gap_to_minus_A": run_min + A})
        t_prev = T
    return {"A_partial": A, "windows": out, "N": N}
