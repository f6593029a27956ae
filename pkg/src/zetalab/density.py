"""Laplace densities: the coefficients ctilde(4k), c(4k), the even entire
functions P0 and P_{4w}, the derived builders g, j, g0, h, monotonicity /
growth / positivity scans, and the C5 evaluation.

P0(z) = sum_{k>=1} (-1)^{k+1} ctilde(4k) z^{2k}, with
ctilde(4k) = 1 / (pi^{3/4} Gamma(5/4 + 2k) (2k - 1/4) zeta(1/2 + 4k)) > 0.

Evaluating P0 at real v costs ~ v/ln 2 mantissa bits (the peak term is ~e^v);
evaluations compute the requirement, escalate up to a configured ceiling and
otherwise fail loudly. Coefficients are tabulated per precision bucket with
per-term tailored zeta precision (terms far below the series peak only need
as many correct bits as their size relative to the peak).
"""
from __future__ import annotations

import math
import os
import pickle
from dataclasses import dataclass
from pathlib import Path

import mpmath
from mpmath import mp, mpf, mpc

from . import specfun as sf
from .numerics import (DEFAULT_CTX, PrecisionContext, PrecisionInfeasibleError,
                       ValueWithBound, find_root, NumericsError)

LOG2E = 1.4426950408889634
CEILING_BITS = 16640
GUARD_BITS = 112
BUCKETS = (320, 1024, 4096, 8192, CEILING_BITS)


def required_bits(v, abs_tol):
    """Mantissa bits needed for P0 at |z| = v (peak-term cancellation)."""
    return int(v * LOG2E) + int(max(0.0, -math.log2(abs_tol))) + 64


def v_ceiling(bits, abs_tol=1e-30):
    return (bits - GUARD_BITS - max(0.0, -math.log2(abs_tol))) / LOG2E


def y_max(abs_tol=1e-30, ceiling=CEILING_BITS):
    """Largest |y| for which P0(pi e^{2|y|}) is evaluable under the ceiling."""
    return 0.5 * math.log(v_ceiling(ceiling, abs_tol) / math.pi)


def _cache_dir():
    base = os.environ.get("ZETALAB_CACHE")
    if base:
        return Path(base)
    return Path.home() / ".cache" / "zetalab"


def _stirling_log2_inv_ctilde(k):
    """log2 of 1/ctilde(4k) from the Stirling model (sizing only)."""
    if k == 0:
        return 0.0
    tk = 2.0 * k
    return 0.5 * math.log2(2 * math.pi) + 1.75 * math.log2(tk) \
        + tk * math.log2(tk / math.e)


class CoeffTable:
    """ctilde(4k) (and c(4k)) at one precision bucket, lazily extended.

    Single-writer extension; reads are plain list indexing after publication.
    """

    def __init__(self, prec_bits):
        self.prec_bits = prec_bits
        self.v_max = v_ceiling(prec_bits)
        self._ctilde = []     # mpf, index k = 0, 1, ...
        self._loaded_from = None

    # -- construction -------------------------------------------------

    def _zeta_half_plus_4k(self, k, rel_bits):
        """zeta(1/2 + 4k) to ~2^-rel_bits relative accuracy."""
        s_int = 4 * k
        if s_int + 0.5 >= rel_bits:
            return mpf(1)
        # short Dirichlet sum if few terms suffice, else full evaluator
        log2_nterms = rel_bits / (s_int + 0.5)
        nterms = 2.0 ** log2_nterms if log2_nterms < 30 else float("inf")
        if nterms <= 400:
            with mp.workprec(rel_bits + 20):
                s = mpf(1) / 2 + s_int
                acc = mpf(1)
                n = 2
                while n <= nterms + 1:
                    acc += mp.exp(-s * mp.log(n))
                    n += 1
                return +acc
        with mp.workprec(rel_bits + 20):
            return +mp.zeta(mpf(1) / 2 + s_int)

    def ensure(self, kmax):
        if len(self._ctilde) > kmax:
            return
        self._load_cache()
        if len(self._ctilde) > kmax:
            return
        kmax = max(kmax, len(self._ctilde) + 63)
        P = self.prec_bits
        # peak size of the series at this bucket's v_max
        log2_peak = self.v_max * LOG2E
        with mp.workprec(P + 16):
            pi34 = mp.pi ** (mpf(3) / 4)
            if not self._ctilde:
                g = mp.gamma(mpf(5) / 4)   # chain seed
                z0 = self._zeta_half_plus_4k(0, P + 16)
                self._ctilde.append(1 / (pi34 * g * (mpf(-1) / 4) * z0))
                self._gamma_chain = g
            g = self._gamma_chain
            k = len(self._ctilde)
            while k <= kmax:
                # Gamma(5/4 + 2k) from Gamma(5/4 + 2(k-1))
                g = g * (mpf(5) / 4 + 2 * k - 2) * (mpf(5) / 4 + 2 * k - 1)
                # per-term zeta precision: bits the term can matter at v_max
                log2_term = 2 * k * math.log2(max(self.v_max, 2.0)) \
                    - _stirling_log2_inv_ctilde(k)
                w_k = int(max(80, min(P + 16, P + 16 - (log2_peak - log2_term))))
                zk = self._zeta_half_plus_4k(k, w_k)
                self._ctilde.append(1 / (pi34 * g * (2 * k - mpf(1) / 4) * zk))
                k += 1
            self._gamma_chain = g
        self._save_cache()

    # -- cache ---------------------------------------------------------

    def _cache_path(self):
        return _cache_dir() / ("coeffs_p%d.pkl" % self.prec_bits)

    def _load_cache(self):
        p = self._cache_path()
        if self._loaded_from == p:
            return
        self._loaded_from = p
        if not p.exists():
            return
        try:
            with open(p, "rb") as fh:
                payload = pickle.load(fh)
            if payload.get("version") != 1 or payload.get("prec_bits") != self.prec_bits:
                return
            vals = [mp.make_mpf(tup) for tup in payload["ctilde"]]
            chain = mp.make_mpf(payload["gamma_chain"])
            if len(vals) > len(self._ctilde):
                self._ctilde = vals
                self._gamma_chain = chain
        except Exception:
            pass

    def _save_cache(self):
        p = self._cache_path()
        try:
            p.parent.mkdir(parents=True, exist_ok=True)
            payload = {
                "version": 1,
                "prec_bits": self.prec_bits,
                "ctilde": [x._mpf_ for x in self._ctilde],
                "gamma_chain": self._gamma_chain._mpf_,
            }
            with open(p, "wb") as fh:
                pickle.dump(payload, fh)
        except Exception:
            pass

    # -- access ----------------------------------------------------------

    def ctilde(self, k):
        self.ensure(k)
        return self._ctilde[k]

    def c4(self, k):
        """c(4k) = ctilde(4k) (-pi^2)^k."""
        with mp.workprec(self.prec_bits):
            return +(self.ctilde(k) * (-mp.pi ** 2) ** k)


_BUCKET_CACHE = {}


def bucket_for(v, abs_tol=1e-30):
    need = required_bits(v, abs_tol)
    for b in BUCKETS:
        if b >= need:
            if b not in _BUCKET_CACHE:
                _BUCKET_CACHE[b] = CoeffTable(b)
            return _BUCKET_CACHE[b]
    raise PrecisionInfeasibleError(
        "P0 at |z|=%.3g needs %d bits > ceiling %d" % (v, need, CEILING_BITS),
        required_bits=need)


# --------------------------------------------------------------------------
# P0 and P_{4w}

def p0(z, ctx=DEFAULT_CTX, start_k=1, sign_w=0, deriv=False):
    """P0(z) (or a tail sum starting at k = start_k, used by P_{4w}).

    Returns ValueWithBound; compensated sum to the first term past the peak
    below threshold; tail bound = 2x first omitted term.
    With deriv=True computes d/dv at real z (termwise 2k ctilde v^{2k-1}).
    """
    with mp.workprec(64):
        zv = mpmath.mpmathify(z)
        v = float(abs(zv))
    if v == 0:
        return ValueWithBound(mpf(0))
    table = bucket_for(v, min(ctx.abs_tol, 1e-30))
    W = min(table.prec_bits, max(required_bits(v, min(ctx.abs_tol, 1e-30)),
                                 ctx.mantissa_bits + 64))
    tol = mpf(ctx.abs_tol)
    table.ensure(int(1.36 * v) + 80)
    with mp.workprec(W):
        zz = mpmath.mpmathify(z)
        z2 = zz * zz
        # pw_k = z^{2k} (or d/dv parts for deriv), recurred at full precision
        pw = z2 if start_k == 1 else z2 ** start_k
        acc = mpf(0)
        absacc = mpf(0)
        k = start_k
        kcap = ctx.max_series_terms
        tail = None
        while True:
            table.ensure(k + 2)
            ct = table.ctilde(k)
            sgn = 1 if (k % 2 == 1) else -1
            if deriv:
                term = sgn * ct * 2 * k * pw / zz
            else:
                term = sgn * ct * pw
            acc += term
            absacc += abs(term)
            nxt = abs(table.ctilde(k + 1) * pw * z2)
            if deriv:
                nxt = nxt * (2 * k + 2) / abs(zz)
            if nxt < tol / 4 and 2 * k > 1.02 * v + 4:
                tail = 2 * float(nxt)
                break
            k += 1
            pw = pw * z2
            if k - start_k > kcap:
                raise NumericsError("P0 series exceeded max_series_terms")
        rounding = float(absacc * (k - start_k + 4) * mpf(2) ** (4 - W))
        val = +acc
    with ctx.workprec():
        return ValueWithBound(+val, tail_bound=tail, rounding_bound=rounding)


def p0_deriv(v, ctx=DEFAULT_CTX):
    """d/dv P0(v) at real v > 0 (termwise differentiated series)."""
    return p0(mpf(v), ctx, deriv=True)


def coeff_ctilde(k, ctx=DEFAULT_CTX):
    """Standalone ctilde(4k) from the defining formula at context precision,
    with the Gamma(5/4+2k) and Gamma(5/4)(5/4)_{2k} routes reconciled."""
    with ctx.workprec(30):
        pi34 = mp.pi ** (mpf(3) / 4)
        zk = mp.zeta(mpf(1) / 2 + 4 * k) if k else mp.zeta(mpf(1) / 2)
        g_direct = mp.gamma(mpf(5) / 4 + 2 * k)
        poch = mpf(1)
        for j in range(2 * k):
            poch *= (mpf(5) / 4 + j)
        g_poch = mp.gamma(mpf(5) / 4) * poch
        rel = abs(g_direct - g_poch) / abs(g_direct)
        digits = ctx.mantissa_bits * 0.30103
        if rel > mpf(10) ** (-(digits - 4)):
            raise NumericsError("Gamma route mismatch at k=%d: %s" % (k, mp.nstr(rel, 4)))
        val = 1 / (pi34 * g_direct * (2 * k - mpf(1) / 4) * zk)
    with ctx.workprec():
        return +val


def coeff_c4(k, ctx=DEFAULT_CTX):
    with ctx.workprec():
        return +(coeff_ctilde(k, ctx) * (-mp.pi ** 2) ** k)


def p4w(w, z, ctx=DEFAULT_CTX, form="tail"):
    """P_{4w}(z) for integer w.

    w >= 1: tail form (-1)^{w+1} sum_{k >= w+1} ctilde(4k)(-z^2)^k, or the
    prefix form (-1)^w (P0(z) + sum_{1<=k<=w} ctilde(4k)(-z^2)^k).
    w = 0: P0. w <= -1 (real v > 0 only): P_{4w}(pi v) = P_{-4(w+1)}(pi / v).
    """
    if w == 0:
        return p0(z, ctx)
    if w <= -1:
        with mp.workprec(64):
            zv = mpmath.mpmathify(z)
            if mp.im(zv) != 0 or mp.re(zv) <= 0:
                raise ValueError("reflection form needs real z > 0")
            v = zv / mp.pi
        with mp.workprec(ctx.mantissa_bits + 30):
            arg = mp.pi / v
        return p4w(-(w + 1), arg, ctx, form=form)
    if form == "tail":
        sgn = (-1) ** (w + 1)
        inner = p0(z, ctx, start_k=w + 1)
        # inner = sum_{k>=w+1} (-1)^{k+1} ctilde z^{2k}  == (-1)^{w} * ... sign fix:
        # p0 tail carries (-1)^{k+1}; the definition wants (-1)^{w+1} sum (-z^2)^k ct
        #   = (-1)^{w+1} sum (-1)^k ct z^{2k} = (-1)^{w} sum (-1)^{k+1} ct z^{2k}
        return inner.scaled((-1) ** w)
    if form == "prefix":
        base = p0(z, ctx)
        table = bucket_for(float(abs(mpmath.mpmathify(z))), min(ctx.abs_tol, 1e-30))
        with mp.workprec(table.prec_bits):
            zz = mpmath.mpmathify(z)
            extra = mpf(0)
            for k in range(1, w + 1):
                extra += table.ctilde(k) * (-(zz * zz)) ** k
            val = (-1) ** w * (base.value + extra)
        with ctx.workprec():
            return ValueWithBound(+val, tail_bound=base.tail_bound,
                                  rounding_bound=base.rounding_bound * 2)
    raise ValueError("form must be 'tail' or 'prefix'")


# --------------------------------------------------------------------------
# derived entire functions

def c0_value(ctx=DEFAULT_CTX):
    table = bucket_for(1.0, min(ctx.abs_tol, 1e-30))
    with ctx.workprec():
        return +table.ctilde(0)


def g_entire(z, ctx=DEFAULT_CTX):
    """g(z) = P0(pi e^{-2z}) (period i pi/2)."""
    with mp.workprec(ctx.mantissa_bits + 40):
        arg = mp.pi * mp.exp(-2 * mpmath.mpmathify(z))
    return p0(arg, ctx)


def j_u(u, ctx=DEFAULT_CTX):
    """j(u) = -c(0) + P0(pi e^{2u}) + P0(pi e^{-2u}) (even entire)."""
    with mp.workprec(ctx.mantissa_bits + 40):
        um = mpmath.mpmathify(u)
        a1 = mp.pi * mp.exp(2 * um)
        a2 = mp.pi * mp.exp(-2 * um)
    t1 = p0(a1, ctx)
    t2 = p0(a2, ctx)
    with ctx.workprec():
        return ValueWithBound(+(t1.value + t2.value - c0_value(ctx)),
                              t1.tail_bound + t2.tail_bound,
                              t1.rounding_bound + t2.rounding_bound)


def h_y(y, lam_fn, ctx=DEFAULT_CTX):
    """h(y) = lambda(y) + c(0) - P0(pi e^{2y}); lam_fn supplies lambda with
    its own bound (ValueWithBound)."""
    lam = lam_fn(y)
    with mp.workprec(ctx.mantissa_bits + 40):
        arg = mp.pi * mp.exp(2 * mpf(y))
    pv = p0(arg, ctx)
    with ctx.workprec():
        return ValueWithBound(+(lam.value + c0_value(ctx) - pv.value),
                              lam.tail_bound + pv.tail_bound,
                              lam.rounding_bound + pv.rounding_bound)


def g0_y(y, lam_fn, ctx=DEFAULT_CTX):
    """Conditional density g0: P0(pi e^{-2y}) for y > 0, h(y) for y < 0."""
    if y > 0:
        with mp.workprec(ctx.mantissa_bits + 40):
            arg = mp.pi * mp.exp(-2 * mpf(y))
        return p0(arg, ctx)
    return h_y(y, lam_fn, ctx)


# --------------------------------------------------------------------------
# scans and reports

def monotonicity_scan(w, n_points=1000, ctx=None):
    """Strict increase of P_{4w} on [0, pi] grid with margins above combined
    bounds, plus termwise-derivative positivity at the grid points."""
    ctx = ctx or PrecisionContext(mantissa_bits=192, abs_tol=1e-40)
    if n_points < 1000:
        raise ValueError("grid must have >= 10^3 points")
    with mp.workprec(ctx.mantissa_bits):
        grid = [mp.pi * i / n_points for i in range(n_points + 1)]
        prev = ValueWithBound(mpf(0))
        ok = True
        min_margin = mp.inf
        deriv_ok = True
        for i, v in enumerate(grid):
            cur = p4w(w, v, ctx) if w else p0(v, ctx)
            if i:
                margin = (cur.value - prev.value) - (cur.total_bound + prev.total_bound)
                if margin <= 0:
                    ok = False
                min_margin = min(min_margin, margin)
            if i and i % 97 == 0:
                dv = p0(v, ctx, start_k=(w + 1) if w else 1, deriv=True)
                if w:
                    dv = dv.scaled((-1) ** w)
                if float(dv.value) - dv.total_bound <= 0:
                    deriv_ok = False
            prev = cur
    return {"w": w, "n_points": n_points, "strictly_increasing": ok,
            "min_margin": float(min_margin), "derivative_positive": deriv_ok}


def growth_probe(v_hi=3000.0, n_grid=24, ctx=None):
    """|P0(v)| against v^{1/4+eps} on a log grid (trend report, no hard gate)."""
    ctx = ctx or PrecisionContext(mantissa_bits=128, abs_tol=1e-25)
    rows = []
    vmax_seen = 0.0
    positive = True
    v = 2.0
    ratio = (v_hi / v) ** (1.0 / (n_grid - 1))
    for _ in range(n_grid):
        pv = p0(mpf(v), ctx)
        val = float(pv.value)
        rows.append({
            "v": v,
            "p0": val,
            "ratio_eps_005": abs(val) / v ** (0.25 + 0.05),
            "ratio_eps_025": abs(val) / v ** (0.25 + 0.25),
        })
        if val - pv.total_bound <= 0:
            positive = False
        vmax_seen = max(vmax_seen, abs(val))
        v *= ratio
    return {"rows": rows, "max_abs_p0": vmax_seen, "positive_on_grid": positive}


@dataclass
class C5Report:
    A: float
    A_tail: float
    c0: float
    p0_at_pi: float
    cond_i: bool
    cond_ii: bool
    v0: float | None
    positivity_iii: bool | None
    notes: str = ""


def c5_evaluate(A_value, A_tail, ctx=DEFAULT_CTX):
    """Evaluate C5 (i) 0 < c(0) - A, (ii) c(0) - A < P0(pi), root-find
    v0 = theta(c(0)-A)/pi when defined, scan (iii) on (pi, pi/v0]."""
    with ctx.workprec():
        c0 = c0_value(ctx)
        p0pi = p0(mp.pi, ctx)
        r = c0 - mpf(A_value)
        cond_i = bool(r > A_tail)
        cond_ii = bool(r + A_tail < p0pi.value - p0pi.total_bound)
        v0 = None
        pos3 = None
        if cond_i and cond_ii:
            theta = find_root(lambda t: p0(t, ctx).value - r, mpf(0), +mp.pi,
                              ctx.with_tol(1e-25))
            v0 = float(theta / mp.pi)
            pos3 = True
            hi = math.pi / v0
            n = 1000
            for i in range(1, n + 1):
                v = math.pi * (hi / math.pi) ** (i / n)
                pv = p0(mpf(v), ctx)
                if float(pv.value) - pv.total_bound <= 0:
                    pos3 = False
                    break
        note = "" if (cond_i and cond_ii) else \
            "v0 undefined: C5 precondition fails with table-derived A"
        return C5Report(A=float(A_value), A_tail=float(A_tail), c0=float(c0),
                        p0_at_pi=float(p0pi.value), cond_i=cond_i,
                        cond_ii=cond_ii, v0=v0, positivity_iii=pos3, notes=note)


def theta_of_r(r, ctx=DEFAULT_CTX):
    """Inverse of P0 on the monotone segment [0, pi] (0 < r < P0(pi))."""
    with ctx.workprec():
        return find_root(lambda t: p0(t, ctx).value - mpf(r), mpf(0), +mp.pi,
                         ctx.with_tol(min(ctx.abs_tol, 1e-25)))


def continuity_criterion(sum_c_igamma, sum_c_igamma_tail, n_rhs=40,
                         ctx=DEFAULT_CTX):
    """Residual of sum_k c(i gamma_k) = -(c(0)/2 + sum_k c(4k)).

    lhs partial + tail estimate come from the zeros module; rhs converges
    ultrarapidly. Informational (conjecture level)."""
    table = bucket_for(1.0, min(ctx.abs_tol, 1e-30))
    with ctx.workprec(40):
        rhs_sum = mpf(0)
        for k in range(1, n_rhs + 1):
            rhs_sum += table.c4(k)
        rhs_term_next = abs(table.c4(n_rhs + 1))
        rhs = -(c0_value(ctx) / 2 + rhs_sum)
        residual = mpf(sum_c_igamma) - rhs
    return {
        "lhs_partial": float(sum_c_igamma),
        "lhs_tail_estimate": float(sum_c_igamma_tail),
        "rhs_partial": float(rhs),
        "rhs_tail_bound": float(2 * rhs_term_next),
        "residual": float(residual),
    }
