#!/usr/bin/env python3
"""Generate the first K ordinates of the nontrivial zeta zeros to ~1e-9
absolute accuracy and write them one per line (9 decimals), ascending.

Pipeline:
  1. bracket sign changes of Z(t) on a dense grid (vectorized Riemann-Siegel
     main sum + leading correction),
  2. sharpen each bracket by vectorized secant on the same approximation,
  3. polish every zero by secant on mpmath's fp.siegelz (float RS with full
     correction terms),
  4. re-polish zeros with a small |Z'| (close pairs) via mp.siegelz Newton,
  5. audit the count against the smooth zero-counting function per block and
     rescue any window with a persistent drift,
  6. spot-check a sample against mp.zetazero.

Restartable: progress is checkpointed to <out>.part.npy.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from mpmath import fp, mp  # noqa: E402
import mpmath  # noqa: E402
from zetalab import fastmath as fm  # noqa: E402


def solve_count(target):
    """T with smooth count theta(T)/pi + 1 = target (bisection)."""
    lo, hi = 20.0, 10.0
    while fm.rs_count(hi) < target:
        hi *= 2
    for _ in range(200):
        midv = 0.5 * (lo + hi)
        if fm.rs_count(midv) < target:
            lo = midv
        else:
            hi = midv
    return 0.5 * (lo + hi)


def scan_brackets(t0, t1, per_gap=12):
    """Sign-change brackets of the RS approximation on [t0, t1]."""
    brackets = []
    lo = t0
    while lo < t1:
        hi = min(lo * 1.25 + 10, t1)
        density = math.log(hi / fm.TWO_PI) / fm.TWO_PI  # zeros per unit t
        step = 1.0 / (per_gap * max(density, 0.05))
        n = int((hi - lo) / step) + 2
        grid = np.linspace(lo, hi, n)
        Z = fm.rs_z(grid)
        sgn = np.sign(Z)
        idx = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
        for i in idx:
            brackets.append((grid[i], grid[i + 1]))
        lo = hi
    return brackets


def secant_vec(a, b, iters=14):
    """Vectorized secant on the RS approximation, started from brackets."""
    fa = fm.rs_z(a)
    fb = fm.rs_z(b)
    x0, f0, x1, f1 = a, fa, b, fb
    for _ in range(iters):
        denom = f1 - f0
        denom = np.where(denom == 0, 1e-30, denom)
        x2 = x1 - f1 * (x1 - x0) / denom
        bad = ~np.isfinite(x2)
        x2 = np.where(bad, 0.5 * (x0 + x1), x2)
        f2 = fm.rs_z(x2)
        x0, f0 = x1, f1
        x1, f1 = x2, f2
    return x1


def polish_fp(t, max_iter=6):
    """Secant on fp.siegelz from a good seed; returns (root, slope_estimate)."""
    h = 1e-6
    f0 = fp.siegelz(t)
    f1 = fp.siegelz(t + h)
    slope = (f1 - f0) / h
    if slope == 0:
        return t, 0.0
    x0, g0 = t, f0
    x1 = t - f0 / slope
    for _ in range(max_iter):
        g1 = fp.siegelz(x1)
        denom = g1 - g0
        if denom == 0:
            break
        x2 = x1 - g1 * (x1 - x0) / denom
        if abs(x2 - x1) < 5e-12:
            x0, g0, x1 = x1, g1, x2
            break
        x0, g0, x1 = x1, g1, x2
    return x1, slope


def polish_mp(t, dps=22, steps=3):
    with mp.workdps(dps):
        x = mp.mpf(t)
        for _ in range(steps):
            z = mp.siegelz(x)
            dz = mp.siegelz(x, derivative=1)
            if dz == 0:
                break
            dx = z / dz
            x = x - dx
            if abs(dx) < mp.mpf("1e-14"):
                break
        return float(x)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=100000)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "data" / "zeros_100k.txt"))
    ap.add_argument("--slope-cut", type=float, default=0.3,
                    help="|Z'| below this triggers an mp.siegelz polish")
    ap.add_argument("--qa-sample", type=int, default=40)
    args = ap.parse_args()

    K = args.count
    out = Path(args.out)
    part = out.with_suffix(".part.npy")
    t_start = time.time()

    T_end = solve_count(K + 4.0)
    print(f"[gen] target count {K}, scanning up to T={T_end:.3f}", flush=True)

    if part.exists():
        roots = np.load(part)
        print(f"[gen] resuming with {roots.size} polished roots", flush=True)
    else:
        brackets = scan_brackets(10.0, T_end + 2.0)
        print(f"[gen] {len(brackets)} brackets in {time.time()-t_start:.1f}s", flush=True)
        a = np.array([b[0] for b in brackets])
        b = np.array([b[1] for b in brackets])
        seeds = secant_vec(a, b)
        print(f"[gen] secant sharpened in {time.time()-t_start:.1f}s", flush=True)

        roots = np.empty(seeds.size)
        slopes = np.empty(seeds.size)
        t_last = time.time()
        for i, s in enumerate(seeds):
            roots[i], slopes[i] = polish_fp(float(s))
            if time.time() - t_last > 30:
                print(f"[gen] fp polish {i+1}/{seeds.size} "
                      f"({time.time()-t_start:.0f}s)", flush=True)
                t_last = time.time()
        close = np.nonzero(np.abs(slopes) < args.slope_cut)[0]
        print(f"[gen] fp polish done; {close.size} close-pair zeros -> mp polish",
              flush=True)
        for i in close:
            roots[i] = polish_mp(roots[i])
        roots = np.sort(roots)
        np.save(part, roots)

    # de-duplicate anything converged to the same root
    keep = np.concatenate(([True], np.diff(roots) > 1e-8))
    roots = roots[keep]

    # count audit: a missed zero is a permanent +1 step in
    # drift_k = smooth_count(mid_k) - k. A 51-wide median filter turns each
    # step into a sharp jump; rescue the worst-expectation gaps near a jump
    # with a dense mp-precision scan that divides out the known endpoints.
    from scipy.ndimage import median_filter

    def drift_of(rts):
        mid = 0.5 * (rts[:-1] + rts[1:])
        return fm.rs_count(mid) - np.arange(1, rts.size)

    def rescue_gap(a, b):
        """Find zeros strictly inside (a, b), both endpoints being zeros."""
        found = []
        with mp.workdps(20):
            n = max(400, int((b - a) * 150))
            ts = np.linspace(a, b, n + 2)[1:-1]
            vals = []
            for t in ts:
                z = float(mp.siegelz(t))
                vals.append(z / ((t - a) * (t - b)))
            vals = np.array(vals)
            sgn = np.sign(vals)
            for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
                lo, hi = ts[i], ts[i + 1]
                flo = float(mp.siegelz(lo))
                for _ in range(60):
                    midt = 0.5 * (lo + hi)
                    fm_ = float(mp.siegelz(midt))
                    if flo * fm_ <= 0:
                        hi = midt
                    else:
                        lo, flo = midt, fm_
                    if hi - lo < 1e-11:
                        break
                found.append(0.5 * (lo + hi))
        return found

    for round_ in range(60):
        drift = drift_of(roots)
        # drift sits at near-integer levels; quantize a wide median to get
        # clean steps at the exact miss locations
        lev = np.round(median_filter(drift, size=81, mode="nearest"))
        jumps = np.nonzero(np.diff(lev) >= 1)[0]
        if jumps.size == 0:
            break
        clusters = [int(jumps[0])]
        for j in jumps[1:]:
            if j - clusters[-1] > 10:
                clusters.append(int(j))
        print(f"[gen] audit round {round_}: {len(clusters)} drift steps", flush=True)
        add = []
        for j in clusters[:300]:
            lo = max(j - 12, 0)
            hi = min(j + 13, roots.size - 1)
            add.extend(rescue_gap(roots[lo], roots[hi]))
        if add:
            before = roots.size
            roots = np.sort(np.unique(np.concatenate([roots, np.array(add)])))
            keep = np.concatenate(([True], np.diff(roots) > 1e-9))
            roots = roots[keep]
            print(f"[gen]   recovered {roots.size - before}", flush=True)
            if roots.size == before:
                print("[gen] no recoveries; stopping", flush=True)
                break
        else:
            print("[gen] audit found jumps but no rescues; stopping", flush=True)
            break

    # net interior completeness: mean drift over the last stretch averages
    # out S(T); ~0 means every interior zero up to roots[-1] was found.
    tail_drift = float(np.mean(drift_of(roots)[-2000:]))
    print(f"[gen] mean end drift: {tail_drift:+.3f}", flush=True)
    if abs(tail_drift) > 0.45:
        print("[gen] ERROR: interior zeros still missing", flush=True)
        sys.exit(1)

    # top-up at the high end if the scan stopped short
    while roots.size < K:
        t_lo = roots[-1] - 0.2
        t_hi = solve_count(K + 6.0) + 2.0
        print(f"[gen] end top-up: scanning ({t_lo:.3f}, {t_hi:.3f})", flush=True)
        grid = np.linspace(t_lo, t_hi, int((t_hi - t_lo) * 600) + 3)
        zz = fm.rs_z(grid)
        sgn = np.sign(zz)
        add = []
        for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
            r, _ = polish_fp(0.5 * (grid[i] + grid[i + 1]))
            add.append(r)
        before = roots.size
        roots = np.sort(np.unique(np.concatenate([roots, np.array(add)])))
        keep = np.concatenate(([True], np.diff(roots) > 1e-9))
        roots = roots[keep]
        if roots.size == before:
            break
    np.save(part, roots)

    if roots.size < K:
        print(f"[gen] ERROR: only {roots.size} zeros found", flush=True)
        sys.exit(1)
    roots = roots[:K]

    drift = drift_of(roots)
    blocks = [(i, min(i + 200, drift.size)) for i in range(0, drift.size, 200)]
    worst_drift = max(abs(float(np.median(drift[lo:hi]))) for lo, hi in blocks)
    print(f"[gen] final drift: max |median-per-block| = {worst_drift:.2f}", flush=True)
    if worst_drift > 0.9:
        print("[gen] ERROR: unresolved count drift", flush=True)
        sys.exit(1)

    # QA: compare a sample against mp.zetazero
    rng = np.random.default_rng(12345)
    sample = sorted(set([1, 2, 3, 5, 10, 50, 100]
                        + list(rng.integers(100, min(K, 20000), args.qa_sample))))
    mp.dps = 20
    worst = 0.0
    for n in sample:
        ref = float(mp.im(mp.zetazero(int(n))))
        worst = max(worst, abs(ref - roots[n - 1]))
    print(f"[gen] QA vs zetazero on {len(sample)} indices: worst |diff| = {worst:.2e}",
          flush=True)
    if worst > 2e-9:
        print("[gen] WARNING: QA above 2e-9", flush=True)

    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        for r in roots:
            fh.write(f"{r:.9f}\n")
    print(f"[gen] wrote {roots.size} ordinates to {out} "
          f"({time.time()-t_start:.0f}s total)", flush=True)


if __name__ == "__main__":
    main()
