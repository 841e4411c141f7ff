"""Brute-force photon-number reference for the click-detector metrics.

Sums click probabilities directly over photon-number distributions (thermal
pair counts, binomial beamsplitter routing, convolution over independent
pair modes) in 50-digit arithmetic. It never uses the closed forms, so the
values it prints are used as frozen expectations in the C++ unit tests.

    python3 tests/reference/brute_force_reference.py
"""
from mpmath import mp, mpf, binomial, sqrt, factorial

mp.dps = 50


def click(eta, pdc, n):
    return 1 - (1 - pdc) * (1 - eta) ** n


def pair_dist(pbar, kmax):
    return [(1 - pbar) * pbar ** n for n in range(kmax + 1)]


def convolve(dists, n_modes):
    """N-fold convolution of a dict {tuple: prob} (tuples add elementwise)."""
    out = {tuple(0 for _ in next(iter(dists))): mpf(1)}
    for _ in range(n_modes):
        nxt = {}
        for k1, v1 in out.items():
            for k2, v2 in dists.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                nxt[k] = nxt.get(k, 0) + v1 * v2
        out = nxt
    return out


def split(n):
    """Binomial 50:50 routing of n photons: [(k, n-k, prob)]."""
    return [(k, n - k, binomial(n, k) / mpf(2) ** n) for k in range(n + 1)]


def expect(dist, eta, pdc):
    tot = mpf(0)
    for key, pr in dist.items():
        term = pr
        for n in key:
            term *= click(eta, pdc, n)
        tot += term
    return tot


def metrics(pbar, n_modes, eta, pdc, kmax=60):
    pbar, eta, pdc = mpf(pbar), mpf(eta), mpf(pdc)
    pd = pair_dist(pbar, kmax)
    # (n_a, n_b) joint per pair mode
    ab = {(n, n): pd[n] for n in range(kmax + 1)}
    # a split into (d, dbar), b untouched -> (d, dbar, b)
    ddb = {}
    for n in range(kmax + 1):
        for k, l, w in split(n):
            ddb[(k, l, n)] = ddb.get((k, l, n), 0) + pd[n] * w
    # dip: single-mode squeezed pairs on d and dbar; photon count 2m with
    # weight C(2m,m)/4^m p^m (1-p)^(1/2) per mode
    sm = [sqrt(1 - pbar) * factorial(2 * m) / (factorial(m) ** 2 * 4 ** m) * pbar ** m
          for m in range(kmax + 1)]
    dip = {}
    for m1 in range(kmax + 1):
        for m2 in range(kmax + 1 - m1):
            dip[(2 * m1, 2 * m2)] = sm[m1] * sm[m2]
    # delayed: a photons and b photons routed independently, detector group
    # totals add
    out = {}
    for n in range(kmax + 1):
        for k1, l1, w1 in split(n):
            for k2, l2, w2 in split(n):
                key = (k1 + k2, l1 + l2)
                out[key] = out.get(key, 0) + pd[n] * w1 * w2

    def marg(d, idx):
        r = {}
        for k, v in d.items():
            kk = tuple(k[i] for i in idx)
            r[kk] = r.get(kk, 0) + v
        return r

    N = n_modes
    ab_N = convolve(ab, N)
    ddb_N = convolve(ddb, N)
    dip_N = convolve(dip, N)
    out_N = convolve(out, N)
    a_N = marg(ab_N, [0])
    dd_N = marg(ddb_N, [0, 1])
    d_N = marg(ddb_N, [0])
    db_N = marg(ddb_N, [0, 2])
    b_N = marg(ddb_N, [2])

    half = eta / 2
    r_num = expect(ab_N, half, pdc)
    r_den = expect(dd_N, eta, pdc)
    g2 = r_den / expect(a_N, half, pdc) ** 2
    g2c = expect(ddb_N, eta, pdc) * expect(b_N, eta, pdc) / expect(db_N, eta, pdc) ** 2
    gx = expect(ab_N, eta, pdc) / expect(a_N, eta, pdc) ** 2
    p_out = expect(out_N, eta, pdc)
    p_dip = expect(dip_N, eta, pdc)
    v_hom = (p_out - p_dip) / p_out
    # Bell: (a_h, b_v) is one pair, (a_v, b_h) another, independent
    n_hv = expect(ab_N, eta, pdc)
    n_hh = expect(a_N, eta, pdc) ** 2
    v_ent = (n_hv - n_hh) / (n_hv + n_hh)
    return dict(r_tilde=(r_num / r_den) ** 2, g2_auto=g2, g2_conditional=g2c,
                g2_cross=gx, v_hom=v_hom, v_ent=v_ent)


def pbar_from_p(p, n):
    p = mpf(p)
    return p / (n - p * (n - 1))


if __name__ == "__main__":
    mp.pretty = True
    cases = [(0.1, 1, 1e-2, 1e-6), (0.3, 1, 0.4, 0.01), (0.3, 2, 0.4, 0.01),
             (0.3, 3, 0.4, 0.01), (0.3, 5, 0.2, 1e-4)]
    for p, n, eta, pdc in cases:
        kmax = 60 if n <= 2 else 40
        m = metrics(pbar_from_p(p, n), n, eta, pdc, kmax)
        print(f"p={p} N={n} eta={eta} pdc={pdc}")
        for k, v in m.items():
            print(f"  {k:16s} {mp.nstr(v, 17)}")
