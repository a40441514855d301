"""Regenerate golden.json with 50-digit arithmetic.

Run from the repository root:  python3 tests/golden/make_golden.py

Everything here is computed from the defining formulas in mpmath, without
importing the package.  Minima along the constraint line come from a grid
scan followed by golden-section refinement at full working precision.
"""

from __future__ import annotations

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50
OUT = Path(__file__).with_name("golden.json")


def zeta(s, n, q1, q2):
    s, q1, q2 = mp.mpf(s), mp.mpf(q1), mp.mpf(q2)
    sn = s ** n
    u = mp.sqrt(q1 * q2)
    rad = 1 - s * s + 2 * s * u - (q1 + q2)
    if rad < 0:
        return mp.inf
    return (s - u) * mp.sqrt(1 - sn * sn) - sn * mp.sqrt(rad)


def fidelity(eta1, Q, z):
    eta1, Q = mp.mpf(eta1), mp.mpf(Q)
    Qb = 1 - Q
    return (Qb + mp.sqrt(Qb * Qb - 4 * eta1 * (1 - eta1) * z * z)) / (2 * Qb)


def golden_min(f, a, b, iters=260):
    g = (mp.sqrt(5) - 1) / 2
    x1, x2 = b - g * (b - a), a + g * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - g * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + g * (b - a)
            f2 = f(x2)
    x = (a + b) / 2
    return x, f(x)


def line_min(s, delta, n, Q, grid=4001):
    """High-precision minimum of zeta on eta1 q1 + eta2 q2 = Q; returns (zeta, q1, q2)."""
    s, delta, Q = mp.mpf(s), mp.mpf(delta), mp.mpf(Q)
    e1 = (1 - delta) / 2
    e2 = 1 - e1
    lo, hi = max(mp.mpf(0), (Q - e2) / e1), min(mp.mpf(1), Q / e1)

    def f(q1):
        q2 = (Q - e1 * q1) / e2
        if q2 < 0 or q2 > 1:
            return mp.inf
        return zeta(s, n, q1, q2)

    step = (hi - lo) / (grid - 1)
    best = min(range(grid), key=lambda i: f(lo + i * step))
    a = max(lo, lo + (best - 1) * step)
    b = min(hi, lo + (best + 1) * step)
    q1, z = golden_min(f, a, b)
    return z, q1, (Q - e1 * q1) / e2


def q_pc(s, delta, n, guess):
    return mp.findroot(lambda Q: line_min(s, delta, n, Q, grid=801)[0], (guess * 0.999, guess * 1.001),
                       solver="secant", tol=mp.mpf(10) ** -40)


def p_tilde(s, delta, Q):
    s, delta, Q = mp.mpf(s), mp.mpf(delta), mp.mpf(Q)
    e1 = (1 - delta) / 2
    e2 = 1 - e1
    c2 = 1 - s * s
    c = mp.sqrt(c2)
    Qb = 1 - Q
    q0 = 2 * mp.sqrt(e1 * e2) * s
    qth = 2 * e1 * e2 * c2 / (1 - q0)
    if e1 < s * s / (1 + s * s) and Q > qth:
        R = mp.sqrt(Q * Qb - e1 * e2 * c2)
        num = (e2 - e1) * (e2 - Q) * c2 + Qb * s * s + 2 * e1 * s * c * R
        return e2 / Qb * num / (1 - 4 * e1 * e2 * c2)
    return (Qb + mp.sqrt(Qb * Qb - (Q - q0) ** 2)) / (2 * Qb)


def f(x):
    return float(x)


def isometry(s, delta, n, Q):
    z, q1, q2 = line_min(s, delta, n, Q)
    s, delta = mp.mpf(s), mp.mpf(delta)
    e1 = (1 - delta) / 2
    e2 = 1 - e1
    p1, p2 = 1 - q1, 1 - q2
    Qb = 1 - mp.mpf(Q)
    sp = (s - mp.sqrt(q1 * q2)) / mp.sqrt(p1 * p2)
    th = mp.acos(s ** n) / 2
    thp = mp.acos(sp) / 2
    dpost = (e2 * p2 - e1 * p1) / Qb
    x = 2 * (th - thp)
    om = mp.atan2(dpost * mp.sin(x), mp.cos(x)) / 2
    b0 = mp.matrix([mp.cos(om), -mp.sin(om)])
    b1 = mp.matrix([mp.sin(om), mp.cos(om)])
    al = mp.acos(s) / 2
    inputs = mp.matrix([[mp.cos(al), mp.cos(al)], [mp.sin(al), -mp.sin(al)]])
    out = mp.matrix(4, 2)
    for k, sign in ((0, 1), (1, -1)):
        clone = mp.cos(thp) * b0 + sign * mp.sin(thp) * b1
        amp_s, amp_f = mp.sqrt((p1, p2)[k]), mp.sqrt((q1, q2)[k])
        for i in range(2):
            out[2 * i, k] = amp_s * clone[i]
            out[2 * i + 1, k] = amp_f * b0[i]
    V = out * inputs ** -1
    return {
        "theta": f(th), "theta_prime": f(thp), "omega": f(om), "q1": f(q1), "q2": f(q2),
        "isometry": [[f(V[i, j]) for j in range(2)] for i in range(4)],
        "fidelity": f(fidelity(e1, Q, z)),
    }


def main():
    g = {}
    g["zeta_0.7_n3_0.1_0.3"] = f(zeta(0.7, 3, 0.1, 0.3))
    g["zeta_max_0.8_n5"] = f(zeta(0.8, 5, 0, 0))
    g["zeta_max_0.5_n2"] = f(zeta(0.5, 2, 0, 0))
    g["fidelity_equal_q0_zeta_0.2676"] = f(fidelity(0.5, 0, mp.mpf("0.2676")))

    Q, D, phi = mp.mpf("0.3"), mp.mpf("0.5"), mp.mpf(2)
    r = mp.sqrt(1 - D * D)
    g["ellipse_point_0.3_0.5_2.0"] = [f(Q * mp.cos(phi) / r), f(Q / r ** 2 + Q * D * mp.sin(phi) / r ** 2)]

    s, n, z, u = mp.mpf("0.5"), 2, mp.mpf("0.1"), mp.mpf("0.2")
    sn = s ** n
    g["parabola_v_0.5_n2_0.1_0.2"] = f((1 - s * s + 2 * s * u - (((s - u) * mp.sqrt(1 - sn * sn) - z) / sn) ** 2) / 2)

    # phi at Q -> 0: optimal split direction of a vanishing failure budget
    eps = mp.mpf(10) ** -24
    _, q1, q2 = line_min(0.7, 0.1, 2, eps)
    e1 = mp.mpf("0.45")
    g["phi_max_0.7_0.1_n2"] = f(mp.asin((e1 * q1 - (1 - e1) * q2) / eps))

    s, e1 = mp.mpf("0.8"), mp.mpf("0.1")
    g["q_th_0.8_eta0.1"] = f(2 * e1 * (1 - e1) * (1 - s * s) / (1 - 2 * mp.sqrt(e1 * (1 - e1)) * s))

    # FRIO clone fidelity, n = 1, s = 0.5, eta1 = 0.3
    e1, s2n = mp.mpf("0.3"), mp.mpf("0.5") ** 2
    p1, r1, p2, r2 = mp.mpf("0.6"), mp.mpf("0.1"), mp.mpf("0.7"), mp.mpf("0.05")
    Qs = e1 * (1 - p1 - r1) + (1 - e1) * (1 - p2 - r2)
    g["frio_clone_fidelity_n1"] = {
        "eta1": 0.3, "p1": 0.6, "r1": 0.1, "p2": 0.7, "r2": 0.05, "Q": f(Qs),
        "value": f((e1 * (p1 + r1 * s2n) + (1 - e1) * (p2 + r2 * s2n)) / (1 - Qs)),
    }

    # Appendix-style perfect square at s = 0.8, delta = 0.8, Q = 0.3
    s, d, Q = mp.mpf("0.8"), mp.mpf("0.8"), mp.mpf("0.3")
    c = mp.sqrt(1 - s * s)
    e1 = (1 - d) / 2
    R = mp.sqrt(Q * (1 - Q) - e1 * (1 - e1) * c * c)
    zt = (s * (2 * (d * d - Q) + (1 + s * s) * (1 - d * d)) - 2 * d * c * R) / (2 * (s * s + d * d * c * c))
    lhs = (1 - Q) ** 2 - 4 * e1 * (1 - e1) * zt ** 2
    br = 2 * s * c * (1 - d * d) * R + d * (2 * (d * d - Q) + (1 + s * s) * (1 - d * d))
    g["perfect_square_0.8_0.8_0.3"] = [f(lhs), f(br * br / (4 * (s * s + d * d * c * c) ** 2))]
    g["asymptotic_fidelity_0.8_0.8_0.3"] = f(fidelity(e1, Q, zt))
    g["p_tilde_0.8_0.8_0.3"] = f(p_tilde(0.8, 0.8, 0.3))

    qpc = q_pc(0.8, 0.8, 2, 0.40996732417707826)
    g["q_pc_0.8_0.8_n2"] = f(qpc)
    Qm = qpc / 2
    z, q1, q2 = line_min(0.8, 0.8, 2, Qm)
    g["midpoint_0.8_0.8_n2"] = {"Q": f(Qm), "zeta_min": f(z), "q1": f(q1), "q2": f(q2),
                                "fidelity": f(fidelity(0.1, Qm, z))}

    table = []
    for k in range(1, 11):
        Qk = mp.mpf(k) / 11 * qpc
        z, q1, q2 = line_min(0.8, 0.8, 2, Qk)
        table.append({"Q": f(Qk), "zeta_min": f(z), "q1": f(q1), "q2": f(q2)})
    g["oracle_table_0.8_0.8_n2"] = table

    g["isometry_0.7_0.1_n2_Q0.1"] = isometry(0.7, 0.1, 2, 0.1)

    conv = []
    for n in (2, 4, 8, 16, 32, 64):
        z, _, _ = line_min(0.8, 0.8, n, mp.mpf("0.2"))
        conv.append([n, f(fidelity(0.1, mp.mpf("0.2"), z))])
    conv.append(["inf", f(p_tilde(0.8, 0.8, 0.2))])
    g["convergence_0.8_0.8_Q0.2"] = conv

    th, thp, dp = mp.mpf("0.3"), mp.mpf("0.1"), mp.mpf("0.5")
    x = 2 * (th - thp)
    g["omega_0.3_0.1_0.5"] = f(mp.atan2(dp * mp.sin(x), mp.cos(x)) / 2)
    g["fmax_0.3_0.1_0.5"] = f((1 + mp.sqrt(mp.cos(x) ** 2 + dp * dp * mp.sin(x) ** 2)) / 2)

    OUT.write_text(json.dumps(g, indent=2) + "\n")


if __name__ == "__main__":
    main()
