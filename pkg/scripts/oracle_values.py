"""Generate 50-digit reference values for the oracle agreement test.

Every quantity is computed here from scratch with mpmath at high working
precision, independently of the library code, and printed as a JSON list of
pins.  The frozen copy lives in tests/data/oracle_pins.json; rerun this
script only to regenerate it, never at test time.

Usage: python3 scripts/oracle_values.py > tests/data/oracle_pins.json
"""
from __future__ import annotations

import json

import mpmath as mp

mp.mp.dps = 120
DIGITS = 50


def qp_inf(a, q):
    """(a; q)_infinity."""
    return mp.qp(mp.mpf(a), mp.mpf(q))


def q_exp(z, q):
    """e(z, q) = 1 / (z; q)_infinity."""
    return 1 / qp_inf(z, q)


def jv(z, p, v, terms=600):
    """Normalized Hahn-Exton series in base p: sum over n of
    (-1)^n p^{n(n+1)/2} z^{2n} / ((p;p)_n (p^{v+1};p)_n)."""
    z = mp.mpf(z)
    p = mp.mpf(p)
    v = mp.mpf(v)
    pp = mp.mpf(1)
    pv = mp.mpf(1)
    pv1 = mp.power(p, v + 1)
    total = mp.mpf(0)
    zn = mp.mpf(1)
    for n in range(terms):
        if n > 0:
            pp *= 1 - mp.power(p, n)
            pv *= 1 - pv1 * mp.power(p, n - 1)
        term = (-1) ** n * mp.power(p, mp.mpf(n) * (n + 1) / 2) * zn / (pp * pv)
        total += term
        zn *= z * z
        if n > 10 and abs(term) < mp.mpf(10) ** (-(mp.mp.dps + 10)) * (1 + abs(total)):
            break
    return total


def c_qv(q, v):
    q = mp.mpf(q)
    v = mp.mpf(v)
    q2 = q * q
    return qp_inf(mp.power(q, 2 * v + 2), q2) / qp_inf(q2, q2) / (1 - q)


def big_b_qv(q, v):
    q = mp.mpf(q)
    v = mp.mpf(v)
    q2 = q * q
    return qp_inf(-q2, q2) * qp_inf(-mp.power(q, 2 * v + 2), q2) / qp_inf(q2, q2) / (1 - q)


def gauss(x, t, q, v):
    q = mp.mpf(q)
    v = mp.mpf(v)
    x = mp.mpf(x)
    t = mp.mpf(t)
    q2 = q * q
    num = qp_inf(-mp.power(q, 2 * v + 2) * t, q2) * qp_inf(-mp.power(q, -2 * v) / t, q2)
    den = qp_inf(-t, q2) * qp_inf(-q2 / t, q2)
    return num / den * q_exp(-mp.power(q, -2 * v) * x * x / t, q2)


def pin(name, kind, value, flagged=False, **params):
    return {
        "name": name,
        "kind": kind,
        "params": params,
        "value": mp.nstr(value, DIGITS, strip_zeros=False),
        "flagged_large_argument": flagged,
    }


def main():
    pins = []
    # q-Pochhammer infinite
    pins.append(pin("qp_025_025", "pochhammer_inf", qp_inf("0.25", "0.25"), a=0.25, q=0.25))
    pins.append(pin("qp_neg025_025", "pochhammer_inf", qp_inf("-0.25", "0.25"), a=-0.25, q=0.25))
    pins.append(pin("qp_081_081", "pochhammer_inf", qp_inf("0.81", "0.81"), a=0.81, q=0.81))
    pins.append(pin("qp_neg4_025", "pochhammer_inf", qp_inf("-4", "0.25"), a=-4.0, q=0.25))
    # q-exponential
    pins.append(pin("qexp_neg1_025", "qexp", q_exp("-1", "0.25"), z=-1.0, q=0.25))
    pins.append(pin("qexp_05_025", "qexp", q_exp("0.5", "0.25"), z=0.5, q=0.25))
    pins.append(pin("qexp_neg2_081", "qexp", q_exp("-2", "0.81"), z=-2.0, q=0.81))
    # Hahn-Exton j_v in base p = q^2
    pins.append(pin("jv_v0_z1_p025", "jv", jv("1", "0.25", "0"), z=1.0, p=0.25, v=0.0))
    pins.append(pin("jv_v0_z0125_p025", "jv", jv("0.125", "0.25", "0"), z=0.125, p=0.25, v=0.0))
    pins.append(pin("jv_v15_z1_p025", "jv", jv("1", "0.25", "1.5"), z=1.0, p=0.25, v=1.5))
    pins.append(pin("jv_v15_z05_p081", "jv", jv("0.5", "0.81", "1.5"), z=0.5, p=0.81, v=1.5))
    pins.append(
        pin("jv_v0_z8_p025", "jv", jv("8", "0.25", "0"), flagged=True, z=8.0, p=0.25, v=0.0)
    )
    pins.append(
        pin("jv_v0_z32_p025", "jv", jv("32", "0.25", "0"), flagged=True, z=32.0, p=0.25, v=0.0)
    )
    pins.append(
        pin(
            "jv_v15_z8_p025", "jv", jv("8", "0.25", "1.5"), flagged=True, z=8.0, p=0.25, v=1.5
        )
    )
    # transform constants
    pins.append(pin("c_qv_05_0", "c_qv", c_qv("0.5", "0"), q=0.5, v=0.0))
    pins.append(pin("c_qv_05_15", "c_qv", c_qv("0.5", "1.5"), q=0.5, v=1.5))
    pins.append(pin("B_qv_05_0", "B_qv", big_b_qv("0.5", "0"), q=0.5, v=0.0))
    pins.append(pin("B_qv_09_15", "B_qv", big_b_qv("0.9", "1.5"), q=0.9, v=1.5))
    # Gauss kernel
    pins.append(pin("gauss_v0_x1_t1_q05", "gauss", gauss("1", "1", "0.5", "0"), x=1.0, t=1.0, q=0.5, v=0.0))
    pins.append(
        pin(
            "gauss_v15_x05_t025_q05",
            "gauss",
            gauss("0.5", "0.25", "0.5", "1.5"),
            x=0.5,
            t=0.25,
            q=0.5,
            v=1.5,
        )
    )
    print(json.dumps(pins, indent=2))


if __name__ == "__main__":
    main()
