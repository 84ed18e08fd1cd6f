"""Lattice tables of the normalized Hahn-Exton q-Bessel function.

Transform kernels only ever need j_v(q^m, q^2) at integer exponents m.  For
m >= 0 the defining series is benign in double precision.  For m < 0 the
series cancels catastrophically (the true value decays like q^{m^2} while
intermediate terms explode), so the table is filled by the three-term
recurrence in the argument exponent,

    j(q^m) = (1 + q^{2v} - q^{2m+2}) j(q^{m+1}) - q^{2v} j(q^{m+2}),

run upward from tiny seeds well below the window (Miller's algorithm: the
desired solution is minimal in the downward direction, so contamination from
the dominant solution dies off as the recurrence climbs) and normalized
against series values at the top.  Chain entries are kept as
(mantissa, base-2 exponent) pairs because the dynamic range of j along the
chain exceeds what a double can hold.
"""
from __future__ import annotations

import math
from typing import List, Tuple

import numpy as np

from .qlattice import QParams, hahn_exton_jv_detail

# extra recurrence steps below the lowest requested exponent; contamination
# decays superexponentially with this margin
_SEED_MARGIN = 16

_MIN_EXP = -1020  # below this base-2 scale a double underflows anyway


def _scaled(x: float, e: int) -> Tuple[float, int]:
    if x == 0.0:
        return 0.0, 0
    m, ex = math.frexp(x)
    return m, ex + e


def _add_scaled(a: Tuple[float, int], b: Tuple[float, int]) -> Tuple[float, int]:
    (ma, ea), (mb, eb) = a, b
    if ma == 0.0:
        return b
    if mb == 0.0:
        return a
    if ea < eb:
        (ma, ea), (mb, eb) = (mb, eb), (ma, ea)
    shift = eb - ea
    if shift < -100:
        return ma, ea
    return _scaled(ma + math.ldexp(mb, shift), ea)


def _mul_scaled(a: Tuple[float, int], x: float) -> Tuple[float, int]:
    ma, ea = a
    if ma == 0.0 or x == 0.0:
        return 0.0, 0
    return _scaled(ma * x, ea)


def _to_float(a: Tuple[float, int]) -> float:
    m, e = a
    if m == 0.0 or e < _MIN_EXP:
        return 0.0
    if e > 1024:
        raise OverflowError("scaled chain value exceeds double range")
    return math.ldexp(m, e)


def lattice_jv_table(params: QParams, m_lo: int, m_hi: int) -> np.ndarray:
    """j_v(q^m, q^2) for m in [m_lo, m_hi], index offset by m_lo.

    Series for m >= 0, scaled Miller recurrence for m < 0.
    """
    if m_lo > m_hi:
        raise ValueError("empty exponent range")
    q = params.q
    q2 = q * q
    out = np.empty(m_hi - m_lo + 1, dtype=float)

    top_nonneg = max(m_hi, 3)
    series = {}
    for m in range(0, top_nonneg + 1):
        series[m] = hahn_exton_jv_detail(
            q ** m, q2, params.v, params.trunc_tol, params.max_terms
        ).value
    for m in range(max(m_lo, 0), m_hi + 1):
        out[m - m_lo] = series[m]

    if m_lo < 0:
        p2v = q ** (2.0 * params.v)
        start = m_lo - _SEED_MARGIN
        # normalize where the series value is largest in magnitude, to dodge
        # accidental proximity to a zero of j
        m_ref = max(range(0, 4), key=lambda m: abs(series[m]))
        chain: List[Tuple[float, int]] = [(0.0, 0), (1.0, _MIN_EXP)]
        # chain[i] holds j at exponent start + i (up to one global scale)
        m = start
        while m + 2 <= m_ref:
            a = 1.0 + p2v - q ** (2 * m + 2)
            nxt = _add_scaled(
                _mul_scaled(chain[-1], a), _mul_scaled(chain[-2], -1.0)
            )
            nxt = _mul_scaled(nxt, 1.0 / p2v)
            chain.append(nxt)
            m += 1
        ref_val = chain[m_ref - start]
        if ref_val[0] == 0.0:
            raise ZeroDivisionError("Miller chain lost the reference value")
        scale = (series[m_ref] / ref_val[0], -ref_val[1])
        for m in range(m_lo, min(0, m_hi + 1)):
            entry = chain[m - start]
            scaled_entry = (entry[0] * scale[0], entry[1] + scale[1])
            out[m - m_lo] = _to_float(_scaled(*scaled_entry))
    return out


def hahn_exton_jv_stable(
    z: float,
    q_base: float,
    v: float,
    trunc_tol: float = None,
    max_terms: int = None,
) -> float:
    """Series evaluation with a recurrence fallback for cancelling arguments.

    When the alternating series loses precision and z sits on the lattice
    z = q^m (q = sqrt(q_base), integer m < 0), the value is taken from the
    recurrence-based table instead, which is accurate to machine precision
    there.  Off-lattice cancelling arguments fall back to the flagged series
    value; there is no better double-precision route for those.
    """
    from .qlattice import DEFAULT_MAX_TERMS, DEFAULT_TRUNC_TOL, hahn_exton_jv_detail

    tol = DEFAULT_TRUNC_TOL if trunc_tol is None else trunc_tol
    cap = DEFAULT_MAX_TERMS if max_terms is None else max_terms
    detail = hahn_exton_jv_detail(z, q_base, v, tol, cap)
    if not detail.cancellation or z <= 1.0:
        return detail.value
    q = math.sqrt(q_base)
    m_real = math.log(z) / math.log(q)
    m = round(m_real)
    if m >= 0 or abs(m_real - m) > 1e-8:
        return detail.value
    params = QParams(q=q, v=v, trunc_tol=tol, max_terms=cap)
    return float(lattice_jv_table(params, m, 0)[0])


def bessel_bound_envelope(params: QParams, m: np.ndarray) -> np.ndarray:
    """Lattice decay bound: constant for m >= 0, constant * q^{m^2+(2v+1)m}
    for m < 0."""
    const = params.bessel_bound_constant
    m = np.asarray(m, dtype=float)
    expo = np.where(m < 0, m * m + (2.0 * params.v + 1.0) * m, 0.0)
    # q^expo can overflow double for very negative m; go through logs
    log_env = math.log(const) + expo * math.log(params.q)
    with np.errstate(over="ignore"):
        return np.exp(np.minimum(log_env, 700.0))
