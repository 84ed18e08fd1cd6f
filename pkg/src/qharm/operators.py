"""Translation, convolution, the q-Gauss kernel and the positivity probe.

Translation is evaluated spectrally (one transform, one kernel-weighted
transform); the triple-product kernel D_v is only materialized for the
verification routes and the window positivity scan.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import LatticeMismatchError
from .qlattice import (
    LatticeFunction,
    QLattice,
    QParams,
    lp_norm,
    q_exponential,
    q_pochhammer_infinite,
)
from .transform import TransformTable, fourier_transform, fourier_transform_detail


def translation(
    f: LatticeFunction, x_exponent: int, table: TransformTable
) -> LatticeFunction:
    """T_x f(y) = c int F f(t) j_v(xt) j_v(yt) t^{2v+1} d_qt at x = q^{x_exponent}.

    Computed as the transform of F f multiplied by the Bessel row of x; the
    summation order is the ascending lattice order of the dense matrix
    product, so results are deterministic.
    """
    ff = fourier_transform(f, table)
    weighted = LatticeFunction(
        table.lattice,
        ff.values * table.jv_row(x_exponent),
        value_at_zero=None,
    )
    return fourier_transform(weighted, table)


def translation_kernel(
    x_exponent: int, y_exponent: int, z_exponent: int, table: TransformTable
) -> float:
    """D_v(x,y,z) = c^2 int j_v(xt) j_v(yt) j_v(zt) t^{2v+1} d_qt (window sum)."""
    params = table.params
    integrand = (
        table.weights
        * table.jv_row(x_exponent)
        * table.jv_row(y_exponent)
        * table.jv_row(z_exponent)
    )
    return params.c_qv ** 2 * (1.0 - params.q) * float(integrand.sum())


def translation_via_kernel(
    f: LatticeFunction, x_exponent: int, table: TransformTable
) -> LatticeFunction:
    """Kernel route of the translation: int f(z) D_v(x,y,z) z^{2v+1} d_qz."""
    lat = table.lattice
    params = table.params
    rows = np.stack([table.jv_row(n) for n in lat.indices])  # rows[i] = j(q^{n_i + k})
    w = table.weights
    x_row = table.jv_row(x_exponent)
    # D(x, y_i, z_j) = c^2 (1-q) sum_k w_k x_row[k] rows[i,k] rows[j,k]
    core = params.c_qv ** 2 * (1.0 - params.q) * ((rows * (w * x_row)) @ rows.T)
    out = core @ (w * f.values) * (1.0 - params.q)
    return LatticeFunction(lat, out)


def convolution(
    f: LatticeFunction,
    g: LatticeFunction,
    table: TransformTable,
    route: str = "spectral",
) -> LatticeFunction:
    """q-convolution f * g.

    spectral route: F(F f . F g), using the factorization of the convolution
    theorem together with self-inversion.  direct route: the defining double
    sum c int T_x f(y) g(y) y^{2v+1} d_qy evaluated per output point.
    """
    f.same_window(g)
    if f.lattice != table.lattice:
        raise LatticeMismatchError("operands must live on the table lattice")
    params = table.params
    if route == "spectral":
        ff = fourier_transform(f, table)
        gg = fourier_transform(g, table)
        prod = LatticeFunction(table.lattice, ff.values * gg.values)
        return fourier_transform(prod, table)
    if route == "direct":
        lat = table.lattice
        w = table.weights
        out = np.empty(lat.size, dtype=complex)
        for i, n in enumerate(lat.indices):
            tf = translation(f, int(n), table)
            out[i] = params.c_qv * (1.0 - params.q) * np.sum(w * tf.values * g.values)
        if f.is_real and g.is_real:
            out = out.real
        return LatticeFunction(lat, out)
    raise ValueError(f"unknown route {route!r}")


@dataclass(frozen=True)
class YoungReport:
    p: float
    p_prime: float
    r: float
    norm_r: float
    finite: bool


def young_inequality_check(
    f: LatticeFunction,
    g: LatticeFunction,
    p: float,
    p_prime: float,
    table: TransformTable,
) -> YoungReport:
    """Convolve and report ||f*g||_r for 1/r = 1/p + 1/p' - 1.

    Only membership is asserted (the underlying inequality carries no stated
    constant), and the exponent hypotheses 1 < p, p', r <= 2 are enforced.
    """
    if not (1.0 < p <= 2.0) or not (1.0 < p_prime <= 2.0):
        raise ValueError("need 1 < p, p' <= 2")
    inv_r = 1.0 / p + 1.0 / p_prime - 1.0
    if inv_r <= 0.0:
        raise ValueError(f"1/p + 1/p' - 1 = {inv_r} does not define a finite r")
    r = 1.0 / inv_r
    if not (1.0 < r <= 2.0):
        raise ValueError(f"r = {r} violates 1 < r <= 2")
    conv = convolution(f, g, table, route="spectral")
    norm_r = lp_norm(conv, r, table.params)
    return YoungReport(p=p, p_prime=p_prime, r=r, norm_r=norm_r, finite=bool(np.isfinite(norm_r)))


def gauss_kernel(x: float, t: float, params: QParams) -> float:
    """q-Gauss kernel G^v(x, t, q^2)."""
    if t <= 0.0:
        raise ValueError("t must be positive")
    q2 = params.q ** 2
    q2v2 = params.q ** (2.0 * params.v + 2.0)
    qm2v = params.q ** (-2.0 * params.v)
    tol, cap = params.trunc_tol, params.max_terms
    num = q_pochhammer_infinite(-q2v2 * t, q2, tol, cap).real * q_pochhammer_infinite(
        -qm2v / t, q2, tol, cap
    ).real
    den = q_pochhammer_infinite(-t, q2, tol, cap).real * q_pochhammer_infinite(
        -q2 / t, q2, tol, cap
    ).real
    return num / den * q_exponential(-qm2v * x * x / t, q2, tol, cap).real


def gauss_kernel_function(
    t: float, params: QParams, lattice: QLattice
) -> LatticeFunction:
    """G^v(., t, q^2) sampled on a window, with its x -> 0 limit."""
    vals = np.array([gauss_kernel(float(x), t, params) for x in lattice.points])
    return LatticeFunction(lattice, vals, value_at_zero=gauss_kernel(0.0, t, params))


@dataclass(frozen=True)
class GaussLimitReport:
    a_values: Tuple[float, ...]
    integrals: Tuple[float, ...]
    target: float
    final_deviation: float


def gauss_delta_limit_check(
    f: LatticeFunction, a_sequence: Sequence[float], table: TransformTable
) -> GaussLimitReport:
    """Track c int f(x) G^v(x, a^2) x^{2v+1} d_qx along shrinking widths a.

    The limit is f(0), so f must carry value_at_zero.
    """
    if f.value_at_zero is None:
        raise ValueError("f must have value_at_zero set")
    params = table.params
    lat = table.lattice
    w = table.weights
    integrals = []
    for a in a_sequence:
        g = np.array([gauss_kernel(float(x), a * a, params) for x in lat.points])
        integrals.append(
            params.c_qv * (1.0 - params.q) * complex(np.sum(w * f.values * g))
        )
    target = f.value_at_zero
    vals = tuple(x.real if abs(x.imag) == 0.0 else x for x in integrals)
    dev = abs(integrals[-1] - target) if integrals else abs(target)
    return GaussLimitReport(
        a_values=tuple(float(a) for a in a_sequence),
        integrals=vals,
        target=target,
        final_deviation=float(dev),
    )


@dataclass(frozen=True)
class QvProbeReport:
    q: float
    v: float
    n_min: int
    n_max: int
    min_value: float
    witness: Optional[Tuple[int, int, int]]
    verdict: str
    tolerance: float


def _probe_integration_window(params: QParams, lattice: QLattice) -> QLattice:
    """Integration window for the D_v scan: extends past the probe window so
    the Jackson tail is below roundoff for every probed triple."""
    import math

    decay = (2.0 * params.v + 2.0) * math.log(1.0 / params.q)
    top = max(lattice.n_max, int(math.ceil(40.0 / decay))) + 2
    bottom = lattice.n_min - 15
    return QLattice(params.q, bottom, top)


def qv_membership_probe(
    params: QParams,
    lattice: QLattice,
    tolerance: float = 1e-10,
    threads: Optional[int] = None,
) -> QvProbeReport:
    """Exhaustive window scan of min D_v(x,y,z).

    A finite-window heuristic only: a clean scan reports "no negativity
    detected", never membership of q in the positivity set.  Deterministic
    output regardless of thread count (each (x,y) slab is an independent
    fixed-order reduction).
    """
    from .transform import build_transform_table

    integration = _probe_integration_window(params, lattice)
    table = build_transform_table(params, integration)
    k_lo = integration.n_min
    rows = np.stack([table.jv_row(n) for n in lattice.indices])
    w = table.weights
    scale = params.c_qv ** 2 * (1.0 - params.q)
    n_pts = lattice.size

    def slab(i: int) -> Tuple[float, Tuple[int, int, int]]:
        x_row = rows[i]
        # D(x_i, y_j, z_l) over all j, l at once
        core = scale * ((rows * (w * x_row)) @ rows.T)
        flat = int(np.argmin(core))
        j, l = divmod(flat, n_pts)
        return float(core[j, l]), (i, j, l)

    if threads is None:
        env = os.environ.get("QHARM_THREADS", "0")
        try:
            threads = int(env)
        except ValueError:
            threads = 0
    results: List[Tuple[float, Tuple[int, int, int]]]
    if threads == 1 or n_pts < 8:
        results = [slab(i) for i in range(n_pts)]
    else:
        from concurrent.futures import ThreadPoolExecutor

        workers = threads if threads > 0 else (os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(slab, range(n_pts)))
    min_val, best = min(results, key=lambda r: r[0])
    offs = lattice.n_min
    witness = None
    verdict = f"no negativity detected at tolerance -{tolerance:g}"
    if min_val < -tolerance:
        witness = (best[0] + offs, best[1] + offs, best[2] + offs)
        verdict = "negativity detected"
    return QvProbeReport(
        q=params.q,
        v=params.v,
        n_min=lattice.n_min,
        n_max=lattice.n_max,
        min_value=min_val,
        witness=witness,
        verdict=verdict,
        tolerance=tolerance,
    )
