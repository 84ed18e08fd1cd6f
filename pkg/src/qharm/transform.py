"""The q-Bessel Fourier transform on a lattice window.

The kernel j_v(q^k q^n, q^2) depends only on k+n, so a single table of
Bessel values indexed by the exponent sum serves the transform, translation
and convolution.  The transform maps the window to itself; self-inversion
and Plancherel then hold up to window truncation, which the verify_* helpers
measure on an interior sub-window.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .bessel import bessel_bound_envelope, lattice_jv_table
from .errors import LatticeMismatchError
from .qlattice import LatticeFunction, QLattice, QParams, lp_norm

BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class TransformTable:
    """Precomputed kernel data shared by all window operators.

    bessel_values[i] = j_v(q^{2 n_min + i}, q^2), covering every exponent sum
    k+n reachable from the window.
    """

    params: QParams
    lattice: QLattice
    bessel_values: np.ndarray = field(repr=False)
    boundedness_constant: float

    def jv_at(self, m: int) -> float:
        """j_v(q^m, q^2) for an exponent sum m."""
        i = m - 2 * self.lattice.n_min
        if not 0 <= i < self.bessel_values.shape[0]:
            raise IndexError(f"exponent sum {m} outside the kernel table")
        return float(self.bessel_values[i])

    def jv_row(self, n: int) -> np.ndarray:
        """Vector j_v(q^{n+k}, q^2) for k running over the window."""
        i = n - self.lattice.n_min
        return self.bessel_values[i : i + self.lattice.size]

    @property
    def weights(self) -> np.ndarray:
        """Jackson-plus-measure weights q^{n(2v+2)} over the window."""
        expo = (2.0 * self.params.v + 2.0) * self.lattice.indices.astype(float)
        return self.params.q ** expo

    @property
    def kernel_matrix(self) -> np.ndarray:
        """Dense transform matrix M[k,n] = c (1-q) q^{n(2v+2)} j_v(q^{k+n})."""
        cached = self.__dict__.get("_kernel_matrix")
        if cached is None:
            size = self.lattice.size
            idx = np.arange(size)
            hankel = self.bessel_values[idx[:, None] + idx[None, :]]
            scale = self.params.c_qv * (1.0 - self.params.q)
            cached = scale * hankel * self.weights[None, :]
            object.__setattr__(self, "_kernel_matrix", cached)
        return cached


def build_transform_table(params: QParams, lattice: QLattice) -> TransformTable:
    """Evaluate every kernel Bessel value the window can reach.

    Each tabulated value is checked against the lattice decay bound (with a
    small absolute slack covering double-precision noise in the tiny entries).
    """
    if abs(lattice.q - params.q) > 1e-15 * params.q:
        raise ValueError("params and lattice disagree on q")
    if not lattice.straddles_one() and lattice.size > 1:
        raise ValueError("transform window must straddle x=1 (n_min < 0 < n_max)")
    m_lo, m_hi = 2 * lattice.n_min, 2 * lattice.n_max
    values = lattice_jv_table(params, m_lo, m_hi)
    ms = np.arange(m_lo, m_hi + 1)
    envelope = bessel_bound_envelope(params, ms)
    bad = np.abs(values) > envelope + BOUND_SLACK
    if np.any(bad):
        worst = ms[bad][0]
        raise ValueError(
            f"tabulated j_v(q^{worst}) violates the decay bound: "
            f"{values[bad][0]} vs {envelope[bad][0]}"
        )
    return TransformTable(
        params=params,
        lattice=lattice,
        bessel_values=values,
        boundedness_constant=float(params.bessel_bound_constant),
    )


class TransformResult(NamedTuple):
    function: LatticeFunction
    edge_warning: bool


def _check_lattice(f: LatticeFunction, table: TransformTable) -> None:
    if f.lattice != table.lattice:
        raise LatticeMismatchError("function lattice does not match table lattice")


def fourier_transform_detail(
    f: LatticeFunction, table: TransformTable
) -> TransformResult:
    """F f(q^k) = c (1-q) sum_n q^{n(2v+2)} f(q^n) j_v(q^{k+n}, q^2).

    The output lives on the input window; value_at_zero is filled from the
    j_v(0)=1 limit of the same sum.  An edge warning is raised when the
    summand magnitude at either window end exceeds trunc_tol (the window then
    visibly truncates the infinite Jackson sum).
    """
    _check_lattice(f, table)
    params = table.params
    scale = params.c_qv * (1.0 - params.q)
    weighted = table.weights * f.values
    out = table.kernel_matrix @ f.values
    at_zero = scale * weighted.sum()
    tol = params.trunc_tol
    edge = bool(abs(weighted[0]) > tol or abs(weighted[-1]) > tol)
    return TransformResult(
        LatticeFunction(table.lattice, out, value_at_zero=at_zero), edge
    )


def fourier_transform(f: LatticeFunction, table: TransformTable) -> LatticeFunction:
    return fourier_transform_detail(f, table).function


def delta_qv(x_exponent: int, y_exponent: int, params: QParams) -> float:
    """Reproducing diagonal weight: 0 off-diagonal, 1/((1-q) x^{2v+2}) on it."""
    if x_exponent != y_exponent:
        return 0.0
    x = params.q ** x_exponent
    return 1.0 / ((1.0 - params.q) * x ** (2.0 * params.v + 2.0))


def clean_inversion_range(lattice: QLattice) -> tuple:
    """Exponent range [lo, hi] whose kernel columns invert to < 1e-10.

    Inverting the lattice point q^n needs transform exponents near -n, so
    the usable range shrinks from both window ends; the constants cover
    every supported (q, v) regime at the default window sizes.
    """
    lo = lattice.n_min + 8
    hi = min(12, -lattice.n_min - 6, lattice.n_max - 8)
    if hi < lo:
        raise ValueError("window too small for clean inversion")
    return lo, hi


def interior_slice(lattice: QLattice, fraction: float = 0.6) -> slice:
    """Centered sub-window holding `fraction` of the indices."""
    size = lattice.size
    margin = int(round(size * (1.0 - fraction) / 2.0))
    margin = min(margin, (size - 1) // 2)
    return slice(margin, size - margin)


@dataclass(frozen=True)
class InversionReport:
    max_interior_error: float
    interior: slice
    edge_warning: bool


def verify_inversion(
    f: LatticeFunction, table: TransformTable, fraction: float = 0.6
) -> InversionReport:
    """Max deviation of F(F f) from f on the interior sub-window."""
    first = fourier_transform_detail(f, table)
    second = fourier_transform_detail(first.function, table)
    sl = interior_slice(table.lattice, fraction)
    diff = np.abs(second.function.values[sl] - f.values[sl])
    scale = float(np.abs(f.values).max())
    err = float(diff.max()) / scale if scale > 0.0 else float(diff.max()) if diff.size else 0.0
    return InversionReport(
        max_interior_error=err,
        interior=sl,
        edge_warning=first.edge_warning or second.edge_warning,
    )


@dataclass(frozen=True)
class PlancherelReport:
    input_norm: float
    output_norm: float
    error: float  # relative when the input norm is nonzero, else absolute


def verify_plancherel(f: LatticeFunction, table: TransformTable) -> PlancherelReport:
    ff = fourier_transform(f, table)
    n_in = lp_norm(f, 2.0, table.params)
    n_out = lp_norm(ff, 2.0, table.params)
    if n_in == 0.0:
        return PlancherelReport(n_in, n_out, abs(n_out - n_in))
    return PlancherelReport(n_in, n_out, abs(n_out - n_in) / n_in)


@dataclass(frozen=True)
class OrthogonalityReport:
    n: int
    m: int
    value: float
    target: float
    error: float


def verify_orthogonality(n: int, m: int, table: TransformTable) -> OrthogonalityReport:
    """Window Jackson sum of c^2 int j_v(q^n x) j_v(q^m x) x^{2v+1} d_qx."""
    lat = table.lattice
    if not (
        2 * lat.n_min <= n + lat.n_min and n + lat.n_max <= 2 * lat.n_max
    ) or not (2 * lat.n_min <= m + lat.n_min and m + lat.n_max <= 2 * lat.n_max):
        raise ValueError("n or m pushes the kernel outside the tabulated range")
    params = table.params
    q = params.q
    integrand = table.weights * table.jv_row(n) * table.jv_row(m)
    value = params.c_qv ** 2 * (1.0 - q) * float(integrand.sum())
    target = (
        q ** (-2.0 * n * (params.v + 1.0)) / (1.0 - q) if n == m else 0.0
    )
    return OrthogonalityReport(n=n, m=m, value=value, target=target, error=abs(value - target))


@dataclass(frozen=True)
class L1BoundReport:
    sup_transform: float
    bound: float
    holds: bool


def verify_l1_bound(f: LatticeFunction, table: TransformTable) -> L1BoundReport:
    """sup |F f| against B_qv ||f||_1 on the window."""
    ff = fourier_transform(f, table)
    sup = float(np.abs(ff.values).max())
    if ff.value_at_zero is not None:
        sup = max(sup, abs(ff.value_at_zero))
    bound = table.params.B_qv * lp_norm(f, 1.0, table.params)
    return L1BoundReport(sup, bound, sup <= bound * (1.0 + BOUND_SLACK) + 1e-300)
