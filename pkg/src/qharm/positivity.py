"""Positive-type testing, lattice measures and the constructive Bochner pipeline.

The positive-type criterion quantifies over every finite point list; the
checker samples Gram matrices on configurable grids, so POSITIVE means "no
violation found on the tested grids" while NEGATIVE is conclusive and comes
with the violating coefficient vector.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import LatticeMismatchError
from .qlattice import LatticeFunction, QLattice, QParams, jackson_integral, lp_norm
from .transform import (
    TransformTable,
    fourier_transform,
    fourier_transform_detail,
    interior_slice,
)
from .operators import translation, translation_via_kernel

DEFAULT_PSD_TOL = 1e-9


def default_point_exponents(table: TransformTable) -> List[int]:
    """Default Gram grid: q^1..q^8 plus the larger points 1, q^-1, q^-2."""
    lat = table.lattice
    pts = [n for n in range(1, 9) if n <= lat.n_max]
    pts += [n for n in (0, -1, -2) if n >= lat.n_min]
    return pts


@dataclass
class GramMatrix:
    """Translation Gram matrix: entries[r][l] = T_{x_r} phi (x_l)."""

    point_exponents: List[int]
    entries: np.ndarray
    min_eigenvalue: Optional[float] = None

    @property
    def hermitian_defect(self) -> float:
        return float(np.abs(self.entries - self.entries.conj().T).max())


def gram_matrix(
    phi: LatticeFunction, point_exponents: Sequence[int], table: TransformTable
) -> GramMatrix:
    """Assemble the translation Gram matrix over distinct lattice points.

    Uses the spectral form: entry (r,l) = c (1-q) sum_n w_n Fphi(q^n)
    j_v(q^{n+r}) j_v(q^{n+l}), i.e. one transform plus one quadratic form.
    """
    pts = list(point_exponents)
    if len(set(pts)) != len(pts):
        raise ValueError("gram points must be distinct")
    for n in pts:
        table.lattice.index_of(n)  # bounds check
    ff = fourier_transform(phi, table)
    params = table.params
    rows = np.stack([table.jv_row(n) for n in pts])
    diag = params.c_qv * (1.0 - params.q) * table.weights * ff.values
    entries = (rows * diag) @ rows.T
    return GramMatrix(point_exponents=pts, entries=entries)


@dataclass(frozen=True)
class PositivityVerdict:
    positive: bool
    min_eigenvalue: float
    scale: float
    tolerance: float
    witness: Optional[np.ndarray]  # coefficients violating the quadratic form
    point_exponents: Tuple[int, ...]


def is_q_positive_type(
    phi: LatticeFunction,
    point_exponents: Optional[Sequence[int]] = None,
    table: TransformTable = None,
    tol: float = DEFAULT_PSD_TOL,
) -> PositivityVerdict:
    """PSD test of the translation Gram matrix on one point grid.

    The tolerance is relative: lambda_min >= -tol * max(1, ||G||_inf),
    because Gram entries span many orders of magnitude on the lattice.
    """
    if table is None:
        raise ValueError("a transform table is required")
    if point_exponents is None:
        point_exponents = default_point_exponents(table)
    g = gram_matrix(phi, point_exponents, table)
    herm = 0.5 * (g.entries + g.entries.conj().T)
    vals, vecs = np.linalg.eigh(herm)
    lam = float(vals[0])
    g.min_eigenvalue = lam
    scale = max(1.0, float(np.abs(g.entries).max()))
    ok = lam >= -tol * scale
    witness = None if ok else vecs[:, 0]
    return PositivityVerdict(
        positive=bool(ok),
        min_eigenvalue=lam,
        scale=scale,
        tolerance=tol,
        witness=witness,
        point_exponents=tuple(g.point_exponents),
    )


@dataclass(frozen=True)
class GridSweepReport:
    verdicts: Tuple[PositivityVerdict, ...]

    @property
    def all_positive(self) -> bool:
        return all(v.positive for v in self.verdicts)


def _sample_grids(table: TransformTable, rng: np.random.Generator, count: int) -> List[List[int]]:
    lat = table.lattice
    grids = [default_point_exponents(table)]
    pool = np.arange(max(lat.n_min, -4), min(lat.n_max, 14) + 1)
    for _ in range(count):
        size = int(rng.integers(3, min(9, pool.size)))
        grids.append(sorted(int(n) for n in rng.choice(pool, size=size, replace=False)))
    return grids


def verify_transform_positive_type(
    phi: LatticeFunction,
    table: TransformTable,
    tol: float = DEFAULT_PSD_TOL,
    grids: int = 4,
    seed: int = 0,
) -> GridSweepReport:
    """Run the PSD test on F phi over the default grid plus sampled grids."""
    ff = fourier_transform(phi, table)
    rng = np.random.default_rng(seed)
    verdicts = [
        is_q_positive_type(ff, g, table, tol) for g in _sample_grids(table, rng, grids)
    ]
    return GridSweepReport(verdicts=tuple(verdicts))


@dataclass(frozen=True)
class QuadraticFormReport:
    value: complex
    scale: float
    nonnegative: bool


def verify_quadratic_form_positivity(
    phi: LatticeFunction,
    f: LatticeFunction,
    table: TransformTable,
    tol: float = DEFAULT_PSD_TOL,
) -> QuadraticFormReport:
    """<phi * f, f> in the x^{2v+1}-weighted inner product."""
    from .operators import convolution

    conv = convolution(phi, f, table, route="spectral")
    w = table.weights
    val = complex((1.0 - table.params.q) * np.sum(w * conv.values * np.conj(f.values)))
    scale = max(
        1.0,
        lp_norm(f, 2.0, table.params) ** 2 * float(np.abs(phi.values).max(initial=0.0)),
    )
    ok = val.real >= -tol * scale and abs(val.imag) <= max(tol * scale, 1e-9 * scale)
    return QuadraticFormReport(value=val, scale=scale, nonnegative=bool(ok))


@dataclass(frozen=True)
class SpectrumReport:
    min_value: float
    sup_value: float
    nonnegative: bool


def verify_nonneg_spectrum(
    phi: LatticeFunction, table: TransformTable, tol: float = DEFAULT_PSD_TOL
) -> SpectrumReport:
    """Min of F phi over the window against -tol * sup |F phi|."""
    ff = fourier_transform(phi, table)
    re = ff.values.real
    sup = float(np.abs(ff.values).max())
    mn = float(re.min())
    return SpectrumReport(min_value=mn, sup_value=sup, nonnegative=bool(mn >= -tol * max(sup, 1e-300)))


@dataclass(frozen=True)
class SpectrumMassReport:
    absolute_mass: float
    signed_mass: complex
    target: complex
    max_relative_error: float


def verify_l1_spectrum_mass(
    phi: LatticeFunction, table: TransformTable
) -> SpectrumMassReport:
    """c_qv int F phi x^{2v+1} d_qx (and its absolute version) against phi(0).

    The c_qv prefactor matches the one the transform itself carries; without
    it the mass comes out a constant factor off for every phi.
    """
    if phi.value_at_zero is None:
        raise ValueError("phi must carry value_at_zero")
    ff = fourier_transform(phi, table)
    w = table.weights
    q = table.params.q
    c = table.params.c_qv
    signed = complex(c * (1.0 - q) * np.sum(w * ff.values))
    absolute = float(c * (1.0 - q) * np.sum(w * np.abs(ff.values)))
    target = complex(phi.value_at_zero)
    denom = max(abs(target), 1e-300)
    err = max(abs(signed - target), abs(absolute - abs(target))) / denom
    return SpectrumMassReport(
        absolute_mass=absolute, signed_mass=signed, target=target, max_relative_error=err
    )


@dataclass(frozen=True)
class WienerReport:
    l1_norm: float
    transform_l1_norm: float
    tails_decay: bool
    consistent: bool


def wiener_membership(f: LatticeFunction, table: TransformTable) -> WienerReport:
    """Window diagnostics for membership in the q-Wiener algebra."""
    params = table.params
    n1 = lp_norm(f, 1.0, params)
    ff = fourier_transform(f, table)
    n2 = lp_norm(ff, 1.0, params)
    w = table.weights

    def tail_ok(vals: np.ndarray) -> bool:
        summands = np.abs(w * vals)
        peak = summands.max()
        if peak == 0.0:
            return True
        edge = max(summands[0], summands[-1])
        return bool(edge <= 1e-8 * peak)

    decay = tail_ok(f.values) and tail_ok(ff.values)
    ok = bool(np.isfinite(n1) and np.isfinite(n2) and decay)
    return WienerReport(l1_norm=n1, transform_l1_norm=n2, tails_decay=decay, consistent=ok)


def product_positive_type_check(
    phi: LatticeFunction,
    f_nonneg: LatticeFunction,
    table: TransformTable,
    tol: float = DEFAULT_PSD_TOL,
    grids: int = 4,
    seed: int = 0,
) -> GridSweepReport:
    """PSD sweep of the product phi . F(f_nonneg)."""
    ff = fourier_transform(f_nonneg, table)
    prod = LatticeFunction(table.lattice, phi.values * ff.values)
    if phi.value_at_zero is not None and ff.value_at_zero is not None:
        prod.value_at_zero = phi.value_at_zero * ff.value_at_zero
    rng = np.random.default_rng(seed)
    verdicts = [
        is_q_positive_type(prod, g, table, tol) for g in _sample_grids(table, rng, grids)
    ]
    return GridSweepReport(verdicts=tuple(verdicts))


@dataclass
class QMeasure:
    """Nonnegative density weights against d_qx on a lattice window."""

    lattice: QLattice
    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.lattice.size,):
            raise ValueError("one weight per lattice point required")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0.0):
            raise ValueError("measure weights must be nonnegative")
        self.weights = w

    def total_mass_v(self, params: QParams) -> float:
        """int x^{2v+1} d_q xi(x) over the window."""
        q = self.lattice.q
        expo = (2.0 * params.v + 2.0) * self.lattice.indices.astype(float)
        return float((1.0 - q) * np.sum(q ** expo * self.weights))


def measure_fourier_transform(xi: QMeasure, table: TransformTable) -> LatticeFunction:
    """Transform of a measure: no c_qv prefactor, unlike the function transform."""
    if xi.lattice != table.lattice:
        raise LatticeMismatchError("measure must live on the table lattice")
    q = table.params.q
    rows = np.stack([table.jv_row(n) for n in table.lattice.indices])
    weighted = table.weights * xi.weights
    vals = (1.0 - q) * (rows @ weighted)
    return LatticeFunction(
        table.lattice, vals, value_at_zero=xi.total_mass_v(table.params)
    )


def measure_convolution(
    xi: QMeasure,
    rho: QMeasure,
    f: LatticeFunction,
    table: TransformTable,
    with_scale: bool = False,
):
    """Action of the convolved measure on f.

    Both integration variables carry the x^{2v+1} weight; with that symmetric
    convention the transform of the convolved measure factorizes exactly into
    the product of the individual measure transforms.  With ``with_scale``
    the all-absolute version of the double sum is returned alongside: it is
    the magnitude against which double-precision cancellation in the result
    must be judged.
    """
    if xi.lattice != table.lattice or rho.lattice != table.lattice:
        raise LatticeMismatchError("measures must live on the table lattice")
    q = table.params.q
    w = table.weights
    total = 0.0 + 0.0j
    abs_total = 0.0
    for i, n in enumerate(table.lattice.indices):
        if xi.weights[i] == 0.0:
            continue
        tf = translation(f, int(n), table)
        inner = (1.0 - q) * np.sum(w * rho.weights * tf.values)
        total += (1.0 - q) * w[i] * xi.weights[i] * inner
        if with_scale:
            abs_inner = (1.0 - q) * float(np.sum(w * rho.weights * np.abs(tf.values)))
            abs_total += (1.0 - q) * w[i] * xi.weights[i] * abs_inner
    if with_scale:
        return complex(total), abs_total
    return complex(total)


def measure_product_identity_error(
    xi: QMeasure, rho: QMeasure, table: TransformTable
) -> float:
    """Max pointwise relative deviation of F(xi * rho) from F(xi) F(rho).

    F(xi * rho)(x) is evaluated by feeding the Bessel probe j_v(x .) to the
    convolved measure; the translation of the probe factorizes exactly as
    T_u j_v(x .)(t) = j_v(xu) j_v(xt), which makes the identity sharp.  The
    deviation at each probe point is scaled by the all-positive version of
    the product (weights and kernel in absolute value), the precision
    actually attainable for these heavily v-weighted sums.
    """
    from .transform import clean_inversion_range

    lat = table.lattice
    q = table.params.q
    f_xi = measure_fourier_transform(xi, table)
    f_rho = measure_fourier_transform(rho, table)
    w = table.weights
    # probing relies on a double transform of the Bessel row, so only the
    # cleanly invertible exponents are sampled
    lo, hi = clean_inversion_range(lat)
    idx = np.arange(lo, hi + 1)
    worst = 0.0
    step = max(1, len(idx) // 12)
    for n in idx[::step]:
        row = table.jv_row(int(n))
        probe = LatticeFunction(lat, row.copy())
        lhs = measure_convolution(xi, rho, probe, table)
        rhs = f_xi.at_index(int(n)) * f_rho.at_index(int(n))
        abs_row = np.abs(row)
        scale_xi = (1.0 - q) * float(np.sum(w * xi.weights * abs_row))
        scale_rho = (1.0 - q) * float(np.sum(w * rho.weights * abs_row))
        worst = max(worst, abs(lhs - rhs) / max(1.0, scale_xi * scale_rho))
    return worst


def bochner_cutoff(phi: LatticeFunction, n: int) -> LatticeFunction:
    """phi_n(q^m) = phi(q^m) (1 - q^{n+m}) for n+m >= 1, else 0."""
    lat = phi.lattice
    q = lat.q
    ms = lat.indices
    factor = np.where(ms + n >= 1, 1.0 - q ** (ms + n).astype(float), 0.0)
    return LatticeFunction(lat, phi.values * factor, value_at_zero=phi.value_at_zero)


@dataclass(frozen=True)
class BochnerLevel:
    level: int
    psd_positive: bool
    min_eigenvalue: float
    psd_tolerance: float
    density_min: float
    density_clip_tolerance: float
    mass: float
    transform_deviation: float  # sup interior |c F(xi_n) - phi_rescaled|


@dataclass
class BochnerReport:
    cutoff_levels: List[int]
    levels: List[BochnerLevel]
    limit_measure: Optional[QMeasure]
    reconstruction_error: float
    normalization: complex  # phi(0) divided out before the pipeline
    accepted: bool
    rejection_reason: Optional[str] = None


def bochner_reconstruct(
    phi: LatticeFunction,
    levels: Sequence[int],
    table: TransformTable,
    tol: float = DEFAULT_PSD_TOL,
    cutoff_guard: float = 50.0,
) -> BochnerReport:
    """Constructive Bochner pipeline.

    Per level n: cutoff phi_n, PSD check of its Gram matrix, density
    rho_n = F phi_n, mass check against phi(0), and the deviation of
    c F(xi_n) from phi.  The hat cutoff perturbs the spectrum at order q^n,
    so the per-level PSD and density-negativity tolerances carry a q^n-scaled
    guard; the limit measure, obtained by eliminating the exactly geometric
    q^n cutoff term from the last two levels, is held to the strict
    tolerance.
    """
    if phi.value_at_zero is None:
        raise ValueError("phi must carry value_at_zero")
    phi0 = complex(phi.value_at_zero)
    if phi0 == 0:
        raise ValueError("phi(0) = 0 cannot be normalized to 1")
    levels = sorted(int(n) for n in levels)
    if len(levels) < 2:
        raise ValueError("at least two cutoff levels are required")
    lat = table.lattice
    q = table.params.q
    c = table.params.c_qv
    norm_phi = LatticeFunction(lat, phi.values / phi0, value_at_zero=1.0)
    sl = interior_slice(lat)

    records: List[BochnerLevel] = []
    densities = {}
    accepted = True
    reason = None
    for n in levels:
        phi_n = bochner_cutoff(norm_phi, n)
        guard = cutoff_guard * q ** n
        verdict = is_q_positive_type(phi_n, None, table, tol + guard)
        rho_n = fourier_transform(phi_n, table)
        dens = rho_n.values.real
        dens_min = float(dens.min())
        dens_scale = max(float(np.abs(dens).max()), 1e-300)
        clip_tol = (tol + guard) * dens_scale
        mass = float((c * (1.0 - q) * np.sum(table.weights * dens)).real)
        xi_n = QMeasure(lat, np.clip(dens, 0.0, None))
        recon = measure_fourier_transform(xi_n, table)
        dev = float(np.abs(c * recon.values[sl] - norm_phi.values[sl]).max())
        records.append(
            BochnerLevel(
                level=n,
                psd_positive=verdict.positive,
                min_eigenvalue=verdict.min_eigenvalue,
                psd_tolerance=tol + guard,
                density_min=dens_min,
                density_clip_tolerance=clip_tol,
                mass=mass,
                transform_deviation=dev,
            )
        )
        densities[n] = dens
        if not verdict.positive:
            accepted = False
            reason = f"PSD check failed at cutoff level {n}"
        elif dens_min < -clip_tol:
            accepted = False
            reason = f"density negativity beyond tolerance at level {n}"

    limit = None
    recon_err = float("inf")
    if accepted:
        n1, n2 = levels[-2], levels[-1]
        ratio = q ** (n2 - n1)
        lim = (densities[n2] - ratio * densities[n1]) / (1.0 - ratio)
        lim_scale = max(float(np.abs(lim).max()), 1e-300)
        if float(lim.min()) < -tol * lim_scale * 10.0:
            accepted = False
            reason = "limit density negative beyond strict tolerance"
        else:
            limit = QMeasure(lat, np.clip(lim, 0.0, None))
            recon = measure_fourier_transform(limit, table)
            recon_err = float(np.abs(c * recon.values[sl] - norm_phi.values[sl]).max())
    return BochnerReport(
        cutoff_levels=list(levels),
        levels=records,
        limit_measure=limit,
        reconstruction_error=recon_err,
        normalization=phi0,
        accepted=accepted,
        rejection_reason=reason,
    )
