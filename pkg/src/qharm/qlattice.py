"""Core q-calculus on the geometric lattice {q^n}.

Everything downstream (transforms, translation, positivity tests) is built
from the primitives here: q-Pochhammer symbols, the q-exponential, the
normalized Hahn-Exton q-Bessel function, Jackson sums and weighted L^p norms
on a finite lattice window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import LatticeMismatchError, PoleProximityError, TruncationCapError

Complex = Union[float, complex]

DEFAULT_TRUNC_TOL = 1e-18
DEFAULT_MAX_TERMS = 10000


def q_pochhammer_finite(a: Complex, q: float, n: int) -> Complex:
    """(a;q)_n = prod_{i=0}^{n-1} (1 - a q^i); equals 1 for n = 0."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0,1), got {q}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    out: Complex = 1.0
    qi: Complex = 1.0
    for _ in range(n):
        out *= 1.0 - a * qi
        qi *= q
    return out


def q_pochhammer_infinite(
    a: Complex,
    q: float,
    trunc_tol: float = DEFAULT_TRUNC_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> Complex:
    """(a;q)_inf, truncated at the first factor with |a| q^i < trunc_tol."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0,1), got {q}")
    out: Complex = 1.0
    mag = abs(a)
    for i in range(max_terms):
        if mag < trunc_tol:
            return out
        out *= 1.0 - a * (q ** i)
        mag *= q
    raise TruncationCapError(
        f"(a;q)_inf did not reach tolerance {trunc_tol} within {max_terms} factors"
    )


def q_exponential(
    z: Complex,
    q: float,
    trunc_tol: float = DEFAULT_TRUNC_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> Complex:
    """e(z,q) = 1/(z;q)_inf.

    The product form continues the series sum z^n/(q;q)_n beyond |z| < 1.
    Points z = q^{-i} are poles; proximity raises PoleProximityError.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0,1), got {q}")
    denom: Complex = 1.0
    mag = abs(z)
    for i in range(max_terms):
        if mag < trunc_tol:
            return 1.0 / denom
        factor = 1.0 - z * (q ** i)
        if abs(factor) < 1e-12 * (1.0 + mag):
            raise PoleProximityError(f"z={z} is within tolerance of the pole q^-{i}")
        denom *= factor
        mag *= q
    raise TruncationCapError(
        f"e(z,q) product did not reach tolerance {trunc_tol} within {max_terms} factors"
    )


class JvResult(NamedTuple):
    value: float
    terms_used: int
    max_term: float
    cancellation: bool


def hahn_exton_jv_detail(
    z: float,
    q_base: float,
    v: float,
    trunc_tol: float = DEFAULT_TRUNC_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> JvResult:
    """Normalized Hahn-Exton q-Bessel function, with summation diagnostics.

    j_v(z, q) = sum_{n>=0} (-1)^n q^{n(n+1)/2} z^{2n} / ((q;q)_n (q^{v+1};q)_n).

    Uses Neumaier-compensated summation and reports the largest intermediate
    term; for large z the alternating terms grow far beyond the result and the
    `cancellation` flag marks the value as precision-limited.
    """
    if not 0.0 < q_base < 1.0:
        raise ValueError(f"q_base must lie in (0,1), got {q_base}")
    if v <= -1.0:
        raise ValueError(f"v must exceed -1, got {v}")
    if z < 0.0:
        raise ValueError(f"z must be nonnegative, got {z}")
    z2 = z * z
    qv1 = q_base ** (v + 1.0)
    # factors (q;q)_inf, (q^{v+1};q)_inf bound the denominators from below
    pq_inf = abs(q_pochhammer_infinite(q_base, q_base, trunc_tol, max_terms))
    pv_inf = abs(q_pochhammer_infinite(qv1, q_base, trunc_tol, max_terms))
    denom_floor = pq_inf * pv_inf

    total = 0.0
    comp = 0.0  # Neumaier carry
    term = 1.0
    max_term = 1.0
    n = 0
    while True:
        t = term if n % 2 == 0 else -term
        s = total + t
        if abs(total) >= abs(t):
            comp += (total - s) + t
        else:
            comp += (t - s) + total
        total = s
        max_term = max(max_term, abs(term))
        n += 1
        if n >= max_terms:
            raise TruncationCapError(
                f"j_v series did not converge within {max_terms} terms (z={z})"
            )
        # term_{n} = term_{n-1} * q^n z^2 / ((1-q^n)(1-q^{v+n}))
        qn = q_base ** n
        term *= qn * z2 / ((1.0 - qn) * (1.0 - qv1 * qn / q_base))
        # superexponential decay kicks in once q^n z^2 < 1; then the crude
        # bound q^{n(n+1)/2} z^{2n} / denom_floor controls the tail
        if qn * z2 < 1.0 and term / denom_floor < trunc_tol * (1.0 + abs(total)):
            break
    value = total + comp
    # roundoff in the summed terms is about eps * max_term; flag the value
    # once that noise floor reaches 1e-11 of the result
    if value != 0.0:
        cancel = 2.3e-16 * max_term > 1e-11 * abs(value)
    else:
        cancel = max_term > 1.0
    return JvResult(value=value, terms_used=n, max_term=max_term, cancellation=cancel)


def hahn_exton_jv(
    z: float,
    q_base: float,
    v: float,
    trunc_tol: float = DEFAULT_TRUNC_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> float:
    """Value-only wrapper around :func:`hahn_exton_jv_detail`."""
    return hahn_exton_jv_detail(z, q_base, v, trunc_tol, max_terms).value


@dataclass(frozen=True)
class QParams:
    """Deformation parameters (q, v) plus the derived transform constants.

    c_qv is the transform normalization, B_qv the L^1 -> sup-norm bound
    constant; both are recomputed from infinite q-Pochhammer products.
    """

    q: float
    v: float = 0.0
    trunc_tol: float = DEFAULT_TRUNC_TOL
    max_terms: int = DEFAULT_MAX_TERMS
    c_qv: float = field(init=False)
    B_qv: float = field(init=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must lie in (0,1), got {self.q}")
        if self.v <= -1.0:
            raise ValueError(f"v must exceed -1, got {self.v}")
        if self.trunc_tol <= 0.0:
            raise ValueError("trunc_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")
        q2 = self.q * self.q
        qv2 = self.q ** (2.0 * self.v + 2.0)
        poch_q2 = q_pochhammer_infinite(q2, q2, self.trunc_tol, self.max_terms).real
        poch_qv2 = q_pochhammer_infinite(qv2, q2, self.trunc_tol, self.max_terms).real
        poch_neg_q2 = q_pochhammer_infinite(-q2, q2, self.trunc_tol, self.max_terms).real
        poch_neg_qv2 = q_pochhammer_infinite(-qv2, q2, self.trunc_tol, self.max_terms).real
        object.__setattr__(self, "c_qv", poch_qv2 / poch_q2 / (1.0 - self.q))
        object.__setattr__(
            self, "B_qv", poch_neg_q2 * poch_neg_qv2 / poch_q2 / (1.0 - self.q)
        )

    @property
    def bessel_bound_constant(self) -> float:
        """Envelope constant of the lattice Bessel bound."""
        q2 = self.q * self.q
        qv2 = self.q ** (2.0 * self.v + 2.0)
        num = (
            q_pochhammer_infinite(-q2, q2, self.trunc_tol, self.max_terms).real
            * q_pochhammer_infinite(-qv2, q2, self.trunc_tol, self.max_terms).real
        )
        den = q_pochhammer_infinite(qv2, q2, self.trunc_tol, self.max_terms).real
        return num / den


@dataclass(frozen=True)
class QLattice:
    """Finite window {q^n : n_min <= n <= n_max} of the geometric lattice."""

    q: float
    n_min: int
    n_max: int

    def __post_init__(self) -> None:
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must lie in (0,1), got {self.q}")
        if self.n_min > self.n_max:
            raise ValueError(f"empty window [{self.n_min}, {self.n_max}]")

    @property
    def size(self) -> int:
        return self.n_max - self.n_min + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def points(self) -> np.ndarray:
        return self.q ** self.indices.astype(float)

    def straddles_one(self) -> bool:
        """Transform construction requires the window to contain x=1 strictly
        inside: n_min < 0 < n_max."""
        return self.n_min < 0 < self.n_max

    def index_of(self, n: int) -> int:
        """Array offset of lattice exponent n."""
        if not self.n_min <= n <= self.n_max:
            raise ValueError(f"exponent {n} outside window [{self.n_min}, {self.n_max}]")
        return n - self.n_min


@dataclass
class LatticeFunction:
    """Samples f(q^n) on a lattice window, optionally with the limit at 0."""

    lattice: QLattice
    values: np.ndarray
    value_at_zero: Optional[Complex] = None

    def __post_init__(self) -> None:
        vals = np.asarray(self.values)
        if vals.ndim != 1 or vals.shape[0] != self.lattice.size:
            raise ValueError(
                f"expected {self.lattice.size} samples, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("lattice samples must be finite")
        if vals.dtype.kind not in "fc":
            vals = vals.astype(float)
        self.values = vals
        if self.value_at_zero is not None and not np.isfinite(self.value_at_zero):
            raise ValueError("value_at_zero must be finite")

    @property
    def is_real(self) -> bool:
        return self.values.dtype.kind == "f" or bool(
            np.all(np.abs(self.values.imag) == 0.0)
        )

    def at_index(self, n: int) -> Complex:
        return self.values[self.lattice.index_of(n)]

    def same_window(self, other: "LatticeFunction") -> None:
        if self.lattice != other.lattice:
            raise LatticeMismatchError(
                f"lattices differ: {self.lattice} vs {other.lattice}"
            )

    @classmethod
    def from_callable(
        cls, lattice: QLattice, fn, value_at_zero: Optional[Complex] = None
    ) -> "LatticeFunction":
        vals = np.array([fn(x) for x in lattice.points])
        return cls(lattice, vals, value_at_zero)

    @classmethod
    def zero(cls, lattice: QLattice) -> "LatticeFunction":
        return cls(lattice, np.zeros(lattice.size), value_at_zero=0.0)


class JacksonResult(NamedTuple):
    value: Complex
    head_term: float  # |summand| at the n_min (large x) edge
    tail_term: float  # |summand| at the n_max (small x) edge


def jackson_integral_detail(f: LatticeFunction) -> JacksonResult:
    """Window truncation of the Jackson sum (1-q) sum_n q^n f(q^n).

    The edge summand magnitudes are reported so callers can judge how much of
    the doubly infinite sum the window misses.
    """
    q = f.lattice.q
    weights = q ** f.lattice.indices.astype(float)
    summands = weights * f.values
    value = (1.0 - q) * summands.sum()
    head = float(abs(summands[0])) if summands.size else 0.0
    tail = float(abs(summands[-1])) if summands.size else 0.0
    if f.values.dtype.kind != "c":
        value = float(value.real) if np.iscomplexobj(value) else float(value)
    return JacksonResult(value=value, head_term=head, tail_term=tail)


def jackson_integral(f: LatticeFunction) -> Complex:
    return jackson_integral_detail(f).value


def lp_norm(f: LatticeFunction, p: float, params: QParams) -> float:
    """[(1-q) sum_n q^{n(2v+2)} |f(q^n)|^p]^{1/p}.

    The measure weight x^{2v+1} merged with the Jackson weight x gives the
    q^{n(2v+2)} factor.
    """
    if p < 1.0:
        raise ValueError(f"p must be at least 1, got {p}")
    q = f.lattice.q
    w = q ** ((2.0 * params.v + 2.0) * f.lattice.indices.astype(float))
    total = float((w * np.abs(f.values) ** p).sum())
    return ((1.0 - q) * total) ** (1.0 / p)


@dataclass(frozen=True)
class FunctionDiagnostics:
    sup_norm: float
    edge_magnitudes: tuple  # |f| at the 5 largest lattice points (x -> infinity end)
    plausibly_vanishing_at_infinity: bool
    bounded_below_tol: bool


def vanishing_and_bounded_diagnostics(
    f: LatticeFunction, tol: float = 1e-8
) -> FunctionDiagnostics:
    """Window heuristics for membership in the vanishing/bounded classes.

    x -> infinity corresponds to the n_min end of the window.  The vanishing
    flag requires the last five magnitudes toward that end to be monotone
    decreasing (outward) and below tol.
    """
    mags = np.abs(f.values)
    sup = float(mags.max()) if mags.size else 0.0
    k = min(5, mags.size)
    edge = mags[:k]  # ordered from the outermost (largest x) point inward
    vanish = bool(
        k > 0
        and np.all(edge < tol)
        and np.all(np.diff(edge) >= 0.0)  # grows moving inward = decays outward
    )
    return FunctionDiagnostics(
        sup_norm=sup,
        edge_magnitudes=tuple(float(m) for m in edge),
        plausibly_vanishing_at_infinity=vanish,
        bounded_below_tol=bool(np.isfinite(sup)),
    )
