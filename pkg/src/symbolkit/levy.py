"""Levy processes as triplets: exponent evaluation and increment sampling.

A driving process is described by a triplet (drift l, covariance Q, jump
measure N).  The characteristic exponent

    psi(xi) = -i l.xi + (1/2) xi.Q.xi
              - integral( e^{i xi.y} - 1 - i xi.y 1_{|y|<1}(y) ) N(dy)

is evaluated in closed form for atomic and symmetric-stable jump measures and
by compensated adaptive quadrature for density-type measures.  Increments are
sampled from the pathwise decomposition: drift + Gaussian + jumps, with the
small-jump compensator removed as a deterministic drift for every jump that
is actually simulated.

Jump measures are a closed set of variants (Zero / FiniteActivity /
StableSymmetric / DensityForm): each admits both an exponent evaluation and a
sampler, which is all the SDE layer needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import DimensionMismatch, SectorViolation
from .quadrature import integrate_checked

_ATOL = 1e-12

# --------------------------------------------------------------------------
# jump laws for finite-activity measures


@dataclass(frozen=True)
class AtomLaw:
    """Discrete jump distribution: positions (each shape (n,)) and probabilities."""

    positions: tuple
    probabilities: tuple

    def __post_init__(self):
        total = float(sum(self.probabilities))
        if abs(total - 1.0) > _ATOL:
            raise ValueError(f"atom probabilities sum to {total}, expected 1 +- {_ATOL}")
        if any(p < 0 for p in self.probabilities):
            raise ValueError("atom probabilities must be nonnegative")

    @staticmethod
    def of(atoms: Sequence[tuple]) -> "AtomLaw":
        """Build from [(position, probability), ...]; scalar positions become 1-d."""
        pos = tuple(np.atleast_1d(np.asarray(p, dtype=float)) for p, _ in atoms)
        prob = tuple(float(q) for _, q in atoms)
        return AtomLaw(positions=pos, probabilities=prob)

    @property
    def dim(self) -> int:
        return self.positions[0].shape[0]

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = rng.choice(len(self.positions), size=size, p=np.asarray(self.probabilities))
        stacked = np.stack(self.positions)
        return stacked[idx]

    def mean_small(self) -> np.ndarray:
        """E[Y 1_{|Y|<1}], the compensated part of the jump mean."""
        out = np.zeros(self.dim)
        for y, p in zip(self.positions, self.probabilities):
            if np.linalg.norm(y) < 1.0:
                out += p * y
        return out


@dataclass(frozen=True)
class ContinuousLaw:
    """One-dimensional continuous jump distribution with sampler and density."""

    name: str
    sampler: Callable[[np.random.Generator, int], np.ndarray]
    density: Callable[[float], float]
    support: tuple = (-np.inf, np.inf)

    @property
    def dim(self) -> int:
        return 1

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.asarray(self.sampler(rng, size), dtype=float).reshape(size, 1)

    def mean_small(self) -> np.ndarray:
        lo = max(self.support[0], -1.0)
        hi = min(self.support[1], 1.0)
        if hi <= lo:
            return np.zeros(1)
        val = integrate_checked(lambda y: y * self.density(y), lo, hi,
                                tol=1e-9, label=f"{self.name} small-jump mean")
        return np.array([val])


def normal_law(mean: float = 0.0, std: float = 1.0) -> ContinuousLaw:
    m, s = float(mean), float(std)
    return ContinuousLaw(
        name="normal",
        sampler=lambda rng, size: rng.normal(m, s, size=size),
        density=lambda y: np.exp(-0.5 * ((y - m) / s) ** 2) / (s * np.sqrt(2 * np.pi)),
    )


def uniform_law(low: float = -1.0, high: float = 1.0) -> ContinuousLaw:
    a, b = float(low), float(high)
    return ContinuousLaw(
        name="uniform",
        sampler=lambda rng, size: rng.uniform(a, b, size=size),
        density=lambda y: (1.0 / (b - a)) if a <= y <= b else 0.0,
        support=(a, b),
    )


# --------------------------------------------------------------------------
# measure variants


@dataclass(frozen=True)
class ZeroMeasure:
    """No jumps."""


@dataclass(frozen=True)
class FiniteActivity:
    """Compound-Poisson jump measure N = rate * law."""

    rate: float
    law: AtomLaw | ContinuousLaw

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError(f"finite-activity rate must be > 0, got {self.rate}")


@dataclass(frozen=True)
class StableSymmetric:
    """Symmetric (isotropic) alpha-stable jump part with exponent scale*|xi|^alpha."""

    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if self.alpha == 2.0:
            raise ValueError("alpha=2 is the Gaussian case; express it through the covariance Q")
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"stable index must lie in (0, 2), got {self.alpha}")
        if self.scale <= 0:
            raise ValueError(f"stable scale must be > 0, got {self.scale}")


class DensityForm:
    """Jump measure given by a density nu(y) on the line, truncated to |y| <= window.

    Jumps with |y| >= cutoff are simulated as compound Poisson (tabulated
    inverse CDF); smaller jumps are dropped together with their compensator.
    The exponent integrates the full compensated integrand down to 0.
    """

    def __init__(self, density: Callable[[float], float], window: Optional[float] = None,
                 cutoff: float = 1e-3, name: str = "density"):
        if cutoff <= 0:
            raise ValueError("cutoff must be positive")
        self.density = density
        self.cutoff = float(cutoff)
        self.name = name
        self.window = float(window) if window is not None else self._auto_window()
        if self.window <= self.cutoff:
            raise ValueError("window must exceed cutoff")
        self._validate()
        self._build_tables()

    def _auto_window(self) -> float:
        # grow W until the [W, 4W] mass (a proxy for the tail) is negligible
        w = 1.0
        for _ in range(60):
            tail = quad_tail = 0.0
            for sgn in (1.0, -1.0):
                quad_tail += abs(integrate_checked(
                    lambda y: self.density(sgn * y), w, 4 * w,
                    tol=np.inf, label="tail probe"))
            tail = quad_tail
            if tail < 1e-10:
                return w
            w *= 2.0
        raise ValueError("could not find truncation window with tail mass < 1e-10")

    def _validate(self):
        # integral (1 ^ y^2) nu(dy) must be finite; the y^2 part absorbs any
        # singularity at 0 for an admissible measure
        val = 0.0
        for sgn in (1.0, -1.0):
            val += integrate_checked(lambda y: y * y * self.density(sgn * y),
                                     0.0, 1.0, tol=1e-6, points=[1e-8],
                                     label=f"{self.name} small-jump mass")
            val += integrate_checked(lambda y: self.density(sgn * y),
                                     1.0, self.window, tol=1e-6,
                                     label=f"{self.name} large-jump mass")
        if not np.isfinite(val):
            raise ValueError("density does not integrate (1 ^ y^2) finitely")

    def _build_tables(self, knots_per_side: int = 4096):
        grids, cdfs, masses = [], [], []
        for sgn in (1.0, -1.0):
            y = np.geomspace(self.cutoff, self.window, knots_per_side)
            dens = np.array([max(self.density(sgn * t), 0.0) for t in y])
            seg = 0.5 * (dens[1:] + dens[:-1]) * np.diff(y)
            cdf = np.concatenate([[0.0], np.cumsum(seg)])
            grids.append(y)
            cdfs.append(cdf)
            masses.append(cdf[-1])
        self._grids = grids
        self._cdfs = cdfs
        self._side_mass = np.array(masses)
        self.activity = float(self._side_mass.sum())
        # compensator for simulated jumps in [cutoff, 1)
        comp = 0.0
        if self.cutoff < 1.0:
            for sgn in (1.0, -1.0):
                comp += sgn * integrate_checked(
                    lambda y: y * self.density(sgn * y), self.cutoff, 1.0,
                    tol=1e-9, label=f"{self.name} compensator")
        self.small_jump_drift = comp

    def sample_jumps(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` jump magnitudes-with-sign from the truncated density."""
        if size == 0:
            return np.empty(0)
        u = rng.uniform(size=size)
        side = rng.uniform(size=size) * self.activity >= self._side_mass[0]
        out = np.empty(size)
        for s, idx in ((0, ~side), (1, side)):
            k = int(np.count_nonzero(idx))
            if k == 0:
                continue
            target = u[idx] * self._side_mass[s]
            y = np.interp(target, self._cdfs[s], self._grids[s])
            out[idx] = y if s == 0 else -y
        return out


LevyMeasureSpec = ZeroMeasure | FiniteActivity | StableSymmetric | DensityForm


def stable_density_coefficient(alpha: float, scale: float = 1.0) -> float:
    """Coefficient k with nu(y) = k |y|^{-1-alpha} matching exponent scale*|xi|^alpha.

    Uses int_0^inf (1-cos u) u^{-1-alpha} du = Gamma(2-alpha) cos(pi alpha/2) / (alpha (1-alpha))
    with the value pi/2 at alpha = 1.
    """
    if abs(alpha - 1.0) < 1e-12:
        i_alpha = np.pi / 2.0
    else:
        i_alpha = gamma_fn(2.0 - alpha) * np.cos(np.pi * alpha / 2.0) / (alpha * (1.0 - alpha))
    return scale / (2.0 * i_alpha)


# --------------------------------------------------------------------------
# triplet


class LevyTriplet:
    """Levy triplet (drift, covariance, jump measure) in dimension n.

    Validates at construction: Q symmetric positive semidefinite with its
    stored square root reproducing Q to 1e-12 per entry, and the jump measure
    integrating (1 ^ |y|^2) finitely.
    """

    def __init__(self, drift, covariance, levy_measure: LevyMeasureSpec = ZeroMeasure()):
        self.drift = np.atleast_1d(np.asarray(drift, dtype=float))
        self.covariance = np.atleast_2d(np.asarray(covariance, dtype=float))
        self.levy_measure = levy_measure
        n = self.drift.shape[0]
        if self.covariance.shape != (n, n):
            raise DimensionMismatch(
                f"covariance shape {self.covariance.shape} does not match drift length {n}")
        if not np.allclose(self.covariance, self.covariance.T, atol=_ATOL, rtol=0.0):
            raise ValueError("covariance must be symmetric")
        w, v = np.linalg.eigh(self.covariance)
        if w.min(initial=0.0) < -1e-10:
            raise ValueError(f"covariance must be positive semidefinite (eigenvalue {w.min()})")
        self.sigma = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
        if np.abs(self.sigma @ self.sigma.T - self.covariance).max() > 1e-12 * max(1.0, np.abs(w).max()):
            raise ValueError("square root does not reproduce covariance to tolerance")
        self._check_measure_dim()

    def _check_measure_dim(self):
        m = self.levy_measure
        if isinstance(m, FiniteActivity) and m.law.dim != self.dim:
            raise DimensionMismatch(
                f"jump law dimension {m.law.dim} does not match triplet dimension {self.dim}")
        if isinstance(m, (StableSymmetric, DensityForm)) and self.dim != 1:
            raise DimensionMismatch(
                f"{type(m).__name__} measures are one-dimensional in this variant set")

    @property
    def dim(self) -> int:
        return self.drift.shape[0]

    def __repr__(self):
        return (f"LevyTriplet(drift={self.drift.tolist()}, "
                f"covariance={self.covariance.tolist()}, measure={type(self.levy_measure).__name__})")


# --------------------------------------------------------------------------
# exponent evaluation


def _jump_exponent_many(measure: LevyMeasureSpec, xi: np.ndarray) -> np.ndarray:
    """Jump part of psi on a batch xi of shape (m, n); returns complex (m,)."""
    m = xi.shape[0]
    if isinstance(measure, ZeroMeasure):
        return np.zeros(m, dtype=complex)

    if isinstance(measure, StableSymmetric):
        return measure.scale * np.linalg.norm(xi, axis=-1) ** measure.alpha + 0j

    if isinstance(measure, FiniteActivity):
        law = measure.law
        if isinstance(law, AtomLaw):
            out = np.zeros(m, dtype=complex)
            for y, p in zip(law.positions, law.probabilities):
                phase = xi @ y
                term = np.exp(1j * phase) - 1.0
                if np.linalg.norm(y) < 1.0:
                    term = term - 1j * phase
                out -= measure.rate * p * term
            return out
        # continuous one-dimensional law: compensated quadrature per point
        out = np.empty(m, dtype=complex)
        lo, hi = law.support
        lo = max(lo, -1e3) if not np.isfinite(lo) else lo
        hi = min(hi, 1e3) if not np.isfinite(hi) else hi
        for k in range(m):
            x1 = float(xi[k, 0])
            re = integrate_checked(
                lambda y: (np.cos(x1 * y) - 1.0) * law.density(y), lo, hi,
                tol=1e-9, points=[p for p in (-1.0, 0.0, 1.0) if lo < p < hi],
                label="jump integral (re)")
            im = integrate_checked(
                lambda y: (np.sin(x1 * y) - x1 * y * (abs(y) < 1.0)) * law.density(y), lo, hi,
                tol=1e-9, points=[p for p in (-1.0, 0.0, 1.0) if lo < p < hi],
                label="jump integral (im)")
            out[k] = -measure.rate * complex(re, im)
        return out

    if isinstance(measure, DensityForm):
        out = np.empty(m, dtype=complex)
        for k in range(m):
            out[k] = -_density_exponent_integral(measure, float(xi[k, 0]))
        return out

    raise TypeError(f"unknown measure variant {type(measure).__name__}")


def _density_exponent_integral(measure: DensityForm, x1: float) -> complex:
    """int (e^{i x1 y} - 1 - i x1 y 1_{|y|<1}) nu(y) dy, split at |y| = 1.

    The inner piece uses the compensated integrand (O(y^2) kills the density
    singularity); the tail uses cos/sin-weighted quadrature so wide windows
    with oscillatory integrands stay cheap and accurate.
    """
    if x1 == 0.0:
        return 0.0 + 0.0j
    from scipy.integrate import quad

    w = measure.window
    near_top = min(1.0, w)
    re = im = 0.0
    for sgn in (1.0, -1.0):
        f = (lambda y, s=sgn: measure.density(s * y))
        # cos(u) - 1 written cancellation-free as -2 sin^2(u/2)
        val, err = quad(lambda y: -2.0 * np.sin(0.5 * x1 * y) ** 2 * f(y), 0.0,
                        near_top, points=[1e-8], limit=400, epsabs=1e-11,
                        epsrel=1e-11)
        _check_quad(err, "density jump integral (near, re)")
        re += val
        val, err = quad(lambda y: (np.sin(x1 * y) - x1 * y) * f(y), 0.0, near_top,
                        points=[1e-8], limit=400, epsabs=1e-11, epsrel=1e-11)
        _check_quad(err, "density jump integral (near, im)")
        im += sgn * val
        if w > 1.0:
            cos_part, err = quad(f, 1.0, w, weight="cos", wvar=x1,
                                 limit=400, epsabs=1e-11, epsrel=1e-11)
            _check_quad(err, "density jump integral (tail, cos)")
            mass, err = quad(f, 1.0, w, limit=400, epsabs=1e-11, epsrel=1e-11)
            _check_quad(err, "density jump integral (tail mass)")
            re += cos_part - mass
            sin_part, err = quad(f, 1.0, w, weight="sin", wvar=x1,
                                 limit=400, epsabs=1e-11, epsrel=1e-11)
            _check_quad(err, "density jump integral (tail, sin)")
            im += sgn * sin_part
    return complex(re, im)


def _check_quad(err: float, label: str, tol: float = 1e-8) -> None:
    from .errors import QuadratureFailure

    if err > tol:
        raise QuadratureFailure(
            f"{label}: error estimate {err:.3e} exceeds tolerance {tol:.1e}",
            achieved=err)


def eval_exponent_many(triplet: LevyTriplet, xi: np.ndarray) -> np.ndarray:
    """Evaluate psi on a batch of frequencies, shape (m, n) -> complex (m,)."""
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 1:
        xi = xi[:, None] if triplet.dim == 1 else xi[None, :]
    if xi.shape[-1] != triplet.dim:
        raise DimensionMismatch(
            f"xi has dimension {xi.shape[-1]}, triplet has dimension {triplet.dim}")
    drift_part = -1j * (xi @ triplet.drift)
    gaussian_part = 0.5 * np.einsum("mi,ij,mj->m", xi, triplet.covariance, xi)
    return drift_part + gaussian_part + _jump_exponent_many(triplet.levy_measure, xi)


def eval_exponent(triplet: LevyTriplet, xi) -> complex:
    """Levy-Khintchine exponent psi(xi) for a single frequency."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape != (triplet.dim,):
        raise DimensionMismatch(f"xi shape {xi.shape} does not match dimension {triplet.dim}")
    return complex(eval_exponent_many(triplet, xi[None, :])[0])


class CharacteristicExponent:
    """Evaluable psi with its drift / Gaussian / jump decomposition cached."""

    def __init__(self, triplet: LevyTriplet):
        self.triplet = triplet

    @property
    def dim(self) -> int:
        return self.triplet.dim

    def __call__(self, xi) -> complex:
        return eval_exponent(self.triplet, xi)

    def many(self, xi: np.ndarray) -> np.ndarray:
        return eval_exponent_many(self.triplet, xi)

    def drift_part(self, xi) -> complex:
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        return complex(-1j * (xi @ self.triplet.drift))

    def gaussian_part(self, xi) -> float:
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        return float(0.5 * xi @ self.triplet.covariance @ xi)

    def jump_part(self, xi) -> complex:
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        return complex(_jump_exponent_many(self.triplet.levy_measure, xi[None, :])[0])


# --------------------------------------------------------------------------
# sampling


def sample_standard_stable(alpha: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard symmetric alpha-stable variates, cf E e^{i xi X} = e^{-|xi|^alpha}.

    Polar (Chambers-Mallows-Stuck) construction, symmetric case.
    """
    v = (rng.uniform(size=size) - 0.5) * np.pi
    if abs(alpha - 1.0) < 1e-12:
        return np.tan(v)
    w = rng.exponential(size=size)
    return (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha))


@dataclass
class StepSample:
    """One ensemble step of driver increments.

    ``smooth`` has shape (m, n): drift + Gaussian + aggregate-stable +
    compensator contributions.  Individually simulated (finite-activity)
    jumps are stored flat: ``jump_counts`` (m,), ``jump_values``
    (total, n), ``jump_positions`` (total,) with positions in (0, dt],
    grouped by path in order.
    """

    smooth: np.ndarray
    jump_counts: np.ndarray
    jump_values: np.ndarray
    jump_positions: np.ndarray


def sample_step_ensemble(triplet: LevyTriplet, dt: float, m: int,
                         rng: np.random.Generator) -> StepSample:
    """Draw m independent one-step increments, keeping discrete jumps separate."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    n = triplet.dim
    smooth = np.broadcast_to(triplet.drift * dt, (m, n)).copy()
    if np.any(triplet.covariance):
        z = rng.normal(size=(m, n))
        smooth += np.sqrt(dt) * z @ triplet.sigma.T

    measure = triplet.levy_measure
    counts = np.zeros(m, dtype=np.int64)
    values = np.empty((0, n))
    positions = np.empty(0)

    if isinstance(measure, StableSymmetric):
        draw = sample_standard_stable(measure.alpha, rng, m * n).reshape(m, n)
        smooth += (measure.scale * dt) ** (1.0 / measure.alpha) * draw
    elif isinstance(measure, FiniteActivity):
        counts = rng.poisson(measure.rate * dt, size=m)
        total = int(counts.sum())
        if total:
            values = measure.law.sample(rng, total)
            positions = rng.uniform(0.0, dt, size=total)
        smooth -= dt * measure.rate * measure.law.mean_small()
    elif isinstance(measure, DensityForm):
        counts = rng.poisson(measure.activity * dt, size=m)
        total = int(counts.sum())
        if total:
            values = measure.sample_jumps(rng, total).reshape(total, 1)
            positions = rng.uniform(0.0, dt, size=total)
        smooth[:, 0] -= dt * measure.small_jump_drift
    elif not isinstance(measure, ZeroMeasure):
        raise TypeError(f"unknown measure variant {type(measure).__name__}")

    return StepSample(smooth=smooth, jump_counts=counts,
                      jump_values=values, jump_positions=positions)


def sample_increment_parts(triplet: LevyTriplet, dt: float, rng: np.random.Generator):
    """Single-path step: (smooth part (n,), [(position, jump (n,)), ...] ordered by position)."""
    step = sample_step_ensemble(triplet, dt, 1, rng)
    jumps = [(float(step.jump_positions[k]), step.jump_values[k])
             for k in range(int(step.jump_counts[0]))]
    jumps.sort(key=lambda item: item[0])
    return step.smooth[0], jumps


def sample_increment(triplet: LevyTriplet, dt: float, rng: np.random.Generator) -> np.ndarray:
    """One increment of the driver over a window of length dt."""
    smooth, jumps = sample_increment_parts(triplet, dt, rng)
    out = smooth.copy()
    for _, y in jumps:
        out += y
    return out


# --------------------------------------------------------------------------
# sector condition

C0_FLOOR = 1e-6


def sector_constant(exponent, xi_grid, *, floor: float = C0_FLOOR) -> float:
    """Sector constant c0 = max |Im psi| / Re psi over the grid, floored.

    ``exponent`` is any callable xi -> complex (a CharacteristicExponent or a
    frozen symbol slice).  Raises SectorViolation where Re psi = 0 with
    Im psi != 0.
    """
    c0 = 0.0
    for xi in xi_grid:
        val = exponent(xi)
        re, im = val.real, abs(val.imag)
        scale = max(abs(val), 1.0)
        if re <= 1e-14 * scale:
            if im > 1e-14 * scale:
                raise SectorViolation(
                    f"Re psi = {re:.3e} with |Im psi| = {im:.3e} at xi = {xi}")
            continue
        c0 = max(c0, im / re)
    return max(c0, floor)


def kappa_from_c0(c0: float) -> float:
    """kappa = (4 arctan(1/(2 c0)))^{-1}, the radius factor of the lower functional."""
    return 1.0 / (4.0 * np.arctan(1.0 / (2.0 * c0)))


# --------------------------------------------------------------------------
# model wrapper and JSON construction


class LevyModel:
    """A driving Levy process: triplet + exponent + samplers."""

    def __init__(self, triplet: LevyTriplet, name: str = "levy"):
        self.triplet = triplet
        self.exponent = CharacteristicExponent(triplet)
        self.name = name

    @property
    def dim(self) -> int:
        return self.triplet.dim

    def psi(self, xi) -> complex:
        return self.exponent(xi)

    def sample_increment(self, dt: float, rng: np.random.Generator) -> np.ndarray:
        return sample_increment(self.triplet, dt, rng)

    def sample_step_ensemble(self, dt: float, m: int, rng: np.random.Generator) -> StepSample:
        return sample_step_ensemble(self.triplet, dt, m, rng)

    @staticmethod
    def from_dict(spec: dict, name: str = "levy") -> "LevyModel":
        """Build from the JSON object layout documented in the README.

        {"drift": [...], "covariance": [[...]],
         "levy_measure": {"kind": "zero"|"atoms"|"stable"|"density", ...}}
        """
        drift = np.asarray(spec.get("drift", [0.0]), dtype=float)
        n = np.atleast_1d(drift).shape[0]
        cov = np.asarray(spec.get("covariance", np.zeros((n, n))), dtype=float)
        measure = _measure_from_dict(spec.get("levy_measure", {"kind": "zero"}))
        return LevyModel(LevyTriplet(drift, cov, measure), name=name)


_NAMED_DENSITIES = {
    # tempered power tail: a * |y|^{-1-alpha} * exp(-b |y|)
    "tempered_power": lambda params: (
        lambda y, a=float(params.get("a", 1.0)), alpha=float(params.get("alpha", 0.5)),
               b=float(params.get("b", 1.0)): a * abs(y) ** (-1.0 - alpha) * np.exp(-b * abs(y))
        if y != 0 else 0.0),
    # two-sided exponential: a * exp(-b |y|)
    "exponential": lambda params: (
        lambda y, a=float(params.get("a", 1.0)), b=float(params.get("b", 1.0)):
        a * np.exp(-b * abs(y))),
}


def _measure_from_dict(spec: dict) -> LevyMeasureSpec:
    kind = spec.get("kind")
    if kind == "zero":
        return ZeroMeasure()
    if kind == "atoms":
        rate = float(spec["rate"])
        if "atoms" in spec:
            law = AtomLaw.of([(entry[0], entry[1]) for entry in spec["atoms"]])
        else:
            law_spec = spec["law"]
            lname = law_spec["name"]
            if lname == "normal":
                law = normal_law(law_spec.get("mean", 0.0), law_spec.get("std", 1.0))
            elif lname == "uniform":
                law = uniform_law(law_spec.get("low", -1.0), law_spec.get("high", 1.0))
            else:
                raise ValueError(f"unknown continuous jump law {lname!r}")
        return FiniteActivity(rate=rate, law=law)
    if kind == "stable":
        return StableSymmetric(alpha=float(spec["alpha"]), scale=float(spec.get("scale", 1.0)))
    if kind == "density":
        dname = spec["name"]
        if dname not in _NAMED_DENSITIES:
            raise ValueError(f"unknown named density {dname!r}")
        density = _NAMED_DENSITIES[dname](spec.get("params", {}))
        return DensityForm(density, window=spec.get("window"),
                           cutoff=float(spec.get("cutoff", 1e-3)), name=dname)
    raise ValueError(f"unknown levy_measure kind {kind!r}")
