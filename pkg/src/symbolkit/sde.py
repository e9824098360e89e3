"""Euler simulation of dX = Phi(X_-) dZ + Psi(X_-) dt.

Fixed-step scheme.  Within a step the smooth driver contribution (drift,
Gaussian, aggregate-stable, small-jump compensator) is applied with the
coefficient frozen at the step-start state; individually simulated
finite-activity jumps are then applied one at a time in the order of their
drawn positions, each with the coefficient evaluated at the running pre-jump
state.  That keeps the X_{t-} convention visible at jump times: for
dX = -X_- dN the first jump sends the path to zero and every later jump has
zero effect.  Jump times are snapped to the end of the step they fall in, so
every recorded jump sits on the grid.

Two engines share this stepping rule: a scalar one that produces a full
:class:`SamplePath` with its jump record, and a chunked vectorized one for
Monte Carlo ensembles.  Chunks own seed-derived generators addressed by
(master seed, caller key, chunk index, block index), so ensemble output is
invariant under the worker count.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .coefficients import CoefficientField
from .errors import DimensionMismatch, SimulationOverflow
from .levy import LevyModel
from .seeding import TAG_ENSEMBLE, TAG_PATH, rng_at

OVERFLOW_GUARD = 1e12
DEFAULT_CHUNK = 16384


@dataclass
class SdeModel:
    """Coefficient field, optional drift field, and driving Levy model."""

    coefficient: CoefficientField
    driver: LevyModel
    drift_coefficient: Optional[CoefficientField] = None
    name: str = "sde"

    def __post_init__(self):
        if self.coefficient.n != self.driver.dim:
            raise DimensionMismatch(
                f"coefficient maps to {self.coefficient.d}x{self.coefficient.n} "
                f"but driver has dimension {self.driver.dim}")
        if self.drift_coefficient is not None and self.drift_coefficient.d != self.coefficient.d:
            raise DimensionMismatch("drift coefficient dimension mismatch")

    @property
    def d(self) -> int:
        return self.coefficient.d

    def blocks(self):
        return [(self.coefficient, self.driver)]


@dataclass
class MultiDriverSpec:
    """Independent one-dimensional drivers with their coefficient columns."""

    drivers: Sequence[tuple]  # (CoefficientField with n=1, LevyModel with dim 1)

    def __post_init__(self):
        if not self.drivers:
            raise ValueError("driver list must be nonempty")
        for fld, drv in self.drivers:
            if drv.dim != 1 or fld.n != 1:
                raise DimensionMismatch("multi-driver variant requires one-dimensional drivers")

    @property
    def d(self) -> int:
        return self.drivers[0][0].d

    def blocks(self):
        return list(self.drivers)


@dataclass
class SamplePath:
    """One realization: grid, states, recorded jump effects, and the seed used."""

    times: np.ndarray           # (k+1,)
    states: np.ndarray          # (k+1, d)
    jumps: list                 # [(grid time, state-space jump (d,)), ...]
    seed: int

    @property
    def d(self) -> int:
        return self.states.shape[1]


# --------------------------------------------------------------------------
# shared stepping


def _apply_jumps_scalar(x, blocks, per_block_jumps, record, t_next):
    """Apply jumps sequentially in position order; mutate record if given."""
    tagged = []
    for j, jumps in enumerate(per_block_jumps):
        tagged.extend((pos, j, vec) for pos, vec in jumps)
    tagged.sort(key=lambda item: (item[0], item[1]))
    for _, j, vec in tagged:
        fld = blocks[j][0]
        effect = fld(x) @ vec
        x = x + effect
        if record is not None:
            record.append((t_next, effect))
    return x


def _simulate_blocks_scalar(blocks, drift_field, x0, horizon, step, seed):
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if horizon < step:
        raise ValueError(f"horizon {horizon} shorter than one step {step}")
    d = blocks[0][0].d
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (d,):
        raise DimensionMismatch(f"x0 shape {x0.shape}, expected ({d},)")
    n_steps = int(np.ceil(horizon / step - 1e-12))
    times = step * np.arange(n_steps + 1)
    states = np.empty((n_steps + 1, d))
    states[0] = x0
    rngs = [rng_at(seed, TAG_PATH, j) for j in range(len(blocks))]
    jumps: list = []
    x = x0.copy()
    from .levy import sample_increment_parts

    for k in range(n_steps):
        smooth_total = np.zeros(d)
        per_block_jumps = []
        for j, (fld, drv) in enumerate(blocks):
            smooth, jmp = sample_increment_parts(drv.triplet, step, rngs[j])
            smooth_total += fld(x) @ smooth
            per_block_jumps.append(jmp)
        x_new = x + smooth_total
        if drift_field is not None:
            x_new = x_new + drift_field(x)[:, 0] * step
        x_new = _apply_jumps_scalar(x_new, blocks, per_block_jumps, jumps, times[k + 1])
        norm = np.linalg.norm(x_new)
        if norm > OVERFLOW_GUARD:
            raise SimulationOverflow(
                f"state norm {norm:.3e} exceeded {OVERFLOW_GUARD:.0e} at t={times[k + 1]:.6g}")
        states[k + 1] = x_new
        x = x_new
    return SamplePath(times=times, states=states, jumps=jumps, seed=int(seed))


def simulate_path(model: SdeModel, x0, horizon: float, step: float, seed: int) -> SamplePath:
    """Euler path of the SDE from x0 up to the horizon."""
    return _simulate_blocks_scalar(model.blocks(), model.drift_coefficient,
                                   x0, horizon, step, seed)


def simulate_multi(spec: MultiDriverSpec, x0, horizon: float, step: float, seed: int) -> SamplePath:
    """Euler path driven by independent one-dimensional drivers."""
    return _simulate_blocks_scalar(spec.blocks(), None, x0, horizon, step, seed)


def first_exit_time(path: SamplePath, center, radius: float):
    """First grid time with |X - center| > radius, or None if never."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    center = np.atleast_1d(np.asarray(center, dtype=float))
    dist = np.linalg.norm(path.states - center, axis=1)
    hits = np.nonzero(dist > radius)[0]
    if hits.size == 0:
        return None
    return float(path.times[hits[0]])


def stopped_path(path: SamplePath, center, radius: float) -> SamplePath:
    """Freeze the path at its first exit from the ball; jumps after exit are dropped."""
    tau = first_exit_time(path, center, radius)
    if tau is None:
        return path
    idx = int(np.searchsorted(path.times, tau))
    states = path.states.copy()
    states[idx + 1:] = states[idx]
    jumps = [(t, v) for t, v in path.jumps if t <= tau]
    return SamplePath(times=path.times.copy(), states=states, jumps=jumps, seed=path.seed)


# --------------------------------------------------------------------------
# vectorized ensembles


@dataclass
class EnsembleResult:
    terminal: np.ndarray            # (M, d) states of X^sigma at the horizon
    exited: np.ndarray              # (M,) bool
    running_max: Optional[np.ndarray] = None     # (n_records, M) |X-x0| running maxima
    record_steps: Optional[np.ndarray] = None


def _advance_chunk(x, active, blocks, drift_field, dt, rngs):
    """One Euler step for a chunk; returns the updated state array."""
    m, d = x.shape
    steps = [drv.sample_step_ensemble(dt, m, rngs[j]) for j, (fld, drv) in enumerate(blocks)]
    x_new = x.copy()
    upd = np.zeros((m, d))
    for j, (fld, drv) in enumerate(blocks):
        phi = fld.many(x)                       # (m, d, n_j)
        upd += np.einsum("mdn,mn->md", phi, steps[j].smooth)
    if drift_field is not None:
        upd += drift_field.many(x)[:, :, 0] * dt
    x_new[active] = x[active] + upd[active]

    counts = np.zeros(m, dtype=np.int64)
    for s in steps:
        counts += s.jump_counts
    jumpy = active & (counts > 0)
    if not jumpy.any():
        return x_new

    offsets = [np.concatenate([[0], np.cumsum(s.jump_counts)]) for s in steps]
    single = jumpy & (counts == 1)
    if single.any():
        for j, (fld, drv) in enumerate(blocks):
            ids = np.nonzero(single & (steps[j].jump_counts == 1))[0]
            if ids.size == 0:
                continue
            vals = steps[j].jump_values[offsets[j][ids]]        # (k, n_j)
            phi = fld.many(x_new[ids])                          # (k, d, n_j)
            x_new[ids] += np.einsum("kdn,kn->kd", phi, vals)
    multi = np.nonzero(jumpy & (counts > 1))[0]
    for i in multi:
        tagged = []
        for j, s in enumerate(steps):
            lo, hi = offsets[j][i], offsets[j][i + 1]
            tagged.extend((float(s.jump_positions[k]), j, s.jump_values[k])
                          for k in range(lo, hi))
        tagged.sort(key=lambda item: (item[0], item[1]))
        xi = x_new[i]
        for _, j, vec in tagged:
            xi = xi + blocks[j][0](xi) @ vec
        x_new[i] = xi
    return x_new


def _run_chunk(blocks, drift_field, x0, dt, n_steps, m, rngs,
               stop_center, stop_radius, record_steps):
    d = x0.shape[0]
    x = np.tile(x0, (m, 1))
    active = np.ones(m, dtype=bool)
    maxdist = np.zeros(m)
    records = np.zeros((len(record_steps), m)) if len(record_steps) else None
    rec_pos = {int(s): i for i, s in enumerate(record_steps)}
    for k in range(n_steps):
        x = _advance_chunk(x, active, blocks, drift_field, dt, rngs)
        norms = np.linalg.norm(x[active], axis=1) if active.any() else np.empty(0)
        if norms.size and norms.max() > OVERFLOW_GUARD:
            raise SimulationOverflow(
                f"state norm {norms.max():.3e} exceeded {OVERFLOW_GUARD:.0e} "
                f"at step {k + 1} of {n_steps}")
        dist = np.linalg.norm(x - x0, axis=1)
        maxdist = np.where(active, np.maximum(maxdist, dist), maxdist)
        if stop_radius is not None:
            dstop = np.linalg.norm(x - stop_center, axis=1)
            active &= ~(dstop > stop_radius)
        if records is not None and (k + 1) in rec_pos:
            records[rec_pos[k + 1]] = maxdist
    return x, ~active, records


def simulate_ensemble(blocks, drift_field, x0, horizon: float, n_steps: int,
                      n_paths: int, seed: int, *, base_key=(TAG_ENSEMBLE,),
                      stop_center=None, stop_radius=None,
                      record_max_steps: Sequence[int] = (),
                      chunk_size: int = DEFAULT_CHUNK, threads: int = 1) -> EnsembleResult:
    """Simulate ``n_paths`` independent Euler paths; terminal states of X^sigma.

    Paths are split into fixed-size chunks with per-chunk generators, so the
    result depends only on (seed, base_key), not on ``threads``.
    """
    d = blocks[0][0].d
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    dt = horizon / n_steps
    if stop_radius is not None and stop_center is None:
        stop_center = x0
    if stop_center is not None:
        stop_center = np.atleast_1d(np.asarray(stop_center, dtype=float))
    record_steps = np.asarray(sorted(int(s) for s in record_max_steps), dtype=int)

    bounds = list(range(0, n_paths, chunk_size)) + [n_paths]
    tasks = []
    for c in range(len(bounds) - 1):
        m = bounds[c + 1] - bounds[c]
        rngs = [rng_at(seed, *base_key, c, j) for j in range(len(blocks))]
        tasks.append((c, m, rngs))

    terminal = np.empty((n_paths, d))
    exited = np.zeros(n_paths, dtype=bool)
    records = np.zeros((len(record_steps), n_paths)) if len(record_steps) else None

    def work(task):
        c, m, rngs = task
        return c, _run_chunk(blocks, drift_field, x0, dt, n_steps, m, rngs,
                             stop_center, stop_radius, record_steps)

    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]
    for c, (x, ex, rec) in results:
        lo, hi = bounds[c], bounds[c + 1]
        terminal[lo:hi] = x
        exited[lo:hi] = ex
        if records is not None:
            records[:, lo:hi] = rec
    return EnsembleResult(terminal=terminal, exited=exited,
                          running_max=records, record_steps=record_steps)


def simulate_paths_dense(blocks, drift_field, x0, horizon: float, n_steps: int,
                         n_paths: int, seed: int, *, base_key=(TAG_ENSEMBLE,)) -> np.ndarray:
    """All intermediate states for a modest ensemble: array (n_steps+1, M, d)."""
    d = blocks[0][0].d
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    dt = horizon / n_steps
    rngs = [rng_at(seed, *base_key, 0, j) for j in range(len(blocks))]
    out = np.empty((n_steps + 1, n_paths, d))
    x = np.tile(x0, (n_paths, 1))
    out[0] = x
    active = np.ones(n_paths, dtype=bool)
    for k in range(n_steps):
        x = _advance_chunk(x, active, blocks, drift_field, dt, rngs)
        out[k + 1] = x
    return out


# --------------------------------------------------------------------------
# path export

_MAGIC = b"SYMK"
_VERSION = 1


def path_to_csv(path: SamplePath, fh) -> None:
    """Write t, x_1..x_d rows; floats use shortest round-trip repr."""
    d = path.d
    fh.write("t," + ",".join(f"x_{j + 1}" for j in range(d)) + "\n")
    for t, row in zip(path.times, path.states):
        fh.write(repr(float(t)) + "," + ",".join(repr(float(v)) for v in row) + "\n")


def path_to_binary(path: SamplePath, fh) -> None:
    """Compact record: magic, version u32, d u32, length u64, then little-endian
    float64 times followed by states in C order."""
    fh.write(_MAGIC)
    fh.write(struct.pack("<IIQ", _VERSION, path.d, path.times.shape[0]))
    fh.write(path.times.astype("<f8").tobytes())
    fh.write(np.ascontiguousarray(path.states, dtype="<f8").tobytes())


def path_from_binary(fh) -> SamplePath:
    magic = fh.read(4)
    if magic != _MAGIC:
        raise ValueError("not a symbolkit path record")
    version, d, length = struct.unpack("<IIQ", fh.read(16))
    if version != _VERSION:
        raise ValueError(f"unsupported record version {version}")
    times = np.frombuffer(fh.read(8 * length), dtype="<f8").copy()
    states = np.frombuffer(fh.read(8 * length * d), dtype="<f8").reshape(length, d).copy()
    return SamplePath(times=times, states=states, jumps=[], seed=-1)
