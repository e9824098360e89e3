"""Coefficient fields for the SDE layer.

A field wraps Phi: R^d -> R^{d x n} together with declared bound and
Lipschitz constants.  The declared constants are spot-checked, not derived:
``validate_field`` samples random pairs in a box and verifies the claims.
The shipped catalog covers the bounded Lipschitz coefficients used by the
experiments; all catalog entries are one-dimensional and vectorize over
batches of states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch


@dataclass
class CoefficientField:
    """Evaluable coefficient Phi: R^d -> R^{d x n} with declared constants.

    ``fn`` maps a state (d,) to a matrix (d, n).  ``batch_fn``, if given,
    maps (m, d) -> (m, d, n); otherwise batches fall back to a loop.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    d: int
    n: int
    bound: float
    lipschitz: float
    bounded: bool = True
    globally_lipschitz: bool = True
    growth_constant: Optional[float] = None
    name: str = "coefficient"
    batch_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.d,):
            raise DimensionMismatch(f"{self.name}: state shape {x.shape}, expected ({self.d},)")
        out = np.asarray(self.fn(x), dtype=float).reshape(self.d, self.n)
        return out

    def many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.ndim == 1:
            xs = xs[:, None]
        if self.batch_fn is not None:
            return np.asarray(self.batch_fn(xs), dtype=float).reshape(xs.shape[0], self.d, self.n)
        return np.stack([self(x) for x in xs])


def scalar_field(f: Callable[[np.ndarray], np.ndarray], *, bound: float, lipschitz: float,
                 bounded: bool = True, growth_constant: Optional[float] = None,
                 name: str = "coefficient") -> CoefficientField:
    """One-dimensional field from a numpy-vectorized scalar function."""
    return CoefficientField(
        fn=lambda x: np.asarray(f(x[0]), dtype=float).reshape(1, 1),
        batch_fn=lambda xs: np.asarray(f(xs[:, 0]), dtype=float).reshape(-1, 1, 1),
        d=1, n=1, bound=bound, lipschitz=lipschitz, bounded=bounded,
        globally_lipschitz=True, growth_constant=growth_constant, name=name)


def validate_field(fld: CoefficientField, box_halfwidth: float = 5.0,
                   n_pairs: int = 1000, seed: int = 0) -> None:
    """Spot-check the declared bound / Lipschitz / growth constants.

    Raises ValueError with a witness pair on the first violation.
    """
    rng = np.random.default_rng(seed)
    slack = 1.0 + 1e-9
    xs = rng.uniform(-box_halfwidth, box_halfwidth, size=(n_pairs, fld.d))
    ys = rng.uniform(-box_halfwidth, box_halfwidth, size=(n_pairs, fld.d))
    px = fld.many(xs)
    py = fld.many(ys)
    norms = np.linalg.norm(px.reshape(n_pairs, -1), axis=1)
    if fld.bounded:
        bad = norms > fld.bound * slack
        if bad.any():
            i = int(np.argmax(bad))
            raise ValueError(f"{fld.name}: |Phi({xs[i]})| = {norms[i]} exceeds bound {fld.bound}")
    else:
        k = fld.growth_constant if fld.growth_constant is not None else fld.bound ** 2
        lhs = norms ** 2
        rhs = k * (1.0 + np.linalg.norm(xs, axis=1) ** 2) * slack
        if (lhs > rhs).any():
            i = int(np.argmax(lhs > rhs))
            raise ValueError(f"{fld.name}: growth condition fails at {xs[i]}")
    diff = np.linalg.norm((px - py).reshape(n_pairs, -1), axis=1)
    dist = np.linalg.norm(xs - ys, axis=1)
    bad = diff > fld.lipschitz * dist * slack + 1e-15
    if bad.any():
        i = int(np.argmax(bad))
        raise ValueError(
            f"{fld.name}: Lipschitz violation between {xs[i]} and {ys[i]} "
            f"(|dPhi| = {diff[i]}, L|dx| = {fld.lipschitz * dist[i]})")


# --------------------------------------------------------------------------
# catalog; sup / Lipschitz constants are analytic for each family

def constant(value: float = 1.0) -> CoefficientField:
    return scalar_field(lambda x: np.full_like(np.asarray(x, dtype=float), value),
                        bound=abs(value), lipschitz=0.0, name=f"constant({value})")


def zero() -> CoefficientField:
    return constant(0.0)


def bump(a: float = 0.5, b: float = 1.0) -> CoefficientField:
    """x -> a + b / (1 + x^2); sup-slope of b/(1+x^2) is 3*sqrt(3)/8 * b."""
    return scalar_field(lambda x: a + b / (1.0 + x ** 2),
                        bound=abs(a) + abs(b), lipschitz=abs(b) * 3.0 * np.sqrt(3.0) / 8.0,
                        name=f"bump({a},{b})")


def sine(offset: float = 0.0, amplitude: float = 1.0) -> CoefficientField:
    return scalar_field(lambda x: offset + amplitude * np.sin(x),
                        bound=abs(offset) + abs(amplitude), lipschitz=abs(amplitude),
                        name=f"sine({offset},{amplitude})")


def cosine(offset: float = 0.0, amplitude: float = 1.0) -> CoefficientField:
    return scalar_field(lambda x: offset + amplitude * np.cos(x),
                        bound=abs(offset) + abs(amplitude), lipschitz=abs(amplitude),
                        name=f"cosine({offset},{amplitude})")


def tanh_field(offset: float = 0.0, gain: float = 1.0) -> CoefficientField:
    return scalar_field(lambda x: offset + gain * np.tanh(x),
                        bound=abs(offset) + abs(gain), lipschitz=abs(gain),
                        name=f"tanh({offset},{gain})")


def negative_identity() -> CoefficientField:
    """x -> -x, the unbounded coefficient of the Feller-failure demo."""
    return scalar_field(lambda x: -np.asarray(x, dtype=float),
                        bound=np.inf, lipschitz=1.0, bounded=False,
                        growth_constant=1.0, name="neg_identity")


_CATALOG = {
    "constant": lambda p: constant(p.get("value", 1.0)),
    "zero": lambda p: zero(),
    "bump": lambda p: bump(p.get("a", 0.5), p.get("b", 1.0)),
    "sine": lambda p: sine(p.get("offset", 0.0), p.get("amplitude", 1.0)),
    "cosine": lambda p: cosine(p.get("offset", 0.0), p.get("amplitude", 1.0)),
    "tanh": lambda p: tanh_field(p.get("offset", 0.0), p.get("gain", 1.0)),
    "neg_identity": lambda p: negative_identity(),
}


def from_dict(spec: dict) -> CoefficientField:
    """{"name": ..., "params": {...}} -> catalog coefficient."""
    name = spec.get("name")
    if name not in _CATALOG:
        raise ValueError(f"unknown coefficient {name!r}; catalog: {sorted(_CATALOG)}")
    return _CATALOG[name](spec.get("params", {}))
