"""Named drivers, models, and symbols used by the experiments and the CLI."""

from __future__ import annotations

from typing import Optional

import numpy as np

from . import coefficients as coeff
from .coefficients import CoefficientField
from .levy import (AtomLaw, DensityForm, FiniteActivity, LevyModel, LevyTriplet,
                   StableSymmetric, ZeroMeasure)
from .sde import SdeModel
from .symbols import (SymbolField, mixed_power_symbol, power_law_symbol,
                      stable_like_symbol, symbol_from_exponent)

# --------------------------------------------------------------------------
# drivers


def bm_driver(variance: float = 1.0) -> LevyModel:
    """Standard Brownian driver: psi(xi) = variance * xi^2 / 2."""
    return LevyModel(LevyTriplet([0.0], [[variance]], ZeroMeasure()), name="bm")


def drift_driver(rate: float = 1.0) -> LevyModel:
    return LevyModel(LevyTriplet([rate], [[0.0]], ZeroMeasure()), name="drift")


def compound_poisson_pm1(rate: float = 1.0) -> LevyModel:
    """Rate-``rate`` compound Poisson with symmetric unit jumps +-1."""
    law = AtomLaw.of([(1.0, 0.5), (-1.0, 0.5)])
    return LevyModel(LevyTriplet([0.0], [[0.0]], FiniteActivity(rate, law)),
                     name="cp_pm1")


def poisson_unit(rate: float = 1.0) -> LevyModel:
    """Standard Poisson process: unit jumps at rate ``rate``."""
    law = AtomLaw.of([(1.0, 1.0)])
    return LevyModel(LevyTriplet([0.0], [[0.0]], FiniteActivity(rate, law)),
                     name="poisson")


def stable_driver(alpha: float, scale: float = 1.0) -> LevyModel:
    """Symmetric alpha-stable driver: psi(xi) = scale * |xi|^alpha."""
    return LevyModel(LevyTriplet([0.0], [[0.0]], StableSymmetric(alpha, scale)),
                     name=f"stable{alpha}")


def tempered_density_driver(alpha: float = 0.5, decay: float = 1.0,
                            cutoff: float = 5e-3, window: float = 40.0) -> LevyModel:
    """Density-form driver nu(y) = |y|^{-1-alpha} e^{-decay |y|}."""
    dens = lambda y: abs(y) ** (-1.0 - alpha) * np.exp(-decay * abs(y)) if y != 0 else 0.0
    return LevyModel(
        LevyTriplet([0.0], [[0.0]], DensityForm(dens, window=window, cutoff=cutoff,
                                                name="tempered")),
        name="tempered")


_DRIVERS = {
    "bm": lambda p: bm_driver(p.get("variance", 1.0)),
    "drift": lambda p: drift_driver(p.get("rate", 1.0)),
    "cp_pm1": lambda p: compound_poisson_pm1(p.get("rate", 1.0)),
    "poisson": lambda p: poisson_unit(p.get("rate", 1.0)),
    "stable": lambda p: stable_driver(p["alpha"], p.get("scale", 1.0)),
    "tempered": lambda p: tempered_density_driver(
        p.get("alpha", 0.5), p.get("decay", 1.0), p.get("cutoff", 5e-3),
        p.get("window", 40.0)),
}


def resolve_driver(spec: dict) -> LevyModel:
    """Named catalog driver or a full triplet JSON object."""
    if "name" in spec:
        name = spec["name"]
        if name not in _DRIVERS:
            raise ValueError(f"unknown driver {name!r}; catalog: {sorted(_DRIVERS)}")
        return _DRIVERS[name](spec.get("params", {}))
    return LevyModel.from_dict(spec)


# --------------------------------------------------------------------------
# models


def _model(name: str, driver: LevyModel, phi: CoefficientField,
           psi: Optional[CoefficientField] = None) -> SdeModel:
    return SdeModel(coefficient=phi, driver=driver, drift_coefficient=psi, name=name)


def bm_bump() -> SdeModel:
    return _model("bm_bump", bm_driver(), coeff.bump(0.5, 1.0))


def cp_tanh() -> SdeModel:
    return _model("cp_tanh", compound_poisson_pm1(), coeff.tanh_field(2.0, 1.0))


def stable_sin() -> SdeModel:
    return _model("stable_sin", stable_driver(1.0), coeff.sine(2.0, 1.0))


def bm_bump_drift() -> SdeModel:
    return _model("bm_bump_drift", bm_driver(), coeff.bump(0.5, 1.0),
                  coeff.cosine(0.0, 1.0))


def bm_unit() -> SdeModel:
    return _model("bm_unit", bm_driver(), coeff.constant(1.0))


def feller_demo_model() -> SdeModel:
    """dX = -X_- dN with a standard Poisson N: jumps to 0 and stays."""
    return _model("feller_demo", poisson_unit(), coeff.negative_identity())


MODEL_CATALOG = {
    "bm_bump": bm_bump,
    "cp_tanh": cp_tanh,
    "stable_sin": stable_sin,
    "bm_bump_drift": bm_bump_drift,
    "bm_unit": bm_unit,
    "feller_demo": feller_demo_model,
}

# models exercised by the symbol-agreement experiment
AGREEMENT_MODELS = ("bm_bump", "cp_tanh", "stable_sin", "bm_bump_drift")


def resolve_model(spec: dict) -> SdeModel:
    """{"name": catalog} or {"coefficient": ..., "driver": ..., "drift_coefficient"?}."""
    if "name" in spec and "driver" not in spec:
        name = spec["name"]
        if name not in MODEL_CATALOG:
            raise ValueError(f"unknown model {name!r}; catalog: {sorted(MODEL_CATALOG)}")
        return MODEL_CATALOG[name]()
    phi = coeff.from_dict(spec["coefficient"])
    drift = (coeff.from_dict(spec["drift_coefficient"])
             if spec.get("drift_coefficient") else None)
    driver = resolve_driver(spec["driver"])
    return SdeModel(coefficient=phi, driver=driver, drift_coefficient=drift,
                    name=spec.get("label", "sde"))


# --------------------------------------------------------------------------
# symbols


def default_stable_like_alpha(y):
    return 1.0 + 0.5 / (1.0 + np.asarray(y) ** 2)


def resolve_symbol(spec: dict) -> SymbolField:
    """Named synthetic symbol, a driver exponent, or a model's solution symbol."""
    from .symbols import symbol_of_model

    if "model" in spec:
        return symbol_of_model(resolve_model(spec["model"]))
    if "driver" in spec:
        return symbol_from_exponent(resolve_driver(spec["driver"]).exponent)
    name = spec.get("name")
    params = spec.get("params", {})
    if name == "power_law":
        return power_law_symbol(params["alpha"], params.get("coeff", 1.0))
    if name == "mixed_power":
        return mixed_power_symbol([tuple(t) for t in params["terms"]])
    if name == "stable_like":
        return stable_like_symbol(default_stable_like_alpha, name="stable_like")
    raise ValueError(f"unknown symbol {name!r}")
