"""Constructive model families and their per-model fits."""

from .fitting import FitContext, fit_additive, fit_constant, fit_linear, fit_multi_index, fit_piecewise, snap
from .menu import MenuEntry, build_pool, enumerate_menu, fit_entry
from .partitions import DyadicPartition, RegularPartition
from .piecewise import (
    AdditiveComposite,
    ClampedFunction,
    LinearVariableModel,
    MultiIndexComposite,
    PiecewisePoly,
    clamp,
    monomials,
    multi_degrees,
)

__all__ = [
    "AdditiveComposite",
    "ClampedFunction",
    "DyadicPartition",
    "FitContext",
    "LinearVariableModel",
    "MenuEntry",
    "MultiIndexComposite",
    "PiecewisePoly",
    "RegularPartition",
    "build_pool",
    "clamp",
    "enumerate_menu",
    "fit_additive",
    "fit_constant",
    "fit_entry",
    "fit_linear",
    "fit_multi_index",
    "fit_piecewise",
    "monomials",
    "multi_degrees",
    "snap",
]
