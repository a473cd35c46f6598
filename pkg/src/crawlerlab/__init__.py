"""Analysis toolkit for the spiking-controller soft crawler closed loop."""

from .params import (DimensionalParams, Groups, Scales, characteristic_scales,
                     groups_from_dimensional, load_groups, nondimensionalize)

__all__ = [
    "DimensionalParams", "Groups", "Scales", "characteristic_scales",
    "groups_from_dimensional", "load_groups", "nondimensionalize",
]

__version__ = "0.1.0"
