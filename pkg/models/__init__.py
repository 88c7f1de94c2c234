"""
Parametric families used by the goodness-of-fit and copula tests
"""
from models.families import (
    FAMILIES,
    ClaytonCopula,
    NormalLocation,
    NormalLocationScale,
    get_family,
)

__all__ = ['FAMILIES', 'ClaytonCopula', 'NormalLocation', 'NormalLocationScale', 'get_family']
