"""Asymptotic covariance and efficiency of estimators for discrete energy-based models."""

from ._core import (
    DimensionError,
    DomainError,
    EnergyModel,
    Error,
    FitError,
    IndexError,
    InputError,
    ParameterError,
    SingularMatrixError,
    bound_quantities,
    compare,
    covariance,
    figure2,
    fit,
    m_grad,
    m_hess,
    m_value,
    monte_carlo,
    psd_order,
    sample,
)

__all__ = [
    "DimensionError",
    "DomainError",
    "EnergyModel",
    "Error",
    "FitError",
    "IndexError",
    "InputError",
    "ParameterError",
    "SingularMatrixError",
    "bound_quantities",
    "compare",
    "covariance",
    "figure2",
    "fit",
    "m_grad",
    "m_hess",
    "m_value",
    "monte_carlo",
    "psd_order",
    "sample",
]
