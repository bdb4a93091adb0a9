"""Weights and traces paired with K-theory, on finite and compact model algebras."""

__version__ = "0.1.0"

from .errors import KTraceError  # noqa: E402
from .limits import LimitReport, cesaro_limit  # noqa: E402
from .dimension_group import DimensionGroupElement, make_element, projection_p  # noqa: E402
from .pairing import KClass, k00_pairing, k0_pairing, underline_psi  # noqa: E402
from .regularization import approximate_unit, regularize_trace  # noqa: E402
from .singular_traces import mu_function_trace, singular_tau  # noqa: E402
from .weights import weight_from_json  # noqa: E402

__all__ = [
    "KTraceError", "LimitReport", "cesaro_limit", "DimensionGroupElement", "make_element",
    "projection_p", "KClass", "k00_pairing", "k0_pairing", "underline_psi",
    "approximate_unit", "regularize_trace", "mu_function_trace", "singular_tau",
    "weight_from_json",
]
