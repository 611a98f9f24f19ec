"""Block designs from polynomials over finite fields."""

__version__ = "0.1.0"

from .gf import Field, FieldError, field_new, parse_field  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .poly import Poly, PolyError, catalog, parse_poly  # noqa: E402

__all__ = ["BACKEND", "Field", "FieldError", "Poly", "PolyError", "catalog", "field_new", "parse_field",
           "parse_poly", "__version__"]
