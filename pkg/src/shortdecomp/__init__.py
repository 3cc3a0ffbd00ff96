"""Shorts of positive semidefinite forms and the short-type decomposition
``t = t_{ker w} + (t - t_{ker w})`` for matrices, charges on finite rings of
sets, and positive functionals on finite-dimensional *-algebras."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    InternalInconsistency,
    NoConvergence,
    ShortDecompError,
    ValidationError,
)
from .linalg import DEFAULT_TOL, Subspace, Tolerance  # noqa: E402
from .forms import (  # noqa: E402
    PsdForm,
    is_absolutely_continuous,
    is_disjoint_part,
    is_dominated,
    is_quasi_unit,
    is_singular,
    lebesgue_ac_part,
    parallel_sum,
    short_form,
    short_type_decompose,
)
from .operators import build_factor, krein_short, operator_decompose, short_quadratic_sup  # noqa: E402
from .charges import Charge, SetRing, atoms, charge_decompose, induced_form  # noqa: E402
from .functionals import Functional, StarAlgebra, functional_decompose, gns, induced_gram  # noqa: E402

__all__ = [
    "DEFAULT_TOL", "Charge", "Functional", "InternalInconsistency", "NoConvergence", "PsdForm",
    "SetRing", "ShortDecompError", "StarAlgebra", "Subspace", "Tolerance", "ValidationError",
    "atoms", "build_factor", "charge_decompose", "functional_decompose", "gns", "induced_form",
    "induced_gram", "is_absolutely_continuous", "is_disjoint_part", "is_dominated", "is_quasi_unit",
    "is_singular", "krein_short", "lebesgue_ac_part", "operator_decompose", "parallel_sum",
    "short_form", "short_quadratic_sup", "short_type_decompose",
]
