"""Finite supersymmetric spectral data: N=1 and N=(1,1) data, the extension through connections, and products."""

__version__ = "0.1.0"

from .algebra import StarAlgebra, from_operators, generate, tensor  # noqa: E402
from .connections import (  # noqa: E402
    Connection,
    Geometry,
    grassmann,
    perturbed,
    random_connection_form,
    verify_connection,
)
from .extension import HODGE_CHOICES, N11Data, PhiResult, PreconditionFailed, phi, to_n1, verify_n11  # noqa: E402
from .forms import OneForms  # noqa: E402
from .linalg import AntilinearOp, Tolerance, opnorm  # noqa: E402
from .modules import HermitianModule, balanced_tensor, module_from_generators  # noqa: E402
from .multiplicativity import check_multiplicativity, product_pipeline_trace, product_setup  # noqa: E402
from .products import VARIANTS, Variant, kasparov_report, n11_product, variant_distinguisher  # noqa: E402
from .report import Report  # noqa: E402
from .spectral import N1Data, kasparov_product, real_structure, verify_n1, verify_real_structure  # noqa: E402

__all__ = [
    "__version__",
    "AntilinearOp",
    "Connection",
    "Geometry",
    "HODGE_CHOICES",
    "HermitianModule",
    "N11Data",
    "N1Data",
    "OneForms",
    "PhiResult",
    "PreconditionFailed",
    "Report",
    "StarAlgebra",
    "Tolerance",
    "VARIANTS",
    "Variant",
    "balanced_tensor",
    "check_multiplicativity",
    "from_operators",
    "generate",
    "grassmann",
    "kasparov_product",
    "kasparov_report",
    "module_from_generators",
    "n11_product",
    "opnorm",
    "perturbed",
    "phi",
    "product_pipeline_trace",
    "product_setup",
    "random_connection_form",
    "real_structure",
    "tensor",
    "to_n1",
    "variant_distinguisher",
    "verify_connection",
    "verify_n1",
    "verify_n11",
    "verify_real_structure",
]
