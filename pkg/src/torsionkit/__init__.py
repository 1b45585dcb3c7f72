"""torsionkit: exact torsion invariants of finite metrized cochain complexes.

Computes integer cohomology with regulators, analytic torsion, volume-form
Reidemeister torsion, and their twisted counterparts for complexes of free
abelian groups carrying a cyclic group action, entirely in exact arithmetic.
A catalogue of machine-checkable identities (the verify module) pins every
sign and normalization against the unambiguous spectral definitions.
"""

from .complexes import (
    ChainComplex,
    CohomologyReport,
    ComplexError,
    GroupAction,
    VolumeForm,
    analytic_torsion,
    cohomology,
    identity_gram,
    is_rationally_acyclic,
    laplacian,
    rt_volume_forms,
    standard_volume_forms,
    unit_covolume,
    validate,
    zeta_at_zero,
    zeta_derivative_at_zero,
)
from .constructions import (
    CWData,
    MSData,
    OrderComplex,
    cone_on_identity,
    cw_cochain_complex,
    direct_sum,
    elementary_complex,
    equivariant_direct_sum,
    morse_smale_complex,
    norm_of_torsion,
    restrict_scalars,
    tensor_power_cyclic,
    tensor_product,
)
from .equivariant import (
    FiniteComplex,
    IsotypicDecomposition,
    isotypic_decomposition,
    nrt_sigma,
    quotient_cohomology,
    rt_sigma,
    spectral_bound_data,
    tau_sigma_exact_p2,
    tau_sigma_numeric,
    twisted_zeta_derivative_at_zero,
)
from .matrices import (
    LinalgError,
    Matrix,
    SNFResult,
    charpoly,
    det_exact,
    pseudo_determinant,
    saturated_kernel,
    smith_normal_form,
)
from .torsionvalue import TorsionValue
from .verify import CONVENTIONS_VERSION, CheckReport, run_identity_check, run_suite

__version__ = "0.1.0"

__all__ = [
    "ChainComplex",
    "CohomologyReport",
    "ComplexError",
    "CONVENTIONS_VERSION",
    "CheckReport",
    "CWData",
    "FiniteComplex",
    "GroupAction",
    "IsotypicDecomposition",
    "LinalgError",
    "MSData",
    "Matrix",
    "OrderComplex",
    "SNFResult",
    "TorsionValue",
    "VolumeForm",
    "analytic_torsion",
    "charpoly",
    "cohomology",
    "cone_on_identity",
    "cw_cochain_complex",
    "det_exact",
    "direct_sum",
    "elementary_complex",
    "equivariant_direct_sum",
    "identity_gram",
    "is_rationally_acyclic",
    "isotypic_decomposition",
    "laplacian",
    "morse_smale_complex",
    "norm_of_torsion",
    "nrt_sigma",
    "pseudo_determinant",
    "quotient_cohomology",
    "restrict_scalars",
    "rt_sigma",
    "rt_volume_forms",
    "run_identity_check",
    "run_suite",
    "saturated_kernel",
    "smith_normal_form",
    "spectral_bound_data",
    "standard_volume_forms",
    "tau_sigma_exact_p2",
    "tau_sigma_numeric",
    "tensor_power_cyclic",
    "tensor_product",
    "twisted_zeta_derivative_at_zero",
    "unit_covolume",
    "validate",
    "zeta_at_zero",
    "zeta_derivative_at_zero",
]
