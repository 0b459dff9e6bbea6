"""Numerical verification toolkit for the eigenvalue inequality

    lambda_k(A B)  <=  lambda_k( C(q) C(1-q) ),      C(q) = q A + (1-q) B,

its singular-value form, the arithmetic-geometric-mean endpoint, and the
family of unitarily invariant norm inequalities that interpolate between
the AM-GM and Cauchy-Schwarz norm inequalities.

The package provides:

* exact-arithmetic-free but tightly toleranced linear algebra primitives
  (Jacobi eigensolver, PSD square roots, pseudo-inverses),
* symmetric gauge functions and unitarily invariant norms,
* checkers that evaluate each inequality and report signed margins,
* a step-by-step numerical executor of the constructive argument behind
  the main eigenvalue bound,
* a randomized search that hunts for counterexamples to a deliberately
  false variant of the inequality (and confirms the true ones resist).
"""

from .config import DEFAULT_TOLS, Tolerances
from .linalg import (
    ComplexMatrix,
    ConvergenceError,
    HermitianMatrix,
    LinalgError,
    PsdMatrix,
    Spectrum,
    eigvals_of_product,
    hermitian_eig,
    loewner_leq,
    numerical_rank,
    pseudo_inverse,
    psd_sqrt,
    random_psd,
    singular_values,
)
from .gauge import (
    GaugeSpec,
    MajorizationVerdict,
    SCHATTEN_GRID,
    elementwise_product_abs,
    gauge_eval,
    holder_gauge_check,
    norm_grid,
    ui_norm,
    weak_majorize,
)
from .report import CheckReport
from .checks import (
    check_agm_singular,
    check_false_variant,
    check_majorization_chain,
    check_singular_form,
    check_sv_product_majorization,
    check_theorem1,
    check_theorem2,
    check_weyl_majorant,
    cq_mix,
)
from .pipeline import (
    PipelineDomainError,
    PipelineStepError,
    PipelineTrace,
    TriviallyTrue,
    run_pipeline,
)
from .hunt import HuntConfig, NotFound, Violation, hunt_counterexample, stress_sweep

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "ComplexMatrix",
    "ConvergenceError",
    "DEFAULT_TOLS",
    "GaugeSpec",
    "HermitianMatrix",
    "HuntConfig",
    "LinalgError",
    "MajorizationVerdict",
    "NotFound",
    "PipelineDomainError",
    "PipelineStepError",
    "PipelineTrace",
    "PsdMatrix",
    "SCHATTEN_GRID",
    "Spectrum",
    "Tolerances",
    "TriviallyTrue",
    "Violation",
    "check_agm_singular",
    "check_false_variant",
    "check_majorization_chain",
    "check_singular_form",
    "check_sv_product_majorization",
    "check_theorem1",
    "check_theorem2",
    "check_weyl_majorant",
    "cq_mix",
    "eigvals_of_product",
    "elementwise_product_abs",
    "gauge_eval",
    "hermitian_eig",
    "holder_gauge_check",
    "hunt_counterexample",
    "loewner_leq",
    "norm_grid",
    "numerical_rank",
    "pseudo_inverse",
    "psd_sqrt",
    "random_psd",
    "run_pipeline",
    "singular_values",
    "stress_sweep",
    "ui_norm",
    "weak_majorize",
]
