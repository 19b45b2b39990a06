"""
Completed cohomology of towers of finite covers

Exact computations over Z/p^s for p-adic analytic towers of covers of a finite Delta-complex:
- a) Twisted cochain complexes with coinduced coefficients Maps(L_r, Z/p^s)
- b) Local Smith elimination with generators and induced maps
- c) Certified colimits over tower levels, reconstructed over precisions
- d) Structural verifiers: long exact sequence, excision, nilpotent collapse,
  defect estimates, Shapiro and transfer checks, Cech comparison
"""

from .abelian import image_exponent, image_type
from .cech_compare import (CechComplex, StarCover, cech_cohomology, compare_with_cellular,
                           star_cover)
from .cli_runner import CheckResult, RunReport, list_builtin_examples, run
from .complex_core import (CoverComplex, DeltaComplex, Subcomplex, ValidationReport,
                           barycentric_subdivision, build_cover, components, parse_complex,
                           simplicial_model, validate_complex)
from .config import JobConfig, TowerSpec, build_job, load_config, parse_config
from .errors import (ChainMapError, CheckFailure, CompletedCohomologyError, ComplexError,
                     ConfigError, DescriptorError, InputError, NonNormalSubgroupError,
                     NotSimplicialError, TowerError)
from .group_towers import (AbelianTower, CustomTower, GroupTower, HeisenbergTower,
                           SubTower, center_subtower, closure_of, make_abelian_tower,
                           make_custom_tower, make_heisenberg_tower, quotient_tower,
                           tower_from_subtower, validate_tower)
from .limits_engine import (ColimitApproximation, CompletedReport, Stabilization, colimit,
                            completed_cohomology, defect_estimate, excise_reduce, les_check,
                            nilpotent_collapse_check, shapiro_check, transfer_check)
from .local_systems import FlatDescriptor, twisted_complex, validate_descriptor
from .smith_engine import (CochainComplex, CohomologyResult, SparseMatrix, cohomology,
                           cohomology_via_lift, induced_map, local_smith, smith_normal_form)

__version__ = "1.0.0"

__all__ = [
    "AbelianTower", "CechComplex", "ChainMapError", "CheckFailure", "CheckResult",
    "CochainComplex", "CohomologyResult", "ColimitApproximation", "CompletedCohomologyError",
    "CompletedReport", "ComplexError", "ConfigError", "CoverComplex", "CustomTower",
    "DeltaComplex", "DescriptorError", "FlatDescriptor", "GroupTower", "HeisenbergTower",
    "InputError", "JobConfig", "NonNormalSubgroupError", "NotSimplicialError", "RunReport",
    "SparseMatrix", "Stabilization", "StarCover", "SubTower", "Subcomplex", "TowerError",
    "TowerSpec", "ValidationReport", "barycentric_subdivision", "build_cover", "build_job",
    "cech_cohomology", "center_subtower", "closure_of", "cohomology", "cohomology_via_lift",
    "colimit", "compare_with_cellular", "completed_cohomology", "components", "defect_estimate",
    "excise_reduce", "image_exponent", "image_type", "induced_map", "les_check",
    "list_builtin_examples", "load_config", "local_smith", "make_abelian_tower",
    "make_custom_tower", "make_heisenberg_tower", "nilpotent_collapse_check", "parse_complex",
    "parse_config", "quotient_tower", "run", "shapiro_check", "simplicial_model",
    "smith_normal_form", "star_cover", "tower_from_subtower", "transfer_check",
    "twisted_complex", "validate_complex", "validate_descriptor", "validate_tower",
]
