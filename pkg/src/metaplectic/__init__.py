"""Boundedness of metaplectic operators on mixed-norm modulation spaces.

Submodules:

* :mod:`.symplectic` -- symplectic matrices, generators, factorization, reduced forms
* :mod:`.weights`    -- polynomial weight families and their transfer under ``S``
* :mod:`.classifier` -- boundedness verdicts
* :mod:`.gaussian`   -- closed forms for the dilated-Gaussian witnesses
* :mod:`.tfa`        -- discrete time-frequency engine used as an oracle
* :mod:`.harness`    -- eps sweeps and exponent fits
"""

from .classifier import Reason, Status, Verdict, blowup_exponent, classify_unweighted, classify_weighted
from .errors import (
    CapabilityError,
    ConditioningError,
    DimensionError,
    DivergenceError,
    DomainError,
    FactorizationError,
    GridError,
    MetaplecticError,
    ParameterError,
    TruncationWarning,
    ValidationError,
)
from .exponents import ExponentPair
from .gaussian import (
    GaussianWitness,
    ambiguity_gaussian,
    case_ratio,
    gaussian_integral,
    mixed_norm_dilated,
    sigma_beta_omega,
)
from .harness import SweepConfig, SweepReport, run_sweep
from .symplectic import (
    Factorization,
    SpecialForm,
    SymplecticMatrix,
    factorize,
    invert_symplectic,
    is_symplectic,
    is_upper_block_triangular,
    make_generator,
    reduce_special,
)
from .weights import Equivalence, WeightSpec, equivalence_under, estimate_Rm_Tm, eval_weight

__version__ = "0.1.0"
