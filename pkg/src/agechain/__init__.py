"""agechain: a numerical laboratory for age-driven binary renewal chains.

A one-sided transition kernel that looks at the past only through the age
of the current zero-run can be continuous and strongly non-null, yet its
unique stationary chain can fail to have convergent two-sided conditional
probabilities: along two explicit families of growing contexts the
conditionals approach two different limits.  This package computes all the
ingredients exactly (rational block sequence, closed-form conditionals,
certified renewal series), simulates the chain, and exposes every
experiment through the ``agechain`` command line.
"""

from .blockseq import (
    ShiftSearchExhausted,
    SubseqPair,
    block_index,
    find_subsequences,
    partial_sum,
    term,
    window_sum,
)
from .exact import (
    Certified,
    CertificateError,
    CylinderSpec,
    GapDistribution,
    age_distribution,
    conditional_from_cylinders,
    cylinder_probability,
    gap_distribution,
    limit_value,
    marginal_one,
    one_sided_conditional,
    prefactor,
    two_sided_conditional,
    two_sided_conditional_closed,
)
from .kernel import (
    ContextSummary,
    IndeterminateContextError,
    NoTailBoundError,
    OscillatingParams,
    ParameterError,
    PSequence,
    age_of,
    continuity_modulus,
    transition_prob,
    wait_of,
)
from .sample import (
    Estimate,
    InsufficientHitsError,
    SamplePath,
    forward_sample,
    mc_conditional,
    mc_one_sided,
    pool_estimates,
    stationary_sample,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # blockseq
    "block_index",
    "term",
    "partial_sum",
    "window_sum",
    "SubseqPair",
    "find_subsequences",
    "ShiftSearchExhausted",
    # kernel
    "OscillatingParams",
    "PSequence",
    "ContextSummary",
    "age_of",
    "wait_of",
    "transition_prob",
    "continuity_modulus",
    "ParameterError",
    "IndeterminateContextError",
    "NoTailBoundError",
    # exact
    "Certified",
    "CertificateError",
    "CylinderSpec",
    "GapDistribution",
    "two_sided_conditional",
    "two_sided_conditional_closed",
    "prefactor",
    "limit_value",
    "one_sided_conditional",
    "gap_distribution",
    "marginal_one",
    "age_distribution",
    "cylinder_probability",
    "conditional_from_cylinders",
    # sample
    "SamplePath",
    "Estimate",
    "forward_sample",
    "stationary_sample",
    "mc_conditional",
    "mc_one_sided",
    "pool_estimates",
    "InsufficientHitsError",
]
