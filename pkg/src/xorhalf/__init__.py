"""Toolkit for parity-constraint instances and their reduction to
halfspace-learning samples: generators, frequency statistics, polynomial
realizations, the five-stage sample pipeline, baseline solvers, and a
statistical-query oracle simulator."""

__version__ = "0.1.0"

from .common import Bound, FormatError, PreconditionError, ResourceLimitError
from .formulas import (
    Assignment,
    KTuple,
    LabeledQKFormula,
    Literal,
    PlantedInstance,
    QKTuple,
    XorFormula,
    brute_force_value,
    eval_tuple,
    gen_planted_formula,
    gen_random_formula,
    mxor_value,
    val_mxor,
    val_mxor_labeled,
    val_xor,
    xor_value,
)
from .polyrealize import (
    UnivariatePoly,
    XorRealization,
    agreement_on_formula,
    interpolate_xor_poly,
    kl_bernoulli,
    lambda_sum,
    xor_disagreement_bound,
)
from .pseudorandom import (
    EmpiricalBlockDistribution,
    FrequencyReport,
    PartialKTuple,
    block_distribution,
    bound_pseudorandom_failure,
    closeness_check,
    frequency,
    partial_tuple_count,
    pseudorandom_test,
    uniform_partial_probability,
)
from .reduction import (
    BinarySample,
    MonomialIndex,
    PipelineParams,
    PipelineResult,
    SparseTernary,
    TernarySample,
    WitnessHalfspace,
    build_witness,
    eta_prime,
    preset_params,
    run_pipeline,
    step1_amplify,
    step2_scatter,
    step3_filter,
    step4_embed,
    step5_lift,
    ternary_to_binary,
)
from .learners import (
    Gf2System,
    LearnerVerdict,
    RefutationResult,
    distinguisher_wrapper,
    gf2_refute,
    perceptron_fit,
    perceptron_learner,
    sample_error,
)
from .sqsim import (
    ExplicitDistribution,
    SparseParityTarget,
    SqOracle,
    sq_query,
    translate_query,
)
