"""Finite set-theoretic Yang-Baxter solutions: word problems in the
structure monoid M(X,r) and its left derived monoid A(X,r), ideal and
growth invariants, and exhaustive small-size censuses."""

__version__ = "0.1.0"

from .errors import (
    AxiomViolation,
    CrossCheckFailure,
    IllDefined,
    InconsistentSolution,
    NotClosed,
    PreconditionUnmet,
    ResourceLimit,
    YbxError,
)
from .reports import (
    EVIDENCE,
    PROVED,
    REFUTED,
    RESOURCE,
    DiagnosisReport,
    RunConfig,
    report_json,
)
from .solution import (
    PropertyFlags,
    SolutionTable,
    action_closures,
    classify,
    derived_solution,
    diagonal_map,
    from_components,
    from_pairs,
    is_bijective,
    is_derived_shape,
    is_fixed_rho,
    is_idempotent,
    is_involutive,
    is_left_nondegenerate,
    is_permutation,
    is_right_nondegenerate,
    load_solution,
    loads_solution,
    make_idempotent_yy,
    make_lyubashenko,
    make_metahomomorphism,
    make_trivial,
    make_twisted_rack,
    relabel,
    restrict_solution,
    retract_fixed_rho,
    sigma_tables,
    validate_yang_baxter,
    yang_baxter_witness,
)
from .engine import ClassRef, GradedClosure, SocleData, WordEngine
from .ideals import (
    ArchimedeanDecomposition,
    CellSpec,
    archimedean_components,
    cancellativity_probe,
    ideal_chain,
    noetherian_diagnosis,
    nil_power_check,
    replay_cancellation_witness,
)
from .invariants import (
    CongruenceData,
    OrbitGroupData,
    SpectrumData,
    bijective_retract,
    cancellative_congruence_additive,
    cancellative_congruence_multiplicative,
    gk_dimension,
    invariant_subsets,
    omega_lambda,
    orbit_count,
    quotient_right_cancellative,
    spec_additive,
    spectrum_dot,
    theorem_cross_checks,
)
from .atlas import (
    AtlasSpec,
    CensusResult,
    census,
    census_csv,
    cross_enumeration_check,
    enumerate_solutions,
    isomorphism_representative,
)

__all__ = [name for name in dir() if not name.startswith("_")]
