//! Solver toolkit for two-stage robust unit commitment under correlated
//! temperature and demand uncertainty.
//!
//! Temperature enters the recourse problem on the left-hand side: the
//! efficiency factor `1.2 - A/300` multiplies nominal generation in every
//! balance constraint, so hotter scenarios shrink what committed capacity can
//! deliver. Demand enters on the right-hand side, linked to temperature by a
//! lagged budget set. The crate provides:
//!
//! * [`grid`] — the case data model, JSON ingestion and validation;
//! * [`uncertainty`] — the budgeted uncertainty set, its binary and relaxed
//!   variants, enumeration and projection;
//! * [`solver`] — a small MILP-backend abstraction (HiGHS underneath);
//! * [`uc`] — commitment and recourse model builders plus the deterministic
//!   single-scenario problem;
//! * [`subproblems`] — worst-case scenario MIPs built from the dual of the
//!   recourse LP, the brute-force enumeration oracle, and the structural
//!   condition checks that justify binary uncertainty sets;
//! * [`ccg`] — the column-and-constraint-generation driver, the bound-based
//!   approximation scheme and the copperplate exact path;
//! * [`fixtures`] — built-in test systems shared by tests, benchmarks and the
//!   command-line `verify` command.

pub mod ccg;
pub mod fixtures;
pub mod grid;
pub mod solver;
pub mod subproblems;
pub mod uc;
pub mod uncertainty;

pub use ccg::{
    run_approximation, run_ccg, run_copperplate_exact, solve_master, ApproximationOutcome,
    BoundCertificates, CcgConfig, CcgError, CcgState, IterationRecord, RobustSolution,
    SolutionStatus,
};
pub use grid::{
    load_case, load_case_str, save_case, scale_demand_profile, Branch, Bus, Generator, GridCase,
    GridError, LoadShedPrices, PiecewiseCost,
};
pub use solver::{
    Backend, ConstraintSense, ModelHandle, ObjectiveSense, SolveConfig, SolveOutcome, SolveStatus,
    SolverError, VarKind, VarRef,
};
pub use subproblems::{
    brute_force_worst_case, check_theorem2_conditions, solve_sp_feasibility, solve_sp_loadshed,
    solve_sp_optimality, tilde_cost, worst_case_grid_search, BruteForceObjective, DualAux,
    DualSolution, SpError, Theorem2Report, WorstCaseResult,
};
pub use uc::{
    build_first_stage, build_recourse, deterministic_uc, nominal_capacity_profile, solve_recourse,
    solve_recourse_with_objective, CommitmentDecision, CommitmentTerms, FirstStageVars,
    ModelVariant, RecourseDecision, RecourseObjective, RecourseOutcome, RecourseVars, UcError,
};
pub use uncertainty::{
    efficiency_factor, enumerate_binary, is_member, project_into_full, realize, MembershipReport,
    Scenario, SetVariant, UncertaintyError, UncertaintySpec,
};
