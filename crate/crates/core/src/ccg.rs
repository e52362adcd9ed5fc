//! Column-and-constraint generation for the two-stage robust problem.
//!
//! The master problem restricts the uncertainty set to a finite scenario pool
//! and is therefore a lower bound; each iteration asks a worst-case
//! subproblem for the scenario that hurts the current commitment most, adds
//! it to the pool (a new recourse copy plus an epigraph cut), and repeats
//! until the bounds close. The first-stage feasible set is finite, so a
//! repeated commitment certifies that no further progress is possible.
//!
//! Two regimes share the driver:
//!
//! * exact mode — the subproblems optimize over the same binary set the
//!   master targets, so bounds converge and a repeated commitment implies the
//!   gap is already within tolerance;
//! * bounding mode (shed variants) — subproblems use magnified shed prices so
//!   their value upper-bounds the full continuous set, and scenarios are
//!   projected back into the full set before pooling. Bounds then certify a
//!   quality gap rather than converge to it.

use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridCase, LoadShedPrices};
use crate::solver::{
    ConstraintSense, ModelHandle, ObjectiveSense, SolveConfig, SolveStatus, SolverError, VarKind,
    VarRef,
};
use crate::subproblems::{
    check_theorem2_conditions, solve_sp_feasibility, solve_sp_loadshed, solve_sp_optimality,
    SpError, FEASIBILITY_TOL,
};
use crate::uc::{
    build_first_stage, build_recourse, CommitmentDecision, CommitmentTerms, ModelVariant,
    RecourseDecision, RecourseObjective, UcError,
};
use crate::uncertainty::{project_into_full, Scenario, SetVariant, UncertaintySpec};

#[derive(Debug, Error)]
pub enum CcgError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Uc(#[from] UcError),
    #[error(transparent)]
    Subproblem(#[from] SpError),
    #[error("master problem infeasible: the robust problem has no feasible commitment for the pooled scenarios")]
    RobustInfeasible,
    #[error("time limit reached before any commitment was produced")]
    TimedOutBeforeFirstSolution,
    #[error("run_copperplate_exact requires a copperplate model variant, got {0}")]
    NotCopperplate(&'static str),
    #[error("subproblem set variant must be binary, got {0}")]
    NonBinarySet(&'static str),
    #[error("unexpected solver status {status:?} while {context}")]
    UnexpectedStatus {
        status: SolveStatus,
        context: &'static str,
    },
}

/// Driver configuration. Defaults: 0.5% relative gap, one hour wall clock,
/// nominal scenario seeded into the initial pool.
#[derive(Debug, Clone)]
pub struct CcgConfig {
    pub epsilon: f64,
    pub time_limit_seconds: f64,
    pub set_variant_for_subproblems: SetVariant,
    pub model_variant: ModelVariant,
    pub seed_nominal_scenario: bool,
    /// Shed variants only: magnify shed prices in the subproblems so their
    /// values bound the full continuous set.
    pub magnify_shed_prices: bool,
    /// Shed variants only: project subproblem scenarios into the full set
    /// before pooling, keeping the master a relaxation of the full-set
    /// problem.
    pub project_scenarios: bool,
    pub solve: SolveConfig,
}

impl CcgConfig {
    pub fn new(model_variant: ModelVariant, set_variant: SetVariant) -> Self {
        Self {
            epsilon: 0.005,
            time_limit_seconds: 3600.0,
            set_variant_for_subproblems: set_variant,
            model_variant,
            seed_nominal_scenario: true,
            magnify_shed_prices: true,
            project_scenarios: true,
            solve: SolveConfig::default(),
        }
    }

    /// Whether the subproblems solve exactly the problem the master bounds.
    fn exact_mode(&self) -> bool {
        !(self.model_variant.has_shed() && self.magnify_shed_prices)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub gap: f64,
    pub subproblem: String,
    pub scenario_id: Option<usize>,
    pub seconds: f64,
}

/// Mutable algorithm state, retained for reporting.
#[derive(Debug, Clone)]
pub struct CcgState {
    pub scenario_pool: Vec<Scenario>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub eta: f64,
    pub incumbent: Option<CommitmentDecision>,
    pub iteration_log: Vec<IterationRecord>,
    /// Shed at the most recent worst case, for exactness classification.
    pub last_worst_case_shed: Option<f64>,
}

impl CcgState {
    fn new() -> Self {
        Self {
            scenario_pool: Vec::new(),
            lower_bound: f64::NEG_INFINITY,
            upper_bound: f64::INFINITY,
            eta: 0.0,
            incumbent: None,
            iteration_log: Vec::new(),
            last_worst_case_shed: None,
        }
    }

    pub fn gap(&self) -> f64 {
        relative_gap(self.lower_bound, self.upper_bound)
    }
}

pub fn relative_gap(lower: f64, upper: f64) -> f64 {
    if !upper.is_finite() || !lower.is_finite() {
        return f64::INFINITY;
    }
    if upper.abs() <= 1e-12 {
        return if lower >= -1e-9 { 0.0 } else { f64::INFINITY };
    }
    ((upper - lower) / upper.abs()).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionStatus {
    Exact,
    Approximate,
    TimedOut,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCertificates {
    pub lb_source: String,
    pub lb: f64,
    pub ub_source: String,
    pub ub: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobustSolution {
    pub commitment: CommitmentDecision,
    pub objective: f64,
    pub bound_certificates: BoundCertificates,
    pub status: SolutionStatus,
    pub worst_case_scenario: Option<Scenario>,
    pub notes: Vec<String>,
}

/// Master solve output: the commitment, its objective (a valid lower bound on
/// the robust optimum over any superset of the pool), the epigraph value and
/// the per-scenario recourse copies.
#[derive(Debug)]
pub struct MasterSolution {
    pub commitment: CommitmentDecision,
    pub objective: f64,
    pub eta: f64,
    pub recourse_copies: Vec<RecourseDecision>,
}

/// Solves the scenario-pool master problem.
pub fn solve_master(
    case: &GridCase,
    pool: &[Scenario],
    model_variant: ModelVariant,
    prices: &LoadShedPrices,
    config: &SolveConfig,
) -> Result<MasterSolution, CcgError> {
    let mut model = ModelHandle::new(ObjectiveSense::Minimize);
    let first = build_first_stage(case, &mut model);
    // Worst-case-cost epigraph; recourse costs are nonnegative, so zero is a
    // valid floor even with an empty pool.
    let eta = model
        .add_variable(VarKind::Continuous, 0.0, f64::INFINITY, 1.0)
        .expect("bounds valid");
    let mut copies = Vec::with_capacity(pool.len());
    for scenario in pool {
        let vars = build_recourse(
            case,
            CommitmentTerms::Vars(&first),
            scenario,
            model_variant,
            prices,
            RecourseObjective::Unpriced,
            &mut model,
        )?;
        let mut cut: Vec<(VarRef, f64)> = vec![(eta, 1.0)];
        for (i, g) in case.generators.iter().enumerate() {
            for t in 0..case.horizon {
                for (k, &(_, cost)) in g.cost_curve.breakpoints.iter().enumerate() {
                    cut.push((vars.breakpoint_weights[i][t][k], -cost));
                }
            }
        }
        for row in &vars.load_shed {
            for (t, &omega) in row.iter().enumerate() {
                cut.push((omega, -prices.price_per_period[t]));
            }
        }
        model
            .add_constraint(&cut, ConstraintSense::GreaterEqual, 0.0)
            .expect("valid refs");
        copies.push(vars);
    }
    let outcome = model.solve(config)?;
    match outcome.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible => return Err(CcgError::RobustInfeasible),
        status => {
            return Err(CcgError::UnexpectedStatus {
                status,
                context: "solving master problem",
            })
        }
    }
    let on_state: Vec<Vec<bool>> = first
        .on_state
        .iter()
        .map(|row| row.iter().map(|&v| outcome.value(v) >= 0.5).collect())
        .collect();
    let commitment = CommitmentDecision::from_on_states(case, on_state)?;
    let recourse_copies = copies
        .iter()
        .map(|vars| RecourseDecision::from_solution(case, vars, &outcome, prices))
        .collect();
    Ok(MasterSolution {
        commitment,
        objective: outcome.objective_value.expect("optimal has objective"),
        eta: outcome.value(eta),
        recourse_copies,
    })
}

fn scenario_key(scenario: &Scenario) -> Vec<u8> {
    scenario
        .alpha
        .iter()
        .chain(scenario.gamma.iter())
        .map(|&v| u8::from(v >= 0.5))
        .collect()
}

fn commitment_key(commitment: &CommitmentDecision) -> Vec<u8> {
    [
        &commitment.on_state,
        &commitment.startup,
        &commitment.shutdown,
    ]
    .iter()
    .flat_map(|m| m.iter().flatten().map(|&b| b as u8))
    .collect()
}

/// Runs the column-and-constraint generation loop.
pub fn run_ccg(
    case: &GridCase,
    spec: &UncertaintySpec,
    config: &CcgConfig,
    prices: &LoadShedPrices,
) -> Result<(RobustSolution, CcgState), CcgError> {
    if !config.set_variant_for_subproblems.is_binary() {
        return Err(CcgError::NonBinarySet(
            config.set_variant_for_subproblems.label(),
        ));
    }
    let started = Instant::now();
    let mut state = CcgState::new();
    let mut seen_scenarios: HashSet<Vec<u8>> = HashSet::new();
    let mut seen_commitments: HashSet<Vec<u8>> = HashSet::new();
    let mut notes: Vec<String> = Vec::new();
    if config.seed_nominal_scenario {
        let nominal = Scenario::nominal(case);
        seen_scenarios.insert(scenario_key(&nominal));
        state.scenario_pool.push(nominal);
    }

    let mut status = SolutionStatus::TimedOut;
    for iteration in 0.. {
        let iter_started = Instant::now();
        let remaining = config.time_limit_seconds - started.elapsed().as_secs_f64();
        if remaining <= 0.0 {
            status = SolutionStatus::TimedOut;
            notes.push(format!("time limit reached after {iteration} iterations"));
            break;
        }
        let mut solve = config.solve.clone();
        solve.time_limit_seconds = solve.time_limit_seconds.min(remaining);

        let master = solve_master(case, &state.scenario_pool, config.model_variant, prices, &solve)?;
        state.lower_bound = state.lower_bound.max(master.objective);
        state.eta = master.eta;
        let repeated_commitment = !seen_commitments.insert(commitment_key(&master.commitment));
        state.incumbent = Some(master.commitment.clone());
        let commitment = master.commitment;

        if repeated_commitment {
            // The first-stage feasible set is finite: a repeated commitment
            // means the bounds cannot move further.
            status = if state.gap() <= config.epsilon {
                SolutionStatus::Exact
            } else {
                SolutionStatus::Approximate
            };
            if config.exact_mode() && status == SolutionStatus::Approximate {
                notes.push(format!(
                    "repeated commitment with open gap {:.3e} in exact mode",
                    state.gap()
                ));
            }
            state.iteration_log.push(IterationRecord {
                iteration,
                lower_bound: state.lower_bound,
                upper_bound: state.upper_bound,
                gap: state.gap(),
                subproblem: "master".into(),
                scenario_id: None,
                seconds: iter_started.elapsed().as_secs_f64(),
            });
            break;
        }

        // Worst-case subproblem for the fresh commitment.
        let first_stage_cost = commitment.first_stage_cost(case);
        let (kind, scenario, value_for_ub) = if config.model_variant.has_shed() {
            let sp = solve_sp_loadshed(
                case,
                &commitment,
                spec,
                config.set_variant_for_subproblems,
                config.model_variant,
                prices,
                config.magnify_shed_prices,
                &solve,
            )?;
            let ub = sp.proved_optimal.then_some(first_stage_cost + sp.value);
            state.last_worst_case_shed = sp.worst_case_shed;
            ("load-shed", sp.scenario, ub)
        } else {
            let spf = solve_sp_feasibility(
                case,
                &commitment,
                spec,
                config.set_variant_for_subproblems,
                config.model_variant,
                &solve,
            )?;
            if spf.value > FEASIBILITY_TOL {
                state.last_worst_case_shed = Some(spf.value);
                ("feasibility", spf.scenario, None)
            } else {
                let spo = solve_sp_optimality(
                    case,
                    &commitment,
                    spec,
                    config.set_variant_for_subproblems,
                    config.model_variant,
                    &solve,
                )?;
                let ub = spo.proved_optimal.then_some(first_stage_cost + spo.value);
                state.last_worst_case_shed = Some(0.0);
                ("optimality", spo.scenario, ub)
            }
        };
        if let Some(ub) = value_for_ub {
            state.upper_bound = state.upper_bound.min(ub);
        }

        // Keep the master a relaxation of the target set: in bounding mode
        // the relaxed-binary scenario may violate the linking constraint and
        // is projected back into the full set before pooling.
        let pooled_scenario = if config.model_variant.has_shed() && config.project_scenarios {
            project_into_full(case, spec, &scenario)
        } else {
            scenario
        };

        let fresh = seen_scenarios.insert(scenario_key(&pooled_scenario));
        let scenario_id = if fresh {
            state.scenario_pool.push(pooled_scenario);
            Some(state.scenario_pool.len() - 1)
        } else {
            None
        };
        let gap = state.gap();
        state.iteration_log.push(IterationRecord {
            iteration,
            lower_bound: state.lower_bound,
            upper_bound: state.upper_bound,
            gap,
            subproblem: kind.into(),
            scenario_id,
            seconds: iter_started.elapsed().as_secs_f64(),
        });
        log::debug!(
            "ccg iteration {iteration}: LB {:.4} UB {:.4} gap {gap:.3e} via {kind}",
            state.lower_bound,
            state.upper_bound
        );

        if gap <= config.epsilon {
            status = SolutionStatus::Exact;
            break;
        }
        if !fresh {
            // The worst case is already pooled, so the master cannot move.
            status = SolutionStatus::Approximate;
            notes.push("worst-case scenario repeated before gap closure".into());
            break;
        }
    }

    let commitment = state
        .incumbent
        .clone()
        .ok_or(CcgError::TimedOutBeforeFirstSolution)?;
    let objective = if state.upper_bound.is_finite() {
        state.upper_bound
    } else {
        state.lower_bound
    };
    let set_label = config.set_variant_for_subproblems.label();
    let solution = RobustSolution {
        commitment,
        objective,
        bound_certificates: BoundCertificates {
            lb_source: format!("master over pooled scenarios ({set_label} subproblems)"),
            lb: state.lower_bound,
            ub_source: format!("commitment cost plus worst case over {set_label}"),
            ub: state.upper_bound,
        },
        status,
        worst_case_scenario: state.scenario_pool.last().cloned(),
        notes,
    };
    Ok((solution, state))
}

/// Outcome of the bound-based approximation scheme.
#[derive(Debug)]
pub struct ApproximationOutcome {
    /// The recommended solution (from the binary-linked run, or from the
    /// relaxed-binary re-run when the first commitment is not certified
    /// feasible).
    pub solution: RobustSolution,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub upper_bound_source: String,
    pub gap: f64,
    pub state_binary: CcgState,
    pub state_relaxed: Option<CcgState>,
}

/// Bound-based approximation for the standard robust problem: solve over the
/// binary-linked set for a lower bound and a candidate commitment, certify it
/// against the relaxed-binary set for an upper bound, and re-solve over the
/// relaxed-binary set only if the candidate is not robust there.
pub fn run_approximation(
    case: &GridCase,
    spec: &UncertaintySpec,
    config: &CcgConfig,
    prices: &LoadShedPrices,
) -> Result<ApproximationOutcome, CcgError> {
    let mut config_binary = config.clone();
    config_binary.set_variant_for_subproblems = SetVariant::BinaryLinked;
    let (solution_binary, state_binary) = run_ccg(case, spec, &config_binary, prices)?;
    let lower_bound = state_binary.lower_bound;

    if config.model_variant.has_shed() {
        // Shed variants already run in bounding mode: their subproblem values
        // are magnified, so the single run carries both certificates.
        let gap = relative_gap(lower_bound, state_binary.upper_bound);
        let upper_bound = state_binary.upper_bound;
        return Ok(ApproximationOutcome {
            solution: solution_binary,
            lower_bound,
            upper_bound,
            upper_bound_source: "magnified worst case over binary-linked set".into(),
            gap,
            state_binary,
            state_relaxed: None,
        });
    }

    let commitment = solution_binary.commitment.clone();
    let spf = solve_sp_feasibility(
        case,
        &commitment,
        spec,
        SetVariant::RelaxedBinary,
        config.model_variant,
        &config.solve,
    )?;
    if spf.value <= FEASIBILITY_TOL {
        let spo = solve_sp_optimality(
            case,
            &commitment,
            spec,
            SetVariant::RelaxedBinary,
            config.model_variant,
            &config.solve,
        )?;
        let upper_bound = commitment.first_stage_cost(case) + spo.value;
        let gap = relative_gap(lower_bound, upper_bound);
        let mut solution = solution_binary;
        solution.bound_certificates.ub = upper_bound;
        solution.bound_certificates.ub_source =
            "worst case over relaxed-binary set at the binary-linked solution".into();
        solution.status = if gap <= config.epsilon {
            SolutionStatus::Exact
        } else {
            SolutionStatus::Approximate
        };
        solution.worst_case_scenario = Some(spo.scenario);
        Ok(ApproximationOutcome {
            solution,
            lower_bound,
            upper_bound,
            upper_bound_source: "worst case over relaxed-binary set".into(),
            gap,
            state_binary,
            state_relaxed: None,
        })
    } else {
        // The binary-set solution is not robust over the relaxed set; the
        // relaxed-binary solve yields a commitment that is, and its value is
        // a valid upper bound.
        let mut config_relaxed = config.clone();
        config_relaxed.set_variant_for_subproblems = SetVariant::RelaxedBinary;
        let (mut solution_relaxed, state_relaxed) = run_ccg(case, spec, &config_relaxed, prices)?;
        let upper_bound = state_relaxed.upper_bound;
        let gap = relative_gap(lower_bound, upper_bound);
        solution_relaxed.bound_certificates.lb = lower_bound;
        solution_relaxed.bound_certificates.lb_source =
            "master over binary-linked subproblem scenarios".into();
        solution_relaxed.status = if gap <= config.epsilon {
            SolutionStatus::Exact
        } else {
            SolutionStatus::Approximate
        };
        solution_relaxed
            .notes
            .push("binary-linked solution failed relaxed-binary feasibility".into());
        Ok(ApproximationOutcome {
            solution: solution_relaxed,
            lower_bound,
            upper_bound,
            upper_bound_source: "robust solve over relaxed-binary set".into(),
            gap,
            state_binary,
            state_relaxed: Some(state_relaxed),
        })
    }
}

/// Copperplate path: when the structural conditions hold, the binary-linked
/// set is not a relaxation but an exact reformulation, so the run is exact;
/// otherwise the result is downgraded to approximate with the violations
/// attached. For the shed variant exactness additionally requires a shed-free
/// worst case.
pub fn run_copperplate_exact(
    case: &GridCase,
    spec: &UncertaintySpec,
    config: &CcgConfig,
    prices: &LoadShedPrices,
) -> Result<(RobustSolution, CcgState), CcgError> {
    if config.model_variant.has_network() {
        return Err(CcgError::NotCopperplate(config.model_variant.label()));
    }
    let report = check_theorem2_conditions(case);
    let mut run_config = config.clone();
    run_config.set_variant_for_subproblems = SetVariant::BinaryLinked;
    let (mut solution, state) = run_ccg(case, spec, &run_config, prices)?;
    if !report.holds {
        if solution.status == SolutionStatus::Exact {
            solution.status = SolutionStatus::Approximate;
        }
        solution.notes.push(
            "binary-set reduction not certified exact; condition check failed".into(),
        );
        solution.notes.extend(report.violations);
    } else if config.model_variant.has_shed() {
        let shed_free = state
            .last_worst_case_shed
            .map(|s| s <= FEASIBILITY_TOL)
            .unwrap_or(false);
        if !shed_free && solution.status == SolutionStatus::Exact {
            solution.status = SolutionStatus::Approximate;
            solution
                .notes
                .push("worst case sheds load, so the magnified bound is not tight".into());
        }
    }
    Ok((solution, state))
}
