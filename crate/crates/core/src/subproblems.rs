//! Worst-case scenario subproblems for a fixed commitment.
//!
//! Each subproblem maximizes, over a binary uncertainty set, the optimal
//! value of the recourse LP. Taking the dual of the recourse turns the
//! max-min into a single maximization whose only nonlinearities are products
//! of scenario binaries with continuous duals:
//!
//! * the temperature binary enters the dispatch rows, because the efficiency
//!   factor multiplying generation is affine in it;
//! * the demand binary enters the objective, because realized demand is
//!   affine in it.
//!
//! Both product families are linearized exactly with big-M pairs; the big-M
//! values start from cost-implied dual bounds and are tightened and re-solved
//! whenever a dual lands on its bound or the subproblem value disagrees with
//! an independent recourse re-solve at the returned scenario.
//!
//! Dual convention (minimize recourse, multipliers on `rhs - lhs <= / = 0`):
//! dispatch rows bound `delta + p (ramp-duals) + p * kappa * sigma <= c`,
//! flow rows satisfy `X xi + sigma_origin - sigma_destination + r+ - r- = 0`,
//! and the objective collects commitment terms plus `D sigma` minus limit
//! terms. Load-shedding variants get an extra dual for the shed upper bound
//! `omega <= D`, derived here because the hard-balance dual has no such row.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridCase, LoadShedPrices, MAX_TEMPERATURE};
use crate::solver::{
    ConstraintSense, ModelHandle, ObjectiveSense, SolveConfig, SolveOutcome, SolveStatus,
    SolverError, VarKind, VarRef,
};
use crate::uc::{
    solve_recourse_with_objective, CommitmentDecision, ModelVariant, RecourseObjective,
    RecourseOutcome, UcError, ANGLE_LIMIT,
};
use crate::uncertainty::{
    is_member, kappa, realize, Scenario, SetVariant, UncertaintyError, UncertaintySpec,
};

/// Shed volumes below this are treated as zero when classifying feasibility.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Required relative agreement between a subproblem value and the recourse
/// re-solved at the returned scenario.
pub const DUAL_CONSISTENCY_TOL: f64 = 1e-5;

const BIG_M_ATTEMPTS: usize = 5;

#[derive(Debug, Error)]
pub enum SpError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Uc(#[from] UcError),
    #[error(transparent)]
    Uncertainty(#[from] UncertaintyError),
    #[error("subproblems require a binary uncertainty set, got {0}")]
    NonBinarySet(&'static str),
    #[error("{op} requires a {need} model variant")]
    WrongModelVariant { op: &'static str, need: &'static str },
    #[error("temperature {0} out of the cost-magnification domain")]
    TemperatureDomain(f64),
    #[error("recourse infeasible at the worst-case scenario; the commitment is not robust over this set")]
    RecourseInfeasibleAtWorstCase,
    #[error("subproblem value {model} disagrees with recourse re-solve {recourse} after big-M tightening")]
    ValueMismatch { model: f64, recourse: f64 },
    #[error("time limit hit with no incumbent scenario")]
    NoIncumbent,
    #[error("unexpected solver status {status:?} while {context}")]
    UnexpectedStatus {
        status: SolveStatus,
        context: &'static str,
    },
}

/// Dual solution in the substituted (hatted) variables: every hatted value is
/// the plain dual scaled by the efficiency factor of its period.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualSolution {
    pub delta: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    /// Balance duals, bus-major; a single row for copperplate variants.
    pub sigma_hat: Vec<Vec<f64>>,
    pub xi_hat: Vec<Vec<f64>>,
    pub r_plus_hat: Vec<Vec<f64>>,
    pub r_minus_hat: Vec<Vec<f64>>,
    pub upsilon_plus_hat: Vec<Vec<f64>>,
    pub upsilon_minus_hat: Vec<Vec<f64>>,
    /// Duals of the shed upper bounds, bus-major; empty for hard balance.
    pub shed_bound_hat: Vec<Vec<f64>>,
}

/// Objective decomposition of a dual solution: `xi` collects the commitment
/// terms, and each period contributes `(gamma * phi + psi) / kappa`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualAux {
    pub xi: f64,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct WorstCaseResult {
    pub value: f64,
    pub scenario: Scenario,
    pub aux: Option<DualAux>,
    pub dual: Option<DualSolution>,
    /// When false the solve hit its time limit and `value` is only a lower
    /// bound on the worst case over the set (the scenario is still a valid
    /// member, so it still yields a valid cut).
    pub proved_optimal: bool,
    /// Total shed at the returned scenario, for shed-objective subproblems.
    pub worst_case_shed: Option<f64>,
    /// Copperplate shed relaxations are exact for the full continuous set
    /// when the worst case sheds nothing.
    pub exact_for_full_set: Option<bool>,
    /// Enumeration oracle only: a scenario with infeasible recourse was hit
    /// (the reported value is then infinite).
    pub encountered_infeasible: bool,
}

impl WorstCaseResult {
    fn new(value: f64, scenario: Scenario) -> Self {
        Self {
            value,
            scenario,
            aux: None,
            dual: None,
            proved_optimal: true,
            worst_case_shed: None,
            exact_for_full_set: None,
            encountered_infeasible: false,
        }
    }
}

/// Cost magnification that turns a binary-set shed bound into a bound valid
/// for the continuous set: the shed price is scaled by the ratio of the
/// efficiency factors at the nominal and the fully deviated temperature.
pub fn tilde_cost(price: f64, a_nominal: f64, a_deviation: f64) -> Result<f64, SpError> {
    let high = a_nominal + a_deviation;
    if high >= MAX_TEMPERATURE {
        return Err(SpError::TemperatureDomain(high));
    }
    Ok(price * kappa(a_nominal) / kappa(high))
}

/// Per-period magnified shed prices for a case.
pub fn magnified_prices(case: &GridCase) -> Result<LoadShedPrices, SpError> {
    let price_per_period = (0..case.horizon)
        .map(|t| {
            tilde_cost(
                case.load_shed_prices.price_per_period[t],
                case.temperature_nominal[t],
                case.temperature_deviation[t],
            )
        })
        .collect::<Result<Vec<f64>, SpError>>()?;
    Ok(LoadShedPrices { price_per_period })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SpKind {
    Feasibility,
    Optimality,
    LoadShed,
}

impl SpKind {
    fn label(self) -> &'static str {
        match self {
            SpKind::Feasibility => "feasibility",
            SpKind::Optimality => "optimality",
            SpKind::LoadShed => "load-shed",
        }
    }
}

/// Worst-case shed volume over the chosen binary set. A strictly positive
/// value certifies that the commitment is infeasible for that set and returns
/// the offending scenario; zero certifies robust feasibility over the set.
pub fn solve_sp_feasibility(
    case: &GridCase,
    commitment: &CommitmentDecision,
    spec: &UncertaintySpec,
    set_variant: SetVariant,
    network: ModelVariant,
    config: &SolveConfig,
) -> Result<WorstCaseResult, SpError> {
    let shed_variant = shed_counterpart(network);
    solve_dual_subproblem(
        case,
        commitment,
        spec,
        set_variant,
        shed_variant,
        SpKind::Feasibility,
        None,
        config,
    )
}

/// Worst-case dispatch cost over the chosen binary set, for hard-balance
/// variants. Callers must have established robust feasibility first.
pub fn solve_sp_optimality(
    case: &GridCase,
    commitment: &CommitmentDecision,
    spec: &UncertaintySpec,
    set_variant: SetVariant,
    network: ModelVariant,
    config: &SolveConfig,
) -> Result<WorstCaseResult, SpError> {
    if network.has_shed() {
        return Err(SpError::WrongModelVariant {
            op: "solve_sp_optimality",
            need: "hard-balance",
        });
    }
    solve_dual_subproblem(
        case,
        commitment,
        spec,
        set_variant,
        network,
        SpKind::Optimality,
        None,
        config,
    )
}

/// Worst-case dispatch-plus-shedding cost over the chosen binary set. With
/// `magnify` the shed prices are scaled per the cost-magnification rule,
/// which makes the value a valid upper bound for the continuous set; raw
/// prices solve the binary-set problem exactly.
#[allow(clippy::too_many_arguments)]
pub fn solve_sp_loadshed(
    case: &GridCase,
    commitment: &CommitmentDecision,
    spec: &UncertaintySpec,
    set_variant: SetVariant,
    network: ModelVariant,
    prices: &LoadShedPrices,
    magnify: bool,
    config: &SolveConfig,
) -> Result<WorstCaseResult, SpError> {
    if !network.has_shed() {
        return Err(SpError::WrongModelVariant {
            op: "solve_sp_loadshed",
            need: "load-shedding",
        });
    }
    let effective = if magnify {
        let price_per_period = (0..case.horizon)
            .map(|t| {
                tilde_cost(
                    prices.price_per_period[t],
                    case.temperature_nominal[t],
                    case.temperature_deviation[t],
                )
            })
            .collect::<Result<Vec<f64>, SpError>>()?;
        LoadShedPrices { price_per_period }
    } else {
        prices.clone()
    };
    let mut result = solve_dual_subproblem(
        case,
        commitment,
        spec,
        set_variant,
        network,
        SpKind::LoadShed,
        Some(&effective),
        config,
    )?;
    if !network.has_network() {
        let exact = result
            .worst_case_shed
            .map(|shed| shed <= FEASIBILITY_TOL)
            .unwrap_or(false);
        result.exact_for_full_set = Some(exact);
    }
    Ok(result)
}

fn shed_counterpart(variant: ModelVariant) -> ModelVariant {
    match variant {
        ModelVariant::Network | ModelVariant::NetworkShed => ModelVariant::NetworkShed,
        ModelVariant::Copperplate | ModelVariant::CopperplateShed => ModelVariant::CopperplateShed,
    }
}

/// Variable layout of one dual subproblem model.
struct SpVars {
    alpha: Vec<VarRef>,
    gamma: Vec<VarRef>,
    delta: Vec<Vec<VarRef>>,
    beta: Vec<Vec<VarRef>>,
    theta: Vec<Vec<VarRef>>,
    /// Balance duals; one row per bus, or a single row for copperplate.
    sigma: Vec<Vec<VarRef>>,
    xi: Vec<Vec<VarRef>>,
    r_plus: Vec<Vec<VarRef>>,
    r_minus: Vec<Vec<VarRef>>,
    upsilon_plus: Vec<Vec<VarRef>>,
    upsilon_minus: Vec<Vec<VarRef>>,
    shed_bound: Vec<Vec<VarRef>>,
    /// Products alpha * sigma and gamma * sigma, same shape as sigma.
    alpha_sigma: Vec<Vec<VarRef>>,
    gamma_sigma: Vec<Vec<VarRef>>,
    /// Products gamma * shed_bound, same shape as shed_bound.
    gamma_shed_bound: Vec<Vec<VarRef>>,
}

struct SpModel {
    model: ModelHandle,
    vars: SpVars,
}

#[allow(clippy::too_many_arguments)]
fn solve_dual_subproblem(
    case: &GridCase,
    commitment: &CommitmentDecision,
    spec: &UncertaintySpec,
    set_variant: SetVariant,
    variant: ModelVariant,
    kind: SpKind,
    prices: Option<&LoadShedPrices>,
    config: &SolveConfig,
) -> Result<WorstCaseResult, SpError> {
    if !set_variant.is_binary() {
        return Err(SpError::NonBinarySet(set_variant.label()));
    }
    let mut big_m = initial_big_m(case, kind, prices);
    let mut last_mismatch = (0.0, 0.0);
    for attempt in 0..BIG_M_ATTEMPTS {
        log::debug!(
            "{} subproblem over {}: big_m = {big_m} (attempt {attempt})",
            kind.label(),
            set_variant.label()
        );
        let sp = build_dual_model(case, commitment, spec, set_variant, variant, kind, prices, big_m);
        let outcome = sp.model.solve(config)?;
        match outcome.status {
            SolveStatus::Optimal => {}
            SolveStatus::TimeLimit => {
                if !outcome.has_solution() {
                    return Err(SpError::NoIncumbent);
                }
                let scenario = extract_scenario(case, &sp.vars, &outcome)?;
                let mut result = WorstCaseResult::new(
                    outcome.objective_value.expect("incumbent has objective"),
                    scenario,
                );
                result.proved_optimal = false;
                return Ok(result);
            }
            status => {
                return Err(SpError::UnexpectedStatus {
                    status,
                    context: "solving worst-case subproblem",
                })
            }
        }
        let value = outcome.objective_value.expect("optimal has objective");
        let scenario = extract_scenario(case, &sp.vars, &outcome)?;

        // Independent check: the recourse at the returned scenario must
        // reproduce the subproblem value.
        let recourse_value =
            recourse_value_at(case, commitment, &scenario, variant, kind, prices, config)?;
        let tol = DUAL_CONSISTENCY_TOL * value.abs().max(1.0);
        let clipped = duals_near_big_m(&sp.vars, &outcome, big_m);
        if (value - recourse_value.0).abs() <= tol && !clipped {
            let dual = extract_dual(&sp.vars, &outcome, &scenario);
            let aux = compute_aux(case, variant, commitment, &dual);
            let mut result = WorstCaseResult::new(value, scenario);
            result.aux = Some(aux);
            result.dual = Some(dual);
            result.worst_case_shed = recourse_value.1;
            return Ok(result);
        }
        last_mismatch = (value, recourse_value.0);
        big_m *= 10.0;
    }
    Err(SpError::ValueMismatch {
        model: last_mismatch.0,
        recourse: last_mismatch.1,
    })
}

/// Cost-implied starting bound for the linearized duals: balance duals price
/// energy, so marginal fuel cost plus any shed price bounds them at vertex
/// solutions; a 10x margin covers congestion markups.
fn initial_big_m(case: &GridCase, kind: SpKind, prices: Option<&LoadShedPrices>) -> f64 {
    let fuel = case
        .generators
        .iter()
        .map(|g| g.cost_curve.max_marginal_rate())
        .fold(0.0, f64::max);
    let scale = match kind {
        SpKind::Feasibility => 1.0,
        SpKind::Optimality => fuel,
        SpKind::LoadShed => fuel + prices.map(|p| p.max_price()).unwrap_or(0.0),
    };
    10.0 * (scale + 1.0)
}

fn duals_near_big_m(vars: &SpVars, outcome: &SolveOutcome, big_m: f64) -> bool {
    let threshold = big_m * (1.0 - 1e-6);
    let near = |matrix: &Vec<Vec<VarRef>>| -> bool {
        matrix
            .iter()
            .flatten()
            .any(|&v| outcome.value(v).abs() >= threshold)
    };
    near(&vars.sigma)
        || near(&vars.shed_bound)
        || near(&vars.alpha_sigma)
        || near(&vars.gamma_sigma)
        || near(&vars.gamma_shed_bound)
}

fn extract_scenario(
    case: &GridCase,
    vars: &SpVars,
    outcome: &SolveOutcome,
) -> Result<Scenario, SpError> {
    let round = |v: f64| if v >= 0.5 { 1.0 } else { 0.0 };
    let alpha: Vec<f64> = vars.alpha.iter().map(|&v| round(outcome.value(v))).collect();
    let gamma: Vec<f64> = vars.gamma.iter().map(|&v| round(outcome.value(v))).collect();
    Ok(realize(case, &alpha, &gamma)?)
}

/// Solves the recourse at a fixed scenario with the objective matching the
/// subproblem kind. Returns (value, total shed if applicable).
fn recourse_value_at(
    case: &GridCase,
    commitment: &CommitmentDecision,
    scenario: &Scenario,
    variant: ModelVariant,
    kind: SpKind,
    prices: Option<&LoadShedPrices>,
    config: &SolveConfig,
) -> Result<(f64, Option<f64>), SpError> {
    let (objective, effective_prices) = match kind {
        SpKind::Feasibility => (RecourseObjective::ShedVolume, &case.load_shed_prices),
        SpKind::Optimality => (RecourseObjective::Cost, &case.load_shed_prices),
        SpKind::LoadShed => (
            RecourseObjective::Cost,
            prices.expect("load-shed subproblem carries prices"),
        ),
    };
    let outcome = solve_recourse_with_objective(
        case,
        commitment,
        scenario,
        variant,
        effective_prices,
        objective,
        config,
    )?;
    match outcome {
        RecourseOutcome::Feasible(d) => match kind {
            SpKind::Feasibility => Ok((d.total_shed(), Some(d.total_shed()))),
            SpKind::Optimality => Ok((d.objective(), None)),
            SpKind::LoadShed => Ok((d.objective(), Some(d.total_shed()))),
        },
        RecourseOutcome::Infeasible => Err(SpError::RecourseInfeasibleAtWorstCase),
    }
}

/// Builds the monolithic dual MIP.
#[allow(clippy::too_many_arguments)]
fn build_dual_model(
    case: &GridCase,
    commitment: &CommitmentDecision,
    spec: &UncertaintySpec,
    set_variant: SetVariant,
    variant: ModelVariant,
    kind: SpKind,
    prices: Option<&LoadShedPrices>,
    big_m: f64,
) -> SpModel {
    let horizon = case.horizon;
    let num_gens = case.num_generators();
    let num_buses = case.num_buses();
    let num_branches = case.num_branches();
    let network = variant.has_network();
    let shed = variant.has_shed();
    // Hard balance rows are equalities (free dual); the network shed balance
    // is an inequality (nonnegative dual).
    let sigma_nonnegative = shed && network;
    let sigma_rows = if network { num_buses } else { 1 };

    let mut model = ModelHandle::new(ObjectiveSense::Maximize);
    let make =
        |model: &mut ModelHandle, kind: VarKind, lo: f64, hi: f64, obj: f64| -> VarRef {
            model.add_variable(kind, lo, hi, obj).expect("bounds valid")
        };

    let alpha: Vec<VarRef> = (0..horizon)
        .map(|_| make(&mut model, VarKind::Binary, 0.0, 1.0, 0.0))
        .collect();
    let gamma: Vec<VarRef> = (0..horizon)
        .map(|_| make(&mut model, VarKind::Binary, 0.0, 1.0, 0.0))
        .collect();

    // Commitment-term duals, with their objective coefficients taken from the
    // fixed first-stage decision.
    let delta: Vec<Vec<VarRef>> = (0..num_gens)
        .map(|i| {
            (0..horizon)
                .map(|t| {
                    make(
                        &mut model,
                        VarKind::Continuous,
                        f64::NEG_INFINITY,
                        f64::INFINITY,
                        commitment.on_f64(i, t),
                    )
                })
                .collect()
        })
        .collect();
    let beta: Vec<Vec<VarRef>> = case
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            (0..horizon.saturating_sub(1))
                .map(|t| {
                    let coeff = -(commitment.on_f64(i, t) * g.ramp_up
                        + commitment.startup_f64(i, t + 1) * g.startup_rate);
                    make(&mut model, VarKind::Continuous, 0.0, f64::INFINITY, coeff)
                })
                .collect()
        })
        .collect();
    let theta: Vec<Vec<VarRef>> = case
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            (0..horizon.saturating_sub(1))
                .map(|t| {
                    let coeff = -(commitment.on_f64(i, t + 1) * g.ramp_down
                        + commitment.shutdown_f64(i, t + 1) * g.shutdown_rate);
                    make(&mut model, VarKind::Continuous, 0.0, f64::INFINITY, coeff)
                })
                .collect()
        })
        .collect();

    // Balance duals and their scenario products. The nominal demand weights
    // sigma directly; the deviation weights the gamma product.
    let nominal_weight = |row: usize, t: usize| -> f64 {
        if network {
            case.demand_nominal[row][t]
        } else {
            (0..num_buses).map(|n| case.demand_nominal[n][t]).sum()
        }
    };
    let deviation_weight = |row: usize, t: usize| -> f64 {
        if network {
            case.demand_deviation[row][t]
        } else {
            (0..num_buses).map(|n| case.demand_deviation[n][t]).sum()
        }
    };
    let sigma_lower = if sigma_nonnegative {
        0.0
    } else {
        f64::NEG_INFINITY
    };
    let sigma: Vec<Vec<VarRef>> = (0..sigma_rows)
        .map(|row| {
            (0..horizon)
                .map(|t| {
                    make(
                        &mut model,
                        VarKind::Continuous,
                        sigma_lower,
                        f64::INFINITY,
                        nominal_weight(row, t),
                    )
                })
                .collect()
        })
        .collect();
    let alpha_sigma: Vec<Vec<VarRef>> = (0..sigma_rows)
        .map(|_| {
            (0..horizon)
                .map(|_| {
                    make(
                        &mut model,
                        VarKind::Continuous,
                        f64::NEG_INFINITY,
                        f64::INFINITY,
                        0.0,
                    )
                })
                .collect()
        })
        .collect();
    let gamma_sigma: Vec<Vec<VarRef>> = (0..sigma_rows)
        .map(|row| {
            (0..horizon)
                .map(|t| {
                    make(
                        &mut model,
                        VarKind::Continuous,
                        f64::NEG_INFINITY,
                        f64::INFINITY,
                        deviation_weight(row, t),
                    )
                })
                .collect()
        })
        .collect();

    // Network limit duals.
    let (xi, r_plus, r_minus, upsilon_plus, upsilon_minus) = if network {
        let xi: Vec<Vec<VarRef>> = (0..num_branches)
            .map(|_| {
                (0..horizon)
                    .map(|_| {
                        make(
                            &mut model,
                            VarKind::Continuous,
                            f64::NEG_INFINITY,
                            f64::INFINITY,
                            0.0,
                        )
                    })
                    .collect()
            })
            .collect();
        let limit_dual = |model: &mut ModelHandle, weight: f64| -> VarRef {
            make(model, VarKind::Continuous, 0.0, f64::INFINITY, -weight)
        };
        let r_plus: Vec<Vec<VarRef>> = case
            .branches
            .iter()
            .map(|b| (0..horizon).map(|_| limit_dual(&mut model, b.flow_limit)).collect())
            .collect();
        let r_minus: Vec<Vec<VarRef>> = case
            .branches
            .iter()
            .map(|b| (0..horizon).map(|_| limit_dual(&mut model, b.flow_limit)).collect())
            .collect();
        let upsilon_plus: Vec<Vec<VarRef>> = (0..num_buses)
            .map(|_| (0..horizon).map(|_| limit_dual(&mut model, ANGLE_LIMIT)).collect())
            .collect();
        let upsilon_minus: Vec<Vec<VarRef>> = (0..num_buses)
            .map(|_| (0..horizon).map(|_| limit_dual(&mut model, ANGLE_LIMIT)).collect())
            .collect();
        (xi, r_plus, r_minus, upsilon_plus, upsilon_minus)
    } else {
        (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new())
    };

    // Shed-bound duals and their gamma products.
    let (shed_bound, gamma_shed_bound) = if shed {
        let psi: Vec<Vec<VarRef>> = (0..num_buses)
            .map(|n| {
                (0..horizon)
                    .map(|t| {
                        make(
                            &mut model,
                            VarKind::Continuous,
                            0.0,
                            f64::INFINITY,
                            -case.demand_nominal[n][t],
                        )
                    })
                    .collect()
            })
            .collect();
        let q: Vec<Vec<VarRef>> = (0..num_buses)
            .map(|n| {
                (0..horizon)
                    .map(|t| {
                        make(
                            &mut model,
                            VarKind::Continuous,
                            f64::NEG_INFINITY,
                            f64::INFINITY,
                            -case.demand_deviation[n][t],
                        )
                    })
                    .collect()
            })
            .collect();
        (psi, q)
    } else {
        (Vec::new(), Vec::new())
    };

    // Uncertainty-set rows: budgets, binary linking when required.
    let alpha_terms: Vec<(VarRef, f64)> = alpha.iter().map(|&a| (a, 1.0)).collect();
    model
        .add_constraint(
            &alpha_terms,
            ConstraintSense::LessEqual,
            spec.budget_temperature as f64,
        )
        .expect("valid refs");
    let gamma_terms: Vec<(VarRef, f64)> = gamma.iter().map(|&g| (g, 1.0)).collect();
    model
        .add_constraint(
            &gamma_terms,
            ConstraintSense::LessEqual,
            spec.budget_demand as f64,
        )
        .expect("valid refs");
    if set_variant.has_linking() {
        for t in 0..horizon.saturating_sub(spec.lag) {
            let mut terms: Vec<(VarRef, f64)> =
                (t..=t + spec.lag).map(|tau| (gamma[tau], 1.0)).collect();
            terms.push((alpha[t], -1.0));
            model
                .add_constraint(&terms, ConstraintSense::GreaterEqual, 0.0)
                .expect("valid refs");
        }
    }

    // Dispatch rows: for each generator, period and breakpoint,
    //   delta + p * (ramp-dual stencil) + p * kappa(alpha) * sigma <= cost,
    // with kappa(alpha) * sigma expanded as base * sigma - slope * (alpha sigma).
    for (i, g) in case.generators.iter().enumerate() {
        let row = if network { case.generators[i].bus } else { 0 };
        for t in 0..horizon {
            let base = kappa(case.temperature_nominal[t]);
            let slope = case.temperature_deviation[t] / 300.0;
            for &(p, cost) in &g.cost_curve.breakpoints {
                let rhs = match kind {
                    SpKind::Feasibility => 0.0,
                    _ => cost,
                };
                let mut terms: Vec<(VarRef, f64)> = vec![(delta[i][t], 1.0)];
                if t + 1 < horizon {
                    terms.push((beta[i][t], p));
                    terms.push((theta[i][t], -p));
                }
                if t > 0 {
                    terms.push((beta[i][t - 1], -p));
                    terms.push((theta[i][t - 1], p));
                }
                terms.push((sigma[row][t], p * base));
                terms.push((alpha_sigma[row][t], -p * slope));
                model
                    .add_constraint(&terms, ConstraintSense::LessEqual, rhs)
                    .expect("valid refs");
            }
        }
    }

    if network {
        // Flow rows and angle rows.
        for (l, branch) in case.branches.iter().enumerate() {
            for t in 0..horizon {
                model
                    .add_constraint(
                        &[
                            (xi[l][t], branch.reactance),
                            (sigma[branch.origin_bus][t], 1.0),
                            (sigma[branch.destination_bus][t], -1.0),
                            (r_plus[l][t], 1.0),
                            (r_minus[l][t], -1.0),
                        ],
                        ConstraintSense::Equal,
                        0.0,
                    )
                    .expect("valid refs");
            }
        }
        for (n, bus) in case.buses.iter().enumerate() {
            for t in 0..horizon {
                let mut terms: Vec<(VarRef, f64)> = Vec::new();
                for &l in &bus.outgoing_branch_ids {
                    terms.push((xi[l][t], -1.0));
                }
                for &l in &bus.incoming_branch_ids {
                    terms.push((xi[l][t], 1.0));
                }
                terms.push((upsilon_plus[n][t], 1.0));
                terms.push((upsilon_minus[n][t], -1.0));
                model
                    .add_constraint(&terms, ConstraintSense::Equal, 0.0)
                    .expect("valid refs");
            }
        }
    }

    if shed {
        // Shed rows: price - sigma + psi >= 0.
        let price_at = |t: usize| -> f64 {
            match kind {
                SpKind::Feasibility => 1.0,
                _ => prices.expect("load-shed carries prices").price_per_period[t],
            }
        };
        for n in 0..num_buses {
            let row = if network { n } else { 0 };
            for t in 0..horizon {
                model
                    .add_constraint(
                        &[(sigma[row][t], 1.0), (shed_bound[n][t], -1.0)],
                        ConstraintSense::LessEqual,
                        price_at(t),
                    )
                    .expect("valid refs");
            }
        }
    }

    // Exact big-M linearizations of binary-times-continuous products.
    let linearize = |model: &mut ModelHandle, product: VarRef, binary: VarRef, value: VarRef, nonneg: bool| {
        model
            .add_constraint(
                &[(product, 1.0), (binary, -big_m)],
                ConstraintSense::LessEqual,
                0.0,
            )
            .expect("valid refs");
        if nonneg {
            model
                .add_constraint(&[(product, 1.0)], ConstraintSense::GreaterEqual, 0.0)
                .expect("valid refs");
            model
                .add_constraint(
                    &[(product, 1.0), (value, -1.0)],
                    ConstraintSense::LessEqual,
                    0.0,
                )
                .expect("valid refs");
        } else {
            model
                .add_constraint(
                    &[(product, 1.0), (binary, big_m)],
                    ConstraintSense::GreaterEqual,
                    0.0,
                )
                .expect("valid refs");
            model
                .add_constraint(
                    &[(product, 1.0), (value, -1.0), (binary, big_m)],
                    ConstraintSense::LessEqual,
                    big_m,
                )
                .expect("valid refs");
        }
        model
            .add_constraint(
                &[(product, 1.0), (value, -1.0), (binary, -big_m)],
                ConstraintSense::GreaterEqual,
                -big_m,
            )
            .expect("valid refs");
    };
    for row in 0..sigma_rows {
        for t in 0..horizon {
            linearize(
                &mut model,
                alpha_sigma[row][t],
                alpha[t],
                sigma[row][t],
                sigma_nonnegative,
            );
            linearize(
                &mut model,
                gamma_sigma[row][t],
                gamma[t],
                sigma[row][t],
                sigma_nonnegative,
            );
        }
    }
    for n in 0..shed_bound.len() {
        for t in 0..horizon {
            linearize(
                &mut model,
                gamma_shed_bound[n][t],
                gamma[t],
                shed_bound[n][t],
                true,
            );
        }
    }

    SpModel {
        model,
        vars: SpVars {
            alpha,
            gamma,
            delta,
            beta,
            theta,
            sigma,
            xi,
            r_plus,
            r_minus,
            upsilon_plus,
            upsilon_minus,
            shed_bound,
            alpha_sigma,
            gamma_sigma,
            gamma_shed_bound,
        },
    }
}

fn extract_dual(
    vars: &SpVars,
    outcome: &SolveOutcome,
    scenario: &Scenario,
) -> DualSolution {
    let plain = |m: &Vec<Vec<VarRef>>| -> Vec<Vec<f64>> {
        m.iter()
            .map(|row| row.iter().map(|&v| outcome.value(v)).collect())
            .collect()
    };
    // Hatted values carry the efficiency factor of the realized temperature.
    let hatted = |m: &Vec<Vec<VarRef>>| -> Vec<Vec<f64>> {
        m.iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(t, &v)| outcome.value(v) * kappa(scenario.temperature[t]))
                    .collect()
            })
            .collect()
    };
    DualSolution {
        delta: plain(&vars.delta),
        beta: plain(&vars.beta),
        theta: plain(&vars.theta),
        sigma_hat: hatted(&vars.sigma),
        xi_hat: hatted(&vars.xi),
        r_plus_hat: hatted(&vars.r_plus),
        r_minus_hat: hatted(&vars.r_minus),
        upsilon_plus_hat: hatted(&vars.upsilon_plus),
        upsilon_minus_hat: hatted(&vars.upsilon_minus),
        shed_bound_hat: hatted(&vars.shed_bound),
    }
}

/// Reassembles the commitment term and the per-period objective coefficients
/// from a hatted dual solution.
fn compute_aux(
    case: &GridCase,
    variant: ModelVariant,
    commitment: &CommitmentDecision,
    dual: &DualSolution,
) -> DualAux {
    let horizon = case.horizon;
    let network = variant.has_network();
    let mut xi = 0.0;
    for (i, g) in case.generators.iter().enumerate() {
        for t in 0..horizon {
            xi += commitment.on_f64(i, t) * dual.delta[i][t];
        }
        for t in 0..horizon.saturating_sub(1) {
            xi -= (commitment.on_f64(i, t) * g.ramp_up
                + commitment.startup_f64(i, t + 1) * g.startup_rate)
                * dual.beta[i][t];
            xi -= (commitment.on_f64(i, t + 1) * g.ramp_down
                + commitment.shutdown_f64(i, t + 1) * g.shutdown_rate)
                * dual.theta[i][t];
        }
    }
    let mut phi = vec![0.0; horizon];
    let mut psi = vec![0.0; horizon];
    for t in 0..horizon {
        for n in 0..case.num_buses() {
            let sigma_hat = if network {
                dual.sigma_hat[n][t]
            } else {
                dual.sigma_hat[0][t]
            };
            let shed_hat = dual
                .shed_bound_hat
                .get(n)
                .map(|row| row[t])
                .unwrap_or(0.0);
            phi[t] += case.demand_deviation[n][t] * (sigma_hat - shed_hat);
            psi[t] += case.demand_nominal[n][t] * (sigma_hat - shed_hat);
        }
        if network {
            for l in 0..case.num_branches() {
                psi[t] -=
                    case.branches[l].flow_limit * (dual.r_plus_hat[l][t] + dual.r_minus_hat[l][t]);
            }
            for n in 0..case.num_buses() {
                psi[t] -= ANGLE_LIMIT
                    * (dual.upsilon_plus_hat[n][t] + dual.upsilon_minus_hat[n][t]);
            }
        }
    }
    DualAux { xi, phi, psi }
}

/// Objectives the enumeration oracle can maximize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BruteForceObjective {
    /// Dispatch fuel cost on a hard-balance variant; infeasible recourse
    /// counts as infinite.
    Fuel,
    /// Total shed volume on the shed-augmented variant.
    ShedVolume,
    /// Fuel plus shed cost on a shed variant.
    FuelPlusShed,
}

/// Enumerates every scenario of the binary set and evaluates the recourse at
/// each, returning the maximizer. Ties keep the first maximizer, which is the
/// lexicographically smallest `(alpha, gamma)` because enumeration is
/// lexicographic. This is the verification oracle for the dual subproblems.
#[allow(clippy::too_many_arguments)]
pub fn brute_force_worst_case(
    case: &GridCase,
    commitment: &CommitmentDecision,
    spec: &UncertaintySpec,
    set_variant: SetVariant,
    network: ModelVariant,
    prices: &LoadShedPrices,
    objective: BruteForceObjective,
    config: &SolveConfig,
) -> Result<WorstCaseResult, SpError> {
    let variant = match objective {
        BruteForceObjective::Fuel => {
            if network.has_shed() {
                return Err(SpError::WrongModelVariant {
                    op: "brute_force_worst_case(fuel)",
                    need: "hard-balance",
                });
            }
            network
        }
        BruteForceObjective::ShedVolume => shed_counterpart(network),
        BruteForceObjective::FuelPlusShed => {
            if !network.has_shed() {
                return Err(SpError::WrongModelVariant {
                    op: "brute_force_worst_case(fuel+shed)",
                    need: "load-shedding",
                });
            }
            network
        }
    };
    let recourse_objective = match objective {
        BruteForceObjective::ShedVolume => RecourseObjective::ShedVolume,
        _ => RecourseObjective::Cost,
    };
    let mut best: Option<WorstCaseResult> = None;
    for scenario in crate::uncertainty::enumerate_binary(case, spec, set_variant, false)? {
        let solved = solve_recourse_with_objective(
            case,
            commitment,
            &scenario,
            variant,
            prices,
            recourse_objective,
            config,
        )?;
        let (value, shed) = match solved {
            RecourseOutcome::Feasible(d) => match objective {
                BruteForceObjective::Fuel => (d.objective(), None),
                BruteForceObjective::ShedVolume => (d.total_shed(), Some(d.total_shed())),
                BruteForceObjective::FuelPlusShed => (d.objective(), Some(d.total_shed())),
            },
            RecourseOutcome::Infeasible => {
                let mut result = WorstCaseResult::new(f64::INFINITY, scenario);
                result.encountered_infeasible = true;
                return Ok(result);
            }
        };
        let better = best.as_ref().map(|b| value > b.value).unwrap_or(true);
        if better {
            let mut result = WorstCaseResult::new(value, scenario);
            result.worst_case_shed = shed;
            best = Some(result);
        }
    }
    best.ok_or(SpError::NoIncumbent)
}

/// Grid-search oracle over the full continuous set: evaluates the recourse on
/// every fractional `(alpha, gamma)` lattice point that belongs to the set.
/// Only meant for tiny horizons.
#[allow(clippy::too_many_arguments)]
pub fn worst_case_grid_search(
    case: &GridCase,
    commitment: &CommitmentDecision,
    spec: &UncertaintySpec,
    grid_step: f64,
    network: ModelVariant,
    prices: &LoadShedPrices,
    objective: BruteForceObjective,
    config: &SolveConfig,
) -> Result<WorstCaseResult, SpError> {
    assert!(grid_step > 0.0 && grid_step <= 1.0);
    let levels = (1.0 / grid_step).round() as usize + 1;
    let horizon = case.horizon;
    if horizon > 8 {
        return Err(SpError::Uncertainty(UncertaintyError::HorizonTooLarge {
            horizon,
        }));
    }
    let variant = match objective {
        BruteForceObjective::ShedVolume => shed_counterpart(network),
        _ => network,
    };
    let recourse_objective = match objective {
        BruteForceObjective::ShedVolume => RecourseObjective::ShedVolume,
        _ => RecourseObjective::Cost,
    };
    let mut best: Option<WorstCaseResult> = None;
    let total = levels.pow(2 * horizon as u32);
    let mut digits = vec![0usize; 2 * horizon];
    for counter in 0..total {
        let mut rem = counter;
        for digit in digits.iter_mut() {
            *digit = rem % levels;
            rem /= levels;
        }
        let alpha: Vec<f64> = (0..horizon).map(|t| digits[t] as f64 * grid_step).collect();
        let gamma: Vec<f64> = (0..horizon)
            .map(|t| digits[horizon + t] as f64 * grid_step)
            .collect();
        let scenario = realize(case, &alpha, &gamma)?;
        if !is_member(spec, &scenario, SetVariant::Full).is_member {
            continue;
        }
        let solved = solve_recourse_with_objective(
            case,
            commitment,
            &scenario,
            variant,
            prices,
            recourse_objective,
            config,
        )?;
        let value = match solved {
            RecourseOutcome::Feasible(d) => match objective {
                BruteForceObjective::Fuel | BruteForceObjective::FuelPlusShed => d.objective(),
                BruteForceObjective::ShedVolume => d.total_shed(),
            },
            RecourseOutcome::Infeasible => {
                let mut result = WorstCaseResult::new(f64::INFINITY, scenario);
                result.encountered_infeasible = true;
                return Ok(result);
            }
        };
        let better = best.as_ref().map(|b| value > b.value).unwrap_or(true);
        if better {
            best = Some(WorstCaseResult::new(value, scenario));
        }
    }
    best.ok_or(SpError::NoIncumbent)
}

/// Outcome of checking the sufficient conditions under which the copperplate
/// worst case may restrict attention to binary scenarios.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Theorem2Report {
    pub holds: bool,
    pub violations: Vec<String>,
}

/// Checks the three sufficient conditions: (i) any fully deviated temperature
/// reaches every nominal temperature, (ii) the relative demand deviation is
/// one constant across buses and periods, (iii) the temperature deviation is
/// one constant across periods.
pub fn check_theorem2_conditions(case: &GridCase) -> Theorem2Report {
    let mut violations = Vec::new();
    let min_high = (0..case.horizon)
        .map(|t| case.temperature_nominal[t] + case.temperature_deviation[t])
        .fold(f64::INFINITY, f64::min);
    let max_nominal = case
        .temperature_nominal
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if min_high < max_nominal - 1e-9 {
        violations.push(format!(
            "condition (i): some deviated temperature {min_high} stays below the \
             highest nominal temperature {max_nominal}"
        ));
    }
    let mut ratio: Option<f64> = None;
    'outer: for n in 0..case.num_buses() {
        for t in 0..case.horizon {
            let nominal = case.demand_nominal[n][t];
            if nominal == 0.0 {
                violations.push(format!(
                    "condition (ii): indeterminate, demand_nominal[{n}][{t}] is zero"
                ));
                break 'outer;
            }
            let r = case.demand_deviation[n][t] / nominal;
            match ratio {
                None => ratio = Some(r),
                Some(r0) if (r - r0).abs() > 1e-9 * r0.abs().max(1.0) => {
                    violations.push(format!(
                        "condition (ii): relative demand deviation varies ({r0} vs {r} at bus {n}, period {t})"
                    ));
                    break 'outer;
                }
                _ => {}
            }
        }
    }
    let d0 = case.temperature_deviation[0];
    for t in 1..case.horizon {
        if (case.temperature_deviation[t] - d0).abs() > 1e-9 * d0.abs().max(1.0) {
            violations.push(format!(
                "condition (iii): temperature deviation varies ({d0} vs {} at period {t})",
                case.temperature_deviation[t]
            ));
            break;
        }
    }
    Theorem2Report {
        holds: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::uc::ModelVariant::{Copperplate, CopperplateShed, Network, NetworkShed};

    fn config() -> SolveConfig {
        SolveConfig::default()
    }

    #[test]
    fn tilde_cost_reference_values() {
        let c = tilde_cost(100.0, 60.0, 20.0).unwrap();
        assert!((c - 100.0 / 0.9333333333333333).abs() < 1e-9);
        assert!((c / 100.0 - 1.0714285714285714).abs() < 1e-12);
        assert_eq!(tilde_cost(75.0, 88.0, 0.0).unwrap(), 75.0);
        assert_eq!(tilde_cost(0.0, 60.0, 120.0).unwrap(), 0.0);
        assert!(tilde_cost(10.0, 350.0, 20.0).is_err());
    }

    #[test]
    fn feasibility_zero_on_ample_capacity() {
        let f = &fixtures::micro_fixtures()[0];
        let commitment = CommitmentDecision::all_on(&f.case);
        let result = solve_sp_feasibility(
            &f.case,
            &commitment,
            &f.spec(),
            SetVariant::RelaxedBinary,
            Network,
            &config(),
        )
        .unwrap();
        assert!(result.value.abs() <= FEASIBILITY_TOL);
    }

    #[test]
    fn feasibility_positive_when_capacity_short() {
        // Shrink the single unit so the hot, demand-bumped scenario cannot be
        // served: capacity 66 at factor 0.9 delivers 59.4 < 63.
        let mut case = fixtures::single_bus_two_period();
        case.generators[0].cost_curve =
            crate::grid::PiecewiseCost::new(vec![(0.0, 0.0), (66.0, 800.0)]);
        case.generators[0].ramp_up = 66.0;
        case.generators[0].ramp_down = 66.0;
        case.generators[0].startup_rate = 66.0;
        case.generators[0].shutdown_rate = 66.0;
        let spec = UncertaintySpec::new(&case, 1, 1, 0).unwrap();
        let commitment = CommitmentDecision::all_on(&case);
        let result = solve_sp_feasibility(
            &case,
            &commitment,
            &spec,
            SetVariant::RelaxedBinary,
            Network,
            &config(),
        )
        .unwrap();
        assert!(result.value > FEASIBILITY_TOL, "value {}", result.value);
        // The maximizing scenario heats the period it also bumps.
        assert_eq!(result.scenario.alpha.iter().sum::<f64>(), 1.0);
        let oracle = brute_force_worst_case(
            &case,
            &commitment,
            &spec,
            SetVariant::RelaxedBinary,
            Network,
            &case.load_shed_prices,
            BruteForceObjective::ShedVolume,
            &config(),
        )
        .unwrap();
        assert!((result.value - oracle.value).abs() <= 1e-6 * oracle.value.max(1.0));
    }

    #[test]
    fn zero_budgets_reduce_to_nominal_recourse() {
        let case = fixtures::copperplate_pair();
        let spec = UncertaintySpec::new(&case, 0, 0, 0).unwrap();
        let commitment = CommitmentDecision::all_on(&case);
        let sp = solve_sp_optimality(
            &case,
            &commitment,
            &spec,
            SetVariant::RelaxedBinary,
            Copperplate,
            &config(),
        )
        .unwrap();
        let nominal = Scenario::nominal(&case);
        let recourse = crate::uc::solve_recourse(
            &case,
            &commitment,
            &nominal,
            Copperplate,
            &case.load_shed_prices,
            &config(),
        )
        .unwrap()
        .expect_feasible();
        assert!((sp.value - recourse.objective()).abs() <= 1e-6 * recourse.objective().max(1.0));
    }

    #[test]
    fn optimality_matches_oracle_on_micro_fixture() {
        let f = &fixtures::micro_fixtures()[1];
        let commitment = CommitmentDecision::all_on(&f.case);
        let sp = solve_sp_optimality(
            &f.case,
            &commitment,
            &f.spec(),
            SetVariant::RelaxedBinary,
            Network,
            &config(),
        )
        .unwrap();
        let oracle = brute_force_worst_case(
            &f.case,
            &commitment,
            &f.spec(),
            SetVariant::RelaxedBinary,
            Network,
            &f.case.load_shed_prices,
            BruteForceObjective::Fuel,
            &config(),
        )
        .unwrap();
        assert!(
            (sp.value - oracle.value).abs() <= 1e-6 * oracle.value.abs().max(1.0),
            "sp {} vs oracle {}",
            sp.value,
            oracle.value
        );
    }

    #[test]
    fn bigger_demand_budget_cannot_hurt_the_adversary() {
        let case = fixtures::copperplate_trio_t3();
        let commitment = CommitmentDecision::all_on(&case);
        let mut last = f64::NEG_INFINITY;
        for gd in 0..=2u32 {
            let spec = UncertaintySpec::new(&case, 1, gd, 0).unwrap();
            let sp = solve_sp_optimality(
                &case,
                &commitment,
                &spec,
                SetVariant::RelaxedBinary,
                Copperplate,
                &config(),
            )
            .unwrap();
            assert!(sp.value >= last - 1e-7);
            last = sp.value;
        }
    }

    #[test]
    fn loadshed_with_huge_prices_matches_optimality() {
        let case = fixtures::copperplate_pair();
        let spec = UncertaintySpec::new(&case, 1, 1, 0).unwrap();
        let commitment = CommitmentDecision::all_on(&case);
        let huge = LoadShedPrices::uniform(1e6, case.horizon);
        let shedful = solve_sp_loadshed(
            &case,
            &commitment,
            &spec,
            SetVariant::RelaxedBinary,
            CopperplateShed,
            &huge,
            true,
            &config(),
        )
        .unwrap();
        let hard = solve_sp_optimality(
            &case,
            &commitment,
            &spec,
            SetVariant::RelaxedBinary,
            Copperplate,
            &config(),
        )
        .unwrap();
        assert_eq!(shedful.exact_for_full_set, Some(true));
        assert!((shedful.value - hard.value).abs() <= 1e-5 * hard.value.max(1.0));
    }

    #[test]
    fn loadshed_matches_magnified_oracle() {
        let case = fixtures::two_bus_congested();
        let spec = UncertaintySpec::new(&case, 1, 1, 0).unwrap();
        let commitment = CommitmentDecision::all_on(&case);
        let sp = solve_sp_loadshed(
            &case,
            &commitment,
            &spec,
            SetVariant::RelaxedBinary,
            NetworkShed,
            &case.load_shed_prices,
            true,
            &config(),
        )
        .unwrap();
        let magnified = magnified_prices(&case).unwrap();
        let oracle = brute_force_worst_case(
            &case,
            &commitment,
            &spec,
            SetVariant::RelaxedBinary,
            NetworkShed,
            &magnified,
            BruteForceObjective::FuelPlusShed,
            &config(),
        )
        .unwrap();
        assert!(
            (sp.value - oracle.value).abs() <= 1e-6 * oracle.value.abs().max(1.0),
            "sp {} vs oracle {}",
            sp.value,
            oracle.value
        );
        assert!(sp.worst_case_shed.unwrap() > 0.0);
    }

    #[test]
    fn appendix_identity_reconstructs_objective() {
        let f = &fixtures::micro_fixtures()[4]; // two buses, wide line
        let commitment = CommitmentDecision::all_on(&f.case);
        let sp = solve_sp_optimality(
            &f.case,
            &commitment,
            &f.spec(),
            SetVariant::RelaxedBinary,
            Network,
            &config(),
        )
        .unwrap();
        let aux = sp.aux.as_ref().unwrap();
        let mut reconstructed = aux.xi;
        for t in 0..f.case.horizon {
            let factor = kappa(sp.scenario.temperature[t]);
            reconstructed += (sp.scenario.gamma[t] * aux.phi[t] + aux.psi[t]) / factor;
        }
        assert!(
            (reconstructed - sp.value).abs() <= 1e-6 * sp.value.abs().max(1.0),
            "reconstructed {reconstructed} vs value {}",
            sp.value
        );
    }

    #[test]
    fn theorem2_checker_reference_cases() {
        let good = fixtures::copperplate_pair();
        assert!(check_theorem2_conditions(&good).holds);

        let bad_dev = fixtures::copperplate_nonconforming();
        let report = check_theorem2_conditions(&bad_dev);
        assert!(!report.holds);
        assert!(report.violations.iter().any(|v| v.contains("(iii)")));

        let mut bad_span = fixtures::copperplate_pair();
        bad_span.temperature_nominal = vec![60.0, 90.0];
        let report = check_theorem2_conditions(&bad_span);
        assert!(!report.holds);
        assert!(report.violations.iter().any(|v| v.contains("(i)")));

        let mut zero_demand = fixtures::copperplate_pair();
        zero_demand.demand_nominal[0][1] = 0.0;
        zero_demand.demand_deviation[0][1] = 0.0;
        let report = check_theorem2_conditions(&zero_demand);
        assert!(!report.holds);
        assert!(report.violations.iter().any(|v| v.contains("indeterminate")));
    }

    #[test]
    fn binary_worst_case_not_beaten_by_grid_on_conforming_case() {
        let case = fixtures::copperplate_pair();
        let spec = UncertaintySpec::new(&case, 1, 1, 1).unwrap();
        let commitment = CommitmentDecision::all_on(&case);
        assert!(check_theorem2_conditions(&case).holds);
        let binary = brute_force_worst_case(
            &case,
            &commitment,
            &spec,
            SetVariant::BinaryLinked,
            Copperplate,
            &case.load_shed_prices,
            BruteForceObjective::Fuel,
            &config(),
        )
        .unwrap();
        let grid = worst_case_grid_search(
            &case,
            &commitment,
            &spec,
            0.25,
            Copperplate,
            &case.load_shed_prices,
            BruteForceObjective::Fuel,
            &config(),
        )
        .unwrap();
        assert!(
            (binary.value - grid.value).abs() <= 1e-6 * binary.value.abs().max(1.0),
            "binary {} vs grid {}",
            binary.value,
            grid.value
        );
    }
}
