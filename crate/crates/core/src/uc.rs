//! Unit-commitment model building: the first-stage commitment polytope, the
//! four recourse variants, fixed-scenario recourse LPs, and the deterministic
//! single-scenario MILP.
//!
//! Commitment decisions are binary on/off states `y` plus startup/shutdown
//! indicators `v`/`w`. In the models `v` and `w` are continuous in `[0, 1]`;
//! the logic constraints force them binary whenever `y` is. The recourse
//! couples nominal generation `x` to the realized temperature through the
//! efficiency factor multiplying generation in the balance constraints —
//! temperature scales what committed capacity can actually deliver.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridCase, LoadShedPrices};
use crate::solver::{
    ConstraintSense, ModelHandle, ObjectiveSense, SolveConfig, SolveOutcome, SolveStatus,
    SolverError, VarKind, VarRef,
};
use crate::uncertainty::{kappa, Scenario};

/// Bound on bus phase angles, radians.
pub const ANGLE_LIMIT: f64 = std::f64::consts::FRAC_PI_3;

/// Numerical consistency required between `x`, the breakpoint weights, and
/// the on/off states in any returned recourse decision.
pub const RECOURSE_CONSISTENCY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum UcError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("no feasible dispatch exists for the given inputs")]
    Infeasible,
    #[error("invalid commitment: {0}")]
    InvalidCommitment(String),
    #[error("{0} requires a load-shedding model variant")]
    ShedVariantRequired(&'static str),
    #[error("unexpected solver status {status:?} while {context}")]
    UnexpectedStatus {
        status: SolveStatus,
        context: &'static str,
    },
}

/// Which recourse feasible set to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelVariant {
    /// DC network, hard balance.
    Network,
    /// DC network, load shedding allowed at a price.
    NetworkShed,
    /// Single system-wide balance per period.
    Copperplate,
    /// System-wide balance with load shedding.
    CopperplateShed,
}

impl ModelVariant {
    pub fn has_network(self) -> bool {
        matches!(self, ModelVariant::Network | ModelVariant::NetworkShed)
    }

    pub fn has_shed(self) -> bool {
        matches!(self, ModelVariant::NetworkShed | ModelVariant::CopperplateShed)
    }

    pub fn label(self) -> &'static str {
        match self {
            ModelVariant::Network => "network",
            ModelVariant::NetworkShed => "network-shed",
            ModelVariant::Copperplate => "copperplate",
            ModelVariant::CopperplateShed => "copperplate-shed",
        }
    }
}

/// First-stage decision: all matrices are generator-major over periods.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitmentDecision {
    pub on_state: Vec<Vec<bool>>,
    pub startup: Vec<Vec<bool>>,
    pub shutdown: Vec<Vec<bool>>,
}

impl CommitmentDecision {
    /// Derives startup/shutdown indicators from on/off states and validates
    /// the minimum up/down time windows.
    pub fn from_on_states(case: &GridCase, on_state: Vec<Vec<bool>>) -> Result<Self, UcError> {
        if on_state.len() != case.num_generators()
            || on_state.iter().any(|row| row.len() != case.horizon)
        {
            return Err(UcError::InvalidCommitment(
                "on-state matrix must be generators x horizon".into(),
            ));
        }
        let mut startup = vec![vec![false; case.horizon]; case.num_generators()];
        let mut shutdown = vec![vec![false; case.horizon]; case.num_generators()];
        for (i, g) in case.generators.iter().enumerate() {
            let mut prev = g.initial_on;
            for t in 0..case.horizon {
                startup[i][t] = on_state[i][t] && !prev;
                shutdown[i][t] = !on_state[i][t] && prev;
                prev = on_state[i][t];
            }
        }
        let decision = Self {
            on_state,
            startup,
            shutdown,
        };
        decision.validate(case)?;
        Ok(decision)
    }

    pub fn all_on(case: &GridCase) -> Self {
        Self::from_on_states(case, vec![vec![true; case.horizon]; case.num_generators()])
            .expect("all-on always satisfies minimum up times")
    }

    pub fn all_off(case: &GridCase) -> Self {
        Self::from_on_states(case, vec![vec![false; case.horizon]; case.num_generators()])
            .expect("all-off always satisfies minimum down times")
    }

    fn validate(&self, case: &GridCase) -> Result<(), UcError> {
        for (i, g) in case.generators.iter().enumerate() {
            for t in 0..case.horizon {
                if self.startup[i][t] && self.shutdown[i][t] {
                    return Err(UcError::InvalidCommitment(format!(
                        "generator {i} both starts and stops at period {t}"
                    )));
                }
            }
            // Minimum up: every startup inside the trailing window forces the
            // unit to still be on.
            for t in (g.min_up - 1)..case.horizon {
                let window = &self.startup[i][t + 1 - g.min_up..=t];
                let starts = window.iter().filter(|&&v| v).count();
                if starts > self.on_state[i][t] as usize {
                    return Err(UcError::InvalidCommitment(format!(
                        "generator {i} violates min_up={} at period {t}",
                        g.min_up
                    )));
                }
            }
            for t in (g.min_down - 1)..case.horizon {
                let window = &self.shutdown[i][t + 1 - g.min_down..=t];
                let stops = window.iter().filter(|&&v| v).count();
                if stops > 1 - self.on_state[i][t] as usize {
                    return Err(UcError::InvalidCommitment(format!(
                        "generator {i} violates min_down={} at period {t}",
                        g.min_down
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn on_f64(&self, i: usize, t: usize) -> f64 {
        self.on_state[i][t] as u8 as f64
    }

    pub fn startup_f64(&self, i: usize, t: usize) -> f64 {
        self.startup[i][t] as u8 as f64
    }

    pub fn shutdown_f64(&self, i: usize, t: usize) -> f64 {
        self.shutdown[i][t] as u8 as f64
    }

    /// No-load plus startup cost of this commitment.
    pub fn first_stage_cost(&self, case: &GridCase) -> f64 {
        let mut cost = 0.0;
        for (i, g) in case.generators.iter().enumerate() {
            for t in 0..case.horizon {
                cost += g.no_load_cost * self.on_f64(i, t) + g.startup_cost * self.startup_f64(i, t);
            }
        }
        cost
    }
}

/// Total committed nominal capacity per period: the sum over on-units of
/// their top breakpoint output, before any temperature correction.
pub fn nominal_capacity_profile(case: &GridCase, commitment: &CommitmentDecision) -> Vec<f64> {
    (0..case.horizon)
        .map(|t| {
            case.generators
                .iter()
                .enumerate()
                .filter(|(i, _)| commitment.on_state[*i][t])
                .map(|(_, g)| g.cost_curve.max_output())
                .sum()
        })
        .collect()
}

/// First-stage variables registered in a model.
#[derive(Debug, Clone)]
pub struct FirstStageVars {
    pub on_state: Vec<Vec<VarRef>>,
    pub startup: Vec<Vec<VarRef>>,
    pub shutdown: Vec<Vec<VarRef>>,
}

/// Adds the commitment variables, logic and minimum up/down constraints, and
/// the first-stage cost terms. `y` is binary; `v` and `w` stay continuous in
/// `[0, 1]` because the logic constraints force them integral.
pub fn build_first_stage(case: &GridCase, model: &mut ModelHandle) -> FirstStageVars {
    let horizon = case.horizon;
    let mut on_state = Vec::with_capacity(case.num_generators());
    let mut startup = Vec::with_capacity(case.num_generators());
    let mut shutdown = Vec::with_capacity(case.num_generators());
    for g in &case.generators {
        let y: Vec<VarRef> = (0..horizon)
            .map(|_| {
                model
                    .add_variable(VarKind::Binary, 0.0, 1.0, g.no_load_cost)
                    .expect("bounds valid")
            })
            .collect();
        let v: Vec<VarRef> = (0..horizon)
            .map(|_| {
                model
                    .add_variable(VarKind::Continuous, 0.0, 1.0, g.startup_cost)
                    .expect("bounds valid")
            })
            .collect();
        let w: Vec<VarRef> = (0..horizon)
            .map(|_| {
                model
                    .add_variable(VarKind::Continuous, 0.0, 1.0, 0.0)
                    .expect("bounds valid")
            })
            .collect();
        on_state.push(y);
        startup.push(v);
        shutdown.push(w);
    }
    for (i, g) in case.generators.iter().enumerate() {
        let y = &on_state[i];
        let v = &startup[i];
        let w = &shutdown[i];
        // Boundary logic: the pre-horizon state is the initial_on flag.
        model
            .add_constraint(
                &[(v[0], 1.0), (w[0], -1.0), (y[0], -1.0)],
                ConstraintSense::Equal,
                -(g.initial_on as u8 as f64),
            )
            .expect("valid refs");
        for t in 1..horizon {
            model
                .add_constraint(
                    &[(v[t], 1.0), (w[t], -1.0), (y[t], -1.0), (y[t - 1], 1.0)],
                    ConstraintSense::Equal,
                    0.0,
                )
                .expect("valid refs");
        }
        for t in (g.min_up - 1)..horizon {
            let mut terms: Vec<(VarRef, f64)> = (t + 1 - g.min_up..=t).map(|h| (v[h], 1.0)).collect();
            terms.push((y[t], -1.0));
            model
                .add_constraint(&terms, ConstraintSense::LessEqual, 0.0)
                .expect("valid refs");
        }
        for t in (g.min_down - 1)..horizon {
            let mut terms: Vec<(VarRef, f64)> = (t + 1 - g.min_down..=t).map(|h| (w[h], 1.0)).collect();
            terms.push((y[t], 1.0));
            model
                .add_constraint(&terms, ConstraintSense::LessEqual, 1.0)
                .expect("valid refs");
        }
    }
    FirstStageVars {
        on_state,
        startup,
        shutdown,
    }
}

/// How commitment quantities enter the recourse constraints: as fixed
/// constants (subproblem context) or as model variables (deterministic and
/// master context).
#[derive(Clone, Copy)]
pub enum CommitmentTerms<'a> {
    Fixed(&'a CommitmentDecision),
    Vars(&'a FirstStageVars),
}

/// Objective of a recourse solve: dispatch cost (fuel plus any shed cost),
/// pure shed volume (for feasibility checking), or no objective contribution
/// at all (for master copies priced through an epigraph variable).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecourseObjective {
    Cost,
    ShedVolume,
    Unpriced,
}

/// Recourse variables registered in a model. Flow/angle are empty for
/// copperplate variants, shed is empty for hard-balance variants.
#[derive(Debug, Clone)]
pub struct RecourseVars {
    pub nominal_output: Vec<Vec<VarRef>>,
    pub breakpoint_weights: Vec<Vec<Vec<VarRef>>>,
    pub line_flow: Vec<Vec<VarRef>>,
    pub phase_angle: Vec<Vec<VarRef>>,
    pub load_shed: Vec<Vec<VarRef>>,
}

/// Builds one recourse block for `scenario` inside `model`.
pub fn build_recourse(
    case: &GridCase,
    commitment: CommitmentTerms,
    scenario: &Scenario,
    variant: ModelVariant,
    prices: &LoadShedPrices,
    objective: RecourseObjective,
    model: &mut ModelHandle,
) -> Result<RecourseVars, UcError> {
    if objective == RecourseObjective::ShedVolume && !variant.has_shed() {
        return Err(UcError::ShedVariantRequired("shed-volume objective"));
    }
    let horizon = case.horizon;
    let num_gens = case.num_generators();
    let fuel_weight = match objective {
        RecourseObjective::Cost => 1.0,
        RecourseObjective::ShedVolume | RecourseObjective::Unpriced => 0.0,
    };

    let nominal_output: Vec<Vec<VarRef>> = (0..num_gens)
        .map(|_| {
            (0..horizon)
                .map(|_| {
                    model
                        .add_variable(VarKind::Continuous, 0.0, f64::INFINITY, 0.0)
                        .expect("bounds valid")
                })
                .collect()
        })
        .collect();
    let breakpoint_weights: Vec<Vec<Vec<VarRef>>> = case
        .generators
        .iter()
        .map(|g| {
            (0..horizon)
                .map(|_| {
                    g.cost_curve
                        .breakpoints
                        .iter()
                        .map(|&(_, cost)| {
                            model
                                .add_variable(VarKind::Continuous, 0.0, 1.0, fuel_weight * cost)
                                .expect("bounds valid")
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let (line_flow, phase_angle) = if variant.has_network() {
        let flows: Vec<Vec<VarRef>> = case
            .branches
            .iter()
            .map(|b| {
                (0..horizon)
                    .map(|_| {
                        model
                            .add_variable(VarKind::Continuous, -b.flow_limit, b.flow_limit, 0.0)
                            .expect("bounds valid")
                    })
                    .collect()
            })
            .collect();
        let angles: Vec<Vec<VarRef>> = (0..case.num_buses())
            .map(|_| {
                (0..horizon)
                    .map(|_| {
                        model
                            .add_variable(VarKind::Continuous, -ANGLE_LIMIT, ANGLE_LIMIT, 0.0)
                            .expect("bounds valid")
                    })
                    .collect()
            })
            .collect();
        (flows, angles)
    } else {
        (Vec::new(), Vec::new())
    };
    let load_shed: Vec<Vec<VarRef>> = if variant.has_shed() {
        (0..case.num_buses())
            .map(|n| {
                (0..horizon)
                    .map(|t| {
                        let weight = match objective {
                            RecourseObjective::Cost => prices.price_per_period[t],
                            RecourseObjective::ShedVolume => 1.0,
                            RecourseObjective::Unpriced => 0.0,
                        };
                        model
                            .add_variable(VarKind::Continuous, 0.0, scenario.demand[n][t], weight)
                            .expect("bounds valid")
                    })
                    .collect()
            })
            .collect()
    } else {
        Vec::new()
    };

    // Ramping between consecutive periods; the first period has no ramp
    // constraint from the pre-horizon state.
    for (i, g) in case.generators.iter().enumerate() {
        for t in 0..horizon - 1 {
            let x = &nominal_output[i];
            match commitment {
                CommitmentTerms::Fixed(c) => {
                    model
                        .add_constraint(
                            &[(x[t + 1], 1.0), (x[t], -1.0)],
                            ConstraintSense::LessEqual,
                            c.on_f64(i, t) * g.ramp_up + c.startup_f64(i, t + 1) * g.startup_rate,
                        )
                        .expect("valid refs");
                    model
                        .add_constraint(
                            &[(x[t], 1.0), (x[t + 1], -1.0)],
                            ConstraintSense::LessEqual,
                            c.on_f64(i, t + 1) * g.ramp_down
                                + c.shutdown_f64(i, t + 1) * g.shutdown_rate,
                        )
                        .expect("valid refs");
                }
                CommitmentTerms::Vars(fs) => {
                    model
                        .add_constraint(
                            &[
                                (x[t + 1], 1.0),
                                (x[t], -1.0),
                                (fs.on_state[i][t], -g.ramp_up),
                                (fs.startup[i][t + 1], -g.startup_rate),
                            ],
                            ConstraintSense::LessEqual,
                            0.0,
                        )
                        .expect("valid refs");
                    model
                        .add_constraint(
                            &[
                                (x[t], 1.0),
                                (x[t + 1], -1.0),
                                (fs.on_state[i][t + 1], -g.ramp_down),
                                (fs.shutdown[i][t + 1], -g.shutdown_rate),
                            ],
                            ConstraintSense::LessEqual,
                            0.0,
                        )
                        .expect("valid refs");
                }
            }
        }
    }

    // Status link and convex combination.
    for i in 0..num_gens {
        for t in 0..horizon {
            let lam = &breakpoint_weights[i][t];
            let mut link: Vec<(VarRef, f64)> = lam.iter().map(|&l| (l, 1.0)).collect();
            match commitment {
                CommitmentTerms::Fixed(c) => {
                    model
                        .add_constraint(&link, ConstraintSense::Equal, c.on_f64(i, t))
                        .expect("valid refs");
                }
                CommitmentTerms::Vars(fs) => {
                    link.push((fs.on_state[i][t], -1.0));
                    model
                        .add_constraint(&link, ConstraintSense::Equal, 0.0)
                        .expect("valid refs");
                }
            }
            let mut comb: Vec<(VarRef, f64)> = vec![(nominal_output[i][t], 1.0)];
            for (k, &l) in lam.iter().enumerate() {
                comb.push((l, -case.generators[i].cost_curve.breakpoints[k].0));
            }
            model
                .add_constraint(&comb, ConstraintSense::Equal, 0.0)
                .expect("valid refs");
        }
    }

    // Balance: the efficiency factor at the realized temperature scales the
    // nominal output of every unit.
    for t in 0..horizon {
        let factor = kappa(scenario.temperature[t]);
        if variant.has_network() {
            for (n, bus) in case.buses.iter().enumerate() {
                let mut terms: Vec<(VarRef, f64)> = bus
                    .attached_generator_ids
                    .iter()
                    .map(|&i| (nominal_output[i][t], factor))
                    .collect();
                for &l in &bus.outgoing_branch_ids {
                    terms.push((line_flow[l][t], -1.0));
                }
                for &l in &bus.incoming_branch_ids {
                    terms.push((line_flow[l][t], 1.0));
                }
                let sense = if variant.has_shed() {
                    terms.push((load_shed[n][t], 1.0));
                    ConstraintSense::GreaterEqual
                } else {
                    ConstraintSense::Equal
                };
                model
                    .add_constraint(&terms, sense, scenario.demand[n][t])
                    .expect("valid refs");
            }
        } else {
            let mut terms: Vec<(VarRef, f64)> = (0..num_gens)
                .map(|i| (nominal_output[i][t], factor))
                .collect();
            if variant.has_shed() {
                for n in 0..case.num_buses() {
                    terms.push((load_shed[n][t], 1.0));
                }
            }
            let total: f64 = (0..case.num_buses()).map(|n| scenario.demand[n][t]).sum();
            model
                .add_constraint(&terms, ConstraintSense::Equal, total)
                .expect("valid refs");
        }
    }

    // DC power flow through phase angles.
    if variant.has_network() {
        for (l, branch) in case.branches.iter().enumerate() {
            for t in 0..horizon {
                model
                    .add_constraint(
                        &[
                            (line_flow[l][t], branch.reactance),
                            (phase_angle[branch.origin_bus][t], -1.0),
                            (phase_angle[branch.destination_bus][t], 1.0),
                        ],
                        ConstraintSense::Equal,
                        0.0,
                    )
                    .expect("valid refs");
            }
        }
    }

    Ok(RecourseVars {
        nominal_output,
        breakpoint_weights,
        line_flow,
        phase_angle,
        load_shed,
    })
}

/// Second-stage decision extracted from a solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecourseDecision {
    pub nominal_output: Vec<Vec<f64>>,
    pub breakpoint_weights: Vec<Vec<Vec<f64>>>,
    pub line_flow: Vec<Vec<f64>>,
    pub phase_angle: Vec<Vec<f64>>,
    pub load_shed: Vec<Vec<f64>>,
    pub fuel_cost: f64,
    pub shed_cost: f64,
}

impl RecourseDecision {
    /// Reads a decision out of a solved model that contains `vars`.
    pub fn from_solution(
        case: &GridCase,
        vars: &RecourseVars,
        outcome: &SolveOutcome,
        prices: &LoadShedPrices,
    ) -> Self {
        let get2 = |m: &Vec<Vec<VarRef>>| -> Vec<Vec<f64>> {
            m.iter()
                .map(|row| row.iter().map(|&v| outcome.value(v)).collect())
                .collect()
        };
        let breakpoint_weights: Vec<Vec<Vec<f64>>> = vars
            .breakpoint_weights
            .iter()
            .map(|gen| gen.iter().map(|row| row.iter().map(|&v| outcome.value(v)).collect()).collect())
            .collect();
        let mut fuel_cost = 0.0;
        for (i, g) in case.generators.iter().enumerate() {
            for t in 0..case.horizon {
                for (k, &(_, cost)) in g.cost_curve.breakpoints.iter().enumerate() {
                    fuel_cost += cost * breakpoint_weights[i][t][k];
                }
            }
        }
        let load_shed = if vars.load_shed.is_empty() {
            vec![vec![0.0; case.horizon]; case.num_buses()]
        } else {
            get2(&vars.load_shed)
        };
        let mut shed_cost = 0.0;
        for row in &load_shed {
            for (t, &w) in row.iter().enumerate() {
                shed_cost += prices.price_per_period[t] * w;
            }
        }
        Self {
            nominal_output: get2(&vars.nominal_output),
            breakpoint_weights,
            line_flow: get2(&vars.line_flow),
            phase_angle: get2(&vars.phase_angle),
            load_shed,
            fuel_cost,
            shed_cost,
        }
    }

    /// Dispatch cost: fuel plus shed penalty.
    pub fn objective(&self) -> f64 {
        self.fuel_cost + self.shed_cost
    }

    pub fn total_shed(&self) -> f64 {
        self.load_shed.iter().flatten().sum()
    }

    /// Checks the status-link and convex-combination identities against a
    /// commitment.
    pub fn verify_consistency(
        &self,
        case: &GridCase,
        commitment: &CommitmentDecision,
    ) -> Result<(), UcError> {
        for (i, g) in case.generators.iter().enumerate() {
            for t in 0..case.horizon {
                let weights = &self.breakpoint_weights[i][t];
                let total: f64 = weights.iter().sum();
                if (total - commitment.on_f64(i, t)).abs() > RECOURSE_CONSISTENCY_TOL {
                    return Err(UcError::InvalidCommitment(format!(
                        "weight sum {total} != on state at generator {i}, period {t}"
                    )));
                }
                let from_weights: f64 = weights
                    .iter()
                    .zip(g.cost_curve.breakpoints.iter())
                    .map(|(w, &(p, _))| w * p)
                    .sum();
                if (from_weights - self.nominal_output[i][t]).abs() > RECOURSE_CONSISTENCY_TOL {
                    return Err(UcError::InvalidCommitment(format!(
                        "output {} != breakpoint combination {from_weights} at generator {i}, period {t}",
                        self.nominal_output[i][t]
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum RecourseOutcome {
    Feasible(RecourseDecision),
    Infeasible,
}

impl RecourseOutcome {
    pub fn expect_feasible(self) -> RecourseDecision {
        match self {
            RecourseOutcome::Feasible(d) => d,
            RecourseOutcome::Infeasible => panic!("recourse unexpectedly infeasible"),
        }
    }
}

/// Solves the recourse LP for a fixed commitment and scenario, minimizing
/// dispatch cost.
pub fn solve_recourse(
    case: &GridCase,
    commitment: &CommitmentDecision,
    scenario: &Scenario,
    variant: ModelVariant,
    prices: &LoadShedPrices,
    config: &SolveConfig,
) -> Result<RecourseOutcome, UcError> {
    solve_recourse_with_objective(
        case,
        commitment,
        scenario,
        variant,
        prices,
        RecourseObjective::Cost,
        config,
    )
}

/// Recourse LP with a selectable objective. The shed-volume objective is the
/// inner problem of the feasibility check.
pub fn solve_recourse_with_objective(
    case: &GridCase,
    commitment: &CommitmentDecision,
    scenario: &Scenario,
    variant: ModelVariant,
    prices: &LoadShedPrices,
    objective: RecourseObjective,
    config: &SolveConfig,
) -> Result<RecourseOutcome, UcError> {
    let mut model = ModelHandle::new(ObjectiveSense::Minimize);
    let vars = build_recourse(
        case,
        CommitmentTerms::Fixed(commitment),
        scenario,
        variant,
        prices,
        objective,
        &mut model,
    )?;
    let outcome = model.solve(config)?;
    match outcome.status {
        SolveStatus::Optimal => {
            let decision = RecourseDecision::from_solution(case, &vars, &outcome, prices);
            decision.verify_consistency(case, commitment)?;
            Ok(RecourseOutcome::Feasible(decision))
        }
        SolveStatus::Infeasible => Ok(RecourseOutcome::Infeasible),
        status => Err(UcError::UnexpectedStatus {
            status,
            context: "solving recourse LP",
        }),
    }
}

/// Single-scenario unit commitment: first stage and recourse in one MILP.
pub fn deterministic_uc(
    case: &GridCase,
    scenario: &Scenario,
    variant: ModelVariant,
    prices: &LoadShedPrices,
    config: &SolveConfig,
) -> Result<(CommitmentDecision, RecourseDecision, f64), UcError> {
    let mut model = ModelHandle::new(ObjectiveSense::Minimize);
    let first = build_first_stage(case, &mut model);
    build_recourse(
        case,
        CommitmentTerms::Vars(&first),
        scenario,
        variant,
        prices,
        RecourseObjective::Cost,
        &mut model,
    )?;
    let outcome = model.solve(config)?;
    match outcome.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible => return Err(UcError::Infeasible),
        status => {
            return Err(UcError::UnexpectedStatus {
                status,
                context: "solving deterministic unit commitment",
            })
        }
    }
    let on_state: Vec<Vec<bool>> = first
        .on_state
        .iter()
        .map(|row| row.iter().map(|&v| outcome.value(v) >= 0.5).collect())
        .collect();
    let commitment = CommitmentDecision::from_on_states(case, on_state)?;
    // Re-solve the recourse at the rounded commitment so the reported triple
    // is exactly mutually consistent.
    let recourse = match solve_recourse(case, &commitment, scenario, variant, prices, config)? {
        RecourseOutcome::Feasible(d) => d,
        RecourseOutcome::Infeasible => return Err(UcError::Infeasible),
    };
    let total = commitment.first_stage_cost(case) + recourse.objective();
    Ok((commitment, recourse, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::uncertainty::realize;

    fn config() -> SolveConfig {
        SolveConfig::default()
    }

    fn fix_y(model: &mut ModelHandle, vars: &FirstStageVars, pattern: &[Vec<f64>]) {
        for (i, row) in pattern.iter().enumerate() {
            for (t, &val) in row.iter().enumerate() {
                model
                    .add_constraint(&[(vars.on_state[i][t], 1.0)], ConstraintSense::Equal, val)
                    .unwrap();
            }
        }
    }

    #[test]
    fn min_up_two_excludes_on_off_on() {
        let mut case = fixtures::offswitch_case(1);
        case.generators[0].min_up = 2;
        case.generators[0].initial_on = false;
        let mut model = ModelHandle::new(ObjectiveSense::Minimize);
        let vars = build_first_stage(&case, &mut model);
        fix_y(&mut model, &vars, &[vec![1.0, 0.0, 1.0]]);
        let out = model.solve(&config()).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
    }

    #[test]
    fn shutdown_forced_at_boundary() {
        let case = fixtures::single_bus_two_period(); // initial_on = true
        let mut model = ModelHandle::new(ObjectiveSense::Minimize);
        let vars = build_first_stage(&case, &mut model);
        fix_y(&mut model, &vars, &[vec![0.0, 0.0]]);
        let out = model.solve(&config()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert!((out.value(vars.shutdown[0][0]) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn first_stage_constraint_count_matches_formula() {
        for case in [
            fixtures::single_bus_two_period(),
            fixtures::copperplate_trio_t3(),
            {
                let mut c = fixtures::offswitch_case(2);
                c.generators[0].min_up = 2;
                c
            },
        ] {
            let mut model = ModelHandle::new(ObjectiveSense::Minimize);
            build_first_stage(&case, &mut model);
            let horizon = case.horizon as i64;
            let num_gens = case.num_generators() as i64;
            let mut expected = num_gens + num_gens * (horizon - 1);
            for g in &case.generators {
                expected += (horizon - g.min_up as i64 + 1).max(0);
                expected += (horizon - g.min_down as i64 + 1).max(0);
            }
            assert_eq!(model.num_constraints() as i64, expected);
        }
    }

    #[test]
    fn recourse_cost_interpolates_breakpoints() {
        let case = fixtures::single_bus_two_period();
        let commitment = CommitmentDecision::all_on(&case);
        let nominal = realize(&case, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        let d = solve_recourse(
            &case,
            &commitment,
            &nominal,
            ModelVariant::Network,
            &case.load_shed_prices,
            &config(),
        )
        .unwrap()
        .expect_feasible();
        // 60 MW at factor 1.0: interpolate 500 + (10/50)*700 = 640 per period.
        assert!((d.nominal_output[0][0] - 60.0).abs() < 1e-6);
        assert!((d.fuel_cost - 2.0 * 640.0).abs() < 1e-5, "{}", d.fuel_cost);
    }

    #[test]
    fn hot_period_needs_more_nominal_output() {
        let case = fixtures::single_bus_two_period();
        let commitment = CommitmentDecision::all_on(&case);
        let hot = realize(&case, &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        let d = solve_recourse(
            &case,
            &commitment,
            &hot,
            ModelVariant::Network,
            &case.load_shed_prices,
            &config(),
        )
        .unwrap()
        .expect_feasible();
        // 0.9 x = 60 so x = 66.67; cost interpolates there.
        let x = 60.0 / 0.9;
        assert!((d.nominal_output[0][0] - x).abs() < 1e-6);
        let expected = 2.0 * (500.0 + 700.0 * (x - 50.0) / 50.0);
        assert!((d.fuel_cost - expected).abs() < 1e-5);
    }

    #[test]
    fn all_off_with_demand_is_infeasible_without_shed() {
        let case = fixtures::single_bus_two_period();
        let commitment = CommitmentDecision::all_off(&case);
        let nominal = realize(&case, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        let outcome = solve_recourse(
            &case,
            &commitment,
            &nominal,
            ModelVariant::Network,
            &case.load_shed_prices,
            &config(),
        )
        .unwrap();
        assert!(matches!(outcome, RecourseOutcome::Infeasible));
    }

    #[test]
    fn all_off_sheds_everything_at_shed_prices() {
        let case = fixtures::single_bus_two_period();
        let commitment = CommitmentDecision::all_off(&case);
        let nominal = realize(&case, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        let d = solve_recourse(
            &case,
            &commitment,
            &nominal,
            ModelVariant::NetworkShed,
            &case.load_shed_prices,
            &config(),
        )
        .unwrap()
        .expect_feasible();
        assert!((d.total_shed() - 120.0).abs() < 1e-6);
        assert!((d.shed_cost - 120.0 * 1000.0).abs() < 1e-4);
    }

    #[test]
    fn zero_demand_costs_first_breakpoint_only() {
        let case = fixtures::offswitch_case(1); // first breakpoint at 0 MW, 0 $
        let commitment = CommitmentDecision::all_on(&case);
        let nominal = realize(&case, &[0.0; 3], &[0.0; 3]).unwrap();
        let d = solve_recourse(
            &case,
            &commitment,
            &nominal,
            ModelVariant::Network,
            &case.load_shed_prices,
            &config(),
        )
        .unwrap()
        .expect_feasible();
        // The zero-demand middle period dispatches at the first breakpoint.
        assert!(d.nominal_output[0][1].abs() < 1e-9);
        assert!((d.breakpoint_weights[0][1][0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn congested_line_sheds_the_remainder() {
        let case = fixtures::two_bus_congested();
        let commitment = CommitmentDecision::all_on(&case);
        let nominal = realize(&case, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        let hard = solve_recourse(
            &case,
            &commitment,
            &nominal,
            ModelVariant::Network,
            &case.load_shed_prices,
            &config(),
        )
        .unwrap();
        assert!(matches!(hard, RecourseOutcome::Infeasible));
        let soft = solve_recourse(
            &case,
            &commitment,
            &nominal,
            ModelVariant::NetworkShed,
            &case.load_shed_prices,
            &config(),
        )
        .unwrap()
        .expect_feasible();
        // Bus 1 receives at most the 50 MW line limit of its 80 MW demand.
        for t in 0..2 {
            assert!((soft.load_shed[1][t] - 30.0).abs() < 1e-6);
        }
    }

    #[test]
    fn deterministic_matches_commitment_enumeration() {
        // With min_down = 1 the unit cycles off in the zero-demand period;
        // with min_down = 2 it must ride through.
        let cheap_cycle = fixtures::offswitch_case(1);
        let nominal = realize(&cheap_cycle, &[0.0; 3], &[0.0; 3]).unwrap();
        let (commitment, _, cost) = deterministic_uc(
            &cheap_cycle,
            &nominal,
            ModelVariant::Network,
            &cheap_cycle.load_shed_prices,
            &config(),
        )
        .unwrap();
        assert_eq!(commitment.on_state[0], vec![true, false, true]);
        // Enumerate all 8 on/off patterns as an oracle.
        let mut best = f64::INFINITY;
        for mask in 0u32..8 {
            let pattern = vec![(0..3).map(|t| (mask >> t) & 1 == 1).collect::<Vec<bool>>()];
            let Ok(c) = CommitmentDecision::from_on_states(&cheap_cycle, pattern) else {
                continue;
            };
            if let RecourseOutcome::Feasible(d) = solve_recourse(
                &cheap_cycle,
                &c,
                &nominal,
                ModelVariant::Network,
                &cheap_cycle.load_shed_prices,
                &config(),
            )
            .unwrap()
            {
                best = best.min(c.first_stage_cost(&cheap_cycle) + d.objective());
            }
        }
        assert!((cost - best).abs() < 1e-6, "milp {cost} vs oracle {best}");

        let must_stay = fixtures::offswitch_case(2);
        let (commitment, _, _) = deterministic_uc(
            &must_stay,
            &realize(&must_stay, &[0.0; 3], &[0.0; 3]).unwrap(),
            ModelVariant::Network,
            &must_stay.load_shed_prices,
            &config(),
        )
        .unwrap();
        assert_eq!(commitment.on_state[0], vec![true, true, true]);
    }

    #[test]
    fn infeasible_when_demand_exceeds_capacity() {
        let mut case = fixtures::single_bus_two_period();
        case.demand_nominal = vec![vec![500.0, 500.0]];
        case.demand_deviation = vec![vec![0.0, 0.0]];
        let nominal = realize(&case, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        let err = deterministic_uc(
            &case,
            &nominal,
            ModelVariant::Network,
            &case.load_shed_prices,
            &config(),
        )
        .unwrap_err();
        assert!(matches!(err, UcError::Infeasible));
    }

    #[test]
    fn efficiency_monotonicity_on_fixture() {
        let case = fixtures::three_period_case();
        let commitment = CommitmentDecision::all_on(&case);
        let mut last = f64::NEG_INFINITY;
        for step in 0..=4 {
            let a = step as f64 / 4.0;
            let s = realize(&case, &[a, a, a], &[0.0; 3]).unwrap();
            let d = solve_recourse(
                &case,
                &commitment,
                &s,
                ModelVariant::Copperplate,
                &case.load_shed_prices,
                &config(),
            )
            .unwrap()
            .expect_feasible();
            assert!(d.objective() >= last - 1e-7, "cost decreased as temperature rose");
            last = d.objective();
        }
    }

    #[test]
    fn shed_variant_weakly_dominates_hard_balance() {
        let case = fixtures::copperplate_pair();
        let commitment = CommitmentDecision::all_on(&case);
        let s = realize(&case, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        let hard = solve_recourse(
            &case,
            &commitment,
            &s,
            ModelVariant::Network,
            &case.load_shed_prices,
            &config(),
        )
        .unwrap()
        .expect_feasible();
        let soft = solve_recourse(
            &case,
            &commitment,
            &s,
            ModelVariant::NetworkShed,
            &case.load_shed_prices,
            &config(),
        )
        .unwrap()
        .expect_feasible();
        assert!(soft.objective() <= hard.objective() + 1e-6);
        if soft.total_shed() < 1e-9 {
            assert!((soft.objective() - hard.objective()).abs() < 1e-5);
        }
    }
}
