//! Thin abstraction over the mixed-integer linear programming backend.
//!
//! All model building in this crate goes through [`ModelHandle`], which
//! collects variables, linear constraints and a linear objective, then hands
//! the whole problem to HiGHS in one shot. Keeping the backend behind this
//! seam means the rest of the crate never touches solver types directly.
//!
//! Duals are only reported for pure LPs (no integer columns); that is the only
//! place the algorithms consume them, namely recourse problems at a fixed
//! scenario.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use highs::{HighsModelStatus, HighsSolutionStatus, RowProblem};
use thiserror::Error;

/// Backend selection, resolved from the `ROBUC_BACKEND` environment variable.
/// HiGHS is the only backend currently compiled in; the variable exists so a
/// second backend can be added without touching call sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Highs,
}

impl Backend {
    pub fn from_env() -> Result<Self, SolverError> {
        match std::env::var("ROBUC_BACKEND") {
            Err(_) => Ok(Backend::Highs),
            Ok(v) if v.is_empty() || v.eq_ignore_ascii_case("highs") => Ok(Backend::Highs),
            Ok(v) => Err(SolverError::UnknownBackend(v)),
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("variable bounds inverted: lower {lower} > upper {upper}")]
    BoundInversion { lower: f64, upper: f64 },
    #[error("binary variable bounds must lie within [0, 1], got [{lower}, {upper}]")]
    BinaryBounds { lower: f64, upper: f64 },
    #[error("constraint references unknown variable index {0}")]
    UnknownVariable(usize),
    #[error("unknown solver backend '{0}' (supported: highs)")]
    UnknownBackend(String),
    #[error("backend failure: {0}")]
    Backend(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

/// Sense of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSense {
    LessEqual,
    Equal,
    GreaterEqual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

/// Handle to a registered variable. Only valid for the model that created it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarRef(pub(crate) usize);

impl VarRef {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Handle to a registered constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConRef(pub(crate) usize);

impl ConRef {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
struct Variable {
    kind: VarKind,
    lower: f64,
    upper: f64,
    objective: f64,
}

#[derive(Debug, Clone)]
struct Constraint {
    terms: Vec<(usize, f64)>,
    sense: ConstraintSense,
    rhs: f64,
}

/// Solve parameters. Defaults mirror the project-wide conventions: one hour
/// per solve, 1e-6 relative MIP gap, single thread for reproducibility.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub time_limit_seconds: f64,
    pub mip_gap: f64,
    pub threads: u32,
    pub seed: i32,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            time_limit_seconds: 3600.0,
            mip_gap: 1e-6,
            threads: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Time limit reached. Primal values are present iff an incumbent exists.
    TimeLimit,
    NumericalFailure,
}

/// Result of a solve. `primal` is indexed by [`VarRef`], `duals` by [`ConRef`]
/// (LP solves only).
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub objective_value: Option<f64>,
    pub primal: Option<Vec<f64>>,
    pub duals: Option<Vec<f64>>,
    pub solve_seconds: f64,
    pub message: Option<String>,
}

impl SolveOutcome {
    /// Primal value of `var`, panicking if the solve produced no solution.
    pub fn value(&self, var: VarRef) -> f64 {
        self.primal.as_ref().expect("no primal solution")[var.0]
    }

    pub fn dual(&self, con: ConRef) -> f64 {
        self.duals.as_ref().expect("no dual solution")[con.0]
    }

    pub fn has_solution(&self) -> bool {
        self.primal.is_some()
    }
}

/// An in-memory MILP under construction. Not thread-shareable; build one per
/// solve (concurrent solves on distinct handles are fine).
#[derive(Debug, Clone)]
pub struct ModelHandle {
    sense: ObjectiveSense,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
}

impl ModelHandle {
    pub fn new(sense: ObjectiveSense) -> Self {
        Self {
            sense,
            variables: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_pure_lp(&self) -> bool {
        self.variables.iter().all(|v| v.kind == VarKind::Continuous)
    }

    pub fn add_variable(
        &mut self,
        kind: VarKind,
        lower: f64,
        upper: f64,
        objective: f64,
    ) -> Result<VarRef, SolverError> {
        if lower > upper {
            return Err(SolverError::BoundInversion { lower, upper });
        }
        if kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(SolverError::BinaryBounds { lower, upper });
        }
        self.variables.push(Variable {
            kind,
            lower,
            upper,
            objective,
        });
        Ok(VarRef(self.variables.len() - 1))
    }

    /// Adds an objective contribution to an existing variable.
    pub fn add_objective_term(&mut self, var: VarRef, coefficient: f64) {
        self.variables[var.0].objective += coefficient;
    }

    /// Registers a linear constraint. Duplicate variable entries are merged by
    /// summing their coefficients, so `x + x <= 2` behaves as `2x <= 2`.
    pub fn add_constraint(
        &mut self,
        terms: &[(VarRef, f64)],
        sense: ConstraintSense,
        rhs: f64,
    ) -> Result<ConRef, SolverError> {
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for &(var, coef) in terms {
            if var.0 >= self.variables.len() {
                return Err(SolverError::UnknownVariable(var.0));
            }
            match merged.iter_mut().find(|(i, _)| *i == var.0) {
                Some((_, c)) => *c += coef,
                None => merged.push((var.0, coef)),
            }
        }
        self.constraints.push(Constraint {
            terms: merged,
            sense,
            rhs,
        });
        Ok(ConRef(self.constraints.len() - 1))
    }

    /// Serializes the model in CPLEX LP text format, for debugging.
    pub fn write_lp<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        match self.sense {
            ObjectiveSense::Minimize => writeln!(out, "Minimize")?,
            ObjectiveSense::Maximize => writeln!(out, "Maximize")?,
        }
        write!(out, " obj:")?;
        for (j, v) in self.variables.iter().enumerate() {
            if v.objective != 0.0 {
                write!(out, " {:+} x{}", v.objective, j)?;
            }
        }
        writeln!(out, "\nSubject To")?;
        for (i, c) in self.constraints.iter().enumerate() {
            write!(out, " c{}:", i)?;
            if c.terms.is_empty() {
                write!(out, " 0 x0")?;
            }
            for &(j, coef) in &c.terms {
                write!(out, " {:+} x{}", coef, j)?;
            }
            let op = match c.sense {
                ConstraintSense::LessEqual => "<=",
                ConstraintSense::Equal => "=",
                ConstraintSense::GreaterEqual => ">=",
            };
            writeln!(out, " {} {}", op, c.rhs)?;
        }
        writeln!(out, "Bounds")?;
        for (j, v) in self.variables.iter().enumerate() {
            writeln!(out, " {} <= x{} <= {}", v.lower, j, v.upper)?;
        }
        let binaries: Vec<String> = self
            .variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(j, _)| format!("x{}", j))
            .collect();
        if !binaries.is_empty() {
            writeln!(out, "Binary\n {}", binaries.join(" "))?;
        }
        writeln!(out, "End")
    }

    /// Solves the model with HiGHS and maps the outcome onto the status
    /// contract. `UnboundedOrInfeasible` answers from presolve are
    /// disambiguated by re-solving once with presolve off.
    ///
    /// Setting `ROBUC_DUMP_LP_DIR` makes every solve write its model in LP
    /// text format to that directory first.
    pub fn solve(&self, config: &SolveConfig) -> Result<SolveOutcome, SolverError> {
        if let Ok(dir) = std::env::var("ROBUC_DUMP_LP_DIR") {
            static DUMP_COUNTER: AtomicUsize = AtomicUsize::new(0);
            let index = DUMP_COUNTER.fetch_add(1, Ordering::Relaxed);
            let path = std::path::Path::new(&dir).join(format!("model_{index:05}.lp"));
            if let Ok(mut file) = std::fs::File::create(&path) {
                let _ = self.write_lp(&mut file);
            }
        }
        let started = Instant::now();
        let first = self.solve_once(config, false)?;
        let outcome = if first.0 == HighsModelStatus::UnboundedOrInfeasible {
            self.solve_once(config, true)?
        } else {
            first
        };
        let (status, objective_value, primal, duals, message) = outcome.1;
        Ok(SolveOutcome {
            status,
            objective_value,
            primal,
            duals,
            solve_seconds: started.elapsed().as_secs_f64(),
            message,
        })
    }

    #[allow(clippy::type_complexity)]
    fn solve_once(
        &self,
        config: &SolveConfig,
        disable_presolve: bool,
    ) -> Result<
        (
            HighsModelStatus,
            (
                SolveStatus,
                Option<f64>,
                Option<Vec<f64>>,
                Option<Vec<f64>>,
                Option<String>,
            ),
        ),
        SolverError,
    > {
        let mut problem = RowProblem::new();
        let mut cols = Vec::with_capacity(self.variables.len());
        for v in &self.variables {
            let col = match v.kind {
                VarKind::Continuous => problem.add_column(v.objective, v.lower..=v.upper),
                VarKind::Binary => problem.add_integer_column(v.objective, v.lower..=v.upper),
            };
            cols.push(col);
        }
        for c in &self.constraints {
            let factors: Vec<(highs::Col, f64)> =
                c.terms.iter().map(|&(j, coef)| (cols[j], coef)).collect();
            match c.sense {
                ConstraintSense::LessEqual => problem.add_row(..=c.rhs, &factors),
                ConstraintSense::Equal => problem.add_row(c.rhs..=c.rhs, &factors),
                ConstraintSense::GreaterEqual => problem.add_row(c.rhs.., &factors),
            };
        }

        let sense = match self.sense {
            ObjectiveSense::Minimize => highs::Sense::Minimise,
            ObjectiveSense::Maximize => highs::Sense::Maximise,
        };
        let mut model = problem
            .try_optimise(sense)
            .map_err(|s| SolverError::Backend(format!("model construction failed: {s:?}")))?;
        model.make_quiet();
        model.set_option("time_limit", self.adjusted_time_limit(config));
        model.set_option("mip_rel_gap", config.mip_gap);
        model.set_option("threads", config.threads as i32);
        model.set_option("random_seed", config.seed);
        if config.threads == 1 {
            model.set_option("parallel", "off");
        }
        if disable_presolve {
            model.set_option("presolve", "off");
        }

        let solved = model.solve();
        let raw = solved.status();
        let pure_lp = self.is_pure_lp();
        let mapped = match raw {
            HighsModelStatus::Optimal | HighsModelStatus::ModelEmpty => {
                let solution = solved.get_solution();
                let duals = if pure_lp {
                    Some(solution.dual_rows().to_vec())
                } else {
                    None
                };
                (
                    SolveStatus::Optimal,
                    Some(solved.objective_value()),
                    Some(solution.columns().to_vec()),
                    duals,
                    None,
                )
            }
            HighsModelStatus::Infeasible => (SolveStatus::Infeasible, None, None, None, None),
            HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => {
                (SolveStatus::Unbounded, None, None, None, None)
            }
            HighsModelStatus::ReachedTimeLimit => {
                if solved.primal_solution_status() == HighsSolutionStatus::Feasible {
                    let solution = solved.get_solution();
                    (
                        SolveStatus::TimeLimit,
                        Some(solved.objective_value()),
                        Some(solution.columns().to_vec()),
                        None,
                        None,
                    )
                } else {
                    (SolveStatus::TimeLimit, None, None, None, None)
                }
            }
            other => (
                SolveStatus::NumericalFailure,
                None,
                None,
                None,
                Some(format!("backend status {other:?}")),
            ),
        };
        Ok((raw, mapped))
    }

    fn adjusted_time_limit(&self, config: &SolveConfig) -> f64 {
        if config.time_limit_seconds.is_finite() && config.time_limit_seconds > 0.0 {
            config.time_limit_seconds
        } else {
            1e30
        }
    }
}
