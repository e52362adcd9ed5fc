//! Property suite behind `robuc verify`: reruns the oracle and structural
//! checks on the built-in fixtures (and validates a user case when given).

use std::path::Path;

use anyhow::Result;
use robuc_core::fixtures;
use robuc_core::subproblems::FEASIBILITY_TOL;
use robuc_core::{
    brute_force_worst_case, check_theorem2_conditions, enumerate_binary, is_member,
    project_into_full, realize, run_ccg, solve_sp_feasibility, solve_sp_optimality,
    worst_case_grid_search, BruteForceObjective, CcgConfig, CommitmentDecision, ModelVariant,
    Scenario, SetVariant, SolutionStatus, SolveConfig, UncertaintySpec,
};

pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, result: std::result::Result<String, String>) -> CheckOutcome {
    match result {
        Ok(detail) => CheckOutcome {
            name: name.into(),
            passed: true,
            detail,
        },
        Err(detail) => CheckOutcome {
            name: name.into(),
            passed: false,
            detail,
        },
    }
}

fn solve_config() -> SolveConfig {
    SolveConfig {
        mip_gap: 1e-9,
        ..SolveConfig::default()
    }
}

/// Runs every property check; validates `case_path` first when given.
/// Returns the outcomes; the caller decides the exit code.
pub fn run_all(case_path: Option<&Path>) -> Result<Vec<CheckOutcome>> {
    let mut outcomes = Vec::new();

    if let Some(path) = case_path {
        let outcome = match robuc_core::load_case(path) {
            Ok(case) => Ok(format!(
                "{} buses, {} branches, {} generators, horizon {}",
                case.num_buses(),
                case.num_branches(),
                case.num_generators(),
                case.horizon
            )),
            Err(e) => Err(e.to_string()),
        };
        let outcome = check("case-validation", outcome);
        let failed = !outcome.passed;
        outcomes.push(outcome);
        if failed {
            // A case that does not validate is a hard failure; the stock
            // suite below would not speak to it anyway.
            return Ok(outcomes);
        }
    }

    outcomes.push(check("enumeration-vs-naive-filter", enumeration_check()));
    outcomes.push(check("projection-membership", projection_check()));
    outcomes.push(check("set-inclusion", inclusion_check()));
    outcomes.push(check("optimality-dual-vs-oracle", optimality_oracle_check()));
    outcomes.push(check("feasibility-dual-vs-oracle", feasibility_oracle_check()));
    outcomes.push(check("binary-reduction-grid-witness", theorem2_grid_check()));
    outcomes.push(check("ccg-trace-invariants", ccg_trace_check()));
    Ok(outcomes)
}

fn enumeration_check() -> std::result::Result<String, String> {
    let case = fixtures::three_period_case();
    let mut checked = 0usize;
    for (ga, gd, lag, variant) in [
        (1u32, 1u32, 0usize, SetVariant::BinaryLinked),
        (1, 1, 1, SetVariant::BinaryLinked),
        (2, 2, 1, SetVariant::RelaxedBinary),
    ] {
        let spec = UncertaintySpec::new(&case, ga, gd, lag).map_err(|e| e.to_string())?;
        let fast: Vec<(Vec<f64>, Vec<f64>)> = enumerate_binary(&case, &spec, variant, false)
            .map_err(|e| e.to_string())?
            .map(|s| (s.alpha, s.gamma))
            .collect();
        let mut naive = Vec::new();
        for am in 0u32..8 {
            for gm in 0u32..8 {
                let alpha: Vec<f64> = (0..3).map(|t| ((am >> (2 - t)) & 1) as f64).collect();
                let gamma: Vec<f64> = (0..3).map(|t| ((gm >> (2 - t)) & 1) as f64).collect();
                let s = realize(&case, &alpha, &gamma).map_err(|e| e.to_string())?;
                if is_member(&spec, &s, variant).is_member {
                    naive.push((alpha, gamma));
                }
            }
        }
        if fast != naive {
            return Err(format!(
                "enumeration mismatch at budgets ({ga},{gd}), lag {lag}: {} vs {} scenarios",
                fast.len(),
                naive.len()
            ));
        }
        checked += fast.len();
    }
    Ok(format!("{checked} scenarios cross-checked"))
}

fn projection_check() -> std::result::Result<String, String> {
    let case = fixtures::three_period_case();
    let spec = UncertaintySpec::new(&case, 2, 1, 1).map_err(|e| e.to_string())?;
    let mut projected = 0usize;
    for s in enumerate_binary(&case, &spec, SetVariant::RelaxedBinary, false)
        .map_err(|e| e.to_string())?
    {
        let p = project_into_full(&case, &spec, &s);
        if !is_member(&spec, &p, SetVariant::Full).is_member {
            return Err(format!(
                "projection left the full set: alpha {:?} gamma {:?}",
                p.alpha, p.gamma
            ));
        }
        projected += 1;
    }
    Ok(format!("{projected} scenarios projected into the full set"))
}

fn inclusion_check() -> std::result::Result<String, String> {
    let case = fixtures::three_period_case();
    let spec = UncertaintySpec::new(&case, 2, 2, 1).map_err(|e| e.to_string())?;
    for s in enumerate_binary(&case, &spec, SetVariant::BinaryLinked, false)
        .map_err(|e| e.to_string())?
    {
        if !is_member(&spec, &s, SetVariant::Full).is_member
            || !is_member(&spec, &s, SetVariant::RelaxedContinuous).is_member
        {
            return Err("binary-linked member escaped a wider set".into());
        }
    }
    Ok("binary members contained in wider sets".into())
}

fn optimality_oracle_check() -> std::result::Result<String, String> {
    let mut worst: f64 = 0.0;
    for f in fixtures::micro_fixtures().iter().take(4) {
        let commitment = CommitmentDecision::all_on(&f.case);
        let sp = solve_sp_optimality(
            &f.case,
            &commitment,
            &f.spec(),
            SetVariant::RelaxedBinary,
            ModelVariant::Network,
            &solve_config(),
        )
        .map_err(|e| e.to_string())?;
        let oracle = brute_force_worst_case(
            &f.case,
            &commitment,
            &f.spec(),
            SetVariant::RelaxedBinary,
            ModelVariant::Network,
            &f.case.load_shed_prices,
            BruteForceObjective::Fuel,
            &solve_config(),
        )
        .map_err(|e| e.to_string())?;
        let err = (sp.value - oracle.value).abs() / oracle.value.abs().max(1.0);
        if err > 1e-6 {
            return Err(format!("{}: rel err {err:.2e}", f.name));
        }
        worst = worst.max(err);
    }
    Ok(format!("max rel err {worst:.2e}"))
}

fn feasibility_oracle_check() -> std::result::Result<String, String> {
    for f in fixtures::micro_fixtures().iter().take(3) {
        let commitment = CommitmentDecision::all_on(&f.case);
        let sp = solve_sp_feasibility(
            &f.case,
            &commitment,
            &f.spec(),
            SetVariant::RelaxedBinary,
            ModelVariant::Network,
            &solve_config(),
        )
        .map_err(|e| e.to_string())?;
        let oracle = brute_force_worst_case(
            &f.case,
            &commitment,
            &f.spec(),
            SetVariant::RelaxedBinary,
            ModelVariant::Network,
            &f.case.load_shed_prices,
            BruteForceObjective::ShedVolume,
            &solve_config(),
        )
        .map_err(|e| e.to_string())?;
        if (sp.value - oracle.value).abs() > 1e-6 * oracle.value.abs().max(1.0) {
            return Err(format!(
                "{}: subproblem {} vs oracle {}",
                f.name, sp.value, oracle.value
            ));
        }
    }
    Ok("shed volumes agree".into())
}

fn theorem2_grid_check() -> std::result::Result<String, String> {
    let case = fixtures::copperplate_pair();
    if !check_theorem2_conditions(&case).holds {
        return Err("conforming fixture failed the condition check".into());
    }
    let spec = UncertaintySpec::new(&case, 1, 1, 1).map_err(|e| e.to_string())?;
    let commitment = CommitmentDecision::all_on(&case);
    let binary = brute_force_worst_case(
        &case,
        &commitment,
        &spec,
        SetVariant::BinaryLinked,
        ModelVariant::Copperplate,
        &case.load_shed_prices,
        BruteForceObjective::Fuel,
        &solve_config(),
    )
    .map_err(|e| e.to_string())?;
    let grid = worst_case_grid_search(
        &case,
        &commitment,
        &spec,
        0.25,
        ModelVariant::Copperplate,
        &case.load_shed_prices,
        BruteForceObjective::Fuel,
        &solve_config(),
    )
    .map_err(|e| e.to_string())?;
    let err = (binary.value - grid.value).abs() / binary.value.abs().max(1.0);
    if err > 1e-6 {
        return Err(format!("binary {} vs grid {}", binary.value, grid.value));
    }
    Ok(format!("binary worst case matches 0.25-grid (rel err {err:.2e})"))
}

fn ccg_trace_check() -> std::result::Result<String, String> {
    for f in fixtures::micro_fixtures().iter().take(2) {
        let spec = f.spec();
        let mut config = CcgConfig::new(ModelVariant::Network, SetVariant::BinaryLinked);
        config.solve = solve_config();
        let (solution, state) =
            run_ccg(&f.case, &spec, &config, &f.case.load_shed_prices).map_err(|e| e.to_string())?;
        let mut last_lb = f64::NEG_INFINITY;
        let mut last_ub = f64::INFINITY;
        for row in &state.iteration_log {
            if row.lower_bound < last_lb - 1e-9 {
                return Err(format!("{}: lower bound decreased", f.name));
            }
            if row.upper_bound > last_ub + 1e-9 {
                return Err(format!("{}: upper bound increased", f.name));
            }
            if row.lower_bound > row.upper_bound + 1e-6 * row.upper_bound.abs().max(1.0) {
                return Err(format!("{}: bounds crossed", f.name));
            }
            last_lb = row.lower_bound;
            last_ub = row.upper_bound;
        }
        if solution.status != SolutionStatus::Exact {
            return Err(format!("{}: exact-mode run ended {:?}", f.name, solution.status));
        }
        if solution.notes.iter().any(|n| n.contains("open gap")) {
            return Err(format!(
                "{}: repeated commitment fired before gap closure",
                f.name
            ));
        }
        // The final worst case must shed nothing on these fixtures.
        if state.last_worst_case_shed.map(|s| s > FEASIBILITY_TOL) == Some(true) {
            return Err(format!("{}: final worst case sheds load", f.name));
        }
        let _ = Scenario::nominal(&f.case);
    }
    Ok("bounds monotone, termination exact".into())
}
