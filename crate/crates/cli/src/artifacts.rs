//! CSV and JSON artifact writers. All numeric CSV output uses six
//! significant digits so files are diffable across runs.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use robuc_core::{
    nominal_capacity_profile, CcgState, CommitmentDecision, GridCase, RobustSolution,
};

/// Formats with six significant digits, fixed-point.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{:.*}", decimals, v)
}

fn period_header(label: &str, horizon: usize) -> String {
    let mut cols = vec![label.to_string()];
    cols.extend((1..=horizon).map(|t| format!("t{t}")));
    cols.join(",")
}

pub fn write_solution_json(dir: &Path, solution: &RobustSolution) -> Result<()> {
    let path = dir.join("solution.json");
    let text = serde_json::to_string_pretty(solution)?;
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_iteration_csv(dir: &Path, state: &CcgState) -> Result<()> {
    let mut out = String::from("iteration,lower_bound,upper_bound,gap,subproblem,scenario_id,seconds\n");
    for row in &state.iteration_log {
        let scenario = row
            .scenario_id
            .map(|id| id.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.iteration,
            sig6(row.lower_bound),
            sig6(row.upper_bound),
            sig6(row.gap),
            row.subproblem,
            scenario,
            sig6(row.seconds),
        ));
    }
    let path = dir.join("iterations.csv");
    fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_commitment_csv(
    dir: &Path,
    case: &GridCase,
    commitment: &CommitmentDecision,
) -> Result<()> {
    let mut out = period_header("generator,quantity", case.horizon);
    out.push('\n');
    for (name, matrix) in [
        ("on", &commitment.on_state),
        ("startup", &commitment.startup),
        ("shutdown", &commitment.shutdown),
    ] {
        for (i, row) in matrix.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|&b| (b as u8).to_string()).collect();
            out.push_str(&format!("{i},{name},{}\n", cells.join(",")));
        }
    }
    let path = dir.join("commitment.csv");
    fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_capacity_profile_csv(
    dir: &Path,
    case: &GridCase,
    commitment: &CommitmentDecision,
) -> Result<()> {
    let profile = nominal_capacity_profile(case, commitment);
    let mut out = period_header("quantity", case.horizon);
    out.push('\n');
    let cells: Vec<String> = profile.iter().map(|&v| sig6(v)).collect();
    out.push_str(&format!("committed_nominal_capacity_mw,{}\n", cells.join(",")));
    let path = dir.join("capacity_profile.csv");
    fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_scenario_json(dir: &Path, solution: &RobustSolution) -> Result<()> {
    if let Some(scenario) = &solution.worst_case_scenario {
        let path = dir.join("worst_case_scenario.json");
        fs::write(&path, scenario.to_json())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub struct SweepRow {
    pub gamma_a: u32,
    pub gamma_d: u32,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub gap: f64,
    pub seconds: f64,
    pub value_relaxed_binary: f64,
}

pub fn write_sweep_csv(dir: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut out = String::from("gamma_a,gamma_d,lower_bound,upper_bound,gap,seconds,value_relaxed_binary\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.gamma_a,
            r.gamma_d,
            sig6(r.lower_bound),
            sig6(r.upper_bound),
            sig6(r.gap),
            sig6(r.seconds),
            sig6(r.value_relaxed_binary),
        ));
    }
    let path = dir.join("results.csv");
    fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
