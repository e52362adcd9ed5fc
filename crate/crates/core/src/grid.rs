//! Power-system data model, case-file ingestion, and validation.
//!
//! A case is a single JSON document with top-level keys `horizon`, `buses`,
//! `branches`, `generators`, `demand_nominal`, `demand_deviation`,
//! `temperature_nominal`, `temperature_deviation` and `load_shed_prices`.
//! Units are MW, $, degrees Fahrenheit and per-unit reactance. Bus, branch and
//! generator ids must be contiguous 0-based indices in file order; adjacency
//! lists are derived at load time rather than stored, so they can never
//! disagree with the branch endpoints.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A temperature this high or higher would drive the generation efficiency
/// factor `1.2 - A/300` to zero or below, so cases must stay strictly under it.
pub const MAX_TEMPERATURE: f64 = 360.0;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("cannot read case file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed case file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid case: {location}: {message}")]
    Validation { location: String, message: String },
}

fn invalid(location: impl Into<String>, message: impl Into<String>) -> GridError {
    GridError::Validation {
        location: location.into(),
        message: message.into(),
    }
}

/// Piecewise-linear fuel cost given as (output MW, cost $) breakpoints.
/// The convex-combination dispatch formulation prices output correctly only
/// when the curve is convex, so convexity is validated at load time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseCost {
    pub breakpoints: Vec<(f64, f64)>,
}

impl PiecewiseCost {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Self {
        Self { breakpoints }
    }

    /// Output at the first breakpoint: the minimum level while committed.
    pub fn min_output(&self) -> f64 {
        self.breakpoints.first().expect("validated: >= 2 points").0
    }

    pub fn max_output(&self) -> f64 {
        self.breakpoints.last().expect("validated: >= 2 points").0
    }

    /// Interpolated cost of producing `output` MW. Used by tests and oracles;
    /// the optimization models use the convex-combination form instead.
    pub fn cost_at(&self, output: f64) -> f64 {
        let pts = &self.breakpoints;
        if output <= pts[0].0 {
            return pts[0].1;
        }
        for w in pts.windows(2) {
            let (p0, c0) = w[0];
            let (p1, c1) = w[1];
            if output <= p1 {
                return c0 + (c1 - c0) * (output - p0) / (p1 - p0);
            }
        }
        pts.last().unwrap().1
    }

    /// Steepest marginal cost over all segments, in $/MW.
    pub fn max_marginal_rate(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .fold(0.0, f64::max)
    }

    fn validate(&self, location: &str) -> Result<(), GridError> {
        if self.breakpoints.len() < 2 {
            return Err(invalid(location, "cost curve needs at least 2 breakpoints"));
        }
        let mut prev_slope = f64::NEG_INFINITY;
        for (k, w) in self.breakpoints.windows(2).enumerate() {
            let (p0, c0) = w[0];
            let (p1, c1) = w[1];
            if p1 <= p0 {
                return Err(invalid(
                    location,
                    format!("breakpoint outputs must be strictly increasing (k={k})"),
                ));
            }
            let slope = (c1 - c0) / (p1 - p0);
            if slope < 0.0 {
                return Err(invalid(
                    location,
                    format!("costs must be nondecreasing in output (k={k})"),
                ));
            }
            if slope < prev_slope - 1e-12 {
                return Err(invalid(
                    location,
                    format!("cost curve must be convex: slope decreases at k={k}"),
                ));
            }
            prev_slope = slope;
        }
        if self.breakpoints[0].0 < 0.0 {
            return Err(invalid(location, "breakpoint outputs must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadShedPrices {
    pub price_per_period: Vec<f64>,
}

impl LoadShedPrices {
    pub fn uniform(price: f64, horizon: usize) -> Self {
        Self {
            price_per_period: vec![price; horizon],
        }
    }

    pub fn max_price(&self) -> f64 {
        self.price_per_period.iter().copied().fold(0.0, f64::max)
    }
}

/// A bus with adjacency derived from the case topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: usize,
    pub attached_generator_ids: Vec<usize>,
    pub outgoing_branch_ids: Vec<usize>,
    pub incoming_branch_ids: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub id: usize,
    pub origin_bus: usize,
    pub destination_bus: usize,
    /// Max flow magnitude in MW.
    pub flow_limit: f64,
    /// Per-unit reactance.
    pub reactance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: usize,
    pub bus: usize,
    /// Minimum up/down times in periods.
    pub min_up: usize,
    pub min_down: usize,
    /// Ramp limits in MW per period.
    pub ramp_up: f64,
    pub ramp_down: f64,
    /// Max output jumps in MW when starting up / shutting down.
    pub startup_rate: f64,
    pub shutdown_rate: f64,
    pub no_load_cost: f64,
    pub startup_cost: f64,
    pub cost_curve: PiecewiseCost,
    /// Whether the unit is on just before the first period. A unit that is
    /// off here incurs a startup when committed in period 1.
    pub initial_on: bool,
}

/// Immutable description of the system over the planning horizon.
/// Demand matrices are bus-major (`demand_nominal[bus][period]`); temperature
/// series are global, one value per period for all buses.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCase {
    pub horizon: usize,
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    pub generators: Vec<Generator>,
    pub demand_nominal: Vec<Vec<f64>>,
    pub demand_deviation: Vec<Vec<f64>>,
    pub temperature_nominal: Vec<f64>,
    pub temperature_deviation: Vec<f64>,
    pub load_shed_prices: LoadShedPrices,
}

/// On-disk shape of a case. Buses are stored as bare ids; adjacency is
/// rebuilt on load.
#[derive(Debug, Serialize, Deserialize)]
struct RawCase {
    horizon: usize,
    buses: Vec<RawBus>,
    branches: Vec<Branch>,
    generators: Vec<Generator>,
    demand_nominal: Vec<Vec<f64>>,
    demand_deviation: Vec<Vec<f64>>,
    temperature_nominal: Vec<f64>,
    temperature_deviation: Vec<f64>,
    load_shed_prices: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawBus {
    id: usize,
}

impl GridCase {
    /// Builds a validated case from raw parts, deriving bus adjacency.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        horizon: usize,
        num_buses: usize,
        branches: Vec<Branch>,
        generators: Vec<Generator>,
        demand_nominal: Vec<Vec<f64>>,
        demand_deviation: Vec<Vec<f64>>,
        temperature_nominal: Vec<f64>,
        temperature_deviation: Vec<f64>,
        load_shed_prices: LoadShedPrices,
    ) -> Result<Self, GridError> {
        let mut buses: Vec<Bus> = (0..num_buses)
            .map(|id| Bus {
                id,
                attached_generator_ids: Vec::new(),
                outgoing_branch_ids: Vec::new(),
                incoming_branch_ids: Vec::new(),
            })
            .collect();
        for branch in &branches {
            if branch.origin_bus >= num_buses || branch.destination_bus >= num_buses {
                return Err(invalid(
                    format!("branches[{}]", branch.id),
                    "branch endpoint references unknown bus",
                ));
            }
            buses[branch.origin_bus].outgoing_branch_ids.push(branch.id);
            buses[branch.destination_bus]
                .incoming_branch_ids
                .push(branch.id);
        }
        for generator in &generators {
            if generator.bus >= num_buses {
                return Err(invalid(
                    format!("generators[{}]", generator.id),
                    "generator references unknown bus",
                ));
            }
            buses[generator.bus].attached_generator_ids.push(generator.id);
        }
        let case = Self {
            horizon,
            buses,
            branches,
            generators,
            demand_nominal,
            demand_deviation,
            temperature_nominal,
            temperature_deviation,
            load_shed_prices,
        };
        case.validate()?;
        Ok(case)
    }

    pub fn num_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn num_branches(&self) -> usize {
        self.branches.len()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Total demand across buses in period `t`.
    pub fn total_nominal_demand(&self, t: usize) -> f64 {
        self.demand_nominal.iter().map(|row| row[t]).sum()
    }

    fn validate(&self) -> Result<(), GridError> {
        if self.horizon < 1 {
            return Err(invalid("horizon", "horizon must be at least 1"));
        }
        for (n, bus) in self.buses.iter().enumerate() {
            if bus.id != n {
                return Err(invalid(
                    format!("buses[{n}]"),
                    "bus ids must be contiguous 0-based indices in order",
                ));
            }
        }
        for (l, branch) in self.branches.iter().enumerate() {
            let loc = format!("branches[{l}]");
            if branch.id != l {
                return Err(invalid(loc, "branch ids must be contiguous 0-based indices"));
            }
            if branch.origin_bus == branch.destination_bus {
                return Err(invalid(loc, "branch origin and destination must differ"));
            }
            if !(branch.flow_limit > 0.0) {
                return Err(invalid(loc, "branch flow_limit must be positive"));
            }
            if !(branch.reactance > 0.0) {
                return Err(invalid(loc, "branch reactance must be positive"));
            }
        }
        for (i, generator) in self.generators.iter().enumerate() {
            let loc = format!("generators[{i}]");
            if generator.id != i {
                return Err(invalid(loc, "generator ids must be contiguous 0-based indices"));
            }
            if generator.min_up < 1 || generator.min_down < 1 {
                return Err(invalid(loc, "min_up and min_down must be at least 1 period"));
            }
            for (name, value) in [
                ("ramp_up", generator.ramp_up),
                ("ramp_down", generator.ramp_down),
                ("startup_rate", generator.startup_rate),
                ("shutdown_rate", generator.shutdown_rate),
                ("no_load_cost", generator.no_load_cost),
                ("startup_cost", generator.startup_cost),
            ] {
                if !(value >= 0.0) {
                    return Err(invalid(loc, format!("{name} must be nonnegative")));
                }
            }
            generator.cost_curve.validate(&format!("{loc}.cost_curve"))?;
        }
        self.validate_matrix("demand_nominal", &self.demand_nominal)?;
        self.validate_matrix("demand_deviation", &self.demand_deviation)?;
        for (name, series) in [
            ("temperature_nominal", &self.temperature_nominal),
            ("temperature_deviation", &self.temperature_deviation),
        ] {
            if series.len() != self.horizon {
                return Err(invalid(name, "length must equal horizon"));
            }
            if !series.iter().all(|v| v.is_finite()) {
                return Err(invalid(name, "values must be finite"));
            }
        }
        if self.temperature_deviation.iter().any(|&d| d < 0.0) {
            return Err(invalid("temperature_deviation", "values must be nonnegative"));
        }
        for t in 0..self.horizon {
            if self.temperature_nominal[t] + self.temperature_deviation[t] >= MAX_TEMPERATURE {
                return Err(invalid(
                    format!("temperature_nominal[{t}]"),
                    format!(
                        "nominal plus deviation must stay below {MAX_TEMPERATURE} to keep the \
                         efficiency factor positive"
                    ),
                ));
            }
        }
        if self.load_shed_prices.price_per_period.len() != self.horizon {
            return Err(invalid("load_shed_prices", "length must equal horizon"));
        }
        if self
            .load_shed_prices
            .price_per_period
            .iter()
            .any(|&p| !(p >= 0.0) || !p.is_finite())
        {
            return Err(invalid("load_shed_prices", "prices must be nonnegative"));
        }
        Ok(())
    }

    fn validate_matrix(&self, name: &str, matrix: &[Vec<f64>]) -> Result<(), GridError> {
        if matrix.len() != self.buses.len() {
            return Err(invalid(name, "row count must equal number of buses"));
        }
        for (n, row) in matrix.iter().enumerate() {
            if row.len() != self.horizon {
                return Err(invalid(
                    format!("{name}[{n}]"),
                    "column count must equal horizon",
                ));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(invalid(format!("{name}[{n}]"), "values must be finite"));
            }
            if row.iter().any(|&v| v < 0.0) {
                return Err(invalid(format!("{name}[{n}]"), "values must be nonnegative"));
            }
        }
        Ok(())
    }
}

/// Reads and validates a case file.
pub fn load_case<P: AsRef<Path>>(path: P) -> Result<GridCase, GridError> {
    let text = std::fs::read_to_string(path)?;
    load_case_str(&text)
}

/// Same as [`load_case`] but from an in-memory JSON string.
pub fn load_case_str(text: &str) -> Result<GridCase, GridError> {
    let raw: RawCase = serde_json::from_str(text)?;
    for (n, bus) in raw.buses.iter().enumerate() {
        if bus.id != n {
            return Err(invalid(
                format!("buses[{n}]"),
                "bus ids must be contiguous 0-based indices in order",
            ));
        }
    }
    GridCase::assemble(
        raw.horizon,
        raw.buses.len(),
        raw.branches,
        raw.generators,
        raw.demand_nominal,
        raw.demand_deviation,
        raw.temperature_nominal,
        raw.temperature_deviation,
        LoadShedPrices {
            price_per_period: raw.load_shed_prices,
        },
    )
}

/// Writes a case back to its JSON form. `load_case(save_case(c)) == c` for
/// every validated case.
pub fn save_case<P: AsRef<Path>>(case: &GridCase, path: P) -> Result<(), GridError> {
    std::fs::write(path, case_to_json(case)?)?;
    Ok(())
}

pub fn case_to_json(case: &GridCase) -> Result<String, GridError> {
    let raw = RawCase {
        horizon: case.horizon,
        buses: case.buses.iter().map(|b| RawBus { id: b.id }).collect(),
        branches: case.branches.clone(),
        generators: case.generators.clone(),
        demand_nominal: case.demand_nominal.clone(),
        demand_deviation: case.demand_deviation.clone(),
        temperature_nominal: case.temperature_nominal.clone(),
        temperature_deviation: case.temperature_deviation.clone(),
        load_shed_prices: case.load_shed_prices.price_per_period.clone(),
    };
    Ok(serde_json::to_string_pretty(&raw)?)
}

/// Rescales the demand profile column by column. Deviations scale with their
/// nominal values so the relative deviation of each bus-period is preserved.
pub fn scale_demand_profile(case: &GridCase, hourly_shape: &[f64]) -> Result<GridCase, GridError> {
    if hourly_shape.len() != case.horizon {
        return Err(invalid(
            "hourly_shape",
            format!(
                "length {} does not match horizon {}",
                hourly_shape.len(),
                case.horizon
            ),
        ));
    }
    if hourly_shape.iter().any(|&s| !(s > 0.0)) {
        return Err(invalid("hourly_shape", "entries must be positive"));
    }
    let mut scaled = case.clone();
    for row in scaled.demand_nominal.iter_mut() {
        for (t, v) in row.iter_mut().enumerate() {
            *v *= hourly_shape[t];
        }
    }
    for row in scaled.demand_deviation.iter_mut() {
        for (t, v) in row.iter_mut().enumerate() {
            *v *= hourly_shape[t];
        }
    }
    scaled.validate()?;
    Ok(scaled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn tiny_case_json() -> String {
        case_to_json(&fixtures::single_bus_two_period()).unwrap()
    }

    #[test]
    fn loads_single_bus_two_period_fixture() {
        let case = load_case_str(&tiny_case_json()).unwrap();
        assert_eq!(case.horizon, 2);
        assert_eq!(case.num_generators(), 1);
        assert_eq!(case.num_buses(), 1);
        assert_eq!(case.buses[0].attached_generator_ids, vec![0]);
    }

    #[test]
    fn zero_reactance_names_branch_invariant() {
        let case = fixtures::two_bus_congested();
        let mut json: serde_json::Value = serde_json::from_str(&case_to_json(&case).unwrap()).unwrap();
        json["branches"][0]["reactance"] = serde_json::json!(0.0);
        let err = load_case_str(&json.to_string()).unwrap_err();
        match err {
            GridError::Validation { location, message } => {
                assert!(location.contains("branches[0]"), "{location}");
                assert!(message.contains("reactance"), "{message}");
            }
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn rts_style_counts_round_trip() {
        let case = fixtures::rts_style_topology();
        assert_eq!(case.horizon, 24);
        assert_eq!(case.num_buses(), 24);
        assert_eq!(case.num_branches(), 38);
        let reloaded = load_case_str(&case_to_json(&case).unwrap()).unwrap();
        assert_eq!(reloaded.horizon, 24);
        assert_eq!(reloaded.num_buses(), 24);
        assert_eq!(reloaded.num_branches(), 38);
        assert_eq!(reloaded, case);
    }

    #[test]
    fn save_load_round_trip_is_identity() {
        let case = fixtures::two_bus_congested();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("case.json");
        save_case(&case, &path).unwrap();
        let reloaded = load_case(&path).unwrap();
        assert_eq!(reloaded, case);
    }

    #[test]
    fn scaling_by_ones_is_identity() {
        let case = fixtures::single_bus_two_period();
        let scaled = scale_demand_profile(&case, &[1.0, 1.0]).unwrap();
        assert_eq!(scaled, case);
    }

    #[test]
    fn scaling_multiplies_columns() {
        let mut case = fixtures::single_bus_two_period();
        case.demand_nominal = vec![vec![100.0, 100.0]];
        let scaled = scale_demand_profile(&case, &[0.5, 2.0]).unwrap();
        assert_eq!(scaled.demand_nominal[0], vec![50.0, 200.0]);
    }

    #[test]
    fn peak_shape_preserves_column_sum_ratios() {
        let case = fixtures::rts_style_topology();
        let shape: Vec<f64> = (0..24).map(|t| 0.6 + 0.4 * (t as f64 / 23.0)).collect();
        let scaled = scale_demand_profile(&case, &shape).unwrap();
        for t in 0..24 {
            let before: f64 = case.demand_nominal.iter().map(|r| r[t]).sum();
            let after: f64 = scaled.demand_nominal.iter().map(|r| r[t]).sum();
            assert!((after - before * shape[t]).abs() < 1e-9 * before.max(1.0));
        }
    }

    #[test]
    fn shape_length_mismatch_is_rejected() {
        let case = fixtures::single_bus_two_period();
        assert!(scale_demand_profile(&case, &[1.0]).is_err());
    }

    #[test]
    fn hot_case_beyond_domain_is_rejected() {
        let mut json: serde_json::Value = serde_json::from_str(&tiny_case_json()).unwrap();
        json["temperature_nominal"][1] = serde_json::json!(350.0);
        json["temperature_deviation"][1] = serde_json::json!(20.0);
        let err = load_case_str(&json.to_string()).unwrap_err();
        assert!(err.to_string().contains("efficiency factor"));
    }

    #[test]
    fn nonconvex_cost_curve_is_rejected() {
        let mut json: serde_json::Value = serde_json::from_str(&tiny_case_json()).unwrap();
        json["generators"][0]["cost_curve"]["breakpoints"] =
            serde_json::json!([[0.0, 0.0], [50.0, 1000.0], [100.0, 1200.0]]);
        let err = load_case_str(&json.to_string()).unwrap_err();
        assert!(err.to_string().contains("convex"), "{err}");
    }

    #[test]
    fn nan_in_file_is_a_parse_error() {
        let text = tiny_case_json().replace("\"horizon\": 2", "\"horizon\": 2, \"x\": NaN");
        assert!(matches!(load_case_str(&text), Err(GridError::Parse(_))));
    }
}
