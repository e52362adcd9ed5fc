//! Built-in test systems.
//!
//! These are shared by the unit tests, the acceptance suite, the benchmarks
//! and the CLI `verify` command, so they live in the library rather than in
//! test code. All of them are small enough for exhaustive scenario
//! enumeration, and the micro fixtures are sized so that an all-on commitment
//! stays feasible at every binary scenario (total capacity at the hottest
//! temperature exceeds the highest demand, and first breakpoints sit at zero
//! output so committed units can idle).

use crate::grid::{Branch, Generator, GridCase, LoadShedPrices, PiecewiseCost};
use crate::uncertainty::UncertaintySpec;

fn generator(
    id: usize,
    bus: usize,
    breakpoints: Vec<(f64, f64)>,
    no_load_cost: f64,
    startup_cost: f64,
    initial_on: bool,
) -> Generator {
    let max_output = breakpoints.last().unwrap().0;
    Generator {
        id,
        bus,
        min_up: 1,
        min_down: 1,
        ramp_up: max_output,
        ramp_down: max_output,
        startup_rate: max_output,
        shutdown_rate: max_output,
        no_load_cost,
        startup_cost,
        cost_curve: PiecewiseCost::new(breakpoints),
        initial_on,
    }
}

fn assemble(
    horizon: usize,
    num_buses: usize,
    branches: Vec<Branch>,
    generators: Vec<Generator>,
    demand_nominal: Vec<Vec<f64>>,
    temperature_nominal: Vec<f64>,
    temperature_deviation: Vec<f64>,
    shed_price: f64,
) -> GridCase {
    let demand_deviation: Vec<Vec<f64>> = demand_nominal
        .iter()
        .map(|row| row.iter().map(|d| d * 0.05).collect())
        .collect();
    GridCase::assemble(
        horizon,
        num_buses,
        branches,
        generators,
        demand_nominal,
        demand_deviation,
        temperature_nominal,
        temperature_deviation,
        LoadShedPrices::uniform(shed_price, horizon),
    )
    .expect("fixture must validate")
}

/// One bus, one generator with a 50..100 MW curve, two periods. Temperature
/// can rise from 60 to 90 degrees, dropping the efficiency factor from 1.0 to
/// 0.9, which is the reference case for the left-hand-side effect.
pub fn single_bus_two_period() -> GridCase {
    let g = generator(
        0,
        0,
        vec![(50.0, 500.0), (100.0, 1200.0)],
        10.0,
        50.0,
        true,
    );
    assemble(
        2,
        1,
        vec![],
        vec![g],
        vec![vec![60.0, 60.0]],
        vec![60.0, 60.0],
        vec![30.0, 30.0],
        1000.0,
    )
}

/// One bus, one zero-minimum generator, three periods. Used heavily by the
/// uncertainty-set tests.
pub fn three_period_case() -> GridCase {
    let g = generator(0, 0, vec![(0.0, 0.0), (100.0, 1000.0)], 5.0, 5.0, true);
    assemble(
        3,
        1,
        vec![],
        vec![g],
        vec![vec![40.0, 50.0, 45.0]],
        vec![60.0, 70.0, 65.0],
        vec![15.0, 15.0, 15.0],
        500.0,
    )
}

/// Three periods with a zero-demand middle period. With `min_down = 1` the
/// only unit pays off to cycle; with `min_down = 2` it must stay on.
pub fn offswitch_case(min_down: usize) -> GridCase {
    let mut g = generator(0, 0, vec![(0.0, 0.0), (60.0, 600.0)], 100.0, 10.0, true);
    g.min_down = min_down;
    assemble(
        3,
        1,
        vec![],
        vec![g],
        vec![vec![30.0, 0.0, 30.0]],
        vec![60.0, 60.0, 60.0],
        vec![0.0, 0.0, 0.0],
        400.0,
    )
}

/// Two buses joined by a 50 MW line, all generation at bus 0 and 80 MW of
/// demand at bus 1. Without load shedding the recourse is infeasible; with it
/// the line saturates and bus 1 sheds the excess.
pub fn two_bus_congested() -> GridCase {
    let g = generator(0, 0, vec![(0.0, 0.0), (200.0, 2000.0)], 10.0, 20.0, true);
    assemble(
        2,
        2,
        vec![Branch {
            id: 0,
            origin_bus: 0,
            destination_bus: 1,
            flow_limit: 50.0,
            reactance: 0.01,
        }],
        vec![g],
        vec![vec![20.0, 20.0], vec![80.0, 80.0]],
        vec![60.0, 60.0],
        vec![15.0, 15.0],
        300.0,
    )
}

/// One bus, a cheap and an expensive unit, two periods. Satisfies the
/// copperplate binary-reduction conditions: flat nominal temperature,
/// constant temperature deviation, constant relative demand deviation.
pub fn copperplate_pair() -> GridCase {
    let cheap = generator(0, 0, vec![(0.0, 0.0), (80.0, 800.0)], 5.0, 10.0, true);
    let dear = generator(1, 0, vec![(0.0, 0.0), (80.0, 1600.0)], 8.0, 12.0, true);
    assemble(
        2,
        1,
        vec![],
        vec![cheap, dear],
        vec![vec![100.0, 120.0]],
        vec![60.0, 60.0],
        vec![15.0, 15.0],
        400.0,
    )
}

/// Three-period sibling of [`copperplate_pair`], also condition-conforming.
pub fn copperplate_trio_t3() -> GridCase {
    let cheap = generator(0, 0, vec![(0.0, 0.0), (80.0, 800.0)], 5.0, 10.0, true);
    let dear = generator(1, 0, vec![(0.0, 0.0), (80.0, 1600.0)], 8.0, 12.0, true);
    assemble(
        3,
        1,
        vec![],
        vec![cheap, dear],
        vec![vec![90.0, 110.0, 100.0]],
        vec![65.0, 65.0, 65.0],
        vec![12.0, 12.0, 12.0],
        400.0,
    )
}

/// A copperplate case that violates the binary-reduction conditions (the
/// temperature deviation varies across periods).
pub fn copperplate_nonconforming() -> GridCase {
    let mut case = copperplate_pair();
    case.temperature_deviation = vec![10.0, 20.0];
    case
}

/// 24-bus / 38-branch / 24-period topology in the shape of the classic
/// reliability test system. Exercises ingestion and validation at a realistic
/// scale; the solver fixtures stay much smaller.
pub fn rts_style_topology() -> GridCase {
    let num_buses = 24;
    let horizon = 24;
    let mut branches = Vec::new();
    // A ring plus chords: 24 ring branches and 14 chords.
    for n in 0..num_buses {
        branches.push(Branch {
            id: branches.len(),
            origin_bus: n,
            destination_bus: (n + 1) % num_buses,
            flow_limit: 175.0,
            reactance: 0.02 + 0.001 * (n % 5) as f64,
        });
    }
    for k in 0..14 {
        let from = (3 * k) % num_buses;
        let to = (3 * k + 9) % num_buses;
        branches.push(Branch {
            id: branches.len(),
            origin_bus: from,
            destination_bus: to,
            flow_limit: 220.0,
            reactance: 0.03 + 0.002 * (k % 3) as f64,
        });
    }
    let gens: Vec<Generator> = [0usize, 4, 8, 12, 16, 20]
        .iter()
        .enumerate()
        .map(|(i, &bus)| {
            generator(
                i,
                bus,
                vec![(0.0, 0.0), (150.0, 1500.0 + 100.0 * i as f64)],
                25.0,
                60.0,
                i % 2 == 0,
            )
        })
        .collect();
    let demand_nominal: Vec<Vec<f64>> = (0..num_buses)
        .map(|n| {
            (0..horizon)
                .map(|t| {
                    let shape = 0.7 + 0.3 * ((t as f64 - 17.0) * std::f64::consts::PI / 24.0).cos();
                    20.0 * shape * (1.0 + 0.02 * (n % 7) as f64)
                })
                .collect()
        })
        .collect();
    let temperature: Vec<f64> = (0..horizon)
        .map(|t| 70.0 + 12.0 * ((t as f64 - 15.0) * std::f64::consts::PI / 12.0).cos())
        .collect();
    assemble(
        horizon,
        num_buses,
        branches,
        gens,
        demand_nominal,
        temperature,
        vec![15.0; horizon],
        350.0,
    )
}

/// 24-period, 3-bus network case with a late-afternoon peak, 15-degree
/// temperature deviations and 5% demand deviations. Small enough that a full
/// budget sweep converges quickly.
pub fn peak_day_case() -> GridCase {
    let horizon = 24;
    let branches = vec![
        Branch {
            id: 0,
            origin_bus: 0,
            destination_bus: 1,
            flow_limit: 150.0,
            reactance: 0.01,
        },
        Branch {
            id: 1,
            origin_bus: 1,
            destination_bus: 2,
            flow_limit: 150.0,
            reactance: 0.01,
        },
        Branch {
            id: 2,
            origin_bus: 0,
            destination_bus: 2,
            flow_limit: 150.0,
            reactance: 0.01,
        },
    ];
    let base = generator(0, 0, vec![(0.0, 0.0), (120.0, 960.0)], 40.0, 80.0, true);
    let mid = generator(1, 1, vec![(0.0, 0.0), (80.0, 800.0)], 30.0, 60.0, false);
    let peaker = generator(2, 2, vec![(0.0, 0.0), (60.0, 900.0)], 20.0, 40.0, false);
    // System demand between 120 and 200 MW, peaking at hour 17.
    let system: Vec<f64> = (0..horizon)
        .map(|t| {
            let x = (t as f64 - 17.0) * std::f64::consts::PI / 12.0;
            120.0 + 80.0 * (0.5 + 0.5 * x.cos()).powi(2)
        })
        .collect();
    let shares = [0.3, 0.4, 0.3];
    let demand: Vec<Vec<f64>> = shares
        .iter()
        .map(|s| system.iter().map(|d| s * d).collect())
        .collect();
    let temperature: Vec<f64> = (0..horizon)
        .map(|t| 70.0 + 10.0 * ((t as f64 - 16.0) * std::f64::consts::PI / 12.0).cos())
        .collect();
    assemble(
        horizon,
        3,
        branches,
        vec![base, mid, peaker],
        demand,
        temperature,
        vec![15.0; horizon],
        500.0,
    )
}

/// Periods regarded as the demand peak of [`tight_peak_case`].
pub const TIGHT_PEAK_PERIODS: [usize; 3] = [2, 3, 4];

/// Six-period single-bus case whose peak is tight against capacity: at
/// nominal temperature the two cheaper units cover the peak, but any
/// 15-degree rise there forces the peaker online.
pub fn tight_peak_case() -> GridCase {
    let base = generator(0, 0, vec![(0.0, 0.0), (100.0, 800.0)], 20.0, 40.0, true);
    let mid = generator(1, 0, vec![(0.0, 0.0), (50.0, 600.0)], 15.0, 30.0, false);
    let peaker = generator(2, 0, vec![(0.0, 0.0), (50.0, 750.0)], 10.0, 25.0, false);
    assemble(
        6,
        1,
        vec![],
        vec![base, mid, peaker],
        vec![vec![80.0, 95.0, 115.0, 125.0, 115.0, 90.0]],
        vec![70.0, 75.0, 85.0, 90.0, 85.0, 75.0],
        vec![15.0; 6],
        600.0,
    )
}

/// A micro fixture bundles a case with the budgets and lag it is meant to be
/// stressed with.
pub struct MicroFixture {
    pub name: &'static str,
    pub case: GridCase,
    pub budget_temperature: u32,
    pub budget_demand: u32,
    pub lag: usize,
}

impl MicroFixture {
    pub fn spec(&self) -> UncertaintySpec {
        UncertaintySpec::new(
            &self.case,
            self.budget_temperature,
            self.budget_demand,
            self.lag,
        )
        .expect("fixture lag fits horizon")
    }
}

/// The oracle-equivalence corpus: small systems (at most 4 periods, 3 buses,
/// 3 generators) with varied topology, costs, budgets and lags.
pub fn micro_fixtures() -> Vec<MicroFixture> {
    let mut out = Vec::new();

    out.push(MicroFixture {
        name: "single-bus-2p",
        case: single_bus_two_period(),
        budget_temperature: 1,
        budget_demand: 1,
        lag: 0,
    });

    out.push(MicroFixture {
        name: "single-bus-3p",
        case: three_period_case(),
        budget_temperature: 1,
        budget_demand: 2,
        lag: 1,
    });

    out.push(MicroFixture {
        name: "copperplate-pair-2p",
        case: copperplate_pair(),
        budget_temperature: 1,
        budget_demand: 1,
        lag: 0,
    });

    out.push(MicroFixture {
        name: "copperplate-trio-3p",
        case: copperplate_trio_t3(),
        budget_temperature: 2,
        budget_demand: 2,
        lag: 1,
    });

    // Two buses, ample line: network constraints present but slack.
    let wide_line = {
        let g0 = generator(0, 0, vec![(0.0, 0.0), (90.0, 990.0)], 8.0, 15.0, true);
        let g1 = generator(1, 1, vec![(0.0, 0.0), (70.0, 1120.0)], 6.0, 12.0, true);
        assemble(
            2,
            2,
            vec![Branch {
                id: 0,
                origin_bus: 0,
                destination_bus: 1,
                flow_limit: 120.0,
                reactance: 0.01,
            }],
            vec![g0, g1],
            vec![vec![50.0, 60.0], vec![45.0, 55.0]],
            vec![62.0, 68.0],
            vec![14.0, 14.0],
            450.0,
        )
    };
    out.push(MicroFixture {
        name: "two-bus-wide-line-2p",
        case: wide_line,
        budget_temperature: 1,
        budget_demand: 1,
        lag: 1,
    });

    // Two buses where the line binds in hot hours but stays feasible: bus 1
    // has local backup capacity.
    let binding_line = {
        let g0 = generator(0, 0, vec![(0.0, 0.0), (120.0, 960.0)], 8.0, 15.0, true);
        let g1 = generator(1, 1, vec![(0.0, 0.0), (60.0, 1500.0)], 5.0, 10.0, true);
        assemble(
            3,
            2,
            vec![Branch {
                id: 0,
                origin_bus: 0,
                destination_bus: 1,
                flow_limit: 35.0,
                reactance: 0.02,
            }],
            vec![g0, g1],
            vec![vec![40.0, 55.0, 45.0], vec![50.0, 65.0, 55.0]],
            vec![65.0, 75.0, 70.0],
            vec![15.0, 15.0, 15.0],
            450.0,
        )
    };
    out.push(MicroFixture {
        name: "two-bus-binding-line-3p",
        case: binding_line,
        budget_temperature: 1,
        budget_demand: 1,
        lag: 0,
    });

    // Four periods, one bus, one unit; deeper budgets.
    let four_period = {
        let g = generator(0, 0, vec![(0.0, 0.0), (110.0, 1210.0)], 7.0, 9.0, true);
        assemble(
            4,
            1,
            vec![],
            vec![g],
            vec![vec![45.0, 60.0, 70.0, 50.0]],
            vec![60.0, 68.0, 74.0, 66.0],
            vec![15.0, 15.0, 15.0, 15.0],
            500.0,
        )
    };
    out.push(MicroFixture {
        name: "single-bus-4p",
        case: four_period,
        budget_temperature: 2,
        budget_demand: 2,
        lag: 1,
    });

    // Ramp-limited pair: the ramp constraints bind between periods.
    let ramp_bound = {
        let mut g0 = generator(0, 0, vec![(0.0, 0.0), (80.0, 880.0)], 6.0, 10.0, true);
        g0.ramp_up = 25.0;
        g0.ramp_down = 25.0;
        let g1 = generator(1, 0, vec![(0.0, 0.0), (60.0, 1080.0)], 5.0, 8.0, true);
        assemble(
            3,
            1,
            vec![],
            vec![g0, g1],
            vec![vec![60.0, 85.0, 65.0]],
            vec![64.0, 72.0, 68.0],
            vec![13.0, 13.0, 13.0],
            450.0,
        )
    };
    out.push(MicroFixture {
        name: "ramp-bound-3p",
        case: ramp_bound,
        budget_temperature: 1,
        budget_demand: 2,
        lag: 1,
    });

    // Three buses in a triangle with three units of very different cost.
    let triangle = {
        let g0 = generator(0, 0, vec![(0.0, 0.0), (70.0, 490.0)], 6.0, 10.0, true);
        let g1 = generator(1, 1, vec![(0.0, 0.0), (50.0, 650.0)], 5.0, 9.0, true);
        let g2 = generator(2, 2, vec![(0.0, 0.0), (40.0, 880.0)], 4.0, 8.0, true);
        let branch = |id, from, to| Branch {
            id,
            origin_bus: from,
            destination_bus: to,
            flow_limit: 80.0,
            reactance: 0.015,
        };
        assemble(
            2,
            3,
            vec![branch(0, 0, 1), branch(1, 1, 2), branch(2, 0, 2)],
            vec![g0, g1, g2],
            vec![vec![35.0, 45.0], vec![30.0, 40.0], vec![25.0, 35.0]],
            vec![66.0, 72.0],
            vec![15.0, 15.0],
            500.0,
        )
    };
    out.push(MicroFixture {
        name: "triangle-3bus-2p",
        case: triangle,
        budget_temperature: 1,
        budget_demand: 1,
        lag: 1,
    });

    // Curved three-segment cost stack: exercises interior breakpoints.
    let curved = {
        let g = generator(
            0,
            0,
            vec![(0.0, 0.0), (40.0, 280.0), (80.0, 720.0), (120.0, 1440.0)],
            9.0,
            14.0,
            true,
        );
        assemble(
            3,
            1,
            vec![],
            vec![g],
            vec![vec![55.0, 75.0, 60.0]],
            vec![58.0, 70.0, 64.0],
            vec![16.0, 16.0, 16.0],
            550.0,
        )
    };
    out.push(MicroFixture {
        name: "curved-costs-3p",
        case: curved,
        budget_temperature: 2,
        budget_demand: 1,
        lag: 0,
    });

    // Asymmetric initial states: the second unit starts offline and is
    // expensive to bring up.
    let cold_start = {
        let g0 = generator(0, 0, vec![(0.0, 0.0), (85.0, 850.0)], 7.0, 12.0, true);
        let g1 = generator(1, 0, vec![(0.0, 0.0), (45.0, 720.0)], 4.0, 35.0, false);
        assemble(
            2,
            1,
            vec![],
            vec![g0, g1],
            vec![vec![65.0, 80.0]],
            vec![63.0, 70.0],
            vec![15.0, 15.0],
            520.0,
        )
    };
    out.push(MicroFixture {
        name: "cold-start-2p",
        case: cold_start,
        budget_temperature: 1,
        budget_demand: 2,
        lag: 1,
    });

    // Hot-and-deep: both budgets at their maximum for the horizon.
    let saturated = {
        let g0 = generator(0, 0, vec![(0.0, 0.0), (75.0, 900.0)], 6.0, 11.0, true);
        let g1 = generator(1, 0, vec![(0.0, 0.0), (55.0, 440.0)], 7.0, 9.0, true);
        assemble(
            2,
            1,
            vec![],
            vec![g0, g1],
            vec![vec![70.0, 90.0]],
            vec![70.0, 76.0],
            vec![18.0, 18.0],
            480.0,
        )
    };
    out.push(MicroFixture {
        name: "saturated-budgets-2p",
        case: saturated,
        budget_temperature: 2,
        budget_demand: 2,
        lag: 0,
    });

    out
}

/// Micro fixtures restricted to two periods and at most two generators, for
/// exhaustive commitment-level enumeration.
pub fn bilevel_fixtures() -> Vec<MicroFixture> {
    micro_fixtures()
        .into_iter()
        .filter(|f| f.case.horizon == 2 && f.case.num_generators() <= 2)
        .collect()
}
