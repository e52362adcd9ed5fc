use criterion::{black_box, criterion_group, criterion_main, Criterion};
use robuc_core::fixtures;
use robuc_core::{
    enumerate_binary, run_ccg, solve_recourse, solve_sp_optimality, CcgConfig,
    CommitmentDecision, ModelVariant, Scenario, SetVariant, SolveConfig, UncertaintySpec,
};

fn recourse_lp(c: &mut Criterion) {
    let case = fixtures::copperplate_pair();
    let commitment = CommitmentDecision::all_on(&case);
    let nominal = Scenario::nominal(&case);
    let config = SolveConfig::default();
    c.bench_function("recourse_lp_copperplate_pair", |b| {
        b.iter(|| {
            let outcome = solve_recourse(
                black_box(&case),
                &commitment,
                &nominal,
                ModelVariant::Network,
                &case.load_shed_prices,
                &config,
            )
            .unwrap();
            black_box(outcome);
        })
    });
}

fn worst_case_mip(c: &mut Criterion) {
    let f = &fixtures::micro_fixtures()[1];
    let commitment = CommitmentDecision::all_on(&f.case);
    let spec = f.spec();
    let config = SolveConfig::default();
    c.bench_function("worst_case_mip_single_bus_3p", |b| {
        b.iter(|| {
            let result = solve_sp_optimality(
                black_box(&f.case),
                &commitment,
                &spec,
                SetVariant::RelaxedBinary,
                ModelVariant::Network,
                &config,
            )
            .unwrap();
            black_box(result.value);
        })
    });
}

fn scenario_enumeration(c: &mut Criterion) {
    let case = fixtures::peak_day_case();
    let spec = UncertaintySpec::new(&case, 3, 3, 2).unwrap();
    c.bench_function("enumerate_binary_24p_budget3", |b| {
        b.iter(|| {
            let count = enumerate_binary(black_box(&case), &spec, SetVariant::BinaryLinked, true)
                .unwrap()
                .count();
            black_box(count);
        })
    });
}

fn ccg_end_to_end(c: &mut Criterion) {
    let case = fixtures::copperplate_pair();
    let spec = UncertaintySpec::new(&case, 1, 1, 1).unwrap();
    let config = CcgConfig::new(ModelVariant::Network, SetVariant::BinaryLinked);
    c.bench_function("ccg_copperplate_pair_budgets_1_1", |b| {
        b.iter(|| {
            let (solution, _) =
                run_ccg(black_box(&case), &spec, &config, &case.load_shed_prices).unwrap();
            black_box(solution.objective);
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = recourse_lp, worst_case_mip, scenario_enumeration, ccg_end_to_end
}
criterion_main!(benches);
