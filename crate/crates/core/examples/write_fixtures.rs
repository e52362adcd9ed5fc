//! Regenerates the JSON case files under fixtures/.

fn main() {
    let dir = std::path::Path::new("fixtures");
    std::fs::create_dir_all(dir).unwrap();
    for (name, case) in [
        ("single_bus.json", robuc_core::fixtures::single_bus_two_period()),
        ("two_bus_congested.json", robuc_core::fixtures::two_bus_congested()),
        ("copperplate_pair.json", robuc_core::fixtures::copperplate_pair()),
        ("peak_day.json", robuc_core::fixtures::peak_day_case()),
        ("tight_peak.json", robuc_core::fixtures::tight_peak_case()),
    ] {
        robuc_core::save_case(&case, dir.join(name)).unwrap();
        println!("wrote fixtures/{name}");
    }
}
