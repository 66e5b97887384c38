//! A reproducible Monte Carlo run: configure, execute in parallel, summarize.

use roughness_kit::harness::{run_experiment, summarize_to_csv, EstimatorKind, ExperimentSpec, Model};

fn main() -> roughness_kit::Result<()> {
    let mut spec = ExperimentSpec::new(Model::Fbm, 0.3, vec![8, 10, 12]);
    spec.paths = 50;
    spec.base_seed = 20240901;
    spec.estimators = vec![EstimatorKind::Rhat, EstimatorKind::SeqScale, EstimatorKind::RhatStar];

    // the same spec also round-trips through JSON
    let json = serde_json::to_string_pretty(&spec).expect("spec serializes");
    println!("{json}");
    let spec = ExperimentSpec::from_json(&json)?;

    let result = run_experiment(&spec, 0)?;
    println!("{:<10} {:>4} {:>8} {:>8} {:>8}", "estimator", "n", "q1", "median", "q3");
    for row in &result.rows {
        let s = &row.stats;
        println!("{:<10} {:>4} {:>8.4} {:>8.4} {:>8.4}", row.estimator, row.n, s.q1, s.median, s.q3);
    }

    let out = std::env::temp_dir().join("roughness_kit_summary.csv");
    summarize_to_csv(&result, &out)?;
    println!("summary written to {}", out.display());
    Ok(())
}
