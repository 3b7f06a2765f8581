//! Generates a small dataset across all panel configurations, runs the
//! solver at two perception-noise levels, and prints the accuracy tables.
//! The same records are reused so the two rows differ only in noise.

use vsar::codebook::CodebookSet;
use vsar::dataset::{evaluate, generate_records, RunConfig, Seeds};
use vsar::raven::Configuration;

fn main() -> anyhow::Result<()> {
    let mut run = RunConfig {
        d: 3000,
        seeds: Seeds::from_base(0),
        beta: 20.0,
        eta: 0.0,
        configurations: Configuration::ALL.to_vec(),
        n_puzzles: 10,
        output: None,
    };
    run.validate()?;

    let records = generate_records(&run);
    let books = CodebookSet::build(run.d, run.seeds.codebook, run.beta)?;

    for eta in [0.0, 0.2] {
        run.eta = eta;
        let report = evaluate(&run, &records, &books)?;
        println!("eta = {eta}");
        println!("{}", report.to_table());
    }
    Ok(())
}
