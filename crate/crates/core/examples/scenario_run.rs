//! Running a scenario file and printing the report, as the CLI does.
//!
//! `cargo run --example scenario_run -- path/to/scenario.json`

use condop::scenario::{RunOptions, Scenario};

fn main() -> condop::Result<()> {
    let scenario = match std::env::args().nth(1) {
        Some(path) => Scenario::load(path.as_ref())?,
        None => Scenario::from_json(
            r#"{
                "schema_version": 1,
                "space": { "weights": [0.25, 0.25, 0.25, 0.25] },
                "partition": { "assignment": [0, 0, 1, 1] },
                "u": { "values": [0, 0, 1, 1] },
                "p": 3, "q": 1.5,
                "analyses": ["support_sets", "classify_cross_exponent", "takagi_quantities"]
            }"#,
        )?,
    };
    let outcome = scenario.run(&RunOptions {
        seed: Some(1),
        strict_oracle: false,
    })?;
    print!("{}", outcome.report.to_json());
    eprintln!(
        "audit failures: {}, oracle flags: {}",
        outcome.audit_failures.len(),
        outcome.oracle_flags.len()
    );
    Ok(())
}
