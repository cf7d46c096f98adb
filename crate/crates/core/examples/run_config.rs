//! Drives the command-line pipeline from code: builds a run configuration,
//! writes the harmonic comparison and prints the report.

use epac_kit::cli::{cmd_compare_harmonic, RunConfig, TimeGrid};

fn main() -> epac_kit::error::Result<()> {
    let cfg = RunConfig {
        time: TimeGrid {
            t_max: 10.0,
            n_t: 201,
        },
        ..RunConfig::default()
    };
    cfg.validate()?;
    let out = std::env::temp_dir().join("epac-kit-example");
    std::fs::create_dir_all(&out)?;
    let report = cmd_compare_harmonic(&cfg, &out)?;
    println!("config {}", report.config_sha256);
    for check in &report.checks {
        println!(
            "{:<24} {}",
            check.name,
            if check.passed { "ok" } else { "failed" }
        );
    }
    for file in &report.files {
        println!("wrote {}", file.display());
    }
    Ok(())
}
