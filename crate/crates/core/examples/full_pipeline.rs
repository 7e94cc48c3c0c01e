//! Run every stage on the bundled sample data and print the summary.
//!
//! cargo run --example full_pipeline [-- OUTPUT_DIR]

use std::path::{Path, PathBuf};

use signgloss::pipeline::{run_pipeline, PipelineConfig, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sample = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample");
    let mut config = PipelineConfig::load(sample.join("pipeline.toml"))?;
    config.paths.output = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("signgloss-sample"));

    let manifest = run_pipeline(&config, &RunOptions { timings: true })?;
    let c = &manifest.counts;
    println!("output: {}", config.resolve(&config.paths.output).display());
    println!(
        "templates {} kept {} pairs {} factor {:.2}",
        c.templates, c.kept_templates, c.expanded, c.expansion_factor
    );
    println!("split {}/{}/{}", c.train, c.valid, c.test);
    let g = &manifest.generalization;
    println!("recombinations translated exactly: {}/{}", g.da_exact, g.recombinations);
    println!(
        "unseen templates rejected without DA: {}/{}",
        g.non_da_no_match, g.unseen
    );
    for (name, score) in &manifest.bleu {
        println!("BLEU {name:20} {score:6.2}");
    }
    if let Some(t) = &manifest.timings_ms {
        let total: f64 = t.values().sum();
        println!("{} stages in {total:.0} ms", t.len());
    }
    Ok(())
}
