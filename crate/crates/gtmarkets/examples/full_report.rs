//! End-to-end pipeline run on the bundled synthetic fixtures: ingest,
//! lead-lag scan, the three regression models, per-country TVP fits, and
//! the digest manifest.
//!
//! ```bash
//! cargo run --example full_report
//! ```
//!
//! Artifacts land in a temporary directory; rerun with the same fixtures
//! and seed and every artifact digest is identical.

use gtmarkets::pipeline::{run_report, PipelineConfig};

fn main() -> gtmarkets::Result<()> {
    let fixtures = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let out = tempfile::tempdir().expect("temp output dir");

    let mut config = PipelineConfig::load(&fixtures.join("config.toml"))?;
    config.output_dir = out.path().to_path_buf();
    // Keep the example snappy; the committed config uses 8 starts.
    config.tvp.starts = 2;

    let outcome = run_report(&config)?;
    println!("{} artifacts:", outcome.artifacts.len());
    for artifact in &outcome.artifacts {
        println!("  {}", artifact.file_name().unwrap().to_string_lossy());
    }
    println!("manifest: {}", outcome.manifest_path.display());
    if !outcome.succeeded() {
        println!("failures:");
        for failure in &outcome.failures {
            println!("  {failure}");
        }
    }

    let leadlag = std::fs::read_to_string(out.path().join("leadlag.txt"))?;
    println!("\n{leadlag}");
    let table = std::fs::read_to_string(out.path().join("reg_italy_gt_youtube.txt"))?;
    println!("{table}");
    Ok(())
}
