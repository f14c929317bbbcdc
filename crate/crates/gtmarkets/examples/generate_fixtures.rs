//! Regenerate the bundled synthetic fixture set.
//!
//! ```bash
//! cargo run --example generate_fixtures -- [OUT_DIR]
//! ```
//!
//! The default output directory is `fixtures/` relative to the working
//! directory. Generation is fully seeded, so regenerating over the
//! committed set is a no-op byte-wise.

use gtmarkets::pipeline::{generate_fixture_set, SynthConfig};

fn main() -> gtmarkets::Result<()> {
    let out_dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "fixtures".to_string());
    let config = SynthConfig {
        out_dir: out_dir.into(),
        ..Default::default()
    };
    let written = generate_fixture_set(&config)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    println!(
        "\n{} files; run the pipeline with:\n  cargo run -- report --config {}/config.toml --out target/report",
        written.len(),
        config.out_dir.display()
    );
    Ok(())
}
