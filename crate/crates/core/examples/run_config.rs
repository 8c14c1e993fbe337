//! Drive an experiment from a JSON config in-process, as the `skqd run`
//! command does, and print the first rows.
//!
//! `cargo run --release --example run_config -- [config.json] [out-dir]`

use skqd::experiment::{run_to_dir, ExperimentConfig, RunOptions};

const DEFAULT: &str =
    r#"{"kind": "kqd", "n": 6, "d": [3, 5, 9], "sigma": [0.0, 0.01], "seeds": 5}"#;

fn main() -> skqd::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let text = match args.first() {
        Some(p) => std::fs::read_to_string(p)?,
        None => DEFAULT.to_string(),
    };
    let out = args
        .get(1)
        .map_or_else(|| std::env::temp_dir().join("skqd_run"), Into::into);
    let config = ExperimentConfig::from_json(&text)?;
    let (result, files) = run_to_dir(&config, &RunOptions::default(), &out)?;
    for f in &files {
        println!("wrote {}", f.display());
    }
    println!("{}", result.table.header.join(","));
    for row in result.table.rows.iter().take(8) {
        println!(
            "{}",
            row.iter().map(|c| c.render()).collect::<Vec<_>>().join(",")
        );
    }
    Ok(())
}
