//! Writes a Tabakov-Vardi corpus to a directory and benchmarks pipelines on it
//! into a CSV report, the same flow as `tareduce generate` + `tareduce bench`.
//!
//! ```text
//! cargo run --release --example random_corpus [-- OUT_DIR]
//! ```

use std::path::PathBuf;

use tareduce::experiment::{bench, parse_pipeline_list, RunConfig};
use tareduce::generator::{tabakov_vardi, TvParams};
use tareduce::io::{parse_timbuk, serialize_timbuk, write_report_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("tareduce-corpus"));
    std::fs::create_dir_all(&dir)?;

    for seed in 0..20u64 {
        let a = tabakov_vardi(&TvParams::new(5, 2, 2.0, 0.4, seed));
        std::fs::write(
            dir.join(format!("tv{seed:03}.tim")),
            serialize_timbuk(&a, &format!("seed{seed}")),
        )?;
    }

    let mut corpus = Vec::new();
    let mut paths: Vec<_> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    paths.sort();
    for path in paths
        .iter()
        .filter(|p| p.extension().is_some_and(|x| x == "tim"))
    {
        let id = path.file_stem().unwrap().to_string_lossy().into_owned();
        corpus.push((id, parse_timbuk(&std::fs::read_to_string(path)?)?));
    }

    let pipelines = parse_pipeline_list("H,H(2,2),S2,C,H+C+H")?;
    let rows = bench(&corpus, &pipelines, &RunConfig::default(), 4);
    let csv = dir.join("report.csv");
    std::fs::write(&csv, write_report_csv(&rows))?;
    println!(
        "{} automata, {} rows written to {}",
        corpus.len(),
        rows.len(),
        csv.display()
    );
    print!("{}", write_report_csv(&rows[..pipelines.len()]));
    Ok(())
}
