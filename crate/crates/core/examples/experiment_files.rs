//! Drives a run from a JSON config, then reads the outputs back and checks
//! them against the manifest.

use oran_handover::harness::{parse_config, read_csv, run_experiment, sha256_file, EpisodeMetrics, Manifest};
use oran_handover::Result;

pub fn run() -> Result<usize> {
    let dir = tempfile::tempdir().expect("temp dir");
    let text = format!(
        r#"{{
            "policy": "static:4",
            "episodes": 2,
            "seeds": [1, 2],
            "output_dir": {:?},
            "env": {{ "episode_len": 60, "g_th": 17000 }}
        }}"#,
        dir.path().join("run")
    );
    let cfg = parse_config(&text)?;
    println!("config hash {}", cfg.hash());
    let report = run_experiment(&cfg)?;

    let rows: Vec<EpisodeMetrics> = read_csv(&report.out_dir.join("summary.csv"))?;
    for r in &rows {
        println!(
            "seed {} episode {}: objective {:.3}, gops violation steps {}",
            r.seed, r.episode, r.mean_objective, r.gops_violation_steps
        );
    }

    let manifest = Manifest::read(&report.out_dir.join("manifest.json"))?;
    for f in &manifest.files {
        let (hash, _) = sha256_file(&report.out_dir.join(&f.path))?;
        println!("{:22} {}", f.path, if hash == f.sha256 { "ok" } else { "MISMATCH" });
    }
    Ok(rows.len())
}

fn main() -> Result<()> {
    run().map(|_| ())
}
