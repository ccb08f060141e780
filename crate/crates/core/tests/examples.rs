//! Runs every example at reduced scale.

#[allow(dead_code)]
#[path = "../examples/clustering.rs"]
mod clustering;
#[allow(dead_code)]
#[path = "../examples/fs_tradeoff.rs"]
mod fs_tradeoff;
#[allow(dead_code)]
#[path = "../examples/reliability.rs"]
mod reliability;
#[allow(dead_code)]
#[path = "../examples/baselines.rs"]
mod baselines;
#[allow(dead_code)]
#[path = "../examples/brute_force.rs"]
mod brute_force;
#[allow(dead_code)]
#[path = "../examples/train_hmarl.rs"]
mod train_hmarl;
#[allow(dead_code)]
#[path = "../examples/g_th_sweep.rs"]
mod g_th_sweep;
#[allow(dead_code)]
#[path = "../examples/experiment_files.rs"]
mod experiment_files;

#[test]
fn clustering_reports_every_step() {
    let counts = clustering::run(5).unwrap();
    assert_eq!(counts.len(), 5);
    assert!(counts.iter().all(|&c| c <= 50));
}

#[test]
fn fs_tradeoff_is_monotone() {
    let rows = fs_tradeoff::run(25, 16_000.0).unwrap();
    assert_eq!(rows.len(), 7);
    for w in rows.windows(2) {
        assert!(w[0].gops <= w[1].gops && w[0].midhaul >= w[1].midhaul);
    }
}

#[test]
fn reliability_example_counts_outages() {
    let (ratio, obj) = reliability::run();
    assert_eq!(ratio, 0.5);
    assert_eq!(obj, 0.75);
}

#[test]
fn baselines_produce_three_rows() {
    let rows = baselines::run(&[0], 1, 40).unwrap();
    assert_eq!(rows.len(), 3);
}

#[test]
fn brute_force_score_is_attainable() {
    let (_, score) = brute_force::run(3).unwrap();
    assert!((0.0..=1.0).contains(&score));
}

#[test]
fn short_training_runs() {
    let (h, _) = train_hmarl::run(3, 30).unwrap();
    assert_eq!(h.policy, "hmarl");
}

#[test]
fn sweep_covers_every_point() {
    let rows = g_th_sweep::run(&[15_000.0, 17_000.0], 1).unwrap();
    assert_eq!(rows.len(), 4);
}

#[test]
fn experiment_files_verify() {
    assert_eq!(experiment_files::run().unwrap(), 4);
}
