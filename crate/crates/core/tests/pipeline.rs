use segmint_core::cluster::{sweep, Algorithm, SweepConfig};
use segmint_core::personality::SelfishnessRanking;
use segmint_core::pipeline::{run, KSource, PipelineOptions};
use segmint_core::report::{read_assignments, read_json, write_sweep, SweepSummary};
use segmint_core::synthgen::{default_specs, generate};
use segmint_core::table::Schema;

fn small_opts() -> PipelineOptions {
    PipelineOptions {
        sweep: SweepConfig { k_min: 2, k_max: 6, restarts: 5, ..SweepConfig::default() },
        ..PipelineOptions::default()
    }
}

#[test]
fn pipeline_end_to_end_on_synthetic_data() {
    let g = generate(&Schema::bundled(), &default_specs(), 21, 0.02, 0.01).unwrap();
    let out = run(&g.table, &small_opts(), &SelfishnessRanking::bundled()).unwrap();
    assert_eq!(out.reports.len(), 2);
    assert_eq!(out.clustered.nrows(), out.table.nrows());
    assert!(out.table.nrows() < g.table.nrows(), "duplicates should be dropped");
    for s in &out.selections {
        assert!((2..=6).contains(&s.k));
        assert_ne!(s.source, KSource::Override);
    }
    // every profile lands in exactly one group
    let mut seen: Vec<usize> = out.groups.iter().flat_map(|g| g.profile_indices.iter().copied()).collect();
    seen.sort_unstable();
    assert_eq!(seen, (0..out.profiles.len()).collect::<Vec<_>>());
}

#[test]
fn profile_k_override_is_used() {
    let g = generate(&Schema::bundled(), &default_specs(), 22, 0.0, 0.0).unwrap();
    let opts = PipelineOptions { profile_k: Some(4), ..small_opts() };
    let out = run(&g.table, &opts, &SelfishnessRanking::bundled()).unwrap();
    assert!(out.selections.iter().all(|s| s.k == 4 && s.source == KSource::Override));
    assert!(out.clusterings.iter().all(|c| c.assignments.iter().all(|&a| a < 4)));
}

#[test]
fn sweep_artifacts_round_trip() {
    let g = generate(&Schema::bundled(), &default_specs(), 23, 0.0, 0.0).unwrap();
    let out = run(&g.table, &small_opts(), &SelfishnessRanking::bundled()).unwrap();
    let cfg = SweepConfig { k_min: 2, k_max: 4, restarts: 3, ..SweepConfig::default() };
    let report = sweep(&out.clustered, Algorithm::KMeans, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let summary = write_sweep(dir.path(), &report).unwrap();
    let back: SweepSummary = read_json(dir.path().join("sweep_kmeans.json")).unwrap();
    assert_eq!(back, summary);
    for e in &report.entries {
        let file = &summary.entries.iter().find(|s| s.k == e.k).unwrap().assignment_file;
        assert_eq!(read_assignments(dir.path().join(file)).unwrap(), e.result.assignments);
    }
}
