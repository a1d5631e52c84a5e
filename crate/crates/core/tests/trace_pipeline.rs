use std::fs;
use std::path::Path;

use proptest::prelude::*;

use datev::baselines::PolicyKind;
use datev::bench::{run_experiment, Mode, RunConfig};
use datev::trace::{
    crop_region, format_trace, load_fleet, parse_trace_str, read_canonical, write_canonical, FleetOptions, RegionSpec,
    TracePoint,
};

const T0: i64 = 1_211_018_400;

/// Cabs driving back and forth along the region's east-west midline,
/// sampled every 10 s and written newest first.
fn write_fleet(dir: &Path, cabs: u32, duration_s: i64) -> std::path::PathBuf {
    let region = RegionSpec::default();
    let (lat, lon) = region.center();
    let mut manifest = String::from("# synthetic fleet\n");
    for id in 0..cabs {
        let phase = id as f64 * 37.0;
        let lane = (id % 5) as f64 * 0.0004 - 0.0008;
        let mut points: Vec<TracePoint> = (0..=duration_s / 10)
            .map(|k| {
                let t = k * 10;
                let s = ((t as f64 + phase) / 240.0).sin();
                TracePoint { lat: lat + lane, lon: lon + 0.012 * s, occupancy: k % 2, timestamp: T0 + t }
            })
            .collect();
        points.reverse();
        let name = format!("new_cab{id}.txt");
        fs::write(dir.join(&name), format_trace(&points)).unwrap();
        manifest.push_str(&format!("{} {name}\n", id + 1));
    }
    let path = dir.join("cabs.txt");
    fs::write(&path, manifest).unwrap();
    path
}

fn trace_config(dir: &Path, horizon: u64) -> RunConfig {
    let text = format!(
        "mode = \"trace\"\nhorizon = {horizon}\nseeds = [1, 2]\n[trace]\nmanifest = \"cabs.txt\"\nworld_seed = 4\n"
    );
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    RunConfig::load(&path).unwrap()
}

#[test]
fn trace_mode_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    write_fleet(dir.path(), 40, 1800);
    let config = trace_config(dir.path(), 300);
    let exp = run_experiment(&config).unwrap();
    assert_eq!(exp.runs.len(), 2 * PolicyKind::ALL.len());
    for run in &exp.runs {
        assert_eq!(run.records.len(), 300, "{} seed {}", run.policy, run.seed);
        assert!(run.records.iter().all(|r| r.regret >= -1e-12));
    }
    let oracle: f64 = exp.runs_of(PolicyKind::Oracle).flat_map(|r| &r.records).map(|r| r.oracle_u).sum();
    assert!(oracle > 0.0, "trace world never offers a useful SeV");
}

#[test]
fn canonical_file_reproduces_the_manifest_fleet() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_fleet(dir.path(), 12, 900);
    let opts = FleetOptions::default();
    let fleet = load_fleet(&manifest, &opts).unwrap();
    assert_eq!(fleet.len(), 12);
    let mut buf = Vec::new();
    write_canonical(&fleet, &mut buf).unwrap();
    let back = read_canonical(buf.as_slice(), &opts).unwrap();
    assert_eq!(back.len(), fleet.len());
    for (a, b) in fleet.iter().zip(&back) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.cpu_hz, b.cpu_hz);
        assert_eq!(a.segments.len(), b.segments.len());
        for t in [T0 as f64 + 5.0, T0 as f64 + 433.0] {
            let (p, q) = (a.position(t).unwrap(), b.position(t).unwrap());
            assert!(p.distance(q) < 1e-6);
        }
    }

    let canonical = dir.path().join("fleet.csv");
    fs::write(&canonical, &buf).unwrap();
    let mut config = RunConfig::new(Mode::Trace, 100, vec![3]);
    config.trace.canonical = Some(canonical);
    config.policies = vec![PolicyKind::Oracle, PolicyKind::Datev];
    let from_csv = run_experiment(&config).unwrap();
    config.trace.canonical = None;
    config.trace.manifest = Some(manifest);
    let from_manifest = run_experiment(&config).unwrap();
    for (a, b) in from_csv.runs.iter().zip(&from_manifest.runs) {
        let ua: Vec<f64> = a.records.iter().map(|r| r.oracle_u).collect();
        let ub: Vec<f64> = b.records.iter().map(|r| r.oracle_u).collect();
        assert_eq!(ua.len(), ub.len());
        for (x, y) in ua.iter().zip(&ub) {
            assert!((x - y).abs() < 0.05, "{x} vs {y}");
        }
    }
}

#[test]
fn malformed_trace_lines_are_reported_with_position() {
    let err = parse_trace_str("37.75 -122.40 0 100\n37.75 oops 0 110\n").unwrap_err();
    assert!(err.to_string().contains('2'), "{err}");
}

fn point() -> impl Strategy<Value = TracePoint> {
    (37.70f64..37.80, -122.45f64..-122.35, 0i64..2, 0i64..100_000).prop_map(|(lat, lon, occupancy, timestamp)| {
        TracePoint { lat, lon, occupancy, timestamp }
    })
}

proptest! {
    #[test]
    fn format_then_parse_is_stable(points in prop::collection::vec(point(), 0..50)) {
        let mut sorted = points.clone();
        sorted.sort_by_key(|p| p.timestamp);
        let once = parse_trace_str(&format_trace(&sorted)).unwrap();
        prop_assert_eq!(once.len(), sorted.len());
        for (a, b) in once.iter().zip(&sorted) {
            prop_assert!((a.lat - b.lat).abs() <= 5e-6 && (a.lon - b.lon).abs() <= 5e-6);
            prop_assert_eq!((a.occupancy, a.timestamp), (b.occupancy, b.timestamp));
        }
        let twice = parse_trace_str(&format_trace(&once)).unwrap();
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn cropped_runs_stay_inside_and_keep_order(points in prop::collection::vec(point(), 0..80)) {
        let mut sorted = points;
        sorted.sort_by_key(|p| p.timestamp);
        let region = RegionSpec::default();
        let runs = crop_region(&sorted, &region);
        let kept: usize = runs.iter().map(Vec::len).sum();
        let inside = sorted.iter().filter(|p| region.contains(p.lat, p.lon)).count();
        prop_assert!(kept <= inside);
        for run in &runs {
            prop_assert!(run.len() >= 2);
            prop_assert!(run.iter().all(|p| region.contains(p.lat, p.lon)));
            prop_assert!(run.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
        }
    }
}
