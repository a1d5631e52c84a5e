use std::io;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{crop_region, parse_trace_file, Projection, RegionSpec, TracePoint, TraceError};
use crate::env::{Point, Trajectory, Vehicle};
use crate::ids::VehicleId;
use crate::stream_rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub vehicle: VehicleId,
    pub path: PathBuf,
}

/// Lines `vehicle_id path`; `#` starts a comment. Relative paths are
/// resolved against the manifest's directory.
pub fn parse_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>, TraceError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| TraceError::Io { path: path.into(), source })?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| TraceError::File {
            path: path.into(),
            source: Box::new(TraceError::Parse { line: i + 1, message }),
        };
        let mut fields = line.split_whitespace();
        let (Some(id), Some(file), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err("expected `vehicle_id path`".into()));
        };
        let id: u32 = id.parse().map_err(|_| err(format!("bad vehicle id {id:?}")))?;
        entries.push(ManifestEntry { vehicle: VehicleId(id), path: base.join(file) });
    }
    entries.sort_by_key(|e| e.vehicle);
    if let Some(w) = entries.windows(2).find(|w| w[0].vehicle == w[1].vehicle) {
        return Err(TraceError::Canonical(format!("vehicle {} listed twice in {}", w[0].vehicle, path.display())));
    }
    Ok(entries)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FleetOptions {
    pub region: RegionSpec,
    /// Sampling gaps longer than this split a trajectory, seconds.
    pub max_gap_s: f64,
    /// SeV CPU frequency range, cycles/s.
    pub cpu_hz: (f64, f64),
    pub seed: u64,
}

impl Default for FleetOptions {
    fn default() -> Self {
        Self { region: RegionSpec::default(), max_gap_s: 120.0, cpu_hz: (2e9, 8e9), seed: 0 }
    }
}

/// Splits time-sorted samples at gaps above `max_gap_s`. Repeated
/// timestamps keep their first sample; pieces under two samples are
/// dropped.
pub fn segment_points(samples: &[(f64, Point)], max_gap_s: f64) -> Result<Vec<Trajectory>, TraceError> {
    let mut pieces: Vec<Vec<(f64, Point)>> = Vec::new();
    let mut last: Option<f64> = None;
    for &(t, p) in samples {
        match last {
            Some(prev) if t <= prev => continue,
            Some(prev) if t - prev <= max_gap_s => pieces.last_mut().expect("open piece").push((t, p)),
            _ => pieces.push(vec![(t, p)]),
        }
        last = Some(t);
    }
    pieces
        .into_iter()
        .filter(|p| p.len() >= 2)
        .map(|p| Trajectory::new(p).map_err(TraceError::from))
        .collect()
}

fn cpu_frequencies(ids: &[VehicleId], opts: &FleetOptions) -> Vec<f64> {
    let mut rng = stream_rng(opts.seed, 4);
    let (lo, hi) = opts.cpu_hz;
    ids.iter().map(|_| if lo < hi { rng.random_range(lo..=hi) } else { lo }).collect()
}

/// Crops, projects and segments one raw trace. `None` when nothing
/// usable remains.
pub fn build_vehicle(
    id: VehicleId,
    raw: &[TracePoint],
    projection: &Projection,
    opts: &FleetOptions,
    cpu_hz: f64,
) -> Result<Option<Vehicle>, TraceError> {
    let mut segments = Vec::new();
    for run in crop_region(raw, &opts.region) {
        let samples: Vec<(f64, Point)> = run
            .iter()
            .map(|p| (p.timestamp as f64, projection.project(p.lat, p.lon)))
            .collect();
        segments.extend(segment_points(&samples, opts.max_gap_s)?);
    }
    if segments.is_empty() {
        return Ok(None);
    }
    Ok(Some(Vehicle::new(id, segments, cpu_hz)?))
}

/// Loads every vehicle listed in a manifest, in id order.
pub fn load_fleet(manifest: impl AsRef<Path>, opts: &FleetOptions) -> Result<Vec<Vehicle>, TraceError> {
    opts.region.validate()?;
    let entries = parse_manifest(manifest)?;
    let ids: Vec<VehicleId> = entries.iter().map(|e| e.vehicle).collect();
    let cpus = cpu_frequencies(&ids, opts);
    let projection = opts.region.projection();
    let built = entries
        .par_iter()
        .zip(cpus.par_iter())
        .map(|(e, &cpu)| build_vehicle(e.vehicle, &parse_trace_file(&e.path)?, &projection, opts, cpu))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(built.into_iter().flatten().collect())
}

#[derive(Debug, Serialize, Deserialize)]
struct CanonicalRow {
    vehicle_id: u32,
    t: f64,
    x_m: f64,
    y_m: f64,
}

pub fn write_canonical<W: io::Write>(vehicles: &[Vehicle], out: W) -> Result<(), TraceError> {
    let mut w = csv::Writer::from_writer(out);
    for v in vehicles {
        for seg in &v.segments {
            for (t, p) in seg.samples() {
                w.serialize(CanonicalRow { vehicle_id: v.id.0, t, x_m: p.x, y_m: p.y })?;
            }
        }
    }
    w.flush().map_err(|source| TraceError::Io { path: "<canonical>".into(), source })?;
    Ok(())
}

/// Rebuilds vehicles from canonical rows, splitting trajectories at gaps
/// above `max_gap_s`. CPU frequencies are redrawn from `opts`.
pub fn read_canonical<R: io::Read>(input: R, opts: &FleetOptions) -> Result<Vec<Vehicle>, TraceError> {
    let mut rows: Vec<CanonicalRow> = csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<_, _>>()?;
    if let Some(r) = rows.iter().find(|r| !(r.t.is_finite() && r.x_m.is_finite() && r.y_m.is_finite())) {
        return Err(TraceError::Canonical(format!("non-finite value for vehicle {}", r.vehicle_id)));
    }
    rows.sort_by(|a, b| a.vehicle_id.cmp(&b.vehicle_id).then(a.t.total_cmp(&b.t)));
    let groups: Vec<&[CanonicalRow]> = rows.chunk_by(|a, b| a.vehicle_id == b.vehicle_id).collect();
    let ids: Vec<VehicleId> = groups.iter().map(|g| VehicleId(g[0].vehicle_id)).collect();
    let cpus = cpu_frequencies(&ids, opts);
    let mut vehicles = Vec::new();
    for ((group, id), cpu) in groups.into_iter().zip(ids).zip(cpus) {
        let samples: Vec<(f64, Point)> = group.iter().map(|r| (r.t, Point::new(r.x_m, r.y_m))).collect();
        let segments = segment_points(&samples, opts.max_gap_s)?;
        if !segments.is_empty() {
            vehicles.push(Vehicle::new(id, segments, cpu)?);
        }
    }
    Ok(vehicles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaps_split_segments() {
        let s: Vec<(f64, Point)> = [0.0, 45.0, 90.0, 400.0, 445.0, 445.0, 490.0, 2000.0]
            .iter()
            .map(|&t| (t, Point::new(t, 0.0)))
            .collect();
        let segs = segment_points(&s, 120.0).unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].len(), 3);
        assert_eq!(segs[1].len(), 3);
    }

    #[test]
    fn canonical_round_trip() {
        let a = Trajectory::new(vec![(0.0, Point::new(1.5, 2.0)), (40.0, Point::new(3.0, -4.25))]).unwrap();
        let b = Trajectory::new(vec![(500.0, Point::new(0.0, 0.0)), (540.0, Point::new(10.0, 0.0))]).unwrap();
        let opts = FleetOptions::default();
        let cpus = cpu_frequencies(&[VehicleId(7)], &opts);
        let v = Vehicle::new(VehicleId(7), vec![a, b], cpus[0]).unwrap();
        let mut buf = Vec::new();
        write_canonical(std::slice::from_ref(&v), &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("vehicle_id,t,x_m,y_m\n"));
        let back = read_canonical(buf.as_slice(), &opts).unwrap();
        assert_eq!(back, vec![v]);
    }
}
