use serde::{Deserialize, Serialize};

use super::{TracePoint, TraceError};
use crate::env::{Point, RsuLayout};

const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// Axis-aligned latitude/longitude box, decimal degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

impl Default for RegionSpec {
    fn default() -> Self {
        Self { lat_min: 37.74, lat_max: 37.76, lon_min: -122.42, lon_max: -122.39 }
    }
}

impl RegionSpec {
    pub fn validate(&self) -> Result<(), TraceError> {
        if !(self.lat_min < self.lat_max && self.lon_min < self.lon_max) {
            return Err(TraceError::Region(format!(
                "need lat_min < lat_max and lon_min < lon_max, got {self:?}"
            )));
        }
        if self.lat_min < -90.0 || self.lat_max > 90.0 || self.lon_min < -180.0 || self.lon_max > 180.0 {
            return Err(TraceError::Region(format!("bounds outside the globe: {self:?}")));
        }
        Ok(())
    }

    pub fn contains(&self, lat: f64, lon: f64) -> bool {
        (self.lat_min..=self.lat_max).contains(&lat) && (self.lon_min..=self.lon_max).contains(&lon)
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.lat_min + self.lat_max) / 2.0, (self.lon_min + self.lon_max) / 2.0)
    }

    pub fn projection(&self) -> Projection {
        let (lat0, lon0) = self.center();
        Projection { lat0, lon0 }
    }

    /// East-west and north-south extent, meters.
    pub fn extent_m(&self) -> (f64, f64) {
        let proj = self.projection();
        let a = proj.project(self.lat_min, self.lon_min);
        let b = proj.project(self.lat_max, self.lon_max);
        (b.x - a.x, b.y - a.y)
    }
}

/// Equirectangular projection about a reference point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    pub lat0: f64,
    pub lon0: f64,
}

impl Projection {
    pub fn project(&self, lat: f64, lon: f64) -> Point {
        let k = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
        Point::new(k * (lon - self.lon0) * self.lat0.to_radians().cos(), k * (lat - self.lat0))
    }
}

/// Maximal runs of consecutive in-region points; runs shorter than two
/// points are dropped.
pub fn crop_region(points: &[TracePoint], region: &RegionSpec) -> Vec<Vec<TracePoint>> {
    points
        .split(|p| !region.contains(p.lat, p.lon))
        .filter(|run| run.len() >= 2)
        .map(<[TracePoint]>::to_vec)
        .collect()
}

fn line_layout(
    center: Point,
    axis: (f64, f64),
    extent: f64,
    spacing: f64,
    count: usize,
    coverage: f64,
) -> Result<RsuLayout, TraceError> {
    if count == 0 {
        return Err(TraceError::Layout("count must be at least 1".into()));
    }
    if !(spacing > 0.0) {
        return Err(TraceError::Layout(format!("spacing must be positive, got {spacing}")));
    }
    if spacing * count as f64 > extent {
        return Err(TraceError::Layout(format!(
            "{count} RSUs at {spacing} m need {} m, region axis is {extent:.1} m",
            spacing * count as f64
        )));
    }
    let mid = (count as f64 - 1.0) / 2.0;
    let positions = (0..count)
        .map(|i| {
            let s = (i as f64 - mid) * spacing;
            Point::new(center.x + s * axis.0, center.y + s * axis.1)
        })
        .collect();
    Ok(RsuLayout::new(positions, coverage)?)
}

/// `count` RSUs `spacing` meters apart along the region's longer axis,
/// centered on the region center.
pub fn deploy_rsus(region: &RegionSpec, spacing: f64, count: usize, coverage: f64) -> Result<RsuLayout, TraceError> {
    region.validate()?;
    let (w, h) = region.extent_m();
    let (axis, extent) = if w >= h { ((1.0, 0.0), w) } else { ((0.0, 1.0), h) };
    line_layout(Point::default(), axis, extent, spacing, count, coverage)
}

/// Like [`deploy_rsus`] but along the principal axis of the projected
/// sample positions, centered on their centroid.
pub fn deploy_rsus_along_density(
    samples: &[Point],
    spacing: f64,
    count: usize,
    coverage: f64,
) -> Result<RsuLayout, TraceError> {
    if samples.len() < 2 {
        return Err(TraceError::Layout("need at least two positions".into()));
    }
    let n = samples.len() as f64;
    let cx = samples.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = samples.iter().map(|p| p.y).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in samples {
        let (dx, dy) = (p.x - cx, p.y - cy);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    // leading eigenvector of the 2x2 covariance, as an angle
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let axis = (theta.cos(), theta.sin());
    let proj = |p: &Point| (p.x - cx) * axis.0 + (p.y - cy) * axis.1;
    let lo = samples.iter().map(proj).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(proj).fold(f64::NEG_INFINITY, f64::max);
    line_layout(Point::new(cx, cy), axis, hi - lo, spacing, count, coverage)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(lat: f64, lon: f64, ts: i64) -> TracePoint {
        TracePoint { lat, lon, occupancy: 0, timestamp: ts }
    }

    #[test]
    fn crop_splits_runs() {
        let r = RegionSpec::default();
        let inside = [pt(37.75, -122.40, 0), pt(37.751, -122.401, 1), pt(37.752, -122.402, 2)];
        assert_eq!(crop_region(&inside, &r), vec![inside.to_vec()]);
        assert!(crop_region(&[pt(38.0, -122.4, 0), pt(38.1, -122.4, 1)], &r).is_empty());
        let pattern = [
            pt(37.75, -122.40, 0),
            pt(37.75, -122.40, 1),
            pt(38.0, -122.40, 2),
            pt(37.75, -122.40, 3),
            pt(37.75, -122.40, 4),
            pt(37.75, -122.40, 5),
        ];
        let segs = crop_region(&pattern, &r);
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[1].len(), 3);
    }

    #[test]
    fn twelve_rsus_200m_apart() {
        let layout = deploy_rsus(&RegionSpec::default(), 200.0, 12, 300.0).unwrap();
        assert_eq!(layout.len(), 12);
        for w in layout.positions.windows(2) {
            assert!((w[0].distance(w[1]) - 200.0).abs() <= 1.0);
        }
        assert_eq!(layout.coverage_radius, 300.0);
    }

    #[test]
    fn single_rsu_at_center() {
        let layout = deploy_rsus(&RegionSpec::default(), 200.0, 1, 300.0).unwrap();
        assert_eq!(layout.positions, vec![Point::new(0.0, 0.0)]);
        let p = RegionSpec::default().projection();
        let (lat, lon) = RegionSpec::default().center();
        assert!(p.project(lat, lon).distance(Point::default()) < 1e-9);
    }

    #[test]
    fn oversized_layout_is_rejected() {
        assert!(matches!(deploy_rsus(&RegionSpec::default(), 200.0, 40, 300.0), Err(TraceError::Layout(_))));
        assert!(deploy_rsus(&RegionSpec::default(), 200.0, 0, 300.0).is_err());
    }

    #[test]
    fn density_axis_follows_the_samples() {
        let samples: Vec<Point> = (0..100).map(|i| Point::new(i as f64 * 10.0, i as f64 * 10.0 + 1.0)).collect();
        let layout = deploy_rsus_along_density(&samples, 100.0, 5, 300.0).unwrap();
        for p in &layout.positions {
            assert!((p.y - p.x - 1.0).abs() < 1e-6);
        }
        for w in layout.positions.windows(2) {
            assert!((w[0].distance(w[1]) - 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn projection_scale() {
        // 0.01 degree of latitude is about 1112 m
        let p = RegionSpec::default().projection();
        let a = p.project(37.74, -122.405);
        let b = p.project(37.75, -122.405);
        assert!((a.distance(b) - 1111.95).abs() < 0.1);
    }
}
