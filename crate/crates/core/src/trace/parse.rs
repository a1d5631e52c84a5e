use std::fmt::Write as _;
use std::path::Path;

use super::TraceError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub lat: f64,
    pub lon: f64,
    pub occupancy: i64,
    pub timestamp: i64,
}

fn parse_line(line: &str, number: usize) -> Result<TracePoint, TraceError> {
    let err = |message: String| TraceError::Parse { line: number, message };
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [lat, lon, occ, ts] = fields[..] else {
        return Err(err(format!("expected 4 fields, found {}", fields.len())));
    };
    let lat: f64 = lat.parse().map_err(|_| err(format!("bad latitude {lat:?}")))?;
    let lon: f64 = lon.parse().map_err(|_| err(format!("bad longitude {lon:?}")))?;
    if !(-90.0..=90.0).contains(&lat) {
        return Err(err(format!("latitude {lat} out of range")));
    }
    if !(-180.0..=180.0).contains(&lon) {
        return Err(err(format!("longitude {lon} out of range")));
    }
    Ok(TracePoint {
        lat,
        lon,
        occupancy: occ.parse().map_err(|_| err(format!("bad occupancy flag {occ:?}")))?,
        timestamp: ts.parse().map_err(|_| err(format!("bad timestamp {ts:?}")))?,
    })
}

/// Parses trace text; blank lines are skipped and the result is sorted by
/// timestamp.
pub fn parse_trace_str(text: &str) -> Result<Vec<TracePoint>, TraceError> {
    let mut points = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(l, i + 1))
        .collect::<Result<Vec<_>, _>>()?;
    points.sort_by_key(|p| p.timestamp);
    Ok(points)
}

pub fn parse_trace_file(path: impl AsRef<Path>) -> Result<Vec<TracePoint>, TraceError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| TraceError::Io { path: path.into(), source })?;
    parse_trace_str(&text).map_err(|e| TraceError::File { path: path.into(), source: Box::new(e) })
}

/// Line format with five decimals for coordinates.
pub fn format_trace(points: &[TracePoint]) -> String {
    let mut out = String::new();
    for p in points {
        writeln!(out, "{:.5} {:.5} {} {}", p.lat, p.lon, p.occupancy, p.timestamp).expect("write to string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_line() {
        let pts = parse_trace_str("37.75134 -122.39488 0 1213084687\n").unwrap();
        assert_eq!(pts, vec![TracePoint { lat: 37.75134, lon: -122.39488, occupancy: 0, timestamp: 1213084687 }]);
    }

    #[test]
    fn sorts_by_timestamp() {
        let pts = parse_trace_str("37.7 -122.4 1 30\n\n37.8 -122.4 0 10\n37.9 -122.4 0 20\n").unwrap();
        let ts: Vec<i64> = pts.iter().map(|p| p.timestamp).collect();
        assert_eq!(ts, vec![10, 20, 30]);
        assert!(parse_trace_str("").unwrap().is_empty());
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_trace_str("37.7 -122.4 1 30\n37.7 -122.4 1\n").unwrap_err();
        assert!(matches!(err, TraceError::Parse { line: 2, .. }), "{err}");
        let err = parse_trace_str("37.7 -122.4 1 30\n\n95.0 -122.4 1 31\n").unwrap_err();
        assert!(matches!(err, TraceError::Parse { line: 3, .. }), "{err}");
        assert!(parse_trace_str("a b c d").is_err());
    }
}
