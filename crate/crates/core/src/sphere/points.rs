use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::Path;

use super::{GeometryError, LatLon};

/// Number of sample directions used for S-PSNR unless configured otherwise.
pub const DEFAULT_SPHERE_POINTS: usize = 655_362;

/// A set of distinct unit-sphere directions.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePointSet {
    points: Vec<LatLon>,
}

impl SpherePointSet {
    /// Validates a list of directions: angles in range and no duplicates.
    pub fn new(points: Vec<LatLon>) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::TooFewPoints { count: 0, min: 1 });
        }
        let mut seen = HashSet::with_capacity(points.len());
        for (idx, p) in points.iter().enumerate() {
            if !(-FRAC_PI_2..=FRAC_PI_2).contains(&p.lat) || !(-PI..=PI).contains(&p.lon) {
                return Err(GeometryError::AngleOutOfRange {
                    line: idx + 1,
                    lat: p.lat.to_degrees(),
                    lon: p.lon.to_degrees(),
                });
            }
            // Canonical unit vectors so that lon = ±π and the poles compare equal.
            let key = p.to_unit_vector().map(|c| (c * 1e12).round() as i64);
            if !seen.insert(key) {
                return Err(GeometryError::DuplicatePoint { index: idx });
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[LatLon] {
        &self.points
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn unit_vectors(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.points.iter().map(|p| p.to_unit_vector())
    }
}

/// Fibonacci-lattice directions: point `k` sits at height
/// `z = 1 - 2(k + 0.5)/count` and longitude `2πk/φ mod 2π`.
pub fn generate_sphere_points(count: usize) -> Result<SpherePointSet, GeometryError> {
    if count < 4 {
        return Err(GeometryError::TooFewPoints { count, min: 4 });
    }
    let inv_phi = 2.0 / (1.0 + 5f64.sqrt());
    let n = count as f64;
    let points = (0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n;
            let turn = (k as f64 * inv_phi).fract();
            let mut lon = TAU * turn;
            if lon >= PI {
                lon -= TAU;
            }
            LatLon { lat: z.asin(), lon }
        })
        .collect();
    // The lattice has strictly decreasing z, so no duplicate check is needed.
    Ok(SpherePointSet { points })
}

/// Reads a point file: one `lat lon` pair in degrees per line, `#` comments.
pub fn load_sphere_points(path: impl AsRef<Path>) -> Result<SpherePointSet, GeometryError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| GeometryError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_sphere_points(&text)
}

pub fn parse_sphere_points(text: &str) -> Result<SpherePointSet, GeometryError> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let parse = |f: Option<&str>| -> Result<f64, GeometryError> {
            f.and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| GeometryError::PointParse {
                    line: line_no,
                    text: raw.to_string(),
                })
        };
        let lat = parse(fields.next())?;
        let lon = parse(fields.next())?;
        if fields.next().is_some() {
            return Err(GeometryError::PointParse {
                line: line_no,
                text: raw.to_string(),
            });
        }
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(GeometryError::AngleOutOfRange {
                line: line_no,
                lat,
                lon,
            });
        }
        points.push(LatLon {
            lat: lat.to_radians(),
            lon: lon.to_radians(),
        });
    }
    SpherePointSet::new(points)
}
