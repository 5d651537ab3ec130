//! Sphere geometry shared by the spherical metrics: ERP and CPP mappings,
//! WS-PSNR weights, sphere point sets and resampling kernels.

mod cpp;
mod erp;
mod points;
mod sample;

use std::path::PathBuf;

pub use cpp::{cpp_forward, cpp_inverse, CppGrid};
pub use erp::{
    erp_coord_to_sphere, erp_pixel_to_sphere, make_ws_weight_map, sphere_to_erp_pixel, ErpGeometry,
    LatLon, PixelCoord, WeightMap,
};
pub use points::{
    generate_sphere_points, load_sphere_points, parse_sphere_points, SpherePointSet,
    DEFAULT_SPHERE_POINTS,
};
pub use sample::{resize_bilinear, sample, sample_bilinear, sample_nearest, Kernel, ResizedSource};

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("geometry {width}x{height} has no samples")]
    EmptyGeometry { width: usize, height: usize },
    #[error("pixel ({i}, {j}) outside {width}x{height}")]
    PixelOutOfRange {
        i: usize,
        j: usize,
        width: usize,
        height: usize,
    },
    #[error("point set needs at least {min} points, got {count}")]
    TooFewPoints { count: usize, min: usize },
    #[error("line {line}: angle ({lat}, {lon}) degrees out of range")]
    AngleOutOfRange { line: usize, lat: f64, lon: f64 },
    #[error("line {line}: expected `lat lon` in degrees, got `{text}`")]
    PointParse { line: usize, text: String },
    #[error("point {index} duplicates an earlier point")]
    DuplicatePoint { index: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
