//! File-level input and output: raw YUV sequences, feature tables and the
//! per-metric result tables.

mod results;
mod table;
mod yuv;

use std::path::PathBuf;

pub use results::{render_result_table, write_result_tables, ResultStat};
pub use table::{
    load_feature_table, load_feature_table_with, parse_feature_table, render_feature_table,
    write_feature_table, FeatureRow, FeatureTable, TableSchema, CONDITION_COLUMN, CONTENT_COLUMN,
    DEFAULT_AUDIO_METRICS, MOS_COLUMN, MOS_MAX, MOS_MIN,
};
pub(crate) use yuv::check_geometry;
pub use yuv::{
    decode_frame, encode_frame, frame_byte_size, read_yuv_sequence, FrameSource, MemorySequence,
    Plane, SequencePair, YuvFile, YuvFrame,
};

#[derive(Debug, thiserror::Error)]
pub enum MediaError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: size {file_size} is not a multiple of the frame size {frame_size}")]
    SizeMismatch {
        path: PathBuf,
        file_size: usize,
        frame_size: usize,
    },
    #[error("invalid geometry {width}x{height}: dimensions must be even and at least 2")]
    Geometry { width: usize, height: usize },
    #[error("unsupported bit depth {0} (expected 8 or 10)")]
    UnsupportedBitDepth(u8),
    #[error("plane length {actual} does not match geometry ({expected} samples)")]
    PlaneLength { expected: usize, actual: usize },
    #[error("sample value {value} exceeds the {bit_depth}-bit range")]
    SampleRange { value: u16, bit_depth: u8 },
    #[error("frame {index} out of range ({count} frames)")]
    FrameIndex { index: usize, count: usize },
    #[error("frames in a sequence must share geometry and bit depth")]
    InconsistentGeometry,
    #[error("reference has {reference} frames but distorted has {distorted}")]
    FrameCountMismatch { reference: usize, distorted: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}, column `{column}`: `{value}` is not a finite number")]
    NonNumeric {
        line: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: mos_av {value} outside [1, 5]")]
    MosRange { row: usize, value: f64 },
    #[error("duplicate row for content `{content_id}`, condition `{condition_id}`")]
    DuplicateKey {
        content_id: String,
        condition_id: String,
    },
    #[error("row {row}: score count does not match the column set")]
    RowShape { row: usize },
    #[error("result grid is empty")]
    EmptyGrid,
    #[error("result grid is missing cell {0}")]
    IncompleteGrid(String),
}
