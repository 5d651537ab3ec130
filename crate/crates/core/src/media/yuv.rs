//! Raw planar YUV 4:2:0 (I420) frames and sequence readers.
//!
//! Files hold frames back to back, each frame laid out as the full-resolution
//! Y plane followed by the quarter-resolution U and V planes. Samples above
//! 8 bits are stored in little-endian 16-bit containers.

use std::fs::File;
use std::io::{Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use super::MediaError;

/// One plane of samples in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u16>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<u16>) -> Result<Self, MediaError> {
        if data.len() != width * height {
            return Err(MediaError::PlaneLength {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u16) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Builds a plane by evaluating `f(column, row)` at every sample.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u16) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                data.push(f(i, j));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u16 {
        self.data[j * self.width + i]
    }

    #[inline]
    pub fn row(&self, j: usize) -> &[u16] {
        &self.data[j * self.width..(j + 1) * self.width]
    }
}

/// A decoded 4:2:0 frame. Metrics read the luma plane only; chroma is kept
/// so frames can be validated and resampled as a whole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YuvFrame {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u8,
    pub y: Plane,
    pub u: Plane,
    pub v: Plane,
    pub frame_index: usize,
}

pub(crate) fn check_geometry(width: usize, height: usize) -> Result<(), MediaError> {
    if width < 2 || height < 2 || !width.is_multiple_of(2) || !height.is_multiple_of(2) {
        return Err(MediaError::Geometry { width, height });
    }
    Ok(())
}

pub(crate) fn check_bit_depth(bit_depth: u8) -> Result<(), MediaError> {
    match bit_depth {
        8 | 10 => Ok(()),
        other => Err(MediaError::UnsupportedBitDepth(other)),
    }
}

impl YuvFrame {
    pub fn new(
        bit_depth: u8,
        y: Plane,
        u: Plane,
        v: Plane,
        frame_index: usize,
    ) -> Result<Self, MediaError> {
        check_bit_depth(bit_depth)?;
        let (width, height) = (y.width, y.height);
        check_geometry(width, height)?;
        for chroma in [&u, &v] {
            if chroma.width != width / 2 || chroma.height != height / 2 {
                return Err(MediaError::PlaneLength {
                    expected: (width / 2) * (height / 2),
                    actual: chroma.data.len(),
                });
            }
        }
        let limit = 1u32 << bit_depth;
        for plane in [&y, &u, &v] {
            if let Some(&bad) = plane.data.iter().find(|&&s| u32::from(s) >= limit) {
                return Err(MediaError::SampleRange {
                    value: bad,
                    bit_depth,
                });
            }
        }
        Ok(Self {
            width,
            height,
            bit_depth,
            y,
            u,
            v,
            frame_index,
        })
    }

    /// A frame with the given luma plane and mid-grey chroma.
    pub fn from_luma(y: Plane, bit_depth: u8) -> Result<Self, MediaError> {
        let mid = 1u16 << (bit_depth.saturating_sub(1));
        let (cw, ch) = (y.width / 2, y.height / 2);
        Self::new(
            bit_depth,
            y,
            Plane::filled(cw, ch, mid),
            Plane::filled(cw, ch, mid),
            0,
        )
    }

    pub fn peak(&self) -> f64 {
        f64::from((1u32 << self.bit_depth) - 1)
    }

    pub fn same_geometry(&self, other: &YuvFrame) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Number of bytes one frame occupies in an I420 file.
pub fn frame_byte_size(width: usize, height: usize, bit_depth: u8) -> usize {
    let bytes_per_sample = usize::from(bit_depth).div_ceil(8);
    width * height * 3 / 2 * bytes_per_sample
}

/// An ordered, random-access source of frames with constant geometry.
pub trait FrameSource {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn bit_depth(&self) -> u8;
    fn frame_count(&self) -> usize;
    fn read_frame(&mut self, index: usize) -> Result<YuvFrame, MediaError>;
}

/// A raw I420 file opened for reading.
#[derive(Debug)]
pub struct YuvFile {
    path: PathBuf,
    file: File,
    width: usize,
    height: usize,
    bit_depth: u8,
    frame_count: usize,
}

/// Opens a raw YUV file, checking that its size is a whole number of frames.
pub fn read_yuv_sequence(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    bit_depth: u8,
) -> Result<YuvFile, MediaError> {
    let path = path.as_ref();
    check_geometry(width, height)?;
    check_bit_depth(bit_depth)?;
    let file = File::open(path).map_err(|source| MediaError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let len = file
        .metadata()
        .map_err(|source| MediaError::Io {
            path: path.to_path_buf(),
            source,
        })?
        .len() as usize;
    let frame_bytes = frame_byte_size(width, height, bit_depth);
    if !len.is_multiple_of(frame_bytes) {
        return Err(MediaError::SizeMismatch {
            path: path.to_path_buf(),
            file_size: len,
            frame_size: frame_bytes,
        });
    }
    Ok(YuvFile {
        path: path.to_path_buf(),
        file,
        width,
        height,
        bit_depth,
        frame_count: len / frame_bytes,
    })
}

impl YuvFile {
    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Iterates every frame in file order. Each call starts from frame 0.
    pub fn frames(&mut self) -> impl Iterator<Item = Result<YuvFrame, MediaError>> + '_ {
        (0..self.frame_count).map(move |i| self.read_frame(i))
    }
}

fn decode_plane(bytes: &[u8], width: usize, height: usize, wide: bool) -> Plane {
    let data = if wide {
        bytes
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect()
    } else {
        bytes.iter().map(|&b| u16::from(b)).collect()
    };
    Plane {
        width,
        height,
        data,
    }
}

/// Decodes one I420 frame from a byte buffer of exactly one frame.
pub fn decode_frame(
    bytes: &[u8],
    width: usize,
    height: usize,
    bit_depth: u8,
    frame_index: usize,
) -> Result<YuvFrame, MediaError> {
    let expected = frame_byte_size(width, height, bit_depth);
    if bytes.len() != expected {
        return Err(MediaError::PlaneLength {
            expected,
            actual: bytes.len(),
        });
    }
    let wide = bit_depth > 8;
    let bps = if wide { 2 } else { 1 };
    let luma = width * height * bps;
    let chroma = (width / 2) * (height / 2) * bps;
    let y = decode_plane(&bytes[..luma], width, height, wide);
    let u = decode_plane(&bytes[luma..luma + chroma], width / 2, height / 2, wide);
    let v = decode_plane(&bytes[luma + chroma..], width / 2, height / 2, wide);
    YuvFrame::new(bit_depth, y, u, v, frame_index)
}

/// Serializes a frame in I420 layout; the inverse of [`decode_frame`].
pub fn encode_frame(frame: &YuvFrame) -> Vec<u8> {
    let wide = frame.bit_depth > 8;
    let mut out = Vec::with_capacity(frame_byte_size(frame.width, frame.height, frame.bit_depth));
    for plane in [&frame.y, &frame.u, &frame.v] {
        for &s in &plane.data {
            if wide {
                out.extend_from_slice(&s.to_le_bytes());
            } else {
                out.push(s as u8);
            }
        }
    }
    out
}

impl FrameSource for YuvFile {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn bit_depth(&self) -> u8 {
        self.bit_depth
    }
    fn frame_count(&self) -> usize {
        self.frame_count
    }

    fn read_frame(&mut self, index: usize) -> Result<YuvFrame, MediaError> {
        if index >= self.frame_count {
            return Err(MediaError::FrameIndex {
                index,
                count: self.frame_count,
            });
        }
        let frame_bytes = frame_byte_size(self.width, self.height, self.bit_depth);
        let io_err = |source| MediaError::Io {
            path: self.path.clone(),
            source,
        };
        let mut buf = vec![0u8; frame_bytes];
        self.file
            .seek(SeekFrom::Start((index * frame_bytes) as u64))
            .map_err(io_err)?;
        self.file.read_exact(&mut buf).map_err(io_err)?;
        decode_frame(&buf, self.width, self.height, self.bit_depth, index)
    }
}

/// Frames held in memory; used for synthetic content and tests.
#[derive(Debug, Clone)]
pub struct MemorySequence {
    frames: Vec<YuvFrame>,
}

impl MemorySequence {
    pub fn new(frames: Vec<YuvFrame>) -> Result<Self, MediaError> {
        let Some(first) = frames.first() else {
            return Ok(Self { frames });
        };
        for f in &frames[1..] {
            if !first.same_geometry(f) || f.bit_depth != first.bit_depth {
                return Err(MediaError::InconsistentGeometry);
            }
        }
        let frames = frames
            .into_iter()
            .enumerate()
            .map(|(i, mut f)| {
                f.frame_index = i;
                f
            })
            .collect();
        Ok(Self { frames })
    }

    pub fn frames(&self) -> &[YuvFrame] {
        &self.frames
    }
}

impl FrameSource for MemorySequence {
    fn width(&self) -> usize {
        self.frames.first().map_or(0, |f| f.width)
    }
    fn height(&self) -> usize {
        self.frames.first().map_or(0, |f| f.height)
    }
    fn bit_depth(&self) -> u8 {
        self.frames.first().map_or(8, |f| f.bit_depth)
    }
    fn frame_count(&self) -> usize {
        self.frames.len()
    }
    fn read_frame(&mut self, index: usize) -> Result<YuvFrame, MediaError> {
        self.frames
            .get(index)
            .cloned()
            .ok_or(MediaError::FrameIndex {
                index,
                count: self.frames.len(),
            })
    }
}

/// Reference and distorted sources of equal length, read in lockstep.
pub struct SequencePair<'a> {
    pub reference: &'a mut dyn FrameSource,
    pub distorted: &'a mut dyn FrameSource,
}

impl<'a> SequencePair<'a> {
    pub fn new(
        reference: &'a mut dyn FrameSource,
        distorted: &'a mut dyn FrameSource,
    ) -> Result<Self, MediaError> {
        if reference.frame_count() != distorted.frame_count() {
            return Err(MediaError::FrameCountMismatch {
                reference: reference.frame_count(),
                distorted: distorted.frame_count(),
            });
        }
        Ok(Self {
            reference,
            distorted,
        })
    }

    pub fn frame_count(&self) -> usize {
        self.reference.frame_count()
    }

    pub fn read(&mut self, index: usize) -> Result<(YuvFrame, YuvFrame), MediaError> {
        Ok((
            self.reference.read_frame(index)?,
            self.distorted.read_frame(index)?,
        ))
    }
}
