//! Binary PGM/PPM image I/O (8-bit, maxval 255) and the per-channel
//! compression pipeline: forward transform, detail thresholding, sparse
//! serialization, and reconstruction.
//!
//! All pipeline math is real-valued; sample values are clamped to [0, 255]
//! and rounded only when an image is written back to 8-bit form.

use cwmr_core::codec::{deserialize, serialize};
use cwmr_core::mra::{forward, inverse, nnz, threshold, ThresholdSchedule};
use cwmr_core::{
    BoundaryPolicy, CellGrid, Domain, Error, Predictor, PredictorKind, WenoParams,
};
use std::fs;
use std::path::Path;

/// An 8-bit grayscale or RGB raster with interleaved samples in row-major
/// order (row, column, channel).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(
        width: usize,
        height: usize,
        channels: usize,
        samples: Vec<u8>,
    ) -> Result<Self, Error> {
        if width == 0 || height == 0 {
            return Err(Error::Format("image dimensions must be positive".into()));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::Format(format!(
                "unsupported channel count {channels}; expected 1 or 3"
            )));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|p| p.checked_mul(channels))
            .ok_or_else(|| Error::Format("image dimensions overflow".into()))?;
        if samples.len() != expected {
            return Err(Error::Format(format!(
                "sample buffer has {} bytes; {}x{}x{} needs {}",
                samples.len(),
                width,
                height,
                channels,
                expected
            )));
        }
        Ok(ImageBuffer {
            width,
            height,
            channels,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn sample(&self, row: usize, col: usize, ch: usize) -> u8 {
        self.samples[(row * self.width + col) * self.channels + ch]
    }

    /// One channel as a real-valued square grid (row index first).
    pub fn channel_grid(&self, ch: usize) -> Result<CellGrid, Error> {
        if self.width != self.height {
            return Err(Error::Format(format!(
                "image is {}x{}; this pipeline needs a square image",
                self.width, self.height
            )));
        }
        let n = self.width;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.sample(i, j, ch) as f64;
            }
        }
        CellGrid::new(n, 0, Domain::UNIT, data)
    }

    /// Reassemble an image from per-channel grids, clamping to [0, 255] and
    /// rounding to the nearest integer.
    pub fn from_channel_grids(grids: &[CellGrid]) -> Result<Self, Error> {
        if grids.is_empty() || (grids.len() != 1 && grids.len() != 3) {
            return Err(Error::Format(format!(
                "expected 1 or 3 channel grids, got {}",
                grids.len()
            )));
        }
        let n = grids[0].n();
        for g in grids {
            if g.n() != n {
                return Err(Error::SizeMismatch {
                    left: g.n(),
                    right: n,
                });
            }
        }
        let channels = grids.len();
        let mut samples = vec![0u8; n * n * channels];
        for (ch, g) in grids.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let v = g.get(i, j).round().clamp(0.0, 255.0);
                    samples[(i * n + j) * channels + ch] = v as u8;
                }
            }
        }
        ImageBuffer::new(n, n, channels, samples)
    }
}

/// Decode a binary PGM (P5) or PPM (P6) byte stream with maxval 255.
pub fn decode_image(bytes: &[u8]) -> Result<ImageBuffer, Error> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return Err(Error::Format("not a binary PGM (P5) or PPM (P6) file".into())),
    };
    let mut pos = 2;
    let width = read_header_int(bytes, &mut pos)?;
    let height = read_header_int(bytes, &mut pos)?;
    let maxval = read_header_int(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(Error::Format(format!(
            "unsupported maxval {maxval}; only 255 is handled"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b' ' | b'\t' | b'\r' | b'\n') => pos += 1,
        _ => return Err(Error::Format("missing whitespace after maxval".into())),
    }
    let expected = width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(channels))
        .ok_or_else(|| Error::Format("image dimensions overflow".into()))?;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(Error::Format(format!(
            "raster truncated: {} bytes present, {} expected",
            payload.len(),
            expected
        )));
    }
    if payload.len() > expected {
        return Err(Error::Format(format!(
            "{} trailing bytes after the raster",
            payload.len() - expected
        )));
    }
    ImageBuffer::new(width, height, channels, payload.to_vec())
}

/// Skip whitespace and '#' comments, then read an ASCII decimal integer.
fn read_header_int(bytes: &[u8], pos: &mut usize) -> Result<usize, Error> {
    loop {
        match bytes.get(*pos) {
            Some(b' ' | b'\t' | b'\r' | b'\n') => *pos += 1,
            Some(b'#') => {
                while !matches!(bytes.get(*pos), None | Some(b'\n')) {
                    *pos += 1;
                }
            }
            _ => break,
        }
    }
    let start = *pos;
    while matches!(bytes.get(*pos), Some(c) if c.is_ascii_digit()) {
        *pos += 1;
    }
    if *pos == start {
        return Err(Error::Format("malformed header: expected an integer".into()));
    }
    let mut v: usize = 0;
    for &c in &bytes[start..*pos] {
        v = v
            .checked_mul(10)
            .and_then(|v| v.checked_add((c - b'0') as usize))
            .ok_or_else(|| Error::Format("header integer overflow".into()))?;
    }
    Ok(v)
}

/// Encode an image with the canonical header "P5\n{w} {h}\n255\n" (or P6).
pub fn encode_image(img: &ImageBuffer) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{}\n{} {}\n255\n", magic, img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.samples());
    out
}

pub fn read_image(path: &Path) -> Result<ImageBuffer, Error> {
    let bytes =
        fs::read(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    decode_image(&bytes)
}

pub fn write_image(img: &ImageBuffer, path: &Path) -> Result<(), Error> {
    fs::write(path, encode_image(img))
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Parameters of the per-channel compression pipeline.
#[derive(Debug, Clone, Copy)]
pub struct CompressionSettings {
    pub levels: u32,
    pub eps_finest: f64,
    pub kind: PredictorKind,
    pub r: usize,
    pub params: WenoParams,
}

/// Check that an image can be compressed with the given level count and
/// stencil size, reporting the padding that would fix a violation.
pub fn validate_for_compression(img: &ImageBuffer, levels: u32, r: usize) -> Result<(), Error> {
    if img.width() != img.height() {
        let side = img.width().max(img.height());
        return Err(Error::Format(format!(
            "image is {}x{}; compression needs a square image (pad to {side}x{side})",
            img.width(),
            img.height()
        )));
    }
    let n = img.width();
    if levels == 0 || levels >= usize::BITS {
        return Err(Error::BadParameter("level count must be at least 1"));
    }
    let div = 1usize << levels;
    if n % div != 0 {
        let padded = n.div_ceil(div) * div;
        return Err(Error::Format(format!(
            "side {n} is not divisible by 2^{levels} = {div}; pad to {padded}x{padded}"
        )));
    }
    let coarsest = n >> levels;
    let min = 2 * r - 1;
    if coarsest < min {
        return Err(Error::Format(format!(
            "coarsest level would be {coarsest}x{coarsest}; the prediction window needs at \
             least {min}x{min} (use fewer levels or a larger image)"
        )));
    }
    Ok(())
}

/// Compress every channel of an image; returns the serialized container and
/// the total number of retained (nonzero) detail coefficients.
pub fn compress_image(
    img: &ImageBuffer,
    settings: &CompressionSettings,
) -> Result<(Vec<u8>, usize), Error> {
    validate_for_compression(img, settings.levels, settings.r)?;
    let predictor = Predictor::new(settings.kind, settings.r, settings.params)?;
    let schedule = ThresholdSchedule::new(settings.eps_finest)?;
    let mut reps = Vec::with_capacity(img.channels());
    for ch in 0..img.channels() {
        let grid = img.channel_grid(ch)?;
        let rep = forward(&grid, settings.levels, &predictor, BoundaryPolicy::Reflect)?;
        reps.push(threshold(&rep, &schedule));
    }
    let total = reps.iter().map(nnz).sum();
    let bytes = serialize(&reps, settings.eps_finest)?;
    Ok((bytes, total))
}

/// Reconstruct the real-valued channel grids stored in a compressed container.
pub fn reconstruct_channels(bytes: &[u8]) -> Result<Vec<CellGrid>, Error> {
    let (reps, _) = deserialize(bytes)?;
    reps.iter()
        .map(|rep| inverse(rep, BoundaryPolicy::Reflect))
        .collect()
}

/// Decompress a container back to an 8-bit image.
pub fn decompress_image(bytes: &[u8]) -> Result<ImageBuffer, Error> {
    let grids = reconstruct_channels(bytes)?;
    ImageBuffer::from_channel_grids(&grids)
}

/// Synthetic piecewise-constant RGB test scene: a rectangle, a disk, a
/// diagonal half-plane, and a small dark square over a flat background,
/// painted in that order.
pub fn geometric_rgb(n: usize) -> ImageBuffer {
    let mut samples = vec![0u8; n * n * 3];
    for i in 0..n {
        for j in 0..n {
            let (ii, jj) = (i as i64, j as i64);
            let mut px = [40u8, 60, 90];
            if (32..160).contains(&ii) && (48..208).contains(&jj) {
                px = [200, 80, 50];
            }
            if (ii - 170).pow(2) + (jj - 90).pow(2) <= 55 * 55 {
                px = [90, 200, 120];
            }
            if ii + jj >= 320 {
                px = [230, 220, 40];
            }
            if (200..232).contains(&ii) && (24..56).contains(&jj) {
                px = [10, 10, 10];
            }
            samples[(i * n + j) * 3..(i * n + j) * 3 + 3].copy_from_slice(&px);
        }
    }
    ImageBuffer::new(n, n, 3, samples).expect("constructed sizes always agree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use cwmr_core::mra::metrics;
    use cwmr_core::Epsilon;

    fn settings(kind: PredictorKind, levels: u32, eps: f64) -> CompressionSettings {
        CompressionSettings {
            levels,
            eps_finest: eps,
            kind,
            r: 3,
            params: WenoParams::default(),
        }
    }

    #[test]
    fn single_pixel_ppm_decodes_to_three_channels() {
        let mut bytes = b"P6\n1 1\n255\n".to_vec();
        bytes.extend_from_slice(&[10, 20, 30]);
        let img = decode_image(&bytes).unwrap();
        assert_eq!((img.width(), img.height(), img.channels()), (1, 1, 3));
        assert_eq!(img.sample(0, 0, 0), 10);
        assert_eq!(img.sample(0, 0, 1), 20);
        assert_eq!(img.sample(0, 0, 2), 30);
    }

    #[test]
    fn encode_then_decode_is_byte_identical() {
        let img = geometric_rgb(16);
        let bytes = encode_image(&img);
        let back = decode_image(&bytes).unwrap();
        assert_eq!(encode_image(&back), bytes);
        assert_eq!(back, img);
    }

    #[test]
    fn file_roundtrip_preserves_samples() {
        let img = geometric_rgb(8);
        let path = std::env::temp_dir().join(format!("cwmr-io-{}.ppm", std::process::id()));
        write_image(&img, &path).unwrap();
        let back = read_image(&path).unwrap();
        let _ = std::fs::remove_file(&path);
        assert_eq!(back, img);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut bytes = b"P5\n# a comment line\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4]);
        let img = decode_image(&bytes).unwrap();
        assert_eq!((img.width(), img.height(), img.channels()), (2, 2, 1));
        assert_eq!(img.sample(1, 0, 0), 3);
    }

    #[test]
    fn malformed_streams_are_rejected() {
        // wrong magic
        assert!(decode_image(b"P4\n1 1\n255\nx").is_err());
        // unsupported maxval
        let mut bytes = b"P5\n2 2\n254\n".to_vec();
        bytes.extend_from_slice(&[0; 4]);
        assert!(decode_image(&bytes).is_err());
        // truncated raster
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0; 3]);
        assert!(decode_image(&bytes).is_err());
        // trailing bytes
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0; 5]);
        assert!(decode_image(&bytes).is_err());
        // missing header integer
        assert!(decode_image(b"P5\n2\n255\n").is_err());
    }

    #[test]
    fn zero_threshold_roundtrip_is_exact_after_rounding() {
        let img = geometric_rgb(32);
        let (bytes, _) = compress_image(&img, &settings(PredictorKind::Linear, 2, 0.0)).unwrap();
        let back = decompress_image(&bytes).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn constant_image_keeps_no_details() {
        let img = ImageBuffer::new(32, 32, 1, vec![137; 1024]).unwrap();
        for kind in [
            PredictorKind::Linear,
            PredictorKind::WenoClassical,
            PredictorKind::WenoProgressive,
        ] {
            let (_, kept) = compress_image(&img, &settings(kind, 2, 7.5)).unwrap();
            assert_eq!(kept, 0);
        }
    }

    #[test]
    fn dimension_failures_explain_the_required_padding() {
        let img = ImageBuffer::new(12, 10, 1, vec![0; 120]).unwrap();
        let err = compress_image(&img, &settings(PredictorKind::Linear, 2, 0.0)).unwrap_err();
        assert!(err.to_string().contains("12x12"), "{err}");

        let img = ImageBuffer::new(20, 20, 1, vec![0; 400]).unwrap();
        let err = compress_image(&img, &settings(PredictorKind::Linear, 3, 0.0)).unwrap_err();
        assert!(err.to_string().contains("24x24"), "{err}");

        let img = ImageBuffer::new(16, 16, 1, vec![0; 256]).unwrap();
        let err = compress_image(&img, &settings(PredictorKind::Linear, 2, 0.0)).unwrap_err();
        assert!(err.to_string().contains("coarsest"), "{err}");
    }

    #[test]
    fn channels_compress_independently() {
        let img = geometric_rgb(32);
        let s = settings(PredictorKind::Linear, 2, 10.0);
        let (combined, _) = compress_image(&img, &s).unwrap();
        let (all, _) = deserialize(&combined).unwrap();
        for ch in 0..3 {
            let mono = ImageBuffer::from_channel_grids(&[img.channel_grid(ch).unwrap()]).unwrap();
            let (single, _) = compress_image(&mono, &s).unwrap();
            let (one, _) = deserialize(&single).unwrap();
            assert_eq!(one[0].coarse.data(), all[ch].coarse.data());
            assert_eq!(one[0].details, all[ch].details);
        }
    }

    #[test]
    fn pipeline_matches_frozen_numbers_on_the_geometric_scene() {
        let img = geometric_rgb(256);
        for (kind, want_nnz, want_e2) in [
            (PredictorKind::Linear, 3372usize, 4.5938f64),
            (PredictorKind::WenoProgressive, 1509, 2.5784),
        ] {
            let (bytes, kept) = compress_image(&img, &settings(kind, 4, 30.0)).unwrap();
            assert_eq!(kept, want_nnz, "{kind:?}");
            let grids = reconstruct_channels(&bytes).unwrap();
            let mut e2 = 0.0;
            for ch in 0..3 {
                let orig = img.channel_grid(ch).unwrap();
                e2 += metrics(&orig, &grids[ch]).unwrap().e2;
            }
            e2 /= 3.0;
            assert!((e2 - want_e2).abs() <= 1e-3, "{kind:?}: E2 = {e2}");
        }
    }

    #[test]
    fn fixed_weno_epsilon_threads_through_the_container() {
        let img = geometric_rgb(32);
        let mut s = settings(PredictorKind::WenoProgressive, 2, 0.0);
        s.params = WenoParams {
            epsilon: Epsilon::Fixed(1e-8),
            power: 4.0,
        };
        let (bytes, _) = compress_image(&img, &s).unwrap();
        let back = decompress_image(&bytes).unwrap();
        assert_eq!(back, img);
        let (reps, _) = deserialize(&bytes).unwrap();
        assert_eq!(reps[0].params.epsilon, Epsilon::Fixed(1e-8));
        assert_eq!(reps[0].params.power, 4.0);
    }
}
