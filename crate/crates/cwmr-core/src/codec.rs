//! Binary container for transformed grids.
//!
//! Layout, all little-endian: magic "CWMR", version byte 1, u8 r, u8 level
//! count, u8 predictor id (0 linear, 1 single-stage WENO, 2 progressive
//! WENO), u32 rows, u32 cols, f64 finest threshold, f64 weight regularizer
//! (-1.0 encodes the grid-scaled rule), f64 weight exponent, u8 channel
//! count; then per channel the coarse grid row-major as f64, followed per
//! level (coarsest first) by the three detail planes, each as a u32 nonzero
//! count plus (u32 flat index, f64 value) pairs in ascending index order.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::grid::{CellGrid, Domain};
use crate::mra::{DetailLevel, MRRepresentation};
use crate::predictor::{Epsilon, PredictorKind, WenoParams};

const MAGIC: &[u8; 4] = b"CWMR";
const VERSION: u8 = 1;

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn kind_id(kind: PredictorKind) -> u8 {
    match kind {
        PredictorKind::Linear => 0,
        PredictorKind::WenoClassical => 1,
        PredictorKind::WenoProgressive => 2,
    }
}

/// Encode one representation per channel (all channels must agree on the
/// header fields) together with the finest threshold that produced them.
pub fn serialize(channels: &[MRRepresentation], eps_finest: f64) -> Result<Vec<u8>, Error> {
    let first = channels
        .first()
        .ok_or(Error::BadParameter("at least one channel is required"))?;
    if channels.len() > 255 {
        return Err(Error::BadParameter("too many channels"));
    }
    let levels = first.details.len();
    if levels > 255 {
        return Err(Error::BadParameter("too many detail levels"));
    }
    let r = first.r;
    if r == 0 || r > 255 {
        return Err(Error::BadParameter("r out of range"));
    }
    if let Epsilon::Fixed(e) = first.params.epsilon {
        if !(e >= 0.0) {
            return Err(Error::BadParameter("epsilon must be >= 0"));
        }
    }
    if !(eps_finest >= 0.0) {
        return Err(Error::BadParameter("threshold must be >= 0"));
    }
    let n0 = first.coarse.n();
    let n = n0 << levels;
    if n > u32::MAX as usize {
        return Err(Error::BadParameter("grid too large for the container"));
    }
    for rep in channels {
        if rep.r != r
            || rep.kind != first.kind
            || rep.params != first.params
            || rep.details.len() != levels
            || rep.coarse.n() != n0
        {
            return Err(Error::BadParameter("channels disagree on header fields"));
        }
        let mut m = n0;
        for lvl in &rep.details {
            if lvl.n != m
                || lvl.d1.len() != m * m
                || lvl.d2.len() != m * m
                || lvl.d3.len() != m * m
            {
                return Err(Error::BadParameter("detail level dimensions are inconsistent"));
            }
            m *= 2;
        }
    }
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(r as u8);
    out.push(levels as u8);
    out.push(kind_id(first.kind));
    put_u32(&mut out, n as u32);
    put_u32(&mut out, n as u32);
    put_f64(&mut out, eps_finest);
    put_f64(
        &mut out,
        match first.params.epsilon {
            Epsilon::Fixed(e) => e,
            Epsilon::GridScaled => -1.0,
        },
    );
    put_f64(&mut out, first.params.power);
    out.push(channels.len() as u8);
    for rep in channels {
        for &v in rep.coarse.data() {
            put_f64(&mut out, v);
        }
        for lvl in &rep.details {
            for plane in [&lvl.d1, &lvl.d2, &lvl.d3] {
                let count = plane.iter().filter(|&&v| v != 0.0).count();
                put_u32(&mut out, count as u32);
                for (i, &v) in plane.iter().enumerate() {
                    if v != 0.0 {
                        put_u32(&mut out, i as u32);
                        put_f64(&mut out, v);
                    }
                }
            }
        }
    }
    Ok(out)
}

struct Reader<'a> {
    b: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], Error> {
        if self.b.len() - self.pos < n {
            return Err(Error::Format(String::from("unexpected end of data")));
        }
        let s = &self.b[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, Error> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, Error> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn f64(&mut self) -> Result<f64, Error> {
        let b = self.take(8)?;
        let mut a = [0u8; 8];
        a.copy_from_slice(b);
        Ok(f64::from_le_bytes(a))
    }
}

/// Decode a container; returns the per-channel representations (grids placed
/// on the unit square) and the recorded finest threshold.
pub fn deserialize(bytes: &[u8]) -> Result<(Vec<MRRepresentation>, f64), Error> {
    let mut rd = Reader { b: bytes, pos: 0 };
    if rd.take(4)? != MAGIC {
        return Err(Error::Format(String::from("bad magic")));
    }
    let version = rd.u8()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let r = rd.u8()? as usize;
    if r == 0 {
        return Err(Error::Format(String::from("r must be >= 1")));
    }
    let levels = rd.u8()? as usize;
    let kind = match rd.u8()? {
        0 => PredictorKind::Linear,
        1 => PredictorKind::WenoClassical,
        2 => PredictorKind::WenoProgressive,
        k => return Err(Error::Format(format!("unknown predictor id {k}"))),
    };
    if kind != PredictorKind::Linear && r < 2 {
        return Err(Error::Format(String::from("WENO predictor needs r >= 2")));
    }
    let rows = rd.u32()? as usize;
    let cols = rd.u32()? as usize;
    if rows != cols {
        return Err(Error::Format(format!(
            "only square grids are supported, got {rows}x{cols}"
        )));
    }
    let eps_finest = rd.f64()?;
    if !(eps_finest >= 0.0) {
        return Err(Error::Format(String::from("invalid threshold")));
    }
    let epsv = rd.f64()?;
    let epsilon = if epsv == -1.0 {
        Epsilon::GridScaled
    } else if epsv >= 0.0 {
        Epsilon::Fixed(epsv)
    } else {
        return Err(Error::Format(String::from("invalid weight regularizer")));
    };
    let power = rd.f64()?;
    if !(power > 0.0) {
        return Err(Error::Format(String::from("invalid weight exponent")));
    }
    let nch = rd.u8()? as usize;
    if nch == 0 {
        return Err(Error::Format(String::from("no channels")));
    }
    if levels >= usize::BITS as usize {
        return Err(Error::Format(String::from("level count out of range")));
    }
    let div = 1usize << levels;
    if rows == 0 || rows % div != 0 {
        return Err(Error::Format(format!(
            "{rows} rows cannot carry {levels} levels"
        )));
    }
    let n0 = rows / div;
    if n0 < 2 {
        return Err(Error::Format(String::from("coarsest grid smaller than 2x2")));
    }
    let params = WenoParams { epsilon, power };
    let mut channels = Vec::with_capacity(nch);
    for _ in 0..nch {
        let mut data = vec![0.0; n0 * n0];
        for v in data.iter_mut() {
            *v = rd.f64()?;
        }
        let coarse = CellGrid::new(n0, 0, Domain::UNIT, data)?;
        let mut details = Vec::with_capacity(levels);
        let mut m = n0;
        for _ in 0..levels {
            let mut planes = [vec![0.0; m * m], vec![0.0; m * m], vec![0.0; m * m]];
            for plane in planes.iter_mut() {
                let count = rd.u32()? as usize;
                if count > m * m {
                    return Err(Error::Format(String::from(
                        "detail count exceeds plane size",
                    )));
                }
                let mut last: Option<u32> = None;
                for _ in 0..count {
                    let idx = rd.u32()?;
                    if idx as usize >= m * m {
                        return Err(Error::Format(String::from("detail index out of range")));
                    }
                    if let Some(prev) = last {
                        if idx <= prev {
                            return Err(Error::Format(String::from(
                                "detail indices not strictly ascending",
                            )));
                        }
                    }
                    last = Some(idx);
                    plane[idx as usize] = rd.f64()?;
                }
            }
            let [d1, d2, d3] = planes;
            details.push(DetailLevel { n: m, d1, d2, d3 });
            m *= 2;
        }
        channels.push(MRRepresentation {
            coarse,
            details,
            kind,
            r,
            params,
        });
    }
    if rd.pos != bytes.len() {
        return Err(Error::Format(String::from("trailing bytes after payload")));
    }
    Ok((channels, eps_finest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoundaryPolicy;
    use crate::mra::forward;
    use crate::predictor::Predictor;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample_rep(kind: PredictorKind, n: usize, levels: u32, seed: u64) -> MRRepresentation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CellGrid::from_fn(n, 0, Domain::UNIT, |_, _| rng.gen_range(-100.0..100.0));
        let p = Predictor::new(kind, 3, WenoParams::default()).unwrap();
        forward(&g, levels, &p, BoundaryPolicy::Reflect).unwrap()
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let a = sample_rep(PredictorKind::WenoProgressive, 32, 2, 1);
        let b = sample_rep(PredictorKind::WenoProgressive, 32, 2, 2);
        let bytes = serialize(&[a.clone(), b.clone()], 12.5).unwrap();
        let (back, eps) = deserialize(&bytes).unwrap();
        assert_eq!(eps, 12.5);
        assert_eq!(back.len(), 2);
        for (orig, got) in [a, b].iter().zip(&back) {
            assert_eq!(got.kind, orig.kind);
            assert_eq!(got.r, orig.r);
            assert_eq!(got.params, orig.params);
            assert_eq!(got.coarse.data(), orig.coarse.data());
            assert_eq!(got.details, orig.details);
        }
    }

    #[test]
    fn fixed_epsilon_survives_roundtrip() {
        let mut rep = sample_rep(PredictorKind::WenoClassical, 16, 1, 3);
        rep.params = WenoParams {
            epsilon: Epsilon::Fixed(1e-6),
            power: 1.5,
        };
        let bytes = serialize(&[rep.clone()], 0.0).unwrap();
        let (back, _) = deserialize(&bytes).unwrap();
        assert_eq!(back[0].params, rep.params);
    }

    #[test]
    fn empty_details_size_is_header_plus_coarse() {
        let g = CellGrid::constant(2, 0, Domain::UNIT, 1.0);
        let rep = MRRepresentation {
            coarse: g,
            details: Vec::new(),
            kind: PredictorKind::Linear,
            r: 3,
            params: WenoParams::default(),
        };
        let bytes = serialize(&[rep], 0.0).unwrap();
        // 4 magic + 4 bytes of u8 fields + 2*4 dims + 3*8 reals + 1 channel
        // count = 41, plus 4 coarse values
        assert_eq!(bytes.len(), 41 + 4 * 8);
    }

    #[test]
    fn sparse_planes_store_only_nonzeros() {
        let rep = {
            let mut rep = sample_rep(PredictorKind::Linear, 8, 1, 4);
            let lvl = &mut rep.details[0];
            for plane in [&mut lvl.d1, &mut lvl.d2, &mut lvl.d3] {
                for v in plane.iter_mut() {
                    *v = 0.0;
                }
            }
            lvl.d1[5] = 2.0;
            lvl.d1[9] = -4.0;
            rep
        };
        let bytes = serialize(&[rep.clone()], 1.0).unwrap();
        assert_eq!(bytes.len(), 41 + 16 * 8 + 3 * 4 + 2 * 12);
        let (back, _) = deserialize(&bytes).unwrap();
        assert_eq!(back[0].details, rep.details);
    }

    #[test]
    fn rejects_bad_magic_version_and_predictor_id() {
        let rep = sample_rep(PredictorKind::Linear, 8, 1, 5);
        let good = serialize(&[rep], 0.0).unwrap();
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(deserialize(&bad), Err(Error::Format(_))));
        let mut bad = good.clone();
        bad[4] = 9;
        assert!(matches!(deserialize(&bad), Err(Error::Format(_))));
        let mut bad = good.clone();
        bad[7] = 7; // predictor id
        assert!(matches!(deserialize(&bad), Err(Error::Format(_))));
    }

    #[test]
    fn rejects_truncation_and_trailing_bytes() {
        let rep = sample_rep(PredictorKind::Linear, 8, 1, 6);
        let good = serialize(&[rep], 0.0).unwrap();
        for cut in [3, 20, 40, good.len() - 1] {
            assert!(matches!(
                deserialize(&good[..cut]),
                Err(Error::Format(_))
            ));
        }
        let mut padded = good.clone();
        padded.push(0);
        assert!(matches!(deserialize(&padded), Err(Error::Format(_))));
    }

    #[test]
    fn rejects_unsorted_detail_indices() {
        let mut rep = sample_rep(PredictorKind::Linear, 8, 1, 7);
        let lvl = &mut rep.details[0];
        for plane in [&mut lvl.d1, &mut lvl.d2, &mut lvl.d3] {
            for v in plane.iter_mut() {
                *v = 0.0;
            }
        }
        lvl.d1[1] = 5.0;
        lvl.d1[3] = 7.0;
        let mut bytes = serialize(&[rep], 0.0).unwrap();
        // the two stored pairs start right after the header, coarse grid,
        // and the d1 count; swap their index words
        let base = 41 + 16 * 8 + 4;
        let idx_a = base;
        let idx_b = base + 12;
        bytes.copy_within(idx_b..idx_b + 4, idx_a); // both now say "3"
        bytes[idx_b..idx_b + 4].copy_from_slice(&1u32.to_le_bytes());
        assert!(matches!(deserialize(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn rejects_mismatched_channels() {
        let a = sample_rep(PredictorKind::Linear, 8, 1, 8);
        let b = sample_rep(PredictorKind::WenoProgressive, 8, 1, 8);
        assert!(serialize(&[a, b], 0.0).is_err());
    }

    #[test]
    fn rejects_nonsquare_dims() {
        let rep = sample_rep(PredictorKind::Linear, 8, 1, 9);
        let mut bytes = serialize(&[rep], 0.0).unwrap();
        bytes[12..16].copy_from_slice(&4u32.to_le_bytes()); // cols header word
        assert!(matches!(deserialize(&bytes), Err(Error::Format(_))));
    }
}
