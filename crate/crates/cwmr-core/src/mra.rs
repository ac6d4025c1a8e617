//! Multilevel cell-average pyramid: forward and inverse transforms, detail
//! thresholding, sparsity counting, and reconstruction error metrics.
//!
//! The forward transform repeatedly coarsens by quarter-sum averaging and
//! stores, per coarse cell, the prediction errors of three of its four
//! children; the fourth error is recoverable because a consistent predictor
//! makes the four errors sum to zero. Storing the coarsest grid plus three
//! quarter-size planes per level therefore keeps exactly one scalar per
//! original cell, and the inverse transform reproduces the input up to
//! rounding when no detail is discarded.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::Error;
use crate::grid::{decimate, BoundaryPolicy, CellGrid, Sum};
use crate::predictor::{Predictor, PredictorKind, WenoParams};

/// Prediction errors for one refinement level, indexed by coarse cell
/// (ci, cj) at plane index ci * n + cj. The planes cover the low/low,
/// high/low, and low/high children; the high/high child's error is the
/// negated sum of the other three and is never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailLevel {
    pub n: usize,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d3: Vec<f64>,
}

/// A transformed grid: the coarsest approximation plus per-level details
/// (coarsest level first) and the predictor configuration that produced
/// them, which the inverse transform must reuse.
#[derive(Debug, Clone)]
pub struct MRRepresentation {
    pub coarse: CellGrid,
    pub details: Vec<DetailLevel>,
    pub kind: PredictorKind,
    pub r: usize,
    pub params: WenoParams,
}

/// Per-level detail thresholds: the finest level uses `eps_finest` and every
/// coarser level halves the previous value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSchedule {
    eps_finest: f64,
}

impl ThresholdSchedule {
    pub fn new(eps_finest: f64) -> Result<Self, Error> {
        if !(eps_finest >= 0.0) {
            return Err(Error::BadParameter("threshold must be >= 0"));
        }
        Ok(ThresholdSchedule { eps_finest })
    }

    pub fn eps_finest(&self) -> f64 {
        self.eps_finest
    }

    /// Threshold for detail level `idx` (0 = coarsest) of `total` levels.
    pub fn eps_at(&self, idx: usize, total: usize) -> f64 {
        debug_assert!(idx < total);
        self.eps_finest * Float::powi(0.5, (total - 1 - idx) as i32)
    }
}

/// Reconstruction errors between two equally sized grids: e1 is the mean
/// absolute difference and e2 the root mean square scaled by 1/n (both zero
/// for identical grids).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub e1: f64,
    pub e2: f64,
}

/// Decompose `g` into `levels` detail levels over a coarse remainder.
pub fn forward(
    g: &CellGrid,
    levels: u32,
    predictor: &Predictor,
    policy: BoundaryPolicy,
) -> Result<MRRepresentation, Error> {
    if levels >= usize::BITS {
        return Err(Error::BadParameter("level count out of range"));
    }
    let n = g.n();
    let div = 1usize << levels;
    if n % div != 0 {
        return Err(Error::NotDivisible { n, levels });
    }
    let coarsest = n / div;
    if coarsest < 2 {
        return Err(Error::CoarsestTooSmall { coarsest, min: 2 });
    }
    let mut details = Vec::with_capacity(levels as usize);
    let mut cur = g.clone();
    for _ in 0..levels {
        let coarse = decimate(&cur)?;
        let pred = predictor.predict(&coarse, policy)?;
        let m = coarse.n();
        let mut d1 = vec![0.0; m * m];
        let mut d2 = vec![0.0; m * m];
        let mut d3 = vec![0.0; m * m];
        for ci in 0..m {
            for cj in 0..m {
                let (fi, fj) = (2 * ci, 2 * cj);
                let at = ci * m + cj;
                d1[at] = cur.get(fi, fj) - pred.get(fi, fj);
                d2[at] = cur.get(fi + 1, fj) - pred.get(fi + 1, fj);
                d3[at] = cur.get(fi, fj + 1) - pred.get(fi, fj + 1);
            }
        }
        details.push(DetailLevel { n: m, d1, d2, d3 });
        cur = coarse;
    }
    details.reverse();
    Ok(MRRepresentation {
        coarse: cur,
        details,
        kind: predictor.kind(),
        r: predictor.r(),
        params: predictor.params(),
    })
}

/// Rebuild the full grid, constructing the predictor recorded in the header.
pub fn inverse(rep: &MRRepresentation, policy: BoundaryPolicy) -> Result<CellGrid, Error> {
    let predictor = Predictor::new(rep.kind, rep.r, rep.params)?;
    inverse_with(rep, &predictor, policy)
}

/// Rebuild the full grid with a caller-supplied predictor, which must match
/// the header (prediction is not self-describing: a different operator would
/// silently decode garbage).
pub fn inverse_with(
    rep: &MRRepresentation,
    predictor: &Predictor,
    policy: BoundaryPolicy,
) -> Result<CellGrid, Error> {
    if predictor.kind() != rep.kind || predictor.r() != rep.r {
        return Err(Error::BadParameter(
            "predictor does not match the representation header",
        ));
    }
    let mut cur = rep.coarse.clone();
    for lvl in &rep.details {
        if lvl.n != cur.n() {
            return Err(Error::SizeMismatch {
                left: lvl.n,
                right: cur.n(),
            });
        }
        let mut fine = predictor.predict(&cur, policy)?;
        let m = lvl.n;
        for ci in 0..m {
            for cj in 0..m {
                let (fi, fj) = (2 * ci, 2 * cj);
                let at = ci * m + cj;
                let c1 = fine.get(fi, fj) + lvl.d1[at];
                let c2 = fine.get(fi + 1, fj) + lvl.d2[at];
                let c3 = fine.get(fi, fj + 1) + lvl.d3[at];
                fine.set(fi, fj, c1);
                fine.set(fi + 1, fj, c2);
                fine.set(fi, fj + 1, c3);
                // the fourth child restores the coarse quarter-sum exactly
                fine.set(fi + 1, fj + 1, 4.0 * cur.get(ci, cj) - c1 - c2 - c3);
            }
        }
        cur = fine;
    }
    Ok(cur)
}

/// Zero out every detail whose magnitude is at or below its level threshold.
pub fn threshold(rep: &MRRepresentation, sched: &ThresholdSchedule) -> MRRepresentation {
    let mut out = rep.clone();
    let total = out.details.len();
    for (idx, lvl) in out.details.iter_mut().enumerate() {
        let eps = sched.eps_at(idx, total);
        for plane in [&mut lvl.d1, &mut lvl.d2, &mut lvl.d3] {
            for v in plane.iter_mut() {
                if Float::abs(*v) <= eps {
                    *v = 0.0;
                }
            }
        }
    }
    out
}

/// Number of nonzero stored detail coefficients (the coarse grid is not
/// counted).
pub fn nnz(rep: &MRRepresentation) -> usize {
    rep.details
        .iter()
        .flat_map(|lvl| [&lvl.d1, &lvl.d2, &lvl.d3])
        .map(|plane| plane.iter().filter(|&&v| v != 0.0).count())
        .sum()
}

/// Discrete reconstruction errors between two grids of equal size.
pub fn metrics(a: &CellGrid, b: &CellGrid) -> Result<Metrics, Error> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let n = a.n();
    let mut s1 = Sum::new();
    let mut s2 = Sum::new();
    for (x, y) in a.data().iter().zip(b.data()) {
        let d = x - y;
        s1.add(Float::abs(d));
        s2.add(d * d);
    }
    Ok(Metrics {
        e1: s1.value() / (n * n) as f64,
        e2: Float::sqrt(s2.value()) / n as f64,
    })
}
