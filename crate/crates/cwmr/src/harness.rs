//! Decimate-then-predict experiment protocol and convergence studies.

use crate::fields::{sample_cell_averages, TestField};
use cwmr_core::grid::decimate;
use cwmr_core::{BoundaryPolicy, CellGrid, Error, Predictor};

/// Interior L2 prediction error of one field at one resolution.
///
/// The field is sampled exactly on an n x n grid, decimated once, and
/// re-predicted with no stored details; the result is compared against the
/// exact fine averages as sqrt(h^2 sum (pred - exact)^2) over the interior.
/// A margin of 2(r-1) fine cells per side is excluded so that boundary
/// reflection does not pollute the measurement.
pub fn run_function_experiment(
    field: TestField,
    n: usize,
    predictor: &Predictor,
) -> Result<f64, Error> {
    let truth = sample_cell_averages(field, n);
    let coarse = decimate(&truth)?;
    let pred = predictor.predict(&coarse, BoundaryPolicy::Reflect)?;
    interior_l2(&pred, &truth, 2 * (predictor.r() - 1))
}

fn interior_l2(pred: &CellGrid, truth: &CellGrid, margin: usize) -> Result<f64, Error> {
    let n = truth.n();
    if pred.n() != n {
        return Err(Error::SizeMismatch {
            left: pred.n(),
            right: n,
        });
    }
    if 2 * margin >= n {
        return Err(Error::BadParameter("grid too small for the interior margin"));
    }
    let h = truth.h();
    let mut acc = 0.0;
    for i in margin..n - margin {
        for j in margin..n - margin {
            let d = pred.get(i, j) - truth.get(i, j);
            acc += d * d;
        }
    }
    Ok((h * h * acc).sqrt())
}

/// Prediction error across a doubling sequence of resolutions, with the
/// measured order log2(E2(n)/E2(2n)) attached to each refinement.
pub fn convergence_study(
    field: TestField,
    predictor: &Predictor,
    ns: &[usize],
) -> Result<Vec<(usize, f64, Option<f64>)>, Error> {
    if ns.is_empty() {
        return Err(Error::BadParameter("need at least one resolution"));
    }
    for w in ns.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::BadParameter("resolutions must double at each step"));
        }
    }
    let mut out = Vec::with_capacity(ns.len());
    let mut prev: Option<f64> = None;
    for &n in ns {
        let e2 = run_function_experiment(field, n, predictor)?;
        let order = prev.map(|p| (p / e2).log2());
        out.push((n, e2, order));
        prev = Some(e2);
    }
    Ok(out)
}
