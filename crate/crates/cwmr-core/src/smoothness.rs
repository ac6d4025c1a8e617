//! Oscillation indicators for the r x r sub-stencils of a prediction window.
//!
//! Each member (k1, k2) of the window reconstructs a tensor-product
//! polynomial of bi-degree (r-1, r-1) from its r x r cell averages. The
//! indicator integrates the squares of all mixed partial derivatives of that
//! polynomial over the center cell (in coordinates normalized to the coarse
//! spacing, so a given jump pattern scores the same at every level):
//!
//!   I = sum over (m, n) != (0, 0) of  ∫∫ (d^m/du^m d^n/dv^n R)^2 du dv
//!
//! which is a quadratic form d^T Q d in the flattened sub-window averages d.
//! The forms are assembled exactly in rational arithmetic and stored as f64.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

use crate::error::Error;
use crate::grid::Sum;
use crate::ratpoly::{lagrange_basis, rat, to_f64, RPoly, Rat};

/// One r^2 x r^2 quadratic form per window member, shared by both axes'
/// orientations (reversal symmetry is handled by the caller's index remap).
#[derive(Debug, Clone)]
pub struct SmoothnessForms {
    r: usize,
    mats: Vec<Vec<f64>>,
}

/// Cell-average reconstruction basis for 1D sub-stencil k: polynomials g_p,
/// p = 0..r, with R(u) = sum_p avg[p] * g_p(u) on nodes k-r ..= k.
fn reconstruction_basis(r: usize, k: usize) -> Vec<RPoly> {
    let nodes: Vec<i64> = (k as i64 - r as i64..=k as i64).collect();
    let dls: Vec<RPoly> = lagrange_basis(&nodes)
        .iter()
        .map(|l| l.derivative())
        .collect();
    (0..r)
        .map(|p| {
            let mut g = RPoly::zero();
            for dl in dls.iter().skip(p + 1) {
                g = g.add(dl);
            }
            g
        })
        .collect()
}

/// Axis Gram matrices G[m][p][q] = ∫_{-1}^{0} g_p^(m) g_q^(m) du for
/// derivative orders m = 0..r.
fn axis_grams(r: usize, k: usize) -> Vec<Vec<Vec<Rat>>> {
    let basis = reconstruction_basis(r, k);
    let lo = rat(-1, 1);
    let hi = rat(0, 1);
    let mut grams = Vec::with_capacity(r);
    let mut ders: Vec<RPoly> = basis;
    for _ in 0..r {
        let mut g = vec![vec![Rat::zero(); r]; r];
        for p in 0..r {
            for q in p..r {
                let v = ders[p].mul(&ders[q]).integrate(&lo, &hi);
                g[p][q] = v.clone();
                g[q][p] = v;
            }
        }
        grams.push(g);
        ders = ders.iter().map(|d| d.derivative()).collect();
    }
    grams
}

/// Exact quadratic forms, one per member (k1, k2), each flattened
/// r^2 x r^2 row-major; member index is k1 * r + k2 and coefficient index
/// is p * r + q for sub-window offsets (p, q) along (x, y).
pub fn quadratic_forms_rational(r: usize) -> Result<Vec<Vec<Rat>>, Error> {
    if r < 2 {
        return Err(Error::BadParameter(
            "oscillation indicators need r >= 2",
        ));
    }
    let grams: Vec<Vec<Vec<Vec<Rat>>>> = (0..r).map(|k| axis_grams(r, k)).collect();
    let rr = r * r;
    let mut mats = Vec::with_capacity(rr);
    for k1 in 0..r {
        for k2 in 0..r {
            let gx = &grams[k1];
            let gy = &grams[k2];
            let mut q = vec![Rat::zero(); rr * rr];
            for m in 0..r {
                for n in 0..r {
                    if m == 0 && n == 0 {
                        continue;
                    }
                    for p in 0..r {
                        for pp in 0..r {
                            let a = &gx[m][p][pp];
                            if a.is_zero() {
                                continue;
                            }
                            for qq1 in 0..r {
                                for qq2 in 0..r {
                                    let b = &gy[n][qq1][qq2];
                                    if b.is_zero() {
                                        continue;
                                    }
                                    q[(p * r + qq1) * rr + (pp * r + qq2)] += a * b;
                                }
                            }
                        }
                    }
                }
            }
            mats.push(q);
        }
    }
    Ok(mats)
}

impl SmoothnessForms {
    pub fn build(r: usize) -> Result<Self, Error> {
        let mats = quadratic_forms_rational(r)?
            .into_iter()
            .map(|m| m.iter().map(to_f64).collect())
            .collect();
        Ok(SmoothnessForms { r, mats })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn member_count(&self) -> usize {
        self.r * self.r
    }

    /// Indicator for member (k1, k2) given its flattened r x r sub-window
    /// averages d (index p * r + q). The form annihilates constants, so the
    /// mean is subtracted first purely to keep the evaluation well
    /// conditioned when the values share a large common offset; the result
    /// is clamped to be nonnegative.
    pub fn evaluate(&self, k1: usize, k2: usize, d: &[f64]) -> f64 {
        let rr = self.r * self.r;
        debug_assert_eq!(d.len(), rr);
        let mat = &self.mats[k1 * self.r + k2];
        let mut mean = Sum::new();
        for &v in d {
            mean.add(v);
        }
        let mean = mean.value() / rr as f64;
        let mut total = Sum::new();
        for i in 0..rr {
            let ci = d[i] - mean;
            if ci == 0.0 {
                continue;
            }
            let row = &mat[i * rr..(i + 1) * rr];
            let mut acc = 0.0;
            for (j, &qij) in row.iter().enumerate() {
                acc += qij * (d[j] - mean);
            }
            total.add(ci * acc);
        }
        total.value().max(0.0)
    }

    /// All r^2 indicators of one (2r-1) x (2r-1) window (row-major, x index
    /// major), written to `out` at member index k1 * r + k2.
    pub fn indicators_from_window(&self, window: &[f64], out: &mut [f64]) {
        let r = self.r;
        let w = 2 * r - 1;
        debug_assert_eq!(window.len(), w * w);
        debug_assert_eq!(out.len(), r * r);
        let mut d = vec![0.0; r * r];
        for k1 in 0..r {
            for k2 in 0..r {
                for p in 0..r {
                    for q in 0..r {
                        d[p * r + q] = window[(k1 + p) * w + (k2 + q)];
                    }
                }
                out[k1 * r + k2] = self.evaluate(k1, k2, &d);
            }
        }
    }
}
