//! Fine-from-coarse cell-average prediction.
//!
//! Each coarse cell is refined into its four children. Three of them are
//! predicted from the surrounding (2r-1) x (2r-1) window — the low/low child
//! from the window as-is, and the two mixed-parity children from copies
//! reversed along one axis — while the fourth is completed from the
//! quarter-sum identity, so every operator here reproduces the coarse value
//! as the exact mean of its four children.
//!
//! Three operators share that frame:
//! - `Linear`: the full-window tensor filter; exact on tensor polynomials of
//!   degree 2r-2 per variable.
//! - `WenoClassical`: one nonlinear combination of the r^2 sub-stencil tensor
//!   predictions, with the flattened optimal weights as linear weights.
//! - `WenoProgressive`: the stagewise merge of sub-stencil predictions, with
//!   every pairwise-tensor merge's four linear weights replaced by nonlinear
//!   ones, routed to the oscillation indicators of the sub-stencils the merge
//!   is advancing toward.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::Error;
use crate::filters::FilterLadder;
use crate::grid::{extend, BoundaryPolicy, CellGrid, Domain};
use crate::smoothness::SmoothnessForms;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictorKind {
    Linear,
    WenoClassical,
    WenoProgressive,
}

/// Regularizer in the nonlinear weight denominators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    Fixed(f64),
    /// The squared coarse spacing, with the domain normalized to unit width:
    /// predicting from an n x n grid uses (1/n)^2.
    GridScaled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WenoParams {
    pub epsilon: Epsilon,
    /// Exponent t in alpha = C / (eps + I)^t.
    pub power: f64,
}

impl Default for WenoParams {
    fn default() -> Self {
        WenoParams {
            epsilon: Epsilon::GridScaled,
            power: 2.0,
        }
    }
}

impl WenoParams {
    /// The effective eps when predicting from an n x n coarse grid.
    pub fn resolve_epsilon(&self, n_coarse: usize) -> f64 {
        match self.epsilon {
            Epsilon::Fixed(e) => e,
            Epsilon::GridScaled => {
                let h = 1.0 / n_coarse as f64;
                h * h
            }
        }
    }
}

/// Nonlinear weights for one merge group: out_i proportional to
/// linear_i / (eps + I_i)^power, normalized to sum 1.
///
/// With eps = 0 the formula's limits are taken explicitly: if every
/// indicator vanishes the linear weights are returned unchanged, and if only
/// some vanish those members split the mass in proportion to their linear
/// weights while the rest get 0.
pub fn nonlinear_weights(
    linear: &[f64],
    indicators: &[f64],
    epsilon: f64,
    power: f64,
    out: &mut [f64],
) {
    debug_assert_eq!(linear.len(), indicators.len());
    debug_assert_eq!(linear.len(), out.len());
    if epsilon == 0.0 && indicators.iter().any(|&v| v == 0.0) {
        if indicators.iter().all(|&v| v == 0.0) {
            out.copy_from_slice(linear);
            return;
        }
        let mut total = 0.0;
        for i in 0..linear.len() {
            out[i] = if indicators[i] == 0.0 { linear[i] } else { 0.0 };
            total += out[i];
        }
        for o in out.iter_mut() {
            *o /= total;
        }
        return;
    }
    let mut total = 0.0;
    for i in 0..linear.len() {
        out[i] = linear[i] / Float::powf(epsilon + indicators[i], power);
        total += out[i];
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

struct Scratch {
    d: Vec<f64>,
    cur: Vec<f64>,
    next: Vec<f64>,
    om: Vec<f64>,
}

pub struct Predictor {
    kind: PredictorKind,
    r: usize,
    params: WenoParams,
    ladder: FilterLadder,
    forms: Option<SmoothnessForms>,
    /// Flattened optimal tensor weights gamma_a * gamma_b (classical kind).
    gamma2: Vec<f64>,
}

impl Predictor {
    pub fn new(kind: PredictorKind, r: usize, params: WenoParams) -> Result<Self, Error> {
        if r < 1 {
            return Err(Error::BadParameter("prediction order r must be >= 1"));
        }
        let ladder = FilterLadder::build(r)?;
        let (forms, gamma2) = if kind == PredictorKind::Linear {
            (None, Vec::new())
        } else {
            if r < 2 {
                return Err(Error::BadParameter("WENO prediction needs r >= 2"));
            }
            if let Epsilon::Fixed(e) = params.epsilon {
                if !(e >= 0.0) {
                    return Err(Error::BadParameter("epsilon must be >= 0"));
                }
            }
            if !(params.power > 0.0) {
                return Err(Error::BadParameter("weight exponent must be > 0"));
            }
            let g = ladder.flattened();
            let mut gamma2 = vec![0.0; r * r];
            for a in 0..r {
                for b in 0..r {
                    gamma2[a * r + b] = g[a] * g[b];
                }
            }
            (Some(SmoothnessForms::build(r)?), gamma2)
        };
        Ok(Predictor {
            kind,
            r,
            params,
            ladder,
            forms,
            gamma2,
        })
    }

    pub fn kind(&self) -> PredictorKind {
        self.kind
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn params(&self) -> WenoParams {
        self.params
    }

    /// Ghost-cell margin required around the coarse grid.
    pub fn halo(&self) -> usize {
        self.r - 1
    }

    /// Predict the doubled grid from `coarse`, extending it by the stencil
    /// halo under the given boundary policy.
    pub fn predict(&self, coarse: &CellGrid, policy: BoundaryPolicy) -> Result<CellGrid, Error> {
        let ext = extend(coarse, self.halo(), policy)?;
        self.predict_extended(&ext)
    }

    /// Predict from a grid that already carries halo = r-1 ghost cells on
    /// every side (so callers can supply exact off-grid averages instead of a
    /// boundary extension). The output covers only the interior.
    pub fn predict_extended(&self, ext: &CellGrid) -> Result<CellGrid, Error> {
        let r = self.r;
        let halo = r - 1;
        let w = 2 * r - 1;
        let ne = ext.n();
        if ne < w {
            return Err(Error::BadParameter(
                "extended grid is smaller than one stencil window",
            ));
        }
        let n = ne - 2 * halo;
        let h = ext.h();
        let d = ext.domain();
        let m = halo as f64 * h;
        let domain = Domain {
            x_lo: d.x_lo + m,
            x_hi: d.x_hi - m,
            y_lo: d.y_lo + m,
            y_hi: d.y_hi - m,
        };
        let nf = 2 * n;
        let mut fine = vec![0.0; nf * nf];
        match self.kind {
            PredictorKind::Linear => self.fill_linear(ext, n, &mut fine),
            _ => self.fill_weno(ext, n, &mut fine),
        }
        CellGrid::new(nf, ext.level() + 1, domain, fine)
    }

    fn fill_linear(&self, ext: &CellGrid, n: usize, fine: &mut [f64]) {
        let r = self.r;
        let halo = r - 1;
        let w = 2 * r - 1;
        let ne = ext.n();
        let nf = 2 * n;
        let v = self.ladder.top();
        let vr: Vec<f64> = v.iter().rev().cloned().collect();
        let data = ext.data();
        for ci in 0..n {
            for cj in 0..n {
                let mut p00 = 0.0;
                let mut p10 = 0.0;
                let mut p01 = 0.0;
                for a in 0..w {
                    let row = &data[(ci + a) * ne + cj..(ci + a) * ne + cj + w];
                    let mut s = 0.0;
                    let mut sr = 0.0;
                    for b in 0..w {
                        s += v[b] * row[b];
                        sr += vr[b] * row[b];
                    }
                    p00 += v[a] * s;
                    p10 += vr[a] * s;
                    p01 += v[a] * sr;
                }
                let center = data[(ci + halo) * ne + cj + halo];
                let p11 = 4.0 * center - p00 - p10 - p01;
                let (fi, fj) = (2 * ci, 2 * cj);
                fine[fi * nf + fj] = p00;
                fine[(fi + 1) * nf + fj] = p10;
                fine[fi * nf + fj + 1] = p01;
                fine[(fi + 1) * nf + fj + 1] = p11;
            }
        }
    }

    fn fill_weno(&self, ext: &CellGrid, n: usize, fine: &mut [f64]) {
        let r = self.r;
        let w = 2 * r - 1;
        let ne = ext.n();
        let nf = 2 * n;
        let rr = r * r;
        let forms = self.forms.as_ref().unwrap();
        let eps = self.params.resolve_epsilon(n);
        let data = ext.data();
        let mut win = vec![0.0; w * w];
        let mut flip = vec![0.0; w * w];
        let mut ind = vec![0.0; rr];
        let mut indf = vec![0.0; rr];
        let mut scr = Scratch {
            d: vec![0.0; rr],
            cur: vec![0.0; rr],
            next: vec![0.0; rr],
            om: vec![0.0; rr],
        };
        for ci in 0..n {
            for cj in 0..n {
                for a in 0..w {
                    let row = &data[(ci + a) * ne + cj..(ci + a) * ne + cj + w];
                    win[a * w..(a + 1) * w].copy_from_slice(row);
                }
                // indicators once, on the canonical window
                for k1 in 0..r {
                    for k2 in 0..r {
                        for p in 0..r {
                            for q in 0..r {
                                scr.d[p * r + q] = win[(k1 + p) * w + (k2 + q)];
                            }
                        }
                        ind[k1 * r + k2] = forms.evaluate(k1, k2, &scr.d);
                    }
                }
                let p00 = self.weno_child(&win, &ind, eps, &mut scr);
                // x-reversed window; indicators remap because reversing a
                // sub-stencil leaves its oscillation unchanged
                for a in 0..w {
                    for b in 0..w {
                        flip[a * w + b] = win[(w - 1 - a) * w + b];
                    }
                }
                for k1 in 0..r {
                    for k2 in 0..r {
                        indf[k1 * r + k2] = ind[(r - 1 - k1) * r + k2];
                    }
                }
                let p10 = self.weno_child(&flip, &indf, eps, &mut scr);
                // y-reversed window
                for a in 0..w {
                    for b in 0..w {
                        flip[a * w + b] = win[a * w + (w - 1 - b)];
                    }
                }
                for k1 in 0..r {
                    for k2 in 0..r {
                        indf[k1 * r + k2] = ind[k1 * r + (r - 1 - k2)];
                    }
                }
                let p01 = self.weno_child(&flip, &indf, eps, &mut scr);
                let center = win[(r - 1) * w + (r - 1)];
                let p11 = 4.0 * center - p00 - p10 - p01;
                let (fi, fj) = (2 * ci, 2 * cj);
                fine[fi * nf + fj] = p00;
                fine[(fi + 1) * nf + fj] = p10;
                fine[fi * nf + fj + 1] = p01;
                fine[(fi + 1) * nf + fj + 1] = p11;
            }
        }
    }

    /// One child value from a window copy and its (already oriented)
    /// indicators.
    fn weno_child(&self, win: &[f64], ind: &[f64], eps: f64, scr: &mut Scratch) -> f64 {
        let r = self.r;
        let w = 2 * r - 1;
        // the r^2 sub-stencil tensor predictions
        for k1 in 0..r {
            let fx = self.ladder.base(k1);
            for k2 in 0..r {
                let fy = self.ladder.base(k2);
                let mut acc = 0.0;
                for p in 0..r {
                    let row = &win[(k1 + p) * w + k2..(k1 + p) * w + k2 + r];
                    let mut s = 0.0;
                    for q in 0..r {
                        s += fy[k2 + q] * row[q];
                    }
                    acc += fx[k1 + p] * s;
                }
                scr.cur[k1 * r + k2] = acc;
            }
        }
        match self.kind {
            PredictorKind::WenoClassical => {
                nonlinear_weights(&self.gamma2, ind, eps, self.params.power, &mut scr.om);
                let mut v = 0.0;
                for i in 0..r * r {
                    v += scr.om[i] * scr.cur[i];
                }
                v
            }
            PredictorKind::WenoProgressive => {
                let t = self.params.power;
                let mut dim = r;
                for s in r..=(2 * r - 2) {
                    let out_dim = dim - 1;
                    let step = s - r + 1;
                    for k1 in 0..out_dim {
                        let (c1, e1) = self.ladder.stage_pair(s, k1);
                        for k2 in 0..out_dim {
                            let (c2, e2) = self.ladder.stage_pair(s, k2);
                            // group members in (d1, d2) = (0,0),(0,1),(1,0),(1,1) order
                            let lin = [c1 * c2, c1 * e2, e1 * c2, e1 * e2];
                            let ind4 = [
                                ind[k1 * r + k2],
                                ind[k1 * r + (k2 + step)],
                                ind[(k1 + step) * r + k2],
                                ind[(k1 + step) * r + (k2 + step)],
                            ];
                            let vals = [
                                scr.cur[k1 * dim + k2],
                                scr.cur[k1 * dim + k2 + 1],
                                scr.cur[(k1 + 1) * dim + k2],
                                scr.cur[(k1 + 1) * dim + k2 + 1],
                            ];
                            let mut om = [0.0; 4];
                            nonlinear_weights(&lin, &ind4, eps, t, &mut om);
                            scr.next[k1 * out_dim + k2] = om[0] * vals[0]
                                + om[1] * vals[1]
                                + om[2] * vals[2]
                                + om[3] * vals[3];
                        }
                    }
                    scr.cur[..out_dim * out_dim].copy_from_slice(&scr.next[..out_dim * out_dim]);
                    dim = out_dim;
                }
                scr.cur[0]
            }
            PredictorKind::Linear => unreachable!(),
        }
    }
}
