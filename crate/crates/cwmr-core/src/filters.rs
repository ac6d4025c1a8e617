//! Univariate prediction filter banks for cell-average refinement.
//!
//! Geometry, in coordinates normalized to the coarse spacing: the center
//! coarse cell is the interval [-1, 0], primitive-function nodes sit at the
//! integers, and the stencil window holds the 2r-1 cells a = 0..2r-2, cell a
//! covering [a-r, a-r+1]. The odd fine child is the left half [-1, -1/2] of
//! the center cell; its average equals 2*(I(-1/2) - F(-1)), where I
//! interpolates the primitive F on a sub-stencil's nodes. Expanding that
//! expression in the window's cell averages yields one weight vector per
//! sub-stencil; pairs of neighboring interpolants merge Aitken/Neville-style,
//! stage by stage, up to the single full-window filter. Even children use the
//! same machinery on a reversed window.
//!
//! Construction is exact rational arithmetic, converted to f64 once.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::ratpoly::{lagrange_values, rat, rint, to_f64, Rat};

/// Banks of sub-stencil filters per merge stage plus the stage weights and
/// their flattened (fully multiplied-out) convex coefficients.
///
/// Stage s, for s = r..2r-1, holds 2r-s filters of length 2r-1; stage r is
/// the base bank and stage 2r-1 the single top filter. The pair weights at
/// stage s merge filters k and k+1 into the next stage's filter k.
#[derive(Debug, Clone)]
pub struct FilterLadder {
    r: usize,
    stages_rat: Vec<Vec<Vec<Rat>>>,
    pairs_rat: Vec<Vec<(Rat, Rat)>>,
    flattened_rat: Vec<Rat>,
    stages: Vec<Vec<Vec<f64>>>,
    pairs: Vec<Vec<(f64, f64)>>,
    flattened: Vec<f64>,
}

/// The base bank: r weight vectors of length 2r-1. Filter k is supported on
/// window cells k..k+r-1 and is exact on cell averages of polynomials of
/// degree <= r-1.
pub fn base_cell_filters(r: usize) -> Result<Vec<Vec<Rat>>, Error> {
    if r < 1 {
        return Err(Error::BadParameter("filter parameter r must be >= 1"));
    }
    let ri = r as i64;
    let half = rat(-1, 2);
    let mut filters = Vec::with_capacity(r);
    for k in 0..r as i64 {
        let nodes: Vec<i64> = (k - ri..=k).collect();
        let lag = lagrange_values(&nodes, &half);
        let mut coefs = vec![Rat::zero(); 2 * r - 1];
        for (idx, &node) in nodes.iter().enumerate() {
            // F(node) accumulates the window cells between the sub-stencil's
            // left edge (node k-r) and `node`.
            let hi = (k + ri - 1).min(node + ri - 1);
            let mut a = k;
            while a <= hi {
                coefs[a as usize] += &lag[idx];
                a += 1;
            }
        }
        // subtract F(-1), the primitive at the center cell's left edge
        let mut a = k;
        while a <= ri - 2 {
            coefs[a as usize] -= Rat::one();
            a += 1;
        }
        filters.push(coefs.into_iter().map(|c| c * rint(2)).collect());
    }
    Ok(filters)
}

/// Aitken/Neville pair weights for merging sub-stencil k with k+1 at stage s,
/// evaluated at a general point x (sub-stencil k at stage s spans nodes
/// k-r .. k-r+s). Returns (c_self, c_next) with c_self + c_next = 1.
fn aitken_pair_at(r: usize, s: usize, k: usize, x: &Rat) -> (Rat, Rat) {
    let top = rint((k + s + 1) as i64 - r as i64);
    let c_self = (top - x) / rint((s + 1) as i64);
    let c_next = Rat::one() - &c_self;
    (c_self, c_next)
}

/// Stage pair weights at the odd fine node x = -1/2.
pub fn aitken_stage_weights(r: usize, s: usize, k: usize) -> Result<(Rat, Rat), Error> {
    if r < 2 {
        return Err(Error::BadParameter("stage weights need r >= 2"));
    }
    if s < r || s > 2 * r - 2 {
        return Err(Error::BadParameter("stage out of range"));
    }
    if k > 2 * r - 2 - s {
        return Err(Error::BadParameter("stage sub-index out of range"));
    }
    Ok(aitken_pair_at(r, s, k, &rat(-1, 2)))
}

impl FilterLadder {
    pub fn build(r: usize) -> Result<Self, Error> {
        let base = base_cell_filters(r)?;
        let mut stages_rat = vec![base];
        let mut pairs_rat: Vec<Vec<(Rat, Rat)>> = Vec::new();
        while stages_rat.last().unwrap().len() > 1 {
            let s = r + stages_rat.len() - 1;
            let cur = stages_rat.last().unwrap();
            let mut pairs = Vec::new();
            let mut next = Vec::new();
            for k in 0..cur.len() - 1 {
                let (cs, cn) = aitken_pair_at(r, s, k, &rat(-1, 2));
                let merged: Vec<Rat> = cur[k]
                    .iter()
                    .zip(&cur[k + 1])
                    .map(|(a, b)| a * &cs + b * &cn)
                    .collect();
                pairs.push((cs, cn));
                next.push(merged);
            }
            pairs_rat.push(pairs);
            stages_rat.push(next);
        }

        // Flatten: the coefficient of each base filter inside the top filter.
        let mut up = vec![Rat::one()];
        for si in (0..pairs_rat.len()).rev() {
            let pairs = &pairs_rat[si];
            let mut cur = vec![Rat::zero(); up.len() + 1];
            for k in 0..cur.len() {
                if k < up.len() {
                    cur[k] += &up[k] * &pairs[k].0;
                }
                if k >= 1 {
                    cur[k] += &up[k - 1] * &pairs[k - 1].1;
                }
            }
            up = cur;
        }
        let flattened_rat = up;

        let stages: Vec<Vec<Vec<f64>>> = stages_rat
            .iter()
            .map(|bank| {
                bank.iter()
                    .map(|f| f.iter().map(to_f64).collect())
                    .collect()
            })
            .collect();
        let pairs = pairs_rat
            .iter()
            .map(|v| v.iter().map(|(a, b)| (to_f64(a), to_f64(b))).collect())
            .collect();
        let flattened = flattened_rat.iter().map(to_f64).collect();
        Ok(FilterLadder {
            r,
            stages_rat,
            pairs_rat,
            flattened_rat,
            stages,
            pairs,
            flattened,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Window width 2r-1 in coarse cells.
    pub fn window(&self) -> usize {
        2 * self.r - 1
    }

    /// Base filter k (stage r), full window length.
    pub fn base(&self, k: usize) -> &[f64] {
        &self.stages[0][k]
    }

    /// The single full-window filter (stage 2r-1).
    pub fn top(&self) -> &[f64] {
        &self.stages.last().unwrap()[0]
    }

    /// Filter k at absolute stage s in r..=2r-1.
    pub fn stage_filter(&self, s: usize, k: usize) -> &[f64] {
        &self.stages[s - self.r][k]
    }

    /// Pair weights (c_self, c_next) merging filters k,k+1 at stage s.
    pub fn stage_pair(&self, s: usize, k: usize) -> (f64, f64) {
        self.pairs[s - self.r][k]
    }

    /// Convex coefficients of the base filters inside the top filter.
    pub fn flattened(&self) -> &[f64] {
        &self.flattened
    }

    pub fn base_rational(&self, k: usize) -> &[Rat] {
        &self.stages_rat[0][k]
    }

    pub fn top_rational(&self) -> &[Rat] {
        &self.stages_rat.last().unwrap()[0]
    }

    pub fn stage_filter_rational(&self, s: usize, k: usize) -> &[Rat] {
        &self.stages_rat[s - self.r][k]
    }

    pub fn stage_pair_rational(&self, s: usize, k: usize) -> (&Rat, &Rat) {
        let (a, b) = &self.pairs_rat[s - self.r][k];
        (a, b)
    }

    pub fn flattened_rational(&self) -> &[Rat] {
        &self.flattened_rat
    }

    /// Number of filters at absolute stage s.
    pub fn stage_len(&self, s: usize) -> usize {
        self.stages[s - self.r].len()
    }
}

/// Render an exact coefficient as "p/q" (or a bare integer).
pub fn fraction_string(v: &Rat) -> alloc::string::String {
    crate::ratpoly::fraction_string(v)
}

/// Build an exact rational from an integer numerator and denominator.
pub fn fraction(numer: i64, denom: i64) -> Rat {
    crate::ratpoly::rat(numer, denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::fraction_string;

    fn rats(spec: &[(i64, i64)]) -> Vec<Rat> {
        spec.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn base_bank_r3_matches_reference_constants() {
        let base = base_cell_filters(3).unwrap();
        assert_eq!(
            base[0],
            rats(&[(-1, 8), (1, 2), (5, 8), (0, 1), (0, 1)])
        );
        assert_eq!(base[1], rats(&[(0, 1), (1, 8), (1, 1), (-1, 8), (0, 1)]));
        assert_eq!(
            base[2],
            rats(&[(0, 1), (0, 1), (11, 8), (-1, 2), (1, 8)])
        );
    }

    #[test]
    fn base_bank_r1_copies_parent() {
        assert_eq!(base_cell_filters(1).unwrap(), vec![rats(&[(1, 1)])]);
    }

    #[test]
    fn intermediate_stage_r3() {
        let l = FilterLadder::build(3).unwrap();
        assert_eq!(
            l.stage_filter_rational(4, 0),
            rats(&[(-3, 64), (17, 64), (55, 64), (-5, 64), (0, 1)]).as_slice()
        );
        assert_eq!(
            l.stage_filter_rational(4, 1),
            rats(&[(0, 1), (5, 64), (73, 64), (-17, 64), (3, 64)]).as_slice()
        );
    }

    #[test]
    fn top_filter_r3() {
        let l = FilterLadder::build(3).unwrap();
        assert_eq!(
            l.top_rational(),
            rats(&[(-3, 128), (22, 128), (1, 1), (-22, 128), (3, 128)]).as_slice()
        );
    }

    #[test]
    fn top_filter_r2() {
        let l = FilterLadder::build(2).unwrap();
        assert_eq!(
            l.top_rational(),
            rats(&[(1, 8), (1, 1), (-1, 8)]).as_slice()
        );
    }

    #[test]
    fn top_filter_r4() {
        let l = FilterLadder::build(4).unwrap();
        let expect: Vec<Rat> = [5i64, -44, 201, 1024, -201, 44, -5]
            .iter()
            .map(|&n| rat(n, 1024))
            .collect();
        assert_eq!(l.top_rational(), expect.as_slice());
    }

    #[test]
    fn even_child_filter_is_reversal() {
        let l = FilterLadder::build(3).unwrap();
        let mut rev: Vec<Rat> = l.top_rational().to_vec();
        rev.reverse();
        assert_eq!(
            rev,
            rats(&[(3, 128), (-22, 128), (1, 1), (22, 128), (-3, 128)])
        );
    }

    #[test]
    fn stage_weights_r3() {
        assert_eq!(
            aitken_stage_weights(3, 3, 0).unwrap(),
            (rat(3, 8), rat(5, 8))
        );
        assert_eq!(
            aitken_stage_weights(3, 3, 1).unwrap(),
            (rat(5, 8), rat(3, 8))
        );
        assert_eq!(
            aitken_stage_weights(3, 4, 0).unwrap(),
            (rat(1, 2), rat(1, 2))
        );
    }

    #[test]
    fn stage_weights_vanish_at_right_node() {
        let (cs, cn) = aitken_pair_at(3, 3, 0, &rint(1));
        assert_eq!(cs, rat(0, 1));
        assert_eq!(cn, rat(1, 1));
    }

    #[test]
    fn stage_weights_validate_ranges() {
        assert!(aitken_stage_weights(3, 5, 0).is_err());
        assert!(aitken_stage_weights(3, 2, 0).is_err());
        assert!(aitken_stage_weights(3, 4, 1).is_err());
    }

    #[test]
    fn ladder_pairs_reproduce_next_stage_exactly() {
        for r in 2..=4 {
            let l = FilterLadder::build(r).unwrap();
            for s in r..2 * r - 1 {
                for k in 0..l.stage_len(s) - 1 {
                    let (cs, cn) = l.stage_pair_rational(s, k);
                    let merged: Vec<Rat> = l
                        .stage_filter_rational(s, k)
                        .iter()
                        .zip(l.stage_filter_rational(s, k + 1))
                        .map(|(a, b)| a * cs + b * cn)
                        .collect();
                    assert_eq!(merged.as_slice(), l.stage_filter_rational(s + 1, k));
                }
            }
        }
    }

    #[test]
    fn flattened_weights_r3() {
        let l = FilterLadder::build(3).unwrap();
        assert_eq!(
            l.flattened_rational(),
            rats(&[(3, 16), (5, 8), (3, 16)]).as_slice()
        );
    }

    #[test]
    fn flattened_weights_sum_to_one_and_rebuild_top() {
        for r in 2..=5 {
            let l = FilterLadder::build(r).unwrap();
            let gamma = l.flattened_rational();
            let total: Rat = gamma.iter().fold(Rat::zero(), |acc, g| acc + g);
            assert_eq!(total, Rat::one());
            assert!(gamma.iter().all(|g| g >= &Rat::zero()));
            let mut combo = vec![Rat::zero(); 2 * r - 1];
            for (k, g) in gamma.iter().enumerate() {
                for (a, c) in l.base_rational(k).iter().enumerate() {
                    combo[a] += g * c;
                }
            }
            assert_eq!(combo.as_slice(), l.top_rational());
        }
    }

    #[test]
    fn flattened_weights_match_central_binomials() {
        // closed form: gamma_k = C(2r, 2k+1) / 2^(2r-1)
        fn binom(n: u64, k: u64) -> u64 {
            let mut v = 1u64;
            for i in 0..k {
                v = v * (n - i) / (i + 1);
            }
            v
        }
        for r in 2..=4usize {
            let l = FilterLadder::build(r).unwrap();
            for k in 0..r {
                let expect = rat(
                    binom(2 * r as u64, 2 * k as u64 + 1) as i64,
                    1i64 << (2 * r - 1),
                );
                assert_eq!(&l.flattened_rational()[k], &expect);
            }
        }
    }

    fn cell_avg_pow(a: i64, r: i64, p: u32) -> f64 {
        // average of x^p over window cell a = [a-r, a-r+1]
        let lo = (a - r) as f64;
        let hi = lo + 1.0;
        (hi.powi(p as i32 + 1) - lo.powi(p as i32 + 1)) / (p as f64 + 1.0)
    }

    fn odd_child_avg_pow(p: u32) -> f64 {
        // average of x^p over [-1, -1/2]
        let lo: f64 = -1.0;
        let hi: f64 = -0.5;
        (hi.powi(p as i32 + 1) - lo.powi(p as i32 + 1)) / ((p as f64 + 1.0) * 0.5)
    }

    #[test]
    fn base_filters_exact_on_low_degree_averages() {
        for r in 2..=4usize {
            let l = FilterLadder::build(r).unwrap();
            for k in 0..r {
                for p in 0..r as u32 {
                    let pred: f64 = l
                        .base(k)
                        .iter()
                        .enumerate()
                        .map(|(a, w)| w * cell_avg_pow(a as i64, r as i64, p))
                        .sum();
                    assert!(
                        (pred - odd_child_avg_pow(p)).abs() <= 1e-12,
                        "r={r} k={k} p={p}"
                    );
                }
            }
        }
    }

    #[test]
    fn top_filter_exact_on_high_degree_averages() {
        for r in 2..=4usize {
            let l = FilterLadder::build(r).unwrap();
            for p in 0..=(2 * r as u32 - 2) {
                let pred: f64 = l
                    .top()
                    .iter()
                    .enumerate()
                    .map(|(a, w)| w * cell_avg_pow(a as i64, r as i64, p))
                    .sum();
                assert!((pred - odd_child_avg_pow(p)).abs() <= 1e-12, "r={r} p={p}");
            }
        }
    }

    #[test]
    fn fraction_rendering() {
        let l = FilterLadder::build(3).unwrap();
        assert_eq!(fraction_string(&l.top_rational()[0]), "-3/128");
        assert_eq!(fraction_string(&l.top_rational()[2]), "1");
    }
}
