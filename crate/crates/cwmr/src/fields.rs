//! Analytic test fields and exact cell-average sampling.
//!
//! Every field here has a closed-form antiderivative, so per-cell averages
//! are computed analytically: polynomial terms from power antiderivatives,
//! exponential/trigonometric terms from their primitives, Gaussian bumps via
//! the error function, and jump terms from the exact area of the cell on the
//! high side of the jump line.

use cwmr_core::{CellGrid, Domain};

/// Test surfaces for the prediction-error experiments.
///
/// The first five live on [-1,1]^2; the smooth trigonometric field lives on
/// the unit square and drives convergence studies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestField {
    /// Smooth bivariate polynomial (degree 3 plus an x^2 y^2 term).
    Poly,
    /// The polynomial plus a jump of height `c` across the line y = 0.
    PolyJump { c: f64 },
    /// exp(x+y) cos(x-y) plus a unit jump across the diagonal x + y = 0.
    ExpDiagJump,
    /// Franke's function plus a unit jump across the line y = 0.
    FrankeHorizontal,
    /// Franke's function plus a unit jump across the line x = 0.
    FrankeVertical,
    /// sin(pi x) cos(pi y); smooth everywhere.
    SmoothTrig,
}

impl TestField {
    pub fn domain(&self) -> Domain {
        match self {
            TestField::SmoothTrig => Domain::UNIT,
            _ => Domain::SYMMETRIC,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestField::Poly => "poly",
            TestField::PolyJump { .. } => "poly-jump",
            TestField::ExpDiagJump => "exp-diag",
            TestField::FrankeHorizontal => "franke-h",
            TestField::FrankeVertical => "franke-v",
            TestField::SmoothTrig => "smooth-trig",
        }
    }

    /// Parse a CLI field name; the jump height of `poly-jump` is fixed at 16.
    pub fn parse(name: &str) -> Option<TestField> {
        match name {
            "poly" => Some(TestField::Poly),
            "poly-jump" => Some(TestField::PolyJump { c: 16.0 }),
            "exp-diag" => Some(TestField::ExpDiagJump),
            "franke-h" => Some(TestField::FrankeHorizontal),
            "franke-v" => Some(TestField::FrankeVertical),
            "smooth-trig" => Some(TestField::SmoothTrig),
            _ => None,
        }
    }

    pub fn is_discontinuous(&self) -> bool {
        !matches!(self, TestField::Poly | TestField::SmoothTrig)
    }

    /// Pointwise value, used by the quadrature cross-checks.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        match *self {
            TestField::Poly => poly_value(x, y),
            TestField::PolyJump { c } => poly_value(x, y) + if y >= 0.0 { c } else { 0.0 },
            TestField::ExpDiagJump => {
                (x + y).exp() * (x - y).cos() + if x + y > 0.0 { 1.0 } else { 0.0 }
            }
            TestField::FrankeHorizontal => {
                franke_value(x, y) + if y >= 0.0 { 1.0 } else { 0.0 }
            }
            TestField::FrankeVertical => {
                franke_value(x, y) + if x >= 0.0 { 1.0 } else { 0.0 }
            }
            TestField::SmoothTrig => {
                (std::f64::consts::PI * x).sin() * (std::f64::consts::PI * y).cos()
            }
        }
    }
}

fn poly_value(x: f64, y: f64) -> f64 {
    x * x * x - y * y * y + 2.1 * x * x * y * y + x * x - 0.1 * y * y - y + x - 0.01 * x * y
        + 1.0
}

fn franke_value(x: f64, y: f64) -> f64 {
    let a = 9.0 * x;
    let b = 9.0 * y;
    0.75 * (-((a - 2.0).powi(2) + (b - 2.0).powi(2)) / 4.0).exp()
        + 0.75 * (-(a + 1.0).powi(2) / 49.0 - (b + 1.0) / 10.0).exp()
        + 0.5 * (-((a - 7.0).powi(2) + (b - 3.0).powi(2)) / 4.0).exp()
        - 0.2 * (-(a - 4.0).powi(2) - (b - 7.0).powi(2)).exp()
}

/// Cell edge coordinates lo..hi split into n equal cells (n+1 values).
fn edges(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let w = hi - lo;
    (0..=n).map(|i| lo + w * (i as f64) / (n as f64)).collect()
}

/// Per-cell average of t^p along one axis.
fn avg_pow(e: &[f64], p: u32) -> Vec<f64> {
    let q = (p + 1) as i32;
    e.windows(2)
        .map(|c| (c[1].powi(q) - c[0].powi(q)) / (q as f64 * (c[1] - c[0])))
        .collect()
}

/// Fraction of each 1D cell lying at or above zero.
fn frac_above(e: &[f64]) -> Vec<f64> {
    e.windows(2)
        .map(|c| ((c[1] - c[0].max(0.0)) / (c[1] - c[0])).clamp(0.0, 1.0))
        .collect()
}

/// Per-cell average of exp(-(alpha t - beta)^2 / gamma) along one axis.
fn gauss_avg(e: &[f64], alpha: f64, beta: f64, gamma: f64) -> Vec<f64> {
    let s = gamma.sqrt();
    let prim: Vec<f64> = e
        .iter()
        .map(|&t| (std::f64::consts::PI * gamma).sqrt() / (2.0 * alpha) * libm::erf((alpha * t - beta) / s))
        .collect();
    diff_over_width(&prim, e)
}

/// Per-cell average of exp(-(a0 t + b0)) along one axis.
fn explin_avg(e: &[f64], a0: f64, b0: f64) -> Vec<f64> {
    let prim: Vec<f64> = e.iter().map(|&t| -(-(a0 * t + b0)).exp() / a0).collect();
    diff_over_width(&prim, e)
}

fn diff_over_width(prim: &[f64], e: &[f64]) -> Vec<f64> {
    (0..e.len() - 1)
        .map(|i| (prim[i + 1] - prim[i]) / (e[i + 1] - e[i]))
        .collect()
}

fn ramp2(t: f64) -> f64 {
    let r = t.max(0.0);
    0.5 * r * r
}

/// Exact cell averages of a test field on an n x n grid.
///
/// Requires n >= 2. For the fields whose jump lines are grid-aligned
/// (poly-jump, franke-h, franke-v) n must also be even so that no cell
/// straddles the jump; this is asserted.
pub fn sample_cell_averages(field: TestField, n: usize) -> CellGrid {
    assert!(n >= 2, "grid needs at least 2 cells per side");
    if matches!(
        field,
        TestField::PolyJump { .. } | TestField::FrankeHorizontal | TestField::FrankeVertical
    ) {
        assert!(
            n % 2 == 0,
            "axis-aligned jump fields need even n so the jump falls on a cell boundary"
        );
    }
    let dom = field.domain();
    let ex = edges(dom.x_lo, dom.x_hi, n);
    let ey = edges(dom.y_lo, dom.y_hi, n);
    let data = match field {
        TestField::Poly => poly_averages(&ex, &ey, n, None),
        TestField::PolyJump { c } => poly_averages(&ex, &ey, n, Some(c)),
        TestField::ExpDiagJump => exp_diag_averages(&ex, &ey, n),
        TestField::FrankeHorizontal => franke_averages(&ex, &ey, n, true),
        TestField::FrankeVertical => franke_averages(&ex, &ey, n, false),
        TestField::SmoothTrig => trig_averages(&ex, &ey, n),
    };
    CellGrid::new(n, 0, dom, data).expect("constructed sizes always agree")
}

fn poly_averages(ex: &[f64], ey: &[f64], n: usize, jump: Option<f64>) -> Vec<f64> {
    let mx: Vec<Vec<f64>> = (0..=3).map(|p| avg_pow(ex, p)).collect();
    let my: Vec<Vec<f64>> = (0..=3).map(|p| avg_pow(ey, p)).collect();
    // (coefficient, x power, y power) of each polynomial term
    let terms: [(f64, usize, usize); 9] = [
        (1.0, 3, 0),
        (-1.0, 0, 3),
        (2.1, 2, 2),
        (1.0, 2, 0),
        (-0.1, 0, 2),
        (-1.0, 0, 1),
        (1.0, 1, 0),
        (-0.01, 1, 1),
        (1.0, 0, 0),
    ];
    let fy = jump.map(|_| frac_above(ey));
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut v = 0.0;
            for &(c, px, py) in &terms {
                v += c * mx[px][i] * my[py][j];
            }
            if let (Some(c), Some(f)) = (jump, fy.as_ref()) {
                v += c * f[j];
            }
            data[i * n + j] = v;
        }
    }
    data
}

fn exp_diag_averages(ex: &[f64], ey: &[f64], n: usize) -> Vec<f64> {
    // exp(x+y) cos(x-y) = (e^x cos x)(e^y cos y) + (e^x sin x)(e^y sin y)
    let prim_c = |t: f64| t.exp() * (t.cos() + t.sin()) / 2.0;
    let prim_s = |t: f64| t.exp() * (t.sin() - t.cos()) / 2.0;
    let dc = |e: &[f64]| {
        let p: Vec<f64> = e.iter().map(|&t| prim_c(t)).collect();
        diff_over_width(&p, e)
    };
    let ds = |e: &[f64]| {
        let p: Vec<f64> = e.iter().map(|&t| prim_s(t)).collect();
        diff_over_width(&p, e)
    };
    let (cx, sx) = (dc(ex), ds(ex));
    let (cy, sy) = (dc(ey), ds(ey));
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        let (a, b) = (ex[i], ex[i + 1]);
        let wx = b - a;
        for j in 0..n {
            let (c, d) = (ey[j], ey[j + 1]);
            let wy = d - c;
            // area of the cell with x + y > 0, as a mixed second difference
            let area = ramp2(b + d) - ramp2(a + d) - ramp2(b + c) + ramp2(a + c);
            data[i * n + j] = cx[i] * cy[j] + sx[i] * sy[j] + area / (wx * wy);
        }
    }
    data
}

fn franke_averages(ex: &[f64], ey: &[f64], n: usize, horizontal: bool) -> Vec<f64> {
    let tx = [
        (0.75, gauss_avg(ex, 9.0, 2.0, 4.0)),
        (0.75, gauss_avg(ex, 9.0, -1.0, 49.0)),
        (0.5, gauss_avg(ex, 9.0, 7.0, 4.0)),
        (-0.2, gauss_avg(ex, 9.0, 4.0, 1.0)),
    ];
    let ty = [
        gauss_avg(ey, 9.0, 2.0, 4.0),
        explin_avg(ey, 0.9, 0.1),
        gauss_avg(ey, 9.0, 3.0, 4.0),
        gauss_avg(ey, 9.0, 7.0, 1.0),
    ];
    let fx = frac_above(ex);
    let fy = frac_above(ey);
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut v = 0.0;
            for (t, y) in tx.iter().zip(&ty) {
                v += t.0 * t.1[i] * y[j];
            }
            v += if horizontal { fy[j] } else { fx[i] };
            data[i * n + j] = v;
        }
    }
    data
}

fn trig_averages(ex: &[f64], ey: &[f64], n: usize) -> Vec<f64> {
    let pi = std::f64::consts::PI;
    let sx: Vec<f64> = {
        let p: Vec<f64> = ex.iter().map(|&t| -(pi * t).cos() / pi).collect();
        diff_over_width(&p, ex)
    };
    let cy: Vec<f64> = {
        let p: Vec<f64> = ey.iter().map(|&t| (pi * t).sin() / pi).collect();
        diff_over_width(&p, ey)
    };
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = sx[i] * cy[j];
        }
    }
    data
}

/// Exact cell averages of sin(x + 2y) over a 5x5 window of cells of width h
/// whose center cell is centered at (cx, cy). Used by the smoothness-property
/// sweeps.
pub fn sin_of_x_plus_2y_window(cx: f64, cy: f64, h: f64) -> Vec<f64> {
    // mixed antiderivative: d^2/dxdy of -sin(x+2y)/2 = sin(x+2y)
    let prim = |x: f64, y: f64| -0.5 * (x + 2.0 * y).sin();
    let mut out = vec![0.0; 25];
    for a in 0..5 {
        let x0 = cx + (a as f64 - 2.5) * h;
        let x1 = x0 + h;
        for b in 0..5 {
            let y0 = cy + (b as f64 - 2.5) * h;
            let y1 = y0 + h;
            out[a * 5 + b] =
                (prim(x1, y1) - prim(x0, y1) - prim(x1, y0) + prim(x0, y0)) / (h * h);
        }
    }
    out
}
