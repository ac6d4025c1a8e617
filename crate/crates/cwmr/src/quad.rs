//! Tensor-product Gauss–Legendre quadrature over rectangular cells, plus an
//! adaptive subdivision wrapper for integrands needing local refinement.

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
///
/// Roots of the Legendre polynomial are found by Newton iteration from the
/// Chebyshev-angle initial guesses; the rule is exact for polynomials of
/// degree 2n - 1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 1.0;
        for _ in 0..60 {
            let (p, d) = legendre_with_derivative(n, x);
            deriv = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        nodes[k] = x;
        weights[k] = 2.0 / ((1.0 - x * x) * deriv * deriv);
    }
    (nodes, weights)
}

/// Legendre polynomial P_n and its derivative at x, by three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    let deriv = n as f64 * (x * cur - prev) / (x * x - 1.0);
    (cur, deriv)
}

/// Average of f over [x0, x1] x [y0, y1] by a single pts x pts tensor rule.
pub fn cell_average<F: Fn(f64, f64) -> f64>(
    f: &F,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    pts: usize,
) -> f64 {
    let (t, w) = gauss_legendre(pts);
    let xm = 0.5 * (x0 + x1);
    let xr = 0.5 * (x1 - x0);
    let ym = 0.5 * (y0 + y1);
    let yr = 0.5 * (y1 - y0);
    let mut acc = 0.0;
    for a in 0..pts {
        let x = xm + xr * t[a];
        for b in 0..pts {
            acc += w[a] * w[b] * f(x, ym + yr * t[b]);
        }
    }
    // weights sum to 2 per axis, so dividing by 4 turns the integral into an average
    0.25 * acc
}

/// Average of f over a cell, refining by quadrants until two successive
/// estimates agree to tol (or the depth cap is reached).
pub fn adaptive_cell_average<F: Fn(f64, f64) -> f64>(
    f: &F,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    tol: f64,
) -> f64 {
    refine(f, x0, x1, y0, y1, tol, 24)
}

fn refine<F: Fn(f64, f64) -> f64>(
    f: &F,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let whole = cell_average(f, x0, x1, y0, y1, 5);
    let xm = 0.5 * (x0 + x1);
    let ym = 0.5 * (y0 + y1);
    let quads = [
        (x0, xm, y0, ym),
        (xm, x1, y0, ym),
        (x0, xm, ym, y1),
        (xm, x1, ym, y1),
    ];
    let split: f64 = quads
        .iter()
        .map(|&(a, b, c, d)| cell_average(f, a, b, c, d, 5))
        .sum::<f64>()
        * 0.25;
    if (whole - split).abs() <= tol || depth == 0 {
        return split;
    }
    quads
        .iter()
        .map(|&(a, b, c, d)| refine(f, a, b, c, d, tol * 0.5, depth - 1))
        .sum::<f64>()
        * 0.25
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_point_rule_is_exact_through_degree_nine() {
        let (t, w) = gauss_legendre(5);
        assert!((w.iter().sum::<f64>() - 2.0).abs() <= 1e-14);
        for p in 0..=9u32 {
            let got: f64 = t.iter().zip(&w).map(|(x, c)| c * x.powi(p as i32)).sum();
            let want = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((got - want).abs() <= 1e-14, "degree {p}: {got} vs {want}");
        }
    }

    #[test]
    fn nodes_are_symmetric_with_positive_weights() {
        for n in [2, 3, 7, 12] {
            let (t, w) = gauss_legendre(n);
            assert!(w.iter().all(|&c| c > 0.0));
            for k in 0..n {
                assert!((t[k] + t[n - 1 - k]).abs() <= 1e-14);
                assert!((w[k] - w[n - 1 - k]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn cell_average_matches_closed_forms() {
        let lin = |x: f64, _: f64| x;
        assert!((cell_average(&lin, 0.0, 1.0, 0.0, 1.0, 3) - 0.5).abs() <= 1e-15);
        let poly = |x: f64, y: f64| x * x * y * y * y;
        let got = cell_average(&poly, 0.0, 2.0, 1.0, 3.0, 4);
        // averages of x^2 on [0,2] and y^3 on [1,3]
        let want = (8.0 / 6.0) * (80.0 / 8.0);
        assert!((got - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn adaptive_average_converges_on_smooth_integrands() {
        let f = |x: f64, y: f64| x.exp() * y.cos();
        let got = adaptive_cell_average(&f, 0.0, 1.0, 0.0, 1.0, 1e-13);
        let want = (1.0f64.exp() - 1.0) * 1.0f64.sin();
        assert!((got - want).abs() <= 1e-12);
    }
}
