//! C² cubic interpolation with not-a-knot end conditions.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplineError {
    #[error("need at least 4 knots, got {0}")]
    TooFewKnots(usize),
    #[error("knots must be finite and strictly increasing (index {0})")]
    NonIncreasing(usize),
    #[error("knot and value counts differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

/// Scalar cubic spline stored in slope (Hermite) form.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self, SplineError> {
        let n = x.len();
        if n != y.len() {
            return Err(SplineError::LengthMismatch(n, y.len()));
        }
        if n < 4 {
            return Err(SplineError::TooFewKnots(n));
        }
        for i in 0..n {
            if !x[i].is_finite() || !y[i].is_finite() || (i > 0 && x[i] <= x[i - 1]) {
                return Err(SplineError::NonIncreasing(i));
            }
        }
        let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let m: Vec<f64> = y.windows(2).zip(&dx).map(|(w, h)| (w[1] - w[0]) / h).collect();

        // Tridiagonal system in the knot slopes.
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            lower[i] = dx[i];
            diag[i] = 2.0 * (dx[i - 1] + dx[i]);
            upper[i] = dx[i - 1];
            rhs[i] = 3.0 * (dx[i] * m[i - 1] + dx[i - 1] * m[i]);
        }
        // not-a-knot: third derivative continuous across the second and second-to-last knots
        let d0 = x[2] - x[0];
        diag[0] = dx[1];
        upper[0] = d0;
        rhs[0] = ((dx[0] + 2.0 * d0) * dx[1] * m[0] + dx[0] * dx[0] * m[1]) / d0;
        let dn = x[n - 1] - x[n - 3];
        diag[n - 1] = dx[n - 3];
        lower[n - 1] = dn;
        rhs[n - 1] = (dx[n - 2] * dx[n - 2] * m[n - 3] + (2.0 * dn + dx[n - 2]) * dx[n - 3] * m[n - 2]) / dn;

        let slopes = solve_tridiagonal(&lower, &diag, &upper, &rhs);
        Ok(Self { x: x.to_vec(), y: y.to_vec(), slopes })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Index of the interval containing `t`; values outside the knots use the end pieces.
    pub fn interval(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&k| k <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        }
    }

    /// Value and first three derivatives at `t`.
    pub fn eval_all(&self, t: f64) -> [f64; 4] {
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let y0 = self.y[i];
        let y1 = self.y[i + 1];
        let s0 = self.slopes[i];
        let s1 = self.slopes[i + 1];
        // p(r) = y0 + s0 r + c2 r² + c3 r³ with r = t - x_i
        let m = (y1 - y0) / h;
        let c2 = (3.0 * m - 2.0 * s0 - s1) / h;
        let c3 = (s0 + s1 - 2.0 * m) / (h * h);
        let r = t - self.x[i];
        [y0 + r * (s0 + r * (c2 + r * c3)), s0 + r * (2.0 * c2 + 3.0 * c3 * r), 2.0 * c2 + 6.0 * c3 * r, 6.0 * c3]
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_all(t)[0]
    }
}

fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        // not-a-knot splines are exact on cubic data
        let f = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t + 0.25 * t * t * t;
        let x: Vec<f64> = [0.0, 0.3, 0.7, 1.2, 1.5, 2.4].to_vec();
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let sp = CubicSpline::new(&x, &y).unwrap();
        for t in [0.1, 0.65, 1.33, 2.2, 2.5] {
            let [v, d1, d2, d3] = sp.eval_all(t);
            assert!((v - f(t)).abs() < 1e-12);
            assert!((d1 - (-2.0 + t + 0.75 * t * t)).abs() < 1e-11);
            assert!((d2 - (1.0 + 1.5 * t)).abs() < 1e-10);
            assert!((d3 - 1.5).abs() < 1e-9);
        }
    }

    #[test]
    fn interpolates_and_converges_on_sine() {
        let err_at = |n: usize| {
            let x: Vec<f64> = (0..n).map(|i| 3.0 * i as f64 / (n - 1) as f64).collect();
            let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
            let sp = CubicSpline::new(&x, &y).unwrap();
            for (xi, yi) in x.iter().zip(&y) {
                assert!((sp.eval(*xi) - yi).abs() < 1e-14);
            }
            (0..300)
                .map(|k| {
                    let t = 3.0 * k as f64 / 299.0;
                    (sp.eval_all(t)[1] - t.cos()).abs()
                })
                .fold(0.0, f64::max)
        };
        let e1 = err_at(21);
        let e2 = err_at(41);
        // slope error is O(h³)
        assert!(e1 / e2 > 6.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(CubicSpline::new(&[0., 1., 2.], &[0., 1., 2.]).unwrap_err(), SplineError::TooFewKnots(3));
        assert_eq!(CubicSpline::new(&[0., 1., 1., 2.], &[0., 1., 2., 3.]).unwrap_err(), SplineError::NonIncreasing(2));
    }
}
