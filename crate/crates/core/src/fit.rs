//! Small least-squares helpers shared by the diagnostic fits.

/// Ordinary least-squares line through `(xs, ys)`; returns `(slope, intercept)`.
///
/// Panics if fewer than two points are supplied.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert!(xs.len() == ys.len() && xs.len() >= 2, "need at least two points");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Log-log power-law fit `y ~ C x^s`; returns the exponent `s`.
/// Entries with non-positive `x` or `y` are skipped.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (x, y) in xs.iter().zip(ys) {
        if *x > 0.0 && *y > 0.0 {
            lx.push(x.ln());
            ly.push(y.ln());
        }
    }
    if lx.len() < 2 {
        return None;
    }
    Some(linear_fit(&lx, &ly).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (s, b) = linear_fit(&xs, &ys);
        assert!((s - 2.0).abs() < 1e-14);
        assert!((b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn recovers_power_law() {
        let xs: Vec<f64> = (1..20).map(|i| i as f64 * 0.3).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 4.0 * x.powf(-1.5)).collect();
        let s = loglog_slope(&xs, &ys).unwrap();
        assert!((s + 1.5).abs() < 1e-12);
    }
}
