//! Small least-squares helper shared by the scan modules.

use crate::error::{GfError, Result};

#[derive(Debug, Clone, Copy)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (NaN when fewer than 3 points).
    pub slope_se: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Ordinary least squares `y ~ intercept + slope * x`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<OlsFit> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(GfError::Domain(
            "least squares needs >= 2 paired points".into(),
        ));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(GfError::Domain("degenerate abscissae in fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut rss = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - intercept - slope * x;
        rss += r * r;
    }
    let residual = (rss / nf).sqrt();
    let slope_se = if n > 2 {
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok(OlsFit { slope, intercept, slope_se, residual })
}
