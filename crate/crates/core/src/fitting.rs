//! Ordinary least squares on transformed axes.
//!
//! Shared by the mixing-rate fits, the variance-growth slope diagnostics, and
//! the convergence-study decay fit.

use crate::error::{LabError, Result};

/// Result of a simple linear regression `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    /// Root-mean-square residual in the regression space.
    pub rmse: f64,
}

/// Least-squares line through `(x, y)` pairs.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(LabError::Validation(format!(
            "ols: mismatched lengths {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(LabError::FitUndefined(format!(
            "ols needs at least 2 points, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(LabError::FitUndefined(
            "ols: zero variance in the regressor".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        ss += r * r;
    }
    let fit = LinearFit {
        intercept,
        slope,
        rmse: (ss / n).sqrt(),
    };
    if !fit.intercept.is_finite() || !fit.slope.is_finite() {
        return Err(LabError::Numeric("ols produced non-finite coefficients".into()));
    }
    Ok(fit)
}

/// Least-squares fit of `log y ≈ log C − a·log x`, i.e. `y ≈ C·x^{−a}`.
///
/// Only strictly positive `(x, y)` pairs enter the regression.
pub fn loglog_ols(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .unzip();
    ols(&lx, &ly)
}
