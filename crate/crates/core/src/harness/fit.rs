use crate::error::{QbxError, Result};

/// Errors below this are rounding noise and are left out of order fits.
pub const ERROR_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    /// Least-squares slope of `log(error)` against `log(parameter)`.
    pub slope: f64,
    /// Root-mean-square residual of the fit, in natural-log units.
    pub residual: f64,
    /// Number of points that entered the fit.
    pub points: usize,
}

/// Fits `error ~ C * parameter^slope`. Points with errors under
/// [`ERROR_FLOOR`] are dropped; at least three must remain, spanning at
/// least two octaves of the parameter.
pub fn fit_order(params: &[f64], errors: &[f64]) -> Result<OrderFit> {
    if params.len() != errors.len() {
        return Err(QbxError::Domain(format!(
            "{} parameters but {} errors",
            params.len(),
            errors.len()
        )));
    }
    if let Some(p) = params.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(QbxError::Domain(format!(
            "parameters must be positive and finite, got {p}"
        )));
    }
    if errors.iter().any(|e| e.is_nan()) {
        return Err(QbxError::Domain("error values contain NaN".into()));
    }
    let pts: Vec<(f64, f64)> = params
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e >= ERROR_FLOOR && e.is_finite())
        .map(|(p, e)| (p.ln(), e.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(QbxError::InsufficientData(format!(
            "{} usable points above the {ERROR_FLOOR:e} floor; need 3",
            pts.len()
        )));
    }
    let (lo, hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (x, _)| {
            (lo.min(*x), hi.max(*x))
        });
    if hi - lo < 2.0 * std::f64::consts::LN_2 * (1.0 - 1e-12) {
        return Err(QbxError::InsufficientData(
            "usable parameters span less than two octaves".into(),
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(OrderFit {
        slope,
        residual,
        points: pts.len(),
    })
}
