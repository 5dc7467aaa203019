use crate::error::{Result, TangenciaError};

/// Least-squares slope of `ln y` against `ln x` and the RMS residual.
/// Points with a non-positive coordinate are skipped.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = logs.len() as f64;
    if logs.len() < 2 {
        return Err(TangenciaError::DegenerateFit(format!("{} usable points", logs.len())));
    }
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(TangenciaError::DegenerateFit("all x values equal".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let rss: f64 = logs.iter().map(|p| (p.1 - icept - slope * p.0).powi(2)).sum();
    Ok((slope, (rss / n).sqrt()))
}
