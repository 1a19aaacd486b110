use crate::roles::TimeSeries;

use super::AnalyticsError;

/// Sample Pearson correlation, clamped to `[-1, 1]`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, AnalyticsError> {
    if x.len() != y.len() {
        return Err(AnalyticsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(AnalyticsError::TooFewPoints(x.len()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalyticsError::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson over the pairs where both values are present.
pub fn pearson_present(x: &[Option<f64>], y: &[Option<f64>]) -> Result<f64, AnalyticsError> {
    if x.len() != y.len() {
        return Err(AnalyticsError::LengthMismatch(x.len(), y.len()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip();
    pearson(&xs, &ys)
}

/// Correlates two series after aligning them on the coarser grid.
///
/// Only the overlapping time range is used. The series with fewer grid
/// points inside it provides the grid (the first on a tie); the other is
/// sampled there by carrying its last observation forward.
pub fn series_correlation(a: &TimeSeries, b: &TimeSeries) -> Result<f64, AnalyticsError> {
    let (xa, xb) = align_series(a, b)?;
    pearson_present(&xa, &xb)
}

/// The aligned value pairs used by [`series_correlation`].
pub fn align_series(
    a: &TimeSeries,
    b: &TimeSeries,
) -> Result<(Vec<Option<f64>>, Vec<Option<f64>>), AnalyticsError> {
    let (Some(&a0), Some(&b0)) = (a.grid().first(), b.grid().first()) else {
        return Err(AnalyticsError::NoOverlap);
    };
    let lo = a0.max(b0);
    let hi = (*a.grid().last().unwrap()).min(*b.grid().last().unwrap());
    if lo > hi {
        return Err(AnalyticsError::NoOverlap);
    }
    let inside = |s: &TimeSeries| s.grid().iter().filter(|&&t| t >= lo && t <= hi).count();
    let (coarse, fine, swapped) = if inside(b) < inside(a) {
        (b, a, true)
    } else {
        (a, b, false)
    };
    let mut xc = Vec::new();
    let mut xf = Vec::new();
    for (t, v) in coarse.points().filter(|&(t, _)| t >= lo && t <= hi) {
        xc.push(v);
        xf.push(fine.value_at(t));
    }
    Ok(if swapped { (xf, xc) } else { (xc, xf) })
}
