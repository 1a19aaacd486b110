//! Power-law fits to address-reuse histograms.
//!
//! The primary fit is a straight line through `(ln r, ln p(r))`, where
//! `p(r)` is the fraction of addresses used exactly `r` times. Only the
//! contiguous run of non-empty bins that starts at the first non-empty bin
//! at or above `r_min` is used: past the first empty bin the surviving bins
//! are the lucky non-zero draws and sit above the true curve, flattening
//! the slope. Bins are weighted by their counts (the inverse variance of a
//! log Poisson count).
//!
//! A discrete maximum-likelihood estimate over every address with
//! `r >= r_min` is emitted alongside as a cross-check.

use std::fmt;
use std::io::Write;

use crate::cluster::ReuseHistogram;

use super::AnalyticsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    LogLogLeastSquares,
    DiscreteMle,
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitMethod::LogLogLeastSquares => "loglog_wls",
            FitMethod::DiscreteMle => "discrete_mle",
        })
    }
}

/// `p(r) = amplitude * r^-exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub r_min: u64,
    /// Last bin of the contiguous support that was fitted.
    pub r_max: u64,
    pub fit_method: FitMethod,
    /// RMS of `ln p_model(r) - ln p(r)` over the fitted bins.
    pub residual: f64,
}

impl PowerLawFit {
    pub fn predict(&self, r: f64) -> f64 {
        self.amplitude * r.powf(-self.exponent)
    }
}

pub const FIT_REPORT_HEADER: [&str; 5] = ["exponent", "amplitude", "r_min", "residual", "method"];

/// CSV `exponent,amplitude,r_min,residual,method`.
pub fn write_fit_report<W: Write>(fits: &[PowerLawFit], w: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(FIT_REPORT_HEADER)?;
    for f in fits {
        wtr.write_record([
            f.exponent.to_string(),
            f.amplitude.to_string(),
            f.r_min.to_string(),
            f.residual.to_string(),
            f.fit_method.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `(r, count)` over the contiguous non-empty run that starts at the first
/// non-empty bin at or above `r_min`.
fn contiguous_support(hist: &ReuseHistogram, r_min: u64) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    for (&r, &c) in hist.bins.range(r_min..).filter(|(_, &c)| c > 0) {
        if out.last().is_some_and(|&(prev, _)| r != prev + 1) {
            break;
        }
        out.push((r, c));
    }
    out
}

pub fn fit_power_law(hist: &ReuseHistogram, r_min: u64) -> Result<PowerLawFit, AnalyticsError> {
    let r_min = r_min.max(1);
    let support = contiguous_support(hist, r_min);
    if support.len() < 3 {
        return Err(AnalyticsError::DegenerateFit {
            usable_bins: support.len(),
        });
    }
    let total = hist.total_addresses as f64;
    let pts: Vec<(f64, f64, f64)> = support
        .iter()
        .map(|&(r, c)| ((r as f64).ln(), (c as f64 / total).ln(), c as f64))
        .collect();

    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = rms(pts.iter().map(|p| intercept + slope * p.0 - p.1));

    let exponent = -slope;
    if !(exponent > 0.0) {
        return Err(AnalyticsError::NonDecreasingFit { slope });
    }
    Ok(PowerLawFit {
        exponent,
        amplitude: intercept.exp(),
        r_min,
        r_max: support.last().unwrap().0,
        fit_method: FitMethod::LogLogLeastSquares,
        residual,
    })
}

/// Discrete power-law MLE over all addresses with `r >= r_min`, maximizing
/// `-a Σ ln r - N ln ζ(a, r_min)` by golden-section search on `a ∈ (1, 12]`.
pub fn fit_power_law_mle(
    hist: &ReuseHistogram,
    r_min: u64,
) -> Result<PowerLawFit, AnalyticsError> {
    let r_min = r_min.max(1);
    let support = contiguous_support(hist, r_min);
    if support.len() < 3 {
        return Err(AnalyticsError::DegenerateFit {
            usable_bins: support.len(),
        });
    }
    let (mut n, mut sum_ln) = (0.0, 0.0);
    for (&r, &c) in hist.bins.range(r_min..) {
        n += c as f64;
        sum_ln += c as f64 * (r as f64).ln();
    }
    let q = r_min as f64;
    let loglik = |a: f64| -a * sum_ln - n * hurwitz_zeta(a, q).ln();

    let (mut lo, mut hi) = (1.0 + 1e-6, 12.0);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (loglik(x1), loglik(x2));
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = loglik(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = loglik(x1);
        }
    }
    let exponent = 0.5 * (lo + hi);
    let tail_fraction = n / hist.total_addresses as f64;
    let amplitude = tail_fraction / hurwitz_zeta(exponent, q);
    let total = hist.total_addresses as f64;
    let residual = rms(support.iter().map(|&(r, c)| {
        (amplitude * (r as f64).powf(-exponent)).ln() - (c as f64 / total).ln()
    }));
    Ok(PowerLawFit {
        exponent,
        amplitude,
        r_min,
        r_max: support.last().unwrap().0,
        fit_method: FitMethod::DiscreteMle,
        residual,
    })
}

fn rms(it: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut k) = (0.0, 0usize);
    for e in it {
        s += e * e;
        k += 1;
    }
    (s / k as f64).sqrt()
}

/// Hurwitz zeta `Σ_{k>=0} (q + k)^-s` for `s > 1`, `q > 0`, via
/// Euler–Maclaurin summation after 32 explicit terms.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    const N: usize = 32;
    // B_{2j} / (2j)!
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let mut sum: f64 = (0..N).map(|k| (q + k as f64).powf(-s)).sum();
    let x = q + N as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // Rising factorial s (s+1) ... (s+2j-2) times x^{-s-2j+1}.
    let mut rising = s;
    let mut xp = x.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        sum += b * rising * xp;
        let k = 2 * j + 1;
        rising *= (s + k as f64) * (s + k as f64 + 1.0);
        xp /= x * x;
    }
    sum
}
