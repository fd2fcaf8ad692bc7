use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{frame_bounds, BoundsReport};
use crate::config::validate_ns;
use crate::error::{Error, Result};
use crate::seqcore::{build_sequence, SequenceSpec};

/// Frame bounds at each truncation index. Truncations are evaluated in
/// parallel and returned in the order of `ns`.
pub fn truncation_sweep(spec: &SequenceSpec, ns: &[usize]) -> Result<Vec<BoundsReport>> {
    validate_ns(ns)?;
    ns.par_iter()
        .map(|&n| build_sequence(spec, n).map(|s| frame_bounds(&s)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundsField {
    #[serde(rename = "lower_A")]
    LowerA,
    #[serde(rename = "upper_B")]
    UpperB,
    #[serde(rename = "ratio")]
    Ratio,
}

impl BoundsField {
    pub fn of(&self, r: &BoundsReport) -> f64 {
        match self {
            BoundsField::LowerA => r.lower_a,
            BoundsField::UpperB => r.upper_b,
            BoundsField::Ratio => r.ratio,
        }
    }
}

/// Slope cutoffs on `log(value)` against `log(N)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendThresholds {
    pub diverging: f64,
    pub vanishing: f64,
}

impl TrendThresholds {
    pub fn symmetric(t: f64) -> Self {
        TrendThresholds { diverging: t, vanishing: -t }
    }
}

impl Default for TrendThresholds {
    fn default() -> Self {
        TrendThresholds::symmetric(0.25)
    }
}

/// Growth of a positive series across truncations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "trend", rename_all = "snake_case")]
pub enum Trend {
    Bounded { slope: f64 },
    Diverging { slope: f64 },
    /// `slope` is `None` when the series reaches exactly zero.
    VanishingToZero { slope: Option<f64> },
}

impl Trend {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Trend::Bounded { .. })
    }

    pub fn is_diverging(&self) -> bool {
        matches!(self, Trend::Diverging { .. })
    }

    pub fn is_vanishing(&self) -> bool {
        matches!(self, Trend::VanishingToZero { .. })
    }

    pub fn slope(&self) -> Option<f64> {
        match *self {
            Trend::Bounded { slope } | Trend::Diverging { slope } => Some(slope),
            Trend::VanishingToZero { slope } => slope,
        }
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    least_squares_slope(&lx, &ly)
}

/// Least-squares slope of `y` against `ln x`.
pub fn semilog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    least_squares_slope(&lx, ys)
}

/// Classifies a nonnegative series sampled at increasing `xs`.
///
/// A series ending at exactly zero is `VanishingToZero` without a slope;
/// otherwise the fit runs over the strictly positive samples.
pub fn classify_series(xs: &[f64], ys: &[f64], thresholds: TrendThresholds) -> Result<Trend> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < 3 {
        return Err(Error::invalid(format!("trend needs at least 3 samples, got {}", xs.len())));
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) || !(xs[0] > 0.0) {
        return Err(Error::invalid("trend abscissae must be positive and strictly increasing"));
    }
    if ys.iter().any(|y| !(*y >= 0.0) || !y.is_finite()) {
        return Err(Error::invalid("trend values must be finite and nonnegative"));
    }
    if *ys.last().expect("non-empty") == 0.0 {
        return Ok(Trend::VanishingToZero { slope: None });
    }
    let (px, py): (Vec<f64>, Vec<f64>) =
        xs.iter().zip(ys).filter(|(_, y)| **y > 0.0).map(|(x, y)| (*x, *y)).unzip();
    if px.len() < 2 {
        return Ok(Trend::Bounded { slope: 0.0 });
    }
    let slope = loglog_slope(&px, &py);
    Ok(if slope > thresholds.diverging {
        Trend::Diverging { slope }
    } else if slope < thresholds.vanishing {
        Trend::VanishingToZero { slope: Some(slope) }
    } else {
        Trend::Bounded { slope }
    })
}

/// Trend of one field of a sweep against the truncation index.
pub fn growth_classify(
    reports: &[BoundsReport],
    field: BoundsField,
    thresholds: TrendThresholds,
) -> Result<Trend> {
    if reports.len() < 3 {
        return Err(Error::invalid(format!("trend needs at least 3 reports, got {}", reports.len())));
    }
    let xs = reports
        .iter()
        .map(|r| r.trunc_index.map(|n| n as f64))
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| Error::invalid("reports without a truncation index"))?;
    let ys: Vec<f64> = reports.iter().map(|r| field.of(r)).collect();
    classify_series(&xs, &ys, thresholds)
}
