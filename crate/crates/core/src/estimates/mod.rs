//! Scaling verdicts for the test-field bounds over ladders of gap heights.
//!
//! Every bound is turned into a log-log least-squares slope of a (possibly
//! h-weighted) measured quantity against `ln h` and compared with the
//! expected exponent. Constants in the bounds are existential, so only the
//! exponents are asserted.

mod checks;
mod identities;
mod p1;
mod tresca;

pub use checks::{check_fields, FieldCheckReport, FieldCheckSpec};
pub use identities::{
    korn_ratio, korn_ratio_annulus, lambda_flux_identity, KornReport, ShearSample, VectorField, ZeroField,
};
pub use p1::{
    log_law_oracle, measure_p1, moment_scaling, mu_sensitivity, p1_report_ids, phi_integral, verify_p1, P1Measurement,
};
pub use tresca::{tresca_classify, ShearMeasure, StickSlip, TrescaPartition, TrescaSample};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `h in {1e-1, ..., 1e-5}`.
pub const DEFAULT_LADDER: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];

pub const SLOPE_TOLERANCE: f64 = 0.1;

/// Abscissa of the log-log fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeAxis {
    /// `ln h`.
    LogH,
    /// `ln |ln h|`, for logarithmic laws.
    LogAbsLogH,
}

impl SlopeAxis {
    fn abscissa(&self, h: f64) -> f64 {
        match self {
            SlopeAxis::LogH => h.ln(),
            SlopeAxis::LogAbsLogH => h.ln().abs().ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub id: String,
    pub description: String,
    pub h: Vec<f64>,
    /// Raw measured quantity.
    pub values: Vec<f64>,
    /// Quantity after the h-weighting of the bound; the slope is fitted to these.
    pub weighted: Vec<f64>,
    pub axis: SlopeAxis,
    pub slope: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ScalingReport {
    #[allow(clippy::too_many_arguments)]
    pub fn fit(
        id: impl Into<String>,
        description: impl Into<String>,
        h: &[f64],
        values: Vec<f64>,
        weighted: Vec<f64>,
        axis: SlopeAxis,
        expected: f64,
        tolerance: f64,
    ) -> Result<Self> {
        validate_ladder(h, 3, 0.0)?;
        if values.len() != h.len() || weighted.len() != h.len() {
            return Err(Error::invalid("values", "one value per ladder point is required"));
        }
        let xs: Vec<f64> = h.iter().map(|&x| axis.abscissa(x)).collect();
        let ys: Vec<f64> = weighted
            .iter()
            .map(|&v| {
                if v > 0.0 && v.is_finite() {
                    Ok(v.ln())
                } else {
                    Err(Error::invalid("weighted", format!("log-log fit needs positive values, got {v}")))
                }
            })
            .collect::<Result<_>>()?;
        let slope = fit_slope(&xs, &ys)?;
        Ok(Self {
            id: id.into(),
            description: description.into(),
            h: h.to_vec(),
            values,
            weighted,
            axis,
            slope,
            expected,
            tolerance,
            passed: (slope - expected).abs() <= tolerance,
        })
    }

    /// Same fit judged against another tolerance.
    pub fn with_tolerance(&self, tolerance: f64) -> Self {
        Self {
            tolerance,
            passed: (self.slope - self.expected).abs() <= tolerance,
            ..self.clone()
        }
    }

    /// `max / min` of the weighted values.
    pub fn spread(&self) -> f64 {
        let max = self.weighted.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.weighted.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("fit_slope", "need at least two paired points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::invalid("fit_slope", "abscissae are all equal"));
    }
    let s = sxy / sxx;
    if s.is_finite() {
        Ok(s)
    } else {
        Err(Error::NonFinite("slope fit"))
    }
}

/// Strictly decreasing values in `(0, 1]` with enough points and decades.
pub fn validate_ladder(h: &[f64], min_points: usize, min_decades: f64) -> Result<()> {
    if h.len() < min_points {
        return Err(Error::invalid(
            "ladder",
            format!("{} points given, at least {min_points} required", h.len()),
        ));
    }
    if h.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
        return Err(Error::invalid("ladder", "gap heights must lie in (0, 1]"));
    }
    if h.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::invalid("ladder", "gap heights must be strictly decreasing"));
    }
    let decades = (h[0] / h[h.len() - 1]).log10();
    if decades + 1e-9 < min_decades {
        return Err(Error::invalid(
            "ladder",
            format!("spans {decades:.2} decades, at least {min_decades} required"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn slope_of_power_law() {
        let h = DEFAULT_LADDER;
        let v: Vec<f64> = h.iter().map(|x| 3.0 * x.powf(-0.5)).collect();
        let r = ScalingReport::fit("p", "", &h, v.clone(), v, SlopeAxis::LogH, -0.5, 0.1).unwrap();
        assert_relative_eq!(r.slope, -0.5, epsilon = 1e-12);
        assert!(r.passed);
        let off = ScalingReport {
            expected: 0.0,
            ..r.clone()
        };
        assert!(!off.with_tolerance(0.1).passed);
        assert!(off.with_tolerance(0.6).passed);
    }

    #[test]
    fn log_axis() {
        let h = DEFAULT_LADDER;
        let v: Vec<f64> = h.iter().map(|x| 2.0 * x.ln().abs()).collect();
        let r = ScalingReport::fit("l", "", &h, v.clone(), v, SlopeAxis::LogAbsLogH, 1.0, 0.15).unwrap();
        assert_relative_eq!(r.slope, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ladder_validation() {
        assert!(validate_ladder(&DEFAULT_LADDER, 5, 4.0).is_ok());
        assert!(validate_ladder(&[1e-1, 1e-2, 1e-3], 5, 0.0).is_err());
        assert!(validate_ladder(&[1e-1, 1e-1, 1e-3], 3, 0.0).is_err());
        assert!(validate_ladder(&[2.0, 1e-1, 1e-3], 3, 0.0).is_err());
        assert!(validate_ladder(&[1e-1, 1e-2, 1e-3, 1e-4], 4, 4.0).is_err());
    }

    #[test]
    fn nonpositive_values_rejected() {
        let h = [1e-1, 1e-2, 1e-3];
        assert!(ScalingReport::fit("z", "", &h, vec![1.0; 3], vec![1.0, 0.0, 1.0], SlopeAxis::LogH, 0.0, 0.1).is_err());
    }
}
