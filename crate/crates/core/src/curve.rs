//! Utility curves mapping certain-equivalent values to utilities.

use serde::{Deserialize, Serialize};

/// Slope used to extend a tabulated curve beyond its breakpoints, so the
/// curve stays strictly monotone (hence invertible) on all of f64.
pub const TABULATED_EXTENSION_SLOPE: f64 = 1e-12;

/// A monotone non-decreasing map from certain equivalents to utility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum UtilityCurve {
    /// u(x) = x. Risk neutral.
    Linear,
    /// u(x) = 1 - exp(-x / risk_tolerance). Constant risk aversion.
    Exponential { risk_tolerance: f64 },
    /// Piecewise-linear through `(ce, utility)` breakpoints that are strictly
    /// increasing in both coordinates; extended past the ends with a tiny
    /// positive slope.
    TabulatedMonotone { breakpoints: Vec<(f64, f64)> },
}

impl UtilityCurve {
    pub fn utility(&self, ce: f64) -> f64 {
        match self {
            UtilityCurve::Linear => ce,
            UtilityCurve::Exponential { risk_tolerance } => 1.0 - (-ce / risk_tolerance).exp(),
            UtilityCurve::TabulatedMonotone { breakpoints } => {
                let first = breakpoints[0];
                let last = breakpoints[breakpoints.len() - 1];
                if ce <= first.0 {
                    return first.1 + (ce - first.0) * TABULATED_EXTENSION_SLOPE;
                }
                if ce >= last.0 {
                    return last.1 + (ce - last.0) * TABULATED_EXTENSION_SLOPE;
                }
                let hi = breakpoints.partition_point(|&(c, _)| c < ce);
                let (c0, u0) = breakpoints[hi - 1];
                let (c1, u1) = breakpoints[hi];
                u0 + (ce - c0) / (c1 - c0) * (u1 - u0)
            }
        }
    }

    /// Inverse of [`Self::utility`]; `None` when `u` lies outside the curve's
    /// range (only possible for the exponential curve, whose range is
    /// bounded above by 1).
    pub fn inverse(&self, u: f64) -> Option<f64> {
        match self {
            UtilityCurve::Linear => Some(u),
            UtilityCurve::Exponential { risk_tolerance } => {
                if u >= 1.0 {
                    None
                } else {
                    Some(-risk_tolerance * (1.0 - u).ln())
                }
            }
            UtilityCurve::TabulatedMonotone { breakpoints } => {
                let first = breakpoints[0];
                let last = breakpoints[breakpoints.len() - 1];
                if u <= first.1 {
                    return Some(first.0 + (u - first.1) / TABULATED_EXTENSION_SLOPE);
                }
                if u >= last.1 {
                    return Some(last.0 + (u - last.1) / TABULATED_EXTENSION_SLOPE);
                }
                let hi = breakpoints.partition_point(|&(_, v)| v < u);
                let (c0, u0) = breakpoints[hi - 1];
                let (c1, u1) = breakpoints[hi];
                Some(c0 + (u - u0) / (u1 - u0) * (c1 - c0))
            }
        }
    }

    /// Whether shifting every outcome by a constant shifts the certain
    /// equivalent of any lottery by the same constant. Holds exactly for the
    /// linear and exponential curves.
    pub fn satisfies_delta_property(&self) -> bool {
        matches!(
            self,
            UtilityCurve::Linear | UtilityCurve::Exponential { .. }
        )
    }
}
