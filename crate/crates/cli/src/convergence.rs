//! Convergence orders fitted from residuals at several resolutions or step sizes.

use serde::{Deserialize, Serialize};

/// Relative residuals below this are round-off and carry no order information.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// Allowed shortfall of a measured order below the declared one.
pub const ORDER_SLACK: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Refinement {
    /// Error against `n_theta`, order `p` in `e ∝ n_theta^{−p}`.
    Resolution,
    /// Error against the flow step, `e ∝ ds^p`.
    Step,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderStatus {
    Pass,
    Fail,
    /// Every usable error is at round-off.
    Resolved,
    /// Fewer than two levels, no order can be fitted.
    Insufficient,
    /// An evaluation at some level failed.
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderRow {
    pub scenario: String,
    pub identity: String,
    pub refinement: Refinement,
    /// `(n_theta or ds, error)` per level.
    pub points: Vec<(f64, f64)>,
    pub order: Option<f64>,
    pub declared: Option<f64>,
    pub status: OrderStatus,
}

/// Least-squares slope of `ln e` against `ln x` over the points above the floor,
/// signed so that convergence is positive. `None` with fewer than two such points.
pub fn fit_order(points: &[(f64, f64)], refinement: Refinement) -> Option<f64> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, e)| *x > 0.0 && *e > ROUNDOFF_FLOOR && e.is_finite())
        .map(|&(x, e)| (x.ln(), e.ln()))
        .collect();
    if used.len() < 2 {
        return None;
    }
    let n = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / n;
    let my = used.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(match refinement {
        Refinement::Resolution => -slope,
        Refinement::Step => slope,
    })
}

impl OrderRow {
    pub fn new(
        scenario: &str,
        identity: &str,
        refinement: Refinement,
        points: Vec<(f64, f64)>,
        declared: Option<f64>,
    ) -> Self {
        let order = fit_order(&points, refinement);
        let status = match order {
            _ if points.len() < 2 => OrderStatus::Insufficient,
            None => OrderStatus::Resolved,
            Some(p) => match declared {
                Some(d) if p < d - ORDER_SLACK => OrderStatus::Fail,
                _ => OrderStatus::Pass,
            },
        };
        Self {
            scenario: scenario.to_string(),
            identity: identity.to_string(),
            refinement,
            points,
            order,
            declared,
            status,
        }
    }

    /// A row for a refinement study that could not be completed.
    pub fn failed(scenario: &str, identity: &str, refinement: Refinement, declared: Option<f64>) -> Self {
        Self {
            scenario: scenario.to_string(),
            identity: identity.to_string(),
            refinement,
            points: Vec::new(),
            order: None,
            declared,
            status: OrderStatus::Error,
        }
    }

    /// Whether the row makes `convergence` exit with failure.
    pub fn fails(&self) -> bool {
        self.status == OrderStatus::Fail || (self.status == OrderStatus::Error && self.declared.is_some())
    }
}
