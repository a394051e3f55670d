//! Closed-form completion-time analysis for slotted broadcast of a
//! `k`-packet coded generation to `n` receivers over an erasure channel.
//!
//! Two model families are provided: a discrete slotted model (binomial
//! arrivals per receiver) and a continuous large-scale model (Poisson
//! arrivals), together with the feedback-time solvers built on them.

mod continuous;
mod discrete;
pub(crate) mod numeric;

pub use continuous::{
    accommodated_n, beta_continuous, regularized_upper_gamma, t_star_continuous,
};
pub use discrete::{
    beta_discrete, beta_hat, derived_missing_bound, first_time_discrete,
    per_node_completion_discrete, straggler_stats,
};

use crate::error::{Error, Result};

/// Parameters of the discrete slotted model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteParams {
    /// Generation size: packets (degrees of freedom) per file.
    pub k: u64,
    /// Packet erasure probability, in `[0, 1)`.
    pub p_e: f64,
    /// Receiver count.
    pub n: u64,
}

impl DiscreteParams {
    pub fn new(k: u64, p_e: f64, n: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k", "packet count must be at least 1"));
        }
        if n == 0 {
            return Err(Error::invalid("n", "receiver count must be at least 1"));
        }
        if !(0.0..1.0).contains(&p_e) {
            return Err(Error::invalid("p_e", format!("must lie in [0, 1), got {p_e}")));
        }
        Ok(Self { k, p_e, n })
    }
}

/// Parameters of the continuous (Poisson-arrival) model. `lambda = 1 - p_e`
/// is the arrival rate per slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousParams {
    pub k: u64,
    pub lambda: f64,
    pub n: u64,
}

impl ContinuousParams {
    pub fn new(k: u64, lambda: f64, n: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k", "packet count must be at least 1"));
        }
        if n == 0 {
            return Err(Error::invalid("n", "receiver count must be at least 1"));
        }
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::invalid(
                "lambda",
                format!("arrival rate must lie in (0, 1], got {lambda}"),
            ));
        }
        Ok(Self { k, lambda, n })
    }

    /// Rate from an erasure probability: `lambda = 1 - p_e`.
    pub fn from_erasure(k: u64, p_e: f64, n: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&p_e) {
            return Err(Error::invalid("p_e", format!("must lie in [0, 1), got {p_e}")));
        }
        Self::new(k, 1.0 - p_e, n)
    }
}

/// Which model produced a tabulated curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    Discrete,
    Continuous,
}

/// Tabulated completion probability over a time grid.
#[derive(Debug, Clone)]
pub struct BetaCurve {
    /// Slot times; integers for the discrete model.
    pub t_values: Vec<f64>,
    /// `P(all n receivers complete by t)` at each grid point.
    pub beta_values: Vec<f64>,
    pub model_tag: ModelTag,
}

impl BetaCurve {
    /// Discrete-model curve on the integer grid `t_from..=t_to`.
    pub fn discrete(params: &DiscreteParams, t_from: u64, t_to: u64) -> Self {
        let mut t_values = Vec::new();
        let mut beta_values = Vec::new();
        for t in t_from..=t_to {
            t_values.push(t as f64);
            beta_values.push(beta_discrete(t, params));
        }
        BetaCurve {
            t_values,
            beta_values,
            model_tag: ModelTag::Discrete,
        }
    }

    /// Continuous-model curve on an explicit grid (must be ascending).
    pub fn continuous(params: &ContinuousParams, grid: &[f64]) -> Result<Self> {
        let mut beta_values = Vec::with_capacity(grid.len());
        for &t in grid {
            beta_values.push(beta_continuous(t, params)?);
        }
        Ok(BetaCurve {
            t_values: grid.to_vec(),
            beta_values,
            model_tag: ModelTag::Continuous,
        })
    }

    /// Check the structural invariants: probabilities in [0,1], nondecreasing
    /// in t. Used by tests and the CLI before emission.
    pub fn validate(&self) -> Result<()> {
        if self.t_values.len() != self.beta_values.len() {
            return Err(Error::invalid("beta_curve", "grid/value length mismatch"));
        }
        let mut prev_t = f64::NEG_INFINITY;
        let mut prev_b = -1.0;
        for (&t, &b) in self.t_values.iter().zip(&self.beta_values) {
            if t < 0.0 || t <= prev_t {
                return Err(Error::invalid("beta_curve", "t grid must be ascending"));
            }
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::invalid("beta_curve", format!("beta {b} outside [0,1]")));
            }
            if b + 1e-12 < prev_b {
                return Err(Error::invalid(
                    "beta_curve",
                    format!("beta not monotone at t={t}: {prev_b} -> {b}"),
                ));
            }
            prev_t = t;
            prev_b = b;
        }
        Ok(())
    }
}

/// Distribution of the straggler count at a candidate feedback time.
#[derive(Debug, Clone)]
pub struct StragglerStats {
    /// Feedback time the statistics refer to.
    pub t: u64,
    /// `pmf[i] = P(exactly i of n receivers incomplete at t)`.
    pub pmf: Vec<f64>,
    /// Expected straggler count.
    pub mean: f64,
}
