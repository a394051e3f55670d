//! Discrete slotted model: binomial completion tails, straggler statistics,
//! and the first-feedback-time solver.

use super::numeric::{binomial_tail_logs, log_binom_pmf, KahanSum};
use super::{DiscreteParams, StragglerStats};
use crate::error::{Error, Result};

/// Largest receiver count for which the full straggler pmf is materialized.
const MAX_PMF_RECEIVERS: u64 = 100_000_000;

fn check_p(p_e: f64, field: &'static str) -> Result<()> {
    if !(0.0..1.0).contains(&p_e) {
        return Err(Error::invalid(field, format!("must lie in [0, 1), got {p_e}")));
    }
    Ok(())
}

/// Probability that a single receiver holds at least `k` degrees of freedom
/// after `t` slots: the upper tail of Binomial(t, 1 - p_e) at `k`.
pub fn per_node_completion_discrete(t: u64, k: u64, p_e: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("k", "packet count must be at least 1"));
    }
    check_p(p_e, "p_e")?;
    Ok(binomial_tail_logs(t, k, p_e).log_upper.exp())
}

/// Probability that all `n` receivers have completed after `t` slots,
/// computed as `n * ln(per-node)` in log space so it survives `n` up to 1e7.
pub fn beta_discrete(t: u64, params: &DiscreteParams) -> f64 {
    let logs = binomial_tail_logs(t, params.k, params.p_e);
    (params.n as f64 * logs.log_upper).exp()
}

/// Smallest `t` with `beta_discrete(t) >= beta_star`: exponential growth to
/// bracket the monotone curve, then integer bisection.
pub fn first_time_discrete(beta_star: f64, params: &DiscreteParams) -> Result<u64> {
    if !(beta_star > 0.0 && beta_star < 1.0) {
        return Err(Error::invalid(
            "beta_star",
            format!("must lie in (0, 1), got {beta_star}"),
        ));
    }
    let hit = |t: u64| beta_discrete(t, params) >= beta_star;
    let mut lo = params.k.saturating_sub(1); // beta = 0 below k
    let mut hi = params.k.max(1);
    while !hit(hi) {
        lo = hi;
        hi = hi.checked_mul(2).ok_or_else(|| {
            Error::invalid("beta_star", "threshold unreachable within u64 slot range")
        })?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if hit(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Distribution of the number of receivers still incomplete at time `t`.
///
/// The count is Binomial(n, q) with q the per-node failure probability; the
/// mean is the closed form `n * q`.
pub fn straggler_stats(t: u64, params: &DiscreteParams) -> Result<StragglerStats> {
    if params.n > MAX_PMF_RECEIVERS {
        return Err(Error::invalid(
            "n",
            format!("straggler pmf materialization capped at n = {MAX_PMF_RECEIVERS}"),
        ));
    }
    let logs = binomial_tail_logs(t, params.k, params.p_e);
    let q = logs.log_lower.exp(); // per-node failure
    let p_done = logs.log_upper.exp();
    let n = params.n;
    let nf = n as f64;

    let mut pmf = vec![0.0; (n + 1) as usize];
    pmf[0] = (nf * logs.log_upper).exp();
    pmf[n as usize] = (nf * logs.log_lower).exp();
    for i in 1..n {
        pmf[i as usize] = log_binom_pmf(i, n, q, p_done).exp();
    }

    Ok(StragglerStats {
        t,
        pmf,
        mean: nf * q,
    })
}

impl StragglerStats {
    /// Tail-sum form of the mean, `sum_{i>=1} P(N >= i)`; used as the
    /// cross-check route against the closed form.
    pub fn mean_by_tail_sum(&self) -> f64 {
        let mut suffix = 0.0;
        let mut acc = KahanSum::default();
        for &p in self.pmf.iter().skip(1).rev() {
            suffix += p;
            acc.add(suffix);
        }
        acc.value()
    }
}

/// Missing-dof bound a caller derives from an outstanding transmission
/// budget: `ceil(m_outstanding * (1 - p_e))`.
pub fn derived_missing_bound(m_outstanding: u64, p_e: f64) -> u64 {
    ((m_outstanding as f64) * (1.0 - p_e)).ceil() as u64
}

/// Probability that `n1` stragglers, each missing at most `m_missing` dofs,
/// all complete within `m_outstanding` further slots.
pub fn beta_hat(m_outstanding: u64, m_missing: u64, n1: u64, p_e: f64) -> Result<f64> {
    if m_outstanding == 0 {
        return Err(Error::invalid("m_outstanding", "must be at least 1"));
    }
    if m_missing == 0 {
        return Err(Error::invalid("m_missing", "must be at least 1"));
    }
    if n1 == 0 {
        return Err(Error::invalid("n1", "must be at least 1"));
    }
    check_p(p_e, "p_e")?;
    let logs = binomial_tail_logs(m_outstanding, m_missing, p_e);
    Ok((n1 as f64 * logs.log_upper).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive DP over trial outcomes: P(j successes in t trials), summed
    /// into the upper tail. Independent of the log-space evaluation path.
    fn dp_upper_tail(t: u64, k: u64, s: f64) -> f64 {
        let t = t as usize;
        let k = k as usize;
        let mut row = vec![0.0f64; t + 1];
        row[0] = 1.0;
        for trial in 1..=t {
            for j in (1..=trial).rev() {
                row[j] = row[j] * (1.0 - s) + row[j - 1] * s;
            }
            row[0] *= 1.0 - s;
        }
        row.iter().skip(k).sum()
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(per_node_completion_discrete(10, 0, 0.1).is_err());
        assert!(per_node_completion_discrete(10, 2, 1.0).is_err());
        assert!(per_node_completion_discrete(10, 2, -0.1).is_err());
        assert!(DiscreteParams::new(10, 0.2, 0).is_err());
        assert!(beta_hat(0, 1, 1, 0.1).is_err());
        assert!(beta_hat(5, 5, 0, 0.1).is_err());
    }

    #[test]
    fn too_few_slots_gives_zero() {
        assert_eq!(per_node_completion_discrete(5, 10, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn lossless_channel_completes_in_k_slots() {
        assert_eq!(per_node_completion_discrete(10, 10, 0.0).unwrap(), 1.0);
        assert_eq!(per_node_completion_discrete(9, 10, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn paper_anchor_value_pinned_by_direct_summation() {
        // Direct-summation oracle value for P(Bin(21, 0.8) >= 10); the
        // completion-probability curve crosses 0.7 between t=20 and t=21.
        let v = per_node_completion_discrete(21, 10, 0.2).unwrap();
        let oracle = dp_upper_tail(21, 10, 0.8);
        assert!((v - oracle).abs() < 1e-13, "{v} vs {oracle}");
        assert!((v - 0.999805934248342).abs() < 1e-12);
        let beta = v.powi(1000);
        assert!((beta - 0.8235882382).abs() < 1e-7);
    }

    #[test]
    fn beta_matches_per_node_for_single_receiver() {
        let params = DiscreteParams::new(10, 0.35, 1).unwrap();
        for t in [10u64, 15, 25, 60] {
            let b = beta_discrete(t, &params);
            let v = per_node_completion_discrete(t, 10, 0.35).unwrap();
            assert!((b - v).abs() <= 1e-15 * v.max(1.0));
        }
    }

    #[test]
    fn dp_oracle_equivalence_small_grid() {
        // Spec'd oracle range: t <= 60, k <= 12, absolute 1e-10.
        for &p_e in &[0.05, 0.2, 0.5, 0.8] {
            for k in 1..=12u64 {
                for t in 0..=60u64 {
                    let got = per_node_completion_discrete(t, k, p_e).unwrap();
                    let want = if t < k { 0.0 } else { dp_upper_tail(t, k, 1.0 - p_e) };
                    assert!(
                        (got - want).abs() < 1e-10,
                        "t={t} k={k} p_e={p_e}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn first_time_paper_anchors() {
        let p1 = DiscreteParams::new(10, 0.2, 1000).unwrap();
        assert_eq!(first_time_discrete(0.7, &p1).unwrap(), 21);
        let p2 = DiscreteParams::new(10, 0.5, 1000).unwrap();
        assert_eq!(first_time_discrete(0.7, &p2).unwrap(), 40);
        let p3 = DiscreteParams::new(1, 0.0, 1).unwrap();
        assert_eq!(first_time_discrete(0.5, &p3).unwrap(), 1);
    }

    #[test]
    fn first_time_is_the_first_crossing() {
        let params = DiscreteParams::new(25, 0.3, 500).unwrap();
        for &bs in &[0.1, 0.5, 0.9, 0.999] {
            let t = first_time_discrete(bs, &params).unwrap();
            assert!(beta_discrete(t, &params) >= bs);
            assert!(t == 0 || beta_discrete(t - 1, &params) < bs);
        }
    }

    #[test]
    fn straggler_stats_lossless_edge() {
        let params = DiscreteParams::new(100, 0.0, 50).unwrap();
        let st = straggler_stats(100, &params).unwrap();
        assert_eq!(st.mean, 0.0);
        assert_eq!(st.pmf[0], 1.0);
    }

    #[test]
    fn straggler_pmf_consistency() {
        let params = DiscreteParams::new(20, 0.25, 400).unwrap();
        let t = 30;
        let st = straggler_stats(t, &params).unwrap();
        let total: f64 = st.pmf.iter().sum();
        assert!((total - 1.0).abs() < 1e-9, "pmf sums to {total}");
        let mean_direct: f64 = st
            .pmf
            .iter()
            .enumerate()
            .map(|(i, p)| i as f64 * p)
            .sum();
        assert!((mean_direct - st.mean).abs() < 1e-9);
        assert!((st.mean - st.mean_by_tail_sum()).abs() < 1e-9);
        // pmf(0) agrees with the all-complete probability.
        assert!((st.pmf[0] - beta_discrete(t, &params)).abs() < 1e-9);
        // closed form n*q to 1e-12
        let q = 1.0 - per_node_completion_discrete(t, 20, 0.25).unwrap();
        assert!((st.mean - 400.0 * q).abs() < 1e-12);
    }

    #[test]
    fn beta_hat_trivial_cases() {
        assert_eq!(beta_hat(5, 5, 1, 0.0).unwrap(), 1.0);
        assert!((beta_hat(1, 1, 1, 0.5).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derived_bound_rounds_up() {
        assert_eq!(derived_missing_bound(13, 0.2), 11); // ceil(10.4)
        assert_eq!(derived_missing_bound(5, 0.0), 5);
        assert_eq!(derived_missing_bound(10, 0.5), 5);
    }
}
