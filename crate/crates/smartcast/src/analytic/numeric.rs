//! Log-domain binomial and Poisson mass/tail evaluation.
//!
//! Direct summation of `C(t,j) p^(t-j) (1-p)^j` loses all precision once the
//! tail is small or `t` is large, so each mass term is evaluated through the
//! saddle-point decomposition used by R's `dbinom` (Loader's `stirlerr`/`bd0`
//! split). Tail sums then run in the scale of the largest term with
//! compensated accumulation, which keeps ~13 significant digits up to
//! `t = 1e5`.

pub(crate) const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_2PI: f64 = 1.837_877_066_409_345_6;

/// ln(n!) for exactly representable factorials (18! < 2^53).
fn ln_factorial_small(n: u64) -> f64 {
    debug_assert!(n <= 18);
    let mut f = 1u64;
    for i in 2..=n {
        f *= i;
    }
    (f as f64).ln()
}

/// Stirling series error: stirlerr(n) = ln(n!) - [(n+1/2)ln(n) - n + ln(sqrt(2*pi))].
pub(crate) fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;

    if n <= 18.0 && n == n.floor() {
        return ln_factorial_small(n as u64) - (n + 0.5) * n.ln() + n - LN_SQRT_2PI;
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `bd0(x, np) = x*ln(x/np) + np - x`, evaluated by series when
/// `x ~ np` to avoid cancellation.
pub(crate) fn bd0(x: f64, np: f64) -> f64 {
    if !x.is_finite() || !np.is_finite() || np == 0.0 {
        return f64::NAN;
    }
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        if s.abs() < f64::MIN_POSITIVE {
            return s;
        }
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
    }
    x * (x / np).ln() + np - x
}

/// ln of `1 - p` given `p`, accurate on both ends of [0,1].
fn ln_complement(p: f64) -> f64 {
    if p > 0.5 {
        // 1 - p is exact by Sterbenz for p in [0.5, 1].
        (1.0 - p).ln()
    } else {
        (-p).ln_1p()
    }
}

/// log Binomial(t, s) pmf at j. `s` is the per-trial success probability and
/// `f` its complement, passed separately so the caller controls which of the
/// pair is exact.
pub(crate) fn log_binom_pmf(j: u64, t: u64, s: f64, f: f64) -> f64 {
    debug_assert!(j <= t);
    if s == 0.0 {
        return if j == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if f == 0.0 {
        return if j == t { 0.0 } else { f64::NEG_INFINITY };
    }
    let tf = t as f64;
    if j == 0 {
        return tf * ln_complement(s);
    }
    if j == t {
        return tf * ln_complement(f);
    }
    let jf = j as f64;
    let lc = stirlerr(tf) - stirlerr(jf) - stirlerr(tf - jf) - bd0(jf, tf * s) - bd0(tf - jf, tf * f);
    let lf = LN_2PI + jf.ln() + (-jf / tf).ln_1p();
    lc - 0.5 * lf
}

/// log Poisson(x) pmf at j.
pub(crate) fn log_pois_pmf(j: u64, x: f64) -> f64 {
    if x == 0.0 {
        return if j == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if j == 0 {
        return -x;
    }
    let jf = j as f64;
    -stirlerr(jf) - bd0(jf, x) - 0.5 * (LN_2PI + jf.ln())
}

/// Kahan-compensated accumulator.
#[derive(Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, term: f64) {
        let y = term - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum
    }
}

/// log of `sum(exp(terms))`, pivoted on the largest term.
fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = KahanSum::default();
    for &lp in terms {
        acc.add((lp - m).exp());
    }
    m + acc.value().ln()
}

/// ln(1 - e^x) for x <= 0, switching between `ln_1p` and `expm1` forms.
pub(crate) fn ln_one_minus_exp(x: f64) -> f64 {
    debug_assert!(x <= 0.0);
    if x < -std::f64::consts::LN_2 {
        (-x.exp()).ln_1p()
    } else {
        (-x.exp_m1()).ln()
    }
}

/// Both binomial tails of Binomial(t, 1 - p_e) around `k`, in log space:
/// `log_lower = ln P(X <= k-1)` and `log_upper = ln P(X >= k)`.
///
/// Only the tail away from the mode is summed term-by-term; the other side is
/// recovered through the complement, so each result keeps its relative
/// accuracy wherever it is the small one.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BinomialTailLogs {
    pub log_lower: f64,
    pub log_upper: f64,
}

pub(crate) fn binomial_tail_logs(t: u64, k: u64, p_e: f64) -> BinomialTailLogs {
    let s = 1.0 - p_e;
    if k == 0 {
        return BinomialTailLogs {
            log_lower: f64::NEG_INFINITY,
            log_upper: 0.0,
        };
    }
    if t < k {
        return BinomialTailLogs {
            log_lower: 0.0,
            log_upper: f64::NEG_INFINITY,
        };
    }
    if p_e == 0.0 {
        return BinomialTailLogs {
            log_lower: f64::NEG_INFINITY,
            log_upper: 0.0,
        };
    }
    let mean = t as f64 * s;
    if (k as f64) <= mean {
        // Lower tail is the small side.
        let terms: Vec<f64> = (0..k).map(|j| log_binom_pmf(j, t, s, p_e)).collect();
        let log_lower = log_sum_exp(&terms).min(0.0);
        BinomialTailLogs {
            log_lower,
            log_upper: ln_one_minus_exp(log_lower),
        }
    } else {
        let terms: Vec<f64> = (k..=t).map(|j| log_binom_pmf(j, t, s, p_e)).collect();
        let log_upper = log_sum_exp(&terms).min(0.0);
        BinomialTailLogs {
            log_lower: ln_one_minus_exp(log_upper),
            log_upper,
        }
    }
}

/// ln P(Poisson(x) <= k-1), i.e. the log of `Gamma(k, x)/Gamma(k)` for
/// integer `k >= 1`.
pub(crate) fn log_poisson_cdf_below(k: u64, x: f64) -> f64 {
    debug_assert!(k >= 1);
    if x == 0.0 {
        return 0.0;
    }
    let terms: Vec<f64> = (0..k).map(|j| log_pois_pmf(j, x)).collect();
    log_sum_exp(&terms).min(0.0)
}
